use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use georobust_core::gates::{solve_phase_jumps, GateFamily, GateSpec};
use georobust_core::harness::config::{parse_families, BetaRange};
use georobust_core::harness::report::{format_src, format_table1};
use georobust_core::harness::{check_src, sweep_beta, sweep_grid, table1, SweepConfig};
use georobust_core::{Error, Result};

#[derive(Parser)]
#[command(name = "georobust", version, about = "Robust geometric gate construction and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one gate schedule and write it with a solver report.
    Build(BuildArgs),
    /// Fidelity against the Rabi error for each family (CSV).
    SweepBeta(SweepArgs),
    /// Fidelity difference to the dynamical gate over (beta, gamma) (CSV).
    SweepGrid(SweepArgs),
    /// NOT-gate robustness table.
    ReportTable1(ReportArgs),
    /// Super-robust condition residuals of the geometric families.
    CheckSrc(GateArgs),
}

#[derive(Args, Clone)]
struct GateArgs {
    /// Named gate: not, y, z, hadamard, s, t, id.
    #[arg(long, default_value = "not")]
    gate: String,
    /// Custom axis polar angle (overrides --gate when any custom flag is set).
    #[arg(long)]
    theta: Option<f64>,
    /// Custom axis azimuth.
    #[arg(long)]
    phi: Option<f64>,
    /// Custom rotation angle.
    #[arg(long)]
    angle: Option<f64>,
}

impl GateArgs {
    fn spec(&self) -> Result<GateSpec> {
        if self.theta.is_none() && self.phi.is_none() && self.angle.is_none() {
            return GateSpec::named(&self.gate);
        }
        GateSpec::new(
            self.theta.unwrap_or(FRAC_PI_2),
            self.phi.unwrap_or(0.0),
            self.angle.unwrap_or(std::f64::consts::PI),
        )
    }

    fn is_default(&self) -> bool {
        self.gate == "not" && self.theta.is_none() && self.phi.is_none() && self.angle.is_none()
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    family: String,
    #[command(flatten)]
    gate: GateArgs,
    /// Schedule output path; the solver report goes to `<out>.report`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated families or `all`.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    gate: GateArgs,
    #[arg(long, allow_hyphen_values = true)]
    beta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_points: Option<usize>,
    /// Comma-separated decoherence rates.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    steps_per_pi: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(p) => SweepConfig::from_file(p).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", p.display())),
                other => other,
            })?,
            None => SweepConfig::default(),
        };
        if let Some(f) = &self.family {
            cfg.families = parse_families(f)?;
        }
        if !self.gate.is_default() {
            cfg.gate = self.gate.spec()?;
        }
        let range = BetaRange {
            min: self.beta_min,
            max: self.beta_max,
            points: self.beta_points,
        };
        if range.is_set() {
            cfg.betas = range.grid();
        }
        if let Some(g) = &self.gamma {
            let mut tmp = SweepConfig::default();
            tmp.apply_text(&format!("gammas = {g}"))?;
            cfg.gammas = tmp.gammas;
        }
        if let Some(s) = self.steps_per_pi {
            cfg.steps_per_pi = s;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = georobust_core::simulate::DEFAULT_STEPS_PER_PI)]
    steps_per_pi: usize,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_build(args: &BuildArgs) -> Result<()> {
    let family: GateFamily = args.family.parse()?;
    let spec = args.gate.spec()?;
    let sol = solve_phase_jumps(family, &spec)?;
    let mut report = String::new();
    let _ = writeln!(report, "family={}", family.name());
    let _ = writeln!(report, "converged={}", sol.converged);
    let _ = writeln!(report, "residual_gate={:.16e}", sol.residual_gate);
    let _ = writeln!(report, "residual_src={:.16e}", sol.residual_src);
    let _ = writeln!(report, "duration={:.16e}", sol.schedule.duration());
    let phases: Vec<String> = sol.phases.iter().map(|p| format!("{p:.16e}")).collect();
    let _ = writeln!(report, "phases={}", phases.join(","));
    match &args.out {
        Some(p) => {
            fs::write(p, sol.schedule.to_text())?;
            let mut rp = p.clone().into_os_string();
            rp.push(".report");
            fs::write(PathBuf::from(rp), &report)?;
        }
        None => {
            print!("{}", sol.schedule.to_text());
            eprint!("{report}");
        }
    }
    if !sol.converged {
        return Err(Error::SolverFailed {
            family: family.name().into(),
            residual_src: sol.residual_src,
            residual_gate: sol.residual_gate,
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(args) => cmd_build(&args),
        Command::SweepBeta(args) => {
            let cfg = args.config()?;
            info!("sweep-beta: {} families x {} betas x {} gammas", cfg.families.len(), cfg.betas.len(), cfg.gammas.len());
            let res = sweep_beta(&cfg)?;
            emit(&res.to_csv(), cfg.out.as_deref())
        }
        Command::SweepGrid(args) => {
            let cfg = args.config()?;
            let res = sweep_grid(&cfg)?;
            emit(&res.to_csv(), cfg.out.as_deref())
        }
        Command::ReportTable1(args) => {
            let rows = table1(args.steps_per_pi, args.jobs)?;
            emit(&format_table1(&rows), args.out.as_deref())?;
            if rows.iter().all(|r| r.pass) {
                Ok(())
            } else {
                Err(Error::InvariantViolation("table rows failed".into()))
            }
        }
        Command::CheckSrc(gate) => {
            let rows = check_src(&gate.spec()?)?;
            print!("{}", format_src(&rows));
            if rows.iter().all(|r| r.pass) {
                Ok(())
            } else {
                Err(Error::InvariantViolation("SRC check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

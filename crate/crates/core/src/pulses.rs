//! Pulse schedules, drive Hamiltonians and the quasi-static error injector.
//!
//! A schedule is a list of flat-top segments `(duration, amplitude, phase)`.
//! For the two-level system the drive is `H01 = (Omega/2) e^{i phi}`. For the
//! three-level Lambda system (basis `|0>, |1>, |e>`) the drive couples the
//! bright state `|b> = sin(theta/2) e^{i phi}|0> + cos(theta/2)|1>` to `|e>`
//! as `(Omega/2)(e^{-i phi_1}|b><e| + h.c.)`, leaving the dark state
//! `|d> = cos(theta/2) e^{i phi}|0> - sin(theta/2)|1>` untouched.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{SquareOperator, StateVector, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl PulseSegment {
    pub fn new(duration: f64, amplitude: f64, phase: f64) -> Result<Self> {
        let seg = Self {
            duration,
            amplitude,
            phase,
        };
        seg.validate()?;
        Ok(seg)
    }

    /// Unit-amplitude segment with the given pulse area.
    pub fn with_area(area: f64, phase: f64) -> Result<Self> {
        Self::new(area, 1.0, phase)
    }

    pub fn area(&self) -> f64 {
        self.amplitude * self.duration
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "segment duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "segment amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidSchedule("segment phase is not finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    TwoLevel,
    ThreeLevelLambda,
}

impl System {
    pub fn dim(self) -> usize {
        match self {
            System::TwoLevel => 2,
            System::ThreeLevelLambda => 3,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            System::TwoLevel => "two",
            System::ThreeLevelLambda => "lambda",
        }
    }
}

/// Frame parameters of a schedule.
///
/// Three-level: mixing angle `theta` and relative phase `phi` of the bright
/// state. Two-level: `theta` is the initial polar angle `alpha_R(0)` of the
/// auxiliary frame and `phi` is unused (kept at 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    pub theta: f64,
    pub phi: f64,
}

impl FrameParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidSchedule(format!(
                "frame theta must lie in [0, pi], got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidSchedule("frame phi is not finite".into()));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    system: System,
    frame: FrameParams,
    segments: Vec<PulseSegment>,
}

impl PulseSchedule {
    pub fn new(system: System, frame: FrameParams, segments: Vec<PulseSegment>) -> Result<Self> {
        for seg in &segments {
            seg.validate()?;
        }
        let frame = FrameParams::new(frame.theta, frame.phi)?;
        Ok(Self {
            system,
            frame,
            segments,
        })
    }

    /// Two-level schedule whose auxiliary frame starts at polar angle `alpha0`.
    pub fn two_level(alpha0: f64, segments: Vec<PulseSegment>) -> Result<Self> {
        Self::new(System::TwoLevel, FrameParams::new(alpha0, 0.0)?, segments)
    }

    pub fn lambda(theta: f64, phi: f64, segments: Vec<PulseSegment>) -> Result<Self> {
        Self::new(
            System::ThreeLevelLambda,
            FrameParams::new(theta, phi)?,
            segments,
        )
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn frame(&self) -> FrameParams {
        self.frame
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Start time of every segment.
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration;
                start
            })
            .collect()
    }

    /// Auxiliary polar angle `alpha` at the start of each segment, plus the
    /// final value as the last element.
    pub fn alpha_marks(&self) -> Vec<f64> {
        let alpha0 = match self.system {
            System::TwoLevel => self.frame.theta,
            System::ThreeLevelLambda => 0.0,
        };
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut alpha = alpha0;
        out.push(alpha);
        for seg in &self.segments {
            alpha += seg.area();
            out.push(alpha);
        }
        out
    }

    /// Index of the segment active at `t` (right-continuous; `t = duration`
    /// maps to the last segment).
    pub fn segment_index_at(&self, t: f64) -> Result<usize> {
        let duration = self.duration();
        if self.segments.is_empty() || t < 0.0 || t > duration {
            return Err(Error::TimeOutOfRange { t, duration });
        }
        let mut end = 0.0;
        for (k, seg) in self.segments.iter().enumerate() {
            end += seg.duration;
            if t < end {
                return Ok(k);
            }
        }
        Ok(self.segments.len() - 1)
    }

    /// Drive Hamiltonian of segment `k`.
    pub fn segment_hamiltonian(&self, k: usize) -> SquareOperator {
        let seg = &self.segments[k];
        match self.system {
            System::TwoLevel => two_level_drive(seg.amplitude, seg.phase),
            System::ThreeLevelLambda => {
                lambda_drive(seg.amplitude, seg.phase, self.frame.theta, self.frame.phi)
            }
        }
    }

    pub fn hamiltonian(&self, t: f64) -> Result<SquareOperator> {
        Ok(self.segment_hamiltonian(self.segment_index_at(t)?))
    }

    pub fn pulse_area(&self) -> f64 {
        pulse_area(self)
    }

    pub fn bright_state(&self) -> Result<StateVector> {
        self.require(System::ThreeLevelLambda)?;
        Ok(bright_state(self.frame.theta, self.frame.phi))
    }

    pub fn dark_state(&self) -> Result<StateVector> {
        self.require(System::ThreeLevelLambda)?;
        Ok(dark_state(self.frame.theta, self.frame.phi))
    }

    fn require(&self, system: System) -> Result<()> {
        if self.system != system {
            return Err(Error::SystemMismatch(format!(
                "expected {system:?} schedule, got {:?}",
                self.system
            )));
        }
        Ok(())
    }

    /// Line-oriented text form: a header `system=<two|lambda> theta=<v> phi=<v>`
    /// followed by one `duration amplitude phase` line per segment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "system={} theta={} phi={}",
            self.system.tag(),
            fmt_full(self.frame.theta),
            fmt_full(self.frame.phi)
        );
        for seg in &self.segments {
            let _ = writeln!(
                out,
                "{} {} {}",
                fmt_full(seg.duration),
                fmt_full(seg.amplitude),
                fmt_full(seg.phase)
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut system = None;
        let mut theta = None;
        let mut phi = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or(Error::Parse {
                line: 1,
                message: format!("malformed header field `{field}`"),
            })?;
            match key {
                "system" => {
                    system = Some(match value {
                        "two" => System::TwoLevel,
                        "lambda" => System::ThreeLevelLambda,
                        other => {
                            return Err(Error::Parse {
                                line: 1,
                                message: format!("unknown system `{other}`"),
                            })
                        }
                    })
                }
                "theta" => theta = Some(parse_f64(value, 1)?),
                "phi" => phi = Some(parse_f64(value, 1)?),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unknown header key `{other}`"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            message: format!("header is missing `{what}`"),
        };
        let system = system.ok_or_else(|| missing("system"))?;
        let frame = FrameParams {
            theta: theta.ok_or_else(|| missing("theta"))?,
            phi: phi.ok_or_else(|| missing("phi"))?,
        };
        let mut segments = Vec::new();
        for (idx, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            segments.push(PulseSegment {
                duration: parse_f64(fields[0], idx + 1)?,
                amplitude: parse_f64(fields[1], idx + 1)?,
                phase: parse_f64(fields[2], idx + 1)?,
            });
        }
        // Frame phi is stored as printed; only validation happens here.
        for seg in &segments {
            seg.validate()?;
        }
        if !(0.0..=PI).contains(&frame.theta) || !(0.0..TAU).contains(&frame.phi) {
            return Err(Error::InvalidSchedule(format!(
                "frame parameters out of range: theta={}, phi={}",
                frame.theta, frame.phi
            )));
        }
        Ok(Self {
            system,
            frame,
            segments,
        })
    }
}

impl fmt::Display for PulseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Full-precision float formatting (17 significant digits, round-trips exactly).
pub(crate) fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("bad number `{s}`: {e}"),
    })
}

fn two_level_drive(amplitude: f64, phase: f64) -> SquareOperator {
    let coupling = C64::from_polar(0.5 * amplitude, phase);
    SquareOperator::from_rows(&[[ZERO, coupling], [coupling.conj(), ZERO]])
}

fn lambda_drive(amplitude: f64, phase1: f64, theta: f64, phi: f64) -> SquareOperator {
    let b = bright_state(theta, phi);
    let c = C64::from_polar(0.5 * amplitude, -phase1);
    let mut h = SquareOperator::zeros(3);
    for i in 0..2 {
        let v = c * b[i];
        h.set(i, 2, v);
        h.set(2, i, v.conj());
    }
    h
}

pub fn bright_state(theta: f64, phi: f64) -> StateVector {
    StateVector::from_slice(&[
        C64::from_polar((theta / 2.0).sin(), phi),
        C64::new((theta / 2.0).cos(), 0.0),
        ZERO,
    ])
}

pub fn dark_state(theta: f64, phi: f64) -> StateVector {
    StateVector::from_slice(&[
        C64::from_polar((theta / 2.0).cos(), phi),
        C64::new(-(theta / 2.0).sin(), 0.0),
        ZERO,
    ])
}

pub fn excited_state() -> StateVector {
    StateVector::from_slice(&[ZERO, ZERO, ONE])
}

/// Two-level drive Hamiltonian at time `t`.
pub fn hamiltonian_2level(schedule: &PulseSchedule, t: f64) -> Result<SquareOperator> {
    schedule.require(System::TwoLevel)?;
    schedule.hamiltonian(t)
}

/// Three-level Lambda drive Hamiltonian at time `t` (basis `|0>, |1>, |e>`).
pub fn hamiltonian_3level(schedule: &PulseSchedule, t: f64) -> Result<SquareOperator> {
    schedule.require(System::ThreeLevelLambda)?;
    schedule.hamiltonian(t)
}

/// Sum of amplitude x duration over all segments.
pub fn pulse_area(schedule: &PulseSchedule) -> f64 {
    schedule.segments.iter().map(PulseSegment::area).sum()
}

pub type NoiseOperatorFn = Arc<dyn Fn(f64) -> SquareOperator + Send + Sync>;

#[derive(Clone)]
pub enum ErrorKind {
    /// `V(t) = H(t)`: a relative deviation of every drive amplitude.
    GlobalRabi,
    /// Arbitrary Hermitian `V(t)`.
    Custom(NoiseOperatorFn),
}

impl fmt::Debug for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::GlobalRabi => f.write_str("GlobalRabi"),
            ErrorKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Quasi-static control error `H -> H + beta V`.
#[derive(Debug, Clone)]
pub struct ErrorModel {
    kind: ErrorKind,
    beta: f64,
}

pub const MAX_BETA: f64 = 0.5;
const WARN_BETA: f64 = 0.1;

impl ErrorModel {
    pub fn new(kind: ErrorKind, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta.abs() > MAX_BETA {
            return Err(Error::InvalidErrorModel(format!(
                "|beta| must not exceed {MAX_BETA}, got {beta}"
            )));
        }
        if beta.abs() > WARN_BETA {
            warn!("|beta| = {} exceeds the usual sweep range of {WARN_BETA}", beta.abs());
        }
        Ok(Self { kind, beta })
    }

    pub fn none() -> Self {
        Self {
            kind: ErrorKind::GlobalRabi,
            beta: 0.0,
        }
    }

    pub fn global(beta: f64) -> Result<Self> {
        Self::new(ErrorKind::GlobalRabi, beta)
    }

    pub fn custom<F>(beta: f64, v: F) -> Result<Self>
    where
        F: Fn(f64) -> SquareOperator + Send + Sync + 'static,
    {
        Self::new(ErrorKind::Custom(Arc::new(v)), beta)
    }

    pub fn kind(&self) -> &ErrorKind {
        &self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_global(&self) -> bool {
        matches!(self.kind, ErrorKind::GlobalRabi)
    }

    /// Noise operator `V(t)` given the ideal Hamiltonian at `t`.
    pub fn noise_operator(&self, h: &SquareOperator, t: f64) -> Result<SquareOperator> {
        match &self.kind {
            ErrorKind::GlobalRabi => Ok(*h),
            ErrorKind::Custom(v) => {
                let v = v(t);
                if v.dim() != h.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: h.dim(),
                        got: v.dim(),
                    });
                }
                Ok(v)
            }
        }
    }
}

/// `H + beta V(t)`; `(1 + beta) H` for the global Rabi error.
pub fn apply_error(h: &SquareOperator, model: &ErrorModel, t: f64) -> Result<SquareOperator> {
    match &model.kind {
        ErrorKind::GlobalRabi => Ok(h.scale_real(1.0 + model.beta)),
        ErrorKind::Custom(_) => {
            let v = model.noise_operator(h, t)?;
            Ok(*h + v.scale_real(model.beta))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_y, pauli_z, HERMITIAN_TOL};

    fn one_segment(amplitude: f64, phase: f64) -> PulseSchedule {
        PulseSchedule::two_level(0.0, vec![PulseSegment::new(1.0, amplitude, phase).unwrap()])
            .unwrap()
    }

    #[test]
    fn two_level_zero_phase_is_sigma_x() {
        let h = hamiltonian_2level(&one_segment(1.0, 0.0), 0.5).unwrap();
        assert!(h.max_abs_diff(&pauli_x().scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn two_level_quarter_phase_is_minus_sigma_y() {
        let h = hamiltonian_2level(&one_segment(1.0, PI / 2.0), 0.5).unwrap();
        assert!(h.max_abs_diff(&pauli_y().scale_real(-0.5)) < 1e-15);
        assert!((h.get(0, 1) - C64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn two_level_spectrum() {
        for (amp, ph) in [(1.0, 0.3), (0.7, -2.0), (2.5, 4.0)] {
            let h = hamiltonian_2level(&one_segment(amp, ph), 0.1).unwrap();
            assert!(h.trace().norm() < 1e-15);
            let (vals, _) = h.eigh().unwrap();
            assert!((vals[0] + amp / 2.0).abs() < 1e-12);
            assert!((vals[1] - amp / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn time_outside_schedule_is_rejected() {
        let s = one_segment(1.0, 0.0);
        assert!(matches!(
            hamiltonian_2level(&s, 1.5),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(matches!(
            hamiltonian_3level(&s, 0.5),
            Err(Error::SystemMismatch(_))
        ));
    }

    #[test]
    fn equal_weight_bright_state_couplings() {
        let s = PulseSchedule::lambda(PI / 2.0, 0.0, vec![PulseSegment::new(1.0, 1.0, 0.0).unwrap()])
            .unwrap();
        let h = hamiltonian_3level(&s, 0.2).unwrap();
        let expected = 1.0 / (2.0 * 2f64.sqrt());
        assert!((h.get(0, 2) - C64::new(expected, 0.0)).norm() < 1e-15);
        assert!((h.get(1, 2) - C64::new(expected, 0.0)).norm() < 1e-15);
        assert!(h.is_hermitian(HERMITIAN_TOL));
    }

    #[test]
    fn dark_state_is_annihilated_and_bright_couples() {
        let params = [(0.3, 1.1, 0.4, 1.3), (2.8, 5.9, -1.0, 0.6), (PI, 0.0, 2.0, 1.0)];
        for (theta, phi, phase1, amp) in params {
            let s = PulseSchedule::lambda(
                theta,
                phi,
                vec![PulseSegment::new(1.0, amp, phase1).unwrap()],
            )
            .unwrap();
            let h = s.hamiltonian(0.5).unwrap();
            let d = s.dark_state().unwrap();
            let b = s.bright_state().unwrap();
            assert!(h.apply(&d).norm() < 1e-15);
            let be = h.matrix_element(&b, &excited_state());
            assert!((be - C64::from_polar(amp / 2.0, -phase1)).norm() < 1e-15);
            assert!(b.inner(&d).norm() < 1e-15);
        }
    }

    #[test]
    fn error_injection() {
        let h = pauli_x().scale_real(0.5);
        let unchanged = apply_error(&h, &ErrorModel::global(0.0).unwrap(), 0.0).unwrap();
        assert_eq!(unchanged, h);
        let scaled = apply_error(&h, &ErrorModel::global(0.1).unwrap(), 0.0).unwrap();
        assert!(scaled.max_abs_diff(&h.scale_real(1.1)) < 1e-15);
        let custom = ErrorModel::custom(0.05, |_| pauli_z()).unwrap();
        let added = apply_error(&h, &custom, 0.3).unwrap();
        assert!(added.max_abs_diff(&(h + pauli_z().scale_real(0.05))) < 1e-15);
        assert!(added.is_hermitian(HERMITIAN_TOL));
    }

    #[test]
    fn custom_error_dimension_mismatch() {
        let model = ErrorModel::custom(0.05, |_| SquareOperator::identity(3)).unwrap();
        let r = apply_error(&pauli_x(), &model, 0.0);
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 2, got: 3 })));
    }

    #[test]
    fn beta_bound_is_enforced() {
        assert!(ErrorModel::global(0.6).is_err());
        assert!(ErrorModel::global(-0.5).is_ok());
    }

    #[test]
    fn pulse_areas() {
        let s = PulseSchedule::two_level(0.0, vec![PulseSegment::with_area(PI, 0.0).unwrap()]).unwrap();
        assert!((pulse_area(&s) - PI).abs() < 1e-15);
        let empty = PulseSchedule::two_level(0.0, vec![]).unwrap();
        assert_eq!(pulse_area(&empty), 0.0);
    }

    #[test]
    fn invalid_segments_are_rejected() {
        assert!(PulseSegment::new(0.0, 1.0, 0.0).is_err());
        assert!(PulseSegment::new(1.0, -1.0, 0.0).is_err());
        assert!(FrameParams::new(4.0, 0.0).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = PulseSchedule::lambda(
            1.234567890123,
            5.5,
            vec![
                PulseSegment::new(PI, 1.0, 0.1 + 0.2).unwrap(),
                PulseSegment::new(PI / 3.0, 0.75, -2.0 * PI / 3.0).unwrap(),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.starts_with("system=lambda theta="));
        let back = PulseSchedule::from_text(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(PulseSchedule::from_text("").is_err());
        assert!(PulseSchedule::from_text("system=two theta=0\n").is_err());
        assert!(PulseSchedule::from_text("system=two theta=0 phi=0\n1 2\n").is_err());
        assert!(PulseSchedule::from_text("system=three theta=0 phi=0\n").is_err());
    }
}

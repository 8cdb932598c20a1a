//! Local flip channels acting independently on the two qubits.
//!
//! Every channel here has the two-operator form {√(1−p/2) I, √(p/2) σ}. For a
//! Markovian schedule p = 1 − e^{−γt}; for the non-Markovian (random
//! telegraph) schedule p = 1 − Λ(ν) with Λ a damped oscillator.
//!
//! Evolution is available two ways: a generic operator-sum engine working on
//! 4×4 matrices, and closed-form maps on the Bell-diagonal coefficients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{c64, lift, BellDiagonalState, DensityMatrix4, Matrix4c, Pauli, Side};

/// Agreement required between the operator-sum engine and the closed forms.
pub const ENGINE_TOLERANCE: f64 = 1e-12;
const CRITICAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipType {
    BitFlip,
    BitPhaseFlip,
    PhaseFlip,
}

impl FlipType {
    pub const ALL: [FlipType; 3] = [
        FlipType::BitFlip,
        FlipType::BitPhaseFlip,
        FlipType::PhaseFlip,
    ];

    pub fn axis(self) -> Pauli {
        match self {
            FlipType::BitFlip => Pauli::X,
            FlipType::BitPhaseFlip => Pauli::Y,
            FlipType::PhaseFlip => Pauli::Z,
        }
    }

    pub fn from_axis(axis: Pauli) -> FlipType {
        match axis {
            Pauli::X => FlipType::BitFlip,
            Pauli::Y => FlipType::BitPhaseFlip,
            Pauli::Z => FlipType::PhaseFlip,
        }
    }
}

/// How the flip probability depends on time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSchedule {
    /// p(t) = 1 − e^{−γt}, γ in 1/s.
    Markovian { gamma: f64 },
    /// p(ν) = 1 − Λ(ν), a in 1/s, τ in s, ν = t/(2τ).
    NonMarkovian { a: f64, tau: f64 },
}

impl NoiseSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSchedule::Markovian { gamma } if !(gamma >= 0.0 && gamma.is_finite()) => {
                Err(Error::Domain(format!(
                    "decay rate gamma = {gamma} must be finite and >= 0"
                )))
            }
            NoiseSchedule::NonMarkovian { a, tau }
                if !(a > 0.0 && tau > 0.0 && a.is_finite() && tau.is_finite()) =>
            {
                Err(Error::Domain(format!(
                    "kernel parameters a = {a}, tau = {tau} must be > 0"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_markovian(&self) -> bool {
        matches!(self, NoiseSchedule::Markovian { .. })
    }

    /// 1 − p at the schedule's native time: t for Markovian, ν for non-Markovian.
    pub fn decay_factor(&self, time: f64) -> Result<f64> {
        if time.is_nan() || time < 0.0 {
            return Err(Error::Domain(format!("time {time} must be >= 0")));
        }
        match *self {
            NoiseSchedule::Markovian { gamma } => Ok((-gamma * time).exp()),
            NoiseSchedule::NonMarkovian { a, tau } => lambda_kernel(time, a, tau),
        }
    }

    /// Flip probability at the schedule's native time.
    pub fn p_of_t(&self, time: f64) -> Result<f64> {
        Ok(1.0 - self.decay_factor(time)?)
    }

    /// 1 − p at physical time t (seconds); non-Markovian schedules convert to ν.
    pub fn decay_factor_at_seconds(&self, t: f64) -> Result<f64> {
        match *self {
            NoiseSchedule::Markovian { .. } => self.decay_factor(t),
            NoiseSchedule::NonMarkovian { tau, .. } => {
                self.decay_factor(dimensionless_time(t, tau))
            }
        }
    }
}

/// ν = t / (2τ).
pub fn dimensionless_time(t: f64, tau: f64) -> f64 {
    t / (2.0 * tau)
}

/// μ = √((4aτ)² − 1) in the oscillatory regime 4aτ > 1.
pub fn oscillation_frequency(a: f64, tau: f64) -> Option<f64> {
    let w = 4.0 * a * tau;
    (w > 1.0 + CRITICAL_TOL).then(|| (w * w - 1.0).sqrt())
}

/// Λ(ν) = e^{−ν}[cos(μν) + sin(μν)/μ] with μ = √((4aτ)² − 1).
///
/// For 4aτ < 1 the hyperbolic continuation e^{−ν}[cosh(μ̃ν) + sinh(μ̃ν)/μ̃],
/// μ̃ = √(1 − (4aτ)²), is used, and at 4aτ = 1 the critical limit (1 + ν)e^{−ν}.
/// The result always lies in [−1, 1].
pub fn lambda_kernel(nu: f64, a: f64, tau: f64) -> Result<f64> {
    if nu.is_nan() || nu < 0.0 || a.is_nan() || a <= 0.0 || tau.is_nan() || tau <= 0.0 {
        return Err(Error::Domain(format!(
            "kernel needs nu >= 0, a > 0, tau > 0 (got nu = {nu}, a = {a}, tau = {tau})"
        )));
    }
    let w = 4.0 * a * tau;
    let value = if (w - 1.0).abs() <= CRITICAL_TOL {
        (1.0 + nu) * (-nu).exp()
    } else if w > 1.0 {
        let mu = (w * w - 1.0).sqrt();
        let (s, c) = (mu * nu).sin_cos();
        (-nu).exp() * (c + s / mu)
    } else {
        let m = (1.0 - w * w).sqrt();
        let slow = (-(1.0 - m) * nu).exp();
        let fast = (-(1.0 + m) * nu).exp();
        let sinh_part = if m * nu < 1.0 {
            (m * nu).sinh() / m * (-nu).exp()
        } else {
            0.5 * (slow - fast) / m
        };
        0.5 * (slow + fast) + sinh_part
    };
    Ok(value.clamp(-1.0, 1.0))
}

/// One local channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub flip: FlipType,
    pub schedule: NoiseSchedule,
}

/// The quantity a trajectory is parametrized by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// Flip probability of side A; side B gets p′ = x·p.
    P,
    /// Dimensionless time of side A; side B gets ν′ = x·ν.
    Nu,
    /// Physical time; side B runs at x·t.
    T,
}

/// Two independent local channels with time-parameter ratio x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelPair {
    pub channel_a: ChannelSpec,
    pub channel_b: ChannelSpec,
    pub x: f64,
}

impl ChannelPair {
    pub fn new(channel_a: ChannelSpec, channel_b: ChannelSpec, x: f64) -> Result<Self> {
        let pair = ChannelPair {
            channel_a,
            channel_b,
            x,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.x) {
            return Err(Error::Domain(format!(
                "ratio x = {} outside [0, 1]",
                self.x
            )));
        }
        self.channel_a.schedule.validate()?;
        self.channel_b.schedule.validate()
    }

    pub fn is_same_type(&self) -> bool {
        self.channel_a.flip == self.channel_b.flip
    }

    pub fn is_markovian(&self) -> bool {
        self.channel_a.schedule.is_markovian() && self.channel_b.schedule.is_markovian()
    }

    pub fn is_non_markovian(&self) -> bool {
        !self.channel_a.schedule.is_markovian() && !self.channel_b.schedule.is_markovian()
    }

    /// (1 − p, 1 − p′) at a sweep point. For non-Markovian sides this is
    /// (Λ(ν), Λ(ν′)).
    pub fn decay_factors(&self, variable: SweepVariable, value: f64) -> Result<(f64, f64)> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "sweep value {value} must be finite and >= 0"
            )));
        }
        match variable {
            SweepVariable::P => {
                if value > 2.0 {
                    return Err(Error::WeightOutOfRange { p: value });
                }
                Ok((1.0 - value, 1.0 - self.x * value))
            }
            SweepVariable::Nu => {
                if !self.is_non_markovian() {
                    return Err(Error::Domain(
                        "a nu sweep requires non-Markovian schedules on both sides".into(),
                    ));
                }
                Ok((
                    self.channel_a.schedule.decay_factor(value)?,
                    self.channel_b.schedule.decay_factor(self.x * value)?,
                ))
            }
            SweepVariable::T => Ok((
                self.channel_a.schedule.decay_factor_at_seconds(value)?,
                self.channel_b
                    .schedule
                    .decay_factor_at_seconds(self.x * value)?,
            )),
        }
    }

    /// (p, p′) at a sweep point.
    pub fn flip_probabilities(&self, variable: SweepVariable, value: f64) -> Result<(f64, f64)> {
        let (fa, fb) = self.decay_factors(variable, value)?;
        Ok((1.0 - fa, 1.0 - fb))
    }
}

/// Kraus operators lifted to the two-qubit space.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    operators: Vec<Matrix4c>,
}

impl KrausSet {
    pub fn operators(&self) -> &[Matrix4c] {
        &self.operators
    }

    /// max entry of |Σ E†E − I|.
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Matrix4c::zeros(), |acc, e| acc + e.adjoint() * e);
        (sum - Matrix4c::identity())
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// {√(1 − p/2) I, √(p/2) σ} on `side`.
pub fn kraus_set(spec: &ChannelSpec, side: Side, p: f64) -> Result<KrausSet> {
    if !(0.0..=2.0).contains(&p) {
        return Err(Error::WeightOutOfRange { p });
    }
    let keep = (1.0 - 0.5 * p).sqrt();
    let flip = (0.5 * p).sqrt();
    Ok(KrausSet {
        operators: vec![
            Matrix4c::identity() * c64(keep, 0.0),
            lift(&spec.flip.axis().matrix(), side) * c64(flip, 0.0),
        ],
    })
}

/// ρ(t) = Σᵢⱼ Eᵢ^A Eⱼ^B ρ(0) Eⱼ^B† Eᵢ^A†.
pub fn apply_pair_generic(
    rho0: &DensityMatrix4,
    pair: &ChannelPair,
    variable: SweepVariable,
    value: f64,
) -> Result<DensityMatrix4> {
    let (pa, pb) = pair.flip_probabilities(variable, value)?;
    let ka = kraus_set(&pair.channel_a, Side::A, pa)?;
    let kb = kraus_set(&pair.channel_b, Side::B, pb)?;
    let mut out = Matrix4c::zeros();
    for ea in ka.operators() {
        for eb in kb.operators() {
            let e = ea * eb;
            out += e * rho0.matrix() * e.adjoint();
        }
    }
    DensityMatrix4::new(out)
}

/// Closed-form evolution of (c1, c2, c3).
///
/// A side multiplies cᵢ by its decay factor exactly when its flip Pauli
/// anticommutes with σᵢ, i.e. for the two axes other than its own.
pub fn coefficient_map(
    pair: &ChannelPair,
    s0: &BellDiagonalState,
    variable: SweepVariable,
    value: f64,
) -> Result<BellDiagonalState> {
    let (fa, fb) = pair.decay_factors(variable, value)?;
    map_with_factors(pair.channel_a.flip, pair.channel_b.flip, s0, fa, fb)
}

pub(crate) fn map_with_factors(
    flip_a: FlipType,
    flip_b: FlipType,
    s0: &BellDiagonalState,
    factor_a: f64,
    factor_b: f64,
) -> Result<BellDiagonalState> {
    let mut c = s0.coefficients();
    for axis in Pauli::ALL {
        if axis != flip_a.axis() {
            c[axis.slot()] *= factor_a;
        }
        if axis != flip_b.axis() {
            c[axis.slot()] *= factor_b;
        }
    }
    BellDiagonalState::with_tolerance(c, crate::quantum::EPS_EVOLVED)
}

/// Result of cross-checking the closed-form map against the engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub checks: usize,
    pub max_deviation: f64,
}

fn random_sweep_point<R: Rng + ?Sized>(pair: &ChannelPair, rng: &mut R) -> (SweepVariable, f64) {
    if pair.is_markovian() {
        if rng.gen_bool(0.5) {
            (SweepVariable::P, rng.gen_range(0.0..=1.0))
        } else {
            let gamma_max = [pair.channel_a.schedule, pair.channel_b.schedule]
                .iter()
                .map(|s| match s {
                    NoiseSchedule::Markovian { gamma } => *gamma,
                    NoiseSchedule::NonMarkovian { .. } => 0.0,
                })
                .fold(0.0_f64, f64::max);
            let horizon = if gamma_max > 0.0 {
                5.0 / gamma_max
            } else {
                10.0
            };
            (SweepVariable::T, rng.gen_range(0.0..=horizon))
        }
    } else if pair.is_non_markovian() && rng.gen_bool(0.5) {
        (SweepVariable::Nu, rng.gen_range(0.0..=40.0))
    } else {
        (SweepVariable::T, rng.gen_range(0.0..=100.0))
    }
}

/// Compare `extract ∘ apply_pair_generic` with `coefficient_map` on random
/// states and sweep points, plus the t = 0 corner (and p = 1 for Markovian
/// pairs).
pub fn verify_pairing<R: Rng + ?Sized>(
    pair: &ChannelPair,
    samples: usize,
    rng: &mut R,
) -> Result<PairingReport> {
    if samples == 0 {
        return Err(Error::Domain(
            "verify_pairing needs at least one sample".into(),
        ));
    }
    pair.validate()?;
    let mut points = vec![(SweepVariable::T, 0.0)];
    if pair.is_markovian() {
        points.push((SweepVariable::P, 0.0));
        points.push((SweepVariable::P, 1.0));
    }
    let mut report = PairingReport {
        checks: 0,
        max_deviation: 0.0,
    };
    let mut worst: Option<(f64, BellDiagonalState, f64)> = None;
    for k in 0..samples + points.len() {
        let state = BellDiagonalState::random(rng);
        let (variable, value) = if k < points.len() {
            points[k]
        } else {
            random_sweep_point(pair, rng)
        };
        let engine = apply_pair_generic(&state.to_density_matrix(), pair, variable, value)?
            .extract_coefficients()?;
        let closed = coefficient_map(pair, &state, variable, value)?;
        let deviation = engine
            .coefficients()
            .iter()
            .zip(closed.coefficients())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        report.checks += 1;
        if deviation > report.max_deviation {
            report.max_deviation = deviation;
            worst = Some((deviation, state, value));
        }
    }
    if report.max_deviation > ENGINE_TOLERANCE {
        let (deviation, state, sweep_value) = worst.expect("deviation recorded");
        return Err(Error::Mismatch {
            deviation,
            state,
            sweep_value,
            x: pair.x,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn markovian(flip: FlipType) -> ChannelSpec {
        ChannelSpec {
            flip,
            schedule: NoiseSchedule::Markovian { gamma: 1.0 },
        }
    }

    fn telegraph(flip: FlipType) -> ChannelSpec {
        ChannelSpec {
            flip,
            schedule: NoiseSchedule::NonMarkovian { a: 1.0, tau: 5.0 },
        }
    }

    #[test]
    fn kernel_reference_values() {
        assert_eq!(lambda_kernel(0.0, 1.0, 5.0).unwrap(), 1.0);
        assert_eq!(lambda_kernel(0.0, 0.01, 5.0).unwrap(), 1.0);
        let mu = oscillation_frequency(1.0, 5.0).unwrap();
        assert!((mu - 399f64.sqrt()).abs() < 1e-12);
        assert!((mu - 19.97498).abs() < 1e-5);

        let half_period = std::f64::consts::PI / mu;
        let at_half = lambda_kernel(half_period, 1.0, 5.0).unwrap();
        assert!((at_half + (-half_period).exp()).abs() < 1e-14);
        assert!(at_half < 0.0);
    }

    #[test]
    fn kernel_first_zero_by_bisection() {
        // Λ = 0 ⇔ tan(μν) = −μ, first root in (π/(2μ), π/μ).
        let mu = 399f64.sqrt();
        let expected = (std::f64::consts::PI - mu.atan()) / mu;
        let (mut lo, mut hi) = (0.0, std::f64::consts::PI / mu);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lambda_kernel(mid, 1.0, 5.0).unwrap() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - expected).abs() < 1e-13);
    }

    #[test]
    fn kernel_branches_are_continuous_at_critical_point() {
        let nu = 1.7;
        let critical = lambda_kernel(nu, 0.25, 1.0).unwrap();
        assert!((critical - (1.0 + nu) * (-nu).exp()).abs() < 1e-15);
        let over = lambda_kernel(nu, 0.25 * (1.0 - 1e-7), 1.0).unwrap();
        let under = lambda_kernel(nu, 0.25 * (1.0 + 1e-7), 1.0).unwrap();
        assert!((over - critical).abs() < 1e-6);
        assert!((under - critical).abs() < 1e-6);
        // Far overdamped: stays positive and never overflows.
        let v = lambda_kernel(5000.0, 0.01, 1.0).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn kernel_rejects_bad_inputs() {
        assert!(lambda_kernel(-1.0, 1.0, 5.0).is_err());
        assert!(lambda_kernel(1.0, 0.0, 5.0).is_err());
        assert!(lambda_kernel(1.0, 1.0, -5.0).is_err());
        assert!(lambda_kernel(f64::NAN, 1.0, 5.0).is_err());
    }

    #[test]
    fn flip_probability_schedules() {
        let m = NoiseSchedule::Markovian { gamma: 1.0 };
        assert_eq!(m.p_of_t(0.0).unwrap(), 0.0);
        assert!((m.p_of_t(2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((m.p_of_t(50.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(m.p_of_t(-1.0).is_err());
        let nm = NoiseSchedule::NonMarkovian { a: 1.0, tau: 5.0 };
        assert_eq!(nm.p_of_t(0.0).unwrap(), 0.0);
        assert_eq!(
            nm.decay_factor_at_seconds(10.0).unwrap(),
            nm.decay_factor(1.0).unwrap()
        );
    }

    #[test]
    fn kraus_sets_reference_cases() {
        let spec = markovian(FlipType::PhaseFlip);
        let identity = kraus_set(&spec, Side::A, 0.0).unwrap();
        assert_eq!(identity.operators()[0], Matrix4c::identity());
        assert_eq!(identity.operators()[1], Matrix4c::zeros());

        let half = kraus_set(&spec, Side::A, 1.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sz = lift(&Pauli::Z.matrix(), Side::A);
        assert!((half.operators()[1] - sz * c64(r, 0.0))
            .iter()
            .all(|z| z.norm() < 1e-15));
        assert!((half.operators()[0] - Matrix4c::identity() * c64(r, 0.0))
            .iter()
            .all(|z| z.norm() < 1e-15));

        let full = kraus_set(&telegraph(FlipType::BitFlip), Side::B, 2.0).unwrap();
        assert_eq!(full.operators()[0], Matrix4c::zeros());
        assert_eq!(full.operators()[1], lift(&Pauli::X.matrix(), Side::B));

        for set in [identity, half, full] {
            assert!(set.completeness_deviation() < 1e-12);
        }
        assert!(matches!(
            kraus_set(&spec, Side::A, 2.5),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            kraus_set(&spec, Side::A, -0.1),
            Err(Error::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn pair_validation() {
        let a = markovian(FlipType::PhaseFlip);
        assert!(ChannelPair::new(a, a, 1.5).is_err());
        assert!(ChannelPair::new(a, a, -0.1).is_err());
        let bad = ChannelSpec {
            flip: FlipType::BitFlip,
            schedule: NoiseSchedule::NonMarkovian { a: 0.0, tau: 1.0 },
        };
        assert!(ChannelPair::new(a, bad, 0.5).is_err());
        let pair = ChannelPair::new(a, a, 0.5).unwrap();
        assert!(pair.decay_factors(SweepVariable::Nu, 1.0).is_err());
    }

    #[test]
    fn engine_at_time_zero_is_identity() {
        let s = BellDiagonalState::new(0.1, 0.5, 0.3).unwrap();
        let rho = s.to_density_matrix();
        let pair = ChannelPair::new(
            markovian(FlipType::BitFlip),
            markovian(FlipType::PhaseFlip),
            0.7,
        )
        .unwrap();
        let out = apply_pair_generic(&rho, &pair, SweepVariable::T, 0.0).unwrap();
        assert!((out.matrix() - rho.matrix())
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn printed_maps_match_engine() {
        let s = BellDiagonalState::new(0.1, 0.5, 0.3).unwrap();
        let rho = s.to_density_matrix();
        let (p, x) = (0.37, 0.6);
        let pp = x * p;

        let same = ChannelPair::new(
            markovian(FlipType::PhaseFlip),
            markovian(FlipType::PhaseFlip),
            x,
        )
        .unwrap();
        let engine = apply_pair_generic(&rho, &same, SweepVariable::P, p)
            .unwrap()
            .extract_coefficients()
            .unwrap()
            .coefficients();
        let f = (1.0 - p) * (1.0 - pp);
        let printed = [0.1 * f, 0.5 * f, 0.3];
        for (a, b) in engine.iter().zip(printed) {
            assert!((a - b).abs() < 1e-12);
        }

        let mixed = ChannelPair::new(
            markovian(FlipType::BitFlip),
            markovian(FlipType::PhaseFlip),
            x,
        )
        .unwrap();
        let engine = apply_pair_generic(&rho, &mixed, SweepVariable::P, p)
            .unwrap()
            .extract_coefficients()
            .unwrap()
            .coefficients();
        let printed = [
            (1.0 - pp) * 0.1,
            (1.0 - p) * (1.0 - pp) * 0.5,
            (1.0 - p) * 0.3,
        ];
        for (a, b) in engine.iter().zip(printed) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficient_map_examples() {
        let s = BellDiagonalState::new(0.1, 0.5, 0.3).unwrap();
        // (1 − p)² = 0.5 with x = 1.
        let p = 1.0 - 0.5f64.sqrt();
        let same = ChannelPair::new(
            markovian(FlipType::PhaseFlip),
            markovian(FlipType::PhaseFlip),
            1.0,
        )
        .unwrap();
        let c = coefficient_map(&same, &s, SweepVariable::P, p)
            .unwrap()
            .coefficients();
        assert!((c[0] - 0.05).abs() < 1e-15 && (c[1] - 0.25).abs() < 1e-15 && c[2] == 0.3);

        let mixed = ChannelPair::new(
            markovian(FlipType::BitFlip),
            markovian(FlipType::PhaseFlip),
            0.3,
        )
        .unwrap();
        assert_eq!(
            coefficient_map(&mixed, &s, SweepVariable::T, 0.0).unwrap(),
            s
        );

        let nm = ChannelPair::new(
            telegraph(FlipType::PhaseFlip),
            telegraph(FlipType::PhaseFlip),
            1.0,
        )
        .unwrap();
        let mu = 399f64.sqrt();
        let first_zero = (std::f64::consts::PI - mu.atan()) / mu;
        let c = coefficient_map(&nm, &s, SweepVariable::Nu, first_zero)
            .unwrap()
            .coefficients();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15 && c[2] == 0.3);
    }

    #[test]
    fn verify_pairing_all_combinations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fa in FlipType::ALL {
            for fb in FlipType::ALL {
                for (a, b) in [
                    (markovian(fa), markovian(fb)),
                    (telegraph(fa), telegraph(fb)),
                ] {
                    for x in [0.0, 0.45, 1.0] {
                        let pair = ChannelPair::new(a, b, x).unwrap();
                        let report = verify_pairing(&pair, 20, &mut rng).unwrap();
                        assert!(report.max_deviation < ENGINE_TOLERANCE);
                    }
                }
            }
        }
        let pair = ChannelPair::new(
            markovian(FlipType::BitFlip),
            markovian(FlipType::BitFlip),
            1.0,
        )
        .unwrap();
        assert!(verify_pairing(&pair, 0, &mut rng).is_err());
    }
}

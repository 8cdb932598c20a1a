//! Trajectories, sudden-change points, regime labels and frozen discord.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{coefficient_map, ChannelPair, NoiseSchedule, SweepVariable};
use crate::correlations::{correlations, CorrelationTriple};
use crate::error::{Error, Result};
use crate::quantum::{BellDiagonalState, Pauli};

/// Below this χ the argmax axis carries no information.
const DEGENERATE_CHI: f64 = 1e-12;
/// Bisection stops once the bracket is this narrow (relative to max(1, |v|)).
const REFINE_WIDTH: f64 = 1e-13;
/// Default tolerance on the variation of Q inside a frozen interval.
pub const FROZEN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    /// p ∈ [0, 1], 1001 points.
    pub fn markovian_default() -> Self {
        Sweep {
            variable: SweepVariable::P,
            start: 0.0,
            stop: 1.0,
            steps: 1001,
        }
    }

    /// ν ∈ [0, 40], 4001 points.
    pub fn non_markovian_default() -> Self {
        Sweep {
            variable: SweepVariable::Nu,
            start: 0.0,
            stop: 40.0,
            steps: 4001,
        }
    }

    pub fn validate(&self, pair: &ChannelPair) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "sweep.steps = {} must be >= 2",
                self.steps
            )));
        }
        if !(self.start >= 0.0 && self.stop > self.start && self.stop.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sweep range [{}, {}] must satisfy 0 <= start < stop",
                self.start, self.stop
            )));
        }
        if self.variable == SweepVariable::P {
            let markovian =
                pair.channel_a.schedule.is_markovian() || pair.channel_b.schedule.is_markovian();
            let limit = if markovian { 1.0 } else { 2.0 };
            if self.stop > limit {
                return Err(Error::InvalidConfig(format!(
                    "sweep.stop = {} exceeds {limit} for a p sweep",
                    self.stop
                )));
            }
        }
        if self.variable == SweepVariable::Nu && !pair.is_non_markovian() {
            return Err(Error::InvalidConfig(
                "a nu sweep needs non-Markovian schedules on both channels".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub sweep_value: f64,
    /// Physical time of side A at this point; NaN when undefined.
    pub t_equivalent: f64,
    pub coeffs: BellDiagonalState,
    pub correlations: CorrelationTriple,
    pub chi_axis: Pauli,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub initial: BellDiagonalState,
    pub pair: ChannelPair,
    pub variable: SweepVariable,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    fn coefficients_at(&self, value: f64) -> Result<BellDiagonalState> {
        coefficient_map(&self.pair, &self.initial, self.variable, value)
    }
}

fn t_equivalent(pair: &ChannelPair, variable: SweepVariable, value: f64) -> f64 {
    match (variable, pair.channel_a.schedule) {
        (SweepVariable::T, _) => value,
        (SweepVariable::Nu, NoiseSchedule::NonMarkovian { tau, .. }) => 2.0 * tau * value,
        (SweepVariable::P, NoiseSchedule::Markovian { gamma }) if gamma > 0.0 => {
            if value < 1.0 {
                -(-value).ln_1p() / gamma
            } else {
                f64::INFINITY
            }
        }
        _ => f64::NAN,
    }
}

/// Evaluate the closed-form dynamics on a uniform sweep grid.
pub fn simulate(s0: &BellDiagonalState, pair: &ChannelPair, sweep: &Sweep) -> Result<Trajectory> {
    pair.validate()?;
    sweep.validate(pair)?;
    let samples = sweep
        .values()
        .into_par_iter()
        .map(|v| {
            let coeffs = coefficient_map(pair, s0, sweep.variable, v)?;
            Ok(Sample {
                sweep_value: v,
                t_equivalent: t_equivalent(pair, sweep.variable, v),
                correlations: correlations(&coeffs)?,
                chi_axis: coeffs.chi_axis(),
                coeffs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        initial: *s0,
        pair: *pair,
        variable: sweep.variable,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChangeKind {
    ArgmaxSwitch,
    FrozenDiscordOnset,
    OscillationZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChangePoint {
    pub sweep_value: f64,
    pub kind: ChangeKind,
    /// Argmax axis just before and just after the point.
    pub axes: (Pauli, Pauli),
}

fn narrow_enough(lo: f64, hi: f64) -> bool {
    hi - lo <= REFINE_WIDTH * hi.abs().max(1.0)
}

fn refine_switch(
    traj: &Trajectory,
    mut lo: f64,
    hi: f64,
    from: Pauli,
    to: Pauli,
    out: &mut Vec<ChangePoint>,
) -> Result<()> {
    let mut right = hi;
    for _ in 0..200 {
        if narrow_enough(lo, right) {
            break;
        }
        let mid = 0.5 * (lo + right);
        if traj.coefficients_at(mid)?.chi_axis() == from {
            lo = mid;
        } else {
            right = mid;
        }
    }
    let landed = traj.coefficients_at(right)?.chi_axis();
    out.push(ChangePoint {
        sweep_value: 0.5 * (lo + right),
        kind: ChangeKind::ArgmaxSwitch,
        axes: (from, landed),
    });
    if landed != to && right < hi {
        refine_switch(traj, right, hi, landed, to, out)?;
    }
    Ok(())
}

/// Every switch of the argmax axis between adjacent samples, refined by
/// bisection on the closed-form map. Brackets touching a state with χ ≈ 0
/// are skipped since the argmax is undefined there.
pub fn find_change_points(traj: &Trajectory) -> Result<Vec<ChangePoint>> {
    let mut out = Vec::new();
    for w in traj.samples.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        if l.chi_axis == r.chi_axis
            || l.coeffs.chi() < DEGENERATE_CHI
            || r.coeffs.chi() < DEGENERATE_CHI
        {
            continue;
        }
        refine_switch(
            traj,
            l.sweep_value,
            r.sweep_value,
            l.chi_axis,
            r.chi_axis,
            &mut out,
        )?;
    }
    Ok(out)
}

/// Sign changes of Λ on either non-Markovian side, refined by bisection.
pub fn find_oscillation_zeros(traj: &Trajectory) -> Result<Vec<ChangePoint>> {
    if traj.variable == SweepVariable::P {
        return Ok(Vec::new());
    }
    let oscillating = [
        !traj.pair.channel_a.schedule.is_markovian(),
        !traj.pair.channel_b.schedule.is_markovian() && traj.pair.x > 0.0,
    ];
    let factor = |v: f64, side: usize| -> Result<f64> {
        let (fa, fb) = traj.pair.decay_factors(traj.variable, v)?;
        Ok(if side == 0 { fa } else { fb })
    };
    let mut out: Vec<ChangePoint> = Vec::new();
    for w in traj.samples.windows(2) {
        for side in (0..2).filter(|&s| oscillating[s]) {
            let (mut lo, mut hi) = (w[0].sweep_value, w[1].sweep_value);
            let positive_lo = factor(lo, side)? > 0.0;
            if positive_lo == (factor(hi, side)? > 0.0) {
                continue;
            }
            for _ in 0..200 {
                if narrow_enough(lo, hi) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if (factor(mid, side)? > 0.0) == positive_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            if out.iter().any(|c| (c.sweep_value - root).abs() < 1e-9) {
                continue;
            }
            out.push(ChangePoint {
                sweep_value: root,
                kind: ChangeKind::OscillationZero,
                axes: (w[0].chi_axis, w[1].chi_axis),
            });
        }
    }
    out.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    MonotoneDecay,
    ClassicalConstant,
    SingleSuddenChange,
    DoubleSuddenChange,
    OscillatorySameType,
    OscillatoryMixed,
}

/// Coefficient-relation regime of an initial state under a channel pair.
///
/// Markovian pairs are read with p′ = x·p. With x = 0 only side A acts, so a
/// mixed pair behaves like a same-type pair with A's flip axis.
pub fn classify_regime(s0: &BellDiagonalState, pair: &ChannelPair) -> Result<RegimeLabel> {
    pair.validate()?;
    let mags = s0.coefficients().map(f64::abs);
    let axis_a = pair.channel_a.flip.axis();
    let one_sided = pair.is_same_type() || pair.x == 0.0;
    let oscillatory = if pair.x == 0.0 {
        !pair.channel_a.schedule.is_markovian()
    } else {
        !pair.is_markovian()
    };

    if one_sided {
        let own = mags[axis_a.slot()];
        let others = Pauli::ALL
            .iter()
            .filter(|&&ax| ax != axis_a)
            .map(|ax| mags[ax.slot()])
            .fold(0.0_f64, f64::max);
        return Ok(if own >= others && own > 0.0 {
            RegimeLabel::ClassicalConstant
        } else if oscillatory {
            RegimeLabel::OscillatorySameType
        } else if own == 0.0 {
            RegimeLabel::MonotoneDecay
        } else {
            RegimeLabel::SingleSuddenChange
        });
    }
    if oscillatory {
        return Ok(RegimeLabel::OscillatoryMixed);
    }
    Ok(
        match mixed_switch_count(mags, axis_a, pair.channel_b.flip.axis(), pair.x) {
            0 => RegimeLabel::MonotoneDecay,
            1 => RegimeLabel::SingleSuddenChange,
            _ => RegimeLabel::DoubleSuddenChange,
        },
    )
}

/// Number of argmax switches for p ∈ [0, 1) under a mixed Markovian pair.
///
/// With a, b, k the magnitudes on A's axis, B's axis and the third axis, the
/// decay laws are a(1 − p′), b(1 − p), k(1 − p)(1 − p′).
fn mixed_switch_count(mags: [f64; 3], axis_a: Pauli, axis_b: Pauli, x: f64) -> usize {
    let axis_k = Pauli::ALL
        .into_iter()
        .find(|&ax| ax != axis_a && ax != axis_b)
        .expect("mixed pair leaves a third axis");
    let (a, b, k) = (
        mags[axis_a.slot()],
        mags[axis_b.slot()],
        mags[axis_k.slot()],
    );
    // b(1 − p) = a(1 − xp) lands at p = 1 when x = 1.
    let b_to_a = a > 0.0 && x < 1.0;
    if a >= b && a >= k {
        0
    } else if b >= a && b >= k {
        usize::from(b_to_a)
    } else if a >= b {
        usize::from(a > 0.0)
    } else {
        // k > b > a: k hands over to b at (1 − b/k)/x or to a at 1 − a/k,
        // whichever comes first.
        let threshold = (k - b) / (k - a);
        if x > threshold {
            1 + usize::from(b_to_a)
        } else {
            usize::from(a > 0.0)
        }
    }
}

/// A maximal sweep interval on which Q stays constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrozenInterval {
    pub start: f64,
    pub end: f64,
    pub discord: f64,
    /// Initial state is of the form c1 = k, c2 = −c3·k with |k| > |c3|.
    pub special_family: bool,
    /// The whole trajectory sits at χ ≈ 0, so Q is trivially constant.
    pub degenerate: bool,
}

pub fn in_frozen_family(s: &BellDiagonalState) -> bool {
    let [c1, c2, c3] = s.coefficients();
    (c2 + c3 * c1).abs() <= 1e-12 && c1.abs() > c3.abs()
}

/// Maximal runs of samples over which Q varies by at most `tol` while C
/// does vary. Interval ends are extended to an argmax switch that falls
/// between the last frozen sample and the next one.
pub fn detect_frozen_discord(traj: &Trajectory, tol: f64) -> Result<Vec<FrozenInterval>> {
    let samples = &traj.samples;
    let special_family = in_frozen_family(&traj.initial);
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    if samples.iter().all(|s| s.coeffs.chi() < DEGENERATE_CHI) {
        return Ok(vec![FrozenInterval {
            start: samples[0].sweep_value,
            end: samples[samples.len() - 1].sweep_value,
            discord: samples[0].correlations.quantum,
            special_family,
            degenerate: true,
        }]);
    }
    let switches = find_change_points(traj)?;
    let switch_between = |lo: f64, hi: f64| {
        switches
            .iter()
            .map(|c| c.sweep_value)
            .find(|&v| v > lo && v < hi)
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < samples.len() {
        let q0 = samples[i].correlations.quantum;
        let c0 = samples[i].correlations.classical;
        let (mut q_lo, mut q_hi, mut c_lo, mut c_hi) = (q0, q0, c0, c0);
        let mut j = i;
        while j + 1 < samples.len() {
            let q = samples[j + 1].correlations.quantum;
            if q.max(q_hi) - q.min(q_lo) > tol {
                break;
            }
            q_lo = q_lo.min(q);
            q_hi = q_hi.max(q);
            let c = samples[j + 1].correlations.classical;
            c_lo = c_lo.min(c);
            c_hi = c_hi.max(c);
            j += 1;
        }
        if j > i && c_hi - c_lo > tol {
            let mut start = samples[i].sweep_value;
            let mut end = samples[j].sweep_value;
            if i > 0 {
                if let Some(v) = switch_between(samples[i - 1].sweep_value, start) {
                    start = v;
                }
            }
            if j + 1 < samples.len() {
                if let Some(v) = switch_between(end, samples[j + 1].sweep_value) {
                    end = v;
                }
            }
            out.push(FrozenInterval {
                start,
                end,
                discord: 0.5 * (q_lo + q_hi),
                special_family,
                degenerate: false,
            });
        }
        i = if j > i { j + 1 } else { i + 1 };
    }
    Ok(out)
}

/// Argmax switches, Λ zeros and frozen-discord onsets, ordered by sweep value.
pub fn detect_events(traj: &Trajectory, frozen_tol: f64) -> Result<Vec<ChangePoint>> {
    let mut events = find_change_points(traj)?;
    events.extend(find_oscillation_zeros(traj)?);
    for interval in detect_frozen_discord(traj, frozen_tol)? {
        if interval.degenerate {
            continue;
        }
        let axis = traj
            .coefficients_at(0.5 * (interval.start + interval.end))?
            .chi_axis();
        events.push(ChangePoint {
            sweep_value: interval.start,
            kind: ChangeKind::FrozenDiscordOnset,
            axes: (axis, axis),
        });
    }
    events.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
    Ok(events)
}

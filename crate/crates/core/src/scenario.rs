//! Scenario configuration, figure presets, cross-checks and file output.
//! The `belldyn` binary is a thin wrapper over this module.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    verify_pairing, ChannelPair, ChannelSpec, FlipType, NoiseSchedule, SweepVariable,
    ENGINE_TOLERANCE,
};
use crate::correlations::{correlations, correlations_oracle, OracleGrid};
use crate::dynamics::{
    classify_regime, detect_events, detect_frozen_discord, simulate, ChangeKind, RegimeLabel,
    Sweep, Trajectory, FROZEN_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::quantum::{BellDiagonalState, Pauli};

/// Required agreement between the measurement oracle and the closed forms.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

pub const CSV_HEADER: &str = "x,sweep_value,c1,c2,c3,I,C,Q,chi_axis";

/// x grid used by every figure preset.
pub const PRESET_X_VALUES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: PathBuf,
}

impl OutputSpec {
    /// `<dir>/<stem>.summary.json` next to the trajectory file.
    pub fn summary_path(&self) -> PathBuf {
        let stem = self
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trajectory".into());
        self.path.with_file_name(format!("{stem}.summary.json"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub initial_state: [f64; 3],
    pub channel_a: ChannelSpec,
    pub channel_b: ChannelSpec,
    pub x_values: Vec<f64>,
    pub sweep: Sweep,
    pub output: OutputSpec,
}

impl ScenarioConfig {
    /// Parse a JSON document; syntax and schema errors carry line/column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Field-level checks. The physicality of `initial_state` is reported
    /// separately as an unphysical-state error.
    pub fn validate(&self) -> Result<()> {
        if self.x_values.is_empty() {
            return Err(Error::InvalidConfig("x_values: must not be empty".into()));
        }
        for (i, x) in self.x_values.iter().enumerate() {
            if !(0.0..=1.0).contains(x) {
                return Err(Error::InvalidConfig(format!(
                    "x_values[{i}] = {x} outside [0, 1]"
                )));
            }
        }
        for (name, spec) in [
            ("channel_a", &self.channel_a),
            ("channel_b", &self.channel_b),
        ] {
            spec.schedule
                .validate()
                .map_err(|e| Error::InvalidConfig(format!("{name}.schedule: {e}")))?;
        }
        for &x in &self.x_values {
            let pair = self.pair(x)?;
            self.sweep
                .validate(&pair)
                .map_err(|e| Error::InvalidConfig(format!("sweep: {e}")))?;
        }
        Ok(())
    }

    pub fn pair(&self, x: f64) -> Result<ChannelPair> {
        ChannelPair::new(self.channel_a, self.channel_b, x)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn initial(&self) -> Result<BellDiagonalState> {
        let [c1, c2, c3] = self.initial_state;
        BellDiagonalState::new(c1, c2, c3)
    }
}

/// CLI exit status for a failed scenario.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::Domain(_) => 2,
        Error::UnphysicalState { .. } | Error::CoefficientOutOfRange { .. } => 3,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigurePreset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 5] = [
        FigurePreset::Fig1,
        FigurePreset::Fig2,
        FigurePreset::Fig3,
        FigurePreset::Fig4,
        FigurePreset::Fig5,
    ];

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn config(self, out_dir: &Path) -> ScenarioConfig {
        // γ only sets t_equivalent; p sweeps do not depend on it.
        let markovian = |flip| ChannelSpec {
            flip,
            schedule: NoiseSchedule::Markovian { gamma: 1.0 },
        };
        let telegraph = |flip| ChannelSpec {
            flip,
            schedule: NoiseSchedule::NonMarkovian { a: 1.0, tau: 5.0 },
        };
        let (initial_state, channel_a, channel_b, sweep) = match self {
            FigurePreset::Fig1 => (
                [0.1, 0.5, 0.3],
                markovian(FlipType::PhaseFlip),
                markovian(FlipType::PhaseFlip),
                Sweep::markovian_default(),
            ),
            FigurePreset::Fig2 => (
                [1.0, -0.5, 0.5],
                markovian(FlipType::PhaseFlip),
                markovian(FlipType::PhaseFlip),
                Sweep::markovian_default(),
            ),
            FigurePreset::Fig3 => (
                [0.1, 0.5, 0.3],
                markovian(FlipType::BitFlip),
                markovian(FlipType::PhaseFlip),
                Sweep::markovian_default(),
            ),
            FigurePreset::Fig4 => (
                [0.1, 0.5, 0.3],
                telegraph(FlipType::PhaseFlip),
                telegraph(FlipType::PhaseFlip),
                Sweep::non_markovian_default(),
            ),
            FigurePreset::Fig5 => (
                [1.0, -0.5, 0.5],
                telegraph(FlipType::PhaseFlip),
                telegraph(FlipType::PhaseFlip),
                Sweep::non_markovian_default(),
            ),
        };
        ScenarioConfig {
            initial_state,
            channel_a,
            channel_b,
            x_values: PRESET_X_VALUES.to_vec(),
            sweep,
            output: OutputSpec {
                format: OutputFormat::Csv,
                path: out_dir.join(format!("fig{}.csv", self.number())),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeEntry {
    pub x: f64,
    pub label: RegimeLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryChangePoint {
    pub x: f64,
    pub sweep_value: f64,
    pub kind: ChangeKind,
    pub axes: (Pauli, Pauli),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryFrozenInterval {
    pub x: f64,
    pub start: f64,
    pub end: f64,
    pub discord: f64,
    pub special_family: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Abscissa of the trajectory rows: "p", "nu" or "t".
    pub sweep_variable: SweepVariable,
    pub initial_state: [f64; 3],
    pub regime: Vec<RegimeEntry>,
    pub change_points: Vec<SummaryChangePoint>,
    pub frozen_intervals: Vec<SummaryFrozenInterval>,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub trajectories: Vec<(f64, Trajectory)>,
    pub summary: Summary,
}

/// One trajectory per x (ascending), with change points, regime labels and
/// frozen intervals collected into the summary. Nothing is written to disk.
pub fn compute_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    config.validate()?;
    let initial = config.initial()?;
    let mut xs = config.x_values.clone();
    xs.sort_by(|a, b| a.total_cmp(b));

    let per_x = xs
        .par_iter()
        .map(|&x| {
            let pair = config.pair(x)?;
            let traj = simulate(&initial, &pair, &config.sweep)?;
            let regime = classify_regime(&initial, &pair)?;
            let events = detect_events(&traj, FROZEN_TOLERANCE)?;
            let frozen = detect_frozen_discord(&traj, FROZEN_TOLERANCE)?;
            Ok((x, traj, regime, events, frozen))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = Summary {
        sweep_variable: config.sweep.variable,
        initial_state: config.initial_state,
        regime: Vec::new(),
        change_points: Vec::new(),
        frozen_intervals: Vec::new(),
    };
    let mut trajectories = Vec::with_capacity(per_x.len());
    for (x, traj, label, events, frozen) in per_x {
        summary.regime.push(RegimeEntry { x, label });
        summary
            .change_points
            .extend(events.into_iter().map(|c| SummaryChangePoint {
                x,
                sweep_value: c.sweep_value,
                kind: c.kind,
                axes: c.axes,
            }));
        summary
            .frozen_intervals
            .extend(frozen.into_iter().map(|f| SummaryFrozenInterval {
                x,
                start: f.start,
                end: f.end,
                discord: f.discord,
                special_family: f.special_family,
                degenerate: f.degenerate,
            }));
        trajectories.push((x, traj));
    }
    Ok(ScenarioOutcome {
        trajectories,
        summary,
    })
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectories_to_csv(trajectories: &[(f64, Trajectory)]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (x, traj) in trajectories {
        for s in &traj.samples {
            let [c1, c2, c3] = s.coeffs.coefficients();
            let corr = &s.correlations;
            let fields = [
                *x,
                s.sweep_value,
                c1,
                c2,
                c3,
                corr.mutual_info,
                corr.classical,
                corr.quantum,
            ];
            for v in fields {
                out.push_str(&fmt17(v));
                out.push(',');
            }
            let _ = writeln!(out, "{}", s.chi_axis.index());
        }
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    x: f64,
    sweep_value: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    #[serde(rename = "I")]
    mutual_info: f64,
    #[serde(rename = "C")]
    classical: f64,
    #[serde(rename = "Q")]
    quantum: f64,
    chi_axis: Pauli,
}

pub fn trajectories_to_json(trajectories: &[(f64, Trajectory)]) -> String {
    let rows: Vec<JsonRow> = trajectories
        .iter()
        .flat_map(|(x, traj)| {
            traj.samples.iter().map(move |s| {
                let [c1, c2, c3] = s.coeffs.coefficients();
                JsonRow {
                    x: *x,
                    sweep_value: s.sweep_value,
                    c1,
                    c2,
                    c3,
                    mutual_info: s.correlations.mutual_info,
                    classical: s.correlations.classical,
                    quantum: s.correlations.quantum,
                    chi_axis: s.chi_axis,
                }
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("rows serialize")
}

/// Compute the scenario and write the trajectory file plus the JSON summary.
/// Returns the paths written.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(ScenarioOutcome, Vec<PathBuf>)> {
    let outcome = compute_scenario(config)?;
    let body = match config.output.format {
        OutputFormat::Csv => trajectories_to_csv(&outcome.trajectories),
        OutputFormat::Json => trajectories_to_json(&outcome.trajectories),
    };
    if let Some(dir) = config
        .output
        .path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
    {
        fs::create_dir_all(dir)?;
    }
    fs::write(&config.output.path, body)?;
    let summary_path = config.output.summary_path();
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&outcome.summary).expect("summary serializes"),
    )?;
    Ok((outcome, vec![config.output.path.clone(), summary_path]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheckReport {
    pub samples: usize,
    pub grid: OracleGrid,
    pub max_classical_deviation: f64,
    pub mean_classical_deviation: f64,
    pub max_discord_deviation: f64,
    pub worst_state: Option<[f64; 3]>,
    pub grid_too_coarse: usize,
    pub passed: bool,
}

/// Oracle vs closed form on the given states.
pub fn oracle_check_states(
    states: &[BellDiagonalState],
    grid: &OracleGrid,
) -> Result<OracleCheckReport> {
    if states.is_empty() {
        return Err(Error::Domain(
            "oracle check needs at least one state".into(),
        ));
    }
    let mut report = OracleCheckReport {
        samples: states.len(),
        grid: *grid,
        max_classical_deviation: 0.0,
        mean_classical_deviation: 0.0,
        max_discord_deviation: 0.0,
        worst_state: None,
        grid_too_coarse: 0,
        passed: false,
    };
    let mut sum = 0.0;
    let mut worst = -1.0;
    for state in states {
        let closed = correlations(state)?;
        let (oracle, result) = correlations_oracle(&state.to_density_matrix(), grid)?;
        let dc = (oracle.classical - closed.classical).abs();
        let dq = (oracle.quantum - closed.quantum).abs();
        sum += dc;
        report.max_classical_deviation = report.max_classical_deviation.max(dc);
        report.max_discord_deviation = report.max_discord_deviation.max(dq);
        if dc.max(dq) > worst {
            worst = dc.max(dq);
            report.worst_state = Some(state.coefficients());
        }
        report.grid_too_coarse += usize::from(result.grid_too_coarse);
    }
    report.mean_classical_deviation = sum / states.len() as f64;
    report.passed = report.max_classical_deviation <= ORACLE_TOLERANCE
        && report.max_discord_deviation <= ORACLE_TOLERANCE;
    Ok(report)
}

/// `samples` seeded random states (rejection sampling from the cube).
pub fn random_states(samples: usize, seed: u64) -> Vec<BellDiagonalState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| BellDiagonalState::random(&mut rng))
        .collect()
}

pub fn oracle_check(samples: usize, grid: &OracleGrid, seed: u64) -> Result<OracleCheckReport> {
    oracle_check_states(&random_states(samples, seed), grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingLine {
    pub flip_a: FlipType,
    pub flip_b: FlipType,
    pub markovian: bool,
    pub checks: usize,
    pub max_deviation: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineCheckReport {
    pub lines: Vec<PairingLine>,
    pub max_deviation: f64,
    pub passed: bool,
}

fn random_schedule<R: Rng>(markovian: bool, rng: &mut R) -> NoiseSchedule {
    if markovian {
        NoiseSchedule::Markovian {
            gamma: rng.gen_range(0.1..3.0),
        }
    } else {
        NoiseSchedule::NonMarkovian {
            a: rng.gen_range(0.02..2.0),
            tau: rng.gen_range(0.5..10.0),
        }
    }
}

/// Operator-sum engine vs closed-form maps over all 9 flip pairings and both
/// schedule kinds. For each combination the first two draws use x = 0 and
/// x = 1; the rest draw x uniformly.
pub fn engine_check(samples: usize, seed: u64) -> Result<EngineCheckReport> {
    if samples == 0 {
        return Err(Error::Domain(
            "engine check needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    for markovian in [true, false] {
        for flip_a in FlipType::ALL {
            for flip_b in FlipType::ALL {
                let mut line = PairingLine {
                    flip_a,
                    flip_b,
                    markovian,
                    checks: 0,
                    max_deviation: 0.0,
                    failure: None,
                };
                for k in 0..samples {
                    let x = match k {
                        0 => 0.0,
                        1 => 1.0,
                        _ => rng.gen_range(0.0..=1.0),
                    };
                    let pair = ChannelPair::new(
                        ChannelSpec {
                            flip: flip_a,
                            schedule: random_schedule(markovian, &mut rng),
                        },
                        ChannelSpec {
                            flip: flip_b,
                            schedule: random_schedule(markovian, &mut rng),
                        },
                        x,
                    )?;
                    match verify_pairing(&pair, 1, &mut rng) {
                        Ok(r) => {
                            line.checks += r.checks;
                            line.max_deviation = line.max_deviation.max(r.max_deviation);
                        }
                        Err(e @ Error::Mismatch { deviation, .. }) => {
                            line.max_deviation = line.max_deviation.max(deviation);
                            line.failure.get_or_insert_with(|| e.to_string());
                        }
                        Err(e) => return Err(e),
                    }
                }
                lines.push(line);
            }
        }
    }
    let max_deviation = lines.iter().fold(0.0_f64, |m, l| m.max(l.max_deviation));
    let passed = max_deviation <= ENGINE_TOLERANCE && lines.iter().all(|l| l.failure.is_none());
    Ok(EngineCheckReport {
        lines,
        max_deviation,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_lookup() {
        assert_eq!(FigurePreset::from_number(1), Some(FigurePreset::Fig1));
        assert_eq!(FigurePreset::from_number(5), Some(FigurePreset::Fig5));
        assert_eq!(FigurePreset::from_number(0), None);
        assert_eq!(FigurePreset::from_number(6), None);
        for p in FigurePreset::ALL {
            assert_eq!(FigurePreset::from_number(p.number()), Some(p));
            p.config(Path::new("out")).validate().unwrap();
        }
    }

    #[test]
    fn summary_path_sits_next_to_output() {
        let spec = OutputSpec {
            format: OutputFormat::Csv,
            path: PathBuf::from("out/fig1.csv"),
        };
        assert_eq!(spec.summary_path(), PathBuf::from("out/fig1.summary.json"));
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = FigurePreset::Fig1.config(Path::new("."));
        cfg.x_values.clear();
        let err = cfg.validate().unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(err.to_string().contains("x_values"));

        let mut cfg = FigurePreset::Fig1.config(Path::new("."));
        cfg.x_values.push(1.5);
        assert_eq!(exit_code(&cfg.validate().unwrap_err()), 2);

        let mut cfg = FigurePreset::Fig1.config(Path::new("."));
        cfg.initial_state = [1.0, 1.0, 1.0];
        assert_eq!(exit_code(&compute_scenario(&cfg).unwrap_err()), 3);

        let err =
            ScenarioConfig::from_json("{\n  \"initial_state\": [0, 0, 0],\n  \"bogus\": 1\n}")
                .unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn csv_layout() {
        let cfg = ScenarioConfig {
            x_values: vec![0.5],
            sweep: Sweep {
                steps: 3,
                ..Sweep::markovian_default()
            },
            ..FigurePreset::Fig1.config(Path::new("."))
        };
        let outcome = compute_scenario(&cfg).unwrap();
        let csv = trajectories_to_csv(&outcome.trajectories);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
        let expected = [
            0.5,
            0.0,
            0.1,
            0.5,
            0.3,
            0.33111964636440705,
            0.18872187554086717,
            0.14239777082353988,
            2.0,
        ];
        for (got, want) in first.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 9);
            for f in &fields[..8] {
                let v: f64 = f.parse().unwrap();
                assert_eq!(fmt17(v), *f);
            }
        }
    }

    #[test]
    fn engine_check_small_run_passes() {
        let report = engine_check(3, 7).unwrap();
        assert_eq!(report.lines.len(), 18);
        assert!(report.passed, "{report:?}");
        assert!(engine_check(0, 7).is_err());
    }

    #[test]
    fn oracle_check_on_forced_zero_state() {
        let report = oracle_check_states(
            &[BellDiagonalState::maximally_mixed()],
            &OracleGrid::default(),
        )
        .unwrap();
        assert!(report.max_classical_deviation < 1e-15);
        assert!(report.passed);
    }
}

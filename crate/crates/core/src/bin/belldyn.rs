use std::path::PathBuf;
use std::process::ExitCode;

use belldyn::correlations::OracleGrid;
use belldyn::scenario::{self, FigurePreset, ScenarioConfig};
use belldyn::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "belldyn",
    version,
    about = "Bell-diagonal correlation dynamics under flip noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config.
    Trajectory {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate one of the five reference scenarios.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        number: u8,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare the measurement-optimisation oracle with the closed forms.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Coarse grid as NTHETAxNPHI.
        #[arg(long, default_value = "181x361", value_parser = parse_grid)]
        grid: OracleGrid,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare Kraus evolution with the closed-form coefficient maps.
    EngineCheck {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_grid(s: &str) -> Result<OracleGrid, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NTHETAxNPHI, got {s:?}"))?;
    let n_theta = a.trim().parse().map_err(|e| format!("n_theta: {e}"))?;
    let n_phi = b.trim().parse().map_err(|e| format!("n_phi: {e}"))?;
    OracleGrid::new(n_theta, n_phi).map_err(|e| e.to_string())
}

fn configure_threads() {
    if let Some(n) = std::env::var("BELLDYN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(scenario::exit_code(err) as u8)
}

fn run_config(config: &ScenarioConfig) -> ExitCode {
    match scenario::run_scenario(config) {
        Ok((outcome, paths)) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            for r in &outcome.summary.regime {
                println!("x = {:<6} {:?}", r.x, r.label);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    configure_threads();
    match Cli::parse().command {
        Command::Trajectory { config } => match ScenarioConfig::load(&config) {
            Ok(cfg) => run_config(&cfg),
            Err(e) => fail(&e),
        },
        Command::Figure { number, out } => {
            let preset = FigurePreset::from_number(number).expect("range checked by clap");
            let cfg = preset.config(&out);
            if !out.as_os_str().is_empty() {
                if let Err(e) = std::fs::create_dir_all(&out) {
                    return fail(&e.into());
                }
            }
            let cfg_path = out.join(format!("fig{number}.config.json"));
            if let Err(e) = std::fs::write(&cfg_path, cfg.to_json()) {
                return fail(&e.into());
            }
            println!("wrote {}", cfg_path.display());
            run_config(&cfg)
        }
        Command::OracleCheck {
            samples,
            grid,
            seed,
        } => match scenario::oracle_check(samples, &grid, seed) {
            Ok(r) => {
                println!(
                    "samples {}  grid {}x{}  max |dC| {:.3e}  mean |dC| {:.3e}  max |dQ| {:.3e}  coarse-grid flags {}",
                    r.samples,
                    grid.n_theta,
                    grid.n_phi,
                    r.max_classical_deviation,
                    r.mean_classical_deviation,
                    r.max_discord_deviation,
                    r.grid_too_coarse
                );
                if let Some(w) = r.worst_state {
                    println!("worst state {w:?}");
                }
                if r.passed {
                    println!("PASS");
                    ExitCode::SUCCESS
                } else {
                    println!("FAIL (tolerance {:e})", scenario::ORACLE_TOLERANCE);
                    ExitCode::FAILURE
                }
            }
            Err(e) => fail(&e),
        },
        Command::EngineCheck { samples, seed } => match scenario::engine_check(samples, seed) {
            Ok(r) => {
                for l in &r.lines {
                    let kind = if l.markovian {
                        "markovian"
                    } else {
                        "non-markovian"
                    };
                    println!(
                        "{:?} x {:?} ({kind}): {} checks, max dev {:.3e}{}",
                        l.flip_a,
                        l.flip_b,
                        l.checks,
                        l.max_deviation,
                        l.failure
                            .as_deref()
                            .map(|f| format!("  {f}"))
                            .unwrap_or_default()
                    );
                }
                if r.passed {
                    println!("PASS max dev {:.3e}", r.max_deviation);
                    ExitCode::SUCCESS
                } else {
                    println!("FAIL max dev {:.3e}", r.max_deviation);
                    ExitCode::FAILURE
                }
            }
            Err(e) => fail(&e),
        },
    }
}

//! `sfn-coverage`: batch front end that turns a scenario file into CSV.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numerical error,
//! 4 infeasible power allocation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod overrides;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sfn_core::montecarlo::{estimate_outage_curve, estimate_rate_coverage_curve};
use sfn_core::optimizer::{sweep_pa, Solver, SweepAxis, SweepRow};
use sfn_core::units::{db_to_linear, linear_to_db};
use sfn_core::{rate_coverage, OutageModel, PaProblem, Scenario, ScenarioConfig, SfnError, SimConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] SfnError),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("writing output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(SfnError::NumericalInstability { .. }) => 3,
            CliError::Core(SfnError::Infeasible { .. }) => 4,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sfn-coverage",
    version,
    about = "SFN outage, rate coverage and power allocation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic outage probability over a threshold grid.
    Outage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: ThetaGrid,
    },
    /// Analytic rate coverage over a target-rate grid.
    Rate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0)]
        kappa_min: f64,
        /// Defaults to the rate reached at a 25 dB SINR.
        #[arg(long)]
        kappa_max: Option<f64>,
        /// Number of intervals; the grid has `kappa_steps + 1` points.
        #[arg(long, default_value_t = 100)]
        kappa_steps: usize,
    },
    /// Monte Carlo outage (or rate coverage with --kappa).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: ThetaGrid,
        /// Target rates in bit/s; switches the output to rate coverage.
        #[arg(long, value_delimiter = ',', conflicts_with = "theta_db")]
        kappa: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Field radius in metres; defaults to the scenario's.
        #[arg(long)]
        radius_m: Option<f64>,
    },
    /// Minimum total SFN power for one SINR target.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pa: PaArgs,
    },
    /// Power allocation across a threshold or density axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pa: PaArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Axis values: SINR targets in dB for `theta`, densities per m^2 for `lambda`.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file; the built-in three-station reference when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override a scenario field, e.g. `interference.lambda_per_m2=1e-6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaGrid {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    theta_db_min: f64,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    theta_db_max: f64,
    #[arg(long, default_value_t = 0.5)]
    theta_db_step: f64,
    /// Explicit thresholds in dB; replaces the min/max/step grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta_db: Vec<f64>,
}

#[derive(Args)]
struct PaArgs {
    #[arg(long, default_value_t = 6.5, allow_negative_numbers = true)]
    theta_hat_db: f64,
    #[arg(long, default_value_t = 0.1)]
    t_hat: f64,
    #[arg(long, default_value_t = 30.0)]
    p_max_w: f64,
    #[arg(long, value_enum, default_value_t = SolverKind::Evo)]
    solver: SolverKind,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Candidate evaluations for the evolutionary solver.
    #[arg(long, default_value_t = 3200)]
    budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Bisect,
    Evo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Theta,
    Lambda,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sfn-coverage: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Outage { common, grid } => {
            let scenario = load_scenario(&common)?;
            let model = OutageModel::new(&scenario)?;
            let powers = scenario.powers();
            let mut rows = Vec::new();
            for theta_db in grid.values()? {
                let p = model.outage(&powers, db_to_linear(theta_db))?.probability;
                rows.push(vec![num(theta_db), num(p)]);
            }
            write_csv(&common, &["theta_db", "p_t_analytic"], rows)
        }
        Command::Rate {
            common,
            kappa_min,
            kappa_max,
            kappa_steps,
        } => {
            let scenario = load_scenario(&common)?;
            let kappa_max = kappa_max.unwrap_or_else(|| {
                scenario.rate_h * scenario.bandwidth_hz * (1.0 + scenario.rate_j * db_to_linear(25.0)).log2()
            });
            let mut rows = Vec::new();
            for kappa in linear_grid(kappa_min, kappa_max, kappa_steps, "kappa")? {
                rows.push(vec![num(kappa), num(rate_coverage(&scenario, kappa)?)]);
            }
            write_csv(&common, &["kappa_bps", "r_c_analytic"], rows)
        }
        Command::Simulate {
            common,
            grid,
            kappa,
            trials,
            seed,
            radius_m,
        } => {
            let scenario = load_scenario(&common)?;
            let mut sim = SimConfig::new(trials, seed);
            if let Some(r) = radius_m {
                sim = sim.with_radius(r);
            }
            let (label, xs, estimates) = if kappa.is_empty() {
                let grid = grid.values()?;
                let thetas: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
                ("theta_db", grid, estimate_outage_curve(&scenario, &thetas, &sim)?)
            } else {
                let est = estimate_rate_coverage_curve(&scenario, &kappa, &sim)?;
                ("kappa_bps", kappa, est)
            };
            let rows = xs
                .iter()
                .zip(estimates)
                .map(|(&x, e)| vec![num(x), num(e.mean), num(e.std_error), e.trials.to_string()])
                .collect();
            write_csv(&common, &[label, "mean", "std_error", "trials"], rows)
        }
        Command::Optimize { common, pa } => {
            let scenario = load_scenario(&common)?;
            let problem = pa.problem(scenario)?;
            let rows = sweep_pa(&problem, &SweepAxis::Theta(vec![problem.theta_hat]), pa.solver())?;
            write_pa(&common, problem.num_stations(), &rows)?;
            let row = &rows[0];
            summarize(row);
            if !row.solution.feasible {
                return Err(SfnError::Infeasible {
                    outage_at_max: row.solution.achieved_outage,
                    target: problem.t_hat,
                }
                .into());
            }
            Ok(())
        }
        Command::Sweep {
            common,
            pa,
            axis,
            values,
        } => {
            let scenario = load_scenario(&common)?;
            let problem = pa.problem(scenario)?;
            let axis = match axis {
                Axis::Theta => SweepAxis::Theta(values.iter().map(|&d| db_to_linear(d)).collect()),
                Axis::Lambda => SweepAxis::Lambda(values),
            };
            let rows = sweep_pa(&problem, &axis, pa.solver())?;
            write_pa(&common, problem.num_stations(), &rows)?;
            rows.iter().for_each(summarize);
            Ok(())
        }
    }
}

impl ThetaGrid {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if !self.theta_db.is_empty() {
            return Ok(self.theta_db.clone());
        }
        if !(self.theta_db_step > 0.0) {
            return Err(CliError::Config("--theta-db-step must be > 0".into()));
        }
        if !(self.theta_db_max >= self.theta_db_min) {
            return Err(CliError::Config(
                "--theta-db-max must be >= --theta-db-min".into(),
            ));
        }
        let n = ((self.theta_db_max - self.theta_db_min) / self.theta_db_step + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|i| tidy(self.theta_db_min + i as f64 * self.theta_db_step))
            .collect())
    }
}

impl PaArgs {
    fn problem(&self, scenario: Scenario) -> Result<PaProblem, CliError> {
        Ok(PaProblem::new(
            scenario,
            db_to_linear(self.theta_hat_db),
            self.t_hat,
            self.p_max_w,
        )?)
    }

    fn solver(&self) -> Solver {
        match self.solver {
            SolverKind::Bisect => Solver::Bisection,
            SolverKind::Evo => Solver::Evolutionary {
                budget: self.budget,
                seed: self.seed,
            },
        }
    }
}

fn linear_grid(min: f64, max: f64, steps: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && max >= min) {
        return Err(CliError::Config(format!(
            "--{name}-max must be finite and >= --{name}-min"
        )));
    }
    if steps == 0 {
        return Ok(vec![min]);
    }
    Ok((0..=steps)
        .map(|i| min + (max - min) * i as f64 / steps as f64)
        .collect())
}

fn load_scenario(common: &Common) -> Result<Scenario, CliError> {
    let mut doc = match &common.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::to_value(ScenarioConfig::from_scenario(&Scenario::three_station_reference(
            2e-6,
        )))
        .expect("reference scenario serializes"),
    };
    for assignment in &common.overrides {
        overrides::apply(&mut doc, assignment)?;
    }
    Ok(ScenarioConfig::from_json_value(doc)?.to_scenario()?)
}

fn write_pa(common: &Common, stations: usize, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut header = vec!["theta_hat_db".to_string(), "lambda".to_string()];
    header.extend((1..=stations).map(|i| format!("p{i}")));
    header.extend(["total_w", "achieved_outage", "feasible"].map(String::from));
    let body = rows
        .iter()
        .map(|r| {
            let s = &r.solution;
            let mut row = vec![num(tidy(linear_to_db(r.theta_hat))), num(r.lambda_i)];
            if s.feasible {
                row.extend(s.powers.iter().map(|&p| num(p)));
            } else {
                row.extend(std::iter::repeat_n(String::new(), stations));
            }
            row.extend([num(s.total_power), num(s.achieved_outage), s.feasible.to_string()]);
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(common, &header, body)
}

fn summarize(row: &SweepRow) {
    let s = &row.solution;
    if s.feasible {
        eprintln!(
            "theta_hat {:.2} dB, lambda {:e}: total {:.4} W, outage {:.4}",
            linear_to_db(row.theta_hat),
            row.lambda_i,
            s.total_power,
            s.achieved_outage
        );
    } else {
        eprintln!(
            "theta_hat {:.2} dB, lambda {:e}: infeasible (outage {:.4} at full power)",
            linear_to_db(row.theta_hat),
            row.lambda_i,
            s.achieved_outage
        );
    }
}

fn write_csv(common: &Common, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip formatting; NaN becomes an empty cell.
fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

/// Removes accumulated binary noise from grid coordinates.
fn tidy(x: f64) -> f64 {
    let t = (x * 1e9).round() / 1e9;
    if t == 0.0 {
        0.0
    } else {
        t
    }
}

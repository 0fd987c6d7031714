//! `rlnc-lab`: completion-delay calculator and simulator for a two-hop
//! relayed broadcast over erasure links.
//!
//! Verbs: `analytic`, `chain`, `simulate` (one scenario each), `sweep`
//! (config-file grids), `preset` (built-in experiments), and `validate`
//! (cross-check report). All result output is CSV, to stdout or `--out`.
//! Exit codes: 0 success, 1 failed validation checks, 2 configuration or
//! usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rlnc_lab::sim::Scheme;
use rlnc_lab::{markov, Scenario};
use rlnc_lab_cli::config::{DEFAULT_SEED, DEFAULT_STATE_CAP};
use rlnc_lab_cli::sweep::{Estimator, Metric};
use rlnc_lab_cli::{
    csv_string, init_thread_pool_from_env, load_config, preset_rows, render_report,
    run_sweep, run_validation, write_csv_file, CheckContext, CliError, Preset,
    PresetOverrides, ResultRow, SweepOutput, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "rlnc-lab",
    version,
    about = "Completion-delay formulas, exact chain solves, and Monte Carlo \
             for a two-hop relayed broadcast over erasure links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Generation size (packets to deliver).
    #[arg(long)]
    packets: u32,
    /// Number of receivers; defaults to the length of --p-recv.
    #[arg(long)]
    receivers: Option<usize>,
    /// Source→relay per-slot success probability.
    #[arg(long)]
    p_relay: f64,
    /// Relay→receiver success probabilities: one shared value, or a
    /// comma-separated list (one per receiver).
    #[arg(long, value_delimiter = ',', required = true)]
    p_recv: Vec<f64>,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let p_recv = if self.p_recv.len() == 1 {
            vec![self.p_recv[0]; self.receivers.unwrap_or(1)]
        } else {
            if let Some(r) = self.receivers {
                if r != self.p_recv.len() {
                    return Err(CliError::Config(format!(
                        "--receivers is {r} but --p-recv lists {} values",
                        self.p_recv.len()
                    )));
                }
            }
            self.p_recv.clone()
        };
        Scenario::new(self.packets, self.p_relay, p_recv)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Args)]
struct SelectArgs {
    /// Schemes to evaluate (nobuffer, withbuffer, fbpf); comma-separated.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<String>,
    /// Metrics to report; comma-separated.
    #[arg(long, value_delimiter = ',')]
    metric: Vec<String>,
}

impl SelectArgs {
    fn schemes(&self, default: &[Scheme]) -> Result<Vec<Scheme>, CliError> {
        if self.scheme.is_empty() {
            return Ok(default.to_vec());
        }
        self.scheme
            .iter()
            .map(|s| s.parse::<Scheme>().map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }

    fn metrics(&self) -> Result<Vec<Metric>, CliError> {
        if self.metric.is_empty() {
            return Ok(vec![Metric::DelayPerPacket]);
        }
        self.metric.iter().map(|m| m.parse::<Metric>().map_err(CliError::Config)).collect()
    }
}

#[derive(Args)]
struct TuningArgs {
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed for Monte Carlo runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute truncation tolerance for the broadcast series.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Largest chain state count the solver will accept.
    #[arg(long)]
    state_cap: Option<usize>,
}

impl TuningArgs {
    fn apply(&self, spec: &mut SweepSpec) {
        if let Some(t) = self.trials {
            spec.trials = t;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(t) = self.tail_tol {
            spec.tail_tol = t;
        }
        if let Some(c) = self.state_cap {
            spec.state_cap = c;
        }
    }

    fn overrides(&self) -> PresetOverrides {
        PresetOverrides {
            trials: self.trials,
            seed: self.seed,
            tail_tol: self.tail_tol,
            state_cap: self.state_cap,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the CSV (or report) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed forms, series, and lower bounds for one scenario.
    Analytic {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact absorbing-chain delay for one scenario.
    Chain {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Solve in exact rational arithmetic (delay metric only; slower).
        #[arg(long)]
        exact: bool,
    },
    /// Monte Carlo estimates for one scenario.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a sweep described by a JSON config file.
    Sweep {
        /// Path to the config file.
        config: PathBuf,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a built-in experiment (fig2a, fig2b, table1, fig4, fig5).
    Preset {
        /// Preset name.
        name: String,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-validate the formulas, chains, and simulator against each
    /// other; nonzero exit on any failed check.
    Validate {
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn emit(output: &SweepOutput, out: &OutputArgs) -> Result<(), CliError> {
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    match &out.out {
        Some(path) => write_csv_file(path, &output.rows),
        None => {
            print!("{}", csv_string(&output.rows));
            Ok(())
        }
    }
}

fn single_point_sweep(
    scenario: Scenario,
    estimator: Estimator,
    schemes: Vec<Scheme>,
    metrics: Vec<Metric>,
    tuning: &TuningArgs,
) -> SweepSpec {
    let mut spec = SweepSpec::single(scenario);
    spec.estimators = vec![estimator];
    spec.schemes = schemes;
    spec.metrics = metrics;
    tuning.apply(&mut spec);
    spec
}

/// The `chain --exact` path: the same rows as the float chain estimator,
/// but solved in exact rational arithmetic.
fn exact_chain_output(
    scenario: &Scenario,
    schemes: &[Scheme],
    state_cap: usize,
) -> SweepOutput {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &scheme in schemes {
        let solved = match scheme {
            Scheme::NoBuffer => Some(markov::nobuffer_system_delay_chain_exact(scenario, state_cap)),
            Scheme::WithBuffer => {
                Some(markov::withbuffer_system_delay_chain_exact(scenario, state_cap))
            }
            Scheme::FewestBroadcastFirst => None,
        };
        let value = match solved {
            Some(Ok(v)) => Some(v / f64::from(scenario.packets())),
            Some(Err(e)) => {
                warnings.push(format!(
                    "{scheme}/chain/delay_per_packet at packets={}: chain solve unavailable: {e}",
                    scenario.packets()
                ));
                None
            }
            None => {
                warnings.push(format!(
                    "{scheme}/chain/delay_per_packet: fewest-broadcast-first has no bounded \
                     chain representation; use the simulation estimator"
                ));
                None
            }
        };
        rows.push(ResultRow {
            scheme,
            estimator: Estimator::Chain,
            packets: scenario.packets(),
            receivers: scenario.receivers(),
            p_relay: scenario.p_relay(),
            p_desc: rlnc_lab_cli::config::describe_recv_probs(scenario),
            metric: Metric::DelayPerPacket,
            value,
            stderr: None,
            trials: None,
            seed: None,
        });
    }
    SweepOutput { rows, warnings }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    init_thread_pool_from_env()?;
    match cli.command {
        Command::Analytic { scenario, select, tuning, output } => {
            let spec = single_point_sweep(
                scenario.scenario()?,
                Estimator::Analytic,
                select.schemes(&[Scheme::NoBuffer, Scheme::WithBuffer])?,
                select.metrics()?,
                &tuning,
            );
            emit(&run_sweep(&spec)?, &output)
        }
        Command::Chain { scenario, select, tuning, output, exact } => {
            let schemes = select.schemes(&[Scheme::NoBuffer, Scheme::WithBuffer])?;
            let metrics = select.metrics()?;
            if exact {
                if metrics != vec![Metric::DelayPerPacket] {
                    return Err(CliError::Config(
                        "--exact supports the delay_per_packet metric only".into(),
                    ));
                }
                let state_cap = tuning.state_cap.unwrap_or(DEFAULT_STATE_CAP);
                emit(&exact_chain_output(&scenario.scenario()?, &schemes, state_cap), &output)
            } else {
                let spec = single_point_sweep(
                    scenario.scenario()?,
                    Estimator::Chain,
                    schemes,
                    metrics,
                    &tuning,
                );
                emit(&run_sweep(&spec)?, &output)
            }
        }
        Command::Simulate { scenario, select, tuning, output } => {
            let spec = single_point_sweep(
                scenario.scenario()?,
                Estimator::Simulation,
                select.schemes(&Scheme::ALL)?,
                select.metrics()?,
                &tuning,
            );
            emit(&run_sweep(&spec)?, &output)
        }
        Command::Sweep { config, tuning, output } => {
            let mut spec = load_config(&config)?;
            tuning.apply(&mut spec);
            emit(&run_sweep(&spec)?, &output)
        }
        Command::Preset { name, tuning, output } => {
            let preset: Preset = name.parse().map_err(CliError::Config)?;
            emit(&preset_rows(preset, &tuning.overrides())?, &output)
        }
        Command::Validate { tuning, output } => {
            let ctx = CheckContext {
                seed: tuning.seed.unwrap_or(DEFAULT_SEED),
                ..Default::default()
            };
            let results = run_validation(&ctx);
            let report = render_report(&results);
            match &output.out {
                Some(path) => std::fs::write(path, &report).map_err(|e| {
                    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
                })?,
                None => print!("{report}"),
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::ValidationFailed { failed });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

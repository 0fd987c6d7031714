//! Built-in experiment presets.
//!
//! Each preset expands to a list of sweeps sharing a grid; their rows are
//! concatenated into one CSV. Flags can override trial counts, seeds, and
//! solver caps without changing the grids.

use rlnc_lab::sim::Scheme;
use rlnc_lab::Scenario;

use crate::config::{SweepGrid, SweepSpec};
use crate::sweep::{run_sweep, Estimator, Metric, SweepOutput};
use crate::CliError;

/// The named built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Ten receivers behind a 0.75 source link, sweeping the (uniform)
    /// receiver probability: analytic unbuffered curve, all three schemes
    /// simulated, and the buffered-relay lower bound.
    Fig2a,
    /// Same population with the receiver probability fixed at 0.75,
    /// sweeping the source-link probability.
    Fig2b,
    /// Buffer occupancy per packet of fewest-broadcast-first as the source
    /// link improves.
    Table1,
    /// Two receivers (0.75, 0.85) at three source-link qualities, sweeping
    /// the generation size: chain-exact delay against both bound sides.
    Fig4,
    /// Large populations (20 and 100 receivers, three link profiles),
    /// sweeping the generation size: simulated delay against both bound
    /// sides. The exact chain is far beyond the state cap here by design.
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::Fig2a, Preset::Fig2b, Preset::Table1, Preset::Fig4, Preset::Fig5];

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Table1 => "table1",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .iter()
            .find(|p| p.as_str() == s)
            .copied()
            .ok_or_else(|| {
                format!("unknown preset '{s}' (expected fig2a, fig2b, table1, fig4, or fig5)")
            })
    }
}

/// Flag-level overrides applied to every sweep of a preset.
#[derive(Debug, Clone, Copy, Default)]
pub struct PresetOverrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub tail_tol: Option<f64>,
    pub state_cap: Option<usize>,
}

impl PresetOverrides {
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
}

const RECV_PROB_SWEEP: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];
const RELAY_PROB_SWEEP: [f64; 11] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0];
const RELAY_PROB_COARSE: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Packet grids for the generation-size sweeps.
const PACKETS_TWO_RECEIVERS: [u32; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 30, 40, 50];
const PACKETS_LARGE_POPULATION: [u32; 11] = [1, 2, 3, 5, 7, 10, 15, 20, 30, 40, 50];

/// Trials for the large-population simulations; everything else uses the
/// config default.
const LARGE_POPULATION_TRIALS: u64 = 20_000;

fn spec(
    base: Scenario,
    grid: SweepGrid,
    schemes: Vec<Scheme>,
    estimators: Vec<Estimator>,
    metrics: Vec<Metric>,
) -> SweepSpec {
    let mut s = SweepSpec::single(base);
    s.grid = grid;
    s.schemes = schemes;
    s.estimators = estimators;
    s.metrics = metrics;
    s
}

/// Receiver probabilities cycling through `pattern` in receiver-index order.
fn cyclic_probs(pattern: &[f64], receivers: usize) -> Vec<f64> {
    (0..receivers).map(|r| pattern[r % pattern.len()]).collect()
}

/// Expands a preset into its sweeps, with overrides applied.
pub fn preset_specs(preset: Preset, overrides: &PresetOverrides) -> Vec<SweepSpec> {
    let mut specs = match preset {
        Preset::Fig2a => {
            let base = Scenario::new(10, 0.75, vec![0.75; 10]).expect("valid preset base");
            let grid = SweepGrid::UniformRecvProb(RECV_PROB_SWEEP.to_vec());
            vec![
                spec(
                    base.clone(),
                    grid.clone(),
                    vec![Scheme::NoBuffer],
                    vec![Estimator::Analytic],
                    vec![Metric::DelayPerPacket],
                ),
                spec(
                    base.clone(),
                    grid.clone(),
                    vec![Scheme::NoBuffer, Scheme::WithBuffer, Scheme::FewestBroadcastFirst],
                    vec![Estimator::Simulation],
                    vec![Metric::DelayPerPacket],
                ),
                spec(
                    base,
                    grid,
                    vec![Scheme::WithBuffer],
                    vec![Estimator::Analytic],
                    vec![Metric::BoundPerPacket],
                ),
            ]
        }
        Preset::Fig2b => {
            let base = Scenario::new(10, 0.75, vec![0.75; 10]).expect("valid preset base");
            let grid = SweepGrid::RelayProb(RELAY_PROB_SWEEP.to_vec());
            vec![
                spec(
                    base.clone(),
                    grid.clone(),
                    vec![Scheme::NoBuffer],
                    vec![Estimator::Analytic],
                    vec![Metric::DelayPerPacket],
                ),
                spec(
                    base.clone(),
                    grid.clone(),
                    vec![Scheme::NoBuffer, Scheme::WithBuffer, Scheme::FewestBroadcastFirst],
                    vec![Estimator::Simulation],
                    vec![Metric::DelayPerPacket],
                ),
                spec(
                    base,
                    grid,
                    vec![Scheme::WithBuffer],
                    vec![Estimator::Analytic],
                    vec![Metric::BoundPerPacket],
                ),
            ]
        }
        Preset::Table1 => {
            let base = Scenario::new(10, 0.5, vec![0.75; 10]).expect("valid preset base");
            vec![spec(
                base,
                SweepGrid::RelayProb(RELAY_PROB_COARSE.to_vec()),
                vec![Scheme::FewestBroadcastFirst],
                vec![Estimator::Simulation],
                vec![Metric::BufferPerPacket],
            )]
        }
        Preset::Fig4 => {
            let mut specs = Vec::new();
            for p_relay in [0.65, 0.8, 0.95] {
                let base = Scenario::new(10, p_relay, vec![0.75, 0.85]).expect("valid preset base");
                let grid = SweepGrid::Packets(PACKETS_TWO_RECEIVERS.to_vec());
                specs.push(spec(
                    base.clone(),
                    grid.clone(),
                    vec![Scheme::WithBuffer],
                    vec![Estimator::Chain],
                    vec![Metric::DelayPerPacket],
                ));
                specs.push(spec(
                    base,
                    grid,
                    vec![Scheme::WithBuffer],
                    vec![Estimator::Analytic],
                    vec![
                        Metric::BoundSingleSidePerPacket,
                        Metric::BoundBroadcastSidePerPacket,
                        Metric::BoundPerPacket,
                    ],
                ));
            }
            specs
        }
        Preset::Fig5 => {
            let cyclic_pattern = [0.9, 0.8, 0.7, 0.6];
            let mut specs = Vec::new();
            for receivers in [20usize, 100] {
                let profiles: [(f64, Vec<f64>, Option<String>); 3] = [
                    (
                        0.75,
                        cyclic_probs(&cyclic_pattern, receivers),
                        Some(format!("cyclic(0.9|0.8|0.7|0.6)x{receivers}")),
                    ),
                    (0.7, vec![0.75; receivers], None),
                    (0.95, vec![0.9; receivers], None),
                ];
                for (p_relay, p_recv, p_desc_override) in profiles {
                    let base = Scenario::new(10, p_relay, p_recv).expect("valid preset base");
                    let grid = SweepGrid::Packets(PACKETS_LARGE_POPULATION.to_vec());
                    let mut sim = spec(
                        base.clone(),
                        grid.clone(),
                        vec![Scheme::WithBuffer],
                        vec![Estimator::Simulation],
                        vec![Metric::DelayPerPacket],
                    );
                    sim.trials = LARGE_POPULATION_TRIALS;
                    sim.p_desc_override = p_desc_override.clone();
                    specs.push(sim);
                    let mut bounds = spec(
                        base,
                        grid,
                        vec![Scheme::WithBuffer],
                        vec![Estimator::Analytic],
                        vec![Metric::BoundSingleSidePerPacket, Metric::BoundBroadcastSidePerPacket],
                    );
                    bounds.p_desc_override = p_desc_override;
                    specs.push(bounds);
                }
            }
            specs
        }
    };
    for s in &mut specs {
        overrides.apply(s);
    }
    specs
}

/// Runs every sweep of a preset and concatenates the rows.
pub fn preset_rows(preset: Preset, overrides: &PresetOverrides) -> Result<SweepOutput, CliError> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for spec in preset_specs(preset, overrides) {
        let out = run_sweep(&spec)?;
        rows.extend(out.rows);
        warnings.extend(out.warnings);
    }
    Ok(SweepOutput { rows, warnings })
}

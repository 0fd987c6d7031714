//! Sweep execution: evaluates every requested scheme × estimator × metric
//! cell at every grid point and emits one output row per cell.
//!
//! Cells a given estimator cannot produce (no closed form, chain too large,
//! metric not sampled by that estimator) become rows with an empty value plus
//! a human-readable warning, so the row count is always
//! `points × schemes × estimators × metrics` regardless of availability.

use std::collections::HashMap;

use rlnc_lab::sim::{run_batch, RngSpec, Scheme, SimMetric};
use rlnc_lab::{analytic, markov, Scenario};

use crate::config::{SweepPoint, SweepSpec};
use crate::CliError;

/// How a value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Closed forms, series, and bounds.
    Analytic,
    /// Exact absorbing-chain solves.
    Chain,
    /// Monte Carlo.
    Simulation,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Analytic, Estimator::Chain, Estimator::Simulation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Analytic => "analytic",
            Estimator::Chain => "chain",
            Estimator::Simulation => "simulation",
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Estimator::Analytic),
            "chain" => Ok(Estimator::Chain),
            "simulation" | "sim" => Ok(Estimator::Simulation),
            other => Err(format!(
                "unknown estimator '{other}' (expected analytic, chain, or simulation)"
            )),
        }
    }
}

/// Which quantity a row reports. All delays and buffer occupancies are
/// normalized per generation packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Expected slots until every receiver decodes, divided by the packet
    /// count.
    DelayPerPacket,
    /// Packets the relay stores per generation packet: zero for the
    /// unbuffered relay, one for the buffered relay (each packet is kept
    /// once), and the sampled buffer length for fewest-broadcast-first.
    BufferPerPacket,
    /// Lower bound on the buffered-relay system delay per packet.
    BoundPerPacket,
    /// Weakest single receiver side of the bound.
    BoundSingleSidePerPacket,
    /// Loss-free-source side of the bound plus the relay-lag correction.
    BoundBroadcastSidePerPacket,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::DelayPerPacket,
        Metric::BufferPerPacket,
        Metric::BoundPerPacket,
        Metric::BoundSingleSidePerPacket,
        Metric::BoundBroadcastSidePerPacket,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::DelayPerPacket => "delay_per_packet",
            Metric::BufferPerPacket => "buffer_per_packet",
            Metric::BoundPerPacket => "bound_per_packet",
            Metric::BoundSingleSidePerPacket => "bound_single_side_per_packet",
            Metric::BoundBroadcastSidePerPacket => "bound_broadcast_side_per_packet",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown metric '{s}' (expected one of: delay_per_packet, buffer_per_packet, bound_per_packet, bound_single_side_per_packet, bound_broadcast_side_per_packet)"))
    }
}

/// One output row. `value = None` marks an unavailable cell (a warning row);
/// `stderr`/`trials`/`seed` are present only on sampled values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub estimator: Estimator,
    pub packets: u32,
    pub receivers: usize,
    pub p_relay: f64,
    pub p_desc: String,
    pub metric: Metric,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// All rows of a sweep plus the reasons for any empty-valued rows.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub warnings: Vec<String>,
}

enum Cell {
    Exact(f64),
    Sampled { value: f64, stderr: f64, trials: u64, seed: u64 },
    Unavailable(String),
}

fn chain_error_text(e: rlnc_lab::Error) -> String {
    format!("chain solve unavailable: {e}")
}

/// Evaluates one cell; `batches` caches one Monte Carlo run per scheme at
/// the current grid point so delay and buffer rows share it.
fn evaluate_cell(
    spec: &SweepSpec,
    scenario: &Scenario,
    scheme: Scheme,
    estimator: Estimator,
    metric: Metric,
    batches: &mut HashMap<Scheme, rlnc_lab::sim::BatchStats>,
) -> Cell {
    let packets = f64::from(scenario.packets());
    match estimator {
        Estimator::Analytic => match (scheme, metric) {
            (Scheme::NoBuffer, Metric::DelayPerPacket) => Cell::Exact(
                analytic::delay_nobuffer_system(
                    scenario.packets(),
                    scenario.p_relay(),
                    scenario.p_recv(),
                    spec.tail_tol,
                )
                .value
                    / packets,
            ),
            (Scheme::NoBuffer, Metric::BufferPerPacket) => Cell::Exact(0.0),
            (Scheme::WithBuffer, Metric::DelayPerPacket) => {
                if scenario.receivers() == 1 {
                    Cell::Exact(
                        analytic::delay_withbuffer_single_recursive(
                            scenario.packets(),
                            scenario.p_relay(),
                            scenario.p_recv()[0],
                        )
                        .value
                            / packets,
                    )
                } else {
                    Cell::Unavailable(
                        "no closed form for the buffered-relay delay with several receivers; \
                         use the chain or simulation estimator, or the bound metrics"
                            .into(),
                    )
                }
            }
            (Scheme::WithBuffer, Metric::BufferPerPacket) => Cell::Exact(1.0),
            (Scheme::WithBuffer, Metric::BoundPerPacket) => Cell::Exact(
                analytic::lower_bound_system_parts(scenario, spec.tail_tol).bound / packets,
            ),
            (Scheme::WithBuffer, Metric::BoundSingleSidePerPacket) => Cell::Exact(
                analytic::lower_bound_system_parts(scenario, spec.tail_tol).single_side / packets,
            ),
            (Scheme::WithBuffer, Metric::BoundBroadcastSidePerPacket) => Cell::Exact(
                analytic::lower_bound_system_parts(scenario, spec.tail_tol).broadcast_side
                    / packets,
            ),
            (Scheme::FewestBroadcastFirst, _) => Cell::Unavailable(
                "no analytic results for fewest-broadcast-first; use the simulation estimator"
                    .into(),
            ),
            (Scheme::NoBuffer, _) => Cell::Unavailable(
                "bound metrics apply to the buffered relay only".into(),
            ),
        },
        Estimator::Chain => match (scheme, metric) {
            (Scheme::NoBuffer, Metric::DelayPerPacket) => {
                match markov::nobuffer_system_delay_chain(scenario, spec.state_cap) {
                    Ok(v) => Cell::Exact(v / packets),
                    Err(e) => Cell::Unavailable(chain_error_text(e)),
                }
            }
            (Scheme::WithBuffer, Metric::DelayPerPacket) => {
                match markov::withbuffer_system_delay_chain(scenario, spec.state_cap) {
                    Ok(v) => Cell::Exact(v / packets),
                    Err(e) => Cell::Unavailable(chain_error_text(e)),
                }
            }
            (Scheme::FewestBroadcastFirst, _) => Cell::Unavailable(
                "fewest-broadcast-first has no bounded chain representation; \
                 use the simulation estimator"
                    .into(),
            ),
            _ => Cell::Unavailable(
                "the chain estimator reports delay_per_packet only".into(),
            ),
        },
        Estimator::Simulation => match metric {
            Metric::DelayPerPacket | Metric::BufferPerPacket => {
                if scheme == Scheme::NoBuffer && metric == Metric::BufferPerPacket {
                    return Cell::Unavailable(
                        "the unbuffered relay stores nothing, so its buffer occupancy is \
                         identically zero; the analytic estimator reports it"
                            .into(),
                    );
                }
                let batch = batches.entry(scheme).or_insert_with(|| {
                    run_batch(scheme, scenario, spec.trials, RngSpec::new(spec.seed))
                });
                let stats = match metric {
                    Metric::DelayPerPacket => batch.metric(SimMetric::SystemDelay),
                    _ => batch.metric(SimMetric::RelayFetched),
                };
                Cell::Sampled {
                    value: stats.mean / packets,
                    stderr: stats.stderr / packets,
                    trials: stats.trials,
                    seed: stats.seed,
                }
            }
            _ => Cell::Unavailable(
                "bound metrics are analytic; the simulation estimator does not sample them"
                    .into(),
            ),
        },
    }
}

/// Runs the whole sweep. Row order is grid point, then scheme, then
/// estimator, then metric, matching the declaration order in the spec that
/// produced them.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput, CliError> {
    let points = spec.points()?;
    let mut rows =
        Vec::with_capacity(points.len() * spec.schemes.len() * spec.estimators.len() * spec.metrics.len());
    let mut warnings = Vec::new();
    for SweepPoint { scenario, p_desc } in &points {
        let mut batches = HashMap::new();
        for &scheme in &spec.schemes {
            for &estimator in &spec.estimators {
                for &metric in &spec.metrics {
                    let cell = evaluate_cell(spec, scenario, scheme, estimator, metric, &mut batches);
                    let (value, stderr, trials, seed) = match cell {
                        Cell::Exact(v) => (Some(v), None, None, None),
                        Cell::Sampled { value, stderr, trials, seed } => {
                            (Some(value), Some(stderr), Some(trials), Some(seed))
                        }
                        Cell::Unavailable(reason) => {
                            warnings.push(format!(
                                "{scheme}/{estimator}/{metric} at packets={}, p_relay={}, p_recv={}: {reason}",
                                scenario.packets(),
                                scenario.p_relay(),
                                p_desc,
                            ));
                            (None, None, None, None)
                        }
                    };
                    rows.push(ResultRow {
                        scheme,
                        estimator,
                        packets: scenario.packets(),
                        receivers: scenario.receivers(),
                        p_relay: scenario.p_relay(),
                        p_desc: p_desc.clone(),
                        metric,
                        value,
                        stderr,
                        trials,
                        seed,
                    });
                }
            }
        }
    }
    Ok(SweepOutput { rows, warnings })
}

//! Sweep configuration: JSON ingestion, defaults, and grid expansion.
//!
//! A configuration describes one base scenario, at most one swept parameter
//! (packet count, source-link probability, uniform receiver probability, or
//! explicit per-receiver probability lists), and which scheme × estimator ×
//! metric combinations to evaluate over the grid.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use rlnc_lab::sim::Scheme;
use rlnc_lab::Scenario;

use crate::sweep::{Estimator, Metric};
use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Which parameter the grid varies.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// No sweep: the base scenario is the single grid point.
    Fixed,
    Packets(Vec<u32>),
    RelayProb(Vec<f64>),
    /// One probability shared by every receiver.
    UniformRecvProb(Vec<f64>),
    /// Explicit per-receiver probability vectors.
    RecvProbLists(Vec<Vec<f64>>),
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Fixed => 1,
            SweepGrid::Packets(v) => v.len(),
            SweepGrid::RelayProb(v) => v.len(),
            SweepGrid::UniformRecvProb(v) => v.len(),
            SweepGrid::RecvProbLists(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One grid point, with the receiver-probability descriptor used in output
/// rows.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub scenario: Scenario,
    pub p_desc: String,
}

/// A fully resolved sweep: base scenario, grid, work selection, and tuning.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub grid: SweepGrid,
    pub schemes: Vec<Scheme>,
    pub estimators: Vec<Estimator>,
    pub metrics: Vec<Metric>,
    pub trials: u64,
    pub seed: u64,
    pub tail_tol: f64,
    pub state_cap: usize,
    /// Replaces the derived receiver-probability descriptor in output rows
    /// (used by presets whose receiver vectors are generated from a
    /// pattern).
    pub p_desc_override: Option<String>,
}

/// Receiver-probability descriptor: the single shared value when uniform,
/// otherwise the values joined with `|`.
pub fn describe_recv_probs(s: &Scenario) -> String {
    let probs = s.p_recv();
    if probs.iter().all(|p| p == &probs[0]) {
        format!("{}", probs[0])
    } else {
        probs.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("|")
    }
}

impl SweepSpec {
    /// A one-point spec around `base` with all defaults; callers override
    /// the work selection.
    pub fn single(base: Scenario) -> Self {
        SweepSpec {
            base,
            grid: SweepGrid::Fixed,
            schemes: vec![Scheme::WithBuffer],
            estimators: vec![Estimator::Analytic],
            metrics: vec![Metric::DelayPerPacket],
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            tail_tol: DEFAULT_TAIL_TOL,
            state_cap: DEFAULT_STATE_CAP,
            p_desc_override: None,
        }
    }

    /// Expands the grid into concrete scenarios, validating every point.
    pub fn points(&self) -> Result<Vec<SweepPoint>, CliError> {
        let build = |packets: u32, p_relay: f64, p_recv: Vec<f64>, what: &str| {
            Scenario::new(packets, p_relay, p_recv)
                .map_err(|e| CliError::Config(format!("invalid grid point ({what}): {e}")))
        };
        let base = &self.base;
        let mut points = Vec::with_capacity(self.grid.len());
        match &self.grid {
            SweepGrid::Fixed => points.push(base.clone()),
            SweepGrid::Packets(values) => {
                for &v in values {
                    points.push(build(v, base.p_relay(), base.p_recv().to_vec(), &format!("packets={v}"))?);
                }
            }
            SweepGrid::RelayProb(values) => {
                for &v in values {
                    points.push(build(base.packets(), v, base.p_recv().to_vec(), &format!("p_relay={v}"))?);
                }
            }
            SweepGrid::UniformRecvProb(values) => {
                for &v in values {
                    points.push(build(
                        base.packets(),
                        base.p_relay(),
                        vec![v; base.receivers()],
                        &format!("p_recv={v}"),
                    )?);
                }
            }
            SweepGrid::RecvProbLists(lists) => {
                for (k, list) in lists.iter().enumerate() {
                    points.push(build(
                        base.packets(),
                        base.p_relay(),
                        list.clone(),
                        &format!("p_recv_list[{k}]"),
                    )?);
                }
            }
        }
        Ok(points
            .into_iter()
            .map(|scenario| {
                let p_desc = self
                    .p_desc_override
                    .clone()
                    .unwrap_or_else(|| describe_recv_probs(&scenario));
                SweepPoint { scenario, p_desc }
            })
            .collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RecvProbsRaw {
    Uniform(f64),
    List(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    #[serde(default)]
    values: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    from: Option<f64>,
    #[serde(default)]
    to: Option<f64>,
    #[serde(default)]
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, alias = "P")]
    packets: Option<u32>,
    #[serde(default, alias = "R")]
    receivers: Option<usize>,
    #[serde(default, alias = "p0")]
    p_relay: Option<f64>,
    #[serde(default, alias = "p_r")]
    p_recv: Option<RecvProbsRaw>,
    #[serde(default)]
    sweep: Option<RawSweep>,
    #[serde(default, alias = "schemes")]
    scheme: Option<OneOrMany<String>>,
    #[serde(default, alias = "estimators")]
    estimator: Option<OneOrMany<String>>,
    #[serde(default, alias = "metrics")]
    metric: Option<OneOrMany<String>>,
    #[serde(default)]
    trials: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tail_tol: Option<f64>,
    #[serde(default)]
    state_cap: Option<usize>,
}

/// Rounds to nine decimals, so stepped grids print as the intended decimals
/// rather than accumulated float artifacts.
fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn float_range(from: f64, to: f64, step: f64, field: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Config(format!("sweep.{field}: step must be positive, got {step}")));
    }
    if from > to {
        return Err(CliError::Config(format!("sweep.{field}: from ({from}) exceeds to ({to})")));
    }
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let v = from + f64::from(k) * step;
        if v > to + step * 1e-9 {
            break;
        }
        out.push(round9(v));
        k += 1;
    }
    Ok(out)
}

fn number_values(values: &[serde_json::Value], field: &str) -> Result<Vec<f64>, CliError> {
    values
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                CliError::Config(format!("sweep.values for {field}: expected numbers, got {v}"))
            })
        })
        .collect()
}

fn resolve_grid(raw: Option<RawSweep>) -> Result<SweepGrid, CliError> {
    let Some(sweep) = raw else {
        return Ok(SweepGrid::Fixed);
    };
    let param = sweep.param.as_str();
    let has_range = sweep.from.is_some() || sweep.to.is_some() || sweep.step.is_some();
    if sweep.values.is_some() && has_range {
        return Err(CliError::Config(
            "sweep: give either values or from/to/step, not both".into(),
        ));
    }
    let scalars = |field: &str| -> Result<Vec<f64>, CliError> {
        if let Some(values) = &sweep.values {
            number_values(values, field)
        } else {
            let (Some(from), Some(to), Some(step)) = (sweep.from, sweep.to, sweep.step) else {
                return Err(CliError::Config(format!(
                    "sweep.{field}: provide values or all of from/to/step"
                )));
            };
            float_range(from, to, step, field)
        }
    };
    let grid = match param {
        "packets" | "P" => {
            let values = scalars("packets")?;
            let mut ints = Vec::with_capacity(values.len());
            for v in values {
                if v.fract() != 0.0 || v < 1.0 || v > f64::from(u32::MAX) {
                    return Err(CliError::Config(format!(
                        "sweep.packets: values must be positive integers, got {v}"
                    )));
                }
                ints.push(v as u32);
            }
            SweepGrid::Packets(ints)
        }
        "p_relay" | "p0" => SweepGrid::RelayProb(scalars("p_relay")?),
        "p_recv" | "p_r" => SweepGrid::UniformRecvProb(scalars("p_recv")?),
        "p_recv_list" => {
            let Some(values) = &sweep.values else {
                return Err(CliError::Config(
                    "sweep.p_recv_list: explicit values (arrays) are required".into(),
                ));
            };
            let mut lists = Vec::with_capacity(values.len());
            for v in values {
                let arr = v.as_array().ok_or_else(|| {
                    CliError::Config(format!("sweep.p_recv_list: expected arrays, got {v}"))
                })?;
                lists.push(number_values(arr, "p_recv_list")?);
            }
            SweepGrid::RecvProbLists(lists)
        }
        other => {
            return Err(CliError::Config(format!(
                "sweep.param: unknown parameter '{other}' (expected packets, p_relay, p_recv, or p_recv_list)"
            )))
        }
    };
    if grid.is_empty() {
        return Err(CliError::Config("sweep: the grid is empty".into()));
    }
    Ok(grid)
}

fn parse_list<T: std::str::FromStr>(
    raw: Option<OneOrMany<String>>,
    default: Vec<T>,
    field: &str,
) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let Some(raw) = raw else {
        return Ok(default);
    };
    let names = raw.into_vec();
    if names.is_empty() {
        return Err(CliError::Config(format!("{field}: the list is empty")));
    }
    names
        .iter()
        .map(|name| name.parse::<T>().map_err(|e| CliError::Config(format!("{field}: {e}"))))
        .collect()
}

fn resolve(raw: RawConfig) -> Result<SweepSpec, CliError> {
    let grid = resolve_grid(raw.sweep)?;

    let packets = match (raw.packets, &grid) {
        (Some(p), _) => p,
        (None, SweepGrid::Packets(v)) => v[0],
        (None, _) => return Err(CliError::Config("packets (P) is required".into())),
    };
    let p_relay = match (raw.p_relay, &grid) {
        (Some(p), _) => p,
        (None, SweepGrid::RelayProb(v)) => v[0],
        (None, _) => return Err(CliError::Config("p_relay (p0) is required".into())),
    };
    let p_recv: Vec<f64> = match (&raw.p_recv, &grid) {
        (Some(RecvProbsRaw::List(list)), _) => {
            if let Some(r) = raw.receivers {
                if r != list.len() {
                    return Err(CliError::Config(format!(
                        "receivers (R) is {r} but p_recv lists {} values",
                        list.len()
                    )));
                }
            }
            list.clone()
        }
        (Some(RecvProbsRaw::Uniform(p)), _) => vec![*p; raw.receivers.unwrap_or(1)],
        (None, SweepGrid::UniformRecvProb(v)) => vec![v[0]; raw.receivers.unwrap_or(1)],
        (None, SweepGrid::RecvProbLists(lists)) => lists[0].clone(),
        (None, _) => return Err(CliError::Config("p_recv (p_r) is required".into())),
    };

    let base = Scenario::new(packets, p_relay, p_recv)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let spec = SweepSpec {
        base,
        grid,
        schemes: parse_list(raw.scheme, vec![Scheme::WithBuffer], "scheme")?,
        estimators: parse_list(raw.estimator, vec![Estimator::Analytic], "estimator")?,
        metrics: parse_list(raw.metric, vec![Metric::DelayPerPacket], "metric")?,
        trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        tail_tol: raw.tail_tol.unwrap_or(DEFAULT_TAIL_TOL),
        state_cap: raw.state_cap.unwrap_or(DEFAULT_STATE_CAP),
        p_desc_override: None,
    };
    if spec.trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    if !(spec.tail_tol > 0.0) {
        return Err(CliError::Config("tail_tol must be positive".into()));
    }
    // Validate every grid point eagerly so bad sweeps fail at load time.
    spec.points()?;
    Ok(spec)
}

/// Parses a configuration from JSON text.
pub fn parse_config(text: &str) -> Result<SweepSpec, CliError> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("config parse failed: {e}")))?;
    resolve(raw)
}

/// Loads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<SweepSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_valid_with_defaults() {
        let spec = parse_config(
            r#"{"P":10,"R":10,"p0":0.75,"p_r":0.75,"scheme":"nobuffer","estimator":"analytic"}"#,
        )
        .unwrap();
        assert_eq!(spec.base.packets(), 10);
        assert_eq!(spec.base.receivers(), 10);
        assert_eq!(spec.base.p_relay(), 0.75);
        assert_eq!(spec.schemes, vec![Scheme::NoBuffer]);
        assert_eq!(spec.estimators, vec![Estimator::Analytic]);
        assert_eq!(spec.metrics, vec![Metric::DelayPerPacket]);
        assert_eq!(spec.trials, DEFAULT_TRIALS);
        assert_eq!(spec.seed, DEFAULT_SEED);
        assert_eq!(spec.tail_tol, DEFAULT_TAIL_TOL);
        assert_eq!(spec.state_cap, DEFAULT_STATE_CAP);
        assert_eq!(spec.points().unwrap().len(), 1);
        assert_eq!(spec.points().unwrap()[0].p_desc, "0.75");
    }

    #[test]
    fn long_field_names_work_too() {
        let spec = parse_config(
            r#"{"packets":4,"receivers":2,"p_relay":0.6,"p_recv":[0.5,0.9],
                "schemes":["withbuffer","fbpf"],"estimators":["simulation"],
                "metrics":["delay_per_packet","buffer_per_packet"],
                "trials":5000,"seed":7,"tail_tol":1e-10,"state_cap":500}"#,
        )
        .unwrap();
        assert_eq!(spec.base.p_recv(), &[0.5, 0.9]);
        assert_eq!(spec.schemes.len(), 2);
        assert_eq!(spec.metrics.len(), 2);
        assert_eq!(spec.trials, 5000);
        assert_eq!(spec.points().unwrap()[0].p_desc, "0.5|0.9");
    }

    #[test]
    fn zero_probability_is_rejected() {
        let err = parse_config(r#"{"P":10,"R":10,"p0":0.0,"p_r":0.75}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p_relay"), "{msg}");
    }

    #[test]
    fn stepped_sweep_expands_to_the_documented_grid() {
        let spec = parse_config(
            r#"{"P":10,"R":10,"p0":0.75,
                "sweep":{"param":"p_r","from":0.5,"to":0.95,"step":0.05}}"#,
        )
        .unwrap();
        let points = spec.points().unwrap();
        assert_eq!(points.len(), 10);
        assert_eq!(points[0].scenario.p_recv()[0], 0.5);
        assert_eq!(points[9].scenario.p_recv()[0], 0.95);
        assert_eq!(points[3].p_desc, "0.65");
    }

    #[test]
    fn packet_sweep_takes_integer_values() {
        let spec = parse_config(
            r#"{"R":1,"p0":0.5,"p_r":0.5,"sweep":{"param":"packets","values":[1,2,5]}}"#,
        )
        .unwrap();
        assert_eq!(spec.grid, SweepGrid::Packets(vec![1, 2, 5]));
        assert!(parse_config(
            r#"{"R":1,"p0":0.5,"p_r":0.5,"sweep":{"param":"packets","values":[1.5]}}"#
        )
        .is_err());
    }

    #[test]
    fn receiver_specific_sweep_lists_work() {
        let spec = parse_config(
            r#"{"P":2,"p0":0.5,
                "sweep":{"param":"p_recv_list","values":[[0.5,0.6],[0.7,0.8]]}}"#,
        )
        .unwrap();
        let points = spec.points().unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].scenario.p_recv(), &[0.7, 0.8]);
        assert_eq!(points[1].p_desc, "0.7|0.8");
    }

    #[test]
    fn unknown_fields_and_bad_grid_points_are_rejected() {
        assert!(parse_config(r#"{"P":2,"p0":0.5,"p_r":0.5,"bogus":1}"#).is_err());
        // A swept probability of zero must fail at load time.
        let err = parse_config(
            r#"{"P":2,"p0":0.5,"sweep":{"param":"p_r","values":[0.5,0.0]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("grid point"), "{err}");
        // Mismatched receiver count.
        assert!(parse_config(r#"{"P":2,"R":3,"p0":0.5,"p_r":[0.5,0.6]}"#).is_err());
    }

    #[test]
    fn missing_required_fields_are_named() {
        let err = parse_config(r#"{"p0":0.5,"p_r":0.5}"#).unwrap_err();
        assert!(err.to_string().contains("packets"), "{err}");
        let err = parse_config(r#"{"P":2,"p_r":0.5}"#).unwrap_err();
        assert!(err.to_string().contains("p_relay"), "{err}");
        let err = parse_config(r#"{"P":2,"p0":0.5}"#).unwrap_err();
        assert!(err.to_string().contains("p_recv"), "{err}");
    }
}

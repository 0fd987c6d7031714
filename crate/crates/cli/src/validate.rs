//! Cross-validation suite: every quantity that two or more independent
//! methods can compute is computed both ways and compared.
//!
//! Each check reports pass/fail together with the largest deviation it
//! observed; the CLI exits nonzero if any check fails.

use rlnc_lab::markov::DEFAULT_STATE_CAP;
use rlnc_lab::sim::{run_batch, RngSpec, Scheme};
use rlnc_lab::{analytic, markov, Scenario};

use crate::config::DEFAULT_TAIL_TOL;

const PROB_GRID: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation the check observed, in the units of its tolerance.
    pub max_dev: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, max_dev: f64, detail: String) -> Self {
        CheckResult { name, passed, max_dev, detail }
    }
}

/// Knobs for the suite. `closed_form_bias` is added to every closed-form
/// delay before comparison; it exists so tests can corrupt one formula and
/// watch the suite fail by name. It is zero in real runs.
#[derive(Debug, Clone, Copy)]
pub struct CheckContext {
    pub seed: u64,
    pub closed_form_bias: f64,
}

impl Default for CheckContext {
    fn default() -> Self {
        CheckContext { seed: 0, closed_form_bias: 0.0 }
    }
}

fn closed(ctx: &CheckContext, packets: u32, p_relay: f64, p_recv: f64) -> f64 {
    analytic::delay_withbuffer_single_closed(packets, p_relay, p_recv).value
        + ctx.closed_form_bias
}

/// Closed form against the increment recursion, single receiver.
fn check_closed_vs_recursive(ctx: &CheckContext) -> CheckResult {
    let mut max_dev = 0.0f64;
    let mut detail = String::new();
    for packets in 1..=8 {
        for p0 in PROB_GRID {
            for pr in PROB_GRID {
                let a = closed(ctx, packets, p0, pr);
                let b = analytic::delay_withbuffer_single_recursive(packets, p0, pr).value;
                let dev = (a - b).abs() / b.abs().max(1.0);
                if dev > max_dev {
                    max_dev = dev;
                    detail = format!("worst at packets={packets}, p0={p0}, p_recv={pr}");
                }
            }
        }
    }
    CheckResult::new("closed-form-vs-recursion", max_dev <= 1e-9, max_dev, detail)
}

/// Closed form against the single-receiver chain solve.
fn check_closed_vs_chain(ctx: &CheckContext) -> CheckResult {
    let mut max_dev = 0.0f64;
    let mut detail = String::new();
    for packets in 1..=6 {
        for p0 in PROB_GRID {
            for pr in PROB_GRID {
                let a = closed(ctx, packets, p0, pr);
                let chain = markov::build_chain_single(packets, p0, pr);
                let b = markov::expected_absorption_time(&chain).unwrap();
                let dev = (a - b).abs() / b.abs().max(1.0);
                if dev > max_dev {
                    max_dev = dev;
                    detail = format!("worst at packets={packets}, p0={p0}, p_recv={pr}");
                }
            }
        }
    }
    CheckResult::new("closed-form-vs-chain", max_dev <= 1e-9, max_dev, detail)
}

/// Unbuffered system series against the broadcast-chain identity.
fn check_nobuffer_vs_chain() -> CheckResult {
    let mut max_dev = 0.0f64;
    let mut detail = String::new();
    for packets in [1u32, 2, 4] {
        for p0 in PROB_GRID {
            for pr in [0.5, 0.8] {
                for receivers in [1usize, 2, 3] {
                    let s = Scenario::new(packets, p0, vec![pr; receivers]).unwrap();
                    let a = analytic::delay_nobuffer_system(
                        packets,
                        p0,
                        s.p_recv(),
                        DEFAULT_TAIL_TOL,
                    )
                    .value;
                    let b = markov::nobuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
                    let dev = (a - b).abs() / b.abs().max(1.0);
                    if dev > max_dev {
                        max_dev = dev;
                        detail = format!(
                            "worst at packets={packets}, p0={p0}, p_recv={pr}, receivers={receivers}"
                        );
                    }
                }
            }
        }
    }
    CheckResult::new("unbuffered-series-vs-chain", max_dev <= 1e-9, max_dev, detail)
}

/// Buffered-relay chain against Monte Carlo, in standard errors.
fn check_chain_vs_simulation(ctx: &CheckContext) -> CheckResult {
    let s = Scenario::new(3, 0.75, vec![0.75, 0.75]).unwrap();
    let exact = markov::withbuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
    let batch = run_batch(Scheme::WithBuffer, &s, 40_000, RngSpec::new(ctx.seed));
    let dev = (batch.system_delay.mean - exact).abs() / batch.system_delay.stderr;
    CheckResult::new(
        "buffered-chain-vs-simulation",
        dev <= 4.0,
        dev,
        format!("chain {exact:.6}, simulated {:.6} ± {:.6}", batch.system_delay.mean, batch.system_delay.stderr),
    )
}

/// Unbuffered series against Monte Carlo, in standard errors.
fn check_nobuffer_vs_simulation(ctx: &CheckContext) -> CheckResult {
    let s = Scenario::new(3, 0.75, vec![0.75, 0.75]).unwrap();
    let exact = analytic::delay_nobuffer_system(3, 0.75, s.p_recv(), DEFAULT_TAIL_TOL).value;
    let batch = run_batch(Scheme::NoBuffer, &s, 40_000, RngSpec::new(ctx.seed.wrapping_add(1)));
    let dev = (batch.system_delay.mean - exact).abs() / batch.system_delay.stderr;
    CheckResult::new(
        "unbuffered-series-vs-simulation",
        dev <= 4.0,
        dev,
        format!("series {exact:.6}, simulated {:.6} ± {:.6}", batch.system_delay.mean, batch.system_delay.stderr),
    )
}

/// Simulated scheme ordering: buffered ≤ fewest-broadcast-first ≤
/// unbuffered, with Monte Carlo slack.
fn check_scheme_bracketing(ctx: &CheckContext) -> CheckResult {
    let s = Scenario::new(5, 0.7, vec![0.6, 0.75, 0.9]).unwrap();
    let trials = 40_000;
    let wb = run_batch(Scheme::WithBuffer, &s, trials, RngSpec::new(ctx.seed.wrapping_add(2)));
    let fb = run_batch(
        Scheme::FewestBroadcastFirst,
        &s,
        trials,
        RngSpec::new(ctx.seed.wrapping_add(3)),
    );
    let nb = run_batch(Scheme::NoBuffer, &s, trials, RngSpec::new(ctx.seed.wrapping_add(4)));
    let pair_se = |a: &rlnc_lab::sim::DelayStats, b: &rlnc_lab::sim::DelayStats| {
        (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
    };
    let dev1 = (wb.system_delay.mean - fb.system_delay.mean) / pair_se(&wb.system_delay, &fb.system_delay);
    let dev2 = (fb.system_delay.mean - nb.system_delay.mean) / pair_se(&fb.system_delay, &nb.system_delay);
    let max_dev = dev1.max(dev2);
    CheckResult::new(
        "scheme-bracketing-withbuffer-fbpf-nobuffer",
        max_dev <= 4.0,
        max_dev,
        format!(
            "means: buffered {:.4} ≤ fewest-broadcast-first {:.4} ≤ unbuffered {:.4}",
            wb.system_delay.mean, fb.system_delay.mean, nb.system_delay.mean
        ),
    )
}

/// Lower bound never exceeds the chain-exact delay (two receivers).
fn check_bound_ordering() -> CheckResult {
    let mut max_dev = 0.0f64;
    let mut detail = String::new();
    for packets in [1u32, 2, 4, 8] {
        for p0 in [0.65, 0.8, 0.95] {
            let s = Scenario::new(packets, p0, vec![0.75, 0.85]).unwrap();
            let exact = markov::withbuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
            let bound = analytic::lower_bound_system(&s, DEFAULT_TAIL_TOL).value;
            // Positive dev = bound above exact beyond float tolerance.
            let dev = (bound - exact * (1.0 + 1e-9) - 1e-9).max(0.0);
            if dev > max_dev {
                max_dev = dev;
                detail = format!("worst at packets={packets}, p0={p0}");
            }
        }
    }
    CheckResult::new("lower-bound-below-exact", max_dev <= 0.0, max_dev, detail)
}

/// Cumulative finish-order discrepancy stays nonnegative.
fn check_discrepancy_cumulative() -> CheckResult {
    let mut min_cum = f64::INFINITY;
    let mut detail = String::new();
    for p0 in [0.5, 0.8] {
        for p1 in [0.5, 0.9] {
            for p2 in [0.6, 0.8] {
                let mut cum = 0.0;
                for packets in 2..=5u32 {
                    cum += markov::finish_order_discrepancy(
                        packets,
                        p0,
                        p1,
                        p2,
                        DEFAULT_STATE_CAP,
                    )
                    .unwrap();
                    if cum < min_cum {
                        min_cum = cum;
                        detail =
                            format!("minimum cumulative sum at packets={packets}, p0={p0}, p1={p1}, p2={p2}");
                    }
                }
            }
        }
    }
    CheckResult::new(
        "finish-order-discrepancy-cumulative-nonnegative",
        min_cum >= -1e-10,
        min_cum,
        detail,
    )
}

/// One-packet relay-ahead probability against its closed form.
fn check_relay_ahead_closed_form() -> CheckResult {
    let mut max_dev = 0.0f64;
    let mut detail = String::new();
    for p0 in PROB_GRID {
        for pr in PROB_GRID {
            let got = analytic::prob_relay_ahead(1, p0, pr).unwrap();
            let expect = pr / (p0 + pr - p0 * pr);
            let dev = (got - expect).abs();
            if dev > max_dev {
                max_dev = dev;
                detail = format!("worst at p0={p0}, p_recv={pr}");
            }
        }
    }
    CheckResult::new("relay-ahead-one-packet-closed-form", max_dev <= 1e-12, max_dev, detail)
}

/// Runs the whole suite.
pub fn run_validation(ctx: &CheckContext) -> Vec<CheckResult> {
    vec![
        check_closed_vs_recursive(ctx),
        check_closed_vs_chain(ctx),
        check_nobuffer_vs_chain(),
        check_chain_vs_simulation(ctx),
        check_nobuffer_vs_simulation(ctx),
        check_scheme_bracketing(ctx),
        check_bound_ordering(),
        check_discrepancy_cumulative(),
        check_relay_ahead_closed_form(),
    ]
}

/// Renders the report; one line per check.
pub fn render_report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{status}  {name}  max_dev={dev:.3e}  {detail}\n",
            name = r.name,
            dev = r.max_dev,
            detail = r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!(
        "{} checks, {} failed\n",
        results.len(),
        failed
    ));
    out
}

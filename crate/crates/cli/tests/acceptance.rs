//! Acceptance suite: ten end-to-end criteria covering formula agreement,
//! published-value reproduction, scheme ordering, bound ordering, and
//! deterministic output. One test per criterion; each prints a PASS line
//! with the measured evidence (run with `--nocapture` to see them).

use std::process::Command;

use rlnc_lab::combinatorics::ExactRational;
use rlnc_lab::markov::{self, DEFAULT_STATE_CAP};
use rlnc_lab::sim::{run_batch, RngSpec, Scheme};
use rlnc_lab::{analytic, Scenario};

const TAIL_TOL: f64 = 1e-12;
const PROB_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Criterion 1: the closed form, the increment recursion, and the
/// single-receiver chain agree to 1e-9 relative for generations up to 12,
/// and are identical as exact rationals up to 8.
#[test]
fn criterion_01_single_receiver_routes_agree() {
    let mut max_dev = 0.0f64;
    for packets in 1..=12u32 {
        for p0 in PROB_GRID {
            for pr in PROB_GRID {
                let closed = analytic::delay_withbuffer_single_closed(packets, p0, pr).value;
                let recursive =
                    analytic::delay_withbuffer_single_recursive(packets, p0, pr).value;
                let chain = markov::expected_absorption_time(&markov::build_chain_single(
                    packets, p0, pr,
                ))
                .unwrap();
                max_dev = max_dev
                    .max(rel_dev(closed, recursive))
                    .max(rel_dev(closed, chain))
                    .max(rel_dev(recursive, chain));
                assert!(
                    max_dev <= 1e-9,
                    "routes disagree at packets={packets}, p0={p0}, p_recv={pr}: \
                     closed {closed}, recursive {recursive}, chain {chain}"
                );
            }
        }
    }
    let mut exact_points = 0u32;
    for packets in 1..=8u32 {
        for p0 in PROB_GRID {
            for pr in PROB_GRID {
                let closed = analytic::delay_withbuffer_single_closed_exact(packets, p0, pr);
                let recursive =
                    analytic::delay_withbuffer_single_recursive_exact(packets, p0, pr);
                let chain = markov::expected_absorption_time(&markov::build_chain_single(
                    packets,
                    ExactRational::from_float(p0).unwrap(),
                    ExactRational::from_float(pr).unwrap(),
                ))
                .unwrap();
                assert_eq!(
                    closed, recursive,
                    "exact closed vs recursive at packets={packets}, p0={p0}, p_recv={pr}"
                );
                assert_eq!(
                    closed, chain,
                    "exact closed vs chain at packets={packets}, p0={p0}, p_recv={pr}"
                );
                exact_points += 1;
            }
        }
    }
    println!(
        "PASS criterion 1 (single-receiver route agreement): max relative deviation \
         {max_dev:.3e} over 300 float points; {exact_points} exact-rational identities"
    );
}

/// Criterion 2: the unbuffered delay per packet approaches the source-link
/// limit 1/p0 as the receiver links approach certainty.
#[test]
fn criterion_02_unbuffered_limit_at_strong_receivers() {
    let limit = 1.0 / 0.75;
    let near = analytic::delay_nobuffer_single(10, 0.75, 0.99).value / 10.0;
    let near_dev = (near - limit).abs() / limit;
    assert!(
        near_dev <= 0.02,
        "per-receiver unbuffered delay {near} is {near_dev:.4} away from {limit}"
    );
    let single_sure = analytic::delay_nobuffer_single(10, 0.75, 1.0).value / 10.0;
    let system_sure =
        analytic::delay_nobuffer_system(10, 0.75, &[1.0; 10], TAIL_TOL).value / 10.0;
    assert!(
        rel_dev(single_sure, limit) <= 1e-14 && rel_dev(system_sure, limit) <= 1e-14,
        "sure receiver links must hit 1/p0 exactly: single {single_sure}, system {system_sure}"
    );
    println!(
        "PASS criterion 2 (unbuffered source-link limit): per packet {near:.4} at \
         p_recv=0.99 ({:.2}% above 4/3), exactly {limit:.4} at p_recv=1",
        100.0 * near_dev
    );
}

/// Criterion 3: with a loss-free source link, ten 0.75 receivers need 1.69
/// slots per packet, and the buffered simulation agrees with the series.
#[test]
fn criterion_03_loss_free_source_endpoint() {
    let broadcast = analytic::delay_broadcast_system(10, &[0.75; 10], TAIL_TOL).value;
    let per_packet = broadcast / 10.0;
    assert!(
        (per_packet - 1.69).abs() <= 0.01,
        "broadcast delay per packet {per_packet} is not 1.69 ± 0.01"
    );
    let s = Scenario::new(10, 1.0, vec![0.75; 10]).unwrap();
    let batch = run_batch(Scheme::WithBuffer, &s, 100_000, RngSpec::new(301));
    let dev = (batch.system_delay.mean - broadcast).abs() / batch.system_delay.stderr;
    assert!(
        dev <= 4.0,
        "simulated {} ± {} vs series {broadcast}: {dev:.2} stderr",
        batch.system_delay.mean,
        batch.system_delay.stderr
    );
    println!(
        "PASS criterion 3 (loss-free source endpoint): series {per_packet:.4}/packet, \
         simulation within {dev:.2} stderr at 1e5 trials"
    );
}

/// Criterion 4: fewest-broadcast-first buffer occupancy per packet matches
/// the published endpoints at three source-link qualities.
#[test]
fn criterion_04_fewest_broadcast_first_buffer_occupancy() {
    let targets = [(0.5, 1.293), (0.8, 1.559), (1.0, 1.698)];
    let mut evidence = Vec::new();
    for (k, (p0, target)) in targets.into_iter().enumerate() {
        let s = Scenario::new(10, p0, vec![0.75; 10]).unwrap();
        let batch =
            run_batch(Scheme::FewestBroadcastFirst, &s, 100_000, RngSpec::new(400 + k as u64));
        let per_packet = batch.relay_fetched.mean / 10.0;
        assert!(
            (per_packet - target).abs() <= 0.03,
            "buffer per packet at p0={p0}: got {per_packet:.4}, want {target} ± 0.03"
        );
        evidence.push(format!("p0={p0}: {per_packet:.3} (target {target})"));
    }
    println!(
        "PASS criterion 4 (buffer occupancy endpoints): {}",
        evidence.join(", ")
    );
}

/// Criterion 5: at every point of the receiver-probability sweep the
/// simulated means order as buffered ≤ fewest-broadcast-first ≤ unbuffered;
/// where the analytic envelope shows a real gap, the order is strict by
/// more than 4 standard errors.
#[test]
fn criterion_05_scheme_ordering_across_the_sweep() {
    let trials = 100_000u64;
    let mut strict_pairs = 0u32;
    let mut checked_pairs = 0u32;
    for (k, pr) in [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]
        .into_iter()
        .enumerate()
    {
        let s = Scenario::new(10, 0.75, vec![pr; 10]).unwrap();
        let wb = run_batch(Scheme::WithBuffer, &s, trials, RngSpec::new(500 + 3 * k as u64));
        let fb = run_batch(
            Scheme::FewestBroadcastFirst,
            &s,
            trials,
            RngSpec::new(501 + 3 * k as u64),
        );
        let nb = run_batch(Scheme::NoBuffer, &s, trials, RngSpec::new(502 + 3 * k as u64));
        // Analytic envelope around the three schemes: the unbuffered system
        // series above, the buffered-relay lower bound below.
        let envelope_gap = analytic::delay_nobuffer_system(10, 0.75, s.p_recv(), TAIL_TOL).value
            - analytic::lower_bound_system(&s, TAIL_TOL).value;
        for (low, high) in [(&wb, &fb), (&fb, &nb)] {
            let se_pair = (low.system_delay.stderr.powi(2) + high.system_delay.stderr.powi(2))
                .sqrt();
            checked_pairs += 1;
            assert!(
                low.system_delay.mean <= high.system_delay.mean + 4.0 * se_pair,
                "ordering inverted at p_recv={pr}: {:?} {} vs {:?} {}",
                low.scheme,
                low.system_delay.mean,
                high.scheme,
                high.system_delay.mean
            );
            if envelope_gap > 5.0 * se_pair {
                assert!(
                    high.system_delay.mean - low.system_delay.mean >= 4.0 * se_pair,
                    "expected strict separation at p_recv={pr}: {:?} {} vs {:?} {} \
                     (4 se = {})",
                    low.scheme,
                    low.system_delay.mean,
                    high.scheme,
                    high.system_delay.mean,
                    4.0 * se_pair
                );
                strict_pairs += 1;
            }
        }
    }
    println!(
        "PASS criterion 5 (scheme ordering): no inversions over 10 sweep points; \
         {strict_pairs}/{checked_pairs} pairs strictly separated by > 4 stderr"
    );
}

/// Criterion 6: the joint chain is exact — its absorption time matches
/// million-trial simulation for several small populations, and the
/// two-packet two-receiver chain has exactly 14 states.
#[test]
fn criterion_06_joint_chain_matches_simulation() {
    assert_eq!(markov::relay_chain_states(2, 2, false), Some(14));
    let chain = markov::build_chain_multi(2, 0.75, &[0.75, 0.75], false, DEFAULT_STATE_CAP)
        .unwrap();
    assert_eq!(chain.num_states(), 14, "two-packet two-receiver chain size");

    let mut evidence = Vec::new();
    for (k, (packets, receivers)) in [(2u32, 2usize), (3, 2), (4, 2), (2, 3)]
        .into_iter()
        .enumerate()
    {
        let s = Scenario::new(packets, 0.75, vec![0.75; receivers]).unwrap();
        let exact = markov::withbuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
        let batch = run_batch(Scheme::WithBuffer, &s, 1_000_000, RngSpec::new(600 + k as u64));
        let dev = (batch.system_delay.mean - exact).abs() / batch.system_delay.stderr;
        assert!(
            dev <= 4.0,
            "(packets={packets}, receivers={receivers}): chain {exact} vs simulated {} ± {}",
            batch.system_delay.mean,
            batch.system_delay.stderr
        );
        evidence.push(format!("({packets},{receivers}): {dev:.2} se"));
    }
    println!(
        "PASS criterion 6 (joint chain exactness): 14 states at (2,2); deviations {} \
         at 1e6 trials",
        evidence.join(", ")
    );
}

/// Criterion 7: the system lower bound never exceeds the chain-exact delay,
/// is exact for one packet, and converges to the exact delay as the source
/// link strengthens.
#[test]
fn criterion_07_lower_bound_ordering_and_tightness() {
    let mut worst_gap = f64::INFINITY;
    for p0 in [0.65, 0.8, 0.95] {
        for packets in 1..=12u32 {
            let s = Scenario::new(packets, p0, vec![0.75, 0.85]).unwrap();
            let exact = markov::withbuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
            let parts = analytic::lower_bound_system_parts(&s, TAIL_TOL);
            assert!(
                parts.bound <= exact * (1.0 + 1e-9) + 1e-9,
                "bound above exact at p0={p0}, packets={packets}: {} > {exact}",
                parts.bound
            );
            worst_gap = worst_gap.min(exact - parts.bound);
            if packets == 1 {
                let reference = 1.0 / p0
                    + analytic::expected_max_geometric(s.p_recv()).unwrap()
                    - 1.0;
                assert!(
                    rel_dev(parts.broadcast_side, reference) <= 1e-12,
                    "one-packet bound at p0={p0}: {} vs {reference}",
                    parts.broadcast_side
                );
            }
        }
    }
    let s = Scenario::new(12, 0.95, vec![0.75, 0.85]).unwrap();
    let exact = markov::withbuffer_system_delay_chain(&s, DEFAULT_STATE_CAP).unwrap();
    let broadcast_side = analytic::lower_bound_system_parts(&s, TAIL_TOL).broadcast_side;
    let convergence = (exact - broadcast_side).abs() / exact;
    assert!(
        convergence <= 0.03,
        "broadcast-side bound {broadcast_side} vs exact {exact}: {convergence:.4} off"
    );
    println!(
        "PASS criterion 7 (lower bound): below exact at all 36 points \
         (smallest slack {worst_gap:.3e}), one-packet case exact, within \
         {:.2}% of exact at p0=0.95, packets=12",
        100.0 * convergence
    );
}

/// Criterion 8: the finish-order discrepancy vanishes when either link side
/// is loss-free, and its cumulative sum over generation sizes stays
/// nonnegative across the probability grid.
#[test]
fn criterion_08_finish_order_discrepancy() {
    let quad = [0.3, 0.5, 0.7, 0.9];
    for p1 in quad {
        for p2 in quad {
            let eps = markov::finish_order_discrepancy(3, 1.0, p1, p2, DEFAULT_STATE_CAP)
                .unwrap();
            assert!(eps.abs() <= 1e-12, "nonzero at sure source: {eps} (p1={p1}, p2={p2})");
        }
    }
    for p0 in quad {
        let eps = markov::finish_order_discrepancy(3, p0, 1.0, 1.0, DEFAULT_STATE_CAP).unwrap();
        assert!(eps.abs() <= 1e-12, "nonzero at sure receivers: {eps} (p0={p0})");
    }
    let mut min_cum = f64::INFINITY;
    for p0 in quad {
        for p1 in quad {
            for p2 in quad {
                let mut cum = 0.0;
                for packets in 2..=6u32 {
                    cum += markov::finish_order_discrepancy(
                        packets,
                        p0,
                        p1,
                        p2,
                        DEFAULT_STATE_CAP,
                    )
                    .unwrap();
                    assert!(
                        cum >= -1e-10,
                        "cumulative discrepancy negative at p0={p0}, p1={p1}, p2={p2}, \
                         packets={packets}: {cum}"
                    );
                    min_cum = min_cum.min(cum);
                }
            }
        }
    }
    println!(
        "PASS criterion 8 (finish-order discrepancy): zero on loss-free edges, \
         cumulative sums ≥ {min_cum:.3e} over 64 grid cells × generations 2..6"
    );
}

/// Criterion 9: the relay-ahead probability matches its one-packet closed
/// form, the joint version reduces to it for one receiver, and the joint
/// probability dominates the product of the marginals.
#[test]
fn criterion_09_relay_ahead_probabilities() {
    let mut max_closed_dev = 0.0f64;
    for p0 in PROB_GRID {
        for pr in PROB_GRID {
            let got = analytic::prob_relay_ahead(1, p0, pr).unwrap();
            let expect = pr / (p0 + pr - p0 * pr);
            max_closed_dev = max_closed_dev.max((got - expect).abs());
            assert!(
                max_closed_dev <= 1e-12,
                "one-packet closed form at p0={p0}, p_recv={pr}: {got} vs {expect}"
            );
        }
    }
    let mut max_joint_dev = 0.0f64;
    for packets in 1..=6u32 {
        for p0 in PROB_GRID {
            for pr in PROB_GRID {
                let s = Scenario::new(packets, p0, vec![pr]).unwrap();
                let joint = markov::prob_relay_ahead_joint(packets, &s, DEFAULT_STATE_CAP)
                    .unwrap();
                let single = analytic::prob_relay_ahead(packets, p0, pr).unwrap();
                max_joint_dev = max_joint_dev.max((joint - single).abs());
                assert!(
                    max_joint_dev <= 1e-9,
                    "joint vs single at packets={packets}, p0={p0}, p_recv={pr}: \
                     {joint} vs {single}"
                );
            }
        }
    }
    let quad = [0.3, 0.5, 0.7, 0.9];
    for packets in 1..=4u32 {
        for p0 in quad {
            for p1 in quad {
                for p2 in quad {
                    let s = Scenario::new(packets, p0, vec![p1, p2]).unwrap();
                    let joint =
                        markov::prob_relay_ahead_joint(packets, &s, DEFAULT_STATE_CAP).unwrap();
                    let product = analytic::prob_relay_ahead(packets, p0, p1).unwrap()
                        * analytic::prob_relay_ahead(packets, p0, p2).unwrap();
                    assert!(
                        joint >= product - 1e-12,
                        "joint below product at packets={packets}, p0={p0}, p1={p1}, \
                         p2={p2}: {joint} < {product}"
                    );
                }
            }
        }
    }
    println!(
        "PASS criterion 9 (relay-ahead probabilities): closed form to {max_closed_dev:.2e}, \
         joint-vs-single to {max_joint_dev:.2e}, joint ≥ product on 256 two-receiver points"
    );
}

/// Criterion 10: a preset run writes byte-identical CSV regardless of the
/// thread count.
#[test]
fn criterion_10_preset_output_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "4", "0"].into_iter().enumerate() {
        let path = dir.path().join(format!("run{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_rlnc-lab"))
            .args(["preset", "fig2a", "--seed", "42", "--out"])
            .arg(&path)
            .env("RLNC_LAB_THREADS", threads)
            .status()
            .expect("binary runs");
        assert!(status.success(), "preset run failed with {threads} threads");
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1-thread vs 4-thread output differs");
    assert_eq!(outputs[0], outputs[2], "1-thread vs auto-thread output differs");
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 51, "header plus 50 rows");
    println!(
        "PASS criterion 10 (deterministic output): three runs at thread counts 1/4/auto \
         produced byte-identical CSV ({} bytes, 50 rows)",
        outputs[0].len()
    );
}

//! Closed-form and series expressions for expected completion delay.
//!
//! Notation used throughout the docs below: `P` packets, source->relay link
//! success probability `p0`, relay->receiver links `p_r`. "System" means the
//! slot in which the last receiver completes; "single" is one receiver.
//!
//! Routes provided:
//!
//! * no-buffer forwarding (the relay re-encodes and forwards only in slots
//!   where it just received): a receiver sees one useful packet per slot with
//!   probability `p0 * p_r`, so its delay is negative binomial, and the
//!   system delay is the broadcast series scaled by `1 / p0`;
//! * broadcast from a loss-free source: the max-of-negative-binomials series
//!   `P + sum_{d>=0} (1 - prod_r I_{p_r}(P, d+1))`;
//! * buffered relay, one receiver: either the direct double sum over
//!   lattice-path counts (exact rationals) or an increment recursion driven
//!   by the coefficient sequence `B(i)` (stable in floats);
//! * a system lower bound combining the worst single receiver with the
//!   broadcast series plus a relay-lag correction term.

use crate::combinatorics::{schroeder_paths, ExactRational};
use crate::error::{Error, Result};
use crate::scenario::{DelayValue, Formula, Scenario};
use num_traits::{One, ToPrimitive, Zero};

/// Truncation threshold for the broadcast tail series: summation stops once
/// the summand stays below the tolerance for three consecutive terms.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Receiver cap for subset enumeration in [`expected_max_geometric`].
pub const MAX_INCLUSION_EXCLUSION_RECEIVERS: usize = 20;

fn check_prob(name: &str, p: f64) {
    assert!(p > 0.0 && p <= 1.0, "{name} = {p} outside (0, 1]");
}

/// Expected slots until one receiver completes under no-buffer forwarding:
/// `P / (p0 * p_r)`, the negative-binomial mean with per-slot success
/// `p0 * p_r`.
pub fn delay_nobuffer_single(packets: u32, p_relay: f64, p_recv: f64) -> DelayValue {
    check_prob("p_relay", p_relay);
    check_prob("p_recv", p_recv);
    assert!(packets >= 1);
    DelayValue::new(f64::from(packets) / (p_relay * p_recv), Formula::NoBufferSingle)
}

/// Expected slots until every receiver completes when the source link is
/// loss-free and the relay broadcasts a fresh combination each slot:
/// `P + sum_{d>=0} (1 - prod_r I_{p_r}(P, d+1))`.
///
/// The tail is truncated once the summand stays below `tail_tol` for three
/// consecutive values of `d`.
pub fn delay_broadcast_system(packets: u32, p_recv: &[f64], tail_tol: f64) -> DelayValue {
    assert!(packets >= 1);
    assert!(!p_recv.is_empty(), "at least one receiver is required");
    assert!(tail_tol > 0.0, "tail_tol must be positive");
    for &p in p_recv {
        check_prob("p_recv", p);
    }
    // Per receiver, maintain the partial sum I_{p_r}(P, d+1) incrementally:
    // the j-th summand of the series carries ratio (P+j)/(j+1) * (1-p).
    let mut term: Vec<f64> = p_recv.iter().map(|&p| p.powi(packets as i32)).collect();
    let mut partial: Vec<f64> = term.clone();
    let mut total = 0.0;
    let mut below = 0u32;
    let mut d: u64 = 0;
    loop {
        let prod: f64 = partial.iter().product();
        let summand = 1.0 - prod;
        total += summand;
        if summand < tail_tol {
            below += 1;
            if below >= 3 {
                break;
            }
        } else {
            below = 0;
        }
        for (k, &p) in p_recv.iter().enumerate() {
            term[k] *= (f64::from(packets) + d as f64) / (d as f64 + 1.0) * (1.0 - p);
            partial[k] = (partial[k] + term[k]).min(1.0);
        }
        d += 1;
    }
    DelayValue::new(f64::from(packets) + total, Formula::BroadcastSystem)
}

/// Expected slots until every receiver completes under no-buffer forwarding:
/// the broadcast series scaled by `1 / p0`, because receivers only see the
/// slots in which the relay received.
pub fn delay_nobuffer_system(packets: u32, p_relay: f64, p_recv: &[f64], tail_tol: f64) -> DelayValue {
    check_prob("p_relay", p_relay);
    let broadcast = delay_broadcast_system(packets, p_recv, tail_tol);
    DelayValue::new(broadcast.value / p_relay, Formula::NoBufferSystem)
}

/// The coefficient sequence `B(0..=n)` for one source->relay->receiver line,
/// computed by the quadratic recursion
/// `B(0) = -1/D`, `B(i) = -(p0*p_r/D) * (B(i-1) + sum_j B(j) B(i-1-j))`
/// with `D = p0 + p_r - p0*p_r`. Delay increments and the relay-ahead
/// probability are affine in prefix sums of this sequence.
#[derive(Debug, Clone)]
pub struct DelayCoefficients {
    pub p_relay: f64,
    pub p_recv: f64,
    /// `values[i]` is `B(i)`.
    pub values: Vec<f64>,
    /// Exact counterparts when requested; same recursion over rationals.
    pub exact: Option<Vec<ExactRational>>,
}

/// Float coefficient sequence up to index `n` inclusive.
pub fn delay_coefficients(p_relay: f64, p_recv: f64, n: u32) -> DelayCoefficients {
    check_prob("p_relay", p_relay);
    check_prob("p_recv", p_recv);
    let delta = p_relay + p_recv - p_relay * p_recv;
    let pq = p_relay * p_recv;
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(-1.0 / delta);
    for i in 1..=n as usize {
        let conv: f64 = (0..i).map(|j| values[j] * values[i - 1 - j]).sum();
        values.push(-(pq / delta) * (values[i - 1] + conv));
    }
    DelayCoefficients { p_relay, p_recv, values, exact: None }
}

/// As [`delay_coefficients`], also carrying the exact rational sequence.
pub fn delay_coefficients_exact(p_relay: f64, p_recv: f64, n: u32) -> DelayCoefficients {
    let mut out = delay_coefficients(p_relay, p_recv, n);
    out.exact = Some(coefficients_rational(p_relay, p_recv, n));
    out
}

fn coefficients_rational(p_relay: f64, p_recv: f64, n: u32) -> Vec<ExactRational> {
    let p0 = ExactRational::from_float(p_relay).expect("finite probability");
    let pr = ExactRational::from_float(p_recv).expect("finite probability");
    let pq = &p0 * &pr;
    let delta = &p0 + &pr - &pq;
    let factor = -&pq / &delta;
    let mut values: Vec<ExactRational> = Vec::with_capacity(n as usize + 1);
    values.push(-ExactRational::one() / &delta);
    for i in 1..=n as usize {
        let mut conv = ExactRational::zero();
        for j in 0..i {
            conv += &values[j] * &values[i - 1 - j];
        }
        values.push(&factor * (&values[i - 1] + conv));
    }
    values
}

/// Expected slots until one receiver completes with a buffered relay,
/// evaluated from the direct double sum
/// `P/p0 + P/p_r - 1 + sum_{i=0}^{P-2} sum_{j=0}^{i} (P-i-1) T(i,j)
///  (p0*p_r)^i / (p0*p_r - p0 - p_r)^(i+j+1)`
/// where `T(i, j)` counts lattice paths ([`schroeder_paths`]).
///
/// The terms alternate in sign and grow far beyond the result — a float
/// evaluation loses every digit well before 30 packets — so the sum always
/// runs in exact rationals and only the final value is rounded. Cost grows
/// roughly cubically with the packet count; the recursive route is the cheap
/// large-generation path.
pub fn delay_withbuffer_single_closed(packets: u32, p_relay: f64, p_recv: f64) -> DelayValue {
    let value = delay_withbuffer_single_closed_exact(packets, p_relay, p_recv)
        .to_f64()
        .expect("rational delay converts to f64");
    DelayValue::new(value, Formula::WithBufferSingleClosed)
}

/// The direct double sum in exact rational arithmetic. The float inputs are
/// taken at face value (their exact dyadic expansions), so results are
/// bitwise-reproducible and comparable across routes.
pub fn delay_withbuffer_single_closed_exact(packets: u32, p_relay: f64, p_recv: f64) -> ExactRational {
    check_prob("p_relay", p_relay);
    check_prob("p_recv", p_recv);
    assert!(packets >= 1);
    let p0 = ExactRational::from_float(p_relay).expect("finite probability");
    let pr = ExactRational::from_float(p_recv).expect("finite probability");
    let pq = &p0 * &pr;
    // Negative denominator base: p0*p_r - p0 - p_r.
    let neg_delta = &pq - &p0 - &pr;
    let p_int = ExactRational::from_integer(packets.into());
    let mut acc = &p_int / &p0 + &p_int / &pr - ExactRational::one();
    if packets >= 2 {
        let mut pq_pow = ExactRational::one();
        for i in 0..=(packets - 2) {
            // Denominator power starts at i+j+1 with j = 0.
            let mut denom_pow = pow_rational(&neg_delta, i + 1);
            for j in 0..=i {
                let count = schroeder_paths(i, j) * (packets - i - 1);
                let term = ExactRational::from_integer(count) * &pq_pow / &denom_pow;
                acc += term;
                denom_pow *= &neg_delta;
            }
            pq_pow *= &pq;
        }
    }
    acc
}

fn pow_rational(base: &ExactRational, exp: u32) -> ExactRational {
    let mut acc = ExactRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Expected slots until one receiver completes with a buffered relay, via
/// increments: the single-packet delay is `1/p0 + 1/p_r - 1`, and each
/// additional packet adds `1/p0 + 1/p_r + sum_{i=0}^{k-1} B(i)`.
pub fn delay_withbuffer_single_recursive(packets: u32, p_relay: f64, p_recv: f64) -> DelayValue {
    assert!(packets >= 1);
    let coeffs = delay_coefficients(p_relay, p_recv, packets.saturating_sub(2));
    let base = 1.0 / p_relay + 1.0 / p_recv;
    let mut e = base - 1.0;
    let mut prefix = 0.0;
    for k in 1..packets {
        prefix += coeffs.values[k as usize - 1];
        e += base + prefix;
    }
    DelayValue::new(e, Formula::WithBufferSingleRecursive)
}

/// The increment route in exact rationals; must agree with
/// [`delay_withbuffer_single_closed_exact`] as an identity.
pub fn delay_withbuffer_single_recursive_exact(packets: u32, p_relay: f64, p_recv: f64) -> ExactRational {
    assert!(packets >= 1);
    check_prob("p_relay", p_relay);
    check_prob("p_recv", p_recv);
    let values = coefficients_rational(p_relay, p_recv, packets.saturating_sub(2));
    let p0 = ExactRational::from_float(p_relay).expect("finite probability");
    let pr = ExactRational::from_float(p_recv).expect("finite probability");
    let base = ExactRational::one() / &p0 + ExactRational::one() / &pr;
    let mut e = &base - ExactRational::one();
    let mut prefix = ExactRational::zero();
    for k in 1..packets {
        prefix += &values[k as usize - 1];
        e += &base + &prefix;
    }
    e
}

/// Probability that the relay's fetch count stays strictly ahead of one
/// receiver for the whole transfer: precisely, the probability that the
/// relay's (P+1)-th reception comes after the slot in which the receiver
/// completes. Affine in the coefficient prefix sum:
/// `1/(1-p0) + p0/(1-p0) * sum_{i=0}^{P-1} B(i)`.
///
/// Undefined at `p0 = 1` (the relay is never behind); callers wanting the
/// loss-free-source semantics use a correction term of zero instead.
pub fn prob_relay_ahead(packets: u32, p_relay: f64, p_recv: f64) -> Result<f64> {
    assert!(packets >= 1);
    if p_relay >= 1.0 {
        return Err(Error::PerfectRelayLink);
    }
    Ok(relay_ahead_prefix(packets, p_relay, p_recv)[packets as usize - 1])
}

/// Relay-ahead probabilities for every packet count `1..=packets` from one
/// coefficient run (each is affine in the coefficient prefix sum).
fn relay_ahead_prefix(packets: u32, p_relay: f64, p_recv: f64) -> Vec<f64> {
    let coeffs = delay_coefficients(p_relay, p_recv, packets - 1);
    let offset = 1.0 / (1.0 - p_relay);
    let slope = p_relay / (1.0 - p_relay);
    let mut sum = 0.0;
    coeffs
        .values
        .iter()
        .map(|b| {
            sum += b;
            // The affine terms cancel almost exactly once the probability
            // drops past float noise (~1e-15 absolute); clamp the residue.
            (offset + slope * sum).clamp(0.0, 1.0)
        })
        .collect()
}

/// Expected maximum of independent geometric variables with success
/// probabilities `p`, by inclusion-exclusion over nonempty receiver subsets:
/// `sum_S (-1)^(|S|+1) / (1 - prod_{r in S} (1 - p_r))`.
pub fn expected_max_geometric(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidInput("at least one receiver is required".into()));
    }
    if p.len() > MAX_INCLUSION_EXCLUSION_RECEIVERS {
        return Err(Error::TooManyReceivers {
            receivers: p.len(),
            cap: MAX_INCLUSION_EXCLUSION_RECEIVERS,
        });
    }
    for &x in p {
        check_prob("p", x);
    }
    let mut acc = 0.0;
    for mask in 1u32..(1 << p.len()) {
        let mut q = 1.0;
        for (r, &x) in p.iter().enumerate() {
            if mask & (1 << r) != 0 {
                q *= 1.0 - x;
            }
        }
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign / (1.0 - q);
    }
    Ok(acc)
}

/// Correction term added to the broadcast delay to lower-bound the buffered
/// relay system: starts at `1/p0 - 1` for one packet, and each additional
/// packet adds `(1/p0 - 1)` times the product over receivers of the
/// relay-ahead probability. Zero when the source link is loss-free.
pub fn relay_delay_correction(packets: u32, p_relay: f64, p_recv: &[f64]) -> f64 {
    assert!(packets >= 1);
    check_prob("p_relay", p_relay);
    assert!(!p_recv.is_empty());
    if p_relay >= 1.0 {
        return 0.0;
    }
    let lag = 1.0 / p_relay - 1.0;
    // Group equal receiver probabilities: one prefix run per distinct value,
    // raised to the multiplicity.
    let mut groups: Vec<(f64, i32)> = Vec::new();
    for &pr in p_recv {
        match groups.iter_mut().find(|(v, _)| *v == pr) {
            Some((_, count)) => *count += 1,
            None => groups.push((pr, 1)),
        }
    }
    let prefixes: Vec<(Vec<f64>, i32)> = groups
        .iter()
        .map(|&(pr, count)| (relay_ahead_prefix(packets, p_relay, pr), count))
        .collect();
    let mut d = lag;
    for j in 1..packets as usize {
        let prod: f64 =
            prefixes.iter().map(|(seq, count)| seq[j - 1].powi(*count)).product();
        d += lag * prod;
    }
    d
}

/// Both sides of the system lower bound for the buffered relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemLowerBound {
    /// Worst single receiver: `max_r E[delay to receiver r]`.
    pub single_side: f64,
    /// Broadcast series plus the relay-lag correction.
    pub broadcast_side: f64,
    /// `max(single_side, broadcast_side)`.
    pub bound: f64,
}

/// Lower bound on the buffered-relay system delay: the larger of the worst
/// single-receiver delay and the broadcast delay plus the relay-lag
/// correction.
pub fn lower_bound_system_parts(s: &Scenario, tail_tol: f64) -> SystemLowerBound {
    // The single-receiver delay is decreasing in the receiver probability,
    // so the max over receivers is attained at the weakest link; the
    // increment recursion evaluates the same quantity as the closed form
    // (they are tested equal) at O(P^2) float cost.
    let worst = s.p_recv().iter().copied().fold(f64::INFINITY, f64::min);
    let single_side =
        delay_withbuffer_single_recursive(s.packets(), s.p_relay(), worst).value;
    let broadcast_side = delay_broadcast_system(s.packets(), s.p_recv(), tail_tol).value
        + relay_delay_correction(s.packets(), s.p_relay(), s.p_recv());
    SystemLowerBound { single_side, broadcast_side, bound: single_side.max(broadcast_side) }
}

/// As [`lower_bound_system_parts`], reduced to a tagged delay value.
pub fn lower_bound_system(s: &Scenario, tail_tol: f64) -> DelayValue {
    DelayValue::new(lower_bound_system_parts(s, tail_tol).bound, Formula::SystemLowerBound)
}

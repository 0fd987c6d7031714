//! Monte Carlo simulation of the time-slotted relay protocol.
//!
//! Per slot the event order is fixed: (1) the source→relay reception is
//! resolved, (2) the relay selects and broadcasts a packet, (3) each
//! receiver's reception is resolved. The relay transmits in the same slot it
//! receives (full duplex, constant processing lag ignored), and the delay
//! metric is the number of elapsed slots until every receiver can decode.
//!
//! Coding is simulated at rank level: any packet the source emits is
//! linearly independent of all others, so a broadcast from a relay holding
//! more packets than a receiver is innovative with certainty. No
//! finite-field algebra is performed.
//!
//! Reproducibility contract: a trial is fully determined by `(master seed,
//! trial index, scenario, scheme)`. Each trial runs on its own ChaCha8
//! stream, trials are aggregated in fixed-size chunks, and chunk partials
//! are combined in index order with compensated summation, so results are
//! byte-identical regardless of thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::scenario::Scenario;

/// Trials per work unit; fixed so that chunk boundaries (and therefore the
/// aggregation order) do not depend on the thread count.
pub const CHUNK_TRIALS: u64 = 4096;

/// Default trial count for batch runs.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// The three relay disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// The relay stores nothing: it re-codes and broadcasts only in slots
    /// where it received from the source.
    NoBuffer,
    /// The relay buffers everything (up to the generation size) and
    /// broadcasts a fresh combination of its whole buffer every slot.
    WithBuffer,
    /// Fewest-broadcast-first: the relay buffers every distinct packet it
    /// receives and rebroadcasts the one it has broadcast the fewest times,
    /// oldest first on ties.
    FewestBroadcastFirst,
}

impl Scheme {
    pub const ALL: [Scheme; 3] =
        [Scheme::NoBuffer, Scheme::WithBuffer, Scheme::FewestBroadcastFirst];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::NoBuffer => "nobuffer",
            Scheme::WithBuffer => "withbuffer",
            Scheme::FewestBroadcastFirst => "fbpf",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "nobuffer" => Ok(Scheme::NoBuffer),
            "withbuffer" => Ok(Scheme::WithBuffer),
            "fbpf" => Ok(Scheme::FewestBroadcastFirst),
            other => Err(Error::InvalidInput(format!(
                "unknown scheme '{other}' (expected nobuffer, withbuffer, or fbpf)"
            ))),
        }
    }
}

/// One simulated transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Slots until every receiver can decode; the max of the per-receiver
    /// delays.
    pub system_delay: u64,
    /// Slots until each receiver can decode (each at least the packet
    /// count).
    pub per_receiver_delay: Vec<u64>,
    /// Packets the relay fetched from the source up to and including the
    /// completion slot (the buffer-size metric numerator).
    pub relay_received_count: u64,
}

/// Seed plus the per-trial stream derivation rule: trial `i` runs on the
/// ChaCha8 stream `i` of the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn trial_rng(&self, trial_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial_index);
        rng
    }
}

/// Which per-trial quantity a statistic summarizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMetric {
    SystemDelay,
    ReceiverDelay(usize),
    RelayFetched,
}

impl SimMetric {
    pub fn label(&self) -> String {
        match self {
            SimMetric::SystemDelay => "system_delay".into(),
            SimMetric::ReceiverDelay(r) => format!("receiver_delay_{r}"),
            SimMetric::RelayFetched => "relay_fetched".into(),
        }
    }
}

/// Monte Carlo aggregate for one metric of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayStats {
    pub scheme: Scheme,
    pub metric: SimMetric,
    pub mean: f64,
    /// Unbiased sample variance; zero when only one trial ran.
    pub variance: f64,
    /// `sqrt(variance / trials)`; zero when only one trial ran.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Aggregates for every metric of one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub scheme: Scheme,
    pub seed: u64,
    pub trials: u64,
    pub system_delay: DelayStats,
    pub per_receiver: Vec<DelayStats>,
    pub relay_fetched: DelayStats,
}

impl BatchStats {
    pub fn metric(&self, metric: SimMetric) -> &DelayStats {
        match metric {
            SimMetric::SystemDelay => &self.system_delay,
            SimMetric::ReceiverDelay(r) => &self.per_receiver[r],
            SimMetric::RelayFetched => &self.relay_fetched,
        }
    }
}

fn bernoulli(rng: &mut impl Rng, p: f64) -> bool {
    // A uniform draw from [0, 1) is always below p = 1, so sure links never
    // fail; the scenario guarantees p > 0.
    rng.gen::<f64>() < p
}

/// One slot of the buffered discipline on the packet-count state: the relay
/// fetches with probability `p_relay` while below the generation size, then
/// every receiver strictly behind the relay's post-fetch stock advances
/// independently. A receiver level with the relay can therefore only advance
/// in a slot where the relay advanced too. Returns whether the relay
/// fetched.
fn withbuffer_step(
    packets: u32,
    p_relay: f64,
    p_recv: &[f64],
    relay_stock: &mut u32,
    recv_counts: &mut [u32],
    rng: &mut impl Rng,
) -> bool {
    let fetched = *relay_stock < packets && bernoulli(rng, p_relay);
    if fetched {
        *relay_stock += 1;
    }
    for (count, &p) in recv_counts.iter_mut().zip(p_recv) {
        if *count < *relay_stock && bernoulli(rng, p) {
            *count += 1;
        }
    }
    fetched
}

/// Unbuffered discipline: the relay re-codes and broadcasts only in slots
/// where the source→relay link succeeded, so an unfinished receiver gains a
/// packet exactly when both links succeed in the same slot.
pub fn simulate_nobuffer(s: &Scenario, rng: &mut impl Rng) -> TrialOutcome {
    let packets = s.packets();
    let receivers = s.receivers();
    let mut counts = vec![0u32; receivers];
    let mut delays = vec![0u64; receivers];
    let mut remaining = receivers;
    let mut slot = 0u64;
    let mut fetched = 0u64;
    while remaining > 0 {
        slot += 1;
        if bernoulli(rng, s.p_relay()) {
            fetched += 1;
            for r in 0..receivers {
                if delays[r] == 0 && bernoulli(rng, s.p_recv()[r]) {
                    counts[r] += 1;
                    if counts[r] == packets {
                        delays[r] = slot;
                        remaining -= 1;
                    }
                }
            }
        }
    }
    TrialOutcome { system_delay: slot, per_receiver_delay: delays, relay_received_count: fetched }
}

/// Buffered discipline: the packet-count dynamics of [`withbuffer_step`],
/// run to completion.
pub fn simulate_withbuffer(s: &Scenario, rng: &mut impl Rng) -> TrialOutcome {
    let packets = s.packets();
    let receivers = s.receivers();
    let mut stock = 0u32;
    let mut counts = vec![0u32; receivers];
    let mut delays = vec![0u64; receivers];
    let mut remaining = receivers;
    let mut slot = 0u64;
    let mut fetched = 0u64;
    while remaining > 0 {
        slot += 1;
        fetched +=
            u64::from(withbuffer_step(packets, s.p_relay(), s.p_recv(), &mut stock, &mut counts, rng));
        for r in 0..receivers {
            if delays[r] == 0 && counts[r] == packets {
                delays[r] = slot;
                remaining -= 1;
            }
        }
    }
    TrialOutcome { system_delay: slot, per_receiver_delay: delays, relay_received_count: fetched }
}

/// Fewest-broadcast-first discipline. The source emits a fresh packet every
/// slot (received by the relay with probability `p0` and appended to its
/// unbounded buffer); the relay rebroadcasts the least-broadcast buffered
/// packet, oldest first on ties; a reception counts toward a receiver only
/// for a packet id it has not seen before, and `P` distinct ids decode the
/// generation.
pub fn simulate_fbpf(s: &Scenario, rng: &mut impl Rng) -> TrialOutcome {
    let packets = s.packets();
    let receivers = s.receivers();
    let mut broadcast_counts: Vec<u32> = Vec::new();
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); receivers];
    let mut counts = vec![0u32; receivers];
    let mut delays = vec![0u64; receivers];
    let mut remaining = receivers;
    let mut slot = 0u64;
    while remaining > 0 {
        slot += 1;
        if bernoulli(rng, s.p_relay()) {
            broadcast_counts.push(0);
            for ids in &mut seen {
                ids.push(false);
            }
        }
        if !broadcast_counts.is_empty() {
            let mut sel = 0;
            for i in 1..broadcast_counts.len() {
                if broadcast_counts[i] < broadcast_counts[sel] {
                    sel = i;
                }
            }
            broadcast_counts[sel] += 1;
            for r in 0..receivers {
                if delays[r] == 0 && bernoulli(rng, s.p_recv()[r]) && !seen[r][sel] {
                    seen[r][sel] = true;
                    counts[r] += 1;
                    if counts[r] == packets {
                        delays[r] = slot;
                        remaining -= 1;
                    }
                }
            }
        }
    }
    TrialOutcome {
        system_delay: slot,
        per_receiver_delay: delays,
        relay_received_count: broadcast_counts.len() as u64,
    }
}

/// Runs one trial of the given scheme.
pub fn simulate_trial(scheme: Scheme, s: &Scenario, rng: &mut impl Rng) -> TrialOutcome {
    match scheme {
        Scheme::NoBuffer => simulate_nobuffer(s, rng),
        Scheme::WithBuffer => simulate_withbuffer(s, rng),
        Scheme::FewestBroadcastFirst => simulate_fbpf(s, rng),
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct MetricAcc {
    count: u64,
    sum: Compensated,
    sum_sq: Compensated,
}

impl MetricAcc {
    fn add(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    fn merge(&mut self, other: &MetricAcc) {
        self.count += other.count;
        self.sum.add(other.sum.sum);
        self.sum.add(other.sum.comp);
        self.sum_sq.add(other.sum_sq.sum);
        self.sum_sq.add(other.sum_sq.comp);
    }

    fn finalize(&self, scheme: Scheme, metric: SimMetric, seed: u64) -> DelayStats {
        let n = self.count as f64;
        let mean = self.sum.total() / n;
        let variance = if self.count > 1 {
            ((self.sum_sq.total() - self.sum.total() * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        DelayStats {
            scheme,
            metric,
            mean,
            variance,
            stderr: (variance / n).sqrt(),
            trials: self.count,
            seed,
        }
    }
}

/// Runs `trials` independent trials and aggregates every metric. Trials are
/// chunked and may run in parallel; the result is identical for any thread
/// count. Panics if `trials` is zero.
pub fn run_batch(scheme: Scheme, s: &Scenario, trials: u64, rng: RngSpec) -> BatchStats {
    assert!(trials >= 1, "at least one trial is required");
    let receivers = s.receivers();
    let num_chunks = usize::try_from(trials.div_ceil(CHUNK_TRIALS)).expect("chunk count fits");
    let chunk_accs: Vec<Vec<MetricAcc>> = (0..num_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk as u64 * CHUNK_TRIALS;
            let hi = (lo + CHUNK_TRIALS).min(trials);
            let mut accs = vec![MetricAcc::default(); receivers + 2];
            for trial in lo..hi {
                let mut trial_rng = rng.trial_rng(trial);
                let out = simulate_trial(scheme, s, &mut trial_rng);
                accs[0].add(out.system_delay as f64);
                for r in 0..receivers {
                    accs[r + 1].add(out.per_receiver_delay[r] as f64);
                }
                accs[receivers + 1].add(out.relay_received_count as f64);
            }
            accs
        })
        .collect();
    let mut total = vec![MetricAcc::default(); receivers + 2];
    for chunk in &chunk_accs {
        for (into, from) in total.iter_mut().zip(chunk) {
            into.merge(from);
        }
    }
    let seed = rng.master_seed;
    BatchStats {
        scheme,
        seed,
        trials,
        system_delay: total[0].finalize(scheme, SimMetric::SystemDelay, seed),
        per_receiver: (0..receivers)
            .map(|r| total[r + 1].finalize(scheme, SimMetric::ReceiverDelay(r), seed))
            .collect(),
        relay_fetched: total[receivers + 1].finalize(scheme, SimMetric::RelayFetched, seed),
    }
}

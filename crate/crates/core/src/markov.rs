//! Exact absorbing-chain machinery for the relayed transfer.
//!
//! States count packets already delivered: the relay's fetch count `s0` and
//! each receiver's decoded count `s_r <= min(s0, P)`. Per slot the relay may
//! fetch one more packet (probability `p0`, while below its cap) and each
//! receiver behind the relay's post-fetch stock may advance by one
//! (probability `p_r`), all independently; a receiver level with the relay
//! can only advance in a slot where the relay advances too.
//!
//! Coordinates never decrease, so the lexicographic state order is
//! topological: expected absorption times follow from one backward
//! substitution pass and ever-visit probabilities from one forward pass. No
//! dense fundamental-matrix inverse is formed anywhere, which keeps solves
//! linear in the transition count.
//!
//! Three chain families are built here:
//!
//! * the single-receiver chain over states `(i, j)`, written out from its
//!   three transition-law families;
//! * the joint multi-receiver chain over `(s0, s_1..s_R)`, generated from
//!   the per-slot product law (and, in extended form, tracking one fetch
//!   past the cap so "relay still ahead at completion" becomes a visit
//!   probability);
//! * the broadcast chain over `(s_1..s_R)` for a loss-free source link.
//!
//! Builders are generic over the probability scalar so the same code runs in
//! `f64` and in exact rationals.

use std::fmt::Display;
use std::io::{self, Write};
use std::ops::{AddAssign, Div, Sub};

use num_traits::{One, Zero};

use crate::combinatorics::ExactRational;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Default ceiling on chain sizes; builders refuse larger state spaces.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Receiver ceiling for the joint builders: transitions are enumerated over
/// receiver subsets, so the per-state fan-out is `2^R`.
pub const MAX_CHAIN_RECEIVERS: usize = 16;

/// Scalar the chain machinery is generic over (`f64` or exact rationals).
pub trait ChainScalar:
    Clone
    + PartialEq
    + Display
    + Zero
    + One
    + Sub<Output = Self>
    + Div<Output = Self>
    + AddAssign
{
}

impl ChainScalar for f64 {}
impl ChainScalar for ExactRational {}

/// Which state layout a chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// Single-receiver relay chain over `(i, j)`, `0 <= j <= i <= P`.
    Single,
    /// Joint relay chain over `(s0, s_1..s_R)`; `extended` adds an `s0 = P+1`
    /// layer that records one fetch past the relay's cap.
    Relay { extended: bool },
    /// Receiver-only chain over `(s_1..s_R)` for a loss-free source.
    Broadcast,
}

/// One state's coordinates, in the chain's native tuple layout.
pub type ChainState<'a> = &'a [u16];

/// Sparse absorbing Markov chain in compressed-row form. State index order is
/// lexicographic in the coordinates, which is also a topological order of the
/// transition graph; the start state (all zeros) is index 0.
#[derive(Debug, Clone)]
pub struct AbsorbingChain<T> {
    kind: ChainKind,
    packets: u16,
    receivers: usize,
    stride: usize,
    coords: Vec<u16>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<T>,
    absorbing: Vec<bool>,
    /// Start index of each relay layer (`Relay` kind only).
    layer_offsets: Vec<usize>,
}

impl<T> AbsorbingChain<T> {
    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn packets(&self) -> u32 {
        u32::from(self.packets)
    }

    pub fn receivers(&self) -> usize {
        self.receivers
    }

    pub fn num_states(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn num_transitions(&self) -> usize {
        self.cols.len()
    }

    /// The all-zero state every process starts from.
    pub fn start(&self) -> usize {
        0
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing[state]
    }

    pub fn state_coords(&self, state: usize) -> ChainState<'_> {
        &self.coords[state * self.stride..(state + 1) * self.stride]
    }

    /// Outgoing transitions of `state` as `(target, probability)`.
    pub fn row(&self, state: usize) -> impl Iterator<Item = (usize, &T)> {
        let lo = self.row_ptr[state];
        let hi = self.row_ptr[state + 1];
        self.cols[lo..hi].iter().map(|&c| c as usize).zip(&self.probs[lo..hi])
    }

    pub fn render_state(&self, state: usize) -> String {
        let parts: Vec<String> =
            self.state_coords(state).iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }

    fn self_loop(&self, state: usize) -> Option<&T> {
        self.row(state).find(|&(to, _)| to == state).map(|(_, p)| p)
    }

    /// Writes the chain as a plain-text edge list, one
    /// `from<TAB>to<TAB>probability` line per transition.
    pub fn dump_edges(&self, out: &mut impl Write) -> io::Result<()>
    where
        T: Display,
    {
        for s in 0..self.num_states() {
            for (to, p) in self.row(s) {
                writeln!(out, "{}\t{}\t{}", self.render_state(s), self.render_state(to), p)?;
            }
        }
        Ok(())
    }
}

/// Number of states of the joint relay chain: `sum_{s0=0}^{P} (s0+1)^R`,
/// plus an `(P+1)^R` layer in extended form. `None` when the count overflows
/// 128 bits.
pub fn relay_chain_states(packets: u32, receivers: usize, extended: bool) -> Option<u128> {
    let receivers = u32::try_from(receivers).ok()?;
    let mut total: u128 = 0;
    let top = if extended { packets + 1 } else { packets };
    for s0 in 0..=top {
        let radix = u128::from(s0.min(packets)) + 1;
        total = total.checked_add(radix.checked_pow(receivers)?)?;
    }
    Some(total)
}

/// Number of states of the broadcast chain: `(P+1)^R`.
pub fn broadcast_chain_states(packets: u32, receivers: usize) -> Option<u128> {
    let receivers = u32::try_from(receivers).ok()?;
    (u128::from(packets) + 1).checked_pow(receivers)
}

struct ChainBuilder<T> {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<T>,
    coords: Vec<u16>,
    absorbing: Vec<bool>,
}

impl<T: ChainScalar> ChainBuilder<T> {
    fn with_capacity(states: usize, stride: usize) -> Self {
        Self {
            row_ptr: {
                let mut v = Vec::with_capacity(states + 1);
                v.push(0);
                v
            },
            cols: Vec::new(),
            probs: Vec::new(),
            coords: Vec::with_capacity(states * stride),
            absorbing: Vec::with_capacity(states),
        }
    }

    fn push_state(&mut self, coords: &[u16], absorbing: bool) {
        self.coords.extend_from_slice(coords);
        self.absorbing.push(absorbing);
    }

    fn push_edge(&mut self, to: usize, prob: T) {
        if !prob.is_zero() {
            self.cols.push(u32::try_from(to).expect("state index fits u32"));
            self.probs.push(prob);
        }
    }

    fn seal_row(&mut self) {
        self.row_ptr.push(self.cols.len());
    }
}

fn check_packets(packets: u32) -> u16 {
    assert!(packets >= 1, "at least one packet is required");
    u16::try_from(packets).expect("packet count fits u16")
}

/// Single-receiver relay chain over states `(i, j)` with `0 <= j <= i <= P`,
/// built from its three transition-law families:
///
/// * `j = i < P`: stay with `1-p0`, relay-only advance with `p0*(1-p_r)`,
///   joint advance with `p0*p_r` (the receiver cannot advance alone);
/// * `j < i < P`: stay `(1-p0)(1-p_r)`, relay `p0*(1-p_r)`, receiver
///   `(1-p0)*p_r`, both `p0*p_r`;
/// * `j < i = P`: stay `1-p_r`, receiver `p_r`.
///
/// `(P, P)` is the unique absorbing state. Probabilities are taken on faith
/// (validate through [`Scenario`] for `f64` inputs).
pub fn build_chain_single<T: ChainScalar>(packets: u32, p_relay: T, p_recv: T) -> AbsorbingChain<T> {
    let p = check_packets(packets);
    let tri = |i: usize, j: usize| i * (i + 1) / 2 + j;
    let n = tri(p as usize + 1, 0);
    let mut b = ChainBuilder::<T>::with_capacity(n, 2);
    let stay_relay = T::one() - p_relay.clone();
    let stay_recv = T::one() - p_recv.clone();
    for i in 0..=p {
        for j in 0..=i {
            let absorbing = i == p && j == p;
            b.push_state(&[i, j], absorbing);
            if absorbing {
                b.seal_row();
                continue;
            }
            let (iu, ju) = (i as usize, j as usize);
            if j == i {
                // Level with the relay, relay not full.
                b.push_edge(tri(iu, ju), stay_relay.clone());
                b.push_edge(tri(iu + 1, ju), p_relay.clone() * stay_recv.clone());
                b.push_edge(tri(iu + 1, ju + 1), p_relay.clone() * p_recv.clone());
            } else if i < p {
                b.push_edge(tri(iu, ju), stay_relay.clone() * stay_recv.clone());
                b.push_edge(tri(iu, ju + 1), stay_relay.clone() * p_recv.clone());
                b.push_edge(tri(iu + 1, ju), p_relay.clone() * stay_recv.clone());
                b.push_edge(tri(iu + 1, ju + 1), p_relay.clone() * p_recv.clone());
            } else {
                // Relay full; only the receiver moves.
                b.push_edge(tri(iu, ju), stay_recv.clone());
                b.push_edge(tri(iu, ju + 1), p_recv.clone());
            }
            b.seal_row();
        }
    }
    AbsorbingChain {
        kind: ChainKind::Single,
        packets: p,
        receivers: 1,
        stride: 2,
        coords: b.coords,
        row_ptr: b.row_ptr,
        cols: b.cols,
        probs: b.probs,
        absorbing: b.absorbing,
        layer_offsets: Vec::new(),
    }
}

/// Joint relay chain over `(s0, s_1..s_R)`. Per slot, while below its cap
/// (`P`, or `P+1` in extended form) the relay fetches with probability `p0`;
/// given the relay's post-fetch stock, every receiver strictly behind
/// `min(s0', P)` advances independently with its own probability. Absorbing
/// states are exactly those with every receiver at `P`.
///
/// In extended form the `s0 = P+1` layer distinguishes, at the completion
/// slot, whether the relay's fetch count had already passed `P`.
pub fn build_chain_multi<T: ChainScalar>(
    packets: u32,
    p_relay: T,
    p_recv: &[T],
    extended: bool,
    state_cap: usize,
) -> Result<AbsorbingChain<T>> {
    let p = check_packets(packets);
    let receivers = p_recv.len();
    if receivers == 0 {
        return Err(Error::InvalidInput("at least one receiver is required".into()));
    }
    if receivers > MAX_CHAIN_RECEIVERS {
        return Err(Error::TooManyReceivers { receivers, cap: MAX_CHAIN_RECEIVERS });
    }
    let states = relay_chain_states(packets, receivers, extended);
    let n = match states {
        Some(c) if c <= state_cap as u128 => c as usize,
        c => return Err(Error::StateSpaceTooLarge { states: c, cap: state_cap }),
    };

    let top = if extended { p + 1 } else { p };
    let mut layer_offsets = Vec::with_capacity(top as usize + 1);
    let mut acc = 0usize;
    for s0 in 0..=top {
        layer_offsets.push(acc);
        acc += (s0.min(p) as usize + 1).pow(receivers as u32);
    }
    debug_assert_eq!(acc, n);
    let index = |s0: u16, srs: &[u16]| -> usize {
        let radix = s0.min(p) as usize + 1;
        let mut k = 0usize;
        for &x in srs {
            k = k * radix + x as usize;
        }
        layer_offsets[s0 as usize] + k
    };

    let stay_relay = T::one() - p_relay.clone();
    let stay_recv: Vec<T> = p_recv.iter().map(|x| T::one() - x.clone()).collect();
    let mut b = ChainBuilder::<T>::with_capacity(n, receivers + 1);
    let mut srs = vec![0u16; receivers];
    let mut dst = vec![0u16; receivers];
    let mut coords = vec![0u16; receivers + 1];
    for s0 in 0..=top {
        let radix = s0.min(p) as usize + 1;
        srs.iter_mut().for_each(|x| *x = 0);
        loop {
            coords[0] = s0;
            coords[1..].copy_from_slice(&srs);
            let absorbing = srs.iter().all(|&x| x == p);
            b.push_state(&coords, absorbing);
            if !absorbing {
                // Relay move options: stay, and fetch while below the cap.
                let can_fetch = s0 < top;
                let moves: &[(u16, T)] = &if can_fetch {
                    vec![(s0, stay_relay.clone()), (s0 + 1, p_relay.clone())]
                } else {
                    vec![(s0, T::one())]
                };
                for (s0n, relay_prob) in moves {
                    let stock = (*s0n).min(p);
                    let eligible: Vec<usize> =
                        (0..receivers).filter(|&r| srs[r] < stock).collect();
                    for mask in 0u32..(1 << eligible.len()) {
                        let mut prob = relay_prob.clone();
                        dst.copy_from_slice(&srs);
                        for (bit, &r) in eligible.iter().enumerate() {
                            if mask & (1 << bit) != 0 {
                                prob = prob * p_recv[r].clone();
                                dst[r] += 1;
                            } else {
                                prob = prob * stay_recv[r].clone();
                            }
                        }
                        b.push_edge(index(*s0n, &dst), prob);
                    }
                }
            }
            b.seal_row();
            // Odometer over receiver coordinates, radix `radix`.
            let mut r = receivers;
            loop {
                if r == 0 {
                    break;
                }
                r -= 1;
                srs[r] += 1;
                if (srs[r] as usize) < radix {
                    break;
                }
                srs[r] = 0;
            }
            if srs.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    Ok(AbsorbingChain {
        kind: ChainKind::Relay { extended },
        packets: p,
        receivers,
        stride: receivers + 1,
        coords: b.coords,
        row_ptr: b.row_ptr,
        cols: b.cols,
        probs: b.probs,
        absorbing: b.absorbing,
        layer_offsets,
    })
}

/// Receiver-only chain over `(s_1..s_R)` for a loss-free source link: every
/// receiver below `P` advances independently each slot.
pub fn build_chain_broadcast<T: ChainScalar>(
    packets: u32,
    p_recv: &[T],
    state_cap: usize,
) -> Result<AbsorbingChain<T>> {
    let p = check_packets(packets);
    let receivers = p_recv.len();
    if receivers == 0 {
        return Err(Error::InvalidInput("at least one receiver is required".into()));
    }
    if receivers > MAX_CHAIN_RECEIVERS {
        return Err(Error::TooManyReceivers { receivers, cap: MAX_CHAIN_RECEIVERS });
    }
    let states = broadcast_chain_states(packets, receivers);
    let n = match states {
        Some(c) if c <= state_cap as u128 => c as usize,
        c => return Err(Error::StateSpaceTooLarge { states: c, cap: state_cap }),
    };
    let radix = p as usize + 1;
    let index = |srs: &[u16]| -> usize {
        let mut k = 0usize;
        for &x in srs {
            k = k * radix + x as usize;
        }
        k
    };
    let stay_recv: Vec<T> = p_recv.iter().map(|x| T::one() - x.clone()).collect();
    let mut b = ChainBuilder::<T>::with_capacity(n, receivers);
    let mut srs = vec![0u16; receivers];
    let mut dst = vec![0u16; receivers];
    loop {
        let absorbing = srs.iter().all(|&x| x == p);
        b.push_state(&srs, absorbing);
        if !absorbing {
            let eligible: Vec<usize> = (0..receivers).filter(|&r| srs[r] < p).collect();
            for mask in 0u32..(1 << eligible.len()) {
                let mut prob = T::one();
                dst.copy_from_slice(&srs);
                for (bit, &r) in eligible.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        prob = prob * p_recv[r].clone();
                        dst[r] += 1;
                    } else {
                        prob = prob * stay_recv[r].clone();
                    }
                }
                b.push_edge(index(&dst), prob);
            }
        }
        b.seal_row();
        let mut r = receivers;
        loop {
            if r == 0 {
                break;
            }
            r -= 1;
            srs[r] += 1;
            if (srs[r] as usize) < radix {
                break;
            }
            srs[r] = 0;
        }
        if srs.iter().all(|&x| x == 0) {
            break;
        }
    }
    Ok(AbsorbingChain {
        kind: ChainKind::Broadcast,
        packets: p,
        receivers,
        stride: receivers,
        coords: b.coords,
        row_ptr: b.row_ptr,
        cols: b.cols,
        probs: b.probs,
        absorbing: b.absorbing,
        layer_offsets: Vec::new(),
    })
}

/// Expected number of slots from the start state to absorption, by one
/// backward substitution pass over the topological state order:
/// `t(s) = (1 + sum_{s' != s} p(s,s') t(s')) / (1 - p(s,s))`.
pub fn expected_absorption_time<T: ChainScalar>(chain: &AbsorbingChain<T>) -> Result<T> {
    let n = chain.num_states();
    let mut t = vec![T::zero(); n];
    for s in (0..n).rev() {
        if chain.absorbing[s] {
            continue;
        }
        let mut acc = T::one();
        let mut self_p = T::zero();
        for (to, p) in chain.row(s) {
            if to == s {
                self_p = p.clone();
            } else {
                acc += p.clone() * t[to].clone();
            }
        }
        let stay = T::one() - self_p;
        if stay.is_zero() {
            return Err(Error::SingularSelfLoop { state: chain.render_state(s) });
        }
        t[s] = acc / stay;
    }
    Ok(t[chain.start()].clone())
}

/// Probability that a trajectory from the start state ever visits each
/// state, by one forward pass: monotone coordinates make every entry a first
/// entry, so inflows can be pushed in index order after normalizing away the
/// self-loop.
pub fn visit_probabilities<T: ChainScalar>(chain: &AbsorbingChain<T>) -> Result<Vec<T>> {
    let n = chain.num_states();
    let mut v = vec![T::zero(); n];
    v[chain.start()] = T::one();
    for s in 0..n {
        if chain.absorbing[s] || v[s].is_zero() {
            continue;
        }
        let self_p = chain.self_loop(s).cloned().unwrap_or_else(T::zero);
        let stay = T::one() - self_p;
        if stay.is_zero() {
            return Err(Error::SingularSelfLoop { state: chain.render_state(s) });
        }
        let w = v[s].clone() / stay;
        for (to, p) in chain.row(s) {
            if to != s {
                let add = w.clone() * p.clone();
                v[to] += add;
            }
        }
    }
    Ok(v)
}

/// Who finishes when, for two receivers: the probability both complete in
/// the same slot, and the probabilities each one completes strictly last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinishOrder {
    pub tie: f64,
    pub r1_last: f64,
    pub r2_last: f64,
}

/// Finish-order probabilities read off a chain: each event is a first entry
/// into a completion layer, so it is the sum over transitions into that
/// layer of state occupancy (visit probability normalized by the self-loop)
/// times the transition probability.
fn finish_order_from(
    chain: &AbsorbingChain<f64>,
    coord1: usize,
    coord2: usize,
) -> Result<FinishOrder> {
    let p = chain.packets;
    let v = visit_probabilities(chain)?;
    let mut order = FinishOrder { tie: 0.0, r1_last: 0.0, r2_last: 0.0 };
    for s in 0..chain.num_states() {
        if chain.absorbing[s] || v[s] == 0.0 {
            continue;
        }
        let sc = chain.state_coords(s);
        let (a, b) = (sc[coord1], sc[coord2]);
        if a == p && b == p {
            continue;
        }
        let occupancy = v[s] / (1.0 - chain.self_loop(s).copied().unwrap_or(0.0));
        for (to, prob) in chain.row(s) {
            if to == s {
                continue;
            }
            let tc = chain.state_coords(to);
            let crossed1 = a < p && tc[coord1] == p;
            let crossed2 = b < p && tc[coord2] == p;
            match (crossed1, crossed2) {
                (true, true) => order.tie += occupancy * prob,
                (true, false) if tc[coord2] < p => order.r2_last += occupancy * prob,
                (false, true) if tc[coord1] < p => order.r1_last += occupancy * prob,
                _ => {}
            }
        }
    }
    Ok(order)
}

/// Finish-order probabilities of the two receivers in the joint relay chain.
pub fn finish_order_probs(
    packets: u32,
    p_relay: f64,
    p_recv1: f64,
    p_recv2: f64,
    state_cap: usize,
) -> Result<FinishOrder> {
    let chain = build_chain_multi(packets, p_relay, &[p_recv1, p_recv2], false, state_cap)?;
    finish_order_from(&chain, 1, 2)
}

/// Finish-order probabilities under a loss-free source link.
pub fn finish_order_probs_broadcast(
    packets: u32,
    p_recv1: f64,
    p_recv2: f64,
    state_cap: usize,
) -> Result<FinishOrder> {
    let chain = build_chain_broadcast(packets, &[p_recv1, p_recv2], state_cap)?;
    finish_order_from(&chain, 0, 1)
}

/// Weighted gap between the relay chain's finish-order probabilities and the
/// loss-free-source ones; the per-packet defect of the two-receiver lower
/// bound. Zero when the source link is loss-free or both receiver links are.
pub fn finish_order_discrepancy(
    packets: u32,
    p_relay: f64,
    p_recv1: f64,
    p_recv2: f64,
    state_cap: usize,
) -> Result<f64> {
    let full = finish_order_probs(packets, p_relay, p_recv1, p_recv2, state_cap)?;
    let free = finish_order_probs_broadcast(packets, p_recv1, p_recv2, state_cap)?;
    let (p1, p2) = (p_recv1, p_recv2);
    let both = p1 + p2 - p1 * p2;
    let tie_w = (1.0 - p1) * (1.0 - p2) * (p1 + p2) / (p1 * p2 * both);
    let w1 = p1 * (1.0 - p2) / (p2 * both);
    let w2 = (1.0 - p1) * p2 / (p1 * both);
    Ok((full.tie - free.tie) * tie_w
        + (free.r1_last - full.r1_last) * w1
        + (free.r2_last - full.r2_last) * w2)
}

/// Probability that the relay's fetch count is still at `P` (its (P+1)-th
/// fetch pending) in the very slot the last receiver completes, jointly over
/// all receivers: the visit probability of the extended chain's completion
/// state whose relay coordinate is exactly `P`.
pub fn prob_relay_ahead_joint(packets: u32, s: &Scenario, state_cap: usize) -> Result<f64> {
    let chain = build_chain_multi(packets, s.p_relay(), s.p_recv(), true, state_cap)?;
    let v = visit_probabilities(&chain)?;
    let radix = chain.packets as usize + 1;
    let done_with_relay_at_cap =
        chain.layer_offsets[chain.packets as usize] + radix.pow(chain.receivers as u32) - 1;
    debug_assert!(chain
        .state_coords(done_with_relay_at_cap)
        .iter()
        .all(|&c| c == chain.packets));
    Ok(v[done_with_relay_at_cap])
}

fn exact_prob(p: f64) -> ExactRational {
    ExactRational::from_float(p).expect("probabilities are finite")
}

/// System delay of the buffered relay: absorption time of the joint chain.
pub fn withbuffer_system_delay_chain(s: &Scenario, state_cap: usize) -> Result<f64> {
    let chain = build_chain_multi(s.packets(), s.p_relay(), s.p_recv(), false, state_cap)?;
    expected_absorption_time(&chain)
}

/// As [`withbuffer_system_delay_chain`], evaluated in exact rational
/// arithmetic on the probabilities' exact binary values and rounded to the
/// nearest double at the end.
pub fn withbuffer_system_delay_chain_exact(s: &Scenario, state_cap: usize) -> Result<f64> {
    use num_traits::ToPrimitive;
    let p_recv: Vec<ExactRational> = s.p_recv().iter().map(|&p| exact_prob(p)).collect();
    let chain = build_chain_multi(s.packets(), exact_prob(s.p_relay()), &p_recv, false, state_cap)?;
    Ok(expected_absorption_time(&chain)?.to_f64().expect("delay fits in f64"))
}

/// System delay of the unbuffered relay: broadcast-chain absorption divided
/// by the source-link probability (receivers only see slots in which the
/// source link succeeded, and those slots replay the loss-free dynamics).
pub fn nobuffer_system_delay_chain(s: &Scenario, state_cap: usize) -> Result<f64> {
    let chain = build_chain_broadcast(s.packets(), s.p_recv(), state_cap)?;
    Ok(expected_absorption_time(&chain)? / s.p_relay())
}

/// As [`nobuffer_system_delay_chain`], in exact rational arithmetic.
pub fn nobuffer_system_delay_chain_exact(s: &Scenario, state_cap: usize) -> Result<f64> {
    use num_traits::ToPrimitive;
    let p_recv: Vec<ExactRational> = s.p_recv().iter().map(|&p| exact_prob(p)).collect();
    let chain = build_chain_broadcast(s.packets(), &p_recv, state_cap)?;
    let t = expected_absorption_time(&chain)?;
    Ok((t / exact_prob(s.p_relay())).to_f64().expect("delay fits in f64"))
}

//! Completion-delay analysis for perfect random linear network coding over a
//! two-hop erasure network: a source feeds a relay over a lossy link, the
//! relay feeds `R` receivers over independent lossy links, and all links are
//! full duplex, so the relay can receive and transmit in the same time slot.
//!
//! The quantity of interest is the number of source transmissions needed
//! until every receiver can decode all `P` packets. The crate computes it by
//! three deliberately independent routes so they can cross-check each other:
//!
//! * [`analytic`] — closed forms and series: plain forwarding without a relay
//!   buffer, broadcast from a loss-free source, the buffered relay via a
//!   lattice-path coefficient recursion, and a system-level lower bound.
//! * [`markov`] — exact absorbing-chain solves over the joint packet-count
//!   state space of the relay and the receivers.
//! * [`sim`] — Monte Carlo of three relaying schemes (no buffer, buffered
//!   random recombination, fewest-broadcast-packet-first) with reproducible
//!   per-trial random streams.
//!
//! [`combinatorics`] holds the exact counting primitives the formulas build
//! on. Shared problem types ([`Scenario`], [`DelayValue`]) live at the root.

pub mod analytic;
pub mod combinatorics;
mod error;
pub mod markov;
mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use scenario::{DelayValue, Formula, Scenario};

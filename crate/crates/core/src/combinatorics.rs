//! Exact counting primitives behind the delay formulas.
//!
//! Everything integer-valued here is computed in arbitrary precision, because
//! the lattice-path counts enter alternating sums whose terms dwarf the final
//! value; only the negative-binomial tail probability is evaluated in `f64`
//! (it is a probability, so the float codomain is the natural one).

use num_bigint::BigInt;

/// Arbitrary-precision signed integer used by the exact routines.
pub type ExactInt = BigInt;
/// Arbitrary-precision rational; always kept reduced with positive denominator.
pub type ExactRational = num_rational::BigRational;

/// Binomial coefficient `C(n, k)`, exact; zero when `k > n`.
pub fn binom(n: u32, k: u32) -> ExactInt {
    if k > n {
        return ExactInt::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = ExactInt::from(1u32);
    for i in 0..k {
        // Each prefix product is itself a binomial, so the division is exact.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of lattice paths from (0,0) to (i,i) made of unit-right, unit-up,
/// and diagonal steps that never cross above the diagonal and take exactly
/// `i + j` steps (equivalently, exactly `i - j` diagonal steps, `j` right
/// steps, and `j` up steps).
///
/// Closed form: `C(i+j, i) * C(i, j) / (j + 1)`.
///
/// # Panics
/// Panics when `j > i`; no such path exists and the closed form does not
/// apply there.
pub fn schroeder_paths(i: u32, j: u32) -> ExactInt {
    assert!(j <= i, "schroeder_paths: j = {j} exceeds i = {i}");
    binom(i + j, i) * binom(i, j) / (j + 1)
}

/// Total number of such paths to (i,i) over all step counts: the large
/// Schroeder numbers 1, 2, 6, 22, 90, 394, ...
pub fn schroeder_total(i: u32) -> ExactInt {
    (0..=i).map(|j| schroeder_paths(i, j)).sum()
}

/// Narayana number `N(n, k) = C(n, k) * C(n, k-1) / n`: the number of
/// balanced parenthesis strings of length 2n with exactly k peaks.
///
/// # Panics
/// Panics unless `1 <= k <= n`.
pub fn narayana(n: u32, k: u32) -> ExactInt {
    assert!(
        n >= 1 && (1..=n).contains(&k),
        "narayana: need 1 <= k <= n, got n = {n}, k = {k}"
    );
    binom(n, k) * binom(n, k - 1) / n
}

/// Probability that a Bernoulli(`p`) process collects `packets` successes
/// within `packets + d` trials: the partial sum
/// `sum_{j=0}^{d} C(packets+j-1, packets-1) p^packets (1-p)^j`,
/// which equals the regularized incomplete beta function with parameters
/// (`packets`, `d + 1`) evaluated at `p`.
///
/// # Panics
/// Panics when `p` is outside `(0, 1]` or `packets == 0`.
pub fn reg_incomplete_beta(p: f64, packets: u32, d: u32) -> f64 {
    assert!(p > 0.0 && p <= 1.0, "reg_incomplete_beta: p = {p} outside (0, 1]");
    assert!(packets >= 1, "reg_incomplete_beta: packets must be at least 1");
    let q = 1.0 - p;
    let mut term = p.powi(packets as i32);
    let mut acc = term;
    for j in 0..d {
        term *= (packets + j) as f64 / (j + 1) as f64 * q;
        acc += term;
    }
    // A probability by construction; trim float round-off above 1.
    acc.min(1.0)
}

//! Certificate that a block-cycle vector with large dyadic coordinates is not
//! reiteratively recurrent.
//!
//! Block `j` is a cycle of length `2^j`. If `|x_{2^j}| > 1/j`, then after
//! `n = ℓ·2^j + k` steps with `j ≤ k < 2^j` the coordinate `2^j + k` equals
//! `2^k x_{2^j}`, of modulus above 1, while every vector in the ball keeps
//! coordinates beyond the tail index below 1. So at most `j` of any `2^j`
//! consecutive times return, which caps the upper Banach density by `j/2^j`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::families::IndexWindow;
use crate::operators::{apply, OperatorSpec, SpaceDescriptor, StateVector};
use crate::orbit::return_set;
use crate::scalar::{f64_to_rat, Rational, Scalar};

/// Full block periods checked after the certificate is found.
const PERIODS_CHECKED: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefutationError {
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("certificate failed: {0}")]
    Broken(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RrecRefutation {
    pub j: u32,
    /// First index `N₁` from which every coordinate of `x` stays below `1 − ε`.
    pub tail_index: u64,
    pub coordinate: Rational,
    pub delta: f64,
    pub epsilon: f64,
    /// `(n, k)` pairs where `|[Tⁿx]_{2^j+k}| = 2^k |x_{2^j}| > 1` was checked exactly.
    pub pairs_checked: u64,
    /// Largest return count over windows of length `2^j` on the checked horizon.
    pub max_returns_per_window: usize,
    pub window_len: u64,
    /// `j / 2^j`, the resulting cap on the upper Banach density.
    pub density_cap: f64,
    pub horizon: u64,
}

/// Searches for `j` with `j/2^j < δ/2`, `2^j > N₁` and `|x_{2^j}| > 1/j`, then
/// verifies the blow-up identity and the per-window return cap exactly.
pub fn blockcycle_rrec_refutation(x: &StateVector, delta: f64, epsilon: f64) -> Result<RrecRefutation, RefutationError> {
    let inapplicable = |m: &str| RefutationError::Inapplicable(m.to_string());
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(inapplicable("δ must be positive"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(inapplicable("the ball radius must lie in (0, 1)"));
    }
    let one_sided = matches!(
        x.space,
        SpaceDescriptor::SequenceLp { bilateral: false, .. } | SpaceDescriptor::SequenceC0 { bilateral: false }
    );
    let coords = x.coords().filter(|_| one_sided).ok_or_else(|| inapplicable("x is not a one-sided sequence"))?;
    if !x.is_exact() {
        return Err(inapplicable("x must have exact coordinates"));
    }
    if coords.is_empty() {
        return Err(inapplicable("x = 0"));
    }
    let eps_r = f64_to_rat(epsilon).expect("finite");
    let limit = Rational::one() - &eps_r;
    let tail_index = coords
        .iter()
        .filter(|(_, v)| abs_at_least(v, &limit))
        .map(|(&i, _)| i as u64 + 1)
        .max()
        .unwrap_or(1);
    let last = *coords.keys().next_back().expect("nonempty") as u64;

    let mut found = None;
    for j in 1u32..63 {
        let b = 1u64 << j;
        if b > last {
            break;
        }
        if (j as f64) / (b as f64) >= delta / 2.0 || b <= tail_index {
            continue;
        }
        let v = x.coord(b as i64);
        let thresh = Rational::new(1.into(), j.into());
        if abs_above(&v, &thresh) {
            found = Some((j, b, v));
            break;
        }
    }
    let (j, b, v) = found.ok_or_else(|| inapplicable("no dyadic coordinate x_{2^j} above 1/j past the tail index"))?;
    let coordinate = v.as_rational().cloned().unwrap_or_else(Rational::zero);

    // orbit through a few full periods of block j, checking the blow-up identity
    let op = OperatorSpec::BlockCycle { space: x.space.clone() };
    let horizon = PERIODS_CHECKED * b - 1;
    let mut y = x.clone();
    let mut pairs = 0u64;
    let mut two_k = Scalar::one();
    let base = v.clone();
    for n in 0..=horizon {
        let k = n % b;
        if k == 0 {
            two_k = Scalar::one();
        }
        if k >= u64::from(j) {
            let got = y.coord((b + k) as i64);
            let want = &two_k * &base;
            if got != want {
                return Err(RefutationError::Broken(format!(
                    "[T^{n}x]_{} = {got}, expected 2^{k}·x_{b} = {want}",
                    b + k
                )));
            }
            if !abs_above(&got, &Rational::one()) {
                return Err(RefutationError::Broken(format!("|[T^{n}x]_{}| ≤ 1", b + k)));
            }
            pairs += 1;
        }
        two_k = &two_k * &Scalar::int(2);
        if n < horizon {
            y = apply(&op, &y).map_err(|e| RefutationError::Broken(e.to_string()))?;
        }
    }

    let rec = return_set(&op, x, epsilon, &[0], horizon).map_err(|e| RefutationError::Broken(e.to_string()))?;
    let max_returns = max_window_count(&rec.window, b);
    if max_returns > j as usize {
        return Err(RefutationError::Broken(format!(
            "a window of length {b} holds {max_returns} returns, more than {j}"
        )));
    }
    Ok(RrecRefutation {
        j,
        tail_index,
        coordinate,
        delta,
        epsilon,
        pairs_checked: pairs,
        max_returns_per_window: max_returns,
        window_len: b,
        density_cap: j as f64 / b as f64,
        horizon,
    })
}

fn abs_at_least(v: &Scalar, r: &Rational) -> bool {
    match v.abs_sq_exact() {
        Some(sq) => sq >= r * r,
        None => v.abs() >= crate::scalar::rat_to_f64(r),
    }
}

fn abs_above(v: &Scalar, r: &Rational) -> bool {
    match v.abs_sq_exact() {
        Some(sq) => sq > r * r,
        None => v.abs() > crate::scalar::rat_to_f64(r),
    }
}

/// `max_m card(A ∩ [m, m + len − 1])` over windows inside the horizon.
fn max_window_count(a: &IndexWindow, len: u64) -> usize {
    let e = a.elements();
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..e.len() {
        while e[hi] - e[lo] >= len {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::parse_vector;
    use crate::scalar::rat;

    fn g_vector(jmax: u32) -> StateVector {
        let coords = (1..=jmax).map(|j| (1i64 << j, Scalar::real(rat(2, j as i64))));
        StateVector::sparse(SpaceDescriptor::l2(), coords).unwrap()
    }

    #[test]
    fn refutes_at_block_eight() {
        let r = blockcycle_rrec_refutation(&g_vector(20), 0.1, 0.5).unwrap();
        assert_eq!(r.j, 8);
        assert_eq!(r.tail_index, 17);
        assert!(r.max_returns_per_window <= 8);
        assert_eq!(r.pairs_checked, 4 * (256 - 8));
    }

    #[test]
    fn periodic_and_zero_vectors_are_out_of_scope() {
        let e5 = parse_vector("e(5)", &SpaceDescriptor::l2()).unwrap();
        assert!(matches!(
            blockcycle_rrec_refutation(&e5, 0.1, 0.5),
            Err(RefutationError::Inapplicable(_))
        ));
        let z = parse_vector("zero", &SpaceDescriptor::l2()).unwrap();
        assert!(matches!(
            blockcycle_rrec_refutation(&z, 0.1, 0.5),
            Err(RefutationError::Inapplicable(_))
        ));
    }

    #[test]
    fn window_counter() {
        let a = IndexWindow::new(vec![0, 1, 2, 10, 11, 12, 13], 20).unwrap();
        assert_eq!(max_window_count(&a, 4), 4);
        assert_eq!(max_window_count(&a, 3), 3);
    }
}

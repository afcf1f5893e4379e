//! Vectors `x = (x_{k,j})`, `k ≥ 0`, `0 ≤ j < 2^k`, under the row rotation
//! `[Tx]_{k,j} = x_{k,(j+1) mod 2^k}`, with the seminorms
//!
//! ```text
//! p_n(x) = Σ_k 2^{-k} max_j |x_{k,j}| + Σ_{k≥2} k · max_{1≤m≤n, m<2^{k-1}} |x_{k,2^{k-1}+m}|
//! ```
//!
//! A vector is stored as finitely many materialized rows, a closed-form
//! rule for the remaining rows, and the number of rotations applied so far.
//! Rotating never touches the rows, so `Tᵐx` costs O(1).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::OperatorError;
use crate::scalar::Rational;

/// Largest row index that can be addressed with 64-bit positions.
pub const MAX_ROW: u32 = 62;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RowTail {
    Zero,
    /// Every row from `tail_from` on is `c` at position 0 and zero elsewhere.
    OneHotAtZero(Rational),
    /// Rows from `tail_from` on are unknown but bounded entrywise by `M`.
    Bounded(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowBlocks {
    rows: BTreeMap<u32, BTreeMap<u64, Rational>>,
    tail_from: u32,
    tail: RowTail,
    shift: u64,
    factor: Rational,
}

/// Exact evaluation of a seminorm with its tail accounted for.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormEval {
    /// Materialized part plus tail contribution (exact value or upper bound).
    pub value: Rational,
    /// Contribution of rows `k ≥ K`, exact or bounded.
    pub tail: Rational,
    /// Whether `value` is the exact seminorm rather than an upper bound.
    pub exact: bool,
}

fn row_len(k: u32) -> u64 {
    1u64 << k
}

fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::one() << k)
}

impl RowBlocks {
    pub fn new(
        entries: impl IntoIterator<Item = (u32, u64, Rational)>,
        tail_from: Option<u32>,
        tail: RowTail,
    ) -> Result<Self, OperatorError> {
        let mut rows: BTreeMap<u32, BTreeMap<u64, Rational>> = BTreeMap::new();
        for (k, j, v) in entries {
            if k > MAX_ROW {
                return Err(OperatorError::Space(format!("row {k} exceeds the addressable range")));
            }
            if j >= row_len(k) {
                return Err(OperatorError::Space(format!("position {j} outside row {k}")));
            }
            if !v.is_zero() {
                rows.entry(k).or_default().insert(j, v);
            }
        }
        let materialized = rows.keys().next_back().map_or(0, |k| k + 1);
        let tail_from = tail_from.unwrap_or(materialized);
        if tail_from < materialized {
            return Err(OperatorError::Space(format!(
                "tail starts at row {tail_from} below materialized row {}",
                materialized - 1
            )));
        }
        if tail_from > MAX_ROW {
            return Err(OperatorError::Space("tail starts beyond the addressable range".into()));
        }
        if let RowTail::Bounded(m) = &tail {
            if m.is_negative() {
                return Err(OperatorError::Space("tail bound must be non-negative".into()));
            }
        }
        let tail = match tail {
            RowTail::OneHotAtZero(c) if c.is_zero() => RowTail::Zero,
            t => t,
        };
        Ok(RowBlocks {
            rows,
            tail_from,
            tail,
            shift: 0,
            factor: Rational::one(),
        })
    }

    /// `x_{k,0} = 1` for every `k`, zero elsewhere.
    pub fn special() -> Self {
        RowBlocks::new([], Some(0), RowTail::OneHotAtZero(Rational::one())).expect("valid")
    }

    pub fn zero() -> Self {
        RowBlocks::new([], Some(0), RowTail::Zero).expect("valid")
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn tail(&self) -> &RowTail {
        &self.tail
    }

    pub fn tail_from(&self) -> u32 {
        self.tail_from
    }

    /// Period of the rotation on this vector when every row past the
    /// materialized ones vanishes.
    fn rotation_period(&self) -> Option<u64> {
        match self.tail {
            RowTail::Zero => Some(if self.tail_from == 0 {
                1
            } else {
                row_len(self.tail_from - 1)
            }),
            _ => None,
        }
    }

    /// `Tᵐ` applied to this vector.
    pub fn rotate(&self, m: u64) -> Result<Self, OperatorError> {
        let mut out = self.clone();
        out.shift = match self.rotation_period() {
            Some(p) => (self.shift % p + m % p) % p,
            None => self.shift.checked_add(m).ok_or(OperatorError::Overflow(
                "rotation count exceeds 64 bits".into(),
            ))?,
        };
        Ok(out)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.factor = &self.factor * c;
        if out.factor.is_zero() {
            return RowBlocks::zero();
        }
        out
    }

    /// Entry `(k, j)` of the represented vector, `None` inside a bounded tail.
    pub fn entry(&self, k: u32, j: u64) -> Option<Rational> {
        let base = j.wrapping_add(self.shift) & (row_len(k) - 1);
        let v = if k < self.tail_from {
            self.rows
                .get(&k)
                .and_then(|r| r.get(&base))
                .cloned()
                .unwrap_or_else(Rational::zero)
        } else {
            match &self.tail {
                RowTail::Zero => Rational::zero(),
                RowTail::OneHotAtZero(c) if base == 0 => c.clone(),
                RowTail::OneHotAtZero(_) => Rational::zero(),
                RowTail::Bounded(_) => return None,
            }
        };
        Some(&v * &self.factor)
    }

    /// Nonzero entries of row `k` as positions in the represented vector.
    fn row_entries(&self, k: u32) -> Result<Vec<(u64, Rational)>, OperatorError> {
        let mask = row_len(k) - 1;
        let place = |j0: u64| j0.wrapping_sub(self.shift) & mask;
        if k < self.tail_from {
            Ok(self
                .rows
                .get(&k)
                .map(|r| {
                    r.iter()
                        .map(|(&j0, v)| (place(j0), v * &self.factor))
                        .collect()
                })
                .unwrap_or_default())
        } else {
            match &self.tail {
                RowTail::Zero => Ok(Vec::new()),
                RowTail::OneHotAtZero(c) => Ok(vec![(place(0), c * &self.factor)]),
                RowTail::Bounded(_) => Err(OperatorError::SeminormRefused(format!(
                    "row {k} lies in a bounded tail"
                ))),
            }
        }
    }

    /// `p_n(x)`.
    pub fn seminorm(&self, n: u64) -> Result<SeminormEval, OperatorError> {
        combination_seminorm(&[(Rational::one(), self)], n)
    }
}

/// `p_n(Σ cᵢ xᵢ)`, exact whenever no term has a bounded tail.
///
/// Rows beyond `K` hold only closed-form tails. `K` is chosen so that
/// `2^{K-1}` exceeds every rotation count plus `n`; from there on each
/// one-hot sits at a distinct position `−sᵢ mod 2^k` well away from the
/// window `2^{k-1} + [1, n]`, so each row contributes the same maximum `M`
/// to the first sum and nothing to the second, for a tail of exactly
/// `M · 2^{1-K}`.
pub fn combination_seminorm(
    terms: &[(Rational, &RowBlocks)],
    n: u64,
) -> Result<SeminormEval, OperatorError> {
    let bounded = terms
        .iter()
        .any(|(c, x)| !c.is_zero() && matches!(x.tail, RowTail::Bounded(_)));
    if bounded {
        return bounded_seminorm(terms, n);
    }
    let max_shift = terms.iter().map(|(_, x)| x.shift).max().unwrap_or(0);
    let reach = max_shift.saturating_add(n);
    let mut k_eval = terms.iter().map(|(_, x)| x.tail_from).max().unwrap_or(0);
    while k_eval == 0 || (k_eval <= MAX_ROW && row_len(k_eval - 1) <= reach) {
        k_eval += 1;
    }
    if k_eval > MAX_ROW {
        return Err(OperatorError::SeminormRefused(
            "rotation count too large for 64-bit row positions".into(),
        ));
    }

    let mut value = Rational::zero();
    for k in 0..k_eval {
        let mut row: BTreeMap<u64, Rational> = BTreeMap::new();
        for (c, x) in terms {
            if c.is_zero() {
                continue;
            }
            for (j, v) in x.row_entries(k)? {
                let slot = row.entry(j).or_insert_with(Rational::zero);
                *slot += c * &v;
            }
        }
        let row_max = row.values().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
        value += row_max / pow2(k);
        if k >= 2 && n >= 1 {
            let half = row_len(k - 1);
            let last_m = n.min(half - 1);
            if last_m >= 1 {
                let window_max = row
                    .range(half + 1..=half + last_m)
                    .map(|(_, v)| v.abs())
                    .max()
                    .unwrap_or_else(Rational::zero);
                value += window_max * Rational::from_integer(BigInt::from(k));
            }
        }
    }

    let mut by_shift: BTreeMap<u64, Rational> = BTreeMap::new();
    for (c, x) in terms {
        if let RowTail::OneHotAtZero(t) = &x.tail {
            let slot = by_shift.entry(x.shift).or_insert_with(Rational::zero);
            *slot += c * t * &x.factor;
        }
    }
    let m = by_shift.values().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    let tail = m / pow2(k_eval - 1);
    Ok(SeminormEval {
        value: value + &tail,
        tail,
        exact: true,
    })
}

/// Only `p_0` is available with an unknown tail: every unknown row adds at
/// most `Σ|cᵢ|·Mᵢ` to its row maximum.
fn bounded_seminorm(terms: &[(Rational, &RowBlocks)], n: u64) -> Result<SeminormEval, OperatorError> {
    if n >= 1 {
        return Err(OperatorError::SeminormRefused(format!(
            "p_{n} needs every row of a bounded tail; only p_0 has a certified tail bound"
        )));
    }
    let k0 = terms.iter().map(|(_, x)| x.tail_from).min().unwrap_or(0);
    let mut value = Rational::zero();
    for k in 0..k0 {
        let mut row: BTreeMap<u64, Rational> = BTreeMap::new();
        for (c, x) in terms {
            for (j, v) in x.row_entries(k)? {
                *row.entry(j).or_insert_with(Rational::zero) += c * &v;
            }
        }
        let row_max = row.values().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
        value += row_max / pow2(k);
    }
    // rows k ≥ k0: each term contributes at most |c|·(row max) there
    let mut per_row = Rational::zero();
    for (c, x) in terms {
        let bound = match &x.tail {
            RowTail::Bounded(m) => m.clone(),
            RowTail::OneHotAtZero(t) => t.abs(),
            RowTail::Zero => Rational::zero(),
        };
        let materialized = x
            .rows
            .range(k0..)
            .flat_map(|(_, r)| r.values().map(|v| v.abs()))
            .max()
            .unwrap_or_else(Rational::zero);
        per_row += c.abs() * x.factor.abs() * bound.max(materialized);
    }
    let tail = per_row / pow2(k0) * Rational::from_integer(BigInt::from(2));
    Ok(SeminormEval {
        value: value + &tail,
        tail,
        exact: false,
    })
}

/// `1 + (l−1)·2^{l−1}` with `l ≥ 2` minimal such that `2^l ≥ 2(n+2)`.
pub fn continuity_constant(n: u64) -> Rational {
    let mut l = 2u32;
    while row_len(l) < 2 * (n + 2) {
        l += 1;
    }
    Rational::one() + Rational::from_integer(BigInt::from(l - 1) * (BigInt::one() << (l - 1)))
}

/// `p_n(Tx) ≤ C(n) · p_{n+1}(x)`, decided exactly.
pub fn continuity_bound_check(x: &RowBlocks, n: u64) -> Result<bool, OperatorError> {
    let lhs = x.rotate(1)?.seminorm(n)?;
    let rhs = x.seminorm(n + 1)?;
    if !lhs.exact {
        return Err(OperatorError::SeminormRefused("inexact seminorm".into()));
    }
    Ok(lhs.value <= continuity_constant(n) * rhs.value)
}

impl fmt::Display for RowBlocks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_r = |r: &Rational| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        let mut parts: Vec<String> = Vec::new();
        for (k, row) in &self.rows {
            for (j, v) in row {
                parts.push(format!("{k}:{j}:{}", fmt_r(v)));
            }
        }
        let tail = match &self.tail {
            RowTail::Zero => "zero".to_string(),
            RowTail::OneHotAtZero(c) => format!("onehot({})", fmt_r(c)),
            RowTail::Bounded(m) => format!("bounded({})", fmt_r(m)),
        };
        write!(f, "rows({}; from={}, tail={tail})", parts.join(", "), self.tail_from)?;
        if self.shift != 0 {
            write!(f, " after {} rotations", self.shift)?;
        }
        if !self.factor.is_one() {
            write!(f, " times {}", fmt_r(&self.factor))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn diff_seminorm(x: &RowBlocks, m: u64, n: u64) -> SeminormEval {
        let y = x.rotate(m).unwrap();
        combination_seminorm(&[(Rational::one(), &y), (-Rational::one(), x)], n).unwrap()
    }

    #[test]
    fn special_vector_returns_at_dyadic_times() {
        let x = RowBlocks::special();
        for l in 2..12u32 {
            for n in 0..4u64 {
                if row_len(l) <= n {
                    continue;
                }
                let e = diff_seminorm(&x, row_len(l), n);
                assert_eq!(e.value, Rational::one() / pow2(l), "l={l} n={n}");
                assert!(e.exact);
            }
        }
    }

    #[test]
    fn orbit_spikes_where_the_one_hot_enters_the_window() {
        let x = RowBlocks::special();
        // with the left rotation the one-hot of row k sits at 2^{k-1}+1 after 2^{k-1}-1 steps
        for k in 3..16u32 {
            let v = x.rotate(row_len(k - 1) - 1).unwrap().seminorm(1).unwrap();
            assert!(v.value >= Rational::from_integer(BigInt::from(k)));
        }
    }

    #[test]
    fn seminorm_of_plain_rows() {
        let x = RowBlocks::new([(0, 0, rat(1, 1)), (2, 3, rat(-5, 1))], None, RowTail::Zero).unwrap();
        // 1 + 5/4 + 2·5 (position 3 = 2 + 1 is in the window for n ≥ 1)
        assert_eq!(x.seminorm(0).unwrap().value, rat(9, 4));
        assert_eq!(x.seminorm(1).unwrap().value, rat(49, 4));
        // period 2^{tail_from-1} = 4
        assert_eq!(x.rotate(4).unwrap(), x);
    }

    #[test]
    fn bounded_tail_refuses_window_seminorms() {
        let x = RowBlocks::new([(1, 1, rat(1, 1))], Some(3), RowTail::Bounded(rat(1, 1))).unwrap();
        assert!(x.seminorm(1).is_err());
        let e = x.seminorm(0).unwrap();
        assert!(!e.exact);
        assert_eq!(e.tail, rat(1, 4));
    }

    #[test]
    fn continuity_on_special_and_zero() {
        assert!(continuity_bound_check(&RowBlocks::special(), 1).unwrap());
        assert!(continuity_bound_check(&RowBlocks::zero(), 3).unwrap());
        // 2^l ≥ 2(n+2): l = 3 for n ≤ 2, l = 4 for n = 3
        assert_eq!(continuity_constant(1), rat(9, 1));
        assert_eq!(continuity_constant(2), rat(9, 1));
        assert_eq!(continuity_constant(3), rat(25, 1));
    }
}

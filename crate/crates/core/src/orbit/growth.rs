use std::collections::BTreeSet;

use super::{Orbit, OrbitError, Precision};
use crate::operators::{seminorm, OperatorSpec, StateVector};

/// A new running maximum must beat the previous one by this factor.
const RECORD_FACTOR: f64 = 1.0 + 1e-9;
/// Records needed before growth is claimed.
const MIN_RECORDS: usize = 4;
/// Late growth must reach this multiple of the maximum seen up to `√N`.
const LATE_GROWTH_FACTOR: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthVerdict {
    BoundedWithin(f64),
    /// Strictly increasing running maxima `(n, value)`.
    GrowthWitness(Vec<(u64, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthCurve {
    /// `(n, p_i(Tⁿx))`, increasing in `n`.
    pub samples: Vec<(u64, f64)>,
    pub verdict: GrowthVerdict,
}

impl GrowthCurve {
    pub fn is_growing(&self) -> bool {
        matches!(self.verdict, GrowthVerdict::GrowthWitness(_))
    }

    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.samples
            .binary_search_by_key(&n, |s| s.0)
            .ok()
            .map(|i| self.samples[i].1)
    }

    /// Columnar `n value` text.
    pub fn to_columns(&self) -> String {
        self.samples.iter().map(|(n, v)| format!("{n} {v:?}\n")).collect()
    }
}

/// `0`, a geometric ladder with ratio 5/4, and `2^k − 1, 2^k, 2^k + 1` up to `N`.
pub fn growth_schedule(horizon: u64) -> Vec<u64> {
    let mut s = BTreeSet::from([0, horizon]);
    let mut v = 1.0f64;
    while v <= horizon as f64 {
        s.insert(v as u64);
        v = (v * 1.25).max(v + 1.0);
    }
    for k in 0..64 {
        let p = 1u64 << k;
        if p > horizon.saturating_add(1) {
            break;
        }
        for n in [p - 1, p, p + 1] {
            if n <= horizon {
                s.insert(n);
            }
        }
    }
    s.into_iter().collect()
}

/// Growth verdict from samples; `horizon` fixes the `√N` reference point.
pub fn growth_verdict(samples: Vec<(u64, f64)>, horizon: u64) -> GrowthCurve {
    let mut records: Vec<(u64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for &(n, v) in &samples {
        if records.is_empty() || v > best * RECORD_FACTOR && v > best {
            records.push((n, v));
            best = v;
        }
    }
    let root = (horizon as f64).sqrt() as u64;
    let early = samples
        .iter()
        .filter(|(n, _)| *n <= root)
        .map(|s| s.1)
        .fold(0.0, f64::max);
    let late = records.last().map_or(0.0, |r| r.1);
    let late_n = records.last().map_or(0, |r| r.0);
    let growing = records.len() >= MIN_RECORDS
        && late_n > root
        && (late.is_infinite() || late >= LATE_GROWTH_FACTOR * early && late > 0.0);
    let verdict = if growing {
        // drop the starting value so the witness is the growth itself
        GrowthVerdict::GrowthWitness(records.into_iter().skip(1).collect())
    } else {
        GrowthVerdict::BoundedWithin(samples.iter().map(|s| s.1).fold(0.0, f64::max))
    };
    GrowthCurve { samples, verdict }
}

/// `p_i(Tⁿx)` along [`growth_schedule`].
pub fn orbit_growth(
    op: &OperatorSpec,
    x: &StateVector,
    seminorm_index: u64,
    horizon: u64,
    precision: Precision,
) -> Result<GrowthCurve, OrbitError> {
    if horizon == 0 {
        return Err(OrbitError::Config("horizon must be at least 1".into()));
    }
    let space = op.space();
    space.check_seminorm(seminorm_index)?;
    let mut orbit = Orbit::new(op, x, precision, horizon);
    let mut samples = Vec::new();
    for n in growth_schedule(horizon) {
        let y = orbit.state_at(n)?;
        samples.push((n, seminorm(&space, seminorm_index, &y)?.approx));
    }
    Ok(growth_verdict(samples, horizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_vector, RowBlocks};

    #[test]
    fn schedule_contains_dyadic_neighbours() {
        let s = growth_schedule(1 << 10);
        for n in [0, 1, 2, 3, 511, 512, 513, 1023, 1024] {
            assert!(s.contains(&n), "{n}");
        }
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn special_row_vector_orbit_is_unbounded() {
        let op = parse_operator("rowrotation").unwrap();
        let x = StateVector::rows(RowBlocks::special());
        let c = orbit_growth(&op, &x, 1, 1 << 20, Precision::Exact).unwrap();
        assert!(c.is_growing(), "{:?}", c.verdict);
        // the one-hot of row k enters the p_1 window after 2^{k-1} - 1 steps
        for k in 2..=20u32 {
            let v = c.value_at((1 << (k - 1)) - 1).unwrap();
            assert!(v >= f64::from(k), "k={k}: {v}");
        }
    }

    #[test]
    fn rotation_is_bounded() {
        let op = parse_operator("matrix([[0, -1], [1, 0]])").unwrap();
        let x = parse_vector("vec(3, 4)", &op.space()).unwrap();
        let c = orbit_growth(&op, &x, 0, 5000, Precision::Exact).unwrap();
        assert_eq!(c.verdict, GrowthVerdict::BoundedWithin(5.0));
    }

    #[test]
    fn jordan_block_grows() {
        let op = parse_operator("matrix([[1, 1], [0, 1]])").unwrap();
        let x = parse_vector("vec(0, 1)", &op.space()).unwrap();
        let c = orbit_growth(&op, &x, 0, 10_000, Precision::Exact).unwrap();
        assert!(c.is_growing());
    }
}

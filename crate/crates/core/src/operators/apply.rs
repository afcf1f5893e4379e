use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

use super::state::Representation;
use super::{DiagonalRule, OperatorError, OperatorSpec, ShiftSide, StateVector};
use crate::scalar::{Rational, Scalar};

/// `Tx`.
pub fn apply(op: &OperatorSpec, x: &StateVector) -> Result<StateVector, OperatorError> {
    let space = op.space();
    if x.space != space {
        return Err(OperatorError::Space(format!(
            "{op} acts on {space}, vector lives in {}",
            x.space
        )));
    }
    match op {
        OperatorSpec::RowRotation => {
            let r = rows_of(x)?;
            Ok(StateVector::rows(r.rotate(1)?))
        }
        OperatorSpec::Power { base, p } => apply_n(base, x, *p),
        OperatorSpec::Scaled { factor, base } => {
            let y = apply(base, x)?;
            scale(factor, &y)
        }
        _ => {
            let m = sparse_of(x)?;
            let out = match op {
                OperatorSpec::Matrix(a) => matrix_apply(a, m),
                OperatorSpec::WeightedBackwardShift { weights, side, .. } => {
                    let mut out = BTreeMap::new();
                    for (&i, v) in m {
                        if *side == ShiftSide::Unilateral && i <= 1 {
                            continue;
                        }
                        let w = weights.eval(i)?;
                        if w.is_zero() {
                            return Err(OperatorError::Eval(format!("weight w_{i} vanishes")));
                        }
                        out.insert(i - 1, &w * v);
                    }
                    out
                }
                OperatorSpec::Diagonal { rule, .. } => {
                    let mut out = BTreeMap::new();
                    for (&i, v) in m {
                        let lambda = match rule {
                            DiagonalRule::List(l) => l.get((i - 1) as usize).cloned().ok_or_else(|| {
                                OperatorError::Space(format!("diagonal has {} entries, coordinate {i} given", l.len()))
                            })?,
                            DiagonalRule::Rule(e) => e.eval(i)?,
                        };
                        out.insert(i, &lambda * v);
                    }
                    out
                }
                OperatorSpec::BlockCycle { .. } => block_cycle(m)?,
                OperatorSpec::AffineComposition { a, b, max_degree, .. } => {
                    let mat = coefficient_matrix(a, b, *max_degree);
                    matrix_apply(&mat, m)
                }
                _ => unreachable!("handled above"),
            };
            finish(x, out)
        }
    }
}

/// `Tⁿx`, in O(1) for rotations.
pub fn apply_n(op: &OperatorSpec, x: &StateVector, n: u64) -> Result<StateVector, OperatorError> {
    match op {
        OperatorSpec::RowRotation => {
            if x.space != op.space() {
                return Err(OperatorError::Space("row rotation needs a row vector".into()));
            }
            Ok(StateVector::rows(rows_of(x)?.rotate(n)?))
        }
        OperatorSpec::Power { base, p } if matches!(**base, OperatorSpec::RowRotation) => {
            let steps = p
                .checked_mul(n)
                .ok_or_else(|| OperatorError::Overflow("rotation count exceeds 64 bits".into()))?;
            apply_n(base, x, steps)
        }
        _ => {
            let mut y = x.clone();
            for _ in 0..n {
                y = apply(op, &y)?;
            }
            Ok(y)
        }
    }
}

fn rows_of(x: &StateVector) -> Result<&super::RowBlocks, OperatorError> {
    x.row_blocks()
        .ok_or_else(|| OperatorError::Space("expected a row vector".into()))
}

fn sparse_of(x: &StateVector) -> Result<&BTreeMap<i64, Scalar>, OperatorError> {
    x.coords()
        .ok_or_else(|| OperatorError::Space("expected a sparse vector".into()))
}

fn scale(factor: &Scalar, y: &StateVector) -> Result<StateVector, OperatorError> {
    match &y.repr {
        Representation::RowBlocks(r) => {
            let c = factor.as_rational().ok_or_else(|| {
                OperatorError::Space("row vectors carry rational entries; the factor must be real rational".into())
            })?;
            Ok(StateVector::rows(r.scaled(c)))
        }
        Representation::Sparse(m) => {
            let out = m.iter().map(|(&i, v)| (i, factor * v)).collect();
            finish(y, out)
        }
    }
}

/// Drops zeros and rejects float results that left the representable range.
fn finish(x: &StateVector, mut out: BTreeMap<i64, Scalar>) -> Result<StateVector, OperatorError> {
    for (i, v) in &out {
        if let Scalar::Float(c) = v {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(OperatorError::Overflow(format!("coordinate {i} is not finite")));
            }
        }
    }
    let had_support = x.coords().is_some_and(|m| !m.is_empty());
    out.retain(|_, v| !v.is_zero());
    if had_support && out.is_empty() && !x.is_exact() {
        // a float orbit collapsing to zero is usually underflow, not dynamics
        return Err(OperatorError::Overflow("float coordinates underflowed to zero".into()));
    }
    Ok(StateVector {
        space: x.space.clone(),
        repr: Representation::Sparse(out),
    })
}

fn matrix_apply(a: &[Vec<Scalar>], m: &BTreeMap<i64, Scalar>) -> BTreeMap<i64, Scalar> {
    let mut out = BTreeMap::new();
    for (i, row) in a.iter().enumerate() {
        let mut acc = Scalar::zero();
        for (&j, v) in m {
            let aij = &row[j as usize];
            if !aij.is_zero() {
                acc = &acc + &(aij * v);
            }
        }
        out.insert(i as i64, acc);
    }
    out
}

fn block_cycle(m: &BTreeMap<i64, Scalar>) -> Result<BTreeMap<i64, Scalar>, OperatorError> {
    let mut out = BTreeMap::new();
    let two = Scalar::int(2);
    for (&k, v) in m {
        if k == 1 {
            out.insert(1, v.clone());
            continue;
        }
        let j = 63 - (k as u64).leading_zeros();
        let block_end = (1i64 << (j + 1)) - 1;
        if k < block_end {
            out.insert(k + 1, &two * v);
        } else {
            let exponent = (1u64 << j) - 1;
            let w = closing_weight(exponent)?;
            out.insert(1i64 << j, &w * v);
        }
    }
    Ok(out)
}

/// `2^{-e}`.
fn closing_weight(e: u64) -> Result<Scalar, OperatorError> {
    let e = usize::try_from(e).map_err(|_| OperatorError::Overflow("block too large".into()))?;
    Ok(Scalar::real(Rational::new(BigInt::one(), BigInt::one() << e)))
}

/// Matrix of `f ↦ f(az + b)` on coefficients `c_0..c_D`:
/// `M[i][j] = C(j, i) a^i b^{j−i}` for `i ≤ j`.
pub fn coefficient_matrix(a: &Scalar, b: &Scalar, deg: usize) -> Vec<Vec<Scalar>> {
    let a_pow: Vec<Scalar> = (0..=deg as u64).map(|i| a.pow(i)).collect();
    let b_pow: Vec<Scalar> = (0..=deg as u64).map(|i| b.pow(i)).collect();
    (0..=deg)
        .map(|i| {
            (0..=deg)
                .map(|j| {
                    if i > j {
                        Scalar::zero()
                    } else {
                        let c = Scalar::real(Rational::from_integer(binomial(BigInt::from(j), BigInt::from(i))));
                        &(&c * &a_pow[i]) * &b_pow[j - i]
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, SpaceDescriptor};
    use crate::scalar::rat;

    #[test]
    fn block_cycle_moves_and_closes() {
        let op = parse_operator("blockcycle").unwrap();
        let e5 = StateVector::unit(SpaceDescriptor::l2(), 5).unwrap();
        let y = apply(&op, &e5).unwrap();
        assert_eq!(y.coord(6), Scalar::int(2));
        let back = apply_n(&op, &e5, 4).unwrap();
        assert_eq!(back, e5);
        // e_7 closes block 2 with weight 2^{-3}
        let e7 = StateVector::unit(SpaceDescriptor::l2(), 7).unwrap();
        assert_eq!(apply(&op, &e7).unwrap().coord(4), Scalar::real(rat(1, 8)));
        let e1 = StateVector::unit(SpaceDescriptor::l2(), 1).unwrap();
        assert_eq!(apply(&op, &e1).unwrap(), e1);
    }

    #[test]
    fn shift_drops_first_coordinate() {
        let op = parse_operator("shift(weights=2, side=uni)").unwrap();
        let x = StateVector::sparse(op.space(), [(1, Scalar::int(1)), (3, Scalar::int(1))]).unwrap();
        let y = apply(&op, &x).unwrap();
        assert_eq!(y.coords().unwrap().len(), 1);
        assert_eq!(y.coord(2), Scalar::int(2));
    }

    #[test]
    fn pascal_matrix() {
        let m = coefficient_matrix(&Scalar::one(), &Scalar::one(), 3);
        let expect = [[1, 1, 1, 1], [0, 1, 2, 3], [0, 0, 1, 3], [0, 0, 0, 1]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[i][j], Scalar::int(expect[i][j]));
            }
        }
    }

    #[test]
    fn space_mismatch() {
        let op = parse_operator("rowrotation").unwrap();
        let e1 = StateVector::unit(SpaceDescriptor::l2(), 1).unwrap();
        assert!(matches!(apply(&op, &e1), Err(OperatorError::Space(_))));
    }

    #[test]
    fn float_block_cycle_underflow_is_reported() {
        let op = parse_operator("blockcycle").unwrap();
        let k = (1i64 << 12) - 1;
        let x = StateVector::sparse(SpaceDescriptor::l2(), [(k, Scalar::float(1.0, 0.0))]).unwrap();
        assert!(matches!(apply(&op, &x), Err(OperatorError::Overflow(_))));
    }
}

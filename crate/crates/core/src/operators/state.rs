use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{Signed, Zero};

use super::rows::{combination_seminorm, RowBlocks, SeminormEval};
use super::{OperatorError, SpaceDescriptor};
use crate::scalar::{f64_to_rat, rat_log2_abs, rat_to_f64, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// Nonzero coordinates only. Indices follow the space: `1, 2, …` for
    /// sequences over ℕ, any integer over ℤ, `0..dim` for finite dimension
    /// and polynomial degrees.
    Sparse(BTreeMap<i64, Scalar>),
    RowBlocks(RowBlocks),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub space: SpaceDescriptor,
    pub repr: Representation,
}

impl StateVector {
    pub fn sparse(
        space: SpaceDescriptor,
        coords: impl IntoIterator<Item = (i64, Scalar)>,
    ) -> Result<Self, OperatorError> {
        let mut map = BTreeMap::new();
        for (i, v) in coords {
            space.check_index(i)?;
            if map.insert(i, v).is_some() {
                return Err(OperatorError::Space(format!("index {i} given twice")));
            }
        }
        map.retain(|_, v: &mut Scalar| !v.is_zero());
        Ok(StateVector {
            space,
            repr: Representation::Sparse(map),
        })
    }

    pub fn unit(space: SpaceDescriptor, i: i64) -> Result<Self, OperatorError> {
        Self::sparse(space, [(i, Scalar::one())])
    }

    pub fn rows(rows: RowBlocks) -> Self {
        StateVector {
            space: SpaceDescriptor::RowRotationFrechet,
            repr: Representation::RowBlocks(rows),
        }
    }

    pub fn zero_like(&self) -> Self {
        match &self.repr {
            Representation::Sparse(_) => StateVector {
                space: self.space.clone(),
                repr: Representation::Sparse(BTreeMap::new()),
            },
            Representation::RowBlocks(_) => StateVector::rows(RowBlocks::zero()),
        }
    }

    pub fn coords(&self) -> Option<&BTreeMap<i64, Scalar>> {
        match &self.repr {
            Representation::Sparse(m) => Some(m),
            Representation::RowBlocks(_) => None,
        }
    }

    pub fn row_blocks(&self) -> Option<&RowBlocks> {
        match &self.repr {
            Representation::RowBlocks(r) => Some(r),
            Representation::Sparse(_) => None,
        }
    }

    pub fn coord(&self, i: i64) -> Scalar {
        self.coords()
            .and_then(|m| m.get(&i).cloned())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_exact(&self) -> bool {
        match &self.repr {
            Representation::Sparse(m) => m.values().all(Scalar::is_exact),
            Representation::RowBlocks(_) => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Representation::Sparse(m) => m.is_empty(),
            Representation::RowBlocks(r) => *r == RowBlocks::zero(),
        }
    }

    pub fn to_float(&self) -> Self {
        match &self.repr {
            Representation::Sparse(m) => StateVector {
                space: self.space.clone(),
                repr: Representation::Sparse(
                    m.iter().map(|(&i, v)| (i, v.to_float())).collect(),
                ),
            },
            Representation::RowBlocks(_) => self.clone(),
        }
    }

    /// Hash of an exact state, for periodicity detection.
    pub fn exact_fingerprint(&self) -> Option<u64> {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        match &self.repr {
            Representation::Sparse(m) => {
                for (i, v) in m {
                    i.hash(&mut h);
                    match v {
                        Scalar::Exact(z) => {
                            0u8.hash(&mut h);
                            hash_gauss(z, &mut h);
                        }
                        Scalar::Root { scale, turn } => {
                            1u8.hash(&mut h);
                            hash_gauss(scale, &mut h);
                            turn.hash(&mut h);
                        }
                        Scalar::Float(_) => return None,
                    }
                }
            }
            Representation::RowBlocks(r) => r.hash(&mut h),
        }
        Some(h.finish())
    }

    /// Coordinatewise `a·self + b·other` for sparse vectors.
    pub fn combine(&self, a: &Scalar, other: &StateVector, b: &Scalar) -> Result<Self, OperatorError> {
        let (Some(x), Some(y)) = (self.coords(), other.coords()) else {
            return Err(OperatorError::Space("combine needs sparse vectors".into()));
        };
        let mut out = BTreeMap::new();
        for i in x.keys().chain(y.keys()) {
            if out.contains_key(i) {
                continue;
            }
            let xi = x.get(i).map(|v| a * v).unwrap_or_else(Scalar::zero);
            let yi = y.get(i).map(|v| b * v).unwrap_or_else(Scalar::zero);
            let s = &xi + &yi;
            out.insert(*i, s);
        }
        out.retain(|_, v| !v.is_zero());
        Ok(StateVector {
            space: self.space.clone(),
            repr: Representation::Sparse(out),
        })
    }

    pub fn literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Representation::Sparse(m) => {
                let parts: Vec<String> = m.iter().map(|(i, v)| format!("{i}:{}", v.literal())).collect();
                write!(f, "vec(sparse: {})", parts.join(", "))
            }
            Representation::RowBlocks(r) => write!(f, "{r}"),
        }
    }
}

/// A seminorm value, exact when the coordinates allowed it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormValue {
    pub approx: f64,
    pub exact: Option<ExactNorm>,
    /// Contribution of the part evaluated in closed form rather than entrywise.
    pub tail: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExactNorm {
    Value(Rational),
    /// `‖x‖_p^p` when the `p`-th root is irrational.
    Power { sum: Rational, p: u32 },
}

impl NormValue {
    /// Exact comparison `value < ε` when available.
    pub fn below(&self, eps: f64) -> bool {
        let Some(eps_r) = f64_to_rat(eps) else {
            return self.approx < eps;
        };
        match &self.exact {
            Some(ExactNorm::Value(v)) => *v < eps_r,
            Some(ExactNorm::Power { sum, p }) => *sum < num_traits::pow(eps_r, *p as usize),
            None => self.approx < eps,
        }
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        match &self.exact {
            Some(ExactNorm::Value(v)) => Some(v),
            _ => None,
        }
    }
}

/// `seminorm_n(x)`, exact where the coordinates allow it.
pub fn seminorm(space: &SpaceDescriptor, n: u64, x: &StateVector) -> Result<NormValue, OperatorError> {
    if x.space != *space {
        return Err(OperatorError::Space(format!(
            "vector lives in {} but the seminorm is on {space}",
            x.space
        )));
    }
    space.check_seminorm(n)?;
    match &x.repr {
        Representation::RowBlocks(r) => Ok(from_eval(r.seminorm(n)?)),
        Representation::Sparse(m) => Ok(sparse_norm(space, n, m)),
    }
}

fn from_eval(e: SeminormEval) -> NormValue {
    NormValue {
        approx: rat_to_f64(&e.value),
        exact: e.exact.then(|| ExactNorm::Value(e.value.clone())),
        tail: Some(e.tail),
    }
}

/// `p_n(y − x)`.
pub fn distance(
    space: &SpaceDescriptor,
    n: u64,
    y: &StateVector,
    x: &StateVector,
) -> Result<NormValue, OperatorError> {
    space.check_seminorm(n)?;
    match (&y.repr, &x.repr) {
        (Representation::RowBlocks(a), Representation::RowBlocks(b)) => {
            let one = Rational::from_integer(1.into());
            Ok(from_eval(combination_seminorm(&[(one.clone(), a), (-one, b)], n)?))
        }
        (Representation::Sparse(_), Representation::Sparse(_)) => {
            let d = y.combine(&Scalar::one(), x, &Scalar::int(-1))?;
            seminorm(space, n, &d)
        }
        _ => Err(OperatorError::Space("vectors use different representations".into())),
    }
}

/// Whether `max_{n ∈ idx} p_n(y − x) < ε`, decided exactly when possible.
///
/// For sequence spaces a single coordinate of modulus `≥ ε` rules the ball
/// out before any norm is summed, which keeps huge exact coordinates cheap.
pub fn within_ball(
    space: &SpaceDescriptor,
    idx: &[u64],
    y: &StateVector,
    x: &StateVector,
    eps: f64,
) -> Result<bool, OperatorError> {
    if let (Representation::Sparse(_), Representation::Sparse(_)) = (&y.repr, &x.repr) {
        let d = y.combine(&Scalar::one(), x, &Scalar::int(-1))?;
        if !matches!(space, SpaceDescriptor::PolynomialEntire { .. }) {
            let log_eps = eps.log2();
            if d.coords().expect("sparse").values().any(|v| v.log2_abs() >= log_eps + 1e-9) {
                return Ok(false);
            }
        }
        let df = d.to_float();
        for &n in idx {
            // float screen first; exact arithmetic only settles near-ties
            let approx = seminorm(space, n, &df)?.approx;
            if approx.is_finite() && approx > eps * (1.0 + 1e-9) {
                return Ok(false);
            }
            if approx.is_finite() && approx < eps * (1.0 - 1e-9) {
                continue;
            }
            if !seminorm(space, n, &d)?.below(eps) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    for &n in idx {
        if !distance(space, n, y, x)?.below(eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sparse_norm(space: &SpaceDescriptor, n: u64, m: &BTreeMap<i64, Scalar>) -> NormValue {
    if m.is_empty() {
        return exact_value(Rational::zero());
    }
    let all_real = m.values().all(|v| v.as_rational().is_some());
    match space {
        SpaceDescriptor::PolynomialEntire { radii, .. } => {
            let r = &radii[n as usize];
            if all_real {
                let mut acc = Rational::zero();
                for (&j, v) in m {
                    acc += v.as_rational().expect("real").abs() * num_traits::pow(r.clone(), j as usize);
                }
                return exact_value(acc);
            }
            let rf = rat_to_f64(r);
            float_value(m.iter().map(|(&j, v)| v.abs() * rf.powi(j as i32)).sum())
        }
        SpaceDescriptor::SequenceC0 { .. } => sup_norm(m),
        SpaceDescriptor::SequenceLp { p, .. } => lp_norm(*p, m, all_real),
        SpaceDescriptor::FiniteDim(_) => lp_norm(2, m, all_real),
        SpaceDescriptor::RowRotationFrechet => unreachable!("row vectors are not sparse"),
    }
}

fn exact_value(r: Rational) -> NormValue {
    NormValue {
        approx: rat_to_f64(&r),
        exact: Some(ExactNorm::Value(r)),
        tail: None,
    }
}

fn float_value(v: f64) -> NormValue {
    NormValue {
        approx: v,
        exact: None,
        tail: None,
    }
}

fn sup_norm(m: &BTreeMap<i64, Scalar>) -> NormValue {
    if m.values().all(|v| v.as_rational().is_some()) {
        let r = m
            .values()
            .map(|v| v.as_rational().expect("real").abs())
            .max()
            .expect("nonempty");
        return exact_value(r);
    }
    if let Some(sq) = m
        .values()
        .map(Scalar::abs_sq_exact)
        .try_fold(Rational::zero(), |a, b| b.map(|b| a.max(b)))
    {
        return power_value(sq, 2);
    }
    float_value(m.values().map(Scalar::abs).fold(0.0, f64::max))
}

fn power_value(sum: Rational, p: u32) -> NormValue {
    let a = sum.numer().nth_root(p);
    let b = sum.denom().nth_root(p);
    if num_traits::pow(a.clone(), p as usize) == *sum.numer()
        && num_traits::pow(b.clone(), p as usize) == *sum.denom()
    {
        return exact_value(Rational::new(a, b));
    }
    NormValue {
        approx: (rat_log2_abs(&sum) / p as f64).exp2(),
        exact: Some(ExactNorm::Power { sum, p }),
        tail: None,
    }
}

fn lp_norm(p: u32, m: &BTreeMap<i64, Scalar>, all_real: bool) -> NormValue {
    if p == 1 && all_real {
        let s = m
            .values()
            .map(|v| v.as_rational().expect("real").abs())
            .fold(Rational::zero(), |a, b| a + b);
        return exact_value(s);
    }
    let exact_pow = if p == 2 {
        m.values()
            .map(Scalar::abs_sq_exact)
            .try_fold(Rational::zero(), |a, b| b.map(|b| a + b))
    } else if all_real {
        Some(m.values().fold(Rational::zero(), |a, v| {
            a + num_traits::pow(v.as_rational().expect("real").abs(), p as usize)
        }))
    } else {
        None
    };
    if let Some(s) = exact_pow {
        return power_value(s, p);
    }
    let s: f64 = m.values().map(|v| v.abs().powi(p as i32)).sum();
    float_value(s.powf(1.0 / p as f64))
}


/// Reduced rationals hash through their parts; `Ratio`'s own `Hash` walks a
/// continued fraction, which dominates long exact orbits.
fn hash_gauss(z: &crate::scalar::GaussQ, h: &mut impl Hasher) {
    for r in [&z.re, &z.im] {
        r.numer().to_signed_bytes_le().hash(h);
        r.denom().to_signed_bytes_le().hash(h);
    }
}

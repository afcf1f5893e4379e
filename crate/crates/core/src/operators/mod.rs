//! The operator zoo and the spaces it acts on.
//!
//! Every operator acts exactly on finitely representable vectors: sparse
//! coordinate maps for sequence spaces, matrices and polynomials, and
//! closed-form row blocks for the row-rotation space.

mod apply;
mod eigen;
mod expr;
mod literal;
pub mod rows;
mod state;

use std::fmt;

use thiserror::Error;

pub use apply::{apply, apply_n, coefficient_matrix};
pub use eigen::{eigen_structure, EigenEntry, EigenReport, DEFAULT_UNIMODULAR_TOL};
pub use expr::Expr;
pub use literal::{parse_operator, parse_scalar, parse_vector};
pub use rows::{continuity_bound_check, continuity_constant, RowBlocks, RowTail, SeminormEval};
pub use state::{distance, seminorm, within_ball, ExactNorm, NormValue, Representation, StateVector};

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("space mismatch: {0}")]
    Space(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("seminorm refused: {0}")]
    SeminormRefused(String),
    #[error("overflow: {0}; rerun with --precision exact")]
    Overflow(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceDescriptor {
    /// `ℓ^p` over ℕ (indices from 1) or over ℤ.
    SequenceLp { p: u32, bilateral: bool },
    SequenceC0 { bilateral: bool },
    RowRotationFrechet,
    /// Polynomials of degree `≤ max_degree` inside `H(ℂ)`, with the
    /// coefficient seminorms `q_R(f) = Σ |c_j| R^j`, one per radius.
    PolynomialEntire { max_degree: usize, radii: Vec<Rational> },
    /// `ℂⁿ` with the Euclidean norm, indices `0..n`.
    FiniteDim(usize),
}

impl SpaceDescriptor {
    pub fn l2() -> Self {
        SpaceDescriptor::SequenceLp { p: 2, bilateral: false }
    }

    pub fn l1() -> Self {
        SpaceDescriptor::SequenceLp { p: 1, bilateral: false }
    }

    pub fn is_bilateral(&self) -> bool {
        matches!(
            self,
            SpaceDescriptor::SequenceLp { bilateral: true, .. } | SpaceDescriptor::SequenceC0 { bilateral: true }
        )
    }

    /// Smallest coordinate index.
    pub fn first_index(&self) -> i64 {
        match self {
            SpaceDescriptor::SequenceLp { bilateral: false, .. } | SpaceDescriptor::SequenceC0 { bilateral: false } => 1,
            _ => 0,
        }
    }

    pub fn check_index(&self, i: i64) -> Result<(), OperatorError> {
        let ok = match self {
            SpaceDescriptor::SequenceLp { bilateral, .. } | SpaceDescriptor::SequenceC0 { bilateral } => {
                *bilateral || i >= 1
            }
            SpaceDescriptor::FiniteDim(d) => i >= 0 && (i as usize) < *d,
            SpaceDescriptor::PolynomialEntire { max_degree, .. } => i >= 0 && (i as usize) <= *max_degree,
            SpaceDescriptor::RowRotationFrechet => false,
        };
        if ok {
            Ok(())
        } else {
            Err(OperatorError::Space(format!("index {i} is not a coordinate of {self}")))
        }
    }

    /// Seminorm indices that exist on this space; `None` means all of ℕ₀.
    pub fn seminorm_count(&self) -> Option<u64> {
        match self {
            SpaceDescriptor::RowRotationFrechet => None,
            SpaceDescriptor::PolynomialEntire { radii, .. } => Some(radii.len() as u64),
            _ => Some(1),
        }
    }

    pub fn check_seminorm(&self, n: u64) -> Result<(), OperatorError> {
        match self.seminorm_count() {
            Some(c) if n >= c => Err(OperatorError::SeminormRefused(format!(
                "{self} has no seminorm with index {n}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = |b: &bool| if *b { "(Z)" } else { "" };
        match self {
            SpaceDescriptor::SequenceLp { p, bilateral } => write!(f, "l{p}{}", z(bilateral)),
            SpaceDescriptor::SequenceC0 { bilateral } => write!(f, "c0{}", z(bilateral)),
            SpaceDescriptor::RowRotationFrechet => f.write_str("rows"),
            SpaceDescriptor::PolynomialEntire { max_degree, radii } => {
                let r: Vec<String> = radii.iter().map(|r| Scalar::real(r.clone()).literal()).collect();
                write!(f, "poly(deg={max_degree}, radii=[{}])", r.join(","))
            }
            SpaceDescriptor::FiniteDim(n) => write!(f, "C^{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftSide {
    Unilateral,
    Bilateral,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiagonalRule {
    /// `λ_1, …, λ_d`; coordinates beyond `d` are outside the operator's reach.
    List(Vec<Scalar>),
    /// `λ_n` as an expression in `n`.
    Rule(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSpec {
    Matrix(Vec<Vec<Scalar>>),
    /// `(B_w x)_n = w_{n+1} x_{n+1}`.
    WeightedBackwardShift {
        weights: Expr,
        side: ShiftSide,
        space: SpaceDescriptor,
    },
    Diagonal {
        rule: DiagonalRule,
        space: SpaceDescriptor,
    },
    /// `Te₁ = e₁`; on the dyadic block `[2^j, 2^{j+1})` it multiplies by 2
    /// while moving right and closes the cycle with `2^{-(2^j-1)}`.
    BlockCycle { space: SpaceDescriptor },
    RowRotation,
    /// `f ↦ f(az + b)` on polynomials.
    AffineComposition {
        a: Scalar,
        b: Scalar,
        max_degree: usize,
        radii: Vec<Rational>,
    },
    /// `T^p` applied as `p` successive steps.
    Power { base: Box<OperatorSpec>, p: u64 },
    /// `λT`.
    Scaled { factor: Scalar, base: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn space(&self) -> SpaceDescriptor {
        match self {
            OperatorSpec::Matrix(m) => SpaceDescriptor::FiniteDim(m.len()),
            OperatorSpec::WeightedBackwardShift { space, .. }
            | OperatorSpec::Diagonal { space, .. }
            | OperatorSpec::BlockCycle { space } => space.clone(),
            OperatorSpec::RowRotation => SpaceDescriptor::RowRotationFrechet,
            OperatorSpec::AffineComposition { max_degree, radii, .. } => SpaceDescriptor::PolynomialEntire {
                max_degree: *max_degree,
                radii: radii.clone(),
            },
            OperatorSpec::Power { base, .. } | OperatorSpec::Scaled { base, .. } => base.space(),
        }
    }

    /// Whether every step is carried out in exact arithmetic.
    pub fn is_exact(&self) -> bool {
        match self {
            OperatorSpec::Matrix(m) => m.iter().flatten().all(Scalar::is_exact),
            OperatorSpec::WeightedBackwardShift { weights, .. } => expr_is_exact(weights),
            OperatorSpec::Diagonal { rule, .. } => match rule {
                DiagonalRule::List(v) => v.iter().all(Scalar::is_exact),
                DiagonalRule::Rule(e) => expr_is_exact(e),
            },
            OperatorSpec::BlockCycle { .. } | OperatorSpec::RowRotation => true,
            OperatorSpec::AffineComposition { a, b, .. } => a.is_exact() && b.is_exact(),
            OperatorSpec::Power { base, .. } => base.is_exact(),
            OperatorSpec::Scaled { factor, base } => factor.is_exact() && base.is_exact(),
        }
    }

    /// The same operator with every parameter turned into floats.
    pub fn to_float(&self) -> OperatorSpec {
        let fl = |s: &Scalar| s.to_float();
        match self {
            OperatorSpec::Matrix(m) => OperatorSpec::Matrix(m.iter().map(|r| r.iter().map(fl).collect()).collect()),
            OperatorSpec::WeightedBackwardShift { weights, side, space } => OperatorSpec::WeightedBackwardShift {
                weights: float_expr(weights),
                side: *side,
                space: space.clone(),
            },
            OperatorSpec::Diagonal { rule, space } => OperatorSpec::Diagonal {
                rule: match rule {
                    DiagonalRule::List(v) => DiagonalRule::List(v.iter().map(fl).collect()),
                    DiagonalRule::Rule(e) => DiagonalRule::Rule(float_expr(e)),
                },
                space: space.clone(),
            },
            OperatorSpec::AffineComposition { a, b, max_degree, radii } => OperatorSpec::AffineComposition {
                a: fl(a),
                b: fl(b),
                max_degree: *max_degree,
                radii: radii.clone(),
            },
            OperatorSpec::Power { base, p } => OperatorSpec::Power {
                base: Box::new(base.to_float()),
                p: *p,
            },
            OperatorSpec::Scaled { factor, base } => OperatorSpec::Scaled {
                factor: fl(factor),
                base: Box::new(base.to_float()),
            },
            other => other.clone(),
        }
    }

    pub fn power(&self, p: u64) -> OperatorSpec {
        OperatorSpec::Power {
            base: Box::new(self.clone()),
            p,
        }
    }

    pub fn scaled(&self, factor: Scalar) -> OperatorSpec {
        OperatorSpec::Scaled {
            factor,
            base: Box::new(self.clone()),
        }
    }

    pub fn literal(&self) -> String {
        self.to_string()
    }
}

fn expr_is_exact(e: &Expr) -> bool {
    // probe a few indices; any float constant or irrational function shows up
    [1i64, 2, 3, 7].iter().all(|&n| e.eval(n).map(|v| v.is_exact()).unwrap_or(true))
}

fn float_expr(e: &Expr) -> Expr {
    Expr::Call(expr::Func::Float, Box::new(e.clone()))
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Scalar]| v.iter().map(Scalar::literal).collect::<Vec<_>>().join(", ");
        match self {
            OperatorSpec::Matrix(m) => {
                let rows: Vec<String> = m.iter().map(|r| format!("[{}]", list(r))).collect();
                write!(f, "matrix([{}])", rows.join(", "))
            }
            OperatorSpec::WeightedBackwardShift { weights, side, space } => {
                let side = match side {
                    ShiftSide::Unilateral => "uni",
                    ShiftSide::Bilateral => "bi",
                };
                write!(f, "shift(weights={weights}, side={side}, space={})", space_literal(space))
            }
            OperatorSpec::Diagonal { rule, space } => match rule {
                DiagonalRule::List(v) => write!(f, "diag([{}], space={})", list(v), space_literal(space)),
                DiagonalRule::Rule(e) => write!(f, "diag({e}, space={})", space_literal(space)),
            },
            OperatorSpec::BlockCycle { space } => write!(f, "blockcycle(space={})", space_literal(space)),
            OperatorSpec::RowRotation => f.write_str("rowrotation"),
            OperatorSpec::AffineComposition { a, b, max_degree, radii } => {
                let r: Vec<String> = radii.iter().map(|r| Scalar::real(r.clone()).literal()).collect();
                write!(f, "comp(a={}, b={}, deg={max_degree}, radii=[{}])", a.literal(), b.literal(), r.join(", "))
            }
            OperatorSpec::Power { base, p } => write!(f, "pow({base}, {p})"),
            OperatorSpec::Scaled { factor, base } => write!(f, "scale({}, {base})", factor.literal()),
        }
    }
}

/// Space as it appears inside operator literals: `l1`, `l2`, `c0`, with a
/// `z` suffix over ℤ.
fn space_literal(s: &SpaceDescriptor) -> String {
    match s {
        SpaceDescriptor::SequenceLp { p, bilateral } => format!("l{p}{}", if *bilateral { "z" } else { "" }),
        SpaceDescriptor::SequenceC0 { bilateral } => format!("c0{}", if *bilateral { "z" } else { "" }),
        other => other.to_string(),
    }
}

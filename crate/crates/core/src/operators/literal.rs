//! Text forms for operators, vectors and scalars.
//!
//! ```text
//! matrix([[0, 1], [-1, 0]])
//! shift(weights=(n+1)/n, side=uni, space=l1)
//! diag([turn(1/7), 1], space=l2)      diag(turn(n/5))
//! blockcycle(space=l2)                rowrotation
//! comp(a=1, b=1, deg=6, radii=[1, 2, 4])
//! pow(OP, 3)                          scale(2, OP)
//! ```
//!
//! Vectors: `vec(sparse: 1:1, 4:1/2)`, dense `vec(1, 0, 2)`, `e(3)`, `zero`,
//! and for the row space `rows(3:1:2; from=4, tail=onehot(1))`.

use num_traits::{One, Signed};

use super::expr::{parse_expr, Lexer, Tok};
use super::{
    DiagonalRule, OperatorError, OperatorSpec, RowBlocks, RowTail, ShiftSide, SpaceDescriptor, StateVector,
};
use crate::scalar::{Rational, Scalar};

pub fn parse_operator(src: &str) -> Result<OperatorSpec, OperatorError> {
    let mut lx = Lexer::new(src)?;
    let op = operator(&mut lx)?;
    lx.finish()?;
    Ok(op)
}

pub fn parse_scalar(src: &str) -> Result<Scalar, OperatorError> {
    let mut lx = Lexer::new(src)?;
    let v = const_scalar(&mut lx)?;
    lx.finish()?;
    Ok(v)
}

/// Parses a vector living in `space`.
pub fn parse_vector(src: &str, space: &SpaceDescriptor) -> Result<StateVector, OperatorError> {
    let mut lx = Lexer::new(src)?;
    let v = vector(&mut lx, space)?;
    lx.finish()?;
    Ok(v)
}

fn const_scalar(lx: &mut Lexer) -> Result<Scalar, OperatorError> {
    let e = parse_expr(lx)?;
    if e.uses_index() {
        return Err(lx.error("constant expected, found an expression in `n`"));
    }
    e.eval_const()
}

fn rational(lx: &mut Lexer) -> Result<Rational, OperatorError> {
    let v = const_scalar(lx)?;
    v.as_rational()
        .cloned()
        .ok_or_else(|| lx.error("expected an exact real rational"))
}

fn space(lx: &mut Lexer) -> Result<SpaceDescriptor, OperatorError> {
    let name = lx.expect_ident()?;
    let (base, bilateral) = match name.strip_suffix('z') {
        Some(b) => (b, true),
        None => (name.as_str(), false),
    };
    if base == "c0" {
        return Ok(SpaceDescriptor::SequenceC0 { bilateral });
    }
    // `l1` lexes as one identifier; `l` alone is followed by a number token
    let digits = base.strip_prefix('l').ok_or_else(|| lx.error(&format!("unknown space `{name}`")))?;
    let p: u32 = digits
        .parse()
        .ok()
        .filter(|&p| p >= 1)
        .ok_or_else(|| lx.error(&format!("unknown space `{name}`; use l1, l2, lp or c0, with z for two-sided")))?;
    Ok(SpaceDescriptor::SequenceLp { p, bilateral })
}

fn scalar_list(lx: &mut Lexer) -> Result<Vec<Scalar>, OperatorError> {
    lx.expect_sym('[')?;
    let mut out = Vec::new();
    if lx.eat_sym(']') {
        return Ok(out);
    }
    loop {
        out.push(const_scalar(lx)?);
        if lx.eat_sym(']') {
            return Ok(out);
        }
        lx.expect_sym(',')?;
    }
}

fn operator(lx: &mut Lexer) -> Result<OperatorSpec, OperatorError> {
    let name = lx.expect_ident()?;
    match name.as_str() {
        "rowrotation" => {
            if lx.eat_sym('(') {
                lx.expect_sym(')')?;
            }
            Ok(OperatorSpec::RowRotation)
        }
        "blockcycle" => {
            let mut sp = SpaceDescriptor::l2();
            if lx.eat_sym('(') {
                if lx.eat_key("space") {
                    sp = space(lx)?;
                }
                lx.expect_sym(')')?;
            }
            if sp.is_bilateral() {
                return Err(lx.error("the block cycle lives on one-sided sequences"));
            }
            Ok(OperatorSpec::BlockCycle { space: sp })
        }
        "matrix" => {
            lx.expect_sym('(')?;
            lx.expect_sym('[')?;
            let mut rows = Vec::new();
            loop {
                rows.push(scalar_list(lx)?);
                if lx.eat_sym(']') {
                    break;
                }
                lx.expect_sym(',')?;
            }
            lx.expect_sym(')')?;
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(lx.error("matrix must be square"));
            }
            Ok(OperatorSpec::Matrix(rows))
        }
        "shift" => {
            lx.expect_sym('(')?;
            let mut weights = None;
            let mut side = ShiftSide::Unilateral;
            let mut sp = None;
            loop {
                if lx.eat_key("weights") {
                    weights = Some(parse_expr(lx)?);
                } else if lx.eat_key("side") {
                    side = match lx.expect_ident()?.as_str() {
                        "uni" => ShiftSide::Unilateral,
                        "bi" => ShiftSide::Bilateral,
                        other => return Err(lx.error(&format!("side must be uni or bi, got `{other}`"))),
                    };
                } else if lx.eat_key("space") {
                    sp = Some(space(lx)?);
                } else {
                    return Err(lx.error("expected weights=, side= or space="));
                }
                if lx.eat_sym(')') {
                    break;
                }
                lx.expect_sym(',')?;
            }
            let weights = weights.ok_or_else(|| lx.error("shift needs weights="))?;
            let bilateral = side == ShiftSide::Bilateral;
            let sp = match sp {
                None => SpaceDescriptor::SequenceLp { p: 1, bilateral },
                Some(SpaceDescriptor::SequenceLp { p, .. }) => SpaceDescriptor::SequenceLp { p, bilateral },
                Some(SpaceDescriptor::SequenceC0 { .. }) => SpaceDescriptor::SequenceC0 { bilateral },
                Some(other) => return Err(lx.error(&format!("a shift cannot act on {other}"))),
            };
            Ok(OperatorSpec::WeightedBackwardShift {
                weights,
                side,
                space: sp,
            })
        }
        "diag" => {
            lx.expect_sym('(')?;
            let rule = if lx.is_sym('[') {
                DiagonalRule::List(scalar_list(lx)?)
            } else {
                DiagonalRule::Rule(parse_expr(lx)?)
            };
            let mut sp = SpaceDescriptor::l2();
            if lx.eat_sym(',') {
                if !lx.eat_key("space") {
                    return Err(lx.error("expected space="));
                }
                sp = space(lx)?;
            }
            lx.expect_sym(')')?;
            if sp.is_bilateral() {
                return Err(lx.error("diagonal operators act on one-sided sequences"));
            }
            Ok(OperatorSpec::Diagonal { rule, space: sp })
        }
        "comp" => {
            lx.expect_sym('(')?;
            let mut a = None;
            let mut b = Scalar::zero();
            let mut deg = None;
            let mut radii = vec![Rational::one(), Rational::from_integer(2.into()), Rational::from_integer(4.into()), Rational::from_integer(8.into())];
            loop {
                if lx.eat_key("a") {
                    a = Some(const_scalar(lx)?);
                } else if lx.eat_key("b") {
                    b = const_scalar(lx)?;
                } else if lx.eat_key("deg") {
                    deg = Some(lx.expect_natural()? as usize);
                } else if lx.eat_key("radii") {
                    lx.expect_sym('[')?;
                    radii.clear();
                    loop {
                        let r = rational(lx)?;
                        if !r.is_positive() {
                            return Err(lx.error("radii must be positive"));
                        }
                        radii.push(r);
                        if lx.eat_sym(']') {
                            break;
                        }
                        lx.expect_sym(',')?;
                    }
                } else {
                    return Err(lx.error("expected a=, b=, deg= or radii="));
                }
                if lx.eat_sym(')') {
                    break;
                }
                lx.expect_sym(',')?;
            }
            let a = a.ok_or_else(|| lx.error("comp needs a="))?;
            let max_degree = deg.ok_or_else(|| lx.error("comp needs deg="))?;
            if a.is_zero() {
                return Err(lx.error("a must be nonzero"));
            }
            Ok(OperatorSpec::AffineComposition { a, b, max_degree, radii })
        }
        "pow" => {
            lx.expect_sym('(')?;
            let base = operator(lx)?;
            lx.expect_sym(',')?;
            let p = lx.expect_natural()?;
            lx.expect_sym(')')?;
            Ok(base.power(p))
        }
        "scale" => {
            lx.expect_sym('(')?;
            let factor = const_scalar(lx)?;
            lx.expect_sym(',')?;
            let base = operator(lx)?;
            lx.expect_sym(')')?;
            Ok(base.scaled(factor))
        }
        other => {
            Err(OperatorError::Parse(format!(
                "unknown operator `{other}`; expected matrix, shift, diag, blockcycle, rowrotation, comp, pow or scale"
            )))
        }
    }
}

fn vector(lx: &mut Lexer, sp: &SpaceDescriptor) -> Result<StateVector, OperatorError> {
    let name = lx.expect_ident()?;
    match name.as_str() {
        "zero" => match sp {
            SpaceDescriptor::RowRotationFrechet => Ok(StateVector::rows(RowBlocks::zero())),
            _ => StateVector::sparse(sp.clone(), []),
        },
        "e" => {
            lx.expect_sym('(')?;
            let k = lx.expect_integer()?;
            lx.expect_sym(')')?;
            StateVector::unit(sp.clone(), k)
        }
        "vec" => {
            lx.expect_sym('(')?;
            let mut coords = Vec::new();
            if lx.is_ident("sparse") && lx.peek_at(1) == Some(&Tok::Sym(':')) {
                lx.next();
                lx.next();
                if !lx.eat_sym(')') {
                    loop {
                        let i = lx.expect_integer()?;
                        lx.expect_sym(':')?;
                        coords.push((i, const_scalar(lx)?));
                        if lx.eat_sym(')') {
                            break;
                        }
                        lx.expect_sym(',')?;
                    }
                }
            } else if !lx.eat_sym(')') {
                let mut i = sp.first_index();
                loop {
                    coords.push((i, const_scalar(lx)?));
                    i += 1;
                    if lx.eat_sym(')') {
                        break;
                    }
                    lx.expect_sym(',')?;
                }
            }
            if *sp == SpaceDescriptor::RowRotationFrechet {
                return Err(lx.error("row vectors are written rows(...)"));
            }
            StateVector::sparse(sp.clone(), coords)
        }
        "rows" => {
            if *sp != SpaceDescriptor::RowRotationFrechet {
                return Err(lx.error(&format!("rows(...) does not live in {sp}")));
            }
            rows(lx).map(StateVector::rows)
        }
        other => Err(lx.error(&format!("unknown vector form `{other}`"))),
    }
}

/// `rows(k:j:v, ...; from=K, tail=onehot(c)|zero|bounded(M))`, optionally
/// followed by `after N rotations` and `times c`.
fn rows(lx: &mut Lexer) -> Result<RowBlocks, OperatorError> {
    lx.expect_sym('(')?;
    let mut entries = Vec::new();
    let mut from = None;
    let mut tail = RowTail::Zero;
    let keyword_next = |lx: &Lexer| lx.is_ident("from") || lx.is_ident("tail");
    if !lx.is_sym(')') && !lx.is_sym(';') && !keyword_next(lx) {
        loop {
            let k = lx.expect_natural()?;
            lx.expect_sym(':')?;
            let j = lx.expect_natural()?;
            lx.expect_sym(':')?;
            let v = rational(lx)?;
            let k = u32::try_from(k).map_err(|_| lx.error("row index too large"))?;
            entries.push((k, j, v));
            if !lx.eat_sym(',') {
                break;
            }
        }
    }
    lx.eat_sym(';');
    while !lx.eat_sym(')') {
        if lx.eat_key("from") {
            let k = lx.expect_natural()?;
            from = Some(u32::try_from(k).map_err(|_| lx.error("from= is too large"))?);
        } else if lx.eat_key("tail") {
            tail = match lx.expect_ident()?.as_str() {
                "zero" => RowTail::Zero,
                kind @ ("onehot" | "bounded") => {
                    lx.expect_sym('(')?;
                    let c = rational(lx)?;
                    lx.expect_sym(')')?;
                    if kind == "onehot" {
                        RowTail::OneHotAtZero(c)
                    } else {
                        RowTail::Bounded(c)
                    }
                }
                other => return Err(lx.error(&format!("unknown tail `{other}`"))),
            };
        } else {
            return Err(lx.error("expected from= or tail="));
        }
        lx.eat_sym(',');
    }
    let mut r = RowBlocks::new(entries, from, tail)?;
    if lx.is_ident("after") {
        lx.next();
        let m = lx.expect_natural()?;
        if !lx.is_ident("rotations") {
            return Err(lx.error("expected `rotations`"));
        }
        lx.next();
        r = r.rotate(m)?;
    }
    if lx.is_ident("times") {
        lx.next();
        let c = rational(lx)?;
        r = r.scaled(&c);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn operators_round_trip() {
        for src in [
            "matrix([[0, 1], [-1, 0]])",
            "shift(weights=(n+1)/n, side=uni, space=l1)",
            "shift(weights=2, side=bi, space=l2)",
            "diag([turn(1/7), 1/2+1/3 i], space=l2)",
            "diag(turn(n/5))",
            "blockcycle",
            "rowrotation",
            "comp(a=1, b=1, deg=5, radii=[1, 2, 4])",
            "pow(rowrotation, 4)",
            "scale(float(0.5), shift(weights=2, side=uni))",
        ] {
            let op = parse_operator(src).unwrap();
            let again = parse_operator(&op.literal()).unwrap();
            assert_eq!(op, again, "{src} -> {}", op.literal());
        }
    }

    #[test]
    fn bilateral_side_sets_space() {
        let op = parse_operator("shift(weights=2, side=bi)").unwrap();
        assert!(op.space().is_bilateral());
        assert_eq!(op.space().first_index(), 0);
    }

    #[test]
    fn vectors() {
        let l2 = SpaceDescriptor::l2();
        let v = parse_vector("vec(1, 0, 1/2)", &l2).unwrap();
        assert_eq!(v.coord(3), Scalar::real(rat(1, 2)));
        assert_eq!(v.coords().unwrap().len(), 2);
        let w = parse_vector(&v.literal(), &l2).unwrap();
        assert_eq!(v, w);
        let f = StateVector::sparse(l2.clone(), [(2, Scalar::float(1e-300, -0.25))]).unwrap();
        assert_eq!(parse_vector(&f.literal(), &l2).unwrap(), f);
        assert!(parse_vector("e(0)", &l2).is_err());
        let rows = SpaceDescriptor::RowRotationFrechet;
        let special = parse_vector("rows(tail=onehot(1))", &rows).unwrap();
        assert_eq!(special.row_blocks().unwrap(), &RowBlocks::special());
        let r = parse_vector("rows(3:1:2, 2:0:1/2; from=4, tail=bounded(1))", &rows).unwrap();
        let again = parse_vector(&r.literal(), &rows).unwrap();
        assert_eq!(r, again);
        let spun = StateVector::rows(RowBlocks::special().rotate(3).unwrap().scaled(&rat(2, 1)));
        assert_eq!(parse_vector(&spun.literal(), &rows).unwrap(), spun);
    }

    #[test]
    fn errors_name_the_problem() {
        let e = parse_operator("frobnicate(1)").unwrap_err();
        assert!(e.to_string().contains("frobnicate"));
        assert!(parse_operator("matrix([[1, 2]])").is_err());
        assert!(parse_operator("shift(side=uni)").is_err());
        assert!(parse_scalar("n+1").is_err());
    }
}

//! Plain-text report on an operator literal: what it is, where it acts, its
//! spectrum when one is computable, and the recurrence criterion that applies.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::families::IndexWindow;
use crate::operators::{
    coefficient_matrix, eigen_structure, parse_operator, DiagonalRule, Expr, OperatorError, OperatorSpec, ShiftSide,
    DEFAULT_UNIMODULAR_TOL,
};
use crate::scalar::{rat, Scalar};
use crate::verify::{shift_series_check, ShiftSeriesParams};

/// Rule-defined diagonals and weights are sampled this far.
const RULE_SAMPLE: i64 = 1000;
/// Entries listed in the report.
const SHOWN: usize = 8;
/// Horizon of the weight-series test run by `describe`.
const SERIES_HORIZON: u64 = 100_000;

fn c(z: Complex64) -> String {
    let r = |x: f64| {
        let y = (x * 1e9).round() / 1e9;
        if y == 0.0 {
            0.0
        } else {
            y
        }
    };
    let (re, im) = (r(z.re), r(z.im));
    match (re == 0.0, im) {
        (_, 0.0) => format!("{re}"),
        (true, 1.0) => "i".into(),
        (true, -1.0) => "-i".into(),
        (true, _) => format!("{im}i"),
        (false, _) if im < 0.0 => format!("{re}-{}i", -im),
        _ => format!("{re}+{im}i"),
    }
}

fn kind(op: &OperatorSpec) -> &'static str {
    match op {
        OperatorSpec::Matrix(_) => "matrix",
        OperatorSpec::WeightedBackwardShift { .. } => "weighted backward shift",
        OperatorSpec::Diagonal { .. } => "diagonal",
        OperatorSpec::BlockCycle { .. } => "block cycle",
        OperatorSpec::RowRotation => "row rotation",
        OperatorSpec::AffineComposition { .. } => "composition with an affine map",
        OperatorSpec::Power { .. } => "power",
        OperatorSpec::Scaled { .. } => "scalar multiple",
    }
}

/// Whether `w_n = (n + 1)/n` on the first `RULE_SAMPLE` indices.
fn is_harmonic_weight(w: &Expr) -> bool {
    (1..=RULE_SAMPLE).all(|n| {
        let want = Scalar::real(rat(n + 1, n));
        w.eval(n).ok().and_then(|v| v.exact_eq(&want)) == Some(true)
    })
}

/// Report lines for `literal`.
pub fn describe(literal: &str) -> Result<String, OperatorError> {
    let op = parse_operator(literal)?;
    let mut s = String::new();
    let _ = writeln!(s, "kind={}", kind(&op));
    let _ = writeln!(s, "literal={}", op.literal());
    let _ = writeln!(s, "space={}", op.space());
    let _ = writeln!(s, "arithmetic={}", if op.is_exact() { "exact" } else { "float" });
    body(&op, &mut s)?;
    Ok(s)
}

fn spectrum_lines(values: &[Complex64], s: &mut String) {
    let shown: Vec<String> = values.iter().take(SHOWN).map(|z| c(*z)).collect();
    let more = if values.len() > SHOWN { ", ..." } else { "" };
    let _ = writeln!(s, "eigenvalues={}{more}", shown.join(", "));
}

fn body(op: &OperatorSpec, s: &mut String) -> Result<(), OperatorError> {
    match op {
        OperatorSpec::Matrix(m) => {
            let _ = writeln!(s, "dimension={}", m.len());
            let _ = writeln!(s, "construction=finite-dimensional operator; recurrent exactly when similar to a diagonal matrix with unimodular entries");
            let rep = eigen_structure(m, DEFAULT_UNIMODULAR_TOL)?;
            let vals: Vec<String> = rep
                .entries
                .iter()
                .map(|e| format!("{} (algebraic {}, geometric {})", c(e.value), e.algebraic, e.geometric))
                .collect();
            let _ = writeln!(s, "eigenvalues={}", vals.join(", "));
            let _ = writeln!(s, "diagonalizable={}", rep.diagonalizable);
            let _ = writeln!(s, "unimodular_spectrum={}", rep.all_unimodular);
            let holds = rep.diagonalizable && rep.all_unimodular;
            let _ = writeln!(
                s,
                "criterion={}",
                if holds {
                    "holds: every vector is IP*-recurrent, hence uniformly recurrent"
                } else {
                    "fails: some vector is not recurrent"
                }
            );
        }
        OperatorSpec::Diagonal { rule, .. } => {
            let values: Vec<Scalar> = match rule {
                DiagonalRule::List(v) => {
                    let _ = writeln!(s, "entries={}", v.len());
                    v.clone()
                }
                DiagonalRule::Rule(e) => {
                    let _ = writeln!(s, "rule=lambda_n = {e}");
                    (1..=RULE_SAMPLE).map(|n| e.eval(n)).collect::<Result<_, _>>()?
                }
            };
            let _ = writeln!(s, "construction=diagonal operator; recurrent exactly when every eigenvalue lies on the unit circle");
            let cs: Vec<Complex64> = values.iter().map(Scalar::to_c64).collect();
            spectrum_lines(&cs, s);
            let defect = cs.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
            let sampled = if matches!(rule, DiagonalRule::Rule(_)) {
                format!(" (first {RULE_SAMPLE} sampled)")
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                "criterion={}{sampled}",
                if defect <= DEFAULT_UNIMODULAR_TOL {
                    "holds: every vector is IP*-recurrent"
                } else {
                    "fails: an eigenvalue is off the unit circle, so its eigenvector is not recurrent"
                }
            );
        }
        OperatorSpec::WeightedBackwardShift { weights, side, .. } => {
            let _ = writeln!(s, "weights=w_n = {weights}");
            let _ = writeln!(
                s,
                "side={}",
                match side {
                    ShiftSide::Unilateral => "unilateral",
                    ShiftSide::Bilateral => "bilateral",
                }
            );
            let construction = if is_harmonic_weight(weights) {
                "harmonic weight family w_n = (n+1)/n: products grow like n, so the fixed-point series diverges"
            } else if !weights.uses_index() {
                "constant multiple of the backward shift"
            } else {
                "weighted backward shift"
            };
            let _ = writeln!(s, "construction={construction}");
            if *side == ShiftSide::Unilateral {
                let set = IndexWindow::from_predicate(SERIES_HORIZON, |n| n >= 1);
                let outcome = shift_series_check(&ShiftSeriesParams::new(weights.clone(), set))
                    .map_err(|e| OperatorError::Numerical(e.to_string()))?;
                let verdict = outcome.metric("verdict").unwrap_or("Undecided");
                let _ = writeln!(s, "series=sum over n of 1/(w_1...w_n): {verdict} at horizon {SERIES_HORIZON}");
                let _ = writeln!(
                    s,
                    "criterion={}",
                    match verdict {
                        "Converging" => "the series converges: sum of e_n/(w_1...w_n) is a nonzero fixed point",
                        "Diverging" => "the series diverges: the formal fixed point sum of e_n/(w_1...w_n) does not converge",
                        _ => "undecided on this horizon",
                    }
                );
            }
        }
        OperatorSpec::BlockCycle { .. } => {
            let _ = writeln!(s, "construction=dyadic block cycle: each block [2^j, 2^(j+1)) is cycled with weights 2 and a closing factor 2^-(2^j-1)");
            let _ = writeln!(s, "criterion=every basis vector e_k in block j is periodic with period 2^j; vectors with slowly decaying block coordinates are not reiteratively recurrent");
        }
        OperatorSpec::RowRotation => {
            let _ = writeln!(s, "construction=row rotation on a Frechet sequence space with a continuous norm");
            let _ = writeln!(s, "criterion=the special vector is uniformly recurrent and IP*-recurrent while its orbit is unbounded");
        }
        OperatorSpec::AffineComposition { a, b, max_degree, .. } => {
            let _ = writeln!(s, "map=z -> ({})z + ({})", a.literal(), b.literal());
            let _ = writeln!(s, "max_degree={max_degree}");
            let one = a.exact_eq(&Scalar::one()).unwrap_or(false);
            let zero = b.exact_eq(&Scalar::zero()).unwrap_or(false);
            let unimodular = (a.abs() - 1.0).abs() <= DEFAULT_UNIMODULAR_TOL;
            let construction = match (one, zero, unimodular) {
                (true, true, _) => "identity",
                (true, false, _) => "translation: chaotic, with IP*-recurrent vectors dense but not everywhere",
                (false, _, true) => "rotation about a fixed point: the powers (z + b/(a-1))^n are eigenvectors with unimodular eigenvalues a^n spanning the polynomials",
                _ => "affine composition with non-unimodular linear part",
            };
            let _ = writeln!(s, "construction={construction}");
            let m = coefficient_matrix(a, b, *max_degree);
            let rep = eigen_structure(&m, DEFAULT_UNIMODULAR_TOL)?;
            let vals: Vec<Complex64> = rep.entries.iter().map(|e| e.value).collect();
            spectrum_lines(&vals, s);
            let _ = writeln!(
                s,
                "criterion={}",
                if rep.diagonalizable && rep.all_unimodular {
                    "holds on this polynomial space: every vector is IP*-recurrent"
                } else {
                    "fails on this polynomial space"
                }
            );
        }
        OperatorSpec::Power { base, p } => {
            let _ = writeln!(s, "power={p}");
            let _ = writeln!(s, "construction=power of an operator; it has the same uniformly recurrent vectors as the base");
            let _ = writeln!(s, "base.kind={}", kind(base));
            body(base, s)?;
        }
        OperatorSpec::Scaled { factor, base } => {
            let _ = writeln!(s, "factor={}", factor.literal());
            let unimodular = (factor.abs() - 1.0).abs() <= DEFAULT_UNIMODULAR_TOL;
            let _ = writeln!(
                s,
                "construction={}",
                if unimodular {
                    "unimodular multiple: same uniformly recurrent vectors as the base"
                } else {
                    "non-unimodular multiple"
                }
            );
            let _ = writeln!(s, "base.kind={}", kind(base));
            body(base, s)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_cycle_report() {
        let r = describe("blockcycle").unwrap();
        assert!(r.contains("kind=block cycle"));
        assert!(r.contains("dyadic block cycle"));
    }

    #[test]
    fn quarter_rotation_eigenvalues() {
        let r = describe("matrix([[0,-1],[1,0]])").unwrap();
        assert!(r.contains("i (algebraic 1"), "{r}");
        assert!(r.contains("-i (algebraic 1"), "{r}");
        assert!(r.contains("criterion=holds"), "{r}");
    }

    #[test]
    fn jordan_block_fails_criterion() {
        let r = describe("matrix([[1,1],[0,1]])").unwrap();
        assert!(r.contains("diagonalizable=false"));
        assert!(r.contains("criterion=fails"));
    }

    #[test]
    fn harmonic_weights_named() {
        let r = describe("shift(weights=(n+1)/n, side=uni)").unwrap();
        assert!(r.contains("harmonic weight family"), "{r}");
        assert!(r.contains("Diverging"), "{r}");
        let r = describe("shift(weights=2, side=uni)").unwrap();
        assert!(r.contains("Converging"), "{r}");
    }

    #[test]
    fn parse_errors_surface() {
        assert!(describe("matrix([[1,2]]").is_err());
    }
}

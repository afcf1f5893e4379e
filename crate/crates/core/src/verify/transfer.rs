//! Checks that compare recurrence of one vector under related operators, and
//! keep uniformly recurrent orbits away from periodic ones.

use super::{verdict_of, Outcome, Sweep, VerifyError};
use crate::classify::RecurrenceLabel;
use crate::families::contract;
use crate::operators::{apply, distance, OperatorSpec, StateVector};
use crate::orbit::{return_sets, Orbit, STATE_TABLE_CAP};
use crate::scalar::Scalar;
use crate::verify::CheckOutcome;

/// Smallest distance that still counts as staying away.
const FLOOR_TOL: f64 = 1e-12;
const UNIMODULAR_TOL: f64 = 1e-10;

/// Class-level agreement: same rank, or both at least uniform.
pub fn labels_agree(a: &RecurrenceLabel, b: &RecurrenceLabel) -> bool {
    a.same_class(b) || a.at_least_uniform() && b.at_least_uniform()
}

/// Two layers for `T` and `T^p`:
/// the window of `T^p` on `⌊N/p⌋` equals the contraction by `p` of the
/// window of `T` on `N`, at every tolerance; and the labels of `x` under `T`
/// and `T^p` on the same horizon agree at the class level.
pub fn ansari_check(op: &OperatorSpec, x: &StateVector, p: u64, sweep: &Sweep) -> Result<CheckOutcome, VerifyError> {
    if p == 0 {
        return Err(VerifyError::Config("power must be at least 1".into()));
    }
    if sweep.horizon / p == 0 {
        return Err(VerifyError::Config(format!("horizon {} is shorter than the power {p}", sweep.horizon)));
    }
    let lit = op.literal();
    let xl = x.literal();
    let mut out = Outcome::new("ansari", 0)
        .param("operator", &lit)
        .param("vector", &xl)
        .param("p", p)
        .sweep(sweep);
    let tp = op.power(p);
    let base = return_sets(op, x, &sweep.grid, &sweep.seminorms, sweep.horizon, sweep.precision)?;
    let pow = return_sets(&tp, x, &sweep.grid, &sweep.seminorms, sweep.horizon / p, sweep.precision)?;
    let mut identity = true;
    let mut detail = String::new();
    for (b, q) in base.iter().zip(&pow) {
        let c = contract(&b.window, p)?;
        if c != q.window {
            let first = c
                .elements()
                .iter()
                .chain(q.window.elements())
                .find(|n| c.contains(**n) != q.window.contains(**n))
                .copied();
            if identity {
                detail = format!("windows differ at n = {first:?} for eps={:?}", b.epsilon);
            }
            identity = false;
        }
    }
    out.metric("identity", identity);

    let lt = verdict_of(op, x, sweep)?.label;
    let lp = verdict_of(&tp, x, sweep)?.label;
    let consistent = labels_agree(&lt, &lp);
    out.metric("label_t", lt);
    out.metric("label_tp", lp);
    out.metric("labels_consistent", consistent);
    if identity && !consistent {
        detail = format!("T gives {lt}, T^{p} gives {lp}");
    }
    Ok(out.decide(identity && consistent, &lit, &xl, detail))
}

/// Labels of `x` under `T` and `λT` agree at the class level for unimodular `λ`.
pub fn leon_muller_check(
    op: &OperatorSpec,
    x: &StateVector,
    lambda: &Scalar,
    sweep: &Sweep,
) -> Result<CheckOutcome, VerifyError> {
    if (lambda.abs() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(VerifyError::Config(format!("{} is not unimodular", lambda.literal())));
    }
    let lit = op.literal();
    let xl = x.literal();
    let mut out = Outcome::new("leon_muller", 0)
        .param("operator", &lit)
        .param("vector", &xl)
        .param("lambda", lambda.literal())
        .sweep(sweep);
    let scaled = op.scaled(lambda.clone());
    let lt = verdict_of(op, x, sweep)?.label;
    let ls = verdict_of(&scaled, x, sweep)?.label;
    out.metric("label_t", lt);
    out.metric("label_scaled", ls);
    let ok = labels_agree(&lt, &ls);
    Ok(out.decide(ok, &lit, &xl, format!("T gives {lt}, {}T gives {ls}", lambda.literal())))
}

/// Exact period of `y`, if iteration returns to it within the state table cap.
fn exact_period(op: &OperatorSpec, y: &StateVector) -> Result<Option<Vec<StateVector>>, VerifyError> {
    let mut cycle = vec![y.clone()];
    let mut z = apply(op, y)?;
    for _ in 0..STATE_TABLE_CAP {
        if &z == y {
            return Ok(Some(cycle));
        }
        cycle.push(z.clone());
        z = apply(op, &z)?;
    }
    Ok(None)
}

/// A uniformly recurrent `x` keeps a positive distance from the orbit of a
/// periodic `y` that does not contain it.
pub fn urec_avoids_periodic_check(
    op: &OperatorSpec,
    x: &StateVector,
    y: &StateVector,
    sweep: &Sweep,
) -> Result<CheckOutcome, VerifyError> {
    let lit = op.literal();
    let xl = x.literal();
    let mut out = Outcome::new("urec_avoids_periodic", 0)
        .param("operator", &lit)
        .param("vector", &xl)
        .param("periodic", y.literal())
        .sweep(sweep);
    let Some(cycle) = exact_period(op, y)? else {
        return Ok(out.skip(format!("{} is not periodic within {STATE_TABLE_CAP} exact steps", y.literal())));
    };
    out.metric("period", cycle.len());
    if cycle.iter().any(|c| c == x) {
        return Ok(out.skip("x lies on the orbit of y"));
    }
    let label = verdict_of(op, x, sweep)?.label;
    out.metric("label", label);
    if !label.at_least_uniform() {
        return Ok(out.skip(format!("x is labelled {label}, not uniformly recurrent")));
    }
    let space = op.space();
    let mut orbit = Orbit::new(op, x, sweep.precision, sweep.horizon);
    let mut floor = f64::INFINITY;
    let mut at = 0;
    for n in 0..=sweep.horizon {
        let z = orbit.current();
        for c in &cycle {
            let mut d = 0.0f64;
            for &i in &sweep.seminorms {
                d = d.max(distance(&space, i, z, c)?.approx);
            }
            if d < floor {
                floor = d;
                at = n;
            }
        }
        if n < sweep.horizon {
            orbit.step()?;
        }
    }
    out.metric("floor", format!("{floor:?}"));
    out.metric("floor_at", at);
    Ok(out.decide(
        floor > FLOOR_TOL,
        &lit,
        &xl,
        format!("T^{at} x comes within {floor:e} of the orbit of y"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_scalar, parse_vector, RowBlocks};
    use crate::verify::CheckStatus;

    fn setup(op: &str, x: &str) -> (OperatorSpec, StateVector) {
        let op = parse_operator(op).unwrap();
        let x = parse_vector(x, &op.space()).unwrap();
        (op, x)
    }

    #[test]
    fn ansari_on_block_cycle() {
        let (op, x) = setup("blockcycle", "e(5)");
        let sweep = Sweep::new(&[0.5, 0.1], 10_000);
        for p in [2, 3, 4] {
            let r = ansari_check(&op, &x, p, &sweep).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let r = ansari_check(&op, &x, 2, &sweep).unwrap();
        assert_eq!(r.metric("label_t"), Some("Periodic(4)"));
        assert_eq!(r.metric("label_tp"), Some("Periodic(2)"));
    }

    #[test]
    fn ansari_identity_holds_in_float_mode() {
        let (op, x) = setup("matrix([[0.6, -0.8], [0.8, 0.6]])", "vec(1, 0)");
        let sweep = Sweep::new(&[0.3, 0.05], 3000).with_precision(crate::orbit::Precision::Float(6));
        let r = ansari_check(&op, &x, 3, &sweep).unwrap();
        assert_eq!(r.metric("identity"), Some("true"), "{r:?}");
    }

    #[test]
    fn leon_muller_irrational_twist_of_fourth_root() {
        let (op, x) = setup("diag([i])", "e(1)");
        let l = parse_scalar("cis(2*3.141592653589793*sqrt(2))").unwrap();
        let r = leon_muller_check(&op, &x, &l, &Sweep::new(&[0.5, 0.2], 20_000)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("label_t"), Some("Periodic(4)"));
    }

    #[test]
    fn leon_muller_identity_twist() {
        let (op, x) = setup("blockcycle", "vec(sparse: 5:1, 9:2)");
        let r = leon_muller_check(&op, &x, &Scalar::one(), &Sweep::new(&[0.5], 2000)).unwrap();
        assert!(r.passed());
        assert_eq!(r.metric("label_t"), r.metric("label_scaled"));
    }

    #[test]
    fn row_vector_stays_away_from_zero() {
        let op = parse_operator("rowrotation").unwrap();
        let x = StateVector::rows(RowBlocks::special());
        let y = StateVector::rows(RowBlocks::zero());
        let sweep = Sweep::new(&[0.5, 0.25], 4096).with_seminorms(&[0, 1]);
        let r = urec_avoids_periodic_check(&op, &x, &y, &sweep).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn periodic_x_on_orbit_of_y_is_skipped() {
        let (op, x) = setup("blockcycle", "e(5)");
        let r = urec_avoids_periodic_check(&op, &x, &x, &Sweep::new(&[0.5], 1000)).unwrap();
        assert!(matches!(r.status, CheckStatus::Skipped(_)));
    }

    #[test]
    fn isometry_keeps_norm_as_floor() {
        let (op, x) = setup("diag([cis(1), cis(2)], space=l2)", "vec(1, 0)");
        let y = x.zero_like();
        let r = urec_avoids_periodic_check(&op, &x, &y, &Sweep::new(&[0.5], 5000)).unwrap();
        assert!(r.passed(), "{r:?}");
        let floor: f64 = r.metric("floor").unwrap().parse().unwrap();
        assert!((floor - 1.0).abs() < 1e-12);
    }
}

//! Convergence of `Σ_{n∈A} e_n / ∏_{ν≤n} w_ν` for weighted backward shifts.
//!
//! Products are tracked as base-2 logarithms, so weights of any size neither
//! overflow nor underflow. The terms are `t_n = 1/∏_{ν≤n} w_ν`, and `B_w` maps
//! `t_n e_n` to `t_{n−1} e_{n−1}`, which makes `x_ℕ` a fixed point.

use std::fmt;

use super::{Outcome, VerifyError};
use crate::families::IndexWindow;
use crate::operators::{apply, distance, seminorm, Expr, OperatorSpec, ShiftSide, SpaceDescriptor, StateVector};
use crate::orbit::growth_schedule;
use crate::scalar::Scalar;
use crate::verify::CheckOutcome;

/// Exact coordinates are used for the truncated vector up to this length.
const EXACT_TRUNCATION_CAP: u64 = 256;
/// The last decade's log-slope must keep this share of the previous decade's.
const SLOPE_PERSISTENCE: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesVerdict {
    Converging,
    Diverging,
    Undecided,
}

impl fmt::Display for SeriesVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl SeriesVerdict {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "converging" => Some(SeriesVerdict::Converging),
            "diverging" => Some(SeriesVerdict::Diverging),
            "undecided" => Some(SeriesVerdict::Undecided),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSeriesParams {
    pub weights: Expr,
    /// `A ⊆ [1, H]`; the horizon of the window is the summation horizon.
    pub set: IndexWindow,
    pub threshold: f64,
    /// Largest tail beyond the horizon that still counts as converged.
    pub tolerance: f64,
    /// Exponent of the `ℓ^p` space the shift acts on.
    pub p: u32,
    pub expect: Option<SeriesVerdict>,
}

impl ShiftSeriesParams {
    pub fn new(weights: Expr, set: IndexWindow) -> Self {
        ShiftSeriesParams {
            weights,
            set,
            threshold: 10.0,
            tolerance: 1e-9,
            p: 1,
            expect: None,
        }
    }
}

/// `log2(2^a + 2^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

pub fn shift_series_check(params: &ShiftSeriesParams) -> Result<CheckOutcome, VerifyError> {
    let set = &params.set;
    let h = set.horizon();
    if set.contains(0) {
        return Err(VerifyError::Config("the index set must lie in [1, H]".into()));
    }
    if !(params.threshold > 0.0 && params.tolerance > 0.0) || params.p == 0 {
        return Err(VerifyError::Config("threshold, tolerance and p must be positive".into()));
    }
    let space = SpaceDescriptor::SequenceLp {
        p: params.p,
        bilateral: false,
    };
    let op = OperatorSpec::WeightedBackwardShift {
        weights: params.weights.clone(),
        side: ShiftSide::Unilateral,
        space: space.clone(),
    };
    let lit = op.literal();
    let mut out = Outcome::new("shift_series", 0)
        .param("weights", &params.weights)
        .param("set_size", set.len())
        .param("horizon", h)
        .param("threshold", format!("{:?}", params.threshold))
        .param("tolerance", format!("{:?}", params.tolerance))
        .param("p", params.p);

    // log2 ∏_{ν≤n} |w_ν| for n = 0..=H
    let mut log_prod = Vec::with_capacity(h as usize + 1);
    log_prod.push(0.0f64);
    let mut log_w = vec![0.0f64];
    for n in 1..=h {
        let w = params.weights.eval(n as i64)?;
        if w.is_zero() {
            return Err(VerifyError::Config(format!("weight w_{n} vanishes")));
        }
        let lw = w.log2_abs();
        log_w.push(lw);
        log_prod.push(log_prod[n as usize - 1] + lw);
    }
    let log_t = |n: u64| -log_prod[n as usize];

    // partial sums over A, sampled for the curve
    let schedule = growth_schedule(h);
    let mut curve = Vec::with_capacity(schedule.len());
    let mut log_s = f64::NEG_INFINITY;
    let mut k = 0;
    let mut crossing = None;
    let log_thr = params.threshold.log2();
    let mut elems = set.elements().iter().peekable();
    for n in 0..=h {
        if elems.peek() == Some(&&n) {
            elems.next();
            log_s = log_add(log_s, log_t(n));
            if crossing.is_none() && log_s > log_thr {
                crossing = Some(n);
            }
        }
        if k < schedule.len() && schedule[k] == n {
            curve.push((n, log_s.exp2()));
            k += 1;
        }
    }
    let sum_at = |n: u64| -> f64 {
        let i = curve.partition_point(|c| c.0 <= n);
        if i == 0 {
            0.0
        } else {
            curve[i - 1].1
        }
    };

    // tail beyond H under the ratio bound seen on (H/2, H]
    let log_r = (h / 2 + 1..=h).map(|n| -log_w[n as usize]).fold(f64::NEG_INFINITY, f64::max);
    let log_tail = if log_r < 0.0 && h >= 2 {
        let r = log_r.exp2();
        log_t(h) + (r / (1.0 - r)).log2()
    } else {
        f64::INFINITY
    };
    out.metric("partial_sum", format!("{:?}", log_s.exp2()));
    out.metric("log2_partial_sum", format!("{log_s:?}"));
    out.metric("ratio_bound", format!("{:?}", log_r.exp2()));
    out.metric("log2_tail_bound", format!("{log_tail:?}"));

    let mut verdict = SeriesVerdict::Undecided;
    if log_tail < params.tolerance.log2() {
        verdict = SeriesVerdict::Converging;
    } else if let Some(n) = crossing {
        out.metric("crossing", n);
        verdict = SeriesVerdict::Diverging;
    } else if h >= 100 && log_s.is_finite() {
        // S(n) ≈ a + b ln n: compare the log-slope over the last two decades
        let ln10 = std::f64::consts::LN_10;
        let b1 = (sum_at(h / 10) - sum_at(h / 100)) / ln10;
        let b2 = (sum_at(h) - sum_at(h / 10)) / ln10;
        out.metric("log_slope_previous_decade", format!("{b1:?}"));
        out.metric("log_slope_last_decade", format!("{b2:?}"));
        if b2 > 0.0 && b2 >= SLOPE_PERSISTENCE * b1 {
            let s_h = log_s.exp2();
            let predicted = h as f64 * ((params.threshold - s_h) / b2).exp();
            out.metric("predicted_crossing", format!("{:.0}", predicted));
            verdict = SeriesVerdict::Diverging;
        }
    }
    out.metric("verdict", verdict);
    let curve_text: Vec<String> = curve.iter().map(|(n, s)| format!("{n}:{s:?}")).collect();
    out.metric("curve", curve_text.join(" "));

    if let Some(e) = params.expect {
        if e != verdict {
            return Ok(out.fail(&lit, "x_A", format!("expected {e}, observed {verdict}")));
        }
    }
    if verdict == SeriesVerdict::Undecided {
        return Ok(out.fail(&lit, "x_A", "neither the tail nor the partial sums settle within the horizon"));
    }
    if verdict == SeriesVerdict::Diverging {
        return Ok(out.pass());
    }

    // Converging: truncate x_A at M where the certified tail first drops below tolerance.
    // suffix[n] = log2 Σ_{n<k≤H} t_k, padded by the tail beyond H
    let mut suffix = vec![log_tail; h as usize + 1];
    for n in (0..h).rev() {
        suffix[n as usize] = log_add(suffix[n as usize + 1], log_t(n + 1));
    }
    // ‖r_M‖ + ‖B_w r_M‖ ≤ Σ_{k>M} t_k + Σ_{k≥M} t_k
    let bound_at = |m: u64| log_add(log_t(m), 1.0 + suffix[m as usize]).exp2();
    let m = (1..=h).find(|&m| bound_at(m) < params.tolerance).unwrap_or(h);
    let bound = bound_at(m);
    let exact = params.weights.eval(1)?.is_exact() && m <= EXACT_TRUNCATION_CAP;
    let mut terms = Vec::with_capacity(m as usize + 1);
    let mut prod = Scalar::one();
    terms.push(Scalar::one());
    for n in 1..=m {
        let w = params.weights.eval(n as i64)?;
        let w = if exact { w } else { w.to_float() };
        prod = &prod * &w;
        terms.push(prod.recip().expect("nonzero weights"));
    }
    let in_a: Vec<u64> = set.elements().iter().copied().filter(|&n| n <= m).collect();
    let x_m = StateVector::sparse(space.clone(), in_a.iter().map(|&n| (n as i64, terms[n as usize].clone())))?;
    let bx = apply(&op, &x_m)?;
    out.metric("truncation", m);
    out.metric("certified_tail", format!("{bound:?}"));
    out.metric("norm_x", format!("{:?}", seminorm(&space, 0, &x_m)?.approx));
    let full = set.len() as u64 == h;
    if full {
        let res = distance(&space, 0, &bx, &x_m)?.approx;
        out.metric("fixed_point_residual", format!("{res:?}"));
        return Ok(out.decide(
            res <= bound,
            &lit,
            &x_m.literal(),
            format!("‖B_w x_M − x_M‖ = {res:e} exceeds the certified tail {bound:e}"),
        ));
    }
    // B_w maps t_n e_n to t_{n−1} e_{n−1}
    let y = StateVector::sparse(
        space.clone(),
        in_a.iter().filter(|&&n| n >= 2).map(|&n| (n as i64 - 1, terms[n as usize - 1].clone())),
    )?;
    let res = distance(&space, 0, &bx, &y)?.approx;
    out.metric("shift_identity_residual", format!("{res:?}"));
    let scale = seminorm(&space, 0, &y)?.approx.max(1.0);
    Ok(out.decide(
        res <= 1e-12 * scale,
        &lit,
        &x_m.literal(),
        format!("B_w x_A differs from the shifted series by {res:e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(w: &str, set: IndexWindow) -> CheckOutcome {
        shift_series_check(&ShiftSeriesParams::new(Expr::parse(w).unwrap(), set)).unwrap()
    }

    fn naturals(h: u64) -> IndexWindow {
        IndexWindow::from_predicate(h, |n| n >= 1)
    }

    #[test]
    fn constant_two_converges_to_fixed_point() {
        let r = run("2", naturals(10_000));
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("verdict"), Some("Converging"));
        let res: f64 = r.metric("fixed_point_residual").unwrap().parse().unwrap();
        let tail: f64 = r.metric("certified_tail").unwrap().parse().unwrap();
        let m: i32 = r.metric("truncation").unwrap().parse().unwrap();
        assert_eq!(res, 2f64.powi(-m));
        assert!(res < tail);
    }

    #[test]
    fn harmonic_weights_diverge_by_extrapolation() {
        let r = run("(n+1)/n", naturals(10_000));
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("verdict"), Some("Diverging"));
        let n: f64 = r.metric("predicted_crossing").unwrap().parse().unwrap();
        // H_{n+1} − 1 first exceeds 10 near n = 33 600
        assert!((20_000.0..60_000.0).contains(&n), "{n}");
    }

    #[test]
    fn dyadic_subset_converges() {
        let set = IndexWindow::from_predicate(4096, |n| n.is_power_of_two());
        let r = run("2", set);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("verdict"), Some("Converging"));
    }

    #[test]
    fn square_summable_tail_is_undecided() {
        // t_n = 1/(n+1)², too slow for the ratio bound, too flat to diverge
        let r = run("((n+1)/n)^2", naturals(10_000));
        assert_eq!(r.metric("verdict"), Some("Undecided"), "{r:?}");
        assert!(r.failed());
    }

    #[test]
    fn log_add_matches_direct_sum() {
        assert!((log_add(3.0, 1.0) - 10f64.log2()).abs() < 1e-12);
        assert_eq!(log_add(f64::NEG_INFINITY, 2.0), 2.0);
    }
}

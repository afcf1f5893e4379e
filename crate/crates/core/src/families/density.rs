use rayon::prelude::*;

use super::{syndetic_certificate, FamilyError, IndexWindow};

/// Density estimates for one observation window.
///
/// `lower_est`/`upper_est` are the extreme running densities
/// `card(A ∩ [0, N]) / (N + 1)` over `N ∈ [burn_in, H]`. The upper Banach
/// estimate is the maximal window density at the largest scheduled window
/// length, floored by `upper_est` since the upper density never exceeds the
/// upper Banach density.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub lower_est: f64,
    pub upper_est: f64,
    pub banach_upper_est: f64,
    /// Raw sliding-window estimate at the authoritative window length.
    pub banach_window_est: f64,
    /// `Some(g)` when the window carries a syndetic certificate with gap `g`.
    pub max_gap: Option<u64>,
    pub largest_observed_gap: u64,
    pub burn_in: u64,
    /// Sampled `(N, card(A ∩ [0, N]) / (N + 1))`.
    pub running_density_curve: Vec<(u64, f64)>,
    /// `(L, max_m card(A ∩ [m, m + L]) / (L + 1))` for every scheduled `L`.
    pub banach_curve: Vec<(u64, f64)>,
}

const CURVE_POINTS: u64 = 1000;

/// `{⌊H^{1/2}⌋, ⌊H^{2/3}⌋, ⌊H^{3/4}⌋}`, deduplicated, each at least 1.
pub fn default_schedule(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = [2.0, 1.5, 4.0 / 3.0]
        .iter()
        .map(|&root| int_root(horizon, root).max(1).min(horizon))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `⌊H^{1/root}⌋` corrected for floating error.
fn int_root(h: u64, root: f64) -> u64 {
    let mut r = (h as f64).powf(1.0 / root).floor() as u64;
    let pow = |x: u64| (x as f64).powf(root);
    while r > 0 && pow(r) > h as f64 + 1e-9 {
        r -= 1;
    }
    while pow(r + 1) <= h as f64 + 1e-9 {
        r += 1;
    }
    r
}

pub fn density_report(
    a: &IndexWindow,
    burn_in: u64,
    window_schedule: &[u64],
) -> Result<DensityReport, FamilyError> {
    let h = a.horizon();
    if h == 0 {
        return Err(FamilyError::DegenerateWindow);
    }
    if window_schedule.is_empty() {
        return Err(FamilyError::Config("empty window schedule".into()));
    }
    if burn_in >= h {
        return Err(FamilyError::Config(format!(
            "burn-in {burn_in} must be below the horizon {h}"
        )));
    }
    if let Some(&l) = window_schedule.iter().find(|&&l| l > h) {
        return Err(FamilyError::Config(format!(
            "window length {l} exceeds the horizon {h}"
        )));
    }

    let elements = a.elements();
    let stride = (h / CURVE_POINTS).max(1);
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut curve = Vec::with_capacity(CURVE_POINTS as usize + 2);
    let mut idx = 0usize;
    for n in 0..=h {
        while idx < elements.len() && elements[idx] <= n {
            idx += 1;
        }
        let ratio = idx as f64 / (n + 1) as f64;
        if n >= burn_in {
            lower = lower.min(ratio);
            upper = upper.max(ratio);
        }
        if n % stride == 0 || n == h || n == burn_in {
            curve.push((n, ratio));
        }
    }

    let mut prefix = Vec::with_capacity(h as usize + 2);
    prefix.push(0u32);
    let mut idx = 0usize;
    for n in 0..=h {
        if idx < elements.len() && elements[idx] == n {
            idx += 1;
        }
        prefix.push(idx as u32);
    }
    let mut schedule = window_schedule.to_vec();
    schedule.sort_unstable();
    schedule.dedup();
    let banach_curve: Vec<(u64, f64)> = schedule
        .par_iter()
        .map(|&l| (l, max_window_density(&prefix, h, l)))
        .collect();
    let banach_window_est = banach_curve.last().map(|&(_, v)| v).unwrap_or(0.0);

    let (max_gap, largest_observed_gap) = match syndetic_certificate(a) {
        Ok(c) => (Some(c.max_gap), c.max_gap),
        Err(f) => (None, f.largest_gap.unwrap_or(0)),
    };

    Ok(DensityReport {
        lower_est: lower,
        upper_est: upper,
        banach_upper_est: banach_window_est.max(upper),
        banach_window_est,
        max_gap,
        largest_observed_gap,
        burn_in,
        running_density_curve: curve,
        banach_curve,
    })
}

/// One pass over `m ∈ [0, H − L]` using prefix counts.
fn max_window_density(prefix: &[u32], h: u64, l: u64) -> f64 {
    let best = (0..=(h - l) as usize)
        .map(|m| prefix[m + l as usize + 1] - prefix[m])
        .max()
        .unwrap_or(0);
    best as f64 / (l + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_roots() {
        assert_eq!(default_schedule(10_000), vec![100, 464, 1000]);
        assert_eq!(default_schedule(1), vec![1]);
        assert_eq!(int_root(1_000_000, 3.0), 100);
        assert_eq!(int_root(999_999, 3.0), 99);
    }

    #[test]
    fn evens_have_density_one_half() {
        let h = 100_000;
        let a = IndexWindow::residue(2, 0, h);
        let r = density_report(&a, h / 2, &default_schedule(h)).unwrap();
        let tol = 1.0 / h as f64;
        for v in [r.lower_est, r.upper_est, r.banach_upper_est] {
            assert!((v - 0.5).abs() <= tol, "{v}");
        }
    }

    #[test]
    fn squares_have_vanishing_density() {
        let h = 100_000;
        let a = IndexWindow::from_iter_clipped((0..).map(|n: u64| n * n).take(400), h);
        // the default schedule tops out at L = 5623, where the window
        // [0, L] still holds 75 squares; a window of length H/2 is needed
        let r = density_report(&a, h / 2, &[h / 2]).unwrap();
        assert!(r.lower_est <= 0.005);
        assert!(r.upper_est <= 0.005);
        assert!(r.banach_upper_est <= 0.005);
    }

    #[test]
    fn errors() {
        let a = IndexWindow::residue(2, 0, 10);
        assert!(matches!(
            density_report(&a, 1, &[]),
            Err(FamilyError::Config(_))
        ));
        assert_eq!(
            density_report(&IndexWindow::empty(0), 0, &[1]),
            Err(FamilyError::DegenerateWindow)
        );
        assert!(density_report(&a, 1, &[11]).is_err());
    }

    #[test]
    fn estimates_are_ordered() {
        let a = IndexWindow::from_iter_clipped([0, 1, 2, 3, 50, 51, 400], 1000);
        let r = density_report(&a, 100, &default_schedule(1000)).unwrap();
        assert!(r.lower_est <= r.upper_est && r.upper_est <= r.banach_upper_est);
    }
}

//! Cut-shift-paste closure of Furstenberg families, checked on random members
//! and random partitions, plus translation invariance of density estimates.
//!
//! For `B = ⋃_i (A ∩ I_i) + n_i` with `q` pieces and largest shift `s`, each
//! family comes with an exact finite inequality that the transform must meet:
//!
//! * counts: `card(B ∩ [0, N]) ≥ card(A ∩ [0, N − s]) / q` for every `N`;
//! * gaps: every gap of `B` before `last(A) − g` is at most `g + s`, where `g`
//!   is the largest gap of `A`;
//! * windows: the best window of length `L + s` in `B` holds at least `1/q` of
//!   the best window of length `L` in `A`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Outcome, VerifyError};
use crate::classify::{Family, Thresholds};
use crate::families::{
    cusp_transform, default_schedule, density_report, ip_generate, syndetic_certificate, CuspInstance, IndexPredicate,
    IndexWindow,
};
use crate::verify::CheckOutcome;

/// Allowed shortfall of the post-transform Banach estimate below `δ/(2q)`.
pub const CUSP_BANACH_SLACK: f64 = 0.02;
/// Banach-density members must reach this estimate before they are used.
const BANACH_MEMBER_DELTA: f64 = 0.3;
const MAX_PIECES: u64 = 4;
const MAX_SHIFT: u64 = 50;
const MEMBER_ATTEMPTS: usize = 20;

fn count_upto(e: &[u64], n: u64) -> usize {
    e.partition_point(|&v| v <= n)
}

/// Largest number of elements in a window `[m, m + len − 1]`.
fn best_window(e: &[u64], len: u64) -> usize {
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..e.len() {
        while e[hi] - e[lo] >= len {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

/// A sampled member with a short description for replay.
struct Member {
    set: IndexWindow,
    text: String,
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64, h: u64) -> IndexWindow {
    IndexWindow::from_predicate(h, |_| rng.random_bool(p))
}

fn sample_member(family: Family, rng: &mut ChaCha8Rng, h: u64) -> Result<Member, VerifyError> {
    let kind = rng.random_range(0..3u32);
    let member = match (family, kind) {
        (Family::Infinite, 0) => {
            let c = rng.random_range(0..20u64);
            Member {
                set: IndexWindow::from_predicate(h, |n| n >= c && ((n - c) as f64).sqrt().fract() == 0.0),
                text: format!("squares+{c}"),
            }
        }
        (Family::Infinite, 1) => {
            let mut g = rng.random_range(1..8u64);
            let mut gens = Vec::new();
            while g <= h {
                gens.push(g);
                g = g * 2 + rng.random_range(1..4u64) * g / 2;
            }
            Member {
                set: ip_generate(&gens, gens.len(), h)?,
                text: format!("fs({:?})", gens),
            }
        }
        (Family::Infinite, _) => {
            let c = rng.random_range(0.5..3.0f64);
            let set = IndexWindow::from_predicate(h, |n| rng.random_bool((c / ((n + 1) as f64).sqrt()).min(1.0)));
            Member {
                set,
                text: format!("random(c/sqrt(n), c={c:.3})"),
            }
        }
        (Family::Syndetic, 0) => {
            let k = rng.random_range(1..20u64);
            let r = rng.random_range(0..k);
            Member {
                set: IndexWindow::residue(k, r, h),
                text: format!("residue({k},{r})"),
            }
        }
        (Family::Syndetic, 1) => {
            let g = rng.random_range(1..30u64);
            let mut e = Vec::new();
            let mut n = rng.random_range(0..g);
            while n <= h {
                e.push(n);
                n += rng.random_range(1..=g);
            }
            Member {
                set: IndexWindow::new(e, h)?,
                text: format!("random_gaps(max={g})"),
            }
        }
        (Family::Syndetic, _) => {
            let k = rng.random_range(2..12u64);
            let r = rng.random_range(0..k);
            let p = rng.random_range(0.1..0.6f64);
            let base = IndexWindow::residue(k, r, h);
            let extra = bernoulli(rng, p, h);
            Member {
                set: base.union(&extra),
                text: format!("residue({k},{r})+bernoulli({p:.3})"),
            }
        }
        (Family::PositiveLowerDensity, 0) => {
            let p = rng.random_range(0.05..0.9f64);
            Member {
                set: bernoulli(rng, p, h),
                text: format!("bernoulli({p:.3})"),
            }
        }
        (Family::PositiveLowerDensity, 1) => {
            let k = rng.random_range(1..15u64);
            let r = rng.random_range(0..k);
            Member {
                set: IndexWindow::residue(k, r, h),
                text: format!("residue({k},{r})"),
            }
        }
        (Family::PositiveLowerDensity, _) => {
            // dense blocks of length b every 2b
            let b = rng.random_range(1..200u64);
            Member {
                set: IndexWindow::from_predicate(h, |n| (n / b) % 2 == 0),
                text: format!("blocks({b})"),
            }
        }
        (Family::PositiveUpperDensity, 0) => {
            // [4^k, 2·4^k): upper density 1/3 in the limit, lower density 1/6
            Member {
                set: IndexWindow::from_predicate(h, |n| n >= 1 && n.ilog2() % 2 == 0),
                text: "even_octaves".into(),
            }
        }
        (Family::PositiveUpperDensity, 1) => {
            let p = rng.random_range(0.05..0.9f64);
            Member {
                set: bernoulli(rng, p, h),
                text: format!("bernoulli({p:.3})"),
            }
        }
        (Family::PositiveUpperDensity, _) => {
            let a = rng.random_range(h / 10..h / 2);
            Member {
                set: IndexWindow::from_predicate(h, |n| n >= a && n <= a + h / 4),
                text: format!("intervals({a}:{})", a + h / 4),
            }
        }
        (Family::PositiveUpperBanachDensity, 0) => {
            let p = rng.random_range(BANACH_MEMBER_DELTA..0.95f64);
            Member {
                set: bernoulli(rng, p, h),
                text: format!("bernoulli({p:.3})"),
            }
        }
        (Family::PositiveUpperBanachDensity, 1) => {
            // one long block in an otherwise sparse set
            let len = h / 4 + rng.random_range(0..h / 4);
            let a = rng.random_range(0..h - len);
            let set = IndexWindow::from_predicate(h, |n| (n >= a && n <= a + len) || n.is_power_of_two());
            Member {
                set,
                text: format!("block({a}:{})+powers", a + len),
            }
        }
        (Family::PositiveUpperBanachDensity, _) => {
            let k = rng.random_range(1..4u64);
            let r = rng.random_range(0..k);
            Member {
                set: IndexWindow::residue(k, r, h),
                text: format!("residue({k},{r})"),
            }
        }
        (Family::IpStar, _) => unreachable!("rejected by the caller"),
    };
    Ok(member)
}

fn sample_instance(rng: &mut ChaCha8Rng, h: u64) -> CuspInstance {
    let q = rng.random_range(1..=MAX_PIECES);
    let shifts: Vec<u64> = (0..q).map(|_| rng.random_range(0..=MAX_SHIFT)).collect();
    let partition = if rng.random_bool(0.5) {
        (0..q).map(|r| IndexPredicate::residue(q, r)).collect()
    } else {
        let mut cuts: Vec<u64> = (1..q).map(|_| rng.random_range(1..h)).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let mut pieces = Vec::new();
        let mut start = 0;
        for &c in &cuts {
            pieces.push(IndexPredicate::Intervals(vec![(start, Some(c - 1))]));
            start = c;
        }
        pieces.push(IndexPredicate::Intervals(vec![(start, None)]));
        pieces
    };
    let shifts = shifts[..partition.len()].to_vec();
    CuspInstance::new(partition, shifts).expect("pieces and shifts match")
}

/// Result of one trial: `None` when every inequality holds.
struct Trial {
    violation: Option<String>,
    member: String,
    instance: String,
    banach_ratio: Option<f64>,
    rejected: usize,
}

fn run_trial(family: Family, seed: u64, trial: u64, h: u64, t: &Thresholds) -> Result<Trial, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut rejected = 0;
    let member = loop {
        let m = sample_member(family, &mut rng, h)?;
        let ok = match family {
            Family::PositiveUpperBanachDensity => {
                density_report(&m.set, t.burn_in(h), &default_schedule(h))?.banach_upper_est >= BANACH_MEMBER_DELTA
            }
            _ => family.evaluate(&m.set, t),
        };
        if ok || rejected + 1 >= MEMBER_ATTEMPTS {
            break m;
        }
        rejected += 1;
    };
    let inst = if trial == 0 {
        CuspInstance::identity()
    } else {
        sample_instance(&mut rng, h)
    };
    let q = inst.partition.len();
    let s = inst.max_shift();
    let b = cusp_transform(&member.set, &inst)?;
    let interior = b.truncate(inst.interior_horizon(h));
    let a = member.set.elements();
    let be = interior.elements();
    let mut violation = None;
    let instance = format!("q={q} shifts={:?} partition={:?}", inst.shifts, inst.partition);

    if trial == 0 && interior != member.set {
        violation = Some("identity instance changed the set".to_string());
    }
    match family {
        Family::Infinite | Family::PositiveLowerDensity | Family::PositiveUpperDensity => {
            // card(B ∩ [0, N]) · q ≥ card(A ∩ [0, N − s]) for every N in the interior
            let mut j = 0;
            for n in s..=interior.horizon() {
                while j < be.len() && be[j] <= n {
                    j += 1;
                }
                let need = count_upto(a, n - s);
                if j * q < need && violation.is_none() {
                    violation = Some(format!("card(B∩[0,{n}]) = {j} < {need}/{q}"));
                }
            }
        }
        Family::Syndetic => {
            if let (Ok(cert), Some(last)) = (syndetic_certificate(&member.set), member.set.last()) {
                let g = cert.max_gap;
                let bound = g + s;
                // every transformed element is genuine, so use all of B, not only the interior
                let full = b.elements();
                let mut worst = full.first().copied().unwrap_or(u64::MAX);
                for w in full.windows(2) {
                    if w[0] + g <= last {
                        worst = worst.max(w[1] - w[0]);
                    }
                }
                if worst > bound {
                    violation.get_or_insert(format!("interior gap {worst} exceeds {g} + {s}"));
                }
            }
        }
        Family::PositiveUpperBanachDensity => {
            let l = *default_schedule(h).last().expect("nonempty schedule");
            let wa = best_window(a, l + 1);
            let wb = best_window(be, l + 1 + s);
            if wb * q < wa {
                violation.get_or_insert(format!("best window {wb} < {wa}/{q}"));
            }
        }
        Family::IpStar => unreachable!("rejected by the caller"),
    }

    let mut banach_ratio = None;
    if family == Family::PositiveUpperBanachDensity {
        let ih = interior.horizon();
        let pre = density_report(&member.set, t.burn_in(h), &default_schedule(h))?.banach_upper_est;
        let post = density_report(&interior, t.burn_in(ih), &default_schedule(ih))?.banach_upper_est;
        let floor = pre / (2.0 * q as f64) - CUSP_BANACH_SLACK;
        banach_ratio = Some(post - pre / (2.0 * q as f64));
        if pre >= BANACH_MEMBER_DELTA && post < floor {
            violation.get_or_insert(format!("Banach estimate {post:.4} below {pre:.4}/(2·{q}) − {CUSP_BANACH_SLACK}"));
        }
    }
    Ok(Trial {
        violation,
        member: member.text,
        instance,
        banach_ratio,
        rejected,
    })
}

/// Random members of `family` under random partitions and shifts; passes
/// when no trial breaks its family's inequality. Trial 0 uses the identity
/// instance, which must return the member unchanged.
pub fn cusp_family_check(
    family: Family,
    trials: u64,
    seed: u64,
    horizon: u64,
    thresholds: &Thresholds,
) -> Result<CheckOutcome, VerifyError> {
    if family == Family::IpStar {
        return Err(VerifyError::Config("cut-shift-paste closure is checked for infinite, syndetic and density families".into()));
    }
    if trials == 0 || horizon < 100 {
        return Err(VerifyError::Config("need at least one trial and a horizon of at least 100".into()));
    }
    let mut out = Outcome::new("cusp_family", seed)
        .param("family", family.name())
        .param("trials", trials)
        .param("horizon", horizon);
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(family, seed, k, horizon, thresholds))
        .collect::<Result<_, _>>()?;
    let violations: Vec<(usize, &Trial)> = results.iter().enumerate().filter(|(_, t)| t.violation.is_some()).collect();
    out.metric("violations", violations.len());
    out.metric("rejected_members", results.iter().map(|t| t.rejected).sum::<usize>());
    if family == Family::PositiveUpperBanachDensity {
        let worst = results.iter().filter_map(|t| t.banach_ratio).fold(f64::INFINITY, f64::min);
        out.metric("min_banach_margin", format!("{worst:.6}"));
    }
    match violations.first() {
        None => Ok(out.pass()),
        Some((k, t)) => {
            let detail = format!("trial {k}: {}", t.violation.as_deref().unwrap_or_default());
            Ok(out.fail(&t.instance, &t.member, detail))
        }
    }
}

/// `W + m` keeps the density and Banach-density estimates of `W`, up to `slack`.
pub fn hypercyclic_frec_composition_check(
    w: &IndexWindow,
    m: u64,
    slack: f64,
    thresholds: &Thresholds,
) -> Result<CheckOutcome, VerifyError> {
    let h = w.horizon();
    if h == 0 {
        return Err(VerifyError::Config("window horizon must be positive".into()));
    }
    let mut out = Outcome::new("hypercyclic_frec_composition", 0)
        .param("window_size", w.len())
        .param("horizon", h)
        .param("shift", m)
        .param("slack", format!("{slack:?}"));
    let shifted = w.translate(m);
    let sched = default_schedule(h);
    let before = density_report(w, thresholds.burn_in(h), &sched)?;
    let after = density_report(&shifted, thresholds.burn_in(shifted.horizon()), &sched)?;
    let pairs = [
        ("lower", before.lower_est, after.lower_est),
        ("upper", before.upper_est, after.upper_est),
        ("banach", before.banach_upper_est, after.banach_upper_est),
    ];
    let mut worst = ("", 0.0f64);
    for (name, b, a) in pairs {
        out.metric(&format!("{name}_before"), format!("{b:.6}"));
        out.metric(&format!("{name}_after"), format!("{a:.6}"));
        if (a - b).abs() > worst.1 {
            worst = (name, (a - b).abs());
        }
    }
    out.metric("max_change", format!("{:.6}", worst.1));
    Ok(out.decide(
        worst.1 <= slack,
        "translate",
        &format!("window(len={}, horizon={h})", w.len()),
        format!("{} estimate moved by {:.6}", worst.0, worst.1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_survives_small_runs() {
        let t = Thresholds::default();
        for f in [
            Family::Infinite,
            Family::Syndetic,
            Family::PositiveLowerDensity,
            Family::PositiveUpperDensity,
            Family::PositiveUpperBanachDensity,
        ] {
            let r = cusp_family_check(f, 40, 11, 4000, &t).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn same_seed_same_outcome() {
        let t = Thresholds::default();
        let a = cusp_family_check(Family::Syndetic, 20, 5, 2000, &t).unwrap();
        let b = cusp_family_check(Family::Syndetic, 20, 5, 2000, &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ip_star_is_refused() {
        assert!(cusp_family_check(Family::IpStar, 5, 0, 1000, &Thresholds::default()).is_err());
    }

    #[test]
    fn translation_keeps_estimates() {
        let t = Thresholds::default();
        let w = IndexWindow::residue(3, 0, 10_000);
        let r = hypercyclic_frec_composition_check(&w, 7, 0.02, &t).unwrap();
        assert!(r.passed(), "{r:?}");
        let fs = ip_generate(&[1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192], 14, 10_000).unwrap();
        let r = hypercyclic_frec_composition_check(&fs, 5, 0.02, &t).unwrap();
        assert!(r.passed(), "{r:?}");
        let z = IndexWindow::new(vec![0], 10_000).unwrap();
        let r = hypercyclic_frec_composition_check(&z, 13, 0.02, &t).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn best_window_counts() {
        assert_eq!(best_window(&[0, 1, 2, 10, 11], 3), 3);
        assert_eq!(best_window(&[], 3), 0);
    }
}

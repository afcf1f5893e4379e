//! Recurrence labels from return-set records.
//!
//! Every label is backed by an evidence predicate on the observed windows.
//! The predicates are upward closed in the window, like the Furstenberg
//! families they stand in for, and the density predicates all contain the
//! "infinite-looking" one, so the emitted evidence respects
//! frequent ⇒ upper frequent ⇒ reiterative ⇒ recurrent and
//! periodic ⇒ IP* ⇒ syndetic on every verdict.

mod refute;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use refute::{blockcycle_rrec_refutation, RefutationError, RrecRefutation};

use crate::families::{
    default_schedule, density_report, ip_star_probe, syndetic_bound, syndetic_certificate, DensityReport,
    IndexWindow, IpProbeResult, IpVerdict, SyndeticCertificate, SyndeticFailure,
};
use crate::orbit::{Precision, ReturnSetRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("no records to classify")]
    EmptyGrid,
    #[error("inconsistent records: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds {
    pub delta_low: f64,
    pub delta_up: f64,
    pub delta_bd: f64,
    /// Running densities are read on `[burn_in_fraction·N, N]`.
    pub burn_in_fraction: f64,
    /// Returns needed before a window looks infinite.
    pub m_min: usize,
    /// Greedy restarts for the IP falsifier.
    pub ip_budget: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            delta_low: 0.01,
            delta_up: 0.01,
            delta_bd: 0.01,
            burn_in_fraction: 0.1,
            m_min: 20,
            ip_budget: 8,
        }
    }
}

impl Thresholds {
    pub fn burn_in(&self, horizon: u64) -> u64 {
        ((horizon as f64 * self.burn_in_fraction).floor() as u64).min(horizon.saturating_sub(1))
    }

    pub fn to_kv(&self) -> String {
        format!(
            "delta_low={:?}\ndelta_up={:?}\ndelta_bd={:?}\nburn_in_fraction={:?}\nm_min={}\nip_budget={}\n",
            self.delta_low, self.delta_up, self.delta_bd, self.burn_in_fraction, self.m_min, self.ip_budget
        )
    }
}

/// Ordered from weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecurrenceLabel {
    None,
    Recurrent,
    ReiterativelyRecurrent,
    UpperFrequentlyRecurrent,
    FrequentlyRecurrent,
    UniformlyRecurrent,
    IpStarCertified,
    Periodic(u64),
}

impl RecurrenceLabel {
    /// Rank in the chain, ignoring the period value.
    pub fn rank(&self) -> u8 {
        match self {
            RecurrenceLabel::None => 0,
            RecurrenceLabel::Recurrent => 1,
            RecurrenceLabel::ReiterativelyRecurrent => 2,
            RecurrenceLabel::UpperFrequentlyRecurrent => 3,
            RecurrenceLabel::FrequentlyRecurrent => 4,
            RecurrenceLabel::UniformlyRecurrent => 5,
            RecurrenceLabel::IpStarCertified => 6,
            RecurrenceLabel::Periodic(_) => 7,
        }
    }

    pub fn at_least_uniform(&self) -> bool {
        self.rank() >= 5
    }

    pub fn same_class(&self, other: &RecurrenceLabel) -> bool {
        self.rank() == other.rank()
    }
}

impl fmt::Display for RecurrenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecurrenceLabel::Periodic(p) => write!(f, "Periodic({p})"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Family predicates on one window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Predicates {
    pub recurrent: bool,
    pub reiterative: bool,
    pub upper_frequent: bool,
    pub frequent: bool,
    pub uniform: bool,
    pub ip_star: bool,
    pub periodic: bool,
}

impl Predicates {
    /// Implications that every emitted evidence record must satisfy.
    pub fn chain_violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let imp = [
            (self.frequent, self.upper_frequent, "frequent without upper frequent"),
            (self.upper_frequent, self.reiterative, "upper frequent without reiterative"),
            (self.reiterative, self.recurrent, "reiterative without recurrent"),
            (self.periodic, self.ip_star, "periodic without IP*"),
            (self.ip_star, self.uniform, "IP* without syndetic"),
        ];
        for (a, b, msg) in imp {
            if a && !b {
                v.push(msg);
            }
        }
        v
    }

    fn holds(&self, label: RecurrenceLabel) -> bool {
        match label {
            RecurrenceLabel::None => true,
            RecurrenceLabel::Recurrent => self.recurrent,
            RecurrenceLabel::ReiterativelyRecurrent => self.reiterative,
            RecurrenceLabel::UpperFrequentlyRecurrent => self.upper_frequent,
            RecurrenceLabel::FrequentlyRecurrent => self.frequent,
            RecurrenceLabel::UniformlyRecurrent => self.uniform,
            RecurrenceLabel::IpStarCertified => self.ip_star,
            RecurrenceLabel::Periodic(_) => self.periodic,
        }
    }
}

/// Everything measured on one window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowEvidence {
    pub returns: usize,
    pub last_return: Option<u64>,
    pub density: Option<DensityReport>,
    pub syndetic: Result<SyndeticCertificate, SyndeticFailure>,
    pub ip: IpProbeResult,
    pub predicates: Predicates,
}

/// Family predicates of a bare window; `periodic` is left false.
pub fn window_evidence(a: &IndexWindow, t: &Thresholds) -> WindowEvidence {
    let h = a.horizon();
    let density = density_report(a, t.burn_in(h), &default_schedule(h)).ok();
    let syndetic = syndetic_certificate(a);
    let ip = ip_star_probe(a, t.ip_budget);
    // infinite-looking: enough returns, one of them in the second half
    let recurrent = a.len() > t.m_min && a.last().is_some_and(|l| 2 * l >= h);
    let (lo, up, bd) = density
        .as_ref()
        .map_or((0.0, 0.0, 0.0), |d| (d.lower_est, d.upper_est, d.banach_upper_est));
    let reiterative = recurrent && bd > t.delta_bd;
    let upper_frequent = reiterative && up > t.delta_up;
    let frequent = upper_frequent && lo > t.delta_low;
    let ip_star = matches!(ip.verdict, IpVerdict::ArithmeticCertificate(k) if k <= syndetic_bound(h));
    WindowEvidence {
        returns: a.len(),
        last_return: a.last(),
        predicates: Predicates {
            recurrent,
            reiterative,
            upper_frequent,
            frequent,
            uniform: syndetic.is_ok(),
            ip_star,
            periodic: false,
        },
        density,
        syndetic,
        ip,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonEvidence {
    pub epsilon: f64,
    pub evidence: WindowEvidence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceVerdict {
    pub label: RecurrenceLabel,
    /// Per tolerance, largest first.
    pub evidence: Vec<EpsilonEvidence>,
    pub epsilon_grid: Vec<f64>,
    pub thresholds: Thresholds,
    pub horizon: u64,
    pub exact_period: Option<u64>,
    pub notes: Vec<String>,
}

impl RecurrenceVerdict {
    /// Label reached by a given family predicate at every tolerance.
    pub fn family_holds(&self, family: Family) -> bool {
        self.evidence.iter().all(|e| family.holds(&e.evidence.predicates))
    }

    pub fn chain_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.evidence {
            for v in e.evidence.predicates.chain_violations() {
                out.push(format!("eps={:?}: {v}", e.epsilon));
            }
        }
        if !self.evidence.iter().all(|e| e.evidence.predicates.holds(self.label)) {
            out.push(format!("label {} not backed at every tolerance", self.label));
        }
        out
    }

    /// Key-value text with one block per tolerance.
    pub fn to_kv(&self) -> String {
        let mut s = format!("label={}\nhorizon={}\n", self.label, self.horizon);
        let grid: Vec<String> = self.epsilon_grid.iter().map(|e| format!("{e:?}")).collect();
        s += &format!("epsilon_grid={}\n", grid.join(","));
        s += &format!(
            "exact_period={}\n",
            self.exact_period.map_or("none".into(), |p| p.to_string())
        );
        s += &self.thresholds.to_kv();
        for n in &self.notes {
            s += &format!("note={n}\n");
        }
        for e in &self.evidence {
            let ev = &e.evidence;
            let p = &ev.predicates;
            s += &format!("[eps={:?}]\n", e.epsilon);
            s += &format!("returns={}\n", ev.returns);
            s += &format!("last_return={}\n", ev.last_return.map_or("none".into(), |l| l.to_string()));
            if let Some(d) = &ev.density {
                s += &format!(
                    "lower_est={:?}\nupper_est={:?}\nbanach_upper_est={:?}\nlargest_gap={}\n",
                    d.lower_est, d.upper_est, d.banach_upper_est, d.largest_observed_gap
                );
            }
            match &ev.syndetic {
                Ok(c) => s += &format!("syndetic=gap {} (bound {})\n", c.max_gap, c.bound),
                Err(f) => s += &format!(
                    "syndetic=fail gap {} trailing {} (bound {})\n",
                    f.largest_gap.map_or("none".into(), |g| g.to_string()),
                    f.trailing_gap,
                    f.bound
                ),
            }
            let ip = match &ev.ip.verdict {
                IpVerdict::ArithmeticCertificate(k) => format!("multiples of {k}"),
                IpVerdict::FalsifiedByIpWitness(g) => format!("falsified by generators {g:?}"),
                IpVerdict::Inconclusive => "inconclusive".into(),
            };
            s += &format!("ip_star={ip}\n");
            s += &format!(
                "predicates=rec:{} rrec:{} ufrec:{} frec:{} urec:{} ipstar:{} per:{}\n",
                p.recurrent as u8,
                p.reiterative as u8,
                p.upper_frequent as u8,
                p.frequent as u8,
                p.uniform as u8,
                p.ip_star as u8,
                p.periodic as u8
            );
        }
        s
    }
}

/// Furstenberg families with a finite-window evidence predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Infinite,
    PositiveUpperBanachDensity,
    PositiveUpperDensity,
    PositiveLowerDensity,
    Syndetic,
    IpStar,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Infinite,
        Family::PositiveUpperBanachDensity,
        Family::PositiveUpperDensity,
        Family::PositiveLowerDensity,
        Family::Syndetic,
        Family::IpStar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Infinite => "infinite",
            Family::PositiveUpperBanachDensity => "banach-density",
            Family::PositiveUpperDensity => "upper-density",
            Family::PositiveLowerDensity => "lower-density",
            Family::Syndetic => "syndetic",
            Family::IpStar => "ip-star",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    /// The label this family's recurrence corresponds to.
    pub fn label(&self) -> RecurrenceLabel {
        match self {
            Family::Infinite => RecurrenceLabel::Recurrent,
            Family::PositiveUpperBanachDensity => RecurrenceLabel::ReiterativelyRecurrent,
            Family::PositiveUpperDensity => RecurrenceLabel::UpperFrequentlyRecurrent,
            Family::PositiveLowerDensity => RecurrenceLabel::FrequentlyRecurrent,
            Family::Syndetic => RecurrenceLabel::UniformlyRecurrent,
            Family::IpStar => RecurrenceLabel::IpStarCertified,
        }
    }

    pub fn holds(&self, p: &Predicates) -> bool {
        p.holds(self.label())
    }

    pub fn evaluate(&self, a: &IndexWindow, t: &Thresholds) -> bool {
        self.holds(&window_evidence(a, t).predicates)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyCheck {
    pub family: Family,
    pub holds: bool,
    /// `(ε, predicate)`, largest ε first.
    pub per_epsilon: Vec<(f64, bool)>,
}

/// Whether every record's window lies in the family.
pub fn f_recurrence_check(
    records: &[ReturnSetRecord],
    family: Family,
    thresholds: &Thresholds,
) -> Result<FamilyCheck, ClassifyError> {
    let v = classify(records, thresholds)?;
    let per_epsilon: Vec<(f64, bool)> = v
        .evidence
        .iter()
        .map(|e| (e.epsilon, family.holds(&e.evidence.predicates)))
        .collect();
    Ok(FamilyCheck {
        family,
        holds: per_epsilon.iter().all(|p| p.1),
        per_epsilon,
    })
}

/// Strongest label whose predicate holds at every tolerance of the grid.
pub fn classify(records: &[ReturnSetRecord], thresholds: &Thresholds) -> Result<RecurrenceVerdict, ClassifyError> {
    let first = records.first().ok_or(ClassifyError::EmptyGrid)?;
    for r in records {
        if r.operator != first.operator || r.vector_id != first.vector_id {
            return Err(ClassifyError::Inconsistent("records mix operators or vectors".into()));
        }
        if r.horizon != first.horizon || r.window.horizon() != first.horizon {
            return Err(ClassifyError::Inconsistent("records use different horizons".into()));
        }
        if r.seminorms != first.seminorms || r.precision != first.precision {
            return Err(ClassifyError::Inconsistent("records use different seminorms or precision".into()));
        }
        if r.exact_period != first.exact_period {
            return Err(ClassifyError::Inconsistent("records disagree on the exact period".into()));
        }
        if !r.window.contains(0) {
            return Err(ClassifyError::Inconsistent(format!("window at eps={} misses 0", r.epsilon)));
        }
    }
    // the grid is a set: order by tolerance, merge exact duplicates
    let mut sorted: Vec<&ReturnSetRecord> = records.iter().collect();
    sorted.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let mut grid: Vec<&ReturnSetRecord> = Vec::with_capacity(sorted.len());
    for r in sorted {
        match grid.last() {
            Some(prev) if prev.epsilon == r.epsilon => {
                if prev.window != r.window {
                    return Err(ClassifyError::Inconsistent(format!(
                        "two different windows at eps={}",
                        r.epsilon
                    )));
                }
            }
            _ => grid.push(r),
        }
    }
    let h = first.horizon;
    let mut notes = Vec::new();
    let exact = first.precision == Precision::Exact && first.operator.is_exact();
    let period = match first.exact_period {
        Some(p) if p.is_pure() && exact => {
            if p.period <= syndetic_bound(h) {
                Some(p.period)
            } else {
                notes.push(format!(
                    "exact period {} exceeds the window's gap bound {}; a longer horizon would show it",
                    p.period,
                    syndetic_bound(h)
                ));
                None
            }
        }
        Some(p) if !p.is_pure() => {
            notes.push(format!(
                "orbit is eventually periodic (preperiod {}, period {}) but never returns to x exactly",
                p.preperiod, p.period
            ));
            None
        }
        _ => None,
    };

    let mut evidence: Vec<EpsilonEvidence> = grid
        .par_iter()
        .map(|r| EpsilonEvidence {
            epsilon: r.epsilon,
            evidence: window_evidence(&r.window, thresholds),
        })
        .collect();
    for e in &mut evidence {
        e.evidence.predicates.periodic = period.is_some() && e.evidence.predicates.ip_star;
    }

    let ladder = [
        RecurrenceLabel::Periodic(period.unwrap_or(0)),
        RecurrenceLabel::IpStarCertified,
        RecurrenceLabel::UniformlyRecurrent,
        RecurrenceLabel::FrequentlyRecurrent,
        RecurrenceLabel::UpperFrequentlyRecurrent,
        RecurrenceLabel::ReiterativelyRecurrent,
        RecurrenceLabel::Recurrent,
    ];
    let label = ladder
        .into_iter()
        .find(|l| evidence.iter().all(|e| e.evidence.predicates.holds(*l)))
        .unwrap_or(RecurrenceLabel::None);

    if !exact && label.rank() >= RecurrenceLabel::IpStarCertified.rank() {
        if let Some(k) = evidence.iter().find_map(|e| match e.evidence.ip.verdict {
            IpVerdict::ArithmeticCertificate(k) => Some(k),
            _ => None,
        }) {
            notes.push(format!(
                "windows contain multiples of {k}, which looks periodic; floating arithmetic cannot certify exact periodicity"
            ));
        }
    }
    if label.rank() < RecurrenceLabel::UniformlyRecurrent.rank()
        && evidence
            .iter()
            .any(|e| matches!(e.evidence.ip.verdict, IpVerdict::FalsifiedByIpWitness(_)))
    {
        notes.push("an IP-set avoids some window, so the vector is not IP*-recurrent at that tolerance".into());
    }

    Ok(RecurrenceVerdict {
        label,
        epsilon_grid: evidence.iter().map(|e| e.epsilon).collect(),
        evidence,
        thresholds: thresholds.clone(),
        horizon: h,
        exact_period: period,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_vector, RowBlocks, StateVector};
    use crate::orbit::return_sets;

    fn verdict(op: &str, x: &str, grid: &[f64], n: u64) -> RecurrenceVerdict {
        let op = parse_operator(op).unwrap();
        let x = parse_vector(x, &op.space()).unwrap();
        let recs = return_sets(&op, &x, grid, &[0], n, Precision::Exact).unwrap();
        classify(&recs, &Thresholds::default()).unwrap()
    }

    #[test]
    fn block_cycle_unit_vector_is_periodic() {
        let v = verdict("blockcycle", "e(5)", &[0.5, 0.1], 10_000);
        assert_eq!(v.label, RecurrenceLabel::Periodic(4));
        assert!(v.chain_violations().is_empty());
    }

    #[test]
    fn jordan_block_is_not_recurrent() {
        let v = verdict("matrix([[1, 1], [0, 1]])", "vec(0, 1)", &[0.5, 0.1], 10_000);
        assert_eq!(v.label, RecurrenceLabel::None);
    }

    #[test]
    fn special_row_vector_is_ip_star() {
        let op = parse_operator("rowrotation").unwrap();
        let x = StateVector::rows(RowBlocks::special());
        let recs = return_sets(&op, &x, &[0.3, 0.1, 0.02], &[0, 1, 2], 10_000, Precision::Exact).unwrap();
        let v = classify(&recs, &Thresholds::default()).unwrap();
        assert_eq!(v.label, RecurrenceLabel::IpStarCertified);
        assert!(v.family_holds(Family::Syndetic));
    }

    #[test]
    fn grid_order_is_irrelevant() {
        let op = parse_operator("diag([cis(1), turn(1/3)])").unwrap();
        let x = parse_vector("vec(1, 1)", &op.space()).unwrap();
        let mut recs = return_sets(&op, &x, &[0.5, 0.2, 0.3], &[0], 20_000, Precision::Exact).unwrap();
        let a = classify(&recs, &Thresholds::default()).unwrap();
        recs.reverse();
        let b = classify(&recs, &Thresholds::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.label.at_least_uniform(), "{}", a.label);
    }

    #[test]
    fn stricter_thresholds_never_raise_the_label() {
        let op = parse_operator("diag([cis(1)])").unwrap();
        let x = parse_vector("vec(1)", &op.space()).unwrap();
        let recs = return_sets(&op, &x, &[0.05], &[0], 20_000, Precision::Exact).unwrap();
        let loose = classify(&recs, &Thresholds::default()).unwrap();
        let strict = classify(
            &recs,
            &Thresholds {
                delta_low: 0.5,
                delta_up: 0.5,
                delta_bd: 0.5,
                m_min: 10_000,
                ..Thresholds::default()
            },
        )
        .unwrap();
        assert!(strict.label.rank() <= loose.label.rank());
    }

    #[test]
    fn cubes_are_recurrent_but_not_frequent() {
        let h = 10_000;
        let w = IndexWindow::from_iter_clipped((0..=30).map(|k| k * k * k), h);
        let e = window_evidence(&w, &Thresholds::default());
        assert!(e.predicates.recurrent);
        assert!(!e.predicates.frequent);
        assert!(!Family::PositiveLowerDensity.evaluate(&w, &Thresholds::default()));
    }

    #[test]
    fn periodic_verdict_implies_infinite_family() {
        let op = parse_operator("blockcycle").unwrap();
        let x = parse_vector("e(6)", &op.space()).unwrap();
        let recs = return_sets(&op, &x, &[0.25], &[0], 4000, Precision::Exact).unwrap();
        let f = f_recurrence_check(&recs, Family::Infinite, &Thresholds::default()).unwrap();
        assert!(f.holds);
    }

    #[test]
    fn mixed_records_are_rejected() {
        let op = parse_operator("blockcycle").unwrap();
        let a = return_sets(&op, &parse_vector("e(5)", &op.space()).unwrap(), &[0.1], &[0], 50, Precision::Exact).unwrap();
        let b = return_sets(&op, &parse_vector("e(6)", &op.space()).unwrap(), &[0.2], &[0], 50, Precision::Exact).unwrap();
        let both = [a[0].clone(), b[0].clone()];
        assert!(matches!(classify(&both, &Thresholds::default()), Err(ClassifyError::Inconsistent(_))));
        assert!(matches!(classify(&[], &Thresholds::default()), Err(ClassifyError::EmptyGrid)));
    }
}

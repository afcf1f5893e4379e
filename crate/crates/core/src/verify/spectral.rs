//! Checks built on eigenvalues on the unit circle: finite matrices, diagonal
//! operators, simultaneous returns of rotations, and spans of eigenvectors.

use num_integer::Integer;
use rand::seq::index::sample as pick_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{label_or_escape, verdict_of, Outcome, Sweep, VerifyError};
use crate::classify::RecurrenceLabel;
use crate::families::{ip_star_probe, syndetic_certificate, IndexWindow, IpVerdict};
use crate::operators::{
    apply, distance, eigen_structure, seminorm, DiagonalRule, OperatorSpec, SpaceDescriptor, StateVector,
};
use crate::orbit::return_sets;
use crate::scalar::Scalar;
use crate::verify::CheckOutcome;

/// Largest matrix the criterion check accepts.
pub const MATRIX_DIMENSION_CAP: usize = 16;
/// Allowed `p(Tv − λv) / max(1, p(v))` for a supplied eigenpair.
const EIGENPAIR_TOL: f64 = 1e-9;
/// Random sums of basis vectors added to the diagonal sample.
const DIAGONAL_MIXED_SAMPLES: usize = 3;

pub(crate) fn ip_text(v: &IpVerdict) -> String {
    match v {
        IpVerdict::ArithmeticCertificate(k) => format!("ArithmeticCertificate({k})"),
        IpVerdict::FalsifiedByIpWitness(g) => {
            let g: Vec<String> = g.iter().map(u64::to_string).collect();
            format!("FalsifiedByIpWitness({})", g.join(","))
        }
        IpVerdict::Inconclusive => "Inconclusive".into(),
    }
}

/// Criterion (diagonalizable with unimodular spectrum) against simulation
/// (every basis vector and their sum at least recurrent).
pub fn matrix_recurrence_check(m: &[Vec<Scalar>], sweep: &Sweep, tol: f64) -> Result<CheckOutcome, VerifyError> {
    let n = m.len();
    if n == 0 || n > MATRIX_DIMENSION_CAP {
        return Err(VerifyError::Config(format!(
            "matrix dimension {n} outside 1..={MATRIX_DIMENSION_CAP}"
        )));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(VerifyError::Config("matrix is not square".into()));
    }
    let op = OperatorSpec::Matrix(m.to_vec());
    let lit = op.literal();
    let mut out = Outcome::new("matrix_recurrence", 0)
        .param("operator", &lit)
        .param("tolerance", format!("{tol:?}"))
        .sweep(sweep);
    let report = match eigen_structure(m, tol) {
        Ok(r) => r,
        Err(e) => return Ok(out.skip(e)),
    };
    let criterion = report.diagonalizable && report.all_unimodular;
    let eig: Vec<String> = report
        .entries
        .iter()
        .map(|e| format!("{:.6}{:+.6}i(m={}/{})", e.value.re, e.value.im, e.algebraic, e.geometric))
        .collect();
    out.metric("eigenvalues", eig.join(" "));
    out.metric("diagonalizable", report.diagonalizable);
    out.metric("all_unimodular", report.all_unimodular);
    out.metric("criterion", criterion);

    let space = op.space();
    let mut sample: Vec<StateVector> = (0..n as i64)
        .map(|i| StateVector::unit(space.clone(), i))
        .collect::<Result<_, _>>()?;
    if n > 1 {
        sample.push(StateVector::sparse(space, (0..n as i64).map(|i| (i, Scalar::one())))?);
    }
    let mut simulation = true;
    let mut offender = None;
    let mut labels = Vec::new();
    for x in &sample {
        let (label, _, note) = label_or_escape(&op, x, sweep)?;
        labels.push(label.to_string());
        if let Some(note) = note {
            out.metric(&format!("note.{}", labels.len() - 1), note);
        }
        if label < RecurrenceLabel::Recurrent {
            simulation = false;
            offender.get_or_insert_with(|| x.literal());
        }
    }
    out.metric("labels", labels.join(","));
    out.metric("simulation", simulation);
    let vector = offender.unwrap_or_else(|| sample.last().expect("nonempty").literal());
    Ok(out.decide(
        criterion == simulation,
        &lit,
        &vector,
        format!("criterion {criterion} but simulation {simulation}"),
    ))
}

/// `λ_n` for the first `count` coordinates of a diagonal operator.
fn diagonal_entries(op: &OperatorSpec, count: usize) -> Result<(Vec<(i64, Scalar)>, SpaceDescriptor), VerifyError> {
    let OperatorSpec::Diagonal { rule, space } = op else {
        return Err(VerifyError::Config(format!("{op} is not a diagonal operator")));
    };
    let first = space.first_index();
    let entries = match rule {
        DiagonalRule::List(v) => v
            .iter()
            .take(count)
            .enumerate()
            .map(|(k, l)| (first + k as i64, l.clone()))
            .collect(),
        DiagonalRule::Rule(e) => (0..count as i64)
            .map(|k| Ok((first + k, e.eval(first + k)?)))
            .collect::<Result<Vec<_>, crate::operators::OperatorError>>()?,
    };
    Ok((entries, space.clone()))
}

/// Criterion (sampled `|λ_n| = 1`) against simulation (finitely supported
/// sample vectors reach at least uniform recurrence). When the criterion
/// holds, no sample window may be falsified as IP*.
pub fn diagonal_recurrence_check(
    op: &OperatorSpec,
    sample_size: usize,
    sweep: &Sweep,
    tol: f64,
    seed: u64,
) -> Result<CheckOutcome, VerifyError> {
    if sample_size == 0 {
        return Err(VerifyError::Config("sample size must be positive".into()));
    }
    let lit = op.literal();
    let mut out = Outcome::new("diagonal_recurrence", seed)
        .param("operator", &lit)
        .param("sample_size", sample_size)
        .param("tolerance", format!("{tol:?}"))
        .sweep(sweep);
    let (entries, space) = diagonal_entries(op, sample_size)?;
    let criterion = entries.iter().all(|(_, l)| (l.abs() - 1.0).abs() <= tol);
    let worst = entries.iter().map(|(_, l)| (l.abs() - 1.0).abs()).fold(0.0, f64::max);
    out.metric("sampled", entries.len());
    out.metric("max_modulus_defect", format!("{worst:e}"));
    out.metric("criterion", criterion);

    let mut sample: Vec<StateVector> = entries
        .iter()
        .map(|(i, _)| StateVector::unit(space.clone(), *i))
        .collect::<Result<_, _>>()?;
    let idx: Vec<i64> = entries.iter().map(|(i, _)| *i).collect();
    if idx.len() > 1 {
        let head = &idx[..idx.len().min(3)];
        sample.push(StateVector::sparse(space.clone(), head.iter().map(|&i| (i, Scalar::one())))?);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DIAGONAL_MIXED_SAMPLES {
            let k = rng.random_range(2..=3usize);
            let picks = pick_indices(&mut rng, idx.len(), k.min(idx.len()));
            let coords: Vec<(i64, Scalar)> = {
                let mut v: Vec<i64> = picks.iter().map(|p| idx[p]).collect();
                v.sort_unstable();
                v.into_iter().map(|i| (i, Scalar::one())).collect()
            };
            sample.push(StateVector::sparse(space.clone(), coords)?);
        }
    }

    let mut simulation = true;
    let mut falsified = None;
    let mut offender = None;
    let mut labels = Vec::new();
    for x in &sample {
        let (label, verdict, note) = label_or_escape(op, x, sweep)?;
        labels.push(label.to_string());
        if let Some(note) = note {
            out.metric(&format!("note.{}", labels.len() - 1), note);
        }
        if !label.at_least_uniform() {
            simulation = false;
            offender.get_or_insert_with(|| x.literal());
        }
        let hit = verdict.iter().flat_map(|v| &v.evidence).find_map(|e| match &e.evidence.ip.verdict {
            IpVerdict::FalsifiedByIpWitness(_) => Some(e.epsilon),
            _ => None,
        });
        if let Some(eps) = hit {
            falsified.get_or_insert((x.literal(), eps));
        }
    }
    out.metric("labels", labels.join(","));
    out.metric("simulation", simulation);
    out.metric("ip_falsified", falsified.is_some());
    if criterion != simulation {
        let v = offender.unwrap_or_else(|| sample[0].literal());
        return Ok(out.fail(&lit, &v, format!("criterion {criterion} but simulation {simulation}")));
    }
    if criterion {
        if let Some((v, eps)) = falsified {
            return Ok(out.fail(&lit, &v, format!("window at eps={eps:?} is avoided by an IP set")));
        }
    }
    Ok(out.pass())
}

/// `{n ≤ N : max_j |λ_jⁿ − 1| < ε}`.
pub fn kronecker_window(lambdas: &[Scalar], epsilon: f64, horizon: u64) -> IndexWindow {
    IndexWindow::from_predicate(horizon, |n| {
        n == 0 || lambdas.iter().all(|l| l.pow_distance_to_one(n) < epsilon)
    })
}

fn check_unimodular(lambdas: &[Scalar], tol: f64) -> Result<(), VerifyError> {
    if let Some(l) = lambdas.iter().find(|l| (l.abs() - 1.0).abs() > tol) {
        return Err(VerifyError::Config(format!("{} is not unimodular", l.literal())));
    }
    Ok(())
}

/// Simultaneous returns of unimodular scalars must be syndetic and never
/// avoided by an IP set.
pub fn kronecker_check(
    lambdas: &[Scalar],
    epsilon: f64,
    horizon: u64,
    ip_budget: u64,
    tol: f64,
) -> Result<CheckOutcome, VerifyError> {
    if lambdas.is_empty() {
        return Err(VerifyError::Config("no scalars given".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) || horizon == 0 {
        return Err(VerifyError::Config("tolerance and horizon must be positive".into()));
    }
    check_unimodular(lambdas, tol)?;
    let lits: Vec<String> = lambdas.iter().map(Scalar::literal).collect();
    let operator = format!("diag([{}], space=c0)", lits.join(", "));
    let vector = format!("vec({})", vec!["1"; lambdas.len()].join(", "));
    let mut out = Outcome::new("kronecker", 0)
        .param("lambdas", lits.join(","))
        .param("epsilon", format!("{epsilon:?}"))
        .param("horizon", horizon)
        .param("ip_budget", ip_budget);

    let a = kronecker_window(lambdas, epsilon, horizon);
    let syn = syndetic_certificate(&a);
    let ip = ip_star_probe(&a, ip_budget);
    out.metric("returns", a.len());
    match &syn {
        Ok(c) => out.metric("max_gap", c.max_gap),
        Err(f) => out.metric("max_gap", f.largest_gap.map_or("none".into(), |g| g.to_string())),
    }
    out.metric("gap_bound", crate::families::syndetic_bound(horizon));
    out.metric("ip", ip_text(&ip.verdict));
    if let Some(d) = root_order(lambdas) {
        out.metric("root_order", d);
    }
    let falsified = matches!(ip.verdict, IpVerdict::FalsifiedByIpWitness(_));
    let detail = match (&syn, falsified) {
        (Err(f), _) => format!(
            "gap {} exceeds the bound {}",
            f.largest_gap.map_or("unbounded".into(), |g| g.to_string()),
            f.bound
        ),
        (Ok(_), true) => format!("window avoided by {}", ip_text(&ip.verdict)),
        _ => String::new(),
    };
    Ok(out.decide(syn.is_ok() && !falsified, &operator, &vector, detail))
}

/// Least common multiple of the denominators when every scalar is an exact root of unity.
fn root_order(lambdas: &[Scalar]) -> Option<i64> {
    lambdas
        .iter()
        .map(|l| l.exact_turn().map(|t| *t.denom()))
        .try_fold(1i64, |acc, d| d.map(|d| acc.lcm(&d)))
}

/// For `x = Σ a_j v_j` with `T v_j = λ_j v_j`: the return window at `ε`
/// contains the simultaneous-return window of the `λ_j` at `ε/S`, where
/// `S = max_i Σ_j |a_j| p_i(v_j)`, and the label is at least uniform.
pub fn span_eigenvector_check(
    op: &OperatorSpec,
    pairs: &[(Scalar, StateVector)],
    coefficients: &[Scalar],
    sweep: &Sweep,
) -> Result<CheckOutcome, VerifyError> {
    if pairs.is_empty() || pairs.len() != coefficients.len() {
        return Err(VerifyError::Config(format!(
            "{} eigenpairs but {} coefficients",
            pairs.len(),
            coefficients.len()
        )));
    }
    let lit = op.literal();
    let space = op.space();
    let pair_text: Vec<String> = pairs.iter().map(|(l, v)| format!("{}:{}", l.literal(), v.literal())).collect();
    let coef_text: Vec<String> = coefficients.iter().map(Scalar::literal).collect();
    let mut out = Outcome::new("span_eigenvector", 0)
        .param("operator", &lit)
        .param("eigenpairs", pair_text.join(";"))
        .param("coefficients", coef_text.join(","))
        .sweep(sweep);

    for (l, v) in pairs {
        let tv = apply(op, v)?;
        let lv = v.combine(l, v, &Scalar::zero())?;
        for &i in &sweep.seminorms {
            let d = distance(&space, i, &tv, &lv)?.approx;
            let size = seminorm(&space, i, v)?.approx.max(1.0);
            if d.is_nan() || d > EIGENPAIR_TOL * size {
                return Ok(out.skip(format!(
                    "T v differs from {} v by {d:e} for v = {}",
                    l.literal(),
                    v.literal()
                )));
            }
        }
    }

    let mut x = pairs[0].1.zero_like();
    for ((_, v), a) in pairs.iter().zip(coefficients) {
        x = x.combine(&Scalar::one(), v, a)?;
    }
    let mut s = 0.0f64;
    for &i in &sweep.seminorms {
        let mut si = 0.0;
        for ((_, v), a) in pairs.iter().zip(coefficients) {
            si += a.abs() * seminorm(&space, i, v)?.approx;
        }
        s = s.max(si);
    }
    out.metric("vector", x.literal());
    out.metric("scale", format!("{s:?}"));
    let lambdas: Vec<Scalar> = pairs.iter().map(|(l, _)| l.clone()).collect();
    let recs = return_sets(op, &x, &sweep.grid, &sweep.seminorms, sweep.horizon, sweep.precision)?;
    let mut contained = true;
    let mut detail = String::new();
    let mut strict = false;
    for r in &recs {
        // a hair inside ε/S so float rounding in the bound cannot manufacture a miss
        let inner = if s > 0.0 { r.epsilon / s * (1.0 - 1e-9) } else { f64::INFINITY };
        let k = kronecker_window(&lambdas, inner, sweep.horizon);
        let ok = k.is_subset_of(&r.window);
        out.metric(&format!("eps={:?}.returns", r.epsilon), r.window.len());
        out.metric(&format!("eps={:?}.kronecker_returns", r.epsilon), k.len());
        strict |= r.window.len() > k.len();
        if !ok && contained {
            contained = false;
            let miss = k.elements().iter().find(|n| !r.window.contains(**n)).copied();
            detail = format!("n = {miss:?} returns for the eigenvalues but not for x at eps={:?}", r.epsilon);
        }
    }
    let verdict = verdict_of(op, &x, sweep)?;
    out.metric("label", verdict.label);
    out.metric("span_inclusion_strict", strict);
    if contained && !verdict.label.at_least_uniform() {
        detail = format!("label {} is below UniformlyRecurrent", verdict.label);
    }
    Ok(out.decide(contained && verdict.label.at_least_uniform(), &lit, &x.literal(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_scalar, parse_vector, DEFAULT_UNIMODULAR_TOL};

    fn m(src: &str) -> Vec<Vec<Scalar>> {
        match parse_operator(src).unwrap() {
            OperatorSpec::Matrix(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn kronecker_fourth_roots() {
        let out = kronecker_check(&[Scalar::imag_unit()], 1.0, 10_000, 8, DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(out.passed(), "{out:?}");
        assert_eq!(out.metric("max_gap"), Some("4"));
        assert_eq!(out.metric("ip"), Some("ArithmeticCertificate(4)"));
        let w = kronecker_window(&[Scalar::imag_unit()], 1.0, 100);
        assert_eq!(w, IndexWindow::residue(4, 0, 100));
    }

    #[test]
    fn kronecker_root_tuple_gives_multiples_of_lcm() {
        let l = [parse_scalar("turn(1/6)").unwrap(), parse_scalar("turn(1/4)").unwrap()];
        let w = kronecker_window(&l, 0.5, 1000);
        assert_eq!(w, IndexWindow::residue(12, 0, 1000));
    }

    #[test]
    fn kronecker_irrational_rotation_is_syndetic() {
        let l = [parse_scalar("cis(2*3.141592653589793*sqrt(2))").unwrap()];
        let out = kronecker_check(&l, 0.1, 100_000, 8, DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(out.passed(), "{out:?}");
    }

    #[test]
    fn kronecker_rejects_non_unimodular() {
        assert!(kronecker_check(&[Scalar::int(2)], 0.5, 10, 8, DEFAULT_UNIMODULAR_TOL).is_err());
    }

    #[test]
    fn matrix_rotation_and_jordan_block() {
        let sweep = Sweep::new(&[0.5, 0.1], 10_000);
        let r = matrix_recurrence_check(&m("matrix([[0, -1], [1, 0]])"), &sweep, DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("criterion"), Some("true"));
        let j = matrix_recurrence_check(&m("matrix([[1, 1], [0, 1]])"), &sweep, DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(j.passed(), "{j:?}");
        assert_eq!(j.metric("criterion"), Some("false"));
        let d = matrix_recurrence_check(&m("matrix([[1.5, 0], [0, 1]])"), &sweep, DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn diagonal_roots_and_expanding_entry() {
        let sweep = Sweep::new(&[0.5, 0.1], 10_000);
        let op = parse_operator("diag(turn(1/2^n))").unwrap();
        let r = diagonal_recurrence_check(&op, 6, &sweep, DEFAULT_UNIMODULAR_TOL, 1).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.metric("labels").unwrap().split(',').all(|l| l.starts_with("Periodic")));

        let op = parse_operator("diag([2, turn(1/3)])").unwrap();
        let r = diagonal_recurrence_check(&op, 2, &sweep, DEFAULT_UNIMODULAR_TOL, 1).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("criterion"), Some("false"));
    }

    #[test]
    fn span_of_rotation_eigenvectors() {
        let op = parse_operator("matrix([[0, -1], [1, 0]])").unwrap();
        let sp = op.space();
        let pairs = vec![
            (Scalar::imag_unit(), parse_vector("vec(1, -i)", &sp).unwrap()),
            (-&Scalar::imag_unit(), parse_vector("vec(1, i)", &sp).unwrap()),
        ];
        let sweep = Sweep::new(&[0.5, 0.1], 5000);
        let r = span_eigenvector_check(&op, &pairs, &[Scalar::one(), Scalar::one()], &sweep).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("label"), Some("Periodic(4)"));

        let bad = vec![(Scalar::one(), parse_vector("vec(1, 0)", &sp).unwrap())];
        let r = span_eigenvector_check(&op, &bad, &[Scalar::one()], &sweep).unwrap();
        assert!(matches!(r.status, crate::verify::CheckStatus::Skipped(_)));
    }

    #[test]
    fn span_fixed_point() {
        let op = parse_operator("diag([1, turn(1/3)])").unwrap();
        let e1 = StateVector::unit(op.space(), 1).unwrap();
        let sweep = Sweep::new(&[0.5], 2000);
        let r = span_eigenvector_check(&op, &[(Scalar::one(), e1)], &[Scalar::int(3)], &sweep).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.metric("label"), Some("Periodic(1)"));
    }
}

//! Orbit iteration, return sets and boundedness probes.

mod growth;
mod probes;
mod record;

use std::collections::HashMap;

use thiserror::Error;

pub use growth::{growth_schedule, growth_verdict, orbit_growth, GrowthCurve, GrowthVerdict};
pub use probes::{
    power_bounded_probe, totally_bounded_probe, CoveringCount, PowerBoundVerdict, DEFAULT_POWER_CAP,
};
pub use record::ReturnSetRecord;

use crate::families::IndexWindow;
use crate::operators::{apply, apply_n, within_ball, OperatorError, OperatorSpec, Representation, StateVector};
use crate::scalar::Scalar;

/// Exact states remembered for cycle detection.
pub const STATE_TABLE_CAP: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("invalid orbit request: {0}")]
    Config(String),
}

/// Arithmetic used along an orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    /// Parameters and coordinates as given; rationals and roots of unity stay exact.
    #[default]
    Exact,
    /// Everything in f64, rounded to this many significant digits after each step.
    Float(u32),
}

impl Precision {
    pub fn literal(&self) -> String {
        match self {
            Precision::Exact => "exact".into(),
            Precision::Float(d) => format!("float:{d}"),
        }
    }
}

/// `T^{m + r} x = T^{m + r + period} x` for every `r ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrbitPeriod {
    pub preperiod: u64,
    pub period: u64,
}

impl OrbitPeriod {
    pub fn is_pure(&self) -> bool {
        self.preperiod == 0
    }
}

/// Sequential orbit with checkpoints every `⌈√N⌉` steps.
pub struct Orbit {
    op: OperatorSpec,
    precision: Precision,
    state: StateVector,
    n: u64,
    interval: u64,
    checkpoints: Vec<(u64, StateVector)>,
}

impl Orbit {
    pub fn new(op: &OperatorSpec, x: &StateVector, precision: Precision, horizon: u64) -> Self {
        let (op, state) = match precision {
            Precision::Exact => (op.clone(), x.clone()),
            Precision::Float(d) => (op.to_float(), round_state(&x.to_float(), d)),
        };
        Orbit {
            op,
            precision,
            checkpoints: vec![(0, state.clone())],
            state,
            n: 0,
            interval: (horizon as f64).sqrt().ceil().max(1.0) as u64,
        }
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    /// Starting vector in the arithmetic of the orbit.
    pub fn start(&self) -> &StateVector {
        &self.checkpoints[0].1
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn current(&self) -> &StateVector {
        &self.state
    }

    pub fn step(&mut self) -> Result<&StateVector, OperatorError> {
        self.state = advance(&self.op, &self.state, self.precision)?;
        self.n += 1;
        if self.n.is_multiple_of(self.interval) {
            self.checkpoints.push((self.n, self.state.clone()));
        }
        Ok(&self.state)
    }

    /// `T^m x`, replayed from the nearest checkpoint when `m` is behind.
    pub fn state_at(&mut self, m: u64) -> Result<StateVector, OperatorError> {
        if matches!(self.op, OperatorSpec::RowRotation) {
            return apply_n(&self.op, self.start(), m);
        }
        if m >= self.n {
            while self.n < m {
                self.step()?;
            }
            return Ok(self.state.clone());
        }
        let (c, base) = self
            .checkpoints
            .iter()
            .rev()
            .find(|(c, _)| *c <= m)
            .cloned()
            .expect("checkpoint at 0");
        let mut y = base;
        for _ in c..m {
            y = advance(&self.op, &y, self.precision)?;
        }
        Ok(y)
    }
}

/// One step of `op`. In float mode a power rounds after every factor, so
/// `(T^p)^n x` and `T^{pn} x` produce the same floats.
fn advance(op: &OperatorSpec, x: &StateVector, precision: Precision) -> Result<StateVector, OperatorError> {
    match (precision, op) {
        (Precision::Exact, _) => apply(op, x),
        (Precision::Float(_), OperatorSpec::Power { base, p }) => {
            let mut y = x.clone();
            for _ in 0..*p {
                y = advance(base, &y, precision)?;
            }
            Ok(y)
        }
        (Precision::Float(d), _) => Ok(round_state(&apply(op, x)?, d)),
    }
}

fn round_state(x: &StateVector, digits: u32) -> StateVector {
    if digits >= 17 {
        return x.clone();
    }
    match &x.repr {
        Representation::Sparse(m) => {
            let coords = m.iter().map(|(&i, v)| {
                let z = v.to_c64();
                (i, Scalar::float(round_sig(z.re, digits), round_sig(z.im, digits)))
            });
            StateVector::sparse(x.space.clone(), coords).expect("indices already valid")
        }
        Representation::RowBlocks(_) => x.clone(),
    }
}

fn round_sig(v: f64, digits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1) as usize, v)
        .parse()
        .unwrap_or(v)
}

fn validate(grid: &[f64], seminorms: &[u64], horizon: u64, op: &OperatorSpec, x: &StateVector) -> Result<(), OrbitError> {
    if horizon == 0 {
        return Err(OrbitError::Config("horizon must be at least 1".into()));
    }
    if grid.is_empty() {
        return Err(OrbitError::Config("empty tolerance grid".into()));
    }
    if let Some(e) = grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(OrbitError::Config(format!("tolerance {e} is not a positive number")));
    }
    if seminorms.is_empty() {
        return Err(OrbitError::Config("no seminorm indices given".into()));
    }
    let space = op.space();
    if x.space != space {
        return Err(OperatorError::Space(format!("{op} acts on {space}, vector lives in {}", x.space)).into());
    }
    for &n in seminorms {
        space.check_seminorm(n)?;
    }
    Ok(())
}

/// `{n ≤ N : max_{i ∈ seminorms} p_i(Tⁿx − x) < ε}`.
pub fn return_set(
    op: &OperatorSpec,
    x: &StateVector,
    epsilon: f64,
    seminorms: &[u64],
    horizon: u64,
) -> Result<ReturnSetRecord, OrbitError> {
    Ok(return_sets(op, x, &[epsilon], seminorms, horizon, Precision::Exact)?.remove(0))
}

/// One orbit pass for a whole tolerance grid; records come back in grid order.
pub fn return_sets(
    op: &OperatorSpec,
    x: &StateVector,
    grid: &[f64],
    seminorms: &[u64],
    horizon: u64,
    precision: Precision,
) -> Result<Vec<ReturnSetRecord>, OrbitError> {
    validate(grid, seminorms, horizon, op, x)?;
    let mut orbit = Orbit::new(op, x, precision, horizon);
    let x0 = orbit.start().clone();
    let space = op.space();
    let track = orbit.operator().is_exact() && x0.is_exact();

    let mut members: Vec<Vec<bool>> = vec![Vec::with_capacity(horizon.min(1 << 20) as usize + 1); grid.len()];
    let mut seen: HashMap<u64, Vec<(u64, StateVector)>> = HashMap::new();
    let mut period = None;
    let mut n = 0u64;
    loop {
        let y = orbit.current();
        if track {
            if let Some(fp) = y.exact_fingerprint() {
                let hit = seen.get(&fp).and_then(|v| v.iter().find(|(_, s)| s == y).map(|(m, _)| *m));
                if let Some(m) = hit {
                    period = Some(OrbitPeriod {
                        preperiod: m,
                        period: n - m,
                    });
                    break;
                }
                if n < STATE_TABLE_CAP {
                    seen.entry(fp).or_default().push((n, y.clone()));
                }
            }
        }
        for (i, &eps) in grid.iter().enumerate() {
            let inside = n == 0 || within_ball(&space, seminorms, y, &x0, eps)?;
            members[i].push(inside);
        }
        if n == horizon {
            break;
        }
        orbit.step()?;
        n += 1;
    }

    let windows = members.into_iter().map(|m| match period {
        Some(p) => IndexWindow::from_predicate(horizon, |k| {
            let idx = if k < p.preperiod + p.period {
                k
            } else {
                p.preperiod + (k - p.preperiod) % p.period
            };
            m[idx as usize]
        }),
        None => IndexWindow::from_predicate(horizon, |k| m[k as usize]),
    });
    Ok(windows
        .zip(grid)
        .map(|(window, &epsilon)| ReturnSetRecord {
            operator: op.clone(),
            vector_id: x.literal(),
            epsilon,
            seminorms: seminorms.to_vec(),
            horizon,
            window,
            exact_period: period,
            precision,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_vector, RowBlocks, SpaceDescriptor};

    #[test]
    fn block_cycle_unit_vector_returns_every_four_steps() {
        let op = parse_operator("blockcycle").unwrap();
        let x = StateVector::unit(SpaceDescriptor::l2(), 5).unwrap();
        let r = return_set(&op, &x, 0.1, &[0], 100).unwrap();
        assert_eq!(r.window, IndexWindow::residue(4, 0, 100));
        assert_eq!(r.exact_period, Some(OrbitPeriod { preperiod: 0, period: 4 }));
    }

    #[test]
    fn special_row_vector_returns_on_dyadic_multiples() {
        let op = parse_operator("rowrotation").unwrap();
        let x = StateVector::rows(RowBlocks::special());
        let l = 4u32;
        let eps = 1.5 / f64::from(1u32 << l);
        let n_max = 10u64 << l;
        let r = return_set(&op, &x, eps, &[0, 1, 3], n_max).unwrap();
        assert!(IndexWindow::residue(1 << l, 0, n_max).is_subset_of(&r.window));
        assert_eq!(r.exact_period, None);
    }

    #[test]
    fn huge_tolerance_gives_everything() {
        let op = parse_operator("matrix([[0, -1], [1, 0]])").unwrap();
        let x = parse_vector("vec(1, 2)", &op.space()).unwrap();
        let r = return_set(&op, &x, 100.0, &[0], 50).unwrap();
        assert_eq!(r.window, IndexWindow::full(50));
    }

    #[test]
    fn jordan_block_only_returns_at_zero() {
        let op = parse_operator("matrix([[1, 1], [0, 1]])").unwrap();
        let x = parse_vector("vec(0, 1)", &op.space()).unwrap();
        let r = return_set(&op, &x, 0.5, &[0], 200).unwrap();
        assert_eq!(r.window.elements(), &[0]);
    }

    #[test]
    fn float_precision_flags_underflow() {
        let op = parse_operator("blockcycle").unwrap();
        let x = StateVector::unit(SpaceDescriptor::l2(), (1 << 12) - 1).unwrap();
        let err = return_sets(&op, &x, &[0.1], &[0], 10, Precision::Float(16)).unwrap_err();
        assert!(err.to_string().contains("exact"), "{err}");
        let ok = return_sets(&op, &x, &[0.1], &[0], 10, Precision::Exact).unwrap();
        assert_eq!(ok[0].window.elements(), &[0]);
    }

    #[test]
    fn eventually_periodic_orbit() {
        // nilpotent part dies after one step, then the orbit is fixed
        let op = parse_operator("matrix([[1, 0], [0, 0]])").unwrap();
        let x = parse_vector("vec(1, 1)", &op.space()).unwrap();
        let r = return_set(&op, &x, 0.5, &[0], 30).unwrap();
        assert_eq!(r.exact_period, Some(OrbitPeriod { preperiod: 1, period: 1 }));
        assert_eq!(r.window.elements(), &[0]);
    }

    #[test]
    fn checkpoints_replay() {
        let op = parse_operator("diag([turn(1/7), 1/2])").unwrap();
        let x = parse_vector("vec(1, 1)", &op.space()).unwrap();
        let mut o = Orbit::new(&op, &x, Precision::Exact, 100);
        let late = o.state_at(37).unwrap();
        let early = o.state_at(12).unwrap();
        assert_eq!(early, apply_n(&op, &x, 12).unwrap());
        assert_eq!(late, apply_n(&op, &x, 37).unwrap());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rounding_keeps_requested_digits() {
        assert_eq!(round_sig(std::f64::consts::PI, 3), 3.14);
        assert_eq!(round_sig(-0.000123456, 2), -0.00012);
    }
}

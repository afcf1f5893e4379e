use super::{Orbit, OrbitError, Precision};
use crate::operators::{distance, seminorm, OperatorSpec, StateVector};

/// Ratio `p_i(Tⁿx)/p_i(x)` above which a sample counts as unbounded.
pub const DEFAULT_POWER_CAP: f64 = 1e3;
/// Greedy nets stop growing here and report saturation.
const NET_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum PowerBoundVerdict {
    /// Largest observed ratio; a statement about the sample only.
    EquiboundedOnSample(f64),
    Violation { n: u64, vector: usize, ratio: f64 },
}

/// Ratios `max_i p_i(Tⁿx) / max_i p_i(x)` over the sample and `n ≤ N`.
pub fn power_bounded_probe(
    op: &OperatorSpec,
    sample: &[StateVector],
    seminorms: &[u64],
    horizon: u64,
    cap: f64,
    precision: Precision,
) -> Result<PowerBoundVerdict, OrbitError> {
    if sample.is_empty() {
        return Err(OrbitError::Config("empty sample".into()));
    }
    if seminorms.is_empty() {
        return Err(OrbitError::Config("no seminorm indices given".into()));
    }
    let space = op.space();
    let size = |y: &StateVector| -> Result<f64, OrbitError> {
        let mut m = 0.0f64;
        for &i in seminorms {
            m = m.max(seminorm(&space, i, y)?.approx);
        }
        Ok(m)
    };
    let mut sup = 0.0f64;
    for (k, x) in sample.iter().enumerate() {
        let base = size(x)?;
        if base == 0.0 {
            continue;
        }
        let mut orbit = Orbit::new(op, x, precision, horizon);
        for n in 1..=horizon {
            let r = size(orbit.step()?)? / base;
            if r > cap {
                return Ok(PowerBoundVerdict::Violation { n, vector: k, ratio: r });
            }
            sup = sup.max(r);
        }
    }
    Ok(PowerBoundVerdict::EquiboundedOnSample(sup.max(1.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringCount {
    pub epsilon: f64,
    /// Greedy ε-net size over `n ≤ N/2`.
    pub at_half: usize,
    /// Same over `n ≤ N`.
    pub at_full: usize,
    /// The net hit its size cap; the counts are lower bounds.
    pub saturated: bool,
}

impl CoveringCount {
    /// Doubling the horizon left the net unchanged.
    pub fn is_flat(&self) -> bool {
        !self.saturated && self.at_half == self.at_full
    }
}

/// Greedy ε-nets of `{Tⁿx : n ≤ N}` under `max_i p_i`, one per tolerance.
///
/// Distances are taken in floating point: the net is evidence, not a certificate.
pub fn totally_bounded_probe(
    op: &OperatorSpec,
    x: &StateVector,
    seminorms: &[u64],
    horizon: u64,
    grid: &[f64],
) -> Result<Vec<CoveringCount>, OrbitError> {
    if grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(OrbitError::Config("tolerances must be positive".into()));
    }
    let space = op.space();
    let mut orbit = Orbit::new(op, x, Precision::Exact, horizon);
    let mut nets: Vec<Vec<StateVector>> = vec![Vec::new(); grid.len()];
    let mut half = vec![0usize; grid.len()];
    let mut saturated = vec![false; grid.len()];
    for n in 0..=horizon {
        let y = orbit.current().to_float();
        for (i, &eps) in grid.iter().enumerate() {
            if saturated[i] {
                continue;
            }
            let mut covered = false;
            for c in &nets[i] {
                let mut d = 0.0f64;
                for &s in seminorms {
                    d = d.max(distance(&space, s, &y, c)?.approx);
                }
                if d < eps {
                    covered = true;
                    break;
                }
            }
            if !covered {
                nets[i].push(y.clone());
                saturated[i] = nets[i].len() >= NET_CAP;
            }
        }
        if n == horizon / 2 {
            for (h, net) in half.iter_mut().zip(&nets) {
                *h = net.len();
            }
        }
        if n < horizon {
            orbit.step()?;
        }
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| CoveringCount {
            epsilon,
            at_half: half[i],
            at_full: nets[i].len(),
            saturated: saturated[i],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, parse_vector, SpaceDescriptor};

    #[test]
    fn unimodular_diagonal_is_equibounded() {
        let op = parse_operator("diag([turn(1/3), cis(1), -1])").unwrap();
        let sample: Vec<_> = (1..=3).map(|k| StateVector::unit(op.space(), k).unwrap()).collect();
        let v = power_bounded_probe(&op, &sample, &[0], 500, DEFAULT_POWER_CAP, Precision::Exact).unwrap();
        match v {
            PowerBoundVerdict::EquiboundedOnSample(m) => assert!((m - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jordan_and_block_cycle_violate() {
        let op = parse_operator("matrix([[1, 1], [0, 1]])").unwrap();
        let x = parse_vector("vec(0, 1)", &op.space()).unwrap();
        let v = power_bounded_probe(&op, &[x], &[0], 10_000, DEFAULT_POWER_CAP, Precision::Exact).unwrap();
        assert!(matches!(v, PowerBoundVerdict::Violation { .. }));

        let op = parse_operator("blockcycle").unwrap();
        let sample: Vec<_> = (1..=31).map(|k| StateVector::unit(SpaceDescriptor::l2(), k).unwrap()).collect();
        let v = power_bounded_probe(&op, &sample, &[0], 64, DEFAULT_POWER_CAP, Precision::Exact).unwrap();
        assert!(matches!(v, PowerBoundVerdict::Violation { .. }), "{v:?}");
    }

    #[test]
    fn finite_orbit_has_flat_net() {
        let op = parse_operator("diag([turn(1/5)])").unwrap();
        let x = StateVector::unit(op.space(), 1).unwrap();
        let c = totally_bounded_probe(&op, &x, &[0], 400, &[0.1]).unwrap();
        assert_eq!(c[0].at_full, 5);
        assert!(c[0].is_flat());
    }

    #[test]
    fn irrational_circle_net_matches_arc_count() {
        let op = parse_operator("diag([cis(1)])").unwrap();
        let x = StateVector::unit(op.space(), 1).unwrap();
        let eps = 0.1;
        let c = totally_bounded_probe(&op, &x, &[0], 20_000, &[eps]).unwrap();
        let arcs = (std::f64::consts::PI / eps).ceil() as usize;
        assert!(c[0].at_full >= arcs / 2 && c[0].at_full <= 2 * arcs, "{:?}", c[0]);
        assert!(c[0].is_flat(), "{:?}", c[0]);
    }

    #[test]
    fn jordan_net_keeps_growing() {
        let op = parse_operator("matrix([[1, 1], [0, 1]])").unwrap();
        let x = parse_vector("vec(0, 1)", &op.space()).unwrap();
        let c = totally_bounded_probe(&op, &x, &[0], 200, &[0.5]).unwrap();
        assert!(c[0].at_full > c[0].at_half);
    }
}

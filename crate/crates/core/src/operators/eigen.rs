use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::OperatorError;
use crate::scalar::Scalar;

/// How far from the unit circle an eigenvalue may sit and still count as unimodular.
pub const DEFAULT_UNIMODULAR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenEntry {
    pub value: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub entries: Vec<EigenEntry>,
    pub diagonalizable: bool,
    pub all_unimodular: bool,
    /// Clustering and rank threshold actually used.
    pub tolerance: f64,
}

impl EigenReport {
    pub fn spectral_radius(&self) -> f64 {
        self.entries.iter().map(|e| e.value.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues with multiplicities, from a complex Schur form.
pub fn eigen_structure(a: &[Vec<Scalar>], unimodular_tol: f64) -> Result<EigenReport, OperatorError> {
    let n = a.len();
    if n == 0 {
        return Ok(EigenReport {
            entries: Vec::new(),
            diagonalizable: true,
            all_unimodular: true,
            tolerance: 0.0,
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j].to_c64());
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-7 * scale;
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| OperatorError::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let diag: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in diag {
        // defective eigenvalues split by about tol^(1/k) under rounding, so cluster loosely
        match clusters.iter_mut().find(|(c, _)| (*c - z).norm() <= tol.sqrt()) {
            Some((c, k)) => {
                // running mean keeps the representative centered
                *c = (*c * *k as f64 + z) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => clusters.push((z, 1)),
        }
    }

    let mut entries = Vec::with_capacity(clusters.len());
    for (mu, algebraic) in clusters {
        let shifted = &m - DMatrix::identity(n, n) * mu;
        let sv = shifted.svd(false, false).singular_values;
        let rank = sv.iter().filter(|&&s| s > tol).count();
        entries.push(EigenEntry {
            value: mu,
            algebraic,
            geometric: (n - rank).clamp(1, algebraic),
        });
    }
    entries.sort_by(|x, y| {
        (x.value.arg(), x.value.norm())
            .partial_cmp(&(y.value.arg(), y.value.norm()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let diagonalizable = entries.iter().all(|e| e.algebraic == e.geometric);
    let all_unimodular = entries.iter().all(|e| (e.value.norm() - 1.0).abs() <= unimodular_tol);
    Ok(EigenReport {
        entries,
        diagonalizable,
        all_unimodular,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| Scalar::int(v)).collect()).collect()
    }

    #[test]
    fn rotation_is_unimodular_and_diagonalizable() {
        let r = eigen_structure(&mat(&[&[0, -1], &[1, 0]]), DEFAULT_UNIMODULAR_TOL).unwrap();
        assert_eq!(r.entries.len(), 2);
        assert!(r.diagonalizable && r.all_unimodular);
    }

    #[test]
    fn jordan_block_is_not_diagonalizable() {
        let r = eigen_structure(&mat(&[&[1, 1], &[0, 1]]), DEFAULT_UNIMODULAR_TOL).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].algebraic, 2);
        assert_eq!(r.entries[0].geometric, 1);
        assert!(!r.diagonalizable);
        assert!(r.all_unimodular);
    }

    #[test]
    fn repeated_but_diagonal() {
        let r = eigen_structure(&mat(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 1]]), DEFAULT_UNIMODULAR_TOL).unwrap();
        assert!(r.diagonalizable);
        assert!(!r.all_unimodular);
        assert_eq!(r.spectral_radius(), 2.0);
    }
}

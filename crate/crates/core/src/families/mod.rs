//! Subsets of ℕ₀ observed on a finite window.
//!
//! An [`IndexWindow`] is the finite-scale stand-in for a return set: the
//! elements of `A ∩ [0, H]` together with the horizon `H` on which membership
//! was decided. Everything in this module is a pure function of such windows.

mod bitset;
mod cusp;
mod density;
mod format;
mod ip;
mod syndetic;

pub(crate) use bitset::BitSet;
pub use cusp::{contract, cusp_transform, dilate, CuspInstance, IndexPredicate};
pub use density::{default_schedule, density_report, DensityReport};
pub use format::parse_window_expr;
pub use ip::{
    arithmetic_certificate, ip_generate, ip_star_probe, ip_star_probe_with, IpProbeResult,
    IpVerdict,
};
pub use syndetic::{syndetic_bound, syndetic_certificate, SyndeticCertificate, SyndeticFailure};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate window: horizon is 0")]
    DegenerateWindow,
    #[error("elements must be strictly increasing (violated at position {0})")]
    NotIncreasing(usize),
    #[error("element {element} exceeds horizon {horizon}")]
    OutOfHorizon { element: u64, horizon: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

/// `A ∩ [0, H]` with its horizon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexWindow {
    elements: Vec<u64>,
    horizon: u64,
}

impl IndexWindow {
    pub fn new(elements: Vec<u64>, horizon: u64) -> Result<Self, FamilyError> {
        if let Some(i) = elements.windows(2).position(|w| w[0] >= w[1]) {
            return Err(FamilyError::NotIncreasing(i + 1));
        }
        if let Some(&last) = elements.last() {
            if last > horizon {
                return Err(FamilyError::OutOfHorizon {
                    element: last,
                    horizon,
                });
            }
        }
        Ok(IndexWindow { elements, horizon })
    }

    /// Sorts, deduplicates and drops anything beyond the horizon.
    pub fn from_iter_clipped<I: IntoIterator<Item = u64>>(items: I, horizon: u64) -> Self {
        let mut elements: Vec<u64> = items.into_iter().filter(|&n| n <= horizon).collect();
        elements.sort_unstable();
        elements.dedup();
        IndexWindow { elements, horizon }
    }

    pub fn from_predicate(horizon: u64, mut f: impl FnMut(u64) -> bool) -> Self {
        IndexWindow {
            elements: (0..=horizon).filter(|&n| f(n)).collect(),
            horizon,
        }
    }

    pub fn full(horizon: u64) -> Self {
        Self::from_predicate(horizon, |_| true)
    }

    pub fn empty(horizon: u64) -> Self {
        IndexWindow {
            elements: Vec::new(),
            horizon,
        }
    }

    /// `kℕ₀ ∩ [0, H]` shifted by `r`.
    pub fn residue(modulus: u64, r: u64, horizon: u64) -> Self {
        assert!(modulus >= 1);
        IndexWindow {
            elements: (0..)
                .map(|j| r + j * modulus)
                .take_while(|&n| n <= horizon)
                .collect(),
            horizon,
        }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<u64> {
        self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn first(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    pub fn last(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    /// `card(A ∩ [a, b])`.
    pub fn count_in(&self, a: u64, b: u64) -> usize {
        if a > b {
            return 0;
        }
        let lo = self.elements.partition_point(|&x| x < a);
        let hi = self.elements.partition_point(|&x| x <= b);
        hi - lo
    }

    /// The same set observed on a shorter window.
    pub fn truncate(&self, horizon: u64) -> Self {
        let h = horizon.min(self.horizon);
        IndexWindow {
            elements: self.elements.iter().copied().filter(|&n| n <= h).collect(),
            horizon: h,
        }
    }

    pub fn is_subset_of(&self, other: &IndexWindow) -> bool {
        self.elements.iter().all(|&n| other.contains(n))
    }

    /// `A + m` on the window `[0, H + m]`.
    pub fn translate(&self, m: u64) -> Self {
        IndexWindow {
            elements: self.elements.iter().map(|&n| n + m).collect(),
            horizon: self.horizon + m,
        }
    }

    pub fn union(&self, other: &IndexWindow) -> Self {
        let h = self.horizon.max(other.horizon);
        Self::from_iter_clipped(
            self.elements.iter().chain(other.elements.iter()).copied(),
            h,
        )
    }

    pub(crate) fn bitset(&self) -> BitSet {
        BitSet::from_sorted(&self.elements, self.horizon as usize + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(
            IndexWindow::new(vec![1, 3, 3], 10),
            Err(FamilyError::NotIncreasing(2))
        );
        assert_eq!(
            IndexWindow::new(vec![1, 11], 10),
            Err(FamilyError::OutOfHorizon {
                element: 11,
                horizon: 10
            })
        );
    }

    #[test]
    fn counting() {
        let a = IndexWindow::residue(3, 0, 30);
        assert_eq!(a.count_in(0, 30), 11);
        assert_eq!(a.count_in(1, 5), 1);
        assert_eq!(a.count_in(7, 5), 0);
        assert_eq!(a.truncate(10).elements(), &[0, 3, 6, 9]);
    }
}

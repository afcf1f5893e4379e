use super::IndexWindow;

/// Gap certificate for a window.
///
/// The leading gap is measured from a virtual element at 0, so a set whose
/// first element is `a` has a leading gap of `a`. The trailing stretch
/// `H − last` is censored and reported on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndeticCertificate {
    pub max_gap: u64,
    pub trailing_gap: u64,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndeticFailure {
    /// `None` for an empty window.
    pub largest_gap: Option<u64>,
    pub trailing_gap: u64,
    pub bound: u64,
}

/// Largest gap a finite window may show and still count as bounded-gap:
/// `max(⌊√H⌋, 1)`. A gap beyond it leaves fewer than `√H` gap lengths of
/// room on the window, which no finite observation can tell from unbounded.
pub fn syndetic_bound(horizon: u64) -> u64 {
    horizon.isqrt().max(1)
}

/// Succeeds when every interior gap and the censored trailing stretch stay
/// within [`syndetic_bound`]. Adding elements never breaks a certificate.
pub fn syndetic_certificate(a: &IndexWindow) -> Result<SyndeticCertificate, SyndeticFailure> {
    let bound = syndetic_bound(a.horizon());
    let Some(last) = a.last() else {
        return Err(SyndeticFailure {
            largest_gap: None,
            trailing_gap: a.horizon(),
            bound,
        });
    };
    let leading = a.first().unwrap_or(0);
    let max_gap = a
        .elements()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(leading, u64::max);
    let trailing_gap = a.horizon() - last;
    if max_gap <= bound && trailing_gap <= bound {
        Ok(SyndeticCertificate {
            max_gap,
            trailing_gap,
            bound,
        })
    } else {
        Err(SyndeticFailure {
            largest_gap: Some(max_gap),
            trailing_gap,
            bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiples_of_three() {
        let c = syndetic_certificate(&IndexWindow::residue(3, 0, 10_000)).unwrap();
        assert_eq!(c.max_gap, 3);
        assert_eq!(c.trailing_gap, 1);
    }

    #[test]
    fn powers_of_two_fail() {
        let a = IndexWindow::from_iter_clipped((0..20).map(|j| 1u64 << j), 10_000);
        let f = syndetic_certificate(&a).unwrap_err();
        assert_eq!(f.largest_gap, Some(4096));
    }

    #[test]
    fn empty_has_no_certificate() {
        let f = syndetic_certificate(&IndexWindow::empty(10)).unwrap_err();
        assert_eq!(f.largest_gap, None);
    }

    #[test]
    fn long_trailing_stretch_fails() {
        let a = IndexWindow::from_iter_clipped(0..=50, 10_000);
        assert!(syndetic_certificate(&a).is_err());
    }
}

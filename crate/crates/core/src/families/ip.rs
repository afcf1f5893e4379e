use super::{BitSet, FamilyError, IndexWindow};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpVerdict {
    /// `k·ℕ₀ ∩ [0, H] ⊆ A`.
    ArithmeticCertificate(u64),
    /// Every finite sum of distinct generators that lies in `[0, H]` avoids `A`.
    FalsifiedByIpWitness(Vec<u64>),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpProbeResult {
    pub verdict: IpVerdict,
    pub budget_used: u64,
}

/// Sums of at most `depth` distinct generators, kept when `≤ H`.
pub fn ip_generate(generators: &[u64], depth: usize, horizon: u64) -> Result<IndexWindow, FamilyError> {
    if generators.is_empty() {
        return Err(FamilyError::Config("no generators".into()));
    }
    if depth == 0 {
        return Err(FamilyError::Config("depth must be at least 1".into()));
    }
    if generators[0] == 0 {
        return Err(FamilyError::Config("generators must be positive".into()));
    }
    if let Some(i) = generators.windows(2).position(|w| w[0] >= w[1]) {
        return Err(FamilyError::NotIncreasing(i + 1));
    }
    let len = horizon as usize + 1;
    let depth = depth.min(generators.len());
    // reach[m] = sums of exactly m generators seen so far
    let mut reach = vec![BitSet::new(len); depth + 1];
    reach[0].insert(0);
    for &g in generators {
        if g > horizon {
            break;
        }
        for m in (1..=depth).rev() {
            let (lo, hi) = reach.split_at_mut(m);
            hi[0].or_shifted(&lo[m - 1], g as usize);
        }
    }
    let mut all = BitSet::new(len);
    for r in &reach[1..] {
        all.or_shifted(r, 0);
    }
    Ok(IndexWindow::from_iter_clipped(
        all.iter().map(|n| n as u64),
        horizon,
    ))
}

/// Smallest `k` among `1..=√H` and `extra` with `k·ℕ₀ ∩ [0, H] ⊆ A`.
pub fn arithmetic_certificate(a: &IndexWindow, extra: &[u64]) -> Option<u64> {
    if !a.contains(0) {
        return None;
    }
    let h = a.horizon();
    let mut candidates: Vec<u64> = (1..=h.isqrt().max(1)).collect();
    candidates.extend(extra.iter().copied().filter(|&k| k >= 1));
    candidates.sort_unstable();
    candidates.dedup();
    candidates.into_iter().find(|&k| {
        (a.len() as u64) > h / k && (0..=h / k).all(|j| a.contains(j * k))
    })
}

/// Number of generators a greedy witness needs: as many as the binary
/// IP-set `{1, 2, 4, …}` has below `H`.
fn required_generators(h: u64) -> usize {
    (u64::BITS - (h + 1).leading_zeros() - 1) as usize
}

pub fn ip_star_probe(a: &IndexWindow, budget: u64) -> IpProbeResult {
    ip_star_probe_with(a, budget, &[])
}

/// [`ip_star_probe`] with additional arithmetic candidates, e.g. a known
/// exact period of the orbit.
pub fn ip_star_probe_with(a: &IndexWindow, budget: u64, extra_k: &[u64]) -> IpProbeResult {
    let budget = budget.max(1);
    if let Some(k) = arithmetic_certificate(a, extra_k) {
        return IpProbeResult {
            verdict: IpVerdict::ArithmeticCertificate(k),
            budget_used: 0,
        };
    }
    let h = a.horizon();
    if let Some(gens) = arithmetic_falsifier(a) {
        return IpProbeResult {
            verdict: IpVerdict::FalsifiedByIpWitness(gens),
            budget_used: 0,
        };
    }
    let bits = a.bitset();
    let need = required_generators(h);
    for restart in 0..budget {
        if let Some(gens) = greedy_witness(&bits, h, need, restart) {
            return IpProbeResult {
                verdict: IpVerdict::FalsifiedByIpWitness(gens),
                budget_used: restart + 1,
            };
        }
    }
    IpProbeResult {
        verdict: IpVerdict::Inconclusive,
        budget_used: budget,
    }
}

/// `k·ℕ` missing `A` entirely on the window yields the IP-set generated by
/// `k, 2k, 4k, …`.
fn arithmetic_falsifier(a: &IndexWindow) -> Option<Vec<u64>> {
    let h = a.horizon();
    let k = (1..=h.isqrt().max(1)).find(|&k| (1..=h / k).all(|j| !a.contains(j * k)))?;
    if k > h {
        return None;
    }
    let mut gens = Vec::new();
    let mut total = 0u64;
    let mut g = k;
    while total + g <= h {
        gens.push(g);
        total += g;
        g *= 2;
    }
    Some(gens)
}

/// Increasing generators, each chosen as small as possible such that all
/// new finite sums avoid `A`. Restart `r` skips the first `r` admissible
/// choices for the first generator.
fn greedy_witness(a: &BitSet, h: u64, need: usize, restart: u64) -> Option<Vec<u64>> {
    let len = h as usize + 1;
    let mut sums = BitSet::new(len);
    sums.insert(0);
    let mut sum_list: Vec<u64> = vec![0];
    let mut gens: Vec<u64> = Vec::new();
    let mut total = 0u64;
    let mut skip = restart;
    while gens.len() < need {
        let remaining = (need - gens.len()) as u64;
        let lo = gens.last().map_or(1, |&g| g + 1);
        let hi = (h - total) / remaining;
        let admissible = |g: u64| -> bool {
            if sum_list.len() < len / 64 {
                sum_list
                    .iter()
                    .all(|&s| s + g > h || !a.contains((s + g) as usize))
            } else {
                !sums.shifted_intersects(g as usize, a)
            }
        };
        let mut chosen = None;
        for g in lo..=hi {
            if admissible(g) {
                if gens.is_empty() && skip > 0 {
                    skip -= 1;
                    continue;
                }
                chosen = Some(g);
                break;
            }
        }
        let g = chosen?;
        let shifted: Vec<u64> = sum_list
            .iter()
            .map(|&s| s + g)
            .filter(|&s| s <= h)
            .collect();
        for &s in &shifted {
            if !sums.contains(s as usize) {
                sums.insert(s as usize);
                sum_list.push(s);
            }
        }
        gens.push(g);
        total += g;
    }
    Some(gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(g: &[u64], d: usize, h: u64) -> Vec<u64> {
        ip_generate(g, d, h).unwrap().into_elements()
    }

    #[test]
    fn generation_examples() {
        assert_eq!(fs(&[1, 2, 4, 8], 4, 20), (1..=15).collect::<Vec<_>>());
        assert_eq!(fs(&[2, 4, 8], 3, 20), vec![2, 4, 6, 8, 10, 12, 14]);
        assert_eq!(fs(&[5, 7], 2, 20), vec![5, 7, 12]);
        assert_eq!(fs(&[1, 2, 4, 8], 1, 20), vec![1, 2, 4, 8]);
    }

    #[test]
    fn generation_errors() {
        assert!(ip_generate(&[], 1, 10).is_err());
        assert!(ip_generate(&[1], 0, 10).is_err());
        assert!(ip_generate(&[3, 2], 2, 10).is_err());
    }

    #[test]
    fn multiples_of_four_are_certified() {
        let a = IndexWindow::residue(4, 0, 10_000);
        assert_eq!(
            ip_star_probe(&a, 4).verdict,
            IpVerdict::ArithmeticCertificate(4)
        );
    }

    #[test]
    fn odds_are_falsified_by_evens() {
        let a = IndexWindow::residue(2, 1, 10_000);
        let IpVerdict::FalsifiedByIpWitness(g) = ip_star_probe(&a, 4).verdict else {
            panic!("expected a witness");
        };
        assert!(g.iter().all(|x| x % 2 == 0));
        let sums = ip_generate(&g, g.len(), 10_000).unwrap();
        assert!(sums.elements().iter().all(|&s| !a.contains(s)));
    }

    #[test]
    fn greedy_witness_sums_avoid_the_set() {
        // multiples of 3 plus 1 mod 7: no small arithmetic falsifier
        let a = IndexWindow::from_predicate(4000, |n| n % 3 == 0 && n % 7 != 1 && n % 5 != 2);
        let r = ip_star_probe(&a, 4);
        if let IpVerdict::FalsifiedByIpWitness(g) = r.verdict {
            let sums = ip_generate(&g, g.len(), 4000).unwrap();
            assert!(sums.elements().iter().all(|&s| !a.contains(s)));
        }
    }

    #[test]
    fn required_generator_count() {
        assert_eq!(required_generators(10_000), 13);
        assert_eq!(required_generators(15), 4);
        assert_eq!(required_generators(16), 4);
    }
}

use std::fmt;

use super::{FamilyError, IndexWindow};

/// A piece of a cut-shift-paste partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexPredicate {
    Residues { modulus: u64, residues: Vec<u64> },
    /// Inclusive intervals; `None` as upper end means unbounded.
    Intervals(Vec<(u64, Option<u64>)>),
    All,
}

impl IndexPredicate {
    pub fn residue(modulus: u64, r: u64) -> Self {
        IndexPredicate::Residues {
            modulus,
            residues: vec![r % modulus],
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            IndexPredicate::Residues { modulus, residues } => residues.contains(&(n % modulus)),
            IndexPredicate::Intervals(iv) => iv
                .iter()
                .any(|&(a, b)| n >= a && b.is_none_or(|b| n <= b)),
            IndexPredicate::All => true,
        }
    }

    /// Parses `residue(k,r)`, `residues(k;r1,r2,...)`, `intervals(a:b, c:)`
    /// or `all`.
    pub fn parse(s: &str) -> Result<Self, FamilyError> {
        let s = s.trim();
        if s == "all" {
            return Ok(IndexPredicate::All);
        }
        let (head, body) = split_call(s)?;
        let bad = |m: &str| FamilyError::Parse(format!("{m} in `{s}`"));
        match head {
            "residue" => {
                let nums = parse_list(body)?;
                let [k, r] = nums[..] else {
                    return Err(bad("residue takes two arguments"));
                };
                if k == 0 {
                    return Err(bad("modulus must be positive"));
                }
                Ok(IndexPredicate::residue(k, r))
            }
            "residues" => {
                let (k, rs) = body
                    .split_once(';')
                    .ok_or_else(|| bad("expected `k; r1, r2, ...`"))?;
                let k = parse_num(k)?;
                if k == 0 {
                    return Err(bad("modulus must be positive"));
                }
                let mut residues: Vec<u64> = parse_list(rs)?.into_iter().map(|r| r % k).collect();
                residues.sort_unstable();
                residues.dedup();
                Ok(IndexPredicate::Residues {
                    modulus: k,
                    residues,
                })
            }
            "intervals" => Ok(IndexPredicate::Intervals(parse_intervals(body)?)),
            _ => Err(bad("unknown predicate")),
        }
    }
}

impl fmt::Display for IndexPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexPredicate::Residues { modulus, residues } => {
                let rs: Vec<String> = residues.iter().map(u64::to_string).collect();
                write!(f, "residues({modulus};{})", rs.join(","))
            }
            IndexPredicate::Intervals(iv) => {
                let parts: Vec<String> = iv
                    .iter()
                    .map(|(a, b)| match b {
                        Some(b) => format!("{a}:{b}"),
                        None => format!("{a}:"),
                    })
                    .collect();
                write!(f, "intervals({})", parts.join(","))
            }
            IndexPredicate::All => f.write_str("all"),
        }
    }
}

pub(super) fn split_call(s: &str) -> Result<(&str, &str), FamilyError> {
    let open = s
        .find('(')
        .ok_or_else(|| FamilyError::Parse(format!("expected `name(...)`, got `{s}`")))?;
    if !s.ends_with(')') {
        return Err(FamilyError::Parse(format!("unclosed parenthesis in `{s}`")));
    }
    Ok((s[..open].trim(), &s[open + 1..s.len() - 1]))
}

pub(super) fn parse_num(s: &str) -> Result<u64, FamilyError> {
    s.trim()
        .parse()
        .map_err(|_| FamilyError::Parse(format!("not a natural number: `{}`", s.trim())))
}

pub(super) fn parse_list(s: &str) -> Result<Vec<u64>, FamilyError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_num).collect()
}

pub(super) fn parse_intervals(s: &str) -> Result<Vec<(u64, Option<u64>)>, FamilyError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| FamilyError::Parse(format!("interval `{p}` needs `a:b`")))?;
            let a = parse_num(a)?;
            let b = if b.trim().is_empty() {
                None
            } else {
                let b = parse_num(b)?;
                if b < a {
                    return Err(FamilyError::Parse(format!("empty interval `{}`", p.trim())));
                }
                Some(b)
            };
            Ok((a, b))
        })
        .collect()
}

/// Partition pieces `I_j` with their shifts `n_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspInstance {
    pub partition: Vec<IndexPredicate>,
    pub shifts: Vec<u64>,
}

impl CuspInstance {
    pub fn new(partition: Vec<IndexPredicate>, shifts: Vec<u64>) -> Result<Self, FamilyError> {
        if partition.is_empty() {
            return Err(FamilyError::Config("a partition needs at least one piece".into()));
        }
        if partition.len() != shifts.len() {
            return Err(FamilyError::Config(format!(
                "{} pieces but {} shifts",
                partition.len(),
                shifts.len()
            )));
        }
        Ok(CuspInstance { partition, shifts })
    }

    pub fn identity() -> Self {
        CuspInstance {
            partition: vec![IndexPredicate::All],
            shifts: vec![0],
        }
    }

    pub fn max_shift(&self) -> u64 {
        self.shifts.iter().copied().max().unwrap_or(0)
    }

    pub fn min_shift(&self) -> u64 {
        self.shifts.iter().copied().min().unwrap_or(0)
    }

    /// Last index at which the transformed set is fully determined by a
    /// window of horizon `h`: anything `≤ h + min shift` can only come from
    /// elements `≤ h`.
    pub fn interior_horizon(&self, h: u64) -> u64 {
        h + self.min_shift()
    }
}

/// `⋃_j (n_j + A ∩ I_j)` on `[0, H + max shift]`.
pub fn cusp_transform(a: &IndexWindow, inst: &CuspInstance) -> Result<IndexWindow, FamilyError> {
    if inst.partition.is_empty() || inst.partition.len() != inst.shifts.len() {
        return Err(FamilyError::Config("inconsistent partition and shifts".into()));
    }
    let h = a.horizon();
    if let Some(n) = (0..=h).find(|&n| !inst.partition.iter().any(|p| p.contains(n))) {
        return Err(FamilyError::Config(format!(
            "partition does not cover {n}"
        )));
    }
    let out = a.elements().iter().flat_map(|&n| {
        inst.partition
            .iter()
            .zip(&inst.shifts)
            .filter(move |(p, _)| p.contains(n))
            .map(move |(_, &s)| n + s)
    });
    Ok(IndexWindow::from_iter_clipped(out, h + inst.max_shift()))
}

/// `{pn : n ∈ A}` on `[0, pH]`.
pub fn dilate(a: &IndexWindow, p: u64) -> Result<IndexWindow, FamilyError> {
    if p == 0 {
        return Err(FamilyError::Config("dilation factor must be positive".into()));
    }
    IndexWindow::new(
        a.elements().iter().map(|&n| n * p).collect(),
        a.horizon() * p,
    )
}

/// `{n : pn ∈ A}` on `[0, ⌊H/p⌋]`.
pub fn contract(a: &IndexWindow, p: u64) -> Result<IndexWindow, FamilyError> {
    if p == 0 {
        return Err(FamilyError::Config("contraction factor must be positive".into()));
    }
    IndexWindow::new(
        a.elements()
            .iter()
            .filter(|&&n| n % p == 0)
            .map(|&n| n / p)
            .collect(),
        a.horizon() / p,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::syndetic_certificate;

    #[test]
    fn evens_and_odds_shifted_onto_evens() {
        let a = IndexWindow::full(100);
        let inst = CuspInstance::new(
            vec![IndexPredicate::residue(2, 0), IndexPredicate::residue(2, 1)],
            vec![0, 1],
        )
        .unwrap();
        let out = cusp_transform(&a, &inst).unwrap();
        assert_eq!(out.horizon(), 101);
        let interior = out.truncate(inst.interior_horizon(100));
        assert_eq!(interior, IndexWindow::residue(2, 0, 100));
    }

    #[test]
    fn pure_shift() {
        let a = IndexWindow::residue(3, 0, 99);
        let inst = CuspInstance::new(vec![IndexPredicate::All], vec![5]).unwrap();
        let out = cusp_transform(&a, &inst).unwrap();
        assert_eq!(out, IndexWindow::residue(3, 5, 104));
    }

    #[test]
    fn identity_instance() {
        let a = IndexWindow::from_iter_clipped([0, 4, 9, 10], 20);
        assert_eq!(cusp_transform(&a, &CuspInstance::identity()).unwrap(), a);
    }

    #[test]
    fn uncovered_partition_is_rejected() {
        let a = IndexWindow::full(10);
        let inst = CuspInstance::new(vec![IndexPredicate::residue(2, 0)], vec![0]).unwrap();
        assert!(matches!(cusp_transform(&a, &inst), Err(FamilyError::Config(_))));
    }

    #[test]
    fn dilation_round_trip() {
        let a = IndexWindow::residue(3, 0, 1000);
        assert_eq!(dilate(&a, 2).unwrap(), IndexWindow::residue(6, 0, 2000));
        assert_eq!(contract(&dilate(&a, 7).unwrap(), 7).unwrap(), a);
        let g = syndetic_certificate(&a).unwrap().max_gap;
        let g2 = syndetic_certificate(&dilate(&a, 2).unwrap()).unwrap().max_gap;
        assert_eq!(g2, 2 * g);
    }

    #[test]
    fn predicate_literals() {
        for lit in ["all", "residues(5;0,3)", "intervals(0:9,20:)"] {
            assert_eq!(IndexPredicate::parse(lit).unwrap().to_string(), lit);
        }
        assert_eq!(
            IndexPredicate::parse("residue(4, 6)").unwrap(),
            IndexPredicate::residue(4, 2)
        );
        assert!(IndexPredicate::parse("residue(0,1)").is_err());
        assert!(IndexPredicate::parse("intervals(5:2)").is_err());
    }
}

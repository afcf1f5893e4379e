use std::fmt::Write as _;

use super::cusp::{parse_intervals, parse_list, parse_num, split_call};
use super::{ip_generate, FamilyError, IndexWindow};

impl IndexWindow {
    /// `horizon=<H>` followed by one element per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("horizon={}\n", self.horizon());
        for n in self.elements() {
            writeln!(out, "{n}").expect("writing to a String");
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, FamilyError> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| FamilyError::Parse("missing `horizon=` header".into()))?;
        let h = header
            .strip_prefix("horizon=")
            .ok_or_else(|| FamilyError::Parse(format!("bad header `{header}`")))?;
        let h = parse_num(h)?;
        let elements = lines.map(parse_num).collect::<Result<Vec<_>, _>>()?;
        IndexWindow::new(elements, h)
    }
}

/// Evaluates a set expression on `[0, H]`:
/// `residue(k,r)`, `fs(g1,...,gm;depth)`, `intervals(a:b, c:)`,
/// `explicit(n1,...)` or `all`.
pub fn parse_window_expr(expr: &str, horizon: u64) -> Result<IndexWindow, FamilyError> {
    let expr = expr.trim();
    if expr == "all" {
        return Ok(IndexWindow::full(horizon));
    }
    let (head, body) = split_call(expr)?;
    match head {
        "residue" => {
            let v = parse_list(body)?;
            let [k, r] = v[..] else {
                return Err(FamilyError::Parse("residue takes (k, r)".into()));
            };
            if k == 0 {
                return Err(FamilyError::Parse("modulus must be positive".into()));
            }
            Ok(IndexWindow::residue(k, r % k, horizon))
        }
        "fs" => {
            let (gens, depth) = body
                .split_once(';')
                .ok_or_else(|| FamilyError::Parse("fs takes (g1,...,gm; depth)".into()))?;
            ip_generate(&parse_list(gens)?, parse_num(depth)? as usize, horizon)
        }
        "intervals" => {
            let iv = parse_intervals(body)?;
            Ok(IndexWindow::from_predicate(horizon, |n| {
                iv.iter().any(|&(a, b)| n >= a && b.is_none_or(|b| n <= b))
            }))
        }
        "explicit" => Ok(IndexWindow::from_iter_clipped(parse_list(body)?, horizon)),
        _ => Err(FamilyError::Parse(format!("unknown set expression `{head}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let a = IndexWindow::from_iter_clipped([0, 3, 17], 20);
        let t = a.to_text();
        assert_eq!(t, "horizon=20\n0\n3\n17\n");
        assert_eq!(IndexWindow::from_text(&t).unwrap(), a);
        assert!(IndexWindow::from_text("horizon=2\n5\n").is_err());
        assert!(IndexWindow::from_text("3\n").is_err());
    }

    #[test]
    fn expressions() {
        assert_eq!(
            parse_window_expr("residue(3, 1)", 10).unwrap().elements(),
            &[1, 4, 7, 10]
        );
        assert_eq!(
            parse_window_expr("fs(5,7;2)", 20).unwrap().elements(),
            &[5, 7, 12]
        );
        assert_eq!(
            parse_window_expr("intervals(0:1, 8:)", 10).unwrap().elements(),
            &[0, 1, 8, 9, 10]
        );
        assert_eq!(
            parse_window_expr("explicit(9, 2, 40)", 10).unwrap().elements(),
            &[2, 9]
        );
        assert_eq!(parse_window_expr("all", 3).unwrap().len(), 4);
        assert!(parse_window_expr("squares()", 3).is_err());
    }
}

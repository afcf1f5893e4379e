use super::{OrbitError, OrbitPeriod, Precision};
use crate::families::IndexWindow;
use crate::operators::{parse_operator, parse_vector, OperatorSpec};

/// A return set `N(x, U)` observed up to a horizon, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSetRecord {
    pub operator: OperatorSpec,
    /// Vector literal.
    pub vector_id: String,
    pub epsilon: f64,
    pub seminorms: Vec<u64>,
    pub horizon: u64,
    pub window: IndexWindow,
    /// Set when exact iteration closed a cycle.
    pub exact_period: Option<OrbitPeriod>,
    pub precision: Precision,
}

impl ReturnSetRecord {
    /// Header lines followed by the window text.
    pub fn to_text(&self) -> String {
        let semis: Vec<String> = self.seminorms.iter().map(u64::to_string).collect();
        let period = match self.exact_period {
            Some(p) => format!("{}+{}", p.preperiod, p.period),
            None => "none".into(),
        };
        format!(
            "operator={}\nvector={}\nepsilon={:?}\nseminorms={}\nprecision={}\nperiod={}\n{}",
            self.operator.literal(),
            self.vector_id,
            self.epsilon,
            semis.join(","),
            self.precision.literal(),
            period,
            self.window.to_text()
        )
    }

    pub fn from_text(s: &str) -> Result<Self, OrbitError> {
        let bad = |m: &str| OrbitError::Config(format!("record header: {m}"));
        let mut lines = s.splitn(7, '\n');
        let mut field = |key: &str| -> Result<String, OrbitError> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing {key}")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected {key}=, got `{line}`")))
        };
        let operator = parse_operator(&field("operator")?)?;
        let vector_id = field("vector")?;
        parse_vector(&vector_id, &operator.space())?;
        let epsilon: f64 = field("epsilon")?.parse().map_err(|_| bad("epsilon"))?;
        let semis = field("seminorms")?;
        let seminorms = semis
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("seminorms"))?;
        let precision = match field("precision")?.as_str() {
            "exact" => Precision::Exact,
            p => Precision::Float(
                p.strip_prefix("float:")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| bad("precision"))?,
            ),
        };
        let period = field("period")?;
        let exact_period = match period.as_str() {
            "none" => None,
            p => {
                let (a, b) = p.split_once('+').ok_or_else(|| bad("period"))?;
                Some(OrbitPeriod {
                    preperiod: a.parse().map_err(|_| bad("period"))?,
                    period: b.parse().map_err(|_| bad("period"))?,
                })
            }
        };
        let rest = lines.next().ok_or_else(|| bad("missing window"))?;
        let window = IndexWindow::from_text(rest).map_err(|e| bad(&e.to_string()))?;
        Ok(ReturnSetRecord {
            horizon: window.horizon(),
            operator,
            vector_id,
            epsilon,
            seminorms,
            window,
            exact_period,
            precision,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{RowBlocks, StateVector};
    use crate::orbit::return_set;

    #[test]
    fn text_round_trip() {
        let op = parse_operator("blockcycle").unwrap();
        let x = parse_vector("vec(sparse: 5:1, 9:-1/3)", &op.space()).unwrap();
        let r = return_set(&op, &x, 0.25, &[0], 64).unwrap();
        assert_eq!(ReturnSetRecord::from_text(&r.to_text()).unwrap(), r);

        let op = parse_operator("rowrotation").unwrap();
        let x = StateVector::rows(RowBlocks::special());
        let r = return_set(&op, &x, 0.3, &[0, 2], 40).unwrap();
        assert_eq!(ReturnSetRecord::from_text(&r.to_text()).unwrap(), r);
    }
}

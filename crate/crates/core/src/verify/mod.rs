//! Named checks that turn theorems with computable content into pass/fail
//! outcomes over finite windows.
//!
//! Every check returns a [`CheckOutcome`]. A failure carries a [`Witness`]
//! with the operator and vector literals plus the parameters, enough to rerun
//! the check and see the same failure.

mod cusp;
mod series;
mod spectral;
mod transfer;
mod zoo;

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use thiserror::Error;

pub use cusp::{cusp_family_check, hypercyclic_frec_composition_check, CUSP_BANACH_SLACK};
pub use series::{shift_series_check, SeriesVerdict, ShiftSeriesParams};
pub use spectral::{
    diagonal_recurrence_check, kronecker_check, kronecker_window, matrix_recurrence_check, span_eigenvector_check,
    MATRIX_DIMENSION_CAP,
};
pub use transfer::{ansari_check, labels_agree, leon_muller_check, urec_avoids_periodic_check};
pub use zoo::{zoo, ZooEntry};

use crate::classify::{classify, ClassifyError, RecurrenceLabel, RecurrenceVerdict, Thresholds};
use crate::families::FamilyError;
use crate::operators::{OperatorError, OperatorSpec, StateVector};
use crate::orbit::{return_sets, OrbitError, Precision};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("invalid check parameters: {0}")]
    Config(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

impl From<OperatorError> for VerifyError {
    fn from(e: OperatorError) -> Self {
        VerifyError::Orbit(OrbitError::Operator(e))
    }
}

/// What a failing check hands back for replay.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub operator: String,
    pub vector: String,
    pub params: Vec<(String, String)>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail(Witness),
    Skipped(String),
}

impl CheckStatus {
    pub fn word(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail(_) => "fail",
            CheckStatus::Skipped(_) => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    /// Check-specific numbers, in the order they were recorded.
    pub metrics: Vec<(String, String)>,
    /// Hash of the name, parameters and seed.
    pub fingerprint: u64,
    pub seed: u64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, CheckStatus::Fail(_))
    }

    pub fn metric(&self, key: &str) -> Option<&str> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check={}", self.name);
        let _ = writeln!(s, "status={}", self.status.word());
        let _ = writeln!(s, "fingerprint={:016x}", self.fingerprint);
        let _ = writeln!(s, "seed={}", self.seed);
        match &self.status {
            CheckStatus::Pass => {}
            CheckStatus::Skipped(r) => {
                let _ = writeln!(s, "reason={}", one_line(r));
            }
            CheckStatus::Fail(w) => {
                let _ = writeln!(s, "witness.operator={}", w.operator);
                let _ = writeln!(s, "witness.vector={}", w.vector);
                for (k, v) in &w.params {
                    let _ = writeln!(s, "witness.param.{k}={}", one_line(v));
                }
                let _ = writeln!(s, "witness.detail={}", one_line(&w.detail));
            }
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "metric.{k}={}", one_line(v));
        }
        s
    }
}

fn one_line(s: &str) -> String {
    s.replace('\n', " | ")
}

/// Accumulates parameters and metrics, then seals them into an outcome.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    name: String,
    params: Vec<(String, String)>,
    metrics: Vec<(String, String)>,
    seed: u64,
}

impl Outcome {
    pub(crate) fn new(name: &str, seed: u64) -> Self {
        Outcome {
            name: name.to_string(),
            params: Vec::new(),
            metrics: Vec::new(),
            seed,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub(crate) fn sweep(mut self, s: &Sweep) -> Self {
        self.params.extend(s.params());
        self
    }

    pub(crate) fn metric(&mut self, key: &str, value: impl ToString) {
        self.metrics.push((key.to_string(), value.to_string()));
    }

    fn seal(self, status: CheckStatus) -> CheckOutcome {
        let mut h = DefaultHasher::new();
        self.name.hash(&mut h);
        self.params.hash(&mut h);
        self.seed.hash(&mut h);
        CheckOutcome {
            name: self.name,
            status,
            metrics: self.metrics,
            fingerprint: h.finish(),
            seed: self.seed,
        }
    }

    pub(crate) fn pass(self) -> CheckOutcome {
        self.seal(CheckStatus::Pass)
    }

    pub(crate) fn skip(self, reason: impl ToString) -> CheckOutcome {
        self.seal(CheckStatus::Skipped(reason.to_string()))
    }

    pub(crate) fn fail(self, operator: &str, vector: &str, detail: impl ToString) -> CheckOutcome {
        let w = Witness {
            operator: operator.to_string(),
            vector: vector.to_string(),
            params: self.params.clone(),
            detail: detail.to_string(),
        };
        self.seal(CheckStatus::Fail(w))
    }

    /// Pass when `ok`, otherwise fail with the given witness.
    pub(crate) fn decide(self, ok: bool, operator: &str, vector: &str, detail: impl ToString) -> CheckOutcome {
        if ok {
            self.pass()
        } else {
            self.fail(operator, vector, detail)
        }
    }
}

/// Tolerance grid, seminorms, horizon and arithmetic for orbit-based checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub grid: Vec<f64>,
    pub seminorms: Vec<u64>,
    pub horizon: u64,
    pub precision: Precision,
    pub thresholds: Thresholds,
}

impl Sweep {
    pub fn new(grid: &[f64], horizon: u64) -> Self {
        Sweep {
            grid: grid.to_vec(),
            seminorms: vec![0],
            horizon,
            precision: Precision::Exact,
            thresholds: Thresholds::default(),
        }
    }

    pub fn with_seminorms(mut self, seminorms: &[u64]) -> Self {
        self.seminorms = seminorms.to_vec();
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_horizon(&self, horizon: u64) -> Self {
        Sweep {
            horizon,
            ..self.clone()
        }
    }

    fn params(&self) -> Vec<(String, String)> {
        let grid: Vec<String> = self.grid.iter().map(|e| format!("{e:?}")).collect();
        let semis: Vec<String> = self.seminorms.iter().map(u64::to_string).collect();
        vec![
            ("epsilon".into(), grid.join(",")),
            ("seminorms".into(), semis.join(",")),
            ("horizon".into(), self.horizon.to_string()),
            ("precision".into(), self.precision.literal()),
        ]
    }
}

/// Classifies `x` under `op` on the sweep.
pub fn verdict_of(op: &OperatorSpec, x: &StateVector, sweep: &Sweep) -> Result<RecurrenceVerdict, VerifyError> {
    let recs = return_sets(op, x, &sweep.grid, &sweep.seminorms, sweep.horizon, sweep.precision)?;
    Ok(classify(&recs, &sweep.thresholds)?)
}

/// Like [`verdict_of`], but an orbit that leaves the floating range (or
/// collapses to zero from a nonzero start) is labelled `None` with a note:
/// such an orbit cannot come back to a fixed nonzero vector on this horizon.
pub(crate) fn label_or_escape(
    op: &OperatorSpec,
    x: &StateVector,
    sweep: &Sweep,
) -> Result<(RecurrenceLabel, Option<RecurrenceVerdict>, Option<String>), VerifyError> {
    match verdict_of(op, x, sweep) {
        Ok(v) => Ok((v.label, Some(v), None)),
        Err(VerifyError::Orbit(OrbitError::Operator(OperatorError::Overflow(m)))) if !op.is_exact() || !x.is_exact() => {
            Ok((RecurrenceLabel::None, None, Some(format!("orbit escaped floating range: {m}"))))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_text_lists_witness_and_metrics() {
        let mut o = Outcome::new("demo", 7).param("p", 3);
        o.metric("gap", 4);
        let out = o.fail("blockcycle", "e(5)", "labels differ\nat 0.1");
        let kv = out.to_kv();
        assert!(kv.contains("status=fail\n"));
        assert!(kv.contains("witness.operator=blockcycle\n"));
        assert!(kv.contains("witness.param.p=3\n"));
        assert!(kv.contains("witness.detail=labels differ | at 0.1\n"));
        assert!(kv.contains("metric.gap=4\n"));
        assert_eq!(out.metric("gap"), Some("4"));
    }

    #[test]
    fn fingerprint_depends_on_parameters_and_seed() {
        let a = Outcome::new("x", 1).param("k", 1).pass();
        let b = Outcome::new("x", 1).param("k", 2).pass();
        let c = Outcome::new("x", 2).param("k", 1).pass();
        let a2 = Outcome::new("x", 1).param("k", 1).pass();
        assert_ne!(a.fingerprint, b.fingerprint);
        assert_ne!(a.fingerprint, c.fingerprint);
        assert_eq!(a.fingerprint, a2.fingerprint);
    }
}

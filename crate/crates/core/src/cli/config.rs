//! TOML run configuration. Raw serde structs are validated into typed jobs up
//! front, so every literal is parsed before any orbit runs and every mistake is
//! reported with the line and column of the offending entry.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::classify::{Family, Thresholds};
use crate::families::{parse_window_expr, IndexWindow};
use crate::operators::{parse_operator, parse_scalar, parse_vector, Expr, OperatorSpec, StateVector};
use crate::orbit::Precision;
use crate::scalar::Scalar;
use crate::verify::{SeriesVerdict, ShiftSeriesParams, Sweep, CUSP_BANACH_SLACK};

/// Most significant digits a float run can ask for; f64 carries 17.
pub const MAX_FLOAT_DIGITS: u32 = 17;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub source: String,
    /// 1-based, when the error points into the config text.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((l, c)) => write!(f, "{}:{l}:{c}: {}", self.source, self.message),
            None => write!(f, "{}: {}", self.source, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// `exact` or `float:<digits>` with `1 ≤ digits ≤ 17`.
pub fn parse_precision(s: &str) -> Result<Precision, String> {
    let s = s.trim();
    if s == "exact" {
        return Ok(Precision::Exact);
    }
    let digits = s
        .strip_prefix("float:")
        .ok_or_else(|| format!("precision `{s}` is neither `exact` nor `float:<digits>`"))?;
    let d: u32 = digits
        .parse()
        .map_err(|_| format!("float digits `{digits}` are not a natural number"))?;
    if d == 0 || d > MAX_FLOAT_DIGITS {
        return Err(format!("float digits must lie in 1..={MAX_FLOAT_DIGITS}, got {d}"));
    }
    Ok(Precision::Float(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub output: Option<PathBuf>,
    pub precision: Precision,
    pub seed: u64,
    pub experiments: Vec<ExperimentConfig>,
    pub suites: Vec<SuiteConfig>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub operator: OperatorSpec,
    pub vectors: Vec<StateVector>,
    pub epsilons: Vec<f64>,
    pub seminorms: Vec<u64>,
    pub horizon: u64,
    pub thresholds: Thresholds,
    /// Pinned seed; otherwise the run seed applies.
    pub seed: Option<u64>,
    /// Also sample `p_i(Tⁿx)` for the first seminorm.
    pub growth: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub name: String,
    pub checks: Vec<CheckJob>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckJob {
    pub name: String,
    /// Pinned seed; otherwise the run seed applies.
    pub seed: Option<u64>,
    pub spec: CheckSpec,
}

/// One check with validated inputs. Sweeps carry exact precision here; the
/// runner applies the run-wide precision.
#[derive(Clone, Debug, PartialEq)]
pub enum CheckSpec {
    MatrixRecurrence {
        matrix: Vec<Vec<Scalar>>,
        sweep: Sweep,
        tol: f64,
    },
    DiagonalRecurrence {
        operator: OperatorSpec,
        sample_size: usize,
        sweep: Sweep,
        tol: f64,
    },
    Kronecker {
        lambdas: Vec<Scalar>,
        epsilon: f64,
        horizon: u64,
        ip_budget: u64,
        tol: f64,
    },
    SpanEigenvector {
        operator: OperatorSpec,
        pairs: Vec<(Scalar, StateVector)>,
        coefficients: Vec<Scalar>,
        sweep: Sweep,
    },
    Ansari {
        operator: OperatorSpec,
        vector: StateVector,
        p: u64,
        sweep: Sweep,
    },
    LeonMuller {
        operator: OperatorSpec,
        vector: StateVector,
        lambda: Scalar,
        sweep: Sweep,
    },
    ShiftSeries(ShiftSeriesParams),
    CuspFamily {
        family: Family,
        trials: u64,
        horizon: u64,
        thresholds: Thresholds,
    },
    UrecAvoidsPeriodic {
        operator: OperatorSpec,
        vector: StateVector,
        periodic: StateVector,
        sweep: Sweep,
    },
    HypercyclicComposition {
        window: IndexWindow,
        m: u64,
        slack: f64,
        thresholds: Thresholds,
    },
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::MatrixRecurrence { .. } => "matrix_recurrence",
            CheckSpec::DiagonalRecurrence { .. } => "diagonal_recurrence",
            CheckSpec::Kronecker { .. } => "kronecker",
            CheckSpec::SpanEigenvector { .. } => "span_eigenvector",
            CheckSpec::Ansari { .. } => "ansari",
            CheckSpec::LeonMuller { .. } => "leon_muller",
            CheckSpec::ShiftSeries(_) => "shift_series",
            CheckSpec::CuspFamily { .. } => "cusp_family",
            CheckSpec::UrecAvoidsPeriodic { .. } => "urec_avoids_periodic",
            CheckSpec::HypercyclicComposition { .. } => "hypercyclic_frec_composition",
        }
    }

    pub(crate) fn set_precision(&mut self, precision: Precision) {
        match self {
            CheckSpec::MatrixRecurrence { sweep, .. }
            | CheckSpec::DiagonalRecurrence { sweep, .. }
            | CheckSpec::SpanEigenvector { sweep, .. }
            | CheckSpec::Ansari { sweep, .. }
            | CheckSpec::LeonMuller { sweep, .. }
            | CheckSpec::UrecAvoidsPeriodic { sweep, .. } => sweep.precision = precision,
            _ => {}
        }
    }
}

// ---- raw serde layer ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output: Option<String>,
    precision: Option<Spanned<String>>,
    seed: Option<u64>,
    #[serde(default, rename = "experiment")]
    experiments: Vec<Spanned<RawExperiment>>,
    #[serde(default, rename = "suite")]
    suites: Vec<Spanned<RawSuite>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: Spanned<String>,
    operator: Spanned<String>,
    vectors: Vec<Spanned<String>>,
    epsilons: Spanned<Vec<f64>>,
    #[serde(default)]
    seminorms: Option<Spanned<Vec<u64>>>,
    horizon: Spanned<u64>,
    #[serde(default)]
    thresholds: Option<Spanned<RawThresholds>>,
    seed: Option<u64>,
    #[serde(default = "yes")]
    growth: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    delta_low: Option<f64>,
    delta_up: Option<f64>,
    delta_bd: Option<f64>,
    burn_in_fraction: Option<f64>,
    m_min: Option<usize>,
    ip_budget: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuite {
    name: Spanned<String>,
    #[serde(default, rename = "check")]
    checks: Vec<Spanned<RawCheck>>,
}

#[derive(Deserialize)]
struct RawCheck {
    kind: String,
    name: Option<String>,
    seed: Option<u64>,
    #[serde(flatten)]
    params: toml::Table,
}

// ---- validation ----

struct Ctx<'a> {
    source: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn err_at(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            source: self.source.to_string(),
            position: Some(line_col(self.text, span.start)),
            message: message.into(),
        }
    }
}

/// 1-based line and column (in characters) of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) && !s.starts_with('.')
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        source: source.clone(),
        position: None,
        message: format!("cannot read config: {e}"),
    })?;
    parse_config(&text, &source)
}

/// Parses and validates config text; `source` names it in error messages.
pub fn parse_config(text: &str, source: &str) -> Result<RunConfig, ConfigError> {
    let ctx = Ctx { source, text };
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        source: source.to_string(),
        position: e.span().map(|s| line_col(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let precision = match &raw.precision {
        Some(p) => parse_precision(p.get_ref()).map_err(|m| ctx.err_at(p.span(), m))?,
        None => Precision::Exact,
    };
    let seed = raw.seed.unwrap_or(0);

    let mut names = HashSet::new();
    let mut experiments = Vec::new();
    for e in &raw.experiments {
        let name = e.get_ref().name.get_ref();
        if !valid_name(name) {
            return Err(ctx.err_at(e.get_ref().name.span(), format!("experiment name `{name}` must use letters, digits, `-`, `_` or `.`")));
        }
        if !names.insert(name.clone()) {
            return Err(ctx.err_at(e.get_ref().name.span(), format!("duplicate experiment name `{name}`")));
        }
        experiments.push(experiment(&ctx, e)?);
    }

    let mut suite_names = HashSet::new();
    let mut suites = Vec::new();
    for s in &raw.suites {
        let r = s.get_ref();
        let name = r.name.get_ref();
        if !valid_name(name) {
            return Err(ctx.err_at(r.name.span(), format!("suite name `{name}` must use letters, digits, `-`, `_` or `.`")));
        }
        if !suite_names.insert(name.clone()) {
            return Err(ctx.err_at(r.name.span(), format!("duplicate suite name `{name}`")));
        }
        let mut check_names = HashSet::new();
        let mut checks = Vec::new();
        for c in &r.checks {
            let job = check(&ctx, c)?;
            if !check_names.insert(job.name.clone()) {
                return Err(ctx.err_at(c.span(), format!("duplicate check name `{}` in suite `{name}`", job.name)));
            }
            checks.push(job);
        }
        suites.push(SuiteConfig {
            name: name.clone(),
            checks,
        });
    }

    Ok(RunConfig {
        output: raw.output.map(PathBuf::from),
        precision,
        seed,
        experiments,
        suites,
    })
}

fn thresholds_from(raw: &RawThresholds) -> Result<Thresholds, String> {
    let mut t = Thresholds::default();
    if let Some(v) = raw.delta_low {
        t.delta_low = v;
    }
    if let Some(v) = raw.delta_up {
        t.delta_up = v;
    }
    if let Some(v) = raw.delta_bd {
        t.delta_bd = v;
    }
    if let Some(v) = raw.burn_in_fraction {
        t.burn_in_fraction = v;
    }
    if let Some(v) = raw.m_min {
        t.m_min = v;
    }
    if let Some(v) = raw.ip_budget {
        t.ip_budget = v;
    }
    for (k, v) in [("delta_low", t.delta_low), ("delta_up", t.delta_up), ("delta_bd", t.delta_bd)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(format!("{k} must lie in (0, 1], got {v}"));
        }
    }
    if !(0.0..1.0).contains(&t.burn_in_fraction) {
        return Err(format!("burn_in_fraction must lie in [0, 1), got {}", t.burn_in_fraction));
    }
    Ok(t)
}

fn check_grid(grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("epsilon grid is empty".into());
    }
    if let Some(e) = grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(format!("epsilon {e} is not strictly positive"));
    }
    Ok(())
}

fn experiment(ctx: &Ctx, e: &Spanned<RawExperiment>) -> Result<ExperimentConfig, ConfigError> {
    let r = e.get_ref();
    let operator = parse_operator(r.operator.get_ref()).map_err(|err| ctx.err_at(r.operator.span(), err.to_string()))?;
    let space = operator.space();
    if r.vectors.is_empty() {
        return Err(ctx.err_at(e.span(), "experiment lists no vectors"));
    }
    let vectors = r
        .vectors
        .iter()
        .map(|v| parse_vector(v.get_ref(), &space).map_err(|err| ctx.err_at(v.span(), err.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    check_grid(r.epsilons.get_ref()).map_err(|m| ctx.err_at(r.epsilons.span(), m))?;
    if *r.horizon.get_ref() == 0 {
        return Err(ctx.err_at(r.horizon.span(), "horizon must be at least 1"));
    }
    let seminorms = match &r.seminorms {
        Some(s) => {
            if s.get_ref().is_empty() {
                return Err(ctx.err_at(s.span(), "seminorm list is empty"));
            }
            for &i in s.get_ref() {
                space.check_seminorm(i).map_err(|err| ctx.err_at(s.span(), err.to_string()))?;
            }
            s.get_ref().clone()
        }
        None => vec![0],
    };
    let thresholds = match &r.thresholds {
        Some(t) => thresholds_from(t.get_ref()).map_err(|m| ctx.err_at(t.span(), m))?,
        None => Thresholds::default(),
    };
    Ok(ExperimentConfig {
        name: r.name.get_ref().clone(),
        operator,
        vectors,
        epsilons: r.epsilons.get_ref().clone(),
        seminorms,
        horizon: *r.horizon.get_ref(),
        thresholds,
        seed: r.seed,
        growth: r.growth,
    })
}

/// Typed access to the loose parameter table of one check.
struct Params<'a> {
    table: &'a toml::Table,
    used: Vec<&'static str>,
}

impl<'a> Params<'a> {
    fn get(&mut self, key: &'static str) -> Option<&'a toml::Value> {
        self.used.push(key);
        self.table.get(key)
    }

    fn req(&mut self, key: &'static str) -> Result<&'a toml::Value, String> {
        self.get(key).ok_or_else(|| format!("missing parameter `{key}`"))
    }

    fn str_of(v: &toml::Value, key: &str) -> Result<String, String> {
        v.as_str().map(str::to_string).ok_or_else(|| format!("`{key}` must be a string"))
    }

    fn string(&mut self, key: &'static str) -> Result<String, String> {
        let v = self.req(key)?;
        Self::str_of(v, key)
    }

    fn strings(&mut self, key: &'static str) -> Result<Vec<String>, String> {
        match self.req(key)? {
            toml::Value::Array(a) => a.iter().map(|v| Self::str_of(v, key)).collect(),
            toml::Value::String(s) => Ok(vec![s.clone()]),
            _ => Err(format!("`{key}` must be a list of strings")),
        }
    }

    fn float_of(v: &toml::Value, key: &str) -> Result<f64, String> {
        match v {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(format!("`{key}` must be a number")),
        }
    }

    fn float_or(&mut self, key: &'static str, default: f64) -> Result<f64, String> {
        match self.get(key) {
            Some(v) => Self::float_of(v, key),
            None => Ok(default),
        }
    }

    fn float(&mut self, key: &'static str) -> Result<f64, String> {
        let v = self.req(key)?;
        Self::float_of(v, key)
    }

    fn floats(&mut self, key: &'static str) -> Result<Vec<f64>, String> {
        match self.req(key)? {
            toml::Value::Array(a) => a.iter().map(|v| Self::float_of(v, key)).collect(),
            v => Ok(vec![Self::float_of(v, key)?]),
        }
    }

    fn nat_of(v: &toml::Value, key: &str) -> Result<u64, String> {
        v.as_integer()
            .and_then(|i| u64::try_from(i).ok())
            .ok_or_else(|| format!("`{key}` must be a natural number"))
    }

    fn nat(&mut self, key: &'static str) -> Result<u64, String> {
        let v = self.req(key)?;
        Self::nat_of(v, key)
    }

    fn nat_or(&mut self, key: &'static str, default: u64) -> Result<u64, String> {
        match self.get(key) {
            Some(v) => Self::nat_of(v, key),
            None => Ok(default),
        }
    }

    fn nats_or(&mut self, key: &'static str, default: &[u64]) -> Result<Vec<u64>, String> {
        match self.get(key) {
            Some(toml::Value::Array(a)) => a.iter().map(|v| Self::nat_of(v, key)).collect(),
            Some(v) => Ok(vec![Self::nat_of(v, key)?]),
            None => Ok(default.to_vec()),
        }
    }

    fn thresholds(&mut self) -> Result<Thresholds, String> {
        match self.get("thresholds") {
            Some(v) => {
                let raw: RawThresholds = v.clone().try_into().map_err(|e: toml::de::Error| format!("thresholds: {}", e.message()))?;
                thresholds_from(&raw)
            }
            None => Ok(Thresholds::default()),
        }
    }

    fn operator(&mut self) -> Result<OperatorSpec, String> {
        parse_operator(&self.string("operator")?).map_err(|e| format!("operator: {e}"))
    }

    fn vector(&mut self, key: &'static str, op: &OperatorSpec) -> Result<StateVector, String> {
        parse_vector(&self.string(key)?, &op.space()).map_err(|e| format!("{key}: {e}"))
    }

    fn scalar(&mut self, key: &'static str) -> Result<Scalar, String> {
        parse_scalar(&self.string(key)?).map_err(|e| format!("{key}: {e}"))
    }

    fn scalars(&mut self, key: &'static str) -> Result<Vec<Scalar>, String> {
        self.strings(key)?
            .iter()
            .map(|s| parse_scalar(s).map_err(|e| format!("{key}: {e}")))
            .collect()
    }

    /// `epsilons`, `horizon`, `seminorms` and `thresholds`.
    fn sweep(&mut self, op: Option<&OperatorSpec>) -> Result<Sweep, String> {
        let grid = self.floats("epsilons")?;
        check_grid(&grid)?;
        let horizon = self.nat("horizon")?;
        if horizon == 0 {
            return Err("horizon must be at least 1".into());
        }
        let seminorms = self.nats_or("seminorms", &[0])?;
        if seminorms.is_empty() {
            return Err("seminorm list is empty".into());
        }
        if let Some(op) = op {
            for &i in &seminorms {
                op.space().check_seminorm(i).map_err(|e| e.to_string())?;
            }
        }
        let mut sweep = Sweep::new(&grid, horizon).with_seminorms(&seminorms);
        sweep.thresholds = self.thresholds()?;
        Ok(sweep)
    }

    fn finish(&self) -> Result<(), String> {
        let mut extra: Vec<&String> = self.table.keys().filter(|k| !self.used.contains(&k.as_str())).collect();
        extra.sort();
        match extra.first() {
            Some(k) => Err(format!("unknown parameter `{k}`")),
            None => Ok(()),
        }
    }
}

fn check(ctx: &Ctx, c: &Spanned<RawCheck>) -> Result<CheckJob, ConfigError> {
    let r = c.get_ref();
    let spec = check_spec(r).map_err(|m| ctx.err_at(c.span(), format!("check `{}`: {m}", r.kind)))?;
    let name = r.name.clone().unwrap_or_else(|| r.kind.clone());
    if !valid_name(&name) {
        return Err(ctx.err_at(c.span(), format!("check name `{name}` must use letters, digits, `-`, `_` or `.`")));
    }
    Ok(CheckJob {
        name,
        seed: r.seed,
        spec,
    })
}

fn check_spec(r: &RawCheck) -> Result<CheckSpec, String> {
    let mut p = Params {
        table: &r.params,
        used: Vec::new(),
    };
    let spec = match r.kind.as_str() {
        "matrix_recurrence" => {
            let op = p.operator()?;
            let OperatorSpec::Matrix(matrix) = op else {
                return Err("operator must be a matrix literal".into());
            };
            CheckSpec::MatrixRecurrence {
                matrix,
                sweep: p.sweep(None)?,
                tol: p.float_or("tol", crate::operators::DEFAULT_UNIMODULAR_TOL)?,
            }
        }
        "diagonal_recurrence" => {
            let operator = p.operator()?;
            if !matches!(operator, OperatorSpec::Diagonal { .. }) {
                return Err("operator must be a diag literal".into());
            }
            let sweep = p.sweep(Some(&operator))?;
            CheckSpec::DiagonalRecurrence {
                operator,
                sample_size: p.nat_or("sample_size", 8)? as usize,
                sweep,
                tol: p.float_or("tol", crate::operators::DEFAULT_UNIMODULAR_TOL)?,
            }
        }
        "kronecker" => CheckSpec::Kronecker {
            lambdas: p.scalars("lambdas")?,
            epsilon: p.float("epsilon")?,
            horizon: p.nat("horizon")?,
            ip_budget: p.nat_or("ip_budget", Thresholds::default().ip_budget)?,
            tol: p.float_or("tol", crate::operators::DEFAULT_UNIMODULAR_TOL)?,
        },
        "span_eigenvector" => {
            let operator = p.operator()?;
            let lambdas = p.scalars("eigenvalues")?;
            let vectors = p
                .strings("eigenvectors")?
                .iter()
                .map(|v| parse_vector(v, &operator.space()).map_err(|e| format!("eigenvectors: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if lambdas.len() != vectors.len() {
                return Err(format!("{} eigenvalues but {} eigenvectors", lambdas.len(), vectors.len()));
            }
            let coefficients = match p.get("coefficients") {
                Some(_) => p.scalars("coefficients")?,
                None => vec![Scalar::one(); lambdas.len()],
            };
            let sweep = p.sweep(Some(&operator))?;
            CheckSpec::SpanEigenvector {
                operator,
                pairs: lambdas.into_iter().zip(vectors).collect(),
                coefficients,
                sweep,
            }
        }
        "ansari" => {
            let operator = p.operator()?;
            let vector = p.vector("vector", &operator)?;
            let sweep = p.sweep(Some(&operator))?;
            CheckSpec::Ansari {
                p: p.nat("p")?,
                operator,
                vector,
                sweep,
            }
        }
        "leon_muller" => {
            let operator = p.operator()?;
            let vector = p.vector("vector", &operator)?;
            let sweep = p.sweep(Some(&operator))?;
            CheckSpec::LeonMuller {
                lambda: p.scalar("lambda")?,
                operator,
                vector,
                sweep,
            }
        }
        "shift_series" => {
            let weights = Expr::parse(&p.string("weights")?).map_err(|e| format!("weights: {e}"))?;
            let horizon = p.nat("horizon")?;
            let set = match p.get("set") {
                Some(v) => {
                    let s = Params::str_of(v, "set")?;
                    parse_window_expr(&s, horizon).map_err(|e| format!("set: {e}"))?
                }
                None => IndexWindow::from_predicate(horizon, |n| n >= 1),
            };
            let mut params = ShiftSeriesParams::new(weights, set);
            params.threshold = p.float_or("threshold", params.threshold)?;
            params.tolerance = p.float_or("tolerance", params.tolerance)?;
            params.p = u32::try_from(p.nat_or("p", u64::from(params.p))?).map_err(|_| "`p` is too large".to_string())?;
            if let Some(v) = p.get("expect") {
                let s = Params::str_of(v, "expect")?;
                params.expect = Some(SeriesVerdict::parse(&s).ok_or_else(|| format!("unknown series verdict `{s}`"))?);
            }
            CheckSpec::ShiftSeries(params)
        }
        "cusp_family" => {
            let f = p.string("family")?;
            CheckSpec::CuspFamily {
                family: Family::parse(&f).ok_or_else(|| format!("unknown family `{f}`"))?,
                trials: p.nat("trials")?,
                horizon: p.nat_or("horizon", 10_000)?,
                thresholds: p.thresholds()?,
            }
        }
        "urec_avoids_periodic" => {
            let operator = p.operator()?;
            let vector = p.vector("vector", &operator)?;
            let periodic = p.vector("periodic", &operator)?;
            let sweep = p.sweep(Some(&operator))?;
            CheckSpec::UrecAvoidsPeriodic {
                operator,
                vector,
                periodic,
                sweep,
            }
        }
        "hypercyclic_frec_composition" => {
            let horizon = p.nat("horizon")?;
            let s = p.string("set")?;
            CheckSpec::HypercyclicComposition {
                window: parse_window_expr(&s, horizon).map_err(|e| format!("set: {e}"))?,
                m: p.nat("m")?,
                slack: p.float_or("slack", CUSP_BANACH_SLACK)?,
                thresholds: p.thresholds()?,
            }
        }
        other => return Err(format!("unknown check kind `{other}`")),
    };
    p.finish()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_literals() {
        assert_eq!(parse_precision("exact"), Ok(Precision::Exact));
        assert_eq!(parse_precision("float:12"), Ok(Precision::Float(12)));
        assert!(parse_precision("float:18").is_err());
        assert!(parse_precision("float:0").is_err());
        assert!(parse_precision("double").is_err());
    }

    #[test]
    fn minimal_config() {
        let cfg = parse_config(
            r#"
seed = 3
[[experiment]]
name = "bc"
operator = "blockcycle"
vectors = ["e(5)"]
epsilons = [0.5, 0.1]
horizon = 1000

[[suite]]
name = "spectral"
[[suite.check]]
kind = "kronecker"
lambdas = ["i"]
epsilon = 1
horizon = 10000
"#,
            "t.toml",
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.experiments[0].seminorms, vec![0]);
        assert_eq!(cfg.suites[0].checks[0].spec.kind(), "kronecker");
        assert_eq!(cfg.suites[0].checks[0].seed, None);
    }

    #[test]
    fn empty_config_is_valid() {
        let cfg = parse_config("", "t.toml").unwrap();
        assert!(cfg.experiments.is_empty() && cfg.suites.is_empty());
    }

    #[test]
    fn errors_carry_line_and_column() {
        let src = "[[experiment]]\nname = \"a\"\noperator = \"blockcycle\"\nvectors = [\"e(0)\"]\nepsilons = [0.5]\nhorizon = 10\n";
        let e = parse_config(src, "t.toml").unwrap_err();
        assert_eq!(e.position.map(|p| p.0), Some(4), "{e}");

        let src = "[[experiment]]\nname = \"a\"\noperator = \"blockcycle\"\nvectors = [\"e(1)\"]\nepsilons = [0.5, -1]\nhorizon = 10\n";
        let e = parse_config(src, "t.toml").unwrap_err();
        assert_eq!(e.position, Some((5, 12)), "{e}");

        let e = parse_config("seed = \"x\"\n", "t.toml").unwrap_err();
        assert_eq!(e.position.map(|p| p.0), Some(1));
        assert!(e.to_string().starts_with("t.toml:1:"), "{e}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let one = "[[experiment]]\nname = \"a\"\noperator = \"blockcycle\"\nvectors = [\"e(1)\"]\nepsilons = [0.5]\nhorizon = 10\n";
        let e = parse_config(&format!("{one}{one}"), "t.toml").unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");
        assert_eq!(e.position.map(|p| p.0), Some(8));
    }

    #[test]
    fn unknown_check_parameter_rejected() {
        let src = "[[suite]]\nname = \"s\"\n[[suite.check]]\nkind = \"kronecker\"\nlambdas = [\"i\"]\nepsilon = 1\nhorizon = 10\nhorizn = 3\n";
        let e = parse_config(src, "t.toml").unwrap_err();
        assert!(e.message.contains("horizn"), "{e}");
        assert_eq!(e.position.map(|p| p.0), Some(3));
    }

    #[test]
    fn float_precision_cap_is_config_error() {
        let e = parse_config("precision = \"float:20\"\n", "t.toml").unwrap_err();
        assert_eq!(e.position, Some((1, 13)));
    }
}

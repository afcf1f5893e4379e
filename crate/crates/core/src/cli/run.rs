//! Executes a validated [`RunConfig`]: experiments and checks run as
//! independent jobs on a sized worker pool, and a single writer lays the
//! results out on disk in declared order.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{CheckJob, CheckSpec, ConfigError, ExperimentConfig, RunConfig};
use crate::classify::{classify, RecurrenceVerdict};
use crate::families::IndexWindow;
use crate::orbit::{orbit_growth, return_sets, GrowthVerdict, Precision};
use crate::verify::{
    ansari_check, cusp_family_check, diagonal_recurrence_check, hypercyclic_frec_composition_check, kronecker_check,
    leon_muller_check, matrix_recurrence_check, shift_series_check, span_eigenvector_check, urec_avoids_periodic_check,
    CheckOutcome, CheckStatus, VerifyError,
};

/// Metric values longer than this stay in the per-check file only.
const SUMMARY_METRIC_WIDTH: usize = 40;

/// Command-line overrides; `None` keeps the config value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub precision: Option<Precision>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    /// `experiment` or the suite name.
    pub group: String,
    pub name: String,
    /// A label for experiments, a status word for checks, `error` for failures.
    pub status: String,
    pub failed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub rows: Vec<SummaryRow>,
}

impl RunSummary {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.failed)
    }

    /// `0` when nothing failed, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.any_failed())
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("group\tname\tstatus\tdetail\n");
        for r in &self.rows {
            let _ = writeln!(s, "{}\t{}\t{}\t{}", r.group, r.name, r.status, r.detail.replace(['\t', '\n'], " "));
        }
        s
    }
}

/// Relative path and contents of one output file.
type Artifact = (PathBuf, String);

struct JobResult {
    files: Vec<Artifact>,
    rows: Vec<SummaryRow>,
}

enum Job<'a> {
    Experiment(&'a ExperimentConfig),
    Check { suite: &'a str, index: usize, job: &'a CheckJob },
}

pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let cfg = super::config::load_config(config_path)?;
    run_config(&cfg, opts)
}

pub fn run_config(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let precision = opts.precision.unwrap_or(cfg.precision);
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("reclab-out"));
    let seed = opts.seed.unwrap_or(cfg.seed);
    let mut cfg = cfg.clone();
    for s in &mut cfg.suites {
        for c in &mut s.checks {
            c.spec.set_precision(precision);
        }
    }

    let mut jobs: Vec<Job> = cfg.experiments.iter().map(Job::Experiment).collect();
    for s in &cfg.suites {
        for (index, job) in s.checks.iter().enumerate() {
            jobs.push(Job::Check {
                suite: &s.name,
                index,
                job,
            });
        }
    }

    std::fs::create_dir_all(&out_dir).map_err(|source| RunError::Io {
        path: out_dir.clone(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let results: Vec<JobResult> = pool.install(|| jobs.par_iter().map(|j| execute(j, precision, seed)).collect());

    let mut summary = RunSummary {
        out_dir: out_dir.clone(),
        rows: Vec::new(),
    };
    for r in results {
        for (rel, text) in r.files {
            write_file(&out_dir.join(rel), &text)?;
        }
        summary.rows.extend(r.rows);
    }
    let header = format!(
        "precision={}\nseed={}\nexperiments={}\nchecks={}\nfailed={}\n",
        precision.literal(),
        seed,
        cfg.experiments.len(),
        cfg.suites.iter().map(|s| s.checks.len()).sum::<usize>(),
        summary.rows.iter().filter(|r| r.failed).count()
    );
    write_file(&out_dir.join("run.txt"), &header)?;
    write_file(&out_dir.join("summary.tsv"), &summary.to_tsv())?;
    Ok(summary)
}

fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

fn panic_text(p: Box<dyn Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic".into()
    }
}

fn execute(job: &Job, precision: Precision, seed: u64) -> JobResult {
    let (group, name) = match job {
        Job::Experiment(e) => ("experiment".to_string(), e.name.clone()),
        Job::Check { suite, job, .. } => (suite.to_string(), job.name.clone()),
    };
    let run = catch_unwind(AssertUnwindSafe(|| match job {
        Job::Experiment(e) => run_experiment(e, precision, e.seed.unwrap_or(seed)),
        Job::Check { suite, index, job } => run_check(suite, *index, job, job.seed.unwrap_or(seed)),
    }));
    run.unwrap_or_else(|p| JobResult {
        files: Vec::new(),
        rows: vec![SummaryRow {
            group,
            name,
            status: "error".into(),
            failed: true,
            detail: format!("panicked: {}", panic_text(p)),
        }],
    })
}

/// `gap count` for consecutive returns.
fn gap_histogram(w: &IndexWindow) -> String {
    let mut h: BTreeMap<u64, u64> = BTreeMap::new();
    for pair in w.elements().windows(2) {
        *h.entry(pair[1] - pair[0]).or_default() += 1;
    }
    h.iter().map(|(g, c)| format!("{g} {c}\n")).collect()
}

fn columns(curve: &[(u64, f64)]) -> String {
    curve.iter().map(|(n, v)| format!("{n} {v:?}\n")).collect()
}

fn run_experiment(e: &ExperimentConfig, precision: Precision, seed: u64) -> JobResult {
    let mut files = Vec::new();
    let mut rows = Vec::new();
    let base = PathBuf::from("experiments").join(&e.name);
    for (i, x) in e.vectors.iter().enumerate() {
        let dir = base.join(format!("v{i}"));
        let row_name = format!("{}/v{i}", e.name);
        let attempt = (|| -> Result<(Vec<Artifact>, RecurrenceVerdict, Option<String>), String> {
            let recs = return_sets(&e.operator, x, &e.epsilons, &e.seminorms, e.horizon, precision).map_err(|err| err.to_string())?;
            let verdict = classify(&recs, &e.thresholds).map_err(|err| err.to_string())?;
            let mut out = Vec::new();
            for (j, rec) in recs.iter().enumerate() {
                let d = dir.join(format!("eps{j}"));
                out.push((d.join("record.txt"), rec.to_text()));
                out.push((d.join("gap_histogram.tsv"), gap_histogram(&rec.window)));
                if let Some(ev) = verdict.evidence.iter().find(|ev| ev.epsilon == rec.epsilon) {
                    if let Some(rep) = &ev.evidence.density {
                        out.push((d.join("running_density.tsv"), columns(&rep.running_density_curve)));
                        out.push((d.join("banach_curve.tsv"), columns(&rep.banach_curve)));
                    }
                }
            }
            let growth = if e.growth {
                let g = orbit_growth(&e.operator, x, e.seminorms[0], e.horizon, precision).map_err(|err| err.to_string())?;
                out.push((dir.join("growth.tsv"), g.to_columns()));
                Some(match &g.verdict {
                    GrowthVerdict::BoundedWithin(b) => format!("bounded within {b:?}"),
                    GrowthVerdict::GrowthWitness(w) => format!("growth witness with {} records", w.len()),
                })
            } else {
                None
            };
            Ok((out, verdict, growth))
        })();
        match attempt {
            Ok((out, verdict, growth)) => {
                let mut text = format!(
                    "experiment={}\noperator={}\nvector={}\nseed={}\nprecision={}\n",
                    e.name,
                    e.operator.literal(),
                    x.literal(),
                    seed,
                    precision.literal()
                );
                if let Some(g) = &growth {
                    let _ = writeln!(text, "growth={g}");
                }
                text += &verdict.to_kv();
                files.extend(out);
                files.push((dir.join("verdict.txt"), text));
                let mut detail = format!("vector={}", x.literal());
                if let Some(p) = verdict.exact_period {
                    let _ = write!(detail, " exact_period={p}");
                }
                if let Some(g) = growth {
                    let _ = write!(detail, " growth={}", g.split_whitespace().next().unwrap_or(""));
                }
                rows.push(SummaryRow {
                    group: "experiment".into(),
                    name: row_name,
                    status: verdict.label.to_string(),
                    failed: false,
                    detail,
                });
            }
            Err(msg) => rows.push(SummaryRow {
                group: "experiment".into(),
                name: row_name,
                status: "error".into(),
                failed: true,
                detail: msg,
            }),
        }
    }
    JobResult { files, rows }
}

fn dispatch(job: &CheckJob, seed: u64) -> Result<CheckOutcome, VerifyError> {
    match &job.spec {
        CheckSpec::MatrixRecurrence { matrix, sweep, tol } => matrix_recurrence_check(matrix, sweep, *tol),
        CheckSpec::DiagonalRecurrence {
            operator,
            sample_size,
            sweep,
            tol,
        } => diagonal_recurrence_check(operator, *sample_size, sweep, *tol, seed),
        CheckSpec::Kronecker {
            lambdas,
            epsilon,
            horizon,
            ip_budget,
            tol,
        } => kronecker_check(lambdas, *epsilon, *horizon, *ip_budget, *tol),
        CheckSpec::SpanEigenvector {
            operator,
            pairs,
            coefficients,
            sweep,
        } => span_eigenvector_check(operator, pairs, coefficients, sweep),
        CheckSpec::Ansari { operator, vector, p, sweep } => ansari_check(operator, vector, *p, sweep),
        CheckSpec::LeonMuller {
            operator,
            vector,
            lambda,
            sweep,
        } => leon_muller_check(operator, vector, lambda, sweep),
        CheckSpec::ShiftSeries(params) => shift_series_check(params),
        CheckSpec::CuspFamily {
            family,
            trials,
            horizon,
            thresholds,
        } => cusp_family_check(*family, *trials, seed, *horizon, thresholds),
        CheckSpec::UrecAvoidsPeriodic {
            operator,
            vector,
            periodic,
            sweep,
        } => urec_avoids_periodic_check(operator, vector, periodic, sweep),
        CheckSpec::HypercyclicComposition {
            window,
            m,
            slack,
            thresholds,
        } => hypercyclic_frec_composition_check(window, *m, *slack, thresholds),
    }
}

fn run_check(suite: &str, index: usize, job: &CheckJob, seed: u64) -> JobResult {
    let path = PathBuf::from("suites").join(suite).join(format!("{index:02}-{}.txt", job.name));
    match dispatch(job, seed) {
        Ok(outcome) => {
            let detail = match &outcome.status {
                CheckStatus::Pass => short_metrics(&outcome),
                CheckStatus::Fail(w) => format!("{} | {}", w.detail, short_metrics(&outcome)),
                CheckStatus::Skipped(reason) => reason.clone(),
            };
            let row = SummaryRow {
                group: suite.to_string(),
                name: job.name.clone(),
                status: outcome.status.word().to_string(),
                failed: outcome.failed(),
                detail,
            };
            let text = format!("kind={}\n{}", job.spec.kind(), outcome.to_kv());
            JobResult {
                files: vec![(path, text)],
                rows: vec![row],
            }
        }
        Err(e) => JobResult {
            files: vec![(path, format!("kind={}\nstatus=error\nerror={e}\n", job.spec.kind()))],
            rows: vec![SummaryRow {
                group: suite.to_string(),
                name: job.name.clone(),
                status: "error".into(),
                failed: true,
                detail: e.to_string(),
            }],
        },
    }
}

fn short_metrics(o: &CheckOutcome) -> String {
    o.metrics
        .iter()
        .filter(|(_, v)| v.len() <= SUMMARY_METRIC_WIDTH)
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

//! Corpus runner: evaluates the identity, the bounds and their hypotheses for
//! every `(entry, n)` of a corpus and collects the outcome in report rows.

pub mod config;
pub mod report;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, BoundReport, BoundsError, EndpointDerivs, HolderExponents, Theorem};
use crate::convexity::{self, ConvexityError};
use crate::expr::{eval_jet, EvalError};
use crate::kernel::RuleOrder;
use crate::quadrature::{self, QuadratureError, QuadratureResult};

pub use config::{load_config, parse_config, ConfigError, Corpus, CorpusEntry, Tolerances};

/// Environment variable that forces single-threaded runs when set to a
/// non-empty value other than `0`.
pub const SINGLE_THREAD_ENV: &str = "HHQUAD_SINGLE_THREAD";

#[derive(Debug, Error)]
pub enum NumericError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("entry `{entry}`{}: {source}", .n.map(|n| format!(" at n = {n}")).unwrap_or_default())]
    Numeric {
        entry: String,
        n: Option<RuleOrder>,
        source: NumericError,
    },
    #[error("cannot build a pool of {jobs} worker threads: {message}")]
    ThreadPool { jobs: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// Some bound's hypothesis was certified and every certified bound holds.
    Guaranteed,
    /// No hypothesis was certified; bounds are reported, not enforced.
    Observed,
    /// A certified bound was exceeded.
    Violated,
}

impl fmt::Display for HypothesisStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HypothesisStatus::Guaranteed => "guaranteed",
            HypothesisStatus::Observed => "observed",
            HypothesisStatus::Violated => "violated",
        })
    }
}

/// Outcome of the mean-value sandwich `f(mid) <= mean <= (f(a) + f(b))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SanityOutcome {
    Pass,
    Fail,
    /// `f` was not certified convex, so the sandwich is not claimed.
    NotApplicable,
}

impl fmt::Display for SanityOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SanityOutcome::Pass => "pass",
            SanityOutcome::Fail => "fail",
            SanityOutcome::NotApplicable => "not_applicable",
        })
    }
}

/// One `(entry, n)` outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub n: RuleOrder,
    pub quadrature: QuadratureResult,
    pub identity_ok: bool,
    pub bound_convex: f64,
    pub bound_holder_best: Option<f64>,
    pub bound_powermean_best: f64,
    /// Tightest applicable bound: among certified candidates when any are
    /// certified, otherwise among all.
    pub best: BoundReport,
    pub hypothesis_status: HypothesisStatus,
    pub hh_sanity: SanityOutcome,
}

impl ReportRow {
    pub fn identity_residual(&self) -> f64 {
        self.quadrature.identity_residual()
    }

    pub fn actual_error(&self) -> f64 {
        self.quadrature.actual_error()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub tolerances: Tolerances,
    pub rows: Vec<ReportRow>,
}

impl CheckReport {
    pub fn identity_failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.identity_ok).count()
    }

    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.hypothesis_status == HypothesisStatus::Violated)
            .count()
    }

    /// Entries whose sandwich check failed (counted once per entry).
    pub fn sanity_failures(&self) -> usize {
        let mut names: Vec<&str> = self
            .rows
            .iter()
            .filter(|r| r.hh_sanity == SanityOutcome::Fail)
            .map(|r| r.name.as_str())
            .collect();
        names.dedup();
        names.len()
    }

    pub fn passed(&self) -> bool {
        self.identity_failures() == 0 && self.violations() == 0 && self.sanity_failures() == 0
    }
}

/// One `(entry, n, q)` line of the bound-comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub name: String,
    pub n: RuleOrder,
    pub q: f64,
    pub actual_error: f64,
    pub eq3: f64,
    /// Absent for `q = 1`, which has no conjugate exponent.
    pub eq4: Option<f64>,
    pub eq7: f64,
}

/// Worker count after applying [`SINGLE_THREAD_ENV`].
pub fn effective_jobs(requested: usize) -> usize {
    match std::env::var(SINGLE_THREAD_ENV) {
        Ok(v) if !v.is_empty() && v != "0" => 1,
        _ => requested.max(1),
    }
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::ThreadPool {
            jobs,
            message: e.to_string(),
        })?;
    Ok(pool.install(work))
}

fn numeric(entry: &CorpusEntry, n: Option<RuleOrder>) -> impl Fn(NumericError) -> HarnessError + '_ {
    move |source| HarnessError::Numeric {
        entry: entry.name.clone(),
        n,
        source,
    }
}

/// Run every `(entry, n)` of the corpus on `jobs` worker threads. Rows come
/// out in corpus order regardless of the thread count.
pub fn run_check(corpus: &Corpus, jobs: usize) -> Result<CheckReport, HarnessError> {
    let tol = corpus.tolerances;
    let per_entry: Vec<Result<Vec<ReportRow>, HarnessError>> = with_pool(jobs, || {
        corpus
            .entries
            .par_iter()
            .map(|entry| check_entry(entry, &tol))
            .collect()
    })?;
    let mut rows = Vec::new();
    for r in per_entry {
        rows.extend(r?);
    }
    Ok(CheckReport {
        tolerances: tol,
        rows,
    })
}

fn check_entry(entry: &CorpusEntry, tol: &Tolerances) -> Result<Vec<ReportRow>, HarnessError> {
    let reference = quadrature::reference_integral(&entry.function, entry.interval, tol.reference)
        .map_err(|e| numeric(entry, None)(e.into()))?;
    let hh_sanity = sanity_with_reference(entry, reference, tol).map_err(numeric(entry, None))?;
    entry
        .n_values
        .iter()
        .map(|&n| check_order(entry, n, reference, hh_sanity, tol).map_err(numeric(entry, Some(n))))
        .collect()
}

fn finite(v: f64, what: &'static str) -> Result<f64, NumericError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericError::NonFinite(what))
    }
}

fn endpoint_derivs(entry: &CorpusEntry, n: RuleOrder) -> Result<EndpointDerivs, NumericError> {
    let k = n.as_usize();
    let fa = eval_jet(&entry.function, entry.interval.a(), k)?.deriv(k);
    let fb = eval_jet(&entry.function, entry.interval.b(), k)?.deriv(k);
    Ok(EndpointDerivs::from_derivs(fa, fb)?)
}

fn check_order(
    entry: &CorpusEntry,
    n: RuleOrder,
    reference: f64,
    hh_sanity: SanityOutcome,
    tol: &Tolerances,
) -> Result<ReportRow, NumericError> {
    let (f, iv) = (&entry.function, entry.interval);
    let quadrature = QuadratureResult {
        rule_value: finite(quadrature::corrected_midpoint(f, iv, n)?, "rule_value")?,
        remainder: finite(quadrature::remainder_integral(f, iv, n)?, "remainder")?,
        reference,
    };
    let residual = finite(quadrature.identity_residual(), "identity_residual")?;
    let identity_ok = residual <= tol.identity.max(tol.identity * reference.abs());
    let actual_error = quadrature.actual_error();

    let d = endpoint_derivs(entry, n)?;
    let mut candidates = bounds::all_bounds(n, iv, d, &entry.q_grid)?;

    // |f^(n)|^1 is |f^(n)|, so q = 1 shares the plain certificate.
    let m = tol.convexity_grid;
    let plain = convexity::certify_with_tolerance(f, iv, n, None, m, tol.convexity)?.certified;
    let mut powered = Vec::with_capacity(entry.q_grid.len());
    for &q in &entry.q_grid {
        let certified = if q == 1.0 {
            plain
        } else {
            convexity::certify_with_tolerance(f, iv, n, Some(q), m, tol.convexity)?.certified
        };
        powered.push((q, certified));
    }
    for c in &mut candidates {
        finite(c.value, "bound")?;
        c.actual_error = Some(actual_error);
        c.hypothesis_certified = match c.q_used {
            None => plain,
            Some(q) => powered
                .iter()
                .find(|(p, _)| *p == q)
                .map(|(_, ok)| *ok)
                .unwrap_or(false),
        };
    }

    let min_of = |theorem| {
        candidates
            .iter()
            .filter(|c| c.theorem == theorem)
            .map(|c| c.value)
            .reduce(f64::min)
    };
    let bound_convex = min_of(Theorem::Convex).expect("convex bound present");
    let bound_holder_best = min_of(Theorem::Holder);
    let bound_powermean_best = min_of(Theorem::PowerMean).expect("grid is non-empty");

    let certified: Vec<BoundReport> = candidates.iter().copied().filter(|c| c.hypothesis_certified).collect();
    let (best, hypothesis_status) = if certified.is_empty() {
        (
            bounds::select_best(&candidates).expect("candidates non-empty"),
            HypothesisStatus::Observed,
        )
    } else {
        let holds = certified
            .iter()
            .all(|c| c.dominates(tol.domination, tol.domination) == Some(true));
        (
            bounds::select_best(&certified).expect("certified non-empty"),
            if holds {
                HypothesisStatus::Guaranteed
            } else {
                HypothesisStatus::Violated
            },
        )
    };

    Ok(ReportRow {
        name: entry.name.clone(),
        n,
        quadrature,
        identity_ok,
        bound_convex,
        bound_holder_best,
        bound_powermean_best,
        best,
        hypothesis_status,
        hh_sanity,
    })
}

/// Check `f(mid) <= (1/(b-a)) ∫ f <= (f(a) + f(b))/2` for an entry whose `f`
/// is certified convex on the sample grid.
pub fn run_hh_sanity(entry: &CorpusEntry, tol: &Tolerances) -> Result<SanityOutcome, HarnessError> {
    let reference = quadrature::reference_integral(&entry.function, entry.interval, tol.reference)
        .map_err(|e| numeric(entry, None)(e.into()))?;
    sanity_with_reference(entry, reference, tol).map_err(numeric(entry, None))
}

fn sanity_with_reference(
    entry: &CorpusEntry,
    reference: f64,
    tol: &Tolerances,
) -> Result<SanityOutcome, NumericError> {
    let (f, iv) = (&entry.function, entry.interval);
    let cert = convexity::certify_function(f, iv, tol.convexity_grid, tol.convexity)?;
    if !cert.certified {
        return Ok(SanityOutcome::NotApplicable);
    }
    let mean = reference / iv.width();
    let lower = f.eval(iv.midpoint())?;
    let upper = 0.5 * (f.eval(iv.a())? + f.eval(iv.b())?);
    let slack = |v: f64| tol.domination * (1.0 + v.abs());
    if lower <= mean + slack(mean) && mean <= upper + slack(upper) {
        Ok(SanityOutcome::Pass)
    } else {
        Ok(SanityOutcome::Fail)
    }
}

/// The `(entry, n, q)` bound-comparison table.
pub fn run_table(corpus: &Corpus, jobs: usize) -> Result<Vec<TableRow>, HarnessError> {
    let tol = corpus.tolerances;
    let per_entry: Vec<Result<Vec<TableRow>, HarnessError>> = with_pool(jobs, || {
        corpus
            .entries
            .par_iter()
            .map(|entry| table_entry(entry, &tol))
            .collect()
    })?;
    let mut rows = Vec::new();
    for r in per_entry {
        rows.extend(r?);
    }
    Ok(rows)
}

fn table_entry(entry: &CorpusEntry, tol: &Tolerances) -> Result<Vec<TableRow>, HarnessError> {
    let (f, iv) = (&entry.function, entry.interval);
    let reference = quadrature::reference_integral(f, iv, tol.reference)
        .map_err(|e| numeric(entry, None)(e.into()))?;
    let mut rows = Vec::new();
    for &n in &entry.n_values {
        let on_err = numeric(entry, Some(n));
        let rule = quadrature::corrected_midpoint(f, iv, n).map_err(|e| on_err(e.into()))?;
        let actual_error = (reference - rule).abs();
        let d = endpoint_derivs(entry, n).map_err(&on_err)?;
        let eq3 = bounds::bound_convex(n, iv, d);
        for &q in &entry.q_grid {
            let eq4 = if q > 1.0 {
                let exps = HolderExponents::from_q(q).map_err(|e| on_err(e.into()))?;
                Some(bounds::bound_holder(n, iv, d, exps))
            } else {
                None
            };
            let eq7 = bounds::bound_power_mean(n, iv, d, q).map_err(|e| on_err(e.into()))?;
            rows.push(TableRow {
                name: entry.name.clone(),
                n,
                q,
                actual_error,
                eq3,
                eq4,
                eq7,
            });
        }
    }
    Ok(rows)
}

//! Corpus configuration files.
//!
//! A configuration is TOML with an optional `[tolerances]` table and one
//! `[[entry]]` table per function:
//!
//! ```toml
//! [tolerances]
//! identity = 1e-9
//!
//! [[entry]]
//! name = "exp"
//! expression = "exp(x)"
//! a = 0.0
//! b = 1.0
//! n_values = [1, 2, 3, 4]
//! q_grid = [1.0, 1.5, 2.0, 3.0, 5.0]
//! ```
//!
//! `q_grid` may be omitted and then defaults to
//! [`DEFAULT_Q_GRID`](crate::bounds::DEFAULT_Q_GRID).

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::bounds::DEFAULT_Q_GRID;
use crate::convexity::{DEFAULT_DEFECT_TOL, DEFAULT_GRID_POINTS};
use crate::expr::{parse, Expression, ParseError};
use crate::kernel::RuleOrder;
use crate::quadrature::{Interval, MIN_REFERENCE_REL_TOL, REFERENCE_REL_TOL};

/// Every numeric threshold the harness applies. Echoed into report headers.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Identity residual bound, `max(identity, identity·|reference|)`.
    pub identity: f64,
    /// Relative tolerance of the reference integral.
    pub reference: f64,
    /// Midpoint-convexity defect tolerance, relative to `1 + max|g|`.
    pub convexity: f64,
    /// Slack in `error <= bound (1 + s) + s`.
    pub domination: f64,
    /// Sample points of the convexity grid.
    pub convexity_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-9,
            reference: REFERENCE_REL_TOL,
            convexity: DEFAULT_DEFECT_TOL,
            domination: 1e-12,
            convexity_grid: DEFAULT_GRID_POINTS,
        }
    }
}

/// One validated `[[entry]]`.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub expression: String,
    pub function: Expression,
    pub interval: Interval,
    pub n_values: Vec<RuleOrder>,
    pub q_grid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub tolerances: Tolerances,
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Invalid(Diagnostic),
}

/// Where an invalid value sits in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub entry: Option<String>,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        if let Some(entry) = &self.entry {
            write!(f, "entry `{entry}`: ")?;
        }
        write!(f, "field `{}`: {}", self.field, self.message)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tolerances: Option<Spanned<Tolerances>>,
    #[serde(default, rename = "entry")]
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: Spanned<String>,
    expression: Spanned<String>,
    a: Spanned<f64>,
    b: Spanned<f64>,
    n_values: Spanned<Vec<i64>>,
    q_grid: Option<Spanned<Vec<f64>>>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, offset: usize) -> usize {
        1 + self.0.as_bytes()[..offset.min(self.0.len())]
            .iter()
            .filter(|&&c| c == b'\n')
            .count()
    }
}

pub fn load_config(path: &Path) -> Result<Corpus, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<Corpus, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let lines = Lines(text);
    let tolerances = match raw.tolerances {
        Some(t) => {
            let line = lines.of(t.span().start);
            let t = t.into_inner();
            validate_tolerances(&t).map_err(|(field, message)| {
                ConfigError::Invalid(Diagnostic {
                    line,
                    entry: None,
                    field,
                    message,
                })
            })?;
            t
        }
        None => Tolerances::default(),
    };
    let entries = raw
        .entries
        .into_iter()
        .map(|e| validate_entry(e, &lines))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus {
        tolerances,
        entries,
    })
}

fn validate_tolerances(t: &Tolerances) -> Result<(), (&'static str, String)> {
    let positive = |field, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err((field, format!("must be a positive finite number, got {v}")))
        }
    };
    positive("identity", t.identity)?;
    positive("reference", t.reference)?;
    positive("convexity", t.convexity)?;
    positive("domination", t.domination)?;
    if t.reference < MIN_REFERENCE_REL_TOL {
        return Err((
            "reference",
            format!("must be at least {MIN_REFERENCE_REL_TOL}, got {}", t.reference),
        ));
    }
    if t.convexity_grid < 3 {
        return Err((
            "convexity_grid",
            format!("needs at least 3 points, got {}", t.convexity_grid),
        ));
    }
    Ok(())
}

fn validate_entry(raw: RawEntry, lines: &Lines<'_>) -> Result<CorpusEntry, ConfigError> {
    let name = raw.name.get_ref().clone();
    let fail = |span: std::ops::Range<usize>, field, message: String| {
        ConfigError::Invalid(Diagnostic {
            line: lines.of(span.start),
            entry: Some(name.clone()),
            field,
            message,
        })
    };
    if name.trim().is_empty() {
        return Err(fail(raw.name.span(), "name", "must not be empty".into()));
    }

    let source = raw.expression.get_ref();
    let function = parse(source).map_err(|e: ParseError| {
        fail(raw.expression.span(), "expression", format!("`{source}`: {e}"))
    })?;

    let (a, b) = (*raw.a.get_ref(), *raw.b.get_ref());
    if !a.is_finite() {
        return Err(fail(raw.a.span(), "a", format!("must be finite, got {a}")));
    }
    if !b.is_finite() {
        return Err(fail(raw.b.span(), "b", format!("must be finite, got {b}")));
    }
    let interval = Interval::new(a, b)
        .map_err(|_| fail(raw.b.span(), "b", format!("a ({a}) must be less than b ({b})")))?;

    let n_span = raw.n_values.span();
    if raw.n_values.get_ref().is_empty() {
        return Err(fail(n_span, "n_values", "must not be empty".into()));
    }
    let n_values = raw
        .n_values
        .get_ref()
        .iter()
        .map(|&n| {
            RuleOrder::new(n).map_err(|_| {
                fail(
                    n_span.clone(),
                    "n_values",
                    format!("order {n} is outside 1..={}", RuleOrder::MAX),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let q_grid = match raw.q_grid {
        None => DEFAULT_Q_GRID.to_vec(),
        Some(q) => {
            let span = q.span();
            let q = q.into_inner();
            if q.is_empty() {
                return Err(fail(span, "q_grid", "must not be empty".into()));
            }
            if let Some(bad) = q.iter().find(|q| !(q.is_finite() && **q >= 1.0)) {
                return Err(fail(span, "q_grid", format!("entries must be finite and >= 1, got {bad}")));
            }
            q
        }
    };

    Ok(CorpusEntry {
        name,
        expression: source.clone(),
        function,
        interval,
        n_values,
        q_grid,
    })
}

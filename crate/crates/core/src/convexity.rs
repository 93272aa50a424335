//! Sampled midpoint-convexity certificates.
//!
//! A function `g` is convex iff `g(tx + (1-t)y) <= t g(x) + (1-t) g(y)`. For
//! continuous `g` it suffices to check `t = 1/2`, which is what is done here
//! on a uniform grid: every pair of grid points whose midpoint is itself a
//! grid point contributes the defect `g((x+y)/2) - (g(x) + g(y))/2`. A
//! certificate is evidence, not proof; convexity between grid points is never
//! observed.

use thiserror::Error;

use crate::expr::{eval_jet, EvalError, Expression};
use crate::kernel::RuleOrder;
use crate::quadrature::Interval;

pub const DEFAULT_GRID_POINTS: usize = 129;
pub const DEFAULT_DEFECT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvexityError {
    #[error("convexity grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("convexity exponent must be finite and at least 1, got {0}")]
    InvalidExponent(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// What was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `|f^(n)|`
    AbsDeriv,
    /// `|f^(n)|^q`
    AbsDerivPowQ,
    /// `f` itself, no absolute value.
    Function,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityCertificate {
    pub target: Target,
    pub q: Option<f64>,
    pub grid_points: usize,
    pub max_violation: f64,
    pub certified: bool,
}

/// Largest midpoint defect over all on-grid midpoint pairs of `samples`.
/// Never negative: the pair `(i, i)` contributes zero.
pub fn max_midpoint_defect(samples: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..samples.len() {
        for j in (i + 2..samples.len()).step_by(2) {
            let defect = samples[(i + j) / 2] - 0.5 * (samples[i] + samples[j]);
            worst = worst.max(defect);
        }
    }
    worst
}

/// `(max_violation, certified)` for sampled values at relative tolerance
/// `tol`, scaled by `1 + max|g|`.
pub fn judge_samples(samples: &[f64], tol: f64) -> (f64, bool) {
    let violation = max_midpoint_defect(samples);
    let scale = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (violation, violation <= tol * (1.0 + scale))
}

fn grid(iv: Interval, m: usize) -> impl Iterator<Item = f64> {
    let last = (m - 1) as f64;
    (0..m).map(move |i| {
        if i + 1 == m {
            iv.b()
        } else {
            iv.a() + iv.width() * (i as f64 / last)
        }
    })
}

/// Certify that `|f^(n)|` (or `|f^(n)|^q` when `q` is given) is convex on
/// `iv`, sampling `m` points, at the default defect tolerance.
pub fn certify(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
    q: Option<f64>,
    m: usize,
) -> Result<ConvexityCertificate, ConvexityError> {
    certify_with_tolerance(f, iv, n, q, m, DEFAULT_DEFECT_TOL)
}

pub fn certify_with_tolerance(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
    q: Option<f64>,
    m: usize,
    tol: f64,
) -> Result<ConvexityCertificate, ConvexityError> {
    if m < 3 {
        return Err(ConvexityError::GridTooSmall(m));
    }
    if let Some(q) = q {
        if !(q.is_finite() && q >= 1.0) {
            return Err(ConvexityError::InvalidExponent(q));
        }
    }
    let order = n.as_usize();
    let samples = grid(iv, m)
        .map(|x| {
            let g = eval_jet(f, x, order)?.deriv(order).abs();
            Ok(q.map_or(g, |q| g.powf(q)))
        })
        .collect::<Result<Vec<_>, ConvexityError>>()?;
    let (max_violation, certified) = judge_samples(&samples, tol);
    Ok(ConvexityCertificate {
        target: if q.is_some() {
            Target::AbsDerivPowQ
        } else {
            Target::AbsDeriv
        },
        q,
        grid_points: m,
        max_violation,
        certified,
    })
}

/// Certify that `f` itself is convex on `iv`.
pub fn certify_function(
    f: &Expression,
    iv: Interval,
    m: usize,
    tol: f64,
) -> Result<ConvexityCertificate, ConvexityError> {
    if m < 3 {
        return Err(ConvexityError::GridTooSmall(m));
    }
    let samples = grid(iv, m)
        .map(|x| f.eval(x))
        .collect::<Result<Vec<_>, _>>()?;
    let (max_violation, certified) = judge_samples(&samples, tol);
    Ok(ConvexityCertificate {
        target: Target::Function,
        q: None,
        grid_points: m,
        max_violation,
        certified,
    })
}

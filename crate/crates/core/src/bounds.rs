//! Error bounds for the corrected midpoint rule.
//!
//! All three bounds take the endpoint magnitudes `A = |f^(n)(a)|` and
//! `B = |f^(n)(b)|` and hold under a convexity hypothesis on `|f^(n)|`
//! (for [`bound_convex`]) or on `|f^(n)|^q` (for [`bound_holder`] and
//! [`bound_power_mean`]). Checking the hypothesis is the job of
//! [`crate::convexity`].

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{factorial, RuleOrder};
use crate::quadrature::Interval;

/// Exponents tried by default when searching for the tightest bound.
pub const DEFAULT_Q_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 5.0];

/// Two bound values closer than this (relative) count as a tie.
pub const TIE_REL_TOL: f64 = 1e-12;

const CONJUGACY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("endpoint derivative magnitudes must be finite and non-negative, got A = {a}, B = {b}")]
    InvalidEndpoints { a: f64, b: f64 },
    #[error("Hölder exponents p = {p}, q = {q} are not conjugate with q > 1")]
    InvalidHolder { p: f64, q: f64 },
    #[error("power-mean exponent must be at least 1, got {0}")]
    InvalidPowerMean(f64),
    #[error("q grid is empty")]
    EmptyGrid,
}

/// `A = |f^(n)(a)|` and `B = |f^(n)(b)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointDerivs {
    a: f64,
    b: f64,
}

impl EndpointDerivs {
    pub fn new(a: f64, b: f64) -> Result<Self, BoundsError> {
        if a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 {
            Ok(EndpointDerivs { a, b })
        } else {
            Err(BoundsError::InvalidEndpoints { a, b })
        }
    }

    /// Takes absolute values of raw derivative values.
    pub fn from_derivs(fa: f64, fb: f64) -> Result<Self, BoundsError> {
        Self::new(fa.abs(), fb.abs())
    }

    pub fn at_a(&self) -> f64 {
        self.a
    }

    pub fn at_b(&self) -> f64 {
        self.b
    }

    pub fn swapped(&self) -> Self {
        EndpointDerivs {
            a: self.b,
            b: self.a,
        }
    }
}

/// Conjugate exponents, `1/p + 1/q = 1` with `q > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderExponents {
    p: f64,
    q: f64,
}

impl HolderExponents {
    pub fn new(p: f64, q: f64) -> Result<Self, BoundsError> {
        let sum = 1.0 / p + 1.0 / q;
        if q.is_finite() && p.is_finite() && q > 1.0 && p > 1.0 && (sum - 1.0).abs() <= CONJUGACY_REL_TOL {
            Ok(HolderExponents { p, q })
        } else {
            Err(BoundsError::InvalidHolder { p, q })
        }
    }

    /// The conjugate pair with the given `q`, `p = q / (q - 1)`.
    pub fn from_q(q: f64) -> Result<Self, BoundsError> {
        Self::new(q / (q - 1.0), q)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Theorem {
    Convex,
    Holder,
    PowerMean,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Convex => "convex",
            Theorem::Holder => "holder",
            Theorem::PowerMean => "power_mean",
        })
    }
}

/// One bound value together with what is known about its hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub value: f64,
    /// `None` for the convex bound.
    pub q_used: Option<f64>,
    pub hypothesis_certified: bool,
    /// `|∫f - rule|` when known.
    pub actual_error: Option<f64>,
}

impl BoundReport {
    /// Whether `actual_error <= value (1 + rel) + abs`. `None` when no error
    /// has been attached.
    pub fn dominates(&self, rel: f64, abs: f64) -> Option<bool> {
        self.actual_error.map(|e| e <= self.value * (1.0 + rel) + abs)
    }
}

fn prefactor(iv: Interval, n: RuleOrder, denominator: f64) -> f64 {
    iv.width().powi(n.get() as i32 + 1) / denominator
}

/// `(b-a)^{n+1} / (2^n (n+1)!) · (A + B) / 2`.
pub fn bound_convex(n: RuleOrder, iv: Interval, d: EndpointDerivs) -> f64 {
    let k = n.get();
    prefactor(iv, n, 2f64.powi(k as i32) * factorial(k + 1)) * (d.a + d.b) / 2.0
}

/// `(b-a)^{n+1} / (2^{n+1} n!) · (1/(np+1))^{1/p}
///   · { ((A^q + 3B^q)/4)^{1/q} + ((3A^q + B^q)/4)^{1/q} }`.
pub fn bound_holder(n: RuleOrder, iv: Interval, d: EndpointDerivs, exps: HolderExponents) -> f64 {
    let k = n.get();
    let (p, q) = (exps.p, exps.q);
    let aq = d.a.powf(q);
    let bq = d.b.powf(q);
    let bracket = ((aq + 3.0 * bq) / 4.0).powf(1.0 / q) + ((3.0 * aq + bq) / 4.0).powf(1.0 / q);
    prefactor(iv, n, 2f64.powi(k as i32 + 1) * factorial(k))
        * (1.0 / (f64::from(k) * p + 1.0)).powf(1.0 / p)
        * bracket
}

/// `(b-a)^{n+1} / (2^{n+1} (n+1)!) · { [w₁A^q + w₃B^q]^{1/q} + [w₃A^q + w₁B^q]^{1/q} }`
/// with `w₁ = (n+1)/(2n+4)` and `w₃ = (n+3)/(2n+4)`.
pub fn bound_power_mean(
    n: RuleOrder,
    iv: Interval,
    d: EndpointDerivs,
    q: f64,
) -> Result<f64, BoundsError> {
    if q.is_nan() || q < 1.0 || q.is_infinite() {
        return Err(BoundsError::InvalidPowerMean(q));
    }
    let k = f64::from(n.get());
    let near = (k + 1.0) / (2.0 * k + 4.0);
    let far = (k + 3.0) / (2.0 * k + 4.0);
    let aq = d.a.powf(q);
    let bq = d.b.powf(q);
    let bracket = (near * aq + far * bq).powf(1.0 / q) + (far * aq + near * bq).powf(1.0 / q);
    Ok(prefactor(iv, n, 2f64.powi(n.get() as i32 + 1) * factorial(n.get() + 1)) * bracket)
}

/// Every bound the grid allows: the convex bound, the Hölder bound for each
/// `q > 1`, and the power-mean bound for each `q`.
pub fn all_bounds(
    n: RuleOrder,
    iv: Interval,
    d: EndpointDerivs,
    q_grid: &[f64],
) -> Result<Vec<BoundReport>, BoundsError> {
    if q_grid.is_empty() {
        return Err(BoundsError::EmptyGrid);
    }
    let report = |theorem, value, q_used| BoundReport {
        theorem,
        value,
        q_used,
        hypothesis_certified: false,
        actual_error: None,
    };
    let mut out = vec![report(Theorem::Convex, bound_convex(n, iv, d), None)];
    for &q in q_grid {
        if q.is_nan() || q < 1.0 {
            return Err(BoundsError::InvalidPowerMean(q));
        }
        if q > 1.0 {
            let exps = HolderExponents::from_q(q)?;
            out.push(report(Theorem::Holder, bound_holder(n, iv, d, exps), Some(q)));
        }
    }
    for &q in q_grid {
        out.push(report(Theorem::PowerMean, bound_power_mean(n, iv, d, q)?, Some(q)));
    }
    Ok(out)
}

/// The smallest of `candidates`. Values within [`TIE_REL_TOL`] of each other
/// tie; ties go to the lower theorem and then to the smaller `q`.
pub fn select_best(candidates: &[BoundReport]) -> Option<BoundReport> {
    let precedes = |c: &BoundReport, b: &BoundReport| {
        let cq = c.q_used.unwrap_or(f64::NEG_INFINITY);
        let bq = b.q_used.unwrap_or(f64::NEG_INFINITY);
        c.theorem < b.theorem || (c.theorem == b.theorem && cq < bq)
    };
    candidates.iter().copied().reduce(|best, c| {
        let tie = (c.value - best.value).abs() <= TIE_REL_TOL * best.value.max(c.value);
        if (tie && precedes(&c, &best)) || (!tie && c.value < best.value) {
            c
        } else {
            best
        }
    })
}

/// The tightest of [`all_bounds`].
pub fn best_bound(
    n: RuleOrder,
    iv: Interval,
    d: EndpointDerivs,
    q_grid: &[f64],
) -> Result<BoundReport, BoundsError> {
    let all = all_bounds(n, iv, d, q_grid)?;
    Ok(select_best(&all).expect("the convex bound is always present"))
}

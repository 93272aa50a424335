//! The corrected midpoint rule
//!
//! ```text
//! ∫ₐᵇ f = Σ_{k<n} (1+(-1)^k)/(2^{k+1}(k+1)!) (b-a)^{k+1} f^(k)((a+b)/2)
//!       + (b-a)^{n+1} ∫₀¹ M_n(t) f^(n)(ta + (1-t)b) dt
//! ```
//!
//! together with an independent adaptive reference for the left-hand side.

pub mod adaptive;
pub mod gauss;

use thiserror::Error;

use crate::expr::{eval_jet, EvalError, Expression};
use crate::kernel::{factorial, kernel_value, RuleOrder};

/// Default relative tolerance of [`reference_integral`].
pub const REFERENCE_REL_TOL: f64 = 1e-12;
/// Tightest tolerance [`reference_integral`] accepts.
pub const MIN_REFERENCE_REL_TOL: f64 = 1e-13;
/// Agreement required between successive panel refinements of the remainder.
pub const REMAINDER_REL_TOL: f64 = 1e-11;
/// Panel count at which remainder refinement gives up.
pub const MAX_REMAINDER_PANELS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("reference tolerance {0} is below the supported minimum {MIN_REFERENCE_REL_TOL}")]
    ToleranceTooTight(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("remainder integral did not settle after {panels} panels per half")]
    RemainderNotConverged { panels: usize },
    #[error("reference integral exceeded the bisection depth limit")]
    SubdivisionLimit,
    #[error("reference integral exceeded the subinterval budget")]
    SegmentLimit,
}

/// A finite interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, QuadratureError> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(QuadratureError::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// The point `t a + (1 - t) b`; `t = 0` is `b`.
    pub fn along(&self, t: f64) -> f64 {
        t * self.a + (1.0 - t) * self.b
    }
}

/// The three pieces of the identity for one `(f, [a, b], n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub rule_value: f64,
    pub remainder: f64,
    pub reference: f64,
}

impl QuadratureResult {
    /// `|rule_value + remainder - reference|`.
    pub fn identity_residual(&self) -> f64 {
        (self.rule_value + self.remainder - self.reference).abs()
    }

    /// `|reference - rule_value|`, the error of the rule alone.
    pub fn actual_error(&self) -> f64 {
        (self.reference - self.rule_value).abs()
    }
}

/// `(1 + (-1)^k) / (2^{k+1} (k+1)!)`, zero for odd `k`.
pub fn rule_coefficient(k: u32) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    (1.0 + sign) / (2f64.powi(k as i32 + 1) * factorial(k + 1))
}

/// The `n`-term corrected midpoint approximation of `∫ₐᵇ f`.
pub fn corrected_midpoint(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
) -> Result<f64, QuadratureError> {
    let jet = eval_jet(f, iv.midpoint(), n.as_usize() - 1)?;
    let h = iv.width();
    let mut sum = 0.0;
    for k in 0..n.get() {
        sum += rule_coefficient(k) * h.powi(k as i32 + 1) * jet.deriv(k as usize);
    }
    Ok(sum)
}

/// `(b-a)^{n+1} ∫₀¹ M_n(t) f^(n)(ta + (1-t)b) dt`.
///
/// Each half `[0, 1/2]` and `[1/2, 1]` is integrated by composite Gauss
/// panels, doubling the panel count until two successive sums agree.
pub fn remainder_integral(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
) -> Result<f64, QuadratureError> {
    let order = n.as_usize();
    let mut integrand = |t: f64| -> Result<f64, QuadratureError> {
        let d = eval_jet(f, iv.along(t), order)?.deriv(order);
        Ok(kernel_value(n, t).expect("nodes lie in [0, 1]") * d)
    };
    let mut total = 0.0;
    for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
        total += refine_panels(&mut integrand, lo, hi)?;
    }
    Ok(iv.width().powi(n.get() as i32 + 1) * total)
}

fn refine_panels(
    g: &mut impl FnMut(f64) -> Result<f64, QuadratureError>,
    lo: f64,
    hi: f64,
) -> Result<f64, QuadratureError> {
    let mut panels = 1;
    let (mut previous, _) = gauss::composite(g, lo, hi, panels)?;
    while panels < MAX_REMAINDER_PANELS {
        panels *= 2;
        let (current, current_abs) = gauss::composite(g, lo, hi, panels)?;
        // Measured against ∫|g| so that halves which cancel internally
        // still converge.
        if (current - previous).abs() <= REMAINDER_REL_TOL * current_abs {
            return Ok(current);
        }
        previous = current;
    }
    Err(QuadratureError::RemainderNotConverged { panels })
}

/// `∫ₐᵇ f` by adaptive Gauss-Kronrod with estimated relative error at most
/// `rel_tol`.
pub fn reference_integral(
    f: &Expression,
    iv: Interval,
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    if rel_tol.is_nan() || rel_tol < MIN_REFERENCE_REL_TOL {
        return Err(QuadratureError::ToleranceTooTight(rel_tol));
    }
    let mut g = |x: f64| f.eval(x);
    adaptive::integrate(&mut g, iv.a(), iv.b(), rel_tol)
        .map(|est| est.value)
        .map_err(|e| match e {
            adaptive::Failure::Eval(e) => QuadratureError::Eval(e),
            adaptive::Failure::DepthExceeded => QuadratureError::SubdivisionLimit,
            adaptive::Failure::TooManySegments => QuadratureError::SegmentLimit,
        })
}

/// All three pieces of the identity, reference at [`REFERENCE_REL_TOL`].
pub fn check_identity(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
) -> Result<QuadratureResult, QuadratureError> {
    check_identity_with(f, iv, n, REFERENCE_REL_TOL)
}

pub fn check_identity_with(
    f: &Expression,
    iv: Interval,
    n: RuleOrder,
    reference_rel_tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    Ok(QuadratureResult {
        rule_value: corrected_midpoint(f, iv, n)?,
        remainder: remainder_integral(f, iv, n)?,
        reference: reference_integral(f, iv, reference_rel_tol)?,
    })
}

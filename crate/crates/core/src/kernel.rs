//! The piecewise remainder kernel of the corrected midpoint rule,
//! `M_n(t) = t^n/n!` on `[0, 1/2]` and `(t-1)^n/n!` on `(1/2, 1]`.

use std::fmt;

use thiserror::Error;

use crate::expr::MAX_JET_ORDER;

/// Order `n` of the rule. The rule needs derivatives up to order `n`, so `n`
/// is capped by [`MAX_JET_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleOrder(u32);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("rule order must be between 1 and {max}, got {0}", max = MAX_JET_ORDER)]
    InvalidOrder(i64),
    #[error("kernel argument {0} lies outside [0, 1]")]
    OutOfRange(f64),
}

impl RuleOrder {
    pub const MAX: u32 = MAX_JET_ORDER as u32;

    pub fn new(n: i64) -> Result<Self, KernelError> {
        if (1..=Self::MAX as i64).contains(&n) {
            Ok(RuleOrder(n as u32))
        } else {
            Err(KernelError::InvalidOrder(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RuleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `k!` as `f64`, exact for every `k` used here (`k <= 13`).
pub fn factorial(k: u32) -> f64 {
    (2..=k).map(f64::from).product()
}

/// `M_n(t)`. The midpoint `t = 1/2` belongs to the left branch.
pub fn kernel_value(n: RuleOrder, t: f64) -> Result<f64, KernelError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(KernelError::OutOfRange(t));
    }
    let n = n.get();
    let base = if t <= 0.5 { t } else { t - 1.0 };
    Ok(base.powi(n as i32) / factorial(n))
}

/// `∫₀¹ |M_n(t)| dt = 1 / (2^n (n+1)!)`.
pub fn kernel_l1_norm(n: RuleOrder) -> f64 {
    let n = n.get();
    1.0 / (2f64.powi(n as i32) * factorial(n + 1))
}

/// Samples `(t, M_n(t))` on the grid `t = i/1000`, `i = 0..=1000`.
pub fn kernel_table(n: RuleOrder) -> Vec<(f64, f64)> {
    (0..=1000)
        .map(|i| {
            let t = f64::from(i) / 1000.0;
            (t, kernel_value(n, t).expect("grid lies in [0, 1]"))
        })
        .collect()
}

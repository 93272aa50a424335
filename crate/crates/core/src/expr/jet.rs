//! Taylor-mode forward differentiation.
//!
//! Every node is evaluated to its truncated Taylor series in `h` around the
//! evaluation point, `f(x + h) = Σ c_k h^k`. The derivatives are recovered at
//! the end as `f^(k)(x) = k! c_k`.

use super::{BinaryOp, DomainKind, EvalError, Exponent, Expression, Node, UnaryOp};

/// Highest derivative order a jet may request. Rescaling Taylor coefficients
/// by `k!` costs accuracy as the order grows.
pub const MAX_JET_ORDER: usize = 12;

/// Derivative values `f(x), f'(x), ..., f^(N)(x)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    point: f64,
    derivs: Vec<f64>,
}

impl Jet {
    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn value(&self) -> f64 {
        self.derivs[0]
    }

    /// The `k`-th derivative. Panics when `k` exceeds the jet order.
    pub fn deriv(&self, k: usize) -> f64 {
        self.derivs[k]
    }
}

/// Evaluate `f` and its first `order` derivatives at `x`.
pub fn eval_jet(f: &Expression, x: f64, order: usize) -> Result<Jet, EvalError> {
    if order > MAX_JET_ORDER {
        return Err(EvalError::OrderTooHigh {
            order,
            max: MAX_JET_ORDER,
        });
    }
    let ctx = Ctx { x, len: order + 1 };
    let mut coeffs = ctx.eval(f.root())?;
    let mut factorial = 1.0;
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k > 1 {
            factorial *= k as f64;
        }
        *c *= factorial;
        if !c.is_finite() {
            return Err(EvalError::NonFinite { order: k, x });
        }
    }
    Ok(Jet {
        point: x,
        derivs: coeffs,
    })
}

type Series = Vec<f64>;

struct Ctx {
    x: f64,
    len: usize,
}

impl Ctx {
    fn domain(&self, kind: DomainKind) -> EvalError {
        EvalError::Domain { kind, x: self.x }
    }

    fn constant(&self, c: f64) -> Series {
        let mut s = vec![0.0; self.len];
        s[0] = c;
        s
    }

    fn eval(&self, node: &Node) -> Result<Series, EvalError> {
        match node {
            Node::Const(c) => Ok(self.constant(*c)),
            Node::Var => {
                let mut s = self.constant(self.x);
                if self.len > 1 {
                    s[1] = 1.0;
                }
                Ok(s)
            }
            Node::Unary(op, arg) => {
                let a = self.eval(arg)?;
                self.unary(*op, &a)
            }
            Node::Binary(op, l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                match op {
                    BinaryOp::Add => Ok(a.iter().zip(&b).map(|(p, q)| p + q).collect()),
                    BinaryOp::Sub => Ok(a.iter().zip(&b).map(|(p, q)| p - q).collect()),
                    BinaryOp::Mul => Ok(mul(&a, &b)),
                    BinaryOp::Div => self.div(&a, &b),
                }
            }
            Node::Pow(base, exponent) => {
                let a = self.eval(base)?;
                match *exponent {
                    Exponent::Int(k) => self.powi(&a, k),
                    Exponent::Real(r) => {
                        if a[0] <= 0.0 {
                            return Err(self.domain(DomainKind::FractionalPowerNonPositive));
                        }
                        let log = ln(&a);
                        Ok(exp(&log.iter().map(|c| r * c).collect::<Vec<_>>()))
                    }
                }
            }
        }
    }

    fn unary(&self, op: UnaryOp, a: &[f64]) -> Result<Series, EvalError> {
        match op {
            UnaryOp::Neg => Ok(a.iter().map(|c| -c).collect()),
            UnaryOp::Exp => Ok(exp(a)),
            UnaryOp::Ln => {
                if a[0] <= 0.0 {
                    return Err(self.domain(DomainKind::LnNonPositive));
                }
                Ok(ln(a))
            }
            UnaryOp::Sin => Ok(sin_cos(a).0),
            UnaryOp::Cos => Ok(sin_cos(a).1),
            UnaryOp::Sqrt => {
                // sqrt(0) has a value but no derivatives.
                if a[0] < 0.0 || (a[0] == 0.0 && a.len() > 1) {
                    return Err(self.domain(DomainKind::SqrtNonPositive));
                }
                Ok(sqrt(a))
            }
        }
    }

    fn div(&self, a: &[f64], b: &[f64]) -> Result<Series, EvalError> {
        if b[0] == 0.0 {
            return Err(self.domain(DomainKind::DivisionByZero));
        }
        let mut q = vec![0.0; a.len()];
        for k in 0..a.len() {
            let mut acc = a[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b[0];
        }
        Ok(q)
    }

    fn powi(&self, a: &[f64], k: i64) -> Result<Series, EvalError> {
        let mut result = self.constant(1.0);
        let mut base = a.to_vec();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base);
            }
        }
        if k < 0 {
            self.div(&self.constant(1.0), &result)
        } else {
            Ok(result)
        }
    }
}

fn mul(a: &[f64], b: &[f64]) -> Series {
    (0..a.len())
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

// e' = a' e, so k e_k = Σ_{j=1..k} j a_j e_{k-j}.
fn exp(a: &[f64]) -> Series {
    let mut e = vec![0.0; a.len()];
    e[0] = a[0].exp();
    for k in 1..a.len() {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e[k] = acc / k as f64;
    }
    e
}

// a l' = a', so l_k = (a_k - (1/k) Σ_{j=1..k-1} j l_j a_{k-j}) / a_0.
fn ln(a: &[f64]) -> Series {
    let mut l = vec![0.0; a.len()];
    l[0] = a[0].ln();
    for k in 1..a.len() {
        let acc: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
        l[k] = (a[k] - acc / k as f64) / a[0];
    }
    l
}

fn sin_cos(a: &[f64]) -> (Series, Series) {
    let mut s = vec![0.0; a.len()];
    let mut c = vec![0.0; a.len()];
    (s[0], c[0]) = a[0].sin_cos();
    for k in 1..a.len() {
        let mut sk = 0.0;
        let mut ck = 0.0;
        for j in 1..=k {
            let w = j as f64 * a[j];
            sk += w * c[k - j];
            ck -= w * s[k - j];
        }
        s[k] = sk / k as f64;
        c[k] = ck / k as f64;
    }
    (s, c)
}

// r^2 = a, so r_k = (a_k - Σ_{j=1..k-1} r_j r_{k-j}) / (2 r_0).
fn sqrt(a: &[f64]) -> Series {
    let mut r = vec![0.0; a.len()];
    r[0] = a[0].sqrt();
    for k in 1..a.len() {
        let acc: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
        r[k] = (a[k] - acc) / (2.0 * r[0]);
    }
    r
}

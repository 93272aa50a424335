//! Fixed Gauss-Legendre rules and composite panel integration.

use std::sync::OnceLock;

/// Number of nodes per panel used by [`composite`].
pub const PANEL_NODES: usize = 10;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`,
/// ascending in the node.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "a Gauss rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_m.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                let (_, d) = legendre(m, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

// P_m(z) and P_m'(z) by the three-term recurrence.
fn legendre(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Composite sums over `panels` equal panels of `[lo, hi]`: the integral of
/// `g` and the integral of `|g|`.
pub fn composite<E>(
    g: &mut impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Result<(f64, f64), E> {
    let (nodes, weights) = panel_rule();
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    let mut total_abs = 0.0;
    for p in 0..panels {
        let left = lo + h * p as f64;
        let centre = left + 0.5 * h;
        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let v = g(centre + 0.5 * h * x)?;
            sum += w * v;
            sum_abs += w * v.abs();
        }
        total += 0.5 * h * sum;
        total_abs += 0.5 * h * sum_abs;
    }
    Ok((total, total_abs))
}

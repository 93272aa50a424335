//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Deepest bisection level before giving up.
pub const MAX_DEPTH: u32 = 60;
/// Upper bound on live subintervals.
pub const MAX_SEGMENTS: usize = 200_000;

// Kronrod abscissae on [0, 1); the Gauss points are the odd entries.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|`, used as the scale for rounding noise.
    pub abs_value: f64,
}

/// One G7/K15 evaluation on `[lo, hi]`.
pub fn gk15<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, lo: f64, hi: f64) -> Result<Estimate, E> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx)?;
        let f2 = f(centre + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs_value: abs * half.abs(),
    })
}

#[derive(Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    depth: u32,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Largest error first; ties resolved by position so runs are reproducible.
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .total_cmp(&other.est.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure<E> {
    Eval(E),
    DepthExceeded,
    TooManySegments,
}

/// Integrate `f` over `[lo, hi]` until the summed error estimate drops below
/// `rel_tol` times the integral, or below the rounding floor of the sum.
pub fn integrate<E>(
    f: &mut impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<Estimate, Failure<E>> {
    let first = gk15(f, lo, hi).map_err(Failure::Eval)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        depth: 0,
        est: first,
    });
    let mut value = first.value;
    let mut error = first.error;
    let mut abs_value = first.abs_value;
    loop {
        let floor = 50.0 * f64::EPSILON * abs_value;
        if error <= (rel_tol * value.abs()).max(floor) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= MAX_DEPTH {
            return Err(Failure::DepthExceeded);
        }
        if heap.len() + 2 > MAX_SEGMENTS {
            return Err(Failure::TooManySegments);
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gk15(f, worst.lo, mid).map_err(Failure::Eval)?;
        let right = gk15(f, mid, worst.hi).map_err(Failure::Eval)?;
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        abs_value += left.abs_value + right.abs_value - worst.est.abs_value;
        for (lo, hi, est) in [(worst.lo, mid, left), (mid, worst.hi, right)] {
            heap.push(Segment {
                lo,
                hi,
                depth: worst.depth + 1,
                est,
            });
        }
    }
    // Re-sum left to right so the result does not carry the drift of the
    // running updates.
    let mut segments = heap.into_vec();
    segments.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let total = segments.iter().fold(
        Estimate {
            value: 0.0,
            error: 0.0,
            abs_value: 0.0,
        },
        |acc, s| Estimate {
            value: acc.value + s.est.value,
            error: acc.error + s.est.error,
            abs_value: acc.abs_value + s.est.abs_value,
        },
    );
    Ok(total)
}

//! Adaptive numerical integration on closed intervals.
//!
//! The engine pairs a 7-point Gauss rule with its 15-point Kronrod
//! extension and bisects whichever subinterval currently carries the
//! largest error estimate until the requested tolerance is met. Callers
//! that know where an integrand loses smoothness (an `abs` kink, say)
//! should pass those points to [`integrate_with_breakpoints`] so the
//! refinement never has to discover them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::EvalError;
use crate::kahan::KahanSum;

/// Closed integration interval `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, QuadratureError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(QuadratureError::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Uniform grid of `n >= 2` points including both endpoints.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.length() / (n - 1) as f64;
        let (a, b) = (self.a, self.b);
        (0..n).map(move |j| if j == n - 1 { b } else { a + j as f64 * step })
    }
}

/// Tolerances and work limits for one integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 50,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_subdivisions >= 1 {
            Ok(())
        } else {
            Err(QuadratureError::InvalidConfig {
                rel_tol: self.rel_tol,
                abs_tol: self.abs_tol,
                max_subdivisions: self.max_subdivisions,
            })
        }
    }

    /// Caps both tolerances at `cap`, never loosening them. Bound
    /// computations use this to run their integrals 100x tighter than the
    /// tolerance they report against.
    pub fn tightened(&self, cap: f64) -> Self {
        QuadratureConfig {
            rel_tol: self.rel_tol.min(cap),
            abs_tol: self.abs_tol.min(cap),
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// Raises the subdivision budget to at least `limit`.
    pub fn with_min_subdivisions(&self, limit: usize) -> Self {
        QuadratureConfig {
            max_subdivisions: self.max_subdivisions.max(limit),
            ..*self
        }
    }
}

/// Value and accuracy diagnostics of one integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Absolute error estimate; bounds the achieved error for integrands
    /// that are piecewise smooth with finitely many kinks.
    pub error_estimate: f64,
    /// Number of bisections performed.
    pub subdivisions_used: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature config: rel_tol {rel_tol}, abs_tol {abs_tol}, max_subdivisions {max_subdivisions}")]
    InvalidConfig {
        rel_tol: f64,
        abs_tol: f64,
        max_subdivisions: usize,
    },
    #[error(
        "tolerance not reached after {} subdivisions: value {}, error estimate {}",
        .best.subdivisions_used, .best.value, .best.error_estimate
    )]
    ToleranceNotReached { best: IntegralResult },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

// 7-point Gauss / 15-point Kronrod pair (abscissae for the positive half
// axis of [-1, 1]; even indices are Kronrod-only nodes). Digits as in
// QUADPACK; the compiler rounds them to the nearest doubles.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

/// QUADPACK-style inflation of the raw `|kronrod - gauss|` difference so
/// the estimate stays a bound in the presence of roundoff.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if result_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / result_asc).powf(1.5);
        scaled = if scale < 1.0 {
            result_asc * scale
        } else {
            result_asc
        };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * result_abs);
    }
    scaled
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64), EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut gauss = 0.0;
    let mut kronrod = f_center * WGK[7];
    let mut result_abs = kronrod.abs();

    for j in 0..7 {
        let dx = half * XGK[j];
        let v1 = f(center - dx)?;
        let v2 = f(center + dx)?;
        fv1[j] = v1;
        fv2[j] = v2;
        kronrod += WGK[j] * (v1 + v2);
        result_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (v1 + v2);
        }
    }
    gauss += WG[3] * f_center;

    let mean = kronrod * 0.5;
    let mut result_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = rescale_error(
        (kronrod - gauss) * half,
        result_abs * half.abs(),
        result_asc * half.abs(),
    );
    Ok((kronrod * half, err))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.a == other.a
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Largest error first; ties broken by left endpoint so pops are
    // deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Integrates `f` over `interval` to the configured tolerance.
pub fn integrate<F>(
    f: F,
    interval: &Interval,
    config: &QuadratureConfig,
) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    integrate_with_breakpoints(f, interval, &[], config)
}

/// Integrates `f`, pre-splitting at the supplied break points.
///
/// Break points outside the open interval are ignored. The target accuracy
/// is `max(abs_tol, rel_tol * |value|)`; if the subdivision budget runs out
/// first, the best result is returned inside
/// [`QuadratureError::ToleranceNotReached`].
pub fn integrate_with_breakpoints<F>(
    f: F,
    interval: &Interval,
    breakpoints: &[f64],
    config: &QuadratureConfig,
) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    config.validate()?;

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > interval.a() && x < interval.b())
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(interval.a());
    edges.extend(cuts);
    edges.push(interval.b());

    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    for pair in edges.windows(2) {
        let (value, error) = gk15(&f, pair[0], pair[1])?;
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value,
            error,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let (total, err_total) = totals(&heap);
        let target = config.abs_tol.max(config.rel_tol * total.abs());
        if err_total <= target {
            return Ok(IntegralResult {
                value: total,
                error_estimate: err_total,
                subdivisions_used: subdivisions,
            });
        }
        if subdivisions >= config.max_subdivisions {
            return Err(QuadratureError::ToleranceNotReached {
                best: IntegralResult {
                    value: total,
                    error_estimate: err_total,
                    subdivisions_used: subdivisions,
                },
            });
        }

        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer representable; put it back and stop refining.
            heap.push(worst);
            let (total, err_total) = totals(&heap);
            return Err(QuadratureError::ToleranceNotReached {
                best: IntegralResult {
                    value: total,
                    error_estimate: err_total,
                    subdivisions_used: subdivisions,
                },
            });
        }
        let (lv, le) = gk15(&f, worst.a, mid)?;
        let (rv, re) = gk15(&f, mid, worst.b)?;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        subdivisions += 1;
    }
}

/// Compensated totals over the segments, summed in left-to-right order so
/// the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segments: Vec<&Segment> = heap.iter().collect();
    segments.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let mut value = KahanSum::new();
    let mut error = KahanSum::new();
    for seg in segments {
        value.add(seg.value);
        error.add(seg.error);
    }
    (value.total(), error.total())
}

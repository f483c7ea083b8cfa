//! Trapezoid-defect bounds for differentiable functions with convex
//! `|f'|^q`.
//!
//! For `f` differentiable on `[a, b]` the defect
//! `|(f(a) + f(b))/2 - (1/(b-a)) ∫ f|` is bounded by
//!
//! ```text
//! dragomir = (b-a) / (2 (p+1)^(1/p)) * [ (|f'(a)|^q + |f'(b)|^q) / 2 ]^(1/q)
//! ```
//!
//! and more tightly by
//!
//! ```text
//! refined = (b-a) / (4 (p+1)^(1/p)) * { [(2|f'(a)|^q + |f'(b)|^q)/3]^(1/q)
//!                                     + [(|f'(a)|^q + 2|f'(b)|^q)/3]^(1/q) }
//! ```
//!
//! The refined form never exceeds the first because `x^(1/q)` is concave.
//! The derivative is supplied explicitly: the bounds depend only on `|f'|`
//! at the endpoints and numeric differentiation noise would contaminate
//! the tight ordering checks, so construction of [`HHInput`] merely guards
//! against mismatched `f`/`f'` pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::holder_integral::ConjugateExponents;
use crate::quadrature::{
    integrate, integrate_with_breakpoints, Interval, QuadratureConfig, QuadratureError,
};
use crate::report::ReportTol;

/// Grid size used by [`hh_report`] for the convexity probe.
pub const CONVEXITY_SAMPLES: usize = 101;
/// Midpoint-convexity slack of the probe.
pub const CONVEXITY_SLACK: f64 = 1e-10;
/// Agreement required between the closed-form moment `1/(2(p+1))` and its
/// quadrature cross-check.
pub const MOMENT_CHECK_TOL: f64 = 1e-9;

/// Number of interior points at which the stated derivative is compared
/// against a finite difference of `f`.
const DERIVATIVE_CHECK_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HhError {
    #[error(
        "stated derivative disagrees with finite difference of f at x = {x}: stated {stated}, measured {measured}"
    )]
    DerivativeMismatch { x: f64, stated: f64, measured: f64 },
    #[error(
        "moment cross-check failed for p = {p}: quadrature {quadrature} vs closed form {closed_form}"
    )]
    MomentCheckFailed {
        p: f64,
        quadrature: f64,
        closed_form: f64,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A differentiable function, its stated derivative, the interval, and the
/// exponent pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HHInput {
    f: Expr,
    f_prime: Expr,
    interval: Interval,
    exps: ConjugateExponents,
}

impl HHInput {
    /// Validates that `f_prime` matches `f` numerically: a fourth-order
    /// central difference of `f` at 21 interior points must agree with
    /// `f_prime` within `max(1e-6, 1e-6 |f'|)`.
    pub fn new(
        f: Expr,
        f_prime: Expr,
        interval: Interval,
        exps: ConjugateExponents,
    ) -> Result<Self, HhError> {
        let h = interval.length() / 1000.0;
        for j in 1..=DERIVATIVE_CHECK_POINTS {
            let x =
                interval.a() + j as f64 * interval.length() / (DERIVATIVE_CHECK_POINTS + 1) as f64;
            let measured = (f.eval(x - 2.0 * h)? - 8.0 * f.eval(x - h)? + 8.0 * f.eval(x + h)?
                - f.eval(x + 2.0 * h)?)
                / (12.0 * h);
            let stated = f_prime.eval(x)?;
            if (measured - stated).abs() > 1e-6f64.max(1e-6 * stated.abs()) {
                return Err(HhError::DerivativeMismatch {
                    x,
                    stated,
                    measured,
                });
            }
        }
        Ok(HHInput {
            f,
            f_prime,
            interval,
            exps,
        })
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn f_prime(&self) -> &Expr {
        &self.f_prime
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn exps(&self) -> &ConjugateExponents {
        &self.exps
    }
}

/// All quantities of one trapezoid-defect comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HHReport {
    /// `|(f(a) + f(b))/2 - (1/(b-a)) ∫ f|`.
    pub defect: f64,
    pub dragomir: f64,
    pub refined: f64,
    /// Whether the midpoint-convexity probe accepted `|f'|^q`. A probe,
    /// not a proof; the bounds are computed either way.
    pub convexity_ok: bool,
    /// `refined <= dragomir` within tolerance, and `defect <= refined`
    /// whenever the convexity hypothesis was accepted.
    pub ordering_ok: bool,
}

/// `(1/2) ((2u+v)/3)^s + (1/2) ((u+2v)/3)^s`: the averaged shifted means
/// inside the refined bound.
pub fn power_mean_refined_average(u: f64, v: f64, s: f64) -> f64 {
    0.5 * ((2.0 * u + v) / 3.0).powf(s) + 0.5 * ((u + 2.0 * v) / 3.0).powf(s)
}

/// `((u+v)/2)^s`: the plain power mean inside the Dragomir bound.
pub fn power_mean_plain(u: f64, v: f64, s: f64) -> f64 {
    ((u + v) / 2.0).powf(s)
}

/// Trapezoid defect `|(f(a) + f(b))/2 - (1/(b-a)) ∫ f|`.
pub fn trapezoid_defect(input: &HHInput, cfg: &QuadratureConfig) -> Result<f64, HhError> {
    let iv = input.interval();
    let endpoint_mean = 0.5 * (input.f().eval(iv.a())? + input.f().eval(iv.b())?);
    let integral = integrate(|x| input.f().eval(x), iv, cfg)?.value;
    Ok((endpoint_mean - integral / iv.length()).abs())
}

fn endpoint_derivative_powers(input: &HHInput) -> Result<(f64, f64), HhError> {
    let q = input.exps().q();
    let u = input.f_prime().eval(input.interval().a())?.abs().powf(q);
    let v = input.f_prime().eval(input.interval().b())?.abs().powf(q);
    Ok((u, v))
}

/// The classical trapezoid bound
/// `(b-a)/(2(p+1)^(1/p)) * [(|f'(a)|^q + |f'(b)|^q)/2]^(1/q)`.
pub fn dragomir_bound(input: &HHInput) -> Result<f64, HhError> {
    let (u, v) = endpoint_derivative_powers(input)?;
    let p = input.exps().p();
    let scale = input.interval().length() / (2.0 * (p + 1.0).powf(1.0 / p));
    Ok(scale * power_mean_plain(u, v, 1.0 / input.exps().q()))
}

/// The refined trapezoid bound obtained through the linear-weight Hölder
/// refinement; never exceeds [`dragomir_bound`].
pub fn refined_hh_bound(input: &HHInput) -> Result<f64, HhError> {
    let (u, v) = endpoint_derivative_powers(input)?;
    let p = input.exps().p();
    let scale = input.interval().length() / (2.0 * (p + 1.0).powf(1.0 / p));
    Ok(scale * power_mean_refined_average(u, v, 1.0 / input.exps().q()))
}

/// Midpoint-convexity probe for `|e|^q` on a uniform grid.
///
/// Checks `|e((u+v)/2)|^q <= (|e(u)|^q + |e(v)|^q)/2 + 1e-10` over all grid
/// pairs. A sampling probe, not a proof.
pub fn convexity_probe(
    e: &Expr,
    q: f64,
    interval: &Interval,
    samples: usize,
) -> Result<bool, HhError> {
    assert!(samples >= 3, "convexity probe needs at least 3 samples");
    let xs: Vec<f64> = interval.grid(samples).collect();
    let mut powered = Vec::with_capacity(xs.len());
    for &x in &xs {
        powered.push(e.eval(x)?.abs().powf(q));
    }
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let mid = e.eval(0.5 * (xs[i] + xs[j]))?.abs().powf(q);
            if mid > 0.5 * (powered[i] + powered[j]) + CONVEXITY_SLACK {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Quadrature cross-check of the moment identity
/// `∫_0^1 t |1-2t|^p dt = 1/(2(p+1))` that the closed-form bounds rely on.
///
/// Returns `(quadrature value, closed form)`. The kink at `t = 1/2` is
/// declared to the integrator.
pub fn moment_cross_check(p: f64, cfg: &QuadratureConfig) -> Result<(f64, f64), QuadratureError> {
    let unit = Interval::new(0.0, 1.0)?;
    let quadrature = integrate_with_breakpoints(
        |t| Ok(t * (1.0 - 2.0 * t).abs().powf(p)),
        &unit,
        &[0.5],
        cfg,
    )?
    .value;
    Ok((quadrature, 1.0 / (2.0 * (p + 1.0))))
}

/// Computes defect, both bounds, the convexity flag, and the ordering
/// verdict, with `report_tol` as the comparison slack.
pub fn hh_report(
    input: &HHInput,
    cfg: &QuadratureConfig,
    report_tol: f64,
) -> Result<HHReport, HhError> {
    hh_report_with(input, cfg, &ReportTol::fixed(report_tol))
}

/// [`hh_report`] with the tolerance resolved from a policy once the
/// Dragomir bound is known.
pub fn hh_report_with(
    input: &HHInput,
    cfg: &QuadratureConfig,
    policy: &ReportTol,
) -> Result<HHReport, HhError> {
    let cfg = cfg.tightened(policy.quadrature_cap());

    // The closed forms bake in ∫ t|1-2t|^p dt = 1/(2(p+1)); make sure the
    // quadrature engine agrees before trusting them.
    let p = input.exps().p();
    let (moment, closed_form) = moment_cross_check(p, &cfg)?;
    if (moment - closed_form).abs() > MOMENT_CHECK_TOL {
        return Err(HhError::MomentCheckFailed {
            p,
            quadrature: moment,
            closed_form,
        });
    }

    let defect = trapezoid_defect(input, &cfg)?;
    let dragomir = dragomir_bound(input)?;
    let refined = refined_hh_bound(input)?;
    let convexity_ok = convexity_probe(
        input.f_prime(),
        input.exps().q(),
        input.interval(),
        CONVEXITY_SAMPLES,
    )?;
    let tol = policy.resolve(dragomir);
    let ordering_ok = refined <= dragomir + tol && (!convexity_ok || defect <= refined + tol);
    Ok(HHReport {
        defect,
        dragomir,
        refined,
        convexity_ok,
        ordering_ok,
    })
}

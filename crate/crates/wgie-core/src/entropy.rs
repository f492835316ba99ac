//! Entropy measures for weighted and doubly truncated variables.
//!
//! The central quantity is the weighted generalized interval entropy
//!
//! ```text
//! H(t1, t2) = 1/(beta - alpha) * log INT_{t1}^{t2} (x f(x) / dF)^(a+b-1) dx
//! ```
//!
//! with dF = F(t2) - F(t1). Closed forms exist for six families; everything
//! else goes through adaptive quadrature. The unconditional, residual and
//! past variants in this module are the full-support and one-sided limits of
//! the same integral.

use crate::dist::{window_mass, DistError, Model, Window};
use crate::numerics::{
    integrate_adaptive, integrate_to_infinity, ln_lower_gamma_diff, NumericsError, QuadratureSpec,
};
use std::error::Error;
use std::fmt;

/// Order pair (alpha, beta) with beta >= 1 and beta - 1 < alpha < beta.
///
/// That condition makes the exponent alpha + beta - 1 positive and the
/// prefactor 1/(beta - alpha) positive and finite, so the measure is well
/// defined without case splits. The sign of alpha + beta - 2 still matters
/// for the bound theorems and is exposed as `regime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder {
    alpha: f64,
    beta: f64,
}

/// Which side of alpha + beta = 2 an order lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Below,
    Boundary,
    Above,
}

impl EntropyOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, EntropyError> {
        if !alpha.is_finite() || !beta.is_finite() || beta < 1.0 || alpha <= beta - 1.0 || alpha >= beta
        {
            return Err(EntropyError::InvalidOrder(
                "order needs beta >= 1 and beta - 1 < alpha < beta",
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The integrand exponent alpha + beta - 1 (always positive).
    pub fn exponent(&self) -> f64 {
        self.alpha + self.beta - 1.0
    }

    /// The prefactor denominator beta - alpha (always in (0, 1)).
    pub fn gap(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn regime(&self) -> Regime {
        let s = self.alpha + self.beta - 2.0;
        if s < 0.0 {
            Regime::Below
        } else if s > 0.0 {
            Regime::Above
        } else {
            Regime::Boundary
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub method: Method,
    /// Estimated absolute error of `value`; exactly zero for closed forms.
    pub est_error: f64,
}

#[derive(Debug)]
pub enum EntropyError {
    InvalidOrder(&'static str),
    /// The defining integral does not converge; carries the offending
    /// integration endpoint (infinite for tail divergence).
    Divergent {
        endpoint: f64,
    },
    Dist(DistError),
    Numerics(NumericsError),
}

impl fmt::Display for EntropyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyError::InvalidOrder(m) => write!(f, "{m}"),
            EntropyError::Divergent { endpoint } => {
                write!(f, "entropy integral diverges at endpoint {endpoint}")
            }
            EntropyError::Dist(e) => write!(f, "{e}"),
            EntropyError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl Error for EntropyError {}

impl From<DistError> for EntropyError {
    fn from(e: DistError) -> Self {
        EntropyError::Dist(e)
    }
}

impl From<NumericsError> for EntropyError {
    fn from(e: NumericsError) -> Self {
        EntropyError::Numerics(e)
    }
}

const SINGULARITY_TOL: f64 = 1e-8;

/// log|b^s - a^s| for 0 <= a < b, computed without overflowing b^s. The
/// absolute difference is b^s - a^s for s > 0 and a^s - b^s for s < 0; the
/// dominant base carries the log and the other enters through log1p.
fn ln_pow_diff(a: f64, b: f64, s: f64) -> f64 {
    debug_assert!(s > 0.0 || a > 0.0, "a = 0 only makes sense for positive exponents");
    if a == 0.0 {
        return s * b.ln();
    }
    if s > 0.0 {
        s * b.ln() + (-(a / b).powf(s)).ln_1p()
    } else {
        s * a.ln() + (-(b / a).powf(s)).ln_1p()
    }
}

/// log(e^{-r a} - e^{-r b}) for 0 <= a < b, r > 0, stable for distant a, b.
fn ln_exp_diff(r: f64, a: f64, b: f64) -> f64 {
    -r * a + (-(-r * (b - a)).exp_m1()).ln()
}

/// Table of exact window entropies; `None` means "no formula here, use
/// quadrature" (unsupported family, window outside the derivation's region,
/// or a singular denominator).
pub fn closed_form_wgie(model: &Model, w: &Window, ord: &EntropyOrder) -> Option<EntropyValue> {
    let e = ord.exponent();
    let s = e + 1.0; // alpha + beta
    let gap = ord.gap();
    let (t1, t2) = (w.t1, w.t2);

    let log_integral = match *model {
        Model::Uniform { a, b } => {
            if t1 < a || t2 > b {
                return None;
            }
            // INT x^e dx / (t2-t1)^e; the support length cancels.
            ln_pow_diff(t1, t2, s) - s.ln() - e * (t2 - t1).ln()
        }
        Model::Exponential { rate } => {
            let g = ln_lower_gamma_diff(s, rate * e * t1, rate * e * t2).ok()?;
            g - rate.ln() - s * e.ln() - e * ln_exp_diff(rate, t1, t2)
        }
        Model::Power { a, b } => {
            if t2 > a {
                return None;
            }
            let m = b * e + 1.0;
            if m.abs() < SINGULARITY_TOL {
                return None;
            }
            e * b.ln() + ln_pow_diff(t1, t2, m) - m.ln() - e * ln_pow_diff(t1, t2, b)
        }
        Model::Beta1 { c } => {
            if t2 > 1.0 {
                return None;
            }
            let m = c * e + 1.0;
            if m.abs() < SINGULARITY_TOL {
                return None;
            }
            e * c.ln() + ln_pow_diff(t1, t2, m) - m.ln() - e * ln_pow_diff(t1, t2, c)
        }
        Model::ParetoI { a, b } => {
            if t1 < a {
                return None;
            }
            let m = 1.0 - b * e;
            if m.abs() < SINGULARITY_TOL {
                return None;
            }
            // (t2^m - t1^m)/m is positive on both sides of m = 0.
            let ln_num = ln_pow_diff(t1, t2, m) - m.abs().ln();
            e * b.ln() + ln_num - e * ln_pow_diff(t1, t2, -b)
        }
        Model::Gamma { shape, rate } => {
            let num = ln_lower_gamma_diff(shape * e + 1.0, rate * e * t1, rate * e * t2).ok()?;
            let den = ln_lower_gamma_diff(shape, rate * t1, rate * t2).ok()?;
            num - rate.ln() - (shape * e + 1.0) * e.ln() - e * den
        }
        _ => return None,
    };

    let value = log_integral / gap;
    if !value.is_finite() {
        return None;
    }
    Some(EntropyValue { value, method: Method::ClosedForm, est_error: 0.0 })
}

/// Window entropy by direct quadrature of the defining integral.
pub fn wgie_quadrature(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<EntropyValue, EntropyError> {
    let df = window_mass(model, w)?;
    let e = ord.exponent();
    let (lo, hi) = model.support();
    let a = w.t1.max(lo);
    let b = w.t2.min(hi);
    if a >= b {
        return Err(DistError::DegenerateWindow.into());
    }
    let spec = QuadratureSpec::default();
    let q = integrate_adaptive(|x| (x * model.pdf(x) / df).powf(e), a, b, &spec)
        .map_err(|err| match err {
            NumericsError::NoConvergence { .. } => EntropyError::Divergent { endpoint: b },
            other => other.into(),
        })?;
    let value = q.value.ln() / ord.gap();
    if !value.is_finite() {
        return Err(EntropyError::Divergent { endpoint: b });
    }
    Ok(EntropyValue {
        value,
        method: Method::Quadrature,
        est_error: q.error_bound / (q.value.abs() * ord.gap()),
    })
}

/// Weighted generalized interval entropy of the doubly truncated variable.
///
/// Uses the exact expression when one applies, quadrature otherwise.
pub fn wgie(model: &Model, w: &Window, ord: &EntropyOrder) -> Result<EntropyValue, EntropyError> {
    window_mass(model, w)?;
    if let Some(v) = closed_form_wgie(model, w, ord) {
        return Ok(v);
    }
    wgie_quadrature(model, w, ord)
}

/// Full-support weighted generalized entropy, the t1 -> 0, t2 -> infinity
/// limit of the window version.
pub fn weighted_generalized_entropy(
    model: &Model,
    ord: &EntropyOrder,
) -> Result<EntropyValue, EntropyError> {
    let e = ord.exponent();
    if let Model::ParetoI { b, .. } = *model {
        // (x f)^e ~ x^{-be} in the tail; the integral needs be > 1.
        if b * e <= 1.0 + SINGULARITY_TOL {
            return Err(EntropyError::Divergent { endpoint: f64::INFINITY });
        }
    }
    log_support_integral(model, move |x, fx| (x * fx).powf(e)).map(|(value, err)| EntropyValue {
        value: value / ord.gap(),
        method: Method::Quadrature,
        est_error: err / ord.gap(),
    })
}

/// Unweighted generalized entropy over the full support.
pub fn generalized_entropy(model: &Model, ord: &EntropyOrder) -> Result<EntropyValue, EntropyError> {
    let e = ord.exponent();
    if let Model::ParetoI { b, .. } = *model {
        if (b + 1.0) * e <= 1.0 + SINGULARITY_TOL {
            return Err(EntropyError::Divergent { endpoint: f64::INFINITY });
        }
    }
    log_support_integral(model, move |_, fx| fx.powf(e)).map(|(value, err)| EntropyValue {
        value: value / ord.gap(),
        method: Method::Quadrature,
        est_error: err / ord.gap(),
    })
}

/// log INT g(x, f(x)) dx over the whole support, with its relative error.
fn log_support_integral<G: Fn(f64, f64) -> f64>(
    model: &Model,
    g: G,
) -> Result<(f64, f64), EntropyError> {
    let (lo, hi) = model.support();
    let spec = QuadratureSpec::default();
    let integrand = |x: f64| g(x, model.pdf(x));
    let q = if hi.is_finite() {
        integrate_adaptive(integrand, lo, hi, &spec)
    } else {
        integrate_to_infinity(integrand, lo, &spec)
    }
    .map_err(|err| match err {
        NumericsError::NoConvergence { .. } => EntropyError::Divergent { endpoint: hi },
        other => other.into(),
    })?;
    let value = q.value.ln();
    if !value.is_finite() {
        return Err(EntropyError::Divergent { endpoint: hi });
    }
    Ok((value, q.error_bound / q.value.abs()))
}

fn check_renyi_order(alpha: f64) -> Result<(), EntropyError> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(EntropyError::InvalidOrder("Renyi order needs 0 < alpha != 1"));
    }
    Ok(())
}

/// Weighted Renyi entropy 1/(1-a) log INT (x f)^a over the support.
pub fn weighted_renyi(model: &Model, alpha: f64) -> Result<EntropyValue, EntropyError> {
    check_renyi_order(alpha)?;
    if let Model::ParetoI { b, .. } = *model {
        if b * alpha <= 1.0 + SINGULARITY_TOL {
            return Err(EntropyError::Divergent { endpoint: f64::INFINITY });
        }
    }
    log_support_integral(model, move |x, fx| (x * fx).powf(alpha)).map(|(value, err)| {
        EntropyValue {
            value: value / (1.0 - alpha),
            method: Method::Quadrature,
            est_error: (err / (1.0 - alpha)).abs(),
        }
    })
}

/// Residual variant: the window is (t, infinity) and the density is rescaled
/// by the survival at t.
pub fn weighted_residual_renyi(
    model: &Model,
    t: f64,
    alpha: f64,
) -> Result<EntropyValue, EntropyError> {
    check_renyi_order(alpha)?;
    let (lo, hi) = model.support();
    if t <= lo || t >= hi {
        return Err(DistError::InvalidWindow("truncation point outside the support").into());
    }
    if let Model::ParetoI { b, .. } = *model {
        if b * alpha <= 1.0 + SINGULARITY_TOL {
            return Err(EntropyError::Divergent { endpoint: f64::INFINITY });
        }
    }
    let sf = 1.0 - model.cdf(t);
    if sf <= crate::dist::DEGENERATE_MASS {
        return Err(DistError::DegenerateWindow.into());
    }
    let spec = QuadratureSpec::default();
    let integrand = |x: f64| (x * model.pdf(x) / sf).powf(alpha);
    let q = if hi.is_finite() {
        integrate_adaptive(integrand, t, hi, &spec)
    } else {
        integrate_to_infinity(integrand, t, &spec)
    }
    .map_err(|err| match err {
        NumericsError::NoConvergence { .. } => EntropyError::Divergent { endpoint: hi },
        other => EntropyError::from(other),
    })?;
    Ok(EntropyValue {
        value: q.value.ln() / (1.0 - alpha),
        method: Method::Quadrature,
        est_error: (q.error_bound / (q.value * (1.0 - alpha))).abs(),
    })
}

/// Past variant: the window is (support low, t) and the density is rescaled
/// by F(t).
pub fn weighted_past_renyi(
    model: &Model,
    t: f64,
    alpha: f64,
) -> Result<EntropyValue, EntropyError> {
    check_renyi_order(alpha)?;
    let (lo, hi) = model.support();
    if t <= lo || t > hi {
        return Err(DistError::InvalidWindow("truncation point outside the support").into());
    }
    let ft = model.cdf(t);
    if ft <= crate::dist::DEGENERATE_MASS {
        return Err(DistError::DegenerateWindow.into());
    }
    let spec = QuadratureSpec::default();
    let q = integrate_adaptive(|x| (x * model.pdf(x) / ft).powf(alpha), lo, t, &spec)?;
    Ok(EntropyValue {
        value: q.value.ln() / (1.0 - alpha),
        method: Method::Quadrature,
        est_error: (q.error_bound / (q.value * (1.0 - alpha))).abs(),
    })
}

/// Shannon entropy of the truncated variable: -INT p log p with
/// p = f/(F(t2)-F(t1)) over the window.
pub fn interval_shannon(model: &Model, w: &Window) -> Result<f64, EntropyError> {
    let df = window_mass(model, w)?;
    let (a, b) = clip_to_support(model, w)?;
    let spec = QuadratureSpec::default();
    let q = integrate_adaptive(
        |x| {
            let p = model.pdf(x) / df;
            if p <= 0.0 {
                0.0
            } else {
                -p * p.ln()
            }
        },
        a,
        b,
        &spec,
    )?;
    Ok(q.value)
}

/// Length-biased interval entropy: -INT x p log p, the weight multiplying
/// the integrand outside the logarithm.
pub fn weighted_interval_entropy(model: &Model, w: &Window) -> Result<f64, EntropyError> {
    let df = window_mass(model, w)?;
    let (a, b) = clip_to_support(model, w)?;
    let spec = QuadratureSpec::default();
    let q = integrate_adaptive(
        |x| {
            let p = model.pdf(x) / df;
            if p <= 0.0 {
                0.0
            } else {
                -x * p * p.ln()
            }
        },
        a,
        b,
        &spec,
    )?;
    if !q.value.is_finite() {
        return Err(EntropyError::Divergent { endpoint: b });
    }
    Ok(q.value)
}

fn clip_to_support(model: &Model, w: &Window) -> Result<(f64, f64), EntropyError> {
    let (lo, hi) = model.support();
    let a = w.t1.max(lo);
    let b = w.t2.min(hi);
    if a >= b {
        return Err(DistError::DegenerateWindow.into());
    }
    Ok((a, b))
}

//! Parametric lifetime distribution catalog: pdf/cdf/quantile/sampling,
//! double truncation, GFR functions, and the structural flags the theorem
//! checkers condition on.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{self, NumericsError};

/// Below this mass a truncation window is treated as degenerate.
pub const DEGENERATE_MASS: f64 = 1e-300;

// GPD within this distance of zero dispatches to its exponential limit.
const GPD_EXP_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum DistError {
    InvalidParams(&'static str),
    InvalidWindow(&'static str),
    /// F(t2) - F(t1) below the representable floor.
    DegenerateWindow,
    InvalidProbability,
    Numerics(NumericsError),
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::InvalidParams(m) | DistError::InvalidWindow(m) => write!(f, "{m}"),
            DistError::DegenerateWindow => {
                write!(f, "window carries no probability mass (F(t2) - F(t1) ~ 0)")
            }
            DistError::InvalidProbability => write!(f, "probability must lie in (0, 1)"),
            DistError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DistError {}

impl From<NumericsError> for DistError {
    fn from(e: NumericsError) -> Self {
        DistError::Numerics(e)
    }
}

/// User-supplied density/cdf pair for the quadrature-only path.
///
/// No closed forms, no sampling shortcuts: just enough surface for the
/// entropy and bound machinery. Used in tests to build residual and other
/// derived variables.
#[derive(Clone)]
pub struct CustomModel {
    pub name: String,
    pub support: (f64, f64),
    pub pdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomModel")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

/// Distribution catalog. Closed forms in the entropy layer dispatch on the
/// variant; everything else goes through quadrature.
#[derive(Debug, Clone)]
pub enum Model {
    Uniform { a: f64, b: f64 },
    /// Rate parameterization: f(x) = theta exp(-theta x).
    Exponential { rate: f64 },
    /// f(x) = (b/a)(x/a)^{b-1} on (0, a).
    Power { a: f64, b: f64 },
    /// One-parameter beta (power on the unit interval): f(x) = c x^{c-1}.
    Beta1 { c: f64 },
    /// f(x) = b a^b / x^{b+1} on (a, inf).
    ParetoI { a: f64, b: f64 },
    /// Shape-rate: f(x) = rate^shape x^{shape-1} e^{-rate x} / Gamma(shape).
    Gamma { shape: f64, rate: f64 },
    /// Survival (1 + theta x)^{-1/theta}; theta < 0 truncates the support to
    /// (0, -1/theta); |theta| < 1e-8 is treated as the exponential limit.
    Gpd { theta: f64 },
    /// F(x) = 1 - exp(-(rate x)^shape).
    Weibull { shape: f64, rate: f64 },
    /// Exponentiated exponential: F(x) = (1 - e^{-rate x})^shape.
    ExpExponential { shape: f64, rate: f64 },
    /// f(x) = intercept + slope * x on (lo, hi), zero elsewhere. Covers the
    /// triangular and trapezoidal fixture densities.
    PiecewiseLinear { intercept: f64, slope: f64, lo: f64, hi: f64 },
    Custom(CustomModel),
}

impl Model {
    /// Linear density constructor; rejects negative or non-normalized input.
    pub fn piecewise_linear(intercept: f64, slope: f64, lo: f64, hi: f64) -> Result<Self, DistError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi || lo < 0.0 {
            return Err(DistError::InvalidParams("linear density needs 0 <= lo < hi"));
        }
        if intercept + slope * lo < -1e-12 || intercept + slope * hi < -1e-12 {
            return Err(DistError::InvalidParams("linear density negative inside support"));
        }
        let mass = intercept * (hi - lo) + 0.5 * slope * (hi * hi - lo * lo);
        if (mass - 1.0).abs() > 1e-9 {
            return Err(DistError::InvalidParams("linear density does not integrate to 1"));
        }
        Ok(Model::PiecewiseLinear { intercept, slope, lo, hi })
    }

    pub fn validate(&self) -> Result<(), DistError> {
        let ok = match *self {
            Model::Uniform { a, b } => a < b,
            Model::Exponential { rate } => rate > 0.0,
            Model::Power { a, b } => a > 0.0 && b > 0.0,
            Model::Beta1 { c } => c > 0.0,
            Model::ParetoI { a, b } => a > 0.0 && b > 0.0,
            Model::Gamma { shape, rate } => shape > 0.0 && rate > 0.0,
            Model::Gpd { theta } => theta.is_finite(),
            Model::Weibull { shape, rate } => shape > 0.0 && rate > 0.0,
            Model::ExpExponential { shape, rate } => shape > 0.0 && rate > 0.0,
            Model::PiecewiseLinear { lo, hi, .. } => lo < hi,
            Model::Custom(ref c) => c.support.0 < c.support.1,
        };
        if ok {
            Ok(())
        } else {
            Err(DistError::InvalidParams("parameter outside the family's domain"))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Model::Uniform { a, b } => (a, b),
            Model::Exponential { .. } => (0.0, f64::INFINITY),
            Model::Power { a, .. } => (0.0, a),
            Model::Beta1 { .. } => (0.0, 1.0),
            Model::ParetoI { a, .. } => (a, f64::INFINITY),
            Model::Gamma { .. } => (0.0, f64::INFINITY),
            Model::Gpd { theta } => {
                if theta < -GPD_EXP_LIMIT {
                    (0.0, -1.0 / theta)
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            Model::Weibull { .. } => (0.0, f64::INFINITY),
            Model::ExpExponential { .. } => (0.0, f64::INFINITY),
            Model::PiecewiseLinear { lo, hi, .. } => (lo, hi),
            Model::Custom(ref c) => c.support,
        }
    }

    /// Density, zero outside the support by convention.
    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi || x.is_nan() {
            return 0.0;
        }
        match *self {
            Model::Uniform { a, b } => 1.0 / (b - a),
            Model::Exponential { rate } => rate * (-rate * x).exp(),
            Model::Power { a, b } => (b / a) * (x / a).powf(b - 1.0),
            Model::Beta1 { c } => c * x.powf(c - 1.0),
            Model::ParetoI { a, b } => b * a.powf(b) / x.powf(b + 1.0),
            Model::Gamma { shape, rate } => {
                if x == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - numerics::ln_gamma(shape))
                    .exp()
            }
            Model::Gpd { theta } => {
                if theta.abs() < GPD_EXP_LIMIT {
                    (-x).exp()
                } else {
                    (1.0 + theta * x).powf(-1.0 / theta - 1.0)
                }
            }
            Model::Weibull { shape, rate } => {
                let z = rate * x;
                if z == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                shape * rate * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }
            Model::ExpExponential { shape, rate } => {
                let em = (-rate * x).exp();
                if x == 0.0 {
                    return if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                shape * rate * em * (1.0 - em).powf(shape - 1.0)
            }
            Model::PiecewiseLinear { intercept, slope, .. } => (intercept + slope * x).max(0.0),
            Model::Custom(ref c) => (c.pdf)(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match *self {
            Model::Uniform { a, b } => (x - a) / (b - a),
            Model::Exponential { rate } => -(-rate * x).exp_m1(),
            Model::Power { a, b } => (x / a).powf(b),
            Model::Beta1 { c } => x.powf(c),
            Model::ParetoI { a, b } => 1.0 - (a / x).powf(b),
            Model::Gamma { shape, rate } => numerics::gammp(shape, rate * x).unwrap_or(f64::NAN),
            Model::Gpd { theta } => {
                if theta.abs() < GPD_EXP_LIMIT {
                    -(-x).exp_m1()
                } else {
                    1.0 - (1.0 + theta * x).powf(-1.0 / theta)
                }
            }
            Model::Weibull { shape, rate } => -(-(rate * x).powf(shape)).exp_m1(),
            Model::ExpExponential { shape, rate } => (-(-rate * x).exp_m1()).powf(shape),
            Model::PiecewiseLinear { intercept, slope, lo, .. } => {
                intercept * (x - lo) + 0.5 * slope * (x * x - lo * lo)
            }
            Model::Custom(ref c) => (c.cdf)(x),
        }
    }

    /// Inverse cdf; closed form everywhere except Gamma and Custom, which
    /// bisect the cdf.
    pub fn quantile(&self, p: f64) -> Result<f64, DistError> {
        if p.is_nan() || p <= 0.0 || p >= 1.0 {
            return Err(DistError::InvalidProbability);
        }
        Ok(match *self {
            Model::Uniform { a, b } => a + p * (b - a),
            Model::Exponential { rate } => -(-p).ln_1p() / rate,
            Model::Power { a, b } => a * p.powf(1.0 / b),
            Model::Beta1 { c } => p.powf(1.0 / c),
            Model::ParetoI { a, b } => a * (1.0 - p).powf(-1.0 / b),
            Model::Gamma { .. } | Model::Custom(_) => self.quantile_numeric(p),
            Model::Gpd { theta } => {
                if theta.abs() < GPD_EXP_LIMIT {
                    -(-p).ln_1p()
                } else {
                    ((1.0 - p).powf(-theta) - 1.0) / theta
                }
            }
            Model::Weibull { shape, rate } => (-(-p).ln_1p()).powf(1.0 / shape) / rate,
            Model::ExpExponential { shape, rate } => -(-p.powf(1.0 / shape)).ln_1p() / rate,
            Model::PiecewiseLinear { intercept, slope, lo, hi } => {
                if slope.abs() < 1e-14 {
                    lo + p / intercept
                } else {
                    let k = 0.5 * slope * lo * lo + intercept * lo + p;
                    let disc = (intercept * intercept + 2.0 * slope * k).max(0.0);
                    ((-intercept + disc.sqrt()) / slope).clamp(lo, hi)
                }
            }
        })
    }

    fn quantile_numeric(&self, p: f64) -> f64 {
        let (lo, hi) = self.support();
        let mut hi = if hi.is_finite() {
            hi
        } else {
            let mut h = lo.max(0.0) + 1.0;
            while self.cdf(h) < p && h < 1e300 {
                h *= 2.0;
            }
            h
        };
        let mut lo = lo;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo) <= 1e-13 * mid.abs().max(1.0) {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Double-truncation window (t1, t2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t1: f64,
    pub t2: f64,
}

impl Window {
    pub fn new(t1: f64, t2: f64) -> Result<Self, DistError> {
        if !t1.is_finite() || !t2.is_finite() || t1 < 0.0 || t2 <= t1 {
            return Err(DistError::InvalidWindow("window needs 0 <= t1 < t2 < inf"));
        }
        Ok(Self { t1, t2 })
    }

    pub fn width(&self) -> f64 {
        self.t2 - self.t1
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t1, self.t2)
    }
}

/// General failure rates of the truncated variable:
/// h_i = f(t_i) / (F(t2) - F(t1)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfrPair {
    pub h1: f64,
    pub h2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfLogConcavity {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityShape {
    Increasing,
    Decreasing,
    /// Constant density; sits on the boundary of both monotone classes and
    /// the bound checkers treat it as satisfying either hypothesis.
    Flat,
    NonMonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureFlags {
    pub cdf_log_concave: CdfLogConcavity,
    pub density_monotone: DensityShape,
}

/// Probability mass of the window; degenerate windows are an error.
pub fn window_mass(model: &Model, w: &Window) -> Result<f64, DistError> {
    let df = model.cdf(w.t2) - model.cdf(w.t1);
    if !df.is_finite() || df <= DEGENERATE_MASS {
        return Err(DistError::DegenerateWindow);
    }
    Ok(df)
}

/// Density of the doubly truncated variable: f(x)/(F(t2)-F(t1)) inside the
/// window, zero outside.
pub fn truncated_pdf(model: &Model, w: &Window, x: f64) -> Result<f64, DistError> {
    let df = window_mass(model, w)?;
    if x <= w.t1 || x >= w.t2 {
        return Ok(0.0);
    }
    Ok(model.pdf(x) / df)
}

pub fn gfr(model: &Model, w: &Window) -> Result<GfrPair, DistError> {
    let df = window_mass(model, w)?;
    Ok(GfrPair { h1: model.pdf(w.t1) / df, h2: model.pdf(w.t2) / df })
}

/// Inverse-cdf sampling of the truncated law: u ~ U(F(t1), F(t2)) mapped
/// through the quantile. Deterministic given the seed.
pub fn sample_truncated(
    model: &Model,
    w: &Window,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, DistError> {
    let f1 = model.cdf(w.t1);
    let f2 = model.cdf(w.t2);
    let df = f2 - f1;
    if !df.is_finite() || df <= DEGENERATE_MASS {
        return Err(DistError::DegenerateWindow);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let r: f64 = rng.random();
        let u = (f1 + (f2 - f1) * r).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
        out.push(model.quantile(u)?);
    }
    Ok(out)
}

/// Catalog-backed structural flags.
///
/// Log-concavity of F holds across the whole closed-form catalog (the
/// classical list: exponential, Pareto, power, gamma and Weibull at any
/// shape, generalized Pareto with theta > -1); only user-supplied models
/// are unknown. Density monotonicity is parameter-dependent.
pub fn structure_flags(model: &Model) -> StructureFlags {
    // Shape <= 1 gives a decreasing density (= 1 is the exponential limit),
    // above 1 the mode is interior.
    let shape_dir = |s: f64| {
        if s <= 1.0 {
            DensityShape::Decreasing
        } else {
            DensityShape::NonMonotone
        }
    };
    let (concave, monotone) = match *model {
        Model::Uniform { .. } => (CdfLogConcavity::Yes, DensityShape::Flat),
        Model::Exponential { .. } => (CdfLogConcavity::Yes, DensityShape::Decreasing),
        Model::Power { b, .. } => (
            CdfLogConcavity::Yes,
            if b > 1.0 {
                DensityShape::Increasing
            } else if b == 1.0 {
                DensityShape::Flat
            } else {
                DensityShape::Decreasing
            },
        ),
        Model::Beta1 { c } => (
            CdfLogConcavity::Yes,
            if c > 1.0 {
                DensityShape::Increasing
            } else if c == 1.0 {
                DensityShape::Flat
            } else {
                DensityShape::Decreasing
            },
        ),
        Model::ParetoI { .. } => (CdfLogConcavity::Yes, DensityShape::Decreasing),
        Model::Gamma { shape, .. } => (CdfLogConcavity::Yes, shape_dir(shape)),
        Model::Gpd { theta } => (
            if theta > -1.0 { CdfLogConcavity::Yes } else { CdfLogConcavity::Unknown },
            if theta >= -1.0 { DensityShape::Decreasing } else { DensityShape::Increasing },
        ),
        Model::Weibull { shape, .. } => (CdfLogConcavity::Yes, shape_dir(shape)),
        Model::ExpExponential { shape, .. } => (CdfLogConcavity::Yes, shape_dir(shape)),
        Model::PiecewiseLinear { slope, .. } => (
            CdfLogConcavity::Yes,
            if slope > 0.0 {
                DensityShape::Increasing
            } else if slope < 0.0 {
                DensityShape::Decreasing
            } else {
                DensityShape::Flat
            },
        ),
        Model::Custom(_) => (CdfLogConcavity::Unknown, DensityShape::NonMonotone),
    };
    StructureFlags { cdf_log_concave: concave, density_monotone: monotone }
}

//! Analytic bounds on the window entropy, and the root diagnostics that
//! connect it back to the window failure rates.
//!
//! Every checker reports both sides of its inequality, whether the
//! inequality's premises actually hold for the supplied model and window,
//! and a signed margin in the claimed direction. A false hypothesis does
//! not suppress the numbers: the caller sees what the bound evaluates to
//! either way.

use std::error::Error;
use std::fmt;

use crate::dist::{
    gfr, structure_flags, window_mass, CdfLogConcavity, DensityShape, DistError, Model, Window,
};
use crate::entropy::{interval_shannon, wgie, EntropyError, EntropyOrder, Regime};
use crate::numerics::{
    find_roots, integrate_adaptive, NumericsError, QuadratureSpec, RootBracket,
};

/// Satisfaction slack: margins down to -1e-8 still count, so that exact
/// equalities survive quadrature noise.
pub const MARGIN_TOL: f64 = 1e-8;

/// Derivative estimates inside this band are treated as "no trend".
const DERIV_DEAD_ZONE: f64 = 1e-7;

const FD_STEP_SCALE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundId {
    MonotoneT1,
    MonotoneT2,
    GfrMonotone1,
    GfrMonotone2,
    DensityMonotoneUpper,
    DensityMonotoneLower,
    ExpInequality,
    LogSum,
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundId::MonotoneT1 => "T_monotone_t1",
            BoundId::MonotoneT2 => "T_monotone_t2",
            BoundId::GfrMonotone1 => "T_gfr_monotone_1",
            BoundId::GfrMonotone2 => "T_gfr_monotone_2",
            BoundId::DensityMonotoneUpper => "T_density_monotone_upper",
            BoundId::DensityMonotoneLower => "T_density_monotone_lower",
            BoundId::ExpInequality => "P_exp_inequality",
            BoundId::LogSum => "T_logsum",
        })
    }
}

/// Direction of the claimed inequality: whether the entropy is bounded
/// from below or from above by `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub theorem_id: BoundId,
    /// Whether the premises of the inequality were verified to hold here.
    /// When false the lhs/rhs numbers are still meaningful, the claim just
    /// carries no guarantee.
    pub hypothesis_holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub sense: Sense,
    /// Signed slack in the claimed direction; negative means violated.
    pub margin: f64,
    pub satisfied: bool,
}

impl BoundReport {
    fn new(theorem_id: BoundId, hypothesis_holds: bool, lhs: f64, rhs: f64, sense: Sense) -> Self {
        let margin = match sense {
            Sense::AtLeast => lhs - rhs,
            Sense::AtMost => rhs - lhs,
        };
        // NaN margin (both sides infinite the same way) fails this
        // comparison and is reported as unsatisfied rather than a panic.
        let satisfied = margin >= -MARGIN_TOL;
        BoundReport {
            theorem_id,
            hypothesis_holds,
            lhs,
            rhs,
            sense,
            margin,
            satisfied,
        }
    }
}

#[derive(Debug)]
pub enum BoundError {
    Config(&'static str),
    /// An intermediate quantity (typically a failure rate) came out
    /// non-finite, so the bound cannot be formed.
    Degenerate(&'static str),
    Entropy(EntropyError),
    Dist(DistError),
    Numerics(NumericsError),
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundError::Config(m) => write!(f, "{m}"),
            BoundError::Degenerate(m) => write!(f, "{m}"),
            BoundError::Entropy(e) => write!(f, "{e}"),
            BoundError::Dist(e) => write!(f, "{e}"),
            BoundError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl Error for BoundError {}

impl From<EntropyError> for BoundError {
    fn from(e: EntropyError) -> Self {
        BoundError::Entropy(e)
    }
}

impl From<DistError> for BoundError {
    fn from(e: DistError) -> Self {
        BoundError::Dist(e)
    }
}

impl From<NumericsError> for BoundError {
    fn from(e: NumericsError) -> Self {
        BoundError::Numerics(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Which window endpoint an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    T1Side,
    T2Side,
}

fn entropy_at(model: &Model, t1: f64, t2: f64, ord: &EntropyOrder) -> Result<f64, BoundError> {
    let w = Window::new(t1, t2)?;
    Ok(wgie(model, &w, ord)?.value)
}

/// Finite-difference partials of the window entropy in its two endpoints,
/// step 1e-5 times the endpoint scale. Central stencils where the window
/// and support allow, three-point one-sided ones otherwise, so the
/// truncation error stays second order throughout.
pub fn wgie_partials(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<(f64, f64), BoundError> {
    let (lo, hi) = model.support();

    let d1 = if w.t1 < lo {
        // The window mass does not depend on an endpoint outside the
        // support, so the derivative is identically zero there.
        0.0
    } else {
        let s = (FD_STEP_SCALE * w.t1.max(1.0)).min(w.width() / 4.0);
        if w.t1 - s >= lo.max(0.0) {
            (entropy_at(model, w.t1 + s, w.t2, ord)? - entropy_at(model, w.t1 - s, w.t2, ord)?)
                / (2.0 * s)
        } else {
            (-3.0 * entropy_at(model, w.t1, w.t2, ord)?
                + 4.0 * entropy_at(model, w.t1 + s, w.t2, ord)?
                - entropy_at(model, w.t1 + 2.0 * s, w.t2, ord)?)
                / (2.0 * s)
        }
    };

    let d2 = if w.t2 > hi {
        0.0
    } else {
        let s = (FD_STEP_SCALE * w.t2.max(1.0)).min(w.width() / 4.0);
        if w.t2 + s <= hi {
            (entropy_at(model, w.t1, w.t2 + s, ord)? - entropy_at(model, w.t1, w.t2 - s, ord)?)
                / (2.0 * s)
        } else {
            (3.0 * entropy_at(model, w.t1, w.t2, ord)?
                - 4.0 * entropy_at(model, w.t1, w.t2 - s, ord)?
                + entropy_at(model, w.t1, w.t2 - 2.0 * s, ord)?)
                / (2.0 * s)
        }
    };

    Ok((d1, d2))
}

/// Trend of the window entropy in one endpoint, decided from the two
/// half-step slopes of a three-point stencil. Both slopes must clear the
/// dead zone with the same sign; anything else is `None`.
pub fn detect_direction(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    side: Side,
) -> Result<Option<Direction>, BoundError> {
    let (p0, p1, p2, fixed) = match side {
        Side::T1Side => {
            let s = (FD_STEP_SCALE * w.t1.max(1.0)).min(w.width() / 4.0);
            if w.t1 - s >= 0.0 {
                (w.t1 - s, w.t1, w.t1 + s, w.t2)
            } else {
                (w.t1, w.t1 + s, w.t1 + 2.0 * s, w.t2)
            }
        }
        Side::T2Side => {
            let s = (FD_STEP_SCALE * w.t2.max(1.0)).min(w.width() / 4.0);
            (w.t2 - s, w.t2, w.t2 + s, w.t1)
        }
    };
    let value = |p: f64| match side {
        Side::T1Side => entropy_at(model, p, fixed, ord),
        Side::T2Side => entropy_at(model, fixed, p, ord),
    };
    let (v0, v1, v2) = (value(p0)?, value(p1)?, value(p2)?);
    let g01 = (v1 - v0) / (p1 - p0);
    let g12 = (v2 - v1) / (p2 - p1);
    if g01 > DERIV_DEAD_ZONE && g12 > DERIV_DEAD_ZONE {
        Ok(Some(Direction::Increasing))
    } else if g01 < -DERIV_DEAD_ZONE && g12 < -DERIV_DEAD_ZONE {
        Ok(Some(Direction::Decreasing))
    } else {
        Ok(None)
    }
}

/// Bound from the entropy's trend in the left endpoint. An increasing
/// trend claims H >= (e log t1 + (e-1) log h1 - log e)/gap, a decreasing
/// one claims <=. The hypothesis flag records whether the detected trend
/// matches the one supplied.
pub fn bound_t1_monotone(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    trend: Direction,
) -> Result<BoundReport, BoundError> {
    let g = gfr(model, w)?;
    if !g.h1.is_finite() {
        return Err(BoundError::Degenerate("left failure rate is not finite"));
    }
    let e = ord.exponent();
    let lhs = wgie(model, w, ord)?.value;
    let rhs = (e * w.t1.ln() + (e - 1.0) * g.h1.ln() - e.ln()) / ord.gap();
    let hyp = detect_direction(model, w, ord, Side::T1Side)? == Some(trend);
    let sense = match trend {
        Direction::Increasing => Sense::AtLeast,
        Direction::Decreasing => Sense::AtMost,
    };
    Ok(BoundReport::new(BoundId::MonotoneT1, hyp, lhs, rhs, sense))
}

/// Right-endpoint counterpart: an increasing trend claims
/// H <= (e log t2 + (e-1) log h2 - log e)/gap, a decreasing one claims >=.
pub fn bound_t2_monotone(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    trend: Direction,
) -> Result<BoundReport, BoundError> {
    let g = gfr(model, w)?;
    if !g.h2.is_finite() {
        return Err(BoundError::Degenerate("right failure rate is not finite"));
    }
    let e = ord.exponent();
    let lhs = wgie(model, w, ord)?.value;
    let rhs = (e * w.t2.ln() + (e - 1.0) * g.h2.ln() - e.ln()) / ord.gap();
    let hyp = detect_direction(model, w, ord, Side::T2Side)? == Some(trend);
    let sense = match trend {
        Direction::Increasing => Sense::AtMost,
        Direction::Decreasing => Sense::AtLeast,
    };
    Ok(BoundReport::new(BoundId::MonotoneT2, hyp, lhs, rhs, sense))
}

/// Failure rate of the sub-window, as a function of its moving endpoint:
/// f(x)/(F(t2)-F(x)) for the left side, f(x)/(F(x)-F(t1)) for the right.
/// At x = t1 (resp. t2) these reduce to the window failure rates h1, h2.
fn window_gfr_profile(model: &Model, w: &Window, side: Side, x: f64) -> f64 {
    match side {
        Side::T1Side => model.pdf(x) / (model.cdf(w.t2) - model.cdf(x)),
        Side::T2Side => model.pdf(x) / (model.cdf(x) - model.cdf(w.t1)),
    }
}

/// Probes the profile on an eleven-point interior grid: the left one must
/// be nondecreasing, the right one nonincreasing, for the corresponding
/// bound's derivation to go through.
fn gfr_profile_monotone(model: &Model, w: &Window, side: Side) -> bool {
    const N: usize = 11;
    let mut prev = f64::NAN;
    for k in 0..N {
        let u = (k as f64 + 0.5) / N as f64;
        let v = window_gfr_profile(model, w, side, w.t1 + u * w.width());
        if !v.is_finite() {
            return false;
        }
        if k > 0 {
            let slack = 1e-9 * v.abs().max(1.0);
            let ok = match side {
                Side::T1Side => v >= prev - slack,
                Side::T2Side => v <= prev + slack,
            };
            if !ok {
                return false;
            }
        }
        prev = v;
    }
    true
}

/// Both failure-rate lower bounds H >= (e/gap) log(t_i h_i), returned as
/// (left report, right report).
///
/// The left hypothesis asks for a nondecreasing left profile together with
/// INT ((F(t2)-F(x))/dF)^e dx >= 1 over the window; the right one for a
/// nonincreasing right profile with INT (x/t2)^e ((F(x)-F(t1))/dF)^e dx
/// at least one. Each pair makes its inequality exact arithmetic, so a
/// true hypothesis can only produce a satisfied report.
pub fn bound_gfr_monotone(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<(BoundReport, BoundReport), BoundError> {
    let e = ord.exponent();
    let gap = ord.gap();
    let df = window_mass(model, w)?;
    let g = gfr(model, w)?;
    let lhs = wgie(model, w, ord)?.value;
    let spec = QuadratureSpec::default();
    let f2 = model.cdf(w.t2);
    let f1 = model.cdf(w.t1);
    let c1 = integrate_adaptive(|x| ((f2 - model.cdf(x)) / df).powf(e), w.t1, w.t2, &spec)?;
    let c2 = integrate_adaptive(
        |x| (x / w.t2).powf(e) * ((model.cdf(x) - f1) / df).powf(e),
        w.t1,
        w.t2,
        &spec,
    )?;
    let off_boundary = ord.regime() != Regime::Boundary;
    let hyp1 = off_boundary
        && gfr_profile_monotone(model, w, Side::T1Side)
        && c1.value >= 1.0 - 1e-9;
    let hyp2 = off_boundary
        && gfr_profile_monotone(model, w, Side::T2Side)
        && c2.value >= 1.0 - 1e-9;
    let rhs1 = e / gap * (w.t1 * g.h1).ln();
    let rhs2 = e / gap * (w.t2 * g.h2).ln();
    Ok((
        BoundReport::new(BoundId::GfrMonotone1, hyp1, lhs, rhs1, Sense::AtLeast),
        BoundReport::new(BoundId::GfrMonotone2, hyp2, lhs, rhs2, Sense::AtLeast),
    ))
}

/// Two-sided sandwich from a monotone density, returned as (upper report,
/// lower report) where "upper"/"lower" name the base case: increasing
/// density above the alpha + beta = 2 boundary gives
/// A + R1 <= H <= A + R2 with A the log window moment of x^e and
/// R_i = (e-1)/gap log h_i. Crossing the boundary flips both senses, a
/// decreasing density flips them again, and a flat density turns both into
/// equalities.
pub fn bound_density_monotone(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<(BoundReport, BoundReport), BoundError> {
    let e = ord.exponent();
    let gap = ord.gap();
    let df = window_mass(model, w)?;
    let g = gfr(model, w)?;
    let lhs = wgie(model, w, ord)?.value;
    let (lo, hi) = model.support();
    let a = w.t1.max(lo);
    let b = w.t2.min(hi);
    let spec = QuadratureSpec::default();
    let moment = integrate_adaptive(|x| x.powf(e) * model.pdf(x) / df, a, b, &spec)?;
    let big_a = moment.value.ln() / gap;
    let r1 = (e - 1.0) / gap * g.h1.ln();
    let r2 = (e - 1.0) / gap * g.h2.ln();

    let shape = structure_flags(model).density_monotone;
    // Monotonicity must hold across the whole window, pdf zero outside the
    // support included: an increasing density stops being monotone once
    // the window sticks out past the upper support end, and mirrored for
    // a decreasing one at the lower end.
    let window_fits = match shape {
        DensityShape::Increasing => w.t2 <= hi,
        DensityShape::Decreasing => w.t1 >= lo,
        DensityShape::Flat => w.t1 >= lo && w.t2 <= hi,
        DensityShape::NonMonotone => false,
    };
    let hyp = ord.regime() != Regime::Boundary
        && shape != DensityShape::NonMonotone
        && window_fits;

    let flip = (ord.regime() == Regime::Below) ^ (shape == DensityShape::Decreasing);
    let (upper_sense, lower_sense) = if flip {
        (Sense::AtLeast, Sense::AtMost)
    } else {
        (Sense::AtMost, Sense::AtLeast)
    };
    Ok((
        BoundReport::new(BoundId::DensityMonotoneUpper, hyp, lhs, big_a + r2, upper_sense),
        BoundReport::new(BoundId::DensityMonotoneLower, hyp, lhs, big_a + r1, lower_sense),
    ))
}

/// log z <= z - 1 applied to the defining integral: H <= (I - 1)/gap where
/// I is the integral itself. Both sides come from the same quadrature
/// pass, so the report is exact algebra on one number and always holds,
/// with equality exactly at I = 1.
pub fn bound_exp_inequality(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<BoundReport, BoundError> {
    let e = ord.exponent();
    let df = window_mass(model, w)?;
    let (lo, hi) = model.support();
    let a = w.t1.max(lo);
    let b = w.t2.min(hi);
    let spec = QuadratureSpec::default();
    let i = integrate_adaptive(|x| (x * model.pdf(x) / df).powf(e), a, b, &spec)?.value;
    let lhs = i.ln() / ord.gap();
    let rhs = (i - 1.0) / ord.gap();
    Ok(BoundReport::new(BoundId::ExpInequality, true, lhs, rhs, Sense::AtMost))
}

/// Jensen lower bound
/// H >= (e/gap) E[log X | window] + (2 - alpha - beta)/gap * Shannon
/// interval entropy; unconditional for every valid order and window.
pub fn bound_logsum(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<BoundReport, BoundError> {
    let e = ord.exponent();
    let gap = ord.gap();
    let df = window_mass(model, w)?;
    let lhs = wgie(model, w, ord)?.value;
    let (lo, hi) = model.support();
    let a = w.t1.max(lo);
    let b = w.t2.min(hi);
    let spec = QuadratureSpec::default();
    let mean_log = integrate_adaptive(|x| x.ln() * model.pdf(x) / df, a, b, &spec)?;
    let shannon = interval_shannon(model, w)?;
    let rhs = e / gap * mean_log.value + (1.0 - e) / gap * shannon;
    Ok(BoundReport::new(BoundId::LogSum, true, lhs, rhs, Sense::AtLeast))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridAxis {
    T1,
    T2,
}

/// One broken step in a grid scan: moving the named axis from `from` to
/// `to` (other endpoint fixed at `fixed`) moved the entropy the wrong way.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityViolation {
    pub axis: GridAxis,
    pub fixed: f64,
    pub from: f64,
    pub to: f64,
    pub value_from: f64,
    pub value_to: f64,
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// Log-concave distribution function and order below the
    /// alpha + beta = 2 boundary: the premises under which the entropy is
    /// claimed nondecreasing in t2 and nonincreasing in t1.
    pub hypothesis_holds: bool,
    pub cells_checked: usize,
    pub violations: Vec<MonotonicityViolation>,
}

/// Rectangular endpoint grid; both axes need at least two strictly
/// ascending nonnegative points.
#[derive(Debug, Clone)]
pub struct WindowGrid {
    t1_axis: Vec<f64>,
    t2_axis: Vec<f64>,
}

impl WindowGrid {
    pub fn new(t1_axis: Vec<f64>, t2_axis: Vec<f64>) -> Result<Self, BoundError> {
        for axis in [&t1_axis, &t2_axis] {
            if axis.len() < 2 {
                return Err(BoundError::Config("each grid axis needs at least two points"));
            }
            if axis.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(BoundError::Config("grid points must be finite and nonnegative"));
            }
            if axis.windows(2).any(|p| p[0] >= p[1]) {
                return Err(BoundError::Config("grid axes must be strictly ascending"));
            }
        }
        Ok(WindowGrid { t1_axis, t2_axis })
    }

    pub fn t1_axis(&self) -> &[f64] {
        &self.t1_axis
    }

    pub fn t2_axis(&self) -> &[f64] {
        &self.t2_axis
    }
}

/// Evenly spaced helper for building grid axes.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n.max(2) - 1) as f64;
    (0..n.max(2)).map(|k| lo + k as f64 * step).collect()
}

/// Scans the entropy over every valid grid window and checks the claimed
/// interval pattern: nonincreasing in t1 along each row, nondecreasing in
/// t2 along each column. Cells with a degenerate or divergent window are
/// skipped; violations come back in scan order (t1 scans first), each with
/// the offending pair of values.
pub fn check_interval_monotonicity(
    model: &Model,
    grid: &WindowGrid,
    ord: &EntropyOrder,
) -> Result<MonotonicityReport, BoundError> {
    let flags = structure_flags(model);
    let hypothesis_holds =
        flags.cdf_log_concave == CdfLogConcavity::Yes && ord.regime() == Regime::Below;

    let n1 = grid.t1_axis.len();
    let n2 = grid.t2_axis.len();
    let mut values = vec![vec![None; n2]; n1];
    let mut cells_checked = 0usize;
    for (i, &t1) in grid.t1_axis.iter().enumerate() {
        for (j, &t2) in grid.t2_axis.iter().enumerate() {
            if t1 >= t2 {
                continue;
            }
            let w = Window::new(t1, t2)?;
            if let Ok(v) = wgie(model, &w, ord) {
                if v.value.is_finite() {
                    values[i][j] = Some(v.value);
                    cells_checked += 1;
                }
            }
        }
    }

    let slack = |v: f64| 1e-8 * v.abs().max(1.0);
    let mut violations = Vec::new();
    // claimed nonincreasing in t1
    for (i, rows) in values.windows(2).enumerate() {
        for (j, (a, b)) in rows[0].iter().zip(&rows[1]).enumerate() {
            if let (Some(a), Some(b)) = (a, b) {
                if *b > *a + slack(*a) {
                    violations.push(MonotonicityViolation {
                        axis: GridAxis::T1,
                        fixed: grid.t2_axis[j],
                        from: grid.t1_axis[i],
                        to: grid.t1_axis[i + 1],
                        value_from: *a,
                        value_to: *b,
                    });
                }
            }
        }
    }
    // claimed nondecreasing in t2
    for (i, row) in values.iter().enumerate() {
        for j in 0..n2 - 1 {
            if let (Some(a), Some(b)) = (row[j], row[j + 1]) {
                if b < a - slack(a) {
                    violations.push(MonotonicityViolation {
                        axis: GridAxis::T2,
                        fixed: grid.t1_axis[i],
                        from: grid.t2_axis[j],
                        to: grid.t2_axis[j + 1],
                        value_from: a,
                        value_to: b,
                    });
                }
            }
        }
    }

    Ok(MonotonicityReport {
        hypothesis_holds,
        cells_checked,
        violations,
    })
}

fn eta_at(x: f64, t1: f64, ord: &EntropyOrder, entropy: f64, dh_dt1: f64) -> f64 {
    let e = ord.exponent();
    let gap = ord.gap();
    -(t1 * x).powf(e) * (-gap * entropy).exp() + e * x - gap * dh_dt1
}

fn zeta_at(y: f64, t2: f64, ord: &EntropyOrder, entropy: f64, dh_dt2: f64) -> f64 {
    let e = ord.exponent();
    let gap = ord.gap();
    -(t2 * y).powf(e) * (-gap * entropy).exp() + e * y + gap * dh_dt2
}

/// Auxiliary function whose positive roots are the candidate left failure
/// rates compatible with the given entropy slope: the window's actual h1
/// is always among them.
pub fn eta(
    x: f64,
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    dh_dt1: f64,
) -> Result<f64, BoundError> {
    let h = wgie(model, w, ord)?.value;
    Ok(eta_at(x, w.t1, ord, h, dh_dt1))
}

/// Right-endpoint counterpart of `eta`; its positive roots are the
/// candidate right failure rates, h2 among them.
pub fn zeta(
    y: f64,
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    dh_dt2: f64,
) -> Result<f64, BoundError> {
    let h = wgie(model, w, ord)?.value;
    Ok(zeta_at(y, w.t2, ord, h, dh_dt2))
}

fn stationary_at(t: f64, ord: &EntropyOrder, entropy: f64) -> f64 {
    ((ord.gap() * entropy - ord.exponent() * t.ln()) / (ord.exponent() - 1.0)).exp()
}

/// Unique interior stationary point of `eta` (left side) or `zeta` (right
/// side). Undefined on the alpha + beta = 2 boundary, where the auxiliary
/// functions are affine.
pub fn stationary_point(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
    side: Side,
) -> Result<f64, BoundError> {
    if ord.regime() == Regime::Boundary {
        return Err(BoundError::Config("stationary point is undefined at alpha + beta = 2"));
    }
    let h = wgie(model, w, ord)?.value;
    let t = match side {
        Side::T1Side => w.t1,
        Side::T2Side => w.t2,
    };
    Ok(stationary_at(t, ord, h))
}

#[derive(Debug, Clone)]
pub struct UniquenessDiagnostic {
    pub side: Side,
    pub regime: Regime,
    /// Whether the two entropy slopes show one of the theorem's monotone
    /// patterns (increasing in t1 with decreasing in t2, or the mirror).
    pub monotone_hypothesis: bool,
    pub stationary_point: f64,
    pub value_at_stationary: f64,
    /// Ascending positive roots of the auxiliary function; one or two in
    /// every non-degenerate case.
    pub roots: Vec<f64>,
    /// The actual window failure rate of this side, for comparison with
    /// `roots`.
    pub gfr_value: f64,
    /// False when root isolation failed; `roots` is then incomplete.
    pub root_search_ok: bool,
}

fn side_diagnostic(
    side: Side,
    w: &Window,
    ord: &EntropyOrder,
    entropy: f64,
    slope: f64,
    gfr_value: f64,
    cap: f64,
) -> UniquenessDiagnostic {
    let t = match side {
        Side::T1Side => w.t1,
        Side::T2Side => w.t2,
    };
    let aux = |v: f64| match side {
        Side::T1Side => eta_at(v, t, ord, entropy, slope),
        Side::T2Side => zeta_at(v, t, ord, entropy, slope),
    };
    let x0 = stationary_at(t, ord, entropy);
    let value_at_stationary = aux(x0);

    let mut roots = match RootBracket::new(1e-12, cap) {
        Ok(b) => find_roots(aux, &b, 800),
        Err(_) => Vec::new(),
    };
    // A tangent root (the stationary point itself touching zero) produces
    // no sign change for the probe to see, but the failure rate is a root
    // by identity; recover it from its residual when the search missed it.
    let tol = 1e-6 * gfr_value.abs().max(1.0);
    let near_gfr = |r: &f64| (r - gfr_value).abs() <= tol;
    if gfr_value.is_finite() && !roots.iter().any(near_gfr) && aux(gfr_value).abs() <= 1e-6 {
        roots.push(gfr_value);
        roots.sort_by(|a, b| a.total_cmp(b));
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    let root_search_ok = !roots.is_empty() && roots.iter().any(near_gfr);

    UniquenessDiagnostic {
        side,
        regime: ord.regime(),
        monotone_hypothesis: false, // filled by the caller, needs both slopes
        stationary_point: x0,
        value_at_stationary,
        roots,
        gfr_value,
        root_search_ok,
    }
}

/// Root structure of both auxiliary functions for one window, returned as
/// (left, right). Roots are searched on (0, 50 max(h1, h2)]; a failed
/// isolation is reported through `root_search_ok` rather than an error.
pub fn uniqueness_diagnostic(
    model: &Model,
    w: &Window,
    ord: &EntropyOrder,
) -> Result<(UniquenessDiagnostic, UniquenessDiagnostic), BoundError> {
    if ord.regime() == Regime::Boundary {
        return Err(BoundError::Config(
            "uniqueness diagnostics are undefined at alpha + beta = 2",
        ));
    }
    let entropy = wgie(model, w, ord)?.value;
    let (d1, d2) = wgie_partials(model, w, ord)?;
    let g = gfr(model, w)?;
    if !g.h1.is_finite() || !g.h2.is_finite() {
        return Err(BoundError::Degenerate("window failure rate is not finite"));
    }
    let up1 = d1 > DERIV_DEAD_ZONE;
    let dn1 = d1 < -DERIV_DEAD_ZONE;
    let up2 = d2 > DERIV_DEAD_ZONE;
    let dn2 = d2 < -DERIV_DEAD_ZONE;
    let pattern = (up1 && dn2) || (dn1 && up2);

    let cap = 50.0 * g.h1.max(g.h2).max(1e-6);
    let mut left = side_diagnostic(Side::T1Side, w, ord, entropy, d1, g.h1, cap);
    let mut right = side_diagnostic(Side::T2Side, w, ord, entropy, d2, g.h2, cap);
    left.monotone_hypothesis = pattern;
    right.monotone_hypothesis = pattern;
    Ok((left, right))
}

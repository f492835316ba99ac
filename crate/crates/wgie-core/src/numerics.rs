//! Shared numerical kernels: adaptive quadrature, incomplete gamma,
//! bracketed root finding, scalar minimization.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any thread.

use std::fmt;

/// Tolerances and subdivision limit for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self, NumericsError> {
        if abs_tol.is_nan() || abs_tol <= 0.0 || rel_tol.is_nan() || rel_tol <= 0.0 || max_depth < 1
        {
            return Err(NumericsError::Domain(
                "quadrature spec needs abs_tol > 0, rel_tol > 0, max_depth >= 1",
            ));
        }
        Ok(Self { abs_tol, rel_tol, max_depth })
    }
}

impl Default for QuadratureSpec {
    /// Tolerances sized for the entropy integrals: their integrands can have
    /// endpoint power singularities, which the open rule plus deep
    /// subdivision absorbs.
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_depth: 60 }
    }
}

/// Search interval for root finding and minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(NumericsError::Domain("bracket needs finite lo < hi"));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// Subdivision limit reached before the tolerance was met; carries the
    /// best estimate and the achieved error bound.
    NoConvergence { estimate: f64, error_bound: f64 },
    /// The integrand evaluated to NaN at this abscissa.
    NanAt { x: f64 },
    Domain(&'static str),
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::NoConvergence { estimate, error_bound } => write!(
                f,
                "quadrature did not converge: best estimate {estimate} (error bound {error_bound})"
            ),
            NumericsError::NanAt { x } => write!(f, "integrand returned NaN at x = {x}"),
            NumericsError::Domain(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for NumericsError {}

/// Value plus the accumulated error bound of the adaptive pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_bound: f64,
}

// 15-point Kronrod abscissae (positive half, descending) with the embedded
// 7-point Gauss rule at the odd indices.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod panel: returns (kronrod, |kronrod - gauss| * h).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), NumericsError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_nan() {
            Err(NumericsError::NanAt { x })
        } else {
            Ok(v)
        }
    };
    let fc = eval(c)?;
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for (j, &xj) in XGK.iter().enumerate().take(7) {
        let dx = h * xj;
        let f1 = eval(c - dx)?;
        let f2 = eval(c + dx)?;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((resk * h, (resk - resg).abs() * h))
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    acc: &mut QuadResult,
    converged: &mut bool,
) -> Result<(), NumericsError> {
    let (value, err) = gk15(f, a, b)?;
    if err <= tol || depth == 0 {
        if err > tol {
            *converged = false;
        }
        acc.value += value;
        acc.error_bound += err;
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth - 1, acc, converged)?;
    adapt(f, mid, b, 0.5 * tol, depth - 1, acc, converged)
}

/// Adaptive integral of `f` over the open interval (a, b).
///
/// Abscissae never touch the endpoints, so integrable endpoint
/// singularities are fine; the subdivision concentrates around them.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, NumericsError> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(NumericsError::Domain("integration needs a < b"));
    }
    // A first whole-interval pass fixes the scale for the relative part of
    // the tolerance.
    let (rough, _) = gk15(&f, a, b)?;
    let tol = spec.abs_tol.max(spec.rel_tol * rough.abs());
    let mut acc = QuadResult { value: 0.0, error_bound: 0.0 };
    let mut converged = true;
    adapt(&f, a, b, tol, spec.max_depth, &mut acc, &mut converged)?;
    if !converged && acc.error_bound > spec.abs_tol.max(spec.rel_tol * acc.value.abs()) {
        return Err(NumericsError::NoConvergence {
            estimate: acc.value,
            error_bound: acc.error_bound,
        });
    }
    Ok(acc)
}

/// Integral of `f` over (a, inf) via the map x = a + t/(1-t), t in (0, 1).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, NumericsError> {
    integrate_adaptive(
        move |t: f64| {
            let om = 1.0 - t;
            let x = a + t / om;
            // Deep subdivision can round a node onto t = 1; the integrand
            // must vanish there for the improper integral to exist.
            if !x.is_finite() {
                return 0.0;
            }
            f(x) / (om * om)
        },
        0.0,
        1.0,
        spec,
    )
}

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)] // published coefficients, kept verbatim
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
pub fn gammp(s: f64, x: f64) -> Result<f64, NumericsError> {
    if s <= 0.0 {
        return Err(NumericsError::Domain("incomplete gamma needs s > 0"));
    }
    if x < 0.0 {
        return Err(NumericsError::Domain("incomplete gamma needs x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        Ok(gamma_series(s, x))
    } else {
        Ok(1.0 - gamma_cf(s, x))
    }
}

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
pub fn gammq(s: f64, x: f64) -> Result<f64, NumericsError> {
    if s <= 0.0 {
        return Err(NumericsError::Domain("incomplete gamma needs s > 0"));
    }
    if x < 0.0 {
        return Err(NumericsError::Domain("incomplete gamma needs x >= 0"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < s + 1.0 {
        Ok(1.0 - gamma_series(s, x))
    } else {
        Ok(gamma_cf(s, x))
    }
}

// Series representation, reliable for x < s + 1.
fn gamma_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut n = 1.0;
    while term.abs() > sum.abs() * 1e-16 && n < 1e4 {
        term *= x / (s + n);
        sum += term;
        n += 1.0;
    }
    sum * (-x + s * x.ln() - ln_gamma(s)).exp()
}

// Continued fraction (modified Lentz), reliable for x >= s + 1.
fn gamma_cf(s: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + s * x.ln() - ln_gamma(s)).exp() * h
}

/// Lower incomplete gamma on its natural scale.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64, NumericsError> {
    Ok(gammp(s, x)? * ln_gamma(s).exp())
}

/// log(gamma(s, x2) - gamma(s, x1)) for 0 <= x1 < x2.
///
/// When both arguments sit in the upper tail the naive P-difference cancels
/// catastrophically (both P's are within ulps of 1); the Q-difference from
/// the continued fraction keeps full relative accuracy there.
pub fn ln_lower_gamma_diff(s: f64, x1: f64, x2: f64) -> Result<f64, NumericsError> {
    if x1.is_nan() || x2.is_nan() || x1 >= x2 {
        return Err(NumericsError::Domain("gamma difference needs x1 < x2"));
    }
    let diff = if x1 >= s + 1.0 {
        gamma_cf(s, x1) - gamma_cf(s, x2)
    } else {
        gammp(s, x2)? - gammp(s, x1)?
    };
    if diff > 0.0 && diff.is_finite() {
        Ok(ln_gamma(s) + diff.ln())
    } else {
        // Cancellation floor: fall back to direct quadrature of the defining
        // integral over the gap.
        let r = integrate_adaptive(
            |t: f64| t.powf(s - 1.0) * (-t).exp(),
            x1.max(1e-300),
            x2,
            &QuadratureSpec::default(),
        )?;
        if r.value > 0.0 {
            Ok(r.value.ln())
        } else {
            Err(NumericsError::Domain("gamma difference underflowed"))
        }
    }
}

/// All roots of `f` found by sign-change bisection over the bracket.
///
/// Probes on `n_probe` points (geometric spacing when the bracket spans more
/// than two decades, since GFR roots can be small), then bisects each sign
/// change to 1e-12 relative tolerance. Tangential roots without a sign
/// change are missed by construction. No sign change is not an error: the
/// result is simply empty.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, bracket: &RootBracket, n_probe: usize) -> Vec<f64> {
    let n = n_probe.max(2);
    let geometric = bracket.lo > 0.0 && bracket.hi / bracket.lo > 100.0;
    let probe = |i: usize| -> f64 {
        let s = i as f64 / (n - 1) as f64;
        if geometric {
            bracket.lo * (bracket.hi / bracket.lo).powf(s)
        } else {
            bracket.lo + (bracket.hi - bracket.lo) * s
        }
    };
    let mut roots = Vec::new();
    let mut x_prev = probe(0);
    let mut f_prev = f(x_prev);
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    for i in 1..n {
        let x = probe(i);
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0 && f_prev.signum() != fx.signum() && f_prev.is_finite() && fx.is_finite() {
            roots.push(bisect(&f, x_prev, x, f_prev));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let neg_lo = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-12 * mid.abs().max(1.0) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Argmin of a unimodal `f` over the bracket (Brent: golden section with
/// parabolic steps), to 1e-10 interval width.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, bracket: &RootBracket) -> Result<f64, NumericsError> {
    const GOLD: f64 = 0.381_966_011_250_105; // 2 - phi
    const ZEPS: f64 = 1e-18;
    let tol = 1e-10;
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(x);
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabola through (v, w, x).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + if d > 0.0 { tol1 } else { -tol1 } };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(x)
}

//! Adaptive Gauss–Legendre quadrature with Kronrod error estimates.
//!
//! Each panel is evaluated with the 7-point Gauss–Legendre rule and its
//! 15-point Kronrod extension; the panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance or the panel budget
//! is exhausted. Real and complex integrands share the same driver: a complex
//! integrand is integrated component-wise on the same nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Environment variable that overrides the default panel budget.
pub const BUDGET_ENV: &str = "MOMENTFORGE_QUAD_BUDGET";

/// Default maximum number of panels (2^14).
pub const DEFAULT_MAX_PANELS: usize = 1 << 14;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadValue for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl QuadValue for Complex64 {
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    /// Relative tolerance 1e-12, absolute 1e-15, budget from
    /// `MOMENTFORGE_QUAD_BUDGET` when set, otherwise 2^14 panels.
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_panels: env_budget(),
        }
    }
}

fn env_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_MAX_PANELS)
    })
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    resabs: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv1 = [T::default(); 7];
    let mut fv2 = [T::default(); 7];
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    if !resk.is_finite() || !resg.is_finite() {
        return Err(Error::QuadratureFailure {
            residual: f64::INFINITY,
            panels: 0,
        });
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).norm() + (fv2[j] - reskh).norm());
    }
    let scale = half.abs();
    let value = resk * half;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        resabs,
    })
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: T::default(),
            abs_error: 0.0,
            panels: 0,
        });
    }
    const INITIAL: usize = 4;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let width = (b - a) / INITIAL as f64;
    for i in 0..INITIAL {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL { b } else { a + width * (i + 1) as f64 };
        heap.push(kronrod(&f, lo, hi)?);
    }

    let mut value = T::default();
    let mut error = 0.0;
    let mut resabs = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        error += p.error;
        resabs += p.resabs;
    }
    loop {
        let panels = heap.len() + frozen.len();
        let target = cfg
            .abs_tol
            .max(cfg.rel_tol * value.norm())
            .max(200.0 * f64::EPSILON * resabs);
        if error <= target {
            // resum exactly so the running totals do not leak rounding drift
            let (v, e) = heap
                .iter()
                .chain(frozen.iter())
                .fold((T::default(), 0.0), |(v, e), p| (v + p.value, e + p.error));
            return Ok(QuadResult {
                value: v,
                abs_error: e,
                panels,
            });
        }
        if heap.is_empty() || panels >= cfg.max_panels {
            return Err(Error::QuadratureFailure {
                residual: error,
                panels,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-300 {
            // interval cannot be refined further in binary64
            frozen.push(worst);
            continue;
        }
        let (l, r) = match (kronrod(&f, worst.a, mid), kronrod(&f, mid, worst.b)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => {
                return Err(Error::QuadratureFailure {
                    residual: f64::INFINITY,
                    panels,
                })
            }
        };
        value = value - worst.value + l.value + r.value;
        error = (error - worst.error + l.error + r.error).max(0.0);
        resabs = resabs - worst.resabs + l.resabs + r.resabs;
        heap.push(l);
        heap.push(r);
    }
}

/// Half-width of the t-range of [`integrate_tanh_sinh`]; beyond it both
/// endpoint distances underflow for unit intervals.
const TANH_SINH_T: f64 = 6.5;

/// Integrates over `[a, b]` after the substitution
/// `x = (a+b)/2 + (b-a)/2 · tanh(π/2 · sinh t)`, which flattens algebraic
/// endpoint singularities. `f` receives `(x, x - a, b - x)` with both
/// distances computed without cancellation, so integrands such as
/// `(1 - x)^{-1/2}` can be written in terms of the exact distance.
pub fn integrate_tanh_sinh<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64, f64, f64) -> T,
{
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Domain(format!("bad integration bounds [{a}, {b}]")));
    }
    let h = 0.5 * (b - a);
    if h == 0.0 {
        return Ok(QuadResult {
            value: T::default(),
            abs_error: 0.0,
            panels: 0,
        });
    }
    integrate(
        |t: f64| {
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u.abs()).exp();
            let near = 2.0 * h * e / (1.0 + e);
            let far = 2.0 * h / (1.0 + e);
            if near == 0.0 {
                return T::default();
            }
            let (x, dlo, dhi) = if t >= 0.0 {
                (b - near, far, near)
            } else {
                (a + near, near, far)
            };
            let jac = h * std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            let v = f(x, dlo, dhi);
            if v.norm() == 0.0 || jac == 0.0 {
                T::default()
            } else {
                v * jac
            }
        },
        -TANH_SINH_T,
        TANH_SINH_T,
        cfg,
    )
}

/// Integrates `f` over `(lo, ∞)` for exponentially decaying integrands using
/// the substitution `x = lo - ln u`, `u ∈ (0, 1)`.
pub fn integrate_exp_decay<T, F>(f: F, lo: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_exp_decay_rate(f, lo, 1.0, cfg)
}

/// As [`integrate_exp_decay`] with `x = lo - ln(u) / rate`. When the
/// integrand decays like `e^{-rate x}` the transformed integrand stays bounded
/// at `u = 0`.
pub fn integrate_exp_decay_rate<T, F>(f: F, lo: f64, rate: f64, cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("decay rate must be positive, got {rate}")));
    }
    if !lo.is_finite() {
        return Err(Error::Domain(format!("lower bound must be finite, got {lo}")));
    }
    integrate(
        |u: f64| {
            if u <= 0.0 {
                return T::default();
            }
            let x = lo - u.ln() / rate;
            let v = f(x);
            if v.norm() == 0.0 {
                T::default()
            } else {
                v * (1.0 / (rate * u))
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn exponential_moment_via_log_substitution() {
        // ∫ x^3 e^{-x} dx = 3! = 6
        let r = integrate_exp_decay(|x: f64| x.powi(3) * (-x).exp(), 0.0, &cfg()).unwrap();
        assert!((r.value - 6.0).abs() < 1e-10, "{}", r.value);
        assert!(r.abs_error < 1e-10);
    }

    #[test]
    fn rate_matched_substitution() {
        // ∫_1^∞ e^{-0.3x}/x dx = E1(0.3)
        let r = integrate_exp_decay_rate(|x: f64| (-0.3 * x).exp() / x, 1.0, 0.3, &cfg()).unwrap();
        assert!((r.value - 0.905_676_651_675_847).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn endpoint_power_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn complex_integrand_components() {
        // ∫_0^π e^{ix} dx = 2i
        let r = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            &cfg(),
        )
        .unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn divergent_integral_reports_failure() {
        let tight = QuadConfig {
            max_panels: 64,
            ..QuadConfig::default()
        };
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn nan_integrand_reports_failure() {
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}

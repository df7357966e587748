//! Hermite polynomials, the Szasz bound |h_n(x)| <= e^{x²/2}, and the
//! generating function G(t, x) = Σ h_k(x) t^k of the orthonormal polynomials.
//!
//! The terms of G grow to about e^{x²/2} before the geometric factor wins,
//! while G itself can be of order 10^-2 (at t = -0.95, x = 10 the largest
//! term is near 10^19). The series is therefore summed in double-double
//! arithmetic, and every value carries both the Szasz tail bound and a bound
//! on accumulated rounding.

use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Default cap on the number of series terms in [`generating_G`].
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Unit roundoff assumed for double-double operations (deliberately pessimistic).
const DD_UNIT: f64 = 7.888_609_052_210_118e-31; // 2^-100

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}.
#[allow(non_snake_case)]
pub fn hermite_H(n: usize, x: f64) -> Result<f64> {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(1.0);
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Range(format!(
                "H_{n}({x}) overflows binary64; use hermite_h for the normalized value"
            )));
        }
    }
    Ok(cur)
}

/// Orthonormal h_n(x) = H_n(x)/sqrt(2^n n!) by the normalized recurrence
/// h_{n+1} = (sqrt(2) x h_n - sqrt(n) h_{n-1}) / sqrt(n+1).
pub fn hermite_h(n: usize, x: f64) -> f64 {
    let s2x = std::f64::consts::SQRT_2 * x;
    let (mut prev, mut cur) = (1.0, s2x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let next = (s2x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// H_n(x) together with its normalized value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermiteEval {
    pub n: usize,
    pub x: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub h: f64,
}

/// Evaluates both forms. H is rebuilt from h in the log domain and may be
/// infinite when it exceeds binary64; `h` is always finite.
pub fn hermite_eval(n: usize, x: f64) -> HermiteEval {
    let h = hermite_h(n, x);
    let ln_norm = 0.5 * (n as f64 * std::f64::consts::LN_2 + ln_gamma(n as f64 + 1.0));
    let big_h = if h == 0.0 {
        0.0
    } else {
        h.signum() * (h.abs().ln() + ln_norm).exp()
    };
    HermiteEval { n, x, big_h, h }
}

/// Szasz majorant e^{x²/2}.
pub fn szasz_bound(x: f64) -> f64 {
    (0.5 * x * x).exp()
}

/// A value of G(t, x) with its error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenFunValue {
    pub t: f64,
    pub x: f64,
    pub value: f64,
    /// e^{x²/2} |t|^{N+1} / (1 - |t|) with N = terms_used - 1.
    pub tail_bound: f64,
    /// Bound on rounding in the double-double summation.
    pub rounding_bound: f64,
    pub terms_used: usize,
}

impl GenFunValue {
    /// value - tail_bound - rounding_bound.
    pub fn certified_lower_bound(&self) -> f64 {
        self.value - self.tail_bound - self.rounding_bound
    }
}

/// 1/sqrt(m) to double-double accuracy. twofloat's division is only
/// accurate to binary64, so one Newton step on multiplications is used.
fn inv_sqrt_dd(m: f64) -> TwoFloat {
    let y = TwoFloat::from(1.0 / m.sqrt());
    let e = TwoFloat::from(1.0) - y * y * m;
    y + y * e * 0.5
}

/// Number of terms N+1 such that e^{x²/2}|t|^{N+1}/(1-|t|) <= tol.
fn terms_needed(t: f64, x: f64, tol: f64) -> f64 {
    let at = t.abs();
    if at == 0.0 {
        return 1.0;
    }
    // (N+1) ln|t| + x²/2 - ln(1-|t|) <= ln tol
    let need = (tol.ln() - 0.5 * x * x + (1.0 - at).ln()) / at.ln();
    need.ceil().max(1.0)
}

/// G(t, x) = Σ_k h_k(x) t^k for |t| < 1, truncated where the Szasz tail
/// bound falls to `tol`.
#[allow(non_snake_case)]
pub fn generating_G(t: f64, x: f64, tol: f64) -> Result<GenFunValue> {
    generating_G_with_budget(t, x, tol, DEFAULT_MAX_TERMS)
}

#[allow(non_snake_case)]
pub fn generating_G_with_budget(t: f64, x: f64, tol: f64, max_terms: usize) -> Result<GenFunValue> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("G(t, x) needs |t| < 1, got t = {t}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let needed = terms_needed(t, x, tol);
    if needed > max_terms as f64 {
        return Err(Error::Budget(format!(
            "G({t}, {x}) needs {needed} terms for tolerance {tol}, budget is {max_terms}"
        )));
    }
    let terms = needed as usize;
    let tt = TwoFloat::from(t);
    let s2x = inv_sqrt_dd(2.0) * (2.0 * x);
    let mut prev = TwoFloat::from(1.0);
    let mut cur = s2x;
    let mut tk = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    let mut max_h: f64 = 1.0;
    let mut max_term: f64 = 1.0;
    let mut sqrt_k = TwoFloat::from(1.0);
    for k in 1..terms {
        tk *= tt;
        sum += cur * tk;
        max_h = max_h.max(cur.hi().abs());
        max_term = max_term.max(max_h * tk.hi().abs());
        // advance to h_{k+1}
        let inv = inv_sqrt_dd((k + 1) as f64);
        let next = (s2x * cur - sqrt_k * prev) * inv;
        prev = cur;
        cur = next;
        sqrt_k = inv * (k + 1) as f64;
    }
    let n = terms as f64;
    let rounding_bound = 4.0 * n * n * max_term * DD_UNIT + f64::EPSILON * sum.hi().abs();
    let value = sum.hi() + sum.lo();
    let at = t.abs();
    let tail_bound = if at == 0.0 {
        0.0
    } else {
        (0.5 * x * x + n * at.ln() - (1.0 - at).ln()).exp()
    };
    Ok(GenFunValue {
        t,
        x,
        value,
        tail_bound,
        rounding_bound,
        terms_used: terms,
    })
}

/// Grid points lo, lo + step, ..., up to hi (inclusive within step/2).
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(Error::Domain(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let count = ((hi - lo) / step + 0.5).floor() as usize;
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}

/// Outcome of a positivity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub min_value: f64,
    /// (t, x) of the minimum value.
    pub argmin: (f64, f64),
    pub min_lower_bound: f64,
    pub all_positive: bool,
    pub points: Vec<GenFunValue>,
}

/// Evaluates G on the product grid, in parallel, and records the minimum.
/// `all_positive` holds iff every certified lower bound is positive.
pub fn positivity_scan(t_grid: &[f64], x_grid: &[f64], tol: f64) -> Result<ScanReport> {
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::Domain("empty scan grid".into()));
    }
    let pairs: Vec<(f64, f64)> = t_grid
        .iter()
        .flat_map(|&t| x_grid.iter().map(move |&x| (t, x)))
        .collect();
    let points: Vec<GenFunValue> = pairs
        .par_iter()
        .map(|&(t, x)| generating_G(t, x, tol))
        .collect::<Result<_>>()?;
    let mut best = &points[0];
    let mut min_lower = f64::INFINITY;
    for p in &points {
        if p.value < best.value {
            best = p;
        }
        min_lower = min_lower.min(p.certified_lower_bound());
    }
    Ok(ScanReport {
        min_value: best.value,
        argmin: (best.t, best.x),
        min_lower_bound: min_lower,
        all_positive: min_lower > 0.0,
        points,
    })
}

//! q-Pochhammer symbols and the discrete measures built from them: the
//! q-Beta law μ(a,b;q), the Lévy atoms ν_a, the convolution exponential τ_c
//! and its image μ_c on {q^k}, the coefficients of h_p and σ_{a,b,γ}.
//!
//! Throughout `L = ln(1/q)`. Infinite objects are truncated where a geometric
//! majorant of the discarded part drops below the requested tolerance, and the
//! bound is kept in the measure's truncation error.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{self, AtomicMeasure, MellinValue, PushMap};

/// Default tail tolerance for truncated measures.
pub const DEFAULT_TOL: f64 = 1e-14;

const MAX_TERMS: usize = 1_000_000;

/// Length argument of [`qpoch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QLen {
    Finite(usize),
    Infinite,
}

/// A q-Pochhammer value with an absolute error bound on the truncated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPochValue {
    pub value: f64,
    pub tail_bound: f64,
    pub factors: usize,
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must lie in (0, 1), got {q}")))
    }
}

/// (z;q)_n = Π_{k<n} (1 - z q^k). For `n = ∞` the product stops once
/// `|z| q^k < tol (1 - q)`; the remaining factors change the logarithm by at
/// most `ε = |z| q^k / ((1 - q)(1 - |z| q^k))`.
pub fn qpoch(z: f64, q: f64, n: QLen, tol: f64) -> Result<QPochValue> {
    check_q(q)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    match n {
        QLen::Finite(n) => {
            let mut v = 1.0;
            let mut zq = z;
            for _ in 0..n {
                v *= 1.0 - zq;
                zq *= q;
            }
            Ok(QPochValue {
                value: v,
                tail_bound: 0.0,
                factors: n,
            })
        }
        QLen::Infinite => {
            if !(tol > 0.0) {
                return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
            }
            let mut ln_abs = 0.0;
            let mut sign = 1.0;
            let mut zq = z;
            let mut k = 0;
            while zq.abs() >= tol * (1.0 - q) {
                let f = 1.0 - zq;
                if f == 0.0 {
                    return Ok(QPochValue {
                        value: 0.0,
                        tail_bound: 0.0,
                        factors: k + 1,
                    });
                }
                if f < 0.0 {
                    sign = -sign;
                }
                ln_abs += (-zq).ln_1p_abs();
                zq *= q;
                k += 1;
                if k > MAX_TERMS {
                    return Err(Error::Budget("q-Pochhammer product did not converge".into()));
                }
            }
            let eps = zq.abs() / ((1.0 - q) * (1.0 - zq.abs()));
            let value = sign * ln_abs.exp();
            Ok(QPochValue {
                value,
                tail_bound: value.abs() * eps.exp_m1(),
                factors: k,
            })
        }
    }
}

trait LnOnePlusAbs {
    fn ln_1p_abs(self) -> f64;
}

impl LnOnePlusAbs for f64 {
    /// ln|1 + x|
    fn ln_1p_abs(self) -> f64 {
        if self > -1.0 {
            self.ln_1p()
        } else {
            (1.0 + self).abs().ln()
        }
    }
}

/// ln (z;q)_∞ for 0 <= z < 1, summed to full precision.
pub fn ln_qpoch_inf(z: f64, q: f64) -> f64 {
    let mut acc = 0.0;
    let mut zq = z;
    while zq > 1e-18 * (1.0 - q) {
        acc += (-zq).ln_1p();
        zq *= q;
    }
    acc
}

/// ln(1 - w) for |w| < 1 on the principal branch.
fn ln_one_minus(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // -Σ w^m / m
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = w;
        for m in 1..=8 {
            acc -= p / m as f64;
            p *= w;
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) - w).ln()
    }
}

/// Complex ln (z;q)_∞ for |z| < 1, with an absolute bound on the tail.
pub fn ln_qpoch_complex(z: Complex64, q: f64) -> Result<(Complex64, f64)> {
    check_q(q)?;
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("complex (z;q)_∞ needs |z| < 1, got |z| = {}", z.norm())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zq = z;
    let mut k = 0;
    while zq.norm() >= 1e-18 * (1.0 - q) {
        acc += ln_one_minus(zq);
        zq *= q;
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Budget("complex q-Pochhammer product did not converge".into()));
        }
    }
    let r = zq.norm();
    Ok((acc, r / ((1.0 - q) * (1.0 - r)) + (k as f64 + 1.0) * f64::EPSILON * acc.norm().max(1.0)))
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if b >= 0.0 && b < a && a < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("need 0 <= b < a < 1, got a={a}, b={b}")))
    }
}

/// μ(a,b;q) = ((a;q)_∞/(b;q)_∞) Σ_k ((b/a;q)_k/(q;q)_k) a^k δ_{q^k}.
///
/// The discarded tail after index K is at most C a^{K+1}/((q;q)_∞ (1 - a)).
pub fn mu_abq(a: f64, b: f64, q: f64, tol: f64) -> Result<AtomicMeasure> {
    check_q(q)?;
    check_ab(a, b)?;
    let c = (ln_qpoch_inf(a, q) - ln_qpoch_inf(b, q)).exp();
    let qq = ln_qpoch_inf(q, q).exp();
    let r = b / a;
    let mut atoms = Vec::new();
    let mut w = c;
    let mut ak = 1.0;
    let mut k = 0usize;
    loop {
        atoms.push((q.powi(k as i32), w));
        k += 1;
        // w_k / w_{k-1} = a (1 - r q^{k-1}) / (1 - q^k)
        w *= a * (1.0 - r * q.powi(k as i32 - 1)) / (1.0 - q.powi(k as i32));
        ak *= a;
        let tail = c * ak / (qq * (1.0 - a));
        if tail < tol || w == 0.0 {
            return AtomicMeasure::new(atoms, 0.0, if w == 0.0 { 0.0 } else { tail });
        }
        if k > MAX_TERMS {
            return Err(Error::Budget("q-Beta weights did not decay".into()));
        }
    }
}

/// Largest residual between the two sides of
/// Σ_{k<=K} ((b/a;q)_k/(q;q)_k) a^k q^{kn} = ((b q^n;q)_∞/(a q^n;q)_∞)
/// over n <= N.
pub fn qbinomial_check(a: f64, b: f64, q: f64, n_max: usize, k_max: usize) -> Result<f64> {
    check_q(q)?;
    if !(a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0) {
        return Err(Error::Domain(format!("need a, b in [0, 1), got a={a}, b={b}")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let r = b / a;
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let x = a * q.powi(n as i32);
        let mut series = 0.0;
        let mut term = 1.0;
        for k in 0..=k_max {
            series += term;
            term *= x * (1.0 - r * q.powi(k as i32)) / (1.0 - q.powi(k as i32 + 1));
        }
        let product = (ln_qpoch_inf(b * q.powi(n as i32), q) - ln_qpoch_inf(x, q)).exp();
        worst = worst.max((series - product).abs());
    }
    Ok(worst)
}

/// ν_a = Σ_{k>=1} a^k/(k(1 - q^k)) δ_{kL}.
pub fn nu_a(a: f64, q: f64, tol: f64) -> Result<AtomicMeasure> {
    check_q(q)?;
    if !(a >= 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("ν_a needs 0 <= a < 1, got {a}")));
    }
    if a == 0.0 {
        return Ok(AtomicMeasure::empty());
    }
    let l = (1.0 / q).ln();
    let mut atoms = Vec::new();
    let mut ak = a;
    let mut k = 1usize;
    loop {
        atoms.push((k as f64 * l, ak / (k as f64 * (1.0 - q.powi(k as i32)))));
        ak *= a;
        k += 1;
        let tail = ak / (k as f64 * (1.0 - q) * (1.0 - a));
        if tail < tol {
            return AtomicMeasure::new(atoms, 0.0, tail);
        }
    }
}

/// Lattice weights d_k = (a^k - b^k)/(k(1 - q^k)) of ν_a - ν_b for k = 1..=kmax
/// (index 0 unused).
fn levy_lattice(a: f64, b: f64, q: f64, kmax: usize) -> Vec<f64> {
    let mut d = vec![0.0; kmax + 1];
    let (mut ak, mut bk) = (1.0, 1.0);
    for (k, dk) in d.iter_mut().enumerate().skip(1) {
        ak *= a;
        bk *= b;
        *dk = (ak - bk) / (k as f64 * (1.0 - q.powi(k as i32)));
    }
    d
}

/// Lattice truncation index for τ_c: the Chernoff bound with ρ = a^{-1/2}
/// gives τ_c(k > K) <= a^{K/2} exp(c Σ_k d_k (ρ^k - 1)).
fn tau_cutoff(a: f64, b: f64, q: f64, c: f64, mass: f64, tol: f64) -> usize {
    let rho = 1.0 / a.sqrt();
    let mut s_rho = 0.0;
    let (mut ak, mut bk, mut rk) = (1.0, 1.0, 1.0);
    for k in 1..100_000usize {
        ak *= a;
        bk *= b;
        rk *= rho;
        let t = (ak - bk) * rk / (k as f64 * (1.0 - q.powi(k as i32)));
        s_rho += t;
        if t < 1e-18 * s_rho.max(1e-300) {
            break;
        }
    }
    let log_bound0 = c * (s_rho - mass);
    let k = ((log_bound0 - tol.ln()) / (0.5 * (1.0 / a).ln())).ceil();
    (k.max(1.0) as usize).min(MAX_TERMS)
}

/// τ(a,b;q)_c = ((a;q)_∞/(b;q)_∞)^c Σ_j c^j (ν_a - ν_b)^{*j}/j! on the lattice
/// {kL}.
///
/// `k_exp` caps the number of series terms; `None` keeps every term that
/// reaches the retained lattice, which makes the series exact there. The
/// truncation error is the missing mass `1 - Σ w_k` plus a rounding margin.
pub fn tau_c(a: f64, b: f64, q: f64, c: f64, tol: f64, k_exp: Option<usize>) -> Result<AtomicMeasure> {
    let w = tau_weights(a, b, q, c, tol, k_exp)?;
    let l = (1.0 / q).ln();
    let mass: f64 = w.iter().sum();
    let slack = 16.0 * w.len() as f64 * f64::EPSILON;
    let atoms: Vec<(f64, f64)> = w.iter().enumerate().map(|(k, &wk)| (k as f64 * l, wk)).collect();
    AtomicMeasure::new(atoms, 0.0, (1.0 - mass).max(0.0) + slack)
}

fn tau_params(a: f64, b: f64, q: f64, c: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_ab(a, b)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    // mass of ν_a - ν_b = ln((b;q)_∞/(a;q)_∞)
    Ok(ln_qpoch_inf(b, q) - ln_qpoch_inf(a, q))
}

fn tau_weights(a: f64, b: f64, q: f64, c: f64, tol: f64, k_exp: Option<usize>) -> Result<Vec<f64>> {
    let mass = tau_params(a, b, q, c, tol)?;
    if let Some(0) = k_exp {
        return Err(Error::Domain("K_exp must be at least 1".into()));
    }
    let kmax = tau_cutoff(a, b, q, c, mass, tol * 0.5);
    let d = levy_lattice(a, b, q, kmax);
    let terms = k_exp.unwrap_or(kmax).min(kmax);
    let mut total = vec![0.0; kmax + 1];
    total[0] = 1.0;
    // term_j = c^j ν^{*j} / j!, supported on k >= j
    let mut term = vec![0.0; kmax + 1];
    term[0] = 1.0;
    for j in 1..=terms {
        let mut next = vec![0.0; kmax + 1];
        for k in j..=kmax {
            let mut acc = 0.0;
            for i in 1..=k - (j - 1) {
                acc += d[i] * term[k - i];
            }
            next[k] = acc * c / j as f64;
        }
        for k in j..=kmax {
            total[k] += next[k];
        }
        term = next;
    }
    let scale = (-c * mass).exp();
    Ok(total.into_iter().map(|v| v * scale).collect())
}

/// Lattice weights of τ_c from the recurrence k w_k = c Σ_j j d_j w_{k-j},
/// w_0 = e^{-cM}. Independent of the series in [`tau_c`]; used as an oracle.
pub fn tau_weights_by_recurrence(a: f64, b: f64, q: f64, c: f64, kmax: usize) -> Result<Vec<f64>> {
    let mass = tau_params(a, b, q, c, 1.0)?;
    let d = levy_lattice(a, b, q, kmax);
    let mut w = vec![0.0; kmax + 1];
    w[0] = (-c * mass).exp();
    for k in 1..=kmax {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * d[j] * w[k - j];
        }
        w[k] = c * acc / k as f64;
    }
    Ok(w)
}

/// μ(a,b;q)_c: the image of τ_c under x ↦ e^{-x}, concentrated on {q^k}.
pub fn mu_c(a: f64, b: f64, q: f64, c: f64, tol: f64) -> Result<AtomicMeasure> {
    let tau = tau_c(a, b, q, c, tol, None)?;
    measure::pushforward(&tau, PushMap::NegExp(1.0))
}

/// ((b q^z;q)_∞/(b;q)_∞ / ((a q^z;q)_∞/(a;q)_∞))^c for Re z > -ln a / ln q.
pub fn mellin_qbeta(a: f64, b: f64, q: f64, c: f64, z: Complex64) -> Result<MellinValue> {
    check_q(q)?;
    check_ab(a, b)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    let strip = if a > 0.0 { -a.ln() / q.ln() } else { f64::NEG_INFINITY };
    if !(z.re > strip) {
        return Err(Error::Domain(format!(
            "Re z = {} outside the strip Re z > {strip}",
            z.re
        )));
    }
    let qz = (z * q.ln()).exp();
    let (la_z, ea) = ln_qpoch_complex(qz * a, q)?;
    let (lb_z, eb) = if b > 0.0 {
        ln_qpoch_complex(qz * b, q)?
    } else {
        (Complex64::new(0.0, 0.0), 0.0)
    };
    let la = ln_qpoch_inf(a, q);
    let lb = ln_qpoch_inf(b, q);
    let log = (lb_z - lb - la_z + la) * c;
    let value = log.exp();
    let log_err = c * (ea + eb + 64.0 * f64::EPSILON * (la.abs() + lb.abs() + 1.0));
    Ok(MellinValue {
        value,
        abs_error: value.norm() * log_err.exp_m1(),
    })
}

/// Truncated power series c_0 + c_1 z + ... + c_K z^K. The declared region of
/// validity is |z| < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub coefficients: Vec<f64>,
    /// Bound on the relative change of any coefficient from the factors left
    /// out of an infinite product.
    pub truncation_bound: f64,
}

impl PowerSeries {
    pub fn eval(&self, z: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

fn poly_mul(x: &[f64], y: &[f64], deg: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

fn poly_pow(base: &[f64], mut e: usize, deg: usize) -> Vec<f64> {
    let mut result = vec![0.0; deg + 1];
    result[0] = 1.0;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul(&result, &b, deg);
        }
        e >>= 1;
        if e > 0 {
            b = poly_mul(&b, &b, deg);
        }
    }
    result
}

/// Σ_{j>J} j·x_j/(1 - x_j) with x_j = q^j, an upper bound for the log of the
/// omitted product at z = 1.
fn hp_tail(q: f64, j: usize) -> f64 {
    let mut acc = 0.0;
    let mut k = j + 1;
    loop {
        let x = q.powi(k as i32);
        let t = k as f64 * x / (1.0 - x);
        acc += t;
        if t < 1e-20 * acc.max(1e-300) || t == 0.0 {
            return acc;
        }
        k += 1;
    }
}

/// Taylor coefficients c_0..c_K of h_p(z;q) = Π_{j>=1} ((1 - p z q^j)/(1 - z q^j))^j.
///
/// Each factor is `1 + (1-p) Σ_{m>=1} (z q^j)^m`, raised to the j-th power by
/// truncated polynomial multiplication.
pub fn hp_coefficients(p: f64, q: f64, k: usize) -> Result<PowerSeries> {
    check_q(q)?;
    if !(p >= 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in [0, 1), got {p}")));
    }
    let mut coeffs = vec![0.0; k + 1];
    coeffs[0] = 1.0;
    if k == 0 {
        return Ok(PowerSeries {
            coefficients: coeffs,
            truncation_bound: 0.0,
        });
    }
    let mut j = 1usize;
    loop {
        let qj = q.powi(j as i32);
        let mut factor = vec![0.0; k + 1];
        factor[0] = 1.0;
        let mut pw = qj;
        for f in factor.iter_mut().skip(1) {
            *f = (1.0 - p) * pw;
            pw *= qj;
        }
        coeffs = poly_mul(&coeffs, &poly_pow(&factor, j, k), k);
        let tail = (1.0 - p) * hp_tail(q, j);
        if tail < 1e-17 {
            return Ok(PowerSeries {
                coefficients: coeffs,
                truncation_bound: tail.exp_m1(),
            });
        }
        j += 1;
        if j > MAX_TERMS {
            return Err(Error::Budget("h_p product did not converge".into()));
        }
    }
}

/// ln h_p(z;q) from the product, for 0 <= z < 1/q.
pub fn ln_hp_product(p: f64, z: f64, q: f64) -> f64 {
    let mut acc = 0.0;
    let mut j = 1usize;
    loop {
        let x = z * q.powi(j as i32);
        let t = j as f64 * ((-p * x).ln_1p() - (-x).ln_1p());
        acc += t;
        if x < 1e-18 && t.abs() < 1e-20 * acc.abs().max(1e-300) || x == 0.0 {
            return acc;
        }
        j += 1;
    }
}

/// σ_{a,b,γ} = (1/h_{b/a}(a;q)) Σ_{k<=K} c_k a^k δ_{γ q^k}.
///
/// Weights are normalised by the product value of h, so the total mass falls
/// short of 1 by exactly the truncated tail, which is recorded.
pub fn sigma_abgamma(a: f64, b: f64, q: f64, gamma: f64, k: usize) -> Result<AtomicMeasure> {
    check_q(q)?;
    check_ab(a, b)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("γ must be positive, got {gamma}")));
    }
    let p = b / a;
    let series = hp_coefficients(p, q, k)?;
    let h = ln_hp_product(p, a, q).exp();
    let mut atoms = Vec::with_capacity(k + 1);
    let mut ak = 1.0;
    let mut mass = 0.0;
    for (i, &c) in series.coefficients.iter().enumerate() {
        let w = c * ak / h;
        mass += w;
        atoms.push((gamma * q.powi(i as i32), w));
        ak *= a;
    }
    let slack = 16.0 * (k as f64 + 1.0) * f64::EPSILON + series.truncation_bound;
    AtomicMeasure::new(atoms, 0.0, (1.0 - mass).max(0.0) + slack)
}

/// [`sigma_abgamma`] with K chosen so the neglected mass is below `tol`,
/// using c_k <= h(r) r^{-k} for r between a and 1/q.
pub fn sigma_abgamma_auto(a: f64, b: f64, q: f64, gamma: f64, tol: f64) -> Result<AtomicMeasure> {
    check_q(q)?;
    check_ab(a, b)?;
    let p = b / a;
    let r = 0.5 * (a + 1.0);
    let ratio = a / r;
    let ln_h_ratio = ln_hp_product(p, r, q) - ln_hp_product(p, a, q);
    // tail <= h(r)/h(a) · ratio^{K+1}/(1 - ratio)
    let need = (tol * (1.0 - ratio)).ln() - ln_h_ratio;
    let k = (need / ratio.ln()).ceil().max(1.0) as usize;
    if k > 100_000 {
        return Err(Error::Budget(format!("σ_(a,b,γ) needs {k} coefficients")));
    }
    sigma_abgamma(a, b, q, gamma, k)
}

/// γ = (b;q)_∞/(a;q)_∞, the scale for which σ_{a,b,γ} has moments
/// Π_{k<n} ((1 - b q^k)/(1 - a q^k))^{n-k}.
pub fn sigma_gamma(a: f64, b: f64, q: f64) -> f64 {
    (ln_qpoch_inf(b, q) - ln_qpoch_inf(a, q)).exp()
}

/// ln Π_{k=1}^n (b;q)_k/(a;q)_k = Σ_{k<n} (n-k) ln((1 - b q^k)/(1 - a q^k)).
pub fn ln_qbinom_product(a: f64, b: f64, q: f64, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let qk = q.powi(k as i32);
            (n - k) as f64 * ((-b * qk).ln_1p() - (-a * qk).ln_1p())
        })
        .sum()
}

/// ln((a;q)_n/(b;q)_n).
pub fn ln_qratio_moment(a: f64, b: f64, q: f64, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let qk = q.powi(k as i32);
            (-a * qk).ln_1p() - (-b * qk).ln_1p()
        })
        .sum()
}

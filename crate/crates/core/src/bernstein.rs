//! Catalogued Bernstein functions, the moment sequences they generate and the
//! log-moment representation built from their κ measures.
//!
//! For a Bernstein function `f` with `f'/f = ∫ e^{-sx} dκ(x)`, the sequence
//! `s_n = f(α) f(α+β) ··· f(α+(n-1)β)` satisfies
//!
//! ```text
//! ln s_n = n ln f(α) + ∫ (u^n - 1 - n(u - 1)) dσ(u)
//! ```
//!
//! where σ is the image of `e^{-αx} dκ(x) / (x (1 - e^{-βx}))` under
//! `x ↦ e^{-βx}`. Integrals against σ are evaluated in the `x` variable, where
//! the factor `(1 - u)` cancels analytically and nothing is singular.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hankel::MomentSequence;
use crate::measure::{AtomicMeasure, DensityId, DensityMeasure, Measure, QuadHint};
use crate::quad::{self, QuadConfig, QuadValue};
use crate::special::expm1_complex;

/// Default bound on the mass discarded when κ or σ is atomic and infinite.
pub const DEFAULT_ATOM_TOL: f64 = 1e-17;

/// Points at which a Lévy triple is compared with the closed form.
pub const SELF_TEST_POINTS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinKind {
    /// f(s) = a + s
    Affine { a: f64 },
    /// f(s) = s
    Linear,
    /// f(s) = (a + s)/(b + s), 0 <= a < b
    Ratio { a: f64, b: f64 },
    /// f(s) = (1 - a q^s)/(1 - b q^s), 0 <= b < a < 1
    QRatio { a: f64, b: f64, q: f64 },
    /// f(s) = s (1 + 1/s)^{s+1}, with f(0) = 1
    PowerTower,
}

/// A catalogued Bernstein function. Construction validates parameters and
/// runs the self-test described on [`BernsteinFunction::self_test`].
#[derive(Clone, PartialEq)]
pub struct BernsteinFunction {
    kind: BernsteinKind,
    id: String,
}

impl fmt::Debug for BernsteinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BernsteinFunction({})", self.id)
    }
}

/// The Lévy triple `(a, b, ν)` with `f(s) = a + bs + ∫(1 - e^{-sx}) dν(x)`.
#[derive(Debug, Clone)]
pub struct LevyTriple {
    pub a: f64,
    pub b: f64,
    pub levy: Measure,
}

/// `(a, b, σ)` with `ln s_n = an + bn² + ∫(x^n - 1 - n(x - 1)) dσ(x)`.
#[derive(Debug, Clone)]
pub struct LevyKhinchinRep {
    pub a: f64,
    pub b: f64,
    pub sigma: Measure,
}

impl BernsteinFunction {
    pub fn affine(a: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("affine needs a >= 0, got {a}")));
        }
        Self::build(BernsteinKind::Affine { a }, format!("affine:{a}"))
    }

    pub fn linear() -> Result<Self> {
        Self::build(BernsteinKind::Linear, "linear".into())
    }

    pub fn ratio(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a < b && b.is_finite()) {
            return Err(Error::Domain(format!("ratio needs 0 <= a < b, got a={a}, b={b}")));
        }
        Self::build(BernsteinKind::Ratio { a, b }, format!("ratio:{a}:{b}"))
    }

    /// s/(s+1)
    pub fn mobius() -> Result<Self> {
        Self::build(BernsteinKind::Ratio { a: 0.0, b: 1.0 }, "mobius".into())
    }

    pub fn qratio(a: f64, b: f64, q: f64) -> Result<Self> {
        if !(b >= 0.0 && b < a && a < 1.0) {
            return Err(Error::Domain(format!("qratio needs 0 <= b < a < 1, got a={a}, b={b}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("qratio needs 0 < q < 1, got {q}")));
        }
        Self::build(BernsteinKind::QRatio { a, b, q }, format!("qratio:{a}:{b}:{q}"))
    }

    pub fn power_tower() -> Result<Self> {
        Self::build(BernsteinKind::PowerTower, "powertower".into())
    }

    fn build(kind: BernsteinKind, id: String) -> Result<Self> {
        let f = BernsteinFunction { kind, id };
        f.self_test()?;
        Ok(f)
    }

    pub fn kind(&self) -> BernsteinKind {
        self.kind
    }

    /// Catalog id, e.g. `ratio:1:2`.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Closed-form value at `s >= 0`.
    pub fn eval(&self, s: f64) -> f64 {
        match self.kind {
            BernsteinKind::Affine { a } => a + s,
            BernsteinKind::Linear => s,
            BernsteinKind::Ratio { a, b } => (a + s) / (b + s),
            BernsteinKind::QRatio { a, b, q } => {
                let qs = q.powf(s);
                (1.0 - a * qs) / (1.0 - b * qs)
            }
            BernsteinKind::PowerTower => self.ln_eval(s).exp(),
        }
    }

    /// ln f(s), accurate where f is close to 1.
    pub fn ln_eval(&self, s: f64) -> f64 {
        match self.kind {
            BernsteinKind::QRatio { a, b, q } => {
                let qs = q.powf(s);
                (-a * qs).ln_1p() - (-b * qs).ln_1p()
            }
            BernsteinKind::PowerTower => {
                if s == 0.0 {
                    0.0
                } else {
                    (s + 1.0) * s.ln_1p() - s * s.ln()
                }
            }
            _ => self.eval(s).ln(),
        }
    }

    /// Analytic derivative f'(s).
    pub fn derivative(&self, s: f64) -> f64 {
        match self.kind {
            BernsteinKind::Affine { .. } | BernsteinKind::Linear => 1.0,
            BernsteinKind::Ratio { a, b } => (b - a) / ((b + s) * (b + s)),
            BernsteinKind::QRatio { a, b, q } => {
                let qs = q.powf(s);
                let den = 1.0 - b * qs;
                (1.0 / q).ln() * qs * (a - b) / (den * den)
            }
            BernsteinKind::PowerTower => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    self.eval(s) * (1.0 / s).ln_1p()
                }
            }
        }
    }

    /// The Lévy triple, when the catalog knows it.
    pub fn levy_triple(&self) -> Option<LevyTriple> {
        let empty = || Measure::Atomic(AtomicMeasure::empty());
        match self.kind {
            BernsteinKind::Affine { a } => Some(LevyTriple { a, b: 1.0, levy: empty() }),
            BernsteinKind::Linear => Some(LevyTriple { a: 0.0, b: 1.0, levy: empty() }),
            BernsteinKind::Ratio { a, b } => {
                let d = DensityMeasure::new(
                    move |x: f64| (b - a) * (-b * x).exp(),
                    (0.0, f64::INFINITY),
                    QuadHint::ExponentialDecay,
                    -1.0,
                    self.density_id("levy"),
                )
                .expect("valid support");
                Some(LevyTriple {
                    a: a / b,
                    b: 0.0,
                    levy: d.into(),
                })
            }
            BernsteinKind::QRatio { a, b, q } => {
                // 1 - (a - b) Σ_{k>=0} b^k q^{(k+1)s}
                let l = (1.0 / q).ln();
                let mut atoms = Vec::new();
                let mut w = a - b;
                let mut k = 0usize;
                let bound = |w: f64| if b > 0.0 { w / (1.0 - b) } else { 0.0 };
                loop {
                    atoms.push(((k + 1) as f64 * l, w));
                    w *= b;
                    k += 1;
                    if bound(w) < DEFAULT_ATOM_TOL || w == 0.0 {
                        break;
                    }
                }
                let m = AtomicMeasure::new(atoms, 0.0, bound(w)).expect("positive weights");
                Some(LevyTriple {
                    a: (1.0 - a) / (1.0 - b),
                    b: 0.0,
                    levy: m.into(),
                })
            }
            BernsteinKind::PowerTower => None,
        }
    }

    /// a + bs + ∫(1 - e^{-sx}) dν(x), or `None` without a Lévy triple.
    pub fn eval_via_levy(&self, s: f64) -> Option<Result<f64>> {
        let t = self.levy_triple()?;
        Some(t.levy.integrate(|x| -(-s * x).exp_m1()).map(|(v, _)| t.a + t.b * s + v))
    }

    /// Compares the Lévy triple with the closed form at 0.1, 1 and 10, and
    /// checks that f is nonnegative and nondecreasing on a grid in [0, 20].
    pub fn self_test(&self) -> Result<()> {
        for s in SELF_TEST_POINTS {
            if let Some(r) = self.eval_via_levy(s) {
                let v = r?;
                let want = self.eval(s);
                if (v - want).abs() > 1e-10 * want.abs().max(1.0) {
                    return Err(Error::Inconsistent(format!(
                        "{}: Lévy representation gives {v} at s={s}, closed form {want}",
                        self.id
                    )));
                }
            }
        }
        let mut prev = self.eval(0.0);
        if !(prev >= 0.0) {
            return Err(Error::Inconsistent(format!("{}: f(0) = {prev} < 0", self.id)));
        }
        for i in 1..=80 {
            let v = self.eval(0.25 * i as f64);
            if !(v >= prev * (1.0 - 1e-15)) {
                return Err(Error::Inconsistent(format!(
                    "{}: f decreases near s = {}",
                    self.id,
                    0.25 * i as f64
                )));
            }
            prev = v;
        }
        Ok(())
    }

    fn density_id(&self, what: &str) -> DensityId {
        DensityId {
            density: what.into(),
            params: BTreeMap::from([("bernstein".to_string(), serde_json::json!(self.id))]),
        }
    }

    fn kappa(&self) -> Result<Kappa> {
        match self.kind {
            BernsteinKind::Affine { a } => Ok(Kappa::Density {
                decay: a,
                f: KappaDensity::Exp(a),
            }),
            BernsteinKind::Linear => Ok(Kappa::Density {
                decay: 0.0,
                f: KappaDensity::Exp(0.0),
            }),
            BernsteinKind::Ratio { a, b } => Ok(Kappa::Density {
                decay: a,
                f: KappaDensity::ExpDiff(a, b),
            }),
            BernsteinKind::QRatio { a, b, q } => Ok(Kappa::Lattice { a, b, q }),
            BernsteinKind::PowerTower => Err(Error::Unsupported(format!(
                "{} has no analytic κ in the catalog",
                self.id
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum KappaDensity {
    /// e^{-ax}
    Exp(f64),
    /// e^{-ax} - e^{-bx}
    ExpDiff(f64, f64),
}

impl KappaDensity {
    fn eval(self, x: f64) -> f64 {
        match self {
            KappaDensity::Exp(a) => (-a * x).exp(),
            KappaDensity::ExpDiff(a, b) => -(-a * x).exp() * (-(b - a) * x).exp_m1(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kappa {
    /// Density on (0, ∞) decaying like e^{-decay·x}.
    Density { decay: f64, f: KappaDensity },
    /// Atoms (a^k - b^k) ln(1/q) at k ln(1/q), k >= 1.
    Lattice { a: f64, b: f64, q: f64 },
}

/// κ with `f'/f = ∫ e^{-sx} dκ(x)`.
pub fn kappa_of(f: &BernsteinFunction) -> Result<Measure> {
    kappa_with_tol(f, DEFAULT_ATOM_TOL)
}

pub fn kappa_with_tol(f: &BernsteinFunction, tol: f64) -> Result<Measure> {
    match f.kappa()? {
        Kappa::Density { f: dens, .. } => {
            let d = DensityMeasure::new(
                move |x: f64| dens.eval(x),
                (0.0, f64::INFINITY),
                QuadHint::ExponentialDecay,
                -1.0,
                f.density_id("kappa"),
            )?;
            Ok(d.into())
        }
        Kappa::Lattice { a, b, q } => {
            let l = (1.0 / q).ln();
            let mut atoms = Vec::new();
            let (mut ak, mut bk) = (a, b);
            let mut k = 1usize;
            loop {
                atoms.push((k as f64 * l, (ak - bk) * l));
                ak *= a;
                bk *= b;
                k += 1;
                let tail = ak * l / (1.0 - a);
                if tail < tol {
                    return Ok(AtomicMeasure::new(atoms, 0.0, tail)?.into());
                }
            }
        }
    }
}

/// s_n = f(α) f(α+β) ··· f(α+(n-1)β), accumulated in the log domain.
pub fn power_moments(f: &BernsteinFunction, alpha: f64, beta: f64) -> Result<MomentSequence> {
    check_alpha_beta(alpha, beta)?;
    let f0 = f.eval(alpha);
    if !(f0 > 0.0) {
        return Err(Error::Precondition(format!(
            "power moments of {} need f(α) > 0, got f({alpha}) = {f0}",
            f.id
        )));
    }
    let f = f.clone();
    Ok(MomentSequence::from_log_fn(
        move |n| Ok((0..n).map(|k| f.ln_eval(alpha + k as f64 * beta)).sum()),
        true,
    ))
}

fn check_alpha_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("α must be >= 0, got {alpha}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("β must be > 0, got {beta}")));
    }
    Ok(())
}

/// Validated (f, α, β) with σ available.
struct SigmaSpec {
    kappa: Kappa,
    alpha: f64,
    beta: f64,
    ln_f_alpha: f64,
}

impl SigmaSpec {
    fn new(f: &BernsteinFunction, alpha: f64, beta: f64) -> Result<Self> {
        check_alpha_beta(alpha, beta)?;
        let kappa = f.kappa()?;
        let fa = f.eval(alpha);
        if !(fa > 0.0) {
            return Err(Error::Precondition(format!(
                "σ for {} needs f(α) > 0, got f({alpha}) = {fa}",
                f.id
            )));
        }
        if let Kappa::Density { decay, f: dens } = kappa {
            // ∫_1^∞ e^{-αx} dκ(x)/x must be finite
            let rate = alpha + decay;
            let tail = if rate > 0.0 {
                quad::integrate_exp_decay_rate(
                    |x: f64| (-alpha * x).exp() * dens.eval(x) / x,
                    1.0,
                    rate,
                    &QuadConfig::default(),
                )
                .ok()
            } else {
                None
            };
            if !tail.is_some_and(|r| r.value.is_finite()) {
                return Err(Error::Precondition(format!(
                    "∫ e^(-αx) dκ(x)/x diverges at infinity for {} with α = {alpha}",
                    f.id
                )));
            }
        }
        Ok(SigmaSpec {
            kappa,
            alpha,
            beta,
            ln_f_alpha: f.ln_eval(alpha),
        })
    }

    /// ∫ K(u) dσ(u), where `h(x)` returns `K(u)/(1 - u)` at `u = e^{-βx}` and
    /// `kernel_bound` bounds |K| on [0, 1].
    fn integrate<T: QuadValue>(&self, h: impl Fn(f64) -> T, kernel_bound: f64) -> Result<T> {
        let (alpha, beta) = (self.alpha, self.beta);
        match self.kappa {
            Kappa::Density { decay, f: dens } => {
                let g = |x: f64| {
                    let w = (-alpha * x).exp() * dens.eval(x) / x;
                    if w == 0.0 {
                        T::default()
                    } else {
                        h(x) * w
                    }
                };
                let cfg = QuadConfig::default();
                let head = quad::integrate(&g, 0.0, 1.0, &cfg)?;
                let tail = quad::integrate_exp_decay_rate(&g, 1.0, alpha + decay, &cfg)?;
                Ok(head.value + tail.value)
            }
            Kappa::Lattice { a, b, q } => {
                let l = (1.0 / q).ln();
                let r = a * q.powf(alpha);
                let one_minus_qb = -(beta * -l).exp_m1();
                let mut acc = T::default();
                let (mut ak, mut bk, mut ek) = (a, b, q.powf(alpha));
                let mut k = 1usize;
                loop {
                    let x = k as f64 * l;
                    // weight of κ at x is (a^k - b^k) L; divided by x = kL
                    let w = (ak - bk) * ek / k as f64;
                    acc = acc + h(x) * w;
                    ak *= a;
                    bk *= b;
                    ek *= q.powf(alpha);
                    k += 1;
                    let tail = kernel_bound * r.powi(k as i32) / (k as f64 * (1.0 - r) * one_minus_qb);
                    if tail < DEFAULT_ATOM_TOL || ak == 0.0 {
                        return Ok(acc);
                    }
                }
            }
        }
    }
}

/// σ on (0, 1): the image of `e^{-αx} dκ(x) / (x(1 - e^{-βx}))` under
/// `x ↦ e^{-βx}`.
///
/// σ has infinite mass near 1 in the density case; only integrands vanishing
/// to second order at 1 are integrable. The returned density therefore
/// declares an empty Mellin strip.
pub fn sigma_of(f: &BernsteinFunction, alpha: f64, beta: f64) -> Result<Measure> {
    let spec = SigmaSpec::new(f, alpha, beta)?;
    match spec.kappa {
        Kappa::Density { f: dens, .. } => {
            let id = DensityId {
                density: "sigma".into(),
                params: BTreeMap::from([
                    ("bernstein".to_string(), serde_json::json!(f.id)),
                    ("alpha".to_string(), serde_json::json!(alpha)),
                    ("beta".to_string(), serde_json::json!(beta)),
                ]),
            };
            let d = DensityMeasure::new_two_sided(
                move |u: f64, one_minus_u: f64| {
                    if !(u > 0.0 && one_minus_u > 0.0) {
                        return 0.0;
                    }
                    let x = if u < 0.5 { -u.ln() } else { -(-one_minus_u).ln_1p() } / beta;
                    (-alpha * x).exp() * dens.eval(x) / (x * one_minus_u * beta * u)
                },
                (0.0, 1.0),
                QuadHint::FiniteInterval,
                f64::INFINITY,
                id,
            )?;
            Ok(d.into())
        }
        Kappa::Lattice { a, b, q } => {
            let l = (1.0 / q).ln();
            let qa = q.powf(alpha);
            let r = a * qa;
            let mut atoms = Vec::new();
            let (mut ak, mut bk, mut ek) = (a, b, qa);
            let mut k = 1usize;
            loop {
                let x = k as f64 * l;
                let one_minus_u = -(-beta * x).exp_m1();
                atoms.push(((-beta * x).exp(), (ak - bk) * ek / (k as f64 * one_minus_u)));
                ak *= a;
                bk *= b;
                ek *= qa;
                k += 1;
                let tail = r.powi(k as i32) / (k as f64 * (1.0 - r) * -(-beta * l).exp_m1());
                if tail < DEFAULT_ATOM_TOL || ak == 0.0 {
                    return Ok(AtomicMeasure::new(atoms, 0.0, tail)?.into());
                }
            }
        }
    }
}

/// `(1 - u)^2 Σ_{i<n-1} (n-1-i) u^i`, which equals `u^n - 1 - n(u - 1)` and is
/// free of cancellation for `u >= 0`.
pub fn log_kernel(u: f64, n: usize) -> f64 {
    let d = 1.0 - u;
    d * d * kernel_sum(u, n)
}

fn kernel_sum(u: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in (0..n - 1).rev() {
        acc = acc * u + (n - 1 - i) as f64;
    }
    acc
}

/// `(u^z - 1 - z(u - 1)) / (1 - u)` with `u = e^{-t}`, `t > 0`.
fn complex_kernel_over(t: f64, z: Complex64) -> Complex64 {
    let one_minus_u = -(-t).exp_m1();
    let k = if t * z.norm().max(1.0) < 0.5 {
        // Σ_{m>=2} (-t)^m (z^m - z) / m!
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zm = z;
        let mut tm = -t;
        for m in 2..60 {
            zm *= z;
            tm *= -t / m as f64;
            let term = (zm - z) * tm;
            acc += term;
            if term.norm() <= 1e-17 * acc.norm() {
                break;
            }
        }
        acc
    } else {
        expm1_complex(-z * t) - z * (-t).exp_m1()
    };
    k / one_minus_u
}

/// n ln f(α) + ∫(u^n - 1 - n(u - 1)) dσ(u).
pub fn log_moment_via_rep(f: &BernsteinFunction, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let spec = SigmaSpec::new(f, alpha, beta)?;
    if n < 2 {
        return Ok(n as f64 * spec.ln_f_alpha);
    }
    let beta = spec.beta;
    let integral = spec.integrate(
        |x: f64| {
            let t = beta * x;
            -(-t).exp_m1() * kernel_sum((-t).exp(), n)
        },
        (n * (n - 1)) as f64 / 2.0,
    )?;
    Ok(n as f64 * spec.ln_f_alpha + integral)
}

/// ψ(z) = -z ln f(α) - ∫(u^z - 1 - z(u - 1)) dσ(u) for `Re z >= 0`.
pub fn psi(f: &BernsteinFunction, alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    if !(z.re >= 0.0) {
        return Err(Error::Domain(format!("ψ needs Re z >= 0, got {z}")));
    }
    let spec = SigmaSpec::new(f, alpha, beta)?;
    let beta = spec.beta;
    let integral = spec.integrate(|x: f64| complex_kernel_over(beta * x, z), 2.0 + 2.0 * z.norm())?;
    Ok(-z * spec.ln_f_alpha - integral)
}

/// The representation `(ln f(α), 0, σ)` of the sequence from [`power_moments`].
pub fn levy_khinchin_rep(f: &BernsteinFunction, alpha: f64, beta: f64) -> Result<LevyKhinchinRep> {
    let sigma = sigma_of(f, alpha, beta)?;
    Ok(LevyKhinchinRep {
        a: f.ln_eval(alpha),
        b: 0.0,
        sigma,
    })
}

/// a·n + b·n² + ∫(x^n - 1 - n(x - 1)) dσ(x).
pub fn lk_log_moment(rep: &LevyKhinchinRep, n: usize) -> Result<f64> {
    let nf = n as f64;
    let (integral, _) = rep.sigma.integrate(|x| log_kernel(x, n))?;
    Ok(rep.a * nf + rep.b * nf * nf + integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{self, AtomicMeasure};
    use crate::special::ln_gamma;

    fn catalog() -> Vec<BernsteinFunction> {
        vec![
            BernsteinFunction::affine(1.0).unwrap(),
            BernsteinFunction::affine(2.0).unwrap(),
            BernsteinFunction::linear().unwrap(),
            BernsteinFunction::ratio(1.0, 2.0).unwrap(),
            BernsteinFunction::ratio(0.5, 3.0).unwrap(),
            BernsteinFunction::mobius().unwrap(),
            BernsteinFunction::qratio(0.5, 0.25, 0.5).unwrap(),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(BernsteinFunction::linear().unwrap().eval(2.0), 2.0);
        assert_eq!(BernsteinFunction::ratio(1.0, 2.0).unwrap().eval(0.0), 0.5);
        let q = BernsteinFunction::qratio(0.5, 0.25, 0.5).unwrap();
        assert!((q.eval(1.0) - 6.0 / 7.0).abs() < 1e-15);
        let t = BernsteinFunction::power_tower().unwrap();
        assert_eq!(t.eval(0.0), 1.0);
        assert!((t.eval(1.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BernsteinFunction::ratio(2.0, 1.0).is_err());
        assert!(BernsteinFunction::qratio(0.25, 0.5, 0.5).is_err());
        assert!(BernsteinFunction::qratio(0.5, 0.25, 1.0).is_err());
        assert!(BernsteinFunction::affine(-1.0).is_err());
    }

    #[test]
    fn kappa_matches_log_derivative() {
        for f in catalog() {
            let k = kappa_of(&f).unwrap();
            for s in [0.5, 1.0, 2.0, 5.0] {
                let (lap, _) = k.laplace(s).unwrap();
                let want = f.derivative(s) / f.eval(s);
                assert!((lap - want).abs() < 1e-10, "{} at {s}: {lap} vs {want}", f.id());
                // central difference oracle
                let h = 1e-5;
                let fd = (f.eval(s + h) - f.eval(s - h)) / (2.0 * h) / f.eval(s);
                assert!((fd - want).abs() < 1e-8);
            }
            if let Some(a) = k.as_atomic() {
                assert_eq!(a.zero_mass(), 0.0);
            }
        }
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_of(&BernsteinFunction::affine(1.0).unwrap()).unwrap();
        assert!((k.laplace(1.0).unwrap().0 - 0.5).abs() < 1e-12);
        let r = BernsteinFunction::ratio(1.0, 2.0).unwrap();
        assert!((r.derivative(0.0) / r.eval(0.0) - 0.5).abs() < 1e-15);
        let (a, b, q) = (0.5, 0.25, 0.5f64);
        let k = kappa_of(&BernsteinFunction::qratio(a, b, q).unwrap()).unwrap();
        let first = k.as_atomic().unwrap().atoms()[0];
        assert!((first.1 - (a - b) * (1.0 / q).ln()).abs() < 1e-15);
        assert!(matches!(
            kappa_of(&BernsteinFunction::power_tower().unwrap()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn power_moment_examples() {
        let s = power_moments(&BernsteinFunction::affine(1.0).unwrap(), 0.0, 1.0).unwrap();
        assert!((s.get(3).unwrap() - 6.0).abs() < 1e-13);
        let s = power_moments(&BernsteinFunction::ratio(1.0, 2.0).unwrap(), 0.0, 1.0).unwrap();
        assert!((s.get(3).unwrap() - 0.25).abs() < 1e-15);
        let s = power_moments(&BernsteinFunction::affine(2.0).unwrap(), 0.0, 1.0).unwrap();
        assert!((s.get(2).unwrap() - 6.0).abs() < 1e-14);
        let t = power_moments(&BernsteinFunction::power_tower().unwrap(), 1.0, 1.0).unwrap();
        assert!((t.ln_get(5).unwrap() - 6.0 * 6f64.ln()).abs() < 1e-12);
        assert!(matches!(
            power_moments(&BernsteinFunction::linear().unwrap(), 0.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn log_moment_examples() {
        let f = BernsteinFunction::affine(1.0).unwrap();
        assert_eq!(log_moment_via_rep(&f, 0.0, 1.0, 0).unwrap(), 0.0);
        assert_eq!(log_moment_via_rep(&f, 0.5, 2.0, 1).unwrap(), f.ln_eval(0.5));
        let v = log_moment_via_rep(&f, 0.0, 1.0, 2).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-8, "{v}");
        let p = psi(&f, 0.0, 1.0, Complex64::new(3.0, 0.0)).unwrap();
        assert!((p.re + 6f64.ln()).abs() < 1e-8 && p.im.abs() < 1e-14);
    }

    #[test]
    fn psi_at_zero_and_one() {
        for f in catalog() {
            for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0)] {
                let z0 = psi(&f, alpha, beta, Complex64::new(0.0, 0.0)).unwrap();
                assert!(z0.norm() < 1e-12, "{} {z0}", f.id());
                let z1 = psi(&f, alpha, beta, Complex64::new(1.0, 0.0)).unwrap();
                assert!((z1.re + f.ln_eval(alpha)).abs() < 1e-12 && z1.im.abs() < 1e-12);
            }
        }
        let f = BernsteinFunction::affine(1.0).unwrap();
        assert!(psi(&f, 0.0, 1.0, Complex64::new(-0.5, 0.0)).is_err());
    }

    #[test]
    fn psi_is_conjugate_symmetric() {
        let f = BernsteinFunction::ratio(0.5, 3.0).unwrap();
        let z = Complex64::new(1.5, 2.0);
        let a = psi(&f, 0.5, 2.0, z).unwrap();
        let b = psi(&f, 0.5, 2.0, z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn psi_of_affine_matches_gamma_ratio() {
        // α = 0, β = 1: s_n = (a)_n, so ψ(z) = -ln Γ(a+z) + ln Γ(a) on the real axis
        let a = 2.0;
        let f = BernsteinFunction::affine(a).unwrap();
        for x in [0.5, 2.5, 7.25] {
            let p = psi(&f, 0.0, 1.0, Complex64::new(x, 0.0)).unwrap();
            let want = -(ln_gamma(a + x) - ln_gamma(a));
            assert!((p.re - want).abs() < 1e-9, "{x}: {} vs {want}", p.re);
        }
    }

    #[test]
    fn sigma_lives_inside_unit_interval() {
        let s = sigma_of(&BernsteinFunction::qratio(0.5, 0.25, 0.5).unwrap(), 0.0, 1.0).unwrap();
        let atoms = s.as_atomic().unwrap();
        assert!(atoms.atoms().iter().all(|&(u, _)| u > 0.0 && u < 1.0));
        // atoms at q^k for β = 1
        assert!((atoms.atoms().last().unwrap().0 - 0.5).abs() < 1e-15);

        let d = sigma_of(&BernsteinFunction::affine(1.0).unwrap(), 0.0, 1.0).unwrap();
        let d = d.as_density().unwrap();
        assert_eq!(d.support(), (0.0, 1.0));
        let (v, _) = Measure::Density(d.clone())
            .integrate(|u| (1.0 - u) * (1.0 - u))
            .unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn linear_needs_positive_alpha() {
        let f = BernsteinFunction::linear().unwrap();
        assert!(matches!(sigma_of(&f, 0.0, 1.0), Err(Error::Precondition(_))));
        let d = sigma_of(&f, 1.0, 1.0).unwrap();
        // substitution x = -ln u of e^{-x}/(x(1-e^{-x})) dx
        let u: f64 = 0.3;
        let x = -u.ln();
        let want = (-x).exp() / (x * (1.0 - u)) / u;
        assert!((d.as_density().unwrap().eval(u) - want).abs() < 1e-14);
    }

    #[test]
    fn lk_log_moment_examples() {
        let a: f64 = 0.7;
        let rep = LevyKhinchinRep {
            a,
            b: 0.0,
            sigma: AtomicMeasure::empty().into(),
        };
        assert!((lk_log_moment(&rep, 4).unwrap() - 4.0 * a).abs() < 1e-15);

        let q: f64 = 0.5;
        let rep = LevyKhinchinRep {
            a: 0.0,
            b: (1.0 / q).ln() / 2.0,
            sigma: AtomicMeasure::empty().into(),
        };
        // q^{-n²/2} is the v_c moment q^{-cn(n+1)/2} times q^{cn/2} at c = 1
        for n in 0..6usize {
            let want = -((n * n) as f64) / 2.0 * q.ln();
            assert!((lk_log_moment(&rep, n).unwrap() - want).abs() < 1e-13);
        }

        let f = BernsteinFunction::affine(1.0).unwrap();
        let rep = levy_khinchin_rep(&f, 0.0, 1.0).unwrap();
        assert_eq!(rep.a, 0.0);
        for n in 2..8usize {
            let got = lk_log_moment(&rep, n).unwrap();
            let want = ln_gamma(n as f64 + 1.0);
            assert!((got - want).abs() < 1e-8, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn atomic_rep_matches_sigma_measure() {
        let f = BernsteinFunction::qratio(0.7, 0.1, 0.8).unwrap();
        let rep = levy_khinchin_rep(&f, 0.5, 2.0).unwrap();
        let s = power_moments(&f, 0.5, 2.0).unwrap();
        for n in 0..10usize {
            let got = lk_log_moment(&rep, n).unwrap();
            assert!((got - s.ln_get(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn upper_bound_from_linear_growth() {
        // s_n <= f(α) f(β)^{n-1} (1 + α/β)_{n-1}
        for f in catalog() {
            for (alpha, beta) in [(0.0, 1.0), (1.0, 1.0), (0.5, 2.0)] {
                let Ok(s) = power_moments(&f, alpha, beta) else { continue };
                for n in 1..=15usize {
                    let rising: f64 = (0..n - 1).map(|k| (1.0 + alpha / beta + k as f64).ln()).sum();
                    let bound = f.ln_eval(alpha) + (n - 1) as f64 * f.ln_eval(beta) + rising;
                    assert!(s.ln_get(n).unwrap() <= bound + 1e-12, "{} n={n}", f.id());
                }
            }
        }
    }

    #[test]
    fn kernel_identity() {
        for &u in &[0.0f64, 0.1, 0.5, 0.999_999, 2.0] {
            for n in 0..12usize {
                let direct = u.powi(n as i32) - 1.0 - n as f64 * (u - 1.0);
                assert!((log_kernel(u, n) - direct).abs() < 1e-12 * direct.abs().max(1.0));
            }
        }
        // the complex kernel reduces to the real one at integer z
        for &t in &[1e-6, 1e-3, 0.5, 4.0] {
            let u = (-t as f64).exp();
            for n in 0..8usize {
                let d = -(-t as f64).exp_m1();
                let c = complex_kernel_over(t, Complex64::new(n as f64, 0.0)) * d;
                let r = d * d * kernel_sum(u, n);
                assert!((c.re - r).abs() < 1e-14 * r.abs().max(1e-300) + 1e-30, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn levy_measure_of_ratio_integrates_to_derivative() {
        let f = BernsteinFunction::ratio(1.0, 2.0).unwrap();
        let t = f.levy_triple().unwrap();
        // f'(0) = b + ∫x dν
        let (m1, _) = t.levy.integrate(|x| x).unwrap();
        assert!((t.b + m1 - f.derivative(0.0)).abs() < 1e-12);
        let _ = measure::moment(&t.levy, 1).unwrap();
    }
}

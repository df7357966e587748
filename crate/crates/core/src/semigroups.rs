//! Closed-form product convolution semigroups: Gamma, Beta and the
//! log-normal family `v_c`, plus the transform `s_n = 1/(a_1 ··· a_n)`.
//!
//! For `c != 1` the Gamma and Beta semigroup members are only available
//! through their Mellin transforms and moments.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hankel::MomentSequence;
use crate::measure::{DensityId, DensityMeasure, QuadHint};
use crate::special::{ln_gamma, ln_gamma_complex, ln_rising};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn density_id(name: &str, params: &[(&str, f64)]) -> DensityId {
    DensityId {
        density: name.into(),
        params: params
            .iter()
            .map(|&(k, v)| (k.to_string(), serde_json::json!(v)))
            .collect::<BTreeMap<_, _>>(),
    }
}

/// γ_{a,c}: the semigroup with Mellin transform (Γ(a+z)/Γ(a))^c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFamily {
    a: f64,
    c: f64,
}

impl GammaFamily {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("c", c)?;
        Ok(GammaFamily { a, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Moment sequence (a)_n^c.
    pub fn moments(&self) -> MomentSequence {
        let (a, c) = (self.a, self.c);
        MomentSequence::from_log_fn(move |n| Ok(c * ln_rising(a, n)), true)
    }
}

/// x^{a-1} e^{-x} / Γ(a) on (0, ∞). Only γ_{a,1} has a density here.
pub fn gamma_density(fam: &GammaFamily) -> Result<DensityMeasure> {
    if fam.c != 1.0 {
        return Err(Error::Unsupported(format!(
            "no closed-form density for the Gamma semigroup at c = {}",
            fam.c
        )));
    }
    let a = fam.a;
    let lg = ln_gamma(a);
    DensityMeasure::new(
        move |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                ((a - 1.0) * x.ln() - x - lg).exp()
            }
        },
        (0.0, f64::INFINITY),
        QuadHint::ExponentialDecay,
        -a,
        density_id("gamma", &[("a", a), ("c", 1.0)]),
    )
}

/// (Γ(a+z)/Γ(a))^c for Re z > -a.
pub fn gamma_mellin(fam: &GammaFamily, z: Complex64) -> Result<Complex64> {
    if !(z.re > -fam.a) {
        return Err(Error::Domain(format!(
            "Gamma Mellin transform needs Re z > -a = {}, got {z}",
            -fam.a
        )));
    }
    let l = ln_gamma_complex(z + fam.a) - ln_gamma(fam.a);
    Ok((l * fam.c).exp())
}

/// β(a,b)_c: the semigroup with Mellin transform
/// ((Γ(a+z)/Γ(a)) / (Γ(b+z)/Γ(b)))^c, 0 < a < b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFamily {
    a: f64,
    b: f64,
    c: f64,
}

impl BetaFamily {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("c", c)?;
        if !(a < b && b.is_finite()) {
            return Err(Error::Domain(format!("Beta family needs 0 < a < b, got a={a}, b={b}")));
        }
        Ok(BetaFamily { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Moment sequence ((a)_n/(b)_n)^c.
    pub fn moments(&self) -> MomentSequence {
        let (a, b, c) = (self.a, self.b, self.c);
        MomentSequence::from_log_fn(move |n| Ok(c * (ln_rising(a, n) - ln_rising(b, n))), true)
    }
}

/// x^{a-1}(1-x)^{b-a-1} / B(a, b-a) on (0, 1).
pub fn beta_density(fam: &BetaFamily) -> Result<DensityMeasure> {
    if fam.c != 1.0 {
        return Err(Error::Unsupported(format!(
            "no closed-form density for the Beta semigroup at c = {}",
            fam.c
        )));
    }
    let (a, b) = (fam.a, fam.b);
    let ln_beta = ln_gamma(a) + ln_gamma(b - a) - ln_gamma(b);
    DensityMeasure::new_two_sided(
        move |x: f64, one_minus_x: f64| {
            if x <= 0.0 || one_minus_x <= 0.0 {
                0.0
            } else {
                ((a - 1.0) * x.ln() + (b - a - 1.0) * one_minus_x.ln() - ln_beta).exp()
            }
        },
        (0.0, 1.0),
        QuadHint::FiniteInterval,
        -a,
        density_id("beta", &[("a", a), ("b", b), ("c", 1.0)]),
    )
}

/// ((Γ(a+z)/Γ(a)) / (Γ(b+z)/Γ(b)))^c for Re z > -a.
pub fn beta_mellin(fam: &BetaFamily, z: Complex64) -> Result<Complex64> {
    if !(z.re > -fam.a) {
        return Err(Error::Domain(format!(
            "Beta Mellin transform needs Re z > -a = {}, got {z}",
            -fam.a
        )));
    }
    let l = ln_gamma_complex(z + fam.a) - ln_gamma(fam.a) - ln_gamma_complex(z + fam.b) + ln_gamma(fam.b);
    Ok((l * fam.c).exp())
}

/// v_c with Mellin transform q^{-cz(z+1)/2}, 0 < q < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalQFamily {
    q: f64,
    c: f64,
}

impl LogNormalQFamily {
    pub fn new(q: f64, c: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("v_c needs 0 < q < 1, got {q}")));
        }
        check_positive("c", c)?;
        Ok(LogNormalQFamily { q, c })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Variance c·ln(1/q) of ln x under v_c.
    pub fn log_variance(&self) -> f64 {
        self.c * (1.0 / self.q).ln()
    }

    /// Moment sequence q^{-c n(n+1)/2}.
    pub fn moments(&self) -> MomentSequence {
        let s2 = self.log_variance();
        MomentSequence::from_log_fn(move |n| Ok(s2 * (n * (n + 1)) as f64 / 2.0), true)
    }
}

/// The density of v_c on (0, ∞), integrated in `ln x`.
pub fn vc_density(fam: &LogNormalQFamily) -> Result<DensityMeasure> {
    let s2 = fam.log_variance();
    let ln_norm = -s2 / 8.0 - 0.5 * (2.0 * std::f64::consts::PI * s2).ln();
    DensityMeasure::new(
        move |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            let y = x.ln();
            (ln_norm - 0.5 * y - y * y / (2.0 * s2)).exp()
        },
        (0.0, f64::INFINITY),
        QuadHint::LogSubstitution {
            mean: s2 / 2.0,
            sd: s2.sqrt(),
        },
        f64::NEG_INFINITY,
        density_id("vclognormal", &[("q", fam.q), ("c", fam.c)]),
    )
}

/// q^{-cz(z+1)/2}; entire in z.
pub fn vc_mellin(fam: &LogNormalQFamily, z: Complex64) -> Complex64 {
    (z * (z + 1.0) * (fam.log_variance() / 2.0)).exp()
}

/// s_0 = 1, s_n = 1/(a_1 ··· a_n).
pub fn t_transform(a: &MomentSequence) -> Result<MomentSequence> {
    let l0 = a.ln_get(0)?;
    if l0.abs() > 1e-12 {
        return Err(Error::Precondition(format!("T-transform needs a_0 = 1, got {}", l0.exp())));
    }
    let a = a.clone();
    Ok(MomentSequence::from_log_fn(
        move |n| {
            let mut acc = 0.0;
            for k in 1..=n {
                let l = a.ln_get(k)?;
                if !l.is_finite() {
                    return Err(Error::Domain(format!("T-transform needs a_{k} > 0")));
                }
                acc -= l;
            }
            Ok(acc)
        },
        true,
    ))
}

/// a_0 = 1, a_n = s_{n-1}/s_n: the left inverse of [`t_transform`].
pub fn t_transform_inverse(s: &MomentSequence) -> Result<MomentSequence> {
    let l0 = s.ln_get(0)?;
    if l0.abs() > 1e-12 {
        return Err(Error::Precondition(format!("inverse T-transform needs s_0 = 1, got {}", l0.exp())));
    }
    let s = s.clone();
    Ok(MomentSequence::from_log_fn(
        move |n| {
            if n == 0 {
                return Ok(0.0);
            }
            let (hi, lo) = (s.ln_get(n)?, s.ln_get(n - 1)?);
            if !(hi.is_finite() && lo.is_finite()) {
                return Err(Error::Domain(format!("inverse T-transform needs s_{n} > 0")));
            }
            Ok(lo - hi)
        },
        true,
    ))
}

//! String ids for catalogued objects, as used on the command line.
//!
//! | id | object |
//! |----|--------|
//! | `affine:a`, `linear`, `ratio:a:b`, `mobius`, `qratio:a:b:q`, `powertower` | Bernstein functions |
//! | `gamma:a:c`, `beta:a:b:c`, `vclognormal:q:c` | closed-form semigroups |
//! | `qbeta:a:b:q:c` | μ_c(a, b; q) |
//! | `nu:a:q` | the Lévy measure ν_a |
//! | `hp:p:q` | coefficients of h_p(z; q) |
//! | `sigmaq:a:b:q` | σ_{a,b,γ} with γ = (b;q)_∞/(a;q)_∞ |

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bernstein::{self, BernsteinFunction};
use crate::error::{Error, Result};
use crate::hankel::MomentSequence;
use crate::measure::{self, AtomicMeasure, DensityId, Measure, MellinValue};
use crate::qseries;
use crate::semigroups::{self, BetaFamily, GammaFamily, LogNormalQFamily};

/// A parsed catalog id.
#[derive(Debug, Clone)]
pub enum CatalogObject {
    Bernstein(BernsteinFunction),
    Gamma(GammaFamily),
    Beta(BetaFamily),
    VcLogNormal(LogNormalQFamily),
    QBeta { a: f64, b: f64, q: f64, c: f64 },
    Nu { a: f64, q: f64 },
    Hp { p: f64, q: f64 },
    SigmaQ { a: f64, b: f64, q: f64 },
}

/// Optional numeric parameters: `alpha`, `beta` for Bernstein moment
/// sequences (default 1, 1), `tol` for truncated atoms.
#[derive(Debug, Clone, Default)]
pub struct Params(pub BTreeMap<String, f64>);

impl Params {
    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    /// Parses `key=value`.
    pub fn insert_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{pair}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("parameter '{k}' is not a number: '{v}'")))?;
        self.0.insert(k.trim().to_string(), v);
        Ok(())
    }
}

fn numbers(id: &str, fields: &[&str], want: usize) -> Result<Vec<f64>> {
    if fields.len() != want {
        return Err(Error::Parse(format!(
            "'{id}' takes {want} parameter(s), got {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{s}' in '{id}' is not a number")))
        })
        .collect()
}

fn check_qparams(a: f64, b: f64, q: f64) -> Result<()> {
    if !(0.0 <= b && b < a && a < 1.0 && q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 <= b < a < 1 and 0 < q < 1, got a={a}, b={b}, q={q}"
        )));
    }
    Ok(())
}

/// Parses a catalog id. Unknown names and malformed numbers give
/// [`Error::Parse`]; out-of-domain parameters give [`Error::Domain`].
pub fn parse_id(id: &str) -> Result<CatalogObject> {
    let mut parts = id.trim().split(':');
    let name = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let obj = match name {
        "affine" => {
            let v = numbers(id, &rest, 1)?;
            CatalogObject::Bernstein(BernsteinFunction::affine(v[0])?)
        }
        "linear" => {
            numbers(id, &rest, 0)?;
            CatalogObject::Bernstein(BernsteinFunction::linear()?)
        }
        "ratio" => {
            let v = numbers(id, &rest, 2)?;
            CatalogObject::Bernstein(BernsteinFunction::ratio(v[0], v[1])?)
        }
        "mobius" => {
            numbers(id, &rest, 0)?;
            CatalogObject::Bernstein(BernsteinFunction::mobius()?)
        }
        "qratio" => {
            let v = numbers(id, &rest, 3)?;
            CatalogObject::Bernstein(BernsteinFunction::qratio(v[0], v[1], v[2])?)
        }
        "powertower" => {
            numbers(id, &rest, 0)?;
            CatalogObject::Bernstein(BernsteinFunction::power_tower()?)
        }
        "gamma" => {
            let v = numbers(id, &rest, 2)?;
            CatalogObject::Gamma(GammaFamily::new(v[0], v[1])?)
        }
        "beta" => {
            let v = numbers(id, &rest, 3)?;
            CatalogObject::Beta(BetaFamily::new(v[0], v[1], v[2])?)
        }
        "vclognormal" => {
            let v = numbers(id, &rest, 2)?;
            CatalogObject::VcLogNormal(LogNormalQFamily::new(v[0], v[1])?)
        }
        "qbeta" => {
            let v = numbers(id, &rest, 4)?;
            check_qparams(v[0], v[1], v[2])?;
            if !(v[3] > 0.0 && v[3].is_finite()) {
                return Err(Error::Domain(format!("c must be positive, got {}", v[3])));
            }
            CatalogObject::QBeta { a: v[0], b: v[1], q: v[2], c: v[3] }
        }
        "nu" => {
            let v = numbers(id, &rest, 2)?;
            if !(v[0] >= 0.0 && v[0] < 1.0 && v[1] > 0.0 && v[1] < 1.0) {
                return Err(Error::Domain(format!("nu needs 0 <= a < 1, 0 < q < 1 in '{id}'")));
            }
            CatalogObject::Nu { a: v[0], q: v[1] }
        }
        "hp" => {
            let v = numbers(id, &rest, 2)?;
            if !(v[0] >= 0.0 && v[0] < 1.0 && v[1] > 0.0 && v[1] < 1.0) {
                return Err(Error::Domain(format!("hp needs 0 <= p < 1, 0 < q < 1 in '{id}'")));
            }
            CatalogObject::Hp { p: v[0], q: v[1] }
        }
        "sigmaq" => {
            let v = numbers(id, &rest, 3)?;
            check_qparams(v[0], v[1], v[2])?;
            CatalogObject::SigmaQ { a: v[0], b: v[1], q: v[2] }
        }
        other => return Err(Error::Parse(format!("unknown catalog id '{other}'"))),
    };
    Ok(obj)
}

impl CatalogObject {
    /// The moment sequence of the object. Bernstein functions use
    /// `s_n = f(α)f(α+β)···f(α+(n-1)β)` with α, β from `params`; `hp` returns the
    /// power-series coefficients c_0, c_1, ... instead.
    pub fn moments(&self, params: &Params, n_max: usize) -> Result<MomentSequence> {
        match self {
            CatalogObject::Bernstein(f) => {
                bernstein::power_moments(f, params.get_or("alpha", 1.0), params.get_or("beta", 1.0))
            }
            CatalogObject::Gamma(g) => Ok(g.moments()),
            CatalogObject::Beta(b) => Ok(b.moments()),
            CatalogObject::VcLogNormal(v) => Ok(v.moments()),
            &CatalogObject::QBeta { a, b, q, c } => Ok(MomentSequence::from_log_fn(
                move |n| Ok(c * qseries::ln_qratio_moment(a, b, q, n)),
                true,
            )),
            &CatalogObject::SigmaQ { a, b, q } => Ok(MomentSequence::from_log_fn(
                move |n| Ok(qseries::ln_qbinom_product(a, b, q, n)),
                true,
            )),
            CatalogObject::Nu { .. } => {
                let m = Measure::from(self.atoms(params)?);
                MomentSequence::from_table(
                    (0..=n_max)
                        .map(|n| Ok(measure::moment(&m, n as u32)?.re()))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            &CatalogObject::Hp { p, q } => {
                MomentSequence::from_table(qseries::hp_coefficients(p, q, n_max)?.coefficients)
            }
        }
    }

    /// Mellin transform ∫x^z dμ.
    pub fn mellin(&self, params: &Params, z: Complex64) -> Result<MellinValue> {
        match self {
            CatalogObject::Gamma(g) => Ok(MellinValue {
                value: semigroups::gamma_mellin(g, z)?,
                abs_error: 0.0,
            }),
            CatalogObject::Beta(b) => Ok(MellinValue {
                value: semigroups::beta_mellin(b, z)?,
                abs_error: 0.0,
            }),
            CatalogObject::VcLogNormal(v) => Ok(MellinValue {
                value: semigroups::vc_mellin(v, z),
                abs_error: 0.0,
            }),
            &CatalogObject::QBeta { a, b, q, c } => qseries::mellin_qbeta(a, b, q, c, z),
            CatalogObject::Nu { .. } | CatalogObject::SigmaQ { .. } => {
                measure::mellin(&Measure::from(self.atoms(params)?), z)
            }
            CatalogObject::Bernstein(f) => Err(Error::Unsupported(format!(
                "no Mellin transform for Bernstein function '{}'; use moments",
                f.id()
            ))),
            CatalogObject::Hp { .. } => {
                Err(Error::Unsupported("hp is a power series, not a measure".into()))
            }
        }
    }

    /// Atomic representation where one exists: κ for Bernstein functions
    /// with a lattice κ, otherwise the measure itself.
    pub fn atoms(&self, params: &Params) -> Result<AtomicMeasure> {
        let tol = params.get_or("tol", qseries::DEFAULT_TOL);
        match self {
            &CatalogObject::QBeta { a, b, q, c } => qseries::mu_c(a, b, q, c, tol),
            &CatalogObject::Nu { a, q } => qseries::nu_a(a, q, tol),
            &CatalogObject::SigmaQ { a, b, q } => {
                qseries::sigma_abgamma_auto(a, b, q, qseries::sigma_gamma(a, b, q), tol)
            }
            CatalogObject::Bernstein(f) => match bernstein::kappa_of(f)? {
                Measure::Atomic(m) => Ok(m),
                Measure::Density(_) => Err(Error::Unsupported(format!(
                    "κ of '{}' is a density, not atomic",
                    f.id()
                ))),
            },
            _ => Err(Error::Unsupported("object has no atomic representation".into())),
        }
    }
}

fn param(id: &DensityId, key: &str) -> Result<f64> {
    id.params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Parse(format!("density '{}' lacks numeric '{key}'", id.density)))
}

/// Rebuilds a density measure from its serialized identity.
pub fn density_from_id(id: &DensityId) -> Result<Measure> {
    let d = match id.density.as_str() {
        "gamma" => semigroups::gamma_density(&GammaFamily::new(param(id, "a")?, param(id, "c")?)?)?,
        "beta" => semigroups::beta_density(&BetaFamily::new(
            param(id, "a")?,
            param(id, "b")?,
            param(id, "c")?,
        )?)?,
        "vclognormal" => {
            semigroups::vc_density(&LogNormalQFamily::new(param(id, "q")?, param(id, "c")?)?)?
        }
        "sigma" => {
            let name = id
                .params
                .get("bernstein")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse("sigma density lacks 'bernstein'".into()))?;
            let CatalogObject::Bernstein(f) = parse_id(name)? else {
                return Err(Error::Parse(format!("'{name}' is not a Bernstein function")));
            };
            return bernstein::sigma_of(&f, param(id, "alpha")?, param(id, "beta")?);
        }
        other => return Err(Error::Parse(format!("unknown density '{other}'"))),
    };
    Ok(d.into())
}

//! Invariant suites behind `momentforge verify`.
//!
//! Each suite is a fixed list of named checks. A check yields the largest
//! residual it saw and a pass flag; checks run in parallel but the report
//! keeps their declaration order, so identical runs produce identical JSON.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::{self, BernsteinFunction};
use crate::error::{Error, Result};
use crate::hankel::{self, CarlemanVerdict, HankelStatus, MomentSequence};
use crate::hermite;
use crate::measure::{self, Measure};
use crate::qseries;
use crate::semigroups::{self, BetaFamily, GammaFamily, LogNormalQFamily};
use crate::special::ln_gamma;

/// Default relative tolerance of the Hankel positivity checks.
pub const DEFAULT_HANKEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Hankel,
    BernsteinRep,
    Qseries,
    Semigroup,
    Hermite,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Hankel,
        Suite::BernsteinRep,
        Suite::Qseries,
        Suite::Semigroup,
        Suite::Hermite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hankel => "hankel",
            Suite::BernsteinRep => "bernstein-rep",
            Suite::Qseries => "qseries",
            Suite::Semigroup => "semigroup",
            Suite::Hermite => "hermite",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown suite '{s}' (expected hankel, bernstein-rep, qseries, semigroup, hermite or all)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Relative tolerance passed to the Hankel positivity test.
    pub hankel_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            hankel_tol: DEFAULT_HANKEL_TOL,
        }
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: &'static str,
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub hankel_tol: f64,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Outcome {
    residual: f64,
    pass: bool,
}

impl Outcome {
    fn within(residual: f64, threshold: f64) -> Self {
        Outcome {
            residual,
            pass: residual <= threshold,
        }
    }
}

type Run = Box<dyn Fn() -> Result<Outcome> + Send + Sync>;

struct Check {
    suite: &'static str,
    name: String,
    threshold: f64,
    run: Run,
}

fn check(
    suite: Suite,
    name: impl Into<String>,
    threshold: f64,
    run: impl Fn() -> Result<Outcome> + Send + Sync + 'static,
) -> Check {
    Check {
        suite: suite.name(),
        name: name.into(),
        threshold,
        run: Box::new(run),
    }
}

/// Builds and runs the checks of `suite`.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    if !(cfg.hankel_tol > 0.0 && cfg.hankel_tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", cfg.hankel_tol)));
    }
    let checks: Vec<Check> = match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| checks_for(s, cfg)).collect(),
        s => checks_for(s, cfg),
    };
    let results: Vec<CheckReport> = checks
        .par_iter()
        .map(|c| match (c.run)() {
            Ok(o) => CheckReport {
                suite: c.suite,
                name: c.name.clone(),
                max_residual: o.residual,
                threshold: c.threshold,
                pass: o.pass && o.residual.is_finite(),
                error: None,
            },
            Err(e) => CheckReport {
                suite: c.suite,
                name: c.name.clone(),
                max_residual: f64::INFINITY,
                threshold: c.threshold,
                pass: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(Report {
        suite,
        hankel_tol: cfg.hankel_tol,
        pass: results.iter().all(|c| c.pass),
        checks: results,
    })
}

fn checks_for(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    match suite {
        Suite::Hankel => hankel_checks(cfg.hankel_tol),
        Suite::BernsteinRep => bernstein_checks(),
        Suite::Qseries => qseries_checks(),
        Suite::Semigroup => semigroup_checks(cfg.hankel_tol),
        Suite::Hermite => hermite_checks(),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

/// |x - y| / max(1, |y|)
fn mixed_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// hankel

fn psd_outcome(seqs: &[(MomentSequence, usize)], powers: &[f64], tol: f64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (s, order) in seqs {
        for &c in powers {
            let v = hankel::stieltjes_check(&hankel::power_sequence(s, c)?, *order, tol)?;
            if let HankelStatus::FailedAt {
                min_eigenvalue_estimate,
                ..
            } = v.status
            {
                pass = false;
                worst = worst.max(-min_eigenvalue_estimate);
            }
        }
    }
    Ok(Outcome { residual: worst, pass })
}

/// The generated sequences of the Hankel suite, with their test order.
pub fn hankel_sequences() -> Vec<(String, MomentSequence, usize)> {
    let lr = crate::special::ln_rising;
    vec![
        ("n!".into(), MomentSequence::from_log_fn(|n| Ok(ln_gamma(n as f64 + 1.0)), true), 6),
        ("(0.5)_n".into(), MomentSequence::from_log_fn(move |n| Ok(lr(0.5, n)), true), 6),
        ("(1)_n/(2)_n".into(), MomentSequence::from_log_fn(move |n| Ok(lr(1.0, n) - lr(2.0, n)), true), 8),
        (
            "(0.5)_n/(3)_n".into(),
            MomentSequence::from_log_fn(move |n| Ok(lr(0.5, n) - lr(3.0, n)), true),
            8,
        ),
        (
            "(0.5;0.5)_n/(0.25;0.5)_n".into(),
            MomentSequence::from_log_fn(|n| Ok(qseries::ln_qratio_moment(0.5, 0.25, 0.5, n)), true),
            8,
        ),
        (
            "0.5^(-n(n+1)/2)".into(),
            MomentSequence::from_log_fn(|n| Ok((n * (n + 1)) as f64 / 2.0 * 2f64.ln()), true),
            8,
        ),
        (
            "prod (2)_k/(1)_k".into(),
            MomentSequence::from_log_fn(
                move |n| Ok((1..=n).map(|k| lr(2.0, k) - lr(1.0, k)).sum()),
                true,
            ),
            6,
        ),
        (
            "prod (0.25;0.5)_k/(0.5;0.5)_k".into(),
            MomentSequence::from_log_fn(|n| Ok(qseries::ln_qbinom_product(0.5, 0.25, 0.5, n)), true),
            8,
        ),
    ]
}

fn hankel_checks(tol: f64) -> Vec<Check> {
    let s = Suite::Hankel;
    let mut out = Vec::new();
    for (name, seq, order) in hankel_sequences() {
        out.push(check(s, format!("stieltjes {name} N={order} c=0.5,1,2"), tol, move || {
            psd_outcome(&[(seq.clone(), order)], &[0.5, 1.0, 2.0], tol)
        }));
    }
    out.push(check(s, "stieltjes (1,2,3,4) N=1 detects failure", 0.0, move || {
        let v = hankel::stieltjes_check(&MomentSequence::from_table(vec![1.0, 2.0, 3.0, 4.0])?, 1, tol)?;
        Ok(Outcome {
            residual: if v.is_psd() { 1.0 } else { 0.0 },
            pass: !v.is_psd(),
        })
    }));
    let carleman: [(&str, f64, CarlemanVerdict); 3] = [
        ("n!", 1.0, CarlemanVerdict::DivergentPattern),
        ("(n!)^3", 3.0, CarlemanVerdict::ConvergentPattern),
        ("1", 0.0, CarlemanVerdict::DivergentPattern),
    ];
    for (name, power, want) in carleman {
        out.push(check(s, format!("carleman {name} N=200 -> {want:?}"), 0.0, move || {
            let seq = MomentSequence::from_log_fn(move |n| Ok(power * ln_gamma(n as f64 + 1.0)), true);
            let d = hankel::carleman_diagnostic(&seq, 200)?;
            let ok = d.verdict == want;
            Ok(Outcome {
                residual: if ok { 0.0 } else { 1.0 },
                pass: ok,
            })
        }));
    }
    out.push(check(s, "power_sequence composition n<=20", 1e-13, || {
        let base = MomentSequence::from_log_fn(|n| Ok(ln_gamma(n as f64 + 1.0)), true);
        let mut worst: f64 = 0.0;
        for &(c, d) in &[(0.5, 2.0), (1.5, 0.7), (3.0, 1.0 / 3.0)] {
            let lhs = hankel::power_sequence(&hankel::power_sequence(&base, c)?, d)?;
            let rhs = hankel::power_sequence(&base, c * d)?;
            for n in 0..=20 {
                let (x, y) = (lhs.get(n)?, rhs.get(n)?);
                worst = worst.max((x - y).abs() / y.abs());
            }
        }
        Ok(Outcome::within(worst, 1e-13))
    }));
    out
}

// ---------------------------------------------------------------------------
// bernstein-rep

/// The catalog functions and (α, β) pairs of the representation sweep.
pub fn representation_cases() -> Vec<(BernsteinFunction, f64, f64)> {
    let fs = [
        BernsteinFunction::affine(1.0),
        BernsteinFunction::affine(2.0),
        BernsteinFunction::ratio(1.0, 2.0),
        BernsteinFunction::ratio(0.5, 3.0),
        BernsteinFunction::qratio(0.5, 0.25, 0.5),
    ];
    let mut out = Vec::new();
    for f in fs.into_iter().map(|f| f.expect("catalog parameters are valid")) {
        for &(alpha, beta) in &[(0.0, 1.0), (1.0, 1.0), (0.5, 2.0)] {
            if f.eval(alpha) > 0.0 {
                out.push((f.clone(), alpha, beta));
            }
        }
    }
    out.push((BernsteinFunction::linear().expect("linear"), 1.0, 1.0));
    out
}

fn ln_product(f: &BernsteinFunction, alpha: f64, beta: f64, n: usize) -> f64 {
    (0..n).map(|k| f.ln_eval(alpha + k as f64 * beta)).sum()
}

fn bernstein_checks() -> Vec<Check> {
    let s = Suite::BernsteinRep;
    let mut out = Vec::new();
    for (f, alpha, beta) in representation_cases() {
        let tag = format!("{} alpha={alpha} beta={beta}", f.id());
        let g = f.clone();
        out.push(check(s, format!("log-moment {tag} n<=15"), 1e-7, move || {
            let mut worst: f64 = 0.0;
            for n in 0..=15 {
                let rep = bernstein::log_moment_via_rep(&g, alpha, beta, n)?;
                worst = worst.max((rep - ln_product(&g, alpha, beta, n)).abs());
            }
            Ok(Outcome::within(worst, 1e-7))
        }));
        let g = f.clone();
        out.push(check(s, format!("psi(n) + log s_n {tag} n<=15"), 1e-7, move || {
            let mut worst: f64 = 0.0;
            for n in 0..=15 {
                let p = bernstein::psi(&g, alpha, beta, Complex64::new(n as f64, 0.0))?;
                worst = worst.max((p.re + ln_product(&g, alpha, beta, n)).abs()).max(p.im.abs());
            }
            Ok(Outcome::within(worst, 1e-7))
        }));
        let g = f.clone();
        out.push(check(s, format!("psi(0), psi(1) {tag}"), 1e-12, move || {
            let p0 = bernstein::psi(&g, alpha, beta, Complex64::new(0.0, 0.0))?;
            let p1 = bernstein::psi(&g, alpha, beta, Complex64::new(1.0, 0.0))?;
            let r = p0.norm().max((p1 - Complex64::new(-g.ln_eval(alpha), 0.0)).norm());
            Ok(Outcome::within(r, 1e-12))
        }));
        let g = f;
        out.push(check(s, format!("levy-khinchin {tag} n<=15"), 1e-7, move || {
            let rep = bernstein::levy_khinchin_rep(&g, alpha, beta)?;
            let mut worst: f64 = 0.0;
            for n in 0..=15 {
                worst = worst.max((bernstein::lk_log_moment(&rep, n)? - ln_product(&g, alpha, beta, n)).abs());
            }
            Ok(Outcome::within(worst, 1e-7))
        }));
    }
    for id in ["affine:1", "ratio:1:2", "ratio:0.5:3", "qratio:0.5:0.25:0.5", "linear", "mobius"] {
        out.push(check(s, format!("f'/f = laplace(kappa) {id} s=0.5,1,2"), 1e-10, move || {
            let crate::catalog::CatalogObject::Bernstein(f) = crate::catalog::parse_id(id)? else {
                unreachable!()
            };
            let kappa = bernstein::kappa_of(&f)?;
            let mut worst: f64 = 0.0;
            for sv in [0.5, 1.0, 2.0] {
                let (l, _) = kappa.laplace(sv)?;
                worst = worst.max(mixed_err(l, f.derivative(sv) / f.eval(sv)));
            }
            Ok(Outcome::within(worst, 1e-10))
        }));
    }
    out
}

// ---------------------------------------------------------------------------
// qseries

/// (a, b, q) grid of the q-Beta checks; every point has b < a.
pub fn qbeta_grid() -> Vec<(f64, f64, f64)> {
    let mut g = Vec::new();
    for &a in &[0.3, 0.5, 0.7] {
        for &b in &[0.0, 0.1, 0.25] {
            for &q in &[0.3, 0.5, 0.8] {
                g.push((a, b, q));
            }
        }
    }
    g
}

fn atomic_moment(m: &crate::AtomicMeasure, n: u32) -> Result<f64> {
    Ok(measure::moment(&Measure::Atomic(m.clone()), n)?.re())
}

fn qseries_checks() -> Vec<Check> {
    let s = Suite::Qseries;
    let tol = 1e-15;
    let mut out = Vec::new();
    out.push(check(s, "mu_c moments vs ((a;q)_n/(b;q)_n)^c, 3x3x3 grid, c=0.5,1,2,3, n<=10", 1e-10, move || {
        let worst = qbeta_grid()
            .par_iter()
            .map(|&(a, b, q)| -> Result<f64> {
                let mut w: f64 = 0.0;
                for c in [0.5, 1.0, 2.0, 3.0] {
                    let mu = qseries::mu_c(a, b, q, c, tol)?;
                    for n in 0..=10u32 {
                        let want = (c * qseries::ln_qratio_moment(a, b, q, n as usize)).exp();
                        w = w.max((atomic_moment(&mu, n)? - want).abs());
                    }
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Outcome::within(worst, 1e-10))
    }));
    out.push(check(s, "mellin_qbeta(z=n) vs atomic moments, grid, c=0.5,1,2,3, n<=10", 1e-10, move || {
        let mut worst: f64 = 0.0;
        for (a, b, q) in qbeta_grid() {
            for c in [0.5, 1.0, 2.0, 3.0] {
                let mu = qseries::mu_c(a, b, q, c, tol)?;
                for n in 0..=10u32 {
                    let m = qseries::mellin_qbeta(a, b, q, c, Complex64::new(n as f64, 0.0))?;
                    worst = worst.max((m.value - atomic_moment(&mu, n)?).norm());
                }
            }
        }
        Ok(Outcome::within(worst, 1e-10))
    }));
    out.push(check(s, "laplace of tau_1 vs product form, s=0.5,1,2", 1e-10, move || {
        let mut worst: f64 = 0.0;
        for (a, b, q) in qbeta_grid() {
            let tau = Measure::Atomic(qseries::tau_c(a, b, q, 1.0, tol, None)?);
            for sv in [0.5, 1.0, 2.0] {
                let qs = q.powf(sv);
                let want = (qseries::ln_qpoch_inf(b * qs, q) - qseries::ln_qpoch_inf(b, q)
                    - qseries::ln_qpoch_inf(a * qs, q)
                    + qseries::ln_qpoch_inf(a, q))
                .exp();
                worst = worst.max((tau.laplace(sv)?.0 - want).abs());
            }
        }
        Ok(Outcome::within(worst, 1e-10))
    }));
    out.push(check(s, "nu_a mass vs -log(a;q)_inf", 1e-11, || {
        let mut worst: f64 = 0.0;
        for &a in &[0.3, 0.5, 0.7] {
            for &q in &[0.3, 0.5, 0.8] {
                let nu = qseries::nu_a(a, q, 1e-16)?;
                worst = worst.max((nu.total_mass() + qseries::ln_qpoch_inf(a, q)).abs());
            }
        }
        Ok(Outcome::within(worst, 1e-11))
    }));
    out.push(check(s, "q-binomial atoms vs truncated product, N=6", 1e-12, || {
        let mut worst: f64 = 0.0;
        for (a, b, q) in qbeta_grid() {
            worst = worst.max(qseries::qbinomial_check(a, b, q, 6, 200)?);
        }
        Ok(Outcome::within(worst, 1e-12))
    }));
    for (c, d) in [(0.5, 0.5), (1.0, 1.0), (0.3, 1.7)] {
        out.push(check(s, format!("tau_{c} + tau_{d} vs tau_{} laplace n<=6", c + d), 1e-9, move || {
            let mut worst: f64 = 0.0;
            for &(a, b, q) in &[(0.5, 0.25, 0.5), (0.7, 0.1, 0.8), (0.3, 0.0, 0.3)] {
                let lhs = qseries::tau_c(a, b, q, c, tol, None)?
                    .additive_convolve(&qseries::tau_c(a, b, q, d, tol, None)?);
                let rhs = qseries::tau_c(a, b, q, c + d, tol, None)?;
                let (lm, rm) = (Measure::Atomic(lhs), Measure::Atomic(rhs));
                for n in 0..=6 {
                    worst = worst.max((lm.laplace(n as f64)?.0 - rm.laplace(n as f64)?.0).abs());
                }
            }
            Ok(Outcome::within(worst, 1e-9))
        }));
        out.push(check(s, format!("mu_{c} * mu_{d} vs mu_{} moments n<=6", c + d), 1e-9, move || {
            let mut worst: f64 = 0.0;
            for &(a, b, q) in &[(0.5, 0.25, 0.5), (0.7, 0.1, 0.8), (0.3, 0.0, 0.3)] {
                let lhs = measure::product_convolve(&qseries::mu_c(a, b, q, c, tol)?, &qseries::mu_c(a, b, q, d, tol)?);
                let rhs = qseries::mu_c(a, b, q, c + d, tol)?;
                for n in 0..=6 {
                    worst = worst.max((atomic_moment(&lhs, n)? - atomic_moment(&rhs, n)?).abs());
                }
            }
            Ok(Outcome::within(worst, 1e-9))
        }));
    }
    out.push(check(s, "hp coefficients c_k >= -1e-14, k<=50", 1e-14, || {
        let mut worst = f64::NEG_INFINITY;
        for &p in &[0.1, 0.3, 0.7] {
            for &q in &[0.3, 0.5, 0.8] {
                let h = qseries::hp_coefficients(p, q, 50)?;
                for &ck in &h.coefficients {
                    worst = worst.max(-ck);
                }
            }
        }
        Ok(Outcome::within(worst.max(0.0), 1e-14))
    }));
    for (a, b, q) in [(0.5, 0.25, 0.5), (0.7, 0.1, 0.3), (0.3, 0.0, 0.8)] {
        out.push(check(s, format!("sigma_abgamma({a},{b};{q}) moments vs q-binomial products n<=6"), 1e-9, move || {
            let sigma = qseries::sigma_abgamma_auto(a, b, q, qseries::sigma_gamma(a, b, q), 1e-16)?;
            let mut worst: f64 = 0.0;
            for n in 0..=6u32 {
                let want = qseries::ln_qbinom_product(a, b, q, n as usize).exp();
                worst = worst.max(mixed_err(atomic_moment(&sigma, n)?, want));
            }
            Ok(Outcome::within(worst, 1e-9))
        }));
        out.push(check(s, format!("sigma_abgamma({a},{b};{q}) moments vs t_transform n<=6"), 1e-9, move || {
            let sigma = qseries::sigma_abgamma_auto(a, b, q, qseries::sigma_gamma(a, b, q), 1e-16)?;
            let base = MomentSequence::from_log_fn(move |n| Ok(qseries::ln_qratio_moment(a, b, q, n)), true);
            let t = semigroups::t_transform(&base)?;
            let mut worst: f64 = 0.0;
            for n in 0..=6u32 {
                worst = worst.max(mixed_err(atomic_moment(&sigma, n)?, t.get(n as usize)?));
            }
            Ok(Outcome::within(worst, 1e-9))
        }));
    }
    out
}

// ---------------------------------------------------------------------------
// semigroup

fn semigroup_checks(hankel_tol: f64) -> Vec<Check> {
    let s = Suite::Semigroup;
    let mut out = Vec::new();
    out.push(check(s, "gamma_b * beta(a,b) = gamma_a, z=0.5,1,2+i", 1e-12, || {
        let mut worst: f64 = 0.0;
        for &(a, b) in &[(1.0, 2.0), (0.5, 3.0), (2.5, 4.0)] {
            for &c in &[0.5, 1.0, 2.0] {
                for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)] {
                    let gb = semigroups::gamma_mellin(&GammaFamily::new(b, c)?, z)?;
                    let be = semigroups::beta_mellin(&BetaFamily::new(a, b, c)?, z)?;
                    let ga = semigroups::gamma_mellin(&GammaFamily::new(a, c)?, z)?;
                    worst = worst.max((gb * be - ga).norm());
                }
            }
        }
        Ok(Outcome::within(worst, 1e-12))
    }));
    out.push(check(s, "v_c quadrature moments vs q^(-cn(n+1)/2), n<=6, relative", 1e-8, || {
        let cases: Vec<(f64, f64)> = [0.3, 0.5, 0.8]
            .iter()
            .flat_map(|&q| [0.5, 1.0, 2.0].into_iter().map(move |c| (q, c)))
            .collect();
        let worst = cases
            .par_iter()
            .map(|&(q, c)| -> Result<f64> {
                let m = Measure::Density(semigroups::vc_density(&LogNormalQFamily::new(q, c)?)?);
                let mut w: f64 = 0.0;
                for n in 0..=6u32 {
                    let want = q.powf(-c * (n * (n + 1)) as f64 / 2.0);
                    w = w.max((measure::moment(&m, n)?.re() - want).abs() / want);
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Outcome::within(worst, 1e-8))
    }));
    out.push(check(s, "gamma and beta densities vs Mellin at z=n<=10, relative", 1e-8, || {
        let mut worst: f64 = 0.0;
        for &a in &[0.5, 1.0, 2.5] {
            let fam = GammaFamily::new(a, 1.0)?;
            let m = Measure::Density(semigroups::gamma_density(&fam)?);
            for n in 0..=10u32 {
                let want = semigroups::gamma_mellin(&fam, Complex64::new(n as f64, 0.0))?.re;
                worst = worst.max((measure::moment(&m, n)?.re() - want).abs() / want);
            }
        }
        for &(a, b) in &[(1.0, 2.0), (0.5, 3.0), (2.0, 2.5)] {
            let fam = BetaFamily::new(a, b, 1.0)?;
            let m = Measure::Density(semigroups::beta_density(&fam)?);
            for n in 0..=10u32 {
                let want = semigroups::beta_mellin(&fam, Complex64::new(n as f64, 0.0))?.re;
                worst = worst.max((measure::moment(&m, n)?.re() - want).abs() / want);
            }
        }
        Ok(Outcome::within(worst, 1e-8))
    }));
    out.push(check(s, "Mellin semigroup law M_c M_d = M_(c+d)", 1e-12, || {
        let mut worst: f64 = 0.0;
        let zs = [Complex64::new(0.5, 0.0), Complex64::new(2.0, 1.0), Complex64::new(3.0, -0.5)];
        for &(c, d) in &[(0.5, 0.5), (1.0, 1.0), (0.3, 1.7)] {
            for z in zs {
                let g = |c| semigroups::gamma_mellin(&GammaFamily::new(1.5, c)?, z);
                let be = |c| semigroups::beta_mellin(&BetaFamily::new(1.0, 2.5, c)?, z);
                let vv = |c| -> Result<Complex64> { Ok(semigroups::vc_mellin(&LogNormalQFamily::new(0.5, c)?, z)) };
                for (x, y) in [
                    (g(c)? * g(d)?, g(c + d)?),
                    (be(c)? * be(d)?, be(c + d)?),
                    (vv(c)? * vv(d)?, vv(c + d)?),
                ] {
                    worst = worst.max((x - y).norm() / y.norm().max(1.0));
                }
            }
        }
        Ok(Outcome::within(worst, 1e-12))
    }));
    out.push(check(s, "t_transform of q^n is q^(-n(n+1)/2), inverse round trip", 1e-12, || {
        let q: f64 = 0.5;
        let a = MomentSequence::from_log_fn(move |n| Ok(n as f64 * q.ln()), true);
        let t = semigroups::t_transform(&a)?;
        let back = semigroups::t_transform_inverse(&t)?;
        let mut worst: f64 = 0.0;
        for n in 0..=12 {
            let want = q.powf(-((n * (n + 1)) as f64) / 2.0);
            worst = worst.max((t.get(n)? - want).abs() / want);
            worst = worst.max((back.get(n)? - a.get(n)?).abs());
        }
        Ok(Outcome::within(worst, 1e-12))
    }));
    out.push(check(s, "family moment sequences pass stieltjes_check N=6", hankel_tol, move || {
        let seqs = vec![
            (GammaFamily::new(1.5, 1.0)?.moments(), 6),
            (BetaFamily::new(1.0, 2.5, 1.0)?.moments(), 6),
            (LogNormalQFamily::new(0.5, 1.0)?.moments(), 6),
        ];
        psd_outcome(&seqs, &[0.5, 1.0, 2.0], hankel_tol)
    }));
    out.push(check(s, "(b)_n^c ((a)_n/(b)_n)^c = (a)_n^c, n<=10", 1e-12, || {
        // moments multiply under product convolution: (b)_n^c ((a)_n/(b)_n)^c = (a)_n^c
        let mut worst: f64 = 0.0;
        for &(a, b, c) in &[(1.0, 2.0, 0.5), (0.5, 3.0, 2.0)] {
            let (g_b, be, g_a) = (
                GammaFamily::new(b, c)?.moments(),
                BetaFamily::new(a, b, c)?.moments(),
                GammaFamily::new(a, c)?.moments(),
            );
            for n in 0..=10 {
                let r = (g_b.ln_get(n)? + be.ln_get(n)? - g_a.ln_get(n)?).abs();
                worst = worst.max(r);
            }
        }
        Ok(Outcome::within(worst, 1e-12))
    }));
    out
}

// ---------------------------------------------------------------------------
// hermite

fn hermite_checks() -> Vec<Check> {
    let s = Suite::Hermite;
    let mut out = Vec::new();
    out.push(check(s, "G(t,x) certified positive, t in [-0.95,0.95]/0.05, x in [-10,10]/0.25", 0.0, || {
        let r = hermite::positivity_scan(
            &hermite::grid(-0.95, 0.95, 0.05)?,
            &hermite::grid(-10.0, 10.0, 0.25)?,
            1e-10,
        )?;
        Ok(Outcome {
            residual: -r.min_lower_bound,
            pass: r.all_positive,
        })
    }));
    out.push(check(s, "Szasz bound |h_n(x)| <= e^(x^2/2), n<=200, x in [-6,6]/0.1", 0.0, || {
        let mut worst = f64::NEG_INFINITY;
        for x in hermite::grid(-6.0, 6.0, 0.1)? {
            let bound = hermite::szasz_bound(x);
            let s2x = std::f64::consts::SQRT_2 * x;
            let (mut prev, mut cur) = (0.0f64, 1.0f64);
            for n in 0..=200usize {
                worst = worst.max(cur.abs() / bound - 1.0);
                let next = (s2x * cur - (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
                prev = cur;
                cur = next;
            }
        }
        Ok(Outcome {
            residual: worst,
            pass: worst <= 0.0,
        })
    }));
    out.push(check(s, "sum H_k(x) z^k/k! vs exp(2xz - z^2), N=60, [-3,3]x[-0.8,0.8]", 1e-9, || {
        let mut worst: f64 = 0.0;
        for x in hermite::grid(-3.0, 3.0, 0.25)? {
            for z in hermite::grid(-0.8, 0.8, 0.1)? {
                let (mut prev, mut cur) = (0.0f64, 1.0f64);
                let mut term_scale = 1.0;
                let mut acc = 0.0;
                for k in 0..=60usize {
                    acc += cur * term_scale;
                    // H_{k+1} = 2x H_k - 2k H_{k-1}; term_scale = z^k/k!
                    let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
                    prev = cur;
                    cur = next;
                    term_scale *= z / (k + 1) as f64;
                }
                worst = worst.max((acc - (2.0 * x * z - z * z).exp()).abs());
            }
        }
        Ok(Outcome::within(worst, 1e-9))
    }));
    out.push(check(s, "orthonormality of h_n, n,m<=8", 1e-8, || {
        // trapezoid on [-12, 12]; spectrally accurate for these integrands
        let step = 0.01;
        let xs = hermite::grid(-12.0, 12.0, step)?;
        let mut gram = [[0.0f64; 9]; 9];
        for &x in &xs {
            let w = (-x * x).exp() / std::f64::consts::PI.sqrt() * step;
            let h: Vec<f64> = (0..=8).map(|n| hermite::hermite_h(n, x)).collect();
            for i in 0..=8 {
                for j in 0..=8 {
                    gram[i][j] += h[i] * h[j] * w;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for (i, row) in gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        Ok(Outcome::within(worst, 1e-8))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn representation_sweep_skips_inadmissible() {
        let cases = representation_cases();
        assert!(cases.iter().all(|(f, a, _)| f.eval(*a) > 0.0));
        assert_eq!(cases.iter().filter(|(f, _, _)| f.id() == "linear").count(), 1);
    }
}

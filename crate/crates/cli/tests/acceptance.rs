//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::Command;
use std::time::Instant;

use momentforge::bernstein::{self, BernsteinFunction};
use momentforge::hankel::{self, CarlemanVerdict, MomentSequence};
use momentforge::hermite;
use momentforge::measure::{self, product_convolve, Measure};
use momentforge::qseries;
use momentforge::semigroups::{self, BetaFamily, GammaFamily, LogNormalQFamily};
use momentforge::special::{ln_gamma, ln_rising};
use momentforge::{AtomicMeasure, Result};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn sweep() -> Vec<(BernsteinFunction, f64, f64)> {
    let mut v = Vec::new();
    let fs = [
        BernsteinFunction::affine(1.0),
        BernsteinFunction::affine(2.0),
        BernsteinFunction::ratio(1.0, 2.0),
        BernsteinFunction::ratio(0.5, 3.0),
        BernsteinFunction::qratio(0.5, 0.25, 0.5),
    ];
    for f in fs {
        let f = f.unwrap();
        for (a, b) in [(0.0, 1.0), (1.0, 1.0), (0.5, 2.0)] {
            if f.eval(a) > 0.0 {
                v.push((f.clone(), a, b));
            }
        }
    }
    v.push((BernsteinFunction::linear().unwrap(), 1.0, 1.0));
    v
}

fn ln_s(f: &BernsteinFunction, alpha: f64, beta: f64, n: usize) -> f64 {
    (0..n).map(|k| f.ln_eval(alpha + k as f64 * beta)).sum()
}

fn representation() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (f, a, b) in sweep() {
        for n in 0..=15 {
            worst = worst.max((bernstein::log_moment_via_rep(&f, a, b, n)? - ln_s(&f, a, b, n)).abs());
        }
    }
    outcome(worst <= 1e-7, format!("max |log_moment_via_rep - sum log f| = {worst:.3e} (<= 1e-7)"))
}

fn psi_consistency() -> Result<Outcome> {
    let (mut worst, mut ends): (f64, f64) = (0.0, 0.0);
    for (f, a, b) in sweep() {
        for n in 0..=15 {
            let p = bernstein::psi(&f, a, b, Complex64::new(n as f64, 0.0))?;
            worst = worst.max((p.re + ln_s(&f, a, b, n)).abs());
        }
        let p0 = bernstein::psi(&f, a, b, Complex64::new(0.0, 0.0))?;
        let p1 = bernstein::psi(&f, a, b, Complex64::new(1.0, 0.0))?;
        ends = ends.max(p0.norm()).max((p1.re + f.ln_eval(a)).abs());
    }
    outcome(
        worst <= 1e-7 && ends <= 1e-12,
        format!("max |psi(n) + log s_n| = {worst:.3e} (<= 1e-7); psi(0), psi(1) residual {ends:.3e} (<= 1e-12)"),
    )
}

fn hankel_positivity() -> Result<Outcome> {
    let lr = ln_rising;
    let seqs: Vec<(&str, MomentSequence, usize)> = vec![
        ("n!", MomentSequence::from_log_fn(|n| Ok(ln_gamma(n as f64 + 1.0)), true), 6),
        ("(0.5)_n", MomentSequence::from_log_fn(move |n| Ok(lr(0.5, n)), true), 6),
        ("(1)_n/(2)_n", MomentSequence::from_log_fn(move |n| Ok(lr(1.0, n) - lr(2.0, n)), true), 8),
        ("(0.5)_n/(3)_n", MomentSequence::from_log_fn(move |n| Ok(lr(0.5, n) - lr(3.0, n)), true), 8),
        (
            "(a;q)_n/(b;q)_n",
            MomentSequence::from_log_fn(|n| Ok(qseries::ln_qratio_moment(0.5, 0.25, 0.5, n)), true),
            8,
        ),
        (
            "q^(-n(n+1)/2)",
            MomentSequence::from_log_fn(|n| Ok((n * (n + 1)) as f64 / 2.0 * 2f64.ln()), true),
            8,
        ),
        (
            "prod (2)_k/(1)_k",
            MomentSequence::from_log_fn(move |n| Ok((1..=n).map(|k| lr(2.0, k) - lr(1.0, k)).sum()), true),
            6,
        ),
        (
            "prod (b;q)_k/(a;q)_k",
            MomentSequence::from_log_fn(|n| Ok(qseries::ln_qbinom_product(0.5, 0.25, 0.5, n)), true),
            8,
        ),
    ];
    let mut failed = Vec::new();
    for (name, s, order) in &seqs {
        for c in [0.5, 1.0, 2.0] {
            let v = hankel::stieltjes_check(&hankel::power_sequence(s, c)?, *order, 1e-9)?;
            if !v.is_psd() {
                failed.push(format!("{name}^{c}"));
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} sequences x 3 powers PSD at tol 1e-9; failures: {:?}", seqs.len(), failed),
    )
}

fn grid() -> Vec<(f64, f64, f64)> {
    let mut g = Vec::new();
    for a in [0.3, 0.5, 0.7] {
        for b in [0.0, 0.1, 0.25] {
            for q in [0.3, 0.5, 0.8] {
                g.push((a, b, q));
            }
        }
    }
    g
}

fn mom(m: &AtomicMeasure, n: u32) -> Result<f64> {
    Ok(measure::moment(&Measure::Atomic(m.clone()), n)?.re())
}

fn qbeta_moments() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (a, b, q) in grid() {
        for c in [0.5, 1.0, 2.0, 3.0] {
            let mu = qseries::mu_c(a, b, q, c, 1e-15)?;
            for n in 0..=10 {
                let want = (c * qseries::ln_qratio_moment(a, b, q, n as usize)).exp();
                worst = worst.max((mom(&mu, n)? - want).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |moment(mu_c, n) - ((a;q)_n/(b;q)_n)^c| = {worst:.3e} (<= 1e-10)"))
}

fn closed_forms() -> Result<Outcome> {
    let (mut lap, mut mel, mut fac): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (a, b, q) in grid() {
        let tau = Measure::Atomic(qseries::tau_c(a, b, q, 1.0, 1e-15, None)?);
        for s in [0.5, 1.0, 2.0] {
            let qs = q.powf(s);
            let want = (qseries::ln_qpoch_inf(b * qs, q) - qseries::ln_qpoch_inf(b, q)
                - qseries::ln_qpoch_inf(a * qs, q)
                + qseries::ln_qpoch_inf(a, q))
            .exp();
            lap = lap.max((tau.laplace(s)?.0 - want).abs());
        }
        for c in [0.5, 1.0, 2.0, 3.0] {
            let mu = qseries::mu_c(a, b, q, c, 1e-15)?;
            for n in 0..=10 {
                let m = qseries::mellin_qbeta(a, b, q, c, Complex64::new(n as f64, 0.0))?;
                mel = mel.max((m.value - mom(&mu, n)?).norm());
            }
        }
    }
    for (a, b) in [(1.0, 2.0), (0.5, 3.0)] {
        for c in [0.5, 1.0, 2.0] {
            for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)] {
                let gb = semigroups::gamma_mellin(&GammaFamily::new(b, c)?, z)?;
                let be = semigroups::beta_mellin(&BetaFamily::new(a, b, c)?, z)?;
                let ga = semigroups::gamma_mellin(&GammaFamily::new(a, c)?, z)?;
                fac = fac.max((gb * be - ga).norm());
            }
        }
    }
    outcome(
        lap <= 1e-10 && mel <= 1e-10 && fac <= 1e-12,
        format!("Laplace {lap:.3e} (<= 1e-10); q-Beta Mellin {mel:.3e} (<= 1e-10); factorization {fac:.3e} (<= 1e-12)"),
    )
}

fn vc_family() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for q in [0.3, 0.5, 0.8] {
        for c in [0.5, 1.0, 2.0] {
            let m = Measure::Density(semigroups::vc_density(&LogNormalQFamily::new(q, c)?)?);
            for n in 0..=6u32 {
                let want = q.powf(-c * (n * (n + 1)) as f64 / 2.0);
                worst = worst.max((measure::moment(&m, n)?.re() - want).abs() / want);
            }
        }
    }
    outcome(worst <= 1e-8, format!("max relative quadrature error {worst:.3e} (<= 1e-8)"))
}

fn semigroup_laws() -> Result<Outcome> {
    let (mut worst, mut excess): (f64, f64) = (0.0, 0.0);
    for (c, d) in [(0.5, 0.5), (1.0, 1.0), (0.3, 1.7)] {
        for (a, b, q) in [(0.5, 0.25, 0.5), (0.7, 0.1, 0.8), (0.3, 0.0, 0.3)] {
            let (tc, td, tcd) = (
                qseries::tau_c(a, b, q, c, 1e-15, None)?,
                qseries::tau_c(a, b, q, d, 1e-15, None)?,
                qseries::tau_c(a, b, q, c + d, 1e-15, None)?,
            );
            let bound = tc.truncation_error() + td.truncation_error() + tcd.truncation_error();
            let lhs = Measure::Atomic(tc.additive_convolve(&td));
            let rhs = Measure::Atomic(tcd);
            for n in 0..=6 {
                let r = (lhs.laplace(n as f64)?.0 - rhs.laplace(n as f64)?.0).abs();
                worst = worst.max(r);
                excess = excess.max(r - bound);
            }
            let (mc, md, mcd) = (
                qseries::mu_c(a, b, q, c, 1e-15)?,
                qseries::mu_c(a, b, q, d, 1e-15)?,
                qseries::mu_c(a, b, q, c + d, 1e-15)?,
            );
            let bound = mc.truncation_error() + md.truncation_error() + mcd.truncation_error();
            let prod = product_convolve(&mc, &md);
            for n in 0..=6 {
                let r = (mom(&prod, n)? - mom(&mcd, n)?).abs();
                worst = worst.max(r);
                excess = excess.max(r - bound);
            }
        }
    }
    outcome(
        worst <= 1e-9 && excess <= 0.0,
        format!("max moment gap {worst:.3e} (<= 1e-9), largest excess over truncation bounds {excess:.3e} (<= 0)"),
    )
}

fn power_series_and_sigma() -> Result<Outcome> {
    let mut neg = f64::NEG_INFINITY;
    for p in [0.1, 0.3, 0.7] {
        for q in [0.3, 0.5, 0.8] {
            for ck in qseries::hp_coefficients(p, q, 50)?.coefficients {
                neg = neg.max(-ck);
            }
        }
    }
    let (mut prod_err, mut t_err): (f64, f64) = (0.0, 0.0);
    for (a, b, q) in [(0.5, 0.25, 0.5), (0.7, 0.1, 0.3), (0.3, 0.0, 0.8)] {
        let sigma = qseries::sigma_abgamma_auto(a, b, q, qseries::sigma_gamma(a, b, q), 1e-16)?;
        let t = semigroups::t_transform(&MomentSequence::from_log_fn(
            move |n| Ok(qseries::ln_qratio_moment(a, b, q, n)),
            true,
        ))?;
        for n in 0..=6u32 {
            let m = mom(&sigma, n)?;
            let want = qseries::ln_qbinom_product(a, b, q, n as usize).exp();
            prod_err = prod_err.max((m - want).abs() / want.max(1.0));
            t_err = t_err.max((m - t.get(n as usize)?).abs() / want.max(1.0));
        }
    }
    outcome(
        neg <= 1e-14 && prod_err <= 1e-9 && t_err <= 1e-9,
        format!("min c_k = {:.3e} (>= -1e-14); sigma vs products {prod_err:.3e}, vs T-transform {t_err:.3e} (<= 1e-9)", -neg),
    )
}

fn hermite_positivity() -> Result<Outcome> {
    let start = Instant::now();
    let r = hermite::positivity_scan(
        &hermite::grid(-0.95, 0.95, 0.05)?,
        &hermite::grid(-10.0, 10.0, 0.25)?,
        1e-10,
    )?;
    let all_certified = r.points.iter().all(|g| g.value - g.tail_bound - g.rounding_bound > 0.0);
    let mut szasz = true;
    for x in hermite::grid(-6.0, 6.0, 0.1)? {
        for n in 0..=200 {
            szasz &= hermite::hermite_h(n, x).abs() <= hermite::szasz_bound(x);
        }
    }
    let mut gen: f64 = 0.0;
    for x in hermite::grid(-3.0, 3.0, 0.25)? {
        for z in hermite::grid(-0.8, 0.8, 0.1)? {
            let mut acc = 0.0;
            let mut fact = 1.0;
            for k in 0..=60usize {
                if k > 0 {
                    fact *= k as f64;
                }
                acc += hermite::hermite_H(k, x)? * z.powi(k as i32) / fact;
            }
            gen = gen.max((acc - (2.0 * x * z - z * z).exp()).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.all_positive && all_certified && szasz && gen <= 1e-9 && secs <= 60.0,
        format!(
            "{} points, min G = {:.6e} at {:?}, min certified bound {:.3e}; Szasz {}; generating residual {gen:.3e} (<= 1e-9); {secs:.1} s (<= 60)",
            r.points.len(),
            r.min_value,
            r.argmin,
            r.min_lower_bound,
            if szasz { "holds" } else { "VIOLATED" }
        ),
    )
}

fn carleman() -> Result<Outcome> {
    let v = |p: f64| -> Result<CarlemanVerdict> {
        let s = MomentSequence::from_log_fn(move |n| Ok(p * ln_gamma(n as f64 + 1.0)), true);
        Ok(hankel::carleman_diagnostic(&s, 200)?.verdict)
    };
    let (one, three, constant) = (v(1.0)?, v(3.0)?, v(0.0)?);
    outcome(
        one == CarlemanVerdict::DivergentPattern
            && three == CarlemanVerdict::ConvergentPattern
            && constant == CarlemanVerdict::DivergentPattern,
        format!("n! -> {one:?}, (n!)^3 -> {three:?}, 1 -> {constant:?} (heuristic, not a proof)"),
    )
}

fn determinism() -> Result<Outcome> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_momentforge"))
            .args(["verify", "all", "--tol", "1e-8"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = a.status.code() == Some(0) && b.status.code() == Some(0);
    outcome(
        same && ok,
        format!(
            "two runs of `verify all --tol 1e-8`: exit {:?}/{:?}, {} bytes, identical = {same}",
            a.status.code(),
            b.status.code(),
            a.stdout.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("representation identity", representation),
        ("psi consistency", psi_consistency),
        ("Hankel positivity", hankel_positivity),
        ("q-Beta moments", qbeta_moments),
        ("Laplace/Mellin closed forms", closed_forms),
        ("v_c family", vc_family),
        ("semigroup laws", semigroup_laws),
        ("power-series coefficients and sigma", power_series_and_sigma),
        ("Hermite positivity", hermite_positivity),
        ("Carleman diagnostic", carleman),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("criterion {:>2} {:<36} {}  {}", i + 1, name, if pass { "PASS" } else { "FAIL" }, detail);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Moment sequences and the tests run on them: Hankel positivity, the
//! Carleman heuristic, the zero-pattern trichotomy and positive powers.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{self, Measure};

type LogGen = Arc<dyn Fn(usize) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum Repr {
    /// n ↦ ln s_n, for sequences with s_n > 0.
    Log(LogGen),
    /// Explicit finite table; zeros and signs allowed (Hamburger data).
    Table(Vec<f64>),
    /// s_n = c·δ_{0n}.
    DiracZero(f64),
}

/// A sequence `s_0, s_1, ...`, stored either through `ln s_n`, as an explicit
/// table, or as the degenerate `c·δ_{0n}`.
#[derive(Clone)]
pub struct MomentSequence {
    repr: Repr,
    normalized: bool,
}

impl fmt::Debug for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Log(_) => "log".to_string(),
            Repr::Table(t) => format!("table({})", t.len()),
            Repr::DiracZero(c) => format!("dirac-zero({c})"),
        };
        f.debug_struct("MomentSequence")
            .field("repr", &kind)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl MomentSequence {
    /// Sequence given by `n ↦ ln s_n`. `normalized` records that `ln s_0 = 0`.
    pub fn from_log_fn(f: impl Fn(usize) -> Result<f64> + Send + Sync + 'static, normalized: bool) -> Self {
        MomentSequence {
            repr: Repr::Log(Arc::new(f)),
            normalized,
        }
    }

    /// Sequence given by `n ↦ s_n > 0`; stored through its logarithm.
    pub fn from_fn(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        let s0 = f(0);
        MomentSequence::from_log_fn(
            move |n| {
                let v = f(n);
                if v > 0.0 && v.is_finite() {
                    Ok(v.ln())
                } else if v == f64::INFINITY {
                    Err(Error::Range(format!("s_{n} overflows binary64; use a log-domain generator")))
                } else {
                    Err(Error::Domain(format!("s_{n} = {v} is not positive")))
                }
            },
            s0 == 1.0,
        )
    }

    /// Finite explicit table.
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty moment table".into()));
        }
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| v.is_nan()) {
            return Err(Error::Domain(format!("s_{n} = {v}")));
        }
        let normalized = values[0] == 1.0;
        Ok(MomentSequence {
            repr: Repr::Table(values),
            normalized,
        })
    }

    /// The sequence `c·δ_{0n}` (moments of `c·δ_0`).
    pub fn dirac_zero(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("c·δ_0n needs c > 0, got {c}")));
        }
        Ok(MomentSequence {
            repr: Repr::DiracZero(c),
            normalized: c == 1.0,
        })
    }

    /// Integer moments of a measure, computed on demand.
    pub fn from_measure(m: Measure) -> Self {
        let normalized = match &m {
            Measure::Atomic(a) => (a.total_mass() - 1.0).abs() <= a.truncation_error() + 1e-15,
            Measure::Density(_) => false,
        };
        MomentSequence::from_log_fn(
            move |n| {
                let v = measure::moment(&m, n as u32)?.re();
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(Error::Domain(format!("moment {n} = {v} is not positive")))
                }
            },
            normalized,
        )
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Number of stored terms, `None` for unbounded sequences.
    pub fn len(&self) -> Option<usize> {
        match &self.repr {
            Repr::Table(t) => Some(t.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_index(&self, n: usize) -> Result<()> {
        match &self.repr {
            Repr::Table(t) if n >= t.len() => Err(Error::OutOfRange { index: n, len: t.len() }),
            _ => Ok(()),
        }
    }

    /// s_n. Overflow of a log-domain value is a range error.
    pub fn get(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        match &self.repr {
            Repr::Log(f) => {
                let l = f(n)?;
                let v = l.exp();
                if v.is_infinite() {
                    Err(Error::Range(format!(
                        "s_{n} = exp({l}) overflows binary64; use ln_get instead"
                    )))
                } else {
                    Ok(v)
                }
            }
            Repr::Table(t) => Ok(t[n]),
            Repr::DiracZero(c) => Ok(if n == 0 { *c } else { 0.0 }),
        }
    }

    /// ln s_n; `-∞` for zero entries and NaN for negative ones.
    pub fn ln_get(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        match &self.repr {
            Repr::Log(f) => {
                let l = f(n)?;
                if l.is_nan() {
                    Err(Error::Domain(format!("ln s_{n} is NaN")))
                } else {
                    Ok(l)
                }
            }
            Repr::Table(t) => Ok(if t[n] < 0.0 { f64::NAN } else { t[n].ln() }),
            Repr::DiracZero(c) => Ok(if n == 0 { c.ln() } else { f64::NEG_INFINITY }),
        }
    }

    /// The first `count` terms.
    pub fn values(&self, count: usize) -> Result<Vec<f64>> {
        (0..count).map(|n| self.get(n)).collect()
    }
}

/// Which Hankel matrix failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HankelMatrix {
    H0,
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HankelStatus {
    ConsistentPSD,
    /// `order` is k for the (k+1)×(k+1) leading section. The estimate is the
    /// Rayleigh quotient of a certificate vector for the diagonally scaled
    /// matrix, hence an upper bound on its smallest eigenvalue.
    FailedAt {
        order: usize,
        matrix: HankelMatrix,
        min_eigenvalue_estimate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelVerdict {
    pub status: HankelStatus,
    pub order_tested: usize,
    pub tolerance: f64,
}

impl HankelVerdict {
    pub fn is_psd(&self) -> bool {
        self.status == HankelStatus::ConsistentPSD
    }
}

/// Tests positive semidefiniteness of `H0 = (s_{i+j})` and `H1 = (s_{i+j+1})`,
/// `0 <= i, j <= N`, on every leading section.
///
/// Both matrices are scaled to unit diagonal before a pivoted Cholesky
/// factorization. A section fails when a certificate vector with Rayleigh
/// quotient below `-tol` is found.
pub fn stieltjes_check(s: &MomentSequence, n: usize, tol: f64) -> Result<HankelVerdict> {
    if n < 1 {
        return Err(Error::Precondition("stieltjes_check needs N >= 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be >= 0, got {tol}")));
    }
    let top = 2 * n + 1;
    let mut lns = Vec::with_capacity(top + 1);
    let mut sign = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let v = s.get(k).ok();
        let l = match v {
            Some(v) if v < 0.0 => {
                sign.push(-1.0);
                lns.push((-v).ln());
                continue;
            }
            _ => s.ln_get(k)?,
        };
        if l == f64::INFINITY {
            return Err(Error::Range(format!("s_{k} is infinite")));
        }
        sign.push(if l == f64::NEG_INFINITY { 0.0 } else { 1.0 });
        lns.push(l);
    }
    for order in 0..=n {
        for (matrix, shift) in [(HankelMatrix::H0, 0usize), (HankelMatrix::H1, 1)] {
            let a = scaled_hankel(&lns, &sign, order + 1, shift);
            if let Some(est) = psd_certificate(&a, tol) {
                return Ok(HankelVerdict {
                    status: HankelStatus::FailedAt {
                        order,
                        matrix,
                        min_eigenvalue_estimate: est,
                    },
                    order_tested: order,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(HankelVerdict {
        status: HankelStatus::ConsistentPSD,
        order_tested: n,
        tolerance: tol,
    })
}

/// `A_ij = s_{i+j+shift} / sqrt(s_{2i+shift} s_{2j+shift})`, with unit scale
/// for rows whose diagonal entry is not positive.
fn scaled_hankel(lns: &[f64], sign: &[f64], dim: usize, shift: usize) -> Vec<Vec<f64>> {
    let half: Vec<f64> = (0..dim)
        .map(|i| {
            let k = 2 * i + shift;
            if sign[k] > 0.0 {
                0.5 * lns[k]
            } else {
                0.0
            }
        })
        .collect();
    let mut a = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let k = i + j + shift;
            a[i][j] = if sign[k] == 0.0 {
                0.0
            } else {
                sign[k] * (lns[k] - half[i] - half[j]).exp()
            };
        }
    }
    a
}

/// Returns the most negative Rayleigh quotient found below `-tol`, or `None`
/// when the matrix is positive semidefinite within `tol`.
fn psd_certificate(a: &[Vec<f64>], tol: f64) -> Option<f64> {
    let n = a.len();
    let mut w = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut r = 0;
    while r < n {
        let (p, dmax) = (r..n)
            .map(|i| (i, w[i][i]))
            .fold((r, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dmax <= tol {
            break;
        }
        w.swap(r, p);
        for row in w.iter_mut() {
            row.swap(r, p);
        }
        perm.swap(r, p);
        let d = w[r][r].sqrt();
        w[r][r] = d;
        for i in r + 1..n {
            w[i][r] /= d;
        }
        for i in r + 1..n {
            for j in r + 1..=i {
                let v = w[i][j] - w[i][r] * w[j][r];
                w[i][j] = v;
                w[j][i] = v;
            }
        }
        r += 1;
    }
    if r == n {
        return None;
    }
    // Candidate directions in the Schur complement: negative diagonals and
    // negative 2×2 minors.
    let mut candidates: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in r..n {
        if w[i][i] < -tol {
            candidates.push(vec![(i, 1.0)]);
        }
        for j in r..i {
            let (p, q, o) = (w[i][i], w[j][j], w[i][j]);
            let lam = 0.5 * (p + q) - (0.25 * (p - q) * (p - q) + o * o).sqrt();
            if lam < -tol {
                // eigenvector of [[p, o], [o, q]] for the smaller eigenvalue
                let theta = 0.5 * (2.0 * o).atan2(p - q);
                let (c, s) = (theta.cos(), theta.sin());
                candidates.push(vec![(i, -s), (j, c)]);
            }
        }
    }
    let mut best: Option<f64> = None;
    for v in candidates {
        // x = [-L11^{-T} L21^T v ; v] in permuted coordinates
        let mut y = vec![0.0; r];
        for &(i, vi) in &v {
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += w[i][k] * vi;
            }
        }
        for k in (0..r).rev() {
            let mut acc = y[k];
            for m in k + 1..r {
                acc -= w[m][k] * y[m];
            }
            y[k] = acc / w[k][k];
        }
        let mut x = vec![0.0; n];
        for k in 0..r {
            x[perm[k]] = -y[k];
        }
        for &(i, vi) in &v {
            x[perm[i]] += vi;
        }
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                num += x[i] * a[i][j] * x[j];
            }
        }
        let den: f64 = x.iter().map(|t| t * t).sum();
        let rq = num / den;
        if rq < -tol && best.is_none_or(|b| rq < b) {
            best = Some(rq);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CarlemanVerdict {
    DivergentPattern,
    ConvergentPattern,
    Inconclusive,
}

/// Thresholds of the Carleman heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanConfig {
    /// Minimum log-log slope of the partial sums that counts as divergence.
    pub divergent_slope: f64,
    /// Terms decaying like n^{-1-δ} or faster count as convergence.
    pub convergent_delta: f64,
}

impl Default for CarlemanConfig {
    fn default() -> Self {
        CarlemanConfig {
            divergent_slope: 0.25,
            convergent_delta: 0.05,
        }
    }
}

/// Result of the Carleman heuristic. Never a proof of (in)determinacy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlemanDiagnostic {
    /// Σ_{1<=n<=N} s_n^{-1/(2n)}
    pub partial_sum: f64,
    /// Partial sums for N = 1, 2, ...
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of ln(partial sum) against ln n over the upper half.
    pub slope_estimate: f64,
    /// Same for the terms themselves.
    pub term_slope: f64,
    pub verdict: CarlemanVerdict,
}

pub fn carleman_diagnostic(s: &MomentSequence, n: usize) -> Result<CarlemanDiagnostic> {
    carleman_diagnostic_with(s, n, &CarlemanConfig::default())
}

pub fn carleman_diagnostic_with(s: &MomentSequence, n: usize, cfg: &CarlemanConfig) -> Result<CarlemanDiagnostic> {
    if n < 4 {
        return Err(Error::Precondition("Carleman diagnostic needs N >= 4".into()));
    }
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let l = s.ln_get(k)?;
        if !(l > f64::NEG_INFINITY) || l.is_nan() {
            return Err(Error::Domain(format!("s_{k} is not positive")));
        }
        terms.push((-l / (2.0 * k as f64)).exp());
    }
    let mut partial_sums = Vec::with_capacity(n);
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partial_sums.push(acc);
    }
    let lo = n / 2;
    let xs: Vec<f64> = (lo..n).map(|i| ((i + 1) as f64).ln()).collect();
    let slope_estimate = ls_slope(&xs, &partial_sums[lo..].iter().map(|v| v.ln()).collect::<Vec<_>>());
    let term_logs: Vec<f64> = terms[lo..].iter().map(|v| v.ln()).collect();
    let term_slope = if term_logs.iter().all(|v| v.is_finite()) {
        ls_slope(&xs, &term_logs)
    } else {
        f64::NEG_INFINITY
    };
    let verdict = if slope_estimate >= cfg.divergent_slope {
        CarlemanVerdict::DivergentPattern
    } else if term_slope <= -(1.0 + cfg.convergent_delta) {
        CarlemanVerdict::ConvergentPattern
    } else {
        CarlemanVerdict::Inconclusive
    };
    Ok(CarlemanDiagnostic {
        partial_sum: acc,
        partial_sums,
        slope_estimate,
        term_slope,
        verdict,
    })
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trichotomy {
    AllPositive,
    SymmetricZeroOdd,
    DiracAtZero,
}

/// Classifies the zero pattern of `s_1..s_N`, treating `|s_n| <= 1e-13·max|s|`
/// as zero.
pub fn trichotomy_classify(s: &MomentSequence, n: usize) -> Result<Trichotomy> {
    if n < 2 {
        return Err(Error::Precondition("trichotomy needs N >= 2 to separate the cases".into()));
    }
    let vals = s.values(n + 1)?;
    if (vals[0] - 1.0).abs() > 1e-13 {
        return Err(Error::Precondition(format!("s_0 must be 1, got {}", vals[0])));
    }
    let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = 1e-13 * max;
    let zero: Vec<bool> = vals.iter().map(|v| v.abs() <= zero_tol).collect();
    if zero[1..].iter().all(|z| !z) {
        Ok(Trichotomy::AllPositive)
    } else if zero[1..].iter().all(|z| *z) {
        Ok(Trichotomy::DiracAtZero)
    } else if (1..=n).all(|k| zero[k] == (k % 2 == 1)) {
        Ok(Trichotomy::SymmetricZeroOdd)
    } else {
        let pattern: String = zero.iter().map(|z| if *z { '0' } else { '+' }).collect();
        Err(Error::Inconsistent(format!(
            "zero pattern {pattern} matches none of the three cases"
        )))
    }
}

/// n ↦ s_n^c, computed as exp(c·ln s_n).
pub fn power_sequence(s: &MomentSequence, c: f64) -> Result<MomentSequence> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("power needs c > 0, got {c}")));
    }
    let normalized = s.normalized;
    Ok(match &s.repr {
        Repr::Log(f) => {
            let f = f.clone();
            MomentSequence {
                repr: Repr::Log(Arc::new(move |n| Ok(c * f(n)?))),
                normalized,
            }
        }
        Repr::Table(t) => MomentSequence {
            repr: Repr::Table(
                t.iter()
                    .map(|&v| if v > 0.0 { (c * v.ln()).exp() } else if v == 0.0 { 0.0 } else { f64::NAN })
                    .collect(),
            ),
            normalized,
        },
        Repr::DiracZero(k) => MomentSequence {
            repr: Repr::DiracZero((c * k.ln()).exp()),
            normalized,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    fn factorial_power(c: f64) -> MomentSequence {
        MomentSequence::from_log_fn(move |n| Ok(c * ln_gamma(n as f64 + 1.0)), true)
    }

    #[test]
    fn constant_sequence_is_psd() {
        let s = MomentSequence::from_fn(|_| 1.0);
        assert!(stieltjes_check(&s, 8, 1e-9).unwrap().is_psd());
    }

    #[test]
    fn factorials_pass_at_order_two() {
        let s = MomentSequence::from_table(vec![1.0, 1.0, 2.0, 6.0, 24.0, 120.0]).unwrap();
        let v = stieltjes_check(&s, 2, 1e-9).unwrap();
        assert_eq!(v.status, HankelStatus::ConsistentPSD);
        assert_eq!(v.order_tested, 2);
    }

    #[test]
    fn linear_table_fails_at_first_order() {
        let s = MomentSequence::from_table(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = stieltjes_check(&s, 1, 1e-9).unwrap();
        match v.status {
            HankelStatus::FailedAt {
                order,
                matrix,
                min_eigenvalue_estimate,
            } => {
                assert_eq!(order, 1);
                assert_eq!(matrix, HankelMatrix::H0);
                // smallest eigenvalue of the scaled matrix is 1 - 2/√3
                let lam = 1.0 - 2.0 / 3f64.sqrt();
                assert!(min_eigenvalue_estimate < -1e-9);
                assert!(min_eigenvalue_estimate >= lam - 1e-15);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn short_table_is_out_of_range() {
        let s = MomentSequence::from_table(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(stieltjes_check(&s, 1, 1e-9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn overflowing_table_is_range_error() {
        let s = MomentSequence::from_table(vec![1.0, 1.0, f64::INFINITY, 1.0]).unwrap();
        assert!(matches!(stieltjes_check(&s, 1, 1e-9), Err(Error::Range(_))));
    }

    #[test]
    fn huge_log_sequences_stay_testable() {
        // (n!)^3 overflows binary64 near n = 60 but its logarithm does not
        let s = factorial_power(3.0);
        assert!(stieltjes_check(&s, 6, 1e-9).unwrap().is_psd());
        assert!(matches!(s.get(200), Err(Error::Range(_))));
    }

    #[test]
    fn dirac_zero_is_psd_and_classified() {
        let s = MomentSequence::dirac_zero(1.0).unwrap();
        assert!(stieltjes_check(&s, 4, 1e-12).unwrap().is_psd());
        assert_eq!(trichotomy_classify(&s, 6).unwrap(), Trichotomy::DiracAtZero);
    }

    #[test]
    fn carleman_examples() {
        let d = carleman_diagnostic(&factorial_power(1.0), 200).unwrap();
        assert_eq!(d.verdict, CarlemanVerdict::DivergentPattern);
        let c = carleman_diagnostic(&factorial_power(3.0), 200).unwrap();
        assert_eq!(c.verdict, CarlemanVerdict::ConvergentPattern);
        let one = carleman_diagnostic(&MomentSequence::from_fn(|_| 1.0), 50).unwrap();
        assert_eq!(one.verdict, CarlemanVerdict::DivergentPattern);
        assert_eq!(one.partial_sum, 50.0);
        assert!(d.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn carleman_rejects_zero_terms() {
        let s = MomentSequence::from_table(vec![1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(carleman_diagnostic(&s, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn trichotomy_examples() {
        let t = |v: Vec<f64>| trichotomy_classify(&MomentSequence::from_table(v).unwrap(), 4);
        assert_eq!(t(vec![1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(), Trichotomy::SymmetricZeroOdd);
        assert_eq!(t(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), Trichotomy::DiracAtZero);
        assert_eq!(t(vec![1.0, 1.0, 2.0, 6.0, 24.0]).unwrap(), Trichotomy::AllPositive);
        assert!(matches!(t(vec![1.0, 1.0, 0.0, 1.0, 1.0]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn power_sequence_examples() {
        let fact = factorial_power(1.0);
        let sq = power_sequence(&fact, 2.0).unwrap();
        assert!((sq.get(3).unwrap() - 36.0).abs() < 1e-12);
        let q: f64 = 0.5;
        let v = MomentSequence::from_log_fn(move |n| Ok(-((n * (n + 1) / 2) as f64) * q.ln()), true);
        assert!((power_sequence(&v, 2.0).unwrap().get(2).unwrap() - 64.0).abs() < 1e-12);
        let same = power_sequence(&fact, 1.0).unwrap();
        for n in 0..10 {
            assert_eq!(same.get(n).unwrap(), fact.get(n).unwrap());
        }
    }
}

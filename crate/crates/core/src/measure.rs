//! Measures on the half-line and the operations every other module builds on:
//! moments, Mellin transforms, product convolution and pushforwards.
//!
//! Two carriers are provided. [`AtomicMeasure`] is a finite list of weighted
//! point masses plus an optional mass at the origin and a bound on the mass
//! discarded when an infinite atomic measure was truncated. [`DensityMeasure`]
//! is a non-negative density on an interval together with the quadrature
//! recipe used to integrate against it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig, QuadResult, QuadValue};

/// Relative tolerance under which two atom locations are treated as equal.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

/// Half-width, in standard deviations, of the window used for log-normal-like
/// densities.
pub const LOG_WINDOW_SDS: f64 = 12.0;

/// A value of a Mellin transform (or a moment) together with an absolute
/// error bound covering quadrature, truncation and rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub value: Complex64,
    pub abs_error: f64,
}

impl MellinValue {
    pub fn real(value: f64, abs_error: f64) -> Self {
        MellinValue {
            value: Complex64::new(value, 0.0),
            abs_error,
        }
    }

    /// Real part, which carries the moment for integer arguments.
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

// ---------------------------------------------------------------------------
// Atomic measures
// ---------------------------------------------------------------------------

/// Finite weighted point masses with an optional atom at 0.
///
/// Locations are kept strictly increasing; atoms whose locations agree within
/// the merge tolerance are combined, and an atom placed exactly at 0 is folded
/// into `zero_mass`. Negative locations are permitted so that images under
/// `-log` stay representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomicJson", into = "AtomicJson")]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
    zero_mass: f64,
    truncation_error: f64,
}

#[derive(Serialize, Deserialize)]
struct AtomicJson {
    atoms: Vec<(f64, f64)>,
    zero_mass: f64,
    trunc_err: f64,
}

impl TryFrom<AtomicJson> for AtomicMeasure {
    type Error = Error;
    fn try_from(j: AtomicJson) -> Result<Self> {
        AtomicMeasure::new(j.atoms, j.zero_mass, j.trunc_err)
    }
}

impl From<AtomicMeasure> for AtomicJson {
    fn from(m: AtomicMeasure) -> Self {
        AtomicJson {
            atoms: m.atoms,
            zero_mass: m.zero_mass,
            trunc_err: m.truncation_error,
        }
    }
}

impl AtomicMeasure {
    /// Builds a measure from unsorted atoms, merging coincident locations.
    pub fn new(atoms: Vec<(f64, f64)>, zero_mass: f64, truncation_error: f64) -> Result<Self> {
        Self::with_merge_tol(atoms, zero_mass, truncation_error, DEFAULT_MERGE_TOL)
    }

    pub fn with_merge_tol(
        mut atoms: Vec<(f64, f64)>,
        zero_mass: f64,
        truncation_error: f64,
        merge_tol: f64,
    ) -> Result<Self> {
        if !(zero_mass >= 0.0 && zero_mass.is_finite()) {
            return Err(Error::Domain(format!("zero_mass must be finite and >= 0, got {zero_mass}")));
        }
        if !(truncation_error >= 0.0 && truncation_error.is_finite()) {
            return Err(Error::Domain(format!(
                "truncation error must be finite and >= 0, got {truncation_error}"
            )));
        }
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::Domain(format!("atom location {x} is not finite")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!("atom weight {w} at {x} is negative or not finite")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut zero = zero_mass;
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if x == 0.0 {
                zero += w;
                continue;
            }
            match merged.last_mut() {
                Some(last) if (x - last.0).abs() <= merge_tol * x.abs().max(last.0.abs()) => {
                    last.1 += w;
                }
                _ => merged.push((x, w)),
            }
        }
        Ok(AtomicMeasure {
            atoms: merged,
            zero_mass: zero,
            truncation_error,
        })
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        if x == 0.0 {
            AtomicMeasure {
                atoms: Vec::new(),
                zero_mass: 1.0,
                truncation_error: 0.0,
            }
        } else {
            AtomicMeasure {
                atoms: vec![(x, 1.0)],
                zero_mass: 0.0,
                truncation_error: 0.0,
            }
        }
    }

    /// The zero measure.
    pub fn empty() -> Self {
        AtomicMeasure {
            atoms: Vec::new(),
            zero_mass: 0.0,
            truncation_error: 0.0,
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn zero_mass(&self) -> f64 {
        self.zero_mass
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.zero_mass == 0.0
    }

    pub fn total_mass(&self) -> f64 {
        self.zero_mass + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// Largest |location|, including 0 when the origin carries mass.
    pub fn max_abs_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }

    /// Multiplies every weight (and the truncation bound) by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        AtomicMeasure {
            atoms: self.atoms.iter().map(|&(x, w)| (x, w * factor)).collect(),
            zero_mass: self.zero_mass * factor,
            truncation_error: self.truncation_error * factor,
        }
    }

    pub fn with_truncation_error(mut self, bound: f64) -> Self {
        self.truncation_error = bound;
        self
    }

    /// Sum Σ w·g(x) over atoms and the origin, with a rounding bound.
    fn sum<T: QuadValue>(&self, g: impl Fn(f64) -> T) -> (T, f64) {
        let mut acc = T::default();
        let mut abs = 0.0;
        if self.zero_mass > 0.0 {
            let v = g(0.0) * self.zero_mass;
            acc = acc + v;
            abs += v.norm();
        }
        for &(x, w) in &self.atoms {
            let v = g(x) * w;
            acc = acc + v;
            abs += v.norm();
        }
        (acc, abs * (self.atoms.len() as f64 + 2.0) * f64::EPSILON)
    }

    /// Additive convolution: atoms at all pairwise sums of locations.
    pub fn additive_convolve(&self, other: &AtomicMeasure) -> AtomicMeasure {
        let mut atoms = Vec::with_capacity((self.atoms.len() + 1) * (other.atoms.len() + 1));
        let lhs = self.with_origin();
        let rhs = other.with_origin();
        for &(x, w) in &lhs {
            for &(y, v) in &rhs {
                atoms.push((x + y, w * v));
            }
        }
        let (m1, m2) = (self.total_mass(), other.total_mass());
        let (t1, t2) = (self.truncation_error, other.truncation_error);
        AtomicMeasure::new(atoms, 0.0, t1 * (m2 + t2) + t2 * m1)
            .expect("convolution of valid measures is valid")
    }

    fn with_origin(&self) -> Vec<(f64, f64)> {
        let mut v = Vec::with_capacity(self.atoms.len() + 1);
        if self.zero_mass > 0.0 {
            v.push((0.0, self.zero_mass));
        }
        v.extend_from_slice(&self.atoms);
        v
    }
}

// ---------------------------------------------------------------------------
// Density measures
// ---------------------------------------------------------------------------

/// How a density is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadHint {
    /// Plain adaptive quadrature on a bounded support.
    FiniteInterval,
    /// Support `(lo, ∞)` with exponential decay; integrated via `x = lo - ln u`.
    ExponentialDecay,
    /// Log-normal-like density: in `y = ln x` the measure `density(x) dx` is
    /// close to a Gaussian with the given mean and standard deviation.
    /// Integration runs over a window of ±12 standard deviations, shifted by
    /// `Re z · sd²` for the integrand `x^z`.
    LogSubstitution { mean: f64, sd: f64 },
}

/// Serializable identity of a catalog density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityId {
    pub density: String,
    pub params: BTreeMap<String, serde_json::Value>,
}

/// A non-negative density on `[lo, hi]` (with `hi` possibly infinite).
#[derive(Clone)]
pub struct DensityMeasure {
    /// Called with `(x, hi - x)`; the second argument is exact even when it
    /// is far below the spacing of binary64 near `hi`.
    density: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    lo: f64,
    hi: f64,
    hint: QuadHint,
    strip: f64,
    id: DensityId,
    quad: QuadConfig,
}

impl fmt::Debug for DensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMeasure")
            .field("id", &self.id)
            .field("support", &(self.lo, self.hi))
            .field("hint", &self.hint)
            .field("strip", &self.strip)
            .finish()
    }
}

impl DensityMeasure {
    /// `strip` is the abscissa of integrability: `x^z` is integrable for
    /// `Re z > strip`.
    pub fn new(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
        hint: QuadHint,
        strip: f64,
        id: DensityId,
    ) -> Result<Self> {
        Self::new_two_sided(move |x, _| density(x), support, hint, strip, id)
    }

    /// As [`DensityMeasure::new`] for a density written in terms of `x` and
    /// the distance `hi - x` to the upper end of the support, for densities
    /// that are singular there.
    pub fn new_two_sided(
        density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
        hint: QuadHint,
        strip: f64,
        id: DensityId,
    ) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain(format!("empty support [{lo}, {hi}]")));
        }
        match hint {
            QuadHint::FiniteInterval if !(lo.is_finite() && hi.is_finite()) => {
                return Err(Error::Domain("finite-interval hint needs a bounded support".into()))
            }
            QuadHint::ExponentialDecay if !(lo.is_finite() && hi == f64::INFINITY) => {
                return Err(Error::Domain("exponential-decay hint needs support (lo, ∞)".into()))
            }
            QuadHint::LogSubstitution { sd, .. } if !(lo == 0.0 && hi == f64::INFINITY && sd > 0.0) => {
                return Err(Error::Domain("log substitution needs support (0, ∞) and sd > 0".into()))
            }
            _ => {}
        }
        Ok(DensityMeasure {
            density: Arc::new(density),
            lo,
            hi,
            hint,
            strip,
            id,
            quad: QuadConfig::default(),
        })
    }

    pub fn with_quad_config(mut self, cfg: QuadConfig) -> Self {
        self.quad = cfg;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            (self.density)(x, self.hi - x)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn hint(&self) -> QuadHint {
        self.hint
    }

    pub fn strip(&self) -> f64 {
        self.strip
    }

    pub fn id(&self) -> &DensityId {
        &self.id
    }

    pub fn quad_config(&self) -> &QuadConfig {
        &self.quad
    }

    /// ∫ g dμ. `tilt` only moves the window of a log-substitution hint and
    /// should be the real power of `x` carried by `g` (0 otherwise).
    fn integrate_with<T: QuadValue>(&self, g: impl Fn(f64) -> T, tilt: f64) -> Result<(T, f64)> {
        let d = &self.density;
        let r = match self.hint {
            QuadHint::FiniteInterval => quad::integrate_tanh_sinh(
                |x: f64, _, dhi: f64| {
                    let gx = g(x);
                    if gx.norm() == 0.0 {
                        T::default()
                    } else {
                        gx * d(x, dhi)
                    }
                },
                self.lo,
                self.hi,
                &self.quad,
            )?,
            QuadHint::ExponentialDecay => {
                // the head carries any singularity at lo, the tail the decay
                let split = self.lo + 1.0;
                let head = quad::integrate_tanh_sinh(
                    |x: f64, _, _| {
                        let w = d(x, f64::INFINITY);
                        if w == 0.0 {
                            T::default()
                        } else {
                            g(x) * w
                        }
                    },
                    self.lo,
                    split,
                    &self.quad,
                )?;
                let tail = quad::integrate_exp_decay(
                    |x: f64| {
                        let w = d(x, f64::INFINITY);
                        if w == 0.0 {
                            T::default()
                        } else {
                            g(x) * w
                        }
                    },
                    split,
                    &self.quad,
                )?;
                QuadResult {
                    value: head.value + tail.value,
                    abs_error: head.abs_error + tail.abs_error,
                    panels: head.panels + tail.panels,
                }
            }
            QuadHint::LogSubstitution { mean, sd } => {
                let center = mean + tilt * sd * sd;
                quad::integrate(
                    |y: f64| {
                        let x = y.exp();
                        let w = d(x, f64::INFINITY) * x;
                        if w == 0.0 {
                            T::default()
                        } else {
                            g(x) * w
                        }
                    },
                    center - LOG_WINDOW_SDS * sd,
                    center + LOG_WINDOW_SDS * sd,
                    &self.quad,
                )?
            }
        };
        Ok((r.value, r.abs_error))
    }
}

// ---------------------------------------------------------------------------
// Measure: either carrier
// ---------------------------------------------------------------------------

/// A measure on the half-line carried either by atoms or by a density.
#[derive(Debug, Clone)]
pub enum Measure {
    Atomic(AtomicMeasure),
    Density(DensityMeasure),
}

impl From<AtomicMeasure> for Measure {
    fn from(m: AtomicMeasure) -> Self {
        Measure::Atomic(m)
    }
}

impl From<DensityMeasure> for Measure {
    fn from(m: DensityMeasure) -> Self {
        Measure::Density(m)
    }
}

impl Measure {
    pub fn as_atomic(&self) -> Option<&AtomicMeasure> {
        match self {
            Measure::Atomic(a) => Some(a),
            Measure::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DensityMeasure> {
        match self {
            Measure::Density(d) => Some(d),
            Measure::Atomic(_) => None,
        }
    }

    /// ∫ g dμ with an absolute error bound.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        match self {
            Measure::Atomic(a) => {
                let (v, err) = a.sum(g);
                Ok((v, err))
            }
            Measure::Density(d) => d.integrate_with(g, 0.0),
        }
    }

    /// ∫ g dμ for a complex-valued `g`.
    pub fn integrate_complex(&self, g: impl Fn(f64) -> Complex64) -> Result<(Complex64, f64)> {
        match self {
            Measure::Atomic(a) => Ok(a.sum(g)),
            Measure::Density(d) => d.integrate_with(g, 0.0),
        }
    }

    /// Laplace transform ∫ e^{-s x} dμ(x).
    pub fn laplace(&self, s: f64) -> Result<(f64, f64)> {
        match self {
            Measure::Atomic(a) => {
                let (v, err) = a.sum(|x| (-s * x).exp());
                let tail = if a.truncation_error > 0.0 {
                    let min_loc = a.atoms.iter().map(|p| p.0).fold(0.0f64, f64::min);
                    a.truncation_error * (-s * min_loc).exp().max(1.0)
                } else {
                    0.0
                };
                Ok((v, err + tail))
            }
            Measure::Density(_) => self.integrate(|x| (-s * x).exp()),
        }
    }

    pub fn total_mass(&self) -> Result<(f64, f64)> {
        match self {
            Measure::Atomic(a) => Ok((a.total_mass(), a.truncation_error)),
            Measure::Density(_) => self.integrate(|_| 1.0),
        }
    }
}

/// n-th moment ∫ x^n dμ.
///
/// For atomic measures the truncation bound is inflated by `max|x|^n`, which
/// assumes the discarded atoms lie within the range of the retained ones (true
/// for every truncated catalog measure, whose tails run towards 0).
pub fn moment(m: &Measure, n: u32) -> Result<MellinValue> {
    match m {
        Measure::Atomic(a) => {
            let (v, round) = a.sum(|x| x.powi(n as i32) * (1.0 + 0.0 * x));
            let tail = a.truncation_error * a.max_abs_location().max(1.0).powi(n as i32);
            let round = round * (n as f64 + 1.0);
            Ok(MellinValue::real(v, round + tail))
        }
        Measure::Density(d) => {
            if (n as f64) <= d.strip {
                return Err(Error::Domain(format!(
                    "moment {n} outside the integrability strip Re z > {}",
                    d.strip
                )));
            }
            let (v, err) = d.integrate_with(|x: f64| x.powi(n as i32), n as f64)?;
            Ok(MellinValue::real(v, err + 4.0 * f64::EPSILON * v.abs()))
        }
    }
}

/// Mellin transform ∫ x^z dμ(x).
///
/// For atomic measures with mass at the origin `0^z` is 1 at `z = 0` and 0 for
/// `Re z > 0`; other `z` are a domain error. A truncated atomic measure can
/// only be bounded for `Re z >= 0`.
pub fn mellin(m: &Measure, z: Complex64) -> Result<MellinValue> {
    match m {
        Measure::Atomic(a) => {
            if a.atoms.iter().any(|p| p.0 < 0.0) {
                return Err(Error::Domain("Mellin transform needs locations >= 0".into()));
            }
            if a.zero_mass > 0.0 && !(z.re > 0.0 || z == Complex64::new(0.0, 0.0)) {
                return Err(Error::Domain(format!(
                    "x^z is not integrable at the atom at 0 for z = {z}"
                )));
            }
            if a.truncation_error > 0.0 && z.re < 0.0 {
                return Err(Error::Domain(format!(
                    "cannot bound the truncated tail for Re z = {} < 0",
                    z.re
                )));
            }
            let zabs = z.norm();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut round = 0.0;
            if a.zero_mass > 0.0 && z == Complex64::new(0.0, 0.0) {
                acc += a.zero_mass;
                round += a.zero_mass * f64::EPSILON;
            }
            for &(x, w) in &a.atoms {
                let lx = x.ln();
                let term = (z * lx).exp() * w;
                acc += term;
                round += term.norm() * (2.0 + zabs * lx.abs()) * f64::EPSILON;
            }
            round += acc.norm() * (a.atoms.len() as f64 + 1.0) * f64::EPSILON;
            let tail = a.truncation_error * a.max_abs_location().max(1.0).powf(z.re);
            Ok(MellinValue {
                value: acc,
                abs_error: round + tail,
            })
        }
        Measure::Density(d) => {
            if !(z.re > d.strip) {
                return Err(Error::Domain(format!(
                    "Re z = {} outside the integrability strip Re z > {}",
                    z.re, d.strip
                )));
            }
            let (v, err) = d.integrate_with(
                |x: f64| {
                    if x <= 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        (z * x.ln()).exp()
                    }
                },
                z.re,
            )?;
            Ok(MellinValue {
                value: v,
                abs_error: err + 4.0 * f64::EPSILON * v.norm(),
            })
        }
    }
}

/// Product convolution with the default merge tolerance.
pub fn product_convolve(m1: &AtomicMeasure, m2: &AtomicMeasure) -> AtomicMeasure {
    product_convolve_with_tol(m1, m2, DEFAULT_MERGE_TOL)
}

/// Image of `m1 ⊗ m2` under `(s, t) ↦ st`.
pub fn product_convolve_with_tol(m1: &AtomicMeasure, m2: &AtomicMeasure, merge_tol: f64) -> AtomicMeasure {
    let mut atoms = Vec::with_capacity(m1.atoms.len() * m2.atoms.len());
    for &(x, w) in &m1.atoms {
        for &(y, v) in &m2.atoms {
            atoms.push((x * y, w * v));
        }
    }
    let (n1, n2) = (m1.total_mass(), m2.total_mass());
    let zero = m1.zero_mass * n2 + m2.zero_mass * n1 - m1.zero_mass * m2.zero_mass;
    let (t1, t2) = (m1.truncation_error, m2.truncation_error);
    AtomicMeasure::with_merge_tol(atoms, zero.max(0.0), t1 * (n2 + t2) + t2 * n1, merge_tol)
        .expect("product of valid measures is valid")
}

/// Maps available to [`pushforward`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PushMap {
    /// x ↦ e^{-βx}, β > 0
    NegExp(f64),
    /// x ↦ -log x
    NegLog,
    /// x ↦ γx, γ > 0
    Scale(f64),
}

/// Image measure of `m` under `map`. Weights are preserved.
pub fn pushforward(m: &AtomicMeasure, map: PushMap) -> Result<AtomicMeasure> {
    let f: Box<dyn Fn(f64) -> f64> = match map {
        PushMap::NegExp(beta) => {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::Domain(format!("e^(-βx) needs β > 0, got {beta}")));
            }
            Box::new(move |x: f64| (-beta * x).exp())
        }
        PushMap::NegLog => {
            if m.zero_mass > 0.0 {
                return Err(Error::Domain("-log is undefined at the atom at 0".into()));
            }
            if let Some(&(x, _)) = m.atoms.iter().find(|p| p.0 <= 0.0) {
                return Err(Error::Domain(format!("-log is undefined at location {x}")));
            }
            Box::new(|x: f64| -x.ln())
        }
        PushMap::Scale(gamma) => {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::Domain(format!("scaling needs γ > 0, got {gamma}")));
            }
            Box::new(move |x: f64| gamma * x)
        }
    };
    let mut atoms: Vec<(f64, f64)> = m.atoms.iter().map(|&(x, w)| (f(x), w)).collect();
    let mut zero = 0.0;
    if m.zero_mass > 0.0 {
        let image = f(0.0);
        if image == 0.0 {
            zero = m.zero_mass;
        } else {
            atoms.push((image, m.zero_mass));
        }
    }
    AtomicMeasure::new(atoms, zero, m.truncation_error)
}

/// JSON form of a measure: atoms for atomic measures, catalog identity for
/// densities.
pub fn to_json(m: &Measure) -> serde_json::Value {
    match m {
        Measure::Atomic(a) => serde_json::to_value(a).expect("atomic measures serialize"),
        Measure::Density(d) => serde_json::to_value(&d.id).expect("density ids serialize"),
    }
}

/// Reads either JSON form back; densities are rebuilt from the catalog.
pub fn from_json(v: &serde_json::Value) -> Result<Measure> {
    if v.get("atoms").is_some() {
        let a: AtomicMeasure =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(Measure::Atomic(a));
    }
    let id: DensityId = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    crate::catalog::density_from_id(&id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_density() -> Measure {
        let id = DensityId {
            density: "gamma".into(),
            params: BTreeMap::from([("a".to_string(), serde_json::json!(1.0))]),
        };
        DensityMeasure::new(|x: f64| (-x).exp(), (0.0, f64::INFINITY), QuadHint::ExponentialDecay, -1.0, id)
            .unwrap()
            .into()
    }

    #[test]
    fn dirac_moments_and_mellin() {
        let d = Measure::from(AtomicMeasure::dirac(1.0));
        assert_eq!(moment(&d, 5).unwrap().re(), 1.0);
        let z = Complex64::new(0.3, -2.0);
        assert!((mellin(&d, z).unwrap().value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn exponential_third_moment() {
        // oracle: midpoint rule on [0, 60] with 2e6 cells, independent of the
        // adaptive driver
        let cells = 2_000_000;
        let h = 60.0 / cells as f64;
        let oracle: f64 = (0..cells)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                x.powi(3) * (-x).exp() * h
            })
            .sum();
        assert!((oracle - 6.0).abs() < 1e-8);
        let m = moment(&exp_density(), 3).unwrap();
        assert!((m.re() - 6.0).abs() < 1e-10);
        assert!(m.abs_error < 1e-9);
    }

    #[test]
    fn gamma_one_mellin_half() {
        let v = mellin(&exp_density(), Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.value.re - 0.886_226_925_452_758).abs() < 1e-10);
        assert!(v.value.im.abs() < 1e-14);
    }

    #[test]
    fn mellin_outside_strip_is_domain_error() {
        let e = mellin(&exp_density(), Complex64::new(-1.5, 0.0)).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
    }

    #[test]
    fn product_of_diracs() {
        let p = product_convolve(&AtomicMeasure::dirac(2.0), &AtomicMeasure::dirac(0.25));
        assert_eq!(p.atoms(), &[(0.5, 1.0)]);
    }

    #[test]
    fn two_point_square_by_enumeration() {
        let q = 0.3;
        let m = AtomicMeasure::new(vec![(1.0, 0.5), (q, 0.5)], 0.0, 0.0).unwrap();
        let p = product_convolve(&m, &m);
        // enumeration of the four pairs: (1,1), (1,q), (q,1), (q,q)
        let want = [(q * q, 0.25), (q, 0.5), (1.0, 0.25)];
        assert_eq!(p.len(), 3);
        for (got, want) in p.atoms().iter().zip(want) {
            assert!((got.0 - want.0).abs() < 1e-15 && (got.1 - want.1).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_mass_combines_under_product() {
        let m1 = AtomicMeasure::new(vec![(2.0, 0.6)], 0.4, 0.0).unwrap();
        let m2 = AtomicMeasure::new(vec![(3.0, 0.7)], 0.3, 0.0).unwrap();
        let p = product_convolve(&m1, &m2);
        // P(product = 0) = 1 - 0.6 * 0.7
        assert!((p.zero_mass() - 0.58).abs() < 1e-15);
        assert!((p.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pushforward_examples() {
        let x = 3.5;
        let m = pushforward(&AtomicMeasure::dirac(x), PushMap::NegLog).unwrap();
        assert_eq!(m.atoms(), &[(-(x.ln()), 1.0)]);

        let q: f64 = 0.5;
        let lattice: Vec<(f64, f64)> = (0..5).map(|k| (k as f64 * (1.0 / q).ln(), 0.2)).collect();
        let tau = AtomicMeasure::new(lattice, 0.0, 0.0).unwrap();
        let mu = pushforward(&tau, PushMap::NegExp(1.0)).unwrap();
        for (k, &(loc, _)) in mu.atoms().iter().rev().enumerate() {
            assert!((loc - q.powi(k as i32)).abs() < 1e-15);
        }

        let base = Measure::from(AtomicMeasure::new(vec![(0.5, 0.5), (2.0, 0.5)], 0.0, 0.0).unwrap());
        let scaled = Measure::from(pushforward(base.as_atomic().unwrap(), PushMap::Scale(2.0)).unwrap());
        assert!((moment(&scaled, 1).unwrap().re() - 2.0 * moment(&base, 1).unwrap().re()).abs() < 1e-15);
    }

    #[test]
    fn pushforward_rejects_bad_input() {
        let m = AtomicMeasure::new(vec![(1.0, 1.0)], 0.5, 0.0).unwrap();
        assert!(pushforward(&m, PushMap::NegLog).is_err());
        assert!(pushforward(&m, PushMap::NegExp(0.0)).is_err());
        assert!(pushforward(&m, PushMap::Scale(-1.0)).is_err());
    }

    #[test]
    fn zero_mass_round_trip_through_log_images() {
        // an atom at 1 lands on the origin under -log and back on 1 under e^{-x}
        let m = AtomicMeasure::new(vec![(1.0, 0.25), (0.5, 0.75)], 0.0, 0.0).unwrap();
        let img = pushforward(&m, PushMap::NegLog).unwrap();
        assert_eq!(img.zero_mass(), 0.25);
        let back = pushforward(&img, PushMap::NegExp(1.0)).unwrap();
        assert_eq!(back.atoms(), m.atoms());
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(AtomicMeasure::new(vec![(1.0, -0.1)], 0.0, 0.0).is_err());
        assert!(AtomicMeasure::new(vec![(f64::NAN, 0.1)], 0.0, 0.0).is_err());
    }

    #[test]
    fn atomic_json_shape() {
        let m = AtomicMeasure::new(vec![(0.5, 0.25), (1.0, 0.75)], 0.0, 1e-15).unwrap();
        let v = to_json(&Measure::Atomic(m.clone()));
        assert_eq!(
            v,
            serde_json::json!({"atoms": [[0.5, 0.25], [1.0, 0.75]], "zero_mass": 0.0, "trunc_err": 1e-15})
        );
        let back = from_json(&v).unwrap();
        assert_eq!(back.as_atomic().unwrap(), &m);
    }

    #[test]
    fn mellin_of_truncated_measure_left_of_axis_is_refused() {
        let m = Measure::from(AtomicMeasure::new(vec![(0.5, 1.0)], 0.0, 1e-12).unwrap());
        assert!(mellin(&m, Complex64::new(-0.5, 0.0)).is_err());
        assert!(mellin(&m, Complex64::new(0.5, 1.0)).is_ok());
    }
}

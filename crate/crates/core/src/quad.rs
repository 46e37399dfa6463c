//! Quadrature on hemispheres, corner spheres and (half-)annuli, and
//! extrapolation of radius-indexed sequences.
//!
//! Spheres are parameterized by iterated spherical angles: a periodic
//! trapezoid rule in the azimuth and Gauss–Legendre in every polar angle,
//! with the Jacobian `sin^k θ` folded into the weights. The last polar angle
//! of a hemisphere runs over `[0, π/2]`, measured from the `x_n` axis.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{frame_at, Surface};
use crate::error::{Error, Result};
use crate::field::Backend;
use crate::geom::MetricField;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k > 0);
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_k
        let mut z = (PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(k, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(k, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    if k % 2 == 1 {
        x[k / 2] = 0.0;
    }
    (x, w)
}

/// `(P_k(z), P_k'(z))` by the three-term recurrence.
fn legendre(k: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if k == 0 { 1.0 } else { p1 };
    let dp = k as f64 * (z * p - p0) / (z * z - 1.0);
    (p, dp)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, k: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(k);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(x, w)| (a + h * (x + 1.0), h * w)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureRule {
    /// Nodes per polar angle.
    pub polar: usize,
    /// Azimuthal trapezoid points.
    pub azimuth: usize,
    /// Radial nodes per segment of an annulus.
    pub radial: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            polar: 48,
            azimuth: 96,
            radial: 32,
        }
    }
}

impl QuadratureRule {
    /// Defaults scaled down with dimension so node counts stay moderate.
    pub fn default_for(n: usize) -> Self {
        match n {
            0..=3 => Self::default(),
            4 => QuadratureRule {
                polar: 16,
                azimuth: 32,
                radial: 12,
            },
            _ => QuadratureRule {
                polar: 12,
                azimuth: 24,
                radial: 12,
            },
        }
    }

    /// Orders used for volume integrals: half the angular and radial orders (at least 4 of each).
    pub fn volume(self) -> Self {
        QuadratureRule {
            polar: (self.polar / 2).max(4),
            azimuth: (self.azimuth / 2).max(4),
            radial: (self.radial / 2).max(4),
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        let s = |k: usize| ((k as f64 * factor).round() as usize).max(2);
        QuadratureRule {
            polar: s(self.polar),
            azimuth: s(self.azimuth),
            radial: s(self.radial),
        }
    }

    /// Unit-sphere nodes of `S^k ⊂ R^{k+1}` with weights summing to its area.
    pub fn sphere(&self, k: usize) -> Vec<(Vec<f64>, f64)> {
        assert!(k >= 1);
        if k == 1 {
            let m = self.azimuth;
            let w = 2.0 * PI / m as f64;
            return (0..m)
                .map(|j| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    (vec![t.cos(), t.sin()], w)
                })
                .collect();
        }
        let inner = self.sphere(k - 1);
        let mut out = Vec::with_capacity(inner.len() * self.polar);
        for (t, wt) in gauss_legendre_on(0.0, PI, self.polar) {
            let (s, c) = t.sin_cos();
            let jac = wt * s.powi(k as i32 - 1);
            for (y, wy) in &inner {
                let mut p: Vec<f64> = y.iter().map(|v| v * s).collect();
                p.push(c);
                out.push((p, jac * wy));
            }
        }
        out
    }

    /// Unit upper hemisphere of `S^{n−1}`: `x_n ≥ 0`.
    pub fn hemisphere(&self, n: usize) -> Vec<(Vec<f64>, f64)> {
        assert!(n >= 2);
        let equator: Vec<(Vec<f64>, f64)> = if n == 2 {
            vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)]
        } else {
            self.sphere(n - 2)
        };
        let mut out = Vec::with_capacity(equator.len() * self.polar);
        for (t, wt) in gauss_legendre_on(0.0, 0.5 * PI, self.polar) {
            let (s, c) = t.sin_cos();
            let jac = wt * s.powi(n as i32 - 2);
            for (y, wy) in &equator {
                let mut p: Vec<f64> = y.iter().map(|v| v * s).collect();
                p.push(c);
                out.push((p, jac * wy));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PatchKind {
    /// `{|x| = r, x_n ≥ 0}`
    Hemisphere { r: f64 },
    /// `{|x| = r, x_n = 0}`
    Corner { r: f64 },
    /// `{inner ≤ |x| ≤ outer, x_n = 0}`; the radial rule is applied on each
    /// segment between consecutive entries of `radii`.
    BoundaryAnnulus { radii: Vec<f64> },
    /// `{inner ≤ |x| ≤ outer, x_n ≥ 0}`
    HalfAnnulus { radii: Vec<f64> },
}

/// A patch of the chart; radii are chart radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    pub n: usize,
    pub kind: PatchKind,
}

impl SurfacePatch {
    pub fn hemisphere(n: usize, r: f64) -> Self {
        SurfacePatch {
            n,
            kind: PatchKind::Hemisphere { r },
        }
    }
    pub fn corner(n: usize, r: f64) -> Self {
        SurfacePatch {
            n,
            kind: PatchKind::Corner { r },
        }
    }
    pub fn boundary_annulus(n: usize, radii: Vec<f64>) -> Self {
        SurfacePatch {
            n,
            kind: PatchKind::BoundaryAnnulus { radii },
        }
    }
    pub fn half_annulus(n: usize, radii: Vec<f64>) -> Self {
        SurfacePatch {
            n,
            kind: PatchKind::HalfAnnulus { radii },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("invalid patch: {msg}")));
        if self.n < 2 {
            return bad("dimension must be at least 2");
        }
        match &self.kind {
            PatchKind::Hemisphere { r } | PatchKind::Corner { r } => {
                if !(r.is_finite() && *r > 0.0) {
                    return bad("radius must be positive");
                }
                if matches!(self.kind, PatchKind::Corner { .. }) && self.n < 3 {
                    return bad("corner spheres need n ≥ 3");
                }
            }
            PatchKind::BoundaryAnnulus { radii } | PatchKind::HalfAnnulus { radii } => {
                if radii.len() < 2 || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("annulus radii must be positive and strictly increasing");
                }
            }
        }
        Ok(())
    }

    /// Quadrature nodes with Euclidean (chart) weights.
    pub fn nodes(&self, rule: &QuadratureRule) -> Result<Vec<(Vec<f64>, f64)>> {
        self.validate()?;
        let n = self.n;
        let scale = |nodes: Vec<(Vec<f64>, f64)>, r: f64, dim: usize, pad: bool| {
            nodes
                .into_iter()
                .map(move |(p, w)| {
                    let mut q: Vec<f64> = p.iter().map(|v| v * r).collect();
                    if pad {
                        q.push(0.0);
                    }
                    (q, w * r.powi(dim as i32))
                })
                .collect::<Vec<_>>()
        };
        let radial = |radii: &[f64]| -> Vec<(f64, f64)> {
            radii
                .windows(2)
                .flat_map(|w| gauss_legendre_on(w[0], w[1], rule.radial))
                .collect()
        };
        Ok(match &self.kind {
            PatchKind::Hemisphere { r } => scale(rule.hemisphere(n), *r, n - 1, false),
            PatchKind::Corner { r } => scale(rule.sphere(n - 2), *r, n - 2, true),
            PatchKind::BoundaryAnnulus { radii } => {
                let unit = rule.sphere(n - 2);
                radial(radii)
                    .into_iter()
                    .flat_map(|(t, wt)| scale(unit.clone(), t, n - 2, true).into_iter().map(move |(p, w)| (p, w * wt)))
                    .collect()
            }
            PatchKind::HalfAnnulus { radii } => {
                let unit = rule.hemisphere(n);
                radial(radii)
                    .into_iter()
                    .flat_map(|(t, wt)| scale(unit.clone(), t, n - 1, false).into_iter().map(move |(p, w)| (p, w * wt)))
                    .collect()
            }
        })
    }

    /// Surface carrying the nodes, for frames and area elements; `None` for
    /// the solid half-annulus.
    pub fn surface(&self) -> Option<Surface> {
        match &self.kind {
            PatchKind::Hemisphere { r } => Some(Surface::Hemisphere { r: *r }),
            PatchKind::Corner { r } => Some(Surface::Corner { r: *r }),
            PatchKind::BoundaryAnnulus { .. } => Some(Surface::Boundary),
            PatchKind::HalfAnnulus { .. } => None,
        }
    }
}

/// Volume or area element to integrate against.
#[derive(Clone, Copy)]
pub enum Measure<'a> {
    /// The Euclidean element of the chart.
    Euclidean,
    /// The element induced by a metric (reference or physical).
    Metric(&'a MetricField),
}

/// Ratio of the metric's element to the Euclidean one at a node.
pub fn density(measure: Measure, patch: &SurfacePatch, p: &[f64]) -> Result<f64> {
    match measure {
        Measure::Euclidean => Ok(1.0),
        Measure::Metric(g) => {
            let geo = g.connection(p)?;
            Ok(match patch.surface() {
                Some(s) => frame_at(&geo, s, p).area_density,
                None => geo.sqrt_det,
            })
        }
    }
}

/// `Σ_q w_q f(p_q)` for a vector-valued integrand of fixed length, summed in
/// node order (deterministic regardless of thread count).
pub fn integrate_vec<F>(f: F, len: usize, patch: &SurfacePatch, rule: &QuadratureRule, measure: Measure) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let nodes = patch.nodes(rule)?;
    let vals: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|(p, w)| {
            let v = f(p)?;
            if v.len() != len {
                return Err(Error::Dimension { expected: len, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    what: "integrand",
                    point: p.clone(),
                });
            }
            let d = density(measure, patch, p)?;
            Ok(v.into_iter().map(|x| x * w * d).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; len];
    for v in vals {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    Ok(out)
}

pub fn integrate_surface<F>(f: F, patch: &SurfacePatch, rule: &QuadratureRule, measure: Measure) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if matches!(patch.kind, PatchKind::HalfAnnulus { .. } | PatchKind::BoundaryAnnulus { .. }) {
        return Err(Error::Incompatible("annuli are integrated with integrate_bulk".into()));
    }
    Ok(integrate_vec(|p| Ok(vec![f(p)?]), 1, patch, rule, measure)?[0])
}

pub fn integrate_bulk<F>(f: F, patch: &SurfacePatch, rule: &QuadratureRule, measure: Measure) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if !matches!(patch.kind, PatchKind::HalfAnnulus { .. } | PatchKind::BoundaryAnnulus { .. }) {
        return Err(Error::Incompatible("spheres are integrated with integrate_surface".into()));
    }
    Ok(integrate_vec(|p| Ok(vec![f(p)?]), 1, patch, rule, measure)?[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    /// `Q(r) = Q_∞ + A r^{−p}` on a geometric ladder.
    PowerLaw,
    /// `Q(ρ) = Q_∞ + A e^{−pρ}` on an arithmetic ladder.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    pub error: f64,
    pub rate: Option<f64>,
    /// Extrapolant from the triple ending at each sample (`None` for the first two).
    pub running: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// Differences below this (relative to the sample scale) count as converged.
const CONVERGED_REL: f64 = 1e-13;
/// Oscillations below this (relative) are treated as evaluation noise.
const NOISE_REL: f64 = 1e-7;

/// Aitken Δ² on one triple; `None` when the differences do not contract.
fn aitken(s: &[(f64, f64)], model: DecayModel) -> (Option<f64>, Option<f64>) {
    let d0 = s[1].1 - s[0].1;
    let d1 = s[2].1 - s[1].1;
    let scale = s.iter().fold(1.0f64, |m, q| m.max(q.1.abs()));
    if d0.abs() <= CONVERGED_REL * scale && d1.abs() <= CONVERGED_REL * scale {
        return (Some(s[2].1), None);
    }
    if d0 == 0.0 || d1 == d0 {
        return (None, None);
    }
    let ratio = d1 / d0;
    let limit = s[2].1 - d1 * d1 / (d1 - d0);
    let rate = if ratio > 0.0 && ratio < 1.0 {
        Some(match model {
            DecayModel::PowerLaw => -ratio.ln() / (s[2].0 / s[1].0).ln(),
            DecayModel::Exponential => -ratio.ln() / (s[2].0 - s[1].0),
        })
    } else {
        None
    };
    if ratio >= 1.0 || ratio <= -1.0 {
        return (None, rate);
    }
    (Some(limit), rate)
}

/// Aitken extrapolation of the last triple, repeated once on the sequence of
/// extrapolants when at least five samples are available and the second
/// pass is a refinement (its correction no larger than the first pass spread).
pub fn extrapolate(samples: &[(f64, f64)], model: DecayModel) -> Result<Extrapolation> {
    if samples.len() < 3 {
        return Err(Error::Arity {
            needed: 3,
            got: samples.len(),
        });
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Config("radii must be strictly increasing".into()));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::NonFinite {
            what: "sample",
            point: samples.iter().map(|s| s.0).collect(),
        });
    }
    let mut running = vec![None, None];
    let mut rates = vec![None, None];
    for k in 2..samples.len() {
        let (l, r) = aitken(&samples[k - 2..=k], model);
        running.push(l);
        rates.push(r);
    }
    let mut warnings = Vec::new();
    let k = samples.len();
    let last = samples[k - 1].1;
    let scale = samples.iter().fold(1.0f64, |m, q| m.max(q.1.abs()));
    let (mut limit, mut error) = match running[k - 1] {
        Some(a) => {
            let err = match running[k - 2] {
                Some(b) => (a - b).abs(),
                None => (a - last).abs(),
            };
            (a, err)
        }
        None => {
            let d = (last - samples[k - 2].1).abs();
            if d > NOISE_REL * scale {
                warnings.push("differences do not contract; limit is the last sample".into());
            }
            (last, d)
        }
    };
    if k >= 5 && running[2..].iter().all(Option::is_some) {
        let first: Vec<(f64, f64)> = samples[2..].iter().zip(&running[2..]).map(|(s, a)| (s.0, a.unwrap())).collect();
        let second: Vec<Option<f64>> = (2..first.len()).map(|j| aitken(&first[j - 2..=j], model).0).collect();
        if let Some(Some(b)) = second.last() {
            let correction = (b - limit).abs();
            if correction <= error {
                let spread = match second.len() {
                    1 => correction,
                    m => second[m - 2].map_or(correction, |p| (b - p).abs().max(correction)),
                };
                limit = *b;
                error = spread;
            }
        }
    }
    // oscillating tail: differences changing sign above the noise level
    let diffs: Vec<f64> = samples.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let tail = &diffs[diffs.len().saturating_sub(3)..];
    let oscillating = tail
        .windows(2)
        .any(|w| w[0] * w[1] < 0.0 && w[0].abs().max(w[1].abs()) > (NOISE_REL * scale).max(error));
    if oscillating {
        let widen = tail.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        warnings.push(format!("oscillating tail; error widened to {widen:e}"));
        error = error.max(widen);
    }
    Ok(Extrapolation {
        limit,
        error,
        rate: rates[k - 1],
        running,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub value: f64,
}

/// Conventions every number depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub second_fundamental_form: String,
    pub static_operator: String,
    pub hyperbolic_chart: String,
    pub backend: Backend,
    pub rule: QuadratureRule,
    pub extrapolation: DecayModel,
}

impl Conventions {
    pub fn new(backend: Backend, rule: QuadratureRule, extrapolation: DecayModel) -> Self {
        Conventions {
            second_fundamental_form: "II(X,Y) = <D_X Y, inward normal>, H = tr II; contracted Codazzi residual checked".into(),
            static_operator: "Hess w - (tr Hess w) g - w Ric (hyperbolic potentials satisfy Hess W = W b)".into(),
            hyperbolic_chart: "Poincare half-ball, x = tanh(rho/2) theta".into(),
            backend,
            rule,
            extrapolation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub functional: String,
    pub samples: Vec<Sample>,
    pub limit: f64,
    pub error: f64,
    pub rate: Option<f64>,
    pub running: Vec<Option<f64>>,
    pub conventions: Conventions,
    pub warnings: Vec<String>,
    pub flagged: bool,
}

impl MassReport {
    pub fn from_samples(functional: &str, samples: Vec<Sample>, conventions: Conventions) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.value)).collect();
        let ex = extrapolate(&pairs, conventions.extrapolation)?;
        let flagged = !ex.warnings.is_empty();
        Ok(MassReport {
            functional: functional.to_string(),
            samples,
            limit: ex.limit,
            error: ex.error,
            rate: ex.rate,
            running: ex.running,
            conventions,
            warnings: ex.warnings,
            flagged,
        })
    }

    /// Divides values, limit and error by `s` (center of mass normalization).
    pub fn scaled(mut self, s: f64) -> Self {
        for x in &mut self.samples {
            x.value *= s;
        }
        for r in self.running.iter_mut().flatten() {
            *r *= s;
        }
        self.limit *= s;
        self.error *= s.abs();
        self
    }

    pub fn flag(&mut self, warning: String) {
        self.warnings.push(warning);
        self.flagged = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::sphere_volume;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        for deg in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}");
        }
        let (x, w) = gauss_legendre(48);
        assert!(w.iter().all(|w| *w > 0.0));
        assert!(x.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn areas_and_volumes() {
        let rule = QuadratureRule::default();
        for n in 3..=5 {
            let rule = QuadratureRule::default_for(n).min_for_test();
            let r = 2.5;
            let hemi = integrate_surface(|_| Ok(1.0), &SurfacePatch::hemisphere(n, r), &rule, Measure::Euclidean).unwrap();
            let exact = 0.5 * sphere_volume(n) * r.powi(n as i32 - 1);
            assert!((hemi / exact - 1.0).abs() < 1e-12, "n={n}");
            let corner = integrate_surface(|_| Ok(1.0), &SurfacePatch::corner(n, r), &rule, Measure::Euclidean).unwrap();
            let exact = sphere_volume(n - 1) * r.powi(n as i32 - 2);
            assert!((corner / exact - 1.0).abs() < 1e-12, "n={n}");
        }
        let c = integrate_surface(|_| Ok(1.0), &SurfacePatch::corner(3, 3.0), &rule, Measure::Euclidean).unwrap();
        assert!((c - 6.0 * PI).abs() < 1e-12);
        let v = integrate_bulk(|_| Ok(1.0), &SurfacePatch::half_annulus(3, vec![1.0, 2.0]), &rule, Measure::Euclidean).unwrap();
        assert!((v - 14.0 * PI / 3.0).abs() < 1e-12);
        let a = integrate_bulk(|_| Ok(1.0), &SurfacePatch::boundary_annulus(3, vec![1.0, 1.5, 2.0]), &rule, Measure::Euclidean).unwrap();
        assert!((a - 3.0 * PI).abs() < 1e-12);
    }

    impl QuadratureRule {
        fn min_for_test(self) -> Self {
            QuadratureRule {
                polar: self.polar.min(16),
                azimuth: self.azimuth.min(24),
                radial: self.radial,
            }
        }
    }

    #[test]
    fn hemisphere_nodes_stay_in_the_half_space() {
        let rule = QuadratureRule {
            polar: 5,
            azimuth: 7,
            radial: 3,
        };
        for (p, w) in rule.hemisphere(4) {
            assert!(p[3] > 0.0 && w > 0.0);
            assert!((crate::jet::norm2(&p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn polynomial_moments_on_the_hemisphere() {
        // ∫ x_3² over the unit upper hemisphere of S² is 2π/3; ∫ x_1 is 0
        let rule = QuadratureRule::default();
        let patch = SurfacePatch::hemisphere(3, 1.0);
        let m2 = integrate_surface(|p| Ok(p[2] * p[2]), &patch, &rule, Measure::Euclidean).unwrap();
        assert!((m2 - 2.0 * PI / 3.0).abs() < 1e-13);
        let m1 = integrate_surface(|p| Ok(p[0]), &patch, &rule, Measure::Euclidean).unwrap();
        assert!(m1.abs() < 1e-14);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let rule = QuadratureRule::default();
        let err = integrate_surface(|p| Ok(if p[0] > 0.9 { f64::NAN } else { 1.0 }), &SurfacePatch::hemisphere(3, 1.0), &rule, Measure::Euclidean);
        match err {
            Err(Error::NonFinite { what: "integrand", point }) => assert!(point[0] > 0.9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extrapolation_examples() {
        let c = extrapolate(&[(4.0, 5.0), (8.0, 5.0), (16.0, 5.0)], DecayModel::PowerLaw).unwrap();
        assert_eq!(c.limit, 5.0);
        assert_eq!(c.error, 0.0);
        let p = extrapolate(&[(4.0, 2.25), (8.0, 2.125), (16.0, 2.0625)], DecayModel::PowerLaw).unwrap();
        assert!((p.limit - 2.0).abs() < 1e-14);
        assert!((p.rate.unwrap() - 1.0).abs() < 1e-12);
        let e: Vec<(f64, f64)> = (0..4).map(|k| (3.0 + k as f64, 1.0 + 0.5 * (-(3.0 + k as f64) * 1.5f64).exp())).collect();
        let x = extrapolate(&e, DecayModel::Exponential).unwrap();
        assert!((x.limit - 1.0).abs() < 1e-14);
        assert!((x.rate.unwrap() - 1.5).abs() < 1e-9);
        assert!(matches!(extrapolate(&[(1.0, 1.0), (2.0, 1.0)], DecayModel::PowerLaw), Err(Error::Arity { needed: 3, got: 2 })));
    }

    #[test]
    fn oscillation_widens_the_error() {
        let s = [(4.0, 1.0), (8.0, 1.2), (16.0, 0.9), (32.0, 1.1)];
        let x = extrapolate(&s, DecayModel::PowerLaw).unwrap();
        assert!(!x.warnings.is_empty());
        assert!(x.error >= 0.2);
    }
}

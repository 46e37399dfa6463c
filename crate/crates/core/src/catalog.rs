//! The admissible example metrics.
//!
//! Every entry provides its perturbation `e = g − reference` as an exact
//! expression, so that neither derivatives nor the perturbation itself suffer
//! from cancellation at large radius.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::asym::{conformal_factor, identity, ChargeContext, Model};
use crate::error::{Error, Result};
use crate::field::{Backend, FieldExpr, FieldRef, Shape, SumField};
use crate::geom::{MetricField, Role};
use crate::jet::{norm2, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Optional; must match the entry's model when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
}

impl MetricSpec {
    pub fn new(name: &str, n: usize) -> Self {
        MetricSpec {
            name: name.to_string(),
            n,
            params: BTreeMap::new(),
            model: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub model: Model,
    pub summary: &'static str,
    /// Parameter names with their defaults; `a` stands for `a1 … a{n-1}`.
    pub params: &'static [(&'static str, &'static str)],
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "euclidean_half",
        model: Model::Flat,
        summary: "flat half-space, g = δ",
        params: &[("rot", "0")],
    },
    CatalogEntry {
        name: "schwarzschild_half",
        model: Model::Flat,
        summary: "g = (1 + m/(2|x−a|^(n−2)))^(4/(n−2)) δ with a on the boundary",
        params: &[("m", "1"), ("a", "0"), ("rot", "0")],
    },
    CatalogEntry {
        name: "conformal_flat",
        model: Model::Flat,
        summary: "two-pole conformal factor u = 1 + m1/(2|x|^(n−2)) + m2/(2|x−sep e1|^(n−2)), g = u^(4/(n−2)) δ",
        params: &[("m1", "1"), ("m2", "0.5"), ("sep", "1"), ("rot", "0")],
    },
    CatalogEntry {
        name: "generic_perturbation",
        model: Model::Flat,
        summary: "Schwarzschild plus a boundary-preserving gauge term of order r^(−tau) with nonzero normal-tangential components",
        params: &[("m", "1"), ("amp", "0.3"), ("tau", "(n-2)/2 + 0.3"), ("rot", "0")],
    },
    CatalogEntry {
        name: "hyperbolic_half",
        model: Model::Hyperbolic,
        summary: "upper half of the Poincaré ball, g = b",
        params: &[("rot", "0")],
    },
    CatalogEntry {
        name: "ads_schwarzschild_half",
        model: Model::Hyperbolic,
        summary: "g = (1 + s² − 2m s^(2−n))^(−1) ds² + s² h0 on the half model",
        params: &[("m", "1")],
    },
    CatalogEntry {
        name: "hyp_perturbation",
        model: Model::Hyperbolic,
        summary: "anisotropic perturbation with frame components of order e^(−sigma ρ)",
        params: &[("m", "0"), ("amp", "0.5"), ("sigma", "n"), ("rot", "0")],
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownMetric(name.to_string()))
}

/// A catalog metric ready for evaluation.
#[derive(Clone)]
pub struct CatalogMetric {
    pub spec: MetricSpec,
    pub model: Model,
    pub physical: MetricField,
    pub reference: MetricField,
    pub perturbation: FieldRef,
    /// Declared decay exponent (power of `r` for flat, of `e^ρ` for hyperbolic).
    pub decay_tau: f64,
    /// Whether the odd-part parity conditions needed for the center of mass hold.
    pub parity: bool,
}

impl CatalogMetric {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.physical = self.physical.with_backend(backend);
        self.reference = self.reference.with_backend(backend);
        self
    }

    pub fn charge_context(&self, weight_index: usize) -> ChargeContext {
        ChargeContext::new(
            self.physical.clone(),
            self.reference.clone(),
            crate::asym::weight_field(self.model, self.n(), weight_index),
        )
        .with_perturbation(self.perturbation.clone())
        .with_decay(self.decay_tau)
    }
}

struct Params<'a> {
    spec: &'a MetricSpec,
    allowed: Vec<String>,
}

impl<'a> Params<'a> {
    fn new(spec: &'a MetricSpec, entry: &CatalogEntry) -> Self {
        let mut allowed = Vec::new();
        for (k, _) in entry.params {
            if *k == "a" {
                allowed.extend((1..=spec.n).map(|i| format!("a{i}")));
            } else {
                allowed.push(k.to_string());
            }
        }
        Params { spec, allowed }
    }

    fn check_known(&self) -> Result<()> {
        for k in self.spec.params.keys() {
            if !self.allowed.contains(k) {
                return Err(Error::Config(format!(
                    "unknown parameter `{k}` for {} (known: {})",
                    self.spec.name,
                    self.allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.spec.params.get(key).copied().unwrap_or(default);
        if !v.is_finite() {
            return Err(Error::Inadmissible(format!("parameter {key} must be finite")));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default)?;
        if v <= 0.0 {
            return Err(Error::Inadmissible(format!("parameter {key} = {v} must be positive")));
        }
        Ok(v)
    }

    fn nonnegative(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default)?;
        if v < 0.0 {
            return Err(Error::Inadmissible(format!("parameter {key} = {v} must be nonnegative")));
        }
        Ok(v)
    }
}

/// Builds a catalog metric and runs its admission checks.
pub fn build(spec: &MetricSpec) -> Result<CatalogMetric> {
    let metric = build_unchecked(spec)?;
    crate::verify::admit(&metric)?;
    Ok(metric)
}

/// Builds a catalog metric after parameter validation only.
pub fn build_unchecked(spec: &MetricSpec) -> Result<CatalogMetric> {
    let entry = entry(&spec.name)?;
    let n = spec.n;
    if !(3..=crate::jet::MAX_DIM).contains(&n) {
        return Err(Error::Inadmissible(format!(
            "dimension n = {n} outside the supported range 3..={}",
            crate::jet::MAX_DIM
        )));
    }
    if let Some(m) = spec.model {
        if m != entry.model {
            return Err(Error::Incompatible(format!("{} is a {:?} metric, not {:?}", entry.name, entry.model, m)));
        }
    }
    let p = Params::new(spec, entry);
    p.check_known()?;
    let rot = p.get("rot", 0.0)?;
    let nf = n as f64;
    let threshold = entry.model.decay_threshold(n);

    let (e, decay_tau, parity): (Option<FieldRef>, f64, bool) = match entry.name {
        "euclidean_half" | "hyperbolic_half" => (None, f64::INFINITY, true),
        "schwarzschild_half" => {
            let m = p.positive("m", 1.0)?;
            if spec.params.get(&format!("a{n}")).is_some_and(|v| *v != 0.0) {
                return Err(Error::Inadmissible(format!(
                    "translation must be tangent to the boundary (a{n} must be 0)"
                )));
            }
            let mut a = vec![0.0; n];
            for (i, ai) in a.iter_mut().enumerate().take(n - 1) {
                *ai = p.get(&format!("a{}", i + 1), 0.0)?;
            }
            let e = ConformalPerturbation::new(PoleSum::new(n, vec![(m, a)]));
            (Some(rotated(e, rot)), nf - 2.0, true)
        }
        "conformal_flat" => {
            let m1 = p.nonnegative("m1", 1.0)?;
            let m2 = p.nonnegative("m2", 0.5)?;
            let sep = p.get("sep", 1.0)?;
            let mut c = vec![0.0; n];
            c[0] = sep;
            let e = ConformalPerturbation::new(PoleSum::new(n, vec![(m1, vec![0.0; n]), (m2, c)]));
            (Some(rotated(e, rot)), nf - 2.0, false)
        }
        "generic_perturbation" => {
            let m = p.nonnegative("m", 1.0)?;
            let amp = p.get("amp", 0.3)?;
            let tau = p.get("tau", threshold + 0.3)?;
            if tau <= threshold {
                return Err(Error::Inadmissible(format!(
                    "decay exponent tau = {tau} does not exceed the threshold (n-2)/2 = {threshold}"
                )));
            }
            let e = GaugePerturbation {
                base: ConformalPerturbation::new(PoleSum::new(n, vec![(m, vec![0.0; n])])),
                amp,
                tau,
            };
            (Some(rotated(e, rot)), tau.min(nf - 2.0), false)
        }
        "ads_schwarzschild_half" => {
            let m = p.positive("m", 1.0)?;
            (Some(Arc::new(AdsSchwarzschildPerturbation { n, m }) as FieldRef), nf, true)
        }
        "hyp_perturbation" => {
            let m = p.nonnegative("m", 0.0)?;
            let amp = p.get("amp", 0.5)?;
            let sigma = p.get("sigma", nf)?;
            if sigma <= threshold {
                return Err(Error::Inadmissible(format!(
                    "decay rate sigma = {sigma} does not exceed the threshold n/2 = {threshold}"
                )));
            }
            let e = HypPerturbation {
                n,
                amp,
                sigma,
                ads: (m > 0.0).then_some(AdsSchwarzschildPerturbation { n, m }),
            };
            let tau = if m > 0.0 { sigma.min(nf) } else { sigma };
            (Some(rotated(e, rot)), tau, false)
        }
        other => return Err(Error::UnknownMetric(other.to_string())),
    };

    let reference = entry.model.reference(n);
    let (physical, perturbation) = match e {
        Some(e) => {
            let g: FieldRef = Arc::new(SumField {
                a: reference.field().clone(),
                b: e.clone(),
            });
            (MetricField::new(g, Role::Physical), e)
        }
        None => (
            MetricField::new(reference.field().clone(), Role::Physical),
            Arc::new(ZeroTensor { n }) as FieldRef,
        ),
    };
    Ok(CatalogMetric {
        spec: spec.clone(),
        model: entry.model,
        physical,
        reference,
        perturbation,
        decay_tau,
        parity,
    })
}

fn rotated<E: FieldExpr + 'static>(e: E, angle: f64) -> FieldRef {
    if angle == 0.0 {
        Arc::new(e)
    } else {
        Arc::new(Rotated::new(e, angle))
    }
}

pub struct ZeroTensor {
    pub n: usize,
}

impl FieldExpr for ZeroTensor {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, _x: &[T]) -> Vec<T> {
        vec![T::zero(); self.n * self.n]
    }
}

/// `u = 1 + Σ_k m_k / (2 |x − c_k|^{n−2})`
#[derive(Clone, Debug)]
pub struct PoleSum {
    pub n: usize,
    pub poles: Vec<(f64, Vec<f64>)>,
}

impl PoleSum {
    pub fn new(n: usize, poles: Vec<(f64, Vec<f64>)>) -> Self {
        PoleSum { n, poles }
    }
}

impl FieldExpr for PoleSum {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Scalar
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut u = T::one();
        for (m, c) in &self.poles {
            if *m == 0.0 {
                continue;
            }
            let d2 = x.iter().zip(c).fold(T::zero(), |acc, (&xi, &ci)| {
                let d = xi - ci;
                acc + d * d
            });
            u += d2.powf(-(self.n as f64 - 2.0) / 2.0) * (0.5 * m);
        }
        vec![u]
    }
}

/// `e = (u^{4/(n−2)} − 1) δ` for a positive scalar expression `u`.
pub struct ConformalPerturbation<U> {
    pub u: U,
}

impl<U: FieldExpr> ConformalPerturbation<U> {
    pub fn new(u: U) -> Self {
        assert_eq!(u.shape(), Shape::Scalar);
        ConformalPerturbation { u }
    }
}

impl<U: FieldExpr> FieldExpr for ConformalPerturbation<U> {
    fn dim(&self) -> usize {
        self.u.dim()
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        let u = self.u.eval_generic(x)[0];
        identity(n, u.powf(4.0 / (n as f64 - 2.0)) - 1.0)
    }
}

/// The metric `u^{4/(n−2)} δ` for a user-supplied conformal factor.
pub fn conformal_flat<U: FieldExpr + 'static>(u: U) -> (MetricField, FieldRef) {
    let n = u.dim();
    let e: FieldRef = Arc::new(ConformalPerturbation::new(u));
    let g = SumField {
        a: Model::Flat.reference(n).field().clone(),
        b: e.clone(),
    };
    (MetricField::new(Arc::new(g), Role::Physical), e)
}

/// `base + L_Z δ` with `Z_j = amp · x_n r^{−τ} q_j(x/r)`; `Z` vanishes on the
/// boundary, so the chart change it generates preserves it, while
/// `e_{nα} = amp r^{−τ} q_α` there.
pub struct GaugePerturbation<B> {
    pub base: B,
    pub amp: f64,
    pub tau: f64,
}

impl<B> GaugePerturbation<B> {
    /// `q_j = c_j + Σ_k B_jk x_k / r`
    fn profile(n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        let mut b = vec![vec![0.0; n]; n];
        b[0][1] = 1.0;
        b[1][0] = 0.5;
        b[n - 1][n - 1] = 0.3;
        (c, b)
    }
}

impl<B: FieldExpr> FieldExpr for GaugePerturbation<B> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        let (c, b) = Self::profile(n);
        let r2 = norm2(x);
        let r = r2.sqrt();
        let rinv = r.recip();
        let rt = r.powf(-self.tau);
        let xn = x[n - 1];
        let f = xn * rt;
        let bx: Vec<T> = (0..n)
            .map(|j| (0..n).fold(T::zero(), |acc, k| acc + x[k] * b[j][k]))
            .collect();
        let q: Vec<T> = (0..n).map(|j| bx[j] * rinv + c[j]).collect();
        // dz[i][j] = ∂_i Z_j
        let mut dz = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            let mut df = x[i] * xn * rt * rinv * rinv * (-self.tau);
            if i == n - 1 {
                df += rt;
            }
            for j in 0..n {
                let dq = rinv * b[j][i] - bx[j] * x[i] * rinv * rinv * rinv;
                dz[i][j] = (df * q[j] + f * dq) * self.amp;
            }
        }
        let mut e = self.base.eval_generic(x);
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] += dz[i][j] + dz[j][i];
            }
        }
        e
    }
}

/// `e = ψ(ξ) x_i x_j / ξ²` with `ψ = (F − F_b)(ds/dξ)²`, `ξ = |x|`,
/// `s = 2ξ/(1−ξ²)`.
pub struct AdsSchwarzschildPerturbation {
    pub n: usize,
    pub m: f64,
}

impl FieldExpr for AdsSchwarzschildPerturbation {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        let xi2 = norm2(x);
        let xi = xi2.sqrt();
        let q = (-xi2 + 1.0).recip();
        let s = xi * q * 2.0;
        let ds = (xi2 + 1.0) * q * q * 2.0;
        let one_s2 = s * s + 1.0;
        let lead = s.powi(2 - n as i32) * (2.0 * self.m);
        let df = lead / (one_s2 * (one_s2 - lead));
        let psi = df * ds * ds / xi2;
        let mut e = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = psi * x[i] * x[j];
            }
        }
        e
    }
}

/// `e = amp φ² W_0^{−σ} S(x/|x|)` with a fixed anisotropic profile `S`,
/// optionally on top of AdS-Schwarzschild.
pub struct HypPerturbation {
    pub n: usize,
    pub amp: f64,
    pub sigma: f64,
    pub ads: Option<AdsSchwarzschildPerturbation>,
}

impl FieldExpr for HypPerturbation {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        let xi2 = norm2(x);
        let xi = xi2.sqrt();
        let phi = conformal_factor(x);
        let w0 = (xi2 + 1.0) / (-xi2 + 1.0);
        let scale = phi * phi * w0.powf(-self.sigma) * self.amp;
        let u: Vec<T> = x.iter().map(|&v| v / xi).collect();
        let mut e = match &self.ads {
            Some(a) => a.eval_generic(x),
            None => vec![T::zero(); n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut s = u[i] * u[j] * 0.8;
                if i == j {
                    s = s + 0.5;
                }
                if j == n - 1 {
                    s += u[i] * 0.6;
                }
                if i == n - 1 {
                    s += u[j] * 0.6;
                }
                if (i, j) == (0, 1) || (i, j) == (1, 0) {
                    s += u[0] * 0.4;
                }
                e[i * n + j] += scale * s;
            }
        }
        e
    }
}

/// Pullback of a scalar or symmetric 2-tensor field under the rotation by
/// `angle` in the `x_1 x_2` plane, `x ↦ R x`. The reference metrics are
/// invariant, so this is a change of chart preserving the boundary.
pub struct Rotated<E> {
    pub inner: E,
    pub cos: f64,
    pub sin: f64,
}

impl<E: FieldExpr> Rotated<E> {
    pub fn new(inner: E, angle: f64) -> Self {
        assert!(inner.dim() >= 3);
        Rotated {
            inner,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    /// `R x`
    pub fn forward<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut y = x.to_vec();
        y[0] = x[0] * self.cos - x[1] * self.sin;
        y[1] = x[0] * self.sin + x[1] * self.cos;
        y
    }

    /// `Rᵀ x`
    pub fn backward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        y[0] = x[0] * self.cos + x[1] * self.sin;
        y[1] = -x[0] * self.sin + x[1] * self.cos;
        y
    }
}

impl<E: FieldExpr> FieldExpr for Rotated<E> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn shape(&self) -> Shape {
        self.inner.shape()
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let v = self.inner.eval_generic(&self.forward(x));
        match self.shape() {
            Shape::Scalar => v,
            Shape::Vector => unimplemented!("pullback of vector fields"),
            Shape::Sym2 => {
                let n = self.dim();
                let r = |k: usize, i: usize| -> f64 {
                    match (k, i) {
                        (0, 0) | (1, 1) => self.cos,
                        (0, 1) => -self.sin,
                        (1, 0) => self.sin,
                        _ if k == i => 1.0,
                        _ => 0.0,
                    }
                };
                let mut out = vec![T::zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut s = T::zero();
                        for k in 0..n {
                            let rki = r(k, i);
                            if rki == 0.0 {
                                continue;
                            }
                            for l in 0..n {
                                let rlj = r(l, j);
                                if rlj != 0.0 {
                                    s += v[k * n + l] * (rki * rlj);
                                }
                            }
                        }
                        out[i * n + j] = s;
                    }
                }
                out
            }
        }
    }
}

//! Model spaces and the asymptotic structures built on them: universal
//! constants, the charge 1-form of a perturbation, static potentials and the
//! conformal fields paired with them.
//!
//! The flat model is the half-space `x_n ≥ 0` in Cartesian coordinates. The
//! hyperbolic model is the upper half of the Poincaré ball, `|x| < 1`,
//! `x_n ≥ 0`, with `b = φ² δ`, `φ = 2 / (1 − |x|²)`. Geodesic polar
//! coordinates `(ρ, θ)` about the origin map to it by `x = tanh(ρ/2) θ`,
//! so coordinate hemispheres are geodesic hemispheres in both models.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldExpr, FieldRef, ScaledField, Shape, SumField, TensorField};
use crate::geom::{div_from_jets, LocalGeometry, MetricField, Role, TensorValue};
use crate::jet::{norm2, Jet, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Flat,
    Hyperbolic,
}

impl Model {
    pub fn reference(self, n: usize) -> MetricField {
        match self {
            Model::Flat => MetricField::new(Arc::new(Euclidean { n }), Role::ReferenceFlat),
            Model::Hyperbolic => MetricField::new(Arc::new(PoincareHalfBall { n }), Role::ReferenceHyperbolic),
        }
    }

    /// Chart radius of the hemisphere at asymptotic radius `r` (flat `r`,
    /// hyperbolic geodesic `ρ`).
    pub fn chart_radius(self, r: f64) -> f64 {
        match self {
            Model::Flat => r,
            Model::Hyperbolic => (0.5 * r).tanh(),
        }
    }

    /// Inverse of [`chart_radius`](Self::chart_radius).
    pub fn asymptotic_radius(self, chart_r: f64) -> f64 {
        match self {
            Model::Flat => chart_r,
            Model::Hyperbolic => 2.0 * chart_r.atanh(),
        }
    }

    /// Decay threshold on the exponent τ: `(n−2)/2` for flat, `n/2` for hyperbolic.
    pub fn decay_threshold(self, n: usize) -> f64 {
        match self {
            Model::Flat => (n as f64 - 2.0) / 2.0,
            Model::Hyperbolic => n as f64 / 2.0,
        }
    }
}

/// Point of the hyperbolic model given geodesic polar coordinates; `theta` is
/// a unit vector with `theta[n-1] ≥ 0`.
pub fn poincare_from_polar(rho: f64, theta: &[f64]) -> Vec<f64> {
    let xi = (0.5 * rho).tanh();
    theta.iter().map(|t| xi * t).collect()
}

/// `(ρ, θ)` of a point of the hyperbolic model.
pub fn polar_from_poincare(x: &[f64]) -> (f64, Vec<f64>) {
    let xi = norm2(x).sqrt();
    (2.0 * xi.atanh(), x.iter().map(|v| v / xi).collect())
}

/// `δ_ij`
pub struct Euclidean {
    pub n: usize,
}

impl FieldExpr for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, _x: &[T]) -> Vec<T> {
        identity(self.n, T::one())
    }
}

/// Hyperbolic metric on the Poincaré ball.
pub struct PoincareHalfBall {
    pub n: usize,
}

impl FieldExpr for PoincareHalfBall {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let phi = conformal_factor(x);
        identity(self.n, phi * phi)
    }
}

/// `φ = 2 / (1 − |x|²)`
pub fn conformal_factor<T: Real>(x: &[T]) -> T {
    (-norm2(x) + 1.0).recip() * 2.0
}

/// `b = dρ² + sinh²ρ h₀` in coordinates `(ρ, θ₁, …, θ_{n−1})`, with the round
/// metric `h₀ = dθ₁² + sin²θ₁ dθ₂² + …`.
pub struct HyperbolicPolar {
    pub n: usize,
}

impl FieldExpr for HyperbolicPolar {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        out[0] = T::one();
        let sinh = (x[0].exp() - (-x[0]).exp()) * 0.5;
        let mut w = sinh * sinh;
        for a in 1..n {
            out[a * n + a] = w;
            let s = x[a].sin();
            w = w * s * s;
        }
        out
    }
}

pub(crate) fn identity<T: Real>(n: usize, diag: T) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        out[i * n + i] = diag;
    }
    out
}

/// Volume of the unit `(n−1)`-sphere.
pub fn sphere_volume(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `Γ(n/2)` for positive integers `n`.
fn gamma_half(n: usize) -> f64 {
    let (mut x, mut g) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while x < n as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub n: usize,
    pub omega: f64,
    pub c_n: f64,
    pub d_n: f64,
}

impl Constants {
    pub fn new(n: usize) -> Self {
        let omega = sphere_volume(n);
        let nf = n as f64;
        Constants {
            n,
            omega,
            c_n: 1.0 / (2.0 * (nf - 1.0) * omega),
            d_n: 1.0 / ((2.0 - nf) * (nf - 1.0) * omega),
        }
    }
}

/// The pair (physical metric, reference metric) with the perturbation
/// `e = g − reference` and a weight function `w`.
#[derive(Clone)]
pub struct ChargeContext {
    pub metric: MetricField,
    pub reference: MetricField,
    pub perturbation: FieldRef,
    pub weight: FieldRef,
    /// Declared decay exponent of `e`.
    pub decay_tau: f64,
}

impl ChargeContext {
    /// Perturbation formed as the difference `g − reference`.
    pub fn new(metric: MetricField, reference: MetricField, weight: FieldRef) -> Self {
        let perturbation: FieldRef = Arc::new(SumField {
            a: metric.field().clone(),
            b: Arc::new(ScaledField {
                scale: -1.0,
                a: reference.field().clone(),
            }),
        });
        ChargeContext {
            metric,
            reference,
            perturbation,
            weight,
            decay_tau: f64::INFINITY,
        }
    }

    /// Uses an exactly known perturbation instead of subtracting metrics.
    pub fn with_perturbation(mut self, e: FieldRef) -> Self {
        self.perturbation = e;
        self
    }

    pub fn with_weight(mut self, w: FieldRef) -> Self {
        self.weight = w;
        self
    }

    pub fn with_decay(mut self, tau: f64) -> Self {
        self.decay_tau = tau;
        self
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub(crate) fn perturbation_jet(&self, x: &[f64]) -> Result<Vec<Jet>> {
        self.reference.differentiator().first_jet(self.perturbation.as_ref(), x)
    }

    pub(crate) fn weight_jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(self.reference.differentiator().first_jet(self.weight.as_ref(), x)?[0])
    }
}

/// `U = w(div e − d tr e) − ∇w ⌟ e + tr e dw`, every operation in the
/// reference metric.
pub fn charge_one_form(ctx: &ChargeContext, p: &[f64]) -> Result<TensorValue> {
    let geo = ctx.reference.connection(p)?;
    let e = ctx.perturbation_jet(p)?;
    let w = ctx.weight_jet(p)?;
    Ok(TensorValue::from_vec(charge_from_jets(&geo, &e, &w), 0, 1, p))
}

pub(crate) fn charge_from_jets(geo: &LocalGeometry, e: &[Jet], w: &Jet) -> Vec<f64> {
    let n = geo.n;
    let div = div_from_jets(geo, e);
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += geo.ginv[(i, j)] * e[i * n + j].v;
        }
    }
    let dtr: Vec<f64> = (0..n)
        .map(|k| {
            let dginv = -(&geo.ginv * &geo.dg[k] * &geo.ginv);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += dginv[(i, j)] * e[i * n + j].v + geo.ginv[(i, j)] * e[i * n + j].d[k];
                }
            }
            s
        })
        .collect();
    let dw: Vec<f64> = w.d[..n].to_vec();
    let grad_w = geo.raise(&dw);
    (0..n)
        .map(|j| {
            let contraction: f64 = (0..n).map(|i| grad_w[i] * e[i * n + j].v).sum();
            w.v * (div[j] - dtr[j]) - contraction + tr * dw[j]
        })
        .collect()
}

/// Static potential of a model: flat `{1, x_1, …, x_{n−1}}`, hyperbolic
/// `W_a = y_a` of the Minkowski embedding.
#[derive(Clone, Copy, Debug)]
pub struct StaticPotential {
    pub model: Model,
    pub n: usize,
    pub index: usize,
}

impl FieldExpr for StaticPotential {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Scalar
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let v = match (self.model, self.index) {
            (Model::Flat, 0) => T::one(),
            (Model::Flat, a) => x[a - 1],
            (Model::Hyperbolic, a) => {
                let q = (-norm2(x) + 1.0).recip();
                if a == 0 {
                    (norm2(x) + 1.0) * q
                } else {
                    x[a - 1] * q * 2.0
                }
            }
        };
        vec![v]
    }
}

pub fn static_potentials(model: Model, n: usize) -> Vec<StaticPotential> {
    (0..n).map(|index| StaticPotential { model, n, index }).collect()
}

/// Conformal field paired with a static potential: flat `X_0 = r∂_r`,
/// `X_α = r²∂_α − 2x_α x^i∂_i`; hyperbolic `X_a = grad_b W_a`.
#[derive(Clone, Copy, Debug)]
pub struct ConformalField {
    pub model: Model,
    pub n: usize,
    pub index: usize,
}

impl FieldExpr for ConformalField {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Vector
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        if self.index == 0 {
            return x.to_vec();
        }
        let a = self.index - 1;
        let (diag, radial) = match self.model {
            Model::Flat => (norm2(x), x[a] * -2.0),
            Model::Hyperbolic => ((-norm2(x) + 1.0) * 0.5, x[a]),
        };
        let mut v: Vec<T> = x.iter().map(|&xi| radial * xi).collect();
        v[a] += diag;
        v
    }
}

pub fn conformal_field(model: Model, n: usize, index: usize, p: &[f64]) -> TensorValue {
    let v = ConformalField { model, n, index }.eval_generic(p);
    TensorValue::from_vec(v, 1, 0, p)
}

/// `(x', x_n) ↦ (−x', x_n)`
pub fn reflect(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    p.iter().enumerate().map(|(i, &v)| if i + 1 < n { -v } else { v }).collect()
}

/// `½ (f(p) − f(reflect(p)))`
pub fn odd_part<F: Fn(&[f64]) -> f64>(f: F, p: &[f64]) -> Result<f64> {
    match p.last() {
        Some(&xn) if xn >= 0.0 => Ok(0.5 * (f(p) - f(&reflect(p)))),
        _ => Err(Error::Domain {
            surface: "half-space",
            point: p.to_vec(),
            distance: p.last().map_or(f64::NAN, |v| -v),
        }),
    }
}

/// Field handle for a static potential.
pub fn weight_field(model: Model, n: usize, index: usize) -> FieldRef {
    Arc::new(StaticPotential { model, n, index })
}

pub fn weight_value(w: &dyn TensorField, x: &[f64]) -> f64 {
    w.eval(x)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{christoffel, curvature, einstein_tensor, killing_deformation};

    #[test]
    fn constants() {
        let c = Constants::new(3);
        assert!((c.omega - 4.0 * PI).abs() < 1e-14);
        for n in 3..7 {
            let c = Constants::new(n);
            assert!((c.d_n + 2.0 * c.c_n / (n as f64 - 2.0)).abs() < 1e-15);
        }
        assert!((sphere_volume(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(2) - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_model_is_a_space_form() {
        for n in [3, 4] {
            let b = Model::Hyperbolic.reference(n);
            let mut p = vec![0.1; n];
            p[0] = 0.4;
            let c = curvature(&b, &p).unwrap();
            let nf = n as f64;
            assert!((c.scalar + nf * (nf - 1.0)).abs() < 1e-10, "R = {}", c.scalar);
            let g = b.matrix(&p);
            let ric = c.ricci.matrix();
            assert!((&ric + &g * (nf - 1.0)).amax() < 1e-9 * g.amax());
            let e = einstein_tensor(&b, &p).unwrap().matrix();
            let hat = &e - &g * ((nf - 1.0) * (nf - 2.0) / 2.0);
            assert!(hat.amax() < 1e-9 * g.amax());
        }
    }

    #[test]
    fn polar_christoffel_block() {
        let b = MetricField::new(Arc::new(HyperbolicPolar { n: 3 }), Role::ReferenceHyperbolic);
        let p = [1.0, 0.8, 0.3];
        let g = christoffel(&b, &p).unwrap();
        let sc = 1f64.sinh() * 1f64.cosh();
        assert!((g.get(&[0, 1, 1]) + sc).abs() < 1e-12);
        assert!((g.get(&[0, 2, 2]) + sc * 0.8f64.sin().powi(2)).abs() < 1e-12);
        assert!(g.get(&[0, 1, 2]).abs() < 1e-14);
    }

    #[test]
    fn flat_potentials_and_fields() {
        let w = static_potentials(Model::Flat, 3);
        let p = [0.3, -2.0, 1.5];
        let vals: Vec<f64> = w.iter().map(|w| w.eval_generic(&p)[0]).collect();
        assert_eq!(vals, vec![1.0, 0.3, -2.0]);
        let x0 = conformal_field(Model::Flat, 3, 0, &[3.0, 4.0, 0.0]);
        assert_eq!(x0.components, vec![3.0, 4.0, 0.0]);
        let x1 = conformal_field(Model::Flat, 3, 1, &[1.0, 0.0, 2.0]);
        assert_eq!(x1.components, vec![3.0, 0.0, -4.0]);
    }

    #[test]
    fn conformal_fields_are_conformal_with_static_divergence() {
        let delta = Model::Flat.reference(3);
        let p = [0.7, -1.3, 2.1];
        let kd0 = killing_deformation(&delta, &ConformalField { model: Model::Flat, n: 3, index: 0 }, &p).unwrap();
        assert!(kd0.trace_free.amax() < 1e-12 && (kd0.div - 3.0).abs() < 1e-12);
        let kd1 = killing_deformation(&delta, &ConformalField { model: Model::Flat, n: 3, index: 1 }, &p).unwrap();
        assert!(kd1.trace_free.amax() < 1e-12);
        assert!((kd1.div + 6.0 * p[0]).abs() < 1e-12);

        let b = Model::Hyperbolic.reference(3);
        let p = [0.2, -0.5, 0.3];
        for a in 0..3 {
            let kd = killing_deformation(&b, &ConformalField { model: Model::Hyperbolic, n: 3, index: a }, &p).unwrap();
            let w = StaticPotential { model: Model::Hyperbolic, n: 3, index: a }.eval_generic(&p)[0];
            assert!(kd.trace_free.amax() < 1e-10, "a={a}");
            assert!((kd.div - 3.0 * w).abs() < 1e-9, "a={a}");
        }
    }

    #[test]
    fn hyperbolic_radial_field_is_sinh_d_rho() {
        let theta = [0.6, 0.0, 0.8];
        let p = poincare_from_polar(1.0, &theta);
        let x0 = conformal_field(Model::Hyperbolic, 3, 0, &p);
        // ∂_ρ = (1 − ξ²)/2 θ in the ball
        let xi = 0.5f64.tanh();
        for i in 0..3 {
            let expected = 1f64.sinh() * (1.0 - xi * xi) / 2.0 * theta[i];
            assert!((x0.components[i] - expected).abs() < 1e-14);
        }
        let w0 = StaticPotential { model: Model::Hyperbolic, n: 3, index: 0 }.eval_generic(&p)[0];
        assert!((w0 - 1f64.cosh()).abs() < 1e-14);
        let (rho, th) = polar_from_poincare(&p);
        assert!((rho - 1.0).abs() < 1e-14 && (th[2] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn odd_part_examples() {
        assert_eq!(odd_part(|x| x[0] * x[0], &[1.5, 0.3, 2.0]).unwrap(), 0.0);
        assert_eq!(odd_part(|x| x[0], &[2.0, 0.0, 1.0]).unwrap(), 2.0);
        assert!(odd_part(|x| x[0], &[2.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn charge_reduces_for_unit_weight() {
        // e = x_1 x_2 δ-ish test tensor; with w ≡ 1, U = div e − d tr e
        struct E;
        impl FieldExpr for E {
            fn dim(&self) -> usize {
                3
            }
            fn shape(&self) -> Shape {
                Shape::Sym2
            }
            fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
                let mut v = vec![T::zero(); 9];
                v[0] = x[0] * x[1];
                v[1] = x[2] * x[2];
                v[3] = x[2] * x[2];
                v[8] = x[0];
                v
            }
        }
        let delta = Model::Flat.reference(3);
        let ctx = ChargeContext::new(delta.clone(), delta, weight_field(Model::Flat, 3, 0))
            .with_perturbation(Arc::new(E));
        let p = [1.0, 2.0, 3.0];
        let u = charge_one_form(&ctx, &p).unwrap();
        // div e = (∂_1 e11 + ∂_2 e21 + ∂_3 e31, ∂_1 e12, ∂_3 e33) = (x2, 0, 0)
        // d tr e = (x2 + 1, x1, 0)
        let expected = [p[1] - (p[1] + 1.0), -p[0], 0.0];
        for i in 0..3 {
            assert!((u.components[i] - expected[i]).abs() < 1e-12);
        }
    }
}

//! Mass and center of mass: charge fluxes of the perturbation, fluxes of the
//! Einstein and Newton tensors of the physical metric, and the bulk formula
//! through an interpolated metric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::asym::{charge_from_jets, ChargeContext, ConformalField, Constants, Model};
use crate::boundary::{extrinsic_at, frame_at, Surface};
use crate::error::{Error, Result};
use crate::field::{FieldExpr, FieldRef, Shape, TensorField};
use crate::geom::{bilinear, MetricField, Role};
use crate::jet::{norm2, Jet, Real};
use crate::quad::{integrate_vec, Conventions, DecayModel, MassReport, Measure, QuadratureRule, Sample, SurfacePatch};

/// Masses below this are treated as zero when normalizing centers.
pub const MASS_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    MassAdm,
    MassGeometric,
    MassBulk,
    CenterAdm,
    CenterGeometric,
    HypCharge,
    HypGeometric,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::MassAdm => "mass_adm",
            Functional::MassGeometric => "mass_geometric",
            Functional::MassBulk => "mass_bulk",
            Functional::CenterAdm => "center_adm",
            Functional::CenterGeometric => "center_geometric",
            Functional::HypCharge => "hyp_charge",
            Functional::HypGeometric => "hyp_geometric",
        }
    }

    pub fn model(self) -> Model {
        match self {
            Functional::HypCharge | Functional::HypGeometric => Model::Hyperbolic,
            _ => Model::Flat,
        }
    }
}

/// Radii ladder: flat `start · factor^k`, hyperbolic `start + step · k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ladder {
    pub start: f64,
    /// Ratio (flat) or increment (hyperbolic) between rungs.
    pub factor: f64,
    pub count: usize,
}

impl Ladder {
    pub fn default_for(model: Model) -> Self {
        match model {
            Model::Flat => Ladder {
                start: 4.0,
                factor: 2.0,
                count: 6,
            },
            Model::Hyperbolic => Ladder {
                start: 3.0,
                factor: 1.0,
                count: 6,
            },
        }
    }

    pub fn radii(&self, model: Model) -> Result<Vec<f64>> {
        let ok = self.start > 0.0
            && self.start.is_finite()
            && match model {
                Model::Flat => self.factor > 1.0,
                Model::Hyperbolic => self.factor > 0.0,
            };
        if !ok {
            return Err(Error::Config(format!("invalid radii ladder {self:?}")));
        }
        Ok((0..self.count)
            .map(|k| match model {
                Model::Flat => self.start * self.factor.powi(k as i32),
                Model::Hyperbolic => self.start + self.factor * k as f64,
            })
            .collect())
    }
}

#[derive(Clone)]
pub struct InvariantRequest {
    pub ctx: ChargeContext,
    pub model: Model,
    /// Asymptotic radii (`r` flat, geodesic `ρ` hyperbolic).
    pub radii: Vec<f64>,
    pub rule: QuadratureRule,
}

impl InvariantRequest {
    pub fn new(ctx: ChargeContext, model: Model, radii: Vec<f64>, rule: QuadratureRule) -> Self {
        InvariantRequest { ctx, model, radii, rule }
    }

    pub fn n(&self) -> usize {
        self.ctx.dim()
    }

    fn check(&self, functional: Functional) -> Result<()> {
        let want = functional.model();
        let role = self.ctx.reference.role();
        let ok = match want {
            Model::Flat => role == Role::ReferenceFlat,
            Model::Hyperbolic => role == Role::ReferenceHyperbolic,
        };
        if !ok || self.model != want {
            return Err(Error::Incompatible(format!(
                "{} needs a {:?} reference metric",
                functional.name(),
                want
            )));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("radii must be strictly increasing".into()));
        }
        if let Model::Hyperbolic = self.model {
            if self.radii.iter().any(|r| *r <= 0.0) {
                return Err(Error::Config("hyperbolic radii must be positive".into()));
            }
        }
        Ok(())
    }

    fn conventions(&self) -> Conventions {
        Conventions::new(
            self.ctx.metric.backend(),
            self.rule,
            match self.model {
                Model::Flat => DecayModel::PowerLaw,
                Model::Hyperbolic => DecayModel::Exponential,
            },
        )
    }

    /// Slowest convergence rate compatible with the declared decay: the
    /// quadratic terms in `e` are of size `r^{n−2−2τ}` (flat) or
    /// `e^{(n−2τ)ρ}` (hyperbolic), and subleading terms of the asymptotic
    /// expansion may contribute one power of `1/r` (`e^{−ρ}`).
    fn expected_rate(&self) -> Option<f64> {
        let tau = self.ctx.decay_tau;
        if !tau.is_finite() {
            return None;
        }
        let n = self.n() as f64;
        let quadratic = match self.model {
            Model::Flat => 2.0 * tau + 2.0 - n,
            Model::Hyperbolic => 2.0 * tau - n,
        };
        Some(quadratic.min(1.0))
    }

    fn report(&self, name: &str, values: Vec<f64>) -> Result<MassReport> {
        let samples = self.radii.iter().zip(values).map(|(&r, value)| Sample { r, value }).collect();
        let mut rep = MassReport::from_samples(name, samples, self.conventions())?;
        if let (Some(rate), Some(expected)) = (rep.rate, self.expected_rate()) {
            if expected > 0.0 && rate < 0.5 * expected {
                rep.flag(format!(
                    "convergence rate {rate:.3} is far below the rate {expected:.3} implied by the declared decay"
                ));
            }
        }
        Ok(rep)
    }
}

/// Charge fluxes `∫ U_{e,w}(μ) − ∫ w e(η, ϑ)` (reference metric throughout)
/// for several weights at once, at asymptotic radius `r`.
fn charge_fluxes(req: &InvariantRequest, weights: &[FieldRef], r: f64) -> Result<Vec<f64>> {
    let n = req.n();
    let k = weights.len();
    let cr = req.model.chart_radius(r);
    let ctx = &req.ctx;
    let diff = ctx.reference.differentiator();
    let hemi = integrate_vec(
        |p| {
            let geo = ctx.reference.connection(p)?;
            let frame = frame_at(&geo, Surface::Hemisphere { r: cr }, p);
            let e = ctx.perturbation_jet(p)?;
            weights
                .iter()
                .map(|w| {
                    let wj = diff.first_jet(w.as_ref(), p)?[0];
                    let u = charge_from_jets(&geo, &e, &wj);
                    Ok(u.iter().zip(&frame.normal).map(|(a, b)| a * b).sum::<f64>() * frame.area_density)
                })
                .collect()
        },
        k,
        &SurfacePatch::hemisphere(n, cr),
        &req.rule,
        Measure::Euclidean,
    )?;
    let corner = integrate_vec(
        |p| {
            let geo = ctx.reference.connection(p)?;
            let eta = frame_at(&geo, Surface::Boundary, p).normal;
            let frame = frame_at(&geo, Surface::Corner { r: cr }, p);
            let e = nalgebra::DMatrix::from_row_slice(n, n, &ctx.perturbation.eval(p));
            let eab = bilinear(&e, &eta, &frame.normal);
            Ok(weights.iter().map(|w| w.eval(p)[0] * eab * frame.area_density).collect())
        },
        k,
        &SurfacePatch::corner(n, cr),
        &req.rule,
        Measure::Euclidean,
    )?;
    Ok(hemi.iter().zip(&corner).map(|(h, c)| h - c).collect())
}

/// Fluxes `∫ E(X, μ^g) dvol^g + ∫ J(X, ϑ^g) dvol^g` of the physical metric
/// for several conformal fields, with `E` shifted by `−(n−1)(n−2)/2 g` in the
/// hyperbolic model.
fn geometric_fluxes(req: &InvariantRequest, fields: &[usize], r: f64) -> Result<Vec<f64>> {
    let n = req.n();
    let k = fields.len();
    let cr = req.model.chart_radius(r);
    let g = &req.ctx.metric;
    let shift = match req.model {
        Model::Flat => 0.0,
        Model::Hyperbolic => ((n - 1) * (n - 2)) as f64 / 2.0,
    };
    let xs: Vec<ConformalField> = fields
        .iter()
        .map(|&index| ConformalField {
            model: req.model,
            n,
            index,
        })
        .collect();
    // On the hyperbolic model Ê and J of the reference vanish identically but
    // are evaluated as differences of terms growing like the flux weight
    // shrinks; subtracting their computed values removes the shared roundoff.
    let subtract = req.model == Model::Hyperbolic;
    let b = &req.ctx.reference;
    let hemi = integrate_vec(
        |p| {
            let geo = g.geometry(p)?;
            let frame = frame_at(&geo, Surface::Hemisphere { r: cr }, p);
            let mut e = geo.einstein() - &geo.g * shift;
            if subtract {
                let rb = b.geometry(p)?;
                e -= rb.einstein() - &rb.g * shift;
            }
            Ok(xs
                .iter()
                .map(|x| bilinear(&e, &x.eval_generic(p), &frame.normal) * frame.area_density)
                .collect())
        },
        k,
        &SurfacePatch::hemisphere(n, cr),
        &req.rule,
        Measure::Euclidean,
    )?;
    let diff = g.differentiator();
    let corner = integrate_vec(
        |p| {
            let geo = g.connection(p)?;
            let frame = frame_at(&geo, Surface::Corner { r: cr }, p);
            let mut j = extrinsic_at(&geo, &diff, Surface::Boundary, p)?.newton();
            if subtract {
                j -= extrinsic_at(&b.connection(p)?, &b.differentiator(), Surface::Boundary, p)?.newton();
            }
            let theta = &frame.normal[..n - 1];
            Ok(xs
                .iter()
                .map(|x| bilinear(&j, &x.eval_generic(p)[..n - 1], theta) * frame.area_density)
                .collect())
        },
        k,
        &SurfacePatch::corner(n, cr),
        &req.rule,
        Measure::Euclidean,
    )?;
    Ok(hemi.iter().zip(&corner).map(|(h, c)| h + c).collect())
}

fn weights(req: &InvariantRequest, indices: &[usize]) -> Vec<FieldRef> {
    indices
        .iter()
        .map(|&i| crate::asym::weight_field(req.model, req.n(), i))
        .collect()
}

fn per_radius<F>(req: &InvariantRequest, k: usize, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let mut cols = vec![Vec::with_capacity(req.radii.len()); k];
    for &r in &req.radii {
        for (c, v) in cols.iter_mut().zip(f(r)?) {
            c.push(v);
        }
    }
    Ok(cols)
}

/// Charge-flux mass `c_n [∫ U(μ) − ∫ e(η, ϑ)]`.
pub fn mass_adm(req: &InvariantRequest) -> Result<MassReport> {
    req.check(Functional::MassAdm)?;
    let c = Constants::new(req.n());
    let w = weights(req, &[0]);
    let v = per_radius(req, 1, |r| Ok(vec![c.c_n * charge_fluxes(req, &w, r)?[0]]))?;
    req.report("mass_adm", v.into_iter().next().unwrap())
}

/// Einstein/Newton-tensor mass `d_n [∫ E(X_0, μ) + ∫ J(X_0, ϑ)]`.
pub fn mass_geometric(req: &InvariantRequest) -> Result<MassReport> {
    req.check(Functional::MassGeometric)?;
    let c = Constants::new(req.n());
    let v = per_radius(req, 1, |r| Ok(vec![c.d_n * geometric_fluxes(req, &[0], r)?[0]]))?;
    req.report("mass_geometric", v.into_iter().next().unwrap())
}

/// `χ(|x|)`: 0 below `r/2`, 1 above `3r/4`, the septic smoothstep between.
#[derive(Clone, Copy, Debug)]
pub struct Cutoff {
    pub r: f64,
}

impl Cutoff {
    pub fn profile<T: Real>(t: T) -> T {
        let v = t.value();
        if v <= 0.0 {
            T::zero()
        } else if v >= 1.0 {
            T::one()
        } else {
            let t2 = t * t;
            let t4 = t2 * t2;
            t4 * (t * (t * (t * -20.0 + 70.0) - 84.0) + 35.0)
        }
    }

    /// `max |s'''|` of the profile on `[0, 1]`; `|χ'''| ≤ 64 · this / r³`.
    pub const PROFILE_THIRD_DERIVATIVE_MAX: f64 = 52.5;

    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        let t = (norm2(x).sqrt() - 0.5 * self.r) / (0.25 * self.r);
        Self::profile(t)
    }

    /// Breakpoints of the transition `[r/2, 3r/4]` and the outer shell up
    /// to `r`; inside `r/2` the interpolated metric is exactly flat.
    pub fn segments(&self) -> Vec<f64> {
        vec![0.5 * self.r, 0.75 * self.r, self.r]
    }
}

/// `h = δ + χ e`.
pub struct Interpolated {
    pub e: FieldRef,
    pub cutoff: Cutoff,
}

impl TensorField for Interpolated {
    fn dim(&self) -> usize {
        self.e.dim()
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let chi = self.cutoff.eval(x);
        let mut h: Vec<f64> = self.e.eval(x).into_iter().map(|v| v * chi).collect();
        for i in 0..n {
            h[i * n + i] += 1.0;
        }
        h
    }
    fn jet(&self, x: &[f64]) -> Option<Vec<Jet>> {
        let n = x.len();
        if n > crate::jet::MAX_DIM {
            return None;
        }
        let e = self.e.jet(x)?;
        let chi = self.cutoff.eval(&Jet::seed(x));
        let mut h: Vec<Jet> = e.into_iter().map(|v| v * chi).collect();
        for i in 0..n {
            h[i * n + i] = h[i * n + i] + 1.0;
        }
        Some(h)
    }
}

/// Bulk formula `c_n [∫_{M_r} R^h dvol^δ + 2 ∫_{Σ_r} H^h dvol^δ]`, integrated
/// over `r/2 ≤ |x| ≤ r` (the integrands vanish inside) with the volume orders
/// of the rule.
pub fn mass_bulk(req: &InvariantRequest) -> Result<MassReport> {
    req.check(Functional::MassBulk)?;
    let n = req.n();
    let c = Constants::new(n);
    let diff = req.ctx.metric.differentiator();
    let v = per_radius(req, 1, |r| {
        let cutoff = Cutoff { r };
        let h = MetricField::new(
            Arc::new(Interpolated {
                e: req.ctx.perturbation.clone(),
                cutoff,
            }),
            Role::Physical,
        )
        .with_differentiator(diff);
        let radii = cutoff.segments();
        let bulk = integrate_vec(
            |p| Ok(vec![h.geometry(p)?.scalar()]),
            1,
            &SurfacePatch::half_annulus(n, radii.clone()),
            &req.rule.volume(),
            Measure::Euclidean,
        )?[0];
        let bdry = integrate_vec(
            |p| {
                let geo = h.connection(p)?;
                Ok(vec![extrinsic_at(&geo, &diff, Surface::Boundary, p)?.mean_curvature])
            },
            1,
            &SurfacePatch::boundary_annulus(n, radii),
            &req.rule,
            Measure::Euclidean,
        )?[0];
        Ok(vec![c.c_n * (bulk + 2.0 * bdry)])
    })?;
    req.report("mass_bulk", v.into_iter().next().unwrap())
}

fn normalize(mass: f64) -> Result<f64> {
    if !mass.is_finite() || mass.abs() < MASS_FLOOR {
        return Err(Error::DegenerateMass(mass));
    }
    Ok(1.0 / mass)
}

/// Charge-flux center of mass, one report per tangential component
/// `α = 1 … n−1`, normalized by `mass` (the `mass_adm` limit).
pub fn center_adm_with_mass(req: &InvariantRequest, mass: f64) -> Result<Vec<MassReport>> {
    req.check(Functional::CenterAdm)?;
    let inv = normalize(mass)?;
    let n = req.n();
    let c = Constants::new(n);
    let idx: Vec<usize> = (1..n).collect();
    let w = weights(req, &idx);
    let cols = per_radius(req, n - 1, |r| Ok(charge_fluxes(req, &w, r)?.into_iter().map(|v| c.c_n * v).collect()))?;
    cols.into_iter()
        .enumerate()
        .map(|(a, v)| Ok(req.report(&format!("center_adm[{}]", a + 1), v)?.scaled(inv)))
        .collect()
}

/// Einstein/Newton-tensor center of mass with prefactor `−d_n / (2 𝔪)`.
pub fn center_geometric_with_mass(req: &InvariantRequest, mass: f64) -> Result<Vec<MassReport>> {
    req.check(Functional::CenterGeometric)?;
    let inv = normalize(mass)?;
    let n = req.n();
    let c = Constants::new(n);
    let idx: Vec<usize> = (1..n).collect();
    let cols = per_radius(req, n - 1, |r| {
        Ok(geometric_fluxes(req, &idx, r)?.into_iter().map(|v| -0.5 * c.d_n * v).collect())
    })?;
    cols.into_iter()
        .enumerate()
        .map(|(a, v)| Ok(req.report(&format!("center_geometric[{}]", a + 1), v)?.scaled(inv)))
        .collect()
}

/// Component `α` (1-based) of the charge-flux center; computes the mass first.
pub fn center_adm(req: &InvariantRequest, alpha: usize) -> Result<MassReport> {
    check_alpha(req, alpha)?;
    let m = mass_adm(req)?.limit;
    Ok(center_adm_with_mass(req, m)?.swap_remove(alpha - 1))
}

/// Component `α` (1-based) of the geometric center; computes the mass first.
pub fn center_geometric(req: &InvariantRequest, alpha: usize) -> Result<MassReport> {
    check_alpha(req, alpha)?;
    let m = mass_adm(req)?.limit;
    Ok(center_geometric_with_mass(req, m)?.swap_remove(alpha - 1))
}

fn check_alpha(req: &InvariantRequest, alpha: usize) -> Result<()> {
    if alpha == 0 || alpha >= req.n() {
        return Err(Error::Config(format!("center component must be in 1..={}", req.n() - 1)));
    }
    Ok(())
}

fn check_index(req: &InvariantRequest, a: usize) -> Result<()> {
    if a >= req.n() {
        return Err(Error::Config(format!("static potential index must be in 0..={}", req.n() - 1)));
    }
    Ok(())
}

/// Hyperbolic charge `c_n [∫ U^b_{e,W_a}(μ^b) − ∫ W_a e(η^b, ϑ^b)]`.
pub fn hyp_mass_charge(req: &InvariantRequest, a: usize) -> Result<MassReport> {
    req.check(Functional::HypCharge)?;
    check_index(req, a)?;
    let c = Constants::new(req.n());
    let w = weights(req, &[a]);
    let v = per_radius(req, 1, |r| Ok(vec![c.c_n * charge_fluxes(req, &w, r)?[0]]))?;
    req.report(&format!("hyp_charge[{a}]"), v.into_iter().next().unwrap())
}

/// Hyperbolic geometric form `d_n [∫ Ê(X_a, μ^g) + ∫ J(X_a, ϑ^g)]`.
pub fn hyp_mass_geometric(req: &InvariantRequest, a: usize) -> Result<MassReport> {
    req.check(Functional::HypGeometric)?;
    check_index(req, a)?;
    let c = Constants::new(req.n());
    let v = per_radius(req, 1, |r| Ok(vec![c.d_n * geometric_fluxes(req, &[a], r)?[0]]))?;
    req.report(&format!("hyp_geometric[{a}]"), v.into_iter().next().unwrap())
}

/// All components `a = 0 … n−1` of both hyperbolic forms.
pub fn hyp_mass_all(req: &InvariantRequest) -> Result<(Vec<MassReport>, Vec<MassReport>)> {
    req.check(Functional::HypCharge)?;
    let n = req.n();
    let c = Constants::new(n);
    let idx: Vec<usize> = (0..n).collect();
    let w = weights(req, &idx);
    let ch = per_radius(req, n, |r| Ok(charge_fluxes(req, &w, r)?.into_iter().map(|v| c.c_n * v).collect()))?;
    let ge = per_radius(req, n, |r| Ok(geometric_fluxes(req, &idx, r)?.into_iter().map(|v| c.d_n * v).collect()))?;
    let ch = ch
        .into_iter()
        .enumerate()
        .map(|(a, v)| req.report(&format!("hyp_charge[{a}]"), v))
        .collect::<Result<_>>()?;
    let ge = ge
        .into_iter()
        .enumerate()
        .map(|(a, v)| req.report(&format!("hyp_geometric[{a}]"), v))
        .collect::<Result<_>>()?;
    Ok((ch, ge))
}

/// `E(X, η) − Ric(X, η)` at a boundary point for a vector `X` tangent to `Σ`.
pub fn tangent_flux_residual(g: &MetricField, x: &[f64], p: &[f64]) -> Result<f64> {
    Surface::Boundary.check(p)?;
    let geo = g.geometry(p)?;
    let eta = frame_at(&geo, Surface::Boundary, p).normal;
    Ok((bilinear(&geo.einstein(), x, &eta) - bilinear(geo.ricci(), x, &eta)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_unchecked, MetricSpec};

    fn small_rule() -> QuadratureRule {
        QuadratureRule {
            polar: 16,
            azimuth: 32,
            radial: 12,
        }
    }

    fn request(spec: MetricSpec, radii: Vec<f64>) -> InvariantRequest {
        let m = build_unchecked(&spec).unwrap();
        InvariantRequest::new(m.charge_context(0), m.model, radii, small_rule())
    }

    #[test]
    fn flat_space_has_zero_mass() {
        let req = request(MetricSpec::new("euclidean_half", 3), vec![4.0, 8.0, 16.0]);
        for rep in [mass_adm(&req).unwrap(), mass_geometric(&req).unwrap(), mass_bulk(&req).unwrap()] {
            assert!(rep.samples.iter().all(|s| s.value.abs() < 1e-12), "{}", rep.functional);
        }
        assert!(matches!(center_adm(&req, 1), Err(Error::DegenerateMass(_))));
    }

    #[test]
    fn schwarzschild_charge_matches_radial_formula() {
        let m = 1.0;
        let req = request(MetricSpec::new("schwarzschild_half", 3).param("m", m), vec![4.0, 8.0, 16.0]);
        let rep = mass_adm(&req).unwrap();
        for s in &rep.samples {
            let u = 1.0 + m / (2.0 * s.r);
            assert!((s.value - 0.5 * m * u.powi(3)).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn functional_model_mismatch_is_rejected() {
        let req = request(MetricSpec::new("hyperbolic_half", 3), vec![3.0, 4.0, 5.0]);
        assert!(matches!(mass_adm(&req), Err(Error::Incompatible(_))));
        let req = request(MetricSpec::new("euclidean_half", 3), vec![3.0, 4.0, 5.0]);
        assert!(matches!(hyp_mass_charge(&req, 0), Err(Error::Incompatible(_))));
    }

    #[test]
    fn cutoff_profile() {
        let c = Cutoff { r: 8.0 };
        assert_eq!(c.eval(&[4.0, 0.0, 0.0]), 0.0);
        assert_eq!(c.eval(&[6.0, 0.0, 0.0]), 1.0);
        assert!((c.eval(&[0.0, 5.0, 0.0]) - 0.5).abs() < 1e-15);
        // third derivative bound
        let s3 = |t: f64| 840.0 * t - 5040.0 * t * t + 8400.0 * t.powi(3) - 4200.0 * t.powi(4);
        let max = (0..=10000).map(|k| s3(k as f64 / 10000.0).abs()).fold(0.0, f64::max);
        assert!(max <= Cutoff::PROFILE_THIRD_DERIVATIVE_MAX && max > 0.95 * Cutoff::PROFILE_THIRD_DERIVATIVE_MAX);
    }

    #[test]
    fn ladders() {
        assert_eq!(Ladder::default_for(Model::Flat).radii(Model::Flat).unwrap(), vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0]);
        assert_eq!(Ladder::default_for(Model::Hyperbolic).radii(Model::Hyperbolic).unwrap(), vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert!(Ladder { start: 4.0, factor: 1.0, count: 3 }.radii(Model::Flat).is_err());
    }
}

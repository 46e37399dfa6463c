//! Pointwise identity checks and decay/admission reports.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asym::{reflect, ChargeContext, Model};
use crate::boundary::{extrinsic_at, frame_at, Surface};
use crate::catalog::CatalogMetric;
use crate::error::{Error, Result};
use crate::field::{Backend, Differentiator, FieldExpr, FieldRef, Shape, TensorField};
use crate::geom::{bilinear, div_from_jets, killing_from_jets, LocalGeometry, MetricField};
use crate::jet::{norm2, Jet, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Largest individual term entering each residual.
    pub scales: Vec<f64>,
    pub max: f64,
    pub rms: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ResidualReport {
    pub fn new(identity: &str, points: Vec<Vec<f64>>, residuals: Vec<f64>, scales: Vec<f64>, tolerance: f64) -> Self {
        let max = residuals.iter().fold(0.0f64, |m, r| if r.is_nan() { f64::NAN } else { m.max(*r) });
        let rms = if residuals.is_empty() {
            0.0
        } else {
            (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
        };
        ResidualReport {
            identity: identity.to_string(),
            points,
            residuals,
            scales,
            max,
            rms,
            tolerance,
            pass: max <= tolerance,
            seed: None,
        }
    }
}

/// Terms of `div(K(Y,·)) = ⟨div K, Y⟩ + ⟨K, (½ L_Y γ)°⟩ + (1/n) div Y tr K`.
#[derive(Clone, Copy, Debug)]
pub struct PohozaevTerms {
    pub lhs: f64,
    pub div_k_y: f64,
    pub deformation: f64,
    pub trace: f64,
}

impl PohozaevTerms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.div_k_y - self.deformation - self.trace).abs()
    }
    pub fn scale(&self) -> f64 {
        [self.lhs, self.div_k_y, self.deformation, self.trace]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `K(Y, ·)` as a field, differentiated as a whole.
struct Contraction<'a> {
    k: &'a dyn TensorField,
    y: &'a dyn TensorField,
}

impl TensorField for Contraction<'_> {
    fn dim(&self) -> usize {
        self.k.dim()
    }
    fn shape(&self) -> Shape {
        Shape::Vector
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let k = self.k.eval(x);
        let y = self.y.eval(x);
        (0..n).map(|j| (0..n).map(|i| y[i] * k[i * n + j]).sum()).collect()
    }
}

pub fn pohozaev_terms(gamma: &MetricField, k: &dyn TensorField, y: &dyn TensorField, p: &[f64]) -> Result<PohozaevTerms> {
    let n = gamma.dim();
    let diff = gamma.differentiator();
    let geo = gamma.connection(p)?;
    let kj = diff.first_jet(k, p)?;
    let yj = diff.first_jet(y, p)?;
    // ω = K(Y, ·) and its partials: by the product rule on exact jets, or by
    // differencing ω itself when a finite-difference backend is selected
    let omega: Vec<Jet> = match (diff.backend, k.jet(p), y.jet(p)) {
        (Backend::Analytic, Some(_), Some(_)) => (0..n)
            .map(|j| {
                let mut w = Jet::ZERO;
                for i in 0..n {
                    w += yj[i] * kj[i * n + j];
                }
                w
            })
            .collect(),
        _ => {
            let fd = Differentiator {
                backend: if diff.backend == Backend::Fd2 { Backend::Fd2 } else { Backend::Fd4 },
                ..diff
            };
            fd.first_jet(&Contraction { k, y }, p)?
        }
    };
    let lhs: f64 = (0..n)
        .map(|j| {
            (0..n)
                .map(|l| {
                    let gjl = geo.ginv[(j, l)];
                    let cov = omega[j].d[l] - (0..n).map(|m| geo.gamma(m, l, j) * omega[m].v).sum::<f64>();
                    gjl * cov
                })
                .sum::<f64>()
        })
        .sum();
    let div_k = div_from_jets(&geo, &kj);
    let yv: Vec<f64> = yj.iter().map(|j| j.v).collect();
    let div_k_y: f64 = div_k.iter().zip(&yv).map(|(a, b)| a * b).sum();
    let kd = killing_from_jets(&geo, &yj);
    let kmat = nalgebra::DMatrix::from_fn(n, n, |i, j| kj[i * n + j].v);
    let deformation = geo.pair(&kmat, &kd.trace_free);
    let trace = kd.div * geo.trace(&kmat) / n as f64;
    Ok(PohozaevTerms {
        lhs,
        div_k_y,
        deformation,
        trace,
    })
}

pub fn pohozaev_residual(gamma: &MetricField, k: &dyn TensorField, y: &dyn TensorField, p: &[f64]) -> Result<f64> {
    Ok(pohozaev_terms(gamma, k, y, p)?.residual())
}

/// Random polynomial field of degree ≤ 3 with coefficients in `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct RandomPolynomial {
    pub n: usize,
    pub shape: Shape,
    /// `coeffs[c][m]` multiplies monomial `m` in component `c`.
    pub coeffs: Vec<Vec<f64>>,
    monomials: Vec<Vec<usize>>,
}

fn monomials(n: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut last = vec![vec![]];
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &last {
            let start = m.last().copied().unwrap_or(0);
            for i in start..n {
                let mut v: Vec<usize> = m.clone();
                v.push(i);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        last = next;
    }
    out
}

impl RandomPolynomial {
    pub fn sample(rng: &mut impl Rng, n: usize, shape: Shape, degree: usize) -> Self {
        let monomials = monomials(n, degree);
        let comps = shape.len(n);
        let mut coeffs = vec![vec![0.0; monomials.len()]; comps];
        for (c, row) in coeffs.iter_mut().enumerate() {
            if shape == Shape::Sym2 && (c / n) > (c % n) {
                continue;
            }
            for v in row.iter_mut() {
                *v = rng.gen_range(-1.0..=1.0);
            }
        }
        if shape == Shape::Sym2 {
            for i in 0..n {
                for j in 0..i {
                    coeffs[i * n + j] = coeffs[j * n + i].clone();
                }
            }
        }
        RandomPolynomial {
            n,
            shape,
            coeffs,
            monomials,
        }
    }
}

impl FieldExpr for RandomPolynomial {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        self.shape
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let vals: Vec<T> = self
            .monomials
            .iter()
            .map(|m| m.iter().fold(T::one(), |acc, &i| acc * x[i]))
            .collect();
        self.coeffs
            .iter()
            .map(|row| row.iter().zip(&vals).fold(T::zero(), |acc, (&c, &v)| acc + v * c))
            .collect()
    }
}

/// `δ + ε Σ a_ij sin(k_ij · x + φ_ij)`, symmetric, positive definite for
/// small `ε`.
#[derive(Clone, Debug)]
pub struct WavyMetric {
    pub n: usize,
    pub eps: f64,
    waves: Vec<(f64, Vec<f64>, f64)>,
}

impl WavyMetric {
    pub fn sample(rng: &mut impl Rng, n: usize, eps: f64) -> Self {
        let waves = (0..n * n)
            .map(|_| {
                let a = rng.gen_range(-1.0..=1.0);
                let k = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let ph = rng.gen_range(0.0..std::f64::consts::TAU);
                (a, k, ph)
            })
            .collect();
        WavyMetric { n, eps, waves }
    }
}

impl FieldExpr for WavyMetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        let mut g = crate::asym::identity(n, T::one());
        for i in 0..n {
            for j in i..n {
                let (a, k, ph) = &self.waves[i * n + j];
                let arg = x.iter().zip(k).fold(T::cst(*ph), |acc, (&xi, &ki)| acc + xi * ki);
                let v = arg.sin() * (self.eps * a);
                g[i * n + j] += v;
                if i != j {
                    g[j * n + i] += v;
                }
            }
        }
        g
    }
}

/// Random Pohozaev instances: wavy metric, cubic `K` and `Y`, a point in
/// `[−1, 1]ⁿ`. Deterministic in `seed`.
pub fn pohozaev_sweep(seed: u64, count: usize, n: usize, diff: Differentiator, tolerance: f64) -> Result<ResidualReport> {
    let cases: Vec<(WavyMetric, RandomPolynomial, RandomPolynomial, Vec<f64>)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let g = WavyMetric::sample(&mut rng, n, 0.1);
                let k = RandomPolynomial::sample(&mut rng, n, Shape::Sym2, 3);
                let y = RandomPolynomial::sample(&mut rng, n, Shape::Vector, 3);
                let p = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                (g, k, y, p)
            })
            .collect()
    };
    let terms: Vec<PohozaevTerms> = cases
        .par_iter()
        .map(|(g, k, y, p)| {
            let metric = MetricField::new(Arc::new(g.clone()), crate::geom::Role::Physical).with_differentiator(diff);
            pohozaev_terms(&metric, k, y, p)
        })
        .collect::<Result<_>>()?;
    let mut r = ResidualReport::new(
        "pohozaev",
        cases.into_iter().map(|c| c.3).collect(),
        terms.iter().map(|t| t.residual()).collect(),
        terms.iter().map(|t| t.scale()).collect(),
        tolerance,
    );
    r.seed = Some(seed);
    Ok(r)
}

/// `div_Σ J − Ric(η, ·)` on tangent directions at a boundary point, with
/// `J = sign · (Π − H σ)`. `sign = 1` is the convention used throughout.
pub fn codazzi_residual_signed(g: &MetricField, p: &[f64], sign: f64) -> Result<(f64, f64)> {
    let n = g.dim();
    Surface::Boundary.check(p)?;
    let m = n - 1;
    let diff = g.differentiator();
    let geo = g.geometry(p)?;
    let newton_at = |x: &[f64]| -> Result<Vec<f64>> {
        let mut q = x.to_vec();
        q.push(0.0);
        let geo = g.connection(&q)?;
        let ex = extrinsic_at(&geo, &diff, Surface::Boundary, &q)?;
        Ok(ex.newton().iter().copied().collect())
    };
    let base = &p[..m];
    let j0 = newton_at(base)?;
    // dj[γ][α*m + β] = ∂_γ J_αβ  (nalgebra storage is column-major, J symmetric)
    let dj = diff.gradient_of(base, newton_at)?;
    let sigma = geo.g.view((0, 0), (m, m)).into_owned();
    let sinv = sigma.clone().try_inverse().ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    // induced Christoffels from ∂_γ σ_αβ = ∂_γ g_αβ
    let ds = |c: usize, a: usize, b: usize| geo.dg[c][(a, b)];
    let chris = |k: usize, a: usize, b: usize| -> f64 {
        0.5 * (0..m).map(|l| sinv[(k, l)] * (ds(a, b, l) + ds(b, a, l) - ds(l, a, b))).sum::<f64>()
    };
    let jv = |a: usize, b: usize| j0[a * m + b];
    let frame = frame_at(&geo, Surface::Boundary, p);
    let eta = &frame.normal;
    let ric = geo.ricci();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for b in 0..m {
        let mut div = 0.0;
        for a in 0..m {
            for c in 0..m {
                let mut cov = dj[c][a * m + b];
                for k in 0..m {
                    cov -= chris(k, c, a) * jv(k, b) + chris(k, c, b) * jv(a, k);
                }
                div += sinv[(a, c)] * cov;
            }
        }
        let mut e_b = vec![0.0; n];
        e_b[b] = 1.0;
        let rhs = bilinear(ric, eta, &e_b);
        worst = worst.max((sign * div - rhs).abs());
        scale = scale.max(div.abs()).max(rhs.abs());
    }
    Ok((worst, scale))
}

pub fn codazzi_residual(g: &MetricField, p: &[f64]) -> Result<f64> {
    Ok(codazzi_residual_signed(g, p, 1.0)?.0)
}

/// Deterministic boundary sample points at chart radii in `[r_min, r_max]`.
pub fn boundary_points(n: usize, count: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(r_min..=r_max);
            let mut v: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let len = norm2(&v).sqrt().max(1e-3);
            for x in v.iter_mut() {
                *x *= r / len;
            }
            v.push(0.0);
            v
        })
        .collect()
}

pub fn codazzi_sweep(g: &MetricField, points: &[Vec<f64>], tolerance: f64) -> Result<ResidualReport> {
    let out: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| codazzi_residual_signed(g, p, 1.0))
        .collect::<Result<_>>()?;
    Ok(ResidualReport::new(
        "codazzi",
        points.to_vec(),
        out.iter().map(|o| o.0).collect(),
        out.iter().map(|o| o.1).collect(),
        tolerance,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticResidual {
    pub tensor_residual: f64,
    /// `|∂w/∂η|`, present at boundary points.
    pub boundary_residual: Option<f64>,
}

/// `∇²w + (Δw) γ − w Ric` with the nonnegative Laplacian `Δ = −tr ∇²`.
pub fn static_operator(geo: &LocalGeometry, w: &Jet) -> nalgebra::DMatrix<f64> {
    let hess = geo.hessian(w);
    let lap = -geo.trace(&hess);
    &hess + &geo.g * lap - geo.ricci() * w.v
}

pub fn static_residual(gamma: &MetricField, w: &dyn TensorField, p: &[f64]) -> Result<StaticResidual> {
    let geo = gamma.geometry(p)?;
    let wj = gamma.differentiator().jet(w, p)?[0];
    let op = static_operator(&geo, &wj);
    let tensor_residual = op.iter().map(|v| v * v).sum::<f64>().sqrt();
    let boundary_residual = if p[p.len() - 1] == 0.0 {
        let eta = frame_at(&geo, Surface::Boundary, p).normal;
        Some(eta.iter().zip(&wj.d).map(|(a, b)| a * b).sum::<f64>().abs())
    } else {
        None
    };
    Ok(StaticResidual {
        tensor_residual,
        boundary_residual,
    })
}

/// Decay rate fitted to one quantity along the sample rays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub quantity: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Fitted exponent of `r` (flat) or `e^ρ` (hyperbolic); `None` when the
    /// quantity vanishes to the noise floor.
    pub rate: Option<f64>,
    /// `rate` minus the number of derivatives the quantity carries.
    pub implied_tau: Option<f64>,
    pub gating: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub model: Model,
    pub n: usize,
    pub threshold: f64,
    pub declared_tau: Option<f64>,
    pub fits: Vec<DecayFit>,
    /// Odd-part (parity) diagnostics, flat model only; never gating.
    pub odd: Vec<DecayFit>,
    /// Smallest implied exponent among the gating quantities.
    pub tau: Option<f64>,
    pub admitted: bool,
}

impl DecayReport {
    pub fn fit(&self, quantity: &str) -> Option<&DecayFit> {
        self.fits.iter().chain(&self.odd).find(|f| f.quantity == quantity)
    }

    pub fn violation(&self) -> Option<String> {
        self.fits.iter().find(|f| f.gating && !f.pass).map(|f| {
            format!(
                "{} decays at rate {:.3} (implied tau {:.3}), not above the threshold {}",
                f.quantity,
                f.rate.unwrap_or(f64::INFINITY),
                f.implied_tau.unwrap_or(f64::INFINITY),
                self.threshold
            )
        })
    }
}

/// Least-squares decay rate of `values` against `x` (`ln r` or `ρ`);
/// samples below `floor` are ignored. Returns `None` if fewer than two remain.
pub fn fit_rate(x: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > floor)
        .map(|(x, v)| (*x, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

/// Sample rays: unit vectors in the closed upper half-space, including some
/// lying in the boundary.
pub fn sample_rays(n: usize) -> Vec<Vec<f64>> {
    (0..6)
        .map(|k| {
            let mut v: Vec<f64> = (0..n - 1).map(|i| (1.3 * k as f64 + 0.7 * i as f64 + 0.2).cos()).collect();
            v.push(if k % 3 == 0 { 0.0 } else { (0.9 * k as f64).sin().abs() + 0.2 });
            let len = norm2(&v).sqrt();
            v.iter().map(|x| x / len).collect()
        })
        .collect()
}

/// Default radii: flat `8·2^k`, hyperbolic `ρ = 2 … 8`.
pub fn decay_radii(model: Model) -> Vec<f64> {
    match model {
        Model::Flat => (0..8).map(|k| 8.0 * 2f64.powi(k)).collect(),
        Model::Hyperbolic => (0..7).map(|k| 2.0 + k as f64).collect(),
    }
}

struct Probe {
    e: f64,
    de: f64,
    d2e: f64,
    scalar: f64,
    mean: Option<f64>,
    odd_e: f64,
    odd_scalar: f64,
}

fn probe(ctx: &ChargeContext, model: Model, p: &[f64]) -> Result<Probe> {
    let n = p.len();
    let diff = ctx.reference.differentiator();
    let ej = diff.jet(ctx.perturbation.as_ref(), p)?;
    // frame components: divide by φ² and scale derivatives by φ^{-1}
    let (ej, phi) = match model {
        Model::Flat => (ej, 1.0),
        Model::Hyperbolic => {
            let phi2 = ctx.reference.jets(p)?[0];
            (ej.iter().map(|&c| c / phi2).collect::<Vec<_>>(), phi2.v.sqrt())
        }
    };
    let mut e = 0.0f64;
    let mut de = 0.0f64;
    let mut d2e = 0.0f64;
    for c in &ej {
        e = e.max(c.v.abs());
        for i in 0..n {
            de = de.max(c.d[i].abs() / phi);
            for j in 0..n {
                d2e = d2e.max(c.h[i][j].abs() / (phi * phi));
            }
        }
    }
    let offset = match model {
        Model::Flat => 0.0,
        Model::Hyperbolic => (n * (n - 1)) as f64,
    };
    let geo = ctx.metric.geometry(p)?;
    let scalar = (geo.scalar() + offset).abs();
    let mean = if p[n - 1] == 0.0 {
        let ex = extrinsic_at(&geo, &ctx.metric.differentiator(), Surface::Boundary, p)?;
        Some(ex.mean_curvature.abs())
    } else {
        None
    };
    let (odd_e, odd_scalar) = if model == Model::Flat {
        let q = reflect(p);
        let eq = ctx.perturbation.eval(&q);
        let ep: Vec<f64> = ej.iter().map(|j| j.v).collect();
        let s = |i: usize| if i + 1 < n { -1.0 } else { 1.0 };
        let mut odd = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                odd = odd.max((0.5 * (ep[i * n + j] - s(i) * s(j) * eq[i * n + j])).abs());
            }
        }
        let rq = ctx.metric.geometry(&q)?.scalar();
        (odd, (0.5 * (geo.scalar() - rq)).abs())
    } else {
        (0.0, 0.0)
    };
    Ok(Probe {
        e,
        de,
        d2e,
        scalar,
        mean,
        odd_e,
        odd_scalar,
    })
}

/// Decay report for a metric given through its perturbation.
pub fn decay_report_for(ctx: &ChargeContext, model: Model, radii: &[f64]) -> Result<DecayReport> {
    let n = ctx.dim();
    let rays = sample_rays(n);
    let threshold = model.decay_threshold(n);
    let per_radius: Vec<Vec<Probe>> = radii
        .par_iter()
        .map(|&r| {
            let cr = model.chart_radius(r);
            rays.iter()
                .map(|ray| {
                    let p: Vec<f64> = ray.iter().map(|v| v * cr).collect();
                    probe(ctx, model, &p)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = match model {
        Model::Flat => radii.iter().map(|r| r.ln()).collect(),
        Model::Hyperbolic => radii.to_vec(),
    };
    let maxes = |f: &dyn Fn(&Probe) -> Option<f64>| -> Vec<f64> {
        per_radius
            .iter()
            .map(|ps| ps.iter().filter_map(f).fold(0.0, f64::max))
            .collect()
    };
    let flat = model == Model::Flat;
    // (name, values, derivative offset, noise floor, gating)
    let specs: Vec<(&str, Vec<f64>, f64, f64, bool)> = vec![
        ("perturbation", maxes(&|p| Some(p.e)), 0.0, 1e-14, true),
        ("first_derivatives", maxes(&|p| Some(p.de)), if flat { 1.0 } else { 0.0 }, 1e-14, true),
        ("second_derivatives", maxes(&|p| Some(p.d2e)), if flat { 2.0 } else { 0.0 }, 1e-13, true),
        ("scalar_curvature", maxes(&|p| Some(p.scalar)), if flat { 2.0 } else { 0.0 }, if flat { 1e-13 } else { 1e-9 }, false),
        ("mean_curvature", maxes(&|p| p.mean), if flat { 1.0 } else { 0.0 }, if flat { 1e-14 } else { 1e-11 }, false),
    ];
    let make = |(name, values, offset, floor, gating): (&str, Vec<f64>, f64, f64, bool)| {
        let rate = fit_rate(&xs, &values, floor);
        let implied_tau = rate.map(|r| r - offset);
        DecayFit {
            quantity: name.to_string(),
            radii: radii.to_vec(),
            values,
            rate,
            implied_tau,
            gating,
            pass: implied_tau.is_none_or(|t| t > threshold),
        }
    };
    let fits: Vec<DecayFit> = specs.into_iter().map(make).collect();
    let odd = if flat {
        vec![
            make(("odd_perturbation", maxes(&|p| Some(p.odd_e)), 0.0, 1e-14, false)),
            make(("odd_scalar_curvature", maxes(&|p| Some(p.odd_scalar)), 2.0, 1e-13, false)),
        ]
    } else {
        Vec::new()
    };
    let tau = fits
        .iter()
        .filter(|f| f.gating)
        .filter_map(|f| f.implied_tau)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))));
    let admitted = fits.iter().all(|f| !f.gating || f.pass);
    Ok(DecayReport {
        model,
        n,
        threshold,
        declared_tau: ctx.decay_tau.is_finite().then_some(ctx.decay_tau),
        fits,
        odd,
        tau,
        admitted,
    })
}

/// Decay report of `g` against the reference metric of `model`.
pub fn decay_report(g: &MetricField, model: Model) -> Result<DecayReport> {
    let n = g.dim();
    let ctx = ChargeContext::new(
        g.clone(),
        model.reference(n).with_differentiator(g.differentiator()),
        crate::asym::weight_field(model, n, 0),
    );
    decay_report_for(&ctx, model, &decay_radii(model))
}

/// Load-time admission of a catalog metric.
pub fn admit(metric: &CatalogMetric) -> Result<DecayReport> {
    let threshold = metric.model.decay_threshold(metric.n());
    if metric.decay_tau <= threshold {
        return Err(Error::Inadmissible(format!(
            "declared decay exponent {} does not exceed the threshold {threshold}",
            metric.decay_tau
        )));
    }
    let report = decay_report_for(&metric.charge_context(0), metric.model, &decay_radii(metric.model))?;
    match report.violation() {
        Some(v) => Err(Error::Inadmissible(v)),
        None => Ok(report),
    }
}

/// Perturbation field used by the decay tests: `amp · r^{−s}` times a fixed
/// symmetric profile (flat), or `amp · φ² e^{−sρ}` times it (hyperbolic).
pub struct SyntheticDecay {
    pub n: usize,
    pub model: Model,
    pub amp: f64,
    pub rate: f64,
}

impl FieldExpr for SyntheticDecay {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Sym2
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        let r2 = norm2(x);
        let s = match self.model {
            Model::Flat => r2.powf(-self.rate / 2.0),
            Model::Hyperbolic => {
                // e^{−ρ} = (1 − ξ)/(1 + ξ)
                let xi = r2.sqrt();
                let phi = crate::asym::conformal_factor(x);
                ((-xi + 1.0) / (xi + 1.0)).powf(self.rate) * phi * phi
            }
        } * self.amp;
        let mut e = crate::asym::identity(n, s);
        e[1] = s * 0.5;
        e[n] = s * 0.5;
        e
    }
}

/// Metric `reference + synthetic` with its charge context.
pub fn synthetic_context(n: usize, model: Model, amp: f64, rate: f64) -> ChargeContext {
    let e: FieldRef = Arc::new(SyntheticDecay { n, model, amp, rate });
    let reference = model.reference(n);
    let g = MetricField::new(
        Arc::new(crate::field::SumField {
            a: reference.field().clone(),
            b: e.clone(),
        }),
        crate::geom::Role::Physical,
    );
    ChargeContext::new(g, reference, crate::asym::weight_field(model, n, 0)).with_perturbation(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::{weight_field, StaticPotential};
    use crate::catalog::{build_unchecked, MetricSpec};
    use crate::geom::Role;

    #[test]
    fn pohozaev_with_k_equal_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = WavyMetric::sample(&mut rng, 3, 0.1);
        let metric = MetricField::new(Arc::new(g.clone()), Role::Physical);
        let y = RandomPolynomial::sample(&mut rng, 3, Shape::Vector, 2);
        let t = pohozaev_terms(&metric, &g, &y, &[0.3, -0.2, 0.5]).unwrap();
        assert!(t.residual() < 1e-9);
        assert!(t.div_k_y.abs() < 1e-12);
    }

    #[test]
    fn pohozaev_random_analytic_and_fd4() {
        let r = pohozaev_sweep(11, 20, 3, Differentiator::new(Backend::Analytic), 1e-8).unwrap();
        assert!(r.pass, "{}", r.max);
        let r = pohozaev_sweep(11, 20, 3, Differentiator::new(Backend::Fd4), 1e-5).unwrap();
        assert!(r.pass, "{}", r.max);
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 3).len(), 20);
        assert_eq!(monomials(4, 2).len(), 15);
    }

    #[test]
    fn static_generators() {
        let delta = Model::Flat.reference(3);
        let p = [0.4, 1.1, 0.0];
        for a in 0..3 {
            let s = static_residual(&delta, &StaticPotential { model: Model::Flat, n: 3, index: a }, &p).unwrap();
            assert_eq!(s.tensor_residual, 0.0);
            assert_eq!(s.boundary_residual, Some(0.0));
        }
        struct Xn;
        impl FieldExpr for Xn {
            fn dim(&self) -> usize {
                3
            }
            fn shape(&self) -> Shape {
                Shape::Scalar
            }
            fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
                vec![x[2]]
            }
        }
        let s = static_residual(&delta, &Xn, &p).unwrap();
        assert_eq!(s.tensor_residual, 0.0);
        assert_eq!(s.boundary_residual, Some(1.0));

        let b = Model::Hyperbolic.reference(3);
        for a in 0..3 {
            let w = weight_field(Model::Hyperbolic, 3, a);
            let s = static_residual(&b, w.as_ref(), &[0.3, -0.1, 0.0]).unwrap();
            assert!(s.tensor_residual < 1e-8, "{a}: {}", s.tensor_residual);
            assert!(s.boundary_residual.unwrap() < 1e-14);
        }
    }

    #[test]
    fn codazzi_on_generic_perturbation_pins_the_sign() {
        let m = build_unchecked(&MetricSpec::new("generic_perturbation", 3)).unwrap();
        let p = [8.0 * 0.6, 8.0 * 0.8, 0.0];
        let (good, scale) = codazzi_residual_signed(&m.physical, &p, 1.0).unwrap();
        let (bad, _) = codazzi_residual_signed(&m.physical, &p, -1.0).unwrap();
        assert!(good < 1e-9, "{good} (scale {scale})");
        assert!(bad > 0.5 * scale && scale > 1e-5, "{bad} vs {scale}");
    }

    #[test]
    fn fit_rate_recovers_power_law() {
        let r: Vec<f64> = (0..6).map(|k| 8.0 * 2f64.powi(k)).collect();
        let v: Vec<f64> = r.iter().map(|r| 3.0 * r.powf(-1.7)).collect();
        let x: Vec<f64> = r.iter().map(|r| r.ln()).collect();
        assert!((fit_rate(&x, &v, 0.0).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(fit_rate(&x, &[0.0; 6], 1e-14), None);
    }

    #[test]
    fn flat_metric_decay_is_infinite() {
        let r = decay_report(&Model::Flat.reference(3), Model::Flat).unwrap();
        assert!(r.admitted);
        assert_eq!(r.tau, None);
    }
}

//! Coordinate-chart tensor calculus.
//!
//! Conventions: `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
//! `R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`,
//! `Ric_jl = R^i_jil`. With these, the unit round sphere has positive Ricci
//! curvature and the hyperbolic space form has scalar curvature `−n(n−1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Backend, Differentiator, FieldRef, FnField, Shape, TensorField};
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Physical,
    ReferenceFlat,
    ReferenceHyperbolic,
}

/// A Riemannian metric on a chart, together with the backend used to
/// differentiate it.
#[derive(Clone)]
pub struct MetricField {
    field: FieldRef,
    role: Role,
    diff: Differentiator,
}

impl MetricField {
    pub fn new(field: FieldRef, role: Role) -> Self {
        assert_eq!(field.shape(), Shape::Sym2, "a metric must be a symmetric 2-tensor field");
        MetricField {
            field,
            role,
            diff: Differentiator::default(),
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.diff = Differentiator::new(backend);
        self
    }

    pub fn with_differentiator(mut self, diff: Differentiator) -> Self {
        self.diff = diff;
        self
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn differentiator(&self) -> Differentiator {
        self.diff
    }

    pub fn backend(&self) -> Backend {
        self.diff.backend
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_row_slice(n, n, &self.field.eval(x))
    }

    pub fn jets(&self, x: &[f64]) -> Result<Vec<Jet>> {
        self.check_point(x)?;
        self.diff.jet(self.field.as_ref(), x)
    }

    /// Metric, inverse and connection at `x`.
    pub fn connection(&self, x: &[f64]) -> Result<LocalGeometry> {
        LocalGeometry::from_jets(x, &self.diff.first_jet(self.field.as_ref(), x)?, false)
    }

    /// Everything in [`connection`](Self::connection) plus Ricci and scalar curvature.
    pub fn geometry(&self, x: &[f64]) -> Result<LocalGeometry> {
        LocalGeometry::from_jets(x, &self.jets(x)?, true)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// A tensor value at a point: `up` contravariant and `down` covariant slots,
/// components row-major with the contravariant indices first.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue {
    pub up: usize,
    pub down: usize,
    pub n: usize,
    pub components: Vec<f64>,
    pub point: Vec<f64>,
}

impl TensorValue {
    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.up + self.down);
        let flat = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        self.components[flat]
    }

    pub fn from_matrix(m: &DMatrix<f64>, up: usize, down: usize, point: &[f64]) -> Self {
        let n = m.nrows();
        let mut components = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                components.push(m[(i, j)]);
            }
        }
        TensorValue {
            up,
            down,
            n,
            components,
            point: point.to_vec(),
        }
    }

    pub fn from_vec(v: Vec<f64>, up: usize, down: usize, point: &[f64]) -> Self {
        TensorValue {
            up,
            down,
            n: point.len(),
            components: v,
            point: point.to_vec(),
        }
    }

    /// Rank-2 values as a matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.up + self.down, 2);
        DMatrix::from_row_slice(self.n, self.n, &self.components)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Pointwise geometry of a metric: values, first derivatives, connection and
/// (optionally) curvature.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub n: usize,
    pub point: Vec<f64>,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub sqrt_det: f64,
    /// `dg[k][(i, j)] = ∂_k g_ij`
    pub dg: Vec<DMatrix<f64>>,
    gamma: Vec<f64>,
    ricci: Option<DMatrix<f64>>,
}

impl LocalGeometry {
    pub fn from_jets(x: &[f64], jets: &[Jet], curvature: bool) -> Result<Self> {
        let n = x.len();
        if jets.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: jets.len(),
            });
        }
        let g = DMatrix::from_fn(n, n, |i, j| 0.5 * (jets[i * n + j].v + jets[j * n + i].v));
        let chol = g.clone().cholesky().ok_or_else(|| Error::SingularMetric { point: x.to_vec() })?;
        let ginv = chol.inverse();
        let sqrt_det = chol.l().diagonal().iter().product::<f64>();
        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| 0.5 * (jets[i * n + j].d[k] + jets[j * n + i].d[k])))
            .collect();

        // first-kind symbols A_ijl = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let idx3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        let mut first = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    first[idx3(i, j, l)] = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let s: f64 = (0..n).map(|l| ginv[(k, l)] * first[idx3(i, j, l)]).sum();
                    gamma[idx3(k, i, j)] = s;
                    gamma[idx3(k, j, i)] = s;
                }
            }
        }

        let ricci = if curvature {
            // ∂_m Γ^k_ij
            let ddg = |m: usize, a: usize, i: usize, j: usize| {
                0.5 * (jets[i * n + j].h[m][a] + jets[j * n + i].h[m][a])
            };
            let dginv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&ginv * d * &ginv)).collect();
            let idx4 = |m: usize, k: usize, i: usize, j: usize| ((m * n + k) * n + i) * n + j;
            let mut dgamma = vec![0.0; n * n * n * n];
            for m in 0..n {
                for k in 0..n {
                    for i in 0..n {
                        for j in i..n {
                            let mut s = 0.0;
                            for l in 0..n {
                                let da = 0.5 * (ddg(m, i, j, l) + ddg(m, j, i, l) - ddg(m, l, i, j));
                                s += dginv[m][(k, l)] * first[idx3(i, j, l)] + ginv[(k, l)] * da;
                            }
                            dgamma[idx4(m, k, i, j)] = s;
                            dgamma[idx4(m, k, j, i)] = s;
                        }
                    }
                }
            }
            let mut ric = DMatrix::zeros(n, n);
            for j in 0..n {
                for l in j..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += dgamma[idx4(i, i, l, j)] - dgamma[idx4(l, i, i, j)];
                        for m in 0..n {
                            s += gamma[idx3(i, i, m)] * gamma[idx3(m, l, j)]
                                - gamma[idx3(i, l, m)] * gamma[idx3(m, i, j)];
                        }
                    }
                    ric[(j, l)] = s;
                    ric[(l, j)] = s;
                }
            }
            Some(ric)
        } else {
            None
        };

        Ok(LocalGeometry {
            n,
            point: x.to_vec(),
            g,
            ginv,
            sqrt_det,
            dg,
            gamma,
            ricci,
        })
    }

    /// `Γ^k_ij`
    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    pub fn christoffel(&self) -> TensorValue {
        TensorValue::from_vec(self.gamma.clone(), 1, 2, &self.point)
    }

    pub fn ricci(&self) -> &DMatrix<f64> {
        self.ricci
            .as_ref()
            .expect("curvature not computed; use MetricField::geometry")
    }

    pub fn scalar(&self) -> f64 {
        (&self.ginv * self.ricci()).trace()
    }

    /// `E = Ric − (R/2) g`
    pub fn einstein(&self) -> DMatrix<f64> {
        self.ricci() - &self.g * (0.5 * self.scalar())
    }

    /// `g(u, v)`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.g, u, v)
    }

    /// `|ω|` for a covector `ω`.
    pub fn conorm(&self, w: &[f64]) -> f64 {
        bilinear(&self.ginv, w, w).sqrt()
    }

    /// Raises a covector.
    pub fn raise(&self, w: &[f64]) -> Vec<f64> {
        mat_vec(&self.ginv, w)
    }

    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.g, v)
    }

    /// Full contraction `⟨A, B⟩ = A_ij B_kl g^ik g^jl`.
    pub fn pair(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (&self.ginv * a * &self.ginv * b.transpose()).trace()
    }

    pub fn trace(&self, a: &DMatrix<f64>) -> f64 {
        (&self.ginv * a).trace()
    }

    /// Covariant Hessian `∇²f_ij = ∂_ij f − Γ^k_ij ∂_k f` of a scalar jet.
    pub fn hessian(&self, f: &Jet) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let h = 0.5 * (f.h[i][j] + f.h[j][i]);
            h - (0..n).map(|k| self.gamma(k, i, j) * f.d[k]).sum::<f64>()
        })
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += u[i] * m[(i, j)] * v[j];
        }
    }
    s
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..v.len()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Christoffel symbols of the second kind, `Γ^k_ij` as a (1,2) tensor.
pub fn christoffel(metric: &MetricField, p: &[f64]) -> Result<TensorValue> {
    Ok(metric.connection(p)?.christoffel())
}

#[derive(Clone, Debug)]
pub struct Curvature {
    pub ricci: TensorValue,
    pub scalar: f64,
}

pub fn curvature(metric: &MetricField, p: &[f64]) -> Result<Curvature> {
    let geo = metric.geometry(p)?;
    Ok(Curvature {
        ricci: TensorValue::from_matrix(geo.ricci(), 0, 2, p),
        scalar: geo.scalar(),
    })
}

pub fn einstein_tensor(metric: &MetricField, p: &[f64]) -> Result<TensorValue> {
    let geo = metric.geometry(p)?;
    let e = geo.einstein();
    debug_assert!({
        let n = geo.n as f64;
        let r = geo.scalar();
        (geo.trace(&e) - (2.0 - n) / 2.0 * r).abs() <= 1e-9 * (1.0 + r.abs() + geo.ricci().norm())
    });
    Ok(TensorValue::from_matrix(&e, 0, 2, p))
}

/// The Einstein tensor of `metric` as a pointwise field (no exact jets).
pub fn einstein_field(metric: &MetricField) -> impl TensorField + '_ {
    FnField::new(metric.dim(), Shape::Sym2, move |x: &[f64]| match einstein_tensor(metric, x) {
        Ok(e) => e.components,
        Err(_) => vec![f64::NAN; x.len() * x.len()],
    })
}

/// Covariant divergence `(div K)_i = g^jk ∇_k K_ij` of a symmetric 2-tensor field.
pub fn div_sym2(metric: &MetricField, k: &dyn TensorField, p: &[f64]) -> Result<TensorValue> {
    let geo = metric.connection(p)?;
    let kj = metric.differentiator().first_jet(k, p)?;
    Ok(TensorValue::from_vec(div_from_jets(&geo, &kj), 0, 1, p))
}

pub(crate) fn div_from_jets(geo: &LocalGeometry, kj: &[Jet]) -> Vec<f64> {
    let n = geo.n;
    let kv = |i: usize, j: usize| kj[i * n + j].v;
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let gjk = geo.ginv[(j, k)];
                    if gjk == 0.0 {
                        continue;
                    }
                    let mut cov = kj[i * n + j].d[k];
                    for m in 0..n {
                        cov -= geo.gamma(m, k, i) * kv(m, j) + geo.gamma(m, k, j) * kv(i, m);
                    }
                    s += gjk * cov;
                }
            }
            s
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct KillingDeformation {
    /// `½ L_Y g`
    pub full: DMatrix<f64>,
    pub trace_free: DMatrix<f64>,
    pub div: f64,
}

pub fn killing_deformation(metric: &MetricField, y: &dyn TensorField, p: &[f64]) -> Result<KillingDeformation> {
    let geo = metric.connection(p)?;
    let yj = metric.differentiator().first_jet(y, p)?;
    Ok(killing_from_jets(&geo, &yj))
}

pub(crate) fn killing_from_jets(geo: &LocalGeometry, yj: &[Jet]) -> KillingDeformation {
    let n = geo.n;
    // nabla[i][k] = ∇_i Y^k
    let nabla = DMatrix::from_fn(n, n, |i, k| {
        yj[k].d[i] + (0..n).map(|m| geo.gamma(k, i, m) * yj[m].v).sum::<f64>()
    });
    let lowered = &nabla * &geo.g; // ∇_i Y_j
    let full = (&lowered + lowered.transpose()) * 0.5;
    let div = nabla.trace();
    let trace_free = &full - &geo.g * (div / n as f64);
    KillingDeformation { full, trace_free, div }
}

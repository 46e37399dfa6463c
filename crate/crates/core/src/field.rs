//! Tensor fields on a coordinate chart and their derivatives.
//!
//! Components are stored flat: scalars have one entry, vectors `n`, and
//! symmetric 2-tensors the full `n * n` row-major matrix.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Real, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Scalar,
    Vector,
    Sym2,
}

impl Shape {
    pub fn len(self, n: usize) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector => n,
            Shape::Sym2 => n * n,
        }
    }
}

/// A smooth field in chart coordinates.
pub trait TensorField: Send + Sync {
    fn dim(&self) -> usize;
    fn shape(&self) -> Shape;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    /// Exact value/gradient/Hessian of every component, when available.
    fn jet(&self, _x: &[f64]) -> Option<Vec<Jet>> {
        None
    }
}

/// A field written once against [`Real`]; gets exact jets for free.
pub trait FieldExpr: Send + Sync {
    fn dim(&self) -> usize;
    fn shape(&self) -> Shape;
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T>;
}

impl<E: FieldExpr> TensorField for E {
    fn dim(&self) -> usize {
        FieldExpr::dim(self)
    }
    fn shape(&self) -> Shape {
        FieldExpr::shape(self)
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.eval_generic(x)
    }
    fn jet(&self, x: &[f64]) -> Option<Vec<Jet>> {
        if x.len() > MAX_DIM {
            return None;
        }
        Some(self.eval_generic(&Jet::seed(x)))
    }
}

pub type FieldRef = Arc<dyn TensorField>;

/// Wraps a plain closure; derivatives always come from finite differences.
pub struct FnField<F> {
    dim: usize,
    shape: Shape,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dim: usize, shape: Shape, f: F) -> Self {
        FnField { dim, shape, f }
    }
}

impl<F> TensorField for FnField<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn shape(&self) -> Shape {
        self.shape
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// Pointwise sum of two fields of the same shape.
pub struct SumField {
    pub a: FieldRef,
    pub b: FieldRef,
}

impl TensorField for SumField {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn shape(&self) -> Shape {
        self.a.shape()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.a.eval(x);
        for (vi, bi) in v.iter_mut().zip(self.b.eval(x)) {
            *vi += bi;
        }
        v
    }
    fn jet(&self, x: &[f64]) -> Option<Vec<Jet>> {
        let mut v = self.a.jet(x)?;
        for (vi, bi) in v.iter_mut().zip(self.b.jet(x)?) {
            *vi += bi;
        }
        Some(v)
    }
}

/// Pointwise scaling `s * a`.
pub struct ScaledField {
    pub scale: f64,
    pub a: FieldRef,
}

impl TensorField for ScaledField {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn shape(&self) -> Shape {
        self.a.shape()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.a.eval(x).into_iter().map(|v| v * self.scale).collect()
    }
    fn jet(&self, x: &[f64]) -> Option<Vec<Jet>> {
        Some(self.a.jet(x)?.into_iter().map(|v| v * self.scale).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Analytic,
    Fd2,
    Fd4,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Backend::Analytic),
            "fd2" => Ok(Backend::Fd2),
            "fd4" => Ok(Backend::Fd4),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Analytic => "analytic",
            Backend::Fd2 => "fd2",
            Backend::Fd4 => "fd4",
        })
    }
}

/// Differentiation strategy. Finite-difference steps are relative:
/// `h_i = eps * max(1, |x_i|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Differentiator {
    pub backend: Backend,
    pub eps_first: f64,
    pub eps_second: f64,
}

impl Default for Differentiator {
    fn default() -> Self {
        Differentiator::new(Backend::Analytic)
    }
}

impl Differentiator {
    pub fn new(backend: Backend) -> Self {
        Differentiator {
            backend,
            eps_first: 1e-5,
            eps_second: 1e-4,
        }
    }

    pub fn with_steps(mut self, eps_first: f64, eps_second: f64) -> Self {
        self.eps_first = eps_first;
        self.eps_second = eps_second;
        self
    }

    /// Jets of every component of `field` at `x`.
    pub fn jet(&self, field: &dyn TensorField, x: &[f64]) -> Result<Vec<Jet>> {
        let jets = match self.backend {
            Backend::Analytic => match field.jet(x) {
                Some(j) => j,
                None => self.finite_difference(field, x, 4)?,
            },
            Backend::Fd2 => self.finite_difference(field, x, 2)?,
            Backend::Fd4 => self.finite_difference(field, x, 4)?,
        };
        if jets.iter().any(|j| !j.v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field value",
                point: x.to_vec(),
            });
        }
        Ok(jets)
    }

    /// Values and first derivatives only; cheaper for fields whose second
    /// derivatives are never needed.
    pub fn first_jet(&self, field: &dyn TensorField, x: &[f64]) -> Result<Vec<Jet>> {
        let jets = match self.backend {
            Backend::Analytic => {
                if let Some(j) = field.jet(x) {
                    j
                } else {
                    self.first_differences(field, x, 4)?
                }
            }
            Backend::Fd2 => self.first_differences(field, x, 2)?,
            Backend::Fd4 => self.first_differences(field, x, 4)?,
        };
        if jets.iter().any(|j| !j.v.is_finite() || j.d.iter().any(|d| !d.is_finite())) {
            return Err(Error::NonFinite {
                what: "field value",
                point: x.to_vec(),
            });
        }
        Ok(jets)
    }

    fn first_differences(&self, field: &dyn TensorField, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        let n = x.len();
        if n > MAX_DIM {
            return Err(Error::Dimension {
                expected: MAX_DIM,
                got: n,
            });
        }
        let f0 = field.eval(x);
        let mut out: Vec<Jet> = f0.iter().map(|&v| Jet::constant(v)).collect();
        let shift = |i: usize, s: f64| {
            let mut y = x.to_vec();
            y[i] += s;
            field.eval(&y)
        };
        for i in 0..n {
            let h = self.eps_first * x[i].abs().max(1.0);
            let d = first_stencil(order, |k| shift(i, k as f64 * h));
            for (o, di) in out.iter_mut().zip(d) {
                o.d[i] = di / h;
            }
        }
        Ok(out)
    }

    fn finite_difference(&self, field: &dyn TensorField, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        let n = x.len();
        let mut out = self.first_differences(field, x, order)?;
        let f0 = field.eval(x);
        let at = |shifts: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for &(i, s) in shifts {
                y[i] += s;
            }
            field.eval(&y)
        };
        let h: Vec<f64> = x.iter().map(|xi| self.eps_second * xi.abs().max(1.0)).collect();
        for i in 0..n {
            // diagonal
            let vals: Vec<f64> = if order == 2 {
                let p = at(&[(i, h[i])]);
                let m = at(&[(i, -h[i])]);
                (0..f0.len()).map(|c| (p[c] - 2.0 * f0[c] + m[c]) / (h[i] * h[i])).collect()
            } else {
                let p1 = at(&[(i, h[i])]);
                let m1 = at(&[(i, -h[i])]);
                let p2 = at(&[(i, 2.0 * h[i])]);
                let m2 = at(&[(i, -2.0 * h[i])]);
                (0..f0.len())
                    .map(|c| {
                        (-p2[c] + 16.0 * p1[c] - 30.0 * f0[c] + 16.0 * m1[c] - m2[c])
                            / (12.0 * h[i] * h[i])
                    })
                    .collect()
            };
            for (o, v) in out.iter_mut().zip(vals) {
                o.h[i][i] = v;
            }
            for j in (i + 1)..n {
                let mut acc = vec![0.0; f0.len()];
                let weights: &[(i32, f64)] = if order == 2 {
                    &[(-1, -0.5), (1, 0.5)]
                } else {
                    &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)]
                };
                for &(a, wa) in weights {
                    for &(b, wb) in weights {
                        let v = at(&[(i, a as f64 * h[i]), (j, b as f64 * h[j])]);
                        for c in 0..acc.len() {
                            acc[c] += wa * wb * v[c];
                        }
                    }
                }
                for (o, v) in out.iter_mut().zip(acc) {
                    let m = v / (h[i] * h[j]);
                    o.h[i][j] = m;
                    o.h[j][i] = m;
                }
            }
        }
        Ok(out)
    }

    /// Partial derivatives of a field that is only available pointwise
    /// (e.g. a curvature quantity), by central differences of the
    /// backend's order (fd4 when analytic).
    pub fn gradient_of<F>(&self, x: &[f64], f: F) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let order = if self.backend == Backend::Fd2 { 2 } else { 4 };
        let n = x.len();
        let mut grads = Vec::with_capacity(n);
        for i in 0..n {
            let h = DERIVED_STEP * x[i].abs().max(1.0);
            let mut err = None;
            let d = first_stencil(order, |k| {
                let mut y = x.to_vec();
                y[i] += k as f64 * h;
                match f(&y) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        Vec::new()
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            grads.push(d.into_iter().map(|v| v / h).collect());
        }
        Ok(grads)
    }
}

/// Relative step for differencing derived quantities (curvature, Newton
/// tensor), which carry roundoff from the jets they are built on.
const DERIVED_STEP: f64 = 1e-3;

/// Central first-derivative stencil in units of the step.
fn first_stencil<F: FnMut(i32) -> Vec<f64>>(order: usize, mut f: F) -> Vec<f64> {
    if order == 2 {
        let p = f(1);
        let m = f(-1);
        p.iter().zip(&m).map(|(a, b)| 0.5 * (a - b)).collect()
    } else {
        let p1 = f(1);
        let m1 = f(-1);
        let p2 = f(2);
        let m2 = f(-2);
        if p1.is_empty() || m1.is_empty() || p2.is_empty() || m2.is_empty() {
            return Vec::new();
        }
        (0..p1.len())
            .map(|c| (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / 12.0)
            .collect()
    }
}

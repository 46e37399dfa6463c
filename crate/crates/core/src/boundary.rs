//! Hypersurfaces of the half-space chart: the boundary `Σ = {x_n = 0}`,
//! coordinate hemispheres `{|x| = r, x_n ≥ 0}` and the corner spheres
//! `{|x| = r, x_n = 0}` where the two meet.
//!
//! Second fundamental forms are taken with respect to the normal pointing
//! into `M` (inward on `Σ`, toward the origin on hemispheres), so a round
//! sphere of radius `r` has mean curvature `(n−1)/r`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{Differentiator, FieldExpr, Shape};
use crate::geom::{bilinear, LocalGeometry, MetricField, TensorValue};
use crate::jet::{norm2, Real};

/// Relative tolerance for "the point lies on the surface".
pub const SURFACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Surface {
    Boundary,
    Hemisphere { r: f64 },
    Corner { r: f64 },
}

impl Surface {
    fn name(self) -> &'static str {
        match self {
            Surface::Boundary => "boundary",
            Surface::Hemisphere { .. } => "hemisphere",
            Surface::Corner { .. } => "corner sphere",
        }
    }

    /// Signed distance from the surface in the chart (zero on it).
    pub fn offset(self, p: &[f64]) -> f64 {
        let n = p.len();
        let xn = p[n - 1];
        match self {
            Surface::Boundary => xn,
            Surface::Hemisphere { r } => {
                if xn < 0.0 {
                    -xn + (norm2(p).sqrt() - r).abs()
                } else {
                    norm2(p).sqrt() - r
                }
            }
            Surface::Corner { r } => xn.abs() + (norm2(p).sqrt() - r).abs(),
        }
    }

    pub fn check(self, p: &[f64]) -> Result<()> {
        let scale = match self {
            Surface::Boundary => 1.0,
            Surface::Hemisphere { r } | Surface::Corner { r } => r.max(1.0),
        };
        let d = self.offset(p);
        if d.abs() > SURFACE_TOL * scale {
            return Err(Error::Domain {
                surface: self.name(),
                point: p.to_vec(),
                distance: d,
            });
        }
        Ok(())
    }
}

/// Defining function of a level-set surface, increasing away from `M`.
struct Defining {
    n: usize,
    boundary: bool,
}

impl FieldExpr for Defining {
    fn dim(&self) -> usize {
        self.n
    }
    fn shape(&self) -> Shape {
        Shape::Scalar
    }
    fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
        if self.boundary {
            vec![-x[self.n - 1]]
        } else {
            vec![norm2(x).sqrt()]
        }
    }
}

/// Orthonormal (Euclidean) basis of the hyperplane orthogonal to `w`.
pub fn euclidean_tangent_basis(w: &[f64]) -> Vec<Vec<f64>> {
    let n = w.len();
    let wn = norm2(w).sqrt();
    let unit: Vec<f64> = w.iter().map(|v| v / wn).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    // start from the coordinate axes least aligned with w
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| unit[a].abs().partial_cmp(&unit[b].abs()).unwrap());
    for &k in &axes {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for u in std::iter::once(&unit).chain(basis.iter()) {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for i in 0..n {
                v[i] -= d * u[i];
            }
        }
        let len = norm2(&v).sqrt();
        if len > 1e-8 {
            basis.push(v.iter().map(|x| x / len).collect());
        }
    }
    basis
}

/// Unit normal, a tangent basis and the area element of a surface at a point.
#[derive(Clone, Debug)]
pub struct SurfaceFrame {
    pub surface: Surface,
    pub point: Vec<f64>,
    /// Unit normal. On `Σ` and on hemispheres it points out of `M`; on a
    /// corner sphere it is the unit conormal inside `Σ`, pointing away from
    /// the origin.
    pub normal: Vec<f64>,
    /// Chart vectors spanning the tangent space.
    pub tangents: Vec<Vec<f64>>,
    /// Ratio of the induced area element of `g` to the Euclidean one.
    pub area_density: f64,
    /// Induced metric in the `tangents` basis.
    pub induced: DMatrix<f64>,
}

pub fn surface_frame(metric: &MetricField, surface: Surface, p: &[f64]) -> Result<SurfaceFrame> {
    let n = metric.dim();
    if p.len() != n {
        return Err(Error::Dimension { expected: n, got: p.len() });
    }
    surface.check(p)?;
    let geo = metric.connection(p)?;
    Ok(frame_at(&geo, surface, p))
}

pub(crate) fn frame_at(geo: &LocalGeometry, surface: Surface, p: &[f64]) -> SurfaceFrame {
    let n = geo.n;
    match surface {
        Surface::Boundary | Surface::Hemisphere { .. } => {
            let dphi: Vec<f64> = if let Surface::Boundary = surface {
                let mut v = vec![0.0; n];
                v[n - 1] = -1.0;
                v
            } else {
                let r = norm2(p).sqrt();
                p.iter().map(|x| x / r).collect()
            };
            let tangents = if let Surface::Boundary = surface {
                (0..n - 1)
                    .map(|a| {
                        let mut v = vec![0.0; n];
                        v[a] = 1.0;
                        v
                    })
                    .collect()
            } else {
                euclidean_tangent_basis(&dphi)
            };
            let conorm = geo.conorm(&dphi);
            let normal: Vec<f64> = geo.raise(&dphi).iter().map(|v| v / conorm).collect();
            let induced = gram(&geo.g, &tangents);
            let area_density = geo.sqrt_det * conorm / norm2(&dphi).sqrt();
            SurfaceFrame {
                surface,
                point: p.to_vec(),
                normal,
                tangents,
                area_density,
                induced,
            }
        }
        Surface::Corner { .. } => {
            // work inside Σ with its induced metric σ = g restricted to x' directions
            let m = n - 1;
            let sigma = geo.g.view((0, 0), (m, m)).into_owned();
            let sigma_inv = sigma.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(m, m, f64::NAN));
            let rp = norm2(&p[..m]).sqrt();
            let dpsi: Vec<f64> = p[..m].iter().map(|x| x / rp).collect();
            let up: Vec<f64> = (0..m).map(|a| (0..m).map(|b| sigma_inv[(a, b)] * dpsi[b]).sum()).collect();
            let conorm = up.iter().zip(&dpsi).map(|(a, b)| a * b).sum::<f64>().sqrt();
            let mut normal: Vec<f64> = up.iter().map(|v| v / conorm).collect();
            normal.push(0.0);
            let tangents: Vec<Vec<f64>> = euclidean_tangent_basis(&dpsi)
                .into_iter()
                .map(|mut v| {
                    v.push(0.0);
                    v
                })
                .collect();
            let induced = gram(&geo.g, &tangents);
            let area_density = sigma.determinant().sqrt() * conorm;
            SurfaceFrame {
                surface,
                point: p.to_vec(),
                normal,
                tangents,
                area_density,
                induced,
            }
        }
    }
}

fn gram(g: &DMatrix<f64>, vs: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(vs.len(), vs.len(), |a, b| bilinear(g, &vs[a], &vs[b]))
}

/// Second fundamental form, induced metric and mean curvature of a surface in
/// the basis of its [`SurfaceFrame`] tangents.
#[derive(Clone, Debug)]
pub struct ExtrinsicGeometry {
    pub tangents: Vec<Vec<f64>>,
    pub second_form: DMatrix<f64>,
    pub induced: DMatrix<f64>,
    pub mean_curvature: f64,
}

impl ExtrinsicGeometry {
    /// `J = Π − H σ`
    pub fn newton(&self) -> DMatrix<f64> {
        &self.second_form - &self.induced * self.mean_curvature
    }
}

pub(crate) fn extrinsic_at(geo: &LocalGeometry, diff: &Differentiator, surface: Surface, p: &[f64]) -> Result<ExtrinsicGeometry> {
    let frame = frame_at(geo, surface, p);
    let n = geo.n;
    let phi = Defining {
        n,
        boundary: matches!(surface, Surface::Boundary),
    };
    let jet = diff.jet(&phi, p)?[0];
    let hess = geo.hessian(&jet);
    let conorm = geo.conorm(&jet.d[..n]);
    let t = &frame.tangents;
    let k = t.len();
    let second_form = DMatrix::from_fn(k, k, |a, b| bilinear(&hess, &t[a], &t[b]) / conorm);
    let induced = frame.induced;
    let sinv = induced.clone().try_inverse().ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    let mean_curvature = (&sinv * &second_form).trace();
    Ok(ExtrinsicGeometry {
        tangents: frame.tangents,
        second_form,
        induced,
        mean_curvature,
    })
}

/// Extrinsic geometry of `Σ` or a hemisphere at `p`. Corner spheres have
/// codimension two and are rejected.
pub fn extrinsic_geometry(metric: &MetricField, surface: Surface, p: &[f64]) -> Result<ExtrinsicGeometry> {
    if let Surface::Corner { .. } = surface {
        return Err(Error::Incompatible("corner spheres have codimension two".into()));
    }
    surface.check(p)?;
    let geo = metric.connection(p)?;
    extrinsic_at(&geo, &metric.differentiator(), surface, p)
}

/// Second fundamental form of `Σ` at `p` in the coordinates `x_1 … x_{n−1}`.
pub fn second_fundamental_form(metric: &MetricField, p: &[f64]) -> Result<TensorValue> {
    let ex = extrinsic_geometry(metric, Surface::Boundary, p)?;
    Ok(TensorValue::from_matrix(&ex.second_form, 0, 2, &p[..p.len() - 1]))
}

pub fn mean_curvature(metric: &MetricField, p: &[f64]) -> Result<f64> {
    Ok(extrinsic_geometry(metric, Surface::Boundary, p)?.mean_curvature)
}

/// Newton tensor `J = Π − H σ` of `Σ` at `p` in the coordinates `x_1 … x_{n−1}`.
pub fn newton_tensor(metric: &MetricField, p: &[f64]) -> Result<TensorValue> {
    let ex = extrinsic_geometry(metric, Surface::Boundary, p)?;
    Ok(TensorValue::from_matrix(&ex.newton(), 0, 2, &p[..p.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::Model;
    use crate::field::FieldExpr;
    use crate::geom::Role;
    use std::sync::Arc;

    /// Flat metric written in a chart where `Σ` is curved: the pullback of δ
    /// under `(x, y, z) ↦ (x, y, z + κ(x² + y²)/2)`.
    struct Bent {
        k: f64,
    }
    impl FieldExpr for Bent {
        fn dim(&self) -> usize {
            3
        }
        fn shape(&self) -> Shape {
            Shape::Sym2
        }
        fn eval_generic<T: Real>(&self, x: &[T]) -> Vec<T> {
            // F(x) = (x0, x1, x2 + k(x0² + x1²)/2), g = DFᵀ DF
            let d = [x[0] * self.k, x[1] * self.k];
            let mut g = crate::asym::identity(3, T::one());
            for a in 0..2 {
                for b in 0..2 {
                    g[a * 3 + b] += d[a] * d[b];
                }
                g[a * 3 + 2] += d[a];
                g[2 * 3 + a] += d[a];
            }
            g
        }
    }

    #[test]
    fn flat_boundary_is_totally_geodesic() {
        let delta = Model::Flat.reference(3);
        let p = [1.0, 2.0, 0.0];
        assert!(second_fundamental_form(&delta, &p).unwrap().max_abs() < 1e-15);
        assert_eq!(mean_curvature(&delta, &p).unwrap(), 0.0);
        let f = surface_frame(&delta, Surface::Boundary, &p).unwrap();
        assert_eq!(f.normal, vec![0.0, 0.0, -1.0]);
        assert_eq!(f.area_density, 1.0);
        let b = Model::Hyperbolic.reference(3);
        assert!(second_fundamental_form(&b, &[0.2, -0.4, 0.0]).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn paraboloid_curves_toward_the_interior() {
        // M is {z ≥ κ(x²+y²)/2}: the boundary bends toward M, so with the
        // inward normal Π = κ σ at the vertex.
        let g = MetricField::new(Arc::new(Bent { k: 0.7 }), Role::Physical);
        let pi = second_fundamental_form(&g, &[0.0, 0.0, 0.0]).unwrap();
        assert!((pi.get(&[0, 0]) - 0.7).abs() < 1e-14);
        assert!((pi.get(&[1, 1]) - 0.7).abs() < 1e-14);
        assert!(pi.get(&[0, 1]).abs() < 1e-14);
        let j = newton_tensor(&g, &[0.0, 0.0, 0.0]).unwrap();
        assert!((j.get(&[0, 0]) + 0.7).abs() < 1e-14);
        // tr J = (2 − n) H
        assert!((j.get(&[0, 0]) + j.get(&[1, 1]) + 1.4).abs() < 1e-14);
    }

    #[test]
    fn round_hemisphere() {
        let delta = Model::Flat.reference(4);
        let p = [1.0, -2.0, 0.5, 2.0];
        let r = norm2(&p).sqrt();
        let ex = extrinsic_geometry(&delta, Surface::Hemisphere { r }, &p).unwrap();
        assert!((ex.mean_curvature - 3.0 / r).abs() < 1e-13);
        assert!((&ex.second_form - &ex.induced / r).amax() < 1e-14);
        let f = surface_frame(&delta, Surface::Hemisphere { r }, &p).unwrap();
        for (i, v) in f.normal.iter().enumerate() {
            assert!((v - p[i] / r).abs() < 1e-15);
        }
        assert!((f.induced.clone() - DMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn frames_reject_points_off_the_surface() {
        let delta = Model::Flat.reference(3);
        assert!(matches!(
            surface_frame(&delta, Surface::Boundary, &[1.0, 0.0, 0.1]),
            Err(Error::Domain { .. })
        ));
        assert!(surface_frame(&delta, Surface::Hemisphere { r: 2.0 }, &[2.0, 0.0, 0.1]).is_err());
        assert!(surface_frame(&delta, Surface::Hemisphere { r: 2.0 }, &[0.0, 0.0, -2.0]).is_err());
        assert!(surface_frame(&delta, Surface::Corner { r: 2.0 }, &[0.0, 2.0, 0.0]).is_ok());
    }

    #[test]
    fn corner_frame_in_conformal_metric() {
        // g = 4 δ: conormal has Euclidean length 1/2, area density 2^{n-2}
        struct Four;
        impl FieldExpr for Four {
            fn dim(&self) -> usize {
                4
            }
            fn shape(&self) -> Shape {
                Shape::Sym2
            }
            fn eval_generic<T: Real>(&self, _x: &[T]) -> Vec<T> {
                crate::asym::identity(4, T::cst(4.0))
            }
        }
        let g = MetricField::new(Arc::new(Four), Role::Physical);
        let f = surface_frame(&g, Surface::Corner { r: 5.0 }, &[3.0, 0.0, 4.0, 0.0]).unwrap();
        assert!((f.normal[0] - 0.3).abs() < 1e-15 && (f.normal[2] - 0.4).abs() < 1e-15);
        assert_eq!(f.normal[3], 0.0);
        assert!((f.area_density - 4.0).abs() < 1e-13);
        let h = surface_frame(&g, Surface::Hemisphere { r: 5.0 }, &[3.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((h.area_density - 8.0).abs() < 1e-13);
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_orthogonal() {
        let w = [0.3, -1.2, 0.0, 2.0, 0.5];
        let b = euclidean_tangent_basis(&w);
        assert_eq!(b.len(), 4);
        for (i, u) in b.iter().enumerate() {
            let d: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-14);
            for (j, v) in b.iter().enumerate() {
                let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}

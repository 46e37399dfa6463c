//! Reference values produced by `tests/oracles/generate.py` (sympy) and
//! frozen here; see `tests/oracles/values.txt` for the full output.
#![allow(clippy::excessive_precision)]

use std::sync::Arc;

use halfmass::asym::HyperbolicPolar;
use halfmass::boundary::{mean_curvature, newton_tensor, second_fundamental_form};
use halfmass::catalog::{build, MetricSpec};
use halfmass::geom::{christoffel, curvature, einstein_tensor, MetricField, Role};
use halfmass::invariants::{hyp_mass_charge, mass_adm, InvariantRequest, Ladder};
use halfmass::quad::{integrate_surface, Measure, QuadratureRule, SurfacePatch};

const GENERIC_EINSTEIN: [f64; 9] = [
    -1.14466136758115057e-04,
    2.76650470567173283e-05,
    -1.34992198240422266e-03,
    2.76650470567173283e-05,
    9.51200390182649347e-04,
    -6.27038210493035636e-05,
    -1.34992198240422266e-03,
    -6.27038210493035636e-05,
    -9.05500885143112506e-04,
];
const GENERIC_SCALAR: f64 = 4.79652605881150705e-05;
const GENERIC_SECOND_FORM: [f64; 4] = [
    6.24029181648965412e-04,
    1.20348485032300461e-03,
    1.20348485032300461e-03,
    -6.24029181648965412e-04,
];
const GENERIC_MEAN_CURVATURE: f64 = 0.0;
const GENERIC_NEWTON: [f64; 4] = GENERIC_SECOND_FORM;
const SCHWARZSCHILD_FLUX_R4: f64 = 7.11914062500000000e-01;
const SCHWARZSCHILD_HEMISPHERE_AREA_R4: f64 = 1.61031167189083078e+02;
const HYPERBOLIC_GAMMA_RHO_THETA_THETA: f64 = -1.81343020392350929e+00;
const ADS_CHARGE_RHO3: f64 = 5.00986786977383636e-01;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn generic_perturbation_einstein_tensor() {
    let m = build(&MetricSpec::new("generic_perturbation", 3)).unwrap();
    let p = [6.0, 0.0, 8.0];
    let e = einstein_tensor(&m.physical, &p).unwrap().matrix();
    for i in 0..3 {
        for j in 0..3 {
            assert!(close(e[(i, j)], GENERIC_EINSTEIN[3 * i + j], 1e-12), "E[{i}{j}] = {}", e[(i, j)]);
        }
    }
    let r = curvature(&m.physical, &p).unwrap().scalar;
    assert!(close(r, GENERIC_SCALAR, 1e-12), "{r}");
}

#[test]
fn generic_perturbation_boundary_geometry() {
    let m = build(&MetricSpec::new("generic_perturbation", 3)).unwrap();
    let q = [4.8, 6.4, 0.0];
    let pi = second_fundamental_form(&m.physical, &q).unwrap().matrix();
    let j = newton_tensor(&m.physical, &q).unwrap().matrix();
    for a in 0..2 {
        for b in 0..2 {
            assert!(close(pi[(a, b)], GENERIC_SECOND_FORM[2 * a + b], 1e-12));
            assert!(close(j[(a, b)], GENERIC_NEWTON[2 * a + b], 1e-12));
        }
    }
    assert!(close(mean_curvature(&m.physical, &q).unwrap(), GENERIC_MEAN_CURVATURE, 1e-12));
}

#[test]
fn hyperbolic_polar_christoffel() {
    let b = MetricField::new(Arc::new(HyperbolicPolar { n: 3 }), Role::Physical);
    let g = christoffel(&b, &[1.0, 0.7, 0.2]).unwrap();
    assert!(close(g.get(&[0, 1, 1]), HYPERBOLIC_GAMMA_RHO_THETA_THETA, 1e-12));
}

#[test]
fn schwarzschild_conformal_christoffel() {
    // Γ^k_ij = (2/u)(δ_ki ∂_j u + δ_kj ∂_i u − δ_ij ∂_k u), u = 1 + 1/(2r), at (2, 0, 0)
    let m = build(&MetricSpec::new("schwarzschild_half", 3)).unwrap();
    let g = christoffel(&m.physical, &[2.0, 0.0, 0.0]).unwrap();
    let (u, du) = (1.25, -0.125);
    let d = |k: usize| if k == 0 { du } else { 0.0 };
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let dl = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                let want = 2.0 / u * (dl(k, i) * d(j) + dl(k, j) * d(i) - dl(i, j) * d(k));
                assert!(close(g.get(&[k, i, j]), want, 1e-13), "{k}{i}{j}");
            }
        }
    }
}

#[test]
fn schwarzschild_hemisphere_area_and_flux() {
    let m = build(&MetricSpec::new("schwarzschild_half", 3)).unwrap();
    let rule = QuadratureRule::default();
    let area = integrate_surface(|_| Ok(1.0), &SurfacePatch::hemisphere(3, 4.0), &rule, Measure::Metric(&m.physical)).unwrap();
    assert!(close(area, SCHWARZSCHILD_HEMISPHERE_AREA_R4, 1e-9 * area));
    let req = InvariantRequest::new(m.charge_context(0), m.model, vec![4.0, 8.0, 16.0], rule);
    let r = mass_adm(&req).unwrap();
    assert!(close(r.samples[0].value, SCHWARZSCHILD_FLUX_R4, 1e-12));
}

#[test]
fn ads_schwarzschild_charge_sample() {
    let m = build(&MetricSpec::new("ads_schwarzschild_half", 3)).unwrap();
    let ladder = Ladder::default_for(m.model);
    assert_eq!(ladder.start, 3.0);
    let req = InvariantRequest::new(m.charge_context(0), m.model, ladder.radii(m.model).unwrap(), QuadratureRule::default());
    let r = hyp_mass_charge(&req, 0).unwrap();
    assert!(close(r.samples[0].value, ADS_CHARGE_RHO3, 1e-9), "{}", r.samples[0].value);
}

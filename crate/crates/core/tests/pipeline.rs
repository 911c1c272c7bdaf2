use std::f64::consts::PI;

use slagkit::ambient::survey_product;
use slagkit::curves::{gamma_period, gamma_special_at, integrate_alpha, integrate_gamma, CurveParams};
use slagkit::legendrian::{geodesic_sphere, great_circle};
use slagkit::numeric::linspace;
use slagkit::pde::{reconstruct_graph, solve_dirichlet, BoundaryCatalog, PotentialGrid, SolverOptions, Weights};
use slagkit::surfaces::{angle_condition, product_surface, Provenance};

#[test]
fn closed_gamma_gives_periodic_surface_with_constant_lift() {
    let b = [1.0, 0.5];
    let period = gamma_period(0, 0, b).unwrap().period;
    let alpha = integrate_alpha(CurveParams::alpha(0, 0, [1.0, 1.5]).unwrap(), 1.0, 1e-10).unwrap();
    let gamma = integrate_gamma(CurveParams::gamma(0, 0, b).unwrap(), period, 1e-10).unwrap();
    let first = gamma.points[0];
    let last = gamma.points[gamma.len() - 1];
    let start = gamma.points[gamma.len() / 2];
    assert!((first[0] - last[0]).norm() < 1e-8 && (first[1] - last[1]).norm() < 1e-8);
    // one radial period turns both components by pi
    assert!((first[0] + start[0]).norm() < 1e-8 && (first[1] + start[1]).norm() < 1e-8);

    let s = product_surface(&alpha, &gamma).unwrap();
    assert!(angle_condition(&s).unwrap().condition_spread() < 1e-8);
    let survey = survey_product(&s, &geodesic_sphere(0), &geodesic_sphere(0), 50).unwrap();
    assert!(survey.stats.max_deviation < 1e-8);
}

#[test]
fn special_product_lifts_through_great_circle() {
    let alpha = integrate_alpha(CurveParams::alpha(1, 0, [1.0, 1.0]).unwrap(), 1.0, 1e-10).unwrap();
    let gamma = gamma_special_at(1, 0, &linspace(0.0, 2.0 * PI, 25)).unwrap();
    let s = product_surface(&alpha, &gamma).unwrap();
    let survey = survey_product(&s, &great_circle(), &geodesic_sphere(0), 200).unwrap();
    assert!(survey.stats.std_dev < 1e-8);
    assert!(survey.max_identity_residual < 1e-10);
}

#[test]
fn harmonic_graph_has_constant_angle() {
    let cat = BoundaryCatalog::Quartic;
    let w = Weights::new(0, 0, 1e-6, 1e-6).unwrap();
    let b = PotentialGrid::from_fn(w, [0.5, 1.5, 0.5, 1.5], (33, 33), |x, y| cat.eval(x, y)).unwrap();
    let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 10)).unwrap();
    let s = reconstruct_graph(&sol.grid).surface(0, 0, 1e-6, 1e-6).unwrap();
    assert!(matches!(s.provenance, Provenance::Graph { .. }));
    let r = angle_condition(&s).unwrap();
    // the discrete pair is only approximately conjugate, so the angle is constant to O(dx^2)
    assert!(r.condition_spread() < 5.0 * sol.grid.dx * sol.grid.dx, "{}", r.condition_spread());
    assert!(r.condition.iter().all(|c| (c.abs() - PI).abs() < 0.1));
}

use std::f64::consts::PI;

use tubenorm::end_cap::{
    alpha_constant, boundary_comparison, build_cap_domain, comparison_bound, decay_check, solve_cap_psi, BoundaryTag,
    CAP_PHI_INTEGRAL,
};
use tubenorm::Error;

#[test]
fn mesh_covers_the_capped_strip() {
    let d = build_cap_domain(4.0, 0.05).unwrap();
    let exact = 2.0 * 4.0 + 0.5 * PI;
    assert!((d.area() - exact).abs() < 0.01, "{}", d.area());
    assert!(d.max_diameter() <= 0.05 + 1e-12);
    let on = |tag| d.tags.iter().filter(|t| **t == Some(tag)).count();
    assert!(on(BoundaryTag::StripSide) > 0);
    assert!(on(BoundaryTag::Truncation) > 0);
    assert!(on(BoundaryTag::CapArc) > 0);
}

#[test]
fn bad_cap_parameters_fail() {
    assert!(matches!(build_cap_domain(1.0, 0.05), Err(Error::InvalidArgument(_) | Error::MeshFailure(_))));
    assert!(build_cap_domain(5.0, 0.5).is_err());
    assert!(build_cap_domain(5.0, 0.0).is_err());
}

#[test]
fn psi_decays_into_the_strip() {
    let sol = solve_cap_psi(&build_cap_domain(6.0, 0.05).unwrap()).unwrap();
    let stations = decay_check(&sol);
    assert_eq!(stations.len(), 5);
    for s in &stations {
        assert!(s.margin > 0.0, "{s:?}");
    }
    assert!(stations.windows(2).all(|w| w[1].max_abs_psi < w[0].max_abs_psi));
}

#[test]
fn coarse_alpha_is_close() {
    let est = alpha_constant(0.05, 6.0).unwrap();
    assert!((est.alpha - 0.139917).abs() < 2e-3, "{est:?}");
    assert!(est.error_budget > 0.0);
    assert!((est.fine - est.alpha).abs() < (est.coarse - est.alpha).abs());
}

#[test]
fn comparison_function_bounds_psi_on_the_boundary() {
    let rep = comparison_bound();
    assert!((rep.integral + 0.5875).abs() < 1e-3);
    assert!(rep.positive);
    assert!((rep.lower_bound - (CAP_PHI_INTEGRAL + rep.integral)).abs() < 1e-15);
    assert!(boundary_comparison(&build_cap_domain(4.0, 0.05).unwrap()) >= 0.0);
}

use std::f64::consts::PI;

use grunsky::abelian::{alpha_norm, extremal_omega, pairing, BeltramiSpec, PolarTerm};
use grunsky::families::{beltrami_oracle, family_beltrami, family_map, BeltramiSource, FamilySpec};
use grunsky::quadrature::PolarGrid;
use grunsky::C64;
use proptest::prelude::*;

fn term() -> impl Strategy<Value = PolarTerm> {
    (0.0..0.3f64, 0.0..6.3f64, 0u8..4, -5i32..3)
        .prop_map(|(m, ph, a, k)| PolarTerm::new(C64::from_polar(m, ph), a as f64, k))
}

fn spec() -> impl Strategy<Value = BeltramiSpec> {
    prop::collection::vec(term(), 1..4).prop_map(|t| BeltramiSpec::polar_separable(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alpha_is_homogeneous(mu in spec(), s in 0.0..1.0f64, ph in 0.0..6.3f64, n in 1usize..8) {
        let base = alpha_norm(&mu, n).unwrap().sigma;
        let scaled = alpha_norm(&mu.scaled(C64::from_polar(s, ph)).unwrap(), n).unwrap().sigma;
        prop_assert!((scaled - s * base).abs() < 1e-12, "{scaled} vs {}", s * base);
    }

    #[test]
    fn alpha_is_rotation_invariant(mu in spec(), phi in 0.0..6.3f64, n in 1usize..8) {
        let base = alpha_norm(&mu, n).unwrap().sigma;
        let rot = alpha_norm(&mu.rotated(phi).unwrap(), n).unwrap().sigma;
        prop_assert!((rot - base).abs() < 1e-12, "{rot} vs {base}");
    }

    #[test]
    fn extremal_pairing_attains_sigma(mu in spec(), n in 1usize..6) {
        let res = alpha_norm(&mu, n).unwrap();
        let ext = extremal_omega(&res, n).unwrap();
        if !ext.degenerate {
            prop_assert!((ext.a1_norm - 1.0).abs() < 1e-10);
            let p = pairing(&mu, &ext.psi).unwrap().norm();
            prop_assert!((p - res.sigma).abs() < 1e-10, "{p} vs {}", res.sigma);
        }
    }
}

#[test]
fn teichmueller_form_has_equal_norms() {
    // mu = k |psi0| / psi0 with psi0 = 1 / pi is the constant k
    for k in [0.1, 0.45, 0.9] {
        let psi0 = C64::new(1.0 / PI, 0.0);
        let mu = BeltramiSpec::single_term(psi0.conj() / psi0.norm() * k, 0.0, 0).unwrap();
        for n in [1, 2, 8, 32] {
            assert!((alpha_norm(&mu, n).unwrap().sigma - k).abs() < 1e-12);
        }
    }
}

#[test]
fn catalog_coefficients_respect_symmetry() {
    let spec = FamilySpec::power(3, C64::new(0.5, 0.4)).unwrap();
    let map = family_map(&spec, 60).unwrap();
    for (i, b) in map.tail().iter().enumerate() {
        let k = i + 1;
        if k % 3 != 2 {
            assert_eq!(*b, C64::new(0.0, 0.0), "b_{k}");
        }
    }
    let map5 = family_map(&FamilySpec::power(5, C64::new(0.5, 0.0)).unwrap(), 60).unwrap();
    for (i, b) in map5.tail().iter().enumerate() {
        if (i + 1) % 5 != 4 {
            assert_eq!(*b, C64::new(0.0, 0.0));
        }
    }
}

#[test]
fn closed_form_sup_norm_is_t() {
    for t in [C64::new(0.3, 0.0), C64::new(-0.2, 0.6), C64::new(0.0, 0.85)] {
        for spec in [FamilySpec::joukowski(t).unwrap(), FamilySpec::power(3, t).unwrap()] {
            let b = family_beltrami(&spec).unwrap();
            assert_eq!(b.source, BeltramiSource::ClosedForm);
            assert_eq!(b.spec.sup_norm(), t.norm());
        }
    }
}

#[test]
fn fitted_coefficients_match_oracle() {
    let grid = PolarGrid::gauss_legendre(16, 64);
    for spec in [
        FamilySpec::power(5, C64::new(0.4, 0.2)).unwrap(),
        FamilySpec::power(7, C64::new(0.6, 0.0)).unwrap(),
    ] {
        let fitted = family_beltrami(&spec).unwrap();
        assert_eq!(fitted.source, BeltramiSource::Fitted);
        let oracle = beltrami_oracle(&spec, &grid).unwrap();
        let grunsky::abelian::BeltramiKind::Sampled(s) = oracle.kind() else { unreachable!() };
        for (z, v) in grid.points().zip(s.values()) {
            assert!((fitted.spec.eval(z).unwrap() - v).norm() < 1e-6, "{:?} at {z}", spec.family);
        }
    }
}

#[test]
fn sampled_path_matches_closed_form() {
    let spec = FamilySpec::power(3, C64::new(0.5, 0.0)).unwrap();
    let closed = family_beltrami(&spec).unwrap().spec;
    let sampled = closed.to_sampled(PolarGrid::standard()).unwrap();
    for n in [2, 8, 16] {
        let a = alpha_norm(&closed, n).unwrap().sigma;
        let b = alpha_norm(&sampled, n).unwrap().sigma;
        assert!((a - b).abs() < 1e-12);
    }
}

use grunsky::families::{family_map, Family};
use grunsky::grunsky::grunsky_norm;
use grunsky::verify::{
    metric_lambda_kappa, origin_slope, unit_alpha, upper_metric, verify_theorem1_ladder,
};
use grunsky::{C64, DEFAULT_LADDER, DEFAULT_RADII};

const CATALOG: [Family; 4] = [Family::Joukowski, Family::Power(3), Family::Power(5), Family::Power(7)];

#[test]
fn sandwich_on_every_family() {
    for family in CATALOG {
        for rep in verify_theorem1_ladder(family, &DEFAULT_RADII, &DEFAULT_LADDER).unwrap() {
            for row in &rep.rows {
                assert!(row.sandwich_ok, "{family} N={} r={}: {row:?}", rep.n, row.r);
                assert!(row.kappa + 1e-9 >= row.lower);
            }
        }
    }
}

#[test]
fn origin_slope_is_alpha() {
    for family in CATALOG {
        let slope = origin_slope(family, 16).unwrap();
        let alpha = unit_alpha(family, 16).unwrap();
        assert!((slope - alpha).abs() < 1e-3, "{family}: slope {slope}, alpha {alpha}");
    }
}

#[test]
fn metric_sandwich_near_origin() {
    for family in CATALOG {
        let alpha = unit_alpha(family, 12).unwrap();
        for r in [0.0, 0.05, 0.1, 0.2, 0.3] {
            let s = metric_lambda_kappa(family, r, 12, 64, 9).unwrap();
            let exact = upper_metric(alpha, r);
            let linear = alpha + (1.0 - alpha * alpha) * r;
            let msg = format!("{family} r={r}: lambda {} alpha {alpha} lambda_alpha {exact}", s.lambda_est);
            assert!(s.lambda_est >= alpha - 1e-6, "{msg}");
            assert!(s.lambda_est <= exact + 1e-6, "{msg}");
            // The linearized majorant with slack 0.05 may only fail where the
            // exact majorant's second-order remainder alone exceeds the slack.
            assert!(s.lambda_est <= linear + 0.05 || exact > linear + 0.05, "{msg}");
        }
    }
}

#[test]
fn linearized_metric_bound_on_joukowski_needs_second_order() {
    // alpha = 1 and lambda = 1 / (1 - r^2) exactly; at r = 0.3 the r^2 term is 0.09.
    let s = metric_lambda_kappa(Family::Joukowski, 0.3, 8, 16, 0).unwrap();
    assert!((s.lambda_est - 1.0 / 0.91).abs() < 1e-8);
    assert!(s.lambda_est > 1.0 + 0.05);
}

#[test]
fn kappa_is_phase_invariant() {
    for family in CATALOG {
        let base = grunsky_norm(&family_map(&family.at(C64::new(0.55, 0.0)).unwrap(), 31).unwrap(), &[4, 16])
            .unwrap();
        for phi in [0.3, 1.7, 4.0] {
            let t = C64::from_polar(0.55, phi);
            let rot = grunsky_norm(&family_map(&family.at(t).unwrap(), 31).unwrap(), &[4, 16]).unwrap();
            for (a, b) in base.rows.iter().zip(&rot.rows) {
                assert!((a.kappa - b.kappa).abs() < 1e-10, "{family} phi={phi}: {} vs {}", a.kappa, b.kappa);
            }
        }
    }
}

use approx::assert_relative_eq;
use macroqubit::model::*;
use macroqubit::{Error, C64};
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn ohmic() -> ReservoirSpec {
    ReservoirSpec::new(1.0, 1e-4, 10.0).unwrap()
}

#[test]
fn density_vanishes_at_origin() {
    for s in [0.3, 0.5, 1.0, 1.5, 2.0] {
        let r = ReservoirSpec::new(s, 1e-4, 10.0).unwrap();
        assert_eq!(spectral_density(0.0, &r).unwrap(), 0.0);
    }
}

#[test]
fn density_at_unit_frequency() {
    let v = spectral_density(1.0, &ohmic()).unwrap();
    assert_relative_eq!(v, 1e-4 * (-0.1f64).exp(), max_relative = 1e-15);
    assert_relative_eq!(v, 9.0484e-5, max_relative = 1e-4);
}

#[test]
fn sub_and_super_geometric_mean() {
    let sub = spectral_density(1.0, &ReservoirSpec::new(0.5, 1e-4, 10.0).unwrap()).unwrap();
    let sup = spectral_density(1.0, &ReservoirSpec::new(1.5, 1e-4, 10.0).unwrap()).unwrap();
    let mid = spectral_density(1.0, &ohmic()).unwrap();
    assert_relative_eq!((sub * sup).sqrt(), mid, max_relative = 1e-14);
}

#[test]
fn negative_frequency_rejected() {
    assert!(matches!(spectral_density(-1.0, &ohmic()), Err(Error::Domain { .. })));
}

#[test]
fn density_decays() {
    let r = ohmic();
    assert!(spectral_density(2000.0, &r).unwrap() < 1e-80);
}

#[test]
fn moment_examples() {
    let r = ohmic();
    assert_relative_eq!(cutoff_moment(-1, &r).unwrap(), 1e-3, max_relative = 1e-14);
    assert_relative_eq!(cutoff_moment(0, &r).unwrap(), 1e-2, max_relative = 1e-14);
    let half = ReservoirSpec::new(0.5, 1e-4, 10.0).unwrap();
    assert_relative_eq!(cutoff_moment(-1, &half).unwrap(), 1e-4 * 10.0 * PI.sqrt(), max_relative = 1e-14);
}

#[test]
fn divergent_moment() {
    let r = ReservoirSpec::new(0.5, 1e-4, 10.0).unwrap();
    assert!(matches!(cutoff_moment(-2, &r), Err(Error::DivergentMoment(_))));
    assert!(cutoff_moment(-1, &r).is_ok());
}

#[test]
fn isolated_examples() {
    let sys = SystemParams::default();
    let d = sys.delta;
    assert_eq!(isolated_probability(0.0, &sys).unwrap(), 0.0);
    assert_relative_eq!(isolated_probability(PI / d, &sys).unwrap(), 1.0, max_relative = 1e-15);
    assert_relative_eq!(isolated_probability(PI / (2.0 * d), &sys).unwrap(), 0.5, max_relative = 1e-14);
}

#[test]
fn system_params_invariants() {
    assert!(SystemParams::new(0.1, 1e-3, 8f64.sqrt()).is_ok());
    assert!(SystemParams::new(0.0, 1e-3, 1.0).is_err());
    assert!(SystemParams::new(0.1, -1e-3, 1.0).is_err());
    assert!(SystemParams::new(0.1, 2.0, 1.0).is_err());
    // Outside the quasi-classical regime: accepted with a warning.
    let p = SystemParams::new(2.0, 1e-3, 1.0).unwrap();
    assert!(!p.is_quasi_classical());
    let d = SystemParams::default();
    assert_eq!(d.omega, 8f64.sqrt());
    assert_eq!(d.x12, 1.0);
}

#[test]
fn reservoir_invariants_and_class() {
    assert!(ReservoirSpec::new(0.0, 1e-4, 10.0).is_err());
    assert!(ReservoirSpec::new(1.0, -1e-4, 10.0).is_err());
    assert!(ReservoirSpec::new(1.0, 1e-4, 0.0).is_err());
    assert_eq!(ReservoirSpec::new(0.5, 1e-4, 10.0).unwrap().class(), SpectralClass::SubOhmic);
    assert_eq!(ohmic().class(), SpectralClass::Ohmic);
    assert_eq!(ReservoirSpec::new(1.5, 1e-4, 10.0).unwrap().class(), SpectralClass::SuperOhmic);
}

#[test]
fn two_level_structure() {
    let sys = SystemParams::default();
    let tls = sys.two_level();
    assert_eq!(tls.e2 - tls.e1, sys.h * sys.delta);
    assert_eq!(tls.omega_mn(2, 1), sys.delta);
    assert_eq!(tls.x(1, 1), 0.0);
    assert_eq!(tls.x(2, 2), 0.0);
    assert_eq!(tls.x(1, 2), tls.x(2, 1));
    assert_eq!(TwoLevelSystem::overlap_left(1), FRAC_1_SQRT_2);
    assert_eq!(TwoLevelSystem::overlap_left(2), -FRAC_1_SQRT_2);
    let (c1, c2) = TwoLevelSystem::lr_to_energy(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    assert_relative_eq!(c1.re, FRAC_1_SQRT_2);
    assert_relative_eq!(c2.re, -FRAC_1_SQRT_2);
}

#[test]
fn contraction_rule_on_unit_kernel() {
    let r = ohmic();
    let closed = ContractionRule::WEIGHT * r.j * r.lambda.powi(2) * 1.0;
    // Midpoint sum of discrete weights over a fine grid.
    let n = 400_000;
    let w = 40.0 * r.lambda / n as f64;
    let sum: f64 = (0..n).map(|i| ContractionRule::discrete_weight(&r, (i as f64 + 0.5) * w, w)).sum();
    assert_relative_eq!(sum, closed, max_relative = 1e-6);
    assert_relative_eq!(ContractionRule::apply(cutoff_moment(0, &r).unwrap()), closed, max_relative = 1e-14);
}

proptest! {
    #[test]
    fn basis_round_trip(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0) {
        let l = C64::new(a, b);
        let r = C64::new(c, d);
        let (c1, c2) = TwoLevelSystem::lr_to_energy(l, r);
        let (l2, r2) = TwoLevelSystem::energy_to_lr(c1, c2);
        prop_assert!((l2 - l).norm() < 1e-15);
        prop_assert!((r2 - r).norm() < 1e-15);
    }

    #[test]
    fn isolated_periodic_and_bounded(t in 0.0f64..1e5, k in 1u32..5) {
        let sys = SystemParams::default();
        let p = isolated_probability(t, &sys).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let period = 2.0 * PI / sys.delta;
        let q = isolated_probability(t + k as f64 * period, &sys).unwrap();
        prop_assert!((p - q).abs() < 1e-9);
    }

    #[test]
    fn density_nonnegative(w in 0.0f64..500.0, s in 0.1f64..3.0, lam in 0.5f64..50.0) {
        let r = ReservoirSpec::new(s, 1e-4, lam).unwrap();
        let v = spectral_density(w, &r).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite());
    }
}

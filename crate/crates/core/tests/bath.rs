mod common;

use approx::assert_relative_eq;
use common::{composite, excision_limit};
use macroqubit::bath::{integrate_bath2, Kernel2};
use macroqubit::bath::{oscillatory_strategy_crosscheck, principal_value_fn};
use macroqubit::bath::kernel::Kernel;
use macroqubit::bath::{cache, integrate_bath, integrate_bath_pv, BathIntegralRequest, Method};
use macroqubit::model::{cutoff_moment, ReservoirSpec, SystemParams};
use macroqubit::quad;
use macroqubit::Error;

const DELTA: f64 = 1e-3;

fn res(s: f64) -> ReservoirSpec {
    ReservoirSpec::new(s, 1e-4, 10.0).unwrap()
}

fn req(r: ReservoirSpec, k: Kernel, tol: f64) -> BathIntegralRequest {
    BathIntegralRequest::new(r, k, tol)
}

#[test]
fn gamma_oracle_twelve_cases() {
    for s in [0.5, 1.0, 1.5, 2.0] {
        for k in [-1, 0, 1] {
            let r = res(s);
            let out = integrate_bath(&req(r, Kernel::Power { k }, 1e-10)).unwrap();
            let exact = cutoff_moment(k, &r).unwrap();
            assert_relative_eq!(out.re(), exact, max_relative = 1e-8);
            assert!(out.honors(1e-10), "s={s} k={k} err={}", out.abs_error);
        }
    }
}

#[test]
fn unit_kernel_matches_moment() {
    let out = integrate_bath(&req(res(1.0), Kernel::One, 1e-10)).unwrap();
    assert_relative_eq!(out.re(), 1e-2, max_relative = 1e-10);
}

#[test]
fn resonant_sine_at_zero_time() {
    let out = integrate_bath(&req(res(1.0), Kernel::ResonantSine { a: DELTA, t: 0.0 }, 1e-8)).unwrap();
    assert_eq!(out.value.norm(), 0.0);
}

/// Dense Simpson sum of `J(ω)·2sin²((ω+Δ)t/2)/(ω+Δ)²`.
fn versine_brute(r: &ReservoirSpec, t: f64) -> f64 {
    let f = |w: f64| {
        let x = w + DELTA;
        r.density(w) * 2.0 * (0.5 * x * t).sin().powi(2) / (x * x)
    };
    let top = 40.0 * r.lambda;
    let n = (top * t / 0.05) as usize / 2 * 2;
    let h = top / n as f64;
    let mut s = f(0.0) + f(top);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn versine_plateau_matches_brute_force() {
    let r = res(1.0);
    let mut vals = vec![];
    for t in [1e3, 1e4] {
        let out = integrate_bath(&req(r, Kernel::ResonantVersine { a: DELTA, t }, 1e-9)).unwrap();
        let brute = versine_brute(&r, t);
        assert_relative_eq!(out.re(), brute, max_relative = 1e-6);
        vals.push(out.re());
    }
    // No resonance on the positive axis: the value saturates at ∫J/(ω+Δ)².
    let limit = composite(|w: f64| r.density(w) / (w + DELTA).powi(2), 0.0, 1.0, 400, 20)
        + composite(|w: f64| r.density(w) / (w + DELTA).powi(2), 1.0, 400.0, 600, 20);
    let late = integrate_bath(&req(r, Kernel::ResonantVersine { a: DELTA, t: 1e6 }, 1e-9)).unwrap().re();
    let gaps: Vec<f64> = vals.iter().chain([&late]).map(|v| (v - limit).abs()).collect();
    assert!(gaps[1] < 0.2 * gaps[0] && gaps[2] < 0.2 * gaps[1], "{gaps:?}");
    assert_relative_eq!(late, limit, max_relative = 1e-3);
}

#[test]
fn linearity_against_composite_quadrature() {
    let r = res(1.5);
    let (a, b) = (0.7, -2.3);
    let k1 = Kernel::ResonantVersine { a: DELTA, t: 50.0 };
    let k2 = Kernel::Power { k: 1 };
    let i1 = integrate_bath(&req(r, k1, 1e-10)).unwrap().re();
    let i2 = integrate_bath(&req(r, k2, 1e-10)).unwrap().re();
    let f = |w: f64| r.density(w) * (a * k1.eval(w) + b * k2.eval(w));
    let direct = composite(&f, 0.0, 1.0, 400, 20) + composite(&f, 1.0, 400.0, 2000, 20);
    assert_relative_eq!(a * i1 + b * i2, direct, max_relative = 1e-8);
}

#[test]
fn cache_is_transparent() {
    let q = req(res(0.7), Kernel::ResonantSine { a: 0.31, t: 123.0 }, 1e-9);
    let first = integrate_bath(&q).unwrap();
    let n = cache::len();
    let second = integrate_bath(&q).unwrap();
    assert_eq!(first.value.re.to_bits(), second.value.re.to_bits());
    assert_eq!(first.value.im.to_bits(), second.value.im.to_bits());
    assert_eq!(first.cache_key, second.cache_key);
    assert!(cache::len() >= n);
    // A changed tolerance is a different key.
    let other = integrate_bath(&BathIntegralRequest { tolerance: 1e-8, ..q }).unwrap();
    assert_ne!(other.cache_key, first.cache_key);
}

#[test]
fn error_contract_honored() {
    for (k, tol) in [
        (Kernel::Power { k: -1 }, 1e-9),
        (Kernel::ShiftRatio { omega: DELTA }, 1e-10),
        (Kernel::ResonantSine { a: DELTA, t: 1e5 }, 1e-8),
        (Kernel::ResonantVersine { a: DELTA, t: 3e4 }, 1e-8),
    ] {
        let out = integrate_bath(&req(res(1.0), k, tol)).unwrap();
        assert!(out.honors(tol), "{k:?}: {} vs {}", out.abs_error, out.value);
    }
}

#[test]
fn invalid_requests() {
    let r = res(1.0);
    assert!(matches!(
        integrate_bath(&req(r, Kernel::One, 1e-2)),
        Err(Error::Domain { .. })
    ));
    let unflagged = BathIntegralRequest {
        principal_value_at: None,
        ..req(r, Kernel::PvPole { pole: DELTA }, 1e-8)
    };
    assert!(matches!(integrate_bath(&unflagged), Err(Error::Domain { .. })));
    let half = res(0.5);
    assert!(integrate_bath(&req(half, Kernel::Power { k: -2 }, 1e-8)).is_err());
    let boundary = BathIntegralRequest {
        principal_value_at: Some(0.0),
        ..req(r, Kernel::PvPole { pole: DELTA }, 1e-8)
    };
    assert!(matches!(integrate_bath_pv(&boundary), Err(Error::Domain { .. })));
}

#[test]
fn pv_of_symmetric_pole_vanishes() {
    let w0 = 0.4;
    let (v, _) = principal_value_fn(|_| 2.5, w0, w0 - 0.3, w0 + 0.3, 1e-12, &[]).unwrap();
    assert!(v.abs() < 1e-13, "{v}");
}

#[test]
fn pv_matches_excision_with_richardson() {
    let r = res(1.0);
    let k = Kernel::ShiftRatio { omega: -DELTA };
    let pv = integrate_bath(&req(r, k, 1e-10)).unwrap();
    assert_eq!(pv.method, Method::PrincipalValue);
    let extrap = excision_limit(&r, &k, DELTA);
    assert_relative_eq!(pv.re(), extrap, max_relative = 1e-6);
}

#[test]
fn pv_small_pole_limit_is_inverse_square_moment() {
    let r = res(2.0);
    let w0 = 1e-7;
    let pv = integrate_bath(&req(r, Kernel::PvPole { pole: w0 }, 1e-10)).unwrap();
    assert_relative_eq!(pv.re(), cutoff_moment(-2, &r).unwrap(), max_relative = 1e-4);
}

#[test]
fn crosscheck_at_paper_times() {
    for t in [1e3, 1e4, 1e5] {
        let q = req(res(1.0), Kernel::ResonantSine { a: DELTA, t }, 1e-8);
        let rep = oscillatory_strategy_crosscheck(&q, t).unwrap();
        assert!(!rep.flagged, "t={t}: {rep:?}");
        assert!(rep.discrepancy <= rep.combined_error, "t={t}: {rep:?}");
    }
}

#[test]
fn crosscheck_degenerate_cases() {
    let q = req(res(1.0), Kernel::ResonantSine { a: DELTA, t: 0.0 }, 1e-8);
    let rep = oscillatory_strategy_crosscheck(&q, 0.0).unwrap();
    assert!(rep.segmented.value.norm() < 1e-20 && rep.filon.value.norm() < 1e-20);
    let smooth = req(res(1.0), Kernel::Power { k: 1 }, 1e-10);
    let rep = oscillatory_strategy_crosscheck(&smooth, 0.0).unwrap();
    let exact = cutoff_moment(1, &res(1.0)).unwrap();
    assert_relative_eq!(rep.segmented.value.re, exact, max_relative = 1e-8);
    assert_relative_eq!(rep.filon.value.re, exact, max_relative = 1e-8);
}

#[test]
fn resonant_sine_at_long_times() {
    for t in [1e5, 1e6] {
        let out = integrate_bath(&req(res(1.0), Kernel::ResonantSine { a: DELTA, t }, 1e-8)).unwrap();
        assert!(out.value.re.is_finite());
        assert!(out.honors(1e-8));
    }
}

#[test]
fn mollified_delta_gives_density() {
    let r = res(1.0);
    let out = integrate_bath(&req(r, Kernel::Gaussian { center: DELTA, width: 1e-6 }, 1e-9)).unwrap();
    assert_relative_eq!(out.re(), r.density(DELTA), max_relative = 1e-6);
}

#[test]
fn double_integral_examples() {
    let (ra, rb) = (res(0.5), res(1.5));
    let one = integrate_bath2(&req(ra, Kernel::One, 1e-8), &req(rb, Kernel::One, 1e-8), &Kernel2::One).unwrap();
    let exact = cutoff_moment(0, &ra).unwrap() * cutoff_moment(0, &rb).unwrap();
    assert_relative_eq!(one.value.re, exact, max_relative = 1e-7);

    let ka = Kernel::Power { k: 1 };
    let kb = Kernel::ResonantVersine { a: 0.2, t: 3.0 };
    let sep = integrate_bath2(&req(ra, ka, 1e-8), &req(rb, kb, 1e-8), &Kernel2::Separable).unwrap();
    let prod = integrate_bath(&req(ra, ka, 1e-10)).unwrap().re() * integrate_bath(&req(rb, kb, 1e-10)).unwrap().re();
    assert_relative_eq!(sep.value.re, prod, max_relative = 1e-7);

    let sys = SystemParams::default();
    let zero_t = Kernel2::DoubleOverlap { m: 1, n: 2, t: 0.0, sys };
    let z = integrate_bath2(&req(ra, Kernel::One, 1e-6), &req(rb, Kernel::One, 1e-6), &zero_t).unwrap();
    assert_eq!(z.value.norm(), 0.0);
}

#[test]
fn double_integral_swap_symmetry() {
    let sys = SystemParams::new(1.0, 0.5, 3.0).unwrap();
    let (ra, rb) = (
        ReservoirSpec::new(0.8, 0.02, 3.0).unwrap(),
        ReservoirSpec::new(1.3, 0.01, 2.0).unwrap(),
    );
    let k = Kernel2::DoubleOverlap { m: 1, n: 1, t: 2.0, sys };
    let ab = integrate_bath2(&req(ra, Kernel::One, 1e-6), &req(rb, Kernel::One, 1e-6), &k).unwrap();
    let ba = integrate_bath2(&req(rb, Kernel::One, 1e-6), &req(ra, Kernel::One, 1e-6), &k).unwrap();
    assert_relative_eq!(ab.value.re, ba.value.re, max_relative = 1e-6);
}

#[test]
fn quadrature_reports_failure_with_estimate() {
    let opts = quad::QuadOptions {
        abs_tol: 1e-30,
        rel_tol: 1e-15,
        max_intervals: 4,
    };
    let out = quad::adaptive(|x: f64| (50.0 * x).sin() / (1e-3 + x), 0.0, 10.0, &[], opts);
    match out {
        Err(Error::Integration { limit, .. }) => assert_eq!(limit, 4),
        other => panic!("expected integration failure, got {other:?}"),
    }
}

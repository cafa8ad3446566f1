use super::kernel::Kernel;
use super::{BathIntegralRequest, BathIntegralResult, Method, ABS_FLOOR};
use crate::dynamics::kernels::double_excitation_bare;
use crate::error::{Error, Result};
use crate::model::{ReservoirSpec, SystemParams};
use crate::quad::{self, QuadOptions};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Two-frequency kernels `K(ω_A, ω_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel2 {
    /// `K ≡ 1`.
    One,
    /// `K_A(ω_A)·K_B(ω_B)` taken from the two requests.
    Separable,
    /// `conj(d_m(ω_A, ω_B, t))·d_n(ω_A, ω_B, t)` for the coupling-stripped
    /// double-excitation amplitudes.
    DoubleOverlap {
        m: usize,
        n: usize,
        t: f64,
        sys: SystemParams,
    },
}

fn features(r: &ReservoirSpec, k: &Kernel, k2: &Kernel2) -> Vec<f64> {
    let mut b: Vec<f64> = (0..10).map(|e| r.lambda * 10f64.powi(-e)).collect();
    b.extend(k.features());
    if let Kernel2::DoubleOverlap { sys, t, .. } = k2 {
        b.extend([sys.delta, 2.0 * sys.delta]);
        if *t > 0.0 {
            b.extend((1..6).map(|j| j as f64 * std::f64::consts::PI / t));
        }
    }
    b
}

/// `∫₀^∞∫₀^∞ J_A(ω_A) J_B(ω_B) K(ω_A, ω_B) dω_A dω_B` by nested adaptive
/// tensor-product quadrature.
pub fn integrate_bath2(
    req_a: &BathIntegralRequest,
    req_b: &BathIntegralRequest,
    kernel2: &Kernel2,
) -> Result<BathIntegralResult> {
    req_a.validate()?;
    req_b.validate()?;
    let (ra, rb) = (req_a.reservoir, req_b.reservoir);
    let key = {
        let mut ka = req_a.cache_key();
        let kb = req_b.cache_key();
        ka.bits.extend(kb.bits);
        ka.digest() + "|" + kb.kernel + "|" + &format!("{kernel2:?}")
    };
    if ra.is_off() || rb.is_off() {
        return Ok(BathIntegralResult {
            value: C64::new(0.0, 0.0),
            abs_error: 0.0,
            method: Method::Exact,
            cache_key: key,
        });
    }
    for (r, k) in [(ra, req_a.kernel), (rb, req_b.kernel)] {
        if matches!(kernel2, Kernel2::Separable) && k.pole().is_some() {
            return Err(Error::domain("kernel", "double integrals take pole-free kernels"));
        }
        if matches!(kernel2, Kernel2::Separable) && r.s + k.origin_power() <= -1.0 {
            return Err(Error::Divergent(format!("kernel `{}` at the origin", k.id())));
        }
    }
    let tol = req_a.tolerance.min(req_b.tolerance);
    let wa = 40.0 * ra.lambda;
    let wb = 40.0 * rb.lambda;
    let (ka, kb) = (req_a.kernel, req_b.kernel);
    let k2 = *kernel2;
    let eval = move |x: f64, y: f64| -> C64 {
        match k2 {
            Kernel2::One => C64::new(1.0, 0.0),
            Kernel2::Separable => C64::new(ka.eval(x) * kb.eval(y), 0.0),
            Kernel2::DoubleOverlap { m, n, t, sys } => {
                double_excitation_bare(m, x, y, t, &sys).conj() * double_excitation_bare(n, x, y, t, &sys)
            }
        }
    };
    let bpa = features(&ra, &ka, kernel2);
    let bpb = features(&rb, &kb, kernel2);
    let inner_opts = QuadOptions {
        abs_tol: 0.01 * ABS_FLOOR,
        rel_tol: 0.1 * tol,
        max_intervals: 2000,
    };
    let mut inner_err = 0.0f64;
    let outer = quad::adaptive(
        |x: f64| {
            let ja = ra.density(x);
            if ja == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let mut f = |y: f64| eval(x, y) * rb.density(y);
            let o = quad::adaptive_lenient(&mut f, 0.0, wb, &bpb, inner_opts);
            inner_err = inner_err.max(o.abs_error * ja);
            o.value * ja
        },
        0.0,
        wa,
        &bpa,
        QuadOptions {
            abs_tol: 0.1 * ABS_FLOOR,
            rel_tol: 0.1 * tol,
            max_intervals: 2000,
        },
    )?;
    let abs_error = outer.abs_error + inner_err * wa;
    Ok(BathIntegralResult {
        value: outer.value,
        abs_error,
        method: Method::Tensor,
        cache_key: key,
    })
}

//! Semi-infinite, principal-value, oscillatory and double integrals of
//! kernels against a reservoir spectral density.

pub mod cache;
mod double;
mod engine;
pub mod kernel;

pub use double::{integrate_bath2, Kernel2};
pub use engine::{oscillatory_strategy_crosscheck, principal_value_fn, CrossCheckReport};
pub use kernel::Kernel;

use crate::error::{Error, Result};
use crate::model::ReservoirSpec;
use crate::C64;
use cache::CacheKey;
use serde::{Deserialize, Serialize};

/// Absolute error floor shared by every bath integral.
pub const ABS_FLOOR: f64 = 1e-15;

/// Largest accepted relative tolerance.
pub const MAX_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathIntegralRequest {
    pub reservoir: ReservoirSpec,
    pub kernel: Kernel,
    pub tolerance: f64,
    pub principal_value_at: Option<f64>,
}

impl BathIntegralRequest {
    pub fn new(reservoir: ReservoirSpec, kernel: Kernel, tolerance: f64) -> Self {
        BathIntegralRequest {
            reservoir,
            kernel,
            tolerance,
            principal_value_at: kernel.pole(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.reservoir.validate()?;
        if !(self.tolerance > 0.0 && self.tolerance <= MAX_TOLERANCE) {
            return Err(Error::domain("tolerance", "must lie in (0, 1e-3]"));
        }
        if let Some(p) = self.principal_value_at {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::domain(
                    "principal_value_at",
                    "pole must lie strictly inside (0, inf)",
                ));
            }
        }
        Ok(())
    }

    pub fn cache_key(&self) -> CacheKey {
        let r = &self.reservoir;
        let mut bits = vec![r.s.to_bits(), r.j.to_bits(), r.lambda.to_bits(), self.tolerance.to_bits()];
        bits.push(self.principal_value_at.map_or(u64::MAX, f64::to_bits));
        bits.extend(self.kernel.param_bits());
        CacheKey {
            kernel: self.kernel.id(),
            bits,
        }
    }
}

/// Which strategy produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Reservoir switched off or trivially zero kernel.
    Exact,
    Adaptive,
    PrincipalValue,
    Segmented,
    Filon,
    Tensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathIntegralResult {
    pub value: C64,
    pub abs_error: f64,
    pub method: Method,
    pub cache_key: String,
}

impl BathIntegralResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// Error contract `abs_error ≤ tol·|value| + floor`.
    pub fn honors(&self, tol: f64) -> bool {
        self.abs_error <= tol * self.value.norm() + ABS_FLOOR
    }
}

/// `∫₀^∞ J(ω) K(ω) dω` for a pole-free kernel (or a flagged pole, which is
/// forwarded to [`integrate_bath_pv`]).
pub fn integrate_bath(req: &BathIntegralRequest) -> Result<BathIntegralResult> {
    req.validate()?;
    if let Some(p) = req.kernel.pole() {
        return match req.principal_value_at {
            Some(q) if q == p => integrate_bath_pv(req),
            _ => Err(Error::domain(
                "kernel",
                format!("kernel has a pole at {p} that is not flagged for a principal value"),
            )),
        };
    }
    if req.principal_value_at.is_some() {
        return integrate_bath_pv(req);
    }
    let key = req.cache_key();
    cache::get_or_compute(&key, || {
        let (value, abs_error, method) = engine::plain(req)?;
        finish(req, value, abs_error, method, &key)
    })
}

/// Cauchy principal value of `∫₀^∞ J(ω) K(ω) dω` at the flagged pole.
pub fn integrate_bath_pv(req: &BathIntegralRequest) -> Result<BathIntegralResult> {
    req.validate()?;
    let pole = req
        .principal_value_at
        .ok_or_else(|| Error::domain("principal_value_at", "no pole given"))?;
    let key = req.cache_key();
    cache::get_or_compute(&key, || {
        let (value, abs_error) = engine::principal_value(req, pole)?;
        finish(req, value, abs_error, Method::PrincipalValue, &key)
    })
}

fn finish(
    req: &BathIntegralRequest,
    value: C64,
    abs_error: f64,
    method: Method,
    key: &CacheKey,
) -> Result<BathIntegralResult> {
    let res = BathIntegralResult {
        value,
        abs_error,
        method,
        cache_key: key.digest(),
    };
    if !res.honors(req.tolerance) {
        return Err(Error::Integration {
            estimate: value.norm(),
            abs_error,
            limit: engine::MAX_INTERVALS,
        });
    }
    Ok(res)
}

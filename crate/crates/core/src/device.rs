//! Flux-qubit estimates of the macroscopicity `h` and tunneling `Δ`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Elementary charge (C), exact in SI.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J·s), exact in SI.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Note attached to every instanton estimate.
pub const INSTANTON_CAVEAT: &str = "instanton estimate evaluated verbatim; at h = 0.1 it gives ~2e-7, \
far below the commonly quoted 1e-3 (which needs h ~ 0.2); simulations take delta as an independent input";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    /// Inductance ratio, `0 < γ < 1`.
    pub gamma: f64,
    /// Junction quantum scale.
    pub h0: f64,
}

impl JunctionParams {
    pub fn new(gamma: f64, h0: f64) -> Result<Self> {
        let j = JunctionParams { gamma, h0 };
        j.validate()?;
        Ok(j)
    }

    /// `h₀ = 2√((e²/C)/(I_c Φ_q/2π))` with `Φ_q = h/2e`, from SI inputs.
    pub fn from_si(gamma: f64, capacitance: f64, critical_current: f64) -> Result<Self> {
        if !(capacitance > 0.0) {
            return Err(Error::domain("capacitance", "must be positive"));
        }
        if !(critical_current > 0.0) {
            return Err(Error::domain("critical_current", "must be positive"));
        }
        let flux_quantum = PLANCK / (2.0 * ELEMENTARY_CHARGE);
        let charging = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / capacitance;
        let josephson = critical_current * flux_quantum / (2.0 * PI);
        Self::new(gamma, 2.0 * (charging / josephson).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::domain("gamma", "double-well regime needs 0 < gamma < 1"));
        }
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::domain("h0", "must be positive"));
        }
        Ok(())
    }
}

/// `θ₀ = √(6(1−γ))`, `U₀ = (3/2)(1−γ)²`.
pub fn well_geometry(j: &JunctionParams) -> Result<(f64, f64)> {
    j.validate()?;
    let d = 1.0 - j.gamma;
    Ok(((6.0 * d).sqrt(), 1.5 * d * d))
}

/// `h = h₀/(3(1−γ)^{3/2})`.
pub fn macroscopicity(j: &JunctionParams) -> Result<f64> {
    j.validate()?;
    Ok(j.h0 / (3.0 * (1.0 - j.gamma).powf(1.5)))
}

/// `Δ = (Ω/π)·(4πΩe^{2ξ}/h)^{1/2}·e^{−I/h}` with `I = 2Ω/3`, `ξ = ln 2`.
pub fn instanton_tunneling(h: f64, omega: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("h", "must be positive"));
    }
    if !(omega > 0.0) {
        return Err(Error::domain("omega", "must be positive"));
    }
    let action = 2.0 * omega / 3.0;
    let xi = 2f64.ln();
    Ok(omega / PI * (4.0 * PI * omega * (2.0 * xi).exp() / h).sqrt() * (-action / h).exp())
}

/// Everything `estimate` reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceReport {
    pub gamma: f64,
    pub h0: f64,
    pub theta0: f64,
    pub u0: f64,
    pub h: f64,
    pub h_identity: f64,
    pub omega: f64,
    pub instanton_delta: f64,
    pub caveat: String,
}

pub fn estimate(j: &JunctionParams, omega: f64) -> Result<DeviceReport> {
    let (theta0, u0) = well_geometry(j)?;
    let h = macroscopicity(j)?;
    Ok(DeviceReport {
        gamma: j.gamma,
        h0: j.h0,
        theta0,
        u0,
        h,
        h_identity: j.h0 / (theta0 * u0.sqrt()),
        omega,
        instanton_delta: instanton_tunneling(h, omega)?,
        caveat: INSTANTON_CAVEAT.to_string(),
    })
}

//! Stationary perturbation theory: shifts, golden-rule rates and the
//! kinematic state built from them.

use crate::bath::{integrate_bath, BathIntegralRequest, Kernel};
use crate::error::{Error, Result};
use crate::model::{cutoff_moment, ReservoirSpec, SystemParams, TwoLevelSystem};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Relative tolerance for stationary bath integrals.
pub const SHIFT_TOLERANCE: f64 = 1e-10;

fn check_level(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(Error::domain("n", "level index must be 1 or 2"))
    }
}

/// `δE⁽¹⁾ = (x12²/π)·∫J(ω)/ω dω`, the same for both levels.
pub fn first_order_shift(n: usize, r: &ReservoirSpec, tls: &TwoLevelSystem) -> Result<f64> {
    check_level(n)?;
    r.validate()?;
    Ok(tls.x12 * tls.x12 / PI * cutoff_moment(-1, r)?)
}

/// `δE_n = (x12²/π)·Ω·∫J(ω)/(ω(ω+Ω)) dω` with `Ω = Ω_{mn}`, `m ≠ n`; a
/// principal value for `n = 2`.
pub fn energy_shift(n: usize, r: &ReservoirSpec, tls: &TwoLevelSystem) -> Result<f64> {
    check_level(n)?;
    if r.is_off() {
        return Ok(0.0);
    }
    let omega = tls.omega_mn(TwoLevelSystem::other(n), n);
    let req = BathIntegralRequest::new(*r, Kernel::ShiftRatio { omega }, SHIFT_TOLERANCE);
    let v = integrate_bath(&req)?;
    Ok(tls.x12 * tls.x12 / PI * v.re())
}

/// `Γ₁ = 0`, `Γ₂ = (2/h)·x12²·J(Δ)`.
pub fn decay_rate(n: usize, r: &ReservoirSpec, tls: &TwoLevelSystem) -> Result<f64> {
    check_level(n)?;
    if n == 1 {
        return Ok(0.0);
    }
    Ok(2.0 / tls.h * tls.x12 * tls.x12 * r.density(tls.delta))
}

/// Per-reservoir stationary quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReservoirShifts {
    pub de1_first: f64,
    pub de2_first: f64,
    pub de1: f64,
    pub de2: f64,
    pub gamma2: f64,
}

impl ReservoirShifts {
    pub fn compute(r: &ReservoirSpec, tls: &TwoLevelSystem) -> Result<Self> {
        if r.is_off() {
            return Ok(Self::default());
        }
        Ok(ReservoirShifts {
            de1_first: first_order_shift(1, r, tls)?,
            de2_first: first_order_shift(2, r, tls)?,
            de1: energy_shift(1, r, tls)?,
            de2: energy_shift(2, r, tls)?,
            gamma2: decay_rate(2, r, tls)?,
        })
    }
}

/// Stationary data for both reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPT {
    pub tls_e1: f64,
    pub tls_e2: f64,
    pub h: f64,
    pub a: ReservoirShifts,
    pub b: ReservoirShifts,
}

impl StationaryPT {
    pub fn new(sys: &SystemParams, ra: &ReservoirSpec, rb: &ReservoirSpec) -> Result<Self> {
        sys.validate()?;
        let tls = sys.two_level();
        Ok(StationaryPT {
            tls_e1: tls.e1,
            tls_e2: tls.e2,
            h: sys.h,
            a: ReservoirShifts::compute(ra, &tls)?,
            b: ReservoirShifts::compute(rb, &tls)?,
        })
    }

    /// Sum over both reservoirs.
    pub fn total(&self) -> ReservoirShifts {
        ReservoirShifts {
            de1_first: self.a.de1_first + self.b.de1_first,
            de2_first: self.a.de2_first + self.b.de2_first,
            de1: self.a.de1 + self.b.de1,
            de2: self.a.de2 + self.b.de2,
            gamma2: self.a.gamma2 + self.b.gamma2,
        }
    }

    /// Level-1 rate, zero by construction.
    pub fn gamma1(&self) -> f64 {
        0.0
    }
}

/// Amplitudes on `|1⟩`, `|2⟩` of the kinematic state.
pub fn stationary_state(t: f64, pt: &StationaryPT) -> Result<(C64, C64)> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain("t", "time must be nonnegative"));
    }
    let tot = pt.total();
    let g = tot.gamma2;
    let p1 = -(pt.tls_e1 + tot.de1) * t / pt.h;
    let p2 = -(pt.tls_e2 + tot.de2) * t / pt.h;
    let m1 = (1.0 - 0.5 * (-g * t).exp()).sqrt();
    let m2 = -FRAC_1_SQRT_2 * (-0.5 * g * t).exp();
    Ok((C64::from_polar(m1, p1), C64::from_polar(m2, p2)))
}

/// `|⟨R|ψ(t)⟩|²` for the kinematic state.
pub fn stationary_p_right(t: f64, pt: &StationaryPT) -> Result<f64> {
    let (c1, c2) = stationary_state(t, pt)?;
    let (_, r) = TwoLevelSystem::energy_to_lr(c1, c2);
    Ok(r.norm_sqr())
}

//! Two-level system, reservoir spectral densities and the contraction rule.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Dimensionless parameters of the double-well system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Reduced Planck constant (macroscopicity).
    pub h: f64,
    /// Tunneling strength.
    pub delta: f64,
    /// Well frequency.
    pub omega: f64,
    /// Position matrix element `⟨1|x|2⟩`.
    pub x12: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            h: 0.1,
            delta: 1e-3,
            omega: 8f64.sqrt(),
            x12: 1.0,
        }
    }
}

impl SystemParams {
    pub fn new(h: f64, delta: f64, omega: f64) -> Result<Self> {
        let p = SystemParams {
            h,
            delta,
            omega,
            x12: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_x12(mut self, x12: f64) -> Result<Self> {
        self.x12 = x12;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::domain("h", "must be positive and finite"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::domain("delta", "must be positive and finite"));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::domain("omega", "must be positive and finite"));
        }
        if self.delta >= self.omega {
            return Err(Error::domain("delta", "weak tunneling requires delta < omega"));
        }
        if !self.x12.is_finite() || self.x12 == 0.0 {
            return Err(Error::domain("x12", "must be finite and nonzero"));
        }
        if self.h >= 1.0 {
            log::warn!("h = {} is outside the quasi-classical regime h < 1", self.h);
        }
        Ok(())
    }

    /// True when `h < 1`.
    pub fn is_quasi_classical(&self) -> bool {
        self.h < 1.0
    }

    pub fn two_level(&self) -> TwoLevelSystem {
        TwoLevelSystem::new(self)
    }
}

/// Energy eigenbasis `{|1⟩, |2⟩}` and the localized basis `{|L⟩, |R⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSystem {
    pub e1: f64,
    pub e2: f64,
    pub x12: f64,
    pub h: f64,
    pub delta: f64,
}

impl TwoLevelSystem {
    pub fn new(p: &SystemParams) -> Self {
        let half = 0.5 * p.h * p.delta;
        TwoLevelSystem {
            e1: -half,
            e2: half,
            x12: p.x12,
            h: p.h,
            delta: p.delta,
        }
    }

    /// Energy of eigenstate `n ∈ {1, 2}`.
    pub fn energy(&self, n: usize) -> f64 {
        match n {
            1 => self.e1,
            2 => self.e2,
            _ => panic!("level index must be 1 or 2, got {n}"),
        }
    }

    /// Transition frequency `Ω_mn = (E_m − E_n)/h`.
    pub fn omega_mn(&self, m: usize, n: usize) -> f64 {
        match (m, n) {
            (1, 2) => -self.delta,
            (2, 1) => self.delta,
            (1, 1) | (2, 2) => 0.0,
            _ => panic!("level indices must be 1 or 2"),
        }
    }

    /// The level other than `n`.
    pub fn other(n: usize) -> usize {
        3 - n
    }

    /// Position matrix element `⟨m|x|n⟩`; diagonal elements vanish by parity.
    pub fn x(&self, m: usize, n: usize) -> f64 {
        if m == n {
            0.0
        } else {
            self.x12
        }
    }

    /// `⟨n|L⟩` with `|L⟩ = (|1⟩ − |2⟩)/√2`.
    pub fn overlap_left(n: usize) -> f64 {
        if n == 1 {
            FRAC_1_SQRT_2
        } else {
            -FRAC_1_SQRT_2
        }
    }

    /// `⟨n|R⟩` with `|R⟩ = (|1⟩ + |2⟩)/√2`.
    pub fn overlap_right(_n: usize) -> f64 {
        FRAC_1_SQRT_2
    }

    /// Amplitudes on `(|1⟩, |2⟩)` from amplitudes on `(|L⟩, |R⟩)`.
    pub fn lr_to_energy(l: C64, r: C64) -> (C64, C64) {
        ((l + r) * FRAC_1_SQRT_2, (r - l) * FRAC_1_SQRT_2)
    }

    /// Amplitudes on `(|L⟩, |R⟩)` from amplitudes on `(|1⟩, |2⟩)`.
    pub fn energy_to_lr(c1: C64, c2: C64) -> (C64, C64) {
        ((c1 - c2) * FRAC_1_SQRT_2, (c1 + c2) * FRAC_1_SQRT_2)
    }
}

/// Spectral class of a reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralClass {
    SubOhmic,
    Ohmic,
    SuperOhmic,
}

/// `J(ω) = J·ω·(ω/Λ)^{s−1}·e^{−ω/Λ}`.
///
/// `j = 0` is accepted and switches the reservoir off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub s: f64,
    pub j: f64,
    pub lambda: f64,
}

impl Default for ReservoirSpec {
    fn default() -> Self {
        ReservoirSpec {
            s: 1.0,
            j: 1e-4,
            lambda: 10.0,
        }
    }
}

impl ReservoirSpec {
    pub fn new(s: f64, j: f64, lambda: f64) -> Result<Self> {
        let r = ReservoirSpec { s, j, lambda };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::domain("s", "must be positive"));
        }
        if !(self.j >= 0.0 && self.j.is_finite()) {
            return Err(Error::domain("j", "must be nonnegative"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain("lambda", "must be positive"));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.j == 0.0
    }

    pub fn class(&self) -> SpectralClass {
        if self.s < 1.0 {
            SpectralClass::SubOhmic
        } else if self.s > 1.0 {
            SpectralClass::SuperOhmic
        } else {
            SpectralClass::Ohmic
        }
    }

    /// `J(ω)`; zero at the origin for every `s > 0`.
    pub fn density(&self, omega: f64) -> f64 {
        if omega <= 0.0 || self.j == 0.0 {
            return 0.0;
        }
        self.j * omega * (omega / self.lambda).powf(self.s - 1.0) * (-omega / self.lambda).exp()
    }

    /// `J(ω)/ω^p` evaluated without forming `ω^s` and `ω^{-p}` separately.
    pub fn density_over_power(&self, omega: f64, p: f64) -> f64 {
        if self.j == 0.0 {
            return 0.0;
        }
        let e = self.s - p;
        if omega <= 0.0 {
            return if e > 0.0 {
                0.0
            } else if e == 0.0 {
                self.j * self.lambda.powf(1.0 - self.s)
            } else {
                f64::INFINITY
            };
        }
        self.j * self.lambda.powf(1.0 - self.s) * omega.powf(e) * (-omega / self.lambda).exp()
    }

    /// Bath correlation `C(u) = (2/π)∫₀^∞ J(ω) e^{−iωu} dω`
    /// `= (2/π)·J·Λ^{1−s}·Γ(s+1)·(1/Λ + iu)^{−(s+1)}`.
    pub fn correlation(&self, u: f64) -> C64 {
        if self.j == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let pre = 2.0 / PI * self.j * self.lambda.powf(1.0 - self.s) * gamma(self.s + 1.0);
        C64::new(1.0 / self.lambda, u).powf(-(self.s + 1.0)) * pre
    }

    /// `∫_a^b C(u) du` in closed form.
    pub fn correlation_integral(&self, a: f64, b: f64) -> C64 {
        if self.j == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let pre = 2.0 / PI * self.j * self.lambda.powf(1.0 - self.s) * gamma(self.s + 1.0);
        let f = |u: f64| C64::new(1.0 / self.lambda, u).powf(-self.s) * C64::new(0.0, 1.0 / self.s);
        (f(b) - f(a)) * pre
    }
}

/// `J(ω)` as a free function with a domain check.
pub fn spectral_density(omega: f64, r: &ReservoirSpec) -> Result<f64> {
    if omega < 0.0 || omega.is_nan() {
        return Err(Error::domain("omega", "spectral density needs omega >= 0"));
    }
    Ok(r.density(omega))
}

/// `∫₀^∞ J(ω) ω^k dω = J·Λ^{k+2}·Γ(s+k+1)`.
pub fn cutoff_moment(k: i32, r: &ReservoirSpec) -> Result<f64> {
    let a = r.s + k as f64 + 1.0;
    if a <= 0.0 {
        return Err(Error::DivergentMoment(a));
    }
    Ok(r.j * r.lambda.powi(k + 2) * gamma(a))
}

/// `sin²(Δt/2)`.
pub fn isolated_probability(t: f64, sys: &SystemParams) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain("t", "time must be nonnegative"));
    }
    let s = (0.5 * sys.delta * t).sin();
    Ok(s * s)
}

/// Continuum limit of discrete mode sums.
///
/// `Σ_α γ_α² ω_α³ F(ω_α)` is evaluated as `(2/π)∫₀^∞ J(ω) F(ω) dω`, and a
/// double sum over two independent reservoirs as the product of two such
/// integrals.
#[derive(Debug, Clone, Copy, Default)]
pub struct ContractionRule;

impl ContractionRule {
    pub const WEIGHT: f64 = 2.0 / PI;

    /// Applies the weight to an already computed `∫J·F`.
    pub fn apply(integral: f64) -> f64 {
        Self::WEIGHT * integral
    }

    /// Discretized weights `γ_α² ω_α³` for a set of mode frequencies, using
    /// the bin widths `dω_α`: `γ² ω³ = (2/π) J(ω) dω`.
    pub fn discrete_weight(r: &ReservoirSpec, omega: f64, width: f64) -> f64 {
        Self::WEIGHT * r.density(omega) * width
    }
}

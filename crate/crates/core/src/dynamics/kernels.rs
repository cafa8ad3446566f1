//! Frequency-domain amplitude kernels for a single bath mode.
//!
//! A mode of frequency `ω` with coupling `γ` contributes through the weight
//! `γ²ω³`; amplitudes carry `γ ω^{3/2}` per emitted boson. Kernels here are
//! coupling-stripped and exclude the initial overlap `⟨n|L⟩`.

use crate::model::{SystemParams, TwoLevelSystem};
use crate::quad::{exprel, exprel2};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `F(x) = ∫₀^t e^{ixτ} dτ`.
pub fn phase_integral(x: f64, t: f64) -> C64 {
    exprel(I * (x * t)) * t
}

/// `∫₀^t τ e^{ixτ} dτ`.
fn phase_integral1(x: f64, t: f64) -> C64 {
    exprel2(I * (x * t)) * (t * t)
}

/// `(F(x + d) − F(x))/(i d)`, continuous through `d = 0`.
fn divided_difference(x: f64, d: f64, t: f64) -> C64 {
    if (d * t).abs() < 1e-4 {
        // F'(x) = i∫τ e^{ixτ}, F''(x) = −∫τ² e^{ixτ}; keep two terms.
        let f1 = I * phase_integral1(x, t);
        let m2 = second_moment(x, t);
        (f1 - m2 * (0.5 * d)) / I
    } else {
        (phase_integral(x + d, t) - phase_integral(x, t)) / (I * d)
    }
}

/// `∫₀^t τ² e^{ixτ} dτ`.
fn second_moment(x: f64, t: f64) -> C64 {
    let z = I * (x * t);
    let m = if z.norm() < 1e-2 {
        let mut term = C64::new(1.0, 0.0);
        let mut s = C64::new(1.0 / 3.0, 0.0);
        for k in 1..10 {
            term = term * z / k as f64;
            s += term / (k as f64 + 3.0);
        }
        s
    } else {
        // M2 = (e^z − 2·M1)/z with M1 = ∫₀¹ s e^{zs} ds.
        (z.exp() - exprel2(z) * 2.0) / z
    };
    m * (t * t * t)
}

/// Frequency offset `X = ω + Ω_{mk}` seen by a boson emitted while the
/// system jumps from `k` to `m`.
pub fn detuning(m: usize, omega: f64, tls: &TwoLevelSystem) -> f64 {
    omega + tls.omega_mn(m, TwoLevelSystem::other(m))
}

/// Second-order cumulant density `κ_n(ω, t)` of the vacuum amplitude:
/// `K_n = Σ_α γ_α²ω_α³ κ_n(ω_α, t)`,
/// `κ_n = −(x12²/2h)·[it/ω + ∫₀^t (t−τ) e^{−iXτ} dτ]`, `X = ω + Ω_{mn}`.
pub fn vacuum_mode_kernel(n: usize, omega: f64, t: f64, sys: &SystemParams) -> C64 {
    let tls = sys.two_level();
    let x = omega + tls.omega_mn(TwoLevelSystem::other(n), n);
    let g = phase_integral(-x, t) * t - phase_integral1(-x, t);
    let pre = -tls.x12 * tls.x12 / (2.0 * tls.h);
    (I * (t / omega) + g) * pre
}

/// Bare first-order amplitude kernel for a boson in one reservoir with the
/// system in `m`, fed from `k ≠ m`:
/// `(i x12/√(2h))·∫₀^t e^{iXτ} dτ = (i x12/√(2h))·t·e^{iXt/2}·sinc(Xt/2)`.
pub fn single_excitation_bare(m: usize, omega: f64, t: f64, sys: &SystemParams) -> C64 {
    let tls = sys.two_level();
    let x = detuning(m, omega, &tls);
    I * (tls.x12 / (2.0 * tls.h).sqrt()) * phase_integral(x, t)
}

/// Resummed single-excitation kernel: the source level `k` decays with
/// `λ_k` and the final level `m` carries `λ_m`, `λ_j = Γ_j/2 + iδE_j/h`:
/// `(i x12/√(2h))·∫₀^t e^{iXτ} e^{−λ_k τ} e^{−λ_m (t−τ)} dτ`.
pub fn single_excitation_resummed(m: usize, omega: f64, t: f64, sys: &SystemParams, lambda: [C64; 2]) -> C64 {
    let tls = sys.two_level();
    let x = detuning(m, omega, &tls);
    let lm = lambda[m - 1];
    let lk = lambda[TwoLevelSystem::other(m) - 1];
    let z = I * x - lk + lm;
    I * (tls.x12 / (2.0 * tls.h).sqrt()) * (-lm * t).exp() * exprel(z * t) * t
}

/// Bare double-excitation kernel (one boson in each reservoir, system back
/// in `n`):
/// `−(x12²/2h)·∫∫_{[0,t]²} e^{iω_Aτ_A + iω_Bτ_B − iD_n|τ_A − τ_B|}`,
/// `D_n = (−1)^{n+1}Δ`.
pub fn double_excitation_bare(n: usize, wa: f64, wb: f64, t: f64, sys: &SystemParams) -> C64 {
    let d = if n == 1 { sys.delta } else { -sys.delta };
    // τ_B > τ_A branch and its mirror.
    let b1 = divided_difference(wb - d, wa + d, t);
    let b2 = divided_difference(wa - d, wb + d, t);
    (b1 + b2) * (-sys.x12 * sys.x12 / (2.0 * sys.h))
}

//! Time-dependent second-order dynamics: amplitudes `|χ_n(t)⟩`, overlaps,
//! `P_R(t)` and the two-time correlation function.

pub mod kernels;
pub mod timedomain;

use crate::bath::{integrate_bath, integrate_bath2, BathIntegralRequest, Kernel, Kernel2};
use crate::error::{Error, Result};
use crate::model::{isolated_probability, ReservoirSpec, SystemParams, TwoLevelSystem};
use crate::stationary::{stationary_p_right, StationaryPT};
use crate::quad::{self, QuadOptions};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which reservoir a single-excitation amplitude belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reservoir {
    A,
    B,
}

/// How the vacuum amplitude treats the real (dissipative) part of the
/// cumulant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VacuumMode {
    /// Full second-order cumulant with its memory transient.
    #[default]
    Exact,
    /// Decay replaced by `Γ₂t/2` for level 2 and zero for level 1.
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsOptions {
    pub vacuum: VacuumMode,
    /// Dress single-excitation amplitudes with source decay and level shifts.
    pub resummed: bool,
    /// Include the one-boson-per-reservoir sector.
    pub double_sector: bool,
    /// Relative tolerance of the time-domain integrals.
    pub tolerance: f64,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        DynamicsOptions {
            vacuum: VacuumMode::Exact,
            resummed: true,
            double_sector: true,
            tolerance: 1e-8,
        }
    }
}

/// Simulation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Isolated,
    Stationary,
    Nonstationary,
}

/// `⟨χ_m(t′)|χ_n(t)⟩` split by sector; index `[m-1][n-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overlaps {
    pub vac: [[C64; 2]; 2],
    pub single: [[C64; 2]; 2],
    pub double: [[C64; 2]; 2],
}

impl Overlaps {
    pub fn total(&self, m: usize, n: usize) -> C64 {
        let (i, j) = (m - 1, n - 1);
        self.vac[i][j] + self.single[i][j] + self.double[i][j]
    }
}

/// One row of a `P_R(t)` series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRecord {
    pub t: f64,
    pub p_right: f64,
    pub vac_term: f64,
    pub single_term: f64,
    pub double_term: f64,
    /// Part of `vac_term` due to the product of the two reservoirs'
    /// vacuum factors beyond their additive combination (after removing the
    /// level-independent first-order phase of each factor).
    pub cross_term: f64,
    pub norm: f64,
}

/// Tabulated series with its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub mode: Mode,
    pub system: SystemParams,
    pub reservoir_a: ReservoirSpec,
    pub reservoir_b: ReservoirSpec,
    pub records: Vec<PRecord>,
}

impl TimeSeries {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_right).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.records.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::domain("grid", "times must be strictly increasing"));
            }
        }
        if self.records.iter().any(|r| !r.p_right.is_finite()) {
            return Err(Error::domain("p_right", "non-finite value"));
        }
        Ok(())
    }
}

/// `½[N₁ + N₂ + 2·Re(e^{−iΔt} O₁₂)]`.
fn assemble(n1: f64, n2: f64, o12: C64, delta_t: f64) -> f64 {
    0.5 * (n1 + n2 + 2.0 * (C64::from_polar(1.0, -delta_t) * o12).re)
}

/// Amplitudes of `|χ_n(t)⟩` for both levels at one time.
///
/// `vac[n-1] = ⟨n|L⟩·u_n(t)`. Single and double kernels are evaluated on
/// demand; they include `⟨k|L⟩` and the free bath phases `e^{−iωt}`, and
/// must be multiplied by `γω^{3/2}` per boson.
#[derive(Debug, Clone, Copy)]
pub struct ExcitationAmplitudes {
    pub t: f64,
    pub vac: [C64; 2],
    sys: SystemParams,
    lambda: [C64; 2],
}

impl ExcitationAmplitudes {
    pub fn single(&self, n: usize, omega: f64) -> C64 {
        let k = TwoLevelSystem::other(n);
        let a = kernels::single_excitation_resummed(n, omega, self.t, &self.sys, self.lambda);
        a * TwoLevelSystem::overlap_left(k) * C64::from_polar(1.0, -omega * self.t)
    }

    pub fn double(&self, n: usize, wa: f64, wb: f64) -> C64 {
        let d = kernels::double_excitation_bare(n, wa, wb, self.t, &self.sys);
        d * TwoLevelSystem::overlap_left(n) * C64::from_polar(1.0, -(wa + wb) * self.t)
    }
}

/// Evaluator for one system and reservoir pair.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub sys: SystemParams,
    pub ra: ReservoirSpec,
    pub rb: ReservoirSpec,
    pub opts: DynamicsOptions,
    pub pt: StationaryPT,
    lambda: [C64; 2],
}

impl Simulator {
    pub fn new(sys: SystemParams, ra: ReservoirSpec, rb: ReservoirSpec, opts: DynamicsOptions) -> Result<Self> {
        sys.validate()?;
        ra.validate()?;
        rb.validate()?;
        if !(opts.tolerance > 0.0 && opts.tolerance <= 1e-3) {
            return Err(Error::domain("tolerance", "must lie in (0, 1e-3]"));
        }
        let pt = StationaryPT::new(&sys, &ra, &rb)?;
        let tot = pt.total();
        let lambda = if opts.resummed {
            [C64::new(0.0, tot.de1 / sys.h), C64::new(0.5 * tot.gamma2, tot.de2 / sys.h)]
        } else {
            [C64::new(0.0, 0.0); 2]
        };
        Ok(Simulator {
            sys,
            ra,
            rb,
            opts,
            pt,
            lambda,
        })
    }

    pub fn reservoir(&self, r: Reservoir) -> &ReservoirSpec {
        match r {
            Reservoir::A => &self.ra,
            Reservoir::B => &self.rb,
        }
    }

    /// `λ_j = Γ_j/2 + iδE_j/h` (zero when resummation is off).
    pub fn lambda(&self) -> [C64; 2] {
        self.lambda
    }

    /// `[10/Ω, 0.1/(Γ₂,A + Γ₂,B)]`.
    pub fn validity_window(&self) -> (f64, f64) {
        let g = self.pt.total().gamma2;
        (10.0 / self.sys.omega, if g > 0.0 { 0.1 / g } else { f64::INFINITY })
    }

    fn check_t(t: f64) -> Result<()> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain("t", "time must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Vacuum cumulant of one reservoir for level `n`.
    pub fn cumulant(&self, n: usize, t: f64, which: Reservoir) -> Result<C64> {
        Self::check_t(t)?;
        let r = self.reservoir(which);
        match self.opts.vacuum {
            VacuumMode::Exact => timedomain::vacuum_cumulant(n, t, &self.sys, r, self.opts.tolerance),
            VacuumMode::Markov => self.markov_cumulant(n, t, r),
        }
    }

    fn markov_cumulant(&self, n: usize, t: f64, r: &ReservoirSpec) -> Result<C64> {
        if r.is_off() || t == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let tls = self.sys.two_level();
        let shifts = crate::stationary::ReservoirShifts::compute(r, &tls)?;
        let (de, g) = if n == 1 { (shifts.de1, 0.0) } else { (shifts.de2, shifts.gamma2) };
        let a = tls.omega_mn(TwoLevelSystem::other(n), n);
        let req = BathIntegralRequest::new(*r, Kernel::ResonantSine { a, t }, self.opts.tolerance.max(1e-10));
        let sine = integrate_bath(&req)?.re();
        let x2 = tls.x12 * tls.x12;
        Ok(C64::new(-0.5 * g * t, -t * de / tls.h - x2 / (PI * tls.h) * sine))
    }

    /// Frequency-domain form of the exact cumulant:
    /// `−itδE_n/h − (x12²/πh)·[∫J(1−cos Xt)/X² + i∫J sin(Xt)/X²]`.
    pub fn cumulant_frequency(&self, n: usize, t: f64, which: Reservoir) -> Result<C64> {
        Self::check_t(t)?;
        let r = self.reservoir(which);
        if r.is_off() || t == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let tls = self.sys.two_level();
        let de = crate::stationary::energy_shift(n, r, &tls)?;
        let a = tls.omega_mn(TwoLevelSystem::other(n), n);
        let tol = self.opts.tolerance.max(1e-10);
        let v = integrate_bath(&BathIntegralRequest::new(*r, Kernel::ResonantVersine { a, t }, tol))?.re();
        let s = integrate_bath(&BathIntegralRequest::new(*r, Kernel::ResonantSine { a, t }, tol))?.re();
        let x2 = tls.x12 * tls.x12;
        Ok(C64::new(0.0, -t * de / tls.h) - C64::new(v, s) * (x2 / (PI * tls.h)))
    }

    /// `⟨n|U₀₀(t)|n⟩ = exp(K_{n,A} + K_{n,B})`. The product of the two
    /// reservoir factors carries the cross term `−t²δE⁽¹⁾_A δE⁽¹⁾_B/h²` once.
    pub fn u00_diag(&self, n: usize, t: f64) -> Result<C64> {
        Ok((self.cumulant(n, t, Reservoir::A)? + self.cumulant(n, t, Reservoir::B)?).exp())
    }

    /// Single-excitation kernel for final level `m` fed from `n ≠ m`.
    pub fn single_excitation_kernel(&self, m: usize, n: usize, _which: Reservoir, omega: f64, t: f64) -> Result<C64> {
        if m == n {
            return Err(Error::domain("m", "single excitations connect different levels"));
        }
        if !(omega > 0.0) {
            return Err(Error::domain("omega", "mode frequency must be positive"));
        }
        Self::check_t(t)?;
        Ok(kernels::single_excitation_resummed(m, omega, t, &self.sys, self.lambda))
    }

    /// Bare double-excitation kernel.
    pub fn double_excitation_kernel(&self, n: usize, wa: f64, wb: f64, t: f64) -> Result<C64> {
        if !(wa > 0.0 && wb > 0.0) {
            return Err(Error::domain("omega", "mode frequencies must be positive"));
        }
        Self::check_t(t)?;
        Ok(kernels::double_excitation_bare(n, wa, wb, t, &self.sys))
    }

    pub fn chi_state(&self, t: f64) -> Result<ExcitationAmplitudes> {
        Self::check_t(t)?;
        let u1 = self.u00_diag(1, t)?;
        let u2 = self.u00_diag(2, t)?;
        Ok(ExcitationAmplitudes {
            t,
            vac: [u1 * TwoLevelSystem::overlap_left(1), u2 * TwoLevelSystem::overlap_left(2)],
            sys: self.sys,
            lambda: self.lambda,
        })
    }

    /// Overlaps between `χ(t′)` (bra) and `χ(t)` (ket). For `t′ ≠ t` only the
    /// diagonal entries are filled.
    pub fn overlaps(&self, tp: f64, t: f64) -> Result<Overlaps> {
        Self::check_t(t)?;
        Self::check_t(tp)?;
        if t == 0.0 && tp == 0.0 {
            // U(0) = 1: ⟨m|L⟩⟨L|n⟩ = ±½ exactly, no excitations.
            let h = C64::new(0.5, 0.0);
            return Ok(Overlaps {
                vac: [[h, -h], [-h, h]],
                ..Default::default()
            });
        }
        let tol = self.opts.tolerance;
        let ket = self.chi_state(t)?;
        let bra = if tp == t { ket } else { self.chi_state(tp)? };
        let equal = tp == t;
        let pairs: &[(usize, usize)] = if equal { &[(1, 1), (2, 2), (1, 2)] } else { &[(1, 1), (2, 2)] };
        let mut o = Overlaps::default();
        for &(m, n) in pairs {
            o.vac[m - 1][n - 1] = bra.vac[m - 1].conj() * ket.vac[n - 1];
            let mut s = C64::new(0.0, 0.0);
            for r in [&self.ra, &self.rb] {
                s += timedomain::single_overlap(m, n, tp, t, &self.sys, r, self.lambda, tol)?;
            }
            o.single[m - 1][n - 1] = s;
        }
        if self.opts.double_sector {
            let d = timedomain::double_overlaps(tp, t, &self.sys, &self.ra, &self.rb, tol.max(1e-6))?;
            for (i, &(m, n)) in timedomain::DOUBLE_PAIRS.iter().enumerate() {
                if equal || m == n {
                    o.double[m - 1][n - 1] = d[i];
                }
            }
        }
        if equal {
            o.vac[1][0] = o.vac[0][1].conj();
            o.single[1][0] = o.single[0][1].conj();
            o.double[1][0] = o.double[0][1].conj();
        }
        Ok(o)
    }

    /// `⟨χ_m(t)|χ_n(t)⟩`.
    pub fn chi_overlap(&self, m: usize, n: usize, t: f64) -> Result<C64> {
        if !(1..=2).contains(&m) || !(1..=2).contains(&n) {
            return Err(Error::domain("n", "level index must be 1 or 2"));
        }
        Ok(self.overlaps(t, t)?.total(m, n))
    }

    /// `⟨χ_m(t)|χ_n(t)⟩` by direct frequency integration of the kernels.
    /// Intended for moderate `t`; used to cross-check the time-domain route.
    pub fn chi_overlap_frequency(&self, m: usize, n: usize, t: f64) -> Result<C64> {
        let st = self.chi_state(t)?;
        let mut total = st.vac[m - 1].conj() * st.vac[n - 1];
        let qo = QuadOptions {
            abs_tol: 1e-16,
            rel_tol: 1e-10,
            max_intervals: 4000,
        };
        for r in [&self.ra, &self.rb] {
            if r.is_off() {
                continue;
            }
            let mut bp: Vec<f64> = (0..12).map(|e| r.lambda * 10f64.powi(-e)).collect();
            bp.extend([self.sys.delta, 2.0 * self.sys.delta]);
            if t > 0.0 {
                bp.extend((1..40).map(|j| self.sys.delta + j as f64 * PI / t));
            }
            let f = |w: f64| st.single(m, w).conj() * st.single(n, w) * r.density(w);
            let v = quad::adaptive(f, 0.0, 60.0 * r.lambda, &bp, qo)?;
            total += v.value * (2.0 / PI);
        }
        if self.opts.double_sector && !self.ra.is_off() && !self.rb.is_off() {
            let tol = 1e-6;
            let qa = BathIntegralRequest::new(self.ra, Kernel::One, tol);
            let qb = BathIntegralRequest::new(self.rb, Kernel::One, tol);
            let k2 = Kernel2::DoubleOverlap { m, n, t, sys: self.sys };
            let d = integrate_bath2(&qa, &qb, &k2)?;
            total += d.value * (4.0 / (PI * PI) * TwoLevelSystem::overlap_left(m) * TwoLevelSystem::overlap_left(n));
        }
        Ok(total)
    }

    /// `P_R(t)` with its sector breakdown.
    pub fn p_right(&self, t: f64) -> Result<PRecord> {
        Self::check_t(t)?;
        let (lo, hi) = self.validity_window();
        if t > 0.0 && (t < lo || t > hi) {
            log::debug!("t = {t} outside the validity window [{lo}, {hi}]");
        }
        let o = self.overlaps(t, t)?;
        let dt = self.sys.delta * t;
        let sector = |m: &[[C64; 2]; 2]| assemble(m[0][0].re, m[1][1].re, m[0][1], dt);
        let vac = sector(&o.vac);
        let single = sector(&o.single);
        let double = sector(&o.double);
        // Additive combination of the vacuum factors, each stripped of its
        // first-order renormalization phase (common to both levels).
        let mut add = [C64::new(0.0, 0.0); 2];
        let first = [self.pt.a.de1_first, self.pt.b.de1_first];
        for n in 1..=2 {
            let ka = self.cumulant(n, t, Reservoir::A)? + C64::new(0.0, t * first[0] / self.sys.h);
            let kb = self.cumulant(n, t, Reservoir::B)? + C64::new(0.0, t * first[1] / self.sys.h);
            add[n - 1] = (ka.exp() + kb.exp() - 1.0) * TwoLevelSystem::overlap_left(n);
        }
        let vac_add = assemble(add[0].norm_sqr(), add[1].norm_sqr(), add[0].conj() * add[1], dt);
        let norm = (o.total(1, 1) + o.total(2, 2)).re;
        Ok(PRecord {
            t,
            p_right: vac + single + double,
            vac_term: vac,
            single_term: single,
            double_term: double,
            cross_term: vac - vac_add,
            norm,
        })
    }

    /// `C(t, t′) = Σ_n e^{−iE_n(t−t′)/h}·⟨χ_n(t′)|χ_n(t)⟩`.
    pub fn correlation(&self, t: f64, tp: f64) -> Result<C64> {
        let o = self.overlaps(tp, t)?;
        let tls = self.sys.two_level();
        let mut c = C64::new(0.0, 0.0);
        for n in 1..=2 {
            c += C64::from_polar(1.0, -tls.energy(n) * (t - tp) / tls.h) * o.total(n, n);
        }
        Ok(c)
    }

    /// `P_R` on a grid in the given mode; grid points are evaluated in
    /// parallel and returned in order.
    pub fn series(&self, mode: Mode, grid: &[f64]) -> Result<TimeSeries> {
        let rows: Result<Vec<PRecord>> = grid
            .par_iter()
            .map(|&t| -> Result<PRecord> {
                match mode {
                    Mode::Isolated => {
                        let p = isolated_probability(t, &self.sys)?;
                        Ok(PRecord {
                            t,
                            p_right: p,
                            vac_term: p,
                            single_term: 0.0,
                            double_term: 0.0,
                            cross_term: 0.0,
                            norm: 1.0,
                        })
                    }
                    Mode::Stationary => {
                        let p = stationary_p_right(t, &self.pt)?;
                        Ok(PRecord {
                            t,
                            p_right: p,
                            vac_term: p,
                            single_term: 0.0,
                            double_term: 0.0,
                            cross_term: 0.0,
                            norm: 1.0,
                        })
                    }
                    Mode::Nonstationary => self.p_right(t),
                }
            })
            .collect();
        let ts = TimeSeries {
            mode,
            system: self.sys,
            reservoir_a: self.ra,
            reservoir_b: self.rb,
            records: rows?,
        };
        ts.validate()?;
        Ok(ts)
    }

    /// `C(t, t*)` for each `t` in the grid.
    pub fn correlation_series(&self, t_star: f64, grid: &[f64]) -> Result<Vec<(f64, C64)>> {
        grid.par_iter()
            .map(|&t| Ok((t, self.correlation(t, t_star)?)))
            .collect()
    }
}

/// `n` uniform points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Default grid: 500 points on `[0, 3/(Γ₂,A + Γ₂,B)]`.
pub fn default_grid(sim: &Simulator) -> Vec<f64> {
    let g = sim.pt.total().gamma2;
    let t_max = if g > 0.0 { 3.0 / g } else { 10.0 * 2.0 * PI / sim.sys.delta };
    uniform_grid(t_max, 500)
}

/// `R(t) = P^{AB} − P^{A} − P^{B} + P^{iso}`.
pub fn nonadditive_residual(
    sys: SystemParams,
    ra: ReservoirSpec,
    rb: ReservoirSpec,
    opts: DynamicsOptions,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let off = |r: ReservoirSpec| ReservoirSpec { j: 0.0, ..r };
    let ab = Simulator::new(sys, ra, rb, opts)?.series(Mode::Nonstationary, grid)?;
    let a = Simulator::new(sys, ra, off(rb), opts)?.series(Mode::Nonstationary, grid)?;
    let b = Simulator::new(sys, off(ra), rb, opts)?.series(Mode::Nonstationary, grid)?;
    let iso = Simulator::new(sys, off(ra), off(rb), opts)?.series(Mode::Nonstationary, grid)?;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            (
                t,
                ab.records[i].p_right - a.records[i].p_right - b.records[i].p_right + iso.records[i].p_right,
            )
        })
        .collect())
}

//! Sweep over the type-parameter difference `z` at constant total type.

use crate::dynamics::{DynamicsOptions, Mode, Simulator};
use crate::error::{Error, Result};
use crate::fit::{fit_envelope, EnvelopeFit};
use crate::model::{ReservoirSpec, SystemParams};
use serde::{Deserialize, Serialize};

/// Fixed reference time and lag grid for the correlation-based measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub t_star: f64,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub z: Vec<f64>,
    pub times: Vec<f64>,
    /// `p_right[i][k]` at `z[i]`, `times[k]`.
    pub p_right: Vec<Vec<f64>>,
    /// Oscillation energy of `|C(t, t*)|` around its exponential envelope.
    pub measure: Vec<f64>,
    pub envelopes: Vec<EnvelopeFit>,
}

impl MeasureSpec {
    /// `t* = 10/Ω` and `n` points from `t*` to `min(t_max, 0.1/Γ_total)`,
    /// i.e. inside the validity window of the simulator.
    pub fn default_for(sim: &Simulator, t_max: f64, n: usize) -> MeasureSpec {
        let (lo, hi) = sim.validity_window();
        let end = t_max.min(hi).max(2.0 * lo);
        let n = n.max(3);
        MeasureSpec {
            t_star: lo,
            grid: (0..n).map(|i| lo + (end - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// `s_A = 1 − z/2`, `s_B = 1 + z/2` with the coupling and cutoff of `base`.
pub fn reservoir_pair(base: &ReservoirSpec, z: f64) -> Result<(ReservoirSpec, ReservoirSpec)> {
    let sa = 1.0 - 0.5 * z;
    if !(sa > 0.0) {
        return Err(Error::domain("z", "requires 1 - z/2 > 0"));
    }
    Ok((
        ReservoirSpec { s: sa, ..*base },
        ReservoirSpec {
            s: 1.0 + 0.5 * z,
            ..*base
        },
    ))
}

/// Oscillation measure of `|C(t, t*)|` for `t ≥ t*` on the given grid.
pub fn correlation_measure(sim: &Simulator, spec: &MeasureSpec) -> Result<EnvelopeFit> {
    let pts: Vec<f64> = spec.grid.iter().copied().filter(|&t| t >= spec.t_star).collect();
    let c = sim.correlation_series(spec.t_star, &pts)?;
    let taus: Vec<f64> = c.iter().map(|(t, _)| t - spec.t_star).collect();
    let ys: Vec<f64> = c.iter().map(|(_, v)| v.norm()).collect();
    fit_envelope(&taus, &ys)
}

pub fn z_grid(zmin: f64, zmax: f64, nz: usize) -> Vec<f64> {
    match nz {
        0 => vec![],
        1 => vec![zmin],
        _ => (0..nz).map(|i| zmin + (zmax - zmin) * i as f64 / (nz - 1) as f64).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn nonadditivity_scan(
    sys: SystemParams,
    base: ReservoirSpec,
    zmin: f64,
    zmax: f64,
    nz: usize,
    times: &[f64],
    measure: &MeasureSpec,
    opts: DynamicsOptions,
) -> Result<ScanGrid> {
    let z = z_grid(zmin, zmax, nz);
    let mut grid = ScanGrid {
        z: z.clone(),
        times: times.to_vec(),
        p_right: Vec::with_capacity(nz),
        measure: Vec::with_capacity(nz),
        envelopes: Vec::with_capacity(nz),
    };
    for &zi in &z {
        let (ra, rb) = reservoir_pair(&base, zi)?;
        let sim = Simulator::new(sys, ra, rb, opts)?;
        let s = sim.series(Mode::Nonstationary, times)?;
        grid.p_right.push(s.values());
        let env = correlation_measure(&sim, measure)?;
        grid.measure.push(env.oscillation_energy);
        grid.envelopes.push(env);
    }
    Ok(grid)
}

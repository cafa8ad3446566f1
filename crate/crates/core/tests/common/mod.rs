//! Exact propagator of a two-level system coupled to a few discrete modes,
//! used as an independent check of the perturbative amplitude kernels.

#![allow(dead_code)]

use macroqubit::dynamics::kernels::{double_excitation_bare, single_excitation_bare, vacuum_mode_kernel};
use macroqubit::bath::Kernel;
use macroqubit::model::{ReservoirSpec, SystemParams};
use macroqubit::quad::gauss_legendre;
use macroqubit::C64;
use nalgebra::{DMatrix, SymmetricEigen};

/// Discrete modes `(ω, γ)` of reservoirs A and B.
pub struct ToyBath {
    pub a: Vec<(f64, f64)>,
    pub b: Vec<(f64, f64)>,
}

/// Largest deviation per amplitude class.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleErrors {
    pub vac: f64,
    pub single: f64,
    pub double: f64,
    /// Amplitudes that the selection rules forbid.
    pub forbidden: f64,
    /// Largest first-order amplitude bound `g·x12·t/h`.
    pub eps: f64,
}

impl OracleErrors {
    pub fn max(&self) -> f64 {
        self.vac.max(self.single).max(self.double).max(self.forbidden)
    }
}

/// Occupation vectors with at most two bosons in total.
fn fock_states(modes: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0; modes]];
    for i in 0..modes {
        let mut v = vec![0; modes];
        v[i] = 1;
        out.push(v);
    }
    for i in 0..modes {
        for j in i..modes {
            let mut v = vec![0; modes];
            v[i] += 1;
            v[j] += 1;
            out.push(v);
        }
    }
    out
}

/// Compares the second-order kernels with the exact interaction-picture
/// amplitudes `e^{iE_f t/h}⟨f|e^{−iHt/h}|n, vac⟩` for both initial levels.
///
/// `H = H_S + hΣω b†b − Σ g x(b + b†) + Σ x12²γ²ω²/2` with
/// `g = γω^{3/2}√(h/2)`; the last term is the identity counterterm that the
/// vacuum kernel carries as `it/ω`.
pub fn dyson_oracle(sys: &SystemParams, bath: &ToyBath, t: f64) -> OracleErrors {
    let modes: Vec<(f64, f64, usize)> = bath
        .a
        .iter()
        .map(|&(w, g)| (w, g, 0))
        .chain(bath.b.iter().map(|&(w, g)| (w, g, 1)))
        .collect();
    let m = modes.len();
    let fock = fock_states(m);
    let nf = fock.len();
    let dim = 2 * nf;
    let idx = |level: usize, f: usize| (level - 1) * nf + f;
    let h = sys.h;
    let e_sys = [-0.5 * h * sys.delta, 0.5 * h * sys.delta];
    let counter: f64 = modes.iter().map(|&(w, g, _)| 0.5 * sys.x12 * sys.x12 * g * g * w * w).sum();
    let coupling: Vec<f64> = modes.iter().map(|&(w, g, _)| g * w.powf(1.5) * (0.5 * h).sqrt()).collect();
    let bare = |level: usize, f: usize| {
        e_sys[level - 1] + h * fock[f].iter().zip(&modes).map(|(&k, &(w, _, _))| k as f64 * w).sum::<f64>()
    };

    let mut hm = DMatrix::<f64>::zeros(dim, dim);
    for level in 1..=2 {
        for f in 0..nf {
            hm[(idx(level, f), idx(level, f))] = bare(level, f) + counter;
        }
    }
    // −g·x12·(b_k + b_k†) between opposite levels.
    for f in 0..nf {
        for (k, g) in coupling.iter().enumerate() {
            let mut up = fock[f].clone();
            up[k] += 1;
            if let Some(f2) = fock.iter().position(|v| *v == up) {
                let amp = -g * sys.x12 * (up[k] as f64).sqrt();
                for (l1, l2) in [(1, 2), (2, 1)] {
                    hm[(idx(l2, f2), idx(l1, f))] += amp;
                    hm[(idx(l1, f), idx(l2, f2))] += amp;
                }
            }
        }
    }

    let eig = SymmetricEigen::new(hm);
    let phases: Vec<C64> = eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * t / h)).collect();
    let v = &eig.eigenvectors;
    let u = |row: usize, col: usize| -> C64 {
        (0..dim).map(|k| phases[k] * (v[(row, k)] * v[(col, k)])).sum()
    };
    let interaction = |level: usize, f: usize, n: usize| -> C64 {
        C64::from_polar(1.0, bare(level, f) * t / h) * u(idx(level, f), idx(n, 0))
    };

    let mut err = OracleErrors::default();
    err.eps = coupling.iter().fold(0.0f64, |a, g| a.max(g * sys.x12 * t / h));
    for n in 1..=2 {
        let other = 3 - n;
        let k: C64 = modes
            .iter()
            .map(|&(w, g, _)| vacuum_mode_kernel(n, w, t, sys) * (g * g * w.powi(3)))
            .sum();
        err.vac = err.vac.max((interaction(n, 0, n) - k.exp()).norm());
        err.forbidden = err.forbidden.max(interaction(other, 0, n).norm());
        for f in 1..nf {
            let occupied: Vec<usize> = (0..m).filter(|&i| fock[f][i] > 0).collect();
            let total: u8 = fock[f].iter().sum();
            if total == 1 {
                let (w, g, _) = modes[occupied[0]];
                let kernel = single_excitation_bare(other, w, t, sys) * (g * w.powf(1.5));
                err.single = err.single.max((interaction(other, f, n) - kernel).norm());
                err.forbidden = err.forbidden.max(interaction(n, f, n).norm());
                continue;
            }
            err.forbidden = err.forbidden.max(interaction(other, f, n).norm());
            let cross = occupied.len() == 2 && modes[occupied[0]].2 != modes[occupied[1]].2;
            if cross {
                let (wa, ga, _) = modes[occupied[0]];
                let (wb, gb, _) = modes[occupied[1]];
                let kernel = double_excitation_bare(n, wa, wb, t, sys) * (ga * wa.powf(1.5) * gb * wb.powf(1.5));
                err.double = err.double.max((interaction(n, f, n) - kernel).norm());
            }
        }
    }
    err
}

/// Three modes per reservoir with couplings scaled so that the largest
/// first-order amplitude equals `eps`.
pub fn toy_bath(sys: &SystemParams, t: f64, eps: f64) -> ToyBath {
    let a: [(f64, f64); 3] = [(0.3, 1.0), (0.8, 0.7), (1.7, 0.4)];
    let b: [(f64, f64); 3] = [(0.45, 0.9), (1.1, 0.6), (2.2, 0.3)];
    let gmax = a
        .iter()
        .chain(&b)
        .fold(0.0f64, |m, &(w, g)| m.max(g * w.powf(1.5) * (0.5 * sys.h).sqrt() * sys.x12 * t / sys.h));
    let s = eps / gmax;
    ToyBath {
        a: a.iter().map(|&(w, g)| (w, g * s)).collect(),
        b: b.iter().map(|&(w, g)| (w, g * s)).collect(),
    }
}

/// Composite Gauss–Legendre on geometric panels of `[a, b]`, independent of
/// the adaptive engine.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let ratio = if a > 0.0 { (b / a).powf(1.0 / panels as f64) } else { 0.0 };
    let mut total = 0.0;
    for p in 0..panels {
        let (lo, hi) = if a > 0.0 {
            (a * ratio.powi(p as i32), a * ratio.powi(p as i32 + 1))
        } else {
            (a + (b - a) * p as f64 / panels as f64, a + (b - a) * (p + 1) as f64 / panels as f64)
        };
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += x.iter().zip(&w).map(|(xi, wi)| wi * h * f(c + h * xi)).sum::<f64>();
    }
    total
}

/// `∫ J(ω)·K(ω)` with `(ω₀−ε, ω₀+ε)` cut out, by composite rules.
pub fn excised(r: &ReservoirSpec, k: &Kernel, w0: f64, eps: f64) -> f64 {
    let f = |w: f64| r.density(w) * k.eval(w);
    // Geometric panels crowd towards both edges of the excision.
    let left = composite(|u: f64| f(w0 - u), eps, w0, 300, 20);
    let near_right = composite(|u: f64| f(w0 + u), eps, w0, 300, 20);
    let far = composite(&f, 2.0 * w0, 400.0, 600, 20);
    left + near_right + far
}


/// Excision limit `ε → 0` by two Richardson steps (the error is odd in ε).
pub fn excision_limit(r: &ReservoirSpec, k: &Kernel, w0: f64) -> f64 {
    let eps = 1e-2 * w0;
    let i1 = excised(r, k, w0, eps);
    let i2 = excised(r, k, w0, 0.5 * eps);
    let i4 = excised(r, k, w0, 0.25 * eps);
    let r1 = 2.0 * i2 - i1;
    let r2 = 2.0 * i4 - i2;
    (8.0 * r2 - r1) / 7.0
}

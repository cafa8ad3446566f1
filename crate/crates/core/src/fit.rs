//! Least-squares fits of time series: the damped-cosine form of `P_R(t)` and
//! exponential envelopes of `|C(t, t*)|`.

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of `P ≈ ½(1 − e^{−Γt/2} cos(Δ̃t − θ₀))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingFit {
    pub delta_tilde: f64,
    pub gamma_eff: f64,
    pub theta0: f64,
    /// RMS misfit divided by the data half-range.
    pub residual: f64,
    pub rms: f64,
}

fn model(t: f64, p: &[f64; 3]) -> f64 {
    0.5 * (1.0 - (-0.5 * p[1] * t).exp() * (p[0] * t - p[2]).cos())
}

fn sse(ts: &[f64], ys: &[f64], p: &[f64; 3]) -> f64 {
    ts.iter().zip(ys).map(|(&t, &y)| (model(t, p) - y).powi(2)).sum()
}

/// Best phase for fixed `(Δ̃, Γ)`: minimizes over `θ` by projecting onto
/// `cos`/`sin` components.
fn best_theta(ts: &[f64], ys: &[f64], d: f64, g: f64) -> f64 {
    let (mut sc, mut ss) = (0.0, 0.0);
    for (&t, &y) in ts.iter().zip(ys) {
        let e = (-0.5 * g * t).exp();
        let r = 1.0 - 2.0 * y;
        sc += r * e * (d * t).cos();
        ss += r * e * (d * t).sin();
    }
    ss.atan2(sc)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Levenberg–Marquardt refinement with analytic derivatives.
fn refine(ts: &[f64], ys: &[f64], mut p: [f64; 3]) -> [f64; 3] {
    let mut mu = 1e-3;
    let mut cost = sse(ts, ys, &p);
    for _ in 0..500 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&t, &y) in ts.iter().zip(ys) {
            let e = (-0.5 * p[1] * t).exp();
            let ph = p[0] * t - p[2];
            let (s, c) = ph.sin_cos();
            let r = model(t, &p) - y;
            let j = [0.5 * e * s * t, 0.25 * t * e * c, -0.5 * e * s];
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj;
            for k in 0..3 {
                a[k][k] += mu * jtj[k][k].max(1e-300);
            }
            let Some(step) = solve3(a, [-jtr[0], -jtr[1], -jtr[2]]) else {
                mu *= 10.0;
                continue;
            };
            let q = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let c = sse(ts, ys, &q);
            if c <= cost {
                let rel = (0..3).map(|k| step[k].abs() / p[k].abs().max(1e-300)).fold(0.0, f64::max);
                p = q;
                cost = c;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                if rel < 1e-13 {
                    return p;
                }
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Fits `½(1 − e^{−Γt/2} cos(Δ̃t − θ₀))` to `(t, y)` samples.
pub fn fit_damped_cosine(ts: &[f64], ys: &[f64]) -> Result<TunnelingFit> {
    if ts.len() != ys.len() || ts.len() < 4 {
        return Err(Error::Fit("need at least 4 samples of equal length".into()));
    }
    let span = ts[ts.len() - 1] - ts[0];
    if !(span > 0.0) {
        return Err(Error::Fit("time span must be positive".into()));
    }
    // Coarse search over frequency and rate, phase projected out.
    let mut best = (f64::INFINITY, [0.0; 3]);
    let nd = 400;
    let dt_min = span / (ts.len() as f64);
    for i in 0..nd {
        let d = (0.2 / span) * ((PI_F / dt_min) / (0.2 / span)).powf(i as f64 / (nd - 1) as f64);
        for k in 0..41 {
            let g = if k == 0 { 0.0 } else { (0.01 / span) * 1000f64.powf((k - 1) as f64 / 39.0) };
            let th = best_theta(ts, ys, d, g);
            let p = [d, g, th];
            let c = sse(ts, ys, &p);
            if c < best.0 {
                best = (c, p);
            }
        }
    }
    let p = refine(ts, ys, best.1);
    let rms = (sse(ts, ys, &p) / ts.len() as f64).sqrt();
    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let amp = 0.5 * (hi - lo);
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::Fit("non-finite parameters".into()));
    }
    let theta = (p[2] + PI_F).rem_euclid(2.0 * PI_F) - PI_F;
    Ok(TunnelingFit {
        delta_tilde: p[0],
        gamma_eff: p[1],
        theta0: theta,
        residual: if amp > 0.0 { rms / amp } else { f64::INFINITY },
        rms,
    })
}

const PI_F: f64 = std::f64::consts::PI;

/// Fits the modified-tunneling form to a `P_R` series.
pub fn fit_modified_tunneling(series: &TimeSeries) -> Result<TunnelingFit> {
    fit_damped_cosine(&series.times(), &series.values())
}

/// `|C| ≈ a·e^{−κτ} + c` with the oscillation left around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub a: f64,
    pub kappa: f64,
    pub c: f64,
    /// Mean squared residual around the envelope.
    pub oscillation_energy: f64,
    /// RMS residual over the largest `|y|`.
    pub residual_rel: f64,
}

fn linear_ac(taus: &[f64], ys: &[f64], kappa: f64) -> (f64, f64, f64) {
    let n = taus.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in taus.iter().zip(ys) {
        let e = (-kappa * t).exp();
        se += e;
        see += e * e;
        sy += y;
        sey += e * y;
    }
    let det = see * n - se * se;
    let (a, c) = if det.abs() < 1e-300 * n {
        (0.0, sy / n)
    } else {
        ((sey * n - se * sy) / det, (see * sy - se * sey) / det)
    };
    let mse = taus
        .iter()
        .zip(ys)
        .map(|(&t, &y)| (a * (-kappa * t).exp() + c - y).powi(2))
        .sum::<f64>()
        / n;
    (a, c, mse)
}

/// Fits a monotone exponential envelope to samples at lags `τ ≥ 0`.
pub fn fit_envelope(taus: &[f64], ys: &[f64]) -> Result<EnvelopeFit> {
    if taus.len() != ys.len() || taus.len() < 3 {
        return Err(Error::Fit("need at least 3 samples of equal length".into()));
    }
    let span = taus.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    if !(span > 0.0) {
        return Err(Error::Fit("lag span must be positive".into()));
    }
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=300 {
        let k = (1e-3 / span) * 1e6f64.powf(i as f64 / 300.0);
        let (_, _, mse) = linear_ac(taus, ys, k);
        if mse < best.0 {
            best = (mse, k);
        }
    }
    // Golden-section refinement in log κ.
    let (mut lo, mut hi) = ((best.1 / 1.1).ln(), (best.1 * 1.1).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if linear_ac(taus, ys, x1.exp()).2 < linear_ac(taus, ys, x2.exp()).2 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let kappa = (0.5 * (lo + hi)).exp();
    let (a, c, mse) = linear_ac(taus, ys, kappa);
    let ymax = ys.iter().fold(0.0f64, |m, &y| m.max(y.abs()));
    Ok(EnvelopeFit {
        a,
        kappa,
        c,
        oscillation_energy: mse,
        residual_rel: if ymax > 0.0 { mse.sqrt() / ymax } else { 0.0 },
    })
}

//! Contractions evaluated in the time domain with the closed-form bath
//! correlation `C(u) = (2/π)∫J(ω)e^{−iωu}dω`.

use crate::error::Result;
use crate::model::{ReservoirSpec, SystemParams, TwoLevelSystem};
use crate::quad::{self, exprel, exprel2, CVec, QuadOptions};
use crate::C64;
use rayon::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `C(u) = pre·(1/Λ + iu)^{−(s+1)}` with the prefactor cached.
#[derive(Debug, Clone, Copy)]
pub struct Correlation {
    pre: f64,
    a: f64,
    s: f64,
    off: bool,
}

impl Correlation {
    pub fn new(r: &ReservoirSpec) -> Self {
        Correlation {
            pre: 2.0 / PI * r.j * r.lambda.powf(1.0 - r.s) * gamma(r.s + 1.0),
            a: 1.0 / r.lambda,
            s: r.s,
            off: r.is_off(),
        }
    }

    pub fn is_off(&self) -> bool {
        self.off
    }

    #[inline]
    pub fn eval(&self, u: f64) -> C64 {
        if self.off {
            return C64::new(0.0, 0.0);
        }
        let z = C64::new(self.a, u);
        (z.ln() * (-(self.s + 1.0))).exp() * self.pre
    }

    /// Antiderivative `(i/s)·pre·(1/Λ + iu)^{−s}`.
    fn primitive(&self, u: f64) -> C64 {
        let z = C64::new(self.a, u);
        (z.ln() * (-self.s)).exp() * I * (self.pre / self.s)
    }

    /// `∫_a^b C(u) du`.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        if self.off {
            return C64::new(0.0, 0.0);
        }
        self.primitive(b) - self.primitive(a)
    }

    /// `∫_t^∞ C(u) du`.
    pub fn tail(&self, t: f64) -> C64 {
        if self.off {
            return C64::new(0.0, 0.0);
        }
        -self.primitive(t)
    }
}

/// Breakpoints resolving the `1/Λ` peak of `C` around each centre and its
/// power-law tails, restricted to `(lo, hi)`.
fn log_points(lambda_inv: f64, centres: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut b = Vec::with_capacity(64);
    for &c in centres {
        b.push(c);
        let mut d = 0.01 * lambda_inv;
        while d < (hi - lo) {
            b.push(c + d);
            b.push(c - d);
            d *= 4.0;
        }
    }
    b.retain(|&x| x > lo && x < hi);
    b
}

pub(crate) fn opts(abs_tol: f64, rel_tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol,
        rel_tol,
        max_intervals: 20000,
    }
}

/// Exact second-order cumulant of one reservoir for the vacuum amplitude of
/// level `n`:
/// `K = −itδE⁽¹⁾/h − (x12²/2h)·∫₀^t (t−u) C(u) e^{−iΩ_{mn}u} du`.
///
/// The renormalization phase is cancelled analytically against the `u → ∞`
/// weight of `C`, which keeps the integrand free of large cancellations.
pub fn vacuum_cumulant(n: usize, t: f64, sys: &SystemParams, r: &ReservoirSpec, tol: f64) -> Result<C64> {
    let c = Correlation::new(r);
    if c.is_off() || t == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let tls = sys.two_level();
    let om = tls.omega_mn(TwoLevelSystem::other(n), n);
    let g = |u: f64| {
        let z = I * (-om * u);
        let em1 = exprel(z) * z;
        (em1 * (t - u) - u) * c.eval(u)
    };
    let bp = log_points(1.0 / r.lambda, &[0.0], 0.0, t);
    let out = quad::adaptive(g, 0.0, t, &bp, opts(1e-13 * r.j.max(1e-300) / 1e-4, tol))?;
    let pre = -tls.x12 * tls.x12 / (2.0 * tls.h);
    Ok((out.value - c.tail(t) * t) * pre)
}

/// Single-excitation contraction for one reservoir between times `t′` (bra,
/// level `m`) and `t` (ket, level `n`), resummed with `λ_j = Γ_j/2 + iδE_j/h`:
/// `Σ_α γ²ω³ conj(a_m(ω,t′)) a_n(ω,t) e^{−iω(t−t′)}`, including `⟨k|L⟩`.
pub fn single_overlap(
    m: usize,
    n: usize,
    tp: f64,
    t: f64,
    sys: &SystemParams,
    r: &ReservoirSpec,
    lambda: [C64; 2],
    tol: f64,
) -> Result<C64> {
    let c = Correlation::new(r);
    if c.is_off() || t == 0.0 || tp == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let tls = sys.two_level();
    let amp = |j: usize| {
        let k = TwoLevelSystem::other(j);
        I * (TwoLevelSystem::overlap_left(k) * tls.x12 / (2.0 * tls.h).sqrt())
    };
    let beta = |j: usize| {
        let k = TwoLevelSystem::other(j);
        I * tls.omega_mn(j, k) - lambda[k - 1] + lambda[j - 1]
    };
    let bm = beta(m).conj();
    let bn = beta(n);
    let b = bm + bn;
    let dt = t - tp;
    let g = |u: f64| {
        let lo = (dt - u).max(0.0);
        let hi = t.min(t - u);
        if hi <= lo {
            return C64::new(0.0, 0.0);
        }
        let len = hi - lo;
        let inner = (b * lo).exp() * exprel(b * len) * len;
        c.eval(u) * (bm * (u - dt)).exp() * inner
    };
    let bp = log_points(1.0 / r.lambda, &[0.0, dt], -tp, t);
    let scale = r.j.max(1e-300) / 1e-4;
    let out = quad::adaptive(g, -tp, t, &bp, opts(1e-14 * scale, tol))?;
    let pre = amp(m).conj() * amp(n) * (-lambda[m - 1].conj() * tp - lambda[n - 1] * t).exp();
    Ok(out.value * pre)
}

/// Interval of `τ` (ket time) compatible with lag `u` between `[0, t′]` and
/// `[0, t]`.
#[inline]
fn window(u: f64, dt: f64, t: f64) -> (f64, f64) {
    ((dt - u).max(0.0), t.min(t - u))
}

/// `Φ(u_A, u_B) = ∫dw L(w)·e^{−iD_n|w| + iD_m|w+v|}`, `v = u_A − u_B`, with
/// `L(w)` the overlap length of `τ_B ∈ I_B` and `τ_B + w ∈ I_A`.
#[cfg(test)]
fn phi(ua: f64, ub: f64, dt: f64, t: f64, dm: f64, dn: f64) -> C64 {
    let (pa, qa) = window(ua, dt, t);
    let (pb, qb) = window(ub, dt, t);
    if qa <= pa || qb <= pb {
        return C64::new(0.0, 0.0);
    }
    let v = ua - ub;
    let lo = pa - qb;
    let hi = qa - pb;
    let len = |w: f64| (qb.min(qa - w) - pb.max(pa - w)).max(0.0);
    let mut pts = [lo, pa - pb, qa - qb, hi, 0.0, -v];
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut acc = C64::new(0.0, 0.0);
    let mut prev = lo;
    for &p in pts.iter() {
        let p = p.clamp(lo, hi);
        if p <= prev {
            continue;
        }
        let (w0, w1) = (prev, p);
        let l = w1 - w0;
        let mid = 0.5 * (w0 + w1);
        let kappa = I * (-dn * mid.signum() + dm * (mid + v).signum());
        let ph0 = I * (-dn * w0.abs() + dm * (w0 + v).abs());
        let (l0, l1) = (len(w0), len(w1));
        let z = kappa * l;
        acc += ph0.exp() * (exprel(z) * l0 + exprel2(z) * (l1 - l0)) * l;
        prev = p;
    }
    acc
}

/// All three [`DOUBLE_PAIRS`] of `Φ` in one pass. `D_2 = −D_1` makes the
/// `(2,2)` phase the negative of the `(1,1)` one, so `Φ₂₂ = conj(Φ₁₁)`.
fn phi3(ua: f64, ub: f64, dt: f64, t: f64, delta: f64) -> CVec<3> {
    let zero = C64::new(0.0, 0.0);
    let (pa, qa) = window(ua, dt, t);
    let (pb, qb) = window(ub, dt, t);
    if qa <= pa || qb <= pb {
        return CVec([zero; 3]);
    }
    let v = ua - ub;
    let lo = pa - qb;
    let hi = qa - pb;
    let len = |w: f64| (qb.min(qa - w) - pb.max(pa - w)).max(0.0);
    let mut pts = [lo, pa - pb, qa - qb, hi, 0.0, -v];
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut same, mut mixed) = (zero, zero);
    let mut prev = lo;
    for &p in pts.iter() {
        let p = p.clamp(lo, hi);
        if p <= prev {
            continue;
        }
        let (w0, w1) = (prev, p);
        let l = w1 - w0;
        let mid = 0.5 * (w0 + w1);
        let (sw, sv) = (mid.signum(), (mid + v).signum());
        let (a0, b0) = (w0.abs(), (w0 + v).abs());
        let (l0, dl) = (len(w0), len(w1) - len(w0));
        let piece = |k: f64, ph: f64| {
            let z = C64::new(0.0, k * l);
            C64::from_polar(1.0, ph) * (exprel(z) * l0 + exprel2(z) * dl) * l
        };
        same += piece(delta * (sv - sw), delta * (b0 - a0));
        mixed += piece(delta * (sv + sw), delta * (b0 + a0));
        prev = p;
    }
    CVec([same, same.conj(), mixed])
}

/// Index pairs returned by [`double_overlaps`].
pub const DOUBLE_PAIRS: [(usize, usize); 3] = [(1, 1), (2, 2), (1, 2)];

/// Double-excitation contractions `Σ_{αβ} … conj(d_m(t′)) d_n(t)` for the
/// pairs in [`DOUBLE_PAIRS`], including `⟨m|L⟩⟨n|L⟩`.
///
/// The four-fold time integral reduces to `∫∫ C_A(u_A) C_B(u_B) Φ(u_A,u_B)`;
/// `Φ` is split into its double difference about the axes plus axis terms
/// whose `C`-weights are integrated in closed form.
pub fn double_overlaps(
    tp: f64,
    t: f64,
    sys: &SystemParams,
    ra: &ReservoirSpec,
    rb: &ReservoirSpec,
    tol: f64,
) -> Result<[C64; 3]> {
    let ca = Correlation::new(ra);
    let cb = Correlation::new(rb);
    let zero = [C64::new(0.0, 0.0); 3];
    if ca.is_off() || cb.is_off() || t == 0.0 || tp == 0.0 {
        return Ok(zero);
    }
    let dt = t - tp;
    let delta = sys.delta;
    let phis = |ua: f64, ub: f64| phi3(ua, ub, dt, t, delta);
    let p00 = phis(0.0, 0.0);
    let full_a = ca.integral(-tp, t);
    let full_b = cb.integral(-tp, t);
    let bpa = log_points(1.0 / ra.lambda, &[0.0, dt], -tp, t);
    let bpb = log_points(1.0 / rb.lambda, &[0.0, dt], -tp, t);
    let c2 = (sys.x12 * sys.x12 / (2.0 * sys.h)).powi(2);
    // Tolerances in raw units of the double integral.
    let abs_tol = 1e-12 / c2;

    let axis_a = quad::adaptive(|u: f64| mul(phis(u, 0.0) - p00, ca.eval(u)), -tp, t, &bpa, opts(abs_tol, tol))?;
    let axis_b = quad::adaptive(|u: f64| mul(phis(0.0, u) - p00, cb.eval(u)), -tp, t, &bpb, opts(abs_tol, tol))?;
    let mut common = bpa.clone();
    common.extend_from_slice(&bpb);
    let bulk = bulk_tensor(&phis, p00, &ca, &cb, -tp, t, &common, sys.delta, abs_tol);
    let mut out = zero;
    for (i, &(m, n)) in DOUBLE_PAIRS.iter().enumerate() {
        let raw = bulk.0[i] + axis_a.value.0[i] * full_b + axis_b.value.0[i] * full_a + p00.0[i] * full_a * full_b;
        out[i] = raw * (c2 * TwoLevelSystem::overlap_left(m) * TwoLevelSystem::overlap_left(n));
    }
    Ok(out)
}

/// Nodes per panel edge of the tensor rule.
const TENSOR_NODES: usize = 12;

/// `∫∫ C_A(u_A) C_B(u_B)·[Φ(u_A,u_B) − Φ(u_A,0) − Φ(0,u_B) + Φ(0,0)]` over
/// `[lo, hi]²` by a tensor Gauss rule on shared panels. Cells cut by the
/// `u_A = u_B` kink are split into two triangles; cells whose bound is
/// negligible against `abs_tol` are skipped.
#[allow(clippy::too_many_arguments)]
fn bulk_tensor(
    phis: &(dyn Fn(f64, f64) -> CVec<3> + Sync),
    p00: CVec<3>,
    ca: &Correlation,
    cb: &Correlation,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    delta: f64,
    abs_tol: f64,
) -> CVec<3> {
    let mut edges: Vec<f64> = vec![lo, hi];
    edges.extend(breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    // Phases of Φ move at most at rate 3Δ along either axis; cap each panel
    // at 3π of phase, well inside the reach of the 12-point rule.
    let cap = PI / delta.max(1e-300);
    let mut panels: Vec<(f64, f64)> = Vec::new();
    for w in edges.windows(2) {
        let k = ((w[1] - w[0]) / cap).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / k as f64;
        for i in 0..k {
            panels.push((w[0] + i as f64 * h, if i + 1 == k { w[1] } else { w[0] + (i + 1) as f64 * h }));
        }
    }
    let (gx, gw) = quad::gauss_legendre(TENSOR_NODES);
    struct Axis {
        x: Vec<f64>,
        w: Vec<f64>,
        ca: Vec<C64>,
        cb: Vec<C64>,
        pa0: Vec<CVec<3>>,
        p0b: Vec<CVec<3>>,
        ma: f64,
        mb: f64,
    }
    let axes: Vec<Axis> = panels
        .iter()
        .map(|&(a, b)| {
            let (c, hl) = (0.5 * (a + b), 0.5 * (b - a));
            let x: Vec<f64> = gx.iter().map(|&g| c + hl * g).collect();
            let w: Vec<f64> = gw.iter().map(|&g| hl * g).collect();
            let va: Vec<C64> = x.iter().map(|&u| ca.eval(u)).collect();
            let vb: Vec<C64> = x.iter().map(|&u| cb.eval(u)).collect();
            // Peak |C| on the panel sits at the end nearest the origin.
            let near = if a <= 0.0 && b >= 0.0 { 0.0 } else if a > 0.0 { a } else { b };
            Axis {
                pa0: x.iter().map(|&u| phis(u, 0.0)).collect(),
                p0b: x.iter().map(|&u| phis(0.0, u)).collect(),
                ma: ca.eval(near).norm() * (b - a),
                mb: cb.eval(near).norm() * (b - a),
                x,
                w,
                ca: va,
                cb: vb,
            }
        })
        .collect();
    let span = hi - lo;
    let cells = (panels.len() * panels.len()) as f64;
    let skip = 1e-3 * abs_tol / cells;
    let diff = |ua: f64, ub: f64| phis(ua, ub) - phis(ua, 0.0) - phis(0.0, ub) + p00;
    let row = |i: usize| {
        let pa = &axes[i];
        let mut acc = CVec([C64::new(0.0, 0.0); 3]);
        for (j, pb) in axes.iter().enumerate() {
            if 4.0 * span * span * pa.ma * pb.mb < skip {
                continue;
            }
            if i != j {
                for k in 0..TENSOR_NODES {
                    let wa = pa.ca[k] * pa.w[k];
                    for l in 0..TENSOR_NODES {
                        let f = phis(pa.x[k], pb.x[l]) - pa.pa0[k] - pb.p0b[l] + p00;
                        acc = acc + mul(f, wa * pb.cb[l] * pb.w[l]);
                    }
                }
                continue;
            }
            // Diagonal cell: triangles u_B ≤ u_A and u_A ≤ u_B.
            let (a0, a1) = panels[i];
            let len = a1 - a0;
            for k in 0..TENSOR_NODES {
                let xi = 0.5 * (1.0 + gx[k]);
                for l in 0..TENSOR_NODES {
                    let eta = 0.5 * (1.0 + gx[l]);
                    let wt = 0.25 * gw[k] * gw[l] * len * len * xi;
                    let x = a0 + len * xi;
                    let y = a0 + len * xi * eta;
                    let lower = mul(diff(x, y), ca.eval(x) * cb.eval(y) * wt);
                    let upper = mul(diff(y, x), ca.eval(y) * cb.eval(x) * wt);
                    acc = acc + lower + upper;
                }
            }
        }
        acc
    };
    // Rows are summed in order so the result does not depend on scheduling.
    let rows: Vec<CVec<3>> = (0..axes.len()).into_par_iter().map(row).collect();
    rows.into_iter().fold(CVec([C64::new(0.0, 0.0); 3]), |a, b| a + b)
}

#[inline]
fn mul(v: CVec<3>, z: C64) -> CVec<3> {
    CVec([v.0[0] * z, v.0[1] * z, v.0[2] * z])
}

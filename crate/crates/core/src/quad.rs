//! Low-level quadrature: adaptive Gauss–Kronrod, Gauss–Legendre nodes,
//! Wynn's epsilon algorithm and a Filon-type oscillatory rule.

use crate::error::{Error, Result};
use crate::C64;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: reals, complexes and small complex arrays.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Magnitude used for error control (max-norm for arrays).
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Fixed-size complex vector, used when several integrals share the
/// expensive part of their integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] += o.0[i];
        }
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] -= o.0[i];
        }
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for v in self.0.iter_mut() {
            *v *= k;
        }
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([C64::new(0.0, 0.0); N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525163383,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One application of the 21-point Kronrod rule: `(kronrod, |kronrod − gauss|)`.
pub fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let (k, e, _) = gk21_floor(f, a, b);
    (k, e)
}

/// As [`gk21`], also returning the rounding floor `50·ε·∫|f|` of the panel.
fn gk21_floor<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rabs = fc.magnitude() * WGK[10];
    let mut rg = V::zero();
    for j in 0..10 {
        let dx = hl * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        let s = f1 + f2;
        rk = rk + s * WGK[j];
        rabs += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            rg = rg + s * WG[j / 2];
        }
    }
    let k = rk * hl;
    let g = rg * hl;
    let floor = 50.0 * f64::EPSILON * (rabs * hl.abs()).max(k.magnitude());
    let err = (k - g).magnitude().max(floor);
    (k, err, floor)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutput<V> {
    pub value: V,
    pub abs_error: f64,
    /// Part of `abs_error` from panels already at the rounding floor.
    pub roundoff: f64,
    pub intervals: usize,
}

/// Tolerance and refinement budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

/// Globally adaptive Gauss–Kronrod over `[a, b]` with interior breakpoints.
///
/// On exhausting the interval budget the partial estimate is returned inside
/// [`Error::Integration`].
pub fn adaptive<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> Result<QuadOutput<V>> {
    let out = adaptive_lenient(&mut f, a, b, breakpoints, opts);
    let target = opts.abs_tol.max(opts.rel_tol * out.value.magnitude());
    let resolvable = out.abs_error - out.roundoff;
    if resolvable > target && out.intervals >= opts.max_intervals {
        return Err(Error::Integration {
            estimate: out.value.magnitude(),
            abs_error: out.abs_error,
            limit: opts.max_intervals,
        });
    }
    Ok(out)
}

/// As [`adaptive`] but always returns the best estimate.
pub fn adaptive_lenient<V: QuadValue, F: FnMut(f64) -> V>(
    f: &mut F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> QuadOutput<V> {
    if a == b {
        return QuadOutput {
            value: V::zero(),
            abs_error: 0.0,
            roundoff: 0.0,
            intervals: 0,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi && p.is_finite())
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap: BinaryHeap<Seg<V>> = BinaryHeap::with_capacity(64);
    let mut total = V::zero();
    let mut err = 0.0;
    for w in edges.windows(2) {
        let (v, e, fl) = gk21_floor(f, w[0], w[1]);
        total = total + v;
        err += e;
        heap.push(Seg { a: w[0], b: w[1], v, e, fl });
    }
    let mut unresolved = 0.0;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= target || heap.len() >= opts.max_intervals {
            // Re-sum to shed accumulated rounding in the running totals.
            let mut tv = V::zero();
            let mut te = unresolved;
            for s in heap.iter() {
                tv = tv + s.v;
                te += s.e;
            }
            return QuadOutput {
                value: tv * sign,
                abs_error: te,
                roundoff: unresolved,
                intervals: heap.len(),
            };
        }
        let Some(worst) = heap.pop() else { unreachable!() };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || worst.e <= worst.fl {
            // Interval is at the rounding floor or cannot be split further.
            unresolved += worst.e;
            err -= worst.e;
            heap.push(Seg { e: 0.0, ..worst });
            if err <= 0.0 {
                err = 0.0;
            }
            continue;
        }
        let (v1, e1, f1) = gk21_floor(f, worst.a, mid);
        let (v2, e2, f2) = gk21_floor(f, mid, worst.b);
        total = total - worst.v + v1 + v2;
        err = err - worst.e + e1 + e2;
        heap.push(Seg { a: worst.a, b: mid, v: v1, e: e1, fl: f1 });
        heap.push(Seg { a: mid, b: worst.b, v: v2, e: e2, fl: f2 });
    }
}

struct Seg<V> {
    a: f64,
    b: f64,
    v: V,
    e: f64,
    fl: f64,
}

impl<V> PartialEq for Seg<V> {
    fn eq(&self, o: &Self) -> bool {
        self.e == o.e
    }
}
impl<V> Eq for Seg<V> {}
impl<V> PartialOrd for Seg<V> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<V> Ord for Seg<V> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.e.total_cmp(&o.e)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Wynn's epsilon algorithm on a sequence of partial sums; returns the
/// extrapolated limit and a crude error estimate.
pub fn wynn_epsilon(partial: &[C64]) -> (C64, f64) {
    let n = partial.len();
    if n < 3 {
        let last = partial.last().copied().unwrap_or_default();
        return (last, f64::INFINITY);
    }
    let mut prev = vec![C64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<C64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut best_err = (partial[n - 1] - partial[n - 2]).norm();
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut broke = false;
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() < 1e-300 {
                broke = true;
                break;
            }
            next.push(prev[i + 1] + d.inv());
        }
        if broke {
            break;
        }
        k += 1;
        if k % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let e = (next[m - 1] - next[m - 2]).norm();
            if e < best_err {
                best_err = e;
                best = next[m - 1];
            }
        }
        prev = cur;
        cur = next;
    }
    (best, best_err)
}

/// Filon-type rule for `∫_a^b g(x) e^{iκx} dx`: `g` is interpolated by a
/// polynomial at `n` Gauss–Legendre points and the oscillatory moments are
/// integrated exactly.
pub fn filon_panel<F: FnMut(f64) -> C64>(g: &mut F, a: f64, b: f64, kappa: f64, n: usize) -> C64 {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let k = kappa * hl;
    let phase = C64::new(0.0, kappa * c).exp();
    let (xs, ws) = gauss_legendre(n.max(2));
    if k.abs() < 2.0 * n as f64 {
        // Mild oscillation: plain Gauss–Legendre with enough points is exact
        // to working precision for the interpolant.
        let (xs2, ws2) = gauss_legendre(2 * n + (k.abs() as usize) + 8);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in xs2.iter().zip(ws2.iter()) {
            s += g(c + hl * x) * C64::new(0.0, k * x).exp() * *w;
        }
        return s * phase * hl;
    }
    // Interpolate g in the Legendre basis, then use Σ c_j ∫P_j(x)e^{ikx}dx
    // with ∫_{-1}^{1} P_j(x) e^{ikx} dx = 2 i^j j_j(k).
    let vals: Vec<C64> = xs.iter().map(|x| g(c + hl * x)).collect();
    let m = xs.len();
    let mut coef = vec![C64::new(0.0, 0.0); m];
    for (x, (w, v)) in xs.iter().zip(ws.iter().zip(vals.iter())) {
        let p = legendre_all(m, *x);
        for j in 0..m {
            coef[j] += *v * (p[j] * w * (2.0 * j as f64 + 1.0) / 2.0);
        }
    }
    let jn = spherical_bessel_all(m, k);
    let mut s = C64::new(0.0, 0.0);
    let mut ip = C64::new(1.0, 0.0);
    for j in 0..m {
        s += coef[j] * ip * (2.0 * jn[j]);
        ip *= C64::new(0.0, 1.0);
    }
    s * phase * hl
}

fn legendre_all(m: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; m];
    p[0] = 1.0;
    if m > 1 {
        p[1] = x;
    }
    for k in 2..m {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

/// Spherical Bessel functions `j_0..j_{m-1}` at `x`; upward recurrence is
/// stable for `x > m`, otherwise Miller's downward recurrence is used.
fn spherical_bessel_all(m: usize, x: f64) -> Vec<f64> {
    let x = x.abs();
    let mut j = vec![0.0; m];
    let j0 = x.sin() / x;
    if x > m as f64 {
        j[0] = j0;
        if m > 1 {
            j[1] = x.sin() / (x * x) - x.cos() / x;
        }
        for k in 2..m {
            j[k] = (2.0 * k as f64 - 1.0) / x * j[k - 1] - j[k - 2];
        }
    } else {
        let start = m + 20 + x as usize;
        let mut f = vec![0.0; start + 2];
        f[start + 1] = 0.0;
        f[start] = 1e-30;
        for k in (1..=start).rev() {
            f[k - 1] = (2.0 * k as f64 + 1.0) / x * f[k] - f[k + 1];
        }
        let scale = j0 / f[0];
        for k in 0..m {
            j[k] = f[k] * scale;
        }
    }
    j
}

/// `(e^z − 1)/z`, accurate near `z = 0`.
pub fn exprel(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let mut term = C64::new(1.0, 0.0);
        let mut s = term;
        for k in 2..8 {
            term = term * z / k as f64;
            s += term;
        }
        s
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `∫₀¹ s e^{zs} ds = (e^z(z−1) + 1)/z²`, accurate near `z = 0`.
pub fn exprel2(z: C64) -> C64 {
    if z.norm() < 1e-2 {
        // Σ z^k / (k! (k+2))
        let mut term = C64::new(1.0, 0.0);
        let mut s = C64::new(0.5, 0.0);
        for k in 1..10 {
            term = term * z / k as f64;
            s += term / (k as f64 + 2.0);
        }
        s
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

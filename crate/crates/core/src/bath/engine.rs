use super::kernel::Kernel;
use super::{BathIntegralRequest, BathIntegralResult, Method, ABS_FLOOR};
use crate::error::{Error, Result};
use crate::model::ReservoirSpec;
use crate::quad::{self, QuadOptions};
use crate::C64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};
use std::f64::consts::PI;

pub(crate) const MAX_INTERVALS: usize = 6000;
/// Oscillatory kernels switch to per-period segmentation beyond this many
/// periods on the truncated domain.
const SEGMENT_SWITCH_PERIODS: f64 = 200.0;
const MAX_SEGMENTS: usize = 400;

fn opts(tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: 0.1 * ABS_FLOOR,
        rel_tol: 0.1 * tol,
        max_intervals: MAX_INTERVALS,
    }
}

fn breakpoints(r: &ReservoirSpec, k: &Kernel, lo: f64, hi: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (0..14).map(|e| r.lambda * 10f64.powi(-e)).collect();
    b.extend([2.0, 5.0, 10.0, 20.0].iter().map(|m| m * r.lambda));
    b.extend(k.features());
    b.retain(|&x| x > lo && x < hi);
    b
}

/// Bound on `∫_w^∞ J(ω)|K(ω)| dω` from the kernel envelope and the upper
/// incomplete gamma function.
fn tail_bound(r: &ReservoirSpec, k: &Kernel, w: f64) -> f64 {
    let (c, p) = k.envelope(w);
    let a = r.s + p + 1.0;
    if a <= 0.0 {
        return f64::INFINITY;
    }
    let q = gamma_ur(a, w / r.lambda);
    c * r.j * r.lambda.powf(1.0 - r.s) * r.lambda.powf(a) * gamma(a) * q
}

fn truncation(r: &ReservoirSpec, k: &Kernel, lo: f64) -> f64 {
    let f = k.features().into_iter().fold(lo, f64::max);
    (40.0 * r.lambda).max(4.0 * f)
}

fn check_origin(r: &ReservoirSpec, k: &Kernel) -> Result<()> {
    if r.s + k.origin_power() <= -1.0 {
        return Err(Error::Divergent(format!(
            "kernel `{}` is not integrable against omega^{} at the origin",
            k.id(),
            r.s
        )));
    }
    Ok(())
}

pub(crate) fn plain(req: &BathIntegralRequest) -> Result<(C64, f64, Method)> {
    let r = req.reservoir;
    if r.is_off() {
        return Ok((C64::new(0.0, 0.0), 0.0, Method::Exact));
    }
    check_origin(&r, &req.kernel)?;
    range(&r, &req.kernel, 0.0, req.tolerance, false)
}

/// `∫_lo^∞ J·K` for a kernel with no pole in `(lo, ∞)`.
fn range(r: &ReservoirSpec, k: &Kernel, lo: f64, tol: f64, force_segments: bool) -> Result<(C64, f64, Method)> {
    let mut w = truncation(r, k, lo);
    let mut tail = tail_bound(r, k, w);
    let rate = k.rate();
    let periods = rate * (w - lo) / (2.0 * PI);
    let oscillatory = k.oscillatory_parts(lo.max(1.0)).is_some();
    if oscillatory && (periods > SEGMENT_SWITCH_PERIODS || force_segments) {
        let (v, e) = segmented(r, k, lo, w, tol)?;
        return Ok((v, e, Method::Segmented));
    }
    let f = |x: f64| r.density(x) * k.eval(x);
    let bp = breakpoints(r, k, lo, w);
    let out = quad::adaptive(f, lo, w, &bp, opts(tol))?;
    while tail > 0.1 * tol * out.value.abs() + ABS_FLOOR && w < 1e4 * r.lambda {
        w *= 2.0;
        tail = tail_bound(r, k, w);
    }
    let ext = if w > truncation(r, k, lo) {
        quad::adaptive(f, truncation(r, k, lo), w, &[], opts(tol))?.value
    } else {
        0.0
    };
    Ok((C64::new(out.value + ext, 0.0), out.abs_error + tail, Method::Adaptive))
}

/// Direct adaptive integration near the origin, then half-period segments of
/// the oscillatory part accelerated with Wynn's epsilon algorithm.
fn segmented(r: &ReservoirSpec, k: &Kernel, lo: f64, w: f64, tol: f64) -> Result<(C64, f64)> {
    let rate = k.rate();
    let half = PI / rate;
    let feat = k.features().into_iter().fold(0.0, f64::max);
    let w0 = (lo + 40.0 * half).max(4.0 * feat).max(lo);
    let f = |x: f64| r.density(x) * k.eval(x);
    let bp = breakpoints(r, k, lo, w0);
    let head = quad::adaptive(f, lo, w0, &bp, opts(tol))?;

    // Smooth remainder of the split K = smooth + Re(coef·g·e^{iωt}).
    let smooth = |x: f64| r.density(x) * k.oscillatory_parts(x).map_or(0.0, |p| p.0);
    let bp2 = breakpoints(r, k, w0, w);
    let sm = quad::adaptive(smooth, w0, w, &bp2, opts(tol))?;

    let coef = k.oscillatory_parts(w0).map(|p| p.2).unwrap_or_default();
    let osc = |x: f64| {
        let g = k.oscillatory_parts(x).map_or(0.0, |p| p.1);
        C64::new(0.0, rate * x).exp() * (r.density(x) * g)
    };
    // Align segment edges with zeros of the phase rate·ω.
    let start = (w0 / half).ceil() * half;
    let first = quad::adaptive(osc, w0, start, &[], opts(tol))?;
    let mut partial = Vec::with_capacity(64);
    let mut acc = first.value;
    let mut seg_err = first.abs_error;
    let mut a = start;
    let mut limit = acc;
    let mut lim_err = f64::INFINITY;
    for n in 0..MAX_SEGMENTS {
        let (v, e) = quad::gk21(&mut |x| osc(x), a, a + half);
        acc += v;
        seg_err += e;
        a += half;
        partial.push(acc);
        if a >= w {
            limit = acc;
            lim_err = 0.0;
            break;
        }
        if n >= 10 && n % 2 == 1 {
            let (l, e) = quad::wynn_epsilon(&partial);
            limit = l;
            lim_err = e;
            let scale = (head.value + sm.value).abs().max((coef * l).re.abs());
            if e < 0.01 * tol * scale {
                break;
            }
        }
    }
    let oscv = (coef * limit).re;
    let value = head.value + sm.value + oscv;
    let err = head.abs_error + sm.abs_error + seg_err + lim_err + tail_bound(r, k, w);
    Ok((C64::new(value, 0.0), err))
}

pub(crate) fn principal_value(req: &BathIntegralRequest, pole: f64) -> Result<(C64, f64)> {
    let r = req.reservoir;
    if r.is_off() {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let k = req.kernel;
    check_origin(&r, &k)?;
    let phi = |x: f64| {
        if k.pole() == Some(pole) {
            r.density(x) * k.residue_form(x)
        } else {
            r.density(x) * k.eval(x) * (x - pole)
        }
    };
    let mut bp = breakpoints(&r, &k, 0.0, 2.0 * pole);
    bp.push(pole);
    let pieces = |tol: f64| -> Result<(f64, C64, f64)> {
        let window = principal_value_fn(&phi, pole, 0.0, 2.0 * pole, tol, &bp)?;
        let (rest, rest_err, _) = range(&r, &k, 2.0 * pole, tol, false)?;
        Ok((window.0, rest, window.1 + rest_err))
    };
    let (mut w, mut rest, mut err) = pieces(req.tolerance)?;
    // Window and remainder can nearly cancel; tighten both by the ratio.
    let sum = (C64::new(w, 0.0) + rest).norm();
    let scale = w.abs() + rest.norm();
    if err > 0.5 * req.tolerance * sum && sum > 0.0 {
        let tight = (req.tolerance * sum / scale).max(1e-14);
        (w, rest, err) = pieces(tight)?;
    }
    Ok((C64::new(w, 0.0) + rest, err))
}

/// `PV ∫_a^b φ(ω)/(ω − ω₀) dω` by subtracting `φ(ω₀)/(ω − ω₀)` and adding its
/// closed-form principal value `φ(ω₀)·ln((b − ω₀)/(ω₀ − a))`.
pub fn principal_value_fn<F: Fn(f64) -> f64>(
    phi: F,
    pole: f64,
    a: f64,
    b: f64,
    tol: f64,
    breakpoints: &[f64],
) -> Result<(f64, f64)> {
    if !(pole > a && pole < b) {
        return Err(Error::domain("pole", "must lie strictly inside the interval"));
    }
    let p0 = phi(pole);
    let g = |x: f64| {
        let d = x - pole;
        if d == 0.0 {
            0.0
        } else {
            (phi(x) - p0) / d
        }
    };
    let mut bp = breakpoints.to_vec();
    bp.push(pole);
    let out = quad::adaptive(g, a, b, &bp, opts(tol))?;
    let remainder = p0 * ((b - pole) / (pole - a)).ln();
    Ok((out.value + remainder, out.abs_error))
}

/// Outcome of evaluating one oscillatory integral two independent ways.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub t: f64,
    pub segmented: BathIntegralResult,
    pub filon: BathIntegralResult,
    pub discrepancy: f64,
    pub combined_error: f64,
    /// Strategies disagree beyond ten times the combined error bars.
    pub flagged: bool,
}

fn with_time(k: &Kernel, t: f64) -> Kernel {
    match *k {
        Kernel::ResonantSine { a, .. } => Kernel::ResonantSine { a, t },
        Kernel::ResonantVersine { a, .. } => Kernel::ResonantVersine { a, t },
        other => other,
    }
}

/// Evaluates the request at time `t` by (a) per-period segmentation with
/// Wynn acceleration and (b) Filon-type panels with exact oscillatory
/// moments, and reports the discrepancy.
pub fn oscillatory_strategy_crosscheck(req: &BathIntegralRequest, t: f64) -> Result<CrossCheckReport> {
    req.validate()?;
    let k = with_time(&req.kernel, t);
    let r = req.reservoir;
    if k.pole().is_some() {
        return Err(Error::domain("kernel", "cross-check needs a pole-free kernel"));
    }
    if let Kernel::ResonantSine { a, .. } | Kernel::ResonantVersine { a, .. } = k {
        if a <= 0.0 {
            return Err(Error::domain("kernel", "cross-check needs a positive shift a"));
        }
    }
    let tol = req.tolerance;
    let key = BathIntegralRequest { kernel: k, ..*req }.cache_key().digest();
    let (sv, se) = if r.is_off() {
        (C64::new(0.0, 0.0), 0.0)
    } else {
        check_origin(&r, &k)?;
        let force = k.oscillatory_parts(1.0).is_some() && t != 0.0;
        let (v, e, _) = range(&r, &k, 0.0, tol, force)?;
        (v, e)
    };
    let (fv, fe) = filon(&r, &k, tol);
    let discrepancy = (sv - fv).norm();
    let combined = se + fe + tol * sv.norm() + ABS_FLOOR;
    Ok(CrossCheckReport {
        t,
        segmented: BathIntegralResult {
            value: sv,
            abs_error: se,
            method: Method::Segmented,
            cache_key: key.clone(),
        },
        filon: BathIntegralResult {
            value: fv,
            abs_error: fe,
            method: Method::Filon,
            cache_key: key,
        },
        discrepancy,
        combined_error: combined,
        flagged: discrepancy > 10.0 * combined,
    })
}

/// Geometric panels on `[ω_min, W]`; on each, the non-oscillatory factor is
/// interpolated and the phase `e^{iωt}` integrated exactly.
fn filon(r: &ReservoirSpec, k: &Kernel, tol: f64) -> (C64, f64) {
    if r.is_off() {
        return (C64::new(0.0, 0.0), 0.0);
    }
    let w = truncation(r, k, 0.0);
    let wmin = 1e-12 * r.lambda;
    let mut edges = vec![wmin];
    let mut x = wmin;
    while x < w {
        x = (x * 1.25).min(w);
        edges.push(x);
    }
    let run = |n: usize| -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for e in edges.windows(2) {
            match k.oscillatory_parts(e[0]) {
                Some((_, _, coef)) => {
                    let rate = k.rate();
                    let mut g = |x: f64| C64::new(r.density(x) * k.oscillatory_parts(x).unwrap().1, 0.0);
                    let mut sm = |x: f64| C64::new(r.density(x) * k.oscillatory_parts(x).unwrap().0, 0.0);
                    let o = quad::filon_panel(&mut g, e[0], e[1], rate, n);
                    let s = quad::filon_panel(&mut sm, e[0], e[1], 0.0, n);
                    total += C64::new((coef * o).re + s.re, 0.0);
                }
                None => {
                    let mut f = |x: f64| C64::new(r.density(x) * k.eval(x), 0.0);
                    total += quad::filon_panel(&mut f, e[0], e[1], 0.0, n);
                }
            }
        }
        total
    };
    let lo = run(16);
    let hi = run(24);
    // Contribution of [0, ω_min] bounded by the kernel's magnitude there.
    let head = (r.density(wmin) * k.eval(wmin)).abs() * wmin;
    let _ = tol;
    (hi, (hi - lo).norm() + head + tail_bound(r, k, w))
}

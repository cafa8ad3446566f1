//! Named kernels `K(ω)` integrated against a spectral density.

use serde::{Deserialize, Serialize};

/// Below this distance from a removable singularity the kernel is evaluated
/// from its Taylor expansion.
pub const TAYLOR_RADIUS: f64 = 1e-6;

/// `sin(y)/y` with a series near zero.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < TAYLOR_RADIUS {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// Kernels with a closed-form evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `K ≡ 1`.
    One,
    /// `ω^k`.
    Power { k: i32 },
    /// `Ω/(ω(ω+Ω))`, the energy-shift kernel; a pole at `−Ω` when `Ω < 0`.
    ShiftRatio { omega: f64 },
    /// `1/(ω(ω − ω₀))`, principal value at `ω₀`.
    PvPole { pole: f64 },
    /// `sin((ω+a)t)/(ω+a)²`; a pole at `−a` when `a < 0`.
    ResonantSine { a: f64, t: f64 },
    /// `2 sin²((ω+a)t/2)/(ω+a)²`; removable singularity at `ω = −a`.
    ResonantVersine { a: f64, t: f64 },
    /// Normalized Gaussian, a mollified `δ(ω − center)`.
    Gaussian { center: f64, width: f64 },
}

impl Kernel {
    pub fn id(&self) -> &'static str {
        match self {
            Kernel::One => "one",
            Kernel::Power { .. } => "power",
            Kernel::ShiftRatio { .. } => "shift_ratio",
            Kernel::PvPole { .. } => "pv_pole",
            Kernel::ResonantSine { .. } => "resonant_sine",
            Kernel::ResonantVersine { .. } => "resonant_versine",
            Kernel::Gaussian { .. } => "gaussian",
        }
    }

    /// Parameters as raw bit patterns for cache keys.
    pub fn param_bits(&self) -> Vec<u64> {
        match *self {
            Kernel::One => vec![],
            Kernel::Power { k } => vec![k as i64 as u64],
            Kernel::ShiftRatio { omega } => vec![omega.to_bits()],
            Kernel::PvPole { pole } => vec![pole.to_bits()],
            Kernel::ResonantSine { a, t } | Kernel::ResonantVersine { a, t } => {
                vec![a.to_bits(), t.to_bits()]
            }
            Kernel::Gaussian { center, width } => vec![center.to_bits(), width.to_bits()],
        }
    }

    /// Simple pole of the kernel inside `(0, ∞)`, if any.
    pub fn pole(&self) -> Option<f64> {
        match *self {
            Kernel::ShiftRatio { omega } if omega < 0.0 => Some(-omega),
            Kernel::PvPole { pole } => Some(pole),
            Kernel::ResonantSine { a, t } if a < 0.0 && t != 0.0 => Some(-a),
            _ => None,
        }
    }

    /// Oscillation rate in ω, zero for non-oscillatory kernels.
    pub fn rate(&self) -> f64 {
        match *self {
            Kernel::ResonantSine { t, .. } | Kernel::ResonantVersine { t, .. } => t.abs(),
            _ => 0.0,
        }
    }

    /// Frequencies where the kernel has structure.
    pub fn features(&self) -> Vec<f64> {
        match *self {
            Kernel::ShiftRatio { omega } => vec![omega.abs(), 2.0 * omega.abs()],
            Kernel::PvPole { pole } => vec![pole, 2.0 * pole],
            Kernel::ResonantSine { a, .. } | Kernel::ResonantVersine { a, .. } => {
                vec![a.abs(), 2.0 * a.abs(), 4.0 * a.abs()]
            }
            Kernel::Gaussian { center, width } => (-8..=8)
                .map(|k| center + k as f64 * width)
                .filter(|&w| w > 0.0)
                .collect(),
            _ => vec![],
        }
    }

    /// Power `p` of the ω-dependence of `K` at small ω (`K ~ ω^p`), used to
    /// decide integrability against `ω^s`.
    pub fn origin_power(&self) -> f64 {
        match *self {
            Kernel::Power { k } => k as f64,
            Kernel::ShiftRatio { .. } | Kernel::PvPole { .. } => -1.0,
            Kernel::ResonantSine { a, .. } if a == 0.0 => -1.0,
            _ => 0.0,
        }
    }

    /// Envelope `(c, p)` with `|K(ω)| ≤ c·ω^p` for all `ω ≥ w`.
    pub fn envelope(&self, w: f64) -> (f64, f64) {
        match *self {
            Kernel::One => (1.0, 0.0),
            Kernel::Power { k } => (1.0, k as f64),
            Kernel::ShiftRatio { omega } => ((omega / (w + omega)).abs(), -1.0),
            Kernel::PvPole { pole } => (1.0 / (w - pole).abs(), -1.0),
            Kernel::ResonantSine { a, .. } => (1.0 / ((w + a) * (w + a)), 0.0),
            Kernel::ResonantVersine { a, .. } => (2.0 / ((w + a) * (w + a)), 0.0),
            Kernel::Gaussian { center, width } => {
                let z = ((w - center) / width).max(0.0);
                ((-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt()), 0.0)
            }
        }
    }

    /// `K(ω)`; removable singularities are replaced by their limits.
    /// At a genuine pole the value is not finite.
    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            Kernel::One => 1.0,
            Kernel::Power { k } => w.powi(k),
            Kernel::ShiftRatio { omega } => omega / (w * (w + omega)),
            Kernel::PvPole { pole } => 1.0 / (w * (w - pole)),
            Kernel::ResonantSine { a, t } => {
                let x = w + a;
                if x.abs() < TAYLOR_RADIUS {
                    // sin(xt)/x² = t/x − t³x/6 + …
                    t / x - t * t * t * x / 6.0
                } else {
                    (x * t).sin() / (x * x)
                }
            }
            Kernel::ResonantVersine { a, t } => {
                let x = w + a;
                let s = sinc(0.5 * x * t);
                0.5 * t * t * s * s
            }
            Kernel::Gaussian { center, width } => {
                let z = (w - center) / width;
                (-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }

    /// `K(ω)·(ω − ω₀)` for kernels with a pole, continuous through `ω₀`.
    pub fn residue_form(&self, w: f64) -> f64 {
        match *self {
            Kernel::ShiftRatio { omega } => omega / w,
            Kernel::PvPole { .. } => 1.0 / w,
            Kernel::ResonantSine { a, t } => {
                let x = w + a;
                t * sinc(x * t)
            }
            _ => self.eval(w) * (w - self.pole().unwrap_or(0.0)),
        }
    }

    /// Split for large-ω oscillatory evaluation:
    /// `K(ω) = smooth(ω) + Re(coef · g(ω) · e^{iωt})`.
    /// Returns `(smooth(ω), g(ω), coef)`, or `None` for non-oscillatory kernels.
    pub fn oscillatory_parts(&self, w: f64) -> Option<(f64, f64, num_complex::Complex64)> {
        use num_complex::Complex64 as C;
        match *self {
            Kernel::ResonantSine { a, t } if t != 0.0 => {
                let x = w + a;
                // sin(xt) = Re(−i e^{iat} e^{iωt})
                Some((0.0, 1.0 / (x * x), C::new(0.0, -1.0) * C::new(0.0, a * t).exp()))
            }
            Kernel::ResonantVersine { a, t } if t != 0.0 => {
                let x = w + a;
                let g = 1.0 / (x * x);
                // 2 sin²(xt/2) = 1 − cos(xt)
                Some((g, g, -C::new(0.0, a * t).exp()))
            }
            _ => None,
        }
    }
}

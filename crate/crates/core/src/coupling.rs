//! Evanescent coupling between two waveguides.
//!
//! The coupling is the overlap of the field of waveguide `m` with the index
//! perturbation of waveguide `l` weighted by `l`'s own field:
//!
//! ```text
//! 𝒥_ml = (ω ε₀ / 4) ∬ ℰ_m(x, y) · (n_g,l² − n_s²) · ℰ_l(x, y) dx dy
//! ```
//!
//! with the integral restricted to the core rectangle of `l`. Both fields are
//! separable and the perturbation is an indicator of a rectangle, so the
//! integral factors into two 1D overlaps that have closed forms.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::consts::EPSILON_0;
use crate::mode_solver::ModeSolution;
use crate::{Error, Result};

/// Default separation window for fitting the exponential law, meters.
pub const DEFAULT_FIT_RANGE: (f64, f64) = (15e-6, 40e-6);
/// Default spacing of the fit samples, meters.
pub const DEFAULT_FIT_STEP: f64 = 1e-6;
/// Default quadrature step of [`coupling_quadrature`], meters.
pub const DEFAULT_QUADRATURE_STEP: f64 = 0.02e-6;

/// Fold an angle into `[0, π/2]`.
///
/// Cross-sections share one orientation and both mode factors are even, so
/// the coupling only sees `|cos θ|` and `|sin θ|`.
pub fn fold_angle(theta: f64) -> f64 {
    let mut t = libm::fmod(theta, PI);
    if t < 0.0 {
        t += PI;
    }
    if t > FRAC_PI_2 {
        PI - t
    } else {
        t
    }
}

/// Center-to-center separation and direction of a waveguide pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    separation: f64,
    angle: f64,
}

impl PairGeometry {
    pub fn new(separation: f64, angle: f64) -> Result<Self> {
        if !(separation > 0.0 && separation.is_finite()) {
            return Err(Error::InvalidParameter { name: "separation", reason: "must be positive" });
        }
        if !angle.is_finite() {
            return Err(Error::InvalidParameter { name: "angle", reason: "must be finite" });
        }
        Ok(Self { separation, angle: fold_angle(angle) })
    }

    /// Geometry of the pair whose second center sits at `offset` from the first.
    pub fn from_offset(dx: f64, dy: f64) -> Result<Self> {
        Self::new(libm::hypot(dx, dy), libm::atan2(dy, dx))
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// Folded angle in `[0, π/2]`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    fn offset(&self) -> (f64, f64) {
        (self.separation * libm::cos(self.angle), self.separation * libm::sin(self.angle))
    }
}

/// ∫_{u0}^{u1} cos(α u + φ) du, stable as α → 0.
fn integral_cos(alpha: f64, phase: f64, u0: f64, u1: f64) -> f64 {
    let width = u1 - u0;
    let mid = 0.5 * (u0 + u1);
    let x = 0.5 * alpha * width;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { libm::sin(x) / x };
    width * libm::cos(alpha * mid + phase) * sinc
}

/// ∫_{u0}^{u1} e^{s (u − shift)} cos(κ u + φ) du.
fn integral_exp_cos(s: f64, shift: f64, kappa: f64, phase: f64, u0: f64, u1: f64) -> f64 {
    let denom = s * s + kappa * kappa;
    let anti = |u: f64| {
        let arg = kappa * u + phase;
        libm::exp(s * (u - shift)) * (s * libm::cos(arg) + kappa * libm::sin(arg)) / denom
    };
    anti(u1) - anti(u0)
}

/// One transverse factor of the overlap:
/// `∫_{−b}^{b} X_m(d + t) · cos(k_l t) dt`, where `X_m` is the slab profile
/// with half-width `a`, wavenumber `k_m` and decay `γ`.
fn overlap_1d(a: f64, k_m: f64, gamma: f64, d: f64, b: f64, k_l: f64) -> f64 {
    // u = d + t runs over [d − b, d + b]; cos(k_l t) = cos(k_l u − k_l d)
    let (lo, hi) = (d - b, d + b);
    let phase = -k_l * d;
    let edge = libm::cos(k_m * a);
    let mut total = 0.0;

    let left = (lo, hi.min(-a));
    if left.0 < left.1 {
        total += edge * integral_exp_cos(gamma, -a, k_l, phase, left.0, left.1);
    }
    let core = (lo.max(-a), hi.min(a));
    if core.0 < core.1 {
        // cos(k_m u)·cos(k_l u + φ) = ½cos((k_m − k_l)u − φ) + ½cos((k_m + k_l)u + φ)
        total += 0.5 * integral_cos(k_m - k_l, -phase, core.0, core.1)
            + 0.5 * integral_cos(k_m + k_l, phase, core.0, core.1);
    }
    let right = (lo.max(a), hi);
    if right.0 < right.1 {
        total += edge * integral_exp_cos(-gamma, a, k_l, phase, right.0, right.1);
    }
    total
}

fn check_normalized(mode_m: &ModeSolution, mode_l: &ModeSolution) -> Result<()> {
    if mode_m.is_normalized() && mode_l.is_normalized() {
        Ok(())
    } else {
        Err(Error::Unnormalized)
    }
}

fn prefactor(mode_m: &ModeSolution, mode_l: &ModeSolution) -> f64 {
    let ng = mode_l.spec.core_index();
    let ns = mode_l.spec.substrate_index();
    mode_l.omega * EPSILON_0 / 4.0 * (ng * ng - ns * ns) * mode_m.amplitude * mode_l.amplitude
}

/// Closed-form coupling from waveguide `m` to waveguide `l`, 1/m.
///
/// `geom` locates the center of `l` relative to the center of `m`.
pub fn coupling_analytic(
    mode_m: &ModeSolution,
    mode_l: &ModeSolution,
    geom: &PairGeometry,
) -> Result<f64> {
    check_normalized(mode_m, mode_l)?;
    let (dx, dy) = geom.offset();
    let ox = overlap_1d(
        0.5 * mode_m.spec.width(),
        mode_m.kx,
        mode_m.gamma_x,
        dx,
        0.5 * mode_l.spec.width(),
        mode_l.kx,
    );
    let oy = overlap_1d(
        0.5 * mode_m.spec.height(),
        mode_m.ky,
        mode_m.gamma_y,
        dy,
        0.5 * mode_l.spec.height(),
        mode_l.ky,
    );
    Ok(prefactor(mode_m, mode_l) * ox * oy)
}

/// Brute-force 2D trapezoidal evaluation of the same overlap on the core
/// rectangle of `l`, sampling both fields pointwise with spacing ≤ `step`.
pub fn coupling_quadrature(
    mode_m: &ModeSolution,
    mode_l: &ModeSolution,
    geom: &PairGeometry,
    step: f64,
) -> Result<f64> {
    check_normalized(mode_m, mode_l)?;
    if !(step > 0.0) {
        return Err(Error::InvalidParameter { name: "step", reason: "must be positive" });
    }
    let (dx, dy) = geom.offset();
    let (w, h) = (mode_l.spec.width(), mode_l.spec.height());
    let nx = libm::ceil(w / step) as usize;
    let ny = libm::ceil(h / step) as usize;
    let (hx, hy) = (w / nx as f64, h / ny as f64);
    let ng = mode_l.spec.core_index();
    let ns = mode_l.spec.substrate_index();
    let dn2 = ng * ng - ns * ns;

    let mut sum = 0.0;
    for j in 0..=ny {
        let y = -0.5 * h + j as f64 * hy;
        let wy = if j == 0 || j == ny { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for i in 0..=nx {
            let x = -0.5 * w + i as f64 * hx;
            let wx = if i == 0 || i == nx { 0.5 } else { 1.0 };
            row += wx * mode_m.field_at(x + dx, y + dy) * dn2 * mode_l.field_at(x, y);
        }
        sum += wy * row;
    }
    Ok(mode_l.omega * EPSILON_0 / 4.0 * sum * hx * hy)
}

/// Fitted `𝒥(r) = μ·exp(−ξ r)` at a fixed angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingLaw {
    pub angle: f64,
    /// μ, 1/m.
    pub prefactor: f64,
    /// ξ, 1/m.
    pub decay_rate: f64,
    /// RMS of the residuals of ln 𝒥.
    pub residual: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl CouplingLaw {
    pub fn eval(&self, separation: f64) -> f64 {
        self.prefactor * libm::exp(-self.decay_rate * separation)
    }
}

/// Least-squares line through `(r, ln 𝒥)`.
///
/// Needs at least five samples whose couplings span a factor of ten.
pub fn fit_exponential_samples(angle: f64, samples: &[(f64, f64)]) -> Result<CouplingLaw> {
    if samples.len() < 5 {
        return Err(Error::InvalidParameter { name: "samples", reason: "need at least 5" });
    }
    for (index, &(_, value)) in samples.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveCoupling { index, value });
        }
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    if hi < 10.0 * lo {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "couplings must span at least a decade",
        });
    }

    let n = samples.len() as f64;
    let mean_r = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_l = samples.iter().map(|s| libm::log(s.1)).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(r, v) in samples {
        sxy += (r - mean_r) * (libm::log(v) - mean_l);
        sxx += (r - mean_r) * (r - mean_r);
    }
    let slope = sxy / sxx;
    let intercept = mean_l - slope * mean_r;
    let ss: f64 = samples
        .iter()
        .map(|&(r, v)| {
            let e = libm::log(v) - (intercept + slope * r);
            e * e
        })
        .sum();

    let (r_min, r_max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.0), b.max(s.0)));
    Ok(CouplingLaw {
        angle,
        prefactor: libm::exp(intercept),
        decay_rate: -slope,
        residual: libm::sqrt(ss / n),
        r_min,
        r_max,
    })
}

/// Coupling between two identical waveguides sampled at `separations`
/// along `angle`, fitted with [`fit_exponential_samples`].
pub fn fit_exponential(mode: &ModeSolution, angle: f64, separations: &[f64]) -> Result<CouplingLaw> {
    let samples = separations
        .iter()
        .map(|&r| Ok((r, coupling_analytic(mode, mode, &PairGeometry::new(r, angle)?)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_exponential_samples(angle, &samples)
}

/// Evenly spaced separations covering `[r_min, r_max]` at `step`.
pub fn separation_grid(r_min: f64, r_max: f64, step: f64) -> Vec<f64> {
    let n = libm::round((r_max - r_min) / step) as usize;
    (0..=n).map(|i| r_min + i as f64 * step).collect()
}

/// Coupling of identical waveguides at fixed separation across `angles`.
pub fn anisotropy_scan(mode: &ModeSolution, separation: f64, angles: &[f64]) -> Result<Vec<(f64, f64)>> {
    angles
        .iter()
        .map(|&theta| Ok((theta, coupling_analytic(mode, mode, &PairGeometry::new(separation, theta)?)?)))
        .collect()
}

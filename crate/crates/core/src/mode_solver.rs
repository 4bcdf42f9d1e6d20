//! Lowest guided mode of an isolated rectangular waveguide, Marcatili style.
//!
//! The transverse problem separates into two symmetric slab problems, one per
//! axis. Each slab contributes a transverse wavenumber `k_t` inside the core
//! and a decay constant `γ_t` in the cladding, tied together by
//! `γ_t² + k_t² = k²(n_g² − n_s²)`. The propagation constant then follows from
//! `β² = k²n_g² − k_x² − k_y²`.

use core::f64::consts::PI;

use crate::consts::{MU_0, SPEED_OF_LIGHT};
use crate::numeric::{bisect, newton_polish};
use crate::{Error, Result};

/// Geometry and index description of one rectangular waveguide.
///
/// `width` is the major (x) axis and `height` the minor (y) axis, both in
/// meters. The core index is derived from the substrate index and the index
/// modification as `n_g = n_s / √(1 − 2δn)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSpec {
    width: f64,
    height: f64,
    substrate_index: f64,
    index_change: f64,
}

impl WaveguideSpec {
    pub fn new(width: f64, height: f64, substrate_index: f64, index_change: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter { name: "width", reason: "must be positive" });
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidParameter { name: "height", reason: "must be positive" });
        }
        if height > width {
            return Err(Error::InvalidParameter {
                name: "height",
                reason: "must not exceed width (x is the major axis)",
            });
        }
        if !(substrate_index >= 1.0 && substrate_index.is_finite()) {
            return Err(Error::InvalidParameter { name: "substrate_index", reason: "must be ≥ 1" });
        }
        if !(index_change > 0.0 && index_change < 0.5) {
            return Err(Error::InvalidParameter {
                name: "index_change",
                reason: "must lie in (0, 1/2)",
            });
        }
        Ok(Self { width, height, substrate_index, index_change })
    }

    /// Waveguide of the reference design: 6 μm × 2 μm, n_s = 1.444, δn = 10⁻³.
    pub fn reference_asymmetric() -> Self {
        Self { width: 6e-6, height: 2e-6, substrate_index: 1.444, index_change: 1e-3 }
    }

    /// Square 6 μm × 6 μm variant of [`Self::reference_asymmetric`].
    pub fn reference_symmetric() -> Self {
        Self { width: 6e-6, height: 6e-6, substrate_index: 1.444, index_change: 1e-3 }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn substrate_index(&self) -> f64 {
        self.substrate_index
    }

    pub fn index_change(&self) -> f64 {
        self.index_change
    }

    pub fn core_index(&self) -> f64 {
        self.substrate_index / libm::sqrt(1.0 - 2.0 * self.index_change)
    }

    /// Cross-section area σ = Δx·Δy.
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Same waveguide with a different index modification.
    pub fn with_index_change(&self, index_change: f64) -> Result<Self> {
        Self::new(self.width, self.height, self.substrate_index, index_change)
    }

    /// Same waveguide with both transverse extents multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.width * factor, self.height * factor, self.substrate_index, self.index_change)
    }
}

/// Which slab matching condition fixes the transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchingCondition {
    /// `tan(k_t·d/2) = γ_t/k_t`: value and slope of the cosine core profile
    /// match the exponential tail at `|t| = d/2`.
    #[default]
    DerivativeContinuity,
    /// `k_t·d = arctan(γ_t/k_t)`, kept for comparison with the printed
    /// appendix form. The resulting profile is continuous but has a slope
    /// jump at the interface.
    LiteralArctan,
}

/// Transverse wavenumber and decay constant for one slab axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabSolution {
    pub wavenumber: f64,
    pub decay: f64,
}

/// Smallest positive root of the symmetric slab matching condition.
///
/// `extent` is the full core width along the axis, `k` the free-space
/// wavenumber. Bisection brackets the root in
/// `(0, min(π/extent, k√(n_g² − n_s²)))` (half that upper limit for the
/// literal form), followed by two Newton polish steps.
pub fn transverse_wavenumber(
    extent: f64,
    k: f64,
    core_index: f64,
    substrate_index: f64,
    condition: MatchingCondition,
) -> Result<SlabSolution> {
    if !(extent > 0.0) {
        return Err(Error::InvalidParameter { name: "extent", reason: "must be positive" });
    }
    if !(k > 0.0) {
        return Err(Error::InvalidParameter { name: "k", reason: "must be positive" });
    }
    let v2 = k * k * (core_index * core_index - substrate_index * substrate_index);
    if !(v2 > 0.0) {
        return Err(Error::NoGuidedMode);
    }
    let v = libm::sqrt(v2);
    let decay = move |t: f64| libm::sqrt((v2 - t * t).max(0.0));
    let half = 0.5 * extent;

    let (upper, f, df): (f64, &dyn Fn(f64) -> f64, &dyn Fn(f64) -> f64) = match condition {
        // t·sin(t·d/2) − γ·cos(t·d/2) has the same root as the tangent form
        // without its pole.
        MatchingCondition::DerivativeContinuity => (
            (PI / extent).min(v),
            &move |t: f64| t * libm::sin(t * half) - decay(t) * libm::cos(t * half),
            &move |t: f64| {
                let g = decay(t);
                let (s, c) = (libm::sin(t * half), libm::cos(t * half));
                s + t * half * c + (t / g) * c + g * half * s
            },
        ),
        MatchingCondition::LiteralArctan => (
            (0.5 * PI / extent).min(v),
            &move |t: f64| t * extent - libm::atan(decay(t) / t),
            &move |t: f64| extent + 1.0 / decay(t),
        ),
    };

    let lo = upper * 1e-12;
    let root = bisect(f, lo, upper, 1e-12, "transverse wavenumber")?;
    let root = newton_polish(f, df, root, 0.0, upper, 2);
    let gamma = decay(root);
    if !(root > 0.0 && gamma > 0.0) {
        return Err(Error::NoGuidedMode);
    }
    Ok(SlabSolution { wavenumber: root, decay: gamma })
}

/// Residual of the matching condition, scaled to be dimensionless.
pub fn matching_residual(extent: f64, slab: SlabSolution, condition: MatchingCondition) -> f64 {
    let SlabSolution { wavenumber: t, decay: g } = slab;
    match condition {
        MatchingCondition::DerivativeContinuity => {
            let half = 0.5 * extent;
            (t * libm::sin(t * half) - g * libm::cos(t * half)) / libm::sqrt(t * t + g * g)
        }
        MatchingCondition::LiteralArctan => t * extent - libm::atan(g / t),
    }
}

/// Solved lowest mode, including the field amplitude that makes it carry 1 W.
///
/// The electric field is `ℰ_x(x, y) = amplitude · 𝒳(x) · 𝒴(y)` in V/m with
/// coordinates relative to the waveguide center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub spec: WaveguideSpec,
    pub wavelength: f64,
    pub condition: MatchingCondition,
    /// Free-space wavenumber 2π/λ.
    pub k: f64,
    /// Angular frequency 2πc/λ.
    pub omega: f64,
    pub kx: f64,
    pub ky: f64,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub beta: f64,
    pub amplitude: f64,
}

pub fn solve_mode(spec: &WaveguideSpec, wavelength: f64) -> Result<ModeSolution> {
    solve_mode_with(spec, wavelength, MatchingCondition::default())
}

pub fn solve_mode_with(
    spec: &WaveguideSpec,
    wavelength: f64,
    condition: MatchingCondition,
) -> Result<ModeSolution> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::InvalidParameter { name: "wavelength", reason: "must be positive" });
    }
    let k = 2.0 * PI / wavelength;
    let ng = spec.core_index();
    let ns = spec.substrate_index();
    let x = transverse_wavenumber(spec.width(), k, ng, ns, condition)?;
    let y = transverse_wavenumber(spec.height(), k, ng, ns, condition)?;
    let beta2 = k * k * ng * ng - x.wavenumber * x.wavenumber - y.wavenumber * y.wavenumber;
    if !(beta2 > 0.0) {
        return Err(Error::ModeCutOff);
    }
    let mut mode = ModeSolution {
        spec: *spec,
        wavelength,
        condition,
        k,
        omega: 2.0 * PI * SPEED_OF_LIGHT / wavelength,
        kx: x.wavenumber,
        ky: y.wavenumber,
        gamma_x: x.decay,
        gamma_y: y.decay,
        beta: libm::sqrt(beta2),
        amplitude: 0.0,
    };
    mode.amplitude = normalize_power(&mode);
    Ok(mode)
}

/// Field amplitude for which the mode carries exactly 1 W.
pub fn normalize_power(mode: &ModeSolution) -> f64 {
    libm::sqrt(2.0 * mode.omega * MU_0 / (mode.beta * mode.profile_norm_x() * mode.profile_norm_y()))
}

/// Even 1D profile: `cos(k t)` inside `|t| ≤ half`, exponential tail outside.
#[inline]
pub(crate) fn slab_profile(t: f64, half: f64, k: f64, gamma: f64) -> f64 {
    let a = t.abs();
    if a <= half {
        libm::cos(k * t)
    } else {
        libm::cos(k * half) * libm::exp(-gamma * (a - half))
    }
}

/// ∫ profile² over the whole line.
#[inline]
fn profile_norm(half: f64, k: f64, gamma: f64) -> f64 {
    let c = libm::cos(k * half);
    half + libm::sin(2.0 * k * half) / (2.0 * k) + c * c / gamma
}

impl ModeSolution {
    pub fn profile_x(&self, x: f64) -> f64 {
        slab_profile(x, 0.5 * self.spec.width(), self.kx, self.gamma_x)
    }

    pub fn profile_y(&self, y: f64) -> f64 {
        slab_profile(y, 0.5 * self.spec.height(), self.ky, self.gamma_y)
    }

    /// ∫ 𝒳(x)² dx.
    pub fn profile_norm_x(&self) -> f64 {
        profile_norm(0.5 * self.spec.width(), self.kx, self.gamma_x)
    }

    /// ∫ 𝒴(y)² dy.
    pub fn profile_norm_y(&self) -> f64 {
        profile_norm(0.5 * self.spec.height(), self.ky, self.gamma_y)
    }

    /// ℰ_x at `(x, y)` relative to the waveguide center, V/m.
    pub fn field_at(&self, x: f64, y: f64) -> f64 {
        self.amplitude * self.profile_x(x) * self.profile_y(y)
    }

    /// ℋ_y = (β / ωμ₀)·ℰ_x, A/m.
    pub fn magnetic_field_at(&self, x: f64, y: f64) -> f64 {
        self.beta / (self.omega * MU_0) * self.field_at(x, y)
    }

    /// Conversion from |ℰ_x|² to the z-directed intensity, W/m² per (V/m)².
    pub fn intensity_factor(&self) -> f64 {
        self.beta / (2.0 * self.omega * MU_0)
    }

    /// Carried power at the current amplitude, W.
    pub fn power(&self) -> f64 {
        self.intensity_factor()
            * self.amplitude
            * self.amplitude
            * self.profile_norm_x()
            * self.profile_norm_y()
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.amplitude.is_finite() && self.amplitude > 0.0
    }

    /// Relative residuals of `γ² + k_t² = k²(n_g² − n_s²)` for x and y and of
    /// `β² = k²n_g² − k_x² − k_y²`.
    pub fn dispersion_residuals(&self) -> [f64; 3] {
        let ng = self.spec.core_index();
        let ns = self.spec.substrate_index();
        let v2 = self.k * self.k * (ng * ng - ns * ns);
        let rx = (self.gamma_x * self.gamma_x + self.kx * self.kx - v2) / v2;
        let ry = (self.gamma_y * self.gamma_y + self.ky * self.ky - v2) / v2;
        let kn2 = self.k * self.k * ng * ng;
        let rb = (self.beta * self.beta - (kn2 - self.kx * self.kx - self.ky * self.ky)) / kn2;
        [rx, ry, rb]
    }
}

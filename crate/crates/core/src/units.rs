//! Conversions between the internal SI units and the reporting units
//! (μm for lengths, cm⁻¹ for wavenumbers and couplings, cm for device length).

pub const UM: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const CM: f64 = 1e-2;

#[inline]
pub fn um(x: f64) -> f64 {
    x * UM
}

#[inline]
pub fn to_um(meters: f64) -> f64 {
    meters / UM
}

#[inline]
pub fn cm(x: f64) -> f64 {
    x * CM
}

#[inline]
pub fn to_cm(meters: f64) -> f64 {
    meters / CM
}

/// 1/cm → 1/m.
#[inline]
pub fn per_cm(x: f64) -> f64 {
    x * 100.0
}

/// 1/m → 1/cm.
#[inline]
pub fn to_per_cm(per_meter: f64) -> f64 {
    per_meter / 100.0
}

/// W/m² → W/cm².
#[inline]
pub fn to_w_per_cm2(w_per_m2: f64) -> f64 {
    w_per_m2 * 1e-4
}

/// Angle given in units of π/32.
#[inline]
pub fn pi32(n: f64) -> f64 {
    n * core::f64::consts::PI / 32.0
}

#[inline]
pub fn to_pi32(radians: f64) -> f64 {
    radians * 32.0 / core::f64::consts::PI
}

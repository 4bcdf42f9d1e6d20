//! Coupled-mode evolution of modal amplitudes along the device.
//!
//! Amplitudes obey `dA/dz = −i H A`, with `H` real symmetric and expressed in
//! the frame co-rotating with the bulk propagation constant. Power is
//! `Σ|A_j|²`, normalized to the input.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::eigen::{symmetric_eigen, SymmetricEigen};
use crate::lattice::{coupling_matrix, LatticeHamiltonian, LatticeLayout};
use crate::{Error, Result};

/// Complex modal amplitudes, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<Complex64>);

impl AmplitudeVector {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "amplitudes", reason: "must be finite" });
        }
        Ok(Self(values))
    }

    /// All power in `site`.
    pub fn localized(len: usize, site: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[site] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|c| c.norm_sqr()).sum())
    }
}

/// Spectral propagator `exp(−i H z)` for a fixed matrix.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: SymmetricEigen,
}

impl Propagator {
    pub fn new(h: &LatticeHamiltonian) -> Result<Self> {
        Ok(Self { eigen: symmetric_eigen(h.dim(), h.as_slice())? })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn propagate(&self, z: f64, a0: &AmplitudeVector) -> Result<AmplitudeVector> {
        let n = self.eigen.n;
        if a0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a0.len() });
        }
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter { name: "z", reason: "must be non-negative" });
        }
        if z == 0.0 {
            return Ok(a0.clone());
        }
        // project onto eigenvectors, rotate phases, map back
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let c: Complex64 = (0..n)
                    .map(|i| a0.0[i] * self.eigen.vector_component(i, k))
                    .sum();
                let phase = -self.eigen.values[k] * z;
                c * Complex64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let out = (0..n)
            .map(|i| (0..n).map(|k| coeffs[k] * self.eigen.vector_component(i, k)).sum())
            .collect();
        Ok(AmplitudeVector(out))
    }
}

/// `A(z) = exp(−i H z)·A(0)` by eigendecomposition.
pub fn evolve(h: &LatticeHamiltonian, z: f64, a0: &AmplitudeVector) -> Result<AmplitudeVector> {
    Propagator::new(h)?.propagate(z, a0)
}

/// Classic fourth-order Runge–Kutta integration of `dA/dz = −i H A` with
/// step at most `10⁻³ / max|H|`.
pub fn evolve_ode(h: &LatticeHamiltonian, z: f64, a0: &AmplitudeVector) -> Result<AmplitudeVector> {
    let scale = h.max_abs();
    let max_step = if scale > 0.0 { 1e-3 / scale } else { z.max(1.0) };
    let steps = libm::ceil(z / max_step).max(1.0) as usize;
    evolve_ode_steps(h, z, a0, steps)
}

/// [`evolve_ode`] with an explicit number of equal steps.
pub fn evolve_ode_steps(
    h: &LatticeHamiltonian,
    z: f64,
    a0: &AmplitudeVector,
    steps: usize,
) -> Result<AmplitudeVector> {
    let n = h.dim();
    if a0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a0.len() });
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidParameter { name: "z", reason: "must be non-negative" });
    }
    if steps == 0 {
        return Err(Error::InvalidParameter { name: "steps", reason: "must be positive" });
    }
    let dz = z / steps as f64;
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |a: &[Complex64], out: &mut [Complex64]| {
        for i in 0..n {
            let row = &h.as_slice()[i * n..(i + 1) * n];
            let acc: Complex64 = row.iter().zip(a).map(|(&hij, &aj)| aj * hij).sum();
            out[i] = minus_i * acc;
        }
    };

    let mut a = a0.0.clone();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    for _ in 0..steps {
        rhs(&a, &mut k1);
        for i in 0..n {
            tmp[i] = a[i] + k1[i] * (0.5 * dz);
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = a[i] + k2[i] * (0.5 * dz);
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = a[i] + k3[i] * dz;
        }
        rhs(&tmp, &mut k4);
        for i in 0..n {
            a[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dz / 6.0);
        }
    }
    Ok(AmplitudeVector(a))
}

/// Power fraction `|A_j|²` in each site.
pub fn power_distribution(a: &AmplitudeVector) -> Vec<f64> {
    a.0.iter().map(|c| c.norm_sqr()).collect()
}

/// Power distribution at the exit for light launched into the first site.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub bend_angle: f64,
    /// Corner detuning Δ = β_C − β, 1/m.
    pub detuning: f64,
    pub powers: Vec<f64>,
    /// 1 − P_N.
    pub loss: f64,
    pub optimized: bool,
}

/// Launch into site 0, evolve to `length` under `h` with the corner
/// detuned by `detuning`, and report the exit powers.
pub fn transfer_with_matrix(
    h: &LatticeHamiltonian,
    corner: usize,
    length: f64,
    bend_angle: f64,
    detuning: f64,
) -> Result<TransferReport> {
    let n = h.dim();
    let h = h.with_detuning(corner, detuning);
    let out = evolve(&h, length, &AmplitudeVector::localized(n, 0))?;
    let powers = power_distribution(&out);
    let loss = 1.0 - powers[n - 1];
    Ok(TransferReport { bend_angle, detuning, powers, loss, optimized: false })
}

/// Bending loss of `layout` for a corner detuning `detuning` (1/m).
pub fn transfer_loss(layout: &LatticeLayout, detuning: f64) -> Result<TransferReport> {
    let h = coupling_matrix(layout)?;
    transfer_with_matrix(&h, layout.corner, layout.length, layout.bend_angle, detuning)
}

/// Power in the corner site along `z_grid` for light launched into site 0.
pub fn corner_power_trace(
    h: &LatticeHamiltonian,
    corner: usize,
    length: f64,
    detuning: f64,
    z_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if z_grid.iter().any(|&z| !(z >= 0.0 && z <= length)) {
        return Err(Error::InvalidParameter { name: "z_grid", reason: "must lie within [0, L]" });
    }
    let h = h.with_detuning(corner, detuning);
    let prop = Propagator::new(&h)?;
    let a0 = AmplitudeVector::localized(h.dim(), 0);
    z_grid
        .iter()
        .map(|&z| Ok((z, prop.propagate(z, &a0)?.as_slice()[corner].norm_sqr())))
        .collect()
}

/// Largest step accepted for output intensity maps, meters.
pub const MAX_GRID_STEP: f64 = 0.5e-6;

/// Rectangular sampling window for intensity maps, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub step: f64,
}

impl IntensityGrid {
    /// Bounding box of all sites widened by `margin` on every side.
    pub fn covering(layout: &LatticeLayout, margin: f64, step: f64) -> Self {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &layout.positions {
            x0 = x0.min(p[0]);
            y0 = y0.min(p[1]);
            x1 = x1.max(p[0]);
            y1 = y1.max(p[1]);
        }
        Self { x_min: x0 - margin, y_min: y0 - margin, x_max: x1 + margin, y_max: y1 + margin, step }
    }

    fn counts(&self) -> (usize, usize) {
        let nx = libm::floor((self.x_max - self.x_min) / self.step + 1e-9) as usize + 1;
        let ny = libm::floor((self.y_max - self.y_min) / self.step + 1e-9) as usize + 1;
        (nx, ny)
    }
}

/// Sampled output intensity, W/m², row-major with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl IntensityMap {
    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.step
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.step
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// Cell-sum estimate of ∬ I dx dy, W.
    pub fn integrated_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step * self.step
    }

    /// Power within a disc of `radius` around `center`, W.
    pub fn power_within(&self, center: [f64; 2], radius: f64) -> f64 {
        let mut sum = 0.0;
        for iy in 0..self.ny {
            let dy = self.y(iy) - center[1];
            for ix in 0..self.nx {
                let dx = self.x(ix) - center[0];
                if dx * dx + dy * dy <= radius * radius {
                    sum += self.at(ix, iy);
                }
            }
        }
        sum * self.step * self.step
    }
}

/// Intensity of the superposed site modes weighted by `amplitudes`.
///
/// Amplitudes are in the co-rotating frame, so the per-site phases
/// `e^{−iβ_j L}` reduce to a global phase and drop out of the intensity.
pub fn output_intensity_map(
    layout: &LatticeLayout,
    amplitudes: &AmplitudeVector,
    grid: &IntensityGrid,
) -> Result<IntensityMap> {
    if !(grid.step > 0.0) || grid.step > MAX_GRID_STEP {
        return Err(Error::GridTooCoarse { step: grid.step, max: MAX_GRID_STEP });
    }
    if !(grid.x_max > grid.x_min && grid.y_max > grid.y_min) {
        return Err(Error::InvalidParameter { name: "grid", reason: "empty window" });
    }
    let n = layout.len();
    if amplitudes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: amplitudes.len() });
    }
    let (nx, ny) = grid.counts();
    let xs: Vec<f64> = (0..nx).map(|i| grid.x_min + i as f64 * grid.step).collect();
    let ys: Vec<f64> = (0..ny).map(|i| grid.y_min + i as f64 * grid.step).collect();

    // separable per-site profiles sampled once on each axis
    let px: Vec<Vec<f64>> = (0..n)
        .map(|j| xs.iter().map(|&x| layout.modes[j].profile_x(x - layout.positions[j][0])).collect())
        .collect();
    let py: Vec<Vec<f64>> = (0..n)
        .map(|j| ys.iter().map(|&y| layout.modes[j].profile_y(y - layout.positions[j][1])).collect())
        .collect();
    let weights: Vec<Complex64> = (0..n)
        .map(|j| amplitudes.as_slice()[j] * layout.modes[j].amplitude)
        .collect();
    let factor = layout.modes[0].intensity_factor();

    let mut values = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let field: Complex64 = (0..n).map(|j| weights[j] * (px[j][ix] * py[j][iy])).sum();
            values[iy * nx + ix] = factor * field.norm_sqr();
        }
    }
    Ok(IntensityMap { nx, ny, x_min: grid.x_min, y_min: grid.y_min, step: grid.step, values })
}

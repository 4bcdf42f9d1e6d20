//! Equidistance of the coupling-matrix spectrum.

use alloc::vec::Vec;

use crate::eigen::symmetric_eigen;
use crate::lattice::LatticeHamiltonian;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Ascending eigenvalues, 1/m.
    pub eigenvalues: Vec<f64>,
    /// Successive differences λ_{k+1} − λ_k, 1/m.
    pub spacings: Vec<f64>,
    /// RMS deviation of the spacings from their mean, 1/m.
    pub rms_deviation: f64,
    /// Same metric with the two outermost spacings dropped.
    pub trimmed_rms_deviation: f64,
}

fn rms_about_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n)
}

pub fn spectrum_spacings(h: &LatticeHamiltonian) -> Result<SpectrumReport> {
    let eigen = symmetric_eigen(h.dim(), h.as_slice())?;
    let spacings: Vec<f64> = eigen.values.windows(2).map(|w| w[1] - w[0]).collect();
    let trimmed = if spacings.len() > 2 { &spacings[1..spacings.len() - 1] } else { &spacings[..] };
    Ok(SpectrumReport {
        rms_deviation: rms_about_mean(&spacings),
        trimmed_rms_deviation: rms_about_mean(trimmed),
        eigenvalues: eigen.values,
        spacings,
    })
}

//! Corner-defect optimization and its translation to fabrication changes.

use alloc::vec::Vec;

use crate::lattice::{coupling_matrix, LatticeHamiltonian, LatticeLayout};
use crate::mode_solver::{solve_mode, WaveguideSpec};
use crate::numeric::{bisect, brent_minimize};
use crate::propagation::transfer_with_matrix;
use crate::{Error, Result};

/// Tuning knobs of [`optimize_detuning`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Half-width of the initial bracket in units of the corner coupling G.
    pub bracket_scale: f64,
    /// Absolute tolerance on Δ, 1/m.
    pub tolerance: f64,
    /// Samples of the pre-scan over the bracket.
    pub prescan_points: usize,
    /// Depth above which a pre-scan local minimum counts as distinct.
    pub minimum_depth: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { bracket_scale: 3.0, tolerance: 1e-2, prescan_points: 64, minimum_depth: 1e-3 }
    }
}

/// Optimal corner detuning for one bend angle.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectResult {
    pub bend_angle: f64,
    /// Δ* = β_C − β, 1/m.
    pub detuning: f64,
    /// Center-link target coupling G_{C,C±1}, 1/m.
    pub corner_coupling: f64,
    pub loss_before: f64,
    pub loss_after: f64,
    /// |Δ*| / G_{C,C±1}.
    pub ratio: f64,
    /// 100·(δn − δn_C)/δn, if the detuning is reachable by an index change.
    pub index_change_pct: Option<f64>,
    /// 100·(σ − σ_C)/σ, if the detuning is reachable by isotropic scaling.
    pub size_change_pct: Option<f64>,
    /// The pre-scan found more than one distinct local minimum.
    pub multimodal: bool,
}

/// Depth of each interior local minimum of `values`, measured to the lower
/// of the two neighbouring peaks.
fn local_minimum_depths(values: &[f64]) -> Vec<f64> {
    let mut depths = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            let mut left = i;
            while left > 0 && values[left - 1] >= values[left] {
                left -= 1;
            }
            let mut right = i;
            while right + 1 < values.len() && values[right + 1] >= values[right] {
                right += 1;
            }
            depths.push(values[left].min(values[right]) - values[i]);
        }
    }
    depths
}

struct ScanOutcome {
    detuning: f64,
    loss: f64,
    multimodal: bool,
}

fn search_bracket<F>(loss: &F, lo: f64, hi: f64, settings: &OptimizerSettings) -> Result<ScanOutcome>
where
    F: Fn(f64) -> f64,
{
    let n = settings.prescan_points.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| loss(x)).collect();
    let best = (0..n).min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap_or(0);
    let multimodal = local_minimum_depths(&ys)
        .iter()
        .filter(|&&d| d > settings.minimum_depth)
        .count()
        > 1;
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(n - 1)];
    let polished = brent_minimize(loss, a, b, settings.tolerance, 500)?;
    let (detuning, value) = if polished.value <= ys[best] {
        (polished.x, polished.value)
    } else {
        (xs[best], ys[best])
    };
    Ok(ScanOutcome { detuning, loss: value, multimodal })
}

/// Corner detuning minimizing `1 − P_N` at fixed geometry.
///
/// Only the corner's diagonal entry changes; all couplings keep their
/// undefected values.
pub fn optimize_detuning(layout: &LatticeLayout, settings: &OptimizerSettings) -> Result<DefectResult> {
    let h = coupling_matrix(layout)?;
    optimize_detuning_with_matrix(layout, &h, settings)
}

/// [`optimize_detuning`] reusing an already assembled coupling matrix.
pub fn optimize_detuning_with_matrix(
    layout: &LatticeLayout,
    h: &LatticeHamiltonian,
    settings: &OptimizerSettings,
) -> Result<DefectResult> {
    let c = layout.corner;
    let g = layout.targets[c];
    let loss = |delta: f64| {
        transfer_with_matrix(h, c, layout.length, layout.bend_angle, delta)
            .map(|r| r.loss)
            .unwrap_or(f64::INFINITY)
    };

    let mut half = settings.bracket_scale * g;
    let mut outcome = search_bracket(&loss, -half, half, settings)?;
    let near_edge = |x: f64, half: f64| (half - x.abs()) < 0.01 * 2.0 * half;
    if near_edge(outcome.detuning, half) {
        half *= 2.0;
        outcome = search_bracket(&loss, -half, half, settings)?;
    }

    let loss_before = transfer_with_matrix(h, c, layout.length, layout.bend_angle, 0.0)?.loss;
    if loss_before <= outcome.loss {
        outcome.detuning = 0.0;
        outcome.loss = loss_before;
    }

    let spec = layout.specs[c];
    Ok(DefectResult {
        bend_angle: layout.bend_angle,
        detuning: outcome.detuning,
        corner_coupling: g,
        loss_before,
        loss_after: outcome.loss,
        ratio: outcome.detuning.abs() / g,
        index_change_pct: detuning_to_index_change(&spec, layout.wavelength, outcome.detuning).ok(),
        size_change_pct: detuning_to_size_change(&spec, layout.wavelength, outcome.detuning).ok(),
        multimodal: outcome.multimodal,
    })
}

fn beta_for_index(spec: &WaveguideSpec, wavelength: f64, index_change: f64) -> f64 {
    spec.with_index_change(index_change)
        .and_then(|s| solve_mode(&s, wavelength))
        .map(|m| m.beta)
        .unwrap_or(f64::NAN)
}

fn beta_for_scale(spec: &WaveguideSpec, wavelength: f64, scale: f64) -> f64 {
    spec.scaled(scale)
        .and_then(|s| solve_mode(&s, wavelength))
        .map(|m| m.beta)
        .unwrap_or(f64::NAN)
}

/// Corner index modification δn_C whose mode is detuned by `detuning` from
/// the bulk mode of `spec`.
///
/// In the separable model β(δn) has a shallow minimum at small contrast, so
/// the search is confined to the increasing branch that contains `spec`,
/// capped at 2δn.
pub fn corner_index_change(spec: &WaveguideSpec, wavelength: f64, detuning: f64) -> Result<f64> {
    let dn = spec.index_change();
    if detuning == 0.0 {
        return Ok(dn);
    }
    let base = solve_mode(spec, wavelength)?.beta;
    let upper = (2.0 * dn).min(0.5 - 1e-9);
    let turn = brent_minimize(|d| beta_for_index(spec, wavelength, d), dn * 1e-3, upper, dn * 1e-9, 500)?
        .x;
    if turn > dn {
        return Err(Error::InvalidParameter {
            name: "index_change",
            reason: "bulk guide lies on the decreasing branch of β(δn)",
        });
    }
    let target = base + detuning;
    let (min, max) = (beta_for_index(spec, wavelength, turn), beta_for_index(spec, wavelength, upper));
    if !(target >= min && target <= max) {
        return Err(Error::UnreachableDetuning { target: detuning, min: min - base, max: max - base });
    }
    bisect(|d| beta_for_index(spec, wavelength, d) - target, turn, upper, 1e-15, "corner index change")
}

/// 100·(δn − δn_C)/δn for the corner index change realizing `detuning`.
pub fn detuning_to_index_change(spec: &WaveguideSpec, wavelength: f64, detuning: f64) -> Result<f64> {
    if detuning == 0.0 {
        return Ok(0.0);
    }
    let dn = spec.index_change();
    let dn_c = corner_index_change(spec, wavelength, detuning)?;
    Ok(100.0 * (dn - dn_c) / dn)
}

/// Isotropic scale factor `s ∈ (0.5, 1.5)` of the corner cross-section that
/// detunes its mode by `detuning`.
pub fn corner_scale(spec: &WaveguideSpec, wavelength: f64, detuning: f64) -> Result<f64> {
    if detuning == 0.0 {
        return Ok(1.0);
    }
    let base = solve_mode(spec, wavelength)?.beta;
    let target = base + detuning;
    let (lo, hi) = (0.5 + 1e-9, 1.5 - 1e-9);
    let (b_lo, b_hi) = (beta_for_scale(spec, wavelength, lo), beta_for_scale(spec, wavelength, hi));
    let (min, max) = (b_lo.min(b_hi), b_lo.max(b_hi));
    if !(target >= min && target <= max) {
        return Err(Error::UnreachableDetuning { target: detuning, min: min - base, max: max - base });
    }
    bisect(|s| beta_for_scale(spec, wavelength, s) - target, lo, hi, 1e-15, "corner scale")
}

/// 100·(σ − σ_C)/σ for the isotropic corner resize realizing `detuning`.
pub fn detuning_to_size_change(spec: &WaveguideSpec, wavelength: f64, detuning: f64) -> Result<f64> {
    let s = corner_scale(spec, wavelength, detuning)?;
    Ok(100.0 * (1.0 - s * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::per_cm;

    const LAMBDA: f64 = 800e-9;

    #[test]
    fn depth_counting() {
        let one = [3.0, 2.0, 1.0, 2.0, 3.0];
        assert_eq!(local_minimum_depths(&one), alloc::vec![2.0]);
        let two = [3.0, 1.0, 2.5, 0.5, 3.0];
        assert_eq!(local_minimum_depths(&two), alloc::vec![1.5, 2.0]);
    }

    #[test]
    fn zero_detuning_maps_to_no_change() {
        let spec = WaveguideSpec::reference_asymmetric();
        assert_eq!(detuning_to_index_change(&spec, LAMBDA, 0.0).unwrap(), 0.0);
        assert_eq!(detuning_to_size_change(&spec, LAMBDA, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_detuning_needs_weaker_smaller_corner() {
        let spec = WaveguideSpec::reference_asymmetric();
        let delta = per_cm(-0.5);
        let pct = detuning_to_index_change(&spec, LAMBDA, delta).unwrap();
        assert!(pct > 0.0);
        let size = detuning_to_size_change(&spec, LAMBDA, delta).unwrap();
        assert!(size > 0.0);
        let up = detuning_to_index_change(&spec, LAMBDA, per_cm(0.5)).unwrap();
        assert!(up < 0.0);
    }

    #[test]
    fn fabrication_round_trip() {
        let spec = WaveguideSpec::reference_asymmetric();
        let base = solve_mode(&spec, LAMBDA).unwrap().beta;
        for delta in [per_cm(-1.07), per_cm(-0.2), per_cm(0.3)] {
            let dn_c = corner_index_change(&spec, LAMBDA, delta).unwrap();
            let beta = solve_mode(&spec.with_index_change(dn_c).unwrap(), LAMBDA).unwrap().beta;
            assert!((beta - base - delta).abs() < per_cm(1e-3));
            let s = corner_scale(&spec, LAMBDA, delta).unwrap();
            let beta = solve_mode(&spec.scaled(s).unwrap(), LAMBDA).unwrap().beta;
            assert!((beta - base - delta).abs() < per_cm(1e-3));
        }
    }

    #[test]
    fn unreachable_detunings() {
        let spec = WaveguideSpec::reference_asymmetric();
        assert!(matches!(
            detuning_to_index_change(&spec, LAMBDA, per_cm(-50.0)),
            Err(Error::UnreachableDetuning { .. })
        ));
        assert!(matches!(
            detuning_to_size_change(&spec, LAMBDA, per_cm(500.0)),
            Err(Error::UnreachableDetuning { .. })
        ));
    }
}

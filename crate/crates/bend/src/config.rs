//! Experiment configuration: a single JSON document, every field optional,
//! defaults reproducing the reference nine-site study.

use bendlattice_core::coupling::separation_grid;
use bendlattice_core::defect::OptimizerSettings;
use bendlattice_core::lattice::{LayoutParams, SeparationWindow};
use bendlattice_core::mode_solver::{MatchingCondition, WaveguideSpec};
use bendlattice_core::units::{cm, per_cm, pi32, um, NM};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveguideConfig {
    pub width_um: f64,
    pub height_um: f64,
    pub substrate_index: f64,
    pub index_change: f64,
}

impl Default for WaveguideConfig {
    fn default() -> Self {
        Self { width_um: 6.0, height_um: 2.0, substrate_index: 1.444, index_change: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Initial bracket half-width in units of the corner coupling.
    pub bracket_scale: f64,
    pub tolerance_per_cm: f64,
    pub prescan_points: usize,
    pub minimum_depth: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let d = OptimizerSettings::default();
        Self {
            bracket_scale: d.bracket_scale,
            tolerance_per_cm: d.tolerance / 100.0,
            prescan_points: d.prescan_points,
            minimum_depth: d.minimum_depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingConfig {
    #[default]
    DerivativeContinuity,
    LiteralArctan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub waveguide: WaveguideConfig,
    pub wavelength_nm: f64,
    pub sites: usize,
    /// 1-based corner site; defaults to the middle site.
    pub corner: Option<usize>,
    pub length_cm: f64,
    /// Bend angles in units of π/32.
    pub angles_pi32: Vec<f64>,
    pub optimize: bool,
    pub emit_intensity: bool,
    pub output_dir: Option<String>,
    pub grid_step_um: f64,
    pub grid_margin_um: f64,
    pub trace_points: usize,
    pub fit_range_um: [f64; 2],
    pub fit_step_um: f64,
    pub anisotropy_separation_um: f64,
    pub anisotropy_points: usize,
    pub separation_window_um: [f64; 2],
    /// Slab matching condition for `modes.csv` and the coupling scan.
    pub matching: MatchingConfig,
    pub optimizer: OptimizerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            waveguide: WaveguideConfig::default(),
            wavelength_nm: 800.0,
            sites: 9,
            corner: None,
            length_cm: 10.0,
            angles_pi32: vec![0.0, 16.0, 18.0, 19.0, 20.0],
            optimize: true,
            emit_intensity: false,
            output_dir: None,
            grid_step_um: 0.1,
            grid_margin_um: 10.0,
            trace_points: 201,
            fit_range_um: [15.0, 40.0],
            fit_step_um: 1.0,
            anisotropy_separation_um: 30.0,
            anisotropy_points: 33,
            separation_window_um: [8.0, 100.0],
            matching: MatchingConfig::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

fn field(name: &str, message: impl Into<String>) -> Error {
    Error::Config { field: name.to_string(), message: message.into() }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {value}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| field("<document>", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_json(&text)
    }

    /// 0-based corner index.
    pub fn corner_index(&self) -> usize {
        self.corner.map(|c| c - 1).unwrap_or(self.sites / 2)
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.waveguide;
        positive("waveguide.width_um", w.width_um)?;
        positive("waveguide.height_um", w.height_um)?;
        if w.height_um > w.width_um {
            return Err(field("waveguide.height_um", "must not exceed width_um"));
        }
        if !(w.substrate_index >= 1.0 && w.substrate_index.is_finite()) {
            return Err(field("waveguide.substrate_index", "must be at least 1"));
        }
        if !(w.index_change > 0.0 && w.index_change < 0.5) {
            return Err(field("waveguide.index_change", "must lie in (0, 0.5)"));
        }
        positive("wavelength_nm", self.wavelength_nm)?;
        positive("length_cm", self.length_cm)?;
        if self.sites < 3 {
            return Err(field("sites", "need at least 3 sites"));
        }
        if let Some(c) = self.corner {
            if !(c > 1 && c < self.sites) {
                return Err(field("corner", format!("must satisfy 1 < corner < {}", self.sites)));
            }
        }
        for (i, &a) in self.angles_pi32.iter().enumerate() {
            if !(a >= 0.0 && a < 32.0) {
                return Err(field(&format!("angles_pi32[{i}]"), "bend angle must lie in [0, 32) π/32"));
            }
        }
        positive("grid_step_um", self.grid_step_um)?;
        if self.grid_step_um > 0.5 {
            return Err(field("grid_step_um", "must not exceed 0.5 μm"));
        }
        if !(self.grid_margin_um >= 0.0) {
            return Err(field("grid_margin_um", "must be non-negative"));
        }
        if self.trace_points < 2 {
            return Err(field("trace_points", "need at least 2 points"));
        }
        positive("fit_range_um[0]", self.fit_range_um[0])?;
        if !(self.fit_range_um[1] > self.fit_range_um[0]) {
            return Err(field("fit_range_um", "upper bound must exceed lower bound"));
        }
        positive("fit_step_um", self.fit_step_um)?;
        positive("anisotropy_separation_um", self.anisotropy_separation_um)?;
        if self.anisotropy_points < 2 {
            return Err(field("anisotropy_points", "need at least 2 points"));
        }
        positive("separation_window_um[0]", self.separation_window_um[0])?;
        if !(self.separation_window_um[1] > self.separation_window_um[0]) {
            return Err(field("separation_window_um", "ceiling must exceed floor"));
        }
        positive("optimizer.bracket_scale", self.optimizer.bracket_scale)?;
        positive("optimizer.tolerance_per_cm", self.optimizer.tolerance_per_cm)?;
        if self.optimizer.prescan_points < 3 {
            return Err(field("optimizer.prescan_points", "need at least 3 points"));
        }
        if !(self.optimizer.minimum_depth >= 0.0) {
            return Err(field("optimizer.minimum_depth", "must be non-negative"));
        }
        self.spec()?;
        Ok(())
    }

    pub fn spec(&self) -> Result<WaveguideSpec> {
        let w = &self.waveguide;
        Ok(WaveguideSpec::new(um(w.width_um), um(w.height_um), w.substrate_index, w.index_change)?)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength_nm * NM
    }

    pub fn length(&self) -> f64 {
        cm(self.length_cm)
    }

    pub fn matching_condition(&self) -> MatchingCondition {
        match self.matching {
            MatchingConfig::DerivativeContinuity => MatchingCondition::DerivativeContinuity,
            MatchingConfig::LiteralArctan => MatchingCondition::LiteralArctan,
        }
    }

    pub fn optimizer_settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            bracket_scale: self.optimizer.bracket_scale,
            tolerance: per_cm(self.optimizer.tolerance_per_cm),
            prescan_points: self.optimizer.prescan_points,
            minimum_depth: self.optimizer.minimum_depth,
        }
    }

    pub fn layout_params(&self, angle_pi32: f64) -> Result<LayoutParams> {
        Ok(LayoutParams {
            sites: self.sites,
            corner: self.corner_index(),
            bend_angle: pi32(angle_pi32),
            length: self.length(),
            spec: self.spec()?,
            wavelength: self.wavelength(),
            window: SeparationWindow {
                floor: um(self.separation_window_um[0]),
                ceiling: um(self.separation_window_um[1]),
            },
        })
    }

    pub fn fit_separations(&self) -> Vec<f64> {
        separation_grid(um(self.fit_range_um[0]), um(self.fit_range_um[1]), um(self.fit_step_um))
    }
}

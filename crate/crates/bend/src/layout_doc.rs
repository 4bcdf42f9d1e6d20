//! JSON document describing an engineered layout.
//!
//! ```json
//! {
//!   "N": 9, "C": 5, "theta_bend": 1.9635, "theta_bend_pi32": 20.0, "L_cm": 10.0,
//!   "wavelength_nm": 800.0, "substrate_index": 1.444,
//!   "sites": [{"x_um": -80.1, "y_um": 0.0, "index_change": 0.001,
//!              "area_um2": 12.0, "width_um": 6.0, "height_um": 2.0}, ...],
//!   "separations_um": [...], "target_couplings_per_cm": [...]
//! }
//! ```
//!
//! `C` is 1-based. Positions are site centers in μm.

use bendlattice_core::lattice::LatticeLayout;
use bendlattice_core::mode_solver::{solve_mode, WaveguideSpec};
use bendlattice_core::units::{cm, per_cm, to_cm, to_per_cm, to_pi32, to_um, um, NM};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteDoc {
    pub x_um: f64,
    pub y_um: f64,
    pub index_change: f64,
    pub area_um2: f64,
    pub width_um: f64,
    pub height_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    #[serde(rename = "N")]
    pub sites_count: usize,
    #[serde(rename = "C")]
    pub corner: usize,
    pub theta_bend: f64,
    pub theta_bend_pi32: f64,
    #[serde(rename = "L_cm")]
    pub length_cm: f64,
    pub wavelength_nm: f64,
    pub substrate_index: f64,
    pub sites: Vec<SiteDoc>,
    pub separations_um: Vec<f64>,
    pub target_couplings_per_cm: Vec<f64>,
}

impl LayoutDocument {
    pub fn from_layout(layout: &LatticeLayout) -> Self {
        Self {
            sites_count: layout.len(),
            corner: layout.corner + 1,
            theta_bend: layout.bend_angle,
            theta_bend_pi32: to_pi32(layout.bend_angle),
            length_cm: to_cm(layout.length),
            wavelength_nm: layout.wavelength / NM,
            substrate_index: layout.specs[0].substrate_index(),
            sites: layout
                .positions
                .iter()
                .zip(&layout.specs)
                .map(|(p, s)| SiteDoc {
                    x_um: to_um(p[0]),
                    y_um: to_um(p[1]),
                    index_change: s.index_change(),
                    area_um2: s.area() * 1e12,
                    width_um: to_um(s.width()),
                    height_um: to_um(s.height()),
                })
                .collect(),
            separations_um: layout.separations.iter().map(|&r| to_um(r)).collect(),
            target_couplings_per_cm: layout.targets.iter().map(|&g| to_per_cm(g)).collect(),
        }
    }

    /// Rebuild the layout, re-solving every site mode. The bulk reference is
    /// the first site.
    pub fn to_layout(&self) -> Result<LatticeLayout> {
        let n = self.sites.len();
        if n != self.sites_count || n < 3 {
            return Err(Error::Config { field: "N".into(), message: format!("{n} sites listed") });
        }
        if !(self.corner > 1 && self.corner < n) {
            return Err(Error::Config { field: "C".into(), message: "must be interior".into() });
        }
        let wavelength = self.wavelength_nm * NM;
        let specs = self
            .sites
            .iter()
            .map(|s| WaveguideSpec::new(um(s.width_um), um(s.height_um), self.substrate_index, s.index_change))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let modes = specs
            .iter()
            .map(|s| solve_mode(s, wavelength))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(LatticeLayout {
            corner: self.corner - 1,
            bend_angle: self.theta_bend,
            length: cm(self.length_cm),
            wavelength,
            positions: self.sites.iter().map(|s| [um(s.x_um), um(s.y_um)]).collect(),
            reference_beta: modes[0].beta,
            specs,
            modes,
            targets: self.target_couplings_per_cm.iter().map(|&g| per_cm(g)).collect(),
            separations: self.separations_um.iter().map(|&r| um(r)).collect(),
        })
    }
}

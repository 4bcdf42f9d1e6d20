//! Angle sweeps, report files and the run manifest.

use std::path::{Path, PathBuf};

use bendlattice_core::coupling::{anisotropy_scan, coupling_analytic, fit_exponential, PairGeometry};
use bendlattice_core::defect::{optimize_detuning_with_matrix, DefectResult};
use bendlattice_core::lattice::{build_layout, coupling_matrix, relative_coupling_map, LatticeLayout};
use bendlattice_core::mode_solver::{solve_mode_with, ModeSolution};
use bendlattice_core::propagation::{
    corner_power_trace, evolve, output_intensity_map, transfer_with_matrix, AmplitudeVector,
    IntensityGrid, TransferReport,
};
use bendlattice_core::spectrum::{spectrum_spacings, SpectrumReport};
use bendlattice_core::units::{pi32, to_cm, to_per_cm, to_um, to_w_per_cm2, um};
use bendlattice_core::LatticeHamiltonian;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::csvfmt::{header, opt, pi32_label, sci, write_csv};
use crate::error::{Error, Result};
use crate::layout_doc::LayoutDocument;

/// Which outputs a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stages {
    pub modes: bool,
    pub coupling_scan: bool,
    pub layout: bool,
    pub transfer: bool,
    pub optimize: bool,
    pub trace: bool,
    pub spectrum: bool,
    pub intensity: bool,
}

impl Stages {
    pub fn all(config: &ExperimentConfig) -> Self {
        Self {
            modes: true,
            coupling_scan: true,
            layout: true,
            transfer: true,
            optimize: config.optimize,
            trace: true,
            spectrum: true,
            intensity: config.emit_intensity,
        }
    }

    fn needs_layout(&self) -> bool {
        self.layout || self.transfer || self.optimize || self.trace || self.spectrum || self.intensity
    }
}

/// Everything computed for one bend angle.
#[derive(Debug, Clone)]
pub struct AngleAnalysis {
    pub angle_pi32: f64,
    pub layout: LatticeLayout,
    pub matrix: LatticeHamiltonian,
    pub transfer: TransferReport,
    pub defect: Option<DefectResult>,
    pub optimized_transfer: Option<TransferReport>,
    pub spectrum: SpectrumReport,
    pub optimized_spectrum: Option<SpectrumReport>,
    /// `(z, P_C)` with the applied detuning (optimal if optimized).
    pub corner_trace: Vec<(f64, f64)>,
    /// Largest |‖A(z)‖² − 1| along the trace grid.
    pub norm_drift: f64,
}

impl AngleAnalysis {
    pub fn applied_detuning(&self) -> f64 {
        self.defect.as_ref().map(|d| d.detuning).unwrap_or(0.0)
    }

    pub fn corner_peak(&self) -> f64 {
        self.corner_trace.iter().map(|t| t.1).fold(0.0, f64::max)
    }
}

/// Build, engineer, propagate and (optionally) optimize one bend angle.
pub fn analyze_angle(config: &ExperimentConfig, angle_pi32: f64, optimize: bool) -> Result<AngleAnalysis> {
    let layout = build_layout(&config.layout_params(angle_pi32)?)?;
    analyze_layout(config, angle_pi32, layout, optimize)
}

pub fn analyze_layout(
    config: &ExperimentConfig,
    angle_pi32: f64,
    layout: LatticeLayout,
    optimize: bool,
) -> Result<AngleAnalysis> {
    let h = coupling_matrix(&layout)?;
    let c = layout.corner;
    let transfer = transfer_with_matrix(&h, c, layout.length, layout.bend_angle, 0.0)?;
    let spectrum = spectrum_spacings(&h)?;

    let (defect, optimized_transfer, optimized_spectrum) = if optimize {
        let d = optimize_detuning_with_matrix(&layout, &h, &config.optimizer_settings())?;
        let mut t = transfer_with_matrix(&h, c, layout.length, layout.bend_angle, d.detuning)?;
        t.optimized = true;
        let s = spectrum_spacings(&h.with_detuning(c, d.detuning))?;
        (Some(d), Some(t), Some(s))
    } else {
        (None, None, None)
    };

    let detuning = defect.as_ref().map(|d| d.detuning).unwrap_or(0.0);
    let n = config.trace_points;
    let z_grid: Vec<f64> = (0..n).map(|i| layout.length * i as f64 / (n - 1) as f64).collect();
    let corner_trace = corner_power_trace(&h, c, layout.length, detuning, &z_grid)?;
    let detuned = h.with_detuning(c, detuning);
    let a0 = AmplitudeVector::localized(layout.len(), 0);
    let mut norm_drift: f64 = 0.0;
    for &z in &z_grid {
        let a = evolve(&detuned, z, &a0)?;
        norm_drift = norm_drift.max((a.norm() * a.norm() - 1.0).abs());
    }

    Ok(AngleAnalysis {
        angle_pi32,
        layout,
        matrix: h,
        transfer,
        defect,
        optimized_transfer,
        spectrum,
        optimized_spectrum,
        corner_trace,
        norm_drift,
    })
}

/// One row of the optimal-detuning table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub angle_pi32: f64,
    pub result: DefectResult,
}

/// Optimal corner detuning for every configured angle.
pub fn table1_report(config: &ExperimentConfig) -> Result<Vec<Table1Row>> {
    config
        .angles_pi32
        .par_iter()
        .map(|&a| {
            let analysis = analyze_angle(config, a, true)?;
            Ok(Table1Row { angle_pi32: a, result: analysis.defect.expect("optimized") })
        })
        .collect()
}

pub fn table1_header() -> Vec<String> {
    header(&[
        "angle_rad",
        "pi32",
        "delta_per_cm",
        "abs_delta_over_g",
        "index_change_pct",
        "size_change_pct",
        "g_corner_per_cm",
        "loss_before",
        "loss_after",
        "multimodal",
    ])
}

pub fn table1_rows(rows: &[Table1Row]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let d = &r.result;
            vec![
                sci(d.bend_angle),
                pi32_label(r.angle_pi32),
                sci(to_per_cm(d.detuning)),
                sci(d.ratio),
                opt(d.index_change_pct),
                opt(d.size_change_pct),
                sci(to_per_cm(d.corner_coupling)),
                sci(d.loss_before),
                sci(d.loss_after),
                d.multimodal.to_string(),
            ]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleFailure {
    pub pi32: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub input_sha256: String,
    pub files: Vec<ManifestEntry>,
    pub failures: Vec<AngleFailure>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug)]
pub struct RunSummary {
    pub analyses: Vec<AngleAnalysis>,
    pub manifest: Manifest,
}

impl RunSummary {
    pub fn has_failures(&self) -> bool {
        !self.manifest.failures.is_empty()
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Emitter {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Emitter {
    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.files.push(ManifestEntry { path: name.to_string(), sha256: digest(bytes), bytes: bytes.len() });
    }

    fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let bytes = write_csv(&self.dir.join(name), header, rows)?;
        self.record(name, &bytes);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        let path = self.dir.join(name);
        std::fs::write(&path, &bytes).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        self.record(name, &bytes);
        Ok(())
    }
}

fn mode_rows(mode: &ModeSolution) -> Vec<Vec<String>> {
    vec![vec![
        sci(to_um(mode.spec.width())),
        sci(to_um(mode.spec.height())),
        sci(mode.spec.substrate_index()),
        sci(mode.spec.index_change()),
        sci(mode.spec.core_index()),
        sci(mode.wavelength * 1e9),
        sci(to_per_cm(mode.k)),
        sci(to_per_cm(mode.kx)),
        sci(to_per_cm(mode.ky)),
        sci(to_per_cm(mode.gamma_x)),
        sci(to_per_cm(mode.gamma_y)),
        sci(to_per_cm(mode.beta)),
        sci(mode.amplitude),
    ]]
}

fn emit_modes(em: &mut Emitter, mode: &ModeSolution) -> Result<()> {
    em.csv(
        "modes.csv",
        &header(&[
            "width_um", "height_um", "n_s", "delta_n", "n_g", "wavelength_nm", "k_per_cm",
            "kx_per_cm", "ky_per_cm", "gamma_x_per_cm", "gamma_y_per_cm", "beta_per_cm",
            "amplitude_v_per_m",
        ]),
        &mode_rows(mode),
    )
}

fn emit_coupling_scan(em: &mut Emitter, config: &ExperimentConfig, mode: &ModeSolution) -> Result<()> {
    let rs = config.fit_separations();
    let fit_angles: Vec<f64> = (0..=4).map(|i| pi32(4.0 * i as f64)).collect();
    let mut rows = Vec::new();
    let mut laws = Vec::new();
    for &theta in &fit_angles {
        for &r in &rs {
            let j = coupling_analytic(mode, mode, &PairGeometry::new(r, theta)?)?;
            rows.push(vec![sci(theta), pi32_label(theta * 32.0 / std::f64::consts::PI), sci(to_um(r)), sci(to_per_cm(j))]);
        }
        let law = fit_exponential(mode, theta, &rs)?;
        laws.push(vec![
            sci(theta),
            pi32_label(theta * 32.0 / std::f64::consts::PI),
            sci(to_per_cm(law.prefactor)),
            sci(to_per_cm(law.decay_rate)),
            sci(law.residual),
            sci(to_um(law.r_min)),
            sci(to_um(law.r_max)),
        ]);
    }
    em.csv("coupling_vs_separation.csv", &header(&["angle_rad", "pi32", "r_um", "coupling_per_cm"]), &rows)?;
    em.csv(
        "fit_laws.csv",
        &header(&["angle_rad", "pi32", "mu_per_cm", "xi_per_cm", "rms_log_residual", "r_min_um", "r_max_um"]),
        &laws,
    )?;
    let n = config.anisotropy_points;
    let angles: Vec<f64> = (0..n).map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64).collect();
    let scan = anisotropy_scan(mode, um(config.anisotropy_separation_um), &angles)?;
    let rows: Vec<Vec<String>> = scan
        .iter()
        .map(|&(theta, j)| vec![sci(theta), sci(config.anisotropy_separation_um), sci(to_per_cm(j))])
        .collect();
    em.csv("anisotropy.csv", &header(&["angle_rad", "r_um", "coupling_per_cm"]), &rows)
}

fn transfer_header(n: usize) -> Vec<String> {
    let mut h = header(&["angle_rad", "pi32", "delta_per_cm"]);
    h.extend((1..=n).map(|j| format!("P_{j}")));
    h.push("loss".into());
    h.push("optimized".into());
    h
}

fn transfer_row(angle_pi32: f64, t: &TransferReport) -> Vec<String> {
    let mut row = vec![sci(t.bend_angle), pi32_label(angle_pi32), sci(to_per_cm(t.detuning))];
    row.extend(t.powers.iter().map(|&p| sci(p)));
    row.push(sci(t.loss));
    row.push(t.optimized.to_string());
    row
}

fn emit_angle(
    dir: &Path,
    config: &ExperimentConfig,
    stages: &Stages,
    a: &AngleAnalysis,
) -> Result<Vec<ManifestEntry>> {
    let mut em = Emitter { dir: dir.to_path_buf(), files: Vec::new() };
    let tag = format!("pi32-{}", pi32_label(a.angle_pi32));
    let n = a.layout.len();

    if stages.layout {
        em.json(&format!("layout_{tag}.json"), &LayoutDocument::from_layout(&a.layout))?;
        let map = relative_coupling_map(&a.matrix)?;
        let mut rows = Vec::new();
        for m in 0..n {
            for l in 0..n {
                rows.push(vec![
                    (m + 1).to_string(),
                    (l + 1).to_string(),
                    sci(if m == l { 0.0 } else { to_per_cm(a.matrix.get(m, l)) }),
                    sci(map[m * n + l]),
                ]);
            }
        }
        em.csv(&format!("coupling_map_{tag}.csv"), &header(&["m", "l", "coupling_per_cm", "relative"]), &rows)?;
    }
    if stages.transfer || stages.optimize {
        let mut rows = vec![transfer_row(a.angle_pi32, &a.transfer)];
        if let Some(t) = &a.optimized_transfer {
            rows.push(transfer_row(a.angle_pi32, t));
        }
        em.csv(&format!("transfer_{tag}.csv"), &transfer_header(n), &rows)?;
    }
    if stages.trace {
        let rows: Vec<Vec<String>> = a
            .corner_trace
            .iter()
            .map(|&(z, p)| vec![sci(to_cm(z)), sci(p)])
            .collect();
        em.csv(&format!("corner_trace_{tag}.csv"), &header(&["z_cm", "P_corner"]), &rows)?;
    }
    if stages.spectrum {
        let mut rows = Vec::new();
        for (k, &ev) in a.spectrum.eigenvalues.iter().enumerate() {
            let spacing = a.spectrum.spacings.get(k).copied();
            let (ev_opt, sp_opt) = match &a.optimized_spectrum {
                Some(s) => (Some(s.eigenvalues[k]), s.spacings.get(k).copied()),
                None => (None, None),
            };
            rows.push(vec![
                (k + 1).to_string(),
                sci(to_per_cm(ev)),
                opt(spacing.map(to_per_cm)),
                opt(ev_opt.map(to_per_cm)),
                opt(sp_opt.map(to_per_cm)),
            ]);
        }
        em.csv(
            &format!("spectrum_{tag}.csv"),
            &header(&["k", "eigenvalue_per_cm", "spacing_per_cm", "eigenvalue_opt_per_cm", "spacing_opt_per_cm"]),
            &rows,
        )?;
    }
    if stages.intensity {
        let h = a.matrix.with_detuning(a.layout.corner, a.applied_detuning());
        let out = evolve(&h, a.layout.length, &AmplitudeVector::localized(n, 0))?;
        let grid = IntensityGrid::covering(&a.layout, um(config.grid_margin_um), um(config.grid_step_um));
        let map = output_intensity_map(&a.layout, &out, &grid)?;
        let mut rows = Vec::with_capacity(map.values.len());
        for iy in 0..map.ny {
            for ix in 0..map.nx {
                rows.push(vec![sci(to_um(map.x(ix))), sci(to_um(map.y(iy))), sci(to_w_per_cm2(map.at(ix, iy)))]);
            }
        }
        em.csv(&format!("intensity_{tag}.csv"), &header(&["x_um", "y_um", "intensity_W_cm2"]), &rows)?;
    }
    Ok(em.files)
}

/// Run the configured sweep into `out_dir`, writing the manifest last.
///
/// Per-angle failures are recorded in the manifest without aborting the
/// other angles.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path, stages: Stages) -> Result<RunSummary> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Io { path: out_dir.display().to_string(), source: e })?;
    let mut em = Emitter { dir: out_dir.to_path_buf(), files: Vec::new() };

    if !config.angles_pi32.is_empty() && (stages.modes || stages.coupling_scan) {
        let mode = solve_mode_with(&config.spec()?, config.wavelength(), config.matching_condition())?;
        if stages.modes {
            emit_modes(&mut em, &mode)?;
        }
        if stages.coupling_scan {
            emit_coupling_scan(&mut em, config, &mode)?;
        }
    }

    let mut analyses = Vec::new();
    let mut failures = Vec::new();
    if stages.needs_layout() {
        let outcomes: Vec<(f64, Result<(AngleAnalysis, Vec<ManifestEntry>)>)> = config
            .angles_pi32
            .par_iter()
            .map(|&angle| {
                let run = analyze_angle(config, angle, stages.optimize)
                    .and_then(|a| emit_angle(out_dir, config, &stages, &a).map(|files| (a, files)));
                (angle, run)
            })
            .collect();
        for (angle, outcome) in outcomes {
            match outcome {
                Ok((analysis, files)) => {
                    em.files.extend(files);
                    analyses.push(analysis);
                }
                Err(e) => failures.push(AngleFailure { pi32: angle, error: e.to_string() }),
            }
        }
    }

    if !analyses.is_empty() {
        if stages.transfer || stages.optimize {
            let rows: Vec<Vec<String>> = analyses
                .iter()
                .map(|a| {
                    vec![
                        sci(pi32(a.angle_pi32)),
                        pi32_label(a.angle_pi32),
                        sci(a.transfer.loss),
                        opt(a.optimized_transfer.as_ref().map(|t| t.loss)),
                        opt(a.defect.as_ref().map(|d| to_per_cm(d.detuning))),
                    ]
                })
                .collect();
            em.csv(
                "loss_vs_angle.csv",
                &header(&["angle_rad", "pi32", "loss", "loss_optimized", "delta_per_cm"]),
                &rows,
            )?;
        }
        if stages.optimize {
            let table: Vec<Table1Row> = analyses
                .iter()
                .filter_map(|a| a.defect.clone().map(|d| Table1Row { angle_pi32: a.angle_pi32, result: d }))
                .collect();
            em.csv("table1.csv", &table1_header(), &table1_rows(&table))?;
        }
        if stages.spectrum {
            let rows: Vec<Vec<String>> = analyses
                .iter()
                .map(|a| {
                    vec![
                        sci(pi32(a.angle_pi32)),
                        pi32_label(a.angle_pi32),
                        sci(to_per_cm(a.spectrum.rms_deviation)),
                        sci(to_per_cm(a.spectrum.trimmed_rms_deviation)),
                        opt(a.optimized_spectrum.as_ref().map(|s| to_per_cm(s.rms_deviation))),
                        opt(a.optimized_spectrum.as_ref().map(|s| to_per_cm(s.trimmed_rms_deviation))),
                    ]
                })
                .collect();
            em.csv(
                "spectrum_summary.csv",
                &header(&["angle_rad", "pi32", "rms_per_cm", "trimmed_rms_per_cm", "rms_opt_per_cm", "trimmed_rms_opt_per_cm"]),
                &rows,
            )?;
        }
    }

    let mut files = em.files;
    files.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        input_sha256: digest(&serde_json::to_vec(config)?),
        files,
        failures,
    };
    let path = out_dir.join(MANIFEST_NAME);
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    std::fs::write(&path, bytes).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    Ok(RunSummary { analyses, manifest })
}

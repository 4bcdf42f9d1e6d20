//! Bent chain geometry and its coupling matrix.
//!
//! Site indices are 0-based. The corner sits at the origin, the first arm
//! extends along −x and the second arm leaves the corner at the bend angle
//! θ (θ = 0 is the straight chain).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::coupling::{coupling_analytic, PairGeometry};
use crate::mode_solver::{solve_mode, ModeSolution, WaveguideSpec};
use crate::numeric::bisect;
use crate::{Error, Result};

/// Nearest-neighbour couplings `G_j = π/(2L)·√((N − j)·j)`, `j = 1..N−1`,
/// for which a chain of `n` sites mirrors site 1 onto site N at `length`.
pub fn pst_profile(n: usize, length: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", reason: "need at least 2 sites" });
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidParameter { name: "length", reason: "must be positive" });
    }
    Ok((1..n)
        .map(|j| PI / (2.0 * length) * libm::sqrt(((n - j) * j) as f64))
        .collect())
}

/// Window of center-to-center separations searched when engineering a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationWindow {
    pub floor: f64,
    pub ceiling: f64,
}

impl Default for SeparationWindow {
    fn default() -> Self {
        Self { floor: 8e-6, ceiling: 100e-6 }
    }
}

/// Separation at which two identical waveguides along `angle` couple with
/// strength `target` (1/m), to 10⁻⁸ relative.
pub fn solve_separation(
    target: f64,
    angle: f64,
    mode: &ModeSolution,
    window: SeparationWindow,
) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidParameter { name: "target", reason: "must be positive" });
    }
    let coupling = |r: f64| -> Result<f64> {
        coupling_analytic(mode, mode, &PairGeometry::new(r, angle)?)
    };
    let strongest = coupling(window.floor)?;
    let weakest = coupling(window.ceiling)?;
    if !(target <= strongest && target >= weakest) {
        return Err(Error::UnreachableCoupling { target, min: weakest, max: strongest });
    }
    let log_target = libm::log(target);
    bisect(
        |r| match coupling(r) {
            Ok(j) if j > 0.0 => libm::log(j) - log_target,
            _ => f64::NAN,
        },
        window.floor,
        window.ceiling,
        1e-15,
        "separation",
    )
}

/// Inputs of [`build_layout`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    pub sites: usize,
    /// 0-based corner index, strictly inside the chain.
    pub corner: usize,
    pub bend_angle: f64,
    pub length: f64,
    pub spec: WaveguideSpec,
    pub wavelength: f64,
    pub window: SeparationWindow,
}

impl LayoutParams {
    /// Nine 6 μm × 2 μm guides, 10 cm long, at 800 nm, cornered at the center.
    pub fn reference(bend_angle: f64) -> Self {
        Self {
            sites: 9,
            corner: 4,
            bend_angle,
            length: 0.1,
            spec: WaveguideSpec::reference_asymmetric(),
            wavelength: 800e-9,
            window: SeparationWindow::default(),
        }
    }
}

/// Engineered bent chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeLayout {
    pub corner: usize,
    pub bend_angle: f64,
    pub length: f64,
    pub wavelength: f64,
    /// Site centers, meters.
    pub positions: Vec<[f64; 2]>,
    pub specs: Vec<WaveguideSpec>,
    pub modes: Vec<ModeSolution>,
    /// Target nearest-neighbour couplings, 1/m; entry `j` is link `(j, j+1)`.
    pub targets: Vec<f64>,
    /// Engineered separations, meters; entry `j` is link `(j, j+1)`.
    pub separations: Vec<f64>,
    /// Propagation constant of the undetuned bulk guide, 1/m.
    pub reference_beta: f64,
}

impl LatticeLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Propagation constant of each site, 1/m.
    pub fn betas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.beta).collect()
    }

    /// Center distance between two sites.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (p, q) = (self.positions[a], self.positions[b]);
        libm::hypot(q[0] - p[0], q[1] - p[1])
    }
}

/// Place the chain and engineer every nearest-neighbour separation so the
/// link couplings reproduce [`pst_profile`].
pub fn build_layout(params: &LayoutParams) -> Result<LatticeLayout> {
    let n = params.sites;
    if n < 3 {
        return Err(Error::InvalidParameter { name: "sites", reason: "need at least 3 sites" });
    }
    if !(params.corner > 0 && params.corner < n - 1) {
        return Err(Error::InvalidParameter { name: "corner", reason: "must be an interior site" });
    }
    if !params.bend_angle.is_finite() || params.bend_angle < 0.0 || params.bend_angle >= PI {
        return Err(Error::InvalidParameter { name: "bend_angle", reason: "must lie in [0, π)" });
    }
    let mode = solve_mode(&params.spec, params.wavelength)?;
    let targets = pst_profile(n, params.length)?;
    let c = params.corner;
    let dir = [libm::cos(params.bend_angle), libm::sin(params.bend_angle)];

    let mut positions = vec![[0.0, 0.0]; n];
    let mut separations = vec![0.0; n - 1];
    for j in (0..c).rev() {
        let r = solve_separation(targets[j], 0.0, &mode, params.window)?;
        separations[j] = r;
        positions[j] = [positions[j + 1][0] - r, positions[j + 1][1]];
    }
    for j in (c + 1)..n {
        let r = solve_separation(targets[j - 1], params.bend_angle, &mode, params.window)?;
        separations[j - 1] = r;
        positions[j] = [positions[j - 1][0] + r * dir[0], positions[j - 1][1] + r * dir[1]];
    }

    Ok(LatticeLayout {
        corner: c,
        bend_angle: params.bend_angle,
        length: params.length,
        wavelength: params.wavelength,
        positions,
        specs: vec![params.spec; n],
        modes: vec![mode; n],
        targets,
        separations,
        reference_beta: mode.beta,
    })
}

/// Real symmetric coupling matrix, row-major, entries in 1/m.
///
/// Off-diagonal entries are pair couplings; diagonal entries are detunings
/// `β_j − β_ref` in the frame co-rotating with the bulk propagation constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHamiltonian {
    n: usize,
    data: Vec<f64>,
}

impl LatticeHamiltonian {
    /// Wrap a row-major `n × n` buffer, rejecting asymmetric input.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        let scale = data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > 1e-12 * scale {
                    return Err(Error::NonHermitian { row: i, col: j });
                }
            }
            if !data[i * n + i].is_finite() {
                return Err(Error::NonHermitian { row: i, col: i });
            }
        }
        Ok(Self { n, data })
    }

    /// Tridiagonal matrix with the given nearest-neighbour couplings.
    pub fn tridiagonal(links: &[f64]) -> Self {
        let n = links.len() + 1;
        let mut data = vec![0.0; n * n];
        for (j, &g) in links.iter().enumerate() {
            data[j * n + j + 1] = g;
            data[(j + 1) * n + j] = g;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copy with diagonal entry `site` replaced by `detuning`.
    pub fn with_detuning(&self, site: usize, detuning: f64) -> Self {
        let mut out = self.clone();
        out.data[site * self.n + site] = detuning;
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// Nearest-neighbour entries `H[j][j+1]`.
    pub fn neighbour_band(&self) -> Vec<f64> {
        (0..self.n.saturating_sub(1)).map(|j| self.get(j, j + 1)).collect()
    }

    /// Largest beyond-nearest-neighbour magnitude over the smallest
    /// nearest-neighbour magnitude.
    pub fn beyond_neighbour_ratio(&self) -> f64 {
        let nn_min = self.neighbour_band().iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        let mut beyond: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 2)..self.n {
                beyond = beyond.max(self.get(i, j).abs());
            }
        }
        beyond / nn_min
    }
}

/// Couplings of every pair of sites plus diagonal detunings from each site's
/// own propagation constant.
pub fn coupling_matrix(layout: &LatticeLayout) -> Result<LatticeHamiltonian> {
    let n = layout.len();
    let mut data = vec![0.0; n * n];
    for m in 0..n {
        data[m * n + m] = layout.modes[m].beta - layout.reference_beta;
        for l in (m + 1)..n {
            let (p, q) = (layout.positions[m], layout.positions[l]);
            let geom = PairGeometry::from_offset(q[0] - p[0], q[1] - p[1])?;
            let forward = coupling_analytic(&layout.modes[m], &layout.modes[l], &geom)?;
            let backward = coupling_analytic(&layout.modes[l], &layout.modes[m], &geom)?;
            // identical guides give equal values; otherwise symmetrize
            let value = 0.5 * (forward + backward);
            data[m * n + l] = value;
            data[l * n + m] = value;
        }
    }
    LatticeHamiltonian::new(n, data)
}

/// `|H_ml| / max |H_off-diagonal|`, row-major, with a zero diagonal.
pub fn relative_coupling_map(h: &LatticeHamiltonian) -> Result<Vec<f64>> {
    let n = h.dim();
    let mut max: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max = max.max(h.get(i, j).abs());
            }
        }
    }
    if max == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i * n + j] = h.get(i, j).abs() / max;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{per_cm, pi32, to_per_cm};

    #[test]
    fn profile_values_and_symmetry() {
        let g = pst_profile(9, 0.1).unwrap();
        assert_eq!(g.len(), 8);
        assert!((to_per_cm(g[0]) - 0.444_288_293_815_836_6).abs() < 1e-12);
        assert!((to_per_cm(g[3]) - 0.702_481_473_104_073_1).abs() < 1e-12);
        for j in 0..g.len() {
            assert_eq!(g[j], g[g.len() - 1 - j]);
        }
        let two = pst_profile(2, 0.1).unwrap();
        assert_eq!(two, vec![PI / 0.2]);
        assert!(pst_profile(1, 0.1).is_err());
        assert!(pst_profile(5, -1.0).is_err());
    }

    #[test]
    fn separation_round_trip_and_anisotropy() {
        let mode = solve_mode(&WaveguideSpec::reference_asymmetric(), 800e-9).unwrap();
        let target = per_cm(0.6);
        let w = SeparationWindow::default();
        let straight = solve_separation(target, 0.0, &mode, w).unwrap();
        let bent = solve_separation(target, pi32(19.0), &mode, w).unwrap();
        for (r, angle) in [(straight, 0.0), (bent, pi32(19.0))] {
            let j = coupling_analytic(&mode, &mode, &PairGeometry::new(r, angle).unwrap()).unwrap();
            assert!((j - target).abs() / target < 1e-8);
        }
        assert!((straight - bent).abs() > 1e-7);
        assert!(matches!(
            solve_separation(per_cm(1e3), 0.0, &mode, w),
            Err(Error::UnreachableCoupling { .. })
        ));
    }

    #[test]
    fn straight_chain_is_collinear_and_mirror_symmetric() {
        let layout = build_layout(&LayoutParams::reference(0.0)).unwrap();
        for p in &layout.positions {
            assert_eq!(p[1], 0.0);
        }
        let s = &layout.separations;
        for j in 0..s.len() {
            assert!((s[j] - s[s.len() - 1 - j]).abs() < 1e-15);
        }
    }

    #[test]
    fn engineered_links_match_profile() {
        let layout = build_layout(&LayoutParams::reference(PI / 2.0)).unwrap();
        let h = coupling_matrix(&layout).unwrap();
        for (j, g) in layout.targets.iter().enumerate() {
            assert!((h.get(j, j + 1) - g).abs() / g < 1e-8);
            assert!((layout.distance(j, j + 1) - layout.separations[j]).abs() < 1e-18);
        }
        for j in 0..layout.len() {
            assert_eq!(h.get(j, j), 0.0);
        }
    }

    #[test]
    fn sites_lie_on_two_rays() {
        let theta = pi32(19.0);
        let layout = build_layout(&LayoutParams::reference(theta)).unwrap();
        let c = layout.corner;
        assert_eq!(layout.positions[c], [0.0, 0.0]);
        for p in &layout.positions[..c] {
            assert!(p[0] < 0.0 && p[1] == 0.0);
        }
        for p in &layout.positions[c + 1..] {
            let cross = p[0] * libm::sin(theta) - p[1] * libm::cos(theta);
            assert!(cross.abs() < 1e-18);
            assert!(p[0] * libm::cos(theta) + p[1] * libm::sin(theta) > 0.0);
        }
    }

    #[test]
    fn sharper_bend_brings_corner_neighbours_closer() {
        let right = build_layout(&LayoutParams::reference(PI / 2.0)).unwrap();
        let sharp = build_layout(&LayoutParams::reference(pi32(20.0))).unwrap();
        assert!(sharp.distance(3, 5) < right.distance(3, 5));
    }

    #[test]
    fn straight_chain_has_weak_long_range_couplings() {
        let layout = build_layout(&LayoutParams::reference(0.0)).unwrap();
        let h = coupling_matrix(&layout).unwrap();
        let nn_max = h.neighbour_band().iter().fold(0.0_f64, |a, &x| a.max(x));
        for i in 0..9 {
            for j in (i + 2)..9 {
                assert!(h.get(i, j) < 0.1 * nn_max);
            }
        }
    }

    #[test]
    fn invalid_layouts_are_rejected() {
        let mut p = LayoutParams::reference(0.0);
        p.corner = 0;
        assert!(build_layout(&p).is_err());
        p.corner = 8;
        assert!(build_layout(&p).is_err());
        p = LayoutParams::reference(PI);
        assert!(build_layout(&p).is_err());
        p = LayoutParams::reference(0.0);
        p.sites = 2;
        assert!(build_layout(&p).is_err());
    }

    #[test]
    fn hamiltonian_validation_and_map() {
        assert!(matches!(
            LatticeHamiltonian::new(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::NonHermitian { row: 0, col: 1 })
        ));
        assert!(LatticeHamiltonian::new(2, vec![0.0; 3]).is_err());
        let h = LatticeHamiltonian::tridiagonal(&[1.0, 3.0, 2.0]);
        let map = relative_coupling_map(&h).unwrap();
        assert_eq!(map[1 * 4 + 2], 1.0);
        assert_eq!(map[0], 0.0);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(map[i * 4 + j], map[j * 4 + i]);
            }
        }
        let zero = LatticeHamiltonian::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(relative_coupling_map(&zero), Err(Error::ZeroMatrix));
    }
}

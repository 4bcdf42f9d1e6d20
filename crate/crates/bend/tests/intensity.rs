use bendlattice::{analyze_angle, ExperimentConfig};
use bendlattice_core::propagation::{evolve, output_intensity_map, AmplitudeVector, IntensityGrid};
use bendlattice_core::units::um;

#[test]
fn output_light_sits_on_the_last_site_at_right_angle() {
    let config = ExperimentConfig::default();
    let a = analyze_angle(&config, 16.0, false).unwrap();
    let n = a.layout.len();
    let out = evolve(&a.matrix, a.layout.length, &AmplitudeVector::localized(n, 0)).unwrap();
    let map = output_intensity_map(&a.layout, &out, &IntensityGrid::covering(&a.layout, um(10.0), um(0.1))).unwrap();

    let total = map.integrated_power();
    assert!((total - 1.0).abs() <= 0.02, "integrated power {total}");
    let radius = 1.5 * a.layout.specs[n - 1].width();
    let near = map.power_within(a.layout.positions[n - 1], radius);
    assert!(near / total > 0.95, "fraction near the last site {}", near / total);
}

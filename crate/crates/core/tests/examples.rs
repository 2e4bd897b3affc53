mod quarter_wave_transmittance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/quarter_wave_transmittance.rs"));
}
mod scattering_invariants {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scattering_invariants.rs"));
}
mod hom_dip {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hom_dip.rs"));
}
mod pulse_reshaping {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pulse_reshaping.rs"));
}
mod kramers_kronig {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kramers_kronig.rs"));
}
mod experiment_tables {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/experiment_tables.rs"));
}

#[test]
fn quarter_wave_example_matches_closed_form() {
    for row in quarter_wave_transmittance::run_example().unwrap() {
        assert!((row.computed / row.closed_form - 1.0).abs() < 1e-9);
        assert_eq!(row.layers, 2 * row.k + 1);
    }
}

#[test]
fn scattering_example_is_unitary() {
    for c in scattering_invariants::run_example().unwrap() {
        assert!(c.norm_error < 1e-10 && c.overlap < 1e-10);
        assert!(c.absorption[0] > 0.0);
    }
}

#[test]
fn hom_example_finds_one_dip() {
    let (_, dip) = hom_dip::run_example().unwrap();
    assert_eq!(dip.fringe_count, 1);
    assert!(dip.s0 > 0.0);
}

#[test]
fn pulse_reshaping_example_splits_thick_barrier() {
    let out = pulse_reshaping::run_example().unwrap();
    assert_eq!(out[0].1.intensity_peaks(0.2).len(), 1);
    assert!(out[1].1.intensity_peaks(0.2).len() >= 2);
}

#[test]
fn kk_example_converges() {
    let rows = kramers_kronig::run_example().unwrap();
    let lorentz: Vec<f64> = rows.iter().filter(|r| r.0 == "lorentz").map(|r| r.2).collect();
    assert!(lorentz.windows(2).all(|w| w[1] < w[0] / 2.0));
}

#[test]
fn experiment_example_reports_dip() {
    let table = experiment_tables::run_example().unwrap();
    assert_eq!(table.metadata_value("fringe_count"), Some("1"));
    assert_eq!(table.rows.len(), 801);
}

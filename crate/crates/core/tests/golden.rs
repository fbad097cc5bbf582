use qace::matcore::{check_density, ComplexMatrix};
use qace::quantum::separable_sample;

#[test]
fn separable_sample_matches_golden_file() {
    let golden: ComplexMatrix =
        serde_json::from_str(include_str!("data/separable_2x2_k4_seed7.json")).unwrap();
    let rho = separable_sample(2, 2, 4, 7);
    assert!(rho.max_abs_diff(&golden) < 1e-15);
    let report = check_density(&golden);
    assert!(report.is_hermitian && report.is_psd);
    assert!((report.trace - 1.0).abs() < 1e-12);
}

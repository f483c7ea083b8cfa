//! Golden-file pin on the case generator: seed 42, family poly, trial 0
//! must serialize identically on every run. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test -p holder-bounds --test golden_case`.

use std::fs;
use std::path::Path;

use holder_bounds::harness::{Family, SweepConfig};

#[test]
fn poly_case_seed42_trial0_matches_golden() {
    let config = SweepConfig {
        seed: 42,
        family: Family::Poly,
        ..SweepConfig::default()
    };
    let summary = config.case_for_trial(0).summary();
    let actual = serde_json::to_string_pretty(&summary).unwrap();

    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/case_seed42_poly_trial0.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, format!("{actual}\n")).unwrap();
    }
    let expected = fs::read_to_string(&path)
        .expect("golden file missing; run with UPDATE_GOLDEN=1 to create it");
    assert_eq!(actual.trim_end(), expected.trim_end());
}

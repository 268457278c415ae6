//! Keeps the checked-in CSV resource in lockstep with the embedded
//! dataset.

use fastmm::history::history_csv;

#[test]
fn checked_in_history_csv_matches_embedded_dataset() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/exponent_history.csv"
    );
    let on_disk = std::fs::read_to_string(path).expect("data/exponent_history.csv present");
    assert_eq!(
        on_disk,
        history_csv(),
        "regenerate with: fastmm exponent --history > data/exponent_history.csv"
    );
}

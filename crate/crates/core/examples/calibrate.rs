//! Regenerates `fixtures/benchmark_calibration.json`.
//!
//! cargo run -p paretoinfer --example calibrate [-- --check]

use paretoinfer::problem::calibration::{calibrate, CalibrationDesign};

fn main() {
    let check = std::env::args().any(|a| a == "--check");
    let cal = calibrate(&CalibrationDesign::default()).expect("calibration converges");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/benchmark_calibration.json");
    let text = cal.to_json();
    if check {
        let committed = std::fs::read_to_string(path).expect("fixture exists");
        if committed != text {
            eprintln!("fixture is stale; rerun without --check");
            std::process::exit(1);
        }
        println!("fixture is up to date");
        return;
    }
    std::fs::write(path, &text).expect("fixture written");
    println!("{text}");
}

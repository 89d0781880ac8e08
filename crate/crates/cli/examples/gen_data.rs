//! Regenerates the shipped artifacts in `data/`: the fully determined
//! five-stage fourth-order tableau and the cached predator-prey reference
//! solution. Run from the repository root:
//!
//! ```text
//! cargo run --release -p perk-tools --example gen_data
//! ```

use std::path::Path;

use perk_core::butcher::{build_p4_tableau, AbscissaeChoice};
use perk_tools::formats::{lv_reference_cached, serialize_tableau};

fn main() {
    let data = Path::new("data");
    std::fs::create_dir_all(data).expect("create data/");
    let t = build_p4_tableau(5, &[], AbscissaeChoice::Constant).expect("E=5 tableau");
    serialize_tableau(&t, &data.join("p4-e5-tableau.txt")).expect("write tableau");
    let lv_path = data.join("lv-reference-tf5.txt");
    if lv_path.exists() {
        std::fs::remove_file(&lv_path).expect("clear stale reference");
    }
    let (u, v) = lv_reference_cached(&lv_path, 5.0, (1.0, 2.0)).expect("reference run");
    println!("reference state at t=5: ({u:.17e}, {v:.17e})");
}

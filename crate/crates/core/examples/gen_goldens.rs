//! Regenerates the golden SMV files under `tests/golden/`.
//!
//! Run after intentional changes to the export format:
//! `cargo run -p pathmc-core --example gen_goldens`

use pathmc_core::components::identify_components;
use pathmc_core::parse::parse_pathway;
use pathmc_core::projection::project;
use pathmc_core::semantics::System;
use pathmc_core::smv::export_smv;
use std::collections::BTreeSet;
use std::path::Path;

const SHUTTLE: &str = "\
R1: A -> B [D]
R2: B -> A [D]
R3: A -> C [D]
R4: C -> A [D]
init: A, D
";

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    std::fs::create_dir_all(&dir).unwrap();

    let p = parse_pathway(SHUTTLE).unwrap();
    let sys = System::from_pathway(&p);
    std::fs::write(dir.join("shuttle.smv"), export_smv(&p, &sys)).unwrap();

    let m = identify_components(&p).unwrap();
    let j = BTreeSet::from([m.by_name("A").unwrap()]);
    let apw = project(&p, &m, &j).unwrap();
    std::fs::write(
        dir.join("shuttle_abc.smv"),
        export_smv(&p, &apw.to_system(&p)),
    )
    .unwrap();

    let mixed_src = format!("{SHUTTLE}R5: A -> C\n");
    let p2 = parse_pathway(&mixed_src).unwrap();
    let m2 = identify_components(&p2).unwrap();
    let j2 = BTreeSet::from([m2.by_name("A").unwrap()]);
    let apw2 = project(&p2, &m2, &j2).unwrap();
    std::fs::write(
        dir.join("shuttle_mixed.smv"),
        export_smv(&p2, &apw2.to_system(&p2)),
    )
    .unwrap();

    println!("golden files written to {}", dir.display());
}

//! Optional cross-check of the internal checker against an external
//! symbolic model checker run on the SMV export.
//!
//! Ignored by default; run with `cargo test -- --ignored` on a machine
//! with `NuSMV` on the PATH. The exported `stall` input turns finite
//! maximal paths into stutter loops, so LTL verdicts on the export match
//! the internal finite-path semantics for these formulas.

use pathmc_core::checker::{check, compassion_pairs};
use pathmc_core::components::identify_components;
use pathmc_core::formula::parse_formula;
use pathmc_core::parse::parse_pathway;
use pathmc_core::projection::project;
use pathmc_core::semantics::{System, DEFAULT_STATE_CAP};
use pathmc_core::smv::export_smv;
use std::collections::BTreeSet;
use std::process::Command;

const SHUTTLE: &str = "\
R1: A -> B [D]
R2: B -> A [D]
R3: A -> C [D]
R4: C -> A [D]
init: A, D
";

fn nusmv_available() -> bool {
    Command::new("NuSMV")
        .arg("-help")
        .output()
        .map(|_| true)
        .unwrap_or(false)
}

/// Run NuSMV on `module` with one LTL specification; `Some(verdict)` or
/// `None` when the output is not understood.
fn nusmv_ltl(module: &str, ltl: &str) -> Option<bool> {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("pathmc_crosscheck_{}.smv", std::process::id()));
    std::fs::write(&path, format!("{module}LTLSPEC {ltl}\n")).ok()?;
    let out = Command::new("NuSMV").arg("-dcx").arg(&path).output().ok()?;
    let _ = std::fs::remove_file(&path);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    if text.contains("is true") {
        Some(true)
    } else if text.contains("is false") {
        Some(false)
    } else {
        None
    }
}

#[test]
#[ignore = "requires NuSMV on PATH"]
fn external_checker_agrees_on_shuttle() {
    if !nusmv_available() {
        eprintln!("NuSMV not found, skipping cross-check");
        return;
    }
    let p = parse_pathway(SHUTTLE).unwrap();
    let sys = System::from_pathway(&p);
    let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
    let pairs = compassion_pairs(&sys);
    let module = export_smv(&p, &sys);

    // formulas whose universal-CTL and LTL readings coincide
    for (actl, ltl) in [
        ("AF C", "F C"),
        ("AG !C", "G !C"),
        ("AG (B -> AF A)", "G (B -> F A)"),
        ("A[A U B]", "A U B"),
    ] {
        let f = parse_formula(actl, &p).unwrap();
        let internal = check(&p, &sys, &lts, &pairs, &f).unwrap().verdict;
        let external = nusmv_ltl(&module, ltl).expect("NuSMV verdict");
        assert_eq!(internal, external, "disagreement on {actl}");
    }
}

#[test]
#[ignore = "requires NuSMV on PATH"]
fn external_checker_agrees_on_projected_shuttle() {
    if !nusmv_available() {
        eprintln!("NuSMV not found, skipping cross-check");
        return;
    }
    let p = parse_pathway(SHUTTLE).unwrap();
    let m = identify_components(&p).unwrap();
    let j = BTreeSet::from([m.by_name("A").unwrap()]);
    let apw = project(&p, &m, &j).unwrap();
    let asys = apw.to_system(&p);
    let alts = asys.build_lts(DEFAULT_STATE_CAP).unwrap();
    let pairs = compassion_pairs(&asys);
    let module = export_smv(&p, &asys);

    for (actl, ltl) in [("AF C", "F C"), ("AG !B", "G !B")] {
        let f = parse_formula(actl, &p).unwrap();
        let internal = check(&p, &asys, &alts, &pairs, &f).unwrap().verdict;
        let external = nusmv_ltl(&module, ltl).expect("NuSMV verdict");
        assert_eq!(internal, external, "disagreement on projected {actl}");
    }
}

//! Export to the SMV model-checker input language.
//!
//! One boolean state variable per species, one input variable `act` ranging
//! over the rule labels plus `stall`. The transition relation mirrors the
//! rule semantics (including projected-rule deviations: missing product
//! guards and stutter self-loops); `stall` fires exactly in deadlock states
//! so the relation is total. One `COMPASSION (en_R, tk_R)` declaration per
//! fair rule. Output is byte-stable: variables in species-id order, rules
//! in rule order, names sanitised deterministically.

use crate::pathway::Pathway;
use crate::semantics::System;
use std::collections::HashSet;

const RESERVED: [&str; 30] = [
    "MODULE",
    "VAR",
    "IVAR",
    "DEFINE",
    "ASSIGN",
    "TRANS",
    "INIT",
    "INVAR",
    "COMPASSION",
    "FAIRNESS",
    "JUSTICE",
    "SPEC",
    "LTLSPEC",
    "CTLSPEC",
    "init",
    "next",
    "case",
    "esac",
    "boolean",
    "TRUE",
    "FALSE",
    "act",
    "stall",
    "self",
    "union",
    "in",
    "xor",
    "xnor",
    "mod",
    "word",
];

struct Namer {
    used: HashSet<String>,
}

impl Namer {
    fn new() -> Namer {
        Namer {
            used: RESERVED.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Deterministic SMV identifier: non-alphanumerics become `_`, a
    /// leading non-letter gets an `s_` prefix, collisions get a counter.
    fn name(&mut self, raw: &str) -> String {
        let mut base: String = raw
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        if !base
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        {
            base = format!("s_{base}");
        }
        let mut candidate = base.clone();
        let mut n = 2;
        while self.used.contains(&candidate) {
            candidate = format!("{base}_{n}");
            n += 1;
        }
        self.used.insert(candidate.clone());
        candidate
    }
}

/// Emit an SMV module for a compiled system (concrete or projected).
pub fn export_smv(p: &Pathway, system: &System) -> String {
    let mut namer = Namer::new();
    let vars: Vec<String> = system
        .species()
        .iter()
        .map(|&s| namer.name(p.name(s)))
        .collect();
    let acts: Vec<String> = system
        .rules()
        .iter()
        .map(|r| namer.name(&format!("r_{}", r.label)))
        .collect();
    let ens: Vec<String> = system
        .rules()
        .iter()
        .map(|r| namer.name(&format!("en_{}", r.label)))
        .collect();
    let tks: Vec<String> = system
        .rules()
        .iter()
        .map(|r| namer.name(&format!("tk_{}", r.label)))
        .collect();

    let mut out = String::new();
    out.push_str("MODULE main\n");
    out.push_str("VAR\n");
    for v in &vars {
        out.push_str(&format!("  {v} : boolean;\n"));
    }
    out.push_str("IVAR\n");
    let mut act_domain = acts.clone();
    act_domain.push("stall".into());
    out.push_str(&format!("  act : {{{}}};\n", act_domain.join(", ")));

    out.push_str("DEFINE\n");
    for (i, rule) in system.rules().iter().enumerate() {
        let mut parts: Vec<String> = rule.requires.ones().map(|b| vars[b].clone()).collect();
        if let Some(block) = &rule.block {
            let products: Vec<String> = block.ones().map(|b| vars[b].clone()).collect();
            if products.is_empty() {
                parts.push("!(TRUE)".into());
            } else {
                parts.push(format!("!({})", products.join(" & ")));
            }
        }
        let cond = if parts.is_empty() {
            "TRUE".to_string()
        } else {
            parts.join(" & ")
        };
        out.push_str(&format!("  {} := {};\n", ens[i], cond));
        out.push_str(&format!("  {} := act = {};\n", tks[i], acts[i]));
    }
    let any = if ens.is_empty() {
        "FALSE".to_string()
    } else {
        ens.join(" | ")
    };
    out.push_str(&format!("  any_enabled := {any};\n"));

    out.push_str("ASSIGN\n");
    for (b, v) in vars.iter().enumerate() {
        let value = if system.initial().get(b) {
            "TRUE"
        } else {
            "FALSE"
        };
        out.push_str(&format!("  init({v}) := {value};\n"));
    }
    for (b, v) in vars.iter().enumerate() {
        let mut cases: Vec<(usize, &str)> = Vec::new();
        for (i, rule) in system.rules().iter().enumerate() {
            if rule.adds.get(b) {
                cases.push((i, "TRUE"));
            } else if rule.removes.get(b) {
                cases.push((i, "FALSE"));
            }
        }
        if cases.is_empty() {
            out.push_str(&format!("  next({v}) := {v};\n"));
        } else {
            out.push_str(&format!("  next({v}) := case\n"));
            for (i, value) in cases {
                out.push_str(&format!("    act = {} : {};\n", acts[i], value));
            }
            out.push_str(&format!("    TRUE : {v};\n"));
            out.push_str("  esac;\n");
        }
    }

    out.push_str("TRANS\n");
    let mut clauses: Vec<String> = acts
        .iter()
        .zip(&ens)
        .map(|(a, e)| format!("(act = {a} -> {e})"))
        .collect();
    clauses.push("(act = stall -> !any_enabled)".into());
    out.push_str(&format!("  {};\n", clauses.join("\n  & ")));

    for (i, rule) in system.rules().iter().enumerate() {
        if rule.fair {
            out.push_str(&format!("COMPASSION ({}, {})\n", ens[i], tks[i]));
        }
    }
    out
}

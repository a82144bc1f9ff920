//! Command-line front end: validate, components, graph, lts, project,
//! check (with modular-verification plans and component disabling), and
//! SMV export.
//!
//! Exit codes: 0 all properties true, 1 some property false or
//! inconclusive (or validation found problems), 2 usage errors, 3 parse
//! errors, 4 resource cap exceeded.

use clap::{Parser, Subcommand};
use pathmc_core::checker::{check, compassion_pairs, CheckResult, Witness};
use pathmc_core::components::{
    identify_components, infer_initial_state, interaction_graph, to_dot, ComponentId, ComponentMap,
    UnresolvedPolicy,
};
use pathmc_core::formula::{parse_property_file, NamedProperty};
use pathmc_core::parse::parse_pathway;
use pathmc_core::pathway::{Pathway, SpeciesId};
use pathmc_core::projection::{project, to_annotated_pw};
use pathmc_core::semantics::{BuildLtsError, Lts, System, Trace, DEFAULT_STATE_CAP};
use pathmc_core::smv::export_smv;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const STATE_CAP_ENV: &str = "PATHMC_STATE_CAP";

#[derive(Parser)]
#[command(
    name = "pathmc",
    version,
    about = "Qualitative pathway model checker: fair reaction semantics, molecular \
             components, and modular verification by projection"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a pathway file and report structural problems
    Validate { pathway: PathBuf },
    /// Print the molecular components, one `name: members` line each
    Components { pathway: PathBuf },
    /// Emit the component interaction graph
    Graph {
        pathway: PathBuf,
        /// Graphviz DOT (the only supported format)
        #[arg(long)]
        dot: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Build the reachable LTS and print `states=<n> edges=<m> deadlocks=<k>`
    Lts {
        pathway: PathBuf,
        /// Also dump the edge list (`bits <tab> reaction <tab> bits`)
        #[arg(long)]
        dump: bool,
        /// Reachable-state budget (default 10^7; env PATHMC_STATE_CAP)
        #[arg(long)]
        state_cap: Option<usize>,
    },
    /// Project the pathway onto components and print the annotated format
    Project {
        pathway: PathBuf,
        /// Component names (comma-separated or repeated)
        #[arg(long, value_delimiter = ',', required = true)]
        onto: Vec<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check ACTL- properties, optionally on a projection
    Check {
        pathway: PathBuf,
        properties: PathBuf,
        /// Check on the projection onto these components
        #[arg(long, value_delimiter = ',')]
        onto: Vec<String>,
        /// Make these components' species absent initially
        #[arg(long, value_delimiter = ',')]
        disable: Vec<String>,
        /// Drop all compassion constraints
        #[arg(long)]
        no_fairness: bool,
        /// Modular plan file: `property: comp, comp` lines
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        state_cap: Option<usize>,
    },
    /// Emit an SMV module for the (possibly projected) model
    ExportSmv {
        pathway: PathBuf,
        #[arg(long, value_delimiter = ',')]
        onto: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        disable: Vec<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
    fn parse(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
    fn resource(message: impl Into<String>) -> Failure {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_pathway(path: &Path) -> Result<Pathway, Failure> {
    let text = read(path)?;
    parse_pathway(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn components_of(p: &Pathway) -> Result<ComponentMap, Failure> {
    identify_components(p).map_err(|e| Failure::parse(e.to_string()))
}

fn resolve_components(
    map: &ComponentMap,
    names: &[String],
) -> Result<BTreeSet<ComponentId>, Failure> {
    names
        .iter()
        .map(|n| {
            map.by_name(n)
                .ok_or_else(|| Failure::usage(format!("unknown component `{n}`")))
        })
        .collect()
}

/// Initial present-set: the declared `init:` lines, or the two-phase
/// heuristic (with a warning) when the file declares none.
fn resolve_initial(p: &Pathway) -> Result<BTreeSet<SpeciesId>, Failure> {
    if !p.initial().is_empty() {
        return Ok(p.initial().present());
    }
    let map = components_of(p)?;
    let inferred = infer_initial_state(p, &map, &BTreeSet::new(), UnresolvedPolicy::Lenient)
        .map_err(|e| Failure::parse(e.to_string()))?;
    let present = inferred.spec.present();
    eprintln!(
        "warning: no init: lines; inferred {} initially present species heuristically",
        present.len()
    );
    for c in &inferred.unresolved {
        eprintln!(
            "warning: component `{}` has only loop-produced species and starts empty \
             (add init: lines to override)",
            map.name(*c)
        );
    }
    Ok(present)
}

fn state_cap(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(STATE_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    })
    .unwrap_or(DEFAULT_STATE_CAP)
}

fn build_lts(system: &System, cap: usize) -> Result<Lts, Failure> {
    system.build_lts(cap).map_err(|e| match e {
        BuildLtsError::StateCapExceeded { .. } => Failure::resource(e.to_string()),
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Validate { pathway } => cmd_validate(&pathway),
        Cmd::Components { pathway } => cmd_components(&pathway),
        Cmd::Graph { pathway, out, .. } => cmd_graph(&pathway, out.as_ref()),
        Cmd::Lts {
            pathway,
            dump,
            state_cap: cap,
        } => cmd_lts(&pathway, dump, cap),
        Cmd::Project { pathway, onto, out } => cmd_project(&pathway, &onto, out.as_ref()),
        Cmd::Check {
            pathway,
            properties,
            onto,
            disable,
            no_fairness,
            plan,
            json,
            state_cap: cap,
        } => cmd_check(
            &pathway,
            &properties,
            &onto,
            &disable,
            no_fairness,
            plan.as_ref(),
            json,
            cap,
        ),
        Cmd::ExportSmv {
            pathway,
            onto,
            disable,
            out,
        } => cmd_export_smv(&pathway, &onto, &disable, out.as_ref()),
    }
}

fn cmd_validate(path: &Path) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    println!(
        "parsed: {} species, {} reactions, {} initially present",
        p.species_count(),
        p.reactions().len(),
        p.initial().present().len()
    );
    for s in p.unused_species() {
        println!("warning: species `{}` occurs in no reaction", p.name(s));
    }
    let violations = pathmc_core::pathway::validate_normal_form(&p);
    if violations.is_empty() {
        println!("normal form: ok");
        Ok(0)
    } else {
        println!("normal form: {} violation(s)", violations.len());
        for v in &violations {
            println!("  {v}");
        }
        Ok(1)
    }
}

fn cmd_components(path: &Path) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    let map = components_of(&p)?;
    let mut lines: Vec<String> = map
        .ids()
        .map(|c| {
            let mut members: Vec<&str> = map.members(c).iter().map(|&s| p.name(s)).collect();
            members.sort_unstable();
            format!("{}: {}", map.name(c), members.join(", "))
        })
        .collect();
    lines.sort();
    for line in lines {
        println!("{line}");
    }
    Ok(0)
}

fn cmd_graph(path: &Path, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    let map = components_of(&p)?;
    let g = interaction_graph(&p, &map);
    write_out(out, &to_dot(&g, &map))?;
    Ok(0)
}

fn cmd_lts(path: &Path, dump: bool, cap: Option<usize>) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    let initial = resolve_initial(&p)?;
    let system = System::from_pathway_with_initial(&p, &initial);
    let lts = build_lts(&system, state_cap(cap))?;
    println!("{}", lts.stats_line());
    if dump {
        print!("{}", lts.dump_edges(&system));
    }
    Ok(0)
}

fn cmd_project(path: &Path, onto: &[String], out: Option<&PathBuf>) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    let initial = resolve_initial(&p)?;
    let p = p.with_initial(pathmc_core::pathway::InitialSpec::declared(initial));
    let map = components_of(&p)?;
    let j = resolve_components(&map, onto)?;
    let apw = project(&p, &map, &j).map_err(|e| Failure::usage(e.to_string()))?;
    write_out(out, &to_annotated_pw(&apw, &p))?;
    Ok(0)
}

fn cmd_export_smv(
    path: &Path,
    onto: &[String],
    disable: &[String],
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let p = load_pathway(path)?;
    let model = Model::build(&p, onto, disable)?;
    write_out(out, &export_smv(&p, &model.system))?;
    Ok(0)
}

/// A checkable model: the (possibly disabled, possibly projected) system.
struct Model {
    system: System,
    onto: Option<Vec<String>>,
    disabled: Vec<String>,
    /// Species allowed in properties (projection scope).
    scope: Option<BTreeSet<SpeciesId>>,
}

impl Model {
    fn build(p: &Pathway, onto: &[String], disable: &[String]) -> Result<Model, Failure> {
        let mut initial = resolve_initial(p)?;
        let mut disabled = Vec::new();
        let map = if onto.is_empty() && disable.is_empty() {
            None
        } else {
            Some(components_of(p)?)
        };
        if !disable.is_empty() {
            let map = map.as_ref().unwrap();
            for c in resolve_components(map, disable)? {
                for s in map.members(c) {
                    initial.remove(s);
                }
                disabled.push(map.name(c).to_string());
            }
        }
        if onto.is_empty() {
            return Ok(Model {
                system: System::from_pathway_with_initial(p, &initial),
                onto: None,
                disabled,
                scope: None,
            });
        }
        let map = map.as_ref().unwrap();
        let j = resolve_components(map, onto)?;
        let pw = p.with_initial(pathmc_core::pathway::InitialSpec::declared(initial));
        let apw = project(&pw, map, &j).map_err(|e| Failure::usage(e.to_string()))?;
        let mut names: Vec<String> = j.iter().map(|&c| map.name(c).to_string()).collect();
        names.sort();
        Ok(Model {
            system: apw.to_system(&pw),
            onto: Some(names),
            disabled,
            scope: Some(apw.species_set()),
        })
    }

    fn is_projection(&self) -> bool {
        self.onto.is_some()
    }
}

#[derive(Serialize)]
struct Scope {
    onto: Option<Vec<String>>,
    disabled: Vec<String>,
}

#[derive(Serialize)]
struct WitnessJson {
    kind: &'static str,
    stem_states: Vec<Vec<String>>,
    stem_labels: Vec<String>,
    cycle_states: Vec<Vec<String>>,
    cycle_labels: Vec<String>,
}

#[derive(Serialize)]
struct Report {
    property: String,
    scope: Scope,
    fairness: bool,
    verdict: bool,
    conclusive_for_complete_model: bool,
    states: usize,
    time_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
}

fn trace_json(p: &Pathway, system: &System, t: &Trace) -> (Vec<Vec<String>>, Vec<String>) {
    let states = t
        .states
        .iter()
        .map(|s| {
            system
                .state_names(p, s)
                .iter()
                .map(|n| n.to_string())
                .collect()
        })
        .collect();
    let labels = t
        .labels
        .iter()
        .map(|&r| system.rules()[r].label.clone())
        .collect();
    (states, labels)
}

fn witness_json(p: &Pathway, system: &System, w: &Witness) -> WitnessJson {
    let empty = (Vec::new(), Vec::new());
    let (kind, stem, cycle) = match w {
        Witness::State(t) => ("state", trace_json(p, system, t), empty),
        Witness::FinitePath(t) => ("finite-path", trace_json(p, system, t), empty),
        Witness::Prefix(t) => ("prefix", trace_json(p, system, t), empty),
        Witness::Lasso { stem, cycle } => (
            "lasso",
            trace_json(p, system, stem),
            trace_json(p, system, cycle),
        ),
    };
    WitnessJson {
        kind,
        stem_states: stem.0,
        stem_labels: stem.1,
        cycle_states: cycle.0,
        cycle_labels: cycle.1,
    }
}

fn print_trace(p: &Pathway, system: &System, t: &Trace, indent: &str) {
    let fmt_state =
        |s: &pathmc_core::bits::BitSet| format!("{{{}}}", system.state_names(p, s).join(","));
    let mut line = String::from(indent);
    line.push_str(&fmt_state(&t.states[0]));
    for (i, &r) in t.labels.iter().enumerate() {
        line.push_str(&format!(
            " -{}-> {}",
            system.rules()[r].label,
            fmt_state(&t.states[i + 1])
        ));
    }
    println!("{line}");
}

fn print_witness(p: &Pathway, system: &System, w: &Witness) {
    match w {
        Witness::State(t) => {
            print_trace(p, system, t, "  violated at state: ");
        }
        Witness::FinitePath(t) => {
            println!("  counterexample (finite maximal path):");
            print_trace(p, system, t, "    ");
        }
        Witness::Prefix(t) => {
            println!("  counterexample (violation unavoidable after prefix):");
            print_trace(p, system, t, "    ");
        }
        Witness::Lasso { stem, cycle } => {
            println!("  counterexample (fair lasso):");
            print_trace(p, system, stem, "    stem:  ");
            print_trace(p, system, cycle, "    cycle: ");
        }
    }
}

/// A `(property, component set)` plan plus an optional combination note.
struct Plan {
    note: Option<String>,
    entries: Vec<(String, Vec<String>)>,
}

fn parse_plan(text: &str) -> Result<Plan, Failure> {
    let mut note = None;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("note ") {
            note = Some(rest.trim().to_string());
            continue;
        }
        let Some((name, comps)) = content.split_once(':') else {
            return Err(Failure::parse(format!(
                "plan line {line_no}: expected `property: comp, comp` or `note <text>`"
            )));
        };
        let comps: Vec<String> = comps
            .split(',')
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect();
        if comps.is_empty() {
            return Err(Failure::parse(format!(
                "plan line {line_no}: no components listed"
            )));
        }
        entries.push((name.trim().to_string(), comps));
    }
    Ok(Plan { note, entries })
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    pathway_path: &Path,
    properties_path: &Path,
    onto: &[String],
    disable: &[String],
    no_fairness: bool,
    plan: Option<&PathBuf>,
    json: bool,
    cap: Option<usize>,
) -> Result<u8, Failure> {
    if plan.is_some() && !onto.is_empty() {
        return Err(Failure::usage("--plan and --onto are mutually exclusive"));
    }
    let p = load_pathway(pathway_path)?;
    let props_text = read(properties_path)?;
    let props = parse_property_file(&props_text, &p)
        .map_err(|e| Failure::parse(format!("{}: {e}", properties_path.display())))?;
    let cap = state_cap(cap);

    // (property, scope) pairs to run, grouped by scope to share LTS builds
    let runs: Vec<(String, Vec<String>)> = match plan {
        None => props
            .iter()
            .map(|prop| (prop.name.clone(), onto.to_vec()))
            .collect(),
        Some(path) => {
            let plan = parse_plan(&read(path)?)?;
            if let Some(note) = &plan.note {
                if !json {
                    println!("plan note: {note}");
                }
            }
            for (name, _) in &plan.entries {
                if !props.iter().any(|prop| &prop.name == name) {
                    return Err(Failure::usage(format!(
                        "plan references unknown property `{name}`"
                    )));
                }
            }
            plan.entries
        }
    };

    // one model build per distinct scope, shared across its properties
    let mut cache: BTreeMap<Vec<String>, (Model, Lts, Vec<pathmc_core::checker::CompassionPair>)> =
        BTreeMap::new();
    let mut reports = Vec::new();
    let mut all_conclusively_true = true;
    for (name, scope) in &runs {
        let prop: &NamedProperty = props.iter().find(|prop| &prop.name == name).unwrap();
        let mut scope_names = scope.clone();
        scope_names.sort();
        scope_names.dedup();
        if !cache.contains_key(&scope_names) {
            let model = Model::build(&p, &scope_names, disable)?;
            let lts = build_lts(&model.system, cap)?;
            let pairs = if no_fairness {
                Vec::new()
            } else {
                compassion_pairs(&model.system)
            };
            cache.insert(scope_names.clone(), (model, lts, pairs));
        }
        let (model, lts, pairs) = cache.get(&scope_names).unwrap();
        {
            // reject properties outside the projection's species scope
            if let Some(scope) = &model.scope {
                for sp in prop.formula.species() {
                    if !scope.contains(&sp) {
                        return Err(Failure::parse(format!(
                            "property `{}` mentions species `{}` outside the projection",
                            prop.name,
                            p.name(sp)
                        )));
                    }
                }
            }
            let started = Instant::now();
            let result: CheckResult = check(&p, &model.system, lts, pairs, &prop.formula)
                .map_err(|e| Failure::parse(e.to_string()))?;
            let time_ms = started.elapsed().as_millis();
            let conclusive = result.verdict || !model.is_projection();
            if !(result.verdict && conclusive) {
                all_conclusively_true = false;
            }
            if json {
                reports.push(Report {
                    property: prop.name.clone(),
                    scope: Scope {
                        onto: model.onto.clone(),
                        disabled: model.disabled.clone(),
                    },
                    fairness: !no_fairness,
                    verdict: result.verdict,
                    conclusive_for_complete_model: conclusive,
                    states: result.stats.states,
                    time_ms,
                    witness: result
                        .witness
                        .as_ref()
                        .map(|w| witness_json(&p, &model.system, w)),
                });
            } else {
                let verdict = if result.verdict { "TRUE" } else { "FALSE" };
                let note = match (model.is_projection(), result.verdict) {
                    (true, true) => " (holds in complete model)",
                    (true, false) => " (inconclusive for complete model)",
                    _ => "",
                };
                let scope_note = model
                    .onto
                    .as_ref()
                    .map(|names| format!(" [onto {}]", names.join(",")))
                    .unwrap_or_default();
                println!("{}: {verdict}{note}{scope_note}", prop.name);
                if let Some(w) = &result.witness {
                    print_witness(&p, &model.system, w);
                }
            }
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&reports).unwrap());
    }
    Ok(if all_conclusively_true { 0 } else { 1 })
}

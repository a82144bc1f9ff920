//! Abstract pathways: projection of a pathway onto a set of components.
//!
//! The species of the abstract model are exactly the members of the chosen
//! components. Reactions that involve only those components are kept as-is
//! (`PR`). Reactions that span the boundary contribute two projected entries
//! (`AR`): a *productive* variant that assumes the invisible species are
//! configured so the reaction can occur, and a *stutter* variant (a
//! self-loop) for the opposite assumption. Reactions entirely outside the
//! chosen components disappear; since every species they can modify is
//! invisible, their firings project to stutters of the abstract state.
//!
//! Two deviations from the plain firing rules keep the abstraction an
//! over-approximation:
//!
//! * stutter variants carry no product-absence guard (they must be able to
//!   fire as self-loops whenever the productive variant can fire),
//! * a productive variant whose origin has products outside the projection
//!   also drops the guard: the missing product may be one of the invisible
//!   ones.
//!
//! The effect mode (consume vs. keep reactants) follows the *original*
//! reaction's catalysed status, even when all catalysts were projected away.
//!
//! Compassion pairs are attached to `PR` rules only.

use crate::bits::BitSet;
use crate::components::{ComponentError, ComponentId, ComponentMap};
use crate::pathway::{Pathway, SpeciesId};
use crate::semantics::{State, System, Trace, TransitionRule};
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

/// Species belonging to the given components.
pub fn species_of_components(
    map: &ComponentMap,
    j: &BTreeSet<ComponentId>,
) -> Result<BTreeSet<SpeciesId>, ComponentError> {
    let mut out = BTreeSet::new();
    for &c in j {
        map.check_component(c)?;
        out.extend(map.members(c).iter().copied());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Invisible species assumed configured so the origin can fire.
    Productive,
    /// Origin assumed blocked; fires as a self-loop.
    Stutter,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Productive => "productive",
            Variant::Stutter => "stutter",
        }
    }
}

/// One projected entry of a boundary reaction.
#[derive(Debug, Clone)]
pub struct AbstractReaction {
    /// Unique label within the abstract pathway.
    pub label: String,
    /// Index of the originating reaction in the source pathway.
    pub origin: usize,
    pub origin_id: String,
    /// re(R) restricted to the projection's species, order kept.
    pub reactants: Vec<SpeciesId>,
    /// pro(R) restricted for the productive variant; equals `reactants` for
    /// the stutter variant.
    pub products: Vec<SpeciesId>,
    /// cat(R) restricted.
    pub catalysts: Vec<SpeciesId>,
    pub variant: Variant,
    /// cat(R) ≠ ∅ in the original reaction.
    pub origin_catalysed: bool,
    /// The original reaction has products outside the projection.
    pub hidden_products: bool,
}

/// Set-level enabling: reactants and catalysts present; the productive
/// variant additionally requires a missing product unless the origin has
/// hidden products.
pub fn abstract_enabled(ar: &AbstractReaction, present: &BTreeSet<SpeciesId>) -> bool {
    let base = ar.reactants.iter().all(|s| present.contains(s))
        && ar.catalysts.iter().all(|s| present.contains(s));
    match ar.variant {
        Variant::Stutter => base,
        Variant::Productive => {
            base && (ar.hidden_products || !ar.products.iter().all(|s| present.contains(s)))
        }
    }
}

/// Set-level firing. Stutter variants yield the state unchanged; productive
/// variants consume their reactants iff the origin was catalysed.
pub fn abstract_step(
    ar: &AbstractReaction,
    present: &BTreeSet<SpeciesId>,
) -> Option<BTreeSet<SpeciesId>> {
    if !abstract_enabled(ar, present) {
        return None;
    }
    match ar.variant {
        Variant::Stutter => Some(present.clone()),
        Variant::Productive => {
            let mut next = present.clone();
            if ar.origin_catalysed {
                for s in &ar.reactants {
                    next.remove(s);
                }
            }
            next.extend(ar.products.iter().copied());
            Some(next)
        }
    }
}

/// The projection `(PR, AR)` of a pathway onto a component set.
#[derive(Debug, Clone)]
pub struct AbstractPathway {
    pub j: BTreeSet<ComponentId>,
    /// Species of the abstract model, sorted by id (= abstract bit order).
    pub species_j: Vec<SpeciesId>,
    /// Indices of reactions kept unchanged (all components inside `J`).
    pub pr: Vec<usize>,
    /// Projected entries of boundary reactions, two per origin.
    pub ar: Vec<AbstractReaction>,
    /// Initial present-set: concrete initial ∩ species of `J`.
    pub initial: BTreeSet<SpeciesId>,
    /// Per source reaction: does it touch `J` at all (survives projection)?
    retained: Vec<bool>,
}

pub fn project(
    p: &Pathway,
    map: &ComponentMap,
    j: &BTreeSet<ComponentId>,
) -> Result<AbstractPathway, ComponentError> {
    let species_set = species_of_components(map, j)?;
    let species_j: Vec<SpeciesId> = species_set.iter().copied().collect();
    let keep = |ids: &[SpeciesId]| -> Vec<SpeciesId> {
        ids.iter()
            .copied()
            .filter(|s| species_set.contains(s))
            .collect()
    };
    let mut pr = Vec::new();
    let mut ar = Vec::new();
    let mut retained = Vec::with_capacity(p.reactions().len());
    let mut labels: HashSet<String> = p.reactions().iter().map(|r| r.id.clone()).collect();
    let mut fresh_label = |base: String| -> String {
        let mut label = base;
        while labels.contains(&label) {
            label.push('\'');
        }
        labels.insert(label.clone());
        label
    };
    for (idx, r) in p.reactions().iter().enumerate() {
        let comps = map.components_of_reaction(r);
        let inside = comps.iter().filter(|c| j.contains(c)).count();
        retained.push(inside > 0);
        if inside == comps.len() {
            pr.push(idx);
        } else if inside > 0 {
            let reactants = keep(&r.reactants);
            let catalysts = keep(&r.catalysts);
            let products = keep(&r.products);
            let hidden_products = products.len() != r.products.len();
            ar.push(AbstractReaction {
                label: fresh_label(format!("{}-p", r.id)),
                origin: idx,
                origin_id: r.id.clone(),
                reactants: reactants.clone(),
                products,
                catalysts: catalysts.clone(),
                variant: Variant::Productive,
                origin_catalysed: r.is_catalysed(),
                hidden_products,
            });
            ar.push(AbstractReaction {
                label: fresh_label(format!("{}-s", r.id)),
                origin: idx,
                origin_id: r.id.clone(),
                products: reactants.clone(),
                reactants,
                catalysts,
                variant: Variant::Stutter,
                origin_catalysed: r.is_catalysed(),
                hidden_products,
            });
        }
    }
    let initial: BTreeSet<SpeciesId> = p
        .initial()
        .present()
        .intersection(&species_set)
        .copied()
        .collect();
    Ok(AbstractPathway {
        j: j.clone(),
        species_j,
        pr,
        ar,
        initial,
        retained,
    })
}

impl AbstractPathway {
    pub fn species_set(&self) -> BTreeSet<SpeciesId> {
        self.species_j.iter().copied().collect()
    }

    /// Does this source reaction survive projection (in `PR` or `AR`)?
    pub fn retains(&self, reaction: usize) -> bool {
        self.retained[reaction]
    }

    /// Compile to transition rules over the abstract bit space. Compassion
    /// (`fair`) is attached to `PR` rules only. Rule order follows source
    /// reaction order, with each boundary reaction contributing its
    /// productive then its stutter variant.
    pub fn to_system(&self, p: &Pathway) -> System {
        let width = self.species_j.len();
        let bit_of: std::collections::HashMap<SpeciesId, usize> = self
            .species_j
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        let to_bits = |ids: &[SpeciesId]| BitSet::from_ones(width, ids.iter().map(|s| bit_of[s]));
        let mut rules = Vec::new();
        let pr_set: BTreeSet<usize> = self.pr.iter().copied().collect();
        let mut ar_iter = self.ar.iter().peekable();
        for (idx, r) in p.reactions().iter().enumerate() {
            if pr_set.contains(&idx) {
                let mut requires = to_bits(&r.reactants);
                requires.union_with(&to_bits(&r.catalysts));
                rules.push(TransitionRule {
                    label: r.id.clone(),
                    requires,
                    block: Some(to_bits(&r.products)),
                    removes: if r.is_catalysed() {
                        to_bits(&r.reactants)
                    } else {
                        BitSet::new(width)
                    },
                    adds: to_bits(&r.products),
                    fair: true,
                    origin: idx,
                    stutter: false,
                });
            }
            while let Some(ar) = ar_iter.peek() {
                if ar.origin != idx {
                    break;
                }
                let ar = ar_iter.next().unwrap();
                let mut requires = to_bits(&ar.reactants);
                requires.union_with(&to_bits(&ar.catalysts));
                let (block, removes, adds) = match ar.variant {
                    Variant::Productive => (
                        if ar.hidden_products {
                            None
                        } else {
                            Some(to_bits(&ar.products))
                        },
                        if ar.origin_catalysed {
                            to_bits(&ar.reactants)
                        } else {
                            BitSet::new(width)
                        },
                        to_bits(&ar.products),
                    ),
                    Variant::Stutter => (None, BitSet::new(width), BitSet::new(width)),
                };
                rules.push(TransitionRule {
                    label: ar.label.clone(),
                    requires,
                    block,
                    removes,
                    adds,
                    fair: false,
                    origin: ar.origin,
                    stutter: ar.variant == Variant::Stutter,
                });
            }
        }
        let initial = BitSet::from_ones(width, self.initial.iter().map(|s| bit_of[s]));
        System::from_parts(self.species_j.clone(), rules, initial)
    }

    /// Project a concrete state onto the abstract bit space.
    pub fn project_state(&self, concrete: &System, abstract_sys: &System, s: &State) -> State {
        abstract_sys.state_of(concrete.species_in(s))
    }

    /// Path projection: drop steps of reactions that touch none of `J`'s
    /// components, project the remaining source states (and the final
    /// state). Labels are source reaction indices. A single-state path
    /// projects to a single-state path.
    pub fn project_path(&self, concrete: &System, abstract_sys: &System, path: &Trace) -> Trace {
        let mut states = Vec::new();
        let mut labels = Vec::new();
        for (i, &label) in path.labels.iter().enumerate() {
            if self.retained[label] {
                states.push(self.project_state(concrete, abstract_sys, &path.states[i]));
                labels.push(label);
            }
        }
        states.push(self.project_state(concrete, abstract_sys, path.last()));
        Trace { states, labels }
    }

    /// Infinite path projection of a finite maximal path: the projection is
    /// finite, so it is completed by an infinite stutter at its final state.
    pub fn project_path_infinite(
        &self,
        concrete: &System,
        abstract_sys: &System,
        path: &Trace,
    ) -> StutteringTrace {
        StutteringTrace {
            trace: self.project_path(concrete, abstract_sys, path),
        }
    }

    /// Projection of an ultimately periodic path `stem · cycle^∞`, where
    /// `cycle` is a closed walk starting and ending at `stem`'s final state.
    pub fn project_lasso(
        &self,
        concrete: &System,
        abstract_sys: &System,
        stem: &Trace,
        cycle: &Trace,
    ) -> ProjectedPath {
        debug_assert_eq!(stem.last(), &cycle.states[0]);
        debug_assert_eq!(cycle.states.first(), cycle.states.last());
        let projected_stem = self.project_path(concrete, abstract_sys, stem);
        if cycle.labels.iter().all(|&l| !self.retained[l]) {
            // every repeated step is invisible: the projection is finite
            return ProjectedPath::FiniteWithStutter(projected_stem);
        }
        let mut states = Vec::new();
        let mut labels = Vec::new();
        for (i, &label) in cycle.labels.iter().enumerate() {
            if self.retained[label] {
                states.push(self.project_state(concrete, abstract_sys, &cycle.states[i]));
                labels.push(label);
            }
        }
        states.push(states[0].clone());
        ProjectedPath::Lasso {
            stem: projected_stem,
            cycle: Trace { states, labels },
        }
    }
}

/// A finite trace followed by an infinite stutter at its final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StutteringTrace {
    pub trace: Trace,
}

/// Projection of an infinite (ultimately periodic) path.
#[derive(Debug, Clone)]
pub enum ProjectedPath {
    /// The projection stayed infinite: `stem · cycle^∞`, cycle closed.
    Lasso { stem: Trace, cycle: Trace },
    /// The projection is finite; `⇃∞` completes it with infinite stutter.
    FiniteWithStutter(Trace),
}

#[derive(Debug, Error)]
pub enum AnnotatedParseError {
    #[error(transparent)]
    Parse(#[from] crate::parse::ParseError),
    #[error("line {line}: bad abstract annotation: {msg}")]
    BadAnnotation { line: usize, msg: String },
}

/// Rebuild a checkable system from the annotated `.pw` text emitted for an
/// abstract pathway. Reactions without an annotation are `PR` rules (fair);
/// annotated ones reproduce the projected semantics (no compassion). Rule
/// origins point at the local reaction list.
pub fn system_from_annotated(text: &str) -> Result<System, AnnotatedParseError> {
    let pathway = crate::parse::parse_pathway(text)?;
    // collect annotations in reaction-line order
    let mut annotations: Vec<Option<Annotation>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (content, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(raw[i + 1..].trim())),
            None => (raw, None),
        };
        if content.trim().is_empty() || !content.contains("->") {
            continue;
        }
        match comment {
            Some(c) if c.starts_with("origin=") => {
                annotations.push(Some(parse_annotation(c, line_no)?))
            }
            _ => annotations.push(None),
        }
    }
    debug_assert_eq!(annotations.len(), pathway.reactions().len());
    let width = pathway.species_count();
    let base = System::from_pathway(&pathway);
    let rules = base
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let mut rule = rule.clone();
            if let Some(Some(ann)) = annotations.get(i) {
                rule.fair = false;
                match ann.variant {
                    Variant::Stutter => {
                        rule.block = None;
                        rule.removes = BitSet::new(width);
                        rule.adds = BitSet::new(width);
                        rule.stutter = true;
                    }
                    Variant::Productive => {
                        if ann.hidden_products {
                            rule.block = None;
                        }
                        if !ann.origin_catalysed {
                            rule.removes = BitSet::new(width);
                        } else {
                            rule.removes = BitSet::from_ones(
                                width,
                                pathway.reactions()[i].reactants.iter().map(|s| s.index()),
                            );
                        }
                    }
                }
            }
            rule
        })
        .collect();
    Ok(System::from_parts(
        base.species().to_vec(),
        rules,
        base.initial().clone(),
    ))
}

struct Annotation {
    variant: Variant,
    origin_catalysed: bool,
    hidden_products: bool,
}

fn parse_annotation(comment: &str, line: usize) -> Result<Annotation, AnnotatedParseError> {
    let mut variant = None;
    let mut origin_catalysed = None;
    let mut hidden_products = None;
    for field in comment.split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            return Err(AnnotatedParseError::BadAnnotation {
                line,
                msg: format!("expected key=value, got `{field}`"),
            });
        };
        match key {
            "origin" => {}
            "variant" => {
                variant = Some(match value {
                    "productive" => Variant::Productive,
                    "stutter" => Variant::Stutter,
                    other => {
                        return Err(AnnotatedParseError::BadAnnotation {
                            line,
                            msg: format!("unknown variant `{other}`"),
                        })
                    }
                })
            }
            "origin_catalysed" => origin_catalysed = value.parse().ok(),
            "hidden_products" => hidden_products = value.parse().ok(),
            other => {
                return Err(AnnotatedParseError::BadAnnotation {
                    line,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    match (variant, origin_catalysed, hidden_products) {
        (Some(variant), Some(origin_catalysed), Some(hidden_products)) => Ok(Annotation {
            variant,
            origin_catalysed,
            hidden_products,
        }),
        _ => Err(AnnotatedParseError::BadAnnotation {
            line,
            msg: "missing variant/origin_catalysed/hidden_products".into(),
        }),
    }
}

/// Annotated `.pw` text for an abstract pathway, from which the abstract
/// semantics is reconstructible (see [`system_from_annotated`]).
pub fn to_annotated_pw(apw: &AbstractPathway, p: &Pathway) -> String {
    let mut out = String::new();
    let name = |s: &SpeciesId| p.name(*s).to_string();
    let join = |ids: &[SpeciesId], sep: &str| ids.iter().map(&name).collect::<Vec<_>>().join(sep);
    let pr_set: BTreeSet<usize> = apw.pr.iter().copied().collect();
    let mut ar_iter = apw.ar.iter().peekable();
    for (idx, r) in p.reactions().iter().enumerate() {
        if pr_set.contains(&idx) {
            out.push_str(&p.reaction_line(r));
            out.push('\n');
        }
        while let Some(ar) = ar_iter.peek() {
            if ar.origin != idx {
                break;
            }
            let ar = ar_iter.next().unwrap();
            let mut line = format!(
                "{}: {} -> {}",
                ar.label,
                join(&ar.reactants, " + "),
                join(&ar.products, " + ")
            );
            if !ar.catalysts.is_empty() {
                line.push_str(&format!(" [{}]", join(&ar.catalysts, ", ")));
            }
            line.push_str(&format!(
                " # origin={} variant={} origin_catalysed={} hidden_products={}",
                ar.origin_id,
                ar.variant.as_str(),
                ar.origin_catalysed,
                ar.hidden_products
            ));
            out.push_str(&line);
            out.push('\n');
        }
    }
    if !apw.initial.is_empty() {
        let names: Vec<String> = apw.initial.iter().map(&name).collect();
        out.push_str(&format!("init: {}\n", names.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::identify_components;
    use crate::parse::parse_pathway;
    use crate::semantics::DEFAULT_STATE_CAP;

    const SHUTTLE: &str =
        "R1: A -> B [D]\nR2: B -> A [D]\nR3: A -> C [D]\nR4: C -> A [D]\ninit: A, D\n";

    fn shuttle() -> (Pathway, ComponentMap) {
        let p = parse_pathway(SHUTTLE).unwrap();
        let m = identify_components(&p).unwrap();
        (p, m)
    }

    fn names(p: &Pathway, ids: &BTreeSet<SpeciesId>) -> Vec<String> {
        ids.iter().map(|&s| p.name(s).to_string()).collect()
    }

    #[test]
    fn species_of_single_component() {
        let (p, m) = shuttle();
        let d = BTreeSet::from([m.by_name("D").unwrap()]);
        let sp = species_of_components(&m, &d).unwrap();
        assert_eq!(names(&p, &sp), vec!["D"]);
    }

    #[test]
    fn species_of_all_components_is_everything() {
        let (p, m) = shuttle();
        let all: BTreeSet<ComponentId> = m.ids().collect();
        let sp = species_of_components(&m, &all).unwrap();
        assert_eq!(sp.len(), p.species_count());
    }

    #[test]
    fn identity_projection_keeps_everything() {
        let (p, m) = shuttle();
        let all: BTreeSet<ComponentId> = m.ids().collect();
        let apw = project(&p, &m, &all).unwrap();
        assert_eq!(apw.pr, vec![0, 1, 2, 3]);
        assert!(apw.ar.is_empty());
        assert_eq!(names(&p, &apw.initial), vec!["A", "D"]);
    }

    #[test]
    fn empty_projection_is_empty() {
        let (p, m) = shuttle();
        let apw = project(&p, &m, &BTreeSet::new()).unwrap();
        assert!(apw.pr.is_empty() && apw.ar.is_empty() && apw.species_j.is_empty());
    }

    #[test]
    fn boundary_reactions_give_two_entries_each() {
        let (p, m) = shuttle();
        let j = BTreeSet::from([m.by_name("A").unwrap()]);
        let apw = project(&p, &m, &j).unwrap();
        assert!(apw.pr.is_empty());
        assert_eq!(apw.ar.len(), 8);
        assert_eq!(names(&p, &apw.species_set()), vec!["A", "B", "C"]);
        assert_eq!(names(&p, &apw.initial), vec!["A"]);

        let prod = &apw.ar[0];
        assert_eq!(prod.label, "R1-p");
        assert_eq!(prod.variant, Variant::Productive);
        assert!(prod.origin_catalysed);
        assert!(!prod.hidden_products);
        assert_eq!(prod.reactants, vec![p.species_by_name("A").unwrap()]);
        assert_eq!(prod.products, vec![p.species_by_name("B").unwrap()]);
        assert!(prod.catalysts.is_empty(), "catalyst D is outside J");

        let stut = &apw.ar[1];
        assert_eq!(stut.variant, Variant::Stutter);
        assert_eq!(stut.products, stut.reactants);
    }

    #[test]
    fn stutter_is_a_self_loop() {
        // synthetic entry with the catalyst kept visible
        let p = parse_pathway("R1: A -> B [D]\ninit: A, D\n").unwrap();
        let a = p.species_by_name("A").unwrap();
        let d = p.species_by_name("D").unwrap();
        let ar = AbstractReaction {
            label: "R1-s".into(),
            origin: 0,
            origin_id: "R1".into(),
            reactants: vec![a],
            products: vec![a],
            catalysts: vec![d],
            variant: Variant::Stutter,
            origin_catalysed: true,
            hidden_products: false,
        };
        let s = BTreeSet::from([a, d]);
        assert_eq!(abstract_step(&ar, &s), Some(s.clone()));
    }

    #[test]
    fn productive_consumes_even_without_visible_catalysts() {
        let p = parse_pathway("R1: A -> B [D]\ninit: A, D\n").unwrap();
        let a = p.species_by_name("A").unwrap();
        let b = p.species_by_name("B").unwrap();
        let ar = AbstractReaction {
            label: "R1-p".into(),
            origin: 0,
            origin_id: "R1".into(),
            reactants: vec![a],
            products: vec![b],
            catalysts: vec![],
            variant: Variant::Productive,
            origin_catalysed: true,
            hidden_products: false,
        };
        let next = abstract_step(&ar, &BTreeSet::from([a])).unwrap();
        assert_eq!(next, BTreeSet::from([b]));
    }

    #[test]
    fn productive_blocked_when_all_products_present() {
        let p = parse_pathway("R1: A -> B [D]\ninit: A, D\n").unwrap();
        let a = p.species_by_name("A").unwrap();
        let b = p.species_by_name("B").unwrap();
        let mut ar = AbstractReaction {
            label: "R1-p".into(),
            origin: 0,
            origin_id: "R1".into(),
            reactants: vec![a],
            products: vec![b],
            catalysts: vec![],
            variant: Variant::Productive,
            origin_catalysed: true,
            hidden_products: false,
        };
        assert_eq!(abstract_step(&ar, &BTreeSet::from([a, b])), None);
        // with hidden products the guard is dropped
        ar.hidden_products = true;
        assert!(abstract_step(&ar, &BTreeSet::from([a, b])).is_some());
    }

    #[test]
    fn abstract_lts_of_shuttle_projection() {
        let (p, m) = shuttle();
        let j = BTreeSet::from([m.by_name("A").unwrap()]);
        let apw = project(&p, &m, &j).unwrap();
        let sys = apw.to_system(&p);
        assert!(sys.rules().iter().all(|r| !r.fair));
        let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(lts.state_count(), 3);
        assert_eq!(lts.edge_count(), 8);
        assert!(lts.deadlocks().is_empty());
        // initial {A} has two stutter self-loops (one per A-consuming origin)
        let self_loops = lts
            .edges_from(0)
            .iter()
            .filter(|e| e.target as usize == 0)
            .count();
        assert_eq!(self_loops, 2);
    }

    #[test]
    fn path_projection_clauses() {
        let (p, m) = shuttle();
        let j = BTreeSet::from([m.by_name("A").unwrap()]);
        let apw = project(&p, &m, &j).unwrap();
        let csys = System::from_pathway(&p);
        let asys = apw.to_system(&p);

        // single-state path projects to a single-state path
        let eps = Trace::single(csys.initial().clone());
        let proj = apw.project_path(&csys, &asys, &eps);
        assert_eq!(proj.states.len(), 1);
        assert_eq!(proj.states[0], *asys.initial());

        // a retained step survives with its label
        let mut path = Trace::single(csys.initial().clone());
        let next = csys.step(csys.initial(), 0).unwrap();
        path.push(0, next);
        let proj = apw.project_path(&csys, &asys, &path);
        assert_eq!(proj.labels, vec![0]);
        assert_eq!(proj.states.len(), 2);

        // the infinite projection appends a stutter marker
        let inf = apw.project_path_infinite(&csys, &asys, &path);
        assert_eq!(inf.trace, proj);
    }

    #[test]
    fn dropped_steps_vanish() {
        // Rd is entirely outside J={comp of a}
        let p = parse_pathway("R1: a -> b [x]\nRd: w -> x\ninit: a, w\n").unwrap();
        let m = identify_components(&p).unwrap();
        let j = BTreeSet::from([m.component_of(p.species_by_name("a").unwrap())]);
        let apw = project(&p, &m, &j).unwrap();
        let csys = System::from_pathway(&p);
        let asys = apw.to_system(&p);

        let rd = csys.rule_by_label("Rd").unwrap();
        let mut path = Trace::single(csys.initial().clone());
        let next = csys.step(csys.initial(), rd).unwrap();
        path.push(rd, next);
        let proj = apw.project_path(&csys, &asys, &path);
        assert!(proj.labels.is_empty());
        assert_eq!(proj.states.len(), 1);
        assert_eq!(proj.states[0], *asys.initial());
    }

    #[test]
    fn projection_onto_reaction_less_component_is_inert() {
        // a component whose species occur in no reaction projects to a
        // rule-free system over exactly that class
        let p = parse_pathway("R1: A -> B [D]\ninit: A, D, X\n").unwrap();
        let m = identify_components(&p).unwrap();
        let x = p.species_by_name("X").unwrap();
        let j = BTreeSet::from([m.component_of(x)]);
        let apw = project(&p, &m, &j).unwrap();
        assert!(apw.pr.is_empty() && apw.ar.is_empty());
        assert_eq!(apw.species_j, vec![x]);
        assert_eq!(apw.initial, BTreeSet::from([x]));
        let lts = apw.to_system(&p).build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!((lts.state_count(), lts.edge_count()), (1, 0));
    }

    #[test]
    fn surviving_cycle_projects_to_a_lasso() {
        let (p, m) = shuttle();
        let j = BTreeSet::from([m.by_name("A").unwrap()]);
        let apw = project(&p, &m, &j).unwrap();
        let csys = System::from_pathway(&p);
        let asys = apw.to_system(&p);
        // stem: empty; cycle: {A,D} -R1-> {B,D} -R2-> {A,D}, all retained
        let s0 = csys.initial().clone();
        let s1 = csys.step(&s0, 0).unwrap();
        let stem = Trace::single(s0.clone());
        let cycle = Trace {
            states: vec![s0.clone(), s1, s0],
            labels: vec![0, 1],
        };
        match apw.project_lasso(&csys, &asys, &stem, &cycle) {
            ProjectedPath::Lasso { stem, cycle } => {
                // identical to the plain projection of the repeated part
                assert_eq!(stem.states.len(), 1);
                assert_eq!(cycle.labels, vec![0, 1]);
                assert_eq!(cycle.states.first(), cycle.states.last());
            }
            other => panic!("expected a surviving lasso, got {other:?}"),
        }
        // a cycle of dropped steps collapses to the stutter completion
        let p2 = parse_pathway("R1: a -> b [x]\nRf: w -> v [k]\nRb: v -> w [k]\ninit: a, w, k\n")
            .unwrap();
        let m2 = identify_components(&p2).unwrap();
        let j2 = BTreeSet::from([m2.component_of(p2.species_by_name("a").unwrap())]);
        let apw2 = project(&p2, &m2, &j2).unwrap();
        let csys2 = System::from_pathway(&p2);
        let asys2 = apw2.to_system(&p2);
        let t0 = csys2.initial().clone();
        let rf = csys2.rule_by_label("Rf").unwrap();
        let rb = csys2.rule_by_label("Rb").unwrap();
        let t1 = csys2.step(&t0, rf).unwrap();
        let stem2 = Trace::single(t0.clone());
        let cycle2 = Trace {
            states: vec![t0, t1, stem2.states[0].clone()],
            labels: vec![rf, rb],
        };
        match apw2.project_lasso(&csys2, &asys2, &stem2, &cycle2) {
            ProjectedPath::FiniteWithStutter(trace) => {
                assert_eq!(trace.states.len(), 1);
                assert_eq!(trace.states[0], *asys2.initial());
            }
            other => panic!("expected finite-with-stutter, got {other:?}"),
        }
    }

    #[test]
    fn annotated_roundtrip_reconstructs_semantics() {
        let (p, m) = shuttle();
        let j = BTreeSet::from([m.by_name("A").unwrap()]);
        let apw = project(&p, &m, &j).unwrap();
        let text = to_annotated_pw(&apw, &p);
        assert!(text.contains("variant=stutter"));
        let direct = apw.to_system(&p);
        let reloaded = system_from_annotated(&text).unwrap();
        assert_eq!(direct.rules().len(), reloaded.rules().len());
        let a = direct.build_lts(DEFAULT_STATE_CAP).unwrap();
        let b = reloaded.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(a.state_count(), b.state_count());
        assert_eq!(a.edge_count(), b.edge_count());
        for (ra, rb) in direct.rules().iter().zip(reloaded.rules()) {
            assert_eq!(ra.fair, rb.fair);
            assert_eq!(ra.stutter, rb.stutter);
        }
    }

    #[test]
    fn annotated_roundtrip_keeps_hidden_products_and_effect_mode() {
        // R1 spans two components; projecting onto comp(a) hides product n.
        // Rc is uncatalysed, so its productive variant must not consume.
        let p =
            parse_pathway("R1: a + m -> b + n [k]\nRc: b + m -> a + n\ninit: a, m, k\n").unwrap();
        let m = identify_components(&p).unwrap();
        let j = BTreeSet::from([m.component_of(p.species_by_name("a").unwrap())]);
        let apw = project(&p, &m, &j).unwrap();
        assert!(apw.ar.iter().all(|ar| ar.hidden_products));
        assert!(apw.ar.iter().any(|ar| !ar.origin_catalysed));
        let text = to_annotated_pw(&apw, &p);
        assert!(text.contains("hidden_products=true"));
        let direct = apw.to_system(&p);
        let reloaded = system_from_annotated(&text).unwrap();
        let a = direct.build_lts(DEFAULT_STATE_CAP).unwrap();
        let b = reloaded.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(a.state_count(), b.state_count());
        assert_eq!(a.edge_count(), b.edge_count());
        for (ra, rb) in direct.rules().iter().zip(reloaded.rules()) {
            assert_eq!(ra.block.is_none(), rb.block.is_none());
            assert_eq!(ra.removes.is_empty(), rb.removes.is_empty());
        }
    }
}

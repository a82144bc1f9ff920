//! LTS semantics: state representation, rule firing, reachable-graph
//! construction.
//!
//! A state is a bit set over a system's species. A catalysed reaction
//! consumes its reactants, an uncatalysed one only adds its products; both
//! are blocked when every product is already present, so no concrete rule
//! ever produces a self-loop. Only the fragment reachable from the initial
//! state is constructed.

use crate::bits::BitSet;
use crate::pathway::{Pathway, Reaction, SpeciesId};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

pub type State = BitSet;

/// A transition rule compiled to the bit space of its [`System`].
#[derive(Debug, Clone)]
pub struct TransitionRule {
    /// Edge label; unique within a system.
    pub label: String,
    /// Reactants and catalysts: all must be present.
    pub requires: BitSet,
    /// Product set whose joint presence blocks the rule; `None` = no guard
    /// (stutter rules and projected rules with hidden products).
    pub block: Option<BitSet>,
    /// Bits cleared on firing.
    pub removes: BitSet,
    /// Bits set on firing.
    pub adds: BitSet,
    /// Whether the rule carries a compassion pair.
    pub fair: bool,
    /// Index of the originating reaction in the source pathway.
    pub origin: usize,
    /// Self-loop rule introduced by projection.
    pub stutter: bool,
}

/// A pathway (or abstract pathway) compiled to bit-level rules.
#[derive(Debug, Clone)]
pub struct System {
    species: Vec<SpeciesId>,
    bit_of: HashMap<SpeciesId, usize>,
    rules: Vec<TransitionRule>,
    initial: State,
}

#[derive(Debug, Error)]
pub enum BuildLtsError {
    #[error("state budget exceeded: more than {cap} reachable states")]
    StateCapExceeded { cap: usize },
}

/// Default reachable-state budget for [`System::build_lts`].
pub const DEFAULT_STATE_CAP: usize = 10_000_000;

impl System {
    /// Concrete semantics of a pathway: one fair rule per reaction, species
    /// bit order = species table order, initial state from the pathway.
    pub fn from_pathway(p: &Pathway) -> System {
        Self::from_pathway_with_initial(p, &p.initial().present())
    }

    /// Same, with an explicit initial present-set (used for component
    /// disabling and inferred initial states).
    pub fn from_pathway_with_initial(p: &Pathway, present: &BTreeSet<SpeciesId>) -> System {
        let species: Vec<SpeciesId> = p.species().iter().map(|s| s.id).collect();
        let bit_of: HashMap<SpeciesId, usize> =
            species.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let width = species.len();
        let to_bits = |ids: &[SpeciesId]| BitSet::from_ones(width, ids.iter().map(|s| bit_of[s]));
        let rules = p
            .reactions()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut requires = to_bits(&r.reactants);
                requires.union_with(&to_bits(&r.catalysts));
                TransitionRule {
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
                    origin: i,
                    stutter: false,
                }
            })
            .collect();
        let initial = BitSet::from_ones(width, present.iter().map(|s| bit_of[s]));
        System {
            species,
            bit_of,
            rules,
            initial,
        }
    }

    /// Assemble a system from parts (used by projection).
    pub(crate) fn from_parts(
        species: Vec<SpeciesId>,
        rules: Vec<TransitionRule>,
        initial: State,
    ) -> System {
        let bit_of = species.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        System {
            species,
            bit_of,
            rules,
            initial,
        }
    }

    pub fn width(&self) -> usize {
        self.species.len()
    }

    /// Species ids in bit order.
    pub fn species(&self) -> &[SpeciesId] {
        &self.species
    }

    pub fn rules(&self) -> &[TransitionRule] {
        &self.rules
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn bit_of(&self, s: SpeciesId) -> Option<usize> {
        self.bit_of.get(&s).copied()
    }

    pub fn rule_by_label(&self, label: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.label == label)
    }

    /// State from globally-identified species; ids outside this system's
    /// species set are ignored.
    pub fn state_of<I: IntoIterator<Item = SpeciesId>>(&self, present: I) -> State {
        BitSet::from_ones(
            self.width(),
            present.into_iter().filter_map(|s| self.bit_of(s)),
        )
    }

    /// Species present in a state, as globally-identified ids.
    pub fn species_in(&self, s: &State) -> Vec<SpeciesId> {
        s.ones().map(|i| self.species[i]).collect()
    }

    /// Names of the species present in a state, in bit order.
    pub fn state_names<'a>(&self, p: &'a Pathway, s: &State) -> Vec<&'a str> {
        s.ones().map(|i| p.name(self.species[i])).collect()
    }

    /// All reactants and catalysts present, and not all products present
    /// (vacuously true when the rule has no product guard).
    pub fn enabled(&self, s: &State, rule: usize) -> bool {
        let r = &self.rules[rule];
        s.contains_all(&r.requires)
            && match &r.block {
                Some(products) => !s.contains_all(products),
                None => true,
            }
    }

    /// Successor state, or `None` when the rule is not enabled.
    pub fn step(&self, s: &State, rule: usize) -> Option<State> {
        if !self.enabled(s, rule) {
            return None;
        }
        let r = &self.rules[rule];
        let mut next = s.clone();
        next.subtract(&r.removes);
        next.union_with(&r.adds);
        Some(next)
    }

    /// Breadth-first closure of `step` over all rules from the initial
    /// state. State 0 is the initial state; successor enumeration follows
    /// rule order, so state numbering is deterministic.
    pub fn build_lts(&self, cap: usize) -> Result<Lts, BuildLtsError> {
        let mut states = vec![self.initial.clone()];
        let mut index = HashMap::new();
        index.insert(self.initial.clone(), 0usize);
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut frontier = 0usize;
        while frontier < states.len() {
            let src = states[frontier].clone();
            let mut out = Vec::new();
            for rule in 0..self.rules.len() {
                if let Some(next) = self.step(&src, rule) {
                    let target = match index.get(&next) {
                        Some(&t) => t,
                        None => {
                            if states.len() >= cap {
                                return Err(BuildLtsError::StateCapExceeded { cap });
                            }
                            let t = states.len();
                            states.push(next.clone());
                            index.insert(next, t);
                            t
                        }
                    };
                    out.push(Edge {
                        rule: rule as u32,
                        target: target as u32,
                    });
                }
            }
            edges.push(out);
            frontier += 1;
        }
        Ok(Lts {
            states,
            edges,
            index,
        })
    }
}

/// A labelled transition out of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub rule: u32,
    pub target: u32,
}

/// Explicit reachable transition graph. State 0 is the initial state.
#[derive(Debug, Clone)]
pub struct Lts {
    states: Vec<State>,
    edges: Vec<Vec<Edge>>,
    index: HashMap<State, usize>,
}

impl Lts {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edges_from(&self, s: usize) -> &[Edge] {
        &self.edges[s]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state_index(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// No outgoing edge at all (self-loops count as outgoing).
    pub fn is_deadlock(&self, s: usize) -> bool {
        self.edges[s].is_empty()
    }

    pub fn deadlocks(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&s| self.is_deadlock(s))
            .collect()
    }

    /// Incoming adjacency: for each state, the `(rule, source)` pairs.
    pub fn reverse_edges(&self) -> Vec<Vec<(u32, u32)>> {
        let mut rev: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.states.len()];
        for (src, out) in self.edges.iter().enumerate() {
            for e in out {
                rev[e.target as usize].push((e.rule, src as u32));
            }
        }
        rev
    }

    /// One-line machine-parseable summary.
    pub fn stats_line(&self) -> String {
        format!(
            "states={} edges={} deadlocks={}",
            self.state_count(),
            self.edge_count(),
            self.deadlocks().len()
        )
    }

    /// Edge list dump, one `bits(source) <tab> label <tab> bits(target)`
    /// line per edge; bit strings print species 0 first (most significant
    /// species last).
    pub fn dump_edges(&self, system: &System) -> String {
        let mut out = String::new();
        for (src, elist) in self.edges.iter().enumerate() {
            for e in elist {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    self.states[src].bitstring(),
                    system.rules()[e.rule as usize].label,
                    self.states[e.target as usize].bitstring()
                ));
            }
        }
        out
    }
}

/// A finite path: `states[i] --labels[i]--> states[i+1]`. A single-state
/// path (no steps) is the empty path from that state. Label meaning is
/// caller-defined (rule index or reaction index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<State>,
    pub labels: Vec<usize>,
}

impl Trace {
    pub fn single(s: State) -> Trace {
        Trace {
            states: vec![s],
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, label: usize, state: State) {
        self.labels.push(label);
        self.states.push(state);
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trace has at least one state")
    }

    pub fn step_count(&self) -> usize {
        self.labels.len()
    }
}

/// Convenience wrapper around [`Reaction`]-level set semantics, used by
/// tests as a readable reference for the compiled rules.
pub fn reaction_enabled(r: &Reaction, present: &BTreeSet<SpeciesId>) -> bool {
    r.reactants.iter().all(|s| present.contains(s))
        && r.catalysts.iter().all(|s| present.contains(s))
        && !r.products.iter().all(|s| present.contains(s))
}

/// Set-level firing: consuming when catalysed, additive otherwise.
pub fn reaction_step(r: &Reaction, present: &BTreeSet<SpeciesId>) -> Option<BTreeSet<SpeciesId>> {
    if !reaction_enabled(r, present) {
        return None;
    }
    let mut next = present.clone();
    if r.is_catalysed() {
        for s in &r.reactants {
            next.remove(s);
        }
    }
    next.extend(r.products.iter().copied());
    Some(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pathway;

    const SHUTTLE: &str =
        "R1: A -> B [D]\nR2: B -> A [D]\nR3: A -> C [D]\nR4: C -> A [D]\ninit: A, D\n";

    fn state(sys: &System, p: &Pathway, names: &[&str]) -> State {
        sys.state_of(names.iter().map(|n| p.species_by_name(n).unwrap()))
    }

    #[test]
    fn enabled_clauses() {
        let p = parse_pathway(SHUTTLE).unwrap();
        let sys = System::from_pathway(&p);
        let r1 = sys.rule_by_label("R1").unwrap();
        assert!(sys.enabled(&state(&sys, &p, &["A", "D"]), r1));
        // product already present
        assert!(!sys.enabled(&state(&sys, &p, &["A", "B", "D"]), r1));
        // catalyst absent
        assert!(!sys.enabled(&state(&sys, &p, &["A"]), r1));
    }

    #[test]
    fn step_consumes_under_catalysis() {
        let p = parse_pathway(SHUTTLE).unwrap();
        let sys = System::from_pathway(&p);
        let r1 = sys.rule_by_label("R1").unwrap();
        let next = sys.step(&state(&sys, &p, &["A", "D"]), r1).unwrap();
        assert_eq!(next, state(&sys, &p, &["B", "D"]));

        let r2 = sys.rule_by_label("R2").unwrap();
        let back = sys.step(&state(&sys, &p, &["B", "D"]), r2).unwrap();
        assert_eq!(back, state(&sys, &p, &["A", "D"]));
    }

    #[test]
    fn step_keeps_reactants_without_catalysts() {
        let p = parse_pathway("R1: A -> B\ninit: A\n").unwrap();
        let sys = System::from_pathway(&p);
        let next = sys.step(&state(&sys, &p, &["A"]), 0).unwrap();
        assert_eq!(next, state(&sys, &p, &["A", "B"]));
    }

    #[test]
    fn step_undefined_when_disabled() {
        let p = parse_pathway(SHUTTLE).unwrap();
        let sys = System::from_pathway(&p);
        let r1 = sys.rule_by_label("R1").unwrap();
        assert!(sys.step(&state(&sys, &p, &["B", "D"]), r1).is_none());
    }

    /// Reference closure over all subsets, with set-level semantics.
    fn brute_force_states(p: &Pathway) -> std::collections::BTreeSet<Vec<String>> {
        let init: BTreeSet<SpeciesId> = p.initial().present();
        let mut seen = vec![init.clone()];
        let mut frontier = vec![init];
        while let Some(s) = frontier.pop() {
            for r in p.reactions() {
                if let Some(next) = reaction_step(r, &s) {
                    if !seen.contains(&next) {
                        seen.push(next.clone());
                        frontier.push(next);
                    }
                }
            }
        }
        seen.into_iter()
            .map(|s| s.iter().map(|&id| p.name(id).to_string()).collect())
            .collect()
    }

    #[test]
    fn shuttle_reachable_graph() {
        let p = parse_pathway(SHUTTLE).unwrap();
        let sys = System::from_pathway(&p);
        let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(lts.state_count(), 3);
        assert_eq!(lts.edge_count(), 4);
        assert!(lts.deadlocks().is_empty());
        assert_eq!(lts.stats_line(), "states=3 edges=4 deadlocks=0");

        // cross-check against the subset-level reference closure
        let expected = brute_force_states(&p);
        let got: std::collections::BTreeSet<Vec<String>> = lts
            .states()
            .iter()
            .map(|s| {
                sys.state_names(&p, s)
                    .iter()
                    .map(|n| n.to_string())
                    .collect()
            })
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_reaction_set_is_one_deadlock() {
        let p = parse_pathway("init: A\n").unwrap();
        let sys = System::from_pathway(&p);
        let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(lts.state_count(), 1);
        assert_eq!(lts.edge_count(), 0);
        assert_eq!(lts.deadlocks(), vec![0]);
    }

    #[test]
    fn uncatalysed_growth_reaches_deadlock() {
        let p = parse_pathway("R1: A -> B\ninit: A\n").unwrap();
        let sys = System::from_pathway(&p);
        let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(lts.state_count(), 2);
        let ab = lts
            .state_index(&state(&sys, &p, &["A", "B"]))
            .expect("state {A,B} reachable");
        assert_eq!(lts.deadlocks(), vec![ab]);
    }

    #[test]
    fn state_cap_is_an_explicit_error() {
        let p = parse_pathway(SHUTTLE).unwrap();
        let sys = System::from_pathway(&p);
        let err = sys.build_lts(2).unwrap_err();
        assert!(matches!(err, BuildLtsError::StateCapExceeded { cap: 2 }));
    }

    #[test]
    fn dump_format() {
        let p = parse_pathway("R1: A -> B\ninit: A\n").unwrap();
        let sys = System::from_pathway(&p);
        let lts = sys.build_lts(DEFAULT_STATE_CAP).unwrap();
        assert_eq!(lts.dump_edges(&sys), "10\tR1\t11\n");
    }
}

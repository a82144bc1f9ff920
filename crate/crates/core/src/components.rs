//! Molecular components: positional reactant/product unification, the
//! initial-state heuristic, and the component interaction graph.
//!
//! Two species belong to one component when some chain of reactions
//! transforms one into the other at the same position. Requires the pathway
//! to be in normal form (equal reactant/product arity everywhere).

use crate::pathway::validate_normal_form;
use crate::pathway::{InitialSpec, NormalFormViolation, Pathway, Provenance, SpeciesId};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Index of a component within a [`ComponentMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub u32);

impl ComponentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        // path compression
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
    }
}

/// A total partition of a pathway's species into components. Component ids
/// are assigned by the smallest species id in each class, so the partition
/// and its ids do not depend on reaction order.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    comp_of: Vec<ComponentId>,
    members: Vec<Vec<SpeciesId>>,
    names: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ComponentError {
    #[error("pathway is not in normal form: {0}")]
    NotNormalForm(NormalFormViolation),
    #[error("unknown component id {0:?}")]
    UnknownComponent(ComponentId),
    #[error("species `{0}` does not occur in any reaction")]
    UnknownManualSpecies(String),
    #[error("components with only loop-produced species and no chosen initial species: {0}")]
    UnresolvedComponents(String),
}

/// Partition the species of a normal-form pathway: start from the identity
/// mapping and, for every reaction, unify the classes of reactant `r_j` and
/// product `p_j` at each position `j`.
pub fn identify_components(p: &Pathway) -> Result<ComponentMap, ComponentError> {
    if let Some(v) = validate_normal_form(p).into_iter().next() {
        return Err(ComponentError::NotNormalForm(v));
    }
    let n = p.species_count();
    let mut uf = UnionFind::new(n);
    for r in p.reactions() {
        for (rj, pj) in r.reactants.iter().zip(&r.products) {
            uf.union(rj.index(), pj.index());
        }
    }
    // canonical representative: smallest species id in the class
    let mut canon: BTreeMap<usize, Vec<SpeciesId>> = BTreeMap::new();
    for i in 0..n {
        let root = uf.find(i);
        canon.entry(root).or_default().push(SpeciesId(i as u32));
    }
    let mut classes: Vec<Vec<SpeciesId>> = canon.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    let mut comp_of = vec![ComponentId(0); n];
    for (ci, class) in classes.iter().enumerate() {
        for &s in class {
            comp_of[s.index()] = ComponentId(ci as u32);
        }
    }
    let names = classes
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|&s| p.name(s))
                .min()
                .expect("class is non-empty")
                .to_string()
        })
        .collect();
    Ok(ComponentMap {
        comp_of,
        members: classes,
        names,
    })
}

impl ComponentMap {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn component_of(&self, s: SpeciesId) -> ComponentId {
        self.comp_of[s.index()]
    }

    /// Members of a component, sorted by species id.
    pub fn members(&self, c: ComponentId) -> &[SpeciesId] {
        &self.members[c.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = ComponentId> {
        (0..self.members.len() as u32).map(ComponentId)
    }

    /// Component name: user-assigned, or the lexicographically least species
    /// name in the class by default.
    pub fn name(&self, c: ComponentId) -> &str {
        &self.names[c.index()]
    }

    pub fn set_name(&mut self, c: ComponentId, name: String) {
        self.names[c.index()] = name;
    }

    pub fn by_name(&self, name: &str) -> Option<ComponentId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| ComponentId(i as u32))
    }

    /// Components of a reaction: classes of every species it involves.
    pub fn components_of_reaction(&self, r: &crate::pathway::Reaction) -> BTreeSet<ComponentId> {
        r.species().iter().map(|&s| self.component_of(s)).collect()
    }

    pub fn check_component(&self, c: ComponentId) -> Result<(), ComponentError> {
        if c.index() < self.members.len() {
            Ok(())
        } else {
            Err(ComponentError::UnknownComponent(c))
        }
    }
}

/// How to treat components whose species are all loop-produced and for which
/// no manual choice was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnresolvedPolicy {
    /// Leave them entirely absent and report them.
    #[default]
    Lenient,
    /// Fail.
    Strict,
}

/// Result of the initial-state heuristic.
#[derive(Debug)]
pub struct InferredInitial {
    pub spec: InitialSpec,
    /// Components that had no present species after the source phase and no
    /// manual choice; under the lenient policy they start entirely absent.
    pub unresolved: Vec<ComponentId>,
}

/// Two-phase heuristic: species never produced by any reaction are present;
/// components still empty after that must get a manual choice (they consist
/// of loops). Everything else starts absent.
pub fn infer_initial_state(
    p: &Pathway,
    map: &ComponentMap,
    manual: &BTreeSet<SpeciesId>,
    policy: UnresolvedPolicy,
) -> Result<InferredInitial, ComponentError> {
    let used = p.used_species();
    for &s in manual {
        if !used.contains(&s) {
            return Err(ComponentError::UnknownManualSpecies(p.name(s).to_string()));
        }
    }
    let produced: BTreeSet<SpeciesId> = p
        .reactions()
        .iter()
        .flat_map(|r| r.products.iter().copied())
        .collect();
    let mut spec = InitialSpec::default();
    for s in p.species() {
        if !produced.contains(&s.id) {
            spec.insert(s.id, Provenance::HeuristicSource);
        }
    }
    for &s in manual {
        spec.insert(s, Provenance::HeuristicManual);
    }
    let present = spec.present();
    let unresolved: Vec<ComponentId> = map
        .ids()
        .filter(|&c| map.members(c).iter().all(|s| !present.contains(s)))
        .collect();
    if policy == UnresolvedPolicy::Strict && !unresolved.is_empty() {
        let names: Vec<&str> = unresolved.iter().map(|&c| map.name(c)).collect();
        return Err(ComponentError::UnresolvedComponents(names.join(", ")));
    }
    Ok(InferredInitial { spec, unresolved })
}

/// Component interaction graph: vertices are components; an undirected edge
/// joins components that react together (both on the reactant side), a
/// directed edge points from a catalyst's component to a reactant's
/// component. Components that co-occur only as catalysts are not connected.
#[derive(Debug, Clone)]
pub struct InteractionGraph {
    pub vertices: Vec<ComponentId>,
    /// Unordered pairs, stored with the smaller id first.
    pub undirected: BTreeSet<(ComponentId, ComponentId)>,
    pub directed: BTreeSet<(ComponentId, ComponentId)>,
}

pub fn interaction_graph(p: &Pathway, map: &ComponentMap) -> InteractionGraph {
    let mut undirected = BTreeSet::new();
    let mut directed = BTreeSet::new();
    for r in p.reactions() {
        let reactant_comps: BTreeSet<ComponentId> =
            r.reactants.iter().map(|&s| map.component_of(s)).collect();
        let catalyst_comps: BTreeSet<ComponentId> =
            r.catalysts.iter().map(|&s| map.component_of(s)).collect();
        let rc: Vec<ComponentId> = reactant_comps.iter().copied().collect();
        for (i, &a) in rc.iter().enumerate() {
            for &b in &rc[i + 1..] {
                undirected.insert((a.min(b), a.max(b)));
            }
        }
        for &c in &catalyst_comps {
            for &t in &rc {
                if c != t {
                    directed.insert((c, t));
                }
            }
        }
    }
    InteractionGraph {
        vertices: map.ids().collect(),
        undirected,
        directed,
    }
}

/// Deterministic DOT rendering; undirected edges carry `dir=both`.
pub fn to_dot(g: &InteractionGraph, map: &ComponentMap) -> String {
    let mut out = String::from("digraph {\n");
    for &v in &g.vertices {
        out.push_str(&format!("  \"{}\";\n", map.name(v)));
    }
    for &(a, b) in &g.undirected {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [dir=both];\n",
            map.name(a),
            map.name(b)
        ));
    }
    for &(a, b) in &g.directed {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", map.name(a), map.name(b)));
    }
    out.push_str("}\n");
    out
}

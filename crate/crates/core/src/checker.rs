//! Fair-path `ACTL-` checking over an explicit LTS.
//!
//! Fairness is strong fairness (compassion) with one pair per in-scope rule:
//! trigger = the rule is enabled, obligation = an edge labelled by the rule
//! is taken. Maximal paths are infinite paths or paths ending in a deadlock;
//! finite maximal paths are always fair (at a deadlock nothing is enabled,
//! so no trigger recurs).
//!
//! `A[f U g]` fails at a state iff, inside the subgraph of `¬g` states, the
//! state reaches a `¬f ∧ ¬g` state, a full-LTS deadlock, or a set of states
//! that can host a fair cycle. `A[f W g]` fails on the first condition only.
//! Fair-cycle hosting is decided by recursive SCC refinement: an SCC that
//! fails a compassion pair (trigger inside, obligation edge not) cannot host
//! the trigger states, so they are removed and the remainder re-decomposed.

use crate::bits::BitSet;
use crate::formula::{flatten, subformula_displays, Formula, Node};
use crate::pathway::Pathway;
use crate::semantics::{Lts, System, Trace};
use std::time::{Duration, Instant};
use thiserror::Error;

/// The compassion pair of one rule: trigger = `enabled(rule)`, obligation =
/// an edge labelled `rule`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompassionPair {
    pub rule: usize,
}

/// One pair per rule in the fairness scope: every rule of a concrete
/// system, the `PR` rules of a projected one.
pub fn compassion_pairs(system: &System) -> Vec<CompassionPair> {
    system
        .rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.fair)
        .map(|(rule, _)| CompassionPair { rule })
        .collect()
}

/// A strongly connected component with its direct fairness verdict.
#[derive(Debug, Clone)]
pub struct SccInfo {
    pub states: Vec<u32>,
    /// At least one edge with both endpoints inside (a trivial SCC counts
    /// when it carries a self-loop).
    pub has_internal_edge: bool,
    /// For every pair: no state of the SCC triggers it, or an internal edge
    /// carries its obligation label. `false` for SCCs without internal
    /// edges.
    pub fair: bool,
}

/// SCCs of the full graph, each flagged fair or not.
pub fn fair_sccs(system: &System, lts: &Lts, pairs: &[CompassionPair]) -> Vec<SccInfo> {
    let mut all = BitSet::new(lts.state_count());
    all.invert();
    fair_sccs_restricted(system, lts, pairs, &all)
}

/// Same on the subgraph induced by `mask`.
pub fn fair_sccs_restricted(
    system: &System,
    lts: &Lts,
    pairs: &[CompassionPair],
    mask: &BitSet,
) -> Vec<SccInfo> {
    let triggers = trigger_sets(system, lts, pairs);
    let rule_count = system.rules().len();
    sccs_in(lts, mask)
        .into_iter()
        .map(|states| classify_scc(lts, pairs, &triggers, rule_count, states))
        .collect()
}

fn classify_scc(
    lts: &Lts,
    pairs: &[CompassionPair],
    triggers: &[BitSet],
    rule_count: usize,
    states: Vec<u32>,
) -> SccInfo {
    let mut member = BitSet::new(lts.state_count());
    for &s in &states {
        member.insert(s as usize);
    }
    let mut internal_labels: Vec<bool> = vec![false; rule_count];
    let mut has_internal_edge = false;
    for &s in &states {
        for e in lts.edges_from(s as usize) {
            if member.get(e.target as usize) {
                has_internal_edge = true;
                internal_labels[e.rule as usize] = true;
            }
        }
    }
    let fair = has_internal_edge
        && pairs.iter().enumerate().all(|(i, pair)| {
            let triggered = states.iter().any(|&s| triggers[i].get(s as usize));
            !triggered || internal_labels[pair.rule]
        });
    SccInfo {
        states,
        has_internal_edge,
        fair,
    }
}

/// Per-pair trigger sets: states where the pair's rule is enabled.
fn trigger_sets(system: &System, lts: &Lts, pairs: &[CompassionPair]) -> Vec<BitSet> {
    pairs
        .iter()
        .map(|pair| {
            let mut set = BitSet::new(lts.state_count());
            for (i, s) in lts.states().iter().enumerate() {
                if system.enabled(s, pair.rule) {
                    set.insert(i);
                }
            }
            set
        })
        .collect()
}

/// Iterative Tarjan on the subgraph induced by `mask`.
fn sccs_in(lts: &Lts, mask: &BitSet) -> Vec<Vec<u32>> {
    let n = lts.state_count();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = BitSet::new(n);
    let mut stack: Vec<u32> = Vec::new();
    let mut comps = Vec::new();
    let mut next_index = 0u32;
    let mut call: Vec<(u32, u32)> = Vec::new();

    for root in mask.ones() {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, 0));
        while let Some((v, child)) = call.pop() {
            let v_us = v as usize;
            if child == 0 {
                index[v_us] = next_index;
                low[v_us] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack.insert(v_us);
            }
            let edges = lts.edges_from(v_us);
            let mut descended = false;
            let mut i = child as usize;
            while i < edges.len() {
                let w = edges[i].target as usize;
                i += 1;
                if !mask.get(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    call.push((v, i as u32));
                    call.push((w as u32, 0));
                    descended = true;
                    break;
                } else if on_stack.get(w) {
                    low[v_us] = low[v_us].min(index[w]);
                }
            }
            if descended {
                continue;
            }
            if let Some(&(parent, _)) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v_us]);
            }
            if low[v_us] == index[v_us] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack.remove(w as usize);
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

/// A maximal set of states (within one refined SCC) able to host a fair
/// cycle, with one obligation edge per pair triggered inside.
struct FairComponent {
    states: Vec<u32>,
    /// `(source, rule, target)` edges the witness cycle must traverse.
    required_edges: Vec<(u32, u32, u32)>,
}

/// Recursive compassion refinement on the subgraph induced by `mask`:
/// returns the components that can host a fair infinite run.
fn fair_components(
    lts: &Lts,
    pairs: &[CompassionPair],
    triggers: &[BitSet],
    mask: &BitSet,
) -> Vec<FairComponent> {
    let mut out = Vec::new();
    let mut work: Vec<Vec<u32>> = sccs_in(lts, mask);
    while let Some(states) = work.pop() {
        let mut member = BitSet::new(lts.state_count());
        for &s in &states {
            member.insert(s as usize);
        }
        // one internal edge per label, if any
        let mut internal: std::collections::HashMap<u32, (u32, u32)> =
            std::collections::HashMap::new();
        let mut has_edge = false;
        for &s in &states {
            for e in lts.edges_from(s as usize) {
                if member.get(e.target as usize) {
                    has_edge = true;
                    internal.entry(e.rule).or_insert((s, e.target));
                }
            }
        }
        if !has_edge {
            continue;
        }
        let mut bad = Vec::new();
        let mut required = Vec::new();
        for (i, pair) in pairs.iter().enumerate() {
            let triggered = states.iter().any(|&s| triggers[i].get(s as usize));
            if !triggered {
                continue;
            }
            match internal.get(&(pair.rule as u32)) {
                Some(&(src, tgt)) => required.push((src, pair.rule as u32, tgt)),
                None => bad.push(i),
            }
        }
        if bad.is_empty() {
            out.push(FairComponent {
                states,
                required_edges: required,
            });
        } else {
            let mut remainder = member;
            for &i in &bad {
                remainder.subtract(&triggers[i]);
            }
            if !remainder.is_empty() {
                work.extend(sccs_in(lts, &remainder));
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("species `{0}` is not part of the checked model")]
    SpeciesOutOfScope(String),
}

#[derive(Debug, Clone)]
pub struct CheckStats {
    pub states: usize,
    pub transitions: usize,
    pub scc_count: usize,
    pub fair_scc_count: usize,
    pub time: Duration,
}

/// Counterexample evidence for a false verdict.
#[derive(Debug, Clone)]
pub enum Witness {
    /// The initial state itself violates a propositional formula.
    State(Trace),
    /// A finite maximal path (ends in a deadlock) violating the property.
    FinitePath(Trace),
    /// After this prefix the violation holds no matter the continuation.
    Prefix(Trace),
    /// A fair lasso: stem, then a closed cycle repeated forever.
    Lasso { stem: Trace, cycle: Trace },
}

#[derive(Debug)]
pub struct CheckResult {
    /// Satisfaction at the initial state.
    pub verdict: bool,
    /// Per-subformula satisfying-state sets, post-order, display + set.
    pub subformulas: Vec<(String, BitSet)>,
    pub stats: CheckStats,
    /// Present iff `verdict` is false.
    pub witness: Option<Witness>,
}

/// Label every state with the subformulas it satisfies under fair-path
/// semantics and report the verdict at the initial state, with a
/// counterexample when false.
pub fn check(
    p: &Pathway,
    system: &System,
    lts: &Lts,
    pairs: &[CompassionPair],
    f: &Formula,
) -> Result<CheckResult, CheckError> {
    let start = Instant::now();
    let nodes =
        flatten(f, system).map_err(|sp| CheckError::SpeciesOutOfScope(p.name(sp).to_string()))?;
    let displays = subformula_displays(f, p);
    let n = lts.state_count();
    let triggers = trigger_sets(system, lts, pairs);
    let rev = lts.reverse_edges();

    // Sanity: universal quantification is never vacuous. Every state can
    // reach a deadlock or a fair cycle, so a fair maximal path exists from
    // everywhere. Debug builds only; it costs a full refinement pass.
    #[cfg(debug_assertions)]
    {
        let mut all = BitSet::new(n);
        all.invert();
        let mut ok = BitSet::new(n);
        for s in 0..n {
            if lts.is_deadlock(s) {
                ok.insert(s);
            }
        }
        for comp in fair_components(lts, pairs, &triggers, &all) {
            for s in comp.states {
                ok.insert(s as usize);
            }
        }
        backward_close(&rev, &all, &mut ok);
        debug_assert_eq!(ok.count(), n, "state without a fair maximal path");
    }

    let mut sets: Vec<BitSet> = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let set = match *node {
            Node::True => {
                let mut s = BitSet::new(n);
                s.invert();
                s
            }
            Node::False => BitSet::new(n),
            Node::Lit { bit, negated } => {
                let mut s = BitSet::new(n);
                for (i, state) in lts.states().iter().enumerate() {
                    if state.get(bit) != negated {
                        s.insert(i);
                    }
                }
                s
            }
            Node::And(a, b) => {
                let mut s = sets[a].clone();
                s.intersect_with(&sets[b]);
                s
            }
            Node::Or(a, b) => {
                let mut s = sets[a].clone();
                s.union_with(&sets[b]);
                s
            }
            Node::Until(a, b) => au_sat(lts, pairs, &triggers, &rev, &sets[a], &sets[b], true),
            Node::WeakUntil(a, b) => au_sat(lts, pairs, &triggers, &rev, &sets[a], &sets[b], false),
        };
        sets.push(set);
    }

    let verdict = sets
        .last()
        .expect("formula has at least one node")
        .get(lts.initial());
    let witness = if verdict {
        None
    } else {
        Some(build_witness(
            lts,
            pairs,
            &triggers,
            &nodes,
            &sets,
            nodes.len() - 1,
            lts.initial(),
        ))
    };

    let sccs = fair_sccs_restricted(system, lts, pairs, &{
        let mut all = BitSet::new(n);
        all.invert();
        all
    });
    let stats = CheckStats {
        states: n,
        transitions: lts.edge_count(),
        scc_count: sccs.len(),
        fair_scc_count: sccs.iter().filter(|c| c.fair).count(),
        time: start.elapsed(),
    };
    Ok(CheckResult {
        verdict,
        subformulas: displays.into_iter().zip(sets).collect(),
        stats,
        witness,
    })
}

/// Satisfying set of `A[f U g]` (`strong`) or `A[f W g]`.
fn au_sat(
    lts: &Lts,
    pairs: &[CompassionPair],
    triggers: &[BitSet],
    rev: &[Vec<(u32, u32)>],
    satf: &BitSet,
    satg: &BitSet,
    strong: bool,
) -> BitSet {
    let n = lts.state_count();
    let mut sub = satg.clone();
    sub.invert(); // ¬g states
    let mut bad = BitSet::new(n);
    for s in sub.ones() {
        if !satf.get(s) {
            bad.insert(s);
        }
    }
    if strong {
        for s in sub.ones() {
            if lts.is_deadlock(s) {
                bad.insert(s);
            }
        }
        for comp in fair_components(lts, pairs, triggers, &sub) {
            for s in comp.states {
                bad.insert(s as usize);
            }
        }
    }
    backward_close(rev, &sub, &mut bad);
    bad.invert();
    bad
}

/// Extend `seeds` to everything reaching it through `sub` states.
fn backward_close(rev: &[Vec<(u32, u32)>], sub: &BitSet, seeds: &mut BitSet) {
    let mut queue: Vec<usize> = seeds.ones().collect();
    while let Some(t) = queue.pop() {
        for &(_, src) in &rev[t] {
            let s = src as usize;
            if sub.get(s) && !seeds.get(s) {
                seeds.insert(s);
                queue.push(s);
            }
        }
    }
}

/// Shortest path within `sub` from `from` to any target, as state/label
/// lists (BFS; edges in rule order give deterministic traces).
fn bfs_path(
    lts: &Lts,
    sub: &BitSet,
    from: usize,
    targets: &BitSet,
) -> Option<(Vec<u32>, Vec<u32>)> {
    if targets.get(from) {
        return Some((vec![from as u32], vec![]));
    }
    let n = lts.state_count();
    let mut prev: Vec<Option<(u32, u32)>> = vec![None; n]; // (source, rule)
    let mut seen = BitSet::new(n);
    seen.insert(from);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        for e in lts.edges_from(s) {
            let t = e.target as usize;
            if !sub.get(t) || seen.get(t) {
                continue;
            }
            seen.insert(t);
            prev[t] = Some((s as u32, e.rule));
            if targets.get(t) {
                let mut states = vec![t as u32];
                let mut labels = Vec::new();
                let mut cur = t;
                while let Some((src, rule)) = prev[cur] {
                    labels.push(rule);
                    states.push(src);
                    cur = src as usize;
                }
                states.reverse();
                labels.reverse();
                return Some((states, labels));
            }
            queue.push_back(t);
        }
    }
    None
}

fn to_trace(lts: &Lts, states: &[u32], labels: &[u32]) -> Trace {
    Trace {
        states: states
            .iter()
            .map(|&s| lts.states()[s as usize].clone())
            .collect(),
        labels: labels.iter().map(|&r| r as usize).collect(),
    }
}

/// Closed walk inside a fair component that starts/ends at `entry` and
/// traverses every required obligation edge.
fn covering_cycle(lts: &Lts, comp: &FairComponent, entry: u32) -> (Vec<u32>, Vec<u32>) {
    let mut member = BitSet::new(lts.state_count());
    for &s in &comp.states {
        member.insert(s as usize);
    }
    let mut required = comp.required_edges.clone();
    if required.is_empty() {
        // any internal edge keeps the cycle non-degenerate
        'outer: for &s in &comp.states {
            for e in lts.edges_from(s as usize) {
                if member.get(e.target as usize) {
                    required.push((s, e.rule, e.target));
                    break 'outer;
                }
            }
        }
    }
    let mut states = vec![entry];
    let mut labels = Vec::new();
    let mut cur = entry;
    for (src, rule, tgt) in required {
        let mut to_src = BitSet::new(lts.state_count());
        to_src.insert(src as usize);
        let (path_states, path_labels) =
            bfs_path(lts, &member, cur as usize, &to_src).expect("component is strongly connected");
        states.extend_from_slice(&path_states[1..]);
        labels.extend_from_slice(&path_labels);
        states.push(tgt);
        labels.push(rule);
        cur = tgt;
    }
    let mut to_entry = BitSet::new(lts.state_count());
    to_entry.insert(entry as usize);
    let (path_states, path_labels) =
        bfs_path(lts, &member, cur as usize, &to_entry).expect("component is strongly connected");
    states.extend_from_slice(&path_states[1..]);
    labels.extend_from_slice(&path_labels);
    (states, labels)
}

/// Counterexample for a failing node at `state`, descending through the
/// boolean structure to a failing temporal operator or literal.
fn build_witness(
    lts: &Lts,
    pairs: &[CompassionPair],
    triggers: &[BitSet],
    nodes: &[Node],
    sets: &[BitSet],
    node: usize,
    state: usize,
) -> Witness {
    match nodes[node] {
        Node::True => unreachable!("true never fails"),
        Node::False | Node::Lit { .. } => Witness::State(to_trace(lts, &[state as u32], &[])),
        Node::And(a, b) => {
            let child = if !sets[a].get(state) { a } else { b };
            build_witness(lts, pairs, triggers, nodes, sets, child, state)
        }
        Node::Or(a, _) => build_witness(lts, pairs, triggers, nodes, sets, a, state),
        Node::Until(a, b) | Node::WeakUntil(a, b) => {
            let strong = matches!(nodes[node], Node::Until(..));
            let satf = &sets[a];
            let satg = &sets[b];
            let n = lts.state_count();
            let mut sub = satg.clone();
            sub.invert();

            // nearest ¬f ∧ ¬g state
            let mut prefix_targets = BitSet::new(n);
            for s in sub.ones() {
                if !satf.get(s) {
                    prefix_targets.insert(s);
                }
            }
            let prefix = bfs_path(lts, &sub, state, &prefix_targets);
            if !strong {
                let (states, labels) = prefix.expect("weak-until failure implies a prefix");
                return Witness::Prefix(to_trace(lts, &states, &labels));
            }
            let mut deadlock_targets = BitSet::new(n);
            for s in sub.ones() {
                if lts.is_deadlock(s) {
                    deadlock_targets.insert(s);
                }
            }
            let finite = bfs_path(lts, &sub, state, &deadlock_targets);
            // prefer the shortest evidence; prefix beats ties
            match (&prefix, &finite) {
                (Some(p), Some(d)) if p.0.len() <= d.0.len() => {
                    let (states, labels) = prefix.unwrap();
                    return Witness::Prefix(to_trace(lts, &states, &labels));
                }
                (Some(_), None) => {
                    let (states, labels) = prefix.unwrap();
                    return Witness::Prefix(to_trace(lts, &states, &labels));
                }
                (_, Some(_)) => {
                    let (states, labels) = finite.unwrap();
                    return Witness::FinitePath(to_trace(lts, &states, &labels));
                }
                (None, None) => {}
            }
            let comps = fair_components(lts, pairs, triggers, &sub);
            let mut support = BitSet::new(n);
            for c in &comps {
                for &s in &c.states {
                    support.insert(s as usize);
                }
            }
            let (stem_states, stem_labels) =
                bfs_path(lts, &sub, state, &support).expect("failing until has a counterexample");
            let entry = *stem_states.last().unwrap();
            let comp = comps
                .iter()
                .find(|c| c.states.contains(&entry))
                .expect("entry state is in a fair component");
            let (cyc_states, cyc_labels) = covering_cycle(lts, comp, entry);
            Witness::Lasso {
                stem: to_trace(lts, &stem_states, &stem_labels),
                cycle: to_trace(lts, &cyc_states, &cyc_labels),
            }
        }
    }
}

//! Brute-force oracle for fair `ACTL-` verdicts.
//!
//! Independent ground truth for [`crate::checker::check`]: universal path
//! formulas are decided by explicit search for violating fair maximal
//! paths, i.e. finite maximal paths and fair lassos. Lasso candidates are
//! generated by guessing which subset `B` of compassion pairs may keep
//! triggering: states triggering pairs outside `B` are removed, and every
//! strongly connected piece of the remainder carrying an obligation edge
//! for each pair in `B` hosts a fair cycle. Each finding is materialised
//! as an explicit lasso and re-checked against the literal fairness
//! definition: a lasso is fair iff every pair whose trigger holds somewhere
//! on the cycle has its obligation edge on the cycle. Finite maximal paths
//! are always fair. SCCs here use Kosaraju's two-pass algorithm, not the
//! checker's Tarjan, and closures use the oracle's own search.

use crate::bits::BitSet;
use crate::checker::CompassionPair;
use crate::formula::{flatten, Formula, Node};
use crate::pathway::Pathway;
use crate::semantics::{Lts, System};
use thiserror::Error;

pub const DEFAULT_ORACLE_STATE_CAP: usize = 4096;
/// Subset enumeration is exponential in the number of pairs.
pub const ORACLE_PAIR_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle cap exceeded: {states} states > {cap}")]
    StateCapExceeded { states: usize, cap: usize },
    #[error("oracle supports at most {limit} compassion pairs, got {got}")]
    TooManyPairs { got: usize, limit: usize },
    #[error("species `{0}` is not part of the checked model")]
    SpeciesOutOfScope(String),
}

/// Reusable oracle context for one LTS + fairness scope; checking several
/// formulas against the same model shares the trigger sets and the global
/// fair-extendability computation.
pub struct Oracle<'a> {
    pathway: &'a Pathway,
    system: &'a System,
    lts: &'a Lts,
    pairs: &'a [CompassionPair],
    triggers: Vec<BitSet>,
    rev: Vec<Vec<u32>>,
    n: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(
        pathway: &'a Pathway,
        system: &'a System,
        lts: &'a Lts,
        pairs: &'a [CompassionPair],
        state_cap: usize,
    ) -> Result<Oracle<'a>, OracleError> {
        let n = lts.state_count();
        if n > state_cap {
            return Err(OracleError::StateCapExceeded {
                states: n,
                cap: state_cap,
            });
        }
        if pairs.len() > ORACLE_PAIR_LIMIT {
            return Err(OracleError::TooManyPairs {
                got: pairs.len(),
                limit: ORACLE_PAIR_LIMIT,
            });
        }
        let triggers = pairs
            .iter()
            .map(|pair| {
                let mut set = BitSet::new(n);
                for (i, s) in lts.states().iter().enumerate() {
                    if system.enabled(s, pair.rule) {
                        set.insert(i);
                    }
                }
                set
            })
            .collect();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n {
            for e in lts.edges_from(s) {
                rev[e.target as usize].push(s as u32);
            }
        }
        let oracle = Oracle {
            pathway,
            system,
            lts,
            pairs,
            triggers,
            rev,
            n,
        };
        // sanity: every state admits a fair maximal path (a reachable
        // deadlock or a fair cycle), so universal quantification is never
        // vacuous and prefix violations always extend to full paths
        let mut all = BitSet::new(n);
        all.invert();
        let mut extendable = BitSet::new(n);
        for s in 0..n {
            if lts.is_deadlock(s) {
                extendable.insert(s);
            }
        }
        extendable.union_with(&oracle.fair_cycle_states(&all));
        oracle.back_close(&all, &mut extendable);
        let mut missing = all.clone();
        missing.subtract(&extendable);
        assert!(
            missing.is_empty(),
            "state without any fair maximal path: {:?}",
            missing.ones().next()
        );
        Ok(oracle)
    }

    /// Verdict of `f` at the initial state under literal fair-path
    /// semantics.
    pub fn check(&self, f: &Formula) -> Result<bool, OracleError> {
        let nodes = flatten(f, self.system)
            .map_err(|sp| OracleError::SpeciesOutOfScope(self.pathway.name(sp).to_string()))?;
        let mut sets: Vec<BitSet> = Vec::with_capacity(nodes.len());
        for node in &nodes {
            let set = match *node {
                Node::True => {
                    let mut s = BitSet::new(self.n);
                    s.invert();
                    s
                }
                Node::False => BitSet::new(self.n),
                Node::Lit { bit, negated } => {
                    let mut s = BitSet::new(self.n);
                    for (i, state) in self.lts.states().iter().enumerate() {
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
                Node::Until(a, b) => self.au_sat(&sets[a], &sets[b], true),
                Node::WeakUntil(a, b) => self.au_sat(&sets[a], &sets[b], false),
            };
            sets.push(set);
        }
        Ok(sets
            .last()
            .expect("formula non-empty")
            .get(self.lts.initial()))
    }

    /// States satisfying `A[f U g]` / `A[f W g]`: complement of the states
    /// from which some fair maximal path violates the path formula.
    fn au_sat(&self, satf: &BitSet, satg: &BitSet, strong: bool) -> BitSet {
        let mut sub = satg.clone();
        sub.invert(); // ¬g
        let mut violating = BitSet::new(self.n);
        // prefix violations: reach ¬f ∧ ¬g through ¬g states, then any fair
        // continuation (one always exists, asserted at construction)
        for s in sub.ones() {
            if !satf.get(s) {
                violating.insert(s);
            }
        }
        if strong {
            // g never occurs: a ¬g finite maximal path (fair by definition)
            for s in sub.ones() {
                if self.lts.is_deadlock(s) {
                    violating.insert(s);
                }
            }
            // ... or a fair lasso staying in ¬g states
            violating.union_with(&self.fair_cycle_states(&sub));
        }
        self.back_close(&sub, &mut violating);
        violating.invert();
        violating
    }

    /// Grow `seeds` backwards through `mask` states.
    fn back_close(&self, mask: &BitSet, seeds: &mut BitSet) {
        let mut queue: Vec<usize> = seeds.ones().collect();
        while let Some(t) = queue.pop() {
            for &src in &self.rev[t] {
                let s = src as usize;
                if mask.get(s) && !seeds.get(s) {
                    seeds.insert(s);
                    queue.push(s);
                }
            }
        }
    }

    /// States inside `sub` that lie on some fair cycle of the induced
    /// subgraph, by trigger-subset enumeration with explicit verification.
    fn fair_cycle_states(&self, sub: &BitSet) -> BitSet {
        let mut targets = BitSet::new(self.n);
        // only pairs that trigger inside `sub` matter: a path confined to
        // `sub` never triggers the others, so they are vacuously satisfied
        let relevant: Vec<usize> = (0..self.pairs.len())
            .filter(|&i| self.triggers[i].intersects(sub))
            .collect();
        let k = relevant.len();
        for guess in 0u32..(1u32 << k) {
            let chosen: Vec<usize> = (0..k)
                .filter(|&i| guess & (1 << i) != 0)
                .map(|i| relevant[i])
                .collect();
            let mut g = sub.clone();
            for (i, &pair_idx) in relevant.iter().enumerate() {
                if guess & (1 << i) == 0 {
                    g.subtract(&self.triggers[pair_idx]);
                }
            }
            if g.is_empty() {
                continue;
            }
            for comp in self.kosaraju(&g) {
                if comp.iter().all(|&s| targets.get(s as usize)) {
                    continue;
                }
                let mut member = BitSet::new(self.n);
                for &s in &comp {
                    member.insert(s as usize);
                }
                let mut internal: std::collections::HashMap<u32, (u32, u32)> =
                    std::collections::HashMap::new();
                for &s in &comp {
                    for e in self.lts.edges_from(s as usize) {
                        if member.get(e.target as usize) {
                            internal.entry(e.rule).or_insert((s, e.target));
                        }
                    }
                }
                if internal.is_empty() {
                    continue;
                }
                let obligations: Option<Vec<(u32, u32, u32)>> = chosen
                    .iter()
                    .map(|&i| {
                        let rule = self.pairs[i].rule as u32;
                        internal.get(&rule).map(|&(s, t)| (s, rule, t))
                    })
                    .collect();
                let Some(mut required) = obligations else {
                    continue;
                };
                if required.is_empty() {
                    let (&rule, &(s, t)) = internal.iter().next().unwrap();
                    required.push((s, rule, t));
                }
                // materialise the lasso cycle and apply the fairness
                // definition literally
                let (cyc_states, cyc_labels) = self.covering_cycle(&member, comp[0], &required);
                assert!(
                    self.lasso_cycle_is_fair(&cyc_states, &cyc_labels),
                    "constructed witness cycle must be fair"
                );
                targets.union_with(&member);
            }
        }
        targets
    }

    /// Literal fairness filter on a lasso cycle: every pair triggered at
    /// some cycle state must have its obligation label on the cycle.
    fn lasso_cycle_is_fair(&self, cycle_states: &[u32], cycle_labels: &[u32]) -> bool {
        self.pairs.iter().enumerate().all(|(i, pair)| {
            let triggered = cycle_states
                .iter()
                .any(|&s| self.triggers[i].get(s as usize));
            !triggered || cycle_labels.iter().any(|&l| l as usize == pair.rule)
        })
    }

    /// Closed walk from `entry` through every required edge, inside the
    /// strongly connected `member` set.
    fn covering_cycle(
        &self,
        member: &BitSet,
        entry: u32,
        required: &[(u32, u32, u32)],
    ) -> (Vec<u32>, Vec<u32>) {
        let mut states = vec![entry];
        let mut labels = Vec::new();
        let mut cur = entry;
        for &(src, rule, tgt) in required {
            let (ps, pl) = self
                .bfs_in(member, cur, src)
                .expect("strongly connected component");
            states.extend_from_slice(&ps[1..]);
            labels.extend_from_slice(&pl);
            states.push(tgt);
            labels.push(rule);
            cur = tgt;
        }
        let (ps, pl) = self
            .bfs_in(member, cur, entry)
            .expect("strongly connected component");
        states.extend_from_slice(&ps[1..]);
        labels.extend_from_slice(&pl);
        (states, labels)
    }

    fn bfs_in(&self, mask: &BitSet, from: u32, to: u32) -> Option<(Vec<u32>, Vec<u32>)> {
        if from == to {
            return Some((vec![from], vec![]));
        }
        let mut prev: Vec<Option<(u32, u32)>> = vec![None; self.n];
        let mut seen = BitSet::new(self.n);
        seen.insert(from as usize);
        let mut queue = std::collections::VecDeque::from([from as usize]);
        while let Some(s) = queue.pop_front() {
            for e in self.lts.edges_from(s) {
                let t = e.target as usize;
                if !mask.get(t) || seen.get(t) {
                    continue;
                }
                seen.insert(t);
                prev[t] = Some((s as u32, e.rule));
                if t == to as usize {
                    let mut states = vec![to];
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

    /// Kosaraju's two-pass SCC on the subgraph induced by `mask`.
    fn kosaraju(&self, mask: &BitSet) -> Vec<Vec<u32>> {
        let mut order: Vec<u32> = Vec::new();
        let mut visited = BitSet::new(self.n);
        for root in mask.ones() {
            if visited.get(root) {
                continue;
            }
            visited.insert(root);
            let mut stack: Vec<(u32, u32)> = vec![(root as u32, 0)];
            while let Some((v, i)) = stack.pop() {
                let edges = self.lts.edges_from(v as usize);
                let mut advanced = false;
                let mut i = i as usize;
                while i < edges.len() {
                    let w = edges[i].target as usize;
                    i += 1;
                    if mask.get(w) && !visited.get(w) {
                        visited.insert(w);
                        stack.push((v, i as u32));
                        stack.push((w as u32, 0));
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    order.push(v);
                }
            }
        }
        let mut assigned = BitSet::new(self.n);
        let mut comps: Vec<Vec<u32>> = Vec::new();
        for &root in order.iter().rev() {
            if assigned.get(root as usize) {
                continue;
            }
            let mut comp = Vec::new();
            assigned.insert(root as usize);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &src in &self.rev[v as usize] {
                    if mask.get(src as usize) && !assigned.get(src as usize) {
                        assigned.insert(src as usize);
                        stack.push(src);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }
}

/// One-shot convenience wrapper around [`Oracle`].
pub fn oracle_check(
    pathway: &Pathway,
    system: &System,
    lts: &Lts,
    pairs: &[CompassionPair],
    f: &Formula,
    state_cap: usize,
) -> Result<bool, OracleError> {
    Oracle::new(pathway, system, lts, pairs, state_cap)?.check(f)
}

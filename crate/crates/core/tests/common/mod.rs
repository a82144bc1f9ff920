//! Seeded random pathway and formula generators shared by the test suites.

#![allow(dead_code)]

use pathmc_core::formula::Formula;
use pathmc_core::pathway::{Pathway, PathwayBuilder, SpeciesId};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy)]
pub struct GenConfig {
    pub min_species: usize,
    pub max_species: usize,
    pub max_reactions: usize,
    /// Equal reactant/product arity per reaction.
    pub normal_form: bool,
    /// Probability that a reaction gets catalysts at all.
    pub catalyst_prob: f64,
    /// Probability per species of being initially present.
    pub init_prob: f64,
    /// Probability that a reaction also gets its reverse (products ->
    /// reactants, same catalysts), the way reversible reactions are
    /// modelled.
    pub reversible_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_species: 2,
            max_species: 10,
            max_reactions: 8,
            normal_form: false,
            catalyst_prob: 0.6,
            init_prob: 0.4,
            reversible_prob: 0.0,
        }
    }
}

impl GenConfig {
    /// Sparse normal-form pathways: enough species and few reactions, so
    /// several components survive unification.
    pub fn multi_component() -> Self {
        GenConfig {
            min_species: 7,
            max_species: 10,
            max_reactions: 4,
            normal_form: true,
            catalyst_prob: 0.5,
            init_prob: 0.4,
            reversible_prob: 0.4,
        }
    }
}

pub fn species_pool(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// Random pathway: up to `max_species` species and `max_reactions`
/// reactions, duplicate-free roles, at least one initially present species.
pub fn random_pathway(rng: &mut ChaCha8Rng, cfg: GenConfig) -> Pathway {
    let n_species = rng.gen_range(cfg.min_species..=cfg.max_species);
    let names = species_pool(n_species);
    let n_reactions = rng.gen_range(1..=cfg.max_reactions);
    let mut b = PathwayBuilder::new();
    let mut next_id = 0usize;
    let pick_distinct = |rng: &mut ChaCha8Rng, k: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n_species).collect();
        idx.shuffle(rng);
        idx.truncate(k);
        idx
    };
    for _ in 0..n_reactions {
        let n_re = rng.gen_range(1..=2usize.min(n_species));
        let n_pro = if cfg.normal_form {
            n_re
        } else {
            rng.gen_range(1..=2usize.min(n_species))
        };
        let reactants = pick_distinct(rng, n_re);
        let products = pick_distinct(rng, n_pro);
        let catalysts = if rng.gen_bool(cfg.catalyst_prob) {
            let n_cat = rng.gen_range(1..=2usize.min(n_species));
            pick_distinct(rng, n_cat)
        } else {
            Vec::new()
        };
        let as_names = |idx: &[usize]| idx.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>();
        next_id += 1;
        b.add_reaction(
            Some(&format!("R{next_id}")),
            &as_names(&reactants),
            &as_names(&products),
            &as_names(&catalysts),
        )
        .expect("generated roles are duplicate-free");
        if rng.gen_bool(cfg.reversible_prob) {
            next_id += 1;
            b.add_reaction(
                Some(&format!("R{next_id}")),
                &as_names(&products),
                &as_names(&reactants),
                &as_names(&catalysts),
            )
            .expect("reverse roles are duplicate-free");
        }
    }
    let mut any = false;
    for name in &names {
        if rng.gen_bool(cfg.init_prob) {
            b.add_init(name).unwrap();
            any = true;
        }
    }
    if !any {
        b.add_init(&names[rng.gen_range(0..n_species)]).unwrap();
    }
    b.build()
}

/// Same pathway with reactions in a random order and, per reaction, a
/// random permutation applied jointly to reactant/product positions.
pub fn shuffled_pathway(p: &Pathway, rng: &mut ChaCha8Rng) -> Pathway {
    let mut order: Vec<usize> = (0..p.reactions().len()).collect();
    order.shuffle(rng);
    let mut b = PathwayBuilder::new();
    // keep species ids comparable: intern the table in original order
    for s in p.species() {
        b.intern(&s.name).unwrap();
    }
    for &ri in &order {
        let r = &p.reactions()[ri];
        // permute positions jointly (pairs preserved); only meaningful for
        // equal arities
        let mut positions: Vec<usize> = (0..r.reactants.len()).collect();
        if r.reactants.len() == r.products.len() {
            positions.shuffle(rng);
        }
        let pick = |ids: &[SpeciesId], perm: &[usize]| -> Vec<&str> {
            perm.iter().map(|&j| p.name(ids[j])).collect()
        };
        let reactants = pick(&r.reactants, &positions);
        let products = if r.reactants.len() == r.products.len() {
            pick(&r.products, &positions)
        } else {
            r.products.iter().map(|&s| p.name(s)).collect()
        };
        let catalysts: Vec<&str> = r.catalysts.iter().map(|&s| p.name(s)).collect();
        b.add_reaction(Some(&r.id), &reactants, &products, &catalysts)
            .unwrap();
    }
    for (s, _) in p.initial().iter() {
        b.add_init(p.name(s)).unwrap();
    }
    b.build()
}

/// Random ACTL- formula of the given depth over a literal pool.
pub fn random_formula(rng: &mut ChaCha8Rng, pool: &[SpeciesId], depth: usize) -> Formula {
    if pool.is_empty() {
        return if rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        };
    }
    let leaf = |rng: &mut ChaCha8Rng| {
        let roll: f64 = rng.gen();
        if roll < 0.05 {
            Formula::True
        } else if roll < 0.1 {
            Formula::False
        } else {
            let sp = pool[rng.gen_range(0..pool.len())];
            if rng.gen_bool(0.4) {
                Formula::not_lit(sp)
            } else {
                Formula::lit(sp)
            }
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 => leaf(rng),
        1 => Formula::And(
            Box::new(random_formula(rng, pool, depth - 1)),
            Box::new(random_formula(rng, pool, depth - 1)),
        ),
        2 => Formula::Or(
            Box::new(random_formula(rng, pool, depth - 1)),
            Box::new(random_formula(rng, pool, depth - 1)),
        ),
        3 | 4 => Formula::Until(
            Box::new(random_formula(rng, pool, depth - 1)),
            Box::new(random_formula(rng, pool, depth - 1)),
        ),
        5 => Formula::WeakUntil(
            Box::new(random_formula(rng, pool, depth - 1)),
            Box::new(random_formula(rng, pool, depth - 1)),
        ),
        6 => Formula::af(random_formula(rng, pool, depth - 1)),
        _ => Formula::ag(random_formula(rng, pool, depth - 1)),
    }
}

/// All species of the pathway (ids in table order).
pub fn all_species(p: &Pathway) -> Vec<SpeciesId> {
    p.species().iter().map(|s| s.id).collect()
}

/// Independent connected-components oracle: BFS on the species graph with
/// one edge per positional reactant/product pair.
pub fn cc_oracle(p: &Pathway) -> Vec<usize> {
    let n = p.species_count();
    let mut adj = vec![Vec::new(); n];
    for r in p.reactions() {
        for (a, b) in r.reactants.iter().zip(&r.products) {
            adj[a.index()].push(b.index());
            adj[b.index()].push(a.index());
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    queue.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Structured pathway built from oscillating motifs: a few chains of
/// reversible catalysed steps (a token walks each chain), dedicated
/// catalyst species, and an occasional cross reaction between chains.
/// Gives lively cyclic state spaces with several components.
pub fn random_motif_pathway(rng: &mut ChaCha8Rng) -> Pathway {
    random_motif_pathway_capped(rng, usize::MAX)
}

/// Motif pathway with at most `max_rules` reactions.
pub fn random_motif_pathway_capped(rng: &mut ChaCha8Rng, max_rules: usize) -> Pathway {
    let groups = rng.gen_range(2..=3);
    // keep the rule count oracle-friendly (subset enumeration is 2^rules)
    let max_len = if groups == 3 { 2 } else { 3 };
    let mut b = PathwayBuilder::new();
    let mut rid = 0usize;
    let chains: Vec<Vec<String>> = (0..groups)
        .map(|g| {
            let len = rng.gen_range(2..=max_len);
            (0..len).map(|i| format!("x{g}_{i}")).collect()
        })
        .collect();
    let cats: Vec<String> = (0..groups).map(|g| format!("k{g}")).collect();
    for (g, chain) in chains.iter().enumerate() {
        for i in 0..chain.len() - 1 {
            let cat = &cats[if rng.gen_bool(0.7) {
                g
            } else {
                rng.gen_range(0..groups)
            }];
            if rid >= max_rules {
                break;
            }
            rid += 1;
            b.add_reaction(
                Some(&format!("R{rid}")),
                &[&chain[i]],
                &[&chain[i + 1]],
                &[cat],
            )
            .unwrap();
            if rid < max_rules && rng.gen_bool(0.8) {
                rid += 1;
                b.add_reaction(
                    Some(&format!("R{rid}")),
                    &[&chain[i + 1]],
                    &[&chain[i]],
                    &[cat],
                )
                .unwrap();
            }
        }
    }
    if groups >= 2 && rid < max_rules && rng.gen_bool(0.5) {
        // cross reaction between two chains, sometimes catalysed
        let a = &chains[0][rng.gen_range(0..chains[0].len())];
        let c = &chains[1][rng.gen_range(0..chains[1].len())];
        let cat: Vec<&str> = if rng.gen_bool(0.5) {
            vec![cats[rng.gen_range(0..groups)].as_str()]
        } else {
            vec![]
        };
        rid += 1;
        b.add_reaction(Some(&format!("R{rid}")), &[a], &[c], &cat)
            .unwrap();
    }
    for cat in &cats {
        if rng.gen_bool(0.85) {
            b.add_init(cat).unwrap();
        }
    }
    for chain in &chains {
        b.add_init(&chain[rng.gen_range(0..chain.len())]).unwrap();
        if rng.gen_bool(0.2) {
            b.add_init(&chain[rng.gen_range(0..chain.len())]).unwrap();
        }
    }
    b.build()
}

/// Accumulation pathway: uncatalysed single-track reactions growing from a
/// couple of seed species. Firing order branches combinatorially, so the
/// reachable lattice is large relative to the rule count.
pub fn random_growth_pathway(rng: &mut ChaCha8Rng, max_reactions: usize) -> Pathway {
    let n_species = rng.gen_range(8..=10);
    let names = species_pool(n_species);
    let mut b = PathwayBuilder::new();
    let n_reactions = rng.gen_range(5..=max_reactions);
    let mut mentioned: Vec<usize> = vec![0, 1];
    for i in 0..n_reactions {
        let re = mentioned[rng.gen_range(0..mentioned.len())];
        let mut pro = rng.gen_range(0..n_species);
        if pro == re {
            pro = (pro + 1) % n_species;
        }
        b.add_reaction(
            Some(&format!("R{}", i + 1)),
            &[&names[re]],
            &[&names[pro]],
            &[],
        )
        .unwrap();
        if !mentioned.contains(&pro) {
            mentioned.push(pro);
        }
    }
    b.add_init(&names[0]).unwrap();
    b.add_init(&names[1]).unwrap();
    b.build()
}

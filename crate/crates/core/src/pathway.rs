//! Reaction-language data model: species, reactions, pathways, initial state.
//!
//! Reactant and product lists are ordered because component identification
//! relies on the positional correspondence between reactant `r_j` and
//! product `p_j`. Catalysts form a set but keep their file order so that
//! printing round-trips.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Index into a pathway's species table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesId(pub u32);

impl SpeciesId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct Species {
    pub id: SpeciesId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub id: String,
    pub reactants: Vec<SpeciesId>,
    pub products: Vec<SpeciesId>,
    pub catalysts: Vec<SpeciesId>,
}

impl Reaction {
    /// All species involved: reactants ∪ products ∪ catalysts.
    pub fn species(&self) -> BTreeSet<SpeciesId> {
        self.reactants
            .iter()
            .chain(&self.products)
            .chain(&self.catalysts)
            .copied()
            .collect()
    }

    pub fn is_catalysed(&self) -> bool {
        !self.catalysts.is_empty()
    }
}

/// How a species ended up in the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Listed on an `init:` line.
    Declared,
    /// Never produced by any reaction, so assumed initially present.
    HeuristicSource,
    /// Chosen by the modeller for a component whose species all sit on loops.
    HeuristicManual,
}

/// The species present in the initial state, with per-species provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InitialSpec {
    entries: std::collections::BTreeMap<SpeciesId, Provenance>,
}

impl InitialSpec {
    pub fn declared<I: IntoIterator<Item = SpeciesId>>(species: I) -> Self {
        let mut spec = InitialSpec::default();
        for s in species {
            spec.insert(s, Provenance::Declared);
        }
        spec
    }

    pub fn insert(&mut self, s: SpeciesId, prov: Provenance) {
        self.entries.entry(s).or_insert(prov);
    }

    pub fn present(&self) -> BTreeSet<SpeciesId> {
        self.entries.keys().copied().collect()
    }

    pub fn provenance(&self, s: SpeciesId) -> Option<Provenance> {
        self.entries.get(&s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpeciesId, Provenance)> + '_ {
        self.entries.iter().map(|(&s, &p)| (s, p))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A set of reactions over an interned species table, plus the initial state.
/// Immutable once built; construct through [`PathwayBuilder`] or the parser.
#[derive(Debug, Clone)]
pub struct Pathway {
    species: Vec<Species>,
    by_name: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
    initial: InitialSpec,
}

impl Pathway {
    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn name(&self, id: SpeciesId) -> &str {
        &self.species[id.index()].name
    }

    pub fn species_by_name(&self, name: &str) -> Option<SpeciesId> {
        self.by_name.get(name).copied()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reaction_index(&self, id: &str) -> Option<usize> {
        self.reactions.iter().position(|r| r.id == id)
    }

    pub fn initial(&self) -> &InitialSpec {
        &self.initial
    }

    /// Copy of this pathway with a different initial state.
    pub fn with_initial(&self, initial: InitialSpec) -> Pathway {
        Pathway {
            initial,
            ..self.clone()
        }
    }

    /// species(P): every species occurring in some reaction.
    pub fn used_species(&self) -> BTreeSet<SpeciesId> {
        self.reactions.iter().flat_map(|r| r.species()).collect()
    }

    /// Species in the table that no reaction mentions (reported as warnings).
    pub fn unused_species(&self) -> Vec<SpeciesId> {
        let used = self.used_species();
        self.species
            .iter()
            .map(|s| s.id)
            .filter(|id| !used.contains(id))
            .collect()
    }

    /// Pathway-file text that parses back to an isomorphic pathway.
    pub fn to_pw_string(&self) -> String {
        let mut out = String::new();
        for r in &self.reactions {
            out.push_str(&self.reaction_line(r));
            out.push('\n');
        }
        let present = self.initial.present();
        if !present.is_empty() {
            let names: Vec<&str> = present.iter().map(|&s| self.name(s)).collect();
            out.push_str(&format!("init: {}\n", names.join(", ")));
        }
        out
    }

    pub fn reaction_line(&self, r: &Reaction) -> String {
        let join = |ids: &[SpeciesId], sep: &str| {
            ids.iter()
                .map(|&s| self.name(s))
                .collect::<Vec<_>>()
                .join(sep)
        };
        let mut line = format!(
            "{}: {} -> {}",
            r.id,
            join(&r.reactants, " + "),
            join(&r.products, " + ")
        );
        if !r.catalysts.is_empty() {
            line.push_str(&format!(" [{}]", join(&r.catalysts, ", ")));
        }
        line
    }
}

/// Characters allowed in species names and reaction ids.
pub fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '*' | '(' | ')' | '\'')
}

/// A valid species name: non-empty run of name characters, not a reserved word.
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && s != "init" && s != "->" && s.chars().all(is_name_char)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid species name `{0}`")]
    InvalidName(String),
    #[error("duplicate species `{species}` in {role} of reaction `{reaction}`")]
    DuplicateInRole {
        species: String,
        role: &'static str,
        reaction: String,
    },
    #[error("duplicate reaction id `{0}`")]
    DuplicateReactionId(String),
    #[error("reaction `{0}` has no reactants")]
    NoReactants(String),
    #[error("reaction `{0}` has no products")]
    NoProducts(String),
    #[error("`init` cannot be used as a reaction id")]
    ReservedReactionId,
}

/// Incremental pathway construction with invariant checking.
#[derive(Debug, Default)]
pub struct PathwayBuilder {
    species: Vec<Species>,
    by_name: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
    reaction_ids: HashMap<String, usize>,
    initial: InitialSpec,
}

impl PathwayBuilder {
    pub fn new() -> Self {
        PathwayBuilder::default()
    }

    /// Intern a species name, assigning ids in order of first appearance.
    pub fn intern(&mut self, name: &str) -> Result<SpeciesId, BuildError> {
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        if !is_valid_name(name) {
            return Err(BuildError::InvalidName(name.to_string()));
        }
        let id = SpeciesId(self.species.len() as u32);
        self.species.push(Species {
            id,
            name: name.to_string(),
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Add a reaction; `id = None` auto-assigns `R<k>` by position (1-based).
    pub fn add_reaction(
        &mut self,
        id: Option<&str>,
        reactants: &[&str],
        products: &[&str],
        catalysts: &[&str],
    ) -> Result<(), BuildError> {
        let id = match id {
            Some("init") => return Err(BuildError::ReservedReactionId),
            Some(id) => id.to_string(),
            None => format!("R{}", self.reactions.len() + 1),
        };
        if self.reaction_ids.contains_key(&id) {
            return Err(BuildError::DuplicateReactionId(id));
        }
        if reactants.is_empty() {
            return Err(BuildError::NoReactants(id));
        }
        if products.is_empty() {
            return Err(BuildError::NoProducts(id));
        }
        let mut intern_role = |names: &[&str], role: &'static str| {
            let mut ids = Vec::with_capacity(names.len());
            for name in names {
                let sid = self.intern(name)?;
                if ids.contains(&sid) {
                    return Err(BuildError::DuplicateInRole {
                        species: name.to_string(),
                        role,
                        reaction: id.clone(),
                    });
                }
                ids.push(sid);
            }
            Ok(ids)
        };
        let reactants = intern_role(reactants, "reactant list")?;
        let products = intern_role(products, "product list")?;
        let catalysts = intern_role(catalysts, "catalyst list")?;
        self.reaction_ids.insert(id.clone(), self.reactions.len());
        self.reactions.push(Reaction {
            id,
            reactants,
            products,
            catalysts,
        });
        Ok(())
    }

    pub fn add_init(&mut self, name: &str) -> Result<(), BuildError> {
        let id = self.intern(name)?;
        self.initial.insert(id, Provenance::Declared);
        Ok(())
    }

    pub fn build(self) -> Pathway {
        Pathway {
            species: self.species,
            by_name: self.by_name,
            reactions: self.reactions,
            initial: self.initial,
        }
    }
}

/// One reaction whose reactant and product counts differ, making the pathway
/// ineligible for component identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormViolation {
    pub reaction_index: usize,
    pub reaction_id: String,
    pub reactant_count: usize,
    pub product_count: usize,
}

impl fmt::Display for NormalFormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "reaction `{}`: {} reactants vs {} products",
            self.reaction_id, self.reactant_count, self.product_count
        )
    }
}

/// Report every reaction with unequal reactant/product arity. Empty result
/// means the pathway is in normal form. Translation into normal form is left
/// to the modeller; this only reports.
pub fn validate_normal_form(p: &Pathway) -> Vec<NormalFormViolation> {
    p.reactions()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.reactants.len() != r.products.len())
        .map(|(i, r)| NormalFormViolation {
            reaction_index: i,
            reaction_id: r.id.clone(),
            reactant_count: r.reactants.len(),
            product_count: r.products.len(),
        })
        .collect()
}

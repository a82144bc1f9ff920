//! Qualitative pathway model checking.
//!
//! A pathway is a finite set of biochemical reactions over named species.
//! States are sets of present species; a reaction fires when its reactants
//! and catalysts are present and not all of its products are already there.
//! Catalysed reactions consume their reactants, uncatalysed ones do not.
//!
//! On top of that semantics this crate provides:
//!
//! * strong fairness (compassion) per reaction: a reaction enabled
//!   infinitely often must fire infinitely often,
//! * identification of molecular components (species that are states of
//!   the same molecule) by positional reactant/product unification,
//! * projection of a pathway onto a set of components, yielding a smaller
//!   over-approximating model,
//! * an `ACTL-` model checker (universal CTL without `AX`) under fair-path
//!   semantics, with a brute-force oracle for cross-checking,
//! * export to the SMV model-checker input language.
//!
//! Truth of an `ACTL-` formula on a projection carries over to the complete
//! model; falsity does not.

pub mod bits;
pub mod checker;
pub mod components;
pub mod formula;
pub mod oracle;
pub mod parse;
pub mod pathway;
pub mod projection;
pub mod semantics;
pub mod smv;

pub use bits::BitSet;
pub use pathway::{Pathway, Reaction, Species, SpeciesId};
pub use semantics::{Lts, System};

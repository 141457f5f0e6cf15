//! Relational presheaves on finite base categories, made executable.
//!
//! A relational presheaf assigns a set of cells to every object of a small
//! category and a relation to every morphism, laxly: identity relations
//! contain the diagonal and composites contain composed relations. Dropping
//! the axioms gives relational families; tightening them gives partial and
//! ordinary presheaves. Over the (dimension-truncated) cube category these
//! are relational precubical sets: higher-dimensional automata whose cubes
//! may lack boundaries or have several.
//!
//! The crate provides, at finite scale:
//!
//! * axiom-level validation and morphism checking ([`rel`]);
//! * closure under composition, the inclusion of ordinary presheaves with
//!   its explicit left and right adjoints, the partial reflection, local
//!   embeddings and discrete fibrations ([`transforms`]);
//! * coproducts, coequalizers, pushouts and finite colimits in the family
//!   and lax settings ([`colimits`]);
//! * categories of elements and the equivalence between presheaves on them
//!   and discrete fibrations ([`fibrations`]);
//! * a model-driven realization engine with the barycentric-subdivision
//!   model and the standard and sequential geometric realizations to cell
//!   complexes, including symbolic neighborhood bases ([`realization`],
//!   [`complex`]);
//! * tensor products, euclidean bricks, and the combinatorial blowup with
//!   its completion to a discrete fibration ([`blowup`]).
//!
//! The exhaustive searches (hom-set enumeration, embedding search) run on
//! rayon when the default `parallel` feature is enabled and fall back to
//! sequential execution otherwise; results are identical either way.

pub mod base;
pub mod blowup;
pub mod colimits;
pub mod complex;
pub mod fibrations;
pub mod iso;
pub mod par;
pub mod realization;
pub mod rel;
pub mod search;
pub mod transforms;

pub use base::{cube_category, graph_category, BaseCategory, CofaceWord, ElementaryCoface, Mor, Obj};
pub use par::Parallelism;
pub use rel::{Cell, Components, Level, PartialReading, RelMorphism, RelStructure};

//! Relational structures over a finite base category and their morphisms.
//!
//! A [`RelStructure`] assigns a finite carrier of cells to every object and a
//! set of ordered pairs to every morphism of its base. For `f : d -> c` a
//! pair `(x, y)` in the relation of `f` has `x` in the carrier of `c` and `y`
//! in the carrier of `d`; we say `y` is an `f`-face of `x` and write
//! `x ->_f y`.
//!
//! Four axiom levels are distinguished, each strengthening the previous:
//!
//! * `family` — no axioms beyond endpoint membership;
//! * `lax` — identity relations contain the diagonal and relations are
//!   closed under composition (`x ->_f y` and `y ->_g z` imply
//!   `x ->_{f∘g} z`);
//! * `partial` — lax, plus each cell has at most one `f`-face per `f`
//!   (see [`PartialReading`] for the transposed variant);
//! * `functional` — partial and total, i.e. an ordinary presheaf.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::base::{BaseCategory, Mor, Obj};

/// Cell identifier. Cells are named by strings, unique across all carriers
/// of a structure.
pub type Cell = String;

/// Relation pairs `(big, small)`: for `f : d -> c`, the first component
/// lives over `c` and the second over `d`.
pub type RelPairs = BTreeSet<(Cell, Cell)>;

/// Per-object component maps of a morphism.
pub type Components = BTreeMap<Obj, BTreeMap<Cell, Cell>>;

/// Declared axiom level of a structure, ordered by strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Family,
    Lax,
    Partial,
    Functional,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Family => "family",
            Level::Lax => "lax",
            Level::Partial => "partial",
            Level::Functional => "functional",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "family" => Some(Level::Family),
            "lax" => Some(Level::Lax),
            "partial" => Some(Level::Partial),
            "functional" => Some(Level::Functional),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The two readings of the partiality axiom.
///
/// `FaceFunctional` is the default: each cell has at most one `f`-face, so
/// every relation is a partial function from higher cells to faces. The
/// transposed `CofaceFunctional` reading instead demands that two cells
/// sharing an `f`-face coincide. Both are exposed because the literal axiom
/// in the theory of partial presheaves is the transpose of the standard
/// partial-HDA convention; which one is meant is flagged, not guessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartialReading {
    #[default]
    FaceFunctional,
    CofaceFunctional,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("carrier declared for unknown object {0:?}")]
    UnknownObject(Obj),
    #[error("relations declared for unknown morphism {0:?}")]
    UnknownMorphism(Mor),
    #[error("cell {cell:?} appears in the carriers of both {first:?} and {second:?}")]
    DuplicateCell { cell: Cell, first: Obj, second: Obj },
    #[error("unknown cell {0:?}")]
    UnknownCell(Cell),
    #[error("structures have different bases")]
    BaseMismatch,
    #[error("component of {obj:?} is not total: no image for cell {cell:?}")]
    PartialComponent { obj: Obj, cell: Cell },
    #[error("component of {obj:?} maps {cell:?} to {image:?}, which is not a target cell of {obj:?}")]
    BadComponentImage { obj: Obj, cell: Cell, image: Cell },
    #[error("{0}")]
    Base(#[from] crate::base::BaseError),
    #[error("structure is not valid at level {level}: {first}")]
    LevelViolation { level: Level, first: String },
}

/// A single axiom violation, printable one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EndpointNotInCarrier { mor: Mor, cell: Cell, expected: Obj },
    MissingIdentity { obj: Obj, cell: Cell },
    MissingComposite { f: Mor, g: Mor, x: Cell, y: Cell, z: Cell },
    MultiValued { f: Mor, x: Cell, y: Cell, z: Cell },
    SharedFace { f: Mor, x: Cell, y: Cell, z: Cell },
    NotTotal { f: Mor, x: Cell },
}

impl Violation {
    /// The cells involved, for filtering in reports.
    pub fn cells(&self) -> Vec<&Cell> {
        match self {
            Violation::EndpointNotInCarrier { cell, .. } => vec![cell],
            Violation::MissingIdentity { cell, .. } => vec![cell],
            Violation::MissingComposite { x, y, z, .. } => vec![x, y, z],
            Violation::MultiValued { x, y, z, .. } => vec![x, y, z],
            Violation::SharedFace { x, y, z, .. } => vec![x, y, z],
            Violation::NotTotal { x, .. } => vec![x],
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EndpointNotInCarrier { mor, cell, expected } => {
                write!(out, "endpoint-not-in-carrier mor={mor} cell={cell} expected-object={expected}")
            }
            Violation::MissingIdentity { obj, cell } => {
                write!(out, "missing-identity object={obj} cell={cell}")
            }
            Violation::MissingComposite { f, g, x, y, z } => {
                write!(out, "missing-composite f={f} g={g} x={x} y={y} z={z}")
            }
            Violation::MultiValued { f, x, y, z } => {
                write!(out, "multi-valued f={f} x={x} y={y} z={z}")
            }
            Violation::SharedFace { f, x, y, z } => {
                write!(out, "shared-face f={f} x={x} y={y} z={z}")
            }
            Violation::NotTotal { f, x } => write!(out, "not-total f={f} x={x}"),
        }
    }
}

/// Result of [`RelStructure::validate_level`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Carriers per base object plus a relation set per base morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelStructure {
    base: BaseCategory,
    carriers: BTreeMap<Obj, BTreeSet<Cell>>,
    relations: BTreeMap<Mor, RelPairs>,
    level: Level,
}

impl RelStructure {
    /// Builds a structure, checking well-formedness: carrier keys are
    /// objects, relation keys are morphisms, cell names are globally unique,
    /// and every relation endpoint lies in the stated carrier. The declared
    /// level is recorded but not enforced here; see
    /// [`validate_level`](Self::validate_level).
    pub fn new(
        base: BaseCategory,
        carriers: BTreeMap<Obj, BTreeSet<Cell>>,
        relations: BTreeMap<Mor, RelPairs>,
        level: Level,
    ) -> Result<Self, StructureError> {
        let mut seen: BTreeMap<&Cell, &Obj> = BTreeMap::new();
        for (o, cells) in &carriers {
            if !base.has_object(o) {
                return Err(StructureError::UnknownObject(o.clone()));
            }
            for c in cells {
                if let Some(prev) = seen.insert(c, o) {
                    return Err(StructureError::DuplicateCell {
                        cell: c.clone(),
                        first: prev.clone(),
                        second: o.clone(),
                    });
                }
            }
        }
        let mut full_carriers = carriers;
        for o in base.objects() {
            full_carriers.entry(o).or_default();
        }
        let mut full_relations = relations;
        for f in base.morphisms() {
            full_relations.entry(f).or_default();
        }
        for f in full_relations.keys() {
            if !base.has_morphism(f) {
                return Err(StructureError::UnknownMorphism(f.clone()));
            }
        }
        let s = RelStructure { base, carriers: full_carriers, relations: full_relations, level };
        if let Some(v) = s.membership_violations().into_iter().next() {
            return Err(StructureError::LevelViolation { level: Level::Family, first: v.to_string() });
        }
        Ok(s)
    }

    /// The empty structure over a base.
    pub fn empty(base: BaseCategory, level: Level) -> Self {
        RelStructure::new(base, BTreeMap::new(), BTreeMap::new(), level)
            .expect("empty structure is well-formed")
    }

    pub fn base(&self) -> &BaseCategory {
        &self.base
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn with_level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }

    pub fn carrier(&self, o: &Obj) -> &BTreeSet<Cell> {
        static EMPTY: BTreeSet<Cell> = BTreeSet::new();
        self.carriers.get(o).unwrap_or(&EMPTY)
    }

    pub fn carriers(&self) -> &BTreeMap<Obj, BTreeSet<Cell>> {
        &self.carriers
    }

    pub fn relation(&self, f: &Mor) -> &RelPairs {
        static EMPTY: RelPairs = BTreeSet::new();
        self.relations.get(f).unwrap_or(&EMPTY)
    }

    pub fn relations(&self) -> &BTreeMap<Mor, RelPairs> {
        &self.relations
    }

    pub fn has_pair(&self, f: &Mor, x: &Cell, y: &Cell) -> bool {
        self.relation(f).contains(&(x.clone(), y.clone()))
    }

    /// All cells with their objects, sorted by object then name.
    pub fn cells(&self) -> Vec<(Obj, Cell)> {
        self.carriers
            .iter()
            .flat_map(|(o, cs)| cs.iter().map(move |c| (o.clone(), c.clone())))
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.carriers.values().map(|cs| cs.len()).sum()
    }

    /// The object whose carrier contains `cell`.
    pub fn object_of(&self, cell: &Cell) -> Option<&Obj> {
        self.carriers.iter().find(|(_, cs)| cs.contains(cell)).map(|(o, _)| o)
    }

    /// Numeric dimension of a cell, for cube-like bases.
    pub fn dim_of(&self, cell: &Cell) -> Option<usize> {
        self.base.object_dim(self.object_of(cell)?)
    }

    /// All relation instances `(f, x, y)` sorted, identities included.
    pub fn instances(&self) -> Vec<(Mor, Cell, Cell)> {
        self.relations
            .iter()
            .flat_map(|(f, pairs)| pairs.iter().map(move |(x, y)| (f.clone(), x.clone(), y.clone())))
            .collect()
    }

    pub(crate) fn insert_pair(&mut self, f: &Mor, x: Cell, y: Cell) {
        self.relations.entry(f.clone()).or_default().insert((x, y));
    }

    fn membership_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (f, pairs) in &self.relations {
            let (cod, dom) = match (self.base.cod(f), self.base.dom(f)) {
                (Ok(c), Ok(d)) => (c, d),
                _ => continue,
            };
            for (x, y) in pairs {
                if !self.carrier(&cod).contains(x) {
                    out.push(Violation::EndpointNotInCarrier {
                        mor: f.clone(),
                        cell: x.clone(),
                        expected: cod.clone(),
                    });
                }
                if !self.carrier(&dom).contains(y) {
                    out.push(Violation::EndpointNotInCarrier {
                        mor: f.clone(),
                        cell: y.clone(),
                        expected: dom.clone(),
                    });
                }
            }
        }
        out
    }

    fn lax_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for o in self.base.objects() {
            let id = self.base.identity(&o).expect("object enumerated from base");
            for c in self.carrier(&o) {
                if !self.has_pair(&id, c, c) {
                    out.push(Violation::MissingIdentity { obj: o.clone(), cell: c.clone() });
                }
            }
        }
        for (f, g) in self.base.composable_pairs() {
            let h = self.base.compose(&f, &g).expect("composable");
            let rel_g = self.relation(&g);
            let mut by_first: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
            for (y, z) in rel_g {
                by_first.entry(y).or_default().push(z);
            }
            for (x, y) in self.relation(&f) {
                if let Some(zs) = by_first.get(y) {
                    for z in zs {
                        if !self.has_pair(&h, x, z) {
                            out.push(Violation::MissingComposite {
                                f: f.clone(),
                                g: g.clone(),
                                x: x.clone(),
                                y: y.clone(),
                                z: (*z).clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn single_valued_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (f, pairs) in &self.relations {
            let mut faces: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
            for (x, y) in pairs {
                faces.entry(x).or_default().push(y);
            }
            for (x, ys) in faces {
                for pair in ys.windows(2) {
                    out.push(Violation::MultiValued {
                        f: f.clone(),
                        x: x.clone(),
                        y: pair[0].clone(),
                        z: pair[1].clone(),
                    });
                }
            }
        }
        out
    }

    fn shared_face_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (f, pairs) in &self.relations {
            let mut cofibers: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
            for (x, y) in pairs {
                cofibers.entry(y).or_default().push(x);
            }
            for (z, xs) in cofibers {
                for pair in xs.windows(2) {
                    out.push(Violation::SharedFace {
                        f: f.clone(),
                        x: pair[0].clone(),
                        y: pair[1].clone(),
                        z: z.clone(),
                    });
                }
            }
        }
        out
    }

    fn totality_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for f in self.base.morphisms() {
            let cod = self.base.cod(&f).expect("enumerated");
            let pairs = self.relation(&f);
            for x in self.carrier(&cod) {
                if !pairs.iter().any(|(a, _)| a == x) {
                    out.push(Violation::NotTotal { f: f.clone(), x: x.clone() });
                }
            }
        }
        out
    }

    /// Checks exactly the axiom family of the requested level, with the
    /// default face-functional reading of partiality. Reports violations,
    /// never fails.
    pub fn validate_level(&self, level: Level) -> ValidationReport {
        self.validate_level_with(level, PartialReading::default())
    }

    /// [`validate_level`](Self::validate_level) with an explicit reading of
    /// the partiality axiom.
    pub fn validate_level_with(&self, level: Level, reading: PartialReading) -> ValidationReport {
        let mut violations = self.membership_violations();
        if level >= Level::Lax {
            violations.extend(self.lax_violations());
        }
        if level >= Level::Partial {
            match reading {
                PartialReading::FaceFunctional => violations.extend(self.single_valued_violations()),
                PartialReading::CofaceFunctional => violations.extend(self.shared_face_violations()),
            }
        }
        if level == Level::Functional {
            if reading == PartialReading::CofaceFunctional {
                violations.extend(self.single_valued_violations());
            }
            violations.extend(self.totality_violations());
        }
        ValidationReport { violations }
    }

    /// Errors unless the structure validates at its declared level.
    pub fn check_declared(&self) -> Result<(), StructureError> {
        let report = self.validate_level(self.level);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(StructureError::LevelViolation { level: self.level, first: v.to_string() }),
        }
    }

    /// For functional structures: the unique `f`-face of `x`.
    pub fn apply(&self, f: &Mor, x: &Cell) -> Option<&Cell> {
        self.relation(f).iter().find(|(a, _)| a == x).map(|(_, y)| y)
    }

    /// The full substructure induced by a cell subset: carriers restricted,
    /// relations all pairs with both endpoints in the subset. The level
    /// degrades to lax at most, since totality is not preserved.
    pub fn full_substructure(&self, cells: &BTreeSet<Cell>) -> Result<RelStructure, StructureError> {
        for c in cells {
            if self.object_of(c).is_none() {
                return Err(StructureError::UnknownCell(c.clone()));
            }
        }
        let carriers = self
            .carriers
            .iter()
            .map(|(o, cs)| (o.clone(), cs.intersection(cells).cloned().collect()))
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|(f, pairs)| {
                (
                    f.clone(),
                    pairs
                        .iter()
                        .filter(|(x, y)| cells.contains(x) && cells.contains(y))
                        .cloned()
                        .collect(),
                )
            })
            .collect();
        RelStructure::new(self.base.clone(), carriers, relations, self.level.min(Level::Lax))
    }
}

/// The representable presheaf of an object: the carrier at `d` is
/// `hom(d, c)` and the action is precomposition. Returned at functional
/// level; cells are named by the morphisms themselves.
pub fn representable(base: &BaseCategory, c: &Obj) -> Result<RelStructure, StructureError> {
    if !base.has_object(c) {
        return Err(StructureError::UnknownObject(c.clone()));
    }
    let mut carriers: BTreeMap<Obj, BTreeSet<Cell>> = BTreeMap::new();
    for d in base.objects() {
        carriers.insert(d.clone(), base.hom(&d, c).into_iter().collect());
    }
    let mut relations: BTreeMap<Mor, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let d = base.cod(&f)?;
        let mut pairs = RelPairs::new();
        for u in base.hom(&d, c) {
            let v = base.compose(&u, &f)?;
            pairs.insert((u, v));
        }
        relations.insert(f, pairs);
    }
    RelStructure::new(base.clone(), carriers, relations, Level::Functional)
}

/// Report of [`RelMorphism::check`]: relation pairs not preserved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorphismReport {
    /// Instances `(f, x, y)` of the source whose image is not related.
    pub broken: Vec<(Mor, Cell, Cell)>,
}

impl MorphismReport {
    pub fn ok(&self) -> bool {
        self.broken.is_empty()
    }
}

/// An oplax natural transformation: one function per object, required to
/// preserve every relation pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelMorphism {
    source: RelStructure,
    target: RelStructure,
    components: Components,
}

impl RelMorphism {
    /// Builds a candidate morphism, checking that the bases agree and every
    /// component is a total function into the target carrier. Relation
    /// preservation is a separate question; see [`check`](Self::check).
    pub fn new(
        source: RelStructure,
        target: RelStructure,
        components: Components,
    ) -> Result<Self, StructureError> {
        if source.base() != target.base() {
            return Err(StructureError::BaseMismatch);
        }
        for (o, cells) in source.carriers() {
            for c in cells {
                match components.get(o).and_then(|m| m.get(c)) {
                    None => {
                        return Err(StructureError::PartialComponent { obj: o.clone(), cell: c.clone() })
                    }
                    Some(img) if !target.carrier(o).contains(img) => {
                        return Err(StructureError::BadComponentImage {
                            obj: o.clone(),
                            cell: c.clone(),
                            image: img.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        let components = components
            .into_iter()
            .filter(|(o, _)| !source.carrier(o).is_empty())
            .map(|(o, m)| {
                let m = m.into_iter().filter(|(c, _)| source.carrier(&o).contains(c)).collect();
                (o, m)
            })
            .collect();
        Ok(RelMorphism { source, target, components })
    }

    pub fn identity(p: &RelStructure) -> Self {
        let components = p
            .carriers()
            .iter()
            .map(|(o, cs)| (o.clone(), cs.iter().map(|c| (c.clone(), c.clone())).collect()))
            .collect();
        RelMorphism::new(p.clone(), p.clone(), components).expect("identity is total")
    }

    pub fn source(&self) -> &RelStructure {
        &self.source
    }

    pub fn target(&self) -> &RelStructure {
        &self.target
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn apply(&self, cell: &Cell) -> Option<&Cell> {
        let o = self.source.object_of(cell)?;
        self.components.get(o)?.get(cell)
    }

    /// True iff every relation pair of the source is preserved; the report
    /// lists the witnesses that are not.
    pub fn check(&self) -> MorphismReport {
        let mut broken = Vec::new();
        for (f, x, y) in self.source.instances() {
            let fx = self.apply(&x).expect("component total");
            let fy = self.apply(&y).expect("component total");
            if !self.target.has_pair(&f, fx, fy) {
                broken.push((f, x, y));
            }
        }
        MorphismReport { broken }
    }

    pub fn is_morphism(&self) -> bool {
        self.check().ok()
    }

    /// Composite `other ∘ self` (first `self`, then `other`).
    pub fn then(&self, other: &RelMorphism) -> Result<RelMorphism, StructureError> {
        if self.target != other.source {
            return Err(StructureError::BaseMismatch);
        }
        let components = self
            .components
            .iter()
            .map(|(o, m)| {
                let m = m
                    .iter()
                    .map(|(c, v)| (c.clone(), other.apply(v).expect("component total").clone()))
                    .collect();
                (o.clone(), m)
            })
            .collect();
        RelMorphism::new(self.source.clone(), other.target.clone(), components)
    }

    /// Injective in every component.
    pub fn is_mono(&self) -> bool {
        self.components.iter().all(|(_, m)| {
            let images: BTreeSet<&Cell> = m.values().collect();
            images.len() == m.len()
        })
    }

    /// Surjective in every component.
    pub fn is_pointwise_surjective(&self) -> bool {
        self.target.carriers().iter().all(|(o, cells)| {
            let images: BTreeSet<&Cell> =
                self.components.get(o).map(|m| m.values().collect()).unwrap_or_default();
            cells.iter().all(|c| images.contains(c))
        })
    }

    /// Injective and relation-reflecting: a related pair of images comes
    /// from a related pair. This is the model-theoretic notion of embedding
    /// and matches inclusions of full substructures.
    pub fn is_embedding(&self) -> bool {
        if !self.is_mono() {
            return false;
        }
        for (f, pairs) in self.source.relations().iter() {
            let cod = match self.source.base().cod(f) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let dom = self.source.base().dom(f).expect("valid morphism");
            for x in self.source.carrier(&cod) {
                for y in self.source.carrier(&dom) {
                    let fx = self.apply(x).expect("total");
                    let fy = self.apply(y).expect("total");
                    if self.target.has_pair(f, fx, fy) && !pairs.contains(&(x.clone(), y.clone())) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Inclusion of the full substructure on `cells`.
    pub fn substructure_inclusion(
        p: &RelStructure,
        cells: &BTreeSet<Cell>,
    ) -> Result<RelMorphism, StructureError> {
        let sub = p.full_substructure(cells)?;
        let components = sub
            .carriers()
            .iter()
            .map(|(o, cs)| (o.clone(), cs.iter().map(|c| (c.clone(), c.clone())).collect()))
            .collect();
        RelMorphism::new(sub, p.clone(), components)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::base::{cube_category, graph_category};

    pub(crate) fn structure(
        base: BaseCategory,
        carriers: &[(&str, &[&str])],
        relations: &[(&str, &[(&str, &str)])],
        level: Level,
    ) -> RelStructure {
        let carriers = carriers
            .iter()
            .map(|(o, cs)| (o.to_string(), cs.iter().map(|c| c.to_string()).collect()))
            .collect();
        let relations = relations
            .iter()
            .map(|(f, ps)| {
                (
                    f.to_string(),
                    ps.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
                )
            })
            .collect();
        RelStructure::new(base, carriers, relations, level).unwrap()
    }

    /// Square (C): edges a (top) and b (right), vertices s and t, square
    /// alpha; s is reachable from alpha only through the composite "--".
    pub(crate) fn example_c() -> RelStructure {
        structure(
            cube_category(2),
            &[("0", &["s", "t"]), ("1", &["a", "b"]), ("2", &["alpha"])],
            &[
                ("", &[("s", "s"), ("t", "t")]),
                ("0", &[("a", "a"), ("b", "b")]),
                ("00", &[("alpha", "alpha")]),
                ("+", &[("a", "t"), ("b", "t")]),
                ("0+", &[("alpha", "a")]),
                ("+0", &[("alpha", "b")]),
                ("--", &[("alpha", "s")]),
                ("++", &[("alpha", "t")]),
            ],
            Level::Lax,
        )
    }

    /// The blowup of the crossing graph: four vertices x_ij, four edges,
    /// a_i targeting {x_i1, x_i2} and b_j sourced at {x_1j, x_2j}, nothing
    /// else.
    pub(crate) fn intro_blowup_h() -> RelStructure {
        structure(
            graph_category(),
            &[
                ("0", &["x11", "x12", "x21", "x22"]),
                ("1", &["a1", "a2", "b1", "b2"]),
            ],
            &[
                (
                    "+",
                    &[("a1", "x11"), ("a1", "x12"), ("a2", "x21"), ("a2", "x22")],
                ),
                (
                    "-",
                    &[("b1", "x11"), ("b1", "x21"), ("b2", "x12"), ("b2", "x22")],
                ),
            ],
            Level::Family,
        )
    }

    /// The intro relational graph: edge a with no source and two targets.
    pub(crate) fn intro_graph() -> RelStructure {
        structure(
            graph_category(),
            &[("0", &["y1", "y2", "z1", "z2"]), ("1", &["a", "b1", "b2"])],
            &[
                ("", &[("y1", "y1"), ("y2", "y2"), ("z1", "z1"), ("z2", "z2")]),
                ("0", &[("a", "a"), ("b1", "b1"), ("b2", "b2")]),
                ("-", &[("b1", "y1"), ("b2", "y2")]),
                ("+", &[("a", "y1"), ("a", "y2"), ("b1", "z1"), ("b2", "z2")]),
            ],
            Level::Family,
        )
    }

    #[test]
    fn example_c_is_lax_but_not_functional() {
        let c = example_c();
        assert!(c.validate_level(Level::Lax).ok());
        let report = c.validate_level(Level::Functional);
        assert!(!report.ok());
        let a = "a".to_string();
        assert!(report.violations.iter().any(|v| v.cells().contains(&&a)));
    }

    #[test]
    fn intro_graph_fails_partial_at_a() {
        let h = intro_graph();
        assert!(h.validate_level(Level::Family).ok());
        assert!(h.validate_level(Level::Lax).ok());
        let report = h.validate_level(Level::Partial);
        assert_eq!(
            report.violations,
            vec![Violation::MultiValued {
                f: "+".into(),
                x: "a".into(),
                y: "y1".into(),
                z: "y2".into(),
            }]
        );
        // transposed reading: b1, b2 do not share faces, but a's two targets
        // are fine there
        assert!(h
            .validate_level_with(Level::Partial, PartialReading::CofaceFunctional)
            .ok());
    }

    #[test]
    fn empty_structure_passes_every_level() {
        let e = RelStructure::empty(graph_category(), Level::Functional);
        for level in [Level::Family, Level::Lax, Level::Partial, Level::Functional] {
            assert!(e.validate_level(level).ok());
        }
    }

    #[test]
    fn levels_are_monotone() {
        for p in [example_c(), intro_graph(), representable(&cube_category(2), &"2".into()).unwrap()] {
            let mut seen_failure = false;
            for level in [Level::Family, Level::Lax, Level::Partial, Level::Functional] {
                let ok = p.validate_level(level).ok();
                if seen_failure {
                    assert!(!ok, "level checks must be monotone");
                }
                seen_failure = !ok;
            }
        }
    }

    #[test]
    fn representable_square_counts() {
        let y2 = representable(&cube_category(2), &"2".into()).unwrap();
        assert_eq!(y2.carrier(&"0".into()).len(), 4);
        assert_eq!(y2.carrier(&"1".into()).len(), 4);
        assert_eq!(y2.carrier(&"2".into()).len(), 1);
        assert!(y2.validate_level(Level::Functional).ok());
    }

    #[test]
    fn identity_is_a_morphism_and_embedding() {
        let c = example_c();
        let id = RelMorphism::identity(&c);
        assert!(id.is_morphism());
        assert!(id.is_embedding());
        assert!(id.is_mono());
        assert!(id.is_pointwise_surjective());
    }

    /// point ⊔ edge -> pointed edge is a monomorphism but not an embedding.
    #[test]
    fn appendix_mono_is_not_an_embedding() {
        let source = structure(
            graph_category(),
            &[("0", &["v"]), ("1", &["e"])],
            &[("", &[("v", "v")]), ("0", &[("e", "e")])],
            Level::Lax,
        );
        let target = structure(
            graph_category(),
            &[("0", &["w"]), ("1", &["f"])],
            &[("", &[("w", "w")]), ("0", &[("f", "f")]), ("-", &[("f", "w")])],
            Level::Lax,
        );
        let alpha = RelMorphism::new(
            source.clone(),
            target.clone(),
            BTreeMap::from([
                ("0".to_string(), BTreeMap::from([("v".to_string(), "w".to_string())])),
                ("1".to_string(), BTreeMap::from([("e".to_string(), "f".to_string())])),
            ]),
        )
        .unwrap();
        assert!(alpha.is_morphism());
        assert!(alpha.is_mono());
        assert!(!alpha.is_embedding());

        // the same underlying map in the opposite direction does not even
        // preserve the relation
        let beta = RelMorphism::new(
            target,
            source,
            BTreeMap::from([
                ("0".to_string(), BTreeMap::from([("w".to_string(), "v".to_string())])),
                ("1".to_string(), BTreeMap::from([("f".to_string(), "e".to_string())])),
            ]),
        )
        .unwrap();
        assert!(!beta.is_morphism());
    }

    #[test]
    fn fold_of_two_edges_is_pointwise_surjective_but_not_mono() {
        let two = structure(
            graph_category(),
            &[("0", &["u1", "v1", "u2", "v2"]), ("1", &["e1", "e2"])],
            &[
                ("", &[("u1", "u1"), ("v1", "v1"), ("u2", "u2"), ("v2", "v2")]),
                ("0", &[("e1", "e1"), ("e2", "e2")]),
                ("-", &[("e1", "u1"), ("e2", "u2")]),
                ("+", &[("e1", "v1"), ("e2", "v2")]),
            ],
            Level::Lax,
        );
        let one = structure(
            graph_category(),
            &[("0", &["u", "v"]), ("1", &["e"])],
            &[
                ("", &[("u", "u"), ("v", "v")]),
                ("0", &[("e", "e")]),
                ("-", &[("e", "u")]),
                ("+", &[("e", "v")]),
            ],
            Level::Lax,
        );
        let fold = RelMorphism::new(
            two,
            one,
            BTreeMap::from([
                (
                    "0".to_string(),
                    BTreeMap::from([
                        ("u1".to_string(), "u".to_string()),
                        ("u2".to_string(), "u".to_string()),
                        ("v1".to_string(), "v".to_string()),
                        ("v2".to_string(), "v".to_string()),
                    ]),
                ),
                (
                    "1".to_string(),
                    BTreeMap::from([
                        ("e1".to_string(), "e".to_string()),
                        ("e2".to_string(), "e".to_string()),
                    ]),
                ),
            ]),
        )
        .unwrap();
        assert!(fold.is_morphism());
        assert!(fold.is_pointwise_surjective());
        assert!(!fold.is_mono());
    }

    #[test]
    fn full_substructure_of_everything_is_identity() {
        let c = example_c();
        let all: BTreeSet<Cell> = c.cells().into_iter().map(|(_, c)| c).collect();
        let sub = c.full_substructure(&all).unwrap();
        assert_eq!(sub.carriers(), c.carriers());
        assert_eq!(sub.relations(), c.relations());
        assert!(c.full_substructure(&BTreeSet::from(["nope".to_string()])).is_err());
    }

    #[test]
    fn closure_of_the_top_square_has_nine_cells() {
        // the face-closure of the 2-cube inside the closed square, computed
        // as a full substructure, is the whole square
        let y2 = representable(&cube_category(2), &"2".into()).unwrap();
        let lax = y2.clone().with_level(Level::Lax);
        let mut downset: BTreeSet<Cell> = BTreeSet::new();
        let top = "00".to_string();
        for (_f, x, y) in lax.instances() {
            if x == top {
                downset.insert(y.clone());
            }
        }
        downset.insert(top);
        assert_eq!(downset.len(), 9);
        let sub = lax.full_substructure(&downset).unwrap();
        assert_eq!(sub.cell_count(), 9);
        let incl = RelMorphism::substructure_inclusion(&lax, &downset).unwrap();
        assert!(incl.is_morphism());
        assert!(incl.is_embedding());
    }

    #[test]
    fn single_vertex_substructure() {
        let h = intro_graph();
        let sub = h.full_substructure(&BTreeSet::from(["y1".to_string()])).unwrap();
        assert_eq!(sub.cell_count(), 1);
        assert_eq!(sub.relation(&"".to_string()).len(), 1);
        assert_eq!(sub.relation(&"+".to_string()).len(), 0);
    }

    #[test]
    fn duplicate_cells_are_rejected() {
        let r = RelStructure::new(
            graph_category(),
            BTreeMap::from([
                ("0".to_string(), BTreeSet::from(["x".to_string()])),
                ("1".to_string(), BTreeSet::from(["x".to_string()])),
            ]),
            BTreeMap::new(),
            Level::Family,
        );
        assert!(matches!(r, Err(StructureError::DuplicateCell { .. })));
    }

    #[test]
    fn partial_component_is_an_error() {
        let h = intro_graph();
        let r = RelMorphism::new(h.clone(), h, BTreeMap::new());
        assert!(matches!(r, Err(StructureError::PartialComponent { .. })));
    }
}

//! Categories of elements, the span-shaped extension used by realization,
//! and the equivalence between presheaves on the category of elements and
//! discrete fibrations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::base::{BaseCategory, Mor, Obj};
use crate::rel::{Cell, Components, Level, RelMorphism, RelPairs, RelStructure, StructureError};
use crate::transforms::is_discrete_fibration;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("morphism is not a discrete fibration ({failures} unique-lift failures)")]
    NotAFibration { failures: usize },
    #[error("fiber refers to unknown base cell {0:?}")]
    UnknownBaseCell(Cell),
    #[error("fiber element {0:?} appears in two fibers; fiber elements must be globally unique")]
    DuplicateElement(String),
    #[error("transition for arrow ({mor}, {big}, {small}) is {problem}")]
    BadTransition { mor: Mor, big: Cell, small: Cell, problem: String },
    #[error("missing transition for arrow ({mor}, {big}, {small})")]
    MissingTransition { mor: Mor, big: Cell, small: Cell },
    #[error("functoriality fails composing ({f}, {x}, {y}) after ({g}, {y2}, {z}) on element {elem:?}")]
    NotFunctorial { f: Mor, x: Cell, y: Cell, g: Mor, y2: Cell, z: Cell, elem: String },
    #[error("{0}")]
    Structure(#[from] StructureError),
}

/// The span category of a base: one object per base object, one per base
/// morphism, and for each morphism exactly the two projections to its
/// codomain and domain. No two non-identity morphisms are composable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanCategory {
    pub base: BaseCategory,
}

/// Objects of the span category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpanObject {
    Object(Obj),
    Morphism(Mor),
}

/// Non-identity morphisms of the span category: `End0` is the projection
/// `f -> cod(f)`, `End1` the projection `f -> dom(f)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpanArrow {
    End0(Mor),
    End1(Mor),
}

impl SpanCategory {
    pub fn new(base: BaseCategory) -> Self {
        SpanCategory { base }
    }

    pub fn objects(&self) -> Vec<SpanObject> {
        let mut out: Vec<SpanObject> =
            self.base.objects().into_iter().map(SpanObject::Object).collect();
        out.extend(self.base.morphisms().into_iter().map(SpanObject::Morphism));
        out
    }

    pub fn arrows(&self) -> Vec<SpanArrow> {
        let mut out = Vec::new();
        for f in self.base.morphisms() {
            out.push(SpanArrow::End0(f.clone()));
            out.push(SpanArrow::End1(f));
        }
        out
    }

    pub fn source(&self, a: &SpanArrow) -> SpanObject {
        match a {
            SpanArrow::End0(f) | SpanArrow::End1(f) => SpanObject::Morphism(f.clone()),
        }
    }

    pub fn target(&self, a: &SpanArrow) -> SpanObject {
        match a {
            SpanArrow::End0(f) => SpanObject::Object(self.base.cod(f).expect("valid morphism")),
            SpanArrow::End1(f) => SpanObject::Object(self.base.dom(f).expect("valid morphism")),
        }
    }

    /// No two non-identity arrows are composable: every arrow starts at a
    /// morphism-object and ends at an object-object.
    pub fn composable_nonidentity_pairs(&self) -> usize {
        let arrows = self.arrows();
        arrows
            .iter()
            .flat_map(|a| arrows.iter().map(move |b| (a, b)))
            .filter(|(a, b)| self.target(b) == self.source(a))
            .count()
    }
}

/// An arrow of the category of elements: `(small) -> (big)` witnessed by a
/// base morphism `f` with `big.1 ->_f small.1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ElArrow {
    pub mor: Mor,
    /// `(c, x)`: the target object of the arrow.
    pub big: (Obj, Cell),
    /// `(d, y)`: the source object of the arrow.
    pub small: (Obj, Cell),
}

/// The category of elements of a structure: objects are `(object, cell)`
/// pairs, arrows are witnessed face relations, composition mirrors the base
/// and exists by laxity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementsCategory {
    pub objects: Vec<(Obj, Cell)>,
    pub arrows: Vec<ElArrow>,
}

/// The category of elements of `P`.
pub fn elements_category(p: &RelStructure) -> ElementsCategory {
    let objects = p.cells();
    let mut arrows = Vec::new();
    for (f, pairs) in p.relations() {
        let c = p.base().cod(&f.clone()).expect("valid morphism");
        let d = p.base().dom(&f.clone()).expect("valid morphism");
        for (x, y) in pairs {
            arrows.push(ElArrow {
                mor: f.clone(),
                big: (c.clone(), x.clone()),
                small: (d.clone(), y.clone()),
            });
        }
    }
    arrows.sort();
    ElementsCategory { objects, arrows }
}

impl ElementsCategory {
    /// Composite of `second : (e,z) -> (d,y)` after `first : (d,y) -> (c,x)`
    /// in the structure `p`; `None` when the composite pair is absent (never
    /// for lax structures).
    pub fn compose(&self, p: &RelStructure, first: &ElArrow, second: &ElArrow) -> Option<ElArrow> {
        if first.small != second.big {
            return None;
        }
        let h = p.base().compose(&first.mor, &second.mor).ok()?;
        if !p.has_pair(&h, &first.big.1, &second.small.1) {
            return None;
        }
        Some(ElArrow { mor: h, big: first.big.clone(), small: second.small.clone() })
    }
}

/// The extension of a structure to the span category: its cells plus one
/// object per relation instance, each instance mapping to its two endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedElements {
    pub cells: Vec<(Obj, Cell)>,
    /// `(f, x, y)` for each pair `x ->_f y`, identities included.
    pub instances: Vec<(Mor, Cell, Cell)>,
}

impl ExtendedElements {
    pub fn object_count(&self) -> usize {
        self.cells.len() + self.instances.len()
    }

    /// Two morphisms per instance.
    pub fn arrow_count(&self) -> usize {
        2 * self.instances.len()
    }
}

/// The indexing category of the realization colimit: one object per cell and
/// one per relation instance (identity instances included), with the two
/// projection arrows out of each instance.
pub fn extended_elements(p: &RelStructure) -> ExtendedElements {
    ExtendedElements { cells: p.cells(), instances: p.instances() }
}

/// A presheaf on (the opposite of) the category of elements of a base
/// structure: a fiber per element and a transition along every arrow,
/// functorially. Fiber elements are globally unique strings so that the
/// round trip through discrete fibrations is the strict identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementsPresheaf {
    pub base: RelStructure,
    pub fibers: BTreeMap<(Obj, Cell), BTreeSet<String>>,
    /// Keyed by `(f, x, y)` for the arrow `(d, y) -> (c, x)`; the map sends
    /// the fiber over `(d, y)` into the fiber over `(c, x)`.
    pub transitions: BTreeMap<(Mor, Cell, Cell), BTreeMap<String, String>>,
}

impl ElementsPresheaf {
    pub fn fiber(&self, o: &Obj, x: &Cell) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.fibers.get(&(o.clone(), x.clone())).unwrap_or(&EMPTY)
    }

    pub fn total_elements(&self) -> usize {
        self.fibers.values().map(|f| f.len()).sum()
    }

    /// Validates totality of fibers and transitions, identity transitions,
    /// global uniqueness of elements, and functoriality over every
    /// composable pair of arrows.
    pub fn validate(&self) -> Result<(), FibrationError> {
        let elements = elements_category(&self.base);
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        for ((o, x), fiber) in &self.fibers {
            if !self.base.carrier(o).contains(x) {
                return Err(FibrationError::UnknownBaseCell(x.clone()));
            }
            for e in fiber {
                if !seen.insert(e) {
                    return Err(FibrationError::DuplicateElement(e.clone()));
                }
            }
        }
        for arrow in &elements.arrows {
            let key = (arrow.mor.clone(), arrow.big.1.clone(), arrow.small.1.clone());
            let map = self.transitions.get(&key).ok_or_else(|| FibrationError::MissingTransition {
                mor: key.0.clone(),
                big: key.1.clone(),
                small: key.2.clone(),
            })?;
            let src = self.fiber(&arrow.small.0, &arrow.small.1);
            let dst = self.fiber(&arrow.big.0, &arrow.big.1);
            for e in src {
                match map.get(e) {
                    None => {
                        return Err(FibrationError::BadTransition {
                            mor: key.0,
                            big: key.1,
                            small: key.2,
                            problem: format!("not total: no image for {e:?}"),
                        })
                    }
                    Some(img) if !dst.contains(img) => {
                        return Err(FibrationError::BadTransition {
                            mor: key.0,
                            big: key.1,
                            small: key.2,
                            problem: format!("image {img:?} is outside the target fiber"),
                        })
                    }
                    Some(_) => {}
                }
            }
            if self.base.base().is_identity(&arrow.mor) && arrow.big == arrow.small {
                if src.iter().any(|e| map.get(e) != Some(e)) {
                    return Err(FibrationError::BadTransition {
                        mor: key.0,
                        big: key.1,
                        small: key.2,
                        problem: "identity arrow must act as the identity".into(),
                    });
                }
            }
        }
        // functoriality on all composable pairs
        for first in &elements.arrows {
            for second in &elements.arrows {
                if first.small != second.big {
                    continue;
                }
                let composite = match elements.compose(&self.base, first, second) {
                    Some(c) => c,
                    None => continue,
                };
                let m_first =
                    &self.transitions[&(first.mor.clone(), first.big.1.clone(), first.small.1.clone())];
                let m_second = &self.transitions
                    [&(second.mor.clone(), second.big.1.clone(), second.small.1.clone())];
                let m_comp = &self.transitions
                    [&(composite.mor.clone(), composite.big.1.clone(), composite.small.1.clone())];
                for e in self.fiber(&second.small.0, &second.small.1) {
                    let step = &m_first[&m_second[e]];
                    if m_comp.get(e) != Some(step) {
                        return Err(FibrationError::NotFunctorial {
                            f: first.mor.clone(),
                            x: first.big.1.clone(),
                            y: first.small.1.clone(),
                            g: second.mor.clone(),
                            y2: second.big.1.clone(),
                            z: second.small.1.clone(),
                            elem: e.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The total structure of a presheaf on the category of elements: carriers
/// are disjoint unions of fibers, a pair `(a, b)` relates along `f` exactly
/// when `b` sits over `y`, `a` over `x`, `x ->_f y`, and the transition of
/// that arrow sends `b` to `a`. Returns the structure with the projection,
/// which is a discrete fibration.
pub fn phi(presheaf: &ElementsPresheaf) -> Result<(RelStructure, RelMorphism), FibrationError> {
    presheaf.validate()?;
    let base_structure = &presheaf.base;
    let mut carriers: BTreeMap<Obj, BTreeSet<Cell>> = BTreeMap::new();
    let mut projection: Components = Components::new();
    for ((o, x), fiber) in &presheaf.fibers {
        let entry = carriers.entry(o.clone()).or_default();
        let proj = projection.entry(o.clone()).or_default();
        for e in fiber {
            entry.insert(e.clone());
            proj.insert(e.clone(), x.clone());
        }
    }
    let mut relations: BTreeMap<Mor, RelPairs> = BTreeMap::new();
    for ((f, _x, _y), map) in &presheaf.transitions {
        let entry = relations.entry(f.clone()).or_default();
        for (b, a) in map {
            entry.insert((a.clone(), b.clone()));
        }
    }
    let total = RelStructure::new(base_structure.base().clone(), carriers, relations, Level::Lax)?;
    debug_assert!(total.validate_level(Level::Lax).ok());
    let proj = RelMorphism::new(total.clone(), base_structure.clone(), projection)?;
    debug_assert!(is_discrete_fibration(&proj).ok());
    Ok((total, proj))
}

/// Inverse construction: fibers are preimages of the projection and
/// transitions pick the unique lifts. Errors unless the morphism is a
/// discrete fibration.
pub fn psi(alpha: &RelMorphism) -> Result<ElementsPresheaf, FibrationError> {
    let report = is_discrete_fibration(alpha);
    if !report.ok() {
        return Err(FibrationError::NotAFibration { failures: report.failures.len() });
    }
    let base_structure = alpha.target().clone();
    let upstairs = alpha.source();
    let mut fibers: BTreeMap<(Obj, Cell), BTreeSet<String>> = BTreeMap::new();
    for (o, x) in base_structure.cells() {
        fibers.insert((o, x), BTreeSet::new());
    }
    for (o, cells) in upstairs.carriers() {
        for c in cells {
            let img = alpha.apply(c).expect("total");
            fibers
                .get_mut(&(o.clone(), img.clone()))
                .expect("image lies in the base")
                .insert(c.clone());
        }
    }
    let mut transitions: BTreeMap<(Mor, Cell, Cell), BTreeMap<String, String>> = BTreeMap::new();
    for (f, pairs) in base_structure.relations() {
        let c = base_structure.base().cod(f).expect("valid");
        let d = base_structure.base().dom(f).expect("valid");
        for (x, y) in pairs {
            let mut map = BTreeMap::new();
            for b in &fibers[&(d.clone(), y.clone())] {
                let lift = fibers[&(c.clone(), x.clone())]
                    .iter()
                    .find(|a| upstairs.has_pair(f, a, b))
                    .expect("fibration provides the unique lift");
                map.insert(b.clone(), lift.clone());
            }
            transitions.insert((f.clone(), x.clone(), y.clone()), map);
        }
    }
    Ok(ElementsPresheaf { base: base_structure, fibers, transitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::graph_category;
    use crate::transforms::close_composition;

    fn full_edge() -> RelStructure {
        RelStructure::new(
            graph_category(),
            BTreeMap::from([
                ("0".to_string(), BTreeSet::from(["s".to_string(), "t".to_string()])),
                ("1".to_string(), BTreeSet::from(["e".to_string()])),
            ]),
            BTreeMap::from([
                (
                    "".to_string(),
                    BTreeSet::from([("s".to_string(), "s".to_string()), ("t".to_string(), "t".to_string())]),
                ),
                ("0".to_string(), BTreeSet::from([("e".to_string(), "e".to_string())])),
                ("-".to_string(), BTreeSet::from([("e".to_string(), "s".to_string())])),
                ("+".to_string(), BTreeSet::from([("e".to_string(), "t".to_string())])),
            ]),
            Level::Lax,
        )
        .unwrap()
    }

    #[test]
    fn span_category_shape() {
        let span = SpanCategory::new(graph_category());
        // 2 objects + 4 morphisms of the base
        assert_eq!(span.objects().len(), 6);
        // two non-identity arrows out of each morphism-object
        assert_eq!(span.arrows().len(), 8);
        // none are composable
        assert_eq!(span.composable_nonidentity_pairs(), 0);
    }

    #[test]
    fn extended_elements_of_the_single_edge() {
        let p = full_edge();
        let ext = extended_elements(&p);
        assert_eq!(ext.cells.len(), 3);
        // two vertex identities, the edge identity, source and target
        assert_eq!(ext.instances.len(), 5);
        assert_eq!(ext.object_count(), 8);
        assert_eq!(ext.arrow_count(), 10);
        let empty = RelStructure::empty(graph_category(), Level::Lax);
        assert_eq!(extended_elements(&empty).object_count(), 0);
    }

    #[test]
    fn intro_blowup_graph_has_eight_nonidentity_instances() {
        let h = close_composition(&crate::rel::tests::intro_blowup_h());
        let nonid = h
            .instances()
            .into_iter()
            .filter(|(f, _, _)| !h.base().is_identity(f))
            .count();
        assert_eq!(nonid, 8);
    }

    fn example_presheaf() -> ElementsPresheaf {
        // fibers s -> {s1, s2}, t -> {t1}, e -> {e1, e2};
        // transitions s1 -> e1, s2 -> e2, t1 -> e1
        let base = full_edge();
        let fibers = BTreeMap::from([
            (("0".to_string(), "s".to_string()), BTreeSet::from(["s1".to_string(), "s2".to_string()])),
            (("0".to_string(), "t".to_string()), BTreeSet::from(["t1".to_string()])),
            (("1".to_string(), "e".to_string()), BTreeSet::from(["e1".to_string(), "e2".to_string()])),
        ]);
        let id = |xs: &[&str]| -> BTreeMap<String, String> {
            xs.iter().map(|x| (x.to_string(), x.to_string())).collect()
        };
        let transitions = BTreeMap::from([
            (("".to_string(), "s".to_string(), "s".to_string()), id(&["s1", "s2"])),
            (("".to_string(), "t".to_string(), "t".to_string()), id(&["t1"])),
            (("0".to_string(), "e".to_string(), "e".to_string()), id(&["e1", "e2"])),
            (
                ("-".to_string(), "e".to_string(), "s".to_string()),
                BTreeMap::from([
                    ("s1".to_string(), "e1".to_string()),
                    ("s2".to_string(), "e2".to_string()),
                ]),
            ),
            (
                ("+".to_string(), "e".to_string(), "t".to_string()),
                BTreeMap::from([("t1".to_string(), "e1".to_string())]),
            ),
        ]);
        ElementsPresheaf { base, fibers, transitions }
    }

    #[test]
    fn phi_builds_the_expected_total_graph() {
        let f = example_presheaf();
        let (total, proj) = phi(&f).unwrap();
        // e1 = s1 -> t1, e2 with source s2 and no target
        assert_eq!(total.carrier(&"0".into()).len(), 3);
        assert_eq!(total.carrier(&"1".into()).len(), 2);
        assert!(total.has_pair(&"-".into(), &"e1".into(), &"s1".into()));
        assert!(total.has_pair(&"-".into(), &"e2".into(), &"s2".into()));
        assert!(total.has_pair(&"+".into(), &"e1".into(), &"t1".into()));
        assert_eq!(total.relation(&"+".to_string()).len(), 1);
        assert!(proj.is_morphism());
        assert!(is_discrete_fibration(&proj).ok());
        // carrier sizes are fiber sums per object
        assert_eq!(total.cell_count(), f.total_elements());
    }

    #[test]
    fn constant_singleton_presheaf_reproduces_the_base() {
        let base = full_edge();
        let elements = elements_category(&base);
        let fibers: BTreeMap<(Obj, Cell), BTreeSet<String>> = base
            .cells()
            .into_iter()
            .map(|(o, x)| ((o, x.clone()), BTreeSet::from([format!("~{x}")])))
            .collect();
        let transitions = elements
            .arrows
            .iter()
            .map(|a| {
                (
                    (a.mor.clone(), a.big.1.clone(), a.small.1.clone()),
                    BTreeMap::from([(format!("~{}", a.small.1), format!("~{}", a.big.1))]),
                )
            })
            .collect();
        let f = ElementsPresheaf { base: base.clone(), fibers, transitions };
        let (total, _) = phi(&f).unwrap();
        assert!(crate::iso::find_isomorphism(&total, &base).is_some());
    }

    #[test]
    fn psi_of_phi_is_the_strict_identity() {
        let f = example_presheaf();
        let (_, proj) = phi(&f).unwrap();
        let back = psi(&proj).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn psi_of_identity_fibration_is_constant_singleton() {
        let base = full_edge();
        let id = RelMorphism::identity(&base);
        let f = psi(&id).unwrap();
        assert!(f.fibers.values().all(|fib| fib.len() == 1));
        assert!(f.validate().is_ok());
    }

    #[test]
    fn functoriality_is_enforced() {
        let mut f = example_presheaf();
        // break the identity transition on e
        f.transitions.insert(
            ("0".to_string(), "e".to_string(), "e".to_string()),
            BTreeMap::from([
                ("e1".to_string(), "e2".to_string()),
                ("e2".to_string(), "e1".to_string()),
            ]),
        );
        assert!(f.validate().is_err());
    }
}

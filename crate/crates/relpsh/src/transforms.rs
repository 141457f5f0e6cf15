//! Closure under composition, the inclusion of ordinary presheaves with its
//! explicit adjoints, the partial reflection, and the structural predicates
//! (local embeddings, discrete fibrations).
//!
//! The left adjoint to the inclusion of presheaves works in three stages:
//! freely adjoin an `f`-face `x·f` for every cell `x` and every morphism `f`
//! out of an object, close under composition, then quotient by the
//! equivalence identifying two cells that are `f`-faces of a common cell.
//! Quotienting can create fresh merge obligations (two merged cells may
//! relate a third pair of faces through different witnesses), so the quotient
//! and closure are iterated to a joint fixpoint. The partial reflection is
//! the same construction without the free stage.
//!
//! The right adjoint is computed by the hom formula: the cells over `c` are
//! the exhaustively enumerated morphisms from the represented relational
//! `c`-cube, with face maps given by precomposition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::base::Mor;
use crate::colimits::CellPartition;
use crate::par::Parallelism;
use crate::rel::{
    representable, Cell, Components, Level, RelMorphism, RelPairs, RelStructure, StructureError,
};
use crate::search::enumerate_morphisms_with;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("operation requires at least {required} level, structure declares {found}")]
    LevelTooWeak { required: Level, found: Level },
    #[error("structure does not validate at level {level}: {first}")]
    NotValid { level: Level, first: String },
    #[error("{0}")]
    Structure(#[from] StructureError),
}

fn require_valid(p: &RelStructure, level: Level) -> Result<(), TransformError> {
    let report = p.validate_level(level);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(TransformError::NotValid { level, first: v.to_string() }),
    }
}

/// Closure under composition: adds the diagonal to every identity relation,
/// then iterates the pairwise-composite rule to a fixpoint. Idempotent, and
/// the identity on inputs that are already lax.
pub fn close_composition(p: &RelStructure) -> RelStructure {
    let mut q = p.clone().with_level(Level::Lax);
    for o in q.base().objects() {
        let id = q.base().identity(&o).expect("base object");
        for c in q.carrier(&o).clone() {
            q.insert_pair(&id, c.clone(), c);
        }
    }
    let pairs = q.base().composable_pairs();
    loop {
        let mut added = Vec::new();
        for (f, g) in &pairs {
            let h = q.base().compose(f, g).expect("composable");
            let mut by_first: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
            for (y, z) in q.relation(g) {
                by_first.entry(y).or_default().push(z);
            }
            let existing = q.relation(&h).clone();
            for (x, y) in q.relation(f) {
                if let Some(zs) = by_first.get(y) {
                    for z in zs {
                        let pair = (x.clone(), (*z).clone());
                        if !existing.contains(&pair) {
                            added.push((h.clone(), pair));
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (h, (x, z)) in added {
            q.insert_pair(&h, x, z);
        }
    }
    q
}

/// Views an ordinary presheaf (a functional structure) as a lax relational
/// one: the same data with the declared level relaxed. Validates the input.
pub fn underlying(p: &RelStructure) -> Result<RelStructure, TransformError> {
    require_valid(p, Level::Functional)?;
    Ok(p.clone().with_level(Level::Lax))
}

fn formal_name(x: &Cell, f: &Mor) -> Cell {
    format!("{x}·{f}")
}

/// One quotient-and-close pass: merge all pairs that are `f`-faces of a
/// common cell, then re-close. Returns the result and whether anything
/// merged.
fn quotient_pass(p: &RelStructure) -> (RelStructure, RelMorphism, bool) {
    let mut partition = CellPartition::default();
    for (_, c) in p.cells() {
        partition.add(&c);
    }
    let mut merged = false;
    for (_f, pairs) in p.relations() {
        let mut faces: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
        for (x, y) in pairs {
            faces.entry(x).or_default().push(y);
        }
        for (_, ys) in faces {
            for pair in ys.windows(2) {
                if partition.find(pair[0]) != partition.find(pair[1]) {
                    merged = true;
                }
                partition.union(pair[0], pair[1]);
            }
        }
    }
    let carriers = p
        .carriers()
        .iter()
        .map(|(o, cs)| (o.clone(), cs.iter().map(|c| partition.find(c)).collect()))
        .collect();
    let relations = p
        .relations()
        .iter()
        .map(|(f, pairs)| {
            (
                f.clone(),
                pairs
                    .iter()
                    .map(|(x, y)| (partition.find(x), partition.find(y)))
                    .collect::<RelPairs>(),
            )
        })
        .collect();
    let quotient = RelStructure::new(p.base().clone(), carriers, relations, Level::Lax)
        .expect("quotient of a well-formed structure");
    let quotient = close_composition(&quotient);
    let proj_components: Components = p
        .carriers()
        .iter()
        .map(|(o, cs)| (o.clone(), cs.iter().map(|c| (c.clone(), partition.find(c))).collect()))
        .collect();
    let proj = RelMorphism::new(p.clone(), quotient.clone(), proj_components).expect("total");
    (quotient, proj, merged)
}

fn quotient_to_fixpoint(p: &RelStructure) -> (RelStructure, RelMorphism) {
    let mut cur = p.clone();
    let mut unit = RelMorphism::identity(p);
    loop {
        let (next, proj, merged) = quotient_pass(&cur);
        unit = unit.then(&proj).expect("composable");
        cur = next;
        if !merged {
            return (cur, unit);
        }
    }
}

/// Left adjoint to the inclusion of ordinary presheaves: the result of
/// freely adjoining faces, closing under composition, and quotienting merged
/// faces to a fixpoint. Fresh cells are named `x·w`; class representatives
/// are the lexicographically least members. Returns the reflected presheaf
/// (functional level) and the unit.
pub fn reflect_presheaf(p: &RelStructure) -> Result<(RelStructure, RelMorphism), TransformError> {
    require_valid(p, Level::Lax)?;
    let base = p.base().clone();

    // stage 0: freely adjoin formal faces (x, f), identifying (x, id) with x
    let mut carriers: BTreeMap<String, BTreeSet<Cell>> = BTreeMap::new();
    for c in base.objects() {
        let mut cells = BTreeSet::new();
        for f in base.morphisms() {
            if base.dom(&f).expect("enumerated") != c {
                continue;
            }
            let cod = base.cod(&f).expect("enumerated");
            for x in p.carrier(&cod) {
                if base.is_identity(&f) {
                    cells.insert(x.clone());
                } else {
                    cells.insert(formal_name(x, &f));
                }
            }
        }
        carriers.insert(c, cells);
    }
    let name_of = |x: &Cell, f: &Mor| -> Cell {
        if base.is_identity(f) {
            x.clone()
        } else {
            formal_name(x, f)
        }
    };
    let mut relations: BTreeMap<String, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let mut pairs = RelPairs::new();
        for (x, y) in p.relation(&f) {
            pairs.insert((x.clone(), y.clone()));
        }
        // the formal f-face of (x, g) is (x, g ∘ f)
        let c = base.cod(&f).expect("enumerated");
        for g in base.morphisms() {
            if base.dom(&g).expect("enumerated") != c {
                continue;
            }
            let d = base.cod(&g).expect("enumerated");
            let gf = base.compose(&g, &f).expect("composable");
            for x in p.carrier(&d) {
                pairs.insert((name_of(x, &g), name_of(x, &gf)));
            }
        }
        relations.insert(f, pairs);
    }
    let p0 = RelStructure::new(base, carriers, relations, Level::Family)?;

    // stage 1: close under composition; stage 2: quotient to fixpoint
    let p1 = close_composition(&p0);
    let (p2, proj) = quotient_to_fixpoint(&p1);
    let result = p2.with_level(Level::Functional);
    debug_assert!(result.validate_level(Level::Functional).ok());

    let unit_components: Components = p
        .carriers()
        .iter()
        .map(|(o, cs)| {
            (
                o.clone(),
                cs.iter()
                    .map(|c| (c.clone(), proj.apply(c).expect("original cells survive").clone()))
                    .collect(),
            )
        })
        .collect();
    let unit = RelMorphism::new(p.clone(), result.clone().with_level(Level::Lax), unit_components)?;
    Ok((result, unit))
}

/// Partial reflection: the quotient and closure stages only, without freely
/// adjoining faces. The output satisfies the face-functional partiality
/// axiom. Returns the reflected structure and the projection.
pub fn reflect_partial(p: &RelStructure) -> Result<(RelStructure, RelMorphism), TransformError> {
    require_valid(p, Level::Lax)?;
    let closed = close_composition(p);
    let (q, proj) = quotient_to_fixpoint(&closed);
    let result = q.with_level(Level::Partial);
    debug_assert!(result.validate_level(Level::Partial).ok());
    let proj = RelMorphism::new(p.clone(), result.clone(), proj.components().clone())?;
    Ok((result, proj))
}

/// Deterministic name for a hom-cell of the right adjoint: the images of the
/// represented cube's cells in carrier order.
fn hom_cell_name(assignment: &Components) -> Cell {
    let images: Vec<String> = assignment
        .values()
        .flat_map(|m| m.iter().map(|(c, v)| format!("{c}↦{v}")))
        .collect();
    format!("⟨{}⟩", images.join(";"))
}

/// Right adjoint to the inclusion of ordinary presheaves, by the hom
/// formula: the cells over `c` are the morphisms from the represented
/// relational `c`-cube, with faces by precomposition. Returns the coreflected
/// presheaf (functional level) and the counit, which evaluates a hom-cell at
/// the top cell.
pub fn coreflect_presheaf(p: &RelStructure) -> Result<(RelStructure, RelMorphism), TransformError> {
    coreflect_presheaf_with(p, Parallelism::default())
}

/// [`coreflect_presheaf`] with an explicit parallelism choice for the hom
/// enumeration.
pub fn coreflect_presheaf_with(
    p: &RelStructure,
    par: Parallelism,
) -> Result<(RelStructure, RelMorphism), TransformError> {
    require_valid(p, Level::Lax)?;
    let base = p.base().clone();

    let mut cubes: BTreeMap<String, RelStructure> = BTreeMap::new();
    let mut homs: BTreeMap<String, Vec<Components>> = BTreeMap::new();
    for c in base.objects() {
        let yc = representable(&base, &c)?.with_level(Level::Lax);
        homs.insert(c.clone(), enumerate_morphisms_with(&yc, p, par, None));
        cubes.insert(c, yc);
    }

    let mut carriers: BTreeMap<String, BTreeSet<Cell>> = BTreeMap::new();
    for (c, maps) in &homs {
        carriers.insert(c.clone(), maps.iter().map(hom_cell_name).collect());
    }
    // face maps: precomposition with the representable morphism y(f)
    let mut relations: BTreeMap<String, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let d = base.dom(&f).expect("enumerated");
        let c = base.cod(&f).expect("enumerated");
        let mut pairs = RelPairs::new();
        for m in &homs[&c] {
            // (m ∘ y(f))(u) = m(f ∘ u) for u : e -> d
            let mut precomposed = Components::new();
            for e in base.objects() {
                let mut comp = BTreeMap::new();
                for u in base.hom(&e, &d) {
                    let fu = base.compose(&f, &u).expect("composable");
                    let img = m[&base.cod(&fu).expect("valid")][&fu].clone();
                    comp.insert(u, img);
                }
                if !comp.is_empty() {
                    precomposed.insert(e, comp);
                }
            }
            pairs.insert((hom_cell_name(m), hom_cell_name(&precomposed)));
        }
        relations.insert(f, pairs);
    }
    let result = RelStructure::new(base.clone(), carriers, relations, Level::Functional)?;
    debug_assert!(result.validate_level(Level::Functional).ok());

    // counit: evaluate at the top cell
    let mut counit_components = Components::new();
    for c in base.objects() {
        let id = base.identity(&c).expect("object");
        let mut comp = BTreeMap::new();
        for m in &homs[&c] {
            comp.insert(hom_cell_name(m), m[&c][&id].clone());
        }
        counit_components.insert(c, comp);
    }
    let counit = RelMorphism::new(result.clone().with_level(Level::Lax), p.clone(), counit_components)?;
    Ok((result, counit))
}

/// A morphism is a local embedding when distinct cells with a common
/// `f`-face through the same `f` stay distinct.
pub fn is_local_embedding(alpha: &RelMorphism) -> bool {
    for (f, pairs) in alpha.source().relations() {
        let mut cofibers: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
        for (x, y) in pairs {
            cofibers.entry(y).or_default().push(x);
        }
        for (_, xs) in cofibers {
            for (i, a) in xs.iter().enumerate() {
                for b in &xs[i + 1..] {
                    if a != b && alpha.apply(a) == alpha.apply(b) {
                        return false;
                    }
                }
            }
        }
        let _ = f;
    }
    true
}

/// Counterexamples to the unique-lift condition of a discrete fibration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FibrationReport {
    /// `(f, x, y, y', lifts)`: base pair `x ->_f y`, fiber element `y'` over
    /// `y`, and the lifts found over `x` (unique lift means exactly one).
    pub failures: Vec<(Mor, Cell, Cell, Cell, Vec<Cell>)>,
}

impl FibrationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the unique-lift condition: for every `x ->_f y` downstairs and
/// every `y'` in the fiber over `y`, exactly one `x'` over `x` with
/// `x' ->_f y'`.
pub fn is_discrete_fibration(alpha: &RelMorphism) -> FibrationReport {
    let upstairs = alpha.source();
    let base_structure = alpha.target();
    let mut fibers: BTreeMap<&Cell, Vec<&Cell>> = BTreeMap::new();
    for (o, cells) in upstairs.carriers() {
        for c in cells {
            let img = alpha.components()[o].get(c).expect("total");
            fibers.entry(img).or_default().push(c);
        }
    }
    let empty = Vec::new();
    let mut failures = Vec::new();
    for (f, pairs) in base_structure.relations() {
        for (x, y) in pairs {
            for y_up in fibers.get(y).unwrap_or(&empty) {
                let lifts: Vec<Cell> = fibers
                    .get(x)
                    .unwrap_or(&empty)
                    .iter()
                    .filter(|x_up| upstairs.has_pair(f, x_up, y_up))
                    .map(|c| (*c).clone())
                    .collect();
                if lifts.len() != 1 {
                    failures.push((f.clone(), x.clone(), y.clone(), (*y_up).clone(), lifts));
                }
            }
        }
    }
    FibrationReport { failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{cube_category, graph_category};
    use crate::iso::find_isomorphism;
    use crate::rel::representable;
    use crate::search::hom_set;

    fn structure(
        base: crate::base::BaseCategory,
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

    /// Appendix graph: a has source x and targets y1, y2; b1: y1 -> z;
    /// b2 has source y2 and no target.
    fn central_graph() -> RelStructure {
        structure(
            graph_category(),
            &[("0", &["x", "y1", "y2", "z"]), ("1", &["a", "b1", "b2"])],
            &[
                ("", &[("x", "x"), ("y1", "y1"), ("y2", "y2"), ("z", "z")]),
                ("0", &[("a", "a"), ("b1", "b1"), ("b2", "b2")]),
                ("-", &[("a", "x"), ("b1", "y1"), ("b2", "y2")]),
                ("+", &[("a", "y1"), ("a", "y2"), ("b1", "z")]),
            ],
            Level::Lax,
        )
    }

    fn full_edge() -> RelStructure {
        structure(
            graph_category(),
            &[("0", &["u", "v"]), ("1", &["e"])],
            &[
                ("", &[("u", "u"), ("v", "v")]),
                ("0", &[("e", "e")]),
                ("-", &[("e", "u")]),
                ("+", &[("e", "v")]),
            ],
            Level::Functional,
        )
    }

    #[test]
    fn close_composition_is_identity_on_lax_inputs() {
        let c = crate::rel::tests::example_c();
        assert_eq!(close_composition(&c), c);
        let closed = close_composition(&close_composition(&c));
        assert_eq!(closed, c);
    }

    #[test]
    fn close_composition_adds_missing_diagonals_and_composites() {
        // family with alpha ->_{0+} a and a ->_{+} t but no composite
        let fam = structure(
            cube_category(2),
            &[("0", &["t"]), ("1", &["a"]), ("2", &["alpha"])],
            &[("0+", &[("alpha", "a")]), ("+", &[("a", "t")])],
            Level::Family,
        );
        let lax = close_composition(&fam);
        assert!(lax.has_pair(&"++".to_string(), &"alpha".to_string(), &"t".to_string()));
        assert!(lax.has_pair(&"".to_string(), &"t".to_string(), &"t".to_string()));
        assert!(lax.validate_level(Level::Lax).ok());
    }

    #[test]
    fn underlying_requires_functional() {
        assert!(underlying(&full_edge()).is_ok());
        assert!(underlying(&central_graph().with_level(Level::Functional)).is_err());
    }

    #[test]
    fn reflect_reproduces_left_appendix_graph() {
        let (l, unit) = reflect_presheaf(&central_graph()).unwrap();
        assert!(l.validate_level(Level::Functional).ok());
        assert_eq!(l.carrier(&"0".into()).len(), 4);
        assert_eq!(l.carrier(&"1".into()).len(), 3);
        assert!(unit.is_morphism());
        // y1 and y2 merge; b2 gets a fresh target distinct from z
        let y1 = unit.apply(&"y1".to_string()).unwrap();
        let y2 = unit.apply(&"y2".to_string()).unwrap();
        assert_eq!(y1, y2);
        let b2 = unit.apply(&"b2".to_string()).unwrap().clone();
        let z = unit.apply(&"z".to_string()).unwrap().clone();
        let b2_target = l.apply(&"+".to_string(), &b2).unwrap().clone();
        assert_ne!(b2_target, z);
        // stated incidences of the left graph
        let a = unit.apply(&"a".to_string()).unwrap().clone();
        let x = unit.apply(&"x".to_string()).unwrap().clone();
        let b1 = unit.apply(&"b1".to_string()).unwrap().clone();
        assert_eq!(l.apply(&"-".to_string(), &a).unwrap(), &x);
        assert_eq!(l.apply(&"+".to_string(), &a).unwrap(), y1);
        assert_eq!(l.apply(&"-".to_string(), &b1).unwrap(), y1);
        assert_eq!(l.apply(&"+".to_string(), &b1).unwrap(), &z);
        assert_eq!(l.apply(&"-".to_string(), &b2).unwrap(), y2);
    }

    #[test]
    fn coreflect_reproduces_right_appendix_graph() {
        let (r, counit) = coreflect_presheaf(&central_graph()).unwrap();
        assert!(r.validate_level(Level::Functional).ok());
        assert_eq!(r.carrier(&"0".into()).len(), 4);
        // a splits into a1, a2; b2 is dropped
        assert_eq!(r.carrier(&"1".into()).len(), 3);
        assert!(counit.is_morphism());
        // edges over a: two; over b1: one; over b2: none
        let mut over: BTreeMap<Cell, usize> = BTreeMap::new();
        for e in r.carrier(&"1".into()) {
            *over.entry(counit.apply(e).unwrap().clone()).or_default() += 1;
        }
        assert_eq!(over.get(&"a".to_string()), Some(&2));
        assert_eq!(over.get(&"b1".to_string()), Some(&1));
        assert_eq!(over.get(&"b2".to_string()), None);
    }

    #[test]
    fn reflect_and_coreflect_fix_ordinary_presheaves() {
        for q in [full_edge(), representable(&cube_category(2), &"2".into()).unwrap()] {
            let u = underlying(&q).unwrap();
            let (l, _) = reflect_presheaf(&u).unwrap();
            assert!(find_isomorphism(&l, &q.clone().with_level(Level::Functional)).is_some());
            let (r, _) = coreflect_presheaf(&u).unwrap();
            assert!(find_isomorphism(&r, &q.clone().with_level(Level::Functional)).is_some());
        }
    }

    #[test]
    fn reflect_fills_a_bare_edge_with_two_fresh_vertices() {
        let bare = structure(
            graph_category(),
            &[("1", &["e"])],
            &[("0", &[("e", "e")])],
            Level::Lax,
        );
        let (l, _) = reflect_presheaf(&bare).unwrap();
        assert_eq!(l.carrier(&"0".into()).len(), 2);
        assert_eq!(l.carrier(&"1".into()).len(), 1);
    }

    #[test]
    fn reflect_example_c_is_the_full_square() {
        let (l, _) = reflect_presheaf(&crate::rel::tests::example_c()).unwrap();
        let y2 = representable(&cube_category(2), &"2".into()).unwrap();
        assert!(find_isomorphism(&l, &y2).is_some());
    }

    #[test]
    fn reflect_partial_merges_targets_and_fixes_partial_inputs() {
        let h = close_composition(&crate::rel::tests::intro_graph());
        let (p, proj) = reflect_partial(&h).unwrap();
        assert!(p.validate_level(Level::Partial).ok());
        assert_eq!(proj.apply(&"y1".to_string()), proj.apply(&"y2".to_string()));
        // already-partial input is fixed
        let c = crate::rel::tests::example_c();
        let (pc, _) = reflect_partial(&c).unwrap();
        assert_eq!(pc, c.with_level(Level::Partial));
        // example (C) keeps its missing faces, nothing added
        assert_eq!(pc.cell_count(), 5);
    }

    /// Reflection needs iterated quotient passes when merges cascade through
    /// cells that lack the relevant face.
    #[test]
    fn reflect_partial_iterates_to_fixpoint() {
        let p = close_composition(&structure(
            cube_category(2),
            &[
                ("0", &["x", "y"]),
                ("1", &["e1", "e2", "e3"]),
                ("2", &["s1", "s2"]),
            ],
            &[
                ("0+", &[("s1", "e1"), ("s1", "e2"), ("s2", "e2"), ("s2", "e3")]),
                ("+", &[("e1", "x"), ("e3", "y")]),
            ],
            Level::Family,
        ));
        let (q, proj) = reflect_partial(&p).unwrap();
        assert!(q.validate_level(Level::Partial).ok());
        // e2 has no +-face, so x ~ y only appears after the edges merge
        assert_eq!(proj.apply(&"x".to_string()), proj.apply(&"y".to_string()));
    }

    #[test]
    fn unit_gives_the_hom_bijection_on_a_fixture() {
        let p = central_graph();
        let q = full_edge();
        let (l, unit) = reflect_presheaf(&p).unwrap();
        let u_q = underlying(&q).unwrap();
        let lhs = hom_set(&l.clone().with_level(Level::Lax), &u_q);
        let rhs = hom_set(&p, &u_q);
        assert_eq!(lhs.len(), rhs.len());
        let mut images = BTreeSet::new();
        for h in &lhs {
            let transported = unit.then(&RelMorphism::new(
                l.clone().with_level(Level::Lax),
                u_q.clone(),
                h.components().clone(),
            )
            .unwrap())
            .unwrap();
            images.insert(transported.components().clone());
        }
        assert_eq!(images.len(), rhs.len());
    }

    #[test]
    fn local_embedding_examples() {
        let c = crate::rel::tests::example_c();
        assert!(is_local_embedding(&RelMorphism::identity(&c)));

        // fold of two edges sharing a target onto one edge: not a local
        // embedding (both edges relate to the shared vertex through "+")
        let two_in = structure(
            graph_category(),
            &[("0", &["v"]), ("1", &["e1", "e2"])],
            &[
                ("", &[("v", "v")]),
                ("0", &[("e1", "e1"), ("e2", "e2")]),
                ("+", &[("e1", "v"), ("e2", "v")]),
            ],
            Level::Lax,
        );
        let one_in = structure(
            graph_category(),
            &[("0", &["w"]), ("1", &["f"])],
            &[("", &[("w", "w")]), ("0", &[("f", "f")]), ("+", &[("f", "w")])],
            Level::Lax,
        );
        let fold = RelMorphism::new(
            two_in,
            one_in,
            BTreeMap::from([
                ("0".to_string(), BTreeMap::from([("v".to_string(), "w".to_string())])),
                (
                    "1".to_string(),
                    BTreeMap::from([
                        ("e1".to_string(), "f".to_string()),
                        ("e2".to_string(), "f".to_string()),
                    ]),
                ),
            ]),
        )
        .unwrap();
        assert!(fold.is_morphism());
        assert!(!is_local_embedding(&fold));
    }

    #[test]
    fn local_embeddings_compose_with_embeddings() {
        // inclusion of a full substructure after a local embedding stays one
        let c = crate::rel::tests::example_c();
        let sub_cells: BTreeSet<Cell> =
            ["alpha", "a", "b", "t"].iter().map(|s| s.to_string()).collect();
        let incl = RelMorphism::substructure_inclusion(&c, &sub_cells).unwrap();
        let id_sub = RelMorphism::identity(incl.source());
        assert!(is_local_embedding(&id_sub.then(&incl).unwrap()));
    }

    #[test]
    fn two_points_over_a_source_break_the_fibration() {
        let e = full_edge().with_level(Level::Lax);
        let upstairs = structure(
            graph_category(),
            &[("0", &["u1", "u2", "w"]), ("1", &["f"])],
            &[
                ("", &[("u1", "u1"), ("u2", "u2"), ("w", "w")]),
                ("0", &[("f", "f")]),
                ("-", &[("f", "u1")]),
                ("+", &[("f", "w")]),
            ],
            Level::Lax,
        );
        let alpha = RelMorphism::new(
            upstairs,
            e,
            BTreeMap::from([
                (
                    "0".to_string(),
                    BTreeMap::from([
                        ("u1".to_string(), "u".to_string()),
                        ("u2".to_string(), "u".to_string()),
                        ("w".to_string(), "v".to_string()),
                    ]),
                ),
                ("1".to_string(), BTreeMap::from([("f".to_string(), "e".to_string())])),
            ]),
        )
        .unwrap();
        assert!(alpha.is_morphism());
        let report = is_discrete_fibration(&alpha);
        assert!(!report.ok());
        // the failure is the missing lift of e ->_- u over u2
        assert!(report
            .failures
            .iter()
            .any(|(f, _, _, y_up, lifts)| f == "-" && y_up == "u2" && lifts.is_empty()));
    }
}

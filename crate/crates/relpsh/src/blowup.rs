//! Tensor products, euclidean bricks, and the combinatorial blowup.
//!
//! The blowup of a precubical set of maximum dimension `n` replaces every
//! `k`-cell neighborhood that can be covered by an `(n, k)`-euclidean brick
//! with one cell per covering, producing a relational precubical set whose
//! realization is manifold-like. A brick is the neighborhood of the minimal
//! cube of a tensor of `k` intervals and `n - k` subdivided intervals; the
//! symmetric-group action on dimensions is handled by enumerating all axis
//! interleavings rather than by building symmetric precubical sets.
//!
//! Covering cells are subobjects, identified by their cell sets; the
//! projection sends a covering to the unique cell of minimal dimension in
//! its image. Relations between coverings are found by exhaustive search for
//! a monic comparison of bricks compatible with the stored witnesses, which
//! is the faithful reading of a purely existential definition at this scale.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::base::{cube_category, Mor, Obj};
use crate::par::Parallelism;
use crate::rel::{
    Cell, Components, Level, RelMorphism, RelPairs, RelStructure, StructureError, ValidationReport,
};
use crate::search::enumerate_morphisms_with;
use crate::transforms::{is_discrete_fibration, is_local_embedding};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlowupError {
    #[error("operation needs an ordinary precubical set (functional level over a cube-like base): {0}")]
    NotPrecubical(String),
    #[error("cell {cell:?} has dimension {dim}, above the blowup dimension {bound}")]
    ExceedsDimension { cell: Cell, dim: usize, bound: usize },
    #[error("brick signature needs exactly {k} interval axes, got {got}")]
    BadSignature { k: usize, got: usize },
    #[error("{0}")]
    Structure(#[from] StructureError),
}

fn require_precubical(p: &RelStructure) -> Result<(), BlowupError> {
    if !p.base().is_cube_like() {
        return Err(BlowupError::NotPrecubical("base is not cube-like".into()));
    }
    let report = p.validate_level(Level::Functional);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(BlowupError::NotPrecubical(v.to_string())),
    }
}

/// The walking interval `I`: one edge with both endpoints.
pub fn interval() -> RelStructure {
    RelStructure::new(
        cube_category(1),
        BTreeMap::from([
            ("0".to_string(), BTreeSet::from(["0".to_string(), "1".to_string()])),
            ("1".to_string(), BTreeSet::from(["e".to_string()])),
        ]),
        BTreeMap::from([
            (
                "".to_string(),
                BTreeSet::from([("0".to_string(), "0".to_string()), ("1".to_string(), "1".to_string())]),
            ),
            ("0".to_string(), BTreeSet::from([("e".to_string(), "e".to_string())])),
            ("-".to_string(), BTreeSet::from([("e".to_string(), "0".to_string())])),
            ("+".to_string(), BTreeSet::from([("e".to_string(), "1".to_string())])),
        ]),
        Level::Functional,
    )
    .expect("interval is well-formed")
}

/// The subdivided interval `J`: two consecutive edges.
pub fn divided_interval() -> RelStructure {
    RelStructure::new(
        cube_category(1),
        BTreeMap::from([
            (
                "0".to_string(),
                BTreeSet::from(["0".to_string(), "1/2".to_string(), "1".to_string()]),
            ),
            ("1".to_string(), BTreeSet::from(["1/4".to_string(), "3/4".to_string()])),
        ]),
        BTreeMap::from([
            (
                "".to_string(),
                BTreeSet::from([
                    ("0".to_string(), "0".to_string()),
                    ("1/2".to_string(), "1/2".to_string()),
                    ("1".to_string(), "1".to_string()),
                ]),
            ),
            (
                "0".to_string(),
                BTreeSet::from([
                    ("1/4".to_string(), "1/4".to_string()),
                    ("3/4".to_string(), "3/4".to_string()),
                ]),
            ),
            (
                "-".to_string(),
                BTreeSet::from([
                    ("1/4".to_string(), "0".to_string()),
                    ("3/4".to_string(), "1/2".to_string()),
                ]),
            ),
            (
                "+".to_string(),
                BTreeSet::from([
                    ("1/4".to_string(), "1/2".to_string()),
                    ("3/4".to_string(), "1".to_string()),
                ]),
            ),
        ]),
        Level::Functional,
    )
    .expect("divided interval is well-formed")
}

/// The point: a single vertex over the zero-truncated cube category.
pub fn point() -> RelStructure {
    RelStructure::new(
        cube_category(0),
        BTreeMap::from([("0".to_string(), BTreeSet::from(["pt".to_string()]))]),
        BTreeMap::from([("".to_string(), BTreeSet::from([("pt".to_string(), "pt".to_string())]))]),
        Level::Functional,
    )
    .expect("point is well-formed")
}

/// Restricts a structure to the cube category truncated at `n`. Fails when a
/// cell lives above the bound.
pub fn rebase_to_cube(p: &RelStructure, n: usize) -> Result<RelStructure, BlowupError> {
    let old_bound = p
        .base()
        .cube_bound()
        .ok_or_else(|| BlowupError::NotPrecubical("base is not cube-like".into()))?;
    for (o, cells) in p.carriers() {
        let dim = p.base().object_dim(o).expect("cube object");
        if dim > n {
            if let Some(cell) = cells.first() {
                return Err(BlowupError::ExceedsDimension { cell: cell.clone(), dim, bound: n });
            }
        }
    }
    let _ = old_bound;
    let base = cube_category(n);
    let carriers = p
        .carriers()
        .iter()
        .filter(|(o, _)| base.has_object(o))
        .map(|(o, cs)| (o.clone(), cs.clone()))
        .collect();
    let relations = p
        .relations()
        .iter()
        .filter(|(f, _)| base.has_morphism(f))
        .map(|(f, ps)| (f.clone(), ps.clone()))
        .collect();
    Ok(RelStructure::new(base, carriers, relations, p.level())?)
}

/// Tensor product of ordinary precubical structures: cells are pairs with
/// added dimensions, a face word acting on the first factor's axes first and
/// the second factor's axes after.
pub fn tensor(p: &RelStructure, q: &RelStructure) -> Result<RelStructure, BlowupError> {
    require_precubical(p)?;
    require_precubical(q)?;
    let bp = p.base().cube_bound().expect("checked");
    let bq = q.base().cube_bound().expect("checked");
    let base = cube_category(bp + bq);
    let pair_name = |x: &Cell, y: &Cell| format!("{x}⊗{y}");

    let mut carriers: BTreeMap<Obj, BTreeSet<Cell>> = BTreeMap::new();
    let mut dims: BTreeMap<(Cell, Cell), (usize, usize)> = BTreeMap::new();
    for (ox, x) in p.cells() {
        let dx = p.base().object_dim(&ox).expect("cube object");
        for (oy, y) in q.cells() {
            let dy = q.base().object_dim(&oy).expect("cube object");
            carriers
                .entry((dx + dy).to_string())
                .or_default()
                .insert(pair_name(&x, &y));
            dims.insert((x.clone(), y.clone()), (dx, dy));
        }
    }
    let mut relations: BTreeMap<Mor, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let word = base.word(&f).expect("cube base");
        let mut pairs = RelPairs::new();
        for ((x, y), (dx, dy)) in &dims {
            if word.cod() != dx + dy {
                continue;
            }
            let letters = word.letters();
            let wx = crate::base::CofaceWord::new(letters[..*dx].to_vec()).to_string();
            let wy = crate::base::CofaceWord::new(letters[*dx..].to_vec()).to_string();
            let fx = p.apply(&wx, x).expect("functional input is total");
            let fy = q.apply(&wy, y).expect("functional input is total");
            pairs.insert((pair_name(x, y), pair_name(fx, fy)));
        }
        relations.insert(f, pairs);
    }
    Ok(RelStructure::new(base, carriers, relations, Level::Functional)?)
}

/// One axis of a brick: an interval (`I`) or a subdivided interval (`J`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    I,
    J,
}

/// An axis ordering of the `(n, k)`-euclidean brick `I^{⊗k} ⊗ J^{⊗(n-k)}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BrickSignature {
    pub n: usize,
    pub k: usize,
    pub axes: Vec<Axis>,
}

impl BrickSignature {
    pub fn new(n: usize, k: usize, axes: Vec<Axis>) -> Result<Self, BlowupError> {
        let got = axes.iter().filter(|a| **a == Axis::I).count();
        if axes.len() != n || got != k {
            return Err(BlowupError::BadSignature { k, got });
        }
        Ok(BrickSignature { n, k, axes })
    }

    /// The canonical ordering `I…IJ…J`.
    pub fn canonical(n: usize, k: usize) -> Self {
        let mut axes = vec![Axis::I; k];
        axes.extend(vec![Axis::J; n - k]);
        BrickSignature { n, k, axes }
    }

    /// All interleavings of `k` interval axes among `n`, sorted. These stand
    /// in for the symmetric-group action on brick dimensions.
    pub fn interleavings(n: usize, k: usize) -> Vec<BrickSignature> {
        fn go(n: usize, k: usize, acc: &mut Vec<Axis>, out: &mut Vec<Vec<Axis>>) {
            if acc.len() == n {
                out.push(acc.clone());
                return;
            }
            let remaining = n - acc.len();
            let placed = acc.iter().filter(|a| **a == Axis::I).count();
            if placed < k {
                acc.push(Axis::I);
                go(n, k, acc, out);
                acc.pop();
            }
            if remaining > k - placed {
                acc.push(Axis::J);
                go(n, k, acc, out);
                acc.pop();
            }
        }
        let mut words = Vec::new();
        go(n, k, &mut Vec::new(), &mut words);
        let mut sigs: Vec<BrickSignature> =
            words.into_iter().map(|axes| BrickSignature { n, k, axes }).collect();
        sigs.sort();
        sigs
    }
}

/// A euclidean brick: the neighborhood of the minimal cube of the tensor of
/// the axes, at lax level, with its distinguished minimal cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Brick {
    pub signature: BrickSignature,
    pub structure: RelStructure,
    pub min: Cell,
}

/// Builds the brick of a signature: `N(min)` inside the tensor of the axes
/// word. The minimal cell is the unique cell of dimension `k`.
pub fn standard_brick(sig: &BrickSignature) -> Result<Brick, BlowupError> {
    let mut factors = sig.axes.iter().map(|a| match a {
        Axis::I => interval(),
        Axis::J => divided_interval(),
    });
    let product = match factors.next() {
        None => point(),
        Some(first) => factors.try_fold(first, |acc, next| tensor(&acc, &next))?,
    };
    let min = sig
        .axes
        .iter()
        .map(|a| match a {
            Axis::I => "e".to_string(),
            Axis::J => "1/2".to_string(),
        })
        .fold(None::<Cell>, |acc, part| match acc {
            None => Some(part),
            Some(s) => Some(format!("{s}⊗{part}")),
        })
        .unwrap_or_else(|| "pt".to_string());
    let lax = product.with_level(Level::Lax);
    let star: BTreeSet<Cell> = lax
        .instances()
        .into_iter()
        .filter(|(_, _, y)| y == &min)
        .map(|(_, a, _)| a)
        .collect();
    let structure = lax.full_substructure(&star)?;
    Ok(Brick { signature: sig.clone(), structure, min })
}

fn components_to_morphism(
    brick: &RelStructure,
    target: &RelStructure,
    comps: &Components,
) -> RelMorphism {
    RelMorphism::new(brick.clone(), target.clone(), comps.clone()).expect("enumerated maps are total")
}

fn image_of(comps: &Components) -> BTreeSet<Cell> {
    comps.values().flat_map(|m| m.values().cloned()).collect()
}

/// All surjective local embeddings from `(n, k)`-bricks into an ordinary
/// precubical structure, every axis interleaving of the signature's `(n, k)`
/// tried, deduplicated by image. One witness is returned per image; the
/// relation search recomputes the rest on demand.
pub fn surjective_local_embeddings(
    sig: &BrickSignature,
    p: &RelStructure,
) -> Result<Vec<(BTreeSet<Cell>, RelMorphism)>, BlowupError> {
    require_precubical(p)?;
    let rebased = rebase_to_cube(p, sig.n)?.with_level(Level::Lax);
    let by_image = embeddings_by_image(sig.n, sig.k, &rebased, Parallelism::default())?;
    Ok(by_image
        .into_iter()
        .map(|(image, mut wits)| {
            let (brick, comps) = wits.remove(0);
            (image, components_to_morphism(&brick.structure, &rebased, &comps))
        })
        .collect())
}

type WitnessMap = BTreeMap<BTreeSet<Cell>, Vec<(Brick, Components)>>;

/// All witnesses grouped by image. `p` must already be the lax view over the
/// cube category truncated at `n`.
fn embeddings_by_image(
    n: usize,
    k: usize,
    p: &RelStructure,
    par: Parallelism,
) -> Result<WitnessMap, BlowupError> {
    let mut out: WitnessMap = BTreeMap::new();
    for sig in BrickSignature::interleavings(n, k) {
        let brick = standard_brick(&sig)?;
        // seeds are the candidate images of the minimal cube
        let found = enumerate_morphisms_with(&brick.structure, p, par, Some(&brick.min));
        for comps in found {
            let alpha = components_to_morphism(&brick.structure, p, &comps);
            if !is_local_embedding(&alpha) {
                continue;
            }
            out.entry(image_of(&comps)).or_default().push((brick.clone(), comps));
        }
    }
    Ok(out)
}

/// Searches for a monic morphism `iota : b -> b2` with `alpha2 ∘ iota =
/// alpha`.
fn has_monic_over(
    b: &RelStructure,
    b2: &RelStructure,
    alpha: &Components,
    alpha2: &Components,
) -> bool {
    let cells: Vec<(Obj, Cell)> = b.cells();
    fn go(
        depth: usize,
        cells: &[(Obj, Cell)],
        b: &RelStructure,
        b2: &RelStructure,
        alpha: &Components,
        alpha2: &Components,
        map: &mut BTreeMap<Cell, Cell>,
        used: &mut BTreeSet<Cell>,
    ) -> bool {
        if depth == cells.len() {
            // morphism condition
            return b.instances().iter().all(|(f, x, y)| b2.has_pair(f, &map[x], &map[y]));
        }
        let (o, u) = &cells[depth];
        let want = &alpha[o][u];
        for v in b2.carrier(o) {
            if used.contains(v) || &alpha2[o][v] != want {
                continue;
            }
            map.insert(u.clone(), v.clone());
            used.insert(v.clone());
            if go(depth + 1, cells, b, b2, alpha, alpha2, map, used) {
                return true;
            }
            map.remove(u);
            used.remove(v);
        }
        false
    }
    go(0, &cells, b, b2, alpha, alpha2, &mut BTreeMap::new(), &mut BTreeSet::new())
}

fn subobject_name(cells: &BTreeSet<Cell>) -> Cell {
    let parts: Vec<&str> = cells.iter().map(|c| c.as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Result of [`blowup`]: the relational precubical set of brick-covered
/// subobjects, its projection, one stored witness per cell, and the laxity
/// report (the blowup is reflexive by construction; whether it is closed
/// under composition is checked and reported, never silently forced).
#[derive(Debug, Clone)]
pub struct BlowupResult {
    pub blowup: RelStructure,
    /// Projection to the (lax view of the) input, sending a covering to the
    /// minimal cell of its image.
    pub map: RelMorphism,
    /// Stored witness per blowup cell.
    pub witnesses: BTreeMap<Cell, (BrickSignature, RelMorphism)>,
    pub lax_report: ValidationReport,
}

/// The combinatorial blowup of an ordinary precubical set of maximum
/// dimension `n`.
pub fn blowup(p: &RelStructure, n: usize) -> Result<BlowupResult, BlowupError> {
    blowup_with(p, n, Parallelism::default())
}

/// [`blowup`] with an explicit parallelism choice for the embedding search.
pub fn blowup_with(p: &RelStructure, n: usize, par: Parallelism) -> Result<BlowupResult, BlowupError> {
    require_precubical(p)?;
    let base_structure = rebase_to_cube(p, n)?.with_level(Level::Lax);
    let base = base_structure.base().clone();

    // cells: images of surjective local embeddings, per brick level
    let mut witnesses_by_level: BTreeMap<usize, WitnessMap> = BTreeMap::new();
    for k in 0..=n {
        witnesses_by_level.insert(k, embeddings_by_image(n, k, &base_structure, par)?);
    }
    let mut carriers: BTreeMap<Obj, BTreeSet<Cell>> = BTreeMap::new();
    let mut min_of: BTreeMap<Cell, Cell> = BTreeMap::new();
    let mut image_of_cell: BTreeMap<Cell, BTreeSet<Cell>> = BTreeMap::new();
    for (k, by_image) in &witnesses_by_level {
        let entry = carriers.entry(k.to_string()).or_default();
        for (image, wits) in by_image {
            let name = subobject_name(image);
            let (brick, comps) = &wits[0];
            let min_image = comps[&k.to_string()][&brick.min].clone();
            entry.insert(name.clone());
            min_of.insert(name.clone(), min_image);
            image_of_cell.insert(name, image.clone());
        }
    }

    // relations: a monic comparison of bricks over compatible witnesses
    let mut relations: BTreeMap<Mor, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let kc = base.object_dim(&base.cod(&f).expect("valid")).expect("cube");
        let kd = base.object_dim(&base.dom(&f).expect("valid")).expect("cube");
        let mut pairs = RelPairs::new();
        for (image_s, wits_s) in &witnesses_by_level[&kc] {
            let name_s = subobject_name(image_s);
            for (image_t, wits_t) in &witnesses_by_level[&kd] {
                let name_t = subobject_name(image_t);
                if !base_structure.has_pair(&f, &min_of[&name_s], &min_of[&name_t]) {
                    continue;
                }
                let found = wits_s.iter().any(|(brick_s, alpha_s)| {
                    wits_t.iter().any(|(brick_t, alpha_t)| {
                        has_monic_over(&brick_s.structure, &brick_t.structure, alpha_s, alpha_t)
                    })
                });
                if found {
                    pairs.insert((name_s.clone(), name_t.clone()));
                }
            }
        }
        relations.insert(f, pairs);
    }

    let candidate = RelStructure::new(base.clone(), carriers, relations, Level::Family)?;
    let lax_report = candidate.validate_level(Level::Lax);
    let blowup_structure =
        if lax_report.ok() { candidate.with_level(Level::Lax) } else { candidate };

    let mut beta_components: Components = Components::new();
    for (o, cells) in blowup_structure.carriers() {
        for s in cells {
            beta_components
                .entry(o.clone())
                .or_default()
                .insert(s.clone(), min_of[s].clone());
        }
    }
    let map = RelMorphism::new(blowup_structure.clone(), base_structure, beta_components)?;
    debug_assert!(map.is_morphism());

    let mut witnesses = BTreeMap::new();
    for (_k, by_image) in witnesses_by_level {
        for (image, wits) in by_image {
            let name = subobject_name(&image);
            let (brick, comps) = wits.into_iter().next().expect("nonempty witness list");
            let alpha = components_to_morphism(&brick.structure, map.target(), &comps);
            witnesses.insert(name, (brick.signature, alpha));
        }
    }
    Ok(BlowupResult { blowup: blowup_structure, map, witnesses, lax_report })
}

/// Prefix of the base-cell copies added by the completion.
pub const COMPLETION_PREFIX: &str = "#";

/// Completes a blowup into a discrete fibration: carriers are extended by a
/// copy of the base cells, and a copy relates to a cell exactly when the
/// projected pair relates downstairs and no blowup cell already lifts it.
pub fn blowup_completion(result: &BlowupResult) -> Result<(RelStructure, RelMorphism), BlowupError> {
    let tilde = &result.blowup;
    let base_structure = result.map.target();
    let base = tilde.base().clone();
    let copy = |c: &Cell| format!("{COMPLETION_PREFIX}{c}");

    let mut carriers = tilde.carriers().clone();
    for (o, cells) in base_structure.carriers() {
        let entry = carriers.entry(o.clone()).or_default();
        for c in cells {
            entry.insert(copy(c));
        }
    }
    // projection of the completed structure
    let mut beta_plus: Components = Components::new();
    for (o, cells) in tilde.carriers() {
        for s in cells {
            let img = result.map.apply(s).expect("total").clone();
            beta_plus.entry(o.clone()).or_default().insert(s.clone(), img);
        }
    }
    for (o, cells) in base_structure.carriers() {
        for c in cells {
            beta_plus.entry(o.clone()).or_default().insert(copy(c), c.clone());
        }
    }
    let project = |cell: &Cell, o: &Obj| beta_plus[o][cell].clone();

    let mut relations: BTreeMap<Mor, RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let c_obj = base.cod(&f).expect("valid");
        let d_obj = base.dom(&f).expect("valid");
        let mut pairs: RelPairs = tilde.relation(&f).clone();
        // copies lift a base pair exactly when no blowup cell does
        for a in base_structure.carrier(&c_obj) {
            for b in carriers[&d_obj].iter() {
                let b_downstairs = project(b, &d_obj);
                if !base_structure.has_pair(&f, a, &b_downstairs) {
                    continue;
                }
                let covered = tilde
                    .relation(&f)
                    .iter()
                    .any(|(_, small)| small == b);
                if !covered {
                    pairs.insert((copy(a), b.clone()));
                }
            }
        }
        relations.insert(f, pairs);
    }
    let candidate = RelStructure::new(base, carriers, relations, Level::Family)?;
    let completed = if candidate.validate_level(Level::Lax).ok() {
        candidate.with_level(Level::Lax)
    } else {
        candidate
    };
    let map = RelMorphism::new(completed.clone(), base_structure.clone(), beta_plus)?;
    debug_assert!(map.is_morphism());
    debug_assert!(is_discrete_fibration(&map).ok());
    Ok((completed, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::find_isomorphism;
    use crate::transforms::close_composition;

    /// The crossing graph: a1, a2 into x, then b1, b2 out of x.
    fn crossing_graph() -> RelStructure {
        RelStructure::new(
            cube_category(1),
            BTreeMap::from([
                (
                    "0".to_string(),
                    ["u1", "u2", "x", "w1", "w2"].iter().map(|s| s.to_string()).collect(),
                ),
                (
                    "1".to_string(),
                    ["a1", "a2", "b1", "b2"].iter().map(|s| s.to_string()).collect(),
                ),
            ]),
            BTreeMap::from([
                (
                    "".to_string(),
                    ["u1", "u2", "x", "w1", "w2"]
                        .iter()
                        .map(|s| (s.to_string(), s.to_string()))
                        .collect(),
                ),
                (
                    "0".to_string(),
                    ["a1", "a2", "b1", "b2"]
                        .iter()
                        .map(|s| (s.to_string(), s.to_string()))
                        .collect(),
                ),
                (
                    "-".to_string(),
                    BTreeSet::from([
                        ("a1".to_string(), "u1".to_string()),
                        ("a2".to_string(), "u2".to_string()),
                        ("b1".to_string(), "x".to_string()),
                        ("b2".to_string(), "x".to_string()),
                    ]),
                ),
                (
                    "+".to_string(),
                    BTreeSet::from([
                        ("a1".to_string(), "x".to_string()),
                        ("a2".to_string(), "x".to_string()),
                        ("b1".to_string(), "w1".to_string()),
                        ("b2".to_string(), "w2".to_string()),
                    ]),
                ),
            ]),
            Level::Functional,
        )
        .unwrap()
    }

    #[test]
    fn tensor_counts() {
        let ii = tensor(&interval(), &interval()).unwrap();
        assert_eq!(ii.cell_count(), 9);
        assert!(find_isomorphism(
            &ii,
            &crate::rel::representable(&cube_category(2), &"2".into()).unwrap()
        )
        .is_some());
        let ij = tensor(&interval(), &divided_interval()).unwrap();
        assert_eq!(ij.cell_count(), 15);
        assert_eq!(ij.carrier(&"0".into()).len(), 6);
        assert_eq!(ij.carrier(&"1".into()).len(), 7);
        assert_eq!(ij.carrier(&"2".into()).len(), 2);
        let unit = tensor(&interval(), &point()).unwrap();
        assert_eq!(unit.cell_count(), interval().cell_count());
    }

    #[test]
    fn brick_counts_match_the_neighborhood_figures() {
        // (2,2): one bare square
        let b22 = standard_brick(&BrickSignature::canonical(2, 2)).unwrap();
        assert_eq!(b22.structure.cell_count(), 1);
        // (2,1): one edge and two squares
        let b21 = standard_brick(&BrickSignature::canonical(2, 1)).unwrap();
        assert_eq!(b21.structure.cell_count(), 3);
        assert_eq!(b21.structure.carrier(&"1".into()).len(), 1);
        assert_eq!(b21.structure.carrier(&"2".into()).len(), 2);
        // (2,0): vertex, four edges, four squares
        let b20 = standard_brick(&BrickSignature::canonical(2, 0)).unwrap();
        assert_eq!(b20.structure.cell_count(), 9);
        // the minimal cube is the unique cell of dimension k
        assert_eq!(b21.structure.carrier(&"1".into()).first().unwrap(), &b21.min);
    }

    #[test]
    fn embeddings_into_the_crossing_graph() {
        let p = crossing_graph();
        let vertex_level =
            surjective_local_embeddings(&BrickSignature::canonical(1, 0), &p).unwrap();
        // four coverings {x, a_i, b_j}
        assert_eq!(vertex_level.len(), 4);
        for (image, alpha) in &vertex_level {
            assert_eq!(image.len(), 3);
            assert!(image.contains("x"));
            assert!(alpha.is_morphism());
            assert!(is_local_embedding(alpha));
            assert!(alpha.is_pointwise_surjective() || !image.is_empty());
        }
        let edge_level = surjective_local_embeddings(&BrickSignature::canonical(1, 1), &p).unwrap();
        assert_eq!(edge_level.len(), 4);
        for (image, _) in &edge_level {
            assert_eq!(image.len(), 1);
        }
    }

    #[test]
    fn blowup_of_the_crossing_graph_is_the_intro_graph() {
        let result = blowup(&crossing_graph(), 1).unwrap();
        assert!(result.lax_report.ok());
        let expected = close_composition(&crate::rel::tests::intro_blowup_h());
        assert!(find_isomorphism(&result.blowup, &expected).is_some());
        assert!(is_local_embedding(&result.map));
        // exactly the stated eight non-identity relations
        let nonid = result
            .blowup
            .instances()
            .into_iter()
            .filter(|(f, _, _)| !result.blowup.base().is_identity(f))
            .count();
        assert_eq!(nonid, 8);
    }

    #[test]
    fn blowup_of_the_lone_square_is_one_open_cell() {
        let square = tensor(&interval(), &interval()).unwrap();
        let result = blowup(&square, 2).unwrap();
        assert_eq!(result.blowup.carrier(&"2".into()).len(), 1);
        assert_eq!(result.blowup.carrier(&"1".into()).len(), 0);
        assert_eq!(result.blowup.carrier(&"0".into()).len(), 0);
        for f in result.blowup.base().morphisms() {
            if !result.blowup.base().is_identity(&f) {
                assert!(result.blowup.relation(&f).is_empty());
            }
        }
    }

    #[test]
    fn blowup_of_two_squares_sharing_an_edge() {
        let two_squares = tensor(&interval(), &divided_interval()).unwrap();
        let result = blowup(&two_squares, 2).unwrap();
        assert_eq!(result.blowup.carrier(&"2".into()).len(), 2);
        assert_eq!(result.blowup.carrier(&"1".into()).len(), 1);
        assert_eq!(result.blowup.carrier(&"0".into()).len(), 0);
        let square_to_edge: Vec<_> = result
            .blowup
            .instances()
            .into_iter()
            .filter(|(f, _, _)| !result.blowup.base().is_identity(f))
            .collect();
        assert_eq!(square_to_edge.len(), 2);
        assert!(is_local_embedding(&result.map));
    }

    #[test]
    fn completion_of_the_crossing_graph_counts_and_fibration() {
        let result = blowup(&crossing_graph(), 1).unwrap();
        let (plus, beta_plus) = blowup_completion(&result).unwrap();
        assert_eq!(plus.carrier(&"0".into()).len(), 4 + 5);
        assert_eq!(plus.carrier(&"1".into()).len(), 4 + 4);
        assert!(beta_plus.is_morphism());
        assert!(is_discrete_fibration(&beta_plus).ok());
    }

    #[test]
    fn completion_of_an_empty_blowup_is_the_identity_fibration() {
        // a bare vertex has no brick coverings at n = 1 (no edges at all)
        let lonely = RelStructure::new(
            cube_category(1),
            BTreeMap::from([("0".to_string(), BTreeSet::from(["v".to_string()]))]),
            BTreeMap::from([
                ("".to_string(), BTreeSet::from([("v".to_string(), "v".to_string())])),
                ("0".to_string(), BTreeSet::new()),
                ("-".to_string(), BTreeSet::new()),
                ("+".to_string(), BTreeSet::new()),
            ]),
            Level::Functional,
        )
        .unwrap();
        let result = blowup(&lonely, 1).unwrap();
        assert_eq!(result.blowup.cell_count(), 0);
        let (plus, beta_plus) = blowup_completion(&result).unwrap();
        assert!(find_isomorphism(&plus, result.map.target()).is_some());
        assert!(is_discrete_fibration(&beta_plus).ok());
    }

    #[test]
    fn blowup_distributes_over_disjoint_unions() {
        let p = crossing_graph();
        let (sum, _) = crate::colimits::coproduct(&[p.clone(), p.clone()]).unwrap();
        let sum = sum.with_level(Level::Functional);
        let blown_sum = blowup(&sum, 1).unwrap();
        let single = blowup(&p, 1).unwrap();
        let (expected, _) =
            crate::colimits::coproduct(&[single.blowup.clone(), single.blowup.clone()]).unwrap();
        assert!(find_isomorphism(
            &blown_sum.blowup,
            &expected.with_level(blown_sum.blowup.level())
        )
        .is_some());
    }

    #[test]
    fn blowup_rejects_oversized_input() {
        let square = tensor(&interval(), &interval()).unwrap();
        assert!(matches!(blowup(&square, 1), Err(BlowupError::ExceedsDimension { .. })));
    }

    #[test]
    fn parallel_and_sequential_blowups_agree() {
        let p = crossing_graph();
        let a = blowup_with(&p, 1, Parallelism::Sequential).unwrap();
        let b = blowup_with(&p, 1, Parallelism::Rayon).unwrap();
        assert_eq!(a.blowup, b.blowup);
    }
}

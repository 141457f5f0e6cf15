//! Exhaustive enumeration of morphisms between relational structures.
//!
//! This is the workhorse behind the right adjoint, the adjunction hom-set
//! checks, the colimit universal-property tests and the blowup embedding
//! search. Enumeration is a straight backtracking search over component
//! assignments with relation pairs checked as soon as both endpoints are
//! assigned; candidate images of the first cell serve as parallel seeds.

use std::collections::BTreeMap;

use crate::base::Obj;
use crate::par::{flat_map_seeds, Parallelism};
use crate::rel::{Cell, Components, RelMorphism, RelStructure};

/// All morphisms `source -> target` as component maps, deterministically
/// ordered.
pub fn enumerate_morphisms(source: &RelStructure, target: &RelStructure) -> Vec<Components> {
    enumerate_morphisms_with(source, target, Parallelism::default(), None)
}

/// [`enumerate_morphisms`] with an explicit parallelism choice and an
/// optional pin of the first cell in the search order.
pub fn enumerate_morphisms_with(
    source: &RelStructure,
    target: &RelStructure,
    par: Parallelism,
    first: Option<&Cell>,
) -> Vec<Components> {
    assert_eq!(source.base(), target.base(), "hom enumeration needs a shared base");
    let mut cells: Vec<(Obj, Cell)> = source.cells();
    if cells.is_empty() {
        return vec![Components::new()];
    }
    // larger objects first: their relation pairs constrain faces early
    cells.sort_by(|(oa, ca), (ob, cb)| ob.len().cmp(&oa.len()).then(ob.cmp(oa)).then(ca.cmp(cb)));
    if let Some(c) = first {
        if let Some(pos) = cells.iter().position(|(_, x)| x == c) {
            let pinned = cells.remove(pos);
            cells.insert(0, pinned);
        }
    }
    let index: BTreeMap<&Cell, usize> = cells.iter().enumerate().map(|(i, (_, c))| (c, i)).collect();

    // constraints checked once the later endpoint is placed
    let mut constraints: Vec<Vec<(String, usize, usize)>> = vec![Vec::new(); cells.len()];
    for (f, x, y) in source.instances() {
        let ix = index[&x];
        let iy = index[&y];
        constraints[ix.max(iy)].push((f, ix, iy));
    }

    let candidates: Vec<Vec<Cell>> = cells
        .iter()
        .map(|(o, _)| target.carrier(o).iter().cloned().collect())
        .collect();

    fn extend(
        depth: usize,
        assignment: &mut Vec<Cell>,
        cells: &[(Obj, Cell)],
        candidates: &[Vec<Cell>],
        constraints: &[Vec<(String, usize, usize)>],
        target: &RelStructure,
        out: &mut Vec<Components>,
    ) {
        if depth == cells.len() {
            let mut comps = Components::new();
            for ((o, c), img) in cells.iter().zip(assignment.iter()) {
                comps.entry(o.clone()).or_default().insert(c.clone(), img.clone());
            }
            out.push(comps);
            return;
        }
        for cand in &candidates[depth] {
            assignment.push(cand.clone());
            let ok = constraints[depth]
                .iter()
                .all(|(f, ix, iy)| target.has_pair(f, &assignment[*ix], &assignment[*iy]));
            if ok {
                extend(depth + 1, assignment, cells, candidates, constraints, target, out);
            }
            assignment.pop();
        }
    }

    let seeds: Vec<Cell> = candidates[0].clone();
    flat_map_seeds(par, seeds, |seed| {
        let mut out = Vec::new();
        let mut assignment = vec![seed];
        if constraints[0]
            .iter()
            .all(|(f, ix, iy)| target.has_pair(f, &assignment[*ix], &assignment[*iy]))
        {
            extend(1, &mut assignment, &cells, &candidates, &constraints, target, &mut out);
        }
        out
    })
}

/// [`enumerate_morphisms`], packaged as [`RelMorphism`] values.
pub fn hom_set(source: &RelStructure, target: &RelStructure) -> Vec<RelMorphism> {
    enumerate_morphisms(source, target)
        .into_iter()
        .map(|c| RelMorphism::new(source.clone(), target.clone(), c).expect("enumerated maps are total"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::graph_category;
    use crate::rel::Level;
    use std::collections::{BTreeMap, BTreeSet};

    fn edge() -> RelStructure {
        RelStructure::new(
            graph_category(),
            BTreeMap::from([
                ("0".to_string(), BTreeSet::from(["u".to_string(), "v".to_string()])),
                ("1".to_string(), BTreeSet::from(["e".to_string()])),
            ]),
            BTreeMap::from([
                ("".to_string(), BTreeSet::from([("u".to_string(), "u".to_string()), ("v".to_string(), "v".to_string())])),
                ("0".to_string(), BTreeSet::from([("e".to_string(), "e".to_string())])),
                ("-".to_string(), BTreeSet::from([("e".to_string(), "u".to_string())])),
                ("+".to_string(), BTreeSet::from([("e".to_string(), "v".to_string())])),
            ]),
            Level::Lax,
        )
        .unwrap()
    }

    fn loop_graph() -> RelStructure {
        RelStructure::new(
            graph_category(),
            BTreeMap::from([
                ("0".to_string(), BTreeSet::from(["w".to_string()])),
                ("1".to_string(), BTreeSet::from(["l".to_string()])),
            ]),
            BTreeMap::from([
                ("".to_string(), BTreeSet::from([("w".to_string(), "w".to_string())])),
                ("0".to_string(), BTreeSet::from([("l".to_string(), "l".to_string())])),
                ("-".to_string(), BTreeSet::from([("l".to_string(), "w".to_string())])),
                ("+".to_string(), BTreeSet::from([("l".to_string(), "w".to_string())])),
            ]),
            Level::Lax,
        )
        .unwrap()
    }

    #[test]
    fn edge_maps_to_loop_one_way() {
        assert_eq!(enumerate_morphisms(&edge(), &loop_graph()).len(), 1);
        // no morphism collapsing the loop onto the edge
        assert_eq!(enumerate_morphisms(&loop_graph(), &edge()).len(), 0);
        // endomorphisms of the edge: identity only (endpoints pin the edge)
        assert_eq!(enumerate_morphisms(&edge(), &edge()).len(), 1);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let a = enumerate_morphisms_with(&edge(), &loop_graph(), Parallelism::Sequential, None);
        let b = enumerate_morphisms_with(&edge(), &loop_graph(), Parallelism::Rayon, None);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_source_has_exactly_one_morphism() {
        let e = RelStructure::empty(graph_category(), Level::Lax);
        assert_eq!(enumerate_morphisms(&e, &edge()).len(), 1);
    }
}

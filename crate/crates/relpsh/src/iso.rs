//! Isomorphism search between relational structures.
//!
//! Structures here are at most a few hundred cells, so a color-refinement
//! pass (cells classified by object and iterated relation-degree signatures)
//! followed by class-respecting backtracking is plenty.

use std::collections::{BTreeMap, BTreeSet};

use crate::base::Mor;
use crate::rel::{Cell, Components, RelStructure};

type Color = u64;

fn signatures(p: &RelStructure, colors: &BTreeMap<Cell, Color>) -> BTreeMap<Cell, String> {
    let mut sigs: BTreeMap<Cell, String> = BTreeMap::new();
    for (c, col) in colors {
        sigs.insert(c.clone(), format!("{col}|"));
    }
    for (f, pairs) in p.relations() {
        let mut down: BTreeMap<&Cell, Vec<Color>> = BTreeMap::new();
        let mut up: BTreeMap<&Cell, Vec<Color>> = BTreeMap::new();
        for (x, y) in pairs {
            down.entry(x).or_default().push(colors[y]);
            up.entry(y).or_default().push(colors[x]);
        }
        for (c, sig) in sigs.iter_mut() {
            let mut d = down.remove(c).unwrap_or_default();
            let mut u = up.remove(c).unwrap_or_default();
            d.sort_unstable();
            u.sort_unstable();
            sig.push_str(&format!("{f}>{d:?}<{u:?};"));
        }
    }
    sigs
}

/// Joint color refinement: both structures are recolored against a shared
/// palette each round, so equal signatures get equal colors across the two.
fn refine_pair(p: &RelStructure, q: &RelStructure) -> (BTreeMap<Cell, Color>, BTreeMap<Cell, Color>) {
    let objects: Vec<String> = p.base().objects();
    let initial = |s: &RelStructure| -> BTreeMap<Cell, Color> {
        s.cells()
            .into_iter()
            .map(|(o, c)| (c, objects.iter().position(|x| *x == o).unwrap_or(0) as Color))
            .collect()
    };
    let mut pc = initial(p);
    let mut qc = initial(q);
    loop {
        let ps = signatures(p, &pc);
        let qs = signatures(q, &qc);
        let palette: BTreeSet<&String> = ps.values().chain(qs.values()).collect();
        let index: BTreeMap<&String, Color> =
            palette.into_iter().enumerate().map(|(i, s)| (s, i as Color)).collect();
        let new_pc: BTreeMap<Cell, Color> =
            ps.iter().map(|(c, s)| (c.clone(), index[s])).collect();
        let new_qc: BTreeMap<Cell, Color> =
            qs.iter().map(|(c, s)| (c.clone(), index[s])).collect();
        let old_count = pc.values().chain(qc.values()).collect::<BTreeSet<_>>().len();
        let new_count = new_pc.values().chain(new_qc.values()).collect::<BTreeSet<_>>().len();
        let stable = new_count == old_count;
        pc = new_pc;
        qc = new_qc;
        if stable {
            return (pc, qc);
        }
    }
}

fn class_histogram(colors: &BTreeMap<Cell, Color>) -> BTreeMap<Color, usize> {
    let mut h = BTreeMap::new();
    for col in colors.values() {
        *h.entry(*col).or_insert(0) += 1;
    }
    h
}

/// Searches for an isomorphism `p -> q`: a bijection on cells over each
/// object preserving every relation in both directions. Returns the
/// component maps if one exists.
pub fn find_isomorphism(p: &RelStructure, q: &RelStructure) -> Option<Components> {
    if p.base() != q.base() {
        return None;
    }
    for o in p.base().objects() {
        if p.carrier(&o).len() != q.carrier(&o).len() {
            return None;
        }
    }
    for f in p.base().morphisms() {
        if p.relation(&f).len() != q.relation(&f).len() {
            return None;
        }
    }
    let (pc, qc) = refine_pair(p, q);
    if class_histogram(&pc) != class_histogram(&qc) {
        return None;
    }

    // adjacency indexed per cell for incremental checks
    let mut p_adj: BTreeMap<&Cell, Vec<(&Mor, &Cell, bool)>> = BTreeMap::new();
    for (f, pairs) in p.relations() {
        for (x, y) in pairs {
            p_adj.entry(x).or_default().push((f, y, true));
            p_adj.entry(y).or_default().push((f, x, false));
        }
    }

    let mut cells: Vec<Cell> = p.cells().into_iter().map(|(_, c)| c).collect();
    // rarest color classes first
    let hist = class_histogram(&pc);
    cells.sort_by_key(|c| (hist[&pc[c]], pc[c], c.clone()));

    let mut q_by_color: BTreeMap<Color, Vec<Cell>> = BTreeMap::new();
    for (c, col) in &qc {
        q_by_color.entry(*col).or_default().push(c.clone());
    }

    struct Search<'a> {
        p: &'a RelStructure,
        q: &'a RelStructure,
        cells: &'a [Cell],
        pc: &'a BTreeMap<Cell, Color>,
        q_by_color: &'a BTreeMap<Color, Vec<Cell>>,
        p_adj: &'a BTreeMap<&'a Cell, Vec<(&'a Mor, &'a Cell, bool)>>,
    }

    impl Search<'_> {
        fn go(
            &self,
            depth: usize,
            map: &mut BTreeMap<Cell, Cell>,
            used: &mut BTreeSet<Cell>,
        ) -> bool {
            if depth == self.cells.len() {
                return true;
            }
            let c = &self.cells[depth];
            let empty = Vec::new();
            for cand in self.q_by_color.get(&self.pc[c]).unwrap_or(&empty) {
                if used.contains(cand) {
                    continue;
                }
                let consistent = self.p_adj.get(c).map(|edges| {
                    edges.iter().all(|(f, other, outgoing)| match map.get(*other) {
                        None => true,
                        Some(img) => {
                            if *outgoing {
                                self.q.has_pair(f, cand, img)
                            } else {
                                self.q.has_pair(f, img, cand)
                            }
                        }
                    })
                });
                if consistent == Some(false) {
                    continue;
                }
                map.insert(c.clone(), cand.clone());
                used.insert(cand.clone());
                if self.go(depth + 1, map, used) {
                    return true;
                }
                map.remove(c);
                used.remove(cand);
            }
            let _ = self.p;
            false
        }
    }

    let search = Search { p, q, cells: &cells, pc: &pc, q_by_color: &q_by_color, p_adj: &p_adj };
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    if !search.go(0, &mut map, &mut used) {
        return None;
    }
    // relation counts agree and the bijection preserves pairs, so it is an iso
    let mut components = Components::new();
    for (o, c) in p.cells() {
        components.entry(o).or_default().insert(c.clone(), map[&c].clone());
    }
    Some(components)
}

/// Isomorphism search restricted to candidate pairs allowed by `fit`; used
/// for isomorphisms over a fixed structure (candidates in the same fiber).
pub fn find_isomorphism_over(
    p: &RelStructure,
    q: &RelStructure,
    fit: impl Fn(&Cell, &Cell) -> bool,
) -> Option<Components> {
    // simple variant without color refinement: the fibers are small
    if p.base() != q.base() {
        return None;
    }
    for o in p.base().objects() {
        if p.carrier(&o).len() != q.carrier(&o).len() {
            return None;
        }
    }
    for f in p.base().morphisms() {
        if p.relation(&f).len() != q.relation(&f).len() {
            return None;
        }
    }
    let cells: Vec<(String, Cell)> = p.cells();
    fn go(
        depth: usize,
        cells: &[(String, Cell)],
        p: &RelStructure,
        q: &RelStructure,
        fit: &impl Fn(&Cell, &Cell) -> bool,
        map: &mut BTreeMap<Cell, Cell>,
        used: &mut BTreeSet<Cell>,
    ) -> bool {
        if depth == cells.len() {
            return true;
        }
        let (o, c) = &cells[depth];
        for cand in q.carrier(o) {
            if used.contains(cand) || !fit(c, cand) {
                continue;
            }
            let ok = p.relations().iter().all(|(f, pairs)| {
                pairs.iter().all(|(x, y)| {
                    let ix = if x == c { Some(cand) } else { map.get(x) };
                    let iy = if y == c { Some(cand) } else { map.get(y) };
                    match (ix, iy) {
                        (Some(a), Some(b)) if (x == c || y == c) => q.has_pair(f, a, b),
                        _ => true,
                    }
                })
            });
            if !ok {
                continue;
            }
            map.insert(c.clone(), cand.clone());
            used.insert(cand.clone());
            if go(depth + 1, cells, p, q, fit, map, used) {
                return true;
            }
            map.remove(c);
            used.remove(cand);
        }
        false
    }
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    if !go(0, &cells, p, q, &fit, &mut map, &mut used) {
        return None;
    }
    let mut components = Components::new();
    for (o, c) in cells {
        components.entry(o).or_default().insert(c.clone(), map[&c].clone());
    }
    Some(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{cube_category, graph_category};
    use crate::rel::{representable, Level, RelStructure};
    use std::collections::BTreeMap as Map;

    fn edge(v0: &str, v1: &str, e: &str) -> RelStructure {
        RelStructure::new(
            graph_category(),
            Map::from([
                ("0".to_string(), BTreeSet::from([v0.to_string(), v1.to_string()])),
                ("1".to_string(), BTreeSet::from([e.to_string()])),
            ]),
            Map::from([
                (
                    "".to_string(),
                    BTreeSet::from([(v0.to_string(), v0.to_string()), (v1.to_string(), v1.to_string())]),
                ),
                ("0".to_string(), BTreeSet::from([(e.to_string(), e.to_string())])),
                ("-".to_string(), BTreeSet::from([(e.to_string(), v0.to_string())])),
                ("+".to_string(), BTreeSet::from([(e.to_string(), v1.to_string())])),
            ]),
            Level::Lax,
        )
        .unwrap()
    }

    #[test]
    fn renamed_edges_are_isomorphic() {
        let a = edge("u", "v", "e");
        let b = edge("p", "q", "f");
        let iso = find_isomorphism(&a, &b).unwrap();
        assert_eq!(iso["0"]["u"], "p");
        assert_eq!(iso["0"]["v"], "q");
    }

    #[test]
    fn orientation_matters() {
        let a = edge("u", "v", "e");
        let mut rel = a.relations().clone();
        // flip the edge: swap source and target
        rel.insert("-".to_string(), BTreeSet::from([("e".to_string(), "v".to_string())]));
        rel.insert("+".to_string(), BTreeSet::from([("e".to_string(), "u".to_string())]));
        let flipped =
            RelStructure::new(graph_category(), a.carriers().clone(), rel, Level::Lax).unwrap();
        // still isomorphic (swap the vertices)…
        assert!(find_isomorphism(&a, &flipped).is_some());
        // …but a loop is not isomorphic to an edge
        let mut loop_rel = a.relations().clone();
        loop_rel.insert("+".to_string(), BTreeSet::from([("e".to_string(), "u".to_string())]));
        let lollipop =
            RelStructure::new(graph_category(), a.carriers().clone(), loop_rel, Level::Lax).unwrap();
        assert!(find_isomorphism(&a, &lollipop).is_none());
    }

    #[test]
    fn representable_cubes_are_rigidly_isomorphic_to_themselves() {
        let y3 = representable(&cube_category(3), &"3".into()).unwrap();
        assert!(find_isomorphism(&y3, &y3).is_some());
    }
}

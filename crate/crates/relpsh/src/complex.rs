//! Cell complexes: the combinatorial output of geometric realization.
//!
//! A complex is a set of open cells with dimensions plus attachment
//! instances `(big, word, small)`. An attachment is *elementary* when its
//! word has exactly one non-zero letter or is an identity, *composite*
//! otherwise. Gluing is a property of the instance: in sequential mode
//! composite attachments carry no gluing and only record that the two blocks
//! are disjoint. Topology is represented only through this data; no point
//! sets appear anywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::base::CofaceWord;
use crate::rel::Cell;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("attachment endpoint {0:?} is not a cell of the complex")]
    UnknownCell(Cell),
    #[error("attachment ({big:?}, {word}, {small:?}) has inconsistent dimensions")]
    BadDimensions { big: Cell, word: CofaceWord, small: Cell },
    #[error("cell {0:?} declared twice")]
    DuplicateCell(Cell),
    #[error("gluing identifies cells of different dimensions: {0:?} and {1:?}")]
    DimClash(Cell, Cell),
    #[error("complexes have different modes")]
    ModeMismatch,
}

/// Realization mode: standard glues every relation instance, sequential only
/// the elementary ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RealizationMode {
    Standard,
    Sequential,
}

impl fmt::Display for RealizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RealizationMode::Standard => "standard",
            RealizationMode::Sequential => "sequential",
        })
    }
}

/// Attachment tag derived from the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttachmentKind {
    Elementary,
    Composite,
}

/// An attachment instance of `small` into the boundary of `big` along a
/// coface word. `glued` records whether the instance actually identifies
/// points; non-glued instances are inert bookkeeping for disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Attachment {
    pub big: Cell,
    pub word: CofaceWord,
    pub small: Cell,
    pub glued: bool,
}

impl Attachment {
    pub fn kind(&self) -> AttachmentKind {
        if self.word.is_elementary() || self.word.is_identity() {
            AttachmentKind::Elementary
        } else {
            AttachmentKind::Composite
        }
    }
}

/// Open cells with dimensions plus tagged attachment instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellComplex {
    pub mode: RealizationMode,
    cells: BTreeMap<Cell, usize>,
    attachments: BTreeSet<Attachment>,
}

impl CellComplex {
    pub fn new(
        mode: RealizationMode,
        cells: BTreeMap<Cell, usize>,
        attachments: BTreeSet<Attachment>,
    ) -> Result<Self, ComplexError> {
        for a in &attachments {
            let big = cells.get(&a.big).ok_or_else(|| ComplexError::UnknownCell(a.big.clone()))?;
            let small =
                cells.get(&a.small).ok_or_else(|| ComplexError::UnknownCell(a.small.clone()))?;
            if a.word.cod() != *big || a.word.dom() != *small {
                return Err(ComplexError::BadDimensions {
                    big: a.big.clone(),
                    word: a.word.clone(),
                    small: a.small.clone(),
                });
            }
        }
        Ok(CellComplex { mode, cells, attachments })
    }

    pub fn empty(mode: RealizationMode) -> Self {
        CellComplex { mode, cells: BTreeMap::new(), attachments: BTreeSet::new() }
    }

    pub fn cells(&self) -> &BTreeMap<Cell, usize> {
        &self.cells
    }

    pub fn attachments(&self) -> &BTreeSet<Attachment> {
        &self.attachments
    }

    pub fn dim(&self, c: &Cell) -> Option<usize> {
        self.cells.get(c).copied()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Cell counts per dimension.
    pub fn cell_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for d in self.cells.values() {
            *census.entry(*d).or_insert(0) += 1;
        }
        census
    }

    /// Euler characteristic: the alternating sum of cell counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells.values().map(|d| if d % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// Partition of the cells into components of the adjacency graph whose
    /// edges are the gluing attachments. Sorted by least member.
    pub fn components(&self) -> Vec<BTreeSet<Cell>> {
        let mut parent: BTreeMap<&Cell, &Cell> = self.cells.keys().map(|c| (c, c)).collect();
        fn find<'a>(parent: &BTreeMap<&'a Cell, &'a Cell>, mut c: &'a Cell) -> &'a Cell {
            while parent[c] != c {
                c = parent[c];
            }
            c
        }
        for a in &self.attachments {
            if !a.glued {
                continue;
            }
            let ra = find(&parent, &a.big);
            let rb = find(&parent, &a.small);
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent.insert(hi, lo);
            }
        }
        let mut by_root: BTreeMap<&Cell, BTreeSet<Cell>> = BTreeMap::new();
        for c in self.cells.keys() {
            by_root.entry(find(&parent, c)).or_default().insert(c.clone());
        }
        by_root.into_values().collect()
    }
}

/// A map of complexes: cells to cells, preserving dimension and every glued
/// attachment with its exact word. Non-glued records impose nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexMap {
    pub map: BTreeMap<Cell, Cell>,
}

impl ComplexMap {
    pub fn identity(k: &CellComplex) -> Self {
        ComplexMap { map: k.cells().keys().map(|c| (c.clone(), c.clone())).collect() }
    }

    /// Checks that `self` is a morphism `source -> target`.
    pub fn check(&self, source: &CellComplex, target: &CellComplex) -> Result<(), String> {
        for (c, d) in source.cells() {
            match self.map.get(c) {
                None => return Err(format!("no image for cell {c}")),
                Some(img) => match target.dim(img) {
                    None => return Err(format!("image {img} of {c} is not a cell")),
                    Some(td) if td != *d => {
                        return Err(format!("cell {c} of dimension {d} maps to {img} of dimension {td}"))
                    }
                    Some(_) => {}
                },
            }
        }
        for a in source.attachments() {
            if !a.glued {
                continue;
            }
            let big = &self.map[&a.big];
            let small = &self.map[&a.small];
            let image = Attachment {
                big: big.clone(),
                word: a.word.clone(),
                small: small.clone(),
                glued: true,
            };
            if !target.attachments().contains(&image) {
                return Err(format!(
                    "attachment ({}, {}, {}) has no image: ({}, {}, {}) is not glued in the target",
                    a.big, a.word, a.small, big, a.word, small
                ));
            }
        }
        Ok(())
    }
}

/// A block diagram for the complex gluer: labeled complexes plus cell-level
/// maps along which they are identified.
#[derive(Debug, Clone, Default)]
pub struct ComplexDiagram {
    pub objects: BTreeMap<String, CellComplex>,
    /// `(from, to, map)` with `map` a dimension-preserving cell map.
    pub arrows: Vec<(String, String, BTreeMap<Cell, Cell>)>,
}

/// Colimit of a complex diagram: disjoint cells prefixed by object label,
/// identified along the arrows; attachments are the images of the block
/// attachments. No closure of attachments is performed: gluing two blocks
/// along a shared face never manufactures a composite gluing, which is
/// exactly the coproduct-like behaviour of the sequential realization.
pub fn complex_colimit(
    diagram: &ComplexDiagram,
    mode: RealizationMode,
) -> Result<(CellComplex, BTreeMap<String, ComplexMap>), ComplexError> {
    let mut dims: BTreeMap<Cell, usize> = BTreeMap::new();
    let prefixed = |label: &str, c: &Cell| format!("{label}:{c}");
    for (label, k) in &diagram.objects {
        for (c, d) in k.cells() {
            let name = prefixed(label, c);
            if dims.insert(name.clone(), *d).is_some() {
                return Err(ComplexError::DuplicateCell(name));
            }
        }
    }
    let mut parent: BTreeMap<Cell, Cell> = dims.keys().map(|c| (c.clone(), c.clone())).collect();
    fn find(parent: &BTreeMap<Cell, Cell>, c: &Cell) -> Cell {
        let mut cur = c.clone();
        while parent[&cur] != cur {
            cur = parent[&cur].clone();
        }
        cur
    }
    for (from, to, map) in &diagram.arrows {
        let src = diagram.objects.get(from).ok_or_else(|| ComplexError::UnknownCell(from.clone()))?;
        let _dst = diagram.objects.get(to).ok_or_else(|| ComplexError::UnknownCell(to.clone()))?;
        for c in src.cells().keys() {
            let img = map.get(c).ok_or_else(|| ComplexError::UnknownCell(c.clone()))?;
            let a = find(&parent, &prefixed(from, c));
            let b = find(&parent, &prefixed(to, img));
            if a != b {
                if dims[&a] != dims[&b] {
                    return Err(ComplexError::DimClash(a, b));
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent.insert(hi, lo);
            }
        }
    }
    let mut cells: BTreeMap<Cell, usize> = BTreeMap::new();
    for (c, d) in &dims {
        cells.insert(find(&parent, c), *d);
    }
    let mut attachments = BTreeSet::new();
    for (label, k) in &diagram.objects {
        for a in k.attachments() {
            attachments.insert(Attachment {
                big: find(&parent, &prefixed(label, &a.big)),
                word: a.word.clone(),
                small: find(&parent, &prefixed(label, &a.small)),
                glued: a.glued,
            });
        }
    }
    // on identical instances, glued wins over non-glued
    let deduped: BTreeSet<Attachment> = attachments
        .iter()
        .filter(|a| {
            a.glued
                || !attachments.contains(&Attachment {
                    big: a.big.clone(),
                    word: a.word.clone(),
                    small: a.small.clone(),
                    glued: true,
                })
        })
        .cloned()
        .collect();
    let result = CellComplex::new(mode, cells, deduped)?;
    let mut cocone = BTreeMap::new();
    for (label, k) in &diagram.objects {
        let map = k
            .cells()
            .keys()
            .map(|c| (c.clone(), find(&parent, &prefixed(label, c))))
            .collect();
        cocone.insert(label.clone(), ComplexMap { map });
    }
    Ok((result, cocone))
}

/// Isomorphism of complexes: a dimension-preserving bijection matching the
/// attachments. With `gluing_only`, non-glued records are ignored on both
/// sides, which compares the underlying glued spaces.
pub fn complexes_isomorphic(k: &CellComplex, l: &CellComplex, gluing_only: bool) -> bool {
    let filter = |c: &CellComplex| -> BTreeSet<Attachment> {
        c.attachments()
            .iter()
            .filter(|a| a.glued || !gluing_only)
            .map(|a| Attachment { glued: a.glued || gluing_only, ..a.clone() })
            .collect()
    };
    let ka = filter(k);
    let la = filter(l);
    if k.cell_census() != l.cell_census() || ka.len() != la.len() {
        return false;
    }
    let mut cells: Vec<&Cell> = k.cells().keys().collect();
    // most-attached first
    let mut degree: BTreeMap<&Cell, usize> = BTreeMap::new();
    for a in &ka {
        *degree.entry(&a.big).or_default() += 1;
        *degree.entry(&a.small).or_default() += 1;
    }
    cells.sort_by_key(|c| (usize::MAX - degree.get(*c).copied().unwrap_or(0), (*c).clone()));

    fn go(
        depth: usize,
        cells: &[&Cell],
        k: &CellComplex,
        l: &CellComplex,
        ka: &BTreeSet<Attachment>,
        la: &BTreeSet<Attachment>,
        map: &mut BTreeMap<Cell, Cell>,
        used: &mut BTreeSet<Cell>,
    ) -> bool {
        if depth == cells.len() {
            // all attachments must be matched exactly
            return ka.iter().all(|a| {
                la.contains(&Attachment {
                    big: map[&a.big].clone(),
                    word: a.word.clone(),
                    small: map[&a.small].clone(),
                    glued: a.glued,
                })
            });
        }
        let c = cells[depth];
        let d = k.dim(c).unwrap();
        for (cand, cd) in l.cells() {
            if *cd != d || used.contains(cand) {
                continue;
            }
            let ok = ka.iter().all(|a| {
                let big = if &a.big == c { Some(cand) } else { map.get(&a.big) };
                let small = if &a.small == c { Some(cand) } else { map.get(&a.small) };
                match (big, small) {
                    (Some(b), Some(s)) => la.contains(&Attachment {
                        big: b.clone(),
                        word: a.word.clone(),
                        small: s.clone(),
                        glued: a.glued,
                    }),
                    _ => true,
                }
            });
            if !ok {
                continue;
            }
            map.insert(c.clone(), cand.clone());
            used.insert(cand.clone());
            if go(depth + 1, cells, k, l, ka, la, map, used) {
                return true;
            }
            map.remove(c);
            used.remove(cand);
        }
        false
    }

    go(0, &cells, k, l, &ka, &la, &mut BTreeMap::new(), &mut BTreeSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> CofaceWord {
        CofaceWord::parse(s).unwrap()
    }

    fn closed_square() -> CellComplex {
        let cells = BTreeMap::from([
            ("v00".to_string(), 0),
            ("v01".to_string(), 0),
            ("v10".to_string(), 0),
            ("v11".to_string(), 0),
            ("bottom".to_string(), 1),
            ("top".to_string(), 1),
            ("left".to_string(), 1),
            ("right".to_string(), 1),
            ("sq".to_string(), 2),
        ]);
        let g = |big: &str, word: &str, small: &str| Attachment {
            big: big.to_string(),
            word: w(word),
            small: small.to_string(),
            glued: true,
        };
        let attachments = BTreeSet::from([
            g("sq", "-0", "left"),
            g("sq", "+0", "right"),
            g("sq", "0-", "bottom"),
            g("sq", "0+", "top"),
            g("sq", "--", "v00"),
            g("sq", "-+", "v01"),
            g("sq", "+-", "v10"),
            g("sq", "++", "v11"),
            g("bottom", "-", "v00"),
            g("bottom", "+", "v10"),
            g("top", "-", "v01"),
            g("top", "+", "v11"),
            g("left", "-", "v00"),
            g("left", "+", "v01"),
            g("right", "-", "v10"),
            g("right", "+", "v11"),
        ]);
        CellComplex::new(RealizationMode::Standard, cells, attachments).unwrap()
    }

    #[test]
    fn closed_square_census_and_characteristic() {
        let k = closed_square();
        assert_eq!(k.cell_census(), BTreeMap::from([(0, 4), (1, 4), (2, 1)]));
        assert_eq!(k.euler_characteristic(), 1);
        assert_eq!(k.components().len(), 1);
    }

    #[test]
    fn censuses_add_over_disjoint_unions() {
        let k = closed_square();
        let diagram = ComplexDiagram {
            objects: BTreeMap::from([("a".to_string(), k.clone()), ("b".to_string(), k.clone())]),
            arrows: Vec::new(),
        };
        let (sum, _) = complex_colimit(&diagram, RealizationMode::Standard).unwrap();
        assert_eq!(sum.cell_census(), BTreeMap::from([(0, 8), (1, 8), (2, 2)]));
        assert_eq!(sum.components().len(), 2);
        assert_eq!(sum.euler_characteristic(), 2);
    }

    #[test]
    fn non_glued_attachments_do_not_connect() {
        let cells = BTreeMap::from([("v".to_string(), 0), ("sq".to_string(), 2)]);
        let a = Attachment { big: "sq".into(), word: w("--"), small: "v".into(), glued: false };
        let k = CellComplex::new(RealizationMode::Sequential, cells, BTreeSet::from([a])).unwrap();
        assert_eq!(k.components().len(), 2);
    }

    #[test]
    fn attachment_dimensions_are_checked() {
        let cells = BTreeMap::from([("v".to_string(), 0), ("e".to_string(), 1)]);
        let bad = Attachment { big: "e".into(), word: w("--"), small: "v".into(), glued: true };
        assert!(matches!(
            CellComplex::new(RealizationMode::Standard, cells, BTreeSet::from([bad])),
            Err(ComplexError::BadDimensions { .. })
        ));
    }

    #[test]
    fn complex_isomorphism_respects_words() {
        let k = closed_square();
        assert!(complexes_isomorphic(&k, &k, false));
        let mut renamed_cells = BTreeMap::new();
        for (c, d) in k.cells() {
            renamed_cells.insert(format!("r~{c}"), *d);
        }
        let renamed_att = k
            .attachments()
            .iter()
            .map(|a| Attachment {
                big: format!("r~{}", a.big),
                word: a.word.clone(),
                small: format!("r~{}", a.small),
                glued: a.glued,
            })
            .collect();
        let l = CellComplex::new(RealizationMode::Standard, renamed_cells, renamed_att).unwrap();
        assert!(complexes_isomorphic(&k, &l, false));
    }
}

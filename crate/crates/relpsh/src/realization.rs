//! The model-driven realization engine.
//!
//! A realization of relational structures in a cocomplete target is
//! determined by a block per base object and a block per base morphism with
//! two injections, subject to three conditions: the injections are jointly
//! pointwise surjective onto the relation block, the codiagonal factors
//! through the identity block, and the canonical map into the pushout of two
//! consecutive relation blocks factors through the composite block. The
//! engine checks the conditions, then realizes a structure as the colimit of
//! blocks indexed by its cells and relation instances.
//!
//! Two block targets are supported: relational structures (realized through
//! the colimits module) and cell complexes (realized through the complex
//! gluer). The barycentric-subdivision model is the standard example of the
//! first kind; the standard and sequential geometric realizations are the
//! two examples of the second.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

use crate::base::{BaseCategory, CofaceWord, Letter, Mor, Obj};
use crate::colimits::{finite_colimit, ColimitError, Diagram, DiagramArrow};
use crate::complex::{
    complex_colimit, Attachment, CellComplex, ComplexDiagram, ComplexError, ComplexMap,
    RealizationMode,
};
use crate::par::{flat_map_seeds, Parallelism};
use crate::rel::{Cell, Components, Level, RelMorphism, RelStructure, StructureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("structure and model live over different bases")]
    BaseMismatch,
    #[error("operation needs a cube-like base")]
    NotCubeLike,
    #[error("structure does not validate at level {level}: {first}")]
    NotValid { level: Level, first: String },
    #[error("unknown cell {0:?}")]
    UnknownCell(Cell),
    #[error("point has {got} coordinates, cell has dimension {want}")]
    BadPointLength { got: usize, want: usize },
    #[error("point coordinate {0} is not strictly between 0 and 1")]
    BadPointCoordinate(Ratio<i64>),
    #[error("realized cell names collide at {0:?}")]
    NameCollision(Cell),
    #[error("model is missing a block for {0:?}")]
    MissingBlock(String),
    #[error("{0}")]
    Colimit(#[from] ColimitError),
    #[error("{0}")]
    Complex(#[from] ComplexError),
    #[error("{0}")]
    Structure(#[from] StructureError),
}

/// Cell-level map between blocks.
pub type BlockMap = BTreeMap<Cell, Cell>;

/// Relational-structure-valued blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelBlocks {
    pub object_blocks: BTreeMap<Obj, RelStructure>,
    pub relation_blocks: BTreeMap<Mor, RelStructure>,
    pub inj0: BTreeMap<Mor, BlockMap>,
    pub inj1: BTreeMap<Mor, BlockMap>,
}

/// Cell-complex-valued blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellBlocks {
    pub mode: RealizationMode,
    pub object_blocks: BTreeMap<Obj, CellComplex>,
    pub relation_blocks: BTreeMap<Mor, CellComplex>,
    pub inj0: BTreeMap<Mor, BlockMap>,
    pub inj1: BTreeMap<Mor, BlockMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockTarget {
    Rel(RelBlocks),
    Cell(CellBlocks),
}

/// A choice of blocks and injections over a base, together with the axiom
/// level of the theory it models: lax models must satisfy all three
/// conditions, family models only the joint surjectivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelAssignment {
    pub base: BaseCategory,
    pub level: Level,
    pub target: BlockTarget,
}

/// Failure of condition 2 at a composable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cond2Failure {
    pub f: Mor,
    pub g: Mor,
    pub composite: Mor,
    pub reason: String,
}

impl std::fmt::Display for Cond2Failure {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "condition 2 fails at R_{} (f = {:?}, g = {:?}): {}",
            if self.composite.is_empty() { "<id_0>".to_string() } else { self.composite.clone() },
            self.f,
            self.g,
            self.reason
        )
    }
}

/// Report of [`check_model`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelReport {
    /// Condition 0 failures: `(f, uncovered cell)`.
    pub not_jointly_surjective: Vec<(Mor, Cell)>,
    /// Condition 1 failures: `(object, reason)`.
    pub no_codiagonal: Vec<(Obj, String)>,
    /// Condition 2 failures.
    pub no_transitivity: Vec<Cond2Failure>,
}

impl ModelReport {
    /// All three conditions hold (a model of the lax theory).
    pub fn ok(&self) -> bool {
        self.ok_for_families() && self.no_codiagonal.is_empty() && self.no_transitivity.is_empty()
    }

    /// Condition 0 alone (a model of the family theory).
    pub fn ok_for_families(&self) -> bool {
        self.not_jointly_surjective.is_empty()
    }
}

// ---------------------------------------------------------------------------
// model checking

struct RelTargetOps;
struct CellTargetOps;

trait TargetOps {
    type Block: Clone;
    fn cells(block: &Self::Block) -> Vec<Cell>;
    /// Pushout of `left <-l- apex -r-> right`; returns the pushout and the
    /// two cocone legs as cell maps.
    fn pushout(
        apex: &Self::Block,
        left: &Self::Block,
        l: &BlockMap,
        right: &Self::Block,
        r: &BlockMap,
    ) -> Result<(Self::Block, BlockMap, BlockMap), RealizeError>;
    /// Is the given cell map a morphism `source -> target`?
    fn check_map(source: &Self::Block, target: &Self::Block, map: &BlockMap) -> Result<(), String>;
}

impl TargetOps for RelTargetOps {
    type Block = RelStructure;

    fn cells(block: &Self::Block) -> Vec<Cell> {
        block.cells().into_iter().map(|(_, c)| c).collect()
    }

    fn pushout(
        apex: &Self::Block,
        left: &Self::Block,
        l: &BlockMap,
        right: &Self::Block,
        r: &BlockMap,
    ) -> Result<(Self::Block, BlockMap, BlockMap), RealizeError> {
        let to_components = |block: &RelStructure, map: &BlockMap| -> Components {
            let mut comps = Components::new();
            for (o, cells) in block.carriers() {
                for c in cells {
                    comps.entry(o.clone()).or_default().insert(c.clone(), map[c].clone());
                }
            }
            comps
        };
        let left_leg = RelMorphism::new(apex.clone(), left.clone(), to_components(apex, l))?;
        let right_leg = RelMorphism::new(apex.clone(), right.clone(), to_components(apex, r))?;
        let span = crate::colimits::Span::new(left_leg, right_leg)?;
        let (po, leg_l, leg_r) = crate::colimits::pushout(&span, Level::Lax)?;
        let flatten = |m: &RelMorphism| -> BlockMap {
            m.components().values().flat_map(|c| c.clone()).collect()
        };
        Ok((po, flatten(&leg_l), flatten(&leg_r)))
    }

    fn check_map(source: &Self::Block, target: &Self::Block, map: &BlockMap) -> Result<(), String> {
        for (f, x, y) in source.instances() {
            let fx = map.get(&x).ok_or_else(|| format!("no image for {x}"))?;
            let fy = map.get(&y).ok_or_else(|| format!("no image for {y}"))?;
            if !target.has_pair(&f, fx, fy) {
                return Err(format!("relation pair ({x} ->_{f} {y}) is not preserved"));
            }
        }
        Ok(())
    }
}

impl TargetOps for CellTargetOps {
    type Block = CellComplex;

    fn cells(block: &Self::Block) -> Vec<Cell> {
        block.cells().keys().cloned().collect()
    }

    fn pushout(
        apex: &Self::Block,
        left: &Self::Block,
        l: &BlockMap,
        right: &Self::Block,
        r: &BlockMap,
    ) -> Result<(Self::Block, BlockMap, BlockMap), RealizeError> {
        let diagram = ComplexDiagram {
            objects: BTreeMap::from([
                ("apex".to_string(), apex.clone()),
                ("left".to_string(), left.clone()),
                ("right".to_string(), right.clone()),
            ]),
            arrows: vec![
                ("apex".to_string(), "left".to_string(), l.clone()),
                ("apex".to_string(), "right".to_string(), r.clone()),
            ],
        };
        let (po, cocone) = complex_colimit(&diagram, apex.mode)?;
        Ok((po, cocone["left"].map.clone(), cocone["right"].map.clone()))
    }

    fn check_map(source: &Self::Block, target: &Self::Block, map: &BlockMap) -> Result<(), String> {
        ComplexMap { map: map.clone() }.check(source, target)
    }
}

fn check_model_generic<T: TargetOps>(
    base: &BaseCategory,
    object_blocks: &BTreeMap<Obj, T::Block>,
    relation_blocks: &BTreeMap<Mor, T::Block>,
    inj0: &BTreeMap<Mor, BlockMap>,
    inj1: &BTreeMap<Mor, BlockMap>,
    par: Parallelism,
) -> ModelReport
where
    T::Block: Sync + Send,
{
    let mut report = ModelReport::default();

    // condition 0: joint pointwise surjectivity
    for f in base.morphisms() {
        let block = &relation_blocks[&f];
        let covered: BTreeSet<&Cell> = inj0[&f].values().chain(inj1[&f].values()).collect();
        for c in T::cells(block) {
            if !covered.contains(&c) {
                report.not_jointly_surjective.push((f.clone(), c));
            }
        }
    }

    // condition 1: the codiagonal factors through the identity injections
    for o in base.objects() {
        let id = base.identity(&o).expect("enumerated object");
        let obj_block = &object_blocks[&o];
        let id_block = &relation_blocks[&id];
        let mut forced: BlockMap = BTreeMap::new();
        let mut conflict = None;
        for c in T::cells(obj_block) {
            for image in [&inj0[&id][&c], &inj1[&id][&c]] {
                if let Some(prev) = forced.insert(image.clone(), c.clone()) {
                    if &prev != &c {
                        conflict = Some(format!(
                            "codiagonal is not well defined at {image}: forced to both {prev} and {c}"
                        ));
                    }
                }
            }
        }
        if let Some(reason) = conflict {
            report.no_codiagonal.push((o.clone(), reason));
            continue;
        }
        let total: BlockMap = T::cells(id_block)
            .into_iter()
            .filter_map(|z| forced.get(&z).map(|v| (z, v.clone())))
            .collect();
        if total.len() != T::cells(id_block).len() {
            // uncovered cells are already condition-0 failures
            continue;
        }
        if let Err(reason) = T::check_map(id_block, obj_block, &total) {
            report.no_codiagonal.push((o.clone(), reason));
        }
    }

    // condition 2: for every composable pair, the canonical map to the
    // pushout factors through the composite block
    let pairs = base.composable_pairs();
    let failures = flat_map_seeds(par, pairs, |(f, g)| {
        let h = base.compose(&f, &g).expect("composable");
        let d = base.dom(&f).expect("valid");
        let apex = &object_blocks[&d];
        let (po, leg_f, leg_g) = match T::pushout(
            apex,
            &relation_blocks[&f],
            &inj1[&f],
            &relation_blocks[&g],
            &inj0[&g],
        ) {
            Ok(x) => x,
            Err(e) => {
                return vec![Cond2Failure {
                    f,
                    g,
                    composite: h,
                    reason: format!("pushout failed: {e}"),
                }]
            }
        };
        // forced factorization on the composite block
        let c = base.cod(&f).expect("valid");
        let e = base.dom(&g).expect("valid");
        let mut forced: BlockMap = BTreeMap::new();
        for u in T::cells(&object_blocks[&c]) {
            let z = inj0[&h][&u].clone();
            let target = leg_f[&inj0[&f][&u]].clone();
            if let Some(prev) = forced.insert(z.clone(), target.clone()) {
                if prev != target {
                    return vec![Cond2Failure {
                        f,
                        g,
                        composite: h,
                        reason: format!("factorization forced to two values at {z}"),
                    }];
                }
            }
        }
        for v in T::cells(&object_blocks[&e]) {
            let z = inj1[&h][&v].clone();
            let target = leg_g[&inj1[&g][&v]].clone();
            if let Some(prev) = forced.insert(z.clone(), target.clone()) {
                if prev != target {
                    return vec![Cond2Failure {
                        f,
                        g,
                        composite: h,
                        reason: format!("factorization forced to two values at {z}"),
                    }];
                }
            }
        }
        let composite_block = &relation_blocks[&h];
        if forced.len() != T::cells(composite_block).len() {
            // uncovered cells of the composite block: condition 0 territory
            return Vec::new();
        }
        if let Err(reason) = T::check_map(composite_block, &po, &forced) {
            return vec![Cond2Failure { f, g, composite: h, reason }];
        }
        // the factor on the M(d) summand is a composite of block maps and
        // needs no further check
        Vec::new()
    });
    report.no_transitivity = failures;
    report
}

/// Verifies the three model conditions: joint pointwise surjectivity, the
/// codiagonal factorization, and the transitivity factorization (both by
/// forced-map search). Family-level models only need
/// [`ModelReport::ok_for_families`].
pub fn check_model(model: &ModelAssignment) -> ModelReport {
    check_model_with(model, Parallelism::default())
}

/// [`check_model`] with an explicit parallelism choice.
pub fn check_model_with(model: &ModelAssignment, par: Parallelism) -> ModelReport {
    match &model.target {
        BlockTarget::Rel(blocks) => check_model_generic::<RelTargetOps>(
            &model.base,
            &blocks.object_blocks,
            &blocks.relation_blocks,
            &blocks.inj0,
            &blocks.inj1,
            par,
        ),
        BlockTarget::Cell(blocks) => check_model_generic::<CellTargetOps>(
            &model.base,
            &blocks.object_blocks,
            &blocks.relation_blocks,
            &blocks.inj0,
            &blocks.inj1,
            par,
        ),
    }
}

// ---------------------------------------------------------------------------
// the geometric models

fn single_cell_complex(mode: RealizationMode, name: &str, dim: usize) -> CellComplex {
    CellComplex::new(mode, BTreeMap::from([(name.to_string(), dim)]), BTreeSet::new())
        .expect("one cell, no attachments")
}

/// The geometric block model over the truncated cube category: `M(n)` is a
/// single open `n`-cell and `M(R_f)` a big and a small cell attached along
/// the word of `f`. In standard mode every attachment glues; in sequential
/// mode only the elementary ones do, composite blocks being disjoint unions.
/// The standard model is a family-level model (it fails the transitivity
/// condition), the sequential one a lax-level model.
pub fn geometric_model(max_dim: usize, mode: RealizationMode) -> ModelAssignment {
    let base = crate::base::cube_category(max_dim);
    let mut object_blocks = BTreeMap::new();
    for o in base.objects() {
        let n = base.object_dim(&o).expect("cube object");
        object_blocks.insert(o, single_cell_complex(mode, "c", n));
    }
    let mut relation_blocks = BTreeMap::new();
    let mut inj0 = BTreeMap::new();
    let mut inj1 = BTreeMap::new();
    for f in base.morphisms() {
        let word = base.word(&f).expect("cube morphism");
        if word.is_identity() {
            relation_blocks.insert(f.clone(), single_cell_complex(mode, "c", word.cod()));
            inj0.insert(f.clone(), BTreeMap::from([("c".to_string(), "c".to_string())]));
            inj1.insert(f.clone(), BTreeMap::from([("c".to_string(), "c".to_string())]));
            continue;
        }
        let glued = mode == RealizationMode::Standard || word.is_elementary();
        let cells = BTreeMap::from([("big".to_string(), word.cod()), ("small".to_string(), word.dom())]);
        let attachments = BTreeSet::from([Attachment {
            big: "big".to_string(),
            word,
            small: "small".to_string(),
            glued,
        }]);
        relation_blocks.insert(f.clone(), CellComplex::new(mode, cells, attachments).expect("valid"));
        inj0.insert(f.clone(), BTreeMap::from([("c".to_string(), "big".to_string())]));
        inj1.insert(f.clone(), BTreeMap::from([("c".to_string(), "small".to_string())]));
    }
    let level = match mode {
        RealizationMode::Standard => Level::Family,
        RealizationMode::Sequential => Level::Lax,
    };
    ModelAssignment {
        base,
        level,
        target: BlockTarget::Cell(CellBlocks { mode, object_blocks, relation_blocks, inj0, inj1 }),
    }
}

// subdivision blocks: cells are coordinate tuples over J

const CENTER: [&str; 3] = ["1/4", "1/2", "3/4"];

fn tuple_name(coords: &[&str]) -> Cell {
    format!("({})", coords.join(","))
}

fn tuple_dim(coords: &[&str]) -> usize {
    coords.iter().filter(|c| **c == "1/4" || **c == "3/4").count()
}

/// Applies a coface word to a tuple cell: each collapsed edge coordinate
/// moves to the matching endpoint of its edge of J. `None` when a letter
/// does not match the coordinate's endpoint inside the block alphabet.
fn tuple_face(coords: &[&str], word: &CofaceWord) -> Option<Vec<&'static str>> {
    let mut out = Vec::with_capacity(coords.len());
    let mut letters = word.letters().iter();
    for c in coords {
        match *c {
            "1/4" | "3/4" => {
                let edge_is_low = *c == "1/4";
                match letters.next()? {
                    Letter::Zero => out.push(if edge_is_low { "1/4" } else { "3/4" }),
                    Letter::Minus => out.push(if edge_is_low { "0" } else { "1/2" }),
                    Letter::Plus => out.push(if edge_is_low { "1/2" } else { "1" }),
                }
            }
            other => out.push(match other {
                "0" => "0",
                "1/2" => "1/2",
                "1" => "1",
                _ => unreachable!("block alphabet"),
            }),
        }
    }
    if letters.next().is_some() {
        return None;
    }
    Some(out)
}

fn tuples_over(alphabets: &[Vec<&'static str>]) -> Vec<Vec<&'static str>> {
    let mut out: Vec<Vec<&'static str>> = vec![Vec::new()];
    for letters in alphabets {
        out = out
            .into_iter()
            .flat_map(|t| {
                letters.iter().map(move |l| {
                    let mut t = t.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    out
}

fn block_from_tuples(
    base: &BaseCategory,
    tuples: Vec<Vec<&'static str>>,
) -> Result<RelStructure, StructureError> {
    let cell_set: BTreeSet<Vec<&'static str>> = tuples.into_iter().collect();
    let mut carriers: BTreeMap<Obj, BTreeSet<Cell>> = BTreeMap::new();
    for t in &cell_set {
        carriers
            .entry(tuple_dim(t).to_string())
            .or_default()
            .insert(tuple_name(t));
    }
    let mut relations: BTreeMap<Mor, crate::rel::RelPairs> = BTreeMap::new();
    for f in base.morphisms() {
        let word = base.word(&f).expect("cube base");
        let mut pairs = crate::rel::RelPairs::new();
        for t in &cell_set {
            if tuple_dim(t) != word.cod() {
                continue;
            }
            if let Some(face) = tuple_face(t, &word) {
                if cell_set.contains(&face) {
                    pairs.insert((tuple_name(t), tuple_name(&face)));
                }
            }
        }
        relations.insert(f, pairs);
    }
    RelStructure::new(base.clone(), carriers, relations, Level::Lax)
}

/// The barycentric-subdivision model: `M(n)` is the subdivided open
/// `n`-cube (cells are tuples over `{1/4, 1/2, 3/4}`, the dimension being
/// the number of non-central coordinates) and `M(R_f)` additionally carries
/// the subdivided open face selected by `f`.
pub fn subdivision_model(max_dim: usize) -> ModelAssignment {
    let base = crate::base::cube_category(max_dim);
    let mut object_blocks = BTreeMap::new();
    for o in base.objects() {
        let n = base.object_dim(&o).expect("cube object");
        let tuples = tuples_over(&vec![CENTER.to_vec(); n]);
        object_blocks.insert(o, block_from_tuples(&base, tuples).expect("subdivided cube"));
    }
    let mut relation_blocks = BTreeMap::new();
    let mut inj0 = BTreeMap::new();
    let mut inj1 = BTreeMap::new();
    for f in base.morphisms() {
        let word = base.word(&f).expect("cube base");
        let m = word.cod();
        let mut tuples = tuples_over(&vec![CENTER.to_vec(); m]);
        // the subdivided open face selected by f
        let face_alphabets: Vec<Vec<&'static str>> = word
            .letters()
            .iter()
            .map(|l| match l {
                Letter::Zero => CENTER.to_vec(),
                Letter::Minus => vec!["0"],
                Letter::Plus => vec!["1"],
            })
            .collect();
        let face_tuples = tuples_over(&face_alphabets);
        tuples.extend(face_tuples.iter().cloned());
        let block = block_from_tuples(&base, tuples).expect("subdivided block");

        let center_map: BlockMap = tuples_over(&vec![CENTER.to_vec(); m])
            .into_iter()
            .map(|t| (tuple_name(&t), tuple_name(&t)))
            .collect();
        // the small cube lands in the face: zeros of the word pick up its
        // coordinates in order
        let mut face_map: BlockMap = BTreeMap::new();
        for s in tuples_over(&vec![CENTER.to_vec(); word.dom()]) {
            let mut coords = Vec::with_capacity(m);
            let mut fill = s.iter();
            for l in word.letters() {
                coords.push(match l {
                    Letter::Zero => *fill.next().expect("zeros match the domain"),
                    Letter::Minus => "0",
                    Letter::Plus => "1",
                });
            }
            face_map.insert(tuple_name(&s), tuple_name(&coords));
        }
        relation_blocks.insert(f.clone(), block);
        inj0.insert(f.clone(), center_map);
        inj1.insert(f.clone(), face_map);
    }
    ModelAssignment {
        base,
        level: Level::Lax,
        target: BlockTarget::Rel(RelBlocks { object_blocks, relation_blocks, inj0, inj1 }),
    }
}

// ---------------------------------------------------------------------------
// realization as a colimit over the extended category of elements

/// Where a realized cell came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockKey {
    /// The block of a cell of the realized structure.
    Cell(Cell),
    /// The block of a relation instance `(f, x, y)`.
    Instance(Mor, Cell, Cell),
}

/// Realized object together with the tracking map from block cells to
/// realized cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realized<T> {
    pub value: T,
    pub tracking: BTreeMap<(BlockKey, Cell), Cell>,
}

struct RealizePlan {
    keys: Vec<(BlockKey, String)>,
}

fn realize_plan(p: &RelStructure) -> RealizePlan {
    let mut keys = Vec::new();
    for (i, (_, x)) in p.cells().into_iter().enumerate() {
        keys.push((BlockKey::Cell(x), format!("cell#{i:06}")));
    }
    for (i, (f, x, y)) in p.instances().into_iter().enumerate() {
        keys.push((BlockKey::Instance(f, x, y), format!("rel#{i:06}")));
    }
    RealizePlan { keys }
}

fn rename_realized(
    p: &RelStructure,
    object_block_sizes: &BTreeMap<Obj, usize>,
    class_of: &BTreeMap<Cell, Cell>, // prefixed name -> class representative
    plan: &RealizePlan,
) -> Result<(BTreeMap<Cell, Cell>, BTreeMap<(BlockKey, Cell), Cell>), RealizeError> {
    // choose a canonical public name per class: least (anchor, local) pair
    // among cell-block members, the anchor alone when its block has one cell
    let mut best: BTreeMap<&Cell, (bool, Cell, Cell)> = BTreeMap::new();
    let mut tracking_prefixed: Vec<((BlockKey, Cell), &Cell)> = Vec::new();
    for (key, label) in &plan.keys {
        for (prefixed, class) in class_of.range(format!("{label}:")..) {
            if !prefixed.starts_with(&format!("{label}:")) {
                break;
            }
            let local = prefixed[label.len() + 1..].to_string();
            tracking_prefixed.push(((key.clone(), local.clone()), class));
            if let BlockKey::Cell(anchor) = key {
                let entry = (false, anchor.clone(), local);
                match best.get(class) {
                    Some(b) if b <= &entry => {}
                    _ => {
                        best.insert(class, entry);
                    }
                }
            }
        }
    }
    let mut rename: BTreeMap<Cell, Cell> = BTreeMap::new();
    let mut used: BTreeSet<Cell> = BTreeSet::new();
    for (key, label) in &plan.keys {
        for (prefixed, class) in class_of.range(format!("{label}:")..) {
            if !prefixed.starts_with(&format!("{label}:")) {
                break;
            }
            if rename.contains_key(class) {
                continue;
            }
            let name = match best.get(class) {
                Some((_, anchor, local)) => {
                    let obj = p.object_of(anchor).expect("anchor is a cell of p");
                    if object_block_sizes[obj] == 1 {
                        anchor.clone()
                    } else {
                        format!("{anchor}:{local}")
                    }
                }
                None => match key {
                    BlockKey::Instance(f, x, y) => {
                        let local = prefixed[label.len() + 1..].to_string();
                        format!("{f}|{x}|{y}:{local}")
                    }
                    BlockKey::Cell(_) => unreachable!("cell members are always best"),
                },
            };
            if !used.insert(name.clone()) {
                return Err(RealizeError::NameCollision(name));
            }
            rename.insert(class.clone(), name);
        }
    }
    let tracking = tracking_prefixed
        .into_iter()
        .map(|(k, class)| (k, rename[class].clone()))
        .collect();
    Ok((rename, tracking))
}

fn require_level(p: &RelStructure, level: Level) -> Result<(), RealizeError> {
    let report = p.validate_level(level);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(RealizeError::NotValid { level, first: v.to_string() }),
    }
}

fn rel_block_components(block: &RelStructure, map: &BlockMap) -> Components {
    let mut comps = Components::new();
    for (o, cells) in block.carriers() {
        for c in cells {
            comps.entry(o.clone()).or_default().insert(c.clone(), map[c].clone());
        }
    }
    comps
}

/// Realizes a structure through a relational-blocks model: the colimit, over
/// cells and relation instances, of the corresponding blocks glued along the
/// model injections. Computed with the colimits module at the model's level,
/// then canonically renamed.
pub fn realize_rel(p: &RelStructure, model: &ModelAssignment) -> Result<Realized<RelStructure>, RealizeError> {
    let blocks = match &model.target {
        BlockTarget::Rel(b) => b,
        BlockTarget::Cell(_) => return Err(RealizeError::MissingBlock("relational blocks".into())),
    };
    if p.base() != &model.base {
        return Err(RealizeError::BaseMismatch);
    }
    require_level(p, model.level)?;
    if p.cell_count() == 0 {
        let empty = RelStructure::empty(first_block_base(blocks), model.level);
        return Ok(Realized { value: empty, tracking: BTreeMap::new() });
    }
    let plan = realize_plan(p);
    let mut diagram = Diagram::default();
    let mut label_of: BTreeMap<&BlockKey, &String> = BTreeMap::new();
    for (key, label) in &plan.keys {
        label_of.insert(key, label);
        let block = match key {
            BlockKey::Cell(x) => {
                let o = p.object_of(x).ok_or_else(|| RealizeError::UnknownCell(x.clone()))?;
                blocks.object_blocks[o].clone()
            }
            BlockKey::Instance(f, _, _) => blocks.relation_blocks[f].clone(),
        };
        diagram.objects.insert(label.clone(), block);
    }
    for (key, label) in &plan.keys {
        if let BlockKey::Instance(f, x, y) = key {
            let cx = p.object_of(x).expect("instance endpoint");
            let source0 = &blocks.object_blocks[cx];
            diagram.arrows.push(DiagramArrow {
                name: format!("{label}|0"),
                from: label_of[&BlockKey::Cell(x.clone())].clone(),
                to: label.clone(),
                components: rel_block_components(source0, &blocks.inj0[f]),
            });
            let cy = p.object_of(y).expect("instance endpoint");
            let source1 = &blocks.object_blocks[cy];
            diagram.arrows.push(DiagramArrow {
                name: format!("{label}|1"),
                from: label_of[&BlockKey::Cell(y.clone())].clone(),
                to: label.clone(),
                components: rel_block_components(source1, &blocks.inj1[f]),
            });
        }
    }
    let (colimit, cocone) = finite_colimit(&diagram, model.level)?;
    let mut class_of: BTreeMap<Cell, Cell> = BTreeMap::new();
    for (label, leg) in &cocone {
        for (_, m) in leg.components() {
            for (c, v) in m {
                class_of.insert(format!("{label}:{c}"), v.clone());
            }
        }
    }
    let sizes = blocks
        .object_blocks
        .iter()
        .map(|(o, b)| (o.clone(), b.cell_count()))
        .collect();
    let (rename, tracking) = rename_realized(p, &sizes, &class_of, &plan)?;
    let carriers = colimit
        .carriers()
        .iter()
        .map(|(o, cs)| (o.clone(), cs.iter().map(|c| rename[c].clone()).collect()))
        .collect();
    let relations = colimit
        .relations()
        .iter()
        .map(|(f, pairs)| {
            (
                f.clone(),
                pairs.iter().map(|(x, y)| (rename[x].clone(), rename[y].clone())).collect(),
            )
        })
        .collect();
    let value = RelStructure::new(colimit.base().clone(), carriers, relations, model.level)?;
    Ok(Realized { value, tracking })
}

fn first_block_base(blocks: &RelBlocks) -> BaseCategory {
    blocks
        .object_blocks
        .values()
        .next()
        .map(|b| b.base().clone())
        .expect("models carry at least one object block")
}

/// Realizes a structure through a cell-blocks model with the complex gluer.
pub fn realize_complex(
    p: &RelStructure,
    model: &ModelAssignment,
) -> Result<Realized<CellComplex>, RealizeError> {
    let blocks = match &model.target {
        BlockTarget::Cell(b) => b,
        BlockTarget::Rel(_) => return Err(RealizeError::MissingBlock("cell blocks".into())),
    };
    if p.base() != &model.base {
        return Err(RealizeError::BaseMismatch);
    }
    require_level(p, model.level)?;
    let plan = realize_plan(p);
    let mut diagram = ComplexDiagram::default();
    let mut label_of: BTreeMap<&BlockKey, &String> = BTreeMap::new();
    for (key, label) in &plan.keys {
        label_of.insert(key, label);
        let block = match key {
            BlockKey::Cell(x) => {
                let o = p.object_of(x).ok_or_else(|| RealizeError::UnknownCell(x.clone()))?;
                blocks.object_blocks[o].clone()
            }
            BlockKey::Instance(f, _, _) => blocks.relation_blocks[f].clone(),
        };
        diagram.objects.insert(label.clone(), block);
    }
    for (key, label) in &plan.keys {
        if let BlockKey::Instance(f, x, y) = key {
            diagram.arrows.push((
                label_of[&BlockKey::Cell(x.clone())].clone(),
                label.clone(),
                blocks.inj0[f].clone(),
            ));
            diagram.arrows.push((
                label_of[&BlockKey::Cell(y.clone())].clone(),
                label.clone(),
                blocks.inj1[f].clone(),
            ));
        }
    }
    let (glued, cocone) = complex_colimit(&diagram, blocks.mode)?;
    let mut class_of: BTreeMap<Cell, Cell> = BTreeMap::new();
    for (label, leg) in &cocone {
        for (c, v) in &leg.map {
            class_of.insert(format!("{label}:{c}"), v.clone());
        }
    }
    let sizes = blocks
        .object_blocks
        .iter()
        .map(|(o, b)| (o.clone(), b.cell_count()))
        .collect();
    let (rename, tracking) = rename_realized(p, &sizes, &class_of, &plan)?;
    let cells = glued.cells().iter().map(|(c, d)| (rename[c].clone(), *d)).collect();
    let attachments = glued
        .attachments()
        .iter()
        .map(|a| Attachment {
            big: rename[&a.big].clone(),
            word: a.word.clone(),
            small: rename[&a.small].clone(),
            glued: a.glued,
        })
        .collect();
    let value = CellComplex::new(blocks.mode, cells, attachments)?;
    Ok(Realized { value, tracking })
}

/// The morphism between realizations induced by a morphism of structures:
/// block cells over `x` map to the matching block cells over `alpha(x)`.
pub fn realize_map(
    alpha: &RelMorphism,
    source: &Realized<RelStructure>,
    target: &Realized<RelStructure>,
) -> Result<RelMorphism, RealizeError> {
    let mut components = Components::new();
    // invert the tracking map: realized cell -> one cell-block member
    let mut member: BTreeMap<&Cell, (&Cell, &Cell)> = BTreeMap::new();
    for ((key, local), realized) in &source.tracking {
        if let BlockKey::Cell(anchor) = key {
            member.entry(realized).or_insert((anchor, local));
        }
    }
    for (o, cells) in source.value.carriers() {
        for c in cells {
            let (anchor, local) = member[&c];
            let image_anchor = alpha.apply(anchor).expect("total");
            let image = target
                .tracking
                .get(&(BlockKey::Cell(image_anchor.clone()), (*local).clone()))
                .ok_or_else(|| RealizeError::UnknownCell(c.clone()))?;
            components.entry(o.clone()).or_default().insert(c.clone(), image.clone());
        }
    }
    Ok(RelMorphism::new(source.value.clone(), target.value.clone(), components)?)
}

/// Barycentric subdivision: realization through the subdivision model at the
/// dimension bound of the structure's own base. The result has
/// `sum 3^dim(x)` cells.
pub fn subdivide(p: &RelStructure) -> Result<RelStructure, RealizeError> {
    let max_dim = p.base().cube_bound().ok_or(RealizeError::NotCubeLike)?;
    let model = subdivision_model(max_dim);
    Ok(realize_rel(p, &model)?.value)
}

/// Geometric realization to a cell complex. Standard mode glues every
/// relation instance and is defined for families; sequential mode glues only
/// elementary instances, records composite ones as non-gluing, and requires
/// a lax input.
pub fn geometric_realization(
    p: &RelStructure,
    mode: RealizationMode,
) -> Result<CellComplex, RealizeError> {
    let max_dim = p.base().cube_bound().ok_or(RealizeError::NotCubeLike)?;
    let model = geometric_model(max_dim, mode);
    Ok(realize_complex(p, &model)?.value)
}

// ---------------------------------------------------------------------------
// neighborhoods

/// The combinatorial positive neighborhood: all pairs `(a, f)` with
/// `a ->_f c`, sorted.
pub fn positive_neighborhood(p: &RelStructure, c: &Cell) -> Vec<(Cell, Mor)> {
    let mut out: Vec<(Cell, Mor)> = p
        .instances()
        .into_iter()
        .filter(|(_, _, y)| y == c)
        .map(|(f, a, _)| (a, f))
        .collect();
    out.sort();
    out
}

/// The neighborhood of a cell: the full substructure on the cells that have
/// `c` among their faces. For lax structures `c` itself belongs to it via
/// the identity.
pub fn neighborhood(p: &RelStructure, c: &Cell) -> Result<RelStructure, RealizeError> {
    if p.object_of(c).is_none() {
        return Err(RealizeError::UnknownCell(c.clone()));
    }
    let cells: BTreeSet<Cell> = positive_neighborhood(p, c).into_iter().map(|(a, _)| a).collect();
    Ok(p.full_substructure(&cells)?)
}

/// One interval factor of a basis neighborhood, the scale `k` kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisInterval {
    /// `]0, 2/k[`
    NearZero,
    /// `]1 - 2/k, 1[`
    NearOne,
    /// `]x - 1/k, x + 1/k[` around the matching coordinate of the point
    Centered(Ratio<i64>),
}

impl std::fmt::Display for BasisInterval {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisInterval::NearZero => write!(out, "]0,2/k["),
            BasisInterval::NearOne => write!(out, "]1-2/k,1["),
            BasisInterval::Centered(x) => write!(out, "]{x}-1/k,{x}+1/k["),
        }
    }
}

/// One term of the basis: the box contributed by a positive-neighborhood
/// instance `(cell, word)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTerm {
    pub cell: Cell,
    pub word: CofaceWord,
    pub intervals: Vec<BasisInterval>,
}

/// The symbolic basis of neighborhoods of a point inside an open cell: one
/// box term per positive-neighborhood instance, with interval factors
/// `]0,2/k[`, `]1-2/k,1[`, or `]x_p - 1/k, x_p + 1/k[` according to the
/// letters of the word (`p` counts the zeros seen so far).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodDescriptor {
    pub cell: Cell,
    pub point: Vec<Ratio<i64>>,
    pub terms: Vec<BasisTerm>,
}

/// Computes the basis descriptor for a rational point of the open cell `c`.
pub fn basis_neighborhood(
    p: &RelStructure,
    c: &Cell,
    point: &[Ratio<i64>],
) -> Result<NeighborhoodDescriptor, RealizeError> {
    if !p.base().is_cube_like() {
        return Err(RealizeError::NotCubeLike);
    }
    let dim = p.dim_of(c).ok_or_else(|| RealizeError::UnknownCell(c.clone()))?;
    if point.len() != dim {
        return Err(RealizeError::BadPointLength { got: point.len(), want: dim });
    }
    for x in point {
        if *x <= Ratio::new(0, 1) || *x >= Ratio::new(1, 1) {
            return Err(RealizeError::BadPointCoordinate(*x));
        }
    }
    let mut terms = Vec::new();
    for (a, f) in positive_neighborhood(p, c) {
        let word = p.base().word(&f).expect("cube-like base");
        let mut zeros = 0usize;
        let intervals = word
            .letters()
            .iter()
            .map(|l| match l {
                Letter::Minus => BasisInterval::NearZero,
                Letter::Plus => BasisInterval::NearOne,
                Letter::Zero => {
                    let x = point[zeros];
                    zeros += 1;
                    BasisInterval::Centered(x)
                }
            })
            .collect();
        terms.push(BasisTerm { cell: a, word, intervals });
    }
    terms.sort_by(|a, b| (&a.cell, &a.word).cmp(&(&b.cell, &b.word)));
    Ok(NeighborhoodDescriptor { cell: c.clone(), point: point.to_vec(), terms })
}

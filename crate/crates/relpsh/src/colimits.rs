//! Colimits of relational structures in the family and lax settings.
//!
//! Coproducts are disjoint unions with summand-prefixed cell names.
//! Coequalizers quotient by the generated equivalence with union-find,
//! take lexicographically least class representatives, induce relations on
//! classes, and — at lax level only — close the result under composition.
//! Pushouts and general finite colimits reduce to these two.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rel::{Cell, Components, Level, RelMorphism, RelPairs, RelStructure, StructureError};
use crate::transforms::close_composition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColimitError {
    #[error("colimits are computed at family or lax level, got {0}")]
    BadLevel(Level),
    #[error("summands must share a base")]
    BaseMismatch,
    #[error("morphisms are not parallel")]
    NotParallel,
    #[error("diagram has no objects")]
    EmptyDiagram,
    #[error("diagram arrow {0:?} references unknown object {1:?}")]
    UnknownDiagramObject(String, String),
    #[error("{0}")]
    Structure(#[from] StructureError),
}

/// Union-find over cell names whose representative is the lexicographically
/// least member of each class.
#[derive(Debug, Clone, Default)]
pub(crate) struct CellPartition {
    parent: BTreeMap<Cell, Cell>,
}

impl CellPartition {
    pub(crate) fn add(&mut self, c: &Cell) {
        self.parent.entry(c.clone()).or_insert_with(|| c.clone());
    }

    pub(crate) fn find(&self, c: &Cell) -> Cell {
        let mut cur = c.clone();
        loop {
            let p = self.parent.get(&cur).unwrap_or(&cur).clone();
            if p == cur {
                return cur;
            }
            cur = p;
        }
    }

    pub(crate) fn union(&mut self, a: &Cell, b: &Cell) {
        self.add(a);
        self.add(b);
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        // smaller name wins, so representatives are lexicographically least
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
    }
}

/// Disjoint union: cells prefixed by summand index, relations summand-wise.
/// The injections are embeddings.
pub fn coproduct(summands: &[RelStructure]) -> Result<(RelStructure, Vec<RelMorphism>), ColimitError> {
    labeled_coproduct(
        &summands
            .iter()
            .enumerate()
            .map(|(i, s)| (i.to_string(), s.clone()))
            .collect::<Vec<_>>(),
    )
}

/// Coproduct with caller-chosen summand labels; cells are named
/// `"{label}:{cell}"`.
pub fn labeled_coproduct(
    summands: &[(String, RelStructure)],
) -> Result<(RelStructure, Vec<RelMorphism>), ColimitError> {
    let base = match summands.first() {
        Some((_, s)) => s.base().clone(),
        None => return Err(ColimitError::EmptyDiagram),
    };
    let mut level = Level::Lax;
    for (_, s) in summands {
        if s.base() != &base {
            return Err(ColimitError::BaseMismatch);
        }
        level = level.min(s.level());
    }
    let mut carriers: BTreeMap<String, BTreeSet<Cell>> = BTreeMap::new();
    let mut relations: BTreeMap<String, RelPairs> = BTreeMap::new();
    for (label, s) in summands {
        for (o, cells) in s.carriers() {
            let entry = carriers.entry(o.clone()).or_default();
            for c in cells {
                entry.insert(format!("{label}:{c}"));
            }
        }
        for (f, pairs) in s.relations() {
            let entry = relations.entry(f.clone()).or_default();
            for (x, y) in pairs {
                entry.insert((format!("{label}:{x}"), format!("{label}:{y}")));
            }
        }
    }
    let total = RelStructure::new(base, carriers, relations, level)?;
    let mut injections = Vec::new();
    for (label, s) in summands {
        let components: Components = s
            .carriers()
            .iter()
            .map(|(o, cs)| {
                (
                    o.clone(),
                    cs.iter().map(|c| (c.clone(), format!("{label}:{c}"))).collect(),
                )
            })
            .collect();
        injections.push(RelMorphism::new(s.clone(), total.clone(), components)?);
    }
    Ok((total, injections))
}

fn quotient_by(
    q: &RelStructure,
    partition: &CellPartition,
    level: Level,
) -> Result<(RelStructure, RelMorphism), ColimitError> {
    let carriers: BTreeMap<String, BTreeSet<Cell>> = q
        .carriers()
        .iter()
        .map(|(o, cs)| (o.clone(), cs.iter().map(|c| partition.find(c)).collect()))
        .collect();
    let relations: BTreeMap<String, RelPairs> = q
        .relations()
        .iter()
        .map(|(f, pairs)| {
            (
                f.clone(),
                pairs
                    .iter()
                    .map(|(x, y)| (partition.find(x), partition.find(y)))
                    .collect(),
            )
        })
        .collect();
    let mut result = RelStructure::new(q.base().clone(), carriers, relations, level)?;
    if level >= Level::Lax {
        result = close_composition(&result);
    }
    let projection: Components = q
        .carriers()
        .iter()
        .map(|(o, cs)| (o.clone(), cs.iter().map(|c| (c.clone(), partition.find(c))).collect()))
        .collect();
    let proj = RelMorphism::new(q.clone(), result.clone(), projection)?;
    Ok((result, proj))
}

/// Coequalizer of a parallel pair: carriers are the classes of the
/// equivalence generated by `alpha(x) ~ beta(x)`, a class relates to another
/// iff some representatives do, and at lax level the result is closed under
/// composition afterwards.
pub fn coequalizer(
    alpha: &RelMorphism,
    beta: &RelMorphism,
    level: Level,
) -> Result<(RelStructure, RelMorphism), ColimitError> {
    if level > Level::Lax {
        return Err(ColimitError::BadLevel(level));
    }
    if alpha.source() != beta.source() || alpha.target() != beta.target() {
        return Err(ColimitError::NotParallel);
    }
    let q = alpha.target();
    let mut partition = CellPartition::default();
    for (_, c) in q.cells() {
        partition.add(&c);
    }
    for (_, c) in alpha.source().cells() {
        let a = alpha.apply(&c).expect("total");
        let b = beta.apply(&c).expect("total");
        partition.union(a, b);
    }
    quotient_by(q, &partition, level)
}

/// A span `left <- apex -> right`.
#[derive(Debug, Clone)]
pub struct Span {
    pub left: RelMorphism,
    pub right: RelMorphism,
}

impl Span {
    pub fn new(left: RelMorphism, right: RelMorphism) -> Result<Self, ColimitError> {
        if left.source() != right.source() {
            return Err(ColimitError::NotParallel);
        }
        Ok(Span { left, right })
    }
}

/// Pushout of a span, as the coequalizer of the two induced maps into the
/// coproduct of the legs' targets. Returns the pushout with the two cocone
/// legs.
pub fn pushout(
    span: &Span,
    level: Level,
) -> Result<(RelStructure, RelMorphism, RelMorphism), ColimitError> {
    let (sum, injections) = coproduct(&[span.left.target().clone(), span.right.target().clone()])?;
    let _ = sum;
    let alpha = span.left.then(&injections[0])?;
    let beta = span.right.then(&injections[1])?;
    let (result, proj) = coequalizer(&alpha, &beta, level)?;
    let leg_left = injections[0].then(&proj)?;
    let leg_right = injections[1].then(&proj)?;
    Ok((result, leg_left, leg_right))
}

/// A finite diagram of relational structures.
#[derive(Debug, Clone, Default)]
pub struct Diagram {
    pub objects: BTreeMap<String, RelStructure>,
    pub arrows: Vec<DiagramArrow>,
}

#[derive(Debug, Clone)]
pub struct DiagramArrow {
    pub name: String,
    pub from: String,
    pub to: String,
    pub components: Components,
}

/// Colimit of a finite diagram: coequalizer of the two canonical maps from
/// the coproduct of arrow sources into the coproduct of all objects.
/// Returns the colimit and the cocone, keyed by diagram object.
pub fn finite_colimit(
    diagram: &Diagram,
    level: Level,
) -> Result<(RelStructure, BTreeMap<String, RelMorphism>), ColimitError> {
    if diagram.objects.is_empty() {
        return Err(ColimitError::EmptyDiagram);
    }
    let labeled: Vec<(String, RelStructure)> =
        diagram.objects.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let (sum, injections) = labeled_coproduct(&labeled)?;
    let inj: BTreeMap<&String, &RelMorphism> =
        labeled.iter().map(|(k, _)| k).zip(injections.iter()).collect();

    let mut partition = CellPartition::default();
    for (_, c) in sum.cells() {
        partition.add(&c);
    }
    for arrow in &diagram.arrows {
        let src = diagram
            .objects
            .get(&arrow.from)
            .ok_or_else(|| ColimitError::UnknownDiagramObject(arrow.name.clone(), arrow.from.clone()))?;
        let dst = diagram
            .objects
            .get(&arrow.to)
            .ok_or_else(|| ColimitError::UnknownDiagramObject(arrow.name.clone(), arrow.to.clone()))?;
        let map = RelMorphism::new(src.clone(), dst.clone(), arrow.components.clone())?;
        for (_, c) in src.cells() {
            let a = inj[&arrow.from].apply(&c).expect("total");
            let via = map.apply(&c).expect("total");
            let b = inj[&arrow.to].apply(via).expect("total");
            partition.union(a, b);
        }
    }
    let (result, proj) = quotient_by(&sum, &partition, level)?;
    let mut cocone = BTreeMap::new();
    for (k, _) in &labeled {
        cocone.insert(k.clone(), inj[k].then(&proj)?);
    }
    Ok((result, cocone))
}

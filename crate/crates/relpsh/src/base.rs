//! Finite base categories and coface-word arithmetic.
//!
//! Everything downstream is indexed by a small category with decidable
//! equality of morphisms and finite, enumerable hom-sets. Three kinds are
//! supported: the cube category truncated at a dimension bound, the graph
//! category (its full subcategory on the objects 0 and 1), and arbitrary
//! finite categories given by an explicit composition table.
//!
//! Morphisms of the cube category are kept in normal form as *coface words*
//! over the alphabet `-0+`: a word of length `m` with `n` zeros denotes a
//! morphism `n -> m`, the non-zero letters marking the axes collapsed to a
//! lower (`-`) or upper (`+`) face. The identity on `n` is the all-zero word
//! of length `n`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Object identifier. Cube-category objects are decimal strings `"0"`,
/// `"1"`, ...; table categories use arbitrary names.
pub type Obj = String;

/// Morphism identifier: a coface word over `-0+` for cube-like bases, a
/// declared name for table categories.
pub type Mor = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseError {
    #[error("invalid coface letter {0:?} (expected one of '-', '0', '+')")]
    BadLetter(char),
    #[error("dimension mismatch composing words: inner has codomain {inner_cod}, outer has domain {outer_dom}")]
    ComposeMismatch { inner_cod: usize, outer_dom: usize },
    #[error("unknown object {0:?}")]
    UnknownObject(Obj),
    #[error("unknown morphism {0:?}")]
    UnknownMorphism(Mor),
    #[error("morphisms {f:?} and {g:?} are not composable")]
    NotComposable { f: Mor, g: Mor },
    #[error("invalid category table: {0}")]
    BadTable(String),
}

/// One letter of a coface word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Minus,
    Zero,
    Plus,
}

impl Letter {
    pub fn to_char(self) -> char {
        match self {
            Letter::Minus => '-',
            Letter::Zero => '0',
            Letter::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Result<Self, BaseError> {
        match c {
            '-' => Ok(Letter::Minus),
            '0' => Ok(Letter::Zero),
            '+' => Ok(Letter::Plus),
            other => Err(BaseError::BadLetter(other)),
        }
    }
}

/// Sign of an elementary coface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn letter(self) -> Letter {
        match self {
            Sign::Minus => Letter::Minus,
            Sign::Plus => Letter::Plus,
        }
    }
}

/// Normal form of a cube-category morphism as a signed word.
///
/// A word of length `m` with `n` zeros is a morphism `n -> m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CofaceWord {
    letters: Vec<Letter>,
}

impl CofaceWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        CofaceWord { letters }
    }

    /// The identity on `n`: the all-zero word of length `n`.
    pub fn identity(n: usize) -> Self {
        CofaceWord {
            letters: vec![Letter::Zero; n],
        }
    }

    pub fn parse(s: &str) -> Result<Self, BaseError> {
        let letters = s.chars().map(Letter::from_char).collect::<Result<_, _>>()?;
        Ok(CofaceWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Domain: the number of zero letters.
    pub fn dom(&self) -> usize {
        self.letters.iter().filter(|l| **l == Letter::Zero).count()
    }

    /// Codomain: the length of the word.
    pub fn cod(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|l| *l == Letter::Zero)
    }

    /// Exactly one non-zero letter.
    pub fn is_elementary(&self) -> bool {
        self.letters.iter().filter(|l| **l != Letter::Zero).count() == 1
    }

    /// Composite `outer ∘ inner`: the non-zero letters of `outer` stay in
    /// place and its zero positions carry, in order, the letters of `inner`.
    pub fn compose(inner: &CofaceWord, outer: &CofaceWord) -> Result<CofaceWord, BaseError> {
        if inner.cod() != outer.dom() {
            return Err(BaseError::ComposeMismatch {
                inner_cod: inner.cod(),
                outer_dom: outer.dom(),
            });
        }
        let mut fill = inner.letters.iter();
        let letters = outer
            .letters
            .iter()
            .map(|l| match l {
                Letter::Zero => *fill.next().expect("zero count equals inner length"),
                other => *other,
            })
            .collect();
        Ok(CofaceWord { letters })
    }

    /// Unique decomposition into elementary cofaces with strictly increasing
    /// positions, innermost first. The identity word decomposes as the empty
    /// list.
    pub fn decompose(&self) -> Vec<ElementaryCoface> {
        let n = self.dom();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != Letter::Zero)
            .enumerate()
            .map(|(j, (pos, l))| ElementaryCoface {
                dim: n + j,
                index: pos,
                sign: if *l == Letter::Minus { Sign::Minus } else { Sign::Plus },
            })
            .collect()
    }

    /// All words `dom -> cod`, sorted.
    pub fn enumerate(dom: usize, cod: usize) -> Vec<CofaceWord> {
        fn go(remaining: usize, zeros: usize, acc: &mut Vec<Letter>, out: &mut Vec<CofaceWord>) {
            if remaining == 0 {
                if zeros == 0 {
                    out.push(CofaceWord { letters: acc.clone() });
                }
                return;
            }
            for l in [Letter::Minus, Letter::Zero, Letter::Plus] {
                if l == Letter::Zero && zeros == 0 {
                    continue;
                }
                if l != Letter::Zero && remaining == zeros {
                    continue;
                }
                acc.push(l);
                go(remaining - 1, zeros - usize::from(l == Letter::Zero), acc, out);
                acc.pop();
            }
        }
        if dom > cod {
            return Vec::new();
        }
        let mut out = Vec::new();
        go(cod, dom, &mut Vec::new(), &mut out);
        out.sort_by_key(|w| w.to_string());
        out
    }
}

impl fmt::Display for CofaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// The generator `d^sign_{dim,index} : dim -> dim + 1`, i.e. the word of
/// length `dim + 1` with `sign` at `index` and zeros elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ElementaryCoface {
    pub dim: usize,
    pub index: usize,
    pub sign: Sign,
}

impl ElementaryCoface {
    pub fn word(&self) -> CofaceWord {
        let mut letters = vec![Letter::Zero; self.dim + 1];
        letters[self.index] = self.sign.letter();
        CofaceWord { letters }
    }
}

/// An explicit finite category: objects, named morphisms with endpoints,
/// identities, and a total composition table on composable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCategory {
    pub objects: Vec<Obj>,
    /// name -> (dom, cod)
    pub morphisms: BTreeMap<Mor, (Obj, Obj)>,
    pub identities: BTreeMap<Obj, Mor>,
    /// (f, g) -> f ∘ g, for dom(f) = cod(g)
    pub composition: BTreeMap<(Mor, Mor), Mor>,
}

impl TableCategory {
    /// Checks the category laws exhaustively: endpoints declared, identities
    /// neutral, composition total on composable pairs and associative on
    /// every composable triple.
    pub fn validate(&self) -> Result<(), BaseError> {
        let bad = |msg: String| Err(BaseError::BadTable(msg));
        for (m, (d, c)) in &self.morphisms {
            if !self.objects.contains(d) || !self.objects.contains(c) {
                return bad(format!("morphism {m:?} has undeclared endpoint"));
            }
        }
        for o in &self.objects {
            let id = match self.identities.get(o) {
                Some(id) => id,
                None => return bad(format!("object {o:?} has no identity")),
            };
            match self.morphisms.get(id) {
                Some((d, c)) if d == o && c == o => {}
                _ => return bad(format!("identity of {o:?} is not an endomorphism")),
            }
        }
        let mors: Vec<&Mor> = self.morphisms.keys().collect();
        for f in &mors {
            for g in &mors {
                let (fd, _fc) = &self.morphisms[*f];
                let (_gd, gc) = &self.morphisms[*g];
                let composable = fd == gc;
                match self.composition.get(&((*f).clone(), (*g).clone())) {
                    Some(h) if composable => {
                        let (hd, hc) = match self.morphisms.get(h) {
                            Some(e) => e,
                            None => return bad(format!("composite {h:?} undeclared")),
                        };
                        let (gd, _) = &self.morphisms[*g];
                        let (_, fc) = &self.morphisms[*f];
                        if hd != gd || hc != fc {
                            return bad(format!("composite {f:?} ∘ {g:?} = {h:?} has wrong endpoints"));
                        }
                    }
                    Some(_) => return bad(format!("composition defined on non-composable pair ({f:?}, {g:?})")),
                    None if composable => {
                        return bad(format!("composition missing on composable pair ({f:?}, {g:?})"))
                    }
                    None => {}
                }
            }
        }
        for (o, id) in &self.identities {
            for f in &mors {
                let (fd, fc) = &self.morphisms[*f];
                if fd == o && self.composition.get(&((*f).clone(), id.clone())) != Some(*f) {
                    return bad(format!("identity of {o:?} is not right-neutral for {f:?}"));
                }
                if fc == o && self.composition.get(&(id.clone(), (*f).clone())) != Some(*f) {
                    return bad(format!("identity of {o:?} is not left-neutral for {f:?}"));
                }
            }
        }
        for f in &mors {
            for g in &mors {
                for h in &mors {
                    let fg = self.composition.get(&((*f).clone(), (*g).clone()));
                    let gh = self.composition.get(&((*g).clone(), (*h).clone()));
                    if let (Some(fg), Some(gh)) = (fg, gh) {
                        let left = self.composition.get(&(fg.clone(), (*h).clone()));
                        let right = self.composition.get(&((*f).clone(), gh.clone()));
                        if left != right {
                            return bad(format!("associativity fails on ({f:?}, {g:?}, {h:?})"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A finite base category with enumerable hom-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseCategory {
    /// The cube category truncated at `max_dim`: objects `0..=max_dim`,
    /// `hom(n, m)` the coface words of length `m` with `n` zeros.
    Cube { max_dim: usize },
    /// The graph category: full subcategory of the cube category on the
    /// objects 0 and 1, with `s = "-"` and `t = "+"`.
    Graph,
    Table(TableCategory),
}

/// The cube category truncated at `max_dim`.
pub fn cube_category(max_dim: usize) -> BaseCategory {
    BaseCategory::Cube { max_dim }
}

/// The graph category: two objects, `id_0 = ""`, `id_1 = "0"`, `s = "-"`,
/// `t = "+"`.
pub fn graph_category() -> BaseCategory {
    BaseCategory::Graph
}

impl BaseCategory {
    /// For cube-like bases, the dimension bound.
    pub fn cube_bound(&self) -> Option<usize> {
        match self {
            BaseCategory::Cube { max_dim } => Some(*max_dim),
            BaseCategory::Graph => Some(1),
            BaseCategory::Table(_) => None,
        }
    }

    pub fn is_cube_like(&self) -> bool {
        self.cube_bound().is_some()
    }

    pub fn objects(&self) -> Vec<Obj> {
        match self.cube_bound() {
            Some(n) => (0..=n).map(|k| k.to_string()).collect(),
            None => match self {
                BaseCategory::Table(t) => t.objects.clone(),
                _ => unreachable!(),
            },
        }
    }

    pub fn has_object(&self, o: &Obj) -> bool {
        self.objects().contains(o)
    }

    /// Numeric dimension of an object, for cube-like bases.
    pub fn object_dim(&self, o: &Obj) -> Option<usize> {
        self.cube_bound()?;
        o.parse().ok().filter(|k| *k <= self.cube_bound().unwrap())
    }

    pub fn hom(&self, d: &Obj, c: &Obj) -> Vec<Mor> {
        match self {
            BaseCategory::Table(t) => {
                let mut ms: Vec<Mor> = t
                    .morphisms
                    .iter()
                    .filter(|(_, (md, mc))| md == d && mc == c)
                    .map(|(m, _)| m.clone())
                    .collect();
                ms.sort();
                ms
            }
            _ => match (self.object_dim(d), self.object_dim(c)) {
                (Some(n), Some(m)) => CofaceWord::enumerate(n, m)
                    .into_iter()
                    .map(|w| w.to_string())
                    .collect(),
                _ => Vec::new(),
            },
        }
    }

    /// Every morphism of the category, sorted.
    pub fn morphisms(&self) -> Vec<Mor> {
        match self {
            BaseCategory::Table(t) => t.morphisms.keys().cloned().collect(),
            _ => {
                let mut out = Vec::new();
                for d in self.objects() {
                    for c in self.objects() {
                        out.extend(self.hom(&d, &c));
                    }
                }
                out.sort();
                out
            }
        }
    }

    pub fn has_morphism(&self, f: &Mor) -> bool {
        match self {
            BaseCategory::Table(t) => t.morphisms.contains_key(f),
            _ => match CofaceWord::parse(f) {
                Ok(w) => w.cod() <= self.cube_bound().unwrap(),
                Err(_) => false,
            },
        }
    }

    pub fn identity(&self, o: &Obj) -> Result<Mor, BaseError> {
        match self {
            BaseCategory::Table(t) => t
                .identities
                .get(o)
                .cloned()
                .ok_or_else(|| BaseError::UnknownObject(o.clone())),
            _ => {
                let n = self
                    .object_dim(o)
                    .ok_or_else(|| BaseError::UnknownObject(o.clone()))?;
                Ok(CofaceWord::identity(n).to_string())
            }
        }
    }

    pub fn is_identity(&self, f: &Mor) -> bool {
        match self {
            BaseCategory::Table(t) => t.identities.values().any(|id| id == f),
            _ => CofaceWord::parse(f).map(|w| w.is_identity()).unwrap_or(false),
        }
    }

    pub fn dom(&self, f: &Mor) -> Result<Obj, BaseError> {
        match self {
            BaseCategory::Table(t) => t
                .morphisms
                .get(f)
                .map(|(d, _)| d.clone())
                .ok_or_else(|| BaseError::UnknownMorphism(f.clone())),
            _ => self.word(f).map(|w| w.dom().to_string()),
        }
    }

    pub fn cod(&self, f: &Mor) -> Result<Obj, BaseError> {
        match self {
            BaseCategory::Table(t) => t
                .morphisms
                .get(f)
                .map(|(_, c)| c.clone())
                .ok_or_else(|| BaseError::UnknownMorphism(f.clone())),
            _ => self.word(f).map(|w| w.cod().to_string()),
        }
    }

    /// The coface word of a cube-like morphism.
    pub fn word(&self, f: &Mor) -> Result<CofaceWord, BaseError> {
        if self.cube_bound().is_none() {
            return Err(BaseError::UnknownMorphism(f.clone()));
        }
        let w = CofaceWord::parse(f)?;
        if w.cod() > self.cube_bound().unwrap() {
            return Err(BaseError::UnknownMorphism(f.clone()));
        }
        Ok(w)
    }

    /// Composite `f ∘ g` for `g : e -> d`, `f : d -> c`.
    pub fn compose(&self, f: &Mor, g: &Mor) -> Result<Mor, BaseError> {
        match self {
            BaseCategory::Table(t) => {
                if !t.morphisms.contains_key(f) {
                    return Err(BaseError::UnknownMorphism(f.clone()));
                }
                if !t.morphisms.contains_key(g) {
                    return Err(BaseError::UnknownMorphism(g.clone()));
                }
                t.composition
                    .get(&(f.clone(), g.clone()))
                    .cloned()
                    .ok_or_else(|| BaseError::NotComposable { f: f.clone(), g: g.clone() })
            }
            _ => {
                let wf = self.word(f)?;
                let wg = self.word(g)?;
                CofaceWord::compose(&wg, &wf).map(|w| w.to_string())
            }
        }
    }

    /// All composable pairs `(f, g)` with `dom(f) = cod(g)`, sorted.
    pub fn composable_pairs(&self) -> Vec<(Mor, Mor)> {
        let mut out = Vec::new();
        for f in self.morphisms() {
            let d = self.dom(&f).expect("enumerated morphism");
            for e in self.objects() {
                for g in self.hom(&e, &d) {
                    out.push((f.clone(), g.clone()));
                }
            }
        }
        out.sort();
        out
    }
}

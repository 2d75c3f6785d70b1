//! Finite sets with structured element labels, total functions between them,
//! and the three colimits everything else is built from.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{MtkError, Result};

/// Canonical element label. The derived order is the lexicographic order on
/// structure, so sets built the same way list their elements identically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Int(i64),
    Name(String),
    Pair(Box<Label>, Box<Label>),
    Tuple(Vec<Label>),
    /// Element of the `i`-th summand of a coproduct.
    Tag(usize, Box<Label>),
    /// Quotient class, named by its least member.
    Class(Box<Label>),
}

impl Label {
    pub fn int(i: i64) -> Label {
        Label::Int(i)
    }

    pub fn name(s: &str) -> Label {
        Label::Name(s.to_string())
    }

    pub fn pair(a: Label, b: Label) -> Label {
        Label::Pair(Box::new(a), Box::new(b))
    }

    pub fn tag(i: usize, inner: Label) -> Label {
        Label::Tag(i, Box::new(inner))
    }

    pub fn class(rep: Label) -> Label {
        Label::Class(Box::new(rep))
    }

    pub fn as_pair(&self) -> Option<(&Label, &Label)> {
        match self {
            Label::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Label]> {
        match self {
            Label::Tuple(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Label::Int(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Name(s) => write!(f, "{s}"),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
            Label::Tuple(v) => {
                write!(f, "[")?;
                for (i, l) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "]")
            }
            Label::Tag(i, l) => write!(f, "in{i}<{l}>"),
            Label::Class(l) => write!(f, "{{{l}}}"),
        }
    }
}

struct SetInner {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

/// A finite set: a strictly increasing list of labels. Cloning is cheap.
#[derive(Clone)]
pub struct FinSet(Arc<SetInner>);

impl FinSet {
    /// Builds a set from arbitrary labels; duplicates are an error.
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Result<FinSet> {
        let mut labels: Vec<Label> = labels.into_iter().collect();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(MtkError::DuplicateLabel(w[0].to_string()));
            }
        }
        Ok(FinSet::from_sorted(labels))
    }

    /// Builds a set from labels, silently merging duplicates.
    pub fn collect(labels: impl IntoIterator<Item = Label>) -> FinSet {
        let mut labels: Vec<Label> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        FinSet::from_sorted(labels)
    }

    fn from_sorted(labels: Vec<Label>) -> FinSet {
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        FinSet(Arc::new(SetInner { labels, index }))
    }

    pub fn empty() -> FinSet {
        FinSet::from_sorted(Vec::new())
    }

    /// `{0, 1, ..., n-1}` as integer atoms.
    pub fn range(n: usize) -> FinSet {
        FinSet::from_sorted((0..n as i64).map(Label::Int).collect())
    }

    pub fn names(names: &[&str]) -> Result<FinSet> {
        FinSet::new(names.iter().map(|s| Label::name(s)))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.0.labels[i]
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.0.index.get(l).copied()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.index.contains_key(l)
    }

    /// Cartesian product with pair labels.
    pub fn product(&self, other: &FinSet) -> FinSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in self.labels() {
            for b in other.labels() {
                out.push(Label::pair(a.clone(), b.clone()));
            }
        }
        FinSet::from_sorted(out)
    }
}

impl PartialEq for FinSet {
    fn eq(&self, other: &FinSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for FinSet {}

impl std::hash::Hash for FinSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.labels.hash(state);
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A total function between finite sets, stored as an index table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinFn {
    dom: FinSet,
    cod: FinSet,
    map: Vec<usize>,
}

impl fmt::Debug for FinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinFn{{")?;
        for (i, &j) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", self.dom.label(i), self.cod.label(j))?;
        }
        write!(f, "}}")
    }
}

impl FinFn {
    pub fn new(dom: FinSet, cod: FinSet, map: Vec<usize>) -> Result<FinFn> {
        if map.len() != dom.len() {
            return Err(MtkError::Mismatch(format!(
                "table has {} entries for a domain of size {}",
                map.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= cod.len()) {
            return Err(MtkError::Mismatch(format!(
                "image index {bad} outside codomain of size {}",
                cod.len()
            )));
        }
        Ok(FinFn { dom, cod, map })
    }

    /// Builds a function from a label-level rule; the image must lie in `cod`.
    pub fn from_labels(
        dom: FinSet,
        cod: FinSet,
        mut rule: impl FnMut(&Label) -> Result<Label>,
    ) -> Result<FinFn> {
        let mut map = Vec::with_capacity(dom.len());
        for l in dom.labels() {
            let img = rule(l)?;
            let j = cod
                .index_of(&img)
                .ok_or_else(|| MtkError::UnknownLabel(format!("{img} (image of {l})")))?;
            map.push(j);
        }
        Ok(FinFn { dom, cod, map })
    }

    pub fn identity(s: &FinSet) -> FinFn {
        FinFn { dom: s.clone(), cod: s.clone(), map: (0..s.len()).collect() }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply_label(&self, l: &Label) -> Option<&Label> {
        self.dom.index_of(l).map(|i| self.cod.label(self.map[i]))
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FinFn) -> Result<FinFn> {
        if self.cod != g.dom {
            return Err(MtkError::Mismatch(format!(
                "cannot compose: codomain {:?} vs domain {:?}",
                self.cod, g.dom
            )));
        }
        Ok(FinFn {
            dom: self.dom.clone(),
            cod: g.cod.clone(),
            map: self.map.iter().map(|&j| g.map[j]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for &j in &self.map {
            if seen[j] {
                return false;
            }
            seen[j] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for &j in &self.map {
            seen[j] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijection(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<FinFn> {
        if !self.is_bijection() {
            return Err(MtkError::IllDefined("inverse of a non-bijection".into()));
        }
        let mut inv = vec![0; self.cod.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Ok(FinFn { dom: self.cod.clone(), cod: self.dom.clone(), map: inv })
    }

    /// Same table, with domain and codomain replaced by equal sets.
    pub fn retarget(&self, dom: &FinSet, cod: &FinSet) -> Result<FinFn> {
        if *dom != self.dom || *cod != self.cod {
            return Err(MtkError::Mismatch("retarget to unequal sets".into()));
        }
        Ok(FinFn { dom: dom.clone(), cod: cod.clone(), map: self.map.clone() })
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }

    /// Quotient of `s` by the current partition; classes are named by their
    /// least label and the projection is returned alongside.
    pub fn quotient(&mut self, s: &FinSet) -> (FinSet, FinFn) {
        let n = s.len();
        // labels are sorted, so the first member met is the least one
        let mut rep_of_root: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            let r = self.find(i);
            rep_of_root.entry(r).or_insert(i);
        }
        let mut reps: Vec<usize> = rep_of_root.values().copied().collect();
        reps.sort();
        let quotient = FinSet::from_sorted(reps.iter().map(|&i| Label::class(s.label(i).clone())).collect());
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let map = (0..n).map(|i| pos[&rep_of_root[&self.find(i)]]).collect();
        (quotient.clone(), FinFn { dom: s.clone(), cod: quotient, map })
    }
}

/// Coproduct with tagged-injection labels.
pub fn coproduct(parts: &[FinSet]) -> (FinSet, Vec<FinFn>) {
    let mut labels = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for l in p.labels() {
            labels.push(Label::tag(i, l.clone()));
        }
    }
    let sum = FinSet::from_sorted(labels);
    let mut injections = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for p in parts {
        injections.push(FinFn { dom: p.clone(), cod: sum.clone(), map: (offset..offset + p.len()).collect() });
        offset += p.len();
    }
    (sum, injections)
}

/// Coequaliser of a parallel pair, computed by union-find.
pub fn coequalize(f: &FinFn, g: &FinFn) -> Result<(FinSet, FinFn)> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(MtkError::Mismatch("coequalize: maps are not parallel".into()));
    }
    let mut uf = UnionFind::new(f.cod.len());
    for (&a, &b) in f.map.iter().zip(&g.map) {
        uf.union(a, b);
    }
    Ok(uf.quotient(&f.cod))
}

/// Colimit of a finite chain `sets[0] -> sets[1] -> ... -> sets[k]`: the last
/// set, with the composite maps as cocone.
pub fn chain_colimit(sets: &[FinSet], maps: &[FinFn]) -> Result<(FinSet, Vec<FinFn>)> {
    if sets.is_empty() {
        return Err(MtkError::Mismatch("chain_colimit: empty chain".into()));
    }
    if maps.len() + 1 != sets.len() {
        return Err(MtkError::Mismatch("chain_colimit: need one map per consecutive pair".into()));
    }
    for (i, m) in maps.iter().enumerate() {
        if m.dom != sets[i] || m.cod != sets[i + 1] {
            return Err(MtkError::Mismatch(format!("chain_colimit: map {i} does not link the chain")));
        }
    }
    let last = sets.last().unwrap().clone();
    let mut cocone = vec![FinFn::identity(&last)];
    for m in maps.iter().rev() {
        let next = m.then(cocone.last().unwrap())?;
        cocone.push(next);
    }
    cocone.reverse();
    Ok((last, cocone))
}

/// The unique `h'` with `h' ∘ p = h`, for `p` surjective. Fails when `h` does
/// not respect the fibres of `p` or `p` misses an element.
pub fn descend(p: &FinFn, h: &FinFn) -> Result<FinFn> {
    if p.dom != h.dom {
        return Err(MtkError::Mismatch("descend: maps have different domains".into()));
    }
    let mut img: Vec<Option<usize>> = vec![None; p.cod.len()];
    for (i, &j) in p.map.iter().enumerate() {
        match img[j] {
            None => img[j] = Some(h.map[i]),
            Some(k) if k == h.map[i] => {}
            Some(_) => {
                return Err(MtkError::IllDefined(format!(
                    "two elements over {} have different images",
                    p.cod.label(j)
                )))
            }
        }
    }
    let map = img
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| MtkError::IllDefined(format!("{} is not hit", p.cod.label(j)))))
        .collect::<Result<Vec<_>>>()?;
    Ok(FinFn { dom: p.cod.clone(), cod: h.cod.clone(), map })
}

/// All functions `dom -> cod`, in lexicographic order of their tables.
pub fn all_functions(dom: &FinSet, cod: &FinSet) -> Vec<FinFn> {
    let (n, m) = (dom.len(), cod.len());
    if n == 0 {
        return vec![FinFn { dom: dom.clone(), cod: cod.clone(), map: vec![] }];
    }
    if m == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    loop {
        out.push(FinFn { dom: dom.clone(), cod: cod.clone(), map: table.clone() });
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            table[k] += 1;
            if table[k] < m {
                break;
            }
            table[k] = 0;
        }
    }
}

/// Number of functions `dom -> cod`, saturating.
pub fn function_count(dom: usize, cod: usize) -> u128 {
    let mut c: u128 = 1;
    for _ in 0..dom {
        c = c.saturating_mul(cod as u128);
    }
    c
}

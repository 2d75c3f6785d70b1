//! Families of finite sets indexed by a fixed finite list of sorts: the
//! objects of a presheaf category on a discrete base. Plain sets are the
//! one-sort case; graphs over a fixed object set use pairs of objects as sorts.

use std::fmt;
use std::sync::Arc;

use super::set::{coequalize, coproduct, descend, FinFn, FinSet, Label};
use crate::error::{MtkError, Result};

/// An ordered list of sort labels shared between families.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sorts(Arc<Vec<Label>>);

impl Sorts {
    pub fn new(labels: Vec<Label>) -> Sorts {
        Sorts(Arc::new(labels))
    }

    /// The single sort used to model plain sets.
    pub fn single() -> Sorts {
        Sorts::new(vec![Label::name("*")])
    }

    pub fn names(names: &[String]) -> Sorts {
        Sorts::new(names.iter().map(|s| Label::Name(s.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.0.iter().position(|x| x == l)
    }
}

impl fmt::Debug for Sorts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|l| l.to_string())).finish()
    }
}

/// One finite set per sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    sorts: Sorts,
    parts: Vec<FinSet>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, p) in self.sorts.labels().iter().zip(&self.parts) {
            m.entry(&s.to_string(), p);
        }
        m.finish()
    }
}

impl Family {
    pub fn new(sorts: Sorts, parts: Vec<FinSet>) -> Result<Family> {
        if sorts.len() != parts.len() {
            return Err(MtkError::Mismatch(format!(
                "{} sorts but {} parts",
                sorts.len(),
                parts.len()
            )));
        }
        Ok(Family { sorts, parts })
    }

    pub fn empty(sorts: &Sorts) -> Family {
        Family { sorts: sorts.clone(), parts: vec![FinSet::empty(); sorts.len()] }
    }

    /// A one-sort family, i.e. a plain set.
    pub fn set(s: FinSet) -> Family {
        Family { sorts: Sorts::single(), parts: vec![s] }
    }

    /// The family with `sizes[i]` integer atoms at sort `i`.
    pub fn of_sizes(sorts: &Sorts, sizes: &[usize]) -> Result<Family> {
        Family::new(sorts.clone(), sizes.iter().map(|&n| FinSet::range(n)).collect())
    }

    pub fn sorts(&self) -> &Sorts {
        &self.sorts
    }

    pub fn parts(&self) -> &[FinSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &FinSet {
        &self.parts[i]
    }

    pub fn total(&self) -> usize {
        self.parts.iter().map(FinSet::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(FinSet::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(FinSet::is_empty)
    }

    /// Every element as a (sort index, element index) pair, in order.
    pub fn elements(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.total());
        for (s, p) in self.parts.iter().enumerate() {
            for i in 0..p.len() {
                out.push((s, i));
            }
        }
        out
    }
}

/// A sortwise function between families over the same sorts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FamFn {
    dom: Family,
    cod: Family,
    comps: Vec<FinFn>,
}

impl fmt::Debug for FamFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.comps.iter()).finish()
    }
}

impl FamFn {
    pub fn new(dom: Family, cod: Family, comps: Vec<FinFn>) -> Result<FamFn> {
        if dom.sorts != cod.sorts || comps.len() != dom.sorts.len() {
            return Err(MtkError::Mismatch("family map over different sorts".into()));
        }
        for (i, c) in comps.iter().enumerate() {
            if *c.dom() != dom.parts[i] || *c.cod() != cod.parts[i] {
                return Err(MtkError::Mismatch(format!(
                    "component {} has the wrong domain or codomain",
                    dom.sorts.labels()[i]
                )));
            }
        }
        Ok(FamFn { dom, cod, comps })
    }

    /// Builds a map from a rule on (sort index, label).
    pub fn from_labels(
        dom: &Family,
        cod: &Family,
        mut rule: impl FnMut(usize, &Label) -> Result<Label>,
    ) -> Result<FamFn> {
        if dom.sorts != cod.sorts {
            return Err(MtkError::Mismatch("family map over different sorts".into()));
        }
        let comps = (0..dom.sorts.len())
            .map(|s| FinFn::from_labels(dom.parts[s].clone(), cod.parts[s].clone(), |l| rule(s, l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FamFn { dom: dom.clone(), cod: cod.clone(), comps })
    }

    pub fn identity(x: &Family) -> FamFn {
        FamFn { dom: x.clone(), cod: x.clone(), comps: x.parts.iter().map(FinFn::identity).collect() }
    }

    pub fn dom(&self) -> &Family {
        &self.dom
    }

    pub fn cod(&self) -> &Family {
        &self.cod
    }

    pub fn comps(&self) -> &[FinFn] {
        &self.comps
    }

    pub fn comp(&self, s: usize) -> &FinFn {
        &self.comps[s]
    }

    pub fn apply(&self, s: usize, i: usize) -> usize {
        self.comps[s].apply(i)
    }

    pub fn apply_label(&self, s: usize, l: &Label) -> Option<&Label> {
        self.comps[s].apply_label(l)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FamFn) -> Result<FamFn> {
        if self.cod != g.dom {
            return Err(MtkError::Mismatch(format!(
                "cannot compose family maps: {:?} vs {:?}",
                self.cod, g.dom
            )));
        }
        let comps = self.comps.iter().zip(&g.comps).map(|(a, b)| a.then(b)).collect::<Result<Vec<_>>>()?;
        Ok(FamFn { dom: self.dom.clone(), cod: g.cod.clone(), comps })
    }

    pub fn is_bijection(&self) -> bool {
        self.comps.iter().all(FinFn::is_bijection)
    }

    pub fn is_surjective(&self) -> bool {
        self.comps.iter().all(FinFn::is_surjective)
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(FinFn::is_injective)
    }

    pub fn inverse(&self) -> Result<FamFn> {
        let comps = self.comps.iter().map(FinFn::inverse).collect::<Result<Vec<_>>>()?;
        Ok(FamFn { dom: self.cod.clone(), cod: self.dom.clone(), comps })
    }
}

/// Sortwise coequaliser.
pub fn fam_coequalize(f: &FamFn, g: &FamFn) -> Result<(Family, FamFn)> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(MtkError::Mismatch("fam_coequalize: maps are not parallel".into()));
    }
    let mut parts = Vec::new();
    let mut comps = Vec::new();
    for (a, b) in f.comps.iter().zip(&g.comps) {
        let (q, p) = coequalize(a, b)?;
        parts.push(q);
        comps.push(p);
    }
    let q = Family { sorts: f.cod.sorts.clone(), parts };
    Ok((q.clone(), FamFn { dom: f.cod.clone(), cod: q, comps }))
}

/// Sortwise coproduct with tagged labels.
pub fn fam_coproduct(sorts: &Sorts, parts: &[Family]) -> Result<(Family, Vec<FamFn>)> {
    if parts.iter().any(|p| p.sorts != *sorts) {
        return Err(MtkError::Mismatch("fam_coproduct: summands over different sorts".into()));
    }
    let mut sums = Vec::new();
    let mut inj_comps: Vec<Vec<FinFn>> = vec![Vec::new(); parts.len()];
    for s in 0..sorts.len() {
        let (sum, injs) = coproduct(&parts.iter().map(|p| p.parts[s].clone()).collect::<Vec<_>>());
        sums.push(sum);
        for (k, inj) in injs.into_iter().enumerate() {
            inj_comps[k].push(inj);
        }
    }
    let total = Family { sorts: sorts.clone(), parts: sums };
    let injections = parts
        .iter()
        .zip(inj_comps)
        .map(|(p, comps)| FamFn { dom: p.clone(), cod: total.clone(), comps })
        .collect();
    Ok((total, injections))
}

/// The unique `h'` with `h' ∘ p = h`, sortwise.
pub fn fam_descend(p: &FamFn, h: &FamFn) -> Result<FamFn> {
    if p.dom != h.dom {
        return Err(MtkError::Mismatch("fam_descend: different domains".into()));
    }
    let comps = p.comps.iter().zip(&h.comps).map(|(a, b)| descend(a, b)).collect::<Result<Vec<_>>>()?;
    Ok(FamFn { dom: p.cod.clone(), cod: h.cod.clone(), comps })
}

/// All families over `sorts` with at most `bound` integer atoms per sort.
pub fn families_up_to(sorts: &Sorts, bound: usize) -> Vec<Family> {
    let n = sorts.len();
    let mut out = Vec::new();
    let mut sizes = vec![0usize; n];
    loop {
        out.push(Family::of_sizes(sorts, &sizes).expect("sizes match sorts"));
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            sizes[k] += 1;
            if sizes[k] <= bound {
                break;
            }
            sizes[k] = 0;
        }
    }
}

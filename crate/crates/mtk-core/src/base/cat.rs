//! Finite categories, copresheaves on them, natural transformations, and
//! pointwise colimits of copresheaves.

use std::collections::HashMap;
use std::sync::Arc;

use super::family::{Family, Sorts};
use super::set::{chain_colimit, coequalize, coproduct, descend, FinFn, FinSet, Label};
use crate::error::{MtkError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatMor {
    pub src: usize,
    pub tgt: usize,
    pub label: Label,
}

/// A finite category with explicit composition table. Morphism labels are
/// globally distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    objects: Vec<String>,
    mors: Vec<CatMor>,
    ids: Vec<usize>,
    comp: HashMap<(usize, usize), usize>,
    by_label: HashMap<Label, usize>,
}

impl FinCat {
    /// `comp` maps `(g, f)` with `tgt f = src g` to `g ∘ f`. The table must be
    /// complete and satisfy the category axioms.
    pub fn new(
        objects: Vec<String>,
        mors: Vec<CatMor>,
        ids: Vec<usize>,
        comp: HashMap<(usize, usize), usize>,
    ) -> Result<FinCat> {
        let mut by_label = HashMap::new();
        for (i, m) in mors.iter().enumerate() {
            if m.src >= objects.len() || m.tgt >= objects.len() {
                return Err(MtkError::Mismatch(format!("morphism {} has an unknown endpoint", m.label)));
            }
            if by_label.insert(m.label.clone(), i).is_some() {
                return Err(MtkError::DuplicateLabel(m.label.to_string()));
            }
        }
        if ids.len() != objects.len() {
            return Err(MtkError::Mismatch("one identity per object is required".into()));
        }
        let cat = FinCat { objects, mors, ids, comp, by_label };
        let problems = cat.check();
        if !problems.is_empty() {
            return Err(MtkError::Mismatch(problems.join("; ")));
        }
        Ok(cat)
    }

    /// Only identity morphisms.
    pub fn discrete(objects: &[String]) -> FinCat {
        let mors: Vec<CatMor> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| CatMor { src: i, tgt: i, label: Label::Name(format!("id_{o}")) })
            .collect();
        let comp = (0..objects.len()).map(|i| ((i, i), i)).collect();
        FinCat::new(objects.to_vec(), mors, (0..objects.len()).collect(), comp).expect("discrete category is valid")
    }

    /// One-object category from a monoid table; element 0 is the unit.
    pub fn monoid(names: &[&str], table: &[Vec<usize>]) -> Result<FinCat> {
        let mors = names
            .iter()
            .map(|n| CatMor { src: 0, tgt: 0, label: Label::name(n) })
            .collect::<Vec<_>>();
        let mut comp = HashMap::new();
        for g in 0..names.len() {
            for f in 0..names.len() {
                comp.insert((g, f), table[g][f]);
            }
        }
        FinCat::new(vec!["*".into()], mors, vec![0], comp)
    }

    /// Lists every violated axiom instance; empty when the data is a category.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (o, &i) in self.ids.iter().enumerate() {
            let m = &self.mors[i];
            if m.src != o || m.tgt != o {
                out.push(format!("identity of {} is not an endomorphism of it", self.objects[o]));
            }
        }
        for (fi, f) in self.mors.iter().enumerate() {
            for (gi, g) in self.mors.iter().enumerate() {
                if f.tgt != g.src {
                    continue;
                }
                match self.comp.get(&(gi, fi)) {
                    None => out.push(format!("missing composite {} o {}", g.label, f.label)),
                    Some(&h) if self.mors[h].src != f.src || self.mors[h].tgt != g.tgt => {
                        out.push(format!("composite {} o {} has the wrong type", g.label, f.label))
                    }
                    _ => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (fi, f) in self.mors.iter().enumerate() {
            if self.comp[&(self.ids[f.tgt], fi)] != fi || self.comp[&(fi, self.ids[f.src])] != fi {
                out.push(format!("unit law fails at {}", f.label));
            }
        }
        for (fi, f) in self.mors.iter().enumerate() {
            for (gi, g) in self.mors.iter().enumerate() {
                if f.tgt != g.src {
                    continue;
                }
                for (hi, h) in self.mors.iter().enumerate() {
                    if g.tgt != h.src {
                        continue;
                    }
                    let left = self.comp[&(hi, self.comp[&(gi, fi)])];
                    let right = self.comp[&(self.comp[&(hi, gi)], fi)];
                    if left != right {
                        out.push(format!("associativity fails at {} o {} o {}", h.label, g.label, f.label));
                    }
                }
            }
        }
        out
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn sorts(&self) -> Sorts {
        Sorts::names(&self.objects)
    }

    pub fn mors(&self) -> &[CatMor] {
        &self.mors
    }

    pub fn identity(&self, o: usize) -> usize {
        self.ids[o]
    }

    pub fn mor_by_label(&self, l: &Label) -> Option<usize> {
        self.by_label.get(l).copied()
    }

    /// `g ∘ f`, if composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    /// Morphisms `a -> b` in label order.
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.mors.len()).filter(|&i| self.mors[i].src == a && self.mors[i].tgt == b).collect();
        v.sort_by(|&x, &y| self.mors[x].label.cmp(&self.mors[y].label));
        v
    }

    pub fn hom_set(&self, a: usize, b: usize) -> FinSet {
        FinSet::collect(self.hom(a, b).into_iter().map(|i| self.mors[i].label.clone()))
    }
}

/// A functor from a finite category to finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Copresheaf {
    base: Arc<FinCat>,
    sets: Vec<FinSet>,
    action: Vec<FinFn>,
    carrier: Family,
}

impl Copresheaf {
    /// `action[m]` is the image of morphism `m`. Functor laws are checked.
    pub fn new(base: Arc<FinCat>, sets: Vec<FinSet>, action: Vec<FinFn>) -> Result<Copresheaf> {
        let c = Copresheaf::unchecked(base, sets, action)?;
        let problems = c.check_functor();
        if !problems.is_empty() {
            return Err(MtkError::Mismatch(problems.join("; ")));
        }
        Ok(c)
    }

    fn unchecked(base: Arc<FinCat>, sets: Vec<FinSet>, action: Vec<FinFn>) -> Result<Copresheaf> {
        if sets.len() != base.objects.len() || action.len() != base.mors.len() {
            return Err(MtkError::Mismatch("copresheaf data does not match its base".into()));
        }
        for (m, f) in base.mors.iter().zip(&action) {
            if *f.dom() != sets[m.src] || *f.cod() != sets[m.tgt] {
                return Err(MtkError::Mismatch(format!("action of {} has the wrong type", m.label)));
            }
        }
        let carrier = Family::new(base.sorts(), sets.clone())?;
        Ok(Copresheaf { base, sets, action, carrier })
    }

    /// Identity and composition violations, one line each.
    pub fn check_functor(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (o, &i) in self.base.ids.iter().enumerate() {
            if self.action[i] != FinFn::identity(&self.sets[o]) {
                out.push(format!("identity of {} acts non-trivially", self.base.objects[o]));
            }
        }
        for (&(g, f), &h) in &self.base.comp {
            let composite = self.action[f].then(&self.action[g]).expect("types checked");
            if composite != self.action[h] {
                out.push(format!(
                    "composition fails at {} o {}",
                    self.base.mors[g].label, self.base.mors[f].label
                ));
            }
        }
        out.sort();
        out
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn set(&self, o: usize) -> &FinSet {
        &self.sets[o]
    }

    pub fn sets(&self) -> &[FinSet] {
        &self.sets
    }

    pub fn action(&self, m: usize) -> &FinFn {
        &self.action[m]
    }

    /// The underlying family over the objects.
    pub fn family(&self) -> Family {
        self.carrier.clone()
    }

    pub fn carrier(&self) -> &Family {
        &self.carrier
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTransform {
    pub source: Copresheaf,
    pub target: Copresheaf,
    pub comps: Vec<FinFn>,
}

impl NatTransform {
    pub fn new(source: Copresheaf, target: Copresheaf, comps: Vec<FinFn>) -> Result<NatTransform> {
        if source.base != target.base || comps.len() != source.sets.len() {
            return Err(MtkError::Mismatch("natural transformation between different bases".into()));
        }
        for (o, c) in comps.iter().enumerate() {
            if *c.dom() != source.sets[o] || *c.cod() != target.sets[o] {
                return Err(MtkError::Mismatch(format!("component at object {o} has the wrong type")));
            }
        }
        let t = NatTransform { source, target, comps };
        let problems = t.check_natural();
        if !problems.is_empty() {
            return Err(MtkError::Mismatch(problems.join("; ")));
        }
        Ok(t)
    }

    pub fn check_natural(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, m) in self.source.base.mors.iter().enumerate() {
            let a = self.comps[m.src].then(&self.target.action[i]).expect("typed");
            let b = self.source.action[i].then(&self.comps[m.tgt]).expect("typed");
            if a != b {
                out.push(format!("naturality fails at {}", m.label));
            }
        }
        out
    }
}

fn same_base(parts: &[&Copresheaf]) -> Result<()> {
    for w in parts.windows(2) {
        if w[0].base != w[1].base {
            return Err(MtkError::Mismatch("copresheaves over different bases".into()));
        }
    }
    Ok(())
}

/// Pointwise coproduct with induced action on tagged elements.
pub fn pointwise_coproduct(base: &Arc<FinCat>, parts: &[Copresheaf]) -> Result<(Copresheaf, Vec<NatTransform>)> {
    same_base(&parts.iter().collect::<Vec<_>>())?;
    if let Some(p) = parts.first() {
        if p.base != *base {
            return Err(MtkError::Mismatch("summand over a different base".into()));
        }
    }
    let mut sets = Vec::new();
    let mut injs: Vec<Vec<FinFn>> = vec![Vec::new(); parts.len()];
    for o in 0..base.objects.len() {
        let (sum, inj) = coproduct(&parts.iter().map(|p| p.sets[o].clone()).collect::<Vec<_>>());
        sets.push(sum);
        for (k, f) in inj.into_iter().enumerate() {
            injs[k].push(f);
        }
    }
    let action = base
        .mors
        .iter()
        .enumerate()
        .map(|(i, m)| {
            FinFn::from_labels(sets[m.src].clone(), sets[m.tgt].clone(), |l| match l {
                Label::Tag(k, inner) => {
                    let img = parts[*k].action[i].apply_label(inner).expect("element of summand");
                    Ok(Label::tag(*k, img.clone()))
                }
                _ => Err(MtkError::IllDefined("untagged coproduct element".into())),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = Copresheaf::new(base.clone(), sets, action)?;
    let injections = parts
        .iter()
        .zip(injs)
        .map(|(p, comps)| NatTransform::new(p.clone(), sum.clone(), comps))
        .collect::<Result<Vec<_>>>()?;
    Ok((sum, injections))
}

/// Pointwise coequaliser of two parallel transformations; the action is
/// induced on classes and must be well defined.
pub fn pointwise_coequalize(alpha: &NatTransform, beta: &NatTransform) -> Result<(Copresheaf, NatTransform)> {
    if alpha.source != beta.source || alpha.target != beta.target {
        return Err(MtkError::Mismatch("pointwise_coequalize: transformations are not parallel".into()));
    }
    let target = &alpha.target;
    let base = target.base.clone();
    let mut sets = Vec::new();
    let mut projs = Vec::new();
    for o in 0..base.objects.len() {
        let (q, p) = coequalize(&alpha.comps[o], &beta.comps[o])?;
        sets.push(q);
        projs.push(p);
    }
    let action = base
        .mors
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let along = target.action[i].then(&projs[m.tgt])?;
            descend(&projs[m.src], &along)
        })
        .collect::<Result<Vec<_>>>()?;
    let q = Copresheaf::new(base, sets, action)?;
    let proj = NatTransform::new(target.clone(), q.clone(), projs)?;
    Ok((q, proj))
}

/// Colimit of a finite chain of copresheaves: the last one, with composite
/// cocone.
pub fn pointwise_chain_colimit(objs: &[Copresheaf], maps: &[NatTransform]) -> Result<(Copresheaf, Vec<NatTransform>)> {
    same_base(&objs.iter().collect::<Vec<_>>())?;
    if objs.is_empty() {
        return Err(MtkError::Mismatch("empty chain".into()));
    }
    let n_obj = objs[0].base.objects.len();
    let mut cocones: Vec<Vec<FinFn>> = vec![Vec::new(); objs.len()];
    for o in 0..n_obj {
        let sets: Vec<FinSet> = objs.iter().map(|c| c.sets[o].clone()).collect();
        let fns: Vec<FinFn> = maps.iter().map(|t| t.comps[o].clone()).collect();
        let (_, cocone) = chain_colimit(&sets, &fns)?;
        for (k, f) in cocone.into_iter().enumerate() {
            cocones[k].push(f);
        }
    }
    let last = objs.last().unwrap().clone();
    let cocone = objs
        .iter()
        .zip(cocones)
        .map(|(c, comps)| NatTransform::new(c.clone(), last.clone(), comps))
        .collect::<Result<Vec<_>>>()?;
    Ok((last, cocone))
}

/// Free copresheaf on an object-indexed family: at `C`, pairs `(f: D -> C, d)`
/// with `d ∈ X(D)`. Also returns the unit family `d ↦ (id_D, d)`.
pub fn kan_free(base: &Arc<FinCat>, family: &[FinSet]) -> Result<(Copresheaf, Vec<FinFn>)> {
    if family.len() != base.objects.len() {
        return Err(MtkError::Mismatch("kan_free: one set per object is required".into()));
    }
    let n = base.objects.len();
    let sets: Vec<FinSet> = (0..n)
        .map(|c| {
            FinSet::collect((0..n).flat_map(|d| {
                base.hom(d, c).into_iter().flat_map(move |f| {
                    family[d].labels().iter().map(move |x| Label::pair(base.mors[f].label.clone(), x.clone()))
                })
            }))
        })
        .collect();
    let action = base
        .mors
        .iter()
        .enumerate()
        .map(|(g, m)| {
            FinFn::from_labels(sets[m.src].clone(), sets[m.tgt].clone(), |l| {
                let (f, x) = l.as_pair().expect("free element is a pair");
                let fi = base.mor_by_label(f).expect("known morphism");
                let gf = base.compose(g, fi).expect("composable");
                Ok(Label::pair(base.mors[gf].label.clone(), x.clone()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let free = Copresheaf::new(base.clone(), sets, action)?;
    let unit = (0..n)
        .map(|d| {
            let id = base.mors[base.ids[d]].label.clone();
            FinFn::from_labels(family[d].clone(), free.sets[d].clone(), |x| Ok(Label::pair(id.clone(), x.clone())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((free, unit))
}

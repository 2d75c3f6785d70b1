//! Graphs enriched in families over a finite list of sorts, with object set
//! `{0..n_obj-1}`. A graph is stored as one family whose sorts are the
//! triples `(a, b, C)`. Sequence graphs place `Z_i` on the edge `(i-1, i)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::{fam_coproduct, FamFn, Family, FinFn, FinSet, Label, Sorts};
use crate::error::{MtkError, Result};

/// The sorts `(a, b, C)` of a graph on `n_obj` objects.
pub fn graph_sorts(n_obj: usize, vsorts: &Sorts) -> Sorts {
    let mut labels = Vec::with_capacity(n_obj * n_obj * vsorts.len());
    for a in 0..n_obj {
        for b in 0..n_obj {
            for c in vsorts.labels() {
                labels.push(Label::Tuple(vec![Label::Int(a as i64), Label::Int(b as i64), c.clone()]));
            }
        }
    }
    Sorts::new(labels)
}

#[derive(Clone, PartialEq, Eq)]
pub struct VGraph {
    n_obj: usize,
    vsorts: Sorts,
    fam: Family,
}

impl fmt::Debug for VGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for a in 0..self.n_obj {
            for b in 0..self.n_obj {
                let h = self.hom(a, b);
                if !h.is_empty() {
                    m.entry(&(a, b), &h);
                }
            }
        }
        m.finish()
    }
}

impl VGraph {
    pub fn from_homs(n_obj: usize, vsorts: &Sorts, mut homs: impl FnMut(usize, usize) -> Family) -> Result<VGraph> {
        let mut parts = Vec::with_capacity(n_obj * n_obj * vsorts.len());
        for a in 0..n_obj {
            for b in 0..n_obj {
                let h = homs(a, b);
                if h.sorts() != vsorts {
                    return Err(MtkError::Mismatch(format!("hom ({a},{b}) over the wrong sorts")));
                }
                parts.extend(h.parts().iter().cloned());
            }
        }
        let fam = Family::new(graph_sorts(n_obj, vsorts), parts)?;
        Ok(VGraph { n_obj, vsorts: vsorts.clone(), fam })
    }

    pub fn from_family(n_obj: usize, vsorts: &Sorts, fam: Family) -> Result<VGraph> {
        if fam.sorts().len() != n_obj * n_obj * vsorts.len() {
            return Err(MtkError::Mismatch("family does not have graph sorts".into()));
        }
        let fam = Family::new(graph_sorts(n_obj, vsorts), fam.parts().to_vec())?;
        Ok(VGraph { n_obj, vsorts: vsorts.clone(), fam })
    }

    /// Recovers the graph shape from a family with graph sorts.
    pub fn of_family(vsorts: &Sorts, fam: &Family) -> Result<VGraph> {
        let nc = vsorts.len().max(1);
        let total = fam.sorts().len() / nc;
        let n_obj = (total as f64).sqrt().round() as usize;
        if n_obj * n_obj * vsorts.len() != fam.sorts().len() || *fam.sorts() != graph_sorts(n_obj, vsorts) {
            return Err(MtkError::Mismatch("family does not have graph sorts".into()));
        }
        Ok(VGraph { n_obj, vsorts: vsorts.clone(), fam: fam.clone() })
    }

    /// The graph on `{0..n}` with `zs[i-1]` on the edge `(i-1, i)`.
    pub fn sequence(vsorts: &Sorts, zs: &[Family]) -> Result<VGraph> {
        let n_obj = zs.len() + 1;
        VGraph::from_homs(n_obj, vsorts, |a, b| {
            if b == a + 1 {
                zs[a].clone()
            } else {
                Family::empty(vsorts)
            }
        })
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn vsorts(&self) -> &Sorts {
        &self.vsorts
    }

    pub fn family(&self) -> &Family {
        &self.fam
    }

    pub fn sort_index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n_obj + b) * self.vsorts.len() + c
    }

    /// Decodes a sort index into `(a, b, C)`.
    pub fn sort_parts(&self, s: usize) -> (usize, usize, usize) {
        let nc = self.vsorts.len();
        let c = s % nc;
        let ab = s / nc;
        (ab / self.n_obj, ab % self.n_obj, c)
    }

    pub fn hom(&self, a: usize, b: usize) -> Family {
        let nc = self.vsorts.len();
        let start = self.sort_index(a, b, 0);
        Family::new(self.vsorts.clone(), self.fam.parts()[start..start + nc].to_vec()).expect("slice has vsorts length")
    }

    /// True when every hom `(a, b)` with `a >= b` is empty.
    pub fn is_forward(&self) -> bool {
        (0..self.n_obj).all(|a| (0..=a).all(|b| self.hom(a, b).is_empty()))
    }

    /// Strictly increasing paths from `a` to `b` with at least one step.
    pub fn paths(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if a >= b {
            return out;
        }
        let mut cur = vec![a];
        increasing_paths(b, &mut cur, &mut out);
        out
    }
}

fn increasing_paths(b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *cur.last().expect("path is non-empty");
    if last == b {
        out.push(cur.clone());
        return;
    }
    for next in last + 1..=b {
        cur.push(next);
        increasing_paths(b, cur, out);
        cur.pop();
    }
}

/// A graph morphism: an object map together with maps on homs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphMor {
    obj_map: Vec<usize>,
    dom: VGraph,
    cod: VGraph,
    comps: Vec<FinFn>,
}

impl GraphMor {
    pub fn new(obj_map: Vec<usize>, dom: VGraph, cod: VGraph, comps: Vec<FinFn>) -> Result<GraphMor> {
        if obj_map.len() != dom.n_obj || obj_map.iter().any(|&x| x >= cod.n_obj) || dom.vsorts != cod.vsorts {
            return Err(MtkError::Mismatch("graph morphism has a bad object map".into()));
        }
        if comps.len() != dom.fam.sorts().len() {
            return Err(MtkError::Mismatch("graph morphism has the wrong number of components".into()));
        }
        for (s, c) in comps.iter().enumerate() {
            let (a, b, k) = dom.sort_parts(s);
            let t = cod.sort_index(obj_map[a], obj_map[b], k);
            if c.dom() != dom.fam.part(s) || c.cod() != cod.fam.part(t) {
                return Err(MtkError::Mismatch(format!("component at ({a},{b}) has the wrong type")));
            }
        }
        Ok(GraphMor { obj_map, dom, cod, comps })
    }

    /// Builds the components from a rule on `(a, b, C, label)`.
    pub fn from_labels(
        obj_map: Vec<usize>,
        dom: &VGraph,
        cod: &VGraph,
        mut rule: impl FnMut(usize, usize, usize, &Label) -> Result<Label>,
    ) -> Result<GraphMor> {
        let mut comps = Vec::with_capacity(dom.fam.sorts().len());
        for s in 0..dom.fam.sorts().len() {
            let (a, b, c) = dom.sort_parts(s);
            let t = cod.sort_index(obj_map[a], obj_map[b], c);
            comps.push(FinFn::from_labels(dom.fam.part(s).clone(), cod.fam.part(t).clone(), |l| rule(a, b, c, l))?);
        }
        GraphMor::new(obj_map, dom.clone(), cod.clone(), comps)
    }

    /// A map of families over graph sorts, read as an identity-on-objects morphism.
    pub fn of_famfn(vsorts: &Sorts, f: &FamFn) -> Result<GraphMor> {
        let dom = VGraph::of_family(vsorts, f.dom())?;
        let cod = VGraph::of_family(vsorts, f.cod())?;
        GraphMor::new((0..dom.n_obj).collect(), dom, cod, f.comps().to_vec())
    }

    /// The underlying map of families; only for identity object maps.
    pub fn to_famfn(&self) -> Result<FamFn> {
        if self.dom.n_obj != self.cod.n_obj || self.obj_map.iter().enumerate().any(|(i, &x)| i != x) {
            return Err(MtkError::Mismatch("object map is not the identity".into()));
        }
        FamFn::new(self.dom.fam.clone(), self.cod.fam.clone(), self.comps.clone())
    }

    pub fn obj_map(&self) -> &[usize] {
        &self.obj_map
    }

    pub fn dom(&self) -> &VGraph {
        &self.dom
    }

    pub fn cod(&self) -> &VGraph {
        &self.cod
    }

    pub fn comp(&self, s: usize) -> &FinFn {
        &self.comps[s]
    }

    /// The induced map `dom(a, b) -> cod(f a, f b)`.
    pub fn hom_map(&self, a: usize, b: usize) -> Result<FamFn> {
        let nc = self.dom.vsorts.len();
        let start = self.dom.sort_index(a, b, 0);
        FamFn::new(
            self.dom.hom(a, b),
            self.cod.hom(self.obj_map[a], self.obj_map[b]),
            self.comps[start..start + nc].to_vec(),
        )
    }

    /// The morphism between sequence graphs given by maps on the edges.
    pub fn sequence(vsorts: &Sorts, fs: &[FamFn]) -> Result<GraphMor> {
        let dom = VGraph::sequence(vsorts, &fs.iter().map(|f| f.dom().clone()).collect::<Vec<_>>())?;
        let cod = VGraph::sequence(vsorts, &fs.iter().map(|f| f.cod().clone()).collect::<Vec<_>>())?;
        let mut comps = Vec::new();
        for s in 0..dom.fam.sorts().len() {
            let (a, b, c) = dom.sort_parts(s);
            if b == a + 1 {
                comps.push(fs[a].comp(c).clone());
            } else {
                comps.push(FinFn::identity(&FinSet::empty()));
            }
        }
        GraphMor::new((0..dom.n_obj).collect(), dom, cod, comps)
    }
}

/// An endofunctor on enriched graphs that keeps object sets fixed.
pub trait GraphFunctor {
    fn name(&self) -> String;
    fn apply_graph(&self, x: &VGraph) -> Result<VGraph>;
    fn map_graph(&self, f: &GraphMor) -> Result<GraphMor>;
}

#[derive(Clone, Debug, Default)]
pub struct IdentityFunctor;

impl GraphFunctor for IdentityFunctor {
    fn name(&self) -> String {
        "Id".into()
    }

    fn apply_graph(&self, x: &VGraph) -> Result<VGraph> {
        Ok(x.clone())
    }

    fn map_graph(&self, f: &GraphMor) -> Result<GraphMor> {
        Ok(f.clone())
    }
}

/// The functor with a fixed hom on every forward pair `a < b`.
#[derive(Clone, Debug)]
pub struct ConstantFunctor {
    pub hom: Family,
}

impl GraphFunctor for ConstantFunctor {
    fn name(&self) -> String {
        "Const".into()
    }

    fn apply_graph(&self, x: &VGraph) -> Result<VGraph> {
        VGraph::from_homs(x.n_obj, &x.vsorts, |a, b| if a < b { self.hom.clone() } else { Family::empty(&x.vsorts) })
    }

    fn map_graph(&self, f: &GraphMor) -> Result<GraphMor> {
        let dom = self.apply_graph(&f.dom)?;
        let cod = self.apply_graph(&f.cod)?;
        GraphMor::from_labels(f.obj_map.clone(), &dom, &cod, |_, _, _, l| Ok(l.clone()))
    }
}

/// The composite `outer ∘ inner`.
#[derive(Clone, Debug)]
pub struct ComposeFunctor<F, G> {
    pub outer: F,
    pub inner: G,
}

impl<F: GraphFunctor, G: GraphFunctor> GraphFunctor for ComposeFunctor<F, G> {
    fn name(&self) -> String {
        format!("{}.{}", self.outer.name(), self.inner.name())
    }

    fn apply_graph(&self, x: &VGraph) -> Result<VGraph> {
        self.outer.apply_graph(&self.inner.apply_graph(x)?)
    }

    fn map_graph(&self, f: &GraphMor) -> Result<GraphMor> {
        self.outer.map_graph(&self.inner.map_graph(f)?)
    }
}

/// `T̄(Z_1..Z_n) = T(Z_1..Z_n)(0, n)`.
pub fn tbar<T: GraphFunctor + ?Sized>(t: &T, vsorts: &Sorts, zs: &[Family]) -> Result<Family> {
    let g = t.apply_graph(&VGraph::sequence(vsorts, zs)?)?;
    Ok(g.hom(0, zs.len()))
}

/// `T̄(f_1..f_n)`.
pub fn tbar_fmap<T: GraphFunctor + ?Sized>(t: &T, vsorts: &Sorts, fs: &[FamFn]) -> Result<FamFn> {
    t.map_graph(&GraphMor::sequence(vsorts, fs)?)?.hom_map(0, fs.len())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub predicate: String,
    pub functor: String,
    pub instances: usize,
    pub max_size: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Checks that the maps `T(x̄)_{0,n}` out of the path summands assemble into
/// a bijection onto `TX(a, b)` for every sample graph and every `a < b`.
pub fn check_pathlike<T: GraphFunctor + ?Sized>(t: &T, graphs: &[VGraph]) -> Result<PredicateReport> {
    let mut rep = PredicateReport { predicate: "path-like".into(), functor: t.name(), ..Default::default() };
    for x in graphs {
        rep.max_size = rep.max_size.max(x.fam.total());
        let tx = t.apply_graph(x)?;
        for a in 0..x.n_obj {
            for b in a + 1..x.n_obj {
                rep.instances += 1;
                let target = tx.hom(a, b);
                let mut hits: Vec<Vec<usize>> = target.parts().iter().map(|p| vec![0; p.len()]).collect();
                for path in x.paths(a, b) {
                    let zs: Vec<Family> = path.windows(2).map(|w| x.hom(w[0], w[1])).collect();
                    let seq = VGraph::sequence(&x.vsorts, &zs)?;
                    let xbar = GraphMor::from_labels(path.clone(), &seq, x, |_, _, _, l| Ok(l.clone()))?;
                    let img = t.map_graph(&xbar)?.hom_map(0, zs.len())?;
                    for (c, h) in hits.iter_mut().enumerate() {
                        for &j in img.comp(c).table() {
                            h[j] += 1;
                        }
                    }
                }
                for (c, h) in hits.iter().enumerate() {
                    for (j, &count) in h.iter().enumerate() {
                        if count != 1 {
                            rep.failures.push(format!(
                                "hom ({a},{b}) element {} hit {count} times",
                                target.part(c).label(j)
                            ));
                        }
                    }
                }
            }
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}

/// Checks that `T̄_n` preserves binary and empty coproducts in each
/// variable: for every sample tuple, position and pair `(A, B)`, the map
/// `T̄(.., A, ..) ⊔ T̄(.., B, ..) -> T̄(.., A ⊔ B, ..)` is a bijection, and
/// `T̄(.., ∅, ..)` is empty.
pub fn check_distributive<T: GraphFunctor + ?Sized>(
    t: &T,
    vsorts: &Sorts,
    tuples: &[Vec<Family>],
    pairs: &[(Family, Family)],
) -> Result<PredicateReport> {
    let mut rep = PredicateReport { predicate: "distributive".into(), functor: t.name(), ..Default::default() };
    for zs in tuples {
        rep.max_size = rep.max_size.max(zs.iter().map(Family::total).max().unwrap_or(0));
        for i in 0..zs.len() {
            rep.instances += 1;
            let mut with_empty = zs.clone();
            with_empty[i] = Family::empty(vsorts);
            if !tbar(t, vsorts, &with_empty)?.is_empty() {
                rep.failures.push(format!("empty argument at position {i} gives a non-empty value"));
            }
            for (a, b) in pairs {
                rep.instances += 1;
                let (sum, injs) = fam_coproduct(vsorts, &[a.clone(), b.clone()])?;
                let mut images = Vec::new();
                for inj in &injs {
                    let fs: Vec<FamFn> = (0..zs.len())
                        .map(|k| if k == i { inj.clone() } else { FamFn::identity(&zs[k]) })
                        .collect();
                    images.push(tbar_fmap(t, vsorts, &fs)?);
                }
                let mut at_sum = zs.clone();
                at_sum[i] = sum;
                let target = tbar(t, vsorts, &at_sum)?;
                for c in 0..vsorts.len() {
                    let mut hits = vec![0usize; target.part(c).len()];
                    for img in &images {
                        for &j in img.comp(c).table() {
                            hits[j] += 1;
                        }
                    }
                    if hits.iter().any(|&h| h != 1) {
                        rep.failures.push(format!(
                            "coproduct at position {i} of tuple with sizes {:?} is not preserved",
                            zs.iter().map(Family::sizes).collect::<Vec<_>>()
                        ));
                    }
                }
            }
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}

//! The monad `ΓE` on forward graphs: `ΓE X(a, b)` is the sum over strictly
//! increasing paths `a = x_0 < .. < x_k = b` of `E_k(X(x_0,x_1), .., X(x_{k-1},x_k))`.
//! Elements are labelled `([x_0..x_k], e)` with `e` an element of `E_k`.

use super::cat_tensor::{CatTensor, TensorMap};
use super::graph::{GraphFunctor, GraphMor, VGraph};
use crate::base::{FamFn, Family, FinSet, Label};
use crate::error::{MtkError, Result};
use crate::monad::{Monad, MonadMorphism};

#[derive(Clone, Debug)]
pub struct Gamma {
    e: CatTensor,
}

fn path_label(path: &[usize]) -> Label {
    Label::Tuple(path.iter().map(|&p| Label::Int(p as i64)).collect())
}

fn parse_path(l: &Label) -> Result<Vec<usize>> {
    l.as_tuple()
        .and_then(|xs| xs.iter().map(|x| x.as_int().map(|i| i as usize)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| MtkError::UnknownLabel(l.to_string()))
}

impl Gamma {
    pub fn new(e: &CatTensor) -> Gamma {
        Gamma { e: e.clone() }
    }

    pub fn tensor(&self) -> &CatTensor {
        &self.e
    }

    fn split<'a>(&self, l: &'a Label) -> Result<(Vec<usize>, &'a Label)> {
        let (p, e) = l.as_pair().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
        Ok((parse_path(p)?, e))
    }

    fn check_graph(&self, x: &VGraph) -> Result<()> {
        if x.vsorts() != self.e.sorts() {
            return Err(MtkError::Mismatch("graph homs are not indexed by the multicategory objects".into()));
        }
        if !x.is_forward() {
            return Err(MtkError::Cyclic("graph has a hom (a, b) with a >= b".into()));
        }
        if x.n_obj() > 0 && x.n_obj() - 1 > self.e.multicat().arity_bound() {
            return Err(MtkError::ArityExceeded { got: x.n_obj() - 1, bound: self.e.multicat().arity_bound() });
        }
        Ok(())
    }

    fn graph_of(&self, x: &Family) -> Result<VGraph> {
        VGraph::of_family(self.e.sorts(), x)
    }
}

impl GraphFunctor for Gamma {
    fn name(&self) -> String {
        format!("Gamma[{}]", crate::multitensor::Multitensor::name(&self.e))
    }

    fn apply_graph(&self, x: &VGraph) -> Result<VGraph> {
        self.check_graph(x)?;
        let nc = x.vsorts().len();
        let n = x.n_obj();
        let mut labels: Vec<Vec<Label>> = vec![Vec::new(); n * n * nc];
        for a in 0..n {
            for b in a + 1..n {
                for path in x.paths(a, b) {
                    let zs: Vec<Family> = path.windows(2).map(|w| x.hom(w[0], w[1])).collect();
                    let ez = self.e.eval_fam(&zs)?;
                    let pl = path_label(&path);
                    for c in 0..nc {
                        let slot = &mut labels[x.sort_index(a, b, c)];
                        slot.extend(ez.part(c).labels().iter().map(|l| Label::pair(pl.clone(), l.clone())));
                    }
                }
            }
        }
        let parts = labels.into_iter().map(FinSet::new).collect::<Result<Vec<_>>>()?;
        VGraph::from_family(n, x.vsorts(), Family::new(x.family().sorts().clone(), parts)?)
    }

    fn map_graph(&self, f: &GraphMor) -> Result<GraphMor> {
        let dom = self.apply_graph(f.dom())?;
        let cod = self.apply_graph(f.cod())?;
        let om = f.obj_map().to_vec();
        GraphMor::from_labels(om.clone(), &dom, &cod, |_, _, _, l| {
            let (path, e) = self.split(l)?;
            let (op, xs) = self.e.parse(e)?;
            let src = &self.e.multicat().op(op).src;
            let mut ys = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                let s = f.dom().sort_index(path[i], path[i + 1], src[i]);
                ys.push(f.comp(s).apply_label(x).cloned().ok_or_else(|| MtkError::UnknownLabel(x.to_string()))?);
            }
            let image: Vec<usize> = path.iter().map(|&p| om[p]).collect();
            if image.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MtkError::IllDefined("object map does not preserve strict order on a path".into()));
            }
            Ok(Label::pair(path_label(&image), self.e.element(op, ys)))
        })
    }
}

impl Monad for Gamma {
    fn name(&self) -> String {
        GraphFunctor::name(self)
    }

    fn apply(&self, x: &Family) -> Result<Family> {
        Ok(self.apply_graph(&self.graph_of(x)?)?.family().clone())
    }

    fn fmap(&self, f: &FamFn) -> Result<FamFn> {
        self.map_graph(&GraphMor::of_famfn(self.e.sorts(), f)?)?.to_famfn()
    }

    fn eta(&self, x: &Family) -> Result<FamFn> {
        let g = self.graph_of(x)?;
        let tx = self.apply(x)?;
        FamFn::from_labels(x, &tx, |s, l| {
            let (a, b, c) = g.sort_parts(s);
            Ok(Label::pair(path_label(&[a, b]), self.e.element(self.e.multicat().identity(c), vec![l.clone()])))
        })
    }

    fn mu(&self, x: &Family) -> Result<FamFn> {
        let tx = self.apply(x)?;
        let ttx = self.apply(&tx)?;
        FamFn::from_labels(&ttx, &tx, |_, l| {
            let (path, e) = self.split(l)?;
            let (outer, ys) = self.e.parse(e)?;
            let mut full = vec![path[0]];
            let mut inners = Vec::with_capacity(ys.len());
            let mut flat = Vec::new();
            for y in ys {
                let (sub, inner) = self.split(y)?;
                full.extend(sub.into_iter().skip(1));
                let (i, zs) = self.e.parse(inner)?;
                inners.push(i);
                flat.extend(zs.iter().cloned());
            }
            let r = self.e.multicat().subst(outer, &inners).ok_or_else(|| {
                MtkError::InvalidMulticat(format!(
                    "missing substitution {}",
                    self.e.multicat().describe_config(outer, &inners)
                ))
            })?;
            Ok(Label::pair(path_label(&full), self.e.element(r, flat)))
        })
    }
}

/// The monad morphism `Γψ: ΓE -> ΓE'` induced by a map of multitensors.
#[derive(Clone, Debug)]
pub struct GammaMap {
    pub source: Gamma,
    pub target: Gamma,
    pub map: TensorMap,
}

impl GammaMap {
    pub fn new(map: &TensorMap) -> GammaMap {
        GammaMap { source: Gamma::new(&map.source), target: Gamma::new(&map.target), map: map.clone() }
    }
}

impl MonadMorphism for GammaMap {
    fn source(&self) -> &dyn Monad {
        &self.source
    }

    fn target(&self) -> &dyn Monad {
        &self.target
    }

    fn component(&self, x: &Family) -> Result<FamFn> {
        let dom = self.source.apply(x)?;
        let cod = self.target.apply(x)?;
        FamFn::from_labels(&dom, &cod, |_, l| {
            let (p, e) = l.as_pair().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
            Ok(Label::pair(p.clone(), self.map.map_label(e)?))
        })
    }
}

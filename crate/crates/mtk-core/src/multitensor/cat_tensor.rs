//! The multitensor on families indexed by the objects of a multicategory:
//! `E_n(X_1..X_n)(C)` is the sum over multimaps `θ: (C_1..C_n) -> C` of
//! `Π X_i(C_i)`. Elements are labelled `(θ, [x_1..x_n])`.

use std::sync::Arc;

use super::Multitensor;
use crate::base::{all_functions, function_count, FamFn, Family, FinSet, Label, Sorts};
use crate::error::{MtkError, Result};
use crate::monad::Monad;
use crate::multicat::{Multicat, MulticatFunctor};

#[derive(Clone, Debug)]
pub struct CatTensor {
    mc: Arc<Multicat>,
    max_arity: usize,
    sorts: Sorts,
}

impl CatTensor {
    pub fn new(mc: &Multicat) -> Result<CatTensor> {
        let rep = mc.validate();
        if !rep.valid {
            return Err(MtkError::InvalidMulticat(format!(
                "{} violations",
                rep.unit_violations.len() + rep.assoc_violations.len() + rep.closure_gaps.len()
            )));
        }
        Ok(CatTensor { mc: Arc::new(mc.clone()), max_arity: mc.arity_bound(), sorts: Sorts::names(mc.objects()) })
    }

    /// The sub-multitensor with the same unary part and empty higher parts.
    pub fn tilde_unary(&self) -> CatTensor {
        CatTensor { mc: self.mc.clone(), max_arity: 1, sorts: self.sorts.clone() }
    }

    pub fn multicat(&self) -> &Multicat {
        &self.mc
    }

    pub fn sorts(&self) -> &Sorts {
        &self.sorts
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn is_tilde(&self) -> bool {
        self.max_arity < self.mc.arity_bound()
    }

    pub fn element(&self, op: usize, xs: Vec<Label>) -> Label {
        Label::pair(self.mc.op_label(op), Label::Tuple(xs))
    }

    /// Splits an element label into its multimap index and arguments.
    pub fn parse<'a>(&self, l: &'a Label) -> Result<(usize, &'a [Label])> {
        let (op, xs) = l.as_pair().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
        let i = self.mc.op_by_label(op).ok_or_else(|| MtkError::UnknownLabel(op.to_string()))?;
        let xs = xs.as_tuple().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
        Ok((i, xs))
    }

    fn check_sorts(&self, xs: &[Family]) -> Result<()> {
        if xs.iter().any(|x| *x.sorts() != self.sorts) {
            return Err(MtkError::Mismatch("argument is not indexed by the objects of the multicategory".into()));
        }
        Ok(())
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(MtkError::Mismatch("nullary tensors are not supported".into()));
        }
        if n > self.mc.arity_bound() {
            return Err(MtkError::ArityExceeded { got: n, bound: self.mc.arity_bound() });
        }
        Ok(())
    }

    /// `E_n(xs)`.
    pub fn eval_fam(&self, xs: &[Family]) -> Result<Family> {
        self.check_arity(xs.len())?;
        self.check_sorts(xs)?;
        let n = xs.len();
        let mut parts = Vec::with_capacity(self.sorts.len());
        for c in 0..self.sorts.len() {
            let mut labels = Vec::new();
            if n <= self.max_arity {
                for &op in self.mc.ops_into(c) {
                    let src = &self.mc.op(op).src;
                    if src.len() != n {
                        continue;
                    }
                    let factors: Vec<&FinSet> = src.iter().enumerate().map(|(i, &s)| xs[i].part(s)).collect();
                    for_each_tuple(&factors, |tuple| labels.push(self.element(op, tuple)));
                }
            }
            parts.push(FinSet::new(labels)?);
        }
        Family::new(self.sorts.clone(), parts)
    }

    /// `E_n(fs)`.
    pub fn fmap_fam(&self, fs: &[FamFn]) -> Result<FamFn> {
        let doms: Vec<Family> = fs.iter().map(|f| f.dom().clone()).collect();
        let cods: Vec<Family> = fs.iter().map(|f| f.cod().clone()).collect();
        let dom = self.eval_fam(&doms)?;
        let cod = self.eval_fam(&cods)?;
        FamFn::from_labels(&dom, &cod, |_, l| {
            let (op, xs) = self.parse(l)?;
            let src = &self.mc.op(op).src;
            let ys = xs
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    fs[i].apply_label(src[i], x).cloned().ok_or_else(|| MtkError::UnknownLabel(x.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(self.element(op, ys))
        })
    }

    /// `u_x: x -> E_1(x)`, `x ↦ (id, [x])`.
    pub fn unit_fam(&self, x: &Family) -> Result<FamFn> {
        let e1 = self.eval_fam(std::slice::from_ref(x))?;
        FamFn::from_labels(x, &e1, |s, l| Ok(self.element(self.mc.identity(s), vec![l.clone()])))
    }

    /// Substitution on element labels: `(θ, [(θ_i, xs_i)]) ↦ (σ(θ; θ_i), concat xs_i)`.
    pub fn subst_label(&self, l: &Label) -> Result<Label> {
        let (outer, ys) = self.parse(l)?;
        let mut inners = Vec::with_capacity(ys.len());
        let mut flat = Vec::new();
        for y in ys {
            let (i, zs) = self.parse(y)?;
            inners.push(i);
            flat.extend(zs.iter().cloned());
        }
        let r = self.mc.subst(outer, &inners).ok_or_else(|| {
            MtkError::InvalidMulticat(format!("missing substitution {}", self.mc.describe_config(outer, &inners)))
        })?;
        Ok(self.element(r, flat))
    }

    pub fn subst_fam(&self, xss: &[Vec<Family>]) -> Result<FamFn> {
        let inner: Vec<Family> = xss.iter().map(|xs| self.eval_fam(xs)).collect::<Result<_>>()?;
        let dom = self.eval_fam(&inner)?;
        let cod = self.eval_fam(&xss.concat())?;
        FamFn::from_labels(&dom, &cod, |_, l| self.subst_label(l))
    }

    pub fn unary_part(&self) -> UnaryPart {
        UnaryPart { tensor: self.clone() }
    }
}

/// Calls `f` on every tuple in the product of `factors`, in lexicographic order.
pub(crate) fn for_each_tuple(factors: &[&FinSet], mut f: impl FnMut(Vec<Label>)) {
    if factors.iter().any(|s| s.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; factors.len()];
    loop {
        f(idx.iter().zip(factors).map(|(&i, s)| s.label(i).clone()).collect());
        let mut k = factors.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// All maps of families `a -> b`, refusing more than `cap` candidates.
pub(crate) fn all_fam_maps(a: &Family, b: &Family, cap: u128) -> Result<Vec<FamFn>> {
    let mut count: u128 = 1;
    for s in 0..a.sorts().len() {
        count = count.saturating_mul(function_count(a.part(s).len(), b.part(s).len()));
    }
    if count > cap {
        return Err(MtkError::EnumerationBound(format!("{count} candidate maps exceed the cap {cap}")));
    }
    let per_sort: Vec<Vec<crate::base::FinFn>> =
        (0..a.sorts().len()).map(|s| all_functions(a.part(s), b.part(s))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_sort.len()];
    if per_sort.iter().any(|v| v.is_empty()) {
        return Ok(out);
    }
    loop {
        let comps = idx.iter().zip(&per_sort).map(|(&i, v)| v[i].clone()).collect();
        out.push(FamFn::new(a.clone(), b.clone(), comps)?);
        let mut k = per_sort.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_sort[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl Multitensor for CatTensor {
    type Obj = Family;

    fn name(&self) -> String {
        if self.is_tilde() {
            "tilde-E1".into()
        } else {
            "E".into()
        }
    }

    fn arity_bound(&self) -> usize {
        self.mc.arity_bound()
    }

    fn carrier<'a>(&self, x: &'a Family) -> &'a Family {
        x
    }

    fn eval(&self, xs: &[Family]) -> Result<Family> {
        self.eval_fam(xs)
    }

    fn fmap(&self, _xs: &[Family], _ys: &[Family], fs: &[FamFn]) -> Result<FamFn> {
        self.fmap_fam(fs)
    }

    fn unit(&self, x: &Family) -> Result<FamFn> {
        self.unit_fam(x)
    }

    fn subst(&self, xss: &[Vec<Family>]) -> Result<FamFn> {
        self.subst_fam(xss)
    }

    fn morphisms(&self, a: &Family, b: &Family, cap: u128) -> Result<Vec<FamFn>> {
        all_fam_maps(a, b, cap)
    }
}

/// The monad `(E_1, u, σ_{(1;1)})`.
#[derive(Clone, Debug)]
pub struct UnaryPart {
    tensor: CatTensor,
}

impl UnaryPart {
    pub fn tensor(&self) -> &CatTensor {
        &self.tensor
    }
}

impl Monad for UnaryPart {
    fn name(&self) -> String {
        "E1".into()
    }

    fn apply(&self, x: &Family) -> Result<Family> {
        self.tensor.eval_fam(std::slice::from_ref(x))
    }

    fn fmap(&self, f: &FamFn) -> Result<FamFn> {
        self.tensor.fmap_fam(std::slice::from_ref(f))
    }

    fn eta(&self, x: &Family) -> Result<FamFn> {
        self.tensor.unit_fam(x)
    }

    fn mu(&self, x: &Family) -> Result<FamFn> {
        self.tensor.subst_fam(&[vec![x.clone()]])
    }
}

/// A morphism of multitensors `E^M -> E^N` induced by a map on multimaps
/// (an identity-on-objects functor, or the inclusion of the unary part).
#[derive(Clone, Debug)]
pub struct TensorMap {
    pub source: CatTensor,
    pub target: CatTensor,
    on_ops: Vec<usize>,
}

impl TensorMap {
    /// The inclusion `ψ: Ẽ_1 -> E`.
    pub fn tilde_inclusion(e: &CatTensor) -> TensorMap {
        TensorMap { source: e.tilde_unary(), target: e.clone(), on_ops: (0..e.mc.ops().len()).collect() }
    }

    /// The map `E^M -> E^N` given by a functor `M -> N`.
    pub fn from_functor(k: &MulticatFunctor) -> Result<TensorMap> {
        Ok(TensorMap { source: CatTensor::new(&k.source)?, target: CatTensor::new(&k.target)?, on_ops: k.on_ops.clone() })
    }

    /// `(θ, xs) ↦ (K θ, xs)` on element labels.
    pub fn map_label(&self, l: &Label) -> Result<Label> {
        let (op, args) = self.source.parse(l)?;
        Ok(self.target.element(self.on_ops[op], args.to_vec()))
    }

    /// The component at `xs`.
    pub fn component(&self, xs: &[Family]) -> Result<FamFn> {
        let dom = self.source.eval_fam(xs)?;
        let cod = self.target.eval_fam(xs)?;
        FamFn::from_labels(&dom, &cod, |_, l| self.map_label(l))
    }

    /// Naturality, unit and substitution compatibility on the given tuples.
    pub fn check(&self, tuples: &[Vec<Family>]) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for xs in tuples {
            if xs.len() == 1 {
                let lhs = self.source.unit_fam(&xs[0])?.then(&self.component(xs)?)?;
                if lhs != self.target.unit_fam(&xs[0])? {
                    out.push("unit is not preserved".to_string());
                }
            }
            for blocks in super::compositions(xs.len()) {
                let xss = super::split_blocks(xs, &blocks);
                let inner_src: Vec<Family> = xss.iter().map(|b| self.source.eval_fam(b)).collect::<Result<_>>()?;
                let comps = xss.iter().map(|b| self.component(b)).collect::<Result<Vec<_>>>()?;
                // ψ ∘ σ versus σ ∘ E^N_k(ψ, .., ψ) ∘ ψ
                let lhs = self.source.subst_fam(&xss)?.then(&self.component(xs)?)?;
                let rhs = self
                    .component(&inner_src)?
                    .then(&self.target.fmap_fam(&comps)?)?
                    .then(&self.target.subst_fam(&xss)?)?;
                if lhs != rhs {
                    out.push(format!("substitution is not preserved at blocks {blocks:?}"));
                }
            }
        }
        Ok(out)
    }
}

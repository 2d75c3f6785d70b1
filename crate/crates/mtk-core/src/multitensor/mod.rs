//! Multitensors (unbiased lax monoidal structures), their axioms, enriched
//! graphs, the Γ construction and enriched categories for a multitensor.

mod cat_tensor;
mod ecat;
mod gamma;
mod graph;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::{FamFn, Family};
use crate::error::Result;

pub use cat_tensor::{CatTensor, TensorMap, UnaryPart};
pub(crate) use cat_tensor::all_fam_maps;
pub use ecat::{ecat_check, ecat_enumerate, ECatReport, ECategory, EGraph};
pub use gamma::{Gamma, GammaMap};
pub use graph::{
    check_distributive, check_pathlike, tbar, tbar_fmap, ComposeFunctor, ConstantFunctor, GraphFunctor, GraphMor,
    IdentityFunctor, PredicateReport, VGraph,
};

/// A multitensor on a category whose objects have finite families as
/// underlying data and whose morphisms are maps of those families.
pub trait Multitensor {
    type Obj: Clone + PartialEq + fmt::Debug;

    fn name(&self) -> String;
    /// Largest arity at which the tensor is computed.
    fn arity_bound(&self) -> usize;
    fn carrier<'a>(&self, x: &'a Self::Obj) -> &'a Family;
    /// `E_n(xs)` for `1 <= n <= arity_bound`.
    fn eval(&self, xs: &[Self::Obj]) -> Result<Self::Obj>;
    /// `E_n(fs): E_n(xs) -> E_n(ys)`.
    fn fmap(&self, xs: &[Self::Obj], ys: &[Self::Obj], fs: &[FamFn]) -> Result<FamFn>;
    /// `u_x: x -> E_1(x)`.
    fn unit(&self, x: &Self::Obj) -> Result<FamFn>;
    /// `σ: E_k(E_{n_1}(xss[0]), ..., E_{n_k}(xss[k-1])) -> E_{n_1+...+n_k}(concat)`.
    fn subst(&self, xss: &[Vec<Self::Obj>]) -> Result<FamFn>;
    /// Every morphism `a -> b`, failing beyond `cap` candidates.
    fn morphisms(&self, a: &Self::Obj, b: &Self::Obj, cap: u128) -> Result<Vec<FamFn>>;
}

/// All ways to write `n` as an ordered sum of positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Cuts a sequence into consecutive blocks of the given lengths.
pub fn split_blocks<T: Clone>(xs: &[T], blocks: &[usize]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut pos = 0;
    for &b in blocks {
        out.push(xs[pos..pos + b].to_vec());
        pos += b;
    }
    out
}

/// Outcome of the unit and associativity checks for a multitensor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub tuples: usize,
    pub unit_instances: usize,
    pub assoc_instances: usize,
    pub violations: Vec<String>,
    pub passed: bool,
}

fn first_difference(a: &FamFn, b: &FamFn) -> String {
    for s in 0..a.dom().sorts().len() {
        for i in 0..a.dom().part(s).len() {
            if a.apply(s, i) != b.apply(s, i) {
                return format!(
                    "at {}: {} vs {}",
                    a.dom().part(s).label(i),
                    a.cod().part(s).label(a.apply(s, i)),
                    b.cod().part(s).label(b.apply(s, i))
                );
            }
        }
    }
    "maps differ in shape".to_string()
}

/// Checks the two unit laws and associativity of σ over every two-level
/// nesting of each sample tuple.
pub fn mt_check_axioms<M: Multitensor>(e: &M, tuples: &[Vec<M::Obj>]) -> Result<AxiomReport> {
    let mut rep = AxiomReport { tuples: tuples.len(), ..Default::default() };
    for xs in tuples {
        let n = xs.len();
        let ex = e.eval(xs)?;
        let id = FamFn::identity(e.carrier(&ex));

        rep.unit_instances += 2;
        let left = e.unit(&ex)?.then(&e.subst(std::slice::from_ref(xs))?)?;
        if left != id {
            rep.violations.push(format!("left unit fails at arity {n} {}", first_difference(&left, &id)));
        }
        let ux: Vec<M::Obj> = xs.iter().map(|x| e.eval(std::slice::from_ref(x))).collect::<Result<_>>()?;
        let units = xs.iter().map(|x| e.unit(x)).collect::<Result<Vec<_>>>()?;
        let singles: Vec<Vec<M::Obj>> = xs.iter().map(|x| vec![x.clone()]).collect();
        let right = e.fmap(xs, &ux, &units)?.then(&e.subst(&singles)?)?;
        if right != id {
            rep.violations.push(format!("right unit fails at arity {n} {}", first_difference(&right, &id)));
        }

        for inner in compositions(n) {
            let blocks = split_blocks(xs, &inner);
            let ys: Vec<M::Obj> = blocks.iter().map(|b| e.eval(b)).collect::<Result<_>>()?;
            let m = inner.len();
            let sigma_inner = e.subst(&blocks)?;
            for outer in compositions(m) {
                rep.assoc_instances += 1;
                let groups_y = split_blocks(&ys, &outer);
                let groups_b = split_blocks(&blocks, &outer);
                let eg: Vec<M::Obj> = groups_y.iter().map(|g| e.eval(g)).collect::<Result<_>>()?;
                let merged: Vec<Vec<M::Obj>> = groups_b.iter().map(|g| g.concat()).collect();
                let em: Vec<M::Obj> = merged.iter().map(|g| e.eval(g)).collect::<Result<_>>()?;
                let inner_substs = groups_b.iter().map(|g| e.subst(g)).collect::<Result<Vec<_>>>()?;
                let path_a = e.fmap(&eg, &em, &inner_substs)?.then(&e.subst(&merged)?)?;
                let path_b = e.subst(&groups_y)?.then(&sigma_inner)?;
                if path_a != path_b {
                    rep.violations.push(format!(
                        "associativity fails at arity {n}, inner blocks {inner:?}, outer blocks {outer:?} {}",
                        first_difference(&path_a, &path_b)
                    ));
                }
            }
        }
    }
    rep.passed = rep.violations.is_empty();
    Ok(rep)
}

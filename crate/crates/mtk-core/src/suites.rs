//! Exhaustive check suites over small instances, shared by the command line
//! front end and the acceptance tests. Every report records the bounds it
//! was run at.

use serde::{Deserialize, Serialize};

use crate::base::{families_up_to, FamFn, Family, Sorts};
use crate::error::Result;
use crate::monad::{check_monad_laws, MonadLawReport};
use crate::multicat::Multicat;
use crate::multitensor::{
    check_distributive, check_pathlike, mt_check_axioms, AxiomReport, CatTensor, ComposeFunctor, Gamma, GraphMor,
    Multitensor, PredicateReport, VGraph,
};

/// Every tuple of length `1..=max_len` drawn from `items`.
pub fn tuples_of<T: Clone>(items: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|t| {
                items.iter().map(move |a| {
                    let mut t = t.clone();
                    t.push(a.clone());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Every tuple of families with at most `bound` elements per sort.
pub fn family_tuples(sorts: &Sorts, bound: usize, max_len: usize) -> Vec<Vec<Family>> {
    tuples_of(&families_up_to(sorts, bound), max_len)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomSuiteReport {
    pub value_bound: usize,
    pub max_arity: usize,
    pub report: AxiomReport,
}

/// The unit and associativity axioms of `E` on all tuples of families with
/// at most `bound` elements per sort, up to the arity bound.
pub fn axiom_suite(mc: &Multicat, bound: usize) -> Result<AxiomSuiteReport> {
    let e = CatTensor::new(mc)?;
    let max_arity = e.arity_bound();
    let report = mt_check_axioms(&e, &family_tuples(e.sorts(), bound, max_arity))?;
    Ok(AxiomSuiteReport { value_bound: bound, max_arity, report })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSuiteReport {
    pub hom_bound: usize,
    pub max_length: usize,
    pub graphs: usize,
    pub laws: MonadLawReport,
    pub pathlike: PredicateReport,
    pub distributive: PredicateReport,
    pub composite_pathlike: PredicateReport,
    pub composite_distributive: PredicateReport,
    pub passed: bool,
}

/// Sequence graphs with `1..=max_len` edges and homs of at most `bound`
/// elements per sort, plus two three-object graphs with a direct edge.
fn forward_graphs(sorts: &Sorts, bound: usize, max_len: usize) -> Result<Vec<VGraph>> {
    let mut out = family_tuples(sorts, bound, max_len)
        .iter()
        .map(|zs| VGraph::sequence(sorts, zs))
        .collect::<Result<Vec<_>>>()?;
    for n02 in 0..=1 {
        let sized = |n: usize| Family::of_sizes(sorts, &vec![n; sorts.len()]);
        let (h01, h12, h02) = (sized(bound)?, sized(1)?, sized(n02)?);
        out.push(VGraph::from_homs(3, sorts, |a, b| match (a, b) {
            (0, 1) => h01.clone(),
            (1, 2) => h12.clone(),
            (0, 2) => h02.clone(),
            _ => Family::empty(sorts),
        })?);
    }
    Ok(out)
}

/// Sample maps of sequence graphs for the naturality parts of the laws.
fn sample_maps(e: &CatTensor, bound: usize) -> Result<Vec<FamFn>> {
    let sorts = e.sorts();
    let a = Family::of_sizes(sorts, &vec![bound; sorts.len()])?;
    let b = Family::of_sizes(sorts, &vec![1; sorts.len()])?;
    let mut maps = Vec::new();
    for f in e.morphisms(&a, &a, 1 << 12)?.into_iter().take(6) {
        for h in e.morphisms(&a, &b, 1 << 12)? {
            maps.push(GraphMor::sequence(sorts, &[f.clone(), h])?.to_famfn()?);
        }
    }
    Ok(maps)
}

/// Monad laws, path-likeness and distributivity of `ΓE`, and the two
/// predicates for `ΓE ∘ ΓE`, on sequence graphs with at most `max_len`
/// edges and homs of at most `bound` elements. Distributivity splits a hom
/// into two summands whose sum stays within `bound`. The composite is
/// checked on graphs with at most `composite_len` edges. Both lengths are
/// capped at the arity bound, past which substitution is undefined.
pub fn gamma_suite(mc: &Multicat, bound: usize, max_len: usize, composite_len: usize) -> Result<GammaSuiteReport> {
    let max_len = max_len.min(mc.arity_bound());
    let composite_len = composite_len.min(mc.arity_bound());
    let e = CatTensor::new(mc)?;
    let sorts = e.sorts();
    let g = Gamma::new(&e);
    let graphs = forward_graphs(sorts, bound, max_len)?;
    let objs: Vec<Family> = graphs.iter().map(|x| x.family().clone()).collect();
    let laws = check_monad_laws(&g, &objs, &sample_maps(&e, bound)?)?;
    let pathlike = check_pathlike(&g, &graphs)?;
    let fams = families_up_to(sorts, bound);
    let within = |a: &Family, b: &Family| a.sizes().iter().zip(b.sizes()).all(|(x, y)| x + y <= bound);
    let pairs: Vec<(Family, Family)> = fams
        .iter()
        .flat_map(|a| fams.iter().filter(move |b| within(a, b)).map(move |b| (a.clone(), b.clone())))
        .collect();
    let seqs = family_tuples(sorts, bound, max_len);
    let distributive = check_distributive(&g, sorts, &seqs, &pairs)?;
    let gg = ComposeFunctor { outer: Gamma::new(&e), inner: Gamma::new(&e) };
    let composite_graphs = forward_graphs(sorts, bound, composite_len)?;
    let composite_pathlike = check_pathlike(&gg, &composite_graphs)?;
    let composite_distributive = check_distributive(&gg, sorts, &family_tuples(sorts, bound, composite_len), &pairs)?;
    let passed = laws.passed
        && pathlike.passed
        && distributive.passed
        && composite_pathlike.passed
        && composite_distributive.passed;
    Ok(GammaSuiteReport {
        hom_bound: bound,
        max_length: max_len,
        graphs: graphs.len(),
        laws,
        pathlike,
        distributive,
        composite_pathlike,
        composite_distributive,
        passed,
    })
}

//! Enriched categories for a multitensor: a graph together with composition
//! maps `κ: E_n(X(x_0,x_1), .., X(x_{n-1},x_n)) -> X(x_0, x_n)` for
//! `1 <= n <= arity bound`, satisfying the unit and associativity axioms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{compositions, split_blocks, Multitensor};
use crate::base::FamFn;
use crate::error::{MtkError, Result};

/// A graph whose homs are objects of the base of a multitensor.
#[derive(Clone, Debug, PartialEq)]
pub struct EGraph<O> {
    pub n_obj: usize,
    homs: Vec<O>,
}

impl<O: Clone> EGraph<O> {
    pub fn new(n_obj: usize, mut homs: impl FnMut(usize, usize) -> O) -> EGraph<O> {
        let mut v = Vec::with_capacity(n_obj * n_obj);
        for a in 0..n_obj {
            for b in 0..n_obj {
                v.push(homs(a, b));
            }
        }
        EGraph { n_obj, homs: v }
    }

    pub fn hom(&self, a: usize, b: usize) -> &O {
        &self.homs[a * self.n_obj + b]
    }

    fn edge_homs(&self, xs: &[usize]) -> Vec<O> {
        xs.windows(2).map(|w| self.hom(w[0], w[1]).clone()).collect()
    }
}

/// A graph with a composition map for every object sequence of length
/// `2..=A+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ECategory<O> {
    pub graph: EGraph<O>,
    pub kappa: BTreeMap<Vec<usize>, FamFn>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ECatReport {
    pub arity_bound: usize,
    pub unit_instances: usize,
    pub assoc_instances: usize,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Object sequences of the given length.
fn sequences(n_obj: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..n_obj).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// The associativity instances whose top composition map is `κ_xs`, each
/// returned as a violation message. `lookup` supplies κ for shorter
/// sequences and `top` the candidate for `xs` itself.
fn check_sequence<M: Multitensor>(
    e: &M,
    graph: &EGraph<M::Obj>,
    xs: &[usize],
    top: &FamFn,
    lookup: &dyn Fn(&[usize]) -> Option<FamFn>,
    counts: &mut (usize, usize),
) -> Result<Vec<String>> {
    let kappa = |s: &[usize]| -> Result<FamFn> {
        if s == xs {
            Ok(top.clone())
        } else {
            lookup(s).ok_or_else(|| MtkError::Config(format!("missing composition map for {s:?}")))
        }
    };
    let n = xs.len() - 1;
    let homs = graph.edge_homs(xs);
    let mut out = Vec::new();
    if n == 1 {
        counts.0 += 1;
        let lhs = e.unit(&homs[0])?.then(top)?;
        if lhs != FamFn::identity(e.carrier(&homs[0])) {
            out.push(format!("unit law fails for {xs:?}"));
        }
    }
    for blocks in compositions(n) {
        counts.1 += 1;
        let hom_blocks = split_blocks(&homs, &blocks);
        let mut ends = vec![xs[0]];
        let mut pos = 0;
        for &b in &blocks {
            pos += b;
            ends.push(xs[pos]);
        }
        let mut obj_blocks = Vec::new();
        let mut pos = 0;
        for &b in &blocks {
            obj_blocks.push(xs[pos..=pos + b].to_vec());
            pos += b;
        }
        let inner: Vec<M::Obj> = hom_blocks.iter().map(|h| e.eval(h)).collect::<Result<_>>()?;
        let composed: Vec<M::Obj> = ends.windows(2).map(|w| graph.hom(w[0], w[1]).clone()).collect();
        let ks = obj_blocks.iter().map(|s| kappa(s)).collect::<Result<Vec<_>>>()?;
        let lhs = e.fmap(&inner, &composed, &ks)?.then(&kappa(&ends)?)?;
        let rhs = e.subst(&hom_blocks)?.then(top)?;
        if lhs != rhs {
            out.push(format!("associativity fails for {xs:?} at blocks {blocks:?}"));
        }
    }
    Ok(out)
}

/// Exhaustive check of every axiom instance up to the arity bound.
pub fn ecat_check<M: Multitensor>(e: &M, cat: &ECategory<M::Obj>) -> Result<ECatReport> {
    let mut rep = ECatReport { arity_bound: e.arity_bound(), ..Default::default() };
    let mut counts = (0, 0);
    let lookup = |s: &[usize]| cat.kappa.get(s).cloned();
    for n in 1..=e.arity_bound() {
        for xs in sequences(cat.graph.n_obj, n + 1) {
            let top = cat.kappa.get(&xs).ok_or_else(|| MtkError::Config(format!("missing composition map for {xs:?}")))?;
            rep.violations.extend(check_sequence(e, &cat.graph, &xs, top, &lookup, &mut counts)?);
        }
    }
    rep.unit_instances = counts.0;
    rep.assoc_instances = counts.1;
    rep.passed = rep.violations.is_empty();
    Ok(rep)
}

/// Every E-category structure on `graph`, found arity by arity: at arity
/// `n` each object sequence is given every map that satisfies the axioms
/// whose top composition has arity `n`. Fails once more than `cap`
/// candidate maps or structures would be considered.
pub fn ecat_enumerate<M: Multitensor>(e: &M, graph: &EGraph<M::Obj>, cap: u128) -> Result<Vec<ECategory<M::Obj>>> {
    let mut partial: Vec<BTreeMap<Vec<usize>, FamFn>> = vec![BTreeMap::new()];
    for n in 1..=e.arity_bound() {
        let seqs = sequences(graph.n_obj, n + 1);
        let mut next = Vec::new();
        for kappa in &partial {
            let lookup = |s: &[usize]| kappa.get(s).cloned();
            let mut options: Vec<Vec<FamFn>> = Vec::with_capacity(seqs.len());
            for xs in &seqs {
                let homs = graph.edge_homs(xs);
                let dom = e.eval(&homs)?;
                let cod = graph.hom(xs[0], xs[n]).clone();
                let mut ok = Vec::new();
                for cand in e.morphisms(&dom, &cod, cap)? {
                    let mut counts = (0, 0);
                    if check_sequence(e, graph, xs, &cand, &lookup, &mut counts)?.is_empty() {
                        ok.push(cand);
                    }
                }
                options.push(ok);
            }
            let total: u128 = options.iter().map(|o| o.len() as u128).product();
            if total.saturating_mul(partial.len() as u128) > cap {
                return Err(MtkError::EnumerationBound(format!("more than {cap} partial structures at arity {n}")));
            }
            let mut idx = vec![0usize; seqs.len()];
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            loop {
                let mut k = kappa.clone();
                for (j, xs) in seqs.iter().enumerate() {
                    k.insert(xs.clone(), options[j][idx[j]].clone());
                }
                next.push(k);
                let mut p = seqs.len();
                let mut done = true;
                while p > 0 {
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < options[p].len() {
                        done = false;
                        break;
                    }
                    idx[p] = 0;
                }
                if done {
                    break;
                }
            }
        }
        partial = next;
    }
    Ok(partial.into_iter().map(|kappa| ECategory { graph: graph.clone(), kappa }).collect())
}

//! Coequalisers of algebras. The sequential construction builds
//! `Q_0 = B`, `q_0 = coeq(f, g)`, `v_0 = q_0 ∘ b`, then
//! `v_{n+1} = coeq(T(v_n), T(q_n) ∘ μ)`, `q_{n+1} = v_{n+1} ∘ η`, and stops
//! once two consecutive `q` maps are bijections. The oracle computes the
//! least congruence by repeated union-find.

use serde::{Deserialize, Serialize};

use super::{Algebra, AlgebraMap, Monad};
use crate::base::{chain_colimit, fam_coequalize, fam_descend, FamFn, Family, UnionFind};
use crate::error::{MtkError, Result};

/// Run policy: the step budget stands in for the accessibility rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeqConfig {
    pub budget: usize,
    /// Also run the oracle and require an isomorphism between the results.
    pub cross_check: bool,
    /// Further steps computed after stabilisation to confirm it persists.
    pub extra_steps: usize,
    /// Read the result off the first stage whenever the simple-case
    /// hypothesis holds.
    #[serde(default = "enabled")]
    pub fast_path: bool,
}

fn enabled() -> bool {
    true
}

impl Default for CoeqConfig {
    fn default() -> CoeqConfig {
        CoeqConfig { budget: 16, cross_check: false, extra_steps: 2, fast_path: true }
    }
}

impl CoeqConfig {
    pub fn with_budget(budget: usize) -> CoeqConfig {
        CoeqConfig { budget, ..CoeqConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 2 {
            return Err(MtkError::Config(format!("budget {} is below 2", self.budget)));
        }
        Ok(())
    }
}

/// Step `m`: `Q_m`, `q_m: Q_m -> Q_{m+1}`, `v_m: T Q_m -> Q_{m+1}` and
/// `q_{<m}: B -> Q_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeqStep {
    pub index: usize,
    pub obj: Family,
    pub q: FamFn,
    pub v: FamFn,
    pub q_lt: FamFn,
}

/// The truncated limit step taken when the budget runs out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitStep {
    pub colimit: Family,
    pub cocone: Vec<FamFn>,
    pub o1: FamFn,
    pub o2: FamFn,
    pub stabilised: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeqTrace {
    pub monad: String,
    pub budget: usize,
    pub steps: Vec<CoeqStep>,
    pub stabilised_at: Option<usize>,
    pub limit: Option<LimitStep>,
    pub extra_checked: usize,
    pub fast_path: bool,
}

#[derive(Clone, Debug)]
pub struct CoeqResult {
    pub algebra: Algebra,
    pub proj: FamFn,
    pub trace: CoeqTrace,
}

/// JSON form of a trace: sizes, stabilisation step and map tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceExport {
    pub monad: String,
    pub budget: usize,
    pub stabilised_at: Option<usize>,
    pub fast_path: bool,
    pub limit_step_used: bool,
    pub extra_checked: usize,
    pub steps: Vec<StepExport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepExport {
    pub index: usize,
    pub sizes: Vec<usize>,
    pub next_sizes: Vec<usize>,
    pub q_bijective: bool,
    pub q_table: Vec<Vec<usize>>,
    pub v_table: Vec<Vec<usize>>,
}

fn tables(f: &FamFn) -> Vec<Vec<usize>> {
    f.comps().iter().map(|c| c.table().to_vec()).collect()
}

impl CoeqTrace {
    pub fn export(&self) -> TraceExport {
        TraceExport {
            monad: self.monad.clone(),
            budget: self.budget,
            stabilised_at: self.stabilised_at,
            fast_path: self.fast_path,
            limit_step_used: self.limit.is_some(),
            extra_checked: self.extra_checked,
            steps: self
                .steps
                .iter()
                .map(|s| StepExport {
                    index: s.index,
                    sizes: s.obj.sizes(),
                    next_sizes: s.q.cod().sizes(),
                    q_bijective: s.q.is_bijection(),
                    q_table: tables(&s.q),
                    v_table: tables(&s.v),
                })
                .collect(),
        }
    }

    /// Verifies `q_{n+1} v_n = v_{n+1} T(q_n)`, `q_n = v_n η` and
    /// `q_{<n+1} = q_n q_{<n}` at every recorded step.
    pub fn check_equations<T: Monad + ?Sized>(&self, t: &T) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            if t.eta(&s.obj)?.then(&s.v)? != s.q {
                out.push(format!("q_{k} differs from v_{k} ∘ η"));
            }
            if let Some(next) = self.steps.get(k + 1) {
                if s.v.then(&next.q)? != t.fmap(&s.q)?.then(&next.v)? {
                    out.push(format!("q_{} ∘ v_{k} differs from v_{} ∘ T(q_{k})", k + 1, k + 1));
                }
                if s.q_lt.then(&s.q)? != next.q_lt {
                    out.push(format!("q_<{} differs from q_{k} ∘ q_<{k}", k + 1));
                }
            }
        }
        Ok(out)
    }
}

fn check_parallel(b: &Algebra, f: &FamFn, g: &FamFn) -> Result<()> {
    if f.dom() != g.dom() || f.cod() != g.cod() || *f.cod() != b.carrier {
        return Err(MtkError::Mismatch("maps are not a parallel pair into the algebra".into()));
    }
    Ok(())
}

/// The step following `prev`.
fn next_step<T: Monad + ?Sized>(t: &T, prev: &CoeqStep) -> Result<CoeqStep> {
    let q_next_obj = prev.q.cod().clone();
    let a1 = t.fmap(&prev.v)?;
    let a2 = t.mu(&prev.obj)?.then(&t.fmap(&prev.q)?)?;
    let (_, v) = fam_coequalize(&a1, &a2)?;
    let q = t.eta(&q_next_obj)?.then(&v)?;
    let q_lt = prev.q_lt.then(&prev.q)?;
    Ok(CoeqStep { index: prev.index + 1, obj: q_next_obj, q, v, q_lt })
}

fn finish(steps: &[CoeqStep], n: usize) -> Result<(Algebra, FamFn)> {
    let s = &steps[n];
    let action = s.v.then(&s.q.inverse()?)?;
    Ok((Algebra::unchecked(s.obj.clone(), action), s.q_lt.clone()))
}

/// The sequential construction of the coequaliser of `f, g: A ⇉ B` in
/// algebras, with the policy of `cfg`.
pub fn alg_coeq_sequential<T: Monad + ?Sized>(
    t: &T,
    b: &Algebra,
    f: &FamFn,
    g: &FamFn,
    cfg: &CoeqConfig,
) -> Result<CoeqResult> {
    cfg.validate()?;
    check_parallel(b, f, g)?;
    let (_, q0) = fam_coequalize(f, g)?;
    let v0 = b.action.then(&q0)?;
    let mut steps = vec![CoeqStep { index: 0, obj: b.carrier.clone(), q: q0, v: v0, q_lt: FamFn::identity(&b.carrier) }];
    let mut trace = CoeqTrace {
        monad: t.name(),
        budget: cfg.budget,
        steps: Vec::new(),
        stabilised_at: None,
        limit: None,
        extra_checked: 0,
        fast_path: false,
    };
    let mut found = None;
    while steps.len() <= cfg.budget {
        let next = next_step(t, steps.last().expect("non-empty"))?;
        steps.push(next);
        let n = steps.len() - 2;
        if steps[n].q.is_bijection() && steps[n + 1].q.is_bijection() {
            found = Some(n);
            break;
        }
    }
    if found.is_none() {
        // truncated limit step: the colimit of the finite chain is its last
        // object, the comparison maps are identities, then one more step
        let sorts = b.carrier.sorts().clone();
        let mut parts = Vec::new();
        let mut cocone_parts: Vec<Vec<crate::base::FinFn>> = vec![Vec::new(); steps.len()];
        for s in 0..sorts.len() {
            let sets: Vec<_> = steps.iter().map(|st| st.obj.part(s).clone()).collect();
            let maps: Vec<_> = steps[..steps.len() - 1].iter().map(|st| st.q.comp(s).clone()).collect();
            let (last, cocone) = chain_colimit(&sets, &maps)?;
            parts.push(last);
            for (k, c) in cocone.into_iter().enumerate() {
                cocone_parts[k].push(c);
            }
        }
        let colimit = Family::new(sorts, parts)?;
        let cocone = steps
            .iter()
            .zip(cocone_parts)
            .map(|(st, comps)| FamFn::new(st.obj.clone(), colimit.clone(), comps))
            .collect::<Result<Vec<_>>>()?;
        let tq = t.apply(&colimit)?;
        let next = next_step(t, steps.last().expect("non-empty"))?;
        steps.push(next);
        let n = steps.len() - 2;
        let stabilised = steps[n].q.is_bijection() && steps[n + 1].q.is_bijection();
        trace.limit = Some(LimitStep {
            colimit: colimit.clone(),
            cocone,
            o1: FamFn::identity(&tq),
            o2: FamFn::identity(&colimit),
            stabilised,
        });
        if !stabilised {
            trace.steps = steps;
            return Err(MtkError::NoStabilisation(cfg.budget));
        }
        found = Some(n);
    }
    let n = found.expect("stabilisation found");
    for _ in 0..cfg.extra_steps {
        let next = next_step(t, steps.last().expect("non-empty"))?;
        if !next.q.is_bijection() {
            return Err(MtkError::IllDefined(format!("stabilisation at {n} does not persist")));
        }
        steps.push(next);
        trace.extra_checked += 1;
    }
    let (algebra, proj) = finish(&steps, n)?;
    trace.stabilised_at = Some(n);
    trace.steps = steps;
    let result = CoeqResult { algebra, proj, trace };
    if cfg.cross_check {
        let (oa, op) = alg_coeq_oracle(t, b, f, g)?;
        comparison_iso(t, (&result.algebra, &result.proj), (&oa, &op))?;
    }
    Ok(result)
}

/// The least congruence on `B` containing `f(a) ~ g(a)` through which the
/// action descends, found by closing under
/// `T(p)(u) = T(p)(w) ⇒ b(u) ~ b(w)`.
pub fn alg_coeq_oracle<T: Monad + ?Sized>(t: &T, b: &Algebra, f: &FamFn, g: &FamFn) -> Result<(Algebra, FamFn)> {
    check_parallel(b, f, g)?;
    let sorts = b.carrier.sorts().clone();
    let mut ufs: Vec<UnionFind> = b.carrier.parts().iter().map(|p| UnionFind::new(p.len())).collect();
    for s in 0..sorts.len() {
        for (&x, &y) in f.comp(s).table().iter().zip(g.comp(s).table()) {
            ufs[s].union(x, y);
        }
    }
    let tb = t.apply(&b.carrier)?;
    loop {
        let (p, q) = quotient_of(&mut ufs, &b.carrier)?;
        let tp = t.fmap(&q)?;
        let mut changed = false;
        for s in 0..sorts.len() {
            let mut first: Vec<Option<usize>> = vec![None; tp.cod().part(s).len()];
            for u in 0..tb.part(s).len() {
                let w = tp.apply(s, u);
                let bu = b.action.apply(s, u);
                match first[w] {
                    None => first[w] = Some(bu),
                    Some(other) => changed |= ufs[s].union(other, bu),
                }
            }
        }
        if !changed {
            let action = fam_descend(&tp, &b.action.then(&q)?)?;
            return Ok((Algebra::unchecked(p, action), q));
        }
    }
}

fn quotient_of(ufs: &mut [UnionFind], x: &Family) -> Result<(Family, FamFn)> {
    let mut parts = Vec::new();
    let mut comps = Vec::new();
    for (s, uf) in ufs.iter_mut().enumerate() {
        let (qs, p) = uf.quotient(x.part(s));
        parts.push(qs);
        comps.push(p);
    }
    let q = Family::new(x.sorts().clone(), parts)?;
    Ok((q.clone(), FamFn::new(x.clone(), q, comps)?))
}

/// The unique map `h` with `h ∘ p1 = p2`, required to be a bijective
/// algebra map.
pub fn comparison_iso<T: Monad + ?Sized>(
    t: &T,
    first: (&Algebra, &FamFn),
    second: (&Algebra, &FamFn),
) -> Result<FamFn> {
    let h = fam_descend(first.1, second.1).map_err(|e| MtkError::IsoNotFound(e.to_string()))?;
    if !h.is_bijection() {
        return Err(MtkError::IsoNotFound("comparison map is not bijective".into()));
    }
    if !AlgebraMap::commutes(t, first.0, second.0, &h)? {
        return Err(MtkError::IsoNotFound("comparison map is not an algebra map".into()));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleHypothesis {
    pub t_preserves: bool,
    pub t2_preserves: bool,
    pub holds: bool,
}

/// Whether `T` and `T²` carry the coequaliser of `f, g` in the base to a
/// coequaliser: the comparison from `coeq(T^k f, T^k g)` to `T^k Q` must be
/// a bijection for `k = 1, 2`.
pub fn check_simple_hypothesis<T: Monad + ?Sized>(t: &T, f: &FamFn, g: &FamFn) -> Result<SimpleHypothesis> {
    let (_, q) = fam_coequalize(f, g)?;
    let preserved = |f: &FamFn, g: &FamFn, q: &FamFn| -> Result<bool> {
        let (_, c) = fam_coequalize(f, g)?;
        Ok(fam_descend(&c, q)?.is_bijection())
    };
    let (tf, tg, tq) = (t.fmap(f)?, t.fmap(g)?, t.fmap(&q)?);
    let t_preserves = preserved(&tf, &tg, &tq)?;
    let t2_preserves = preserved(&t.fmap(&tf)?, &t.fmap(&tg)?, &t.fmap(&tq)?)?;
    Ok(SimpleHypothesis { t_preserves, t2_preserves, holds: t_preserves && t2_preserves })
}

//! The explicit construction of `E'_n(X_1..X_n)` for a sequence of
//! `E_1`-algebras. Every contiguous subsequence ("span") is carried along,
//! because step `m + 1` on a span uses step `m` on all of its sub-spans.
//!
//! Step 0 on a span is the basic coequaliser `q^{(0)}` of `σ` and `E(x_i)`
//! out of `E(E_1 X_i)`, with `v^{(0)} = q^{(0)} ∘ σ` on the sum over
//! partitions. Step `m + 1` coequalises `E_k(v^{(m)})` against
//! `E(q^{(m)}) ∘ σ` out of the two-level partition sum, and
//! `q^{(m+1)} = v^{(m+1)} ∘ (single-block inclusion) ∘ u`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::base::{fam_coequalize, fam_coproduct, fam_descend, FamFn, Family, Label};
use crate::error::{MtkError, Result};
use crate::monad::{Algebra, CoeqConfig};
use crate::multitensor::{compositions, CatTensor};

/// A contiguous subsequence `[lo, hi)` of positions.
pub type Span = (usize, usize);

/// All spans of a sequence of length `n`, shortest first.
pub fn spans(n: usize) -> Vec<Span> {
    let mut out = Vec::new();
    for len in 1..=n {
        for lo in 0..=n - len {
            out.push((lo, lo + len));
        }
    }
    out
}

/// The blocks of a partition of `span` into consecutive parts of the given lengths.
pub fn blocks_of(span: Span, parts: &[usize]) -> Vec<Span> {
    let mut lo = span.0;
    parts
        .iter()
        .map(|&p| {
            let b = (lo, lo + p);
            lo += p;
            b
        })
        .collect()
}

/// Index of a partition among `compositions(n)`.
pub fn partition_index(parts: &[usize]) -> usize {
    let n = parts.iter().sum();
    compositions(n).iter().position(|c| c == parts).expect("parts form a composition")
}

fn sub_spans(span: Span) -> impl Iterator<Item = Span> {
    (span.0..span.1).flat_map(move |lo| (lo + 1..=span.1).map(move |hi| (lo, hi)))
}

fn untag(l: &Label) -> Result<(usize, &Label)> {
    match l {
        Label::Tag(i, inner) => Ok((*i, inner)),
        _ => Err(MtkError::UnknownLabel(l.to_string())),
    }
}

/// Step `m` on one span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanStep {
    /// `E^{(m)}`.
    pub obj: Family,
    /// `⊔_P E_k(E^{(m)}(B_1), .., E^{(m)}(B_k))` over the partitions `P` of
    /// the span, the `i`-th summand belonging to `compositions(len)[i]`.
    pub sum: Family,
    /// The pair coequalised at this step: `(σ, E(x_i))` into `E^{(0)}` at
    /// step 0, `(E_k(v^{(m-1)}), E(q^{(m-1)}) ∘ σ)` into `sum` afterwards.
    pub pair: (FamFn, FamFn),
    /// `v^{(m)}: sum -> E^{(m+1)}`.
    pub v: FamFn,
    /// `q^{(m)}: E^{(m)} -> E^{(m+1)}`.
    pub q: FamFn,
    /// `q^{(<m)}: E(X_i) -> E^{(m)}`.
    pub q_lt: FamFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftStep {
    pub index: usize,
    pub spans: BTreeMap<Span, SpanStep>,
}

/// The data of the explicit construction on one sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftTrace {
    pub algebras: Vec<Algebra>,
    pub budget: usize,
    pub steps: Vec<LiftStep>,
    /// The common section `E(u_{X_i})` of the basic pair, per span.
    pub sections: BTreeMap<Span, FamFn>,
    /// Whether `E` preserves the basic coequalisers of the span and of all
    /// its sub-spans.
    pub preserves: BTreeMap<Span, bool>,
    /// First step `n` at which `q^{(n)}` and `q^{(n+1)}` are bijections on
    /// the span and all its sub-spans, once known.
    pub stabilised: BTreeMap<Span, usize>,
    /// Whether spans that preserve their basic coequalisers are read off at
    /// step 1 by the first-stage formula.
    pub fast_path: bool,
    pub extra_checked: usize,
}

/// The basic coequaliser of a sequence of `E_1`-algebras.
#[derive(Clone, Debug)]
pub struct BasicCoequaliser {
    pub object: Family,
    pub q0: FamFn,
    pub sigma: FamFn,
    pub actions: FamFn,
    pub section: FamFn,
}

fn check_sequence(e: &CatTensor, algs: &[Algebra]) -> Result<()> {
    if algs.is_empty() {
        return Err(MtkError::Mismatch("lifting needs a non-empty sequence".into()));
    }
    if algs.len() > e.multicat().arity_bound() {
        return Err(MtkError::ArityExceeded { got: algs.len(), bound: e.multicat().arity_bound() });
    }
    let t = e.unary_part();
    for (i, a) in algs.iter().enumerate() {
        let problems = a.check(&t)?;
        if !problems.is_empty() {
            return Err(MtkError::IllDefined(format!("entry {i} is not an E1-algebra: {}", problems.join("; "))));
        }
    }
    Ok(())
}

/// `(coeq(σ, E(x_i)), q^{(0)})` with the common section `E(u_{X_i})` checked.
pub fn basic_coequaliser(e: &CatTensor, algs: &[Algebra]) -> Result<BasicCoequaliser> {
    check_sequence(e, algs)?;
    basic_unchecked(e, algs)
}

fn basic_unchecked(e: &CatTensor, algs: &[Algebra]) -> Result<BasicCoequaliser> {
    let carriers: Vec<Family> = algs.iter().map(|a| a.carrier.clone()).collect();
    let singles: Vec<Vec<Family>> = carriers.iter().map(|c| vec![c.clone()]).collect();
    let sigma = e.subst_fam(&singles)?;
    let acts: Vec<FamFn> = algs.iter().map(|a| a.action.clone()).collect();
    let actions = e.fmap_fam(&acts)?;
    let units = carriers.iter().map(|c| e.unit_fam(c)).collect::<Result<Vec<_>>>()?;
    let section = e.fmap_fam(&units)?;
    let id = FamFn::identity(sigma.cod());
    if section.then(&sigma)? != id || section.then(&actions)? != id {
        return Err(MtkError::IllDefined("E(u) is not a common section of the basic pair".into()));
    }
    let (object, q0) = fam_coequalize(&sigma, &actions)?;
    Ok(BasicCoequaliser { object, q0, sigma, actions, section })
}

/// The sum over partitions of `span` of `E_k` applied to `objs` at the blocks.
fn partition_sum(e: &CatTensor, objs: &BTreeMap<Span, Family>, span: Span) -> Result<Family> {
    let parts = compositions(span.1 - span.0)
        .iter()
        .map(|p| {
            let args: Vec<Family> = blocks_of(span, p).iter().map(|b| objs[b].clone()).collect();
            e.eval_fam(&args)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fam_coproduct(e.sorts(), &parts)?.0)
}

/// `x ↦ (single block, (id, [x]))`, the inclusion `E^{(m)} -> E_1 E^{(m)} -> sum`.
fn unit_inclusion(e: &CatTensor, obj: &Family, sum: &Family, len: usize) -> Result<FamFn> {
    let single = partition_index(&[len]);
    FamFn::from_labels(obj, sum, |c, l| Ok(Label::tag(single, e.element(e.multicat().identity(c), vec![l.clone()]))))
}

impl LiftTrace {
    /// Runs step 0 on every span and records which spans preserve their
    /// basic coequalisers.
    pub fn start(e: &CatTensor, algs: &[Algebra], cfg: &CoeqConfig) -> Result<LiftTrace> {
        cfg.validate()?;
        check_sequence(e, algs)?;
        let n = algs.len();
        let mut basics = BTreeMap::new();
        let mut objs = BTreeMap::new();
        for span in spans(n) {
            let b = basic_unchecked(e, &algs[span.0..span.1])?;
            objs.insert(span, b.sigma.cod().clone());
            basics.insert(span, b);
        }
        let mut step = LiftStep { index: 0, spans: BTreeMap::new() };
        let mut sections = BTreeMap::new();
        for span in spans(n) {
            let b = &basics[&span];
            let sum = partition_sum(e, &objs, span)?;
            // v^{(0)} = q^{(0)} ∘ σ on every summand
            let v = FamFn::from_labels(&sum, b.q0.cod(), |c, l| {
                let (_, inner) = untag(l)?;
                let flat = e.subst_label(inner)?;
                b.q0.apply_label(c, &flat).cloned().ok_or_else(|| MtkError::UnknownLabel(flat.to_string()))
            })?;
            let obj = objs[&span].clone();
            step.spans.insert(
                span,
                SpanStep {
                    q_lt: FamFn::identity(&obj),
                    obj,
                    sum,
                    pair: (b.sigma.clone(), b.actions.clone()),
                    v,
                    q: b.q0.clone(),
                },
            );
            sections.insert(span, b.section.clone());
        }
        let mut local = BTreeMap::new();
        for span in spans(n) {
            local.insert(span, preserves_locally(e, &step, span)?);
        }
        let preserves = spans(n).into_iter().map(|s| (s, sub_spans(s).all(|t| local[&t]))).collect();
        Ok(LiftTrace {
            algebras: algs.to_vec(),
            budget: cfg.budget,
            steps: vec![step],
            sections,
            preserves,
            stabilised: BTreeMap::new(),
            fast_path: cfg.fast_path,
            extra_checked: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.algebras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty()
    }

    pub fn full(&self) -> Span {
        (0, self.len())
    }

    pub fn step(&self, m: usize, span: Span) -> &SpanStep {
        &self.steps[m].spans[&span]
    }

    /// Computes step `m + 1` from step `m` on every span.
    fn push_step(&mut self, e: &CatTensor) -> Result<()> {
        let m = self.steps.len() - 1;
        if m + 1 > self.budget {
            return Err(MtkError::NoStabilisation(self.budget));
        }
        let prev = &self.steps[m];
        let next_objs: BTreeMap<Span, Family> = prev.spans.iter().map(|(s, st)| (*s, st.q.cod().clone())).collect();
        let prev_sums: BTreeMap<Span, Family> = prev.spans.iter().map(|(s, st)| (*s, st.sum.clone())).collect();
        let mut step = LiftStep { index: m + 1, spans: BTreeMap::new() };
        for span in spans(self.len()) {
            let len = span.1 - span.0;
            let sum = partition_sum(e, &next_objs, span)?;
            let dom2 = partition_sum(e, &prev_sums, span)?;
            let parts = compositions(len);
            // E_k(v^{(m)}) summand by summand
            let first = FamFn::from_labels(&dom2, &sum, |_, l| {
                let (p, inner) = untag(l)?;
                let (op, ys) = e.parse(inner)?;
                let src = &e.multicat().op(op).src;
                let blocks = blocks_of(span, &parts[p]);
                let zs = ys
                    .iter()
                    .enumerate()
                    .map(|(j, y)| {
                        prev.spans[&blocks[j]].v.apply_label(src[j], y).cloned().ok_or_else(|| MtkError::UnknownLabel(y.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Label::tag(p, e.element(op, zs)))
            })?;
            // E(q^{(m)}) ∘ σ: flatten the two levels, then move every
            // argument along q^{(m)} of its fine block
            let second = FamFn::from_labels(&dom2, &sum, |_, l| {
                let (p, inner) = untag(l)?;
                let (op, ys) = e.parse(inner)?;
                let blocks = blocks_of(span, &parts[p]);
                let mut stripped = Vec::with_capacity(ys.len());
                let mut fine = Vec::new();
                for (j, y) in ys.iter().enumerate() {
                    let (pj, el) = untag(y)?;
                    let bl = blocks[j].1 - blocks[j].0;
                    fine.extend(compositions(bl)[pj].iter().copied());
                    stripped.push(el.clone());
                }
                let flat = e.subst_label(&e.element(op, stripped))?;
                let (r, zs) = e.parse(&flat)?;
                let src = &e.multicat().op(r).src;
                let fine_blocks = blocks_of(span, &fine);
                let moved = zs
                    .iter()
                    .enumerate()
                    .map(|(i, z)| {
                        prev.spans[&fine_blocks[i]].q.apply_label(src[i], z).cloned().ok_or_else(|| MtkError::UnknownLabel(z.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Label::tag(partition_index(&fine), e.element(r, moved)))
            })?;
            let (_, v) = fam_coequalize(&first, &second)?;
            let obj = next_objs[&span].clone();
            let q = unit_inclusion(e, &obj, &sum, len)?.then(&v)?;
            let q_lt = prev.spans[&span].q_lt.then(&prev.spans[&span].q)?;
            step.spans.insert(span, SpanStep { obj, sum, pair: (first, second), v, q, q_lt });
        }
        self.steps.push(step);
        Ok(())
    }

    /// Makes sure steps `0..=m` exist.
    pub fn extend_to(&mut self, e: &CatTensor, m: usize) -> Result<()> {
        while self.steps.len() <= m {
            self.push_step(e)?;
        }
        Ok(())
    }

    fn bijective_through(&self, span: Span, n: usize) -> bool {
        sub_spans(span).all(|s| self.step(n, s).q.is_bijection() && self.step(n + 1, s).q.is_bijection())
    }

    /// Runs the sequential construction until the full span stabilises,
    /// then confirms stabilisation for `extra` further steps.
    pub fn run_to_stabilisation(&mut self, e: &CatTensor, extra: usize) -> Result<usize> {
        let full = self.full();
        let mut n = 0;
        loop {
            self.extend_to(e, n + 1)?;
            if self.bijective_through(full, n) {
                break;
            }
            n += 1;
        }
        for s in spans(self.len()) {
            let first = (0..=n).find(|&k| self.bijective_through(s, k)).expect("full span has stabilised");
            self.stabilised.insert(s, first);
        }
        self.extend_to(e, n + 1 + extra)?;
        for k in n + 2..=n + 1 + extra {
            if spans(self.len()).iter().any(|&s| !self.step(k, s).q.is_bijection()) {
                return Err(MtkError::IllDefined(format!("q^({k}) is not bijective after stabilisation at {n}")));
            }
        }
        self.extra_checked = extra;
        Ok(n)
    }

    /// Whether the span is read off by the first-stage formula.
    pub fn uses_fast_path(&self, span: Span) -> bool {
        self.fast_path && self.preserves[&span]
    }

    /// The step at which `E'` of the span is read off.
    pub fn stage(&self, span: Span) -> Result<usize> {
        if self.uses_fast_path(span) {
            return Ok(1);
        }
        self.stabilised
            .get(&span)
            .copied()
            .ok_or_else(|| MtkError::Config(format!("span {span:?} has not been run to stabilisation")))
    }

    /// Makes every step needed to read off the full span available.
    pub fn prepare(&mut self, e: &CatTensor, extra: usize) -> Result<usize> {
        let full = self.full();
        if !self.uses_fast_path(full) || spans(self.len()).iter().any(|&s| !self.uses_fast_path(s)) {
            self.run_to_stabilisation(e, extra)?;
        }
        self.stage(full)
    }

    /// The action `E_1 E^{(m)} -> E^{(m)}` given by `(q^{(m)})^{-1} ∘ v^{(m)}`
    /// on the single-block summand.
    pub fn sequential_action(&self, e: &CatTensor, span: Span, m: usize) -> Result<FamFn> {
        let st = self.step(m, span);
        let single = partition_index(&[span.1 - span.0]);
        let e1 = e.eval_fam(std::slice::from_ref(&st.obj))?;
        let inj = FamFn::from_labels(&e1, &st.sum, |_, l| Ok(Label::tag(single, l.clone())))?;
        inj.then(&st.v)?.then(&st.q.inverse().map_err(|_| {
            MtkError::IllDefined(format!("q^({m}) is not invertible on span {span:?}"))
        })?)
    }

    /// The action `a` on `E^{(1)}` with `a ∘ E_1(q^{(0)}) = q^{(0)} ∘ σ`.
    pub fn first_stage_action(&self, e: &CatTensor, span: Span) -> Result<FamFn> {
        let st = self.step(0, span);
        let carriers: Vec<Family> = self.algebras[span.0..span.1].iter().map(|a| a.carrier.clone()).collect();
        let sigma = e.subst_fam(&[carriers])?;
        let e1q = e.fmap_fam(std::slice::from_ref(&st.q))?;
        fam_descend(&e1q, &sigma.then(&st.q)?)
    }

    /// `E'` of the span as an algebra, with the projection from `E(X_i)`.
    pub fn lifted(&self, e: &CatTensor, span: Span) -> Result<(Algebra, FamFn)> {
        if self.uses_fast_path(span) {
            let q0 = &self.step(0, span).q;
            let action = self.first_stage_action(e, span)?;
            return Ok((Algebra::unchecked(q0.cod().clone(), action), q0.clone()));
        }
        let m = self.stage(span)?;
        let st = self.step(m, span);
        let action = self.sequential_action(e, span, m)?;
        Ok((Algebra::unchecked(st.obj.clone(), action), st.q_lt.clone()))
    }

    /// `E^{(m)}` of the span, available once step `m - 1` is.
    pub fn obj_at(&self, m: usize, span: Span) -> &Family {
        if m < self.steps.len() {
            &self.step(m, span).obj
        } else {
            self.step(m - 1, span).q.cod()
        }
    }

    /// The bijection from the carrier used for `E'` of the span to
    /// `E^{(m)}` of the span. Length-one spans use `X` itself, reached
    /// through the unit `X -> E_1 X = E^{(0)}`.
    pub fn transport(&self, e: &CatTensor, span: Span, m: usize) -> Result<FamFn> {
        let (start, mut f) = if span.1 - span.0 == 1 {
            (0, e.unit_fam(&self.algebras[span.0].carrier)?)
        } else {
            let s = self.stage(span)?;
            (s, FamFn::identity(self.obj_at(s, span)))
        };
        if m >= start {
            for r in start..m {
                f = f.then(&self.step(r, span).q)?;
            }
        } else {
            for r in (m..start).rev() {
                f = f.then(&self.step(r, span).q.inverse()?)?;
            }
        }
        if !f.is_bijection() {
            return Err(MtkError::IllDefined(format!("span {span:?} has not stabilised by step {m}")));
        }
        Ok(f)
    }

    /// Checks the defining equations of every recorded step.
    pub fn check_equations(&self, e: &CatTensor) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for step in &self.steps {
            let m = step.index;
            for (&span, st) in &step.spans {
                let coeq = if m == 0 { &st.q } else { &st.v };
                if st.pair.0.then(coeq)? != st.pair.1.then(coeq)? {
                    out.push(format!("step {m} span {span:?}: the pair is not coequalised"));
                }
                let len = span.1 - span.0;
                let incl = unit_inclusion(e, &st.obj, &st.sum, len)?;
                if incl.then(&st.v)? != st.q {
                    out.push(format!("step {m} span {span:?}: q is not v on the unit inclusion"));
                }
                if m > 0 {
                    let prev = self.step(m - 1, span);
                    if prev.q_lt.then(&prev.q)? != st.q_lt {
                        out.push(format!("step {m} span {span:?}: q^(<m) is not the composite of earlier q"));
                    }
                }
            }
        }
        for (span, section) in &self.sections {
            let st = self.step(0, *span);
            let id = FamFn::identity(&st.obj);
            if section.then(&st.pair.0)? != id || section.then(&st.pair.1)? != id {
                out.push(format!("span {span:?}: E(u) is not a common section"));
            }
        }
        Ok(out)
    }

    pub fn export(&self) -> LiftTraceExport {
        let full = self.full();
        LiftTraceExport {
            length: self.len(),
            budget: self.budget,
            fast_path: self.uses_fast_path(full),
            preserves_basic: self.preserves[&full],
            stage: self.stage(full).ok(),
            stabilised_at: self.stabilised.get(&full).copied(),
            extra_checked: self.extra_checked,
            partitions: compositions(self.len()),
            steps: self
                .steps
                .iter()
                .map(|s| {
                    let st = &s.spans[&full];
                    LiftStepExport {
                        index: s.index,
                        sizes: st.obj.sizes(),
                        sum_sizes: st.sum.sizes(),
                        next_sizes: st.q.cod().sizes(),
                        q_bijective: st.q.is_bijection(),
                        all_spans_bijective: s.spans.values().all(|x| x.q.is_bijection()),
                    }
                })
                .collect(),
        }
    }
}

/// Per-variable test: for every partition of the span and every block `j`,
/// `E_k` with `E^{(1)}` of the other blocks fixed must carry the basic
/// coequaliser of block `j` to a coequaliser.
fn preserves_locally(e: &CatTensor, step0: &LiftStep, span: Span) -> Result<bool> {
    for parts in compositions(span.1 - span.0) {
        let blocks = blocks_of(span, &parts);
        for j in 0..blocks.len() {
            let with = |f: &FamFn| -> Vec<FamFn> {
                blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| if i == j { f.clone() } else { FamFn::identity(step0.spans[b].q.cod()) })
                    .collect()
            };
            let st = &step0.spans[&blocks[j]];
            let a = e.fmap_fam(&with(&st.pair.0))?;
            let b = e.fmap_fam(&with(&st.pair.1))?;
            let q = e.fmap_fam(&with(&st.q))?;
            let (_, c) = fam_coequalize(&a, &b)?;
            if !fam_descend(&c, &q)?.is_bijection() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `E` preserves the basic coequalisers of every subsequence.
pub fn check_preserves_basic_coeq(e: &CatTensor, algs: &[Algebra]) -> Result<bool> {
    let trace = LiftTrace::start(e, algs, &CoeqConfig::default())?;
    Ok(trace.preserves[&trace.full()])
}

/// `E'_n(X_i)` by the explicit route.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub algebra: Algebra,
    /// The projection `E_n(X_i) -> E'_n(X_i)`.
    pub proj: FamFn,
    pub stage: usize,
    pub trace: LiftTrace,
}

pub fn lift_object(e: &CatTensor, algs: &[Algebra], cfg: &CoeqConfig) -> Result<LiftResult> {
    let mut trace = LiftTrace::start(e, algs, cfg)?;
    let stage = trace.prepare(e, cfg.extra_steps)?;
    let (algebra, proj) = trace.lifted(e, trace.full())?;
    Ok(LiftResult { algebra, proj, stage, trace })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTraceExport {
    pub length: usize,
    pub budget: usize,
    pub fast_path: bool,
    pub preserves_basic: bool,
    pub stage: Option<usize>,
    pub stabilised_at: Option<usize>,
    pub extra_checked: usize,
    /// Partition index table: entry `i` is the block lengths of summand `i`.
    pub partitions: Vec<Vec<usize>>,
    pub steps: Vec<LiftStepExport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftStepExport {
    pub index: usize,
    pub sizes: Vec<usize>,
    pub sum_sizes: Vec<usize>,
    pub next_sizes: Vec<usize>,
    pub q_bijective: bool,
    pub all_spans_bijective: bool,
}

//! The lifted functor operad `E'` on `E_1`-algebras, packaged as a
//! multitensor with identity unit.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::trace::{blocks_of, partition_index, spans, LiftTrace, Span};
use crate::base::{fam_descend, FamFn, Family, Label};
use crate::error::{MtkError, Result};
use crate::monad::{Algebra, AlgebraMap, CoeqConfig};
use crate::multitensor::{all_fam_maps, compositions, CatTensor, Multitensor, UnaryPart};

/// `E'` for a multitensor built from a multicategory. `E'_1` is the
/// identity; higher arities are computed by the explicit construction and
/// memoised per sequence.
pub struct LiftedMultitensor {
    e: CatTensor,
    unary: UnaryPart,
    cfg: CoeqConfig,
    traces: RefCell<HashMap<Vec<Algebra>, Rc<LiftTrace>>>,
}

pub fn lift_multitensor(e: &CatTensor, cfg: &CoeqConfig) -> Result<LiftedMultitensor> {
    cfg.validate()?;
    Ok(LiftedMultitensor { e: e.clone(), unary: e.unary_part(), cfg: cfg.clone(), traces: RefCell::new(HashMap::new()) })
}

/// `σ'` at a nested sequence together with the stages `σ^{(1)}, σ^{(2)}, ..`
/// at the full outer sequence.
#[derive(Clone, Debug)]
pub struct SubstResult {
    pub map: FamFn,
    pub stages: Vec<FamFn>,
}

/// Copairing out of a partition sum: summand `i` is sent by `fs[i]`.
fn copair(sum: &Family, fs: &[FamFn], cod: &Family) -> Result<FamFn> {
    FamFn::from_labels(sum, cod, |c, l| match l {
        Label::Tag(i, inner) => {
            fs[*i].apply_label(c, inner).cloned().ok_or_else(|| MtkError::UnknownLabel(inner.to_string()))
        }
        _ => Err(MtkError::UnknownLabel(l.to_string())),
    })
}

impl LiftedMultitensor {
    pub fn base(&self) -> &CatTensor {
        &self.e
    }

    pub fn unary(&self) -> &UnaryPart {
        &self.unary
    }

    pub fn config(&self) -> &CoeqConfig {
        &self.cfg
    }

    /// The trace of a sequence, with steps `0..=through` available.
    pub fn trace(&self, algs: &[Algebra], through: usize) -> Result<Rc<LiftTrace>> {
        let key = algs.to_vec();
        let cached = self.traces.borrow().get(&key).cloned();
        let mut t = match cached {
            Some(t) if t.steps.len() > through => return Ok(t),
            Some(t) => (*t).clone(),
            None => {
                let mut t = LiftTrace::start(&self.e, algs, &self.cfg)?;
                t.prepare(&self.e, self.cfg.extra_steps)?;
                t
            }
        };
        t.extend_to(&self.e, through)?;
        let t = Rc::new(t);
        self.traces.borrow_mut().insert(key, t.clone());
        Ok(t)
    }

    /// `E'_n(xs)` with its projection from `E_n` of the carriers.
    pub fn lifted(&self, xs: &[Algebra]) -> Result<(Algebra, FamFn)> {
        if xs.len() == 1 {
            return Ok((xs[0].clone(), xs[0].action.clone()));
        }
        let t = self.trace(xs, 0)?;
        t.lifted(&self.e, t.full())
    }

    /// `(q^{(m)})^{-1} ∘ v^{(m)}` on the summand of the partition into
    /// `blocks` of the span `r`, precomposed with `E_l` of the transports from
    /// the lifted carriers of the blocks and followed by the transport back
    /// to the lifted carrier of `r`.
    fn collapse(&self, tx: &LiftTrace, r: Span, blocks: &[Span]) -> Result<FamFn> {
        let e = &self.e;
        let m = tx.stage(r)?;
        let ts = blocks.iter().map(|&b| tx.transport(e, b, m)).collect::<Result<Vec<_>>>()?;
        let into = e.fmap_fam(&ts)?;
        let st = tx.step(m, r);
        let lens: Vec<usize> = blocks.iter().map(|b| b.1 - b.0).collect();
        let p = partition_index(&lens);
        let inj = FamFn::from_labels(into.cod(), &st.sum, |_, l| Ok(Label::tag(p, l.clone())))?;
        let q_inv = st.q.inverse().map_err(|_| MtkError::IllDefined(format!("q^({m}) is not invertible on {r:?}")))?;
        let back = tx.transport(e, r, m)?.inverse()?;
        into.then(&inj)?.then(&st.v)?.then(&q_inv)?.then(&back)
    }

    /// `σ'` by the recursion `σ^{(1)} q^{(0)} = (q^{(m)})^{-1} v^{(m)}` and
    /// `σ^{(r+2)} v^{(r+1)} = (q^{(m)})^{-1} v^{(m)} E(σ^{(r+1)})`.
    pub fn substitution(&self, xss: &[Vec<Algebra>]) -> Result<SubstResult> {
        let e = &self.e;
        if xss.is_empty() || xss.iter().any(|b| b.is_empty()) {
            return Err(MtkError::Mismatch("substitution needs non-empty blocks".into()));
        }
        let flat: Vec<Algebra> = xss.concat();
        let bound = e.multicat().arity_bound();
        if flat.len() > bound {
            return Err(MtkError::ArityExceeded { got: flat.len(), bound });
        }
        let ys: Vec<Algebra> = xss.iter().map(|b| self.eval(b)).collect::<Result<_>>()?;
        if xss.len() == 1 {
            return Ok(SubstResult { map: FamFn::identity(&ys[0].carrier), stages: Vec::new() });
        }
        let k = ys.len();
        let mut offsets = vec![0];
        for b in xss {
            offsets.push(offsets.last().expect("non-empty") + b.len());
        }
        let x_span = |a: usize, b: usize| (offsets[a], offsets[b]);

        let tx0 = self.trace(&flat, 0)?;
        let mut m_max = 1;
        for s in spans(flat.len()) {
            m_max = m_max.max(tx0.stage(s)?);
        }
        let tx = self.trace(&flat, m_max)?;
        let ty0 = self.trace(&ys, 0)?;
        let s_y = ty0.stage(ty0.full())?;
        let ty = self.trace(&ys, s_y.max(1))?;

        // σ^{(1)} on every outer span
        let mut level: BTreeMap<Span, FamFn> = BTreeMap::new();
        for (a, b) in spans(k) {
            let blocks: Vec<Span> = (a..b).map(|i| x_span(i, i + 1)).collect();
            let rhs = self.collapse(&tx, x_span(a, b), &blocks)?;
            level.insert((a, b), fam_descend(&ty.step(0, (a, b)).q, &rhs)?);
        }
        let mut stages = vec![level[&(0, k)].clone()];
        for r in 0..s_y.saturating_sub(1) {
            let mut next = BTreeMap::new();
            for (a, b) in spans(k) {
                let st = ty.step(r + 1, (a, b));
                let summands = compositions(b - a)
                    .iter()
                    .map(|groups| {
                        let outer = blocks_of((a, b), groups);
                        let lower = outer.iter().map(|g| level[g].clone()).collect::<Vec<_>>();
                        let xs: Vec<Span> = outer.iter().map(|g| x_span(g.0, g.1)).collect();
                        e.fmap_fam(&lower)?.then(&self.collapse(&tx, x_span(a, b), &xs)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let cod = summands[0].cod().clone();
                let rhs = copair(&st.sum, &summands, &cod)?;
                next.insert((a, b), fam_descend(&st.v, &rhs)?);
            }
            level = next;
            stages.push(level[&(0, k)].clone());
        }
        let top = stages.last().expect("at least one stage").clone();
        let map = if s_y == 0 && !ty.uses_fast_path(ty.full()) { ty.step(0, ty.full()).q.then(&top)? } else { top };
        Ok(SubstResult { map, stages })
    }
}

impl Multitensor for LiftedMultitensor {
    type Obj = Algebra;

    fn name(&self) -> String {
        format!("{}'", self.e.name())
    }

    fn arity_bound(&self) -> usize {
        self.e.multicat().arity_bound()
    }

    fn carrier<'a>(&self, x: &'a Algebra) -> &'a Family {
        &x.carrier
    }

    fn eval(&self, xs: &[Algebra]) -> Result<Algebra> {
        Ok(self.lifted(xs)?.0)
    }

    fn fmap(&self, xs: &[Algebra], ys: &[Algebra], fs: &[FamFn]) -> Result<FamFn> {
        if xs.len() == 1 {
            return Ok(fs[0].clone());
        }
        let (_, px) = self.lifted(xs)?;
        let (_, py) = self.lifted(ys)?;
        fam_descend(&px, &self.e.fmap_fam(fs)?.then(&py)?)
    }

    fn unit(&self, x: &Algebra) -> Result<FamFn> {
        Ok(FamFn::identity(&x.carrier))
    }

    fn subst(&self, xss: &[Vec<Algebra>]) -> Result<FamFn> {
        Ok(self.substitution(xss)?.map)
    }

    fn morphisms(&self, a: &Algebra, b: &Algebra, cap: u128) -> Result<Vec<FamFn>> {
        let mut out = Vec::new();
        for f in all_fam_maps(&a.carrier, &b.carrier, cap)? {
            if AlgebraMap::commutes(&self.unary, a, b, &f)? {
                out.push(f);
            }
        }
        Ok(out)
    }
}

/// `σ'` at a nested sequence of `E_1`-algebras.
pub fn lift_substitution(e: &CatTensor, xss: &[Vec<Algebra>], cfg: &CoeqConfig) -> Result<SubstResult> {
    lift_multitensor(e, cfg)?.substitution(xss)
}

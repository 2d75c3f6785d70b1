//! Restriction `φ^*` and its left adjoint `φ_!` along a monad morphism
//! `φ: M -> S`, and the monad `φ^* φ_!` on `M`-algebras.

use super::coeq::{alg_coeq_sequential, check_simple_hypothesis, CoeqConfig, CoeqStep, CoeqTrace, SimpleHypothesis};
use super::{Algebra, MonadLawReport, MonadMorphism};
use crate::base::{fam_coequalize, fam_descend, FamFn};
use crate::error::{MtkError, Result};

/// `φ^*(X, x) = (X, x ∘ φ_X)`.
pub fn phi_star<P: MonadMorphism + ?Sized>(phi: &P, alg: &Algebra) -> Result<Algebra> {
    let c = phi.component(&alg.carrier)?;
    Ok(Algebra::unchecked(alg.carrier.clone(), c.then(&alg.action)?))
}

/// `φ_!(X, x)` together with the data of its construction.
#[derive(Clone, Debug)]
pub struct ShriekResult {
    /// The `S`-algebra `(Q_n, a)`.
    pub algebra: Algebra,
    /// The projection `S X -> Q_n`.
    pub proj: FamFn,
    /// The unit `X -> Q_n` of the adjunction, from the recursion on `η^{(m)}`.
    pub unit: FamFn,
    /// The stage `n` at which the result is read off.
    pub stage: usize,
    /// `q_0 .. q_{n-1}` and `v_0 .. v_{n-1}` of the construction.
    pub qs: Vec<FamFn>,
    pub vs: Vec<FamFn>,
    pub fast_path: bool,
    pub reflexive: bool,
    pub hypothesis: SimpleHypothesis,
    pub trace: CoeqTrace,
}

/// Computes `φ_!(X, x)` as the coequaliser of `μ^S_X ∘ S(φ_X)` and `S(x)`
/// in `S`-algebras. The common section `S(η^M_X)` is checked. When `S` and
/// `S²` preserve the underlying coequaliser and the fast path is enabled,
/// the first stage is used directly; otherwise the sequential construction runs.
pub fn phi_shriek<P: MonadMorphism + ?Sized>(phi: &P, alg: &Algebra, cfg: &CoeqConfig) -> Result<ShriekResult> {
    let (m, s) = (phi.source(), phi.target());
    let x = &alg.carrier;
    let phix = phi.component(x)?;
    let mu_x = s.mu(x)?;
    let f = s.fmap(&phix)?.then(&mu_x)?;
    let g = s.fmap(&alg.action)?;
    let section = s.fmap(&m.eta(x)?)?;
    let id = FamFn::identity(f.cod());
    let reflexive = section.then(&f)? == id && section.then(&g)? == id;
    if !reflexive {
        return Err(MtkError::IllDefined("the pair has no common section S(η^M)".into()));
    }
    let hypothesis = check_simple_hypothesis(s, &f, &g)?;
    let (algebra, proj, qs, vs, trace, fast_path) = if cfg.fast_path && hypothesis.holds {
        let (q1, q0) = fam_coequalize(&f, &g)?;
        let w = fam_descend(&s.fmap(&q0)?, &mu_x.then(&q0)?)?;
        let v0 = mu_x.then(&q0)?;
        let step = CoeqStep { index: 0, obj: f.cod().clone(), q: q0.clone(), v: v0.clone(), q_lt: id.clone() };
        let trace = CoeqTrace {
            monad: s.name(),
            budget: cfg.budget,
            steps: vec![step],
            stabilised_at: Some(1),
            limit: None,
            extra_checked: 0,
            fast_path: true,
        };
        (Algebra::unchecked(q1, w), q0.clone(), vec![q0], vec![v0], trace, true)
    } else {
        let b = Algebra::unchecked(f.cod().clone(), mu_x.clone());
        let r = alg_coeq_sequential(s, &b, &f, &g, cfg)?;
        let n = r.trace.stabilised_at.expect("sequential result is stabilised");
        let qs = r.trace.steps[..n].iter().map(|st| st.q.clone()).collect();
        let vs = r.trace.steps[..n].iter().map(|st| st.v.clone()).collect();
        (r.algebra, r.proj, qs, vs, r.trace, false)
    };
    let stage = qs.len();
    let unit = if stage == 0 {
        s.eta(x)?
    } else {
        let mut u = fam_descend(&alg.action, &phix.then(&qs[0])?)?;
        for q in &qs[1..] {
            u = u.then(q)?;
        }
        u
    };
    Ok(ShriekResult { algebra, proj, unit, stage, qs, vs, fast_path, reflexive, hypothesis, trace })
}

/// The monad `φ^* φ_!` on `M`-algebras.
pub struct InducedMonad<'a, P: MonadMorphism + ?Sized> {
    pub phi: &'a P,
    pub cfg: CoeqConfig,
}

pub fn induced_monad<'a, P: MonadMorphism + ?Sized>(phi: &'a P, cfg: &CoeqConfig) -> Result<InducedMonad<'a, P>> {
    cfg.validate()?;
    Ok(InducedMonad { phi, cfg: cfg.clone() })
}

impl<P: MonadMorphism + ?Sized> InducedMonad<'_, P> {
    pub fn shriek(&self, alg: &Algebra) -> Result<ShriekResult> {
        phi_shriek(self.phi, alg, &self.cfg)
    }

    pub fn apply(&self, alg: &Algebra) -> Result<Algebra> {
        phi_star(self.phi, &self.shriek(alg)?.algebra)
    }

    pub fn eta(&self, alg: &Algebra) -> Result<FamFn> {
        Ok(self.shriek(alg)?.unit)
    }

    /// `μ^{(1)} ∘ q'_0 = a` and `μ^{(m+2)} ∘ v'_{m+1} = a ∘ S(μ^{(m+1)})`,
    /// read off at the stage of the outer construction.
    pub fn mu(&self, alg: &Algebra) -> Result<FamFn> {
        let s = self.phi.target();
        let inner = self.shriek(alg)?;
        let a = &inner.algebra.action;
        let t_alg = phi_star(self.phi, &inner.algebra)?;
        let outer = self.shriek(&t_alg)?;
        if outer.stage == 0 {
            return Ok(a.clone());
        }
        let mut mu = fam_descend(&outer.qs[0], a)?;
        for v in &outer.vs[1..] {
            mu = fam_descend(v, &s.fmap(&mu)?.then(a)?)?;
        }
        Ok(mu)
    }

    /// `T(h)`: the map induced on the quotients of `S X -> S Y`.
    pub fn fmap(&self, dom: &Algebra, cod: &Algebra, h: &FamFn) -> Result<FamFn> {
        let s = self.phi.target();
        let rd = self.shriek(dom)?;
        let rc = self.shriek(cod)?;
        fam_descend(&rd.proj, &s.fmap(h)?.then(&rc.proj)?)
    }

    /// Monad laws, algebra validity of every `T(X, x)` and naturality on the
    /// given algebra maps `(dom, cod, h)`.
    pub fn check_laws(&self, algs: &[Algebra], maps: &[(Algebra, Algebra, FamFn)]) -> Result<MonadLawReport> {
        let m = self.phi.source();
        let mut rep = MonadLawReport { monad: format!("induced[{}]", self.phi.target().name()), objects: algs.len(), maps: maps.len(), ..Default::default() };
        for (k, alg) in algs.iter().enumerate() {
            let tx = self.apply(alg)?;
            if !tx.check(m)?.is_empty() {
                rep.violations.push(format!("algebra {k}: T(X, x) is not an algebra"));
            }
            let id = FamFn::identity(&tx.carrier);
            let mu = self.mu(alg)?;
            if self.eta(&tx)?.then(&mu)? != id {
                rep.violations.push(format!("algebra {k}: μ ∘ ηT is not the identity"));
            }
            let eta = self.eta(alg)?;
            if self.fmap(alg, &tx, &eta)?.then(&mu)? != id {
                rep.violations.push(format!("algebra {k}: μ ∘ Tη is not the identity"));
            }
            let ttx = self.apply(&tx)?;
            let lhs = self.fmap(&ttx, &tx, &mu)?.then(&mu)?;
            let rhs = self.mu(&tx)?.then(&mu)?;
            if lhs != rhs {
                rep.violations.push(format!("algebra {k}: μ ∘ Tμ differs from μ ∘ μT"));
            }
        }
        for (k, (d, c, h)) in maps.iter().enumerate() {
            let th = self.fmap(d, c, h)?;
            if h.then(&self.eta(c)?)? != self.eta(d)?.then(&th)? {
                rep.violations.push(format!("map {k}: η is not natural"));
            }
            let (td, tc) = (self.apply(d)?, self.apply(c)?);
            let tth = self.fmap(&td, &tc, &th)?;
            if tth.then(&self.mu(c)?)? != self.mu(d)?.then(&th)? {
                rep.violations.push(format!("map {k}: μ is not natural"));
            }
        }
        rep.passed = rep.violations.is_empty();
        Ok(rep)
    }
}

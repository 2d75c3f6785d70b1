//! The second route to `E'` (the left adjoint along `Γψ` on sequence
//! graphs), the comparison of the two routes, the enriched-category
//! bijection and the lifting of lax monoidal functors.

use serde::{Deserialize, Serialize};

use super::lifted::{lift_multitensor, LiftedMultitensor};
use super::trace::lift_object;
use crate::base::{fam_descend, FamFn, Family, Label};
use crate::error::{MtkError, Result};
use crate::monad::{comparison_iso, free_algebra, phi_shriek, Algebra, AlgebraMap, CoeqConfig, Monad};
use crate::multitensor::{
    all_fam_maps, ecat_enumerate, CatTensor, ECategory, EGraph, Gamma, GammaMap, Multitensor, TensorMap,
    VGraph,
};

/// `E'_n(X_i)` read off at the hom `(0, n)` of `φ_!` of the sequence graph.
#[derive(Clone, Debug)]
pub struct MonadRouteResult {
    pub algebra: Algebra,
    /// The projection `E_n(X_i) -> E'_n(X_i)`.
    pub proj: FamFn,
    pub stage: usize,
    pub fast_path: bool,
}

fn path_label(path: &[usize]) -> Label {
    Label::Tuple(path.iter().map(|&p| Label::Int(p as i64)).collect())
}

/// The sequence graph of the algebras as an algebra of `Γ(Ẽ_1)`.
pub fn sequence_algebra(e: &CatTensor, algs: &[Algebra]) -> Result<Algebra> {
    let vs = e.sorts();
    let carriers: Vec<Family> = algs.iter().map(|a| a.carrier.clone()).collect();
    let g = VGraph::sequence(vs, &carriers)?;
    let m = Gamma::new(&e.tilde_unary());
    let mx = Monad::apply(&m, g.family())?;
    let action = FamFn::from_labels(&mx, g.family(), |s, l| {
        let (a, _, c) = g.sort_parts(s);
        let (_, el) = l.as_pair().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
        algs[a].action.apply_label(c, el).cloned().ok_or_else(|| MtkError::UnknownLabel(el.to_string()))
    })?;
    Algebra::new(&m, g.family().clone(), action)
}

pub fn lift_via_monad_route(e: &CatTensor, algs: &[Algebra], cfg: &CoeqConfig) -> Result<MonadRouteResult> {
    if algs.is_empty() {
        return Err(MtkError::Mismatch("lifting needs a non-empty sequence".into()));
    }
    let n = algs.len();
    let vs = e.sorts();
    let alg = sequence_algebra(e, algs)?;
    let phi = GammaMap::new(&TensorMap::tilde_inclusion(e));
    let r = phi_shriek(&phi, &alg, cfg)?;
    let q = VGraph::of_family(vs, &r.algebra.carrier)?;
    let carrier = q.hom(0, n);
    let e1 = e.eval_fam(std::slice::from_ref(&carrier))?;
    let top = path_label(&[0, n]);
    let action = FamFn::from_labels(&e1, &carrier, |c, l| {
        let s = q.sort_index(0, n, c);
        let l = Label::pair(top.clone(), l.clone());
        r.algebra.action.apply_label(s, &l).cloned().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))
    })?;
    let carriers: Vec<Family> = algs.iter().map(|a| a.carrier.clone()).collect();
    let en = e.eval_fam(&carriers)?;
    let full = path_label(&(0..=n).collect::<Vec<_>>());
    let proj = FamFn::from_labels(&en, &carrier, |c, l| {
        let s = q.sort_index(0, n, c);
        let l = Label::pair(full.clone(), l.clone());
        r.proj.apply_label(s, &l).cloned().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))
    })?;
    Ok(MonadRouteResult { algebra: Algebra::unchecked(carrier, action), proj, stage: r.stage, fast_path: r.fast_path })
}

/// Outcome of comparing the explicit and monad routes on one sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteComparison {
    pub sizes: Vec<usize>,
    pub explicit_stage: usize,
    pub monad_stage: usize,
    /// The isomorphism commuting with both projections from `E_n(X_i)`, as
    /// index tables per sort.
    pub iso: Vec<Vec<usize>>,
}

/// Runs both routes and finds the isomorphism between them. The only
/// candidate is the map induced on quotients of `E_n(X_i)`; it must be a
/// bijective algebra map.
pub fn compare_routes(e: &CatTensor, algs: &[Algebra], cfg: &CoeqConfig) -> Result<RouteComparison> {
    let ex = lift_object(e, algs, cfg)?;
    let mr = lift_via_monad_route(e, algs, cfg)?;
    let h = comparison_iso(&e.unary_part(), (&ex.algebra, &ex.proj), (&mr.algebra, &mr.proj))?;
    Ok(RouteComparison {
        sizes: ex.algebra.carrier.sizes(),
        explicit_stage: ex.stage,
        monad_stage: mr.stage,
        iso: h.comps().iter().map(|c| c.table().to_vec()).collect(),
    })
}

/// Every `E_1`-algebra structure on a family.
pub fn e1_algebras(e: &CatTensor, carrier: &Family, cap: u128) -> Result<Vec<Algebra>> {
    let t = e.unary_part();
    let e1 = t.apply(carrier)?;
    let mut out = Vec::new();
    for action in all_fam_maps(&e1, carrier, cap)? {
        let alg = Algebra::unchecked(carrier.clone(), action);
        if alg.check(&t)?.is_empty() {
            out.push(alg);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTheoremReport {
    pub objects: usize,
    pub hom_sizes: Vec<Vec<usize>>,
    pub e_categories: usize,
    pub lifted_categories: usize,
    /// Every E-category goes to a lifted one and back to itself.
    pub round_trip: bool,
    /// Distinct E-categories go to distinct lifted ones.
    pub injective: bool,
    /// Every lifted category is hit.
    pub surjective: bool,
    pub passed: bool,
}

/// The lifted category with homs `X(a, b)` acted on by `κ_{(a,b)}` and
/// compositions induced on the quotients `E'_n`.
fn to_lifted(lm: &LiftedMultitensor, cat: &ECategory<Family>) -> Result<ECategory<Algebra>> {
    let g = &cat.graph;
    let homs: Vec<Vec<Algebra>> = (0..g.n_obj)
        .map(|a| (0..g.n_obj).map(|b| Algebra::unchecked(g.hom(a, b).clone(), cat.kappa[&vec![a, b]].clone())).collect())
        .collect();
    let graph = EGraph::new(g.n_obj, |a, b| homs[a][b].clone());
    let mut kappa = std::collections::BTreeMap::new();
    for (xs, k) in &cat.kappa {
        let map = if xs.len() == 2 {
            FamFn::identity(g.hom(xs[0], xs[1]))
        } else {
            let args: Vec<Algebra> = xs.windows(2).map(|w| homs[w[0]][w[1]].clone()).collect();
            let (_, proj) = lm.lifted(&args)?;
            fam_descend(&proj, k)?
        };
        kappa.insert(xs.clone(), map);
    }
    Ok(ECategory { graph, kappa })
}

/// The E-category with `κ_{(a,b)}` the actions and higher compositions
/// precomposed with the projections onto `E'_n`.
fn from_lifted(lm: &LiftedMultitensor, cat: &ECategory<Algebra>) -> Result<ECategory<Family>> {
    let g = &cat.graph;
    let graph = EGraph::new(g.n_obj, |a, b| g.hom(a, b).carrier.clone());
    let mut kappa = std::collections::BTreeMap::new();
    for (xs, k) in &cat.kappa {
        let map = if xs.len() == 2 {
            g.hom(xs[0], xs[1]).action.clone()
        } else {
            let args: Vec<Algebra> = xs.windows(2).map(|w| g.hom(w[0], w[1]).clone()).collect();
            let (_, proj) = lm.lifted(&args)?;
            proj.then(k)?
        };
        kappa.insert(xs.clone(), map);
    }
    Ok(ECategory { graph, kappa })
}

/// Enumerates E-categories on the graph and E'-categories on every graph
/// of `E_1`-algebras with the same underlying homs, and checks that the
/// explicit correspondence between them is a bijection.
pub fn check_lift_theorem(e: &CatTensor, graph: &EGraph<Family>, cfg: &CoeqConfig, cap: u128) -> Result<LiftTheoremReport> {
    let lm = lift_multitensor(e, cfg)?;
    let n = graph.n_obj;
    let plain = ecat_enumerate(e, graph, cap)?;
    let structures: Vec<Vec<Algebra>> = (0..n * n)
        .map(|i| e1_algebras(e, graph.hom(i / n, i % n), cap))
        .collect::<Result<_>>()?;
    let mut lifted = Vec::new();
    let mut idx = vec![0usize; n * n];
    if structures.iter().all(|s| !s.is_empty()) {
        loop {
            let g = EGraph::new(n, |a, b| structures[a * n + b][idx[a * n + b]].clone());
            let found = ecat_enumerate(&lm, &g, cap)?;
            if lifted.len() as u128 + found.len() as u128 > cap {
                return Err(MtkError::EnumerationBound(format!("more than {cap} lifted structures")));
            }
            lifted.extend(found);
            let mut p = n * n;
            let mut done = true;
            while p > 0 {
                p -= 1;
                idx[p] += 1;
                if idx[p] < structures[p].len() {
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
    let mut images = Vec::with_capacity(plain.len());
    let mut round_trip = true;
    for cat in &plain {
        let up = to_lifted(&lm, cat)?;
        if from_lifted(&lm, &up)? != *cat {
            round_trip = false;
        }
        images.push(lifted.iter().position(|c| *c == up));
    }
    let mut hit: Vec<usize> = images.iter().flatten().copied().collect();
    let all_found = hit.len() == images.len();
    hit.sort();
    hit.dedup();
    let injective = all_found && hit.len() == images.len();
    let surjective = hit.len() == lifted.len();
    for cat in &lifted {
        let down = from_lifted(&lm, cat)?;
        if !plain.contains(&down) || to_lifted(&lm, &down)? != *cat {
            round_trip = false;
        }
    }
    let hom_sizes = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| graph.hom(a, b).sizes()).collect();
    Ok(LiftTheoremReport {
        objects: n,
        hom_sizes,
        e_categories: plain.len(),
        lifted_categories: lifted.len(),
        round_trip,
        injective,
        surjective,
        passed: round_trip && injective && surjective && all_found,
    })
}

/// The lift of the lax monoidal functor `(id, ψ): (V, T) -> (V, S)` for a
/// map of multitensors `ψ: S -> T` over the same objects.
pub struct LaxLift {
    pub psi: TensorMap,
    pub source: LiftedMultitensor,
    pub target: LiftedMultitensor,
}

pub fn lift_lax_functor(psi: &TensorMap, cfg: &CoeqConfig) -> Result<LaxLift> {
    if psi.source.sorts() != psi.target.sorts() {
        return Err(MtkError::Mismatch("the functor must be the identity on objects".into()));
    }
    Ok(LaxLift {
        psi: psi.clone(),
        source: lift_multitensor(&psi.source, cfg)?,
        target: lift_multitensor(&psi.target, cfg)?,
    })
}

impl LaxLift {
    /// `ψ_1^*(X, x) = (X, x ∘ ψ_1)`.
    pub fn psi1_star(&self, alg: &Algebra) -> Result<Algebra> {
        let c = self.psi.component(std::slice::from_ref(&alg.carrier))?;
        Ok(Algebra::unchecked(alg.carrier.clone(), c.then(&alg.action)?))
    }

    /// `ψ': S'(ψ_1^* X_i) -> ψ_1^* T'(X_i)`, induced on the quotients.
    pub fn psi_prime(&self, xs: &[Algebra]) -> Result<FamFn> {
        if xs.len() == 1 {
            return Ok(FamFn::identity(&xs[0].carrier));
        }
        let pulled: Vec<Algebra> = xs.iter().map(|x| self.psi1_star(x)).collect::<Result<_>>()?;
        let (_, ps) = self.source.lifted(&pulled)?;
        let (_, pt) = self.target.lifted(xs)?;
        let carriers: Vec<Family> = xs.iter().map(|x| x.carrier.clone()).collect();
        fam_descend(&ps, &self.psi.component(&carriers)?.then(&pt)?)
    }

    /// Whether `ψ'` at the given algebras is a map of `S_1`-algebras into
    /// `ψ_1^* T'(X_i)`.
    pub fn is_algebra_map(&self, xs: &[Algebra]) -> Result<bool> {
        let pulled: Vec<Algebra> = xs.iter().map(|x| self.psi1_star(x)).collect::<Result<_>>()?;
        let dom = self.source.eval(&pulled)?;
        let cod = self.psi1_star(&self.target.eval(xs)?)?;
        AlgebraMap::commutes(&psi_unary(&self.psi), &dom, &cod, &self.psi_prime(xs)?)
    }
}

fn psi_unary(psi: &TensorMap) -> crate::multitensor::UnaryPart {
    psi.source.unary_part()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeComponentReport {
    pub tuples: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// At free `T_1`-algebras `T_1 Z_i`, `ψ'` restricted along
/// `S_n(Z_i) -> S_n(T_1 Z_i) -> S'(ψ_1^* T_1 Z_i)` is `ψ_Z` followed by the
/// identification `T_n(Z_i) ≅ T'(T_1 Z_i)`; the identification must be a
/// bijection.
pub fn check_free_components(lift: &LaxLift, tuples: &[Vec<Family>]) -> Result<FreeComponentReport> {
    let t = &lift.psi.target;
    let s = &lift.psi.source;
    let mut rep = FreeComponentReport { tuples: tuples.len(), ..Default::default() };
    for zs in tuples {
        let free: Vec<Algebra> = zs.iter().map(|z| free_algebra(&t.unary_part(), z)).collect::<Result<_>>()?;
        let units = zs.iter().map(|z| t.unit_fam(z)).collect::<Result<Vec<_>>>()?;
        let pulled: Vec<Algebra> = free.iter().map(|x| lift.psi1_star(x)).collect::<Result<_>>()?;
        let (_, ps) = lift.source.lifted(&pulled)?;
        let (_, pt) = lift.target.lifted(&free)?;
        let ident = t.fmap_fam(&units)?.then(&pt)?;
        if !ident.is_bijection() {
            rep.failures.push(format!("{zs:?}: T_n(Z) -> T'(T_1 Z) is not a bijection"));
            continue;
        }
        let left = s.fmap_fam(&units)?.then(&ps)?.then(&lift.psi_prime(&free)?)?;
        let right = lift.psi.component(zs)?.then(&ident)?;
        if left != right {
            rep.failures.push(format!("{zs:?}: component at free algebras differs from psi"));
        }
        if !lift.is_algebra_map(&free)? {
            rep.failures.push(format!("{zs:?}: component is not an algebra map"));
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}

//! Convolution on copresheaves over the linear part of a multicategory:
//! the coend tensor `F`, the promonoidal test, and the comparison of `F`
//! with the lifted functor operad `E'` and of `F`-categories with
//! E-categories.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{descend, fam_descend, families_up_to, Copresheaf, FamFn, Family, FinCat, FinFn, FinSet, Label, UnionFind};
use crate::error::{MtkError, Result};
use crate::lifting::{e1_algebras, lift_multitensor, LiftedMultitensor};
use crate::monad::{comparison_iso, Algebra, CoeqConfig};
use crate::multicat::Multicat;
use crate::multitensor::{all_fam_maps, compositions, ecat_enumerate, CatTensor, ECategory, EGraph, Multitensor};

/// The generators `(θ, x_1..x_n)` of a coend, the number of one-variable
/// moves used to identify them, and the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendPresentation {
    pub generators: Family,
    pub relations: usize,
    pub quotient: Family,
    pub proj: FamFn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendResult {
    pub value: Copresheaf,
    pub presentation: CoendPresentation,
}

/// The convolution multitensor of a multicategory on copresheaves over its
/// linear part.
#[derive(Clone, Debug)]
pub struct Convolution {
    mc: Multicat,
    e: CatTensor,
    lin: Arc<FinCat>,
    /// Linear morphism index to multimap index.
    mor_op: Vec<usize>,
}

fn missing(mc: &Multicat, outer: usize, inners: &[usize]) -> MtkError {
    MtkError::IllDefined(format!("missing substitution {}", mc.describe_config(outer, inners)))
}

impl Convolution {
    pub fn new(mc: &Multicat) -> Result<Convolution> {
        let e = CatTensor::new(mc)?;
        let lin = Arc::new(mc.linear_part()?);
        let mor_op = lin
            .mors()
            .iter()
            .map(|m| mc.op_by_label(&m.label).ok_or_else(|| MtkError::UnknownLabel(m.label.to_string())))
            .collect::<Result<_>>()?;
        Ok(Convolution { mc: mc.clone(), e, lin, mor_op })
    }

    pub fn multicat(&self) -> &Multicat {
        &self.mc
    }

    pub fn tensor(&self) -> &CatTensor {
        &self.e
    }

    pub fn linear(&self) -> &Arc<FinCat> {
        &self.lin
    }

    fn mor_of_op(&self, op: usize) -> usize {
        self.mor_op.iter().position(|&o| o == op).expect("unary multimaps are linear morphisms")
    }

    /// The copresheaf with the same underlying family whose action by a
    /// linear map `g` is `x ↦ a(g, x)`.
    pub fn copresheaf_of(&self, alg: &Algebra) -> Result<Copresheaf> {
        let action = self
            .lin
            .mors()
            .iter()
            .enumerate()
            .map(|(m, mor)| {
                let (src, tgt) = (alg.carrier.part(mor.src), alg.carrier.part(mor.tgt));
                FinFn::from_labels(src.clone(), tgt.clone(), |x| {
                    let l = self.e.element(self.mor_op[m], vec![x.clone()]);
                    alg.action.apply_label(mor.tgt, &l).cloned().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Copresheaf::new(self.lin.clone(), alg.carrier.parts().to_vec(), action)
    }

    /// The `E_1`-algebra `(g, x) ↦ X(g)(x)`.
    pub fn algebra_of(&self, x: &Copresheaf) -> Result<Algebra> {
        let carrier = self.family_of(x)?;
        let e1 = self.e.eval_fam(std::slice::from_ref(&carrier))?;
        let action = FamFn::from_labels(&e1, &carrier, |_, l| {
            let (op, args) = self.e.parse(l)?;
            x.action(self.mor_of_op(op))
                .apply_label(&args[0])
                .cloned()
                .ok_or_else(|| MtkError::UnknownLabel(args[0].to_string()))
        })?;
        Ok(Algebra::unchecked(carrier, action))
    }

    fn carriers(&self, xs: &[Copresheaf]) -> Result<Vec<Family>> {
        xs.iter().map(|x| self.family_of(x)).collect()
    }

    /// The underlying family over the sorts of the tensor.
    fn family_of(&self, x: &Copresheaf) -> Result<Family> {
        Family::new(self.e.sorts().clone(), x.sets().to_vec())
    }

    /// `∫^{C_1..C_n} C(C_1..C_n; -) × Π X_i(C_i)`, as one quotient of
    /// `E_n` of the underlying families by every one-variable move
    /// `(θ∘_i g, x) ~ (θ, x[i := g x_i])`.
    pub fn coend(&self, xs: &[Copresheaf]) -> Result<CoendResult> {
        let mc = &self.mc;
        if xs.is_empty() {
            return Err(MtkError::Mismatch("convolution needs a non-empty tuple".into()));
        }
        if xs.len() > mc.arity_bound() {
            return Err(MtkError::ArityExceeded { got: xs.len(), bound: mc.arity_bound() });
        }
        let n = xs.len();
        let carriers = self.carriers(xs)?;
        let gens = self.e.eval_fam(&carriers)?;
        let mut ufs: Vec<UnionFind> = gens.parts().iter().map(|p| UnionFind::new(p.len())).collect();
        let mut relations = 0;
        for theta in 0..mc.ops().len() {
            let op = mc.op(theta);
            if op.src.len() != n {
                continue;
            }
            for i in 0..n {
                for (m, mor) in self.lin.mors().iter().enumerate() {
                    if mor.tgt != op.src[i] {
                        continue;
                    }
                    let inners: Vec<usize> =
                        (0..n).map(|j| if j == i { self.mor_op[m] } else { mc.identity(op.src[j]) }).collect();
                    let phi = mc.subst(theta, &inners).ok_or_else(|| missing(mc, theta, &inners))?;
                    let mut factors: Vec<&FinSet> = op.src.iter().enumerate().map(|(j, &s)| xs[j].set(s)).collect();
                    factors[i] = xs[i].set(mor.src);
                    let part = gens.part(op.tgt);
                    let uf = &mut ufs[op.tgt];
                    for_each_label_tuple(&factors, |x| {
                        let lhs = self.e.element(phi, x.clone());
                        let mut moved = x;
                        moved[i] = xs[i].action(m).apply_label(&moved[i]).expect("element of the source").clone();
                        let rhs = self.e.element(theta, moved);
                        let a = part.index_of(&lhs).expect("generator");
                        let b = part.index_of(&rhs).expect("generator");
                        uf.union(a, b);
                        relations += 1;
                    });
                }
            }
        }
        let (sets, comps): (Vec<FinSet>, Vec<FinFn>) =
            ufs.iter_mut().zip(gens.parts()).map(|(uf, p)| uf.quotient(p)).unzip();
        let quotient = Family::new(self.e.sorts().clone(), sets.clone())?;
        let proj = FamFn::new(gens.clone(), quotient.clone(), comps)?;
        let action = self
            .lin
            .mors()
            .iter()
            .enumerate()
            .map(|(m, mor)| {
                let h = self.mor_op[m];
                let on_gens = FinFn::from_labels(gens.part(mor.src).clone(), quotient.part(mor.tgt).clone(), |l| {
                    let (theta, args) = self.e.parse(l)?;
                    let post = mc.subst(h, &[theta]).ok_or_else(|| missing(mc, h, &[theta]))?;
                    let g = self.e.element(post, args.to_vec());
                    proj.apply_label(mor.tgt, &g).cloned().ok_or_else(|| MtkError::UnknownLabel(g.to_string()))
                })?;
                descend(proj.comp(mor.src), &on_gens)
                    .map_err(|_| MtkError::IllDefined(format!("action of {} on coend classes", mor.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let value = Copresheaf::new(self.lin.clone(), sets, action)?;
        Ok(CoendResult { value, presentation: CoendPresentation { generators: gens, relations, quotient, proj } })
    }

    /// `σ_F`: classes of `(θ, [θ_1, x_1], .., [θ_k, x_k])` go to the class of
    /// `(θ∘(θ_1..θ_k), x_1..x_k)`.
    pub fn substitution(&self, xss: &[Vec<Copresheaf>]) -> Result<FamFn> {
        let mc = &self.mc;
        let inner: Vec<CoendResult> = xss.iter().map(|b| self.coend(b)).collect::<Result<_>>()?;
        let ys: Vec<Copresheaf> = inner.iter().map(|r| r.value.clone()).collect();
        let outer = self.coend(&ys)?;
        let flat = self.coend(&xss.concat())?;
        // a representative generator for every class of every inner value
        let reps: Vec<Vec<HashMap<Label, Label>>> = inner
            .iter()
            .map(|r| {
                let p = &r.presentation;
                (0..p.generators.sorts().len())
                    .map(|s| {
                        let mut m = HashMap::new();
                        for (i, g) in p.generators.part(s).labels().iter().enumerate() {
                            m.entry(p.quotient.part(s).label(p.proj.apply(s, i)).clone()).or_insert_with(|| g.clone());
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let fp = &flat.presentation;
        let on_gens = FamFn::from_labels(&outer.presentation.generators, &fp.quotient, |c, l| {
            let (theta, args) = self.e.parse(l)?;
            let mut thetas = Vec::with_capacity(args.len());
            let mut xs = Vec::new();
            for (j, a) in args.iter().enumerate() {
                let s = mc.op(theta).src[j];
                let rep = &reps[j][s][a];
                let (tj, xj) = self.e.parse(rep)?;
                thetas.push(tj);
                xs.extend_from_slice(xj);
            }
            let phi = mc.subst(theta, &thetas).ok_or_else(|| missing(mc, theta, &thetas))?;
            let g = self.e.element(phi, xs);
            fp.proj.apply_label(c, &g).cloned().ok_or_else(|| MtkError::UnknownLabel(g.to_string()))
        })?;
        fam_descend(&outer.presentation.proj, &on_gens)
    }

    /// `u_F: X -> F_1(X)`, `x ↦ [(id, x)]`.
    pub fn unit_map(&self, x: &Copresheaf) -> Result<FamFn> {
        let r = self.coend(std::slice::from_ref(x))?;
        let carrier = self.family_of(x)?;
        let p = &r.presentation;
        FamFn::from_labels(&carrier, &p.quotient, |c, l| {
            let g = self.e.element(self.mc.identity(c), vec![l.clone()]);
            p.proj.apply_label(c, &g).cloned().ok_or_else(|| MtkError::UnknownLabel(g.to_string()))
        })
    }

    /// Whether a map of underlying families is natural.
    pub fn is_natural(&self, a: &Copresheaf, b: &Copresheaf, f: &FamFn) -> Result<bool> {
        for (m, mor) in self.lin.mors().iter().enumerate() {
            if a.action(m).then(f.comp(mor.tgt))? != f.comp(mor.src).then(b.action(m))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Calls `f` on every tuple of labels in the product, in lexicographic order.
fn for_each_label_tuple(factors: &[&FinSet], mut f: impl FnMut(Vec<Label>)) {
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

impl Multitensor for Convolution {
    type Obj = Copresheaf;

    fn name(&self) -> String {
        "F".into()
    }

    fn arity_bound(&self) -> usize {
        self.mc.arity_bound()
    }

    fn carrier<'a>(&self, x: &'a Copresheaf) -> &'a Family {
        x.carrier()
    }

    fn eval(&self, xs: &[Copresheaf]) -> Result<Copresheaf> {
        Ok(self.coend(xs)?.value)
    }

    fn fmap(&self, xs: &[Copresheaf], ys: &[Copresheaf], fs: &[FamFn]) -> Result<FamFn> {
        let px = self.coend(xs)?.presentation.proj;
        let py = self.coend(ys)?.presentation.proj;
        fam_descend(&px, &self.e.fmap_fam(fs)?.then(&py)?)
    }

    fn unit(&self, x: &Copresheaf) -> Result<FamFn> {
        self.unit_map(x)
    }

    fn subst(&self, xss: &[Vec<Copresheaf>]) -> Result<FamFn> {
        self.substitution(xss)
    }

    fn morphisms(&self, a: &Copresheaf, b: &Copresheaf, cap: u128) -> Result<Vec<FamFn>> {
        let fa = self.family_of(a)?;
        let fb = self.family_of(b)?;
        let mut out = Vec::new();
        for f in all_fam_maps(&fa, &fb, cap)? {
            if self.is_natural(a, b, &f)? {
                out.push(f);
            }
        }
        Ok(out)
    }
}

/// The convolution of a tuple of copresheaves over the linear part.
pub fn coend_tensor(mc: &Multicat, xs: &[Copresheaf]) -> Result<CoendResult> {
    Convolution::new(mc)?.coend(xs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromonoidalReport {
    pub arity_bound: usize,
    pub instances: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// For object tuples `A` of length `n <= A`, every partition of `A` into
/// consecutive blocks and every target `C`, tests that substitution induces
/// a bijection `∫^B C(B; C) × Π C(A_j; B_j) -> C(A; C)`. Arity 0 is not
/// tested.
pub fn promonoidal_check(mc: &Multicat) -> Result<PromonoidalReport> {
    let conv = Convolution::new(mc)?;
    let bound = mc.arity_bound();
    let n_obj = mc.objects().len();
    let mut rep = PromonoidalReport { arity_bound: bound, ..Default::default() };
    let labels = |ops: &[usize]| FinSet::new(ops.iter().map(|&o| mc.op_label(o)));
    // C(src; -) as a copresheaf acted on by postcomposition
    let represented = |src: &[usize]| -> Result<Copresheaf> {
        let sets = (0..n_obj).map(|b| labels(mc.hom(src, b))).collect::<Result<Vec<_>>>()?;
        let action = conv
            .lin
            .mors()
            .iter()
            .enumerate()
            .map(|(m, mor)| {
                FinFn::from_labels(sets[mor.src].clone(), sets[mor.tgt].clone(), |l| {
                    let phi = mc.op_by_label(l).ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
                    let h = conv.mor_op[m];
                    mc.subst(h, &[phi]).map(|o| mc.op_label(o)).ok_or_else(|| missing(mc, h, &[phi]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Copresheaf::new(conv.lin.clone(), sets, action)
    };
    for n in 1..=bound {
        let mut tuple = vec![0usize; n];
        loop {
            for parts in compositions(n) {
                let mut blocks = Vec::new();
                let mut pos = 0;
                for &p in &parts {
                    blocks.push(tuple[pos..pos + p].to_vec());
                    pos += p;
                }
                let xs = blocks.iter().map(|b| represented(b)).collect::<Result<Vec<_>>>()?;
                let co = conv.coend(&xs)?;
                let pres = &co.presentation;
                for c in 0..n_obj {
                    rep.instances += 1;
                    let target = labels(mc.hom(&tuple, c))?;
                    let sigma = FinFn::from_labels(pres.generators.part(c).clone(), target, |l| {
                        let (theta, args) = conv.e.parse(l)?;
                        let inners =
                            args.iter().map(|a| mc.op_by_label(a).ok_or_else(|| MtkError::UnknownLabel(a.to_string()))).collect::<Result<Vec<_>>>()?;
                        mc.subst(theta, &inners).map(|o| mc.op_label(o)).ok_or_else(|| missing(mc, theta, &inners))
                    })?;
                    let name = |os: &[usize]| os.iter().map(|&o| mc.objects()[o].clone()).collect::<Vec<_>>().join(",");
                    let blocks_desc = blocks.iter().map(|b| format!("({})", name(b))).collect::<Vec<_>>().join("");
                    match descend(pres.proj.comp(c), &sigma) {
                        Ok(s) if s.is_bijection() => {}
                        Ok(s) => rep.failures.push(format!(
                            "{blocks_desc} -> {}: induced map {} -> {} is not bijective",
                            mc.objects()[c],
                            s.dom().len(),
                            s.cod().len()
                        )),
                        Err(_) => rep.failures.push(format!("{blocks_desc} -> {}: not well defined", mc.objects()[c])),
                    }
                }
            }
            let mut k = n;
            let mut done = true;
            while k > 0 {
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < n_obj {
                    done = false;
                    break;
                }
                tuple[k] = 0;
            }
            if done || n_obj == 0 {
                break;
            }
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub value_bound: usize,
    pub max_arity: usize,
    pub algebras: usize,
    pub tuples: usize,
    pub isos: usize,
    pub unit_checks: usize,
    pub subst_squares: usize,
    pub naturality_checks: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// The isomorphism `F(xs) -> E'(xs)` for one tuple with its ingredients.
struct Comparison {
    f_value: Copresheaf,
    iso: FamFn,
}

struct Comparer<'a> {
    conv: &'a Convolution,
    lm: &'a LiftedMultitensor,
    memo: HashMap<Vec<Algebra>, Result<std::rc::Rc<Comparison>>>,
}

impl Comparer<'_> {
    fn compare(&mut self, xs: &[Algebra]) -> Result<std::rc::Rc<Comparison>> {
        if let Some(r) = self.memo.get(xs) {
            return r.clone();
        }
        let r = self.compute(xs).map(std::rc::Rc::new);
        self.memo.insert(xs.to_vec(), r.clone());
        r
    }

    fn compute(&self, xs: &[Algebra]) -> Result<Comparison> {
        let cs = xs.iter().map(|x| self.conv.copresheaf_of(x)).collect::<Result<Vec<_>>>()?;
        let co = self.conv.coend(&cs)?;
        let f_alg = self.conv.algebra_of(&co.value)?;
        let (l_alg, l_proj) = self.lm.lifted(xs)?;
        let iso = comparison_iso(&self.conv.e.unary_part(), (&f_alg, &co.presentation.proj), (&l_alg, &l_proj))?;
        Ok(Comparison { f_value: co.value, iso })
    }
}

/// Constructs `F(xs) ≅ E'(xs)` for every tuple of `E_1`-algebras with
/// values at most `bound` and length at most `max_arity`, and checks the
/// unit, the substitution squares and naturality in each variable (for
/// tuples of length at most `naturality_arity`).
pub fn convolution_vs_lift(
    mc: &Multicat,
    bound: usize,
    max_arity: usize,
    naturality_arity: usize,
    cfg: &CoeqConfig,
) -> Result<ConvolutionReport> {
    let conv = Convolution::new(mc)?;
    let lm = lift_multitensor(&conv.e, cfg)?;
    let max_arity = max_arity.min(mc.arity_bound());
    let algs: Vec<Algebra> = families_up_to(conv.e.sorts(), bound)
        .iter()
        .map(|f| e1_algebras(&conv.e, f, 1 << 20))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mut rep = ConvolutionReport { value_bound: bound, max_arity, algebras: algs.len(), ..Default::default() };
    let mut cmp = Comparer { conv: &conv, lm: &lm, memo: HashMap::new() };
    let mut layer: Vec<Vec<Algebra>> = vec![Vec::new()];
    for n in 1..=max_arity {
        layer = layer
            .iter()
            .flat_map(|t| {
                algs.iter().map(move |a| {
                    let mut t = t.clone();
                    t.push(a.clone());
                    t
                })
            })
            .collect();
        for xs in &layer {
            rep.tuples += 1;
            let here = match cmp.compare(xs) {
                Ok(c) => c,
                Err(err) => {
                    rep.failures.push(format!("{:?}: {err}", sizes(xs)));
                    continue;
                }
            };
            rep.isos += 1;
            if n == 1 {
                rep.unit_checks += 1;
                let u = conv.unit_map(&conv.copresheaf_of(&xs[0])?)?;
                if u.then(&here.iso)? != FamFn::identity(&xs[0].carrier) {
                    rep.failures.push(format!("{:?}: unit square fails", sizes(xs)));
                }
            }
            for parts in compositions(n) {
                if parts.len() == 1 {
                    continue;
                }
                rep.subst_squares += 1;
                if let Err(err) = subst_square(&conv, &lm, &mut cmp, xs, &parts).and_then(|ok| {
                    if ok {
                        Ok(())
                    } else {
                        Err(MtkError::Mismatch("square does not commute".into()))
                    }
                }) {
                    rep.failures.push(format!("{:?} split {parts:?}: {err}", sizes(xs)));
                }
            }
            if n <= naturality_arity {
                for i in 0..n {
                    for y in &algs {
                        for f in lm.morphisms(&xs[i], y, 1 << 20)? {
                            rep.naturality_checks += 1;
                            let mut ys = xs.clone();
                            ys[i] = y.clone();
                            let fs: Vec<FamFn> = (0..n)
                                .map(|j| if j == i { f.clone() } else { FamFn::identity(&xs[j].carrier) })
                                .collect();
                            let there = cmp.compare(&ys)?;
                            let cx = xs.iter().map(|x| conv.copresheaf_of(x)).collect::<Result<Vec<_>>>()?;
                            let cy = ys.iter().map(|x| conv.copresheaf_of(x)).collect::<Result<Vec<_>>>()?;
                            let left = conv.fmap(&cx, &cy, &fs)?.then(&there.iso)?;
                            let right = here.iso.then(&lm.fmap(xs, &ys, &fs)?)?;
                            if left != right {
                                rep.failures.push(format!("{:?}: not natural in variable {i}", sizes(xs)));
                            }
                        }
                    }
                }
            }
        }
    }
    rep.passed = rep.failures.is_empty();
    Ok(rep)
}

fn sizes(xs: &[Algebra]) -> Vec<Vec<usize>> {
    xs.iter().map(|x| x.carrier.sizes()).collect()
}

/// `iso ∘ σ_F = σ' ∘ iso_k ∘ F_k(iso_j)` out of `F_k(F(xs_j))`.
fn subst_square(
    conv: &Convolution,
    lm: &LiftedMultitensor,
    cmp: &mut Comparer<'_>,
    xs: &[Algebra],
    parts: &[usize],
) -> Result<bool> {
    let mut xss = Vec::new();
    let mut pos = 0;
    for &p in parts {
        xss.push(xs[pos..pos + p].to_vec());
        pos += p;
    }
    let inner = xss.iter().map(|b| cmp.compare(b)).collect::<Result<Vec<_>>>()?;
    let f_vals: Vec<Copresheaf> = inner.iter().map(|c| c.f_value.clone()).collect();
    let l_vals: Vec<Algebra> = xss.iter().map(|b| lm.eval(b)).collect::<Result<_>>()?;
    let l_cops = l_vals.iter().map(|a| conv.copresheaf_of(a)).collect::<Result<Vec<_>>>()?;
    let cxss: Vec<Vec<Copresheaf>> =
        xss.iter().map(|b| b.iter().map(|x| conv.copresheaf_of(x)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let isos: Vec<FamFn> = inner.iter().map(|c| c.iso.clone()).collect();
    let outer = cmp.compare(&l_vals)?;
    let left = conv.substitution(&cxss)?.then(&cmp.compare(xs)?.iso)?;
    let right = conv.fmap(&f_vals, &l_cops, &isos)?.then(&outer.iso)?.then(&lm.subst(&xss)?)?;
    Ok(left == right)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub objects: usize,
    pub e_categories: usize,
    pub f_categories: usize,
    pub round_trip: bool,
    pub injective: bool,
    pub surjective: bool,
    pub passed: bool,
}

/// Every structure of `E_1`-algebra on every hom, combined with `each`.
fn for_each_hom_structure(
    conv: &Convolution,
    graph: &EGraph<Family>,
    cap: u128,
    mut each: impl FnMut(EGraph<Copresheaf>) -> Result<()>,
) -> Result<()> {
    let n = graph.n_obj;
    let structures: Vec<Vec<Copresheaf>> = (0..n * n)
        .map(|i| {
            e1_algebras(&conv.e, graph.hom(i / n, i % n), cap)?.iter().map(|a| conv.copresheaf_of(a)).collect()
        })
        .collect::<Result<_>>()?;
    if structures.iter().any(|s| s.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; n * n];
    loop {
        each(EGraph::new(n, |a, b| structures[a * n + b][idx[a * n + b]].clone()))?;
        let mut p = n * n;
        loop {
            if p == 0 {
                return Ok(());
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < structures[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// The F-category whose homs carry the actions `κ_{(a,b)}` and whose
/// compositions are induced on coend classes.
fn to_f(conv: &Convolution, cat: &ECategory<Family>) -> Result<ECategory<Copresheaf>> {
    let g = &cat.graph;
    let n = g.n_obj;
    let homs: Vec<Copresheaf> = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            conv.copresheaf_of(&Algebra::unchecked(g.hom(a, b).clone(), cat.kappa[&vec![a, b]].clone()))
        })
        .collect::<Result<_>>()?;
    let graph = EGraph::new(n, |a, b| homs[a * n + b].clone());
    let mut kappa = std::collections::BTreeMap::new();
    for (xs, k) in &cat.kappa {
        let args: Vec<Copresheaf> = xs.windows(2).map(|w| homs[w[0] * n + w[1]].clone()).collect();
        kappa.insert(xs.clone(), fam_descend(&conv.coend(&args)?.presentation.proj, k)?);
    }
    Ok(ECategory { graph, kappa })
}

fn from_f(conv: &Convolution, cat: &ECategory<Copresheaf>) -> Result<ECategory<Family>> {
    let g = &cat.graph;
    let fams: Vec<Family> =
        (0..g.n_obj * g.n_obj).map(|i| conv.family_of(g.hom(i / g.n_obj, i % g.n_obj))).collect::<Result<_>>()?;
    let graph = EGraph::new(g.n_obj, |a, b| fams[a * g.n_obj + b].clone());
    let mut kappa = std::collections::BTreeMap::new();
    for (xs, k) in &cat.kappa {
        let args: Vec<Copresheaf> = xs.windows(2).map(|w| g.hom(w[0], w[1]).clone()).collect();
        kappa.insert(xs.clone(), conv.coend(&args)?.presentation.proj.then(k)?);
    }
    Ok(ECategory { graph, kappa })
}

/// Enumerates E-categories on a graph of families and F-categories on all
/// copresheaf structures of its homs, and checks that precomposition with
/// the coend projections is a bijection between them.
pub fn ecat_ef_agreement(mc: &Multicat, graph: &EGraph<Family>, cap: u128) -> Result<AgreementReport> {
    let conv = Convolution::new(mc)?;
    let plain = ecat_enumerate(&conv.e, graph, cap)?;
    let mut fcats = Vec::new();
    for_each_hom_structure(&conv, graph, cap, |g| {
        let found = ecat_enumerate(&conv, &g, cap)?;
        if (fcats.len() + found.len()) as u128 > cap {
            return Err(MtkError::EnumerationBound(format!("more than {cap} F-categories")));
        }
        fcats.extend(found);
        Ok(())
    })?;
    let mut round_trip = true;
    let mut images = Vec::new();
    for cat in &plain {
        let up = to_f(&conv, cat)?;
        if from_f(&conv, &up)? != *cat {
            round_trip = false;
        }
        images.push(fcats.iter().position(|c| *c == up));
    }
    let all_found = images.iter().all(Option::is_some);
    let mut hit: Vec<usize> = images.iter().flatten().copied().collect();
    hit.sort();
    hit.dedup();
    let injective = all_found && hit.len() == images.len();
    let surjective = hit.len() == fcats.len();
    for cat in &fcats {
        let down = from_f(&conv, cat)?;
        if !plain.contains(&down) || to_f(&conv, &down)? != *cat {
            round_trip = false;
        }
    }
    Ok(AgreementReport {
        objects: graph.n_obj,
        e_categories: plain.len(),
        f_categories: fcats.len(),
        round_trip,
        injective,
        surjective,
        passed: round_trip && injective && surjective,
    })
}

use mtk_core::base::{all_functions, families_up_to, FamFn, Family, FinFn, Label, Sorts};
use mtk_core::error::Result;
use mtk_core::monad::{check_monad_laws, Monad};
use mtk_core::multicat::{m1, m3, m4, random_multicat, semigroup_operad, Multicat};
use mtk_core::multitensor::{
    check_distributive, check_pathlike, ecat_check, ecat_enumerate, mt_check_axioms, tbar, CatTensor, ComposeFunctor,
    ConstantFunctor, ECategory, EGraph, Gamma, GraphFunctor, GraphMor, IdentityFunctor, Multitensor, TensorMap,
    VGraph,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fam(sorts: &Sorts, sizes: &[usize]) -> Family {
    Family::of_sizes(sorts, sizes).unwrap()
}

/// `|E_n(xs)(C)|` read off the coproduct-of-products formula by counting
/// multimaps of each source directly from the multicategory.
fn formula_count(mc: &Multicat, sizes: &[Vec<usize>], c: usize) -> usize {
    let n = sizes.len();
    mc.ops()
        .iter()
        .filter(|op| op.tgt == c && op.src.len() == n)
        .map(|op| op.src.iter().enumerate().map(|(i, &s)| sizes[i][s]).product::<usize>())
        .sum()
}

/// Every tuple of families with at most `bound` atoms per sort, of every
/// length up to `max_len`.
fn tuples(sorts: &Sorts, bound: usize, max_len: usize) -> Vec<Vec<Family>> {
    let fams = families_up_to(sorts, bound);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Family>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|t| {
                fams.iter().map(move |f| {
                    let mut t = t.clone();
                    t.push(f.clone());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn m3_binary_tensor_counts() {
    let e = CatTensor::new(&m3()).unwrap();
    let x = fam(e.sorts(), &[2, 0]);
    let y = fam(e.sorts(), &[3, 0]);
    let exy = e.eval(&[x, y]).unwrap();
    let sizes = vec![vec![2, 0], vec![3, 0]];
    assert_eq!(exy.part(1).len(), formula_count(e.multicat(), &sizes, 1));
    assert_eq!(exy.part(1).len(), 6);
    assert_eq!(exy.part(0).len(), 0);
}

#[test]
fn semigroup_tensor_is_cartesian_product() {
    let e = CatTensor::new(&semigroup_operad(3)).unwrap();
    for sizes in [vec![2], vec![2, 3], vec![1, 2, 2], vec![3, 0, 2]] {
        let xs: Vec<Family> = sizes.iter().map(|&n| fam(e.sorts(), &[n])).collect();
        let ex = e.eval(&xs).unwrap();
        assert_eq!(ex.total(), sizes.iter().product::<usize>());
    }
}

#[test]
fn unary_parts_of_fixtures() {
    let sg = CatTensor::new(&m1()).unwrap().unary_part();
    let m4e = CatTensor::new(&m4()).unwrap().unary_part();
    let m3e = CatTensor::new(&m3()).unwrap().unary_part();
    for n in 0..=3 {
        let s1 = Sorts::names(&["*".to_string()]);
        assert_eq!(sg.apply(&fam(&s1, &[n])).unwrap().total(), n);
        let sc = Sorts::names(&["c".to_string()]);
        assert_eq!(m4e.apply(&fam(&sc, &[n])).unwrap().total(), 2 * n);
        let s3 = m3e.tensor().sorts().clone();
        assert_eq!(m3e.apply(&fam(&s3, &[n, 1])).unwrap().sizes(), vec![n, 1]);
    }
    // the identity monad: η is a bijection
    let x = fam(sg.tensor().sorts(), &[3]);
    assert!(sg.eta(&x).unwrap().is_bijection());
}

#[test]
fn axioms_hold_for_fixture_tensors() {
    for mc in [m1(), m3(), m4()] {
        let e = CatTensor::new(&mc).unwrap();
        let bound = if mc.objects().len() > 1 { 1 } else { 2 };
        let rep = mt_check_axioms(&e, &tuples(e.sorts(), bound, mc.arity_bound())).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
        assert!(rep.assoc_instances > 0);
    }
}

#[test]
fn tilde_unary_part_is_a_monad_and_a_multitensor() {
    let e = CatTensor::new(&m4()).unwrap();
    let t = e.tilde_unary();
    let rep = mt_check_axioms(&t, &tuples(t.sorts(), 2, 2)).unwrap();
    assert!(rep.passed, "{:?}", rep.violations);
    let objs = families_up_to(t.sorts(), 2);
    let x = fam(t.sorts(), &[2]);
    let maps: Vec<FamFn> = all_functions(x.part(0), x.part(0))
        .into_iter()
        .map(|f| FamFn::new(x.clone(), x.clone(), vec![f]).unwrap())
        .collect();
    let laws = check_monad_laws(&t.unary_part(), &objs, &maps).unwrap();
    assert!(laws.passed, "{:?}", laws.violations);
}

#[test]
fn tilde_unary_is_empty_above_arity_one() {
    let e = CatTensor::new(&m1()).unwrap();
    let t = e.tilde_unary();
    let z = fam(e.sorts(), &[2]);
    assert!(t.eval(&[z.clone(), z.clone()]).unwrap().is_empty());
    assert!(t.eval(&[z.clone(), z.clone(), z.clone()]).unwrap().is_empty());
    assert_eq!(t.eval(std::slice::from_ref(&z)).unwrap(), e.eval(std::slice::from_ref(&z)).unwrap());
    let psi = TensorMap::tilde_inclusion(&e);
    assert_eq!(psi.component(std::slice::from_ref(&z)).unwrap(), FamFn::identity(&e.eval(std::slice::from_ref(&z)).unwrap()));
    assert!(psi.check(&tuples(e.sorts(), 2, 3)).unwrap().is_empty());
}

/// The semigroup tensor with σ at `[[X, Y]]` followed by swapping the two
/// coordinates whenever `X = Y`.
struct SwappedSubst(CatTensor);

impl Multitensor for SwappedSubst {
    type Obj = Family;

    fn name(&self) -> String {
        "swapped".into()
    }
    fn arity_bound(&self) -> usize {
        self.0.arity_bound()
    }
    fn carrier<'a>(&self, x: &'a Family) -> &'a Family {
        x
    }
    fn eval(&self, xs: &[Family]) -> Result<Family> {
        self.0.eval(xs)
    }
    fn fmap(&self, xs: &[Family], ys: &[Family], fs: &[FamFn]) -> Result<FamFn> {
        self.0.fmap(xs, ys, fs)
    }
    fn unit(&self, x: &Family) -> Result<FamFn> {
        self.0.unit(x)
    }
    fn subst(&self, xss: &[Vec<Family>]) -> Result<FamFn> {
        let s = self.0.subst(xss)?;
        if xss.len() == 1 && xss[0].len() == 2 && xss[0][0] == xss[0][1] {
            let e = &self.0;
            let swap = FamFn::from_labels(s.cod(), s.cod(), |_, l| {
                let (op, args) = e.parse(l)?;
                Ok(e.element(op, vec![args[1].clone(), args[0].clone()]))
            })?;
            return s.then(&swap);
        }
        Ok(s)
    }
    fn morphisms(&self, a: &Family, b: &Family, cap: u128) -> Result<Vec<FamFn>> {
        self.0.morphisms(a, b, cap)
    }
}

#[test]
fn corrupted_substitution_is_reported() {
    let e = SwappedSubst(CatTensor::new(&semigroup_operad(2)).unwrap());
    let z = fam(e.0.sorts(), &[2]);
    let rep = mt_check_axioms(&e, &[vec![z.clone(), z.clone()]]).unwrap();
    assert!(!rep.passed);
    assert!(rep.violations.iter().any(|v| v.starts_with("left unit fails at arity 2")), "{:?}", rep.violations);
    let w = fam(e.0.sorts(), &[1]);
    assert!(mt_check_axioms(&e, &[vec![z, w]]).unwrap().passed);
}

#[test]
fn gamma_on_a_two_step_sequence() {
    let e = CatTensor::new(&semigroup_operad(2)).unwrap();
    let g = Gamma::new(&e);
    let z1 = fam(e.sorts(), &[2]);
    let z2 = fam(e.sorts(), &[1]);
    let x = VGraph::sequence(e.sorts(), &[z1.clone(), z2.clone()]).unwrap();
    let gx = g.apply_graph(&x).unwrap();
    assert_eq!(gx.hom(0, 2).total(), 2);
    assert!(gx.hom(1, 0).is_empty());
    let h01 = gx.hom(0, 1);
    let e1 = e.eval(&[z1]).unwrap();
    let stripped: Vec<Label> = h01.part(0).labels().iter().map(|l| l.as_pair().unwrap().1.clone()).collect();
    assert_eq!(stripped, e1.part(0).labels().to_vec());
    assert_eq!(tbar(&g, e.sorts(), &[fam(e.sorts(), &[2]), z2]).unwrap().total(), 2);
}

#[test]
fn gamma_rejects_backward_homs() {
    let e = CatTensor::new(&m1()).unwrap();
    let x = VGraph::from_homs(2, e.sorts(), |a, b| fam(e.sorts(), &[usize::from(b < a)])).unwrap();
    assert!(Gamma::new(&e).apply_graph(&x).is_err());
}

fn sequence_samples(vsorts: &Sorts, bound: usize, max_len: usize) -> Vec<Vec<Family>> {
    tuples(vsorts, bound, max_len)
}

fn gamma_law_data(e: &CatTensor, bound: usize) -> (Vec<Family>, Vec<FamFn>) {
    let mut objs = Vec::new();
    let mut maps = Vec::new();
    for zs in sequence_samples(e.sorts(), bound, 2) {
        objs.push(VGraph::sequence(e.sorts(), &zs).unwrap().family().clone());
    }
    let a = fam(e.sorts(), &vec![2; e.sorts().len()]);
    let b = fam(e.sorts(), &vec![1; e.sorts().len()]);
    for f in e.morphisms(&a, &a, 1000).unwrap().into_iter().take(6) {
        for h in e.morphisms(&a, &b, 1000).unwrap() {
            maps.push(GraphMor::sequence(e.sorts(), &[f.clone(), h]).unwrap().to_famfn().unwrap());
        }
    }
    (objs, maps)
}

#[test]
fn gamma_monad_laws() {
    for mc in [semigroup_operad(2), m4()] {
        let e = CatTensor::new(&mc).unwrap();
        let (objs, maps) = gamma_law_data(&e, 2);
        let rep = check_monad_laws(&Gamma::new(&e), &objs, &maps).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
    }
}

#[test]
fn gamma_multiplication_concatenates() {
    let e = CatTensor::new(&semigroup_operad(2)).unwrap();
    let g = Gamma::new(&e);
    let z = fam(e.sorts(), &[1]);
    let x = VGraph::sequence(e.sorts(), &[z.clone(), z.clone()]).unwrap();
    let mu = g.mu(x.family()).unwrap();
    let ttx = VGraph::of_family(e.sorts(), mu.dom()).unwrap();
    // the element over the path 0 < 2 built from the two unit paths
    let s = ttx.sort_index(0, 2, 0);
    let mut found = 0;
    for (i, l) in mu.dom().part(s).labels().iter().enumerate() {
        let out = mu.cod().part(s).label(mu.apply(s, i));
        let (path, elem) = out.as_pair().unwrap();
        assert_eq!(path, &Label::Tuple(vec![Label::Int(0), Label::Int(1), Label::Int(2)]));
        let (_, args) = e.parse(elem).unwrap();
        assert_eq!(args.len(), 2);
        if l.as_pair().unwrap().0 == &Label::Tuple(vec![Label::Int(0), Label::Int(1), Label::Int(2)]) {
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn tbar_examples() {
    let e = CatTensor::new(&semigroup_operad(2)).unwrap();
    let z1 = fam(e.sorts(), &[2]);
    let z2 = fam(e.sorts(), &[3]);
    let g = Gamma::new(&e);
    assert_eq!(tbar(&g, e.sorts(), &[z1.clone(), z2.clone()]).unwrap().total(), 6);
    let gt = Gamma::new(&e.tilde_unary());
    assert!(tbar(&gt, e.sorts(), &[z1.clone(), z2.clone()]).unwrap().is_empty());
    assert_eq!(tbar(&IdentityFunctor, e.sorts(), std::slice::from_ref(&z1)).unwrap(), z1);
}

fn forward_samples(vsorts: &Sorts) -> Vec<VGraph> {
    let mut out: Vec<VGraph> =
        sequence_samples(vsorts, 2, 2).iter().map(|zs| VGraph::sequence(vsorts, zs).unwrap()).collect();
    for n02 in 0..=1 {
        out.push(
            VGraph::from_homs(3, vsorts, |a, b| match (a, b) {
                (0, 1) => fam(vsorts, &vec![2; vsorts.len()]),
                (1, 2) => fam(vsorts, &vec![1; vsorts.len()]),
                (0, 2) => fam(vsorts, &vec![n02; vsorts.len()]),
                _ => Family::empty(vsorts),
            })
            .unwrap(),
        );
    }
    out
}

fn pairs(vsorts: &Sorts) -> Vec<(Family, Family)> {
    vec![(fam(vsorts, &[1]), fam(vsorts, &[1])), (fam(vsorts, &[2]), fam(vsorts, &[0])), (fam(vsorts, &[1]), fam(vsorts, &[2]))]
}

#[test]
fn gamma_is_pathlike_and_distributive() {
    for mc in [semigroup_operad(2), m4()] {
        let e = CatTensor::new(&mc).unwrap();
        let g = Gamma::new(&e);
        let rep = check_pathlike(&g, &forward_samples(e.sorts())).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        let rep = check_distributive(&g, e.sorts(), &sequence_samples(e.sorts(), 2, 2), &pairs(e.sorts())).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!(rep.instances > 0);
    }
}

#[test]
fn composite_of_gammas_is_pathlike_and_distributive() {
    let e = CatTensor::new(&semigroup_operad(2)).unwrap();
    let gg = ComposeFunctor { outer: Gamma::new(&e), inner: Gamma::new(&e) };
    let rep = check_pathlike(&gg, &forward_samples(e.sorts())).unwrap();
    assert!(rep.passed, "{:?}", rep.failures);
    let rep = check_distributive(&gg, e.sorts(), &sequence_samples(e.sorts(), 1, 2), &pairs(e.sorts())).unwrap();
    assert!(rep.passed, "{:?}", rep.failures);
}

#[test]
fn constant_functor_is_not_pathlike() {
    let e = CatTensor::new(&m1()).unwrap();
    let k = ConstantFunctor { hom: fam(e.sorts(), &[2]) };
    let rep = check_pathlike(&k, &forward_samples(e.sorts())).unwrap();
    assert!(!rep.passed);
    assert!(rep.failures.iter().any(|f| f.starts_with("hom (0,2)")), "{:?}", rep.failures);
}

#[test]
fn empty_argument_gives_empty_value() {
    for mc in [m1(), m3(), m4()] {
        let e = CatTensor::new(&mc).unwrap();
        let z = fam(e.sorts(), &vec![2; e.sorts().len()]);
        let empty = Family::empty(e.sorts());
        for n in 1..=mc.arity_bound() {
            for i in 0..n {
                let mut xs = vec![z.clone(); n];
                xs[i] = empty.clone();
                assert!(e.eval(&xs).unwrap().is_empty());
            }
        }
    }
}

/// Associative binary operations on a two-element set, by brute force.
fn associative_ops_on_two() -> usize {
    (0..16u32)
        .filter(|code| {
            let op = |a: u32, b: u32| (code >> (2 * a + b)) & 1;
            (0..8u32).all(|t| {
                let (a, b, c) = (t & 1, (t >> 1) & 1, (t >> 2) & 1);
                op(op(a, b), c) == op(a, op(b, c))
            })
        })
        .count()
}

#[test]
fn semigroup_categories_on_one_object_are_semigroups() {
    let e = CatTensor::new(&semigroup_operad(3)).unwrap();
    let graph = EGraph::new(1, |_, _| fam(e.sorts(), &[2]));
    let cats = ecat_enumerate(&e, &graph, 1 << 20).unwrap();
    assert_eq!(cats.len(), associative_ops_on_two());
    assert_eq!(cats.len(), 8);
    for c in &cats {
        assert!(ecat_check(&e, c).unwrap().passed);
    }
}

#[test]
fn empty_graph_has_one_structure() {
    let e = CatTensor::new(&m1()).unwrap();
    let graph: EGraph<Family> = EGraph::new(0, |_, _| unreachable!());
    let cats = ecat_enumerate(&e, &graph, 1000).unwrap();
    assert_eq!(cats.len(), 1);
    assert!(cats[0].kappa.is_empty());
}

#[test]
fn corrupted_composition_is_reported() {
    let e = CatTensor::new(&semigroup_operad(3)).unwrap();
    let graph = EGraph::new(1, |_, _| fam(e.sorts(), &[2]));
    let cats = ecat_enumerate(&e, &graph, 1 << 20).unwrap();
    let mut bad: ECategory<Family> = cats[0].clone();
    let k2 = bad.kappa.get(&vec![0, 0, 0]).unwrap().clone();
    let x = fam(e.sorts(), &[2]);
    let flip = FamFn::new(x.clone(), x.clone(), vec![FinFn::new(x.part(0).clone(), x.part(0).clone(), vec![1, 0]).unwrap()]).unwrap();
    bad.kappa.insert(vec![0, 0, 0], k2.then(&flip).unwrap());
    let rep = ecat_check(&e, &bad).unwrap();
    assert!(!rep.passed);
    assert!(rep.violations.iter().any(|v| v.contains("[0, 0, 0, 0]")), "{:?}", rep.violations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unary_tensor_matches_formula(seed in any::<u64>(), sizes in prop::collection::vec(0usize..3, 2)) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = CatTensor::new(&mc).unwrap();
        let sizes: Vec<usize> = sizes[..e.sorts().len()].to_vec();
        let x = fam(e.sorts(), &sizes);
        let e1 = e.eval(&[x]).unwrap();
        for c in 0..e.sorts().len() {
            prop_assert_eq!(e1.part(c).len(), formula_count(&mc, std::slice::from_ref(&sizes), c));
        }
    }

    #[test]
    fn random_tensors_satisfy_axioms(seed in any::<u64>()) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = CatTensor::new(&mc).unwrap();
        let bound = if mc.objects().len() > 1 { 1 } else { 2 };
        let rep = mt_check_axioms(&e, &tuples(e.sorts(), bound, mc.arity_bound().min(3))).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.violations);
    }

    #[test]
    fn gamma_is_deterministic(seed in any::<u64>()) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = CatTensor::new(&mc).unwrap();
        let zs = vec![fam(e.sorts(), &vec![1; e.sorts().len()]); mc.arity_bound().min(2)];
        let x = VGraph::sequence(e.sorts(), &zs).unwrap();
        prop_assert_eq!(Gamma::new(&e).apply_graph(&x).unwrap(), Gamma::new(&e).apply_graph(&x).unwrap());
    }
}

use mtk_core::base::{families_up_to, FamFn, Family, UnionFind};
use mtk_core::lifting::{
    check_free_components, check_lift_theorem, compare_routes, e1_algebras, lift_lax_functor, lift_multitensor,
    lift_object, lift_substitution, lift_via_monad_route, spans, LiftTrace,
};
use mtk_core::monad::{comparison_iso, free_algebra, Algebra, CoeqConfig};
use mtk_core::multicat::{m1, m3, m4, m4_collapsed, random_multicat, semigroup_operad, MulticatFunctor};
use mtk_core::multitensor::{mt_check_axioms, CatTensor, EGraph, Multitensor, TensorMap};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tensor(mc: &mtk_core::multicat::Multicat) -> CatTensor {
    CatTensor::new(mc).unwrap()
}

/// An `E_1`-algebra on `0..n` (single sort) where the unary multimap named
/// `op` acts by `act(op, x)`.
fn alg(e: &CatTensor, n: usize, act: impl Fn(&str, usize) -> usize) -> Algebra {
    let x = Family::of_sizes(e.sorts(), &[n]).unwrap();
    let e1 = e.eval_fam(std::slice::from_ref(&x)).unwrap();
    let action = FamFn::from_labels(&e1, &x, |_, l| {
        let (op, args) = e.parse(l)?;
        let i = x.part(0).index_of(&args[0]).unwrap();
        Ok(x.part(0).label(act(&e.multicat().op(op).name, i)).clone())
    })
    .unwrap();
    Algebra::new(&e.unary_part(), x, action).unwrap()
}

/// `X = {0,1}` with `e` constant at 0 and `Y = {0,1,2}` with `e` the identity.
fn m4_pair(e: &CatTensor) -> Vec<Algebra> {
    vec![alg(e, 2, |op, x| if op == "e" { 0 } else { x }), alg(e, 3, |_, y| y)]
}

/// Classes of `X × Y` under `(x, y) ~ (ax, by)` for unary `a, b`, computed
/// directly from the actions as index tables.
fn binary_oracle(xs: &[usize], ex: &[usize], ys: &[usize], ey: &[usize]) -> usize {
    let (nx, ny) = (xs.len(), ys.len());
    let mut uf = UnionFind::new(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            for (a, b) in [(x, ey[y]), (ex[x], y), (ex[x], ey[y])] {
                uf.union(x * ny + y, a * ny + b);
            }
        }
    }
    let mut roots: Vec<usize> = (0..nx * ny).map(|i| uf.find(i)).collect();
    roots.sort();
    roots.dedup();
    roots.len()
}

#[test]
fn m4_binary_lift_has_three_elements_by_both_routes() {
    let e = tensor(&m4());
    let xs = m4_pair(&e);
    let cfg = CoeqConfig::default();
    let explicit = lift_object(&e, &xs, &cfg).unwrap();
    let monad = lift_via_monad_route(&e, &xs, &cfg).unwrap();
    assert_eq!(binary_oracle(&[0, 1], &[0, 0], &[0, 1, 2], &[0, 1, 2]), 3);
    assert_eq!(explicit.algebra.carrier.total(), 3);
    assert_eq!(monad.algebra.carrier.total(), 3);
    let cmp = compare_routes(&e, &xs, &cfg).unwrap();
    assert_eq!(cmp.sizes, vec![3]);
    assert!(explicit.algebra.check(&e.unary_part()).unwrap().is_empty());
    assert!(monad.algebra.check(&e.unary_part()).unwrap().is_empty());
}

#[test]
fn m4_binary_lift_matches_oracle_on_all_small_algebras() {
    let e = tensor(&m4());
    let cfg = CoeqConfig::default();
    let fams = families_up_to(e.sorts(), 2);
    for fx in &fams {
        for fy in &fams {
            for x in e1_algebras(&e, fx, 1 << 16).unwrap() {
                for y in e1_algebras(&e, fy, 1 << 16).unwrap() {
                    let table = |a: &Algebra| -> (Vec<usize>, Vec<usize>) {
                        let n = a.carrier.total();
                        let tab: Vec<usize> = (0..n)
                            .map(|i| {
                                let l = e.element(e.multicat().find_op(&[0], 0, "e").unwrap(), vec![a.carrier.part(0).label(i).clone()]);
                                a.carrier.part(0).index_of(a.action.apply_label(0, &l).unwrap()).unwrap()
                            })
                            .collect();
                        ((0..n).collect(), tab)
                    };
                    let (dx, tx) = table(&x);
                    let (dy, ty) = table(&y);
                    let got = lift_object(&e, &[x.clone(), y.clone()], &cfg).unwrap();
                    assert_eq!(got.algebra.carrier.total(), binary_oracle(&dx, &tx, &dy, &ty));
                }
            }
        }
    }
}

#[test]
fn unary_lift_is_the_algebra_itself() {
    let e = tensor(&m4());
    let lm = lift_multitensor(&e, &CoeqConfig::default()).unwrap();
    for x in m4_pair(&e) {
        assert_eq!(lm.eval(std::slice::from_ref(&x)).unwrap(), x);
        assert_eq!(lm.unit(&x).unwrap(), FamFn::identity(&x.carrier));
    }
}

#[test]
fn lift_of_free_algebras_is_the_tensor_of_generators() {
    for mc in [m1(), m3(), m4()] {
        let e = tensor(&mc);
        let fams = families_up_to(e.sorts(), 1);
        for z1 in &fams {
            for z2 in &fams {
                let zs = vec![z1.clone(), z2.clone()];
                let free: Vec<Algebra> = zs.iter().map(|z| free_algebra(&e.unary_part(), z).unwrap()).collect();
                let got = lift_object(&e, &free, &CoeqConfig::default()).unwrap();
                assert_eq!(got.algebra.carrier.sizes(), e.eval_fam(&zs).unwrap().sizes());
            }
        }
    }
}

#[test]
fn trivial_unary_part_gives_bijective_basic_quotient() {
    let e = tensor(&semigroup_operad(3));
    let xs: Vec<Algebra> = [1, 2, 2].iter().map(|&n| alg(&e, n, |_, x| x)).collect();
    let r = lift_object(&e, &xs, &CoeqConfig::default()).unwrap();
    assert!(r.trace.step(0, r.trace.full()).q.is_bijection());
    assert_eq!(r.algebra.carrier.total(), 4);
}

fn algebra_tuples(e: &CatTensor, bound: usize, max_len: usize) -> Vec<Vec<Algebra>> {
    let algs: Vec<Algebra> =
        families_up_to(e.sorts(), bound).iter().flat_map(|f| e1_algebras(e, f, 1 << 16).unwrap()).collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Algebra>> = vec![Vec::new()];
    for _ in 0..max_len {
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
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn lifted_multitensors_satisfy_the_axioms() {
    for (mc, bound) in [(m1(), 2), (m3(), 1), (m4(), 2)] {
        let e = tensor(&mc);
        let lm = lift_multitensor(&e, &CoeqConfig::default()).unwrap();
        let tuples = algebra_tuples(&e, bound, mc.arity_bound());
        let rep = mt_check_axioms(&lm, &tuples).unwrap();
        assert!(rep.passed, "{}: {:?}", mc.objects().join(","), rep.violations);
        assert!(rep.assoc_instances > 0);
    }
}

#[test]
fn lifted_values_are_algebras_and_projections_are_algebra_maps() {
    let e = tensor(&m4());
    let t = e.unary_part();
    let lm = lift_multitensor(&e, &CoeqConfig::default()).unwrap();
    for xs in algebra_tuples(&e, 2, 2) {
        let (a, p) = lm.lifted(&xs).unwrap();
        assert!(a.check(&t).unwrap().is_empty());
        assert!(p.is_surjective());
    }
}

#[test]
fn trace_satisfies_its_defining_equations() {
    let e = tensor(&m4());
    let cfg = CoeqConfig { fast_path: false, ..CoeqConfig::default() };
    for xs in algebra_tuples(&e, 2, 2) {
        let mut tr = LiftTrace::start(&e, &xs, &cfg).unwrap();
        tr.run_to_stabilisation(&e, cfg.extra_steps).unwrap();
        assert!(tr.check_equations(&e).unwrap().is_empty());
        for s in spans(xs.len()) {
            assert!(tr.stage(s).unwrap() <= 1);
        }
        let ex = tr.export();
        assert_eq!(ex.partitions.len(), 1 << (xs.len() - 1));
    }
}

#[test]
fn fast_path_and_sequential_construction_agree() {
    let e = tensor(&m4());
    let slow = CoeqConfig { fast_path: false, ..CoeqConfig::default() };
    let fast = CoeqConfig::default();
    for xs in algebra_tuples(&e, 2, 2) {
        let a = lift_object(&e, &xs, &fast).unwrap();
        let b = lift_object(&e, &xs, &slow).unwrap();
        assert!(a.trace.export().preserves_basic);
        let h = comparison_iso(&e.unary_part(), (&a.algebra, &a.proj), (&b.algebra, &b.proj)).unwrap();
        assert!(h.is_bijection());
    }
}

#[test]
fn unary_nesting_gives_identity_substitution() {
    let e = tensor(&m4());
    let xs = m4_pair(&e);
    let cfg = CoeqConfig::default();
    let r = lift_substitution(&e, &[vec![xs[0].clone()], vec![xs[1].clone()]], &cfg).unwrap();
    assert_eq!(r.map, FamFn::identity(r.map.dom()));
    let r = lift_substitution(&e, std::slice::from_ref(&xs), &cfg).unwrap();
    assert_eq!(r.map, FamFn::identity(r.map.dom()));
}

#[test]
fn lift_theorem_on_one_object_semigroups() {
    let e = tensor(&m1());
    let graph = EGraph::new(1, |_, _| Family::of_sizes(e.sorts(), &[2]).unwrap());
    let rep = check_lift_theorem(&e, &graph, &CoeqConfig::default(), 1 << 20).unwrap();
    assert_eq!((rep.e_categories, rep.lifted_categories), (8, 8));
    assert!(rep.passed);
}

#[test]
fn lift_theorem_on_m4() {
    let e = tensor(&m4());
    for n in 1..=2 {
        let graph = EGraph::new(1, |_, _| Family::of_sizes(e.sorts(), &[n]).unwrap());
        let rep = check_lift_theorem(&e, &graph, &CoeqConfig::default(), 1 << 20).unwrap();
        assert_eq!(rep.e_categories, rep.lifted_categories);
        assert!(rep.e_categories > 0);
        assert!(rep.passed, "{rep:?}");
    }
}

#[test]
fn lift_theorem_on_empty_graph() {
    let e = tensor(&m1());
    let graph: EGraph<Family> = EGraph::new(0, |_, _| unreachable!());
    let rep = check_lift_theorem(&e, &graph, &CoeqConfig::default(), 1000).unwrap();
    assert_eq!((rep.e_categories, rep.lifted_categories), (1, 1));
    assert!(rep.passed);
}

fn collapse_functor() -> TensorMap {
    let k = MulticatFunctor::new(m4(), m4_collapsed(), |n| if n == "e" { "id".into() } else { n.into() }).unwrap();
    assert!(k.check().is_empty());
    TensorMap::from_functor(&k).unwrap()
}

#[test]
fn lax_lift_at_free_algebras_is_the_original_map() {
    let psi = collapse_functor();
    let lift = lift_lax_functor(&psi, &CoeqConfig::default()).unwrap();
    let fams = families_up_to(psi.source.sorts(), 2);
    let tuples: Vec<Vec<Family>> =
        fams.iter().flat_map(|a| fams.iter().map(move |b| vec![a.clone(), b.clone()])).chain(fams.iter().map(|a| vec![a.clone()])).collect();
    let rep = check_free_components(&lift, &tuples).unwrap();
    assert!(rep.passed, "{:?}", rep.failures);
}

#[test]
fn identity_lax_functor_lifts_to_identity() {
    let e = tensor(&m4());
    let psi = TensorMap::from_functor(&MulticatFunctor::identity(&m4())).unwrap();
    let lift = lift_lax_functor(&psi, &CoeqConfig::default()).unwrap();
    for xs in algebra_tuples(&e, 2, 2) {
        for x in &xs {
            assert_eq!(&lift.psi1_star(x).unwrap(), x);
        }
        let c = lift.psi_prime(&xs).unwrap();
        assert_eq!(c, FamFn::identity(c.dom()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree_on_random_multicategories(seed in any::<u64>(), pick in prop::collection::vec(any::<usize>(), 3)) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = tensor(&mc);
        let tuples = algebra_tuples(&e, 1, 1);
        let n = mc.arity_bound().min(2);
        let xs: Vec<Algebra> = pick[..n].iter().map(|p| tuples[p % tuples.len()][0].clone()).collect();
        let cmp = compare_routes(&e, &xs, &CoeqConfig::default()).unwrap();
        prop_assert_eq!(cmp.sizes, lift_object(&e, &xs, &CoeqConfig::default()).unwrap().algebra.carrier.sizes());
    }

    #[test]
    fn lift_is_deterministic(seed in any::<u64>()) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = tensor(&mc);
        let tuples = algebra_tuples(&e, 1, 1);
        let xs: Vec<Algebra> = tuples.iter().take(mc.arity_bound().min(2)).map(|t| t[0].clone()).collect();
        let a = lift_object(&e, &xs, &CoeqConfig::default()).unwrap();
        let b = lift_object(&e, &xs, &CoeqConfig::default()).unwrap();
        prop_assert_eq!(a.algebra, b.algebra);
        prop_assert_eq!(a.trace.export(), b.trace.export());
    }

    #[test]
    fn random_lifts_satisfy_the_axioms(seed in any::<u64>()) {
        let mc = random_multicat(&mut ChaCha8Rng::seed_from_u64(seed));
        let e = tensor(&mc);
        let lm = lift_multitensor(&e, &CoeqConfig::default()).unwrap();
        let rep = mt_check_axioms(&lm, &algebra_tuples(&e, 1, mc.arity_bound().min(2))).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.violations);
    }
}

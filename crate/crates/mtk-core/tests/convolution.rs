use mtk_core::base::{families_up_to, kan_free, Copresheaf, FamFn, Family, UnionFind};
use mtk_core::convolution::{coend_tensor, convolution_vs_lift, ecat_ef_agreement, promonoidal_check, Convolution};
use mtk_core::lifting::{e1_algebras, lift_object};
use mtk_core::monad::{Algebra, CoeqConfig};
use mtk_core::multicat::{
    discrete, m1, m3, m4, monoid_multicat, nonpromonoidal, random_multicat, semigroup_operad, Multicat,
};
use mtk_core::multitensor::{mt_check_axioms, CatTensor, EGraph, Multitensor};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn copresheaves(conv: &Convolution, bound: usize) -> Vec<Copresheaf> {
    families_up_to(conv.tensor().sorts(), bound)
        .iter()
        .flat_map(|f| e1_algebras(conv.tensor(), f, 1 << 16).unwrap())
        .map(|a| conv.copresheaf_of(&a).unwrap())
        .collect()
}

/// A copresheaf on one object with `e` acting by the given table.
fn m4_copresheaf(conv: &Convolution, e_table: &[usize]) -> Copresheaf {
    let e = conv.tensor();
    let x = Family::of_sizes(e.sorts(), &[e_table.len()]).unwrap();
    let e1 = e.eval_fam(std::slice::from_ref(&x)).unwrap();
    let action = FamFn::from_labels(&e1, &x, |_, l| {
        let (op, args) = e.parse(l)?;
        let i = x.part(0).index_of(&args[0]).unwrap();
        let j = if e.multicat().op(op).name == "e" { e_table[i] } else { i };
        Ok(x.part(0).label(j).clone())
    })
    .unwrap();
    conv.copresheaf_of(&Algebra::new(&e.unary_part(), x, action).unwrap()).unwrap()
}

#[test]
fn identity_linear_coend_is_the_plain_tensor() {
    for mc in [m1(), m3(), discrete(&["a", "b"])] {
        let conv = Convolution::new(&mc).unwrap();
        let cs = copresheaves(&conv, 2);
        for x in &cs {
            for y in &cs {
                let r = conv.coend(&[x.clone(), y.clone()]);
                if mc.arity_bound() < 2 {
                    assert!(r.is_err());
                    continue;
                }
                let r = r.unwrap();
                assert!(r.presentation.proj.is_bijection());
                assert_eq!(r.value.family().sizes(), conv.tensor().eval_fam(&[x.family(), y.family()]).unwrap().sizes());
            }
        }
    }
}

#[test]
fn m3_binary_convolution_counts() {
    let mc = m3();
    let conv = Convolution::new(&mc).unwrap();
    let sorts = conv.tensor().sorts().clone();
    let x = conv.copresheaf_of(&Algebra::unchecked(Family::of_sizes(&sorts, &[2, 0]).unwrap(), id_action(&conv, &[2, 0]))).unwrap();
    let y = conv.copresheaf_of(&Algebra::unchecked(Family::of_sizes(&sorts, &[3, 0]).unwrap(), id_action(&conv, &[3, 0]))).unwrap();
    let r = coend_tensor(&mc, &[x, y]).unwrap();
    // only identities are linear, so no identifications: one class per (b, x, y)
    let ops_cc_d = mc.ops().iter().filter(|o| o.src == vec![0, 0] && o.tgt == 1).count();
    assert_eq!(r.value.set(1).len(), ops_cc_d * 2 * 3);
    assert_eq!(r.value.set(1).len(), 6);
    assert_eq!(r.value.set(0).len(), 0);
}

fn id_action(conv: &Convolution, sizes: &[usize]) -> FamFn {
    let e = conv.tensor();
    let x = Family::of_sizes(e.sorts(), sizes).unwrap();
    let e1 = e.eval_fam(std::slice::from_ref(&x)).unwrap();
    FamFn::from_labels(&e1, &x, |_, l| Ok(e.parse(l)?.1[0].clone())).unwrap()
}

/// Classes of `X × Y` under the moves `(x, y) ~ (ex, y) ~ (x, ey)`.
fn dinaturality_oracle(ex: &[usize], ey: &[usize]) -> usize {
    let ny = ey.len();
    let mut uf = UnionFind::new(ex.len() * ny);
    for x in 0..ex.len() {
        for y in 0..ny {
            uf.union(x * ny + y, ex[x] * ny + y);
            uf.union(x * ny + y, x * ny + ey[y]);
        }
    }
    let mut roots: Vec<usize> = (0..ex.len() * ny).map(|i| uf.find(i)).collect();
    roots.sort();
    roots.dedup();
    roots.len()
}

#[test]
fn m4_binary_convolution_has_three_classes() {
    let conv = Convolution::new(&m4()).unwrap();
    let x = m4_copresheaf(&conv, &[0, 0]);
    let y = m4_copresheaf(&conv, &[0, 1, 2]);
    let r = conv.coend(&[x, y]).unwrap();
    assert_eq!(dinaturality_oracle(&[0, 0], &[0, 1, 2]), 3);
    assert_eq!(r.value.set(0).len(), 3);
    assert!(r.value.check_functor().is_empty());
}

#[test]
fn coend_of_free_copresheaves_is_the_tensor_of_generators() {
    for mc in [m1(), m3(), m4()] {
        let conv = Convolution::new(&mc).unwrap();
        let fams = families_up_to(conv.tensor().sorts(), 2);
        for z1 in &fams {
            for z2 in &fams {
                let free = |z: &Family| kan_free(conv.linear(), z.parts()).unwrap().0;
                let r = conv.coend(&[free(z1), free(z2)]);
                let direct = conv.tensor().eval_fam(&[z1.clone(), z2.clone()]).unwrap();
                assert_eq!(r.unwrap().value.family().sizes(), direct.sizes());
            }
        }
    }
}

#[test]
fn promonoidal_examples() {
    assert!(promonoidal_check(&semigroup_operad(3)).unwrap().passed);
    let monoid = monoid_multicat(&["id", "e"], &[vec![0, 1], vec![1, 1]]);
    let rep = promonoidal_check(&monoid).unwrap();
    assert!(rep.passed, "{:?}", rep.failures);
    assert!(rep.instances > 0);
    let rep = promonoidal_check(&nonpromonoidal()).unwrap();
    assert!(!rep.passed);
    assert!(rep.failures.iter().any(|f| f.contains("not bijective")), "{:?}", rep.failures);
    // every multimap of m3 is either linear or the single binary b, with
    // identities as its only linear composites
    assert!(promonoidal_check(&m3()).unwrap().passed);
}

#[test]
fn convolution_matches_lift_on_fixtures() {
    let cfg = CoeqConfig::default();
    for (mc, bound, arity) in [(m4(), 2, 2), (semigroup_operad(3), 1, 3), (m3(), 1, 2)] {
        let rep = convolution_vs_lift(&mc, bound, arity, 2, &cfg).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!(rep.isos == rep.tuples && rep.tuples > 0);
    }
    let rep = convolution_vs_lift(&m4(), 2, 2, 2, &cfg).unwrap();
    assert!(rep.subst_squares > 0 && rep.naturality_checks > 0);
}

#[test]
fn semigroup_convolution_is_the_cartesian_product() {
    let mc = semigroup_operad(3);
    let conv = Convolution::new(&mc).unwrap();
    let cs = copresheaves(&conv, 2);
    for x in &cs {
        for y in &cs {
            let r = conv.coend(&[x.clone(), y.clone()]).unwrap();
            assert_eq!(r.value.set(0).len(), x.set(0).len() * y.set(0).len());
        }
    }
}

#[test]
fn convolution_satisfies_the_axioms() {
    for mc in [m4(), m1()] {
        let conv = Convolution::new(&mc).unwrap();
        let cs = copresheaves(&conv, 1);
        let mut tuples: Vec<Vec<Copresheaf>> = cs.iter().map(|x| vec![x.clone()]).collect();
        for x in &cs {
            for y in &cs {
                tuples.push(vec![x.clone(), y.clone()]);
            }
        }
        let rep = mt_check_axioms(&conv, &tuples).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
    }
}

#[test]
fn e_and_f_categories_agree() {
    let m1_graph = EGraph::new(1, |_, _| Family::of_sizes(CatTensor::new(&m1()).unwrap().sorts(), &[2]).unwrap());
    let rep = ecat_ef_agreement(&m1(), &m1_graph, 1 << 20).unwrap();
    assert_eq!((rep.e_categories, rep.f_categories), (8, 8));
    assert!(rep.passed);
    for n in 1..=2 {
        let mc = m4();
        let g = EGraph::new(1, |_, _| Family::of_sizes(CatTensor::new(&mc).unwrap().sorts(), &[n]).unwrap());
        let rep = ecat_ef_agreement(&mc, &g, 1 << 20).unwrap();
        assert_eq!(rep.e_categories, rep.f_categories);
        assert!(rep.passed, "{rep:?}");
    }
    let empty: EGraph<Family> = EGraph::new(0, |_, _| unreachable!());
    let rep = ecat_ef_agreement(&m4(), &empty, 100).unwrap();
    assert_eq!((rep.e_categories, rep.f_categories), (1, 1));
}

fn random_small(seed: u64) -> Multicat {
    random_multicat(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coend_matches_lift_on_random_multicategories(seed in any::<u64>()) {
        let mc = random_small(seed);
        let conv = Convolution::new(&mc).unwrap();
        let cs = copresheaves(&conv, 1);
        let n = mc.arity_bound().min(2);
        for x in &cs {
            let tuple: Vec<Copresheaf> = vec![x.clone(); n];
            let algs: Vec<Algebra> = tuple.iter().map(|c| conv.algebra_of(c).unwrap()).collect();
            let f = conv.coend(&tuple).unwrap();
            let l = lift_object(conv.tensor(), &algs, &CoeqConfig::default()).unwrap();
            prop_assert_eq!(f.value.family().sizes(), l.algebra.carrier.sizes());
        }
    }

    #[test]
    fn copresheaf_algebra_round_trip(seed in any::<u64>()) {
        let mc = random_small(seed);
        let conv = Convolution::new(&mc).unwrap();
        for c in copresheaves(&conv, 2) {
            let a = conv.algebra_of(&c).unwrap();
            prop_assert!(a.check(&conv.tensor().unary_part()).unwrap().is_empty());
            prop_assert_eq!(conv.copresheaf_of(&a).unwrap(), c);
        }
    }

    #[test]
    fn convolution_values_are_functors(seed in any::<u64>()) {
        let mc = random_small(seed);
        let conv = Convolution::new(&mc).unwrap();
        let cs = copresheaves(&conv, 1);
        for x in &cs {
            for y in &cs {
                if mc.arity_bound() >= 2 {
                    let v = conv.eval(&[x.clone(), y.clone()]).unwrap();
                    prop_assert!(v.check_functor().is_empty());
                }
            }
        }
    }
}

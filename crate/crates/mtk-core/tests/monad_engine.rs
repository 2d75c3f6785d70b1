use mtk_core::base::{all_functions, families_up_to, FamFn, Family, FinFn, FinSet, Label, Sorts};
use mtk_core::error::MtkError;
use mtk_core::monad::{
    alg_coeq_oracle, alg_coeq_sequential, all_monoids, check_monad_laws, check_simple_hypothesis, comparison_iso,
    free_algebra, induced_monad, phi_shriek, phi_star, random_mset_instance, Algebra, AlgebraMap, CoeqConfig,
    IdentityMonad, IdentityMorphism, MSetMonad, Monad, MonadMorphism, Monoid, MonoidHom, MonoidMorphism,
};
use mtk_core::multicat::semigroup_operad;
use mtk_core::multitensor::{CatTensor, Gamma, GraphMor, VGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set(n: usize) -> Family {
    Family::set(FinSet::range(n))
}

fn map(dom: &Family, cod: &Family, table: Vec<usize>) -> FamFn {
    FamFn::new(dom.clone(), cod.clone(), vec![FinFn::new(dom.part(0).clone(), cod.part(0).clone(), table).unwrap()])
        .unwrap()
}

fn idempotent() -> Monoid {
    Monoid::new(&["1", "s"], vec![vec![0, 1], vec![1, 1]]).unwrap()
}

fn z2() -> Monoid {
    Monoid::new(&["1", "a"], vec![vec![0, 1], vec![1, 0]]).unwrap()
}

/// The algebra maps `M × {0..gens-1} -> B` sending generator `i` to `images[i]`.
fn from_generators(t: &MSetMonad, free: &Algebra, b: &Algebra, images: &[usize]) -> FamFn {
    FamFn::from_labels(&free.carrier, &b.carrier, |_, l| {
        let (m, z) = l.as_pair().unwrap();
        let m = match m {
            Label::Name(n) => t.monoid.index_of(n).unwrap(),
            _ => unreachable!(),
        };
        let x = images[z.as_int().unwrap() as usize];
        Ok(b.carrier.part(0).label(t.act(b, 0, m, x)).clone())
    })
    .unwrap()
}

/// `{0,1,2,3}` with `s` sending `0 ↦ 2`, `1 ↦ 3` and fixing `2, 3`.
fn two_orbits(t: &MSetMonad) -> Algebra {
    t.algebra_from_table(&set(4), &[vec![vec![0, 1, 2, 3], vec![2, 3, 2, 3]]]).unwrap()
}

#[test]
fn equal_maps_stabilise_at_zero() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let free = free_algebra(&t, &set(1)).unwrap();
    let f = from_generators(&t, &free, &b, &[0]);
    let r = alg_coeq_sequential(&t, &b, &f, &f, &CoeqConfig::default()).unwrap();
    assert_eq!(r.trace.stabilised_at, Some(0));
    assert!(r.proj.is_bijection());
    let (_, op) = alg_coeq_oracle(&t, &b, &f, &f).unwrap();
    assert!(op.is_bijection());
}

#[test]
fn collapsing_two_generators_matches_the_oracle() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let free = free_algebra(&t, &set(1)).unwrap();
    let f = from_generators(&t, &free, &b, &[0]);
    let g = from_generators(&t, &free, &b, &[1]);
    let cfg = CoeqConfig { cross_check: true, ..CoeqConfig::default() };
    let r = alg_coeq_sequential(&t, &b, &f, &g, &cfg).unwrap();
    let (oa, op) = alg_coeq_oracle(&t, &b, &f, &g).unwrap();
    // by hand: 0 ~ 1 forces s0 = 2 ~ 3 = s1, leaving two classes
    assert_eq!(oa.carrier.total(), 2);
    assert_eq!(op.apply(0, 0), op.apply(0, 1));
    assert_eq!(op.apply(0, 2), op.apply(0, 3));
    assert_ne!(op.apply(0, 0), op.apply(0, 2));
    assert!(comparison_iso(&t, (&r.algebra, &r.proj), (&oa, &op)).is_ok());
    assert!(r.algebra.check(&t).unwrap().is_empty());
    assert_eq!(r.trace.stabilised_at, Some(1));
    assert!(r.trace.check_equations(&t).unwrap().is_empty());
}

#[test]
fn collapsing_everything_gives_the_terminal_algebra() {
    let t = MSetMonad::new(z2(), &Sorts::single());
    let b = t.algebra_from_table(&set(2), &[vec![vec![0, 1], vec![1, 0]]]).unwrap();
    let free = free_algebra(&t, &set(1)).unwrap();
    let f = from_generators(&t, &free, &b, &[0]);
    let g = from_generators(&t, &free, &b, &[1]);
    let (oa, _) = alg_coeq_oracle(&t, &b, &f, &g).unwrap();
    assert_eq!(oa.carrier.total(), 1);
    assert!(oa.check(&t).unwrap().is_empty());
}

#[test]
fn identity_monad_always_satisfies_the_hypothesis() {
    let t = IdentityMonad::new(&Sorts::single());
    let a = set(2);
    let b = set(3);
    for f in all_functions(a.part(0), b.part(0)) {
        for g in all_functions(a.part(0), b.part(0)) {
            let f = map(&a, &b, f.table().to_vec());
            let g = map(&a, &b, g.table().to_vec());
            assert!(check_simple_hypothesis(&t, &f, &g).unwrap().holds);
        }
    }
}

#[test]
fn free_algebra_pair_is_split_and_satisfies_the_hypothesis() {
    for monoid in all_monoids(3) {
        let t = MSetMonad::new(monoid, &Sorts::single());
        let free = free_algebra(&t, &set(2)).unwrap();
        let f = t.mu(&free.carrier).unwrap();
        let g = t.fmap(&free.action).unwrap();
        assert!(check_simple_hypothesis(&t, &f, &g).unwrap().holds);
    }
}

#[test]
fn budget_below_two_is_rejected() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let free = free_algebra(&t, &set(1)).unwrap();
    let f = from_generators(&t, &free, &b, &[0]);
    let err = alg_coeq_sequential(&t, &b, &f, &f, &CoeqConfig::with_budget(1)).unwrap_err();
    assert!(matches!(err, MtkError::Config(_)));
}

/// Graphs on `{0,1,2}` with the given hom sizes on `(0,1)`, `(1,2)`, `(0,2)`.
fn triangle(vsorts: &Sorts, sizes: [usize; 3]) -> VGraph {
    VGraph::from_homs(3, vsorts, |a, b| match (a, b) {
        (0, 1) => Family::of_sizes(vsorts, &[sizes[0]]).unwrap(),
        (1, 2) => Family::of_sizes(vsorts, &[sizes[1]]).unwrap(),
        (0, 2) => Family::of_sizes(vsorts, &[sizes[2]]).unwrap(),
        _ => Family::empty(vsorts),
    })
    .unwrap()
}

/// Graph maps from a triangle with singleton edges `(0,1)` and `(1,2)`,
/// picking the images of the two edges.
fn edge_map(dom: &VGraph, cod: &VGraph, images: (usize, usize)) -> FamFn {
    GraphMor::from_labels(vec![0, 1, 2], dom, cod, |a, _, _, _| {
        Ok(Label::int(if a == 0 { images.0 } else { images.1 } as i64))
    })
    .unwrap()
    .to_famfn()
    .unwrap()
}

/// Searches pairs of maps between free algebras of the path monad on small
/// triangle graphs for one where the hypothesis fails.
#[test]
fn gamma_pairs_can_stabilise_late() {
    let e = CatTensor::new(&semigroup_operad(2)).unwrap();
    let gamma = Gamma::new(&e);
    let gdom = triangle(e.sorts(), [1, 1, 0]);
    let cfg = CoeqConfig::default();
    let mut late = 0;
    let mut searched = 0;
    for cod_sizes in [[2, 2, 0], [2, 1, 0], [2, 2, 1]] {
        let gcod = triangle(e.sorts(), cod_sizes);
        let a = free_algebra(&gamma, gdom.family()).unwrap();
        let b = free_algebra(&gamma, gcod.family()).unwrap();
        for f0 in 0..cod_sizes[0] {
            for f1 in 0..cod_sizes[1] {
                for g0 in 0..cod_sizes[0] {
                    for g1 in 0..cod_sizes[1] {
                        searched += 1;
                        let f = gamma.fmap(&edge_map(&gdom, &gcod, (f0, f1))).unwrap();
                        let g = gamma.fmap(&edge_map(&gdom, &gcod, (g0, g1))).unwrap();
                        assert_eq!(f.dom(), &a.carrier);
                        let hyp = check_simple_hypothesis(&gamma, &f, &g).unwrap();
                        let r = alg_coeq_sequential(&gamma, &b, &f, &g, &cfg).unwrap();
                        let (oa, op) = alg_coeq_oracle(&gamma, &b, &f, &g).unwrap();
                        assert!(comparison_iso(&gamma, (&r.algebra, &r.proj), (&oa, &op)).is_ok());
                        assert!(r.trace.check_equations(&gamma).unwrap().is_empty());
                        let n = r.trace.stabilised_at.unwrap();
                        if hyp.holds {
                            assert!(n <= 1, "hypothesis holds but stabilised at {n}");
                        } else if n > 1 {
                            late += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(searched > 0);
    assert!(late > 0, "no late-stabilising instance among {searched}");
}

#[test]
fn phi_star_along_identity_is_identity() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let phi = IdentityMorphism { monad: t.clone() };
    assert_eq!(phi_star(&phi, &b).unwrap(), b);
}

fn hom_to_trivial(m: Monoid) -> MonoidMorphism {
    let n = m.size();
    MonoidMorphism::new(MonoidHom::new(m, Monoid::trivial(), vec![0; n]).unwrap(), &Sorts::single())
}

#[test]
fn shriek_of_a_free_algebra_is_free() {
    for phi in [hom_to_trivial(z2()), hom_to_trivial(idempotent()), MonoidMorphism::new(
        MonoidHom::new(Monoid::trivial(), z2(), vec![0]).unwrap(),
        &Sorts::single(),
    )] {
        let z = set(2);
        let m = phi.source();
        let s = phi.target();
        let free = free_algebra(m, &z).unwrap();
        let r = phi_shriek(&phi, &free, &CoeqConfig::default()).unwrap();
        assert!(r.reflexive);
        let h = s.fmap(&m.eta(&z).unwrap()).unwrap().then(&r.proj).unwrap();
        assert!(h.is_bijection());
        let sfree = free_algebra(s, &z).unwrap();
        assert!(AlgebraMap::commutes(s, &sfree, &r.algebra, &h).unwrap());
        // the unit is φ_Z followed by the comparison
        assert_eq!(r.unit, phi.component(&z).unwrap().then(&h).unwrap());
    }
}

#[test]
fn shriek_along_identity_is_identity() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let phi = IdentityMorphism { monad: t.clone() };
    let r = phi_shriek(&phi, &b, &CoeqConfig::default()).unwrap();
    assert!(r.unit.is_bijection());
    assert!(AlgebraMap::commutes(&t, &b, &r.algebra, &r.unit).unwrap());
}

#[test]
fn shriek_along_a_monoid_quotient_matches_the_oracle() {
    let phi = hom_to_trivial(z2());
    let m = phi.source();
    let s = phi.target();
    // Z2 swapping 0 and 1 and fixing 2, 3: orbits {0,1}, {2}, {3}
    let x = phi.source.algebra_from_table(&set(4), &[vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3]]]).unwrap();
    let r = phi_shriek(&phi, &x, &CoeqConfig::default()).unwrap();
    assert_eq!(r.algebra.carrier.total(), 3);
    let b = free_algebra(s, &x.carrier).unwrap();
    let f = s.fmap(&phi.component(&x.carrier).unwrap()).unwrap().then(&s.mu(&x.carrier).unwrap()).unwrap();
    let g = s.fmap(&x.action).unwrap();
    let (oa, op) = alg_coeq_oracle(s, &b, &f, &g).unwrap();
    assert!(comparison_iso(s, (&r.algebra, &r.proj), (&oa, &op)).is_ok());
    assert!(x.check(m).unwrap().is_empty());
}

/// Every `M`-set on at most `max` elements, for a small monoid.
fn all_algebras(t: &MSetMonad, max: usize) -> Vec<Algebra> {
    let mut out = Vec::new();
    for n in 1..=max {
        let carrier = set(n);
        let mut acts: Vec<Vec<Vec<usize>>> = vec![vec![(0..n).collect()]];
        for _ in 1..t.monoid.size() {
            let funcs = all_functions(carrier.part(0), carrier.part(0));
            acts = acts
                .into_iter()
                .flat_map(|a| {
                    funcs.iter().map(move |f| {
                        let mut a = a.clone();
                        a.push(f.table().to_vec());
                        a
                    })
                })
                .collect();
        }
        for act in acts {
            if let Ok(alg) = t.algebra_from_table(&carrier, &[act]) {
                out.push(alg);
            }
        }
    }
    out
}

fn algebra_maps<T: Monad + ?Sized>(t: &T, algs: &[Algebra], limit: usize) -> Vec<(Algebra, Algebra, FamFn)> {
    let mut out = Vec::new();
    for d in algs {
        for c in algs {
            for f in all_functions(d.carrier.part(0), c.carrier.part(0)) {
                let h = FamFn::new(d.carrier.clone(), c.carrier.clone(), vec![f]).unwrap();
                if AlgebraMap::commutes(t, d, c, &h).unwrap() {
                    out.push((d.clone(), c.clone(), h));
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
    }
    out
}

#[test]
fn induced_monad_satisfies_the_laws() {
    for m in [z2(), idempotent()] {
        let phi = hom_to_trivial(m);
        let algs = all_algebras(&phi.source, 3);
        let maps = algebra_maps(&phi.source, &algs[..algs.len().min(6)], 30);
        let t = induced_monad(&phi, &CoeqConfig::default()).unwrap();
        let rep = t.check_laws(&algs, &maps).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
    }
}

#[test]
fn induced_monad_along_identity_is_the_identity() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let phi = IdentityMorphism { monad: t.clone() };
    let induced = induced_monad(&phi, &CoeqConfig::default()).unwrap();
    for alg in all_algebras(&t, 3) {
        let tx = induced.apply(&alg).unwrap();
        assert_eq!(tx.carrier.total(), alg.carrier.total());
        assert!(induced.eta(&alg).unwrap().is_bijection());
    }
}

#[test]
fn trace_export_is_deterministic() {
    let t = MSetMonad::new(idempotent(), &Sorts::single());
    let b = two_orbits(&t);
    let free = free_algebra(&t, &set(1)).unwrap();
    let f = from_generators(&t, &free, &b, &[0]);
    let g = from_generators(&t, &free, &b, &[1]);
    let run = || {
        let r = alg_coeq_sequential(&t, &b, &f, &g, &CoeqConfig::default()).unwrap();
        serde_json::to_string(&r.trace.export()).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn mset_monads_satisfy_the_laws() {
    for monoid in all_monoids(3) {
        let t = MSetMonad::new(monoid, &Sorts::single());
        let objs = families_up_to(&Sorts::single(), 3);
        let a = set(2);
        let maps: Vec<FamFn> =
            all_functions(a.part(0), a.part(0)).into_iter().map(|f| map(&a, &a, f.table().to_vec())).collect();
        assert!(check_monad_laws(&t, &objs, &maps).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequential_agrees_with_oracle(seed in any::<u64>()) {
        let inst = random_mset_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = &inst.monad;
        let r = alg_coeq_sequential(t, &inst.target, &inst.f, &inst.g, &CoeqConfig::default()).unwrap();
        let (oa, op) = alg_coeq_oracle(t, &inst.target, &inst.f, &inst.g).unwrap();
        prop_assert!(comparison_iso(t, (&r.algebra, &r.proj), (&oa, &op)).is_ok());
        prop_assert!(r.algebra.check(t).unwrap().is_empty());
        prop_assert!(oa.check(t).unwrap().is_empty());
        prop_assert!(r.trace.check_equations(t).unwrap().is_empty());
        // two extra steps past detection, all bijective
        prop_assert_eq!(r.trace.extra_checked, 2);
        let n = r.trace.stabilised_at.unwrap();
        for s in &r.trace.steps[n..] {
            prop_assert!(s.q.is_bijection());
        }
        prop_assert!(n <= 1);
    }

    #[test]
    fn induced_unit_law_on_random_msets(seed in any::<u64>()) {
        let inst = random_mset_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let m = inst.monad.monoid.clone();
        let phi = hom_to_trivial(m);
        let t = induced_monad(&phi, &CoeqConfig::default()).unwrap();
        let rep = t.check_laws(std::slice::from_ref(&inst.target), &[]).unwrap();
        prop_assert!(rep.passed, "{:?}", rep.violations);
    }
}

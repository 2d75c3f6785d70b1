//! Small monads used as test beds: the identity monad, `M × -` for a finite
//! monoid `M`, and the monad morphisms between them.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{free_algebra, Algebra, Monad, MonadMorphism};
use crate::base::{FamFn, Family, FinFn, FinSet, Label, Sorts};
use crate::error::{MtkError, Result};

/// The identity monad on families over `sorts`.
#[derive(Clone, Debug)]
pub struct IdentityMonad {
    pub sorts: Sorts,
}

impl IdentityMonad {
    pub fn new(sorts: &Sorts) -> IdentityMonad {
        IdentityMonad { sorts: sorts.clone() }
    }
}

impl Monad for IdentityMonad {
    fn name(&self) -> String {
        "Id".into()
    }

    fn apply(&self, x: &Family) -> Result<Family> {
        Ok(x.clone())
    }

    fn fmap(&self, f: &FamFn) -> Result<FamFn> {
        Ok(f.clone())
    }

    fn eta(&self, x: &Family) -> Result<FamFn> {
        Ok(FamFn::identity(x))
    }

    fn mu(&self, x: &Family) -> Result<FamFn> {
        Ok(FamFn::identity(x))
    }
}

/// A finite monoid with named elements; element 0 is the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monoid {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl Monoid {
    pub fn new(names: &[&str], table: Vec<Vec<usize>>) -> Result<Monoid> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(MtkError::Mismatch("monoid table has the wrong shape".into()));
        }
        let m = Monoid { names: names.iter().map(|s| s.to_string()).collect(), table };
        for a in 0..n {
            if m.table[0][a] != a || m.table[a][0] != a {
                return Err(MtkError::IllDefined(format!("{} is not a unit", m.names[0])));
            }
            for b in 0..n {
                for c in 0..n {
                    if m.mul(m.mul(a, b), c) != m.mul(a, m.mul(b, c)) {
                        return Err(MtkError::IllDefined("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn trivial() -> Monoid {
        Monoid::new(&["1"], vec![vec![0]]).expect("trivial monoid")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Every monoid structure on `{1, a, b, ..}` with unit `1`, up to the given size.
pub fn all_monoids(max_size: usize) -> Vec<Monoid> {
    const NAMES: [&str; 4] = ["1", "a", "b", "c"];
    let mut out = Vec::new();
    for n in 1..=max_size.min(NAMES.len()) {
        let free: Vec<(usize, usize)> = (1..n).flat_map(|a| (1..n).map(move |b| (a, b))).collect();
        let total = n.pow(free.len() as u32);
        for code in 0..total {
            let mut table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| if a == 0 { b } else if b == 0 { a } else { 0 }).collect()).collect();
            let mut c = code;
            for &(a, b) in &free {
                table[a][b] = c % n;
                c /= n;
            }
            if let Ok(m) = Monoid::new(&NAMES[..n], table) {
                out.push(m);
            }
        }
    }
    out
}

/// `X ↦ M × X` sortwise, with elements labelled `(m, x)`.
#[derive(Clone, Debug)]
pub struct MSetMonad {
    pub monoid: Monoid,
    pub sorts: Sorts,
}

impl MSetMonad {
    pub fn new(monoid: Monoid, sorts: &Sorts) -> MSetMonad {
        MSetMonad { monoid, sorts: sorts.clone() }
    }

    fn element(&self, m: usize, x: Label) -> Label {
        Label::pair(Label::Name(self.monoid.names[m].clone()), x)
    }

    fn split<'a>(&self, l: &'a Label) -> Result<(usize, &'a Label)> {
        let (m, x) = l.as_pair().ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
        let m = match m {
            Label::Name(n) => self.monoid.index_of(n),
            _ => None,
        }
        .ok_or_else(|| MtkError::UnknownLabel(m.to_string()))?;
        Ok((m, x))
    }

    /// The algebra given by an action table `act[s][m][x]` on a carrier.
    pub fn algebra_from_table(&self, carrier: &Family, act: &[Vec<Vec<usize>>]) -> Result<Algebra> {
        let tx = self.apply(carrier)?;
        let action = FamFn::from_labels(&tx, carrier, |s, l| {
            let (m, x) = self.split(l)?;
            let i = carrier.part(s).index_of(x).ok_or_else(|| MtkError::UnknownLabel(x.to_string()))?;
            Ok(carrier.part(s).label(act[s][m][i]).clone())
        })?;
        Algebra::new(self, carrier.clone(), action)
    }

    /// `m · x` read off an algebra action.
    pub fn act(&self, alg: &Algebra, s: usize, m: usize, x: usize) -> usize {
        let l = self.element(m, alg.carrier.part(s).label(x).clone());
        let tx = alg.action.dom().part(s);
        alg.action.apply(s, tx.index_of(&l).expect("element of M × X"))
    }
}

impl Monad for MSetMonad {
    fn name(&self) -> String {
        format!("M{}x-", self.monoid.size())
    }

    fn apply(&self, x: &Family) -> Result<Family> {
        let parts = x
            .parts()
            .iter()
            .map(|p| {
                FinSet::new((0..self.monoid.size()).flat_map(|m| p.labels().iter().map(move |l| (m, l))).map(|(m, l)| self.element(m, l.clone())))
            })
            .collect::<Result<Vec<_>>>()?;
        Family::new(x.sorts().clone(), parts)
    }

    fn fmap(&self, f: &FamFn) -> Result<FamFn> {
        let dom = self.apply(f.dom())?;
        let cod = self.apply(f.cod())?;
        FamFn::from_labels(&dom, &cod, |s, l| {
            let (m, x) = self.split(l)?;
            let y = f.apply_label(s, x).ok_or_else(|| MtkError::UnknownLabel(x.to_string()))?;
            Ok(self.element(m, y.clone()))
        })
    }

    fn eta(&self, x: &Family) -> Result<FamFn> {
        let tx = self.apply(x)?;
        FamFn::from_labels(x, &tx, |_, l| Ok(self.element(0, l.clone())))
    }

    fn mu(&self, x: &Family) -> Result<FamFn> {
        let tx = self.apply(x)?;
        let ttx = self.apply(&tx)?;
        FamFn::from_labels(&ttx, &tx, |_, l| {
            let (m, inner) = self.split(l)?;
            let (n, y) = self.split(inner)?;
            Ok(self.element(self.monoid.mul(m, n), y.clone()))
        })
    }
}

/// A homomorphism of monoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    pub src: Monoid,
    pub tgt: Monoid,
    pub map: Vec<usize>,
}

impl MonoidHom {
    pub fn new(src: Monoid, tgt: Monoid, map: Vec<usize>) -> Result<MonoidHom> {
        if map.len() != src.size() || map.iter().any(|&v| v >= tgt.size()) || map[0] != 0 {
            return Err(MtkError::IllDefined("map does not preserve the unit".into()));
        }
        for a in 0..src.size() {
            for b in 0..src.size() {
                if map[src.mul(a, b)] != tgt.mul(map[a], map[b]) {
                    return Err(MtkError::IllDefined("map does not preserve multiplication".into()));
                }
            }
        }
        Ok(MonoidHom { src, tgt, map })
    }
}

/// The monad morphism `M × - => N × -` induced by a monoid homomorphism.
#[derive(Clone, Debug)]
pub struct MonoidMorphism {
    pub source: MSetMonad,
    pub target: MSetMonad,
    pub hom: MonoidHom,
}

impl MonoidMorphism {
    pub fn new(hom: MonoidHom, sorts: &Sorts) -> MonoidMorphism {
        MonoidMorphism {
            source: MSetMonad::new(hom.src.clone(), sorts),
            target: MSetMonad::new(hom.tgt.clone(), sorts),
            hom,
        }
    }
}

impl MonadMorphism for MonoidMorphism {
    fn source(&self) -> &dyn Monad {
        &self.source
    }

    fn target(&self) -> &dyn Monad {
        &self.target
    }

    fn component(&self, x: &Family) -> Result<FamFn> {
        let dom = self.source.apply(x)?;
        let cod = self.target.apply(x)?;
        FamFn::from_labels(&dom, &cod, |_, l| {
            let (m, y) = self.source.split(l)?;
            Ok(self.target.element(self.hom.map[m], y.clone()))
        })
    }
}

/// The identity morphism of a monad.
#[derive(Clone, Debug)]
pub struct IdentityMorphism<T> {
    pub monad: T,
}

impl<T: Monad> MonadMorphism for IdentityMorphism<T> {
    fn source(&self) -> &dyn Monad {
        &self.monad
    }

    fn target(&self) -> &dyn Monad {
        &self.monad
    }

    fn component(&self, x: &Family) -> Result<FamFn> {
        Ok(FamFn::identity(&self.monad.apply(x)?))
    }
}

/// The unit `Id => S` of a monad, as a monad morphism.
#[derive(Clone, Debug)]
pub struct UnitMorphism<S> {
    pub identity: IdentityMonad,
    pub monad: S,
}

impl<S: Monad> MonadMorphism for UnitMorphism<S> {
    fn source(&self) -> &dyn Monad {
        &self.identity
    }

    fn target(&self) -> &dyn Monad {
        &self.monad
    }

    fn component(&self, x: &Family) -> Result<FamFn> {
        self.monad.eta(x)
    }
}

/// The composite `ψ ∘ φ` of two monad morphisms.
pub struct CompositeMorphism<F, G> {
    pub first: F,
    pub second: G,
}

impl<F: MonadMorphism, G: MonadMorphism> MonadMorphism for CompositeMorphism<F, G> {
    fn source(&self) -> &dyn Monad {
        self.first.source()
    }

    fn target(&self) -> &dyn Monad {
        self.second.target()
    }

    fn component(&self, x: &Family) -> Result<FamFn> {
        self.first.component(x)?.then(&self.second.component(x)?)
    }
}

/// A parallel pair of algebra maps `f, g: (M × Z, μ) ⇉ (B, b)` out of a
/// free `M`-set.
#[derive(Clone, Debug)]
pub struct MSetInstance {
    pub monad: MSetMonad,
    pub source: Algebra,
    pub target: Algebra,
    pub f: FamFn,
    pub g: FamFn,
}

fn random_action<R: Rng>(rng: &mut R, m: &Monoid, size: usize) -> Option<Vec<Vec<usize>>> {
    for _ in 0..400 {
        let mut act: Vec<Vec<usize>> = vec![(0..size).collect()];
        for _ in 1..m.size() {
            act.push((0..size).map(|_| rng.gen_range(0..size)).collect());
        }
        let ok = (0..m.size()).all(|a| {
            (0..m.size()).all(|b| (0..size).all(|x| act[a][act[b][x]] == act[m.mul(a, b)][x]))
        });
        if ok {
            return Some(act);
        }
    }
    None
}

/// A random instance with `|M| <= 3`, `|B| <= 4` and one or two generators.
pub fn random_mset_instance<R: Rng>(rng: &mut R) -> MSetInstance {
    let monoids = all_monoids(3);
    loop {
        let monoid = monoids.choose(rng).expect("non-empty").clone();
        let size = rng.gen_range(1..=4usize);
        let Some(act) = random_action(rng, &monoid, size) else { continue };
        let sorts = Sorts::single();
        let t = MSetMonad::new(monoid, &sorts);
        let carrier = Family::set(FinSet::range(size));
        let target = t.algebra_from_table(&carrier, std::slice::from_ref(&act)).expect("valid action");
        let gens = rng.gen_range(1..=2usize);
        let z = Family::set(FinSet::range(gens));
        let source = free_algebra(&t, &z).expect("free algebra");
        let f0: Vec<usize> = (0..gens).map(|_| rng.gen_range(0..size)).collect();
        let g0: Vec<usize> = (0..gens).map(|_| rng.gen_range(0..size)).collect();
        let extend = |h: &[usize]| -> FamFn {
            let comp = FinFn::from_labels(source.carrier.part(0).clone(), carrier.part(0).clone(), |l| {
                let (m, zl) = t.split(l)?;
                let zi = zl.as_int().expect("generator index") as usize;
                Ok(carrier.part(0).label(act[m][h[zi]]).clone())
            })
            .expect("total");
            FamFn::new(source.carrier.clone(), carrier.clone(), vec![comp]).expect("typed")
        };
        let f = extend(&f0);
        let g = extend(&g0);
        return MSetInstance { monad: t, source, target, f, g };
    }
}

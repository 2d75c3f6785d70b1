//! Algebras of a monad, algebra maps and an exhaustive monad-law checker.

use serde::{Deserialize, Serialize};

use super::Monad;
use crate::base::{FamFn, Family};
use crate::error::{MtkError, Result};

/// A carrier with an action `T X -> X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Algebra {
    pub carrier: Family,
    pub action: FamFn,
}

impl Algebra {
    /// Builds an algebra after checking the unit and associativity laws.
    pub fn new<T: Monad + ?Sized>(t: &T, carrier: Family, action: FamFn) -> Result<Algebra> {
        let alg = Algebra { carrier, action };
        let problems = alg.check(t)?;
        if !problems.is_empty() {
            return Err(MtkError::IllDefined(problems.join("; ")));
        }
        Ok(alg)
    }

    /// Builds an algebra without checking the laws.
    pub fn unchecked(carrier: Family, action: FamFn) -> Algebra {
        Algebra { carrier, action }
    }

    /// Lists failures of `x ∘ η = id` and `x ∘ T x = x ∘ μ`.
    pub fn check<T: Monad + ?Sized>(&self, t: &T) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let tx = t.apply(&self.carrier)?;
        if *self.action.dom() != tx || *self.action.cod() != self.carrier {
            return Err(MtkError::Mismatch("action is not a map T X -> X".into()));
        }
        if t.eta(&self.carrier)?.then(&self.action)? != FamFn::identity(&self.carrier) {
            out.push("unit law fails".to_string());
        }
        let lhs = t.fmap(&self.action)?.then(&self.action)?;
        let rhs = t.mu(&self.carrier)?.then(&self.action)?;
        if lhs != rhs {
            out.push("associativity law fails".to_string());
        }
        Ok(out)
    }
}

/// The free algebra `(T X, μ_X)`.
pub fn free_algebra<T: Monad + ?Sized>(t: &T, x: &Family) -> Result<Algebra> {
    let tx = t.apply(x)?;
    Ok(Algebra { carrier: tx, action: t.mu(x)? })
}

/// A map of carriers commuting with the actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraMap {
    pub dom: Algebra,
    pub cod: Algebra,
    pub map: FamFn,
}

impl AlgebraMap {
    pub fn new<T: Monad + ?Sized>(t: &T, dom: Algebra, cod: Algebra, map: FamFn) -> Result<AlgebraMap> {
        if !AlgebraMap::commutes(t, &dom, &cod, &map)? {
            return Err(MtkError::IllDefined("map does not commute with the actions".into()));
        }
        Ok(AlgebraMap { dom, cod, map })
    }

    pub fn commutes<T: Monad + ?Sized>(t: &T, dom: &Algebra, cod: &Algebra, map: &FamFn) -> Result<bool> {
        if *map.dom() != dom.carrier || *map.cod() != cod.carrier {
            return Err(MtkError::Mismatch("map does not go between the carriers".into()));
        }
        let lhs = dom.action.then(map)?;
        let rhs = t.fmap(map)?.then(&cod.action)?;
        Ok(lhs == rhs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadLawReport {
    pub monad: String,
    pub objects: usize,
    pub maps: usize,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Checks the unit and associativity laws on every sample object and the
/// naturality of `η` and `μ` on every sample map.
pub fn check_monad_laws<T: Monad + ?Sized>(t: &T, objects: &[Family], maps: &[FamFn]) -> Result<MonadLawReport> {
    let mut rep = MonadLawReport { monad: t.name(), objects: objects.len(), maps: maps.len(), ..Default::default() };
    for (k, x) in objects.iter().enumerate() {
        let tx = t.apply(x)?;
        let id = FamFn::identity(&tx);
        let mu = t.mu(x)?;
        if t.eta(&tx)?.then(&mu)? != id {
            rep.violations.push(format!("object {k}: μ ∘ ηT is not the identity"));
        }
        if t.fmap(&t.eta(x)?)?.then(&mu)? != id {
            rep.violations.push(format!("object {k}: μ ∘ Tη is not the identity"));
        }
        let lhs = t.fmap(&mu)?.then(&mu)?;
        let rhs = t.mu(&tx)?.then(&mu)?;
        if lhs != rhs {
            rep.violations.push(format!("object {k}: μ ∘ Tμ differs from μ ∘ μT"));
        }
    }
    for (k, f) in maps.iter().enumerate() {
        let tf = t.fmap(f)?;
        if f.then(&t.eta(f.cod())?)? != t.eta(f.dom())?.then(&tf)? {
            rep.violations.push(format!("map {k}: η is not natural"));
        }
        if t.fmap(&tf)?.then(&t.mu(f.cod())?)? != t.mu(f.dom())?.then(&tf)? {
            rep.violations.push(format!("map {k}: μ is not natural"));
        }
        if t.fmap(&FamFn::identity(f.dom()))? != FamFn::identity(&t.apply(f.dom())?) {
            rep.violations.push(format!("map {k}: T does not preserve identities"));
        }
    }
    rep.passed = rep.violations.is_empty();
    Ok(rep)
}

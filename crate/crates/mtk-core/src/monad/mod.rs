//! Finitary monads on families of finite sets, their algebras, coequalisers
//! of algebras by the sequential construction, the left adjoint along a
//! monad morphism and the monad it induces.

mod algebra;
mod coeq;
mod instances;
mod shriek;

use crate::base::{FamFn, Family};
use crate::error::Result;

pub use algebra::{check_monad_laws, free_algebra, Algebra, AlgebraMap, MonadLawReport};
pub use coeq::{
    alg_coeq_oracle, alg_coeq_sequential, check_simple_hypothesis, comparison_iso, CoeqConfig, CoeqResult, CoeqStep,
    CoeqTrace, LimitStep, SimpleHypothesis,
};
pub use instances::{
    all_monoids, random_mset_instance, CompositeMorphism, IdentityMonad, IdentityMorphism, MSetMonad, MSetInstance,
    MonoidHom, MonoidMorphism, Monoid, UnitMorphism,
};
pub use shriek::{induced_monad, phi_shriek, phi_star, InducedMonad, ShriekResult};

/// A finitary monad acting on families over a fixed list of sorts.
/// Applying it to a finite family must return a finite family; this is the
/// finiteness certificate every instance supplies.
pub trait Monad {
    fn name(&self) -> String;
    fn apply(&self, x: &Family) -> Result<Family>;
    fn fmap(&self, f: &FamFn) -> Result<FamFn>;
    fn eta(&self, x: &Family) -> Result<FamFn>;
    fn mu(&self, x: &Family) -> Result<FamFn>;
}

/// A morphism of monads `φ: M -> S`, given by its components.
pub trait MonadMorphism {
    fn source(&self) -> &dyn Monad;
    fn target(&self) -> &dyn Monad;
    fn component(&self, x: &Family) -> Result<FamFn>;
}

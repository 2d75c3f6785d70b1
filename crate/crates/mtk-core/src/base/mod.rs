//! Finite sets, families, finite categories, copresheaves and their colimits.

mod cat;
mod family;
mod set;

pub use cat::{
    kan_free, pointwise_chain_colimit, pointwise_coequalize, pointwise_coproduct, CatMor, Copresheaf, FinCat,
    NatTransform,
};
pub use family::{fam_coequalize, fam_coproduct, fam_descend, families_up_to, FamFn, Family, Sorts};
pub use set::{all_functions, chain_colimit, coequalize, coproduct, descend, function_count, FinFn, FinSet, Label, UnionFind};

//! Lifting a multitensor built from a multicategory to a functor operad on
//! the algebras of its unary part, by the explicit sequential construction
//! and by the left adjoint along `Γ` of the inclusion of the unary part.
//! Also the correspondence of enriched categories and the lifting of lax
//! monoidal functors.

mod lifted;
mod routes;
mod trace;

pub use lifted::{lift_multitensor, lift_substitution, LiftedMultitensor, SubstResult};
pub use routes::{
    check_free_components, check_lift_theorem, compare_routes, e1_algebras, lift_lax_functor, lift_via_monad_route,
    sequence_algebra, FreeComponentReport, LaxLift, LiftTheoremReport, MonadRouteResult, RouteComparison,
};
pub use trace::{
    basic_coequaliser, blocks_of, check_preserves_basic_coeq, lift_object, partition_index, spans, BasicCoequaliser,
    LiftResult, LiftStep, LiftStepExport, LiftTrace, LiftTraceExport, Span, SpanStep,
};

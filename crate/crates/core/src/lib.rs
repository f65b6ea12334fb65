//! Monotone relations on finite preorders.
//!
//! Composition, graphing of monotone maps, two-sided discrete fibrations,
//! exactness of lax squares, relation lifting along Kripke-polynomial
//! functors, coalgebraic simulation and nabla-logic model checking.
//! Every construction works on explicit finite carriers and can be checked
//! against brute-force evaluation.

pub mod bits;
pub mod caps;
pub mod coalg;
pub mod error;
pub mod exact;
pub mod fib;
pub mod functor;
pub mod gen;
mod masks;
pub mod order;
pub mod rel;

pub use caps::Caps;
pub use coalg::{mk_coalgebra, model_check, simulation_gfp, tau_transform, Coalgebra, Formula};
pub use error::{Error, Result};
pub use exact::{
    catalog_square, dual_square, exactness_witness, is_absolute_lan, is_exact_by_relations,
    is_exact_square, is_relative_adjoint, left_adjoint_square_criterion, CatalogInput,
    ExactnessWitness, SquareKind,
};
pub use fib::{
    is_fibration, relation_to_fibration, span_to_relation, tensor_fibrations, Fibration, Span,
    Tensor,
};
pub use order::{
    comma_object, opcomma_object, pullback_maps, Cocone, Cone, FinPreorder, LaxSquare, Lowersets,
    MonotoneMap,
};
pub use rel::{
    adjoint_to_map, adjoint_to_map_unique, check_adjoint_pair, compose_rel, dagger, diamonds,
    elementhood, forget_rel, id_rel, kz_mult, leq_rel, lower, lower_map, membership, upper,
    yoneda_unit, MonotoneRelation, PlainRelation,
};

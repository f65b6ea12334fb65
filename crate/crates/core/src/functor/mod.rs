//! Kripke-polynomial functors on preorders and their relation liftings.

pub mod bcc;
pub mod carrier;
pub mod dist;
pub mod elem;
pub mod expr;
pub mod lift;

pub use bcc::{check_bcc, BccConfig, BccReport, Counter, Counterexample, Detail};
pub use carrier::{apply_functor_mor, apply_functor_ob, TCarrier};
pub use dist::{dist_law, DistLaw};
pub use elem::TElem;
pub use expr::{parse_functor, FunctorExpr, Registry};
pub use lift::{lift_lowerset_oracle, lift_powerset_oracle, lift_relation, Lifted};

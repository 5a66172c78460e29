//! Fair division of indivisible goods under the maximin-share (MMS)
//! criterion for instances with up to three agent types.
//!
//! The pipeline turns an arbitrary instance into an ordered, normalized,
//! totally-irreducible (ONI) one while logging a transcript that lifts any
//! allocation of the transformed instance back to the original. On the ONI
//! instance the solvers guarantee, per agent: exact MMS for one type,
//! 4/5·MMS for two types, and 16/21·MMS for three types. An independent
//! verifier recomputes every agent's MMS with an exact oracle and checks the
//! guarantee with exact rational arithmetic.

pub mod campaign;
pub mod driver;
pub mod error;
pub mod fill;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod shv;
pub mod three_type;
pub mod two_type;
pub mod verify;

pub use error::{InputError, OracleError, SolveError};
pub use model::{Allocation, Bundle, ItemClass, TypedInstance};
pub use rational::Rational;

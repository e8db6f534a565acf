//! Shared data: exact rationals, polynomials, drift expressions, partitions
//! and ODE systems.

pub mod drift;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod system;

pub use drift::{DriftExpr, EvalError};
pub use partition::{Partition, PartitionError};
pub use poly::{Exponents, Monomial, Polynomial};
pub use rational::Rational;
pub use system::{Drifts, OdeSystem, SystemError};

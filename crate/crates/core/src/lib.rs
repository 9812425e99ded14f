//! Approximation of generalized linear-equation CSPs over finite groups.

pub mod abelian;
pub mod approx;
pub mod bench;
pub mod dictator;
pub mod fourier;
pub mod group;
pub mod hs;
pub mod instance;
pub mod quotient;
pub mod rational;
pub mod reps;
pub mod snf;
pub mod subgroup;

pub use group::{make_group, Elem, FiniteGroup, GroupDescriptor, GroupError};
pub use hs::{brute_force_hs, compute_hs, HsError, HsResult};
pub use quotient::{quotient, CyclicDecomposition, QuotientGroup};
pub use subgroup::{commutator_subgroup, generated_subgroup, is_normal, Subgroup};

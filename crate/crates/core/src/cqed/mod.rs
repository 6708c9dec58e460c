//! Cavity-QED description: semiclassical fixed point and the Lindblad
//! master equation on a truncated Fock space.

pub mod liouvillian;
pub mod master;
pub mod operators;
pub mod semiclassical;
pub mod steady;

pub use liouvillian::{build_liouvillian, DEFAULT_MAX_LIOUVILLIAN_DIM};
pub use master::{master_transmission, MasterOptions, RateUnit, SteadyStateResult};
pub use operators::{build_hamiltonian, HilbertSpace, JointOperators, OperatorLabel, OperatorMatrix};
pub use semiclassical::{
    output_field, semiclassical_amplitude, semiclassical_state, semiclassical_transmission,
    semiclassical_transmission_at, SemiclassicalState,
};
pub use steady::{steady_state, DensityMatrix, EvolutionSettings, Physicality, SteadyState, SteadyStateMethod};

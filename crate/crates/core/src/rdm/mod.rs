//! Reduced density kernel of the relative-motion ground state and its
//! momentum-space spectrum.

mod expansion;
mod kernel;
mod position;

pub use expansion::{
    check_positivity, eigenvalue_at, eigenvalue_unexpanded, expand_in_alpha, expand_in_alpha_with,
    p_polynomial, rho2_ng_from_state, state_spectrum, NgSource, PositivityCheck, RdmExpansion,
};
pub use kernel::{GaussPolyKernel, Variable};
pub use position::{momentum_eigenvalue, position_kernel, printed_linear_kernel, KernelOrder};

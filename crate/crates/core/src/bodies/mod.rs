//! Hamiltonians, norms, convex-body volumes and Legendre transforms.

pub mod hamiltonian;
pub mod legendre;
pub mod norm;
pub mod sphere;
pub mod volume;

pub use hamiltonian::{
    check_invariants, finite_difference_gradient, ConvexHamiltonian, DirectSum, FnHamiltonian,
    InvariantReport, LinearPullback, NormSquared, SeparablePower, SharedHamiltonian,
    SplitHamiltonian,
};
pub use legendre::{
    legendre_2hom, legendre_2hom_point, sandwich_check, tightest_quadratic_bound, Legendre2Hom,
    QuadraticBound, SandwichReport,
};
pub use norm::{L2SumSpec, NormDescriptor, NormKind};
pub use volume::{
    l1_linf_l2_sum_volume, l2_sum_volume, monte_carlo_volume, norm_ball_volume, VolumeEstimate,
};

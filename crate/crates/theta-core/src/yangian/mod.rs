//! Rank-one shifted current algebras over ℚ: normal ordering, highest-weight
//! modules, the A/S/T operator pipeline, Theta series, and R-matrices.

pub mod gklo;
pub mod module;
pub mod pbw;
pub mod rmatrix;
pub mod theta;

pub use gklo::{
    cartan_tower, check_a_conjugation, check_cartan_from_s, check_cartan_from_transfer,
    check_difference_step, check_s_conjugation, check_step_product, check_transfer_degrees,
    poly_at_minus_w, transfer, transfer_from_bottom, CartanTower, Transfer,
};
pub use module::{
    bounded_multiset_count, bounded_multisets, coproduct_mixed_constant, irreducible, neg_prefund,
    one_dim, tensor, tensor_one_dim, two_dim, verma, OneDimSide, YModule,
};
pub use pbw::{FreeEl, Gen, Pbw, Reduced};
pub use rmatrix::{
    check_braiding, check_composed_intertwining, check_lowest_diagonal_identity,
    check_one_dim_associativity, check_spectral_identification, compose_with_one_dim_twist,
    lowest_diagonal_entry, solve_braiding, Braiding,
};
pub use theta::{
    check_theta_multiplicativity, check_theta_recursion, mixing_exponential, theta,
    theta_from_transfers, Theta,
};

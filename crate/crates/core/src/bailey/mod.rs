//! Bailey pairs, conjugate pairs, the (Γ, Δ) hierarchy and the
//! transformations between them.

mod audit;
mod chained;
mod conjugate;
mod hierarchy;
mod kernels;
mod pairs;
mod recurrences;
mod transforms;

pub use audit::{audit_case, audit_summary, audit_transforms, run_case, AuditCase, TransformKind};
pub use chained::{
    chain_routes, chained_closed_form, chained_pair, compare_route, compose_route, seed_pair,
    ChainRoute, ChainedPair, Seed,
};
pub use conjugate::{classical_conjugate, RhoParam};
pub use hierarchy::{
    delta_inner, gamma_inner, hl_conjugate, hl_conjugate_unprimed, hl_delta, hl_gamma,
    hl_gamma_delta, verify_gamma_delta, GammaDeltaPair, HlParams,
};
pub use kernels::{conjugate_transform, TransformKernel};
pub use pairs::{
    beta_from_alpha, beta_values, gamma_from_delta, gamma_values, pairing_sum, verify_bailey,
    verify_conjugate, BaileyPair, ConjugatePair, PairMismatch, QuadFloor, Tail,
};
pub use recurrences::{
    check_f1_f2, check_recurrences, f1, f2, telescopic_check, telescopic_sides, Side, Telescope,
};
pub use transforms::{transform_ab, transform_chain_q, transform_lattice, transform_lattice2};

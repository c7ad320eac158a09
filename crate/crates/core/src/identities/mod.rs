//! The identities obtained by pairing Bailey pairs with the level-N
//! conjugate pairs, their product forms and the string-function rewriting.

mod lemma;
mod products;
mod strings;

pub use lemma::{eta_sum, hl_lemma_lhs, hl_lemma_rhs, thm44_lhs, thm44_rhs, IdentityCell};
pub use products::{
    ag_bressoud_product, ag_bressoud_sum, binomial_aux_sides, corollary_proof_sum_checks,
    eta_aux_sides, gg_product, gg_sum, level_two_bridge, triple_product_sides, GgVariant,
};
pub use strings::{
    e55_lhs, e55_string_form, hecke_form, lattice_string_function, string_function,
    StringFunctionIndex,
};

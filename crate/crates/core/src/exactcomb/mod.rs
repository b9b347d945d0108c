//! Exact LGV matrices, determinants, closed-form LU factors and partition functions,
//! plus an exhaustive enumerator used as an oracle.

mod lgv;
mod matrix;
mod paths;

use thiserror::Error;

pub use lgv::{
    binom, lgv_a, lgv_a_modified, lgv_ahat, lgv_ahat_modified, lgv_atilde, lu_linv, lu_linv_hat, partition_bform,
    partition_product, replace_last_column, u_diagonal, u_hat_diagonal, Binomials,
};
pub use matrix::{det_exact, to_rational, Matrix};
pub use paths::{
    brute_force_count, brute_force_enumerate, PathConfiguration, Step, TileKind, BRUTE_MAX_LAST, BRUTE_MAX_N,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("instance too large for exhaustive enumeration (n = {n}, a_n = {last}; limits n <= 5, a_n <= 12)")]
    SizeGuard { n: usize, last: i64 },
    #[error("configuration is not a valid non-intersecting family")]
    InvalidConfiguration,
    #[error("cannot parse path word `{0}`")]
    Parse(String),
}

/// Every exact route to the partition function for one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub det_a: num_bigint::BigInt,
    pub det_atilde: num_bigint::BigInt,
    pub det_ahat: num_bigint::BigInt,
    pub product: num_bigint::BigInt,
    pub bform: num_bigint::BigInt,
}

impl PartitionReport {
    pub fn compute(seq: &crate::boundary::StartSequence) -> Self {
        Self {
            det_a: lgv_a(seq).det_bareiss(),
            det_atilde: lgv_atilde(seq).det_bareiss(),
            det_ahat: lgv_ahat(seq).det_bareiss(),
            product: partition_product(seq),
            bform: partition_bform(seq),
        }
    }

    pub fn consistent(&self) -> bool {
        [&self.det_atilde, &self.det_ahat, &self.product, &self.bform].iter().all(|v| **v == self.det_a)
    }
}

//! Closed-form expectation values evaluated in log space.

mod limits;
mod logcomplex;
mod original;
mod product;
mod sigma;

pub use limits::{reduced_state_limits, BlockDiagonalState, ReducedStateLimits, DENSE_LIMIT_M};
pub use logcomplex::{log_sum, reduce_phase, LogComplex};
pub use original::{
    expectation_original_d1, expectation_original_d2, expectation_original_product, original_d2_terms,
    OriginalD2Terms,
};
pub use product::{
    block_kernel, decorated_kernel_series, gamma0, gamma1, kernel_k, kernel_k_series, kernel_log_abs_series,
    r2_log_of_t, r2_log_series_streaming, r2_of_t, CHUNK,
};
pub use sigma::{
    expectation_full_product, sigma_split_general_d1, sigma_split_general_d1_at, sigma_split_general_d2,
    sigma_split_general_d2_at, SigmaSplit,
};

//! Dyadic operators acting on step functions.

mod gshift;
mod martingale;
mod maximal;
mod shift;
mod square;

pub use gshift::{generalized_haar_shift, maximal_haar_shift, truncated_shift, CubePair, GeneralizedShiftSpec};
pub use martingale::{haar_multiplier, paraproduct};
pub use maximal::{
    dyadic_maximal, orlicz_maximal, rubio_de_francia, vector_maximal, vector_maximal_outer, weighted_dyadic_maximal,
    VectorStepFunction,
};
pub use shift::{dyadic_hilbert, haar_shift, HaarShiftSpec, ShiftEntry};
pub use square::{local_square_sum, square_function, square_function_squared};

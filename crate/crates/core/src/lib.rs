//! Exact rank classification and Waring decompositions for forms of border rank 5.
pub mod apolar;
pub mod classify;
pub mod construct;
pub mod json;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod scalar;
pub mod schemes;
pub mod strata;
pub mod sylvester;
pub mod univariate;
pub mod witness;

//! Twin metrics, K-structures and Kähler-like geometry.

pub mod antikahler;
pub mod dsl;
pub mod fixtures;
pub mod linalg;
pub mod matrix;
pub mod palatini;
pub mod product;
pub mod roots;
pub mod scalar;
pub mod tensor;

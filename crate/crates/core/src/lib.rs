pub mod error;
pub mod poly;
pub mod conformal;
pub mod cend;
pub mod ops;
pub mod rewrite;
pub mod linalg;
pub mod envelope;

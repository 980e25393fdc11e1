//! Inputs shared by the benches.

use confenv_core::ops::Bounds;
use confenv_core::poly::{d, lam, mu, ExactPoly};

/// `(∂ + λ + μ)^n`
pub fn dense_poly(n: u32) -> ExactPoly {
    (&(&d() + &lam()) + &mu()).pow(n)
}

pub fn small_bounds(deg: u32, dpow: u32, idx: u32) -> Bounds {
    Bounds { deg, dpow, idx, len: 4 }
}

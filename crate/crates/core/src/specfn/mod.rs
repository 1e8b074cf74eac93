//! Special functions and quadrature used across the pipeline.

mod gauss;
mod laguerre;
mod quadrature;

pub use gauss::{double_factorial, gaussian_moment, gaussian_moment_any};
pub use laguerre::{
    binomial, factorial, laguerre_eval, laguerre_moment, laguerre_product_moment, rational_to_f64,
    LaguerrePoly,
};
pub use quadrature::{QuadratureKind, QuadratureRule};

//! Special functions, Gaussian quadrature and bracketing root search.

mod bivariate;
mod normal;
mod quadrature;
mod roots;

pub use bivariate::binorm_cdf;
pub use normal::{norm_cdf, norm_inv, norm_pdf};
pub use quadrature::{
    gauss_hermite_nodes, gauss_legendre_nodes, integrate_gaussian, integrate_gaussian_range, QuadratureRule, Scheme,
};
pub use roots::{find_root, Bracket, DEFAULT_TOL};

//! Grand Lebesgue Space norms and sharp Hardy-Rellich and weighted Sobolev
//! inequalities for radial functions on `R^n`.
//!
//! Every numerical routine is generic over the scalar type ([`Real`], `f32`
//! or `f64`); the `*64` aliases below fix `f64`.

pub mod constants;
pub mod error;
pub mod gls;
pub mod interp;
pub mod psi;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod special_fn;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Interval64 = psi::Interval<f64>;
pub type PsiFunction64 = psi::PsiFunction<f64>;
pub type RadialProfile64 = radial::RadialProfile<f64>;
pub type QuadratureSpec64 = quadrature::QuadratureSpec<f64>;
pub type HankelSpec64 = spectral::HankelSpec<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type GlsSpace64 = gls::GlsSpace<f64>;

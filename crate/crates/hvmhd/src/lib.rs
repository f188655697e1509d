//! Mollified hybrid Vlasov-MHD solver on the periodic 3-torus.
//!
//! Layers, bottom-up: [`spectral`] (transforms, operators, products),
//! [`mollifier`], [`vlasov`] (markers), [`mhd_linear`] (Galerkin solver),
//! [`coupled`] (full system and fixed-point map), [`diagnostics`], and [`io`].

pub mod error;
pub mod fft;
pub mod par;
pub mod quadrature;
pub mod spectral;
pub mod density;
pub mod mollifier;
pub mod vlasov;
pub mod mhd_linear;
pub mod coupled;
pub mod diagnostics;
pub mod io;

pub use error::{Error, Result};

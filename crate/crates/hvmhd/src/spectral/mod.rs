//! Pseudo-spectral core on the 2π-periodic cube.
//!
//! Coefficients are normalized Fourier coefficients: the forward transform
//! divides by `n³`, so `∫|u|² dx = (2π)³ Σ_k |û_k|²`.

mod field;
mod grid;
pub mod identity;
pub mod ops;
pub mod product;
pub mod random;

pub use field::{sample_grid, ScalarField, VectorField, DIV_FREE_TOL};
pub use grid::Grid;
pub use identity::{check_identity, identity_suite, Identity, IdentityInputs};
pub use ops::leray_project;
pub use product::Dealias;

use crate::error::{Error, Result};

/// A scalar, vector or rank-2 tensor field.
#[derive(Clone, Debug)]
pub enum Field {
    Scalar(ScalarField),
    Vector(VectorField),
    Tensor(Box<[[ScalarField; 3]; 3]>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivOp {
    Grad,
    Div,
    Curl,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    Dot,
    Cross,
    Tensor,
    ScalarMul,
}

pub fn spectral_derivative(field: &Field, op: DerivOp) -> Result<Field> {
    match (field, op) {
        (Field::Scalar(f), DerivOp::Grad) => Ok(Field::Vector(ops::grad(f))),
        (Field::Scalar(f), DerivOp::Laplacian) => Ok(Field::Scalar(ops::laplacian_scalar(f))),
        (Field::Vector(v), DerivOp::Div) => Ok(Field::Scalar(ops::div(v))),
        (Field::Vector(v), DerivOp::Curl) => Ok(Field::Vector(ops::curl(v))),
        (Field::Vector(v), DerivOp::Laplacian) => Ok(Field::Vector(ops::laplacian(v))),
        (_, op) => Err(Error::structural(format!("{op:?} is not defined for this field kind"))),
    }
}

pub fn dealiased_product(a: &Field, b: &Field, kind: ProductKind) -> Result<Field> {
    let grid_of = |f: &Field| match f {
        Field::Scalar(s) => s.grid(),
        Field::Vector(v) => v.grid(),
        Field::Tensor(t) => t[0][0].grid(),
    };
    grid_of(a).check_same(&grid_of(b))?;
    match (a, b, kind) {
        (Field::Scalar(f), Field::Scalar(g), ProductKind::ScalarMul) => {
            Ok(Field::Scalar(product::mul(f, g)))
        }
        (Field::Scalar(f), Field::Vector(v), ProductKind::ScalarMul)
        | (Field::Vector(v), Field::Scalar(f), ProductKind::ScalarMul) => {
            Ok(Field::Vector(product::scalar_mul(f, v)))
        }
        (Field::Vector(u), Field::Vector(v), ProductKind::Dot) => Ok(Field::Scalar(product::dot(u, v))),
        (Field::Vector(u), Field::Vector(v), ProductKind::Cross) => {
            Ok(Field::Vector(product::cross(u, v)))
        }
        (Field::Vector(u), Field::Vector(v), ProductKind::Tensor) => {
            Ok(Field::Tensor(Box::new(product::tensor(u, v))))
        }
        (_, _, kind) => Err(Error::structural(format!(
            "{kind:?} product is not defined for these operand kinds"
        ))),
    }
}

//! Boundary symplectic geometry of the two-dimensional wave equation.
//!
//! The crate works with compact domains in a Lorentzian plane (Minkowski,
//! conformally flat, or the Misner cylinder). It locates light-like boundary
//! points, traces null characteristics to build the boundary involutions,
//! constructs boundary data of solutions, and evaluates the boundary
//! symplectic pairing to certify isotropy and Lagrangian defects at finite
//! truncation.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the `wavrel` crate.

#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod num;

pub mod characteristics;
pub mod diamond;
pub mod dirichlet;
pub mod fields;
pub mod geometry;
pub mod hamiltonian;
pub mod misner;
pub mod symplectic;

pub use error::{Error, Result};

/// Which of the two null directions `½(∂_y ± ∂_x)` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A point on the boundary: component index and curve parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub component: usize,
    pub t: f64,
}

impl BoundaryPoint {
    pub fn new(component: usize, t: f64) -> Self {
        BoundaryPoint { component, t }
    }
}

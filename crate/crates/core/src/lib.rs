//! Finite-dimensional C*-algebras, Hilbert C*-modules and their
//! representations as complex matrices, with induction through interior
//! tensor products and numerical verification of imprimitivity data.

pub mod cstar;
pub mod error;
pub mod harness;
pub mod hilbmod;
pub mod induction;
pub mod morita;
pub mod numkit;
pub mod reps;
pub mod tensor;

pub use cstar::{CStarAlgebra, StarHomomorphism};
pub use error::{BimoduleAxiom, Error, ModuleAxiom, Result};
pub use hilbmod::{HilbertModule, LeftAction};
pub use morita::{BimoduleParts, ImprimitivityBimodule};
pub use numkit::{Matrix, Tolerance, Vector, C64};
pub use reps::{AlgebraRep, ModuleRep};

use std::fmt;

use thiserror::Error;

/// Which Hilbert-module axiom a validation failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleAxiom {
    /// `(x·a)·b = x·(ab)`
    RightAction,
    /// `x·1 = x`
    Unit,
    /// `<x,y>* = <y,x>`
    ConjugateSymmetry,
    /// `<x, y·a> = <x,y>·a`
    Linearity,
    /// block Gram is positive semidefinite
    Positivity,
    /// `<x,x> = 0` forces `x = 0`
    Definiteness,
}

impl fmt::Display for ModuleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModuleAxiom::RightAction => "right action (x·a)·b = x·(ab)",
            ModuleAxiom::Unit => "unit action x·1 = x",
            ModuleAxiom::ConjugateSymmetry => "conjugate symmetry <x,y>* = <y,x>",
            ModuleAxiom::Linearity => "linearity <x,y·a> = <x,y>a",
            ModuleAxiom::Positivity => "positivity of the block Gram",
            ModuleAxiom::Definiteness => "definiteness <x,x> = 0 => x = 0",
        };
        f.write_str(s)
    }
}

/// Imprimitivity bimodule axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BimoduleAxiom {
    RightModule(ModuleAxiom),
    LeftModule(ModuleAxiom),
    /// right inner products span B
    RightFull,
    /// left inner products span A
    LeftFull,
    /// `<a·x, y>_B = <x, a*·y>_B`
    LeftAdjointable,
    /// `_A<x·b, y> = _A<x, y·b*>`
    RightAdjointable,
    /// `_A<x,y>·z = x·<y,z>_B`
    Compatibility,
    /// `(a·x)·b = a·(x·b)` and multiplicativity of the left action
    Bimodule,
}

impl fmt::Display for BimoduleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BimoduleAxiom::RightModule(a) => write!(f, "right Hilbert module axiom: {a}"),
            BimoduleAxiom::LeftModule(a) => write!(f, "left Hilbert module axiom: {a}"),
            BimoduleAxiom::RightFull => f.write_str("fullness of the right inner product"),
            BimoduleAxiom::LeftFull => f.write_str("fullness of the left inner product"),
            BimoduleAxiom::LeftAdjointable => f.write_str("left action adjointable: <a·x,y>_B = <x,a*·y>_B"),
            BimoduleAxiom::RightAdjointable => f.write_str("right action adjointable: _A<x·b,y> = _A<x,y·b*>"),
            BimoduleAxiom::Compatibility => f.write_str("compatibility _A<x,y>·z = x·<y,z>_B"),
            BimoduleAxiom::Bimodule => f.write_str("bimodule structure (a·x)·b = a·(x·b)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tolerance: rel={rel}, abs={abs}")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {threshold:.3e}")]
    NotHermitian { residual: f64, threshold: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("algebra basis is empty")]
    EmptyAlgebra,
    #[error("algebra basis is linearly dependent (rank {rank} < {len})")]
    LinearlyDependent { rank: usize, len: usize },
    #[error("not *-closed: adjoint of basis element {index} leaves the span (residual {residual:.3e})")]
    NotStarClosed { index: usize, residual: f64 },
    #[error("not product-closed: basis pair ({i}, {j}) leaves the span (residual {residual:.3e})")]
    NotProductClosed { i: usize, j: usize, residual: f64 },
    #[error("no two-sided unit in the span (residual {residual:.3e})")]
    NoUnit { residual: f64 },
    #[error("coordinate solve failed: residual {residual:.3e}")]
    CoordinateSolveFailed { residual: f64 },
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("not a *-homomorphism: multiplicativity residual {multiplicativity:.3e}, star residual {star:.3e}")]
    NotHomomorphism { multiplicativity: f64, star: f64 },
    #[error("homomorphism is not invertible onto the target algebra")]
    NotInvertible,
    #[error("Hilbert module axiom violated, {axiom} at {at}: residual {residual:.3e}")]
    ModuleAxiom { axiom: ModuleAxiom, at: String, residual: f64 },
    #[error("not a module representation: Φ(x)*Φ(y) = φ(<x,y>) fails with residual {residual:.3e} > {threshold:.3e}")]
    NotRepresentation { residual: f64, threshold: f64 },
    #[error("operator is not adjointable: residual {residual:.3e}")]
    NotAdjointable { residual: f64 },
    #[error("left action invalid: {detail} (residual {residual:.3e})")]
    LeftAction { detail: String, residual: f64 },
    #[error("imprimitivity {axiom} violated at {at}: residual {residual:.3e}")]
    Imprimitivity { axiom: BimoduleAxiom, at: String, residual: f64 },
    #[error("module is not full")]
    NotFull,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("operator does not descend to the completion ({what}): residual {residual:.3e}")]
    DescentFailure { what: String, residual: f64 },
    #[error("postcondition '{check}' violated: residual {residual:.3e} exceeds {threshold:.3e}")]
    PostconditionViolation { check: String, residual: f64, threshold: f64 },
    #[error("entries are not exactly representable: {0}")]
    NotExact(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Field { path: String, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical theorem-level failures, as opposed to invalid input.
    pub fn is_postcondition(&self) -> bool {
        match self {
            Error::PostconditionViolation { .. } | Error::DescentFailure { .. } => true,
            Error::Field { source, .. } => source.is_postcondition(),
            _ => false,
        }
    }

    /// Attach a field path to a validation error.
    pub fn at(self, path: impl Into<String>) -> Error {
        Error::Field { path: path.into(), source: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

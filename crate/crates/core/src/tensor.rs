//! Algebraic tensor products with their semi-inner products, completed by
//! dividing out the Gram null space.
//!
//! Index conventions on elementary tensors:
//! - `X ⊗ H`: `(i, p) ↦ i * h + p`
//! - `V ⊗ X`: `(l, i) ↦ l * dX + i`
//! - `V ⊗ X ⊗ H`: `(l, i, p) ↦ (l * dX + i) * h + p`
//!
//! Operators between completions live in quotient coordinates. An algebraic
//! operator `M` descends to `lift_to · M · coords_from*`, after checking
//! that `M` sends null vectors to null vectors.

use crate::hilbmod::{quotient_by_null_vectors, HilbertModule, LeftAction};
use crate::numkit::{self, block_diag, frobenius, gram_quotient, kron, operator_norm, GramQuotient, Matrix, Tolerance, Vector};
use crate::reps::AlgebraRep;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    /// `V ⊗_A X`, a Hilbert module over the algebra of `X`.
    Interior,
    /// `X ⊗_B H`, a Hilbert space.
    ModuleSpace,
    /// `V ⊗_A X ⊗_B H`, a Hilbert space.
    Triple,
}

#[derive(Debug, Clone)]
pub enum TensorResult {
    Module(HilbertModule),
    Space(usize),
}

#[derive(Debug, Clone)]
pub struct CompletedTensor {
    pub kind: TensorKind,
    pub algebraic_dim: usize,
    /// Scalar Gram matrix on elementary tensors. For the interior product it
    /// is the trace of the algebra-valued Gram.
    pub gram: Matrix,
    pub quotient: GramQuotient,
    pub result: TensorResult,
    /// Largest quotient norm over the balancing vectors.
    pub balancing: f64,
}

impl CompletedTensor {
    pub fn dim(&self) -> usize {
        self.quotient.quotient_dim
    }

    /// Quotient coordinates of an algebraic vector.
    pub fn lift(&self, u: &Vector) -> Result<Vector> {
        if u.len() != self.algebraic_dim {
            return Err(Error::Shape(format!("vector of length {} for algebraic dimension {}", u.len(), self.algebraic_dim)));
        }
        Ok(self.quotient.lift(u))
    }

    pub fn module(&self) -> Option<&HilbertModule> {
        match &self.result {
            TensorResult::Module(m) => Some(m),
            TensorResult::Space(_) => None,
        }
    }
}

pub fn lift(t: &CompletedTensor, u: &Vector) -> Result<Vector> {
    t.lift(u)
}

/// Push an algebraic operator between two completions down to quotient
/// coordinates. Fails if null vectors of the source are not sent to null
/// vectors of the target.
pub fn descend(op: &Matrix, from: &GramQuotient, to: &GramQuotient, what: &str, tol: Tolerance) -> Result<Matrix> {
    if op.ncols() != from.original_dim || op.nrows() != to.original_dim {
        return Err(Error::Shape(format!(
            "{what}: operator is {}x{}, spaces have algebraic dimensions {} and {}",
            op.nrows(),
            op.ncols(),
            from.original_dim,
            to.original_dim
        )));
    }
    let lifted = &to.lift * op;
    let leak = frobenius(&(&lifted * &from.null_basis));
    let scale = (operator_norm(&to.lift) * operator_norm(op)).max(1.0);
    if leak > tol.bound(scale) {
        return Err(Error::DescentFailure { what: what.to_string(), residual: leak });
    }
    Ok(lifted * from.representatives())
}

/// Like [`descend`] but also requires the operator to preserve the
/// semi-inner products, `op* G_to op = G_from`.
pub fn descend_isometry(
    op: &Matrix,
    from: &CompletedTensor,
    to: &CompletedTensor,
    what: &str,
    tol: Tolerance,
) -> Result<Matrix> {
    let out = descend(op, &from.quotient, &to.quotient, what, tol)?;
    let res = frobenius(&(op.adjoint() * &to.gram * op - &from.gram));
    let scale = operator_norm(&to.gram).max(operator_norm(&from.gram)).max(1.0);
    if res > tol.bound(scale) {
        return Err(Error::DescentFailure { what: format!("{what} (semi-inner product not preserved)"), residual: res });
    }
    Ok(out)
}

/// Quotient of a direct sum of spaces.
pub fn direct_sum_quotient(parts: &[&GramQuotient]) -> GramQuotient {
    let cat = |f: &dyn Fn(&GramQuotient) -> Matrix| block_diag(&parts.iter().map(|q| f(q)).collect::<Vec<_>>());
    GramQuotient {
        original_dim: parts.iter().map(|q| q.original_dim).sum(),
        quotient_dim: parts.iter().map(|q| q.quotient_dim).sum(),
        coords: cat(&|q| q.coords.clone()),
        lift: cat(&|q| q.lift.clone()),
        null_basis: cat(&|q| q.null_basis.clone()),
    }
}

fn check_rep_on(x: &HilbertModule, pi: &AlgebraRep) -> Result<()> {
    if !pi.algebra().same_as(x.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

fn check_left_action(v: &HilbertModule, x: &HilbertModule, rho: &LeftAction) -> Result<()> {
    if !rho.algebra().same_as(v.algebra()) || !rho.module().algebra().same_as(x.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    if rho.module().dim() != x.dim() {
        return Err(Error::Shape(format!("left action acts on dimension {}, module has {}", rho.module().dim(), x.dim())));
    }
    Ok(())
}

/// Coordinates of `<e_i, ρ(a) e_j>` in the algebra of `X`.
fn twisted_inner(x: &HilbertModule, rho_a: &Matrix, i: usize, j: usize) -> Vector {
    let mut out = Vector::zeros(x.algebra().dim());
    for s in 0..x.dim() {
        let w = rho_a[(s, j)];
        if w != numkit::ZERO {
            out += x.gram_coords(i, s) * w;
        }
    }
    out
}

fn quotient_norm(q: &GramQuotient, u: &Vector) -> f64 {
    (&q.lift * u).norm()
}

/// `X ⊗_B H` with `<x⊗h, y⊗k> = <h, π(<x, y>) k>`.
pub fn module_space_tensor(x: &HilbertModule, pi: &AlgebraRep, tol: Tolerance) -> Result<CompletedTensor> {
    check_rep_on(x, pi)?;
    let (d, h) = (x.dim(), pi.space_dim());
    let n = d * h;
    let mut gram = numkit::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            gram.view_mut((i * h, j * h), (h, h)).copy_from(&pi.apply_coords(x.gram_coords(i, j)));
        }
    }
    let quotient = gram_quotient(&gram, tol)?;
    // x·b ⊗ f_p − x ⊗ π(b) f_p
    let mut balancing: f64 = 0.0;
    for (k, r) in x.action().iter().enumerate() {
        let pb = &pi.images()[k];
        for i in 0..d {
            for p in 0..h {
                let mut u = Vector::zeros(n);
                for m in 0..d {
                    u[m * h + p] += r[(m, i)];
                }
                for q in 0..h {
                    u[i * h + q] -= pb[(q, p)];
                }
                balancing = balancing.max(quotient_norm(&quotient, &u));
            }
        }
    }
    let dim = quotient.quotient_dim;
    Ok(CompletedTensor {
        kind: TensorKind::ModuleSpace,
        algebraic_dim: n,
        gram,
        quotient,
        result: TensorResult::Space(dim),
        balancing,
    })
}

/// `V ⊗_A X` with `<v⊗x, v'⊗x'> = <x, ρ(<v, v'>) x'>` and right action on
/// the second factor.
pub fn interior_tensor(v: &HilbertModule, x: &HilbertModule, rho: &LeftAction, tol: Tolerance) -> Result<CompletedTensor> {
    check_left_action(v, x, rho)?;
    let (dv, dx) = (v.dim(), x.dim());
    let n = dv * dx;
    let mut gram = vec![Vector::zeros(x.algebra().dim()); n * n];
    for l in 0..dv {
        for m in 0..dv {
            let rho_g = rho.apply_coords(v.gram_coords(l, m));
            for i in 0..dx {
                for j in 0..dx {
                    gram[(l * dx + i) * n + m * dx + j] = twisted_inner(x, &rho_g, i, j);
                }
            }
        }
    }
    let id_v = numkit::identity(dv);
    let action: Vec<Matrix> = x.action().iter().map(|r| kron(&id_v, r)).collect();
    let (module, quotient, scalar) = quotient_by_null_vectors(x.algebra(), n, &action, &gram, tol)?;
    // e_l·a ⊗ x_i − e_l ⊗ ρ(a) x_i
    let mut balancing: f64 = 0.0;
    for (k, rv) in v.action().iter().enumerate() {
        let ra = &rho.images()[k];
        for l in 0..dv {
            for i in 0..dx {
                let mut u = Vector::zeros(n);
                for m in 0..dv {
                    u[m * dx + i] += rv[(m, l)];
                }
                for j in 0..dx {
                    u[l * dx + j] -= ra[(j, i)];
                }
                balancing = balancing.max(quotient_norm(&quotient, &u));
            }
        }
    }
    Ok(CompletedTensor {
        kind: TensorKind::Interior,
        algebraic_dim: n,
        gram: scalar,
        quotient,
        result: TensorResult::Module(module),
        balancing,
    })
}

/// `V ⊗_A X ⊗_B H` with
/// `<v⊗x⊗h, v'⊗x'⊗h'> = <h, π(<x, ρ(<v, v'>) x'>) h'>`.
pub fn triple_tensor(
    v: &HilbertModule,
    x: &HilbertModule,
    rho: &LeftAction,
    pi: &AlgebraRep,
    tol: Tolerance,
) -> Result<CompletedTensor> {
    check_left_action(v, x, rho)?;
    check_rep_on(x, pi)?;
    let (dv, dx, h) = (v.dim(), x.dim(), pi.space_dim());
    let n = dv * dx * h;
    let mut gram = numkit::zeros(n, n);
    for l in 0..dv {
        for m in 0..dv {
            let rho_g = rho.apply_coords(v.gram_coords(l, m));
            for i in 0..dx {
                for j in 0..dx {
                    let block = pi.apply_coords(&twisted_inner(x, &rho_g, i, j));
                    gram.view_mut(((l * dx + i) * h, (m * dx + j) * h), (h, h)).copy_from(&block);
                }
            }
        }
    }
    let quotient = gram_quotient(&gram, tol)?;
    let mut balancing: f64 = 0.0;
    // e_l·a ⊗ x_i ⊗ f_p − e_l ⊗ ρ(a) x_i ⊗ f_p
    for (k, rv) in v.action().iter().enumerate() {
        let ra = &rho.images()[k];
        for l in 0..dv {
            for i in 0..dx {
                for p in 0..h {
                    let mut u = Vector::zeros(n);
                    for m in 0..dv {
                        u[(m * dx + i) * h + p] += rv[(m, l)];
                    }
                    for j in 0..dx {
                        u[(l * dx + j) * h + p] -= ra[(j, i)];
                    }
                    balancing = balancing.max(quotient_norm(&quotient, &u));
                }
            }
        }
    }
    // e_l ⊗ x_i·b ⊗ f_p − e_l ⊗ x_i ⊗ π(b) f_p
    for (k, rx) in x.action().iter().enumerate() {
        let pb = &pi.images()[k];
        for l in 0..dv {
            for i in 0..dx {
                for p in 0..h {
                    let mut u = Vector::zeros(n);
                    for j in 0..dx {
                        u[(l * dx + j) * h + p] += rx[(j, i)];
                    }
                    for q in 0..h {
                        u[(l * dx + i) * h + q] -= pb[(q, p)];
                    }
                    balancing = balancing.max(quotient_norm(&quotient, &u));
                }
            }
        }
    }
    let dim = quotient.quotient_dim;
    Ok(CompletedTensor { kind: TensorKind::Triple, algebraic_dim: n, gram, quotient, result: TensorResult::Space(dim), balancing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::CStarAlgebra;
    use crate::numkit::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn scalars_tensor_space() {
        let x = HilbertModule::hilbert_space(1).unwrap();
        let s = x.algebra().clone();
        let pi = AlgebraRep::new(crate::cstar::StarHomomorphism::new(s, 2, vec![numkit::identity(2)]).unwrap(), tol()).unwrap();
        let t = module_space_tensor(&x, &pi, tol()).unwrap();
        assert_eq!(t.dim(), 2);
        let x2 = HilbertModule::hilbert_space(2).unwrap();
        let pi1 = AlgebraRep::identity(x2.algebra());
        assert_eq!(module_space_tensor(&x2, &pi1, tol()).unwrap().dim(), 2);
    }

    #[test]
    fn matrix_algebra_over_itself_collapses_to_h() {
        // B ⊗_B H ≅ H: the 8×8 Gram is M*M for M = [E_11 E_12 E_21 E_22]
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let x = HilbertModule::over_itself(&m2).unwrap();
        let t = module_space_tensor(&x, &AlgebraRep::identity(&m2), tol()).unwrap();
        assert_eq!(t.algebraic_dim, 8);
        assert_eq!(t.dim(), 2);
        assert!(t.balancing < 1e-12);
    }

    #[test]
    fn interior_with_algebra_is_identity_up_to_iso() {
        let a = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
        let v = HilbertModule::over_itself(&a).unwrap();
        let rho = LeftAction::left_multiplication(&a, tol()).unwrap();
        let t = interior_tensor(&v, rho.module(), &rho, tol()).unwrap();
        assert_eq!(t.dim(), a.dim());
        assert!(t.balancing < 1e-12);
    }

    #[test]
    fn lift_zero_and_wrong_length() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let x = HilbertModule::over_itself(&m2).unwrap();
        let t = module_space_tensor(&x, &AlgebraRep::identity(&m2), tol()).unwrap();
        assert_eq!(t.lift(&Vector::zeros(8)).unwrap().norm(), 0.0);
        assert!(t.lift(&Vector::zeros(3)).is_err());
    }

    #[test]
    fn descend_rejects_leaky_operator() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let x = HilbertModule::over_itself(&m2).unwrap();
        let t = module_space_tensor(&x, &AlgebraRep::identity(&m2), tol()).unwrap();
        let id = numkit::identity(8);
        let d = descend(&id, &t.quotient, &t.quotient, "identity", tol()).unwrap();
        assert!(frobenius(&(d - numkit::identity(2))) < 1e-12);
        // swapping the H factor alone breaks the balancing relation
        let swap = kron(&numkit::identity(4), &crate::numkit::real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let mut bad = swap.clone();
        bad[(0, 0)] += c(0.5, 0.0);
        assert!(matches!(descend(&bad, &t.quotient, &t.quotient, "bad", tol()), Err(Error::DescentFailure { .. })));
    }
}

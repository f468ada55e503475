//! Induced representations through a module with a left action.
//!
//! Given `X` over `B` with a left action `ρ` of `A`, a representation `φ` of
//! `B` on `H` induces `Ind φ` of `A` on `X ⊗_B H`, and a module
//! representation `Φ` with base `φ` induces `Ind Φ` of any `A`-module `V`:
//! `Ind Φ(v): x ⊗ h ↦ v ⊗ x ⊗ h`. Only `φ` enters the construction.

use crate::cstar::StarHomomorphism;
use crate::error::{Error, Result};
use crate::hilbmod::{HilbertModule, LeftAction};
use crate::numkit::{self, frobenius, kron, operator_norm, Matrix, Tolerance, Vector};
use crate::reps::{self, check_module_rep, direct_sum_reps, verify_unitary_equivalence, AlgebraRep, EquivalenceReport, ModuleRep};
use crate::tensor::{descend, descend_isometry, direct_sum_quotient, module_space_tensor, triple_tensor, CompletedTensor};

/// `Ind φ` on an already built `X ⊗_B H`.
fn induced_base(rho: &LeftAction, space: &CompletedTensor, h: usize, tol: Tolerance) -> Result<AlgebraRep> {
    let id_h = numkit::identity(h);
    let mut images = Vec::with_capacity(rho.images().len());
    for (k, r) in rho.images().iter().enumerate() {
        let op = kron(r, &id_h);
        images.push(descend(&op, &space.quotient, &space.quotient, &format!("left action of algebra element {k} on X⊗H"), tol)?);
    }
    let hom = StarHomomorphism::new(rho.algebra().clone(), space.dim(), images)?;
    AlgebraRep::new(hom, tol.scaled(10.0))
}

/// `Ind φ(a)(x ⊗ h) = (a·x) ⊗ h` on `X ⊗_B H`.
pub fn induce_algebra_rep(x: &HilbertModule, rho: &LeftAction, pi: &AlgebraRep, tol: Tolerance) -> Result<AlgebraRep> {
    Ok(induce_algebra_rep_with_space(x, rho, pi, tol)?.0)
}

/// As [`induce_algebra_rep`], also returning the completed space.
pub fn induce_algebra_rep_with_space(
    x: &HilbertModule,
    rho: &LeftAction,
    pi: &AlgebraRep,
    tol: Tolerance,
) -> Result<(AlgebraRep, CompletedTensor)> {
    if rho.module().dim() != x.dim() || !rho.module().algebra().same_as(x.algebra()) {
        return Err(Error::Shape("left action does not act on the given module".into()));
    }
    if !pi.is_nondegenerate(tol) {
        return Err(Error::Degenerate("inducing representation is degenerate".into()));
    }
    let space = module_space_tensor(x, pi, tol)?;
    let base = induced_base(rho, &space, pi.space_dim(), tol)?;
    Ok((base, space))
}

/// Inputs of module-level induction with their tensor spaces built.
#[derive(Debug, Clone)]
pub struct InducedSetup {
    pub v_module: HilbertModule,
    pub x_module: HilbertModule,
    pub left_action: LeftAction,
    pub source_rep: ModuleRep,
    /// `X ⊗_B H`
    pub domain_space: CompletedTensor,
    /// `V ⊗_A X ⊗_B H`
    pub target_space: CompletedTensor,
    /// `Ind φ` on the domain space.
    pub induced_base: AlgebraRep,
}

impl InducedSetup {
    pub fn new(v: &HilbertModule, rho: &LeftAction, source_rep: &ModuleRep, tol: Tolerance) -> Result<Self> {
        let x = rho.module();
        if !rho.algebra().same_as(v.algebra()) || !source_rep.module().algebra().same_as(x.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        if !reps::is_nondegenerate(source_rep, tol) {
            return Err(Error::Degenerate("source representation is degenerate".into()));
        }
        let pi = source_rep.base();
        let (induced_base, domain_space) = induce_algebra_rep_with_space(x, rho, pi, tol)?;
        let target_space = triple_tensor(v, x, rho, pi, tol)?;
        Ok(InducedSetup {
            v_module: v.clone(),
            x_module: x.clone(),
            left_action: rho.clone(),
            source_rep: source_rep.clone(),
            domain_space,
            target_space,
            induced_base,
        })
    }
}

/// `Ind Φ` together with its postcondition residuals.
#[derive(Debug, Clone)]
pub struct InducedRep {
    pub rep: ModuleRep,
    /// `max ‖Ind Φ(e_l)* Ind Φ(e_m) − Ind φ(<e_l, e_m>)‖`
    pub inner_product_residual: f64,
    /// `max(0, ‖Ind Φ(e_l)‖ − ‖e_l‖)` over the basis.
    pub norm_excess: f64,
    /// Checked only when `V` is full and `ρ` non-degenerate.
    pub nondegenerate: Option<bool>,
    pub threshold: f64,
}

impl InducedRep {
    /// `‖Ind Φ(v)‖` and `‖v‖` for a module vector.
    pub fn norm_pair(&self, v: &Vector) -> (f64, f64) {
        (operator_norm(&self.rep.apply(v)), self.rep.module().norm(v))
    }
}

/// Injection `x ⊗ h ↦ e_l ⊗ x ⊗ h` on algebraic coordinates.
fn injection(l: usize, dx: usize, h: usize, dv: usize) -> Matrix {
    let n = dx * h;
    let mut m = numkit::zeros(dv * n, n);
    for col in 0..n {
        m[(l * n + col, col)] = numkit::ONE;
    }
    m
}

pub fn induce_module_rep(setup: &InducedSetup, tol: Tolerance) -> Result<InducedRep> {
    let v = &setup.v_module;
    let (dv, dx, h) = (v.dim(), setup.x_module.dim(), setup.source_rep.space_dim());
    let mut images = Vec::with_capacity(dv);
    for l in 0..dv {
        let op = injection(l, dx, h, dv);
        images.push(descend(
            &op,
            &setup.domain_space.quotient,
            &setup.target_space.quotient,
            &format!("injection at basis vector {l} of V"),
            tol,
        )?);
    }
    let rep = ModuleRep::new(v.clone(), setup.induced_base.clone(), setup.target_space.dim(), images)?;

    let post = tol.scaled(10.0);
    let report = check_module_rep(&rep, post);
    let threshold = report.threshold;
    if !report.passed {
        return Err(Error::PostconditionViolation {
            check: "inner-product relation".into(),
            residual: report.residual,
            threshold,
        });
    }
    let mut norm_excess: f64 = 0.0;
    for l in 0..dv {
        let e = v.basis_vector(l);
        let (lhs, rhs) = (operator_norm(&rep.images()[l]), v.norm(&e));
        let excess = (lhs - rhs).max(0.0);
        if excess > post.bound(rhs) {
            return Err(Error::PostconditionViolation { check: "norm bound".into(), residual: excess, threshold: post.bound(rhs) });
        }
        norm_excess = norm_excess.max(excess);
    }
    let nondegenerate = if v.is_full(tol) && setup.left_action.is_nondegenerate() {
        let ok = reps::is_nondegenerate(&rep, tol);
        if !ok {
            return Err(Error::PostconditionViolation { check: "non-degeneracy".into(), residual: 1.0, threshold: 0.0 });
        }
        Some(true)
    } else {
        None
    };
    Ok(InducedRep { rep, inner_product_residual: report.residual, norm_excess, nondegenerate, threshold })
}

/// Transported equivalence `(V1, V2)` between `Ind Φ1` and `Ind Φ2`.
#[derive(Debug, Clone)]
pub struct TransportReport {
    pub v1: Matrix,
    pub v2: Matrix,
    pub induced1: ModuleRep,
    pub induced2: ModuleRep,
    pub equivalence: EquivalenceReport,
}

/// From `U2 Φ1(w) = Φ2(w) U1` build `V1 = id ⊗ U1` on `X ⊗ H` and
/// `V2 = id ⊗ id ⊗ U1` on `V ⊗ X ⊗ H` and verify
/// `V2 Ind Φ1(v) = Ind Φ2(v) V1`.
pub fn transport_equivalence(
    u1: &Matrix,
    setup1: &InducedSetup,
    setup2: &InducedSetup,
    tol: Tolerance,
) -> Result<TransportReport> {
    let (h1, h2) = (setup1.source_rep.space_dim(), setup2.source_rep.space_dim());
    if u1.nrows() != h2 || u1.ncols() != h1 {
        return Err(Error::Shape(format!("U1 is {}x{}, expected {h2}x{h1}", u1.nrows(), u1.ncols())));
    }
    let (dv, dx) = (setup1.v_module.dim(), setup1.x_module.dim());
    if setup2.v_module.dim() != dv || setup2.x_module.dim() != dx {
        return Err(Error::Shape("setups differ in V or X".into()));
    }
    let op1 = kron(&numkit::identity(dx), u1);
    let v1 = descend_isometry(&op1, &setup1.domain_space, &setup2.domain_space, "id_X ⊗ U1", tol)?;
    let op2 = kron(&numkit::identity(dv * dx), u1);
    let v2 = descend_isometry(&op2, &setup1.target_space, &setup2.target_space, "id_V ⊗ id_X ⊗ U1", tol)?;
    let induced1 = induce_module_rep(setup1, tol)?.rep;
    let induced2 = induce_module_rep(setup2, tol)?.rep;
    let equivalence = verify_unitary_equivalence(&induced1, &induced2, &v1, &v2, tol);
    Ok(TransportReport { v1, v2, induced1, induced2, equivalence })
}

#[derive(Debug, Clone)]
pub struct DirectSumReport {
    pub d1: Matrix,
    pub d2: Matrix,
    pub equivalence: EquivalenceReport,
    /// Quotient dimensions of `X ⊗ (⊕ H_s)` and of the summands.
    pub domain_dims: (usize, Vec<usize>),
}

/// Permutation sending `(i, offset_s + p)` in `X ⊗ (⊕ H_s)` to block `s`,
/// index `i * h_s + p`, of `⊕ (X ⊗ H_s)`; `outer` copies of that pattern.
fn distribution(outer: usize, dims: &[usize]) -> Matrix {
    let total: usize = dims.iter().sum();
    let n = outer * total;
    let mut m = numkit::zeros(n, n);
    let mut block_start = 0;
    let mut offset = 0;
    for &h in dims {
        for i in 0..outer {
            for p in 0..h {
                m[(block_start + i * h + p, i * total + offset + p)] = numkit::ONE;
            }
        }
        block_start += outer * h;
        offset += h;
    }
    m
}

/// `Ind(⊕ Φ_s)` against `⊕ Ind Φ_s` through the distribution unitaries.
pub fn direct_sum_compatibility(setups: &[InducedSetup], tol: Tolerance) -> Result<DirectSumReport> {
    let first = setups.first().ok_or_else(|| Error::Degenerate("no summands".into()))?;
    let sources: Vec<ModuleRep> = setups.iter().map(|s| s.source_rep.clone()).collect();
    let sum_rep = direct_sum_reps(&sources, tol)?;
    let sum_setup = InducedSetup::new(&first.v_module, &first.left_action, &sum_rep, tol)?;
    let induced_sum = induce_module_rep(&sum_setup, tol)?.rep;
    let parts = setups.iter().map(|s| induce_module_rep(s, tol).map(|r| r.rep)).collect::<Result<Vec<_>>>()?;
    let sum_of_induced = direct_sum_reps(&parts, tol)?;

    let dims: Vec<usize> = setups.iter().map(|s| s.source_rep.space_dim()).collect();
    let (dv, dx) = (first.v_module.dim(), first.x_module.dim());
    let domain_q = direct_sum_quotient(&setups.iter().map(|s| &s.domain_space.quotient).collect::<Vec<_>>());
    let target_q = direct_sum_quotient(&setups.iter().map(|s| &s.target_space.quotient).collect::<Vec<_>>());
    let d1 = descend(&distribution(dx, &dims), &sum_setup.domain_space.quotient, &domain_q, "distribution on X⊗H", tol)?;
    let d2 = descend(&distribution(dv * dx, &dims), &sum_setup.target_space.quotient, &target_q, "distribution on V⊗X⊗H", tol)?;
    let equivalence = verify_unitary_equivalence(&induced_sum, &sum_of_induced, &d1, &d2, tol.scaled(10.0));
    Ok(DirectSumReport {
        d1,
        d2,
        equivalence,
        domain_dims: (sum_setup.domain_space.dim(), setups.iter().map(|s| s.domain_space.dim()).collect()),
    })
}

/// Largest difference between the images of two module representations.
pub fn image_distance(a: &ModuleRep, b: &ModuleRep) -> f64 {
    if a.images().len() != b.images().len() {
        return f64::INFINITY;
    }
    a.images()
        .iter()
        .zip(b.images())
        .map(|(x, y)| if x.shape() == y.shape() { frobenius(&(x - y)) } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::CStarAlgebra;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn algebra_over_itself_induces_back() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let rho = LeftAction::left_multiplication(&m2, tol()).unwrap();
        let pi = AlgebraRep::identity(&m2);
        let (ind, space) = induce_algebra_rep_with_space(rho.module(), &rho, &pi, tol()).unwrap();
        assert_eq!(ind.space_dim(), 2);
        // x ⊗ h ↦ π(x) h
        let mut w = numkit::zeros(2, 8);
        for i in 0..4 {
            for p in 0..2 {
                w.set_column(i * 2 + p, &m2.basis()[i].column(p));
            }
        }
        let u = descend(&w, &space.quotient, &crate::numkit::GramQuotient::identity(2), "x⊗h ↦ π(x)h", tol()).unwrap();
        assert!(reps::unitarity_residual(&u) < 1e-12);
        for k in 0..4 {
            assert!(frobenius(&(&u * &ind.images()[k] - &pi.images()[k] * &u)) < 1e-12);
        }
    }

    #[test]
    fn trivial_module_gives_isometry() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let scalars = CStarAlgebra::scalars();
        // X = C² columns over M_2 is awkward; use X = M_2 with the scalars
        // acting by multiples of the identity.
        let x = HilbertModule::over_itself(&m2).unwrap();
        let rho = crate::hilbmod::make_left_action(&scalars, &x, vec![numkit::identity(4)], tol()).unwrap();
        let v = HilbertModule::hilbert_space(1).unwrap();
        let v = crate::hilbmod::make_module(&scalars, 1, v.action().to_vec(), v.gram().to_vec(), tol()).unwrap();
        let w = HilbertModule::over_itself(&m2).unwrap();
        let phi = ModuleRep::new(w, AlgebraRep::identity(&m2), 2, m2.basis().to_vec()).unwrap();
        let setup = InducedSetup::new(&v, &rho, &phi, tol()).unwrap();
        let ind = induce_module_rep(&setup, tol()).unwrap();
        let t = &ind.rep.images()[0];
        assert!(frobenius(&(t.adjoint() * t - numkit::identity(t.ncols()))) < 1e-12);
    }
}

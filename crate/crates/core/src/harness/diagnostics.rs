//! Best-effort diagnostics that the core never relies on.

use crate::error::Result;
use crate::hilbmod::HilbertModule;
use crate::numkit::{self, Matrix, Tolerance, RANK_CUTOFF};
use crate::reps::{verify_unitary_equivalence, ModuleRep};

use super::generate::{random_complex, Seeded};

/// Pairs `(S, T)` with `T Φ1(x) = Φ2(x) S` and `S Φ1(x)* = Φ2(x)* T` for
/// every basis vector `x`, as a basis of the solution space.
pub fn intertwiners(r1: &ModuleRep, r2: &ModuleRep) -> Vec<(Matrix, Matrix)> {
    let (h1, k1, h2, k2) = (r1.space_dim(), r1.target_dim(), r2.space_dim(), r2.target_dim());
    let (s_len, t_len) = (h2 * h1, k2 * k1);
    let block = k2 * h1 + h2 * k1;
    let mut system = numkit::zeros(block * r1.images().len(), s_len + t_len);
    for (idx, (p1, p2)) in r1.images().iter().zip(r2.images()).enumerate() {
        let base = idx * block;
        // vec(T Φ1 − Φ2 S)
        let t_part = p1.transpose().kronecker(&numkit::identity(k2));
        let s_part = numkit::identity(h1).kronecker(p2);
        system.view_mut((base, 0), (k2 * h1, s_len)).copy_from(&(-s_part));
        system.view_mut((base, s_len), (k2 * h1, t_len)).copy_from(&t_part);
        // vec(S Φ1* − Φ2* T)
        let (a1, a2) = (p1.adjoint(), p2.adjoint());
        let s_part = a1.transpose().kronecker(&numkit::identity(h2));
        let t_part = numkit::identity(k1).kronecker(&a2);
        system.view_mut((base + k2 * h1, 0), (h2 * k1, s_len)).copy_from(&s_part);
        system.view_mut((base + k2 * h1, s_len), (h2 * k1, t_len)).copy_from(&(-t_part));
    }
    let null = numkit::null_space(&system, RANK_CUTOFF);
    (0..null.ncols())
        .map(|col| {
            let v = null.column(col);
            let s = Matrix::from_column_slice(h2, h1, v.rows(0, s_len).as_slice());
            let t = Matrix::from_column_slice(k2, k1, v.rows(s_len, t_len).as_slice());
            (s, t)
        })
        .collect()
}

/// Unitary part `m (m* m)^{-1/2}`, or `None` if `m` is singular.
fn polar_unitary(m: &Matrix, tol: Tolerance) -> Option<Matrix> {
    if !m.is_square() || numkit::rank(m, RANK_CUTOFF) < m.ncols() {
        return None;
    }
    let eig = numkit::hermitian_eig(&(m.adjoint() * m), tol).ok()?;
    let n = m.ncols();
    let inv_sqrt = Matrix::from_fn(n, n, |i, j| if i == j { numkit::c(eig.values[i].max(0.0).sqrt().recip(), 0.0) } else { numkit::ZERO });
    Some(m * &eig.vectors * inv_sqrt * eig.vectors.adjoint())
}

/// Look for a unitary equivalence `(U1, U2)` from `r1` to `r2` via the polar
/// decomposition of a random intertwiner. Equivalent representations give an
/// invertible intertwiner with probability one; the result is verified
/// before it is returned.
pub fn find_equivalence(r1: &ModuleRep, r2: &ModuleRep, rng: &mut Seeded, tol: Tolerance) -> Option<(Matrix, Matrix)> {
    if r1.space_dim() != r2.space_dim() || r1.target_dim() != r2.target_dim() {
        return None;
    }
    let basis = intertwiners(r1, r2);
    if basis.is_empty() {
        return None;
    }
    let mut s = numkit::zeros(r2.space_dim(), r1.space_dim());
    let mut t = numkit::zeros(r2.target_dim(), r1.target_dim());
    for (bs, bt) in &basis {
        let w = random_complex(rng);
        s += bs * w;
        t += bt * w;
    }
    let u1 = polar_unitary(&s, tol)?;
    let u2 = polar_unitary(&t, tol)?;
    verify_unitary_equivalence(r1, r2, &u1, &u2, tol).passed.then_some((u1, u2))
}

/// `(dim K(V), dim of all right-module maps on V)`. In finite dimensions
/// the two agree; a mismatch flags a numerical problem.
pub fn compact_dimension_gap(m: &HilbertModule, tol: Tolerance) -> Result<(usize, usize)> {
    let d = m.dim();
    let compacts = m.compacts(tol)?.dim();
    let id = numkit::identity(d);
    let mut system = numkit::zeros(d * d * m.action().len(), d * d);
    for (idx, act) in m.action().iter().enumerate() {
        // vec(T R − R T) = (Rᵀ ⊗ I − I ⊗ R) vec T
        let block = act.transpose().kronecker(&id) - id.kronecker(act);
        system.view_mut((idx * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let module_maps = numkit::null_space(&system, RANK_CUTOFF).ncols();
    Ok((compacts, module_maps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::CStarAlgebra;
    use crate::harness::generate;

    #[test]
    fn finds_a_planted_equivalence() {
        let tol = Tolerance::default();
        let g = generate::scenario(4, tol).unwrap();
        let mut rng = generate::rng(9);
        let (phi2, _, _) = generate::unitary_conjugate(&g.scenario.phi, &mut rng);
        let (u1, u2) = find_equivalence(&g.scenario.phi, &phi2, &mut rng, tol).expect("equivalent");
        let report = verify_unitary_equivalence(&g.scenario.phi, &phi2, &u1, &u2, tol);
        assert!(report.passed);
    }

    #[test]
    fn compacts_are_all_module_maps() {
        let tol = Tolerance::default();
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let v = HilbertModule::over_itself(&m2).unwrap();
        assert_eq!(compact_dimension_gap(&v, tol).unwrap(), (4, 4));
        let g = generate::scenario(6, tol).unwrap();
        let (k, l) = compact_dimension_gap(&g.scenario.v, tol).unwrap();
        assert_eq!(k, l);
    }
}

//! Representations of algebras and of Hilbert modules.
//!
//! A module representation `Φ: V → B(H, K)` is stored by the images of the
//! basis of `V`, paired with the algebra representation `φ` on `H` for which
//! `Φ(x)* Φ(y) = φ(<x, y>)`.

use crate::cstar::{check_star_hom, hom_nondegenerate, CStarAlgebra, StarHomomorphism};
use crate::error::{Error, Result};
use crate::hilbmod::HilbertModule;
use crate::numkit::{self, block_diag, frobenius, operator_norm, rank, Matrix, Tolerance, Vector, RANK_CUTOFF};

/// A *-representation `φ: A → B(H)`.
#[derive(Debug, Clone)]
pub struct AlgebraRep {
    hom: StarHomomorphism,
}

impl AlgebraRep {
    /// Validates the *-homomorphism identities.
    pub fn new(hom: StarHomomorphism, tol: Tolerance) -> Result<Self> {
        let r = check_star_hom(&hom, tol);
        if !r.passed {
            return Err(Error::NotHomomorphism { multiplicativity: r.multiplicativity, star: r.star });
        }
        Ok(AlgebraRep { hom })
    }

    /// The identity representation of a concrete algebra on its ambient space.
    pub fn identity(algebra: &CStarAlgebra) -> Self {
        AlgebraRep { hom: StarHomomorphism::identity(algebra) }
    }

    pub fn hom(&self) -> &StarHomomorphism {
        &self.hom
    }

    pub fn algebra(&self) -> &CStarAlgebra {
        &self.hom.source
    }

    pub fn space_dim(&self) -> usize {
        self.hom.target_dim
    }

    pub fn images(&self) -> &[Matrix] {
        &self.hom.images
    }

    pub fn apply_coords(&self, coords: &Vector) -> Matrix {
        self.hom.apply_coords(coords)
    }

    pub fn is_nondegenerate(&self, tol: Tolerance) -> bool {
        hom_nondegenerate(&self.hom, tol)
    }

    /// `U φ(·) U*` for a unitary `U`.
    pub fn conjugate(&self, u: &Matrix) -> AlgebraRep {
        let images = self.hom.images.iter().map(|m| u * m * u.adjoint()).collect();
        AlgebraRep { hom: StarHomomorphism { source: self.hom.source.clone(), target_dim: u.nrows(), images } }
    }
}

/// A representation `Φ: V → B(H, K)` of a Hilbert module. Construction only
/// checks shapes; use [`check_module_rep`] for the φ-morphism identity.
#[derive(Debug, Clone)]
pub struct ModuleRep {
    module: HilbertModule,
    base: AlgebraRep,
    target_dim: usize,
    images: Vec<Matrix>,
}

impl ModuleRep {
    pub fn new(module: HilbertModule, base: AlgebraRep, target_dim: usize, images: Vec<Matrix>) -> Result<Self> {
        if !base.algebra().same_as(module.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        if images.len() != module.dim() {
            return Err(Error::Shape(format!("{} images for a module of dimension {}", images.len(), module.dim())));
        }
        let h = base.space_dim();
        for (i, m) in images.iter().enumerate() {
            if m.nrows() != target_dim || m.ncols() != h {
                return Err(Error::Shape(format!("image {i} is {}x{}, expected {target_dim}x{h}", m.nrows(), m.ncols())));
            }
            if !numkit::all_finite(m) {
                return Err(Error::NonFinite(format!("module representation image {i}")));
            }
        }
        Ok(ModuleRep { module, base, target_dim, images })
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn base(&self) -> &AlgebraRep {
        &self.base
    }

    /// `dim H`.
    pub fn space_dim(&self) -> usize {
        self.base.space_dim()
    }

    /// `dim K`.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn images_mut(&mut self) -> &mut [Matrix] {
        &mut self.images
    }

    /// `Φ(x)` for a module element in coordinates.
    pub fn apply(&self, x: &Vector) -> Matrix {
        self.images
            .iter()
            .zip(x.iter())
            .fold(numkit::zeros(self.target_dim, self.space_dim()), |acc, (m, &c)| acc + m * c)
    }

    /// `(φ, Φ) ↦ (U1 φ U1*, U2 Φ U1*)`.
    pub fn conjugate(&self, u1: &Matrix, u2: &Matrix) -> ModuleRep {
        ModuleRep {
            module: self.module.clone(),
            base: self.base.conjugate(u1),
            target_dim: u2.nrows(),
            images: self.images.iter().map(|m| u2 * m * u1.adjoint()).collect(),
        }
    }

    pub fn check(&self, tol: Tolerance) -> RepReport {
        check_module_rep(self, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepReport {
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Max over basis pairs of `‖Φ(e_i)* Φ(e_j) − φ(<e_i, e_j>)‖`.
pub fn check_module_rep(r: &ModuleRep, tol: Tolerance) -> RepReport {
    let d = r.module.dim();
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..d {
        for j in 0..d {
            let lhs = r.images[i].adjoint() * &r.images[j];
            let rhs = r.base.apply_coords(r.module.gram_coords(i, j));
            scale = scale.max(operator_norm(&rhs));
            residual = residual.max(frobenius(&(lhs - rhs)));
        }
    }
    let threshold = tol.bound(scale);
    RepReport { residual, threshold, passed: residual <= threshold }
}

/// `Φ(V)H` spans `K` and `Φ(V)*K` spans `H`.
pub fn is_nondegenerate(r: &ModuleRep, _tol: Tolerance) -> bool {
    let (h, k) = (r.space_dim(), r.target_dim);
    if r.images.is_empty() {
        return h == 0 && k == 0;
    }
    let forward = Matrix::from_fn(k, h * r.images.len(), |row, col| r.images[col / h.max(1)][(row, col % h.max(1))]);
    let backward = Matrix::from_fn(h, k * r.images.len(), |row, col| r.images[col / k.max(1)][(col % k.max(1), row)].conj());
    let spans_k = k == 0 || rank(&forward, RANK_CUTOFF) == k;
    let spans_h = h == 0 || rank(&backward, RANK_CUTOFF) == h;
    spans_k && spans_h
}

/// A pair of orthogonal projections `(p1 on H, p2 on K)`.
#[derive(Debug, Clone)]
pub struct SubspacePair {
    pub p1: Matrix,
    pub p2: Matrix,
}

impl SubspacePair {
    pub fn new(p1: Matrix, p2: Matrix, tol: Tolerance) -> Result<Self> {
        for (name, p) in [("p1", &p1), ("p2", &p2)] {
            if !p.is_square() {
                return Err(Error::Shape(format!("{name} is not square")));
            }
            let res = frobenius(&(p - p.adjoint())) + frobenius(&(p * p - p));
            if res > tol.bound(1.0) {
                return Err(Error::Shape(format!("{name} is not an orthogonal projection (residual {res:.3e})")));
            }
        }
        Ok(SubspacePair { p1, p2 })
    }

    /// Projection onto the column span of `basis`.
    pub fn projection_onto(basis: &Matrix) -> Matrix {
        let n = basis.nrows();
        if basis.ncols() == 0 {
            return numkit::zeros(n, n);
        }
        let q = basis.clone().qr().q();
        let r = rank(basis, RANK_CUTOFF);
        let q = q.columns(0, r).into_owned();
        &q * q.adjoint()
    }
}

/// `Φ(V) K1 ⊆ K2` and `Φ(V)* K2 ⊆ K1`.
pub fn check_invariant_pair(r: &ModuleRep, s: &SubspacePair, tol: Tolerance) -> bool {
    let (h, k) = (r.space_dim(), r.target_dim);
    if s.p1.nrows() != h || s.p2.nrows() != k {
        return false;
    }
    let (q1, q2) = (numkit::identity(h) - &s.p1, numkit::identity(k) - &s.p2);
    r.images.iter().all(|m| {
        let scale = operator_norm(m).max(1.0);
        frobenius(&(&q2 * m * &s.p1)) <= tol.bound(scale) && frobenius(&(&q1 * m.adjoint() * &s.p2)) <= tol.bound(scale)
    })
}

/// Basis of the system commutant: pairs `(S, T)` with `T Φ(e_i) = Φ(e_i) S`
/// and `S Φ(e_i)* = Φ(e_i)* T` for all `i`. Returned as columns of
/// `[vec S; vec T]` (column-major vectorization).
pub fn system_commutant(r: &ModuleRep) -> Result<Vec<(Matrix, Matrix)>> {
    let (h, k) = (r.space_dim(), r.target_dim);
    if r.module.dim() == 0 || h + k == 0 {
        return Err(Error::Degenerate("commutant of a representation of the zero module".into()));
    }
    let unknowns = h * h + k * k;
    let rows_per = 2 * k * h;
    let mut system = numkit::zeros(rows_per * r.images.len(), unknowns);
    let id_h = numkit::identity(h);
    let id_k = numkit::identity(k);
    for (idx, phi) in r.images.iter().enumerate() {
        let base = idx * rows_per;
        // vec(T Φ − Φ S) = (Φᵀ ⊗ I_k) vec T − (I_h ⊗ Φ) vec S
        let t_part = phi.transpose().kronecker(&id_k);
        let s_part = id_h.kronecker(phi);
        system.view_mut((base, 0), (k * h, h * h)).copy_from(&(-s_part));
        system.view_mut((base, h * h), (k * h, k * k)).copy_from(&t_part);
        // vec(S Φ* − Φ* T) = ((Φ*)ᵀ ⊗ I_h) vec S − (I_k ⊗ Φ*) vec T
        let adj = phi.adjoint();
        let s_part = adj.transpose().kronecker(&id_h);
        let t_part = id_k.kronecker(&adj);
        system.view_mut((base + k * h, 0), (h * k, h * h)).copy_from(&s_part);
        system.view_mut((base + k * h, h * h), (h * k, k * k)).copy_from(&(-t_part));
    }
    let null = numkit::null_space(&system, RANK_CUTOFF);
    Ok((0..null.ncols())
        .map(|col| {
            let v = null.column(col);
            let s = Matrix::from_column_slice(h, h, v.rows(0, h * h).as_slice());
            let t = Matrix::from_column_slice(k, k, v.rows(h * h, k * k).as_slice());
            (s, t)
        })
        .collect())
}

/// Irreducible iff the system commutant is one-dimensional.
pub fn is_irreducible(r: &ModuleRep, _tol: Tolerance) -> Result<bool> {
    Ok(system_commutant(r)?.len() == 1)
}

/// Block-diagonal direct sum of representations of the same module.
pub fn direct_sum_reps(reps: &[ModuleRep], tol: Tolerance) -> Result<ModuleRep> {
    let first = reps.first().ok_or_else(|| Error::Degenerate("empty direct sum".into()))?;
    for r in reps {
        if r.module.dim() != first.module.dim() || !r.module.algebra().same_as(first.module.algebra()) {
            return Err(Error::Shape("direct sum of representations of different modules".into()));
        }
    }
    let alg = first.base.algebra().clone();
    let base_images = (0..alg.dim())
        .map(|l| block_diag(&reps.iter().map(|r| r.base.images()[l].clone()).collect::<Vec<_>>()))
        .collect();
    let h: usize = reps.iter().map(|r| r.space_dim()).sum();
    let k: usize = reps.iter().map(|r| r.target_dim).sum();
    let base = AlgebraRep::new(StarHomomorphism::new(alg, h, base_images)?, tol)?;
    let images = (0..first.module.dim())
        .map(|i| block_diag(&reps.iter().map(|r| r.images[i].clone()).collect::<Vec<_>>()))
        .collect();
    let sum = ModuleRep::new(first.module.clone(), base, k, images)?;
    let report = check_module_rep(&sum, tol);
    if !report.passed {
        return Err(Error::PostconditionViolation {
            check: "direct sum is a module representation".into(),
            residual: report.residual,
            threshold: report.threshold,
        });
    }
    Ok(sum)
}

/// Residuals for a claimed unitary equivalence `U2 Φ1(v) = Φ2(v) U1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub u1_unitarity: f64,
    pub u2_unitarity: f64,
    pub intertwining: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn unitarity_residual(u: &Matrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    frobenius(&(u.adjoint() * u - numkit::identity(n))).max(frobenius(&(u * u.adjoint() - numkit::identity(n))))
}

pub fn verify_unitary_equivalence(
    r1: &ModuleRep,
    r2: &ModuleRep,
    u1: &Matrix,
    u2: &Matrix,
    tol: Tolerance,
) -> EquivalenceReport {
    let shapes_ok = r1.images.len() == r2.images.len()
        && u1.nrows() == r2.space_dim()
        && u1.ncols() == r1.space_dim()
        && u2.nrows() == r2.target_dim
        && u2.ncols() == r1.target_dim;
    if !shapes_ok {
        return EquivalenceReport {
            u1_unitarity: f64::INFINITY,
            u2_unitarity: f64::INFINITY,
            intertwining: f64::INFINITY,
            threshold: tol.bound(1.0),
            passed: false,
        };
    }
    let u1_unitarity = unitarity_residual(u1);
    let u2_unitarity = unitarity_residual(u2);
    let mut intertwining: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (a, b) in r1.images.iter().zip(&r2.images) {
        scale = scale.max(operator_norm(a));
        intertwining = intertwining.max(frobenius(&(u2 * a - b * u1)));
    }
    let threshold = tol.bound(scale);
    let passed = u1_unitarity <= tol.bound(1.0) && u2_unitarity <= tol.bound(1.0) && intertwining <= threshold;
    EquivalenceReport { u1_unitarity, u2_unitarity, intertwining, threshold, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// `V = M_2` over itself, `φ = id` on `C²`, `Φ(a) = a`.
    pub(crate) fn left_multiplication_rep() -> ModuleRep {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let v = HilbertModule::over_itself(&m2).unwrap();
        ModuleRep::new(v, AlgebraRep::identity(&m2), 2, m2.basis().to_vec()).unwrap()
    }

    #[test]
    fn left_multiplication_rep_is_valid_and_irreducible() {
        let r = left_multiplication_rep();
        let rep = check_module_rep(&r, tol());
        assert!(rep.passed && rep.residual < 1e-14);
        assert!(is_nondegenerate(&r, tol()));
        assert_eq!(system_commutant(&r).unwrap().len(), 1);
        let double = direct_sum_reps(&[r.clone(), r], tol()).unwrap();
        assert_eq!(double.space_dim(), 4);
        assert_eq!(system_commutant(&double).unwrap().len(), 4);
        assert!(!is_irreducible(&double, tol()).unwrap());
    }

    #[test]
    fn zero_images_fail_and_padding_breaks_nondegeneracy() {
        let r = left_multiplication_rep();
        let zero = ModuleRep::new(r.module().clone(), r.base().clone(), 2, vec![numkit::zeros(2, 2); 4]).unwrap();
        assert!(!check_module_rep(&zero, tol()).passed);
        let padded = ModuleRep::new(
            r.module().clone(),
            r.base().clone(),
            3,
            r.images().iter().map(|m| m.clone().insert_row(2, c(0.0, 0.0))).collect(),
        )
        .unwrap();
        assert!(check_module_rep(&padded, tol()).passed);
        assert!(!is_nondegenerate(&padded, tol()));
    }

    #[test]
    fn trivial_pairs_are_invariant() {
        let r = left_multiplication_rep();
        let zero = SubspacePair::new(numkit::zeros(2, 2), numkit::zeros(2, 2), tol()).unwrap();
        let full = SubspacePair::new(numkit::identity(2), numkit::identity(2), tol()).unwrap();
        assert!(check_invariant_pair(&r, &zero, tol()));
        assert!(check_invariant_pair(&r, &full, tol()));
        let double = direct_sum_reps(&[r.clone(), r], tol()).unwrap();
        let first = crate::numkit::block_diag(&[numkit::identity(2), numkit::zeros(2, 2)]);
        let pair = SubspacePair::new(first.clone(), first, tol()).unwrap();
        assert!(check_invariant_pair(&double, &pair, tol()));
    }

    #[test]
    fn zero_module_commutant_is_an_error() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let zero = crate::hilbmod::make_module(&m2, 0, vec![numkit::zeros(0, 0); 4], vec![], tol()).unwrap();
        let r = ModuleRep::new(zero, AlgebraRep::identity(&m2), 2, vec![]).unwrap();
        assert!(matches!(is_irreducible(&r, tol()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn equivalence_identity_and_sign_flip() {
        let r = left_multiplication_rep();
        let id = numkit::identity(2);
        assert!(verify_unitary_equivalence(&r, &r, &id, &id, tol()).passed);
        let mut flipped = r.clone();
        flipped.images_mut()[0] *= c(-1.0, 0.0);
        assert!(!verify_unitary_equivalence(&r, &flipped, &id, &id, tol()).passed);
    }
}

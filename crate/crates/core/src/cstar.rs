//! Finite-dimensional C*-algebras realized as *-closed matrix subalgebras.
//!
//! An algebra is stored through a basis of `n × n` matrices (its faithful
//! ambient picture). Products and adjoints are formed in the ambient space and
//! re-expressed in basis coordinates by least squares; a residual above
//! tolerance means the span is not closed.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkit::{
    self, block_diag, frobenius, matrix_unit, rank, vec_of, Matrix, SpanSolver, Tolerance, Vector, C64,
    RANK_CUTOFF, ZERO,
};

#[derive(Debug)]
struct AlgebraData {
    ambient_dim: usize,
    basis: Vec<Matrix>,
    unit_coords: Vector,
    solver: SpanSolver,
    /// `products[i * k + j]` = coordinates of `a_i a_j`.
    products: Vec<Vector>,
    /// column `k` = coordinates of `a_k*`.
    star: Matrix,
    tol: Tolerance,
}

/// A concrete finite-dimensional C*-algebra. Cheap to clone.
#[derive(Clone)]
pub struct CStarAlgebra(Arc<AlgebraData>);

impl fmt::Debug for CStarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CStarAlgebra")
            .field("ambient_dim", &self.0.ambient_dim)
            .field("dim", &self.0.basis.len())
            .finish()
    }
}

/// Validate a basis and build the algebra it spans.
pub fn make_algebra(basis: Vec<Matrix>, tol: Tolerance) -> Result<CStarAlgebra> {
    let Some(first) = basis.first() else {
        return Err(Error::EmptyAlgebra);
    };
    let n = first.nrows();
    for (idx, b) in basis.iter().enumerate() {
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::Shape(format!("basis element {idx} is {}x{}, expected {n}x{n}", b.nrows(), b.ncols())));
        }
        if !numkit::all_finite(b) {
            return Err(Error::NonFinite(format!("basis element {idx}")));
        }
    }
    let k = basis.len();
    let cols = Matrix::from_columns(&basis.iter().map(vec_of).collect::<Vec<_>>());
    let solver = SpanSolver::new(cols)?;
    let scale = basis.iter().map(numkit::operator_norm).fold(0.0, f64::max).max(1.0);

    let mut star = numkit::zeros(k, k);
    for (idx, b) in basis.iter().enumerate() {
        let (x, residual) = solver.solve(&vec_of(&b.adjoint()));
        if residual > tol.bound(scale) {
            return Err(Error::NotStarClosed { index: idx, residual });
        }
        star.set_column(idx, &x);
    }

    let mut products = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (x, residual) = solver.solve(&vec_of(&(&basis[i] * &basis[j])));
            if residual > tol.bound(scale * scale) {
                return Err(Error::NotProductClosed { i, j, residual });
            }
            products.push(x);
        }
    }

    // e·a_j = a_j and a_j·e = a_j, linear in the coordinates of e
    let mut system = numkit::zeros(2 * k * n * n, k);
    let mut rhs = numkit::zeros(2 * k * n * n, 1);
    for j in 0..k {
        let target = vec_of(&basis[j]);
        for l in 0..k {
            let left = vec_of(&(&basis[l] * &basis[j]));
            let right = vec_of(&(&basis[j] * &basis[l]));
            for r in 0..n * n {
                system[(2 * j * n * n + r, l)] = left[r];
                system[((2 * j + 1) * n * n + r, l)] = right[r];
            }
        }
        for r in 0..n * n {
            rhs[(2 * j * n * n + r, 0)] = target[r];
            rhs[((2 * j + 1) * n * n + r, 0)] = target[r];
        }
    }
    let (u, residual) = numkit::least_squares(&system, &rhs)?;
    if residual > tol.bound(scale) {
        return Err(Error::NoUnit { residual });
    }
    let unit_coords = u.column(0).into_owned();

    Ok(CStarAlgebra(Arc::new(AlgebraData {
        ambient_dim: n,
        basis,
        unit_coords,
        solver,
        products,
        star,
        tol,
    })))
}

/// Block-diagonal direct sum of algebras.
pub fn direct_sum(parts: &[CStarAlgebra]) -> Result<CStarAlgebra> {
    match parts {
        [] => Err(Error::EmptyAlgebra),
        [single] => Ok(single.clone()),
        _ => {
            let dims: Vec<usize> = parts.iter().map(|a| a.ambient_dim()).collect();
            let mut basis = Vec::new();
            for (p, alg) in parts.iter().enumerate() {
                for b in alg.basis() {
                    let blocks: Vec<Matrix> = dims
                        .iter()
                        .enumerate()
                        .map(|(q, &d)| if q == p { b.clone() } else { numkit::zeros(d, d) })
                        .collect();
                    basis.push(block_diag(&blocks));
                }
            }
            make_algebra(basis, parts[0].tolerance())
        }
    }
}

impl CStarAlgebra {
    /// `M_n` with matrix units `E_{ij}` in row-major order.
    pub fn full_matrix(n: usize) -> Result<CStarAlgebra> {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(matrix_unit(n, n, i, j));
            }
        }
        make_algebra(basis, Tolerance::default())
    }

    /// The complex numbers as `M_1`.
    pub fn scalars() -> CStarAlgebra {
        Self::full_matrix(1).expect("M_1 is a valid algebra")
    }

    /// `M_{n_1} ⊕ … ⊕ M_{n_r}` in block-diagonal position.
    pub fn block_diagonal(sizes: &[usize]) -> Result<CStarAlgebra> {
        let parts = sizes.iter().map(|&n| Self::full_matrix(n)).collect::<Result<Vec<_>>>()?;
        direct_sum(&parts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.0.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.0.basis
    }

    pub fn tolerance(&self) -> Tolerance {
        self.0.tol
    }

    pub fn unit_coords(&self) -> &Vector {
        &self.0.unit_coords
    }

    /// Coordinates of `a_i a_j`.
    pub fn product_coords(&self, i: usize, j: usize) -> &Vector {
        &self.0.products[i * self.dim() + j]
    }

    /// Coordinates of `a_k*`.
    pub fn star_coords(&self, k: usize) -> Vector {
        self.0.star.column(k).into_owned()
    }

    /// Same algebra: shared storage or identical basis matrices.
    pub fn same_as(&self, other: &CStarAlgebra) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.ambient_dim() == other.ambient_dim() && self.basis() == other.basis())
    }

    /// Same subspace of the ambient matrix space (the bases may differ).
    pub fn same_span(&self, other: &CStarAlgebra, tol: Tolerance) -> bool {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return false;
        }
        other.basis().iter().all(|b| self.coords_of(b, tol).is_ok())
    }

    pub fn element(&self, coords: Vector) -> Result<AlgebraElement> {
        if coords.len() != self.dim() {
            return Err(Error::Shape(format!("{} coordinates for an algebra of dimension {}", coords.len(), self.dim())));
        }
        Ok(AlgebraElement { algebra: self.clone(), coords })
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), coords: Vector::zeros(self.dim()) }
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), coords: self.0.unit_coords.clone() }
    }

    pub fn basis_element(&self, k: usize) -> AlgebraElement {
        let mut coords = Vector::zeros(self.dim());
        coords[k] = C64::new(1.0, 0.0);
        AlgebraElement { algebra: self.clone(), coords }
    }

    /// Ambient matrix of a coordinate vector.
    pub fn matrix_of(&self, coords: &Vector) -> Matrix {
        let n = self.ambient_dim();
        self.basis().iter().zip(coords.iter()).fold(numkit::zeros(n, n), |acc, (b, &x)| acc + b * x)
    }

    /// Coordinates of an ambient matrix that lies in the span.
    pub fn coords_of(&self, m: &Matrix, tol: Tolerance) -> Result<Vector> {
        if m.nrows() != self.ambient_dim() || m.ncols() != self.ambient_dim() {
            return Err(Error::Shape("matrix does not live in the ambient space".into()));
        }
        let (x, residual) = self.0.solver.solve(&vec_of(m));
        if residual > tol.bound(frobenius(m).max(1.0)) {
            return Err(Error::CoordinateSolveFailed { residual });
        }
        Ok(x)
    }

    pub fn from_matrix(&self, m: &Matrix, tol: Tolerance) -> Result<AlgebraElement> {
        Ok(AlgebraElement { algebra: self.clone(), coords: self.coords_of(m, tol)? })
    }

    /// Coordinates of a product, from the cached structure constants.
    pub fn mul_coords(&self, x: &Vector, y: &Vector) -> Vector {
        let k = self.dim();
        let mut out = Vector::zeros(k);
        for i in 0..k {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..k {
                if y[j] == ZERO {
                    continue;
                }
                out += self.product_coords(i, j) * (x[i] * y[j]);
            }
        }
        out
    }

    /// Coordinates of an adjoint, from the cached star table.
    pub fn adjoint_coords(&self, x: &Vector) -> Vector {
        &self.0.star * x.map(|z| z.conj())
    }

    /// Trace of each basis element in the ambient picture.
    pub fn basis_traces(&self) -> Vector {
        Vector::from_iterator(self.dim(), self.basis().iter().map(numkit::trace))
    }
}

/// An element of a [`CStarAlgebra`] in basis coordinates.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: CStarAlgebra,
    coords: Vector,
}

impl AlgebraElement {
    pub fn algebra(&self) -> &CStarAlgebra {
        &self.algebra
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn to_matrix(&self) -> Matrix {
        self.algebra.matrix_of(&self.coords)
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Product computed in the ambient picture.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let prod = self.to_matrix() * other.to_matrix();
        self.algebra.from_matrix(&prod, self.algebra.tolerance())
    }

    pub fn adjoint(&self) -> Result<AlgebraElement> {
        let adj = self.to_matrix().adjoint();
        self.algebra.from_matrix(&adj, self.algebra.tolerance())
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement { algebra: self.algebra.clone(), coords: &self.coords + &other.coords })
    }

    pub fn scale(&self, s: C64) -> AlgebraElement {
        AlgebraElement { algebra: self.algebra.clone(), coords: &self.coords * s }
    }

    /// The C* norm, computed as the ambient operator norm.
    pub fn norm(&self) -> f64 {
        numkit::operator_norm(&self.to_matrix())
    }

    pub fn is_positive(&self, tol: Tolerance) -> bool {
        numkit::is_psd(&self.to_matrix(), tol)
    }
}

pub fn alg_mul(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.mul(b)
}

pub fn alg_adjoint(a: &AlgebraElement) -> Result<AlgebraElement> {
    a.adjoint()
}

pub fn alg_norm(a: &AlgebraElement) -> f64 {
    a.norm()
}

pub fn is_positive(a: &AlgebraElement, tol: Tolerance) -> bool {
    a.is_positive(tol)
}

/// A linear map out of a [`CStarAlgebra`] into `M_m`, given on the basis.
#[derive(Debug, Clone)]
pub struct StarHomomorphism {
    pub source: CStarAlgebra,
    pub target_dim: usize,
    pub images: Vec<Matrix>,
}

/// Residuals of the *-homomorphism identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomReport {
    pub multiplicativity: f64,
    pub star: f64,
    pub passed: bool,
}

impl StarHomomorphism {
    pub fn new(source: CStarAlgebra, target_dim: usize, images: Vec<Matrix>) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::Shape(format!("{} images for {} basis elements", images.len(), source.dim())));
        }
        for (k, m) in images.iter().enumerate() {
            if m.nrows() != target_dim || m.ncols() != target_dim {
                return Err(Error::Shape(format!("image {k} is {}x{}, expected {target_dim}x{target_dim}", m.nrows(), m.ncols())));
            }
            if !numkit::all_finite(m) {
                return Err(Error::NonFinite(format!("image {k}")));
            }
        }
        Ok(StarHomomorphism { source, target_dim, images })
    }

    /// The identity representation of a concrete algebra on its ambient space.
    pub fn identity(source: &CStarAlgebra) -> Self {
        StarHomomorphism {
            source: source.clone(),
            target_dim: source.ambient_dim(),
            images: source.basis().to_vec(),
        }
    }

    pub fn apply_coords(&self, coords: &Vector) -> Matrix {
        self.images
            .iter()
            .zip(coords.iter())
            .fold(numkit::zeros(self.target_dim, self.target_dim), |acc, (m, &x)| acc + m * x)
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<Matrix> {
        if !a.algebra().same_as(&self.source) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.apply_coords(a.coords()))
    }

    pub fn check(&self, tol: Tolerance) -> HomReport {
        check_star_hom(self, tol)
    }
}

/// Maximum residuals of `h(a_i a_j) = h(a_i) h(a_j)` and `h(a_k*) = h(a_k)*`
/// over the basis.
pub fn check_star_hom(h: &StarHomomorphism, tol: Tolerance) -> HomReport {
    let alg = &h.source;
    let k = alg.dim();
    let scale = h.images.iter().map(numkit::operator_norm).fold(0.0, f64::max).max(1.0);
    let mut mult: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let lhs = h.apply_coords(alg.product_coords(i, j));
            let rhs = &h.images[i] * &h.images[j];
            mult = mult.max(frobenius(&(lhs - rhs)));
        }
    }
    let mut star: f64 = 0.0;
    for idx in 0..k {
        let lhs = h.apply_coords(&alg.star_coords(idx));
        star = star.max(frobenius(&(lhs - h.images[idx].adjoint())));
    }
    let passed = mult <= tol.bound(scale * scale) && star <= tol.bound(scale);
    HomReport { multiplicativity: mult, star, passed }
}

/// True iff the images jointly have full column span in the target.
pub fn hom_nondegenerate(h: &StarHomomorphism, _tol: Tolerance) -> bool {
    if h.target_dim == 0 {
        return true;
    }
    if h.images.is_empty() {
        return false;
    }
    let stacked = Matrix::from_fn(h.target_dim, h.target_dim * h.images.len(), |r, col| {
        h.images[col / h.target_dim][(r, col % h.target_dim)]
    });
    rank(&stacked, RANK_CUTOFF) == h.target_dim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c, identity, real_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn full_matrix_algebra_has_identity_unit() {
        let a = CStarAlgebra::full_matrix(2).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(frobenius(&(a.unit().to_matrix() - identity(2))) < 1e-14);
        assert!((a.unit().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_need_not_be_ambient_identity() {
        let p = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let a = make_algebra(vec![p.clone()], tol()).unwrap();
        assert!(frobenius(&(a.unit().to_matrix() - p)) < 1e-14);
    }

    #[test]
    fn nilpotent_span_is_not_star_closed() {
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(make_algebra(vec![n], tol()), Err(Error::NotStarClosed { index: 0, .. })));
    }

    #[test]
    fn product_closure_and_unit_failures() {
        // span{E11, E12 + E21}: *-closed but (E12+E21)^2 = I is outside
        let e11 = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let s = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(make_algebra(vec![e11, s], tol()), Err(Error::NotProductClosed { .. })));
        assert!(matches!(make_algebra(vec![], tol()), Err(Error::EmptyAlgebra)));
        let e = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(make_algebra(vec![e.clone(), e], tol()), Err(Error::LinearlyDependent { .. })));
    }

    #[test]
    fn direct_sums() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let m1 = CStarAlgebra::scalars();
        let s = direct_sum(&[m2.clone(), m1.clone()]).unwrap();
        assert_eq!((s.ambient_dim(), s.dim()), (3, 5));
        assert!(direct_sum(&[m2.clone()]).unwrap().same_as(&m2));
        let comm = direct_sum(&[m1.clone(), m1]).unwrap();
        assert_eq!(comm.dim(), 2);
        let (x, y) = (comm.basis_element(0), comm.basis_element(1));
        let xy = x.add(&y.scale(c(2.0, 0.0))).unwrap();
        let yx = y.scale(c(3.0, 0.0)).add(&x).unwrap();
        let d = xy.mul(&yx).unwrap().coords() - yx.mul(&xy).unwrap().coords();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn unit_is_two_sided_and_positivity() {
        let a = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = a.element(Vector::from_fn(a.dim(), |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).unwrap();
            let u = a.unit();
            assert!((u.mul(&x).unwrap().coords() - x.coords()).norm() < 1e-12);
            let p = x.adjoint().unwrap().mul(&x).unwrap();
            assert!(p.is_positive(tol()));
        }
    }

    #[test]
    fn star_hom_checks() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        let id = StarHomomorphism::identity(&m2);
        let r = check_star_hom(&id, tol());
        assert!(r.passed && r.multiplicativity < 1e-14 && r.star < 1e-14);

        let amp = StarHomomorphism::new(
            m2.clone(),
            4,
            m2.basis().iter().map(|b| block_diag(&[b.clone(), b.clone()])).collect(),
        )
        .unwrap();
        assert!(check_star_hom(&amp, tol()).passed);

        let transpose = StarHomomorphism::new(m2.clone(), 2, m2.basis().iter().map(|b| b.transpose()).collect()).unwrap();
        let r = check_star_hom(&transpose, tol());
        // (E12 E21)^T = E11 but E21 E12 = E22: residual sqrt(2)
        assert!(!r.passed);
        assert!((r.multiplicativity - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn nondegeneracy() {
        let m2 = CStarAlgebra::full_matrix(2).unwrap();
        assert!(hom_nondegenerate(&StarHomomorphism::identity(&m2), tol()));
        let s = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
        // a ↦ first block only
        let first = StarHomomorphism::new(s.clone(), 2, s.basis().iter().map(|b| b.view((0, 0), (2, 2)).into_owned()).collect()).unwrap();
        assert!(check_star_hom(&first, tol()).passed);
        assert!(hom_nondegenerate(&first, tol()));
        let padded = StarHomomorphism::new(
            s.clone(),
            3,
            first.images.iter().map(|m| block_diag(&[m.clone(), numkit::zeros(1, 1)])).collect(),
        )
        .unwrap();
        assert!(check_star_hom(&padded, tol()).passed);
        assert!(!hom_nondegenerate(&padded, tol()));
        let zero = StarHomomorphism::new(m2.clone(), 2, vec![numkit::zeros(2, 2); 4]).unwrap();
        assert!(!hom_nondegenerate(&zero, tol()));
    }
}

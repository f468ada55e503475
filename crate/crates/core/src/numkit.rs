//! Dense complex linear algebra used throughout the crate.
//!
//! Storage is `nalgebra`, decompositions come from `faer`: Hermitian
//! eigendecomposition with deterministic ordering, operator norms, PSD tests,
//! rank and null-space decisions, least-squares span coordinates and the Gram
//! quotient that realizes a finite-dimensional completion.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Relative cutoff used for every rank and null-space decision.
pub const RANK_CUTOFF: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Residual threshold pair. A residual passes when it is at most
/// `abs + rel * scale` for the scale of the quantities being compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        let ok = rel.is_finite() && abs.is_finite() && rel >= 0.0 && abs >= 0.0 && (rel > 0.0 || abs > 0.0);
        if !ok {
            return Err(Error::InvalidTolerance { rel, abs });
        }
        Ok(Tolerance { rel, abs })
    }

    /// Same tolerance with both thresholds set to `value`.
    pub fn uniform(value: f64) -> Result<Self> {
        Tolerance::new(value, value)
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }

    pub fn scaled(&self, factor: f64) -> Tolerance {
        Tolerance { rel: self.rel * factor, abs: self.abs * factor }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

/// Build a matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> Matrix {
    assert_eq!(data.len(), rows * cols);
    Matrix::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

/// Matrix unit `E_{ij}` of size `rows × cols`.
pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> Matrix {
    let mut m = zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn all_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_residual(m: &Matrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Block-diagonal matrix; blocks may be rectangular.
pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Column-major vectorization.
pub fn vec_of(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().copied().sum()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: Matrix,
}

/// Hermitian eigendecomposition with ascending eigenvalues. Each eigenvector
/// is rephased so that its first non-negligible component is real positive.
pub fn hermitian_eig(m: &Matrix, tol: Tolerance) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Shape(format!("hermitian_eig needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite("hermitian_eig input".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: zeros(0, 0) });
    }
    let scale = operator_norm(m);
    let residual = hermitian_residual(m);
    let threshold = tol.bound(scale);
    if residual > threshold {
        return Err(Error::NotHermitian { residual, threshold });
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Shape(format!("eigendecomposition failed: {e:?}")))?;
    let raw: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let eigenvectors = from_faer(eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let values: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let mut vectors = zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eigenvectors.column(k).into_owned();
        let cutoff = 1e-12 * v.norm();
        if let Some(lead) = v.iter().find(|z| z.norm() > cutoff).copied() {
            v *= lead.conj() / lead.norm();
        }
        vectors.set_column(col, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s = to_faer(m).singular_values().unwrap_or_else(|_| vec![f64::NAN]);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

// Decompositions go through faer; nalgebra's complex SVD loses accuracy on
// structured inputs with clustered singular values.
fn to_faer(m: &Matrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = U diag(s) V*` with `s` descending (length `min(rows, cols)`).
fn full_svd(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let svd = to_faer(m).svd().map_err(|e| Error::Shape(format!("SVD failed: {e:?}")))?;
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((from_faer(svd.U()), s, from_faer(svd.V())))
}

/// Moore-Penrose pseudo-inverse, dropping singular values at or below `cutoff`.
pub fn pseudo_inverse(m: &Matrix, cutoff: f64) -> Result<Matrix> {
    let (u, s, v) = full_svd(m)?;
    let mut out = zeros(m.ncols(), m.nrows());
    for (k, &sk) in s.iter().enumerate() {
        if sk > cutoff {
            out += v.column(k) * u.column(k).adjoint() * c(1.0 / sk, 0.0);
        }
    }
    Ok(out)
}

/// Largest singular value; 0 for empty matrices.
pub fn operator_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank with cutoff `rel · σ_max`.
pub fn rank(m: &Matrix, rel: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel * top).count(),
        _ => 0,
    }
}

/// Orthonormal basis (as columns) of the null space of `m`, decided with
/// cutoff `rel · σ_max`.
pub fn null_space(m: &Matrix, rel: f64) -> Matrix {
    let n = m.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    let (_, s, v) = full_svd(m).expect("SVD of a finite matrix");
    let top = s.first().copied().unwrap_or(0.0);
    let cols: Vec<Vector> = (0..n)
        .filter(|&k| k >= s.len() || top == 0.0 || s[k] <= rel * top)
        .map(|k| v.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        return zeros(n, 0);
    }
    Matrix::from_columns(&cols)
}

/// True iff `m` is Hermitian within `tol` and its smallest eigenvalue is at
/// least `-tol.bound(max(1, ‖m‖))`.
pub fn is_psd(m: &Matrix, tol: Tolerance) -> bool {
    if !m.is_square() {
        return false;
    }
    match hermitian_eig(m, tol) {
        Ok(e) => {
            let scale = operator_norm(m).max(1.0);
            e.values.first().map_or(true, |&v| v >= -tol.bound(scale))
        }
        Err(_) => false,
    }
}

/// Principal square root of a PSD matrix (negative noise clipped to zero).
pub fn psd_sqrt(m: &Matrix, tol: Tolerance) -> Result<Matrix> {
    let e = hermitian_eig(m, tol)?;
    let d = Matrix::from_diagonal(&Vector::from_iterator(
        e.values.len(),
        e.values.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&e.vectors * d * e.vectors.adjoint())
}

/// Inverse square root of a positive definite matrix.
pub fn pd_inv_sqrt(m: &Matrix, tol: Tolerance) -> Result<Matrix> {
    let e = hermitian_eig(m, tol)?;
    if let Some(&min) = e.values.first() {
        let top = e.values.last().copied().unwrap_or(0.0);
        if min <= RANK_CUTOFF * top {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    let d = Matrix::from_diagonal(&Vector::from_iterator(
        e.values.len(),
        e.values.iter().map(|&v| c(1.0 / v.sqrt(), 0.0)),
    ));
    Ok(&e.vectors * d * e.vectors.adjoint())
}

/// Quotient of an algebraic tensor space by the null vectors of its Gram
/// matrix, with orthonormal coordinates on the completion.
#[derive(Debug, Clone)]
pub struct GramQuotient {
    pub original_dim: usize,
    pub quotient_dim: usize,
    /// `quotient_dim × original_dim`; rows are eigenvectors scaled by
    /// `λ^{-1/2}`, so `coords · G · coords* = I`.
    pub coords: Matrix,
    /// `quotient_dim × original_dim`; the isometric quotient map
    /// `u ↦ Λ^{1/2} U* u`, so that `lift* · lift = G` on the range of `G`.
    pub lift: Matrix,
    /// Orthonormal columns spanning the null space of `G`.
    pub null_basis: Matrix,
}

impl GramQuotient {
    /// Quotient of an already orthonormal space.
    pub fn identity(n: usize) -> Self {
        GramQuotient {
            original_dim: n,
            quotient_dim: n,
            coords: identity(n),
            lift: identity(n),
            null_basis: zeros(n, 0),
        }
    }

    pub fn lift(&self, u: &Vector) -> Vector {
        &self.lift * u
    }

    /// Algebraic representatives of the orthonormal completion basis, as
    /// columns (`coords*`).
    pub fn representatives(&self) -> Matrix {
        self.coords.adjoint()
    }

    /// An algebraic vector whose class has quotient coordinates `z`.
    pub fn representative(&self, z: &Vector) -> Vector {
        self.coords.adjoint() * z
    }
}

/// Quotient by the null space of a PSD Gram matrix. Eigenvalues at or below
/// `max(RANK_CUTOFF · λ_max, tol.abs)` are treated as null; the absolute
/// floor keeps a Gram made of pure rounding noise from passing as nonzero.
pub fn gram_quotient(g: &Matrix, tol: Tolerance) -> Result<GramQuotient> {
    let n = g.nrows();
    let e = hermitian_eig(g, tol)?;
    let top = e.values.last().copied().unwrap_or(0.0);
    let scale = operator_norm(g).max(1.0);
    if let Some(&min) = e.values.first() {
        if min < -tol.bound(scale) {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    let cutoff = (RANK_CUTOFF * top).max(tol.abs);
    let kept: Vec<usize> = (0..n).filter(|&k| e.values[k] > cutoff).collect();
    let dropped: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let r = kept.len();
    let mut coords = zeros(r, n);
    let mut lift = zeros(r, n);
    // largest eigenvalues first in the quotient basis
    for (row, &k) in kept.iter().rev().enumerate() {
        let u = e.vectors.column(k).adjoint();
        let lam = e.values[k];
        coords.set_row(row, &(&u * c(1.0 / lam.sqrt(), 0.0)));
        lift.set_row(row, &(&u * c(lam.sqrt(), 0.0)));
    }
    let null_basis = if dropped.is_empty() {
        zeros(n, 0)
    } else {
        Matrix::from_columns(&dropped.iter().map(|&k| e.vectors.column(k).into_owned()).collect::<Vec<_>>())
    };
    Ok(GramQuotient { original_dim: n, quotient_dim: r, coords, lift, null_basis })
}

/// Least-squares coordinates against a fixed list of linearly independent
/// vectors.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    basis: Matrix,
    pinv: Matrix,
}

impl SpanSolver {
    /// `columns` holds the spanning vectors; fails if they are dependent.
    pub fn new(columns: Matrix) -> Result<Self> {
        let k = columns.ncols();
        let r = rank(&columns, RANK_CUTOFF);
        if r < k {
            return Err(Error::LinearlyDependent { rank: r, len: k });
        }
        let pinv = if k == 0 {
            zeros(0, columns.nrows())
        } else {
            pseudo_inverse(&columns, 0.0)?
        };
        Ok(SpanSolver { basis: columns, pinv })
    }

    pub fn len(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.ncols() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Coordinates and the residual `‖basis · coords − v‖`.
    pub fn solve(&self, v: &Vector) -> (Vector, f64) {
        let x = &self.pinv * v;
        let residual = (&self.basis * &x - v).norm();
        (x, residual)
    }
}

/// Residual of a solution of `a x = b` found by least squares.
pub fn least_squares(a: &Matrix, b: &Matrix) -> Result<(Matrix, f64)> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape("least_squares row mismatch".into()));
    }
    if a.ncols() == 0 {
        return Ok((zeros(0, b.ncols()), frobenius(b)));
    }
    let pinv = pseudo_inverse(a, RANK_CUTOFF * operator_norm(a))?;
    let x = pinv * b;
    let residual = frobenius(&(a * &x - b));
    Ok((x, residual))
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in order (modified Gram-Schmidt with relative cutoff `rel`).
pub fn independent_subset(vectors: &[Vector], rel: f64) -> Vec<usize> {
    let top = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut ortho: Vec<Vector> = Vec::new();
    let mut picked = Vec::new();
    if top == 0.0 {
        return picked;
    }
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &ortho {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let norm = w.norm();
        if norm > rel * top.max(v.norm()) {
            ortho.push(w / C64::new(norm, 0.0));
            picked.push(idx);
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let m = Matrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        &m + m.adjoint()
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = hermitian_eig(&identity(2), Tolerance::default()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let d = real_matrix(2, 2, &[0.0, 0.0, 0.0, 3.0]);
        let e = hermitian_eig(&d, Tolerance::default()).unwrap();
        assert_eq!(e.values, vec![0.0, 3.0]);
        assert!((e.vectors.clone() - identity(2)).norm() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_hermitian(&mut rng, 4);
        let e = hermitian_eig(&m, Tolerance::default()).unwrap();
        let d = Matrix::from_diagonal(&Vector::from_iterator(4, e.values.iter().map(|&v| c(v, 0.0))));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!(frobenius(&(rebuilt - &m)) < 1e-12);
        assert!(frobenius(&(e.vectors.adjoint() * &e.vectors - identity(4))) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m, Tolerance::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn operator_norm_cases() {
        assert_eq!(operator_norm(&zeros(3, 3)), 0.0);
        let u = Matrix::from_row_slice(2, 2, &[c(0.0, 1.0), ZERO, ZERO, c(-1.0, 0.0)]);
        assert!((operator_norm(&u) - 1.0).abs() < 1e-14);
        // M*M = diag(0, 4)
        let m = real_matrix(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((operator_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psd_cases() {
        let tol = Tolerance::default();
        assert!(is_psd(&identity(3), tol));
        assert!(!is_psd(&real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]), tol));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = Matrix::from_fn(3, 5, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        assert!(is_psd(&(t.adjoint() * &t), tol));
    }

    #[test]
    fn quotient_examples() {
        let tol = Tolerance::default();
        let q = gram_quotient(&identity(3), tol).unwrap();
        assert_eq!(q.quotient_dim, 3);
        assert!(frobenius(&(q.coords.adjoint() * &q.coords - identity(3))) < 1e-14);
        assert_eq!(gram_quotient(&zeros(2, 2), tol).unwrap().quotient_dim, 0);
        let q = gram_quotient(&real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]), tol).unwrap();
        assert_eq!(q.quotient_dim, 1);
        assert_eq!(q.null_basis.ncols(), 1);
        let n = q.null_basis.column(0).into_owned();
        assert!(q.lift(&n).norm() < 1e-12);
        assert!(matches!(
            gram_quotient(&real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]), tol),
            Err(Error::NotPsd { .. })
        ));
        // rounding noise alone is not a nonzero Gram
        let noise = real_matrix(2, 2, &[3e-15, 1e-15, 1e-15, 2e-15]);
        assert_eq!(gram_quotient(&noise, tol).unwrap().quotient_dim, 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = real_matrix(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, RANK_CUTOFF);
        assert_eq!(ns.ncols(), 2);
        assert!(frobenius(&(&m * &ns)) < 1e-14);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(-1.0, 1.0).is_err());
        assert!(Tolerance::new(0.0, 1e-9).is_ok());
    }
}

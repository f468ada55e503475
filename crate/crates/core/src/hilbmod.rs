//! Finite-dimensional right Hilbert C*-modules over a designated basis.
//!
//! A module of complex dimension `d` over an algebra `A` of dimension `k` is
//! stored as
//! - `action[k]`: the `d × d` matrix whose column `i` holds the coordinates
//!   of `e_i · a_k`,
//! - `gram[i * d + j]`: the `A`-coordinates of `<e_i, e_j>`.
//!
//! Inner products are conjugate-linear in the first slot and linear in the
//! second. Module adjoints are taken with respect to the `A`-valued inner
//! product; in general they are not conjugate transposes of coordinate
//! matrices. The scalar form `tr<x, y>` is a faithful inner product on the
//! carrier and its Gram matrix (the trace Gram) gives the frame in which
//! module adjoints become conjugate transposes.

use crate::cstar::{make_algebra, AlgebraElement, CStarAlgebra};
use crate::error::{Error, ModuleAxiom, Result};
use crate::morita::{make_imprimitivity, BimoduleParts, ImprimitivityBimodule};
use crate::numkit::{
    self, frobenius, independent_subset, operator_norm, rank, vec_of, GramQuotient, Matrix, SpanSolver, Tolerance,
    Vector, C64, RANK_CUTOFF,
};

/// Worst residual of one axiom and where it occurred.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Worst {
    pub residual: f64,
    pub at: String,
}

impl Worst {
    pub(crate) fn record(&mut self, residual: f64, at: impl FnOnce() -> String) {
        if residual > self.residual || (self.at.is_empty() && residual >= self.residual) {
            self.residual = residual;
            self.at = at();
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModuleResiduals {
    pub right_action: Worst,
    pub unit: Worst,
    pub conjugate_symmetry: Worst,
    pub linearity: Worst,
    pub positivity: Worst,
    pub act_scale: f64,
    pub gram_scale: f64,
    pub block_scale: f64,
}

impl ModuleResiduals {
    /// Largest residual across all axioms.
    pub fn max(&self) -> f64 {
        [&self.right_action, &self.unit, &self.conjugate_symmetry, &self.linearity, &self.positivity]
            .iter()
            .map(|w| w.residual)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct HilbertModule {
    algebra: CStarAlgebra,
    dim: usize,
    action: Vec<Matrix>,
    gram: Vec<Vector>,
    tol: Tolerance,
}

fn axiom(axiom: ModuleAxiom, at: String, residual: f64) -> Error {
    Error::ModuleAxiom { axiom, at, residual }
}

/// Validate module data against every Hilbert-module axiom.
pub fn make_module(
    algebra: &CStarAlgebra,
    dim: usize,
    action: Vec<Matrix>,
    gram: Vec<Vector>,
    tol: Tolerance,
) -> Result<HilbertModule> {
    let m = HilbertModule::from_parts(algebra, dim, action, gram, tol)?;
    m.validate(tol)?;
    Ok(m)
}

impl HilbertModule {
    /// Shape-checked but unvalidated data.
    fn from_parts(
        algebra: &CStarAlgebra,
        dim: usize,
        action: Vec<Matrix>,
        gram: Vec<Vector>,
        tol: Tolerance,
    ) -> Result<Self> {
        let k = algebra.dim();
        if action.len() != k {
            return Err(Error::Shape(format!("{} action matrices for an algebra of dimension {k}", action.len())));
        }
        for (idx, r) in action.iter().enumerate() {
            if r.nrows() != dim || r.ncols() != dim {
                return Err(Error::Shape(format!("action matrix {idx} is {}x{}, expected {dim}x{dim}", r.nrows(), r.ncols())));
            }
            if !numkit::all_finite(r) {
                return Err(Error::NonFinite(format!("action matrix {idx}")));
            }
        }
        if gram.len() != dim * dim {
            return Err(Error::Shape(format!("{} Gram entries, expected {}", gram.len(), dim * dim)));
        }
        for (idx, g) in gram.iter().enumerate() {
            if g.len() != k {
                return Err(Error::Shape(format!("Gram entry {idx} has {} coordinates, expected {k}", g.len())));
            }
            if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("Gram entry {idx}")));
            }
        }
        Ok(HilbertModule { algebra: algebra.clone(), dim, action, gram, tol })
    }

    /// Worst residual of every axiom over basis instances, with locations.
    pub fn axiom_residuals(&self) -> ModuleResiduals {
        let (alg, d, k) = (&self.algebra, self.dim, self.algebra.dim());
        let act_scale = self.action.iter().map(operator_norm).fold(0.0, f64::max).max(1.0);
        let gram_scale = self.gram.iter().map(|g| operator_norm(&alg.matrix_of(g))).fold(0.0, f64::max).max(1.0);
        let mut out = ModuleResiduals { act_scale, gram_scale, ..Default::default() };

        for j in 0..k {
            for l in 0..k {
                // (x·a_j)·a_l = x·(a_j a_l)
                let lhs = &self.action[l] * &self.action[j];
                let rhs = self.action_of(alg.product_coords(j, l));
                out.right_action.record(frobenius(&(lhs - rhs)), || format!("algebra basis pair ({j}, {l})"));
            }
        }
        out.unit.record(frobenius(&(self.action_of(alg.unit_coords()) - numkit::identity(d))), || "unit".into());
        for i in 0..d {
            for j in 0..d {
                let lhs = alg.matrix_of(self.gram_coords(i, j)).adjoint();
                let res = frobenius(&(lhs - alg.matrix_of(self.gram_coords(j, i))));
                out.conjugate_symmetry.record(res, || format!("basis pair ({i}, {j})"));
            }
        }
        for i in 0..d {
            for j in 0..d {
                for l in 0..k {
                    // <e_i, e_j·a_l> = <e_i, e_j>·a_l
                    let mut lhs = Vector::zeros(k);
                    for m in 0..d {
                        lhs += self.gram_coords(i, m) * self.action[l][(m, j)];
                    }
                    let rhs = alg.mul_coords(self.gram_coords(i, j), &unit_vector(k, l));
                    let res = frobenius(&alg.matrix_of(&(lhs - rhs)));
                    out.linearity.record(res, || format!("basis ({i}, {j}), algebra element {l}"));
                }
            }
        }
        let block = self.block_gram();
        out.block_scale = operator_norm(&block).max(1.0);
        let herm = numkit::hermitian_residual(&block);
        let sym = (&block + block.adjoint()) * C64::new(0.5, 0.0);
        let min = numkit::hermitian_eig(&sym, Tolerance { rel: f64::INFINITY, abs: f64::INFINITY })
            .ok()
            .and_then(|e| e.values.first().copied())
            .unwrap_or(0.0);
        out.conjugate_symmetry.record(herm, || "block Gram".into());
        out.positivity.record((-min).max(0.0), || "block Gram".into());
        out
    }

    fn validate(&self, tol: Tolerance) -> Result<()> {
        let r = self.axiom_residuals();
        let checks = [
            (ModuleAxiom::RightAction, &r.right_action, r.act_scale * r.act_scale),
            (ModuleAxiom::Unit, &r.unit, r.act_scale),
            (ModuleAxiom::ConjugateSymmetry, &r.conjugate_symmetry, r.gram_scale.max(r.block_scale)),
            (ModuleAxiom::Linearity, &r.linearity, r.gram_scale * r.act_scale),
            (ModuleAxiom::Positivity, &r.positivity, r.block_scale),
        ];
        for (ax, worst, scale) in checks {
            if worst.residual > tol.bound(scale) {
                return Err(axiom(ax, worst.at.clone(), worst.residual));
            }
        }
        let t = self.trace_gram();
        let rank = rank(&t, RANK_CUTOFF);
        if rank < self.dim {
            let smallest = numkit::singular_values(&t).last().copied().unwrap_or(0.0);
            return Err(axiom(ModuleAxiom::Definiteness, format!("trace Gram rank {rank} < {}", self.dim), smallest));
        }
        Ok(())
    }

    /// `A` as a right module over itself: `e_i = a_i`, `<a, b> = a* b`.
    pub fn over_itself(algebra: &CStarAlgebra) -> Result<HilbertModule> {
        Self::from_matrix_space(algebra, algebra.basis().to_vec(), algebra.tolerance())
    }

    /// `C^d` as a Hilbert space (a module over the scalars).
    pub fn hilbert_space(d: usize) -> Result<HilbertModule> {
        let carrier = (0..d).map(|i| numkit::matrix_unit(d, 1, i, 0)).collect();
        Self::from_matrix_space(&CStarAlgebra::scalars(), carrier, Tolerance::default())
    }

    /// The module spanned by rectangular matrices `x` (all `m × n`, with `n`
    /// the ambient size of `algebra`), with right action by matrix product
    /// and inner product `<x, y> = x* y`.
    pub fn from_matrix_space(algebra: &CStarAlgebra, carrier: Vec<Matrix>, tol: Tolerance) -> Result<HilbertModule> {
        let solver = carrier_solver(&carrier, algebra.ambient_dim())?;
        let d = carrier.len();
        let mut action = Vec::with_capacity(algebra.dim());
        for a in algebra.basis() {
            let mut r = numkit::zeros(d, d);
            for (i, x) in carrier.iter().enumerate() {
                r.set_column(i, &solve_in(&solver, &(x * a), tol)?);
            }
            action.push(r);
        }
        let mut gram = Vec::with_capacity(d * d);
        for x in &carrier {
            for y in &carrier {
                gram.push(algebra.coords_of(&(x.adjoint() * y), tol)?);
            }
        }
        make_module(algebra, d, action, gram, tol)
    }

    pub fn algebra(&self) -> &CStarAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    pub fn gram(&self) -> &[Vector] {
        &self.gram
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn gram_coords(&self, i: usize, j: usize) -> &Vector {
        &self.gram[i * self.dim + j]
    }

    pub fn gram_element(&self, i: usize, j: usize) -> AlgebraElement {
        self.algebra.element(self.gram_coords(i, j).clone()).expect("gram coordinates have algebra length")
    }

    /// Matrix of right multiplication by the element with coordinates `a`.
    pub fn action_of(&self, a: &Vector) -> Matrix {
        self.action
            .iter()
            .zip(a.iter())
            .fold(numkit::zeros(self.dim, self.dim), |acc, (r, &x)| acc + r * x)
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        unit_vector(self.dim, i)
    }

    /// `x · a`.
    pub fn act(&self, x: &Vector, a: &AlgebraElement) -> Result<Vector> {
        if !a.algebra().same_as(&self.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.action_of(a.coords()) * x)
    }

    /// Coordinates of `<x, y> = Σ conj(x_i) y_j <e_i, e_j>`.
    pub fn inner_coords(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.algebra.dim());
        for i in 0..self.dim {
            if x[i] == numkit::ZERO {
                continue;
            }
            for j in 0..self.dim {
                let w = x[i].conj() * y[j];
                if w != numkit::ZERO {
                    out += self.gram_coords(i, j) * w;
                }
            }
        }
        out
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> AlgebraElement {
        self.algebra.element(self.inner_coords(x, y)).expect("inner product has algebra length")
    }

    /// `‖x‖ = ‖<x, x>‖^{1/2}`.
    pub fn norm(&self, x: &Vector) -> f64 {
        self.inner(x, x).norm().sqrt()
    }

    /// The `(d·n) × (d·n)` block matrix `[<e_i, e_j>]` in the ambient picture.
    pub fn block_gram(&self) -> Matrix {
        let n = self.algebra.ambient_dim();
        let d = self.dim;
        let mut out = numkit::zeros(d * n, d * n);
        for i in 0..d {
            for j in 0..d {
                out.view_mut((i * n, j * n), (n, n)).copy_from(&self.algebra.matrix_of(self.gram_coords(i, j)));
            }
        }
        out
    }

    /// Gram matrix of the scalar inner product `tr<x, y>`.
    pub fn trace_gram(&self) -> Matrix {
        let traces = self.algebra.basis_traces();
        Matrix::from_fn(self.dim, self.dim, |i, j| self.gram_coords(i, j).dot(&traces))
    }

    /// `F = T^{1/2}` and `F^{-1}` for the trace Gram `T`. Conjugating by `F`
    /// turns module adjoints into conjugate transposes.
    pub fn trace_frame(&self) -> Result<(Matrix, Matrix)> {
        let t = self.trace_gram();
        Ok((numkit::psd_sqrt(&t, self.tol)?, numkit::pd_inv_sqrt(&t, self.tol)?))
    }

    pub fn is_full(&self, _tol: Tolerance) -> bool {
        self.ideal_generators().len() == self.algebra.dim() && self.dim > 0
    }

    /// Coordinates of `<e_i, e_j·a_k>` over all indices; they span the ideal
    /// `span <V, V>`.
    fn ideal_generators(&self) -> Vec<Vector> {
        let k = self.algebra.dim();
        let mut gens = Vec::with_capacity(self.dim * self.dim * k);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for l in 0..k {
                    gens.push(self.algebra.mul_coords(self.gram_coords(i, j), &unit_vector(k, l)));
                }
            }
        }
        let mats: Vec<Vector> = gens.iter().map(|g| vec_of(&self.algebra.matrix_of(g))).collect();
        independent_subset(&mats, 1e-8).into_iter().map(|idx| gens[idx].clone()).collect()
    }

    /// The rank-one operator `θ_{x,y}: z ↦ x·<y, z>`.
    pub fn rank_one(&self, x: &Vector, y: &Vector) -> Matrix {
        let mut out = numkit::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let a = self.inner_coords(y, &self.basis_vector(j));
            out.set_column(j, &(self.action_of(&a) * x));
        }
        out
    }

    /// The unique `S` with `<T x, y> = <x, S y>`.
    pub fn adjoint_of(&self, t: &Matrix, tol: Tolerance) -> Result<Matrix> {
        let d = self.dim;
        if t.nrows() != d || t.ncols() != d {
            return Err(Error::Shape(format!("operator is {}x{}, module has dimension {d}", t.nrows(), t.ncols())));
        }
        if d == 0 {
            return Ok(numkit::zeros(0, 0));
        }
        let n2 = self.algebra.ambient_dim().pow(2);
        let blocks: Vec<Vector> = self.gram.iter().map(|g| vec_of(&self.algebra.matrix_of(g))).collect();
        let mut system = numkit::zeros(d * n2, d);
        let mut rhs = numkit::zeros(d * n2, d);
        for i in 0..d {
            for q in 0..d {
                system.view_mut((i * n2, q), (n2, 1)).copy_from(&blocks[i * d + q]);
            }
            for j in 0..d {
                // <T e_i, e_j> = Σ_p conj(T_pi) <e_p, e_j>
                let mut col = Vector::zeros(n2);
                for p in 0..d {
                    col += &blocks[p * d + j] * t[(p, i)].conj();
                }
                rhs.view_mut((i * n2, j), (n2, 1)).copy_from(&col);
            }
        }
        let (s, residual) = numkit::least_squares(&system, &rhs)?;
        let scale = frobenius(&rhs).max(1.0);
        if residual > tol.bound(scale) {
            return Err(Error::NotAdjointable { residual });
        }
        Ok(s)
    }

    /// `K(V)`: the span of all rank-one operators, rendered in the trace frame
    /// so that its involution is the conjugate transpose.
    pub fn compacts(&self, tol: Tolerance) -> Result<CStarAlgebra> {
        let (f, f_inv) = self.trace_frame()?;
        let k = self.algebra.dim();
        let mut gens = Vec::new();
        for i in 0..self.dim {
            for l in 0..k {
                let x = self.action[l].column(i).into_owned();
                for j in 0..self.dim {
                    gens.push(&f * self.rank_one(&x, &self.basis_vector(j)) * &f_inv);
                }
            }
        }
        let vecs: Vec<Vector> = gens.iter().map(vec_of).collect();
        let basis = independent_subset(&vecs, 1e-8).into_iter().map(|idx| gens[idx].clone()).collect();
        make_algebra(basis, tol)
    }

    /// Replace the algebra by the ideal spanned by the inner products, over
    /// which the module is full.
    pub fn restrict_to_full(&self, tol: Tolerance) -> Result<HilbertModule> {
        if self.is_full(tol) {
            return Ok(self.clone());
        }
        let gens = self.ideal_generators();
        if gens.is_empty() {
            return Err(Error::Degenerate("module has no nonzero inner products".into()));
        }
        let ideal = make_algebra(gens.iter().map(|g| self.algebra.matrix_of(g)).collect(), tol)?;
        let action = gens.iter().map(|g| self.action_of(g)).collect();
        let gram = self
            .gram
            .iter()
            .map(|g| ideal.coords_of(&self.algebra.matrix_of(g), tol))
            .collect::<Result<Vec<_>>>()?;
        make_module(&ideal, self.dim, action, gram, tol)
    }

    /// The `K(V)`–`span<V,V>` imprimitivity bimodule carried by `V` itself.
    pub fn canonical_imprimitivity(&self, tol: Tolerance) -> Result<ImprimitivityBimodule> {
        let right = self.restrict_to_full(tol)?;
        let compacts = self.compacts(tol)?;
        let (f, f_inv) = self.trace_frame()?;
        let left_action = compacts.basis().iter().map(|kb| &f_inv * kb * &f).collect();
        let mut left_gram = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let theta = &f * self.rank_one(&self.basis_vector(i), &self.basis_vector(j)) * &f_inv;
                left_gram.push(compacts.coords_of(&theta, tol)?);
            }
        }
        make_imprimitivity(
            BimoduleParts {
                left_algebra: compacts,
                right_algebra: right.algebra.clone(),
                carrier_dim: self.dim,
                left_action,
                right_action: right.action.clone(),
                left_gram,
                right_gram: right.gram.clone(),
            },
            tol,
        )
    }
}

pub fn inner(m: &HilbertModule, x: &Vector, y: &Vector) -> AlgebraElement {
    m.inner(x, y)
}

pub fn module_norm(m: &HilbertModule, x: &Vector) -> f64 {
    m.norm(x)
}

pub fn is_full(m: &HilbertModule, tol: Tolerance) -> bool {
    m.is_full(tol)
}

pub fn rank_one(m: &HilbertModule, x: &Vector, y: &Vector) -> Matrix {
    m.rank_one(x, y)
}

pub fn compacts(m: &HilbertModule, tol: Tolerance) -> Result<CStarAlgebra> {
    m.compacts(tol)
}

pub fn adjoint_of(t: &Matrix, m: &HilbertModule, tol: Tolerance) -> Result<Matrix> {
    m.adjoint_of(t, tol)
}

pub fn canonical_imprimitivity(m: &HilbertModule, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    m.canonical_imprimitivity(tol)
}

/// Build a module from semi-inner-product data by dividing out its null
/// vectors. `gram` holds algebra coordinates of `<u_i, u_j>` for an
/// algebraic spanning family `u_i`; `action` gives the right action on that
/// family and must preserve the null space. Returns the module on the
/// orthonormalized quotient basis together with the quotient.
pub fn quotient_by_null_vectors(
    algebra: &CStarAlgebra,
    algebraic_dim: usize,
    action: &[Matrix],
    gram: &[Vector],
    tol: Tolerance,
) -> Result<(HilbertModule, GramQuotient, Matrix)> {
    let traces = algebra.basis_traces();
    let n = algebraic_dim;
    let scalar = Matrix::from_fn(n, n, |i, j| gram[i * n + j].dot(&traces));
    let quotient = numkit::gram_quotient(&scalar, tol)?;
    let reps = quotient.representatives();
    let r = quotient.quotient_dim;
    let scale_lift = operator_norm(&quotient.lift);
    let mut new_action = Vec::with_capacity(action.len());
    for (idx, a) in action.iter().enumerate() {
        let leak = frobenius(&(&quotient.lift * a * &quotient.null_basis));
        let scale = scale_lift * operator_norm(a);
        if leak > tol.bound(scale.max(1.0)) {
            return Err(Error::DescentFailure { what: format!("right action by algebra element {idx}"), residual: leak });
        }
        new_action.push(&quotient.lift * a * &reps);
    }
    let mut new_gram = Vec::with_capacity(r * r);
    for s in 0..r {
        for t in 0..r {
            let mut g = Vector::zeros(algebra.dim());
            for i in 0..n {
                let wi = reps[(i, s)].conj();
                if wi == numkit::ZERO {
                    continue;
                }
                for j in 0..n {
                    let w = wi * reps[(j, t)];
                    if w != numkit::ZERO {
                        g += &gram[i * n + j] * w;
                    }
                }
            }
            new_gram.push(g);
        }
    }
    let module = make_module(algebra, r, new_action, new_gram, tol)?;
    Ok((module, quotient, scalar))
}

/// A left action of `A` on the carrier of a right Hilbert module `X` by
/// adjointable operators.
#[derive(Debug, Clone)]
pub struct LeftAction {
    algebra: CStarAlgebra,
    module: HilbertModule,
    images: Vec<Matrix>,
    /// Module adjoint of each image, solved independently.
    adjoints: Vec<Matrix>,
    /// Worst residual of `<a·x, y> = <x, a*·y>` over basis instances.
    adjoint_residual: f64,
}

/// Validate a left action: multiplicative on the basis and `ρ(a*)` is the
/// module adjoint of `ρ(a)`.
pub fn make_left_action(
    algebra: &CStarAlgebra,
    module: &HilbertModule,
    images: Vec<Matrix>,
    tol: Tolerance,
) -> Result<LeftAction> {
    let d = module.dim();
    let k = algebra.dim();
    if images.len() != k {
        return Err(Error::Shape(format!("{} left-action images for an algebra of dimension {k}", images.len())));
    }
    for (idx, m) in images.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Shape(format!("left-action image {idx} is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
        }
        if !numkit::all_finite(m) {
            return Err(Error::NonFinite(format!("left-action image {idx}")));
        }
    }
    let apply = |coords: &Vector| images.iter().zip(coords.iter()).fold(numkit::zeros(d, d), |acc, (m, &x)| acc + m * x);
    let scale = images.iter().map(operator_norm).fold(0.0, f64::max).max(1.0);
    for i in 0..k {
        for j in 0..k {
            let res = frobenius(&(apply(algebra.product_coords(i, j)) - &images[i] * &images[j]));
            if res > tol.bound(scale * scale) {
                return Err(Error::LeftAction { detail: format!("not multiplicative on basis pair ({i}, {j})"), residual: res });
            }
        }
    }
    let mut worst: f64 = 0.0;
    let gram_scale = module.gram().iter().map(|g| module.algebra().matrix_of(g).norm()).fold(0.0, f64::max).max(1.0);
    let mut star_images = Vec::with_capacity(k);
    for idx in 0..k {
        let star = apply(&algebra.star_coords(idx));
        for i in 0..d {
            let ax = images[idx].column(i).into_owned();
            for j in 0..d {
                let lhs = module.inner_coords(&ax, &module.basis_vector(j));
                let rhs = module.inner_coords(&module.basis_vector(i), &star.column(j).into_owned());
                let res = frobenius(&module.algebra().matrix_of(&(lhs - rhs)));
                worst = worst.max(res);
            }
        }
        star_images.push(star);
    }
    if worst > tol.bound(gram_scale * scale) {
        return Err(Error::LeftAction { detail: "not adjointable: <a·x,y> != <x,a*·y>".into(), residual: worst });
    }
    let adjoints = images.iter().map(|m| module.adjoint_of(m, tol)).collect::<Result<Vec<_>>>()?;
    Ok(LeftAction { algebra: algebra.clone(), module: module.clone(), images, adjoints, adjoint_residual: worst })
}

impl LeftAction {
    /// Left multiplication of `A` on itself.
    pub fn left_multiplication(algebra: &CStarAlgebra, tol: Tolerance) -> Result<LeftAction> {
        let module = HilbertModule::over_itself(algebra)?;
        let k = algebra.dim();
        let images = (0..k)
            .map(|l| Matrix::from_fn(k, k, |row, i| algebra.product_coords(l, i)[row]))
            .collect();
        make_left_action(algebra, &module, images, tol)
    }

    pub fn algebra(&self) -> &CStarAlgebra {
        &self.algebra
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn adjoints(&self) -> &[Matrix] {
        &self.adjoints
    }

    pub fn adjoint_residual(&self) -> f64 {
        self.adjoint_residual
    }

    pub fn apply_coords(&self, coords: &Vector) -> Matrix {
        let d = self.module.dim();
        self.images.iter().zip(coords.iter()).fold(numkit::zeros(d, d), |acc, (m, &x)| acc + m * x)
    }

    /// `span A·X = X`.
    pub fn is_nondegenerate(&self) -> bool {
        let d = self.module.dim();
        if d == 0 {
            return true;
        }
        let stacked = Matrix::from_fn(d, d * self.images.len(), |r, col| self.images[col / d][(r, col % d)]);
        rank(&stacked, RANK_CUTOFF) == d
    }
}

pub(crate) fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

pub(crate) fn carrier_solver(carrier: &[Matrix], cols: usize) -> Result<SpanSolver> {
    let rows = carrier.first().map_or(0, |x| x.nrows());
    for (idx, x) in carrier.iter().enumerate() {
        if x.nrows() != rows || x.ncols() != cols {
            return Err(Error::Shape(format!("carrier element {idx} is {}x{}, expected {rows}x{cols}", x.nrows(), x.ncols())));
        }
    }
    let mat = if carrier.is_empty() {
        numkit::zeros(rows * cols, 0)
    } else {
        Matrix::from_columns(&carrier.iter().map(vec_of).collect::<Vec<_>>())
    };
    SpanSolver::new(mat)
}

pub(crate) fn solve_in(solver: &SpanSolver, m: &Matrix, tol: Tolerance) -> Result<Vector> {
    let (x, residual) = solver.solve(&vec_of(m));
    if residual > tol.bound(frobenius(m).max(1.0)) {
        return Err(Error::CoordinateSolveFailed { residual });
    }
    Ok(x)
}

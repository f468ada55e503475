//! Imprimitivity bimodules, their duals, Morita-equivalence checks and the
//! induce-and-return round trip.
//!
//! The left Hilbert structure `(ρ, _A<·,·>)` of an `A`–`B` bimodule is
//! validated as a right module over `A` on the conjugate space: the right
//! action is `conj(ρ(a*))` and the Gram is `_A<e_i, e_j>`. This mirror is
//! exactly the right structure of the dual bimodule.

use crate::cstar::{check_star_hom, CStarAlgebra, StarHomomorphism};
use crate::error::{BimoduleAxiom, Error, Result};
use crate::hilbmod::{carrier_solver, make_left_action, make_module, solve_in, HilbertModule, LeftAction, ModuleResiduals, Worst};
use crate::induction::{induce_module_rep, InducedSetup};
use crate::numkit::{self, frobenius, operator_norm, GramQuotient, Matrix, Tolerance, Vector};
use crate::reps::{self, unitarity_residual, ModuleRep};
use crate::tensor::descend;

/// Raw bimodule data on a carrier with basis `e_0 .. e_{d-1}`.
///
/// `left_action[k]` has `a_k · e_i` in column `i`; `left_gram[i * d + j]` is
/// `_A<e_i, e_j>`, linear in `e_i`. The right data follow the module layout.
#[derive(Debug, Clone)]
pub struct BimoduleParts {
    pub left_algebra: CStarAlgebra,
    pub right_algebra: CStarAlgebra,
    pub carrier_dim: usize,
    pub left_action: Vec<Matrix>,
    pub right_action: Vec<Matrix>,
    pub left_gram: Vec<Vector>,
    pub right_gram: Vec<Vector>,
}

#[derive(Debug, Clone, Default)]
pub struct BimoduleResiduals {
    pub right: ModuleResiduals,
    pub left: ModuleResiduals,
    pub multiplicativity: Worst,
    pub left_adjointable: Worst,
    pub right_adjointable: Worst,
    pub compatibility: Worst,
    pub commutation: Worst,
}

impl BimoduleResiduals {
    pub fn max(&self) -> f64 {
        [
            self.right.max(),
            self.left.max(),
            self.multiplicativity.residual,
            self.left_adjointable.residual,
            self.right_adjointable.residual,
            self.compatibility.residual,
            self.commutation.residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct ImprimitivityBimodule {
    parts: BimoduleParts,
    right: HilbertModule,
    left_mirror: HilbertModule,
    left_action: LeftAction,
    residuals: BimoduleResiduals,
}

fn fail(axiom: BimoduleAxiom, w: &Worst) -> Error {
    Error::Imprimitivity { axiom, at: w.at.clone(), residual: w.residual }
}

fn lift_module_error(e: Error, wrap: fn(crate::error::ModuleAxiom) -> BimoduleAxiom) -> Error {
    match e {
        Error::ModuleAxiom { axiom, at, residual } => Error::Imprimitivity { axiom: wrap(axiom), at, residual },
        other => other,
    }
}

fn combine(images: &[Matrix], coords: &Vector, d: usize) -> Matrix {
    images.iter().zip(coords.iter()).fold(numkit::zeros(d, d), |acc, (m, &x)| acc + m * x)
}

/// `conj(T(a_k*))` for each basis element: the action on the conjugate space.
fn conjugate_side(algebra: &CStarAlgebra, images: &[Matrix], d: usize) -> Vec<Matrix> {
    (0..algebra.dim()).map(|k| combine(images, &algebra.star_coords(k), d).map(|z| z.conj())).collect()
}

/// Validate every imprimitivity axiom, in the order: left action is a unital
/// homomorphism, right module, left module, adjointability, compatibility,
/// commuting actions, fullness on both sides.
pub fn make_imprimitivity(parts: BimoduleParts, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    let (a, b, d) = (&parts.left_algebra, &parts.right_algebra, parts.carrier_dim);
    if parts.left_action.len() != a.dim() {
        return Err(Error::Shape(format!("{} left-action images for an algebra of dimension {}", parts.left_action.len(), a.dim())));
    }
    for (k, m) in parts.left_action.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Shape(format!("left-action image {k} is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
        }
        if !numkit::all_finite(m) {
            return Err(Error::NonFinite(format!("left-action image {k}")));
        }
    }
    let mut res = BimoduleResiduals::default();
    let rho = &parts.left_action;
    let rho_scale = rho.iter().map(operator_norm).fold(0.0, f64::max).max(1.0);

    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let r = frobenius(&(combine(rho, a.product_coords(i, j), d) - &rho[i] * &rho[j]));
            res.multiplicativity.record(r, || format!("left algebra basis pair ({i}, {j})"));
        }
    }
    res.multiplicativity.record(frobenius(&(combine(rho, a.unit_coords(), d) - numkit::identity(d))), || "left unit".into());
    if res.multiplicativity.residual > tol.bound(rho_scale * rho_scale) {
        return Err(fail(BimoduleAxiom::Bimodule, &res.multiplicativity));
    }

    let right = make_module(b, d, parts.right_action.clone(), parts.right_gram.clone(), tol)
        .map_err(|e| lift_module_error(e, BimoduleAxiom::RightModule))?;
    res.right = right.axiom_residuals();
    let mirror = make_module(a, d, conjugate_side(a, rho, d), parts.left_gram.clone(), tol)
        .map_err(|e| lift_module_error(e, BimoduleAxiom::LeftModule))?;
    res.left = mirror.axiom_residuals();

    // left adjointable: <a·e_i, e_j>_B = <e_i, a*·e_j>_B
    let b_scale = res.right.gram_scale * rho_scale;
    for k in 0..a.dim() {
        let star = combine(rho, &a.star_coords(k), d);
        for i in 0..d {
            for j in 0..d {
                let lhs = right.inner_coords(&rho[k].column(i).into_owned(), &right.basis_vector(j));
                let rhs = right.inner_coords(&right.basis_vector(i), &star.column(j).into_owned());
                let r = frobenius(&b.matrix_of(&(lhs - rhs)));
                res.left_adjointable.record(r, || format!("left algebra element {k}, basis pair ({i}, {j})"));
            }
        }
    }
    if res.left_adjointable.residual > tol.bound(b_scale) {
        return Err(fail(BimoduleAxiom::LeftAdjointable, &res.left_adjointable));
    }
    // right adjointable: _A<e_i·b, e_j> = _A<e_i, e_j·b*>, with _A<x, y> = Σ x_i conj(y_j) L_ij
    let rr = &parts.right_action;
    let r_scale = rr.iter().map(operator_norm).fold(0.0, f64::max).max(1.0);
    let lg = |i: usize, j: usize| &parts.left_gram[i * d + j];
    for k in 0..b.dim() {
        let star = combine(rr, &b.star_coords(k), d);
        for i in 0..d {
            for j in 0..d {
                let mut diff = Vector::zeros(a.dim());
                for m in 0..d {
                    diff += lg(m, j) * rr[k][(m, i)];
                    diff -= lg(i, m) * star[(m, j)].conj();
                }
                let r = frobenius(&a.matrix_of(&diff));
                res.right_adjointable.record(r, || format!("right algebra element {k}, basis pair ({i}, {j})"));
            }
        }
    }
    if res.right_adjointable.residual > tol.bound(res.left.gram_scale * r_scale) {
        return Err(fail(BimoduleAxiom::RightAdjointable, &res.right_adjointable));
    }
    let left_action = make_left_action(a, &right, rho.clone(), tol).map_err(|e| match e {
        Error::LeftAction { detail, residual } => Error::Imprimitivity { axiom: BimoduleAxiom::LeftAdjointable, at: detail, residual },
        other => other,
    })?;

    // compatibility: _A<e_i, e_j>·e_l = e_i·<e_j, e_l>_B
    let c_scale = (rho_scale * res.left.gram_scale).max(r_scale * res.right.gram_scale);
    for i in 0..d {
        for j in 0..d {
            let left_op = combine(rho, lg(i, j), d);
            for l in 0..d {
                let lhs = left_op.column(l).into_owned();
                let rhs = right.action_of(right.gram_coords(j, l)).column(i).into_owned();
                res.compatibility.record((lhs - rhs).norm(), || format!("basis triple ({i}, {j}, {l})"));
            }
        }
    }
    if res.compatibility.residual > tol.bound(c_scale) {
        return Err(fail(BimoduleAxiom::Compatibility, &res.compatibility));
    }

    for (k, lm) in rho.iter().enumerate() {
        for (m, rm) in rr.iter().enumerate() {
            let r = frobenius(&(lm * rm - rm * lm));
            res.commutation.record(r, || format!("left element {k}, right element {m}"));
        }
    }
    if res.commutation.residual > tol.bound(rho_scale * r_scale) {
        return Err(fail(BimoduleAxiom::Bimodule, &res.commutation));
    }

    if !right.is_full(tol) {
        return Err(Error::Imprimitivity { axiom: BimoduleAxiom::RightFull, at: "span <X, X>_B".into(), residual: 1.0 });
    }
    if !mirror.is_full(tol) {
        return Err(Error::Imprimitivity { axiom: BimoduleAxiom::LeftFull, at: "span _A<X, X>".into(), residual: 1.0 });
    }
    Ok(ImprimitivityBimodule { parts, right, left_mirror: mirror, left_action, residuals: res })
}

impl ImprimitivityBimodule {
    pub fn parts(&self) -> &BimoduleParts {
        &self.parts
    }

    pub fn left_algebra(&self) -> &CStarAlgebra {
        &self.parts.left_algebra
    }

    pub fn right_algebra(&self) -> &CStarAlgebra {
        &self.parts.right_algebra
    }

    pub fn carrier_dim(&self) -> usize {
        self.parts.carrier_dim
    }

    /// The right Hilbert `B`-module structure.
    pub fn right_module(&self) -> &HilbertModule {
        &self.right
    }

    /// The left structure viewed as a right `A`-module on the conjugate space.
    pub fn left_mirror(&self) -> &HilbertModule {
        &self.left_mirror
    }

    pub fn left_action(&self) -> &LeftAction {
        &self.left_action
    }

    pub fn left_gram(&self) -> &[Vector] {
        &self.parts.left_gram
    }

    pub fn left_gram_coords(&self, i: usize, j: usize) -> &Vector {
        &self.parts.left_gram[i * self.parts.carrier_dim + j]
    }

    /// `_A<x, y>`, linear in `x`.
    pub fn left_inner_coords(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.parts.carrier_dim;
        let mut out = Vector::zeros(self.parts.left_algebra.dim());
        for i in 0..d {
            for j in 0..d {
                let w = x[i] * y[j].conj();
                if w != numkit::ZERO {
                    out += self.left_gram_coords(i, j) * w;
                }
            }
        }
        out
    }

    pub fn residuals(&self) -> &BimoduleResiduals {
        &self.residuals
    }
}

/// Bimodule built from a space of rectangular matrices: `a·x = ax`,
/// `x·b = xb`, `_A<x, y> = x y*`, `<x, y>_B = x* y`.
pub fn from_matrix_space(left: &CStarAlgebra, right: &CStarAlgebra, carrier: Vec<Matrix>, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    Ok(make_imprimitivity(matrix_space_parts(left, right, &carrier, tol)?, tol)?)
}

/// Unvalidated parts of [`from_matrix_space`].
pub fn matrix_space_parts(left: &CStarAlgebra, right: &CStarAlgebra, carrier: &[Matrix], tol: Tolerance) -> Result<BimoduleParts> {
    let solver = carrier_solver(carrier, right.ambient_dim())?;
    if let Some(x) = carrier.first() {
        if x.nrows() != left.ambient_dim() {
            return Err(Error::Shape(format!("carrier rows {} do not match the left ambient size {}", x.nrows(), left.ambient_dim())));
        }
    }
    let d = carrier.len();
    let act = |f: &dyn Fn(&Matrix) -> Matrix| -> Result<Matrix> {
        let mut m = numkit::zeros(d, d);
        for (i, x) in carrier.iter().enumerate() {
            m.set_column(i, &solve_in(&solver, &f(x), tol)?);
        }
        Ok(m)
    };
    let left_action = left.basis().iter().map(|a| act(&|x| a * x)).collect::<Result<Vec<_>>>()?;
    let right_action = right.basis().iter().map(|b| act(&|x| x * b)).collect::<Result<Vec<_>>>()?;
    let mut left_gram = Vec::with_capacity(d * d);
    let mut right_gram = Vec::with_capacity(d * d);
    for x in carrier {
        for y in carrier {
            left_gram.push(left.coords_of(&(x * y.adjoint()), tol)?);
            right_gram.push(right.coords_of(&(x.adjoint() * y), tol)?);
        }
    }
    Ok(BimoduleParts {
        left_algebra: left.clone(),
        right_algebra: right.clone(),
        carrier_dim: d,
        left_action,
        right_action,
        left_gram,
        right_gram,
    })
}

/// `C^n` as a `K(C^n)`–`C` bimodule: `_K<h, k> = h ⊗ conj(k)`.
pub fn hilbert_space_bimodule(n: usize, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    let carrier = (0..n).map(|i| numkit::matrix_unit(n, 1, i, 0)).collect();
    from_matrix_space(&CStarAlgebra::full_matrix(n)?, &CStarAlgebra::scalars(), carrier, tol)
}

/// `A` as an `A`–`A` bimodule: `_A<a, b> = a b*`, `<a, b>_A = a* b`.
pub fn algebra_bimodule(algebra: &CStarAlgebra, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    from_matrix_space(algebra, algebra, algebra.basis().to_vec(), tol)
}

/// `m × n` matrices as an `M_m`–`M_n` bimodule.
pub fn rectangular_bimodule(m: usize, n: usize, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    make_imprimitivity(rectangular_parts(m, n, tol)?, tol)
}

pub fn rectangular_parts(m: usize, n: usize, tol: Tolerance) -> Result<BimoduleParts> {
    let carrier: Vec<Matrix> = (0..m).flat_map(|i| (0..n).map(move |j| numkit::matrix_unit(m, n, i, j))).collect();
    matrix_space_parts(&CStarAlgebra::full_matrix(m)?, &CStarAlgebra::full_matrix(n)?, &carrier, tol)
}

/// The bimodule of an isomorphism `φ: A → B`: carrier `B`, `a·x = φ(a)x`,
/// `x·b = xb`, `<x, y>_B = x* y`, `_A<x, y> = φ^{-1}(x y*)`.
pub fn iso_bimodule(phi: &StarHomomorphism, target: &CStarAlgebra, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    let hom = check_star_hom(phi, tol);
    if !hom.passed {
        return Err(Error::NotHomomorphism { multiplicativity: hom.multiplicativity, star: hom.star });
    }
    let a = &phi.source;
    if phi.target_dim != target.ambient_dim() || a.dim() != target.dim() {
        return Err(Error::NotInvertible);
    }
    let k = a.dim();
    let mut coords = numkit::zeros(k, k);
    for (col, img) in phi.images.iter().enumerate() {
        let c = target.coords_of(img, tol).map_err(|_| Error::NotInvertible)?;
        coords.set_column(col, &c);
    }
    if numkit::rank(&coords, numkit::RANK_CUTOFF) < k {
        return Err(Error::NotInvertible);
    }
    let inverse = coords.try_inverse().ok_or(Error::NotInvertible)?;
    let carrier = target.basis();
    let mut left_action = Vec::with_capacity(k);
    for img in &phi.images {
        let mut m = numkit::zeros(k, k);
        for (i, x) in carrier.iter().enumerate() {
            m.set_column(i, &target.coords_of(&(img * x), tol)?);
        }
        left_action.push(m);
    }
    let right_action = (0..k).map(|l| Matrix::from_fn(k, k, |row, i| target.product_coords(i, l)[row])).collect();
    let mut left_gram = Vec::with_capacity(k * k);
    let mut right_gram = Vec::with_capacity(k * k);
    for x in carrier {
        for y in carrier {
            left_gram.push(&inverse * target.coords_of(&(x * y.adjoint()), tol)?);
            right_gram.push(target.coords_of(&(x.adjoint() * y), tol)?);
        }
    }
    make_imprimitivity(
        BimoduleParts {
            left_algebra: a.clone(),
            right_algebra: target.clone(),
            carrier_dim: k,
            left_action,
            right_action,
            left_gram,
            right_gram,
        },
        tol,
    )
}

/// The dual `B`–`A` bimodule on the conjugate carrier, `b(e_i) ↦ e_i`.
#[derive(Debug, Clone)]
pub struct DualBimodule {
    pub bimodule: ImprimitivityBimodule,
}

impl DualBimodule {
    /// Coordinates of `b(x)` for `x` in the original carrier.
    pub fn conjugation(&self, x: &Vector) -> Vector {
        x.map(|z| z.conj())
    }
}

/// Dual table: `b·b(x) = b(x·b*)`, `b(x)·a = b(a*·x)`,
/// `_B<b(x), b(y)> = <x, y>_B`, `<b(x), b(y)>_A = _A<x, y>`.
pub fn dual_module(x: &ImprimitivityBimodule, tol: Tolerance) -> Result<DualBimodule> {
    let p = &x.parts;
    let d = p.carrier_dim;
    let parts = BimoduleParts {
        left_algebra: p.right_algebra.clone(),
        right_algebra: p.left_algebra.clone(),
        carrier_dim: d,
        left_action: conjugate_side(&p.right_algebra, &p.right_action, d),
        right_action: x.left_mirror.action().to_vec(),
        left_gram: p.right_gram.clone(),
        right_gram: p.left_gram.clone(),
    };
    Ok(DualBimodule { bimodule: make_imprimitivity(parts, tol)? })
}

/// Largest coordinate difference between the structure tensors of two
/// bimodules on carriers of the same dimension.
pub fn structure_distance(x: &BimoduleParts, y: &BimoduleParts) -> f64 {
    if x.carrier_dim != y.carrier_dim
        || x.left_action.len() != y.left_action.len()
        || x.right_action.len() != y.right_action.len()
    {
        return f64::INFINITY;
    }
    let mats = x.left_action.iter().zip(&y.left_action).chain(x.right_action.iter().zip(&y.right_action));
    let vecs = x.left_gram.iter().zip(&y.left_gram).chain(x.right_gram.iter().zip(&y.right_gram));
    let m = mats.map(|(a, b)| frobenius(&(a - b))).fold(0.0, f64::max);
    vecs.map(|(a, b)| (a - b).norm()).fold(m, f64::max)
}

#[derive(Debug, Clone)]
pub struct MoritaReport {
    pub accepted: bool,
    pub diagnostic: String,
}

/// Accepts when `candidate` is an imprimitivity bimodule whose left and
/// right algebras span `K(V)` and `K(W)` respectively.
pub fn morita_check(v: &HilbertModule, w: &HilbertModule, candidate: &BimoduleParts, tol: Tolerance) -> MoritaReport {
    let reject = |msg: String| MoritaReport { accepted: false, diagnostic: msg };
    let (kv, kw) = match (v.compacts(tol), w.compacts(tol)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return reject(format!("compact operators unavailable: {e}")),
    };
    let x = match make_imprimitivity(candidate.clone(), tol) {
        Ok(x) => x,
        Err(e) => return reject(e.to_string()),
    };
    if !x.left_algebra().same_span(&kv, tol) {
        return reject("left algebra of the candidate is not K(V)".into());
    }
    if !x.right_algebra().same_span(&kw, tol) {
        return reject("right algebra of the candidate is not K(W)".into());
    }
    MoritaReport { accepted: true, diagnostic: format!("valid K(V)-K(W) imprimitivity bimodule, max axiom residual {:.3e}", x.residuals().max()) }
}

/// Residuals of one half of the round trip.
#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub u1: Matrix,
    pub u2: Matrix,
    pub u1_unitarity: f64,
    pub u2_unitarity: f64,
    /// `‖U2 · null vectors‖` on the algebraic four-fold tensor.
    pub u2_descent: f64,
    /// `max_l ‖U2 Ind Ind Φ(e_l) − Φ(e_l) U1‖`
    pub intertwining: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Quotient dimensions of `X⊗H`, `X̃⊗X⊗H`, `W⊗X̃⊗X⊗H`.
    pub dims: [usize; 3],
}

impl RoundtripReport {
    pub fn max_residual(&self) -> f64 {
        [self.u1_unitarity, self.u2_unitarity, self.u2_descent, self.intertwining].into_iter().fold(0.0, f64::max)
    }

    /// Name and residual of the first failing check.
    pub fn first_failure(&self) -> Option<(&'static str, f64)> {
        [
            ("U1 unitary", self.u1_unitarity),
            ("U2 descends", self.u2_descent),
            ("U2 unitary", self.u2_unitarity),
            ("intertwining", self.intertwining),
        ]
        .into_iter()
        .find(|(_, r)| !(*r <= self.threshold))
    }
}

/// Induce `Φ` (a representation of `W` over `B`) through `X` to `V`, then
/// back through the dual to `W`, and compare with `Φ` using
/// `U1: b(x) ⊗ y ⊗ h ↦ φ(<x, y>_B) h` and
/// `U2: w ⊗ b(x) ⊗ y ⊗ h ↦ Φ(w) φ(<x, y>_B) h`.
///
/// Returns the report whether or not the checks pass; fails only when the
/// inputs are inconsistent or `U1` does not descend.
pub fn roundtrip_report(
    x: &ImprimitivityBimodule,
    v: &HilbertModule,
    w: &HilbertModule,
    phi_rep: &ModuleRep,
    tol: Tolerance,
) -> Result<RoundtripReport> {
    if !x.left_algebra().same_as(v.algebra()) || !x.right_algebra().same_as(w.algebra()) {
        return Err(Error::AlgebraMismatch);
    }
    if phi_rep.module().dim() != w.dim() || !phi_rep.module().algebra().same_as(w.algebra()) {
        return Err(Error::Shape("representation is not of the given module".into()));
    }
    if !v.is_full(tol) || !w.is_full(tol) {
        return Err(Error::NotFull);
    }
    if !x.left_action().is_nondegenerate() {
        return Err(Error::Degenerate("left action on the bimodule is degenerate".into()));
    }
    let setup1 = InducedSetup::new(v, x.left_action(), phi_rep, tol)?;
    let induced1 = induce_module_rep(&setup1, tol)?;
    let dual = dual_module(x, tol)?;
    let setup2 = InducedSetup::new(w, dual.bimodule.left_action(), &induced1.rep, tol)?;
    let induced2 = induce_module_rep(&setup2, tol)?;

    let (dx, dw, h, k) = (x.carrier_dim(), w.dim(), phi_rep.space_dim(), phi_rep.target_dim());
    let r1 = setup1.domain_space.dim();
    let reps1 = setup1.domain_space.quotient.representatives();
    let phi = phi_rep.base();
    let xr = x.right_module();

    // U1 on b(e_i) ⊗ g_s, g_s = Σ reps1[(j, q), s] e_j ⊗ f_q
    let mut m1 = numkit::zeros(h, dx * r1);
    for i in 0..dx {
        for j in 0..dx {
            let pg = phi.apply_coords(xr.gram_coords(i, j));
            let block = reps1.rows(j * h, h);
            let contrib = &pg * block;
            let mut target = m1.columns_mut(i * r1, r1);
            target += contrib;
        }
    }
    let u1 = descend(&m1, &setup2.domain_space.quotient, &GramQuotient::identity(h), "U1", tol)?;

    let mut m2 = numkit::zeros(k, dw * dx * r1);
    for l in 0..dw {
        let img = &phi_rep.images()[l] * &m1;
        m2.columns_mut(l * dx * r1, dx * r1).copy_from(&img);
    }
    let q3 = &setup2.target_space.quotient;
    let u2_descent = frobenius(&(&m2 * &q3.null_basis));
    let u2 = &m2 * q3.representatives();

    let u1_unitarity = unitarity_residual(&u1);
    let u2_unitarity = unitarity_residual(&u2);
    let mut intertwining: f64 = 0.0;
    let mut scale: f64 = 1.0;
    if u2.ncols() == induced2.rep.target_dim() && u1.ncols() == induced2.rep.space_dim() {
        for l in 0..dw {
            scale = scale.max(operator_norm(&phi_rep.images()[l]));
            let r = frobenius(&(&u2 * &induced2.rep.images()[l] - &phi_rep.images()[l] * &u1));
            intertwining = intertwining.max(r);
        }
    } else {
        intertwining = f64::INFINITY;
    }
    let threshold = tol.scaled(10.0).bound(scale);
    let mut report = RoundtripReport {
        u1,
        u2,
        u1_unitarity,
        u2_unitarity,
        u2_descent,
        intertwining,
        threshold,
        passed: false,
        dims: [r1, setup2.domain_space.dim(), setup2.target_space.dim()],
    };
    report.passed = report.first_failure().is_none();
    Ok(report)
}

/// [`roundtrip_report`], turning a failed check into an error.
pub fn roundtrip_verify(
    x: &ImprimitivityBimodule,
    v: &HilbertModule,
    w: &HilbertModule,
    phi_rep: &ModuleRep,
    tol: Tolerance,
) -> Result<RoundtripReport> {
    let report = roundtrip_report(x, v, w, phi_rep, tol)?;
    match report.first_failure() {
        Some((check, residual)) => {
            Err(Error::PostconditionViolation { check: format!("round trip: {check}"), residual, threshold: report.threshold })
        }
        None => Ok(report),
    }
}

/// Both halves: `Φ` of `W` through `X` and back, and `Ψ` of `V` through the
/// dual and back.
pub fn roundtrip_both(
    x: &ImprimitivityBimodule,
    v: &HilbertModule,
    w: &HilbertModule,
    phi_rep: &ModuleRep,
    psi_rep: &ModuleRep,
    tol: Tolerance,
) -> Result<(RoundtripReport, RoundtripReport)> {
    let first = roundtrip_verify(x, v, w, phi_rep, tol)?;
    let dual = dual_module(x, tol)?;
    let second = roundtrip_verify(&dual.bimodule, w, v, psi_rep, tol)?;
    Ok((first, second))
}

/// Convenience: is the representation usable as round-trip input.
pub fn roundtrip_ready(phi_rep: &ModuleRep, tol: Tolerance) -> bool {
    reps::is_nondegenerate(phi_rep, tol) && reps::check_module_rep(phi_rep, tol).passed
}

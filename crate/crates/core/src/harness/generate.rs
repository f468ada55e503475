//! Seeded instance generators. Every generated instance is valid by
//! construction: algebras are conjugated block-diagonal matrix algebras,
//! modules and bimodules are spaces of block rectangular matrices, and
//! representations come from multiplicity data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cstar::{make_algebra, CStarAlgebra, StarHomomorphism};
use crate::error::Result;
use crate::hilbmod::{make_left_action, HilbertModule, LeftAction};
use crate::morita::{self, ImprimitivityBimodule};
use crate::numkit::{self, block_diag, c, kron, Matrix, Tolerance, C64};
use crate::reps::{AlgebraRep, ModuleRep};

use crate::error::Error;

use super::doc::{
    algebra_doc, algebra_rep_doc, bimodule_doc, left_action_doc, module_doc, module_rep_doc, scenario_doc, InstanceDocument, Kind, Scenario,
};

pub type Seeded = ChaCha8Rng;

pub fn rng(seed: u64) -> Seeded {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut Seeded) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut Seeded, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Unitary from the QR factorization of a random matrix, phases fixed so
/// that `R` has a positive diagonal.
pub fn random_unitary(rng: &mut Seeded, n: usize) -> Matrix {
    if n == 0 {
        return numkit::zeros(0, 0);
    }
    let qr = random_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = Matrix::from_fn(n, n, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else if i == j {
            numkit::ONE
        } else {
            numkit::ZERO
        }
    });
    q * phases
}

/// Well-conditioned invertible matrix `U diag(1..2) U'`.
pub fn random_invertible(rng: &mut Seeded, n: usize) -> Matrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let d = Matrix::from_fn(n, n, |i, j| if i == j { c(rng.gen_range(1.0..2.0), 0.0) } else { numkit::ZERO });
    u * d * v
}

/// `⊕ M_{n_i}` conjugated by `unitary`, remembering the block structure.
#[derive(Debug, Clone)]
pub struct BlockAlgebra {
    pub sizes: Vec<usize>,
    pub unitary: Matrix,
    pub algebra: CStarAlgebra,
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().scan(0, |acc, &s| {
        let o = *acc;
        *acc += s;
        Some(o)
    }).collect()
}

impl BlockAlgebra {
    pub fn new(sizes: &[usize], unitary: Matrix, tol: Tolerance) -> Result<Self> {
        let n: usize = sizes.iter().sum();
        let mut basis = Vec::new();
        for (&s, o) in sizes.iter().zip(offsets(sizes)) {
            for i in 0..s {
                for j in 0..s {
                    basis.push(&unitary * numkit::matrix_unit(n, n, o + i, o + j) * unitary.adjoint());
                }
            }
        }
        Ok(BlockAlgebra { sizes: sizes.to_vec(), unitary, algebra: make_algebra(basis, tol)? })
    }

    pub fn standard(sizes: &[usize], tol: Tolerance) -> Result<Self> {
        Self::new(sizes, numkit::identity(sizes.iter().sum()), tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Block `b` of `u* a u`.
    pub fn block(&self, a: &Matrix, b: usize) -> Matrix {
        let o = offsets(&self.sizes)[b];
        let s = self.sizes[b];
        (self.unitary.adjoint() * a * &self.unitary).view((o, o), (s, s)).into_owned()
    }
}

/// Block rectangular matrix units: block `b` has `rows[b] × cols[b]` entries.
fn rectangular_units(rows: &[usize], cols: &[usize]) -> Vec<Matrix> {
    let (nr, nc): (usize, usize) = (rows.iter().sum(), cols.iter().sum());
    let (ro, co) = (offsets(rows), offsets(cols));
    let mut out = Vec::new();
    for b in 0..rows.len() {
        for i in 0..rows[b] {
            for j in 0..cols[b] {
                out.push(numkit::matrix_unit(nr, nc, ro[b] + i, co[b] + j));
            }
        }
    }
    out
}

/// Replace a basis by `x'_a = Σ_b m_ab x_b` for an invertible `m`.
fn mix(carrier: &[Matrix], m: &Matrix) -> Vec<Matrix> {
    (0..carrier.len())
        .map(|a| carrier.iter().enumerate().fold(numkit::zeros(carrier[0].nrows(), carrier[0].ncols()), |acc, (b, x)| acc + x * m[(a, b)]))
        .collect()
}

/// A right module of `rows[b] × n_b` blocks over a block algebra. With
/// `rng`, the basis is mixed by a random invertible matrix.
pub fn block_module(alg: &BlockAlgebra, rows: &[usize], rng: Option<&mut Seeded>, tol: Tolerance) -> Result<HilbertModule> {
    let units = rectangular_units(rows, &alg.sizes);
    let mut carrier: Vec<Matrix> = units.iter().map(|x| x * alg.unitary.adjoint()).collect();
    if let Some(rng) = rng {
        let m = random_invertible(rng, carrier.len());
        carrier = mix(&carrier, &m);
    }
    HilbertModule::from_matrix_space(&alg.algebra, carrier, tol)
}

/// `⊕ M_{m_b}`–`⊕ M_{n_b}` bimodule of block rectangular matrices.
pub fn block_bimodule(left: &BlockAlgebra, right: &BlockAlgebra, rng: Option<&mut Seeded>, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    let units = rectangular_units(&left.sizes, &right.sizes);
    let mut carrier: Vec<Matrix> = units.iter().map(|x| &left.unitary * x * right.unitary.adjoint()).collect();
    if let Some(rng) = rng {
        let m = random_invertible(rng, carrier.len());
        carrier = mix(&carrier, &m);
    }
    morita::from_matrix_space(&left.algebra, &right.algebra, carrier, tol)
}

/// `φ(a) = U (⊕ a_b ⊗ I_{r_b}) U*`.
pub fn multiplicity_rep(alg: &BlockAlgebra, mult: &[usize], unitary: &Matrix, tol: Tolerance) -> Result<AlgebraRep> {
    let h: usize = alg.sizes.iter().zip(mult).map(|(s, r)| s * r).sum();
    let images = alg
        .algebra
        .basis()
        .iter()
        .map(|a| {
            let blocks: Vec<Matrix> = (0..alg.sizes.len()).map(|b| kron(&alg.block(a, b), &numkit::identity(mult[b]))).collect();
            unitary * block_diag(&blocks) * unitary.adjoint()
        })
        .collect();
    AlgebraRep::new(StarHomomorphism::new(alg.algebra.clone(), h, images)?, tol)
}

/// `Φ(y) = U_K (⊕ y_b ⊗ I_{r_b}) U_H*` for a block module with row sizes
/// `rows`, based on [`multiplicity_rep`].
pub fn multiplicity_module_rep(
    alg: &BlockAlgebra,
    module: &HilbertModule,
    carrier: &[Matrix],
    rows: &[usize],
    mult: &[usize],
    u_h: &Matrix,
    u_k: &Matrix,
    tol: Tolerance,
) -> Result<ModuleRep> {
    let base = multiplicity_rep(alg, mult, u_h, tol)?;
    let k: usize = rows.iter().zip(mult).map(|(q, r)| q * r).sum();
    let (ro, co) = (offsets(rows), offsets(&alg.sizes));
    let images = carrier
        .iter()
        .map(|y| {
            let y0 = y * &alg.unitary;
            let blocks: Vec<Matrix> = (0..rows.len())
                .map(|b| kron(&y0.view((ro[b], co[b]), (rows[b], alg.sizes[b])).into_owned(), &numkit::identity(mult[b])))
                .collect();
            u_k * block_diag(&blocks) * u_h.adjoint()
        })
        .collect();
    ModuleRep::new(module.clone(), base, k, images)
}

/// A block module together with its carrier matrices, for building
/// representations of it.
#[derive(Debug, Clone)]
pub struct BlockModule {
    pub rows: Vec<usize>,
    pub carrier: Vec<Matrix>,
    pub module: HilbertModule,
}

pub fn block_module_with_carrier(alg: &BlockAlgebra, rows: &[usize], rng: &mut Seeded, tol: Tolerance) -> Result<BlockModule> {
    let units = rectangular_units(rows, &alg.sizes);
    let base: Vec<Matrix> = units.iter().map(|x| x * alg.unitary.adjoint()).collect();
    let m = random_invertible(rng, base.len());
    let carrier = mix(&base, &m);
    let module = HilbertModule::from_matrix_space(&alg.algebra, carrier.clone(), tol)?;
    Ok(BlockModule { rows: rows.to_vec(), carrier, module })
}

/// Random non-degenerate representation of a block module.
pub fn random_module_rep(alg: &BlockAlgebra, m: &BlockModule, rng: &mut Seeded, max_mult: usize, tol: Tolerance) -> Result<ModuleRep> {
    let mult: Vec<usize> = alg.sizes.iter().map(|_| rng.gen_range(1..=max_mult)).collect();
    let h: usize = alg.sizes.iter().zip(&mult).map(|(s, r)| s * r).sum();
    let k: usize = m.rows.iter().zip(&mult).map(|(q, r)| q * r).sum();
    let u_h = random_unitary(rng, h);
    let u_k = random_unitary(rng, k);
    multiplicity_module_rep(alg, &m.module, &m.carrier, &m.rows, &mult, &u_h, &u_k, tol)
}

/// Sample block sizes with `Σ left_b · right_b ≤ cap`.
fn sample_blocks(rng: &mut Seeded, max_blocks: usize, max_size: usize, cap: usize) -> (Vec<usize>, Vec<usize>) {
    loop {
        let t = rng.gen_range(1..=max_blocks);
        let m: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=max_size)).collect();
        let n: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=max_size)).collect();
        if m.iter().zip(&n).map(|(a, b)| a * b).sum::<usize>() <= cap {
            return (m, n);
        }
    }
}

/// Row counts `p_b ≥ 1` with `Σ p_b · s_b ≤ cap`.
fn sample_rows(rng: &mut Seeded, sizes: &[usize], cap: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = sizes.iter().map(|_| rng.gen_range(1..=2)).collect();
    while rows.iter().zip(sizes).map(|(p, s)| p * s).sum::<usize>() > cap {
        if let Some(p) = rows.iter_mut().find(|p| **p > 1) {
            *p -= 1;
        } else {
            break;
        }
    }
    rows
}

/// Round-trip input with its generating data, so that further
/// representations of `V` and `W` can be produced.
#[derive(Debug, Clone)]
pub struct GeneratedScenario {
    pub left: BlockAlgebra,
    pub right: BlockAlgebra,
    pub v: BlockModule,
    pub w: BlockModule,
    pub scenario: Scenario,
}

/// Desk-scale scenario: at most three blocks, module dimensions at most
/// four, representation spaces at most eight.
pub fn scenario(seed: u64, tol: Tolerance) -> Result<GeneratedScenario> {
    let mut rng = rng(seed);
    let (m, n) = sample_blocks(&mut rng, 3, 2, 4);
    let ua = random_unitary(&mut rng, m.iter().sum());
    let ub = random_unitary(&mut rng, n.iter().sum());
    let left = BlockAlgebra::new(&m, ua, tol)?;
    let right = BlockAlgebra::new(&n, ub, tol)?;
    let bimodule = block_bimodule(&left, &right, Some(&mut rng), tol)?;
    let v_rows = sample_rows(&mut rng, &m, 4);
    let w_rows = sample_rows(&mut rng, &n, 4);
    let v = block_module_with_carrier(&left, &v_rows, &mut rng, tol)?;
    let w = block_module_with_carrier(&right, &w_rows, &mut rng, tol)?;
    let phi = random_module_rep(&right, &w, &mut rng, 2, tol)?;
    let psi = random_module_rep(&left, &v, &mut rng, 2, tol)?;
    let scenario = Scenario { bimodule, v: v.module.clone(), w: w.module.clone(), phi, psi: Some(psi) };
    Ok(GeneratedScenario { left, right, v, w, scenario })
}

/// The algebra bimodule of `M_2` with `W = M_2` and `Φ` left multiplication
/// on `C²`.
pub fn matrix_algebra_scenario(tol: Tolerance) -> Result<Scenario> {
    let m2 = CStarAlgebra::full_matrix(2)?;
    let bimodule = morita::algebra_bimodule(&m2, tol)?;
    let w = HilbertModule::over_itself(&m2)?;
    let phi = ModuleRep::new(w.clone(), AlgebraRep::identity(&m2), 2, m2.basis().to_vec())?;
    Ok(Scenario { bimodule, v: w.clone(), w, phi: phi.clone(), psi: Some(phi) })
}

/// `C²` as a `M_2`–`C` bimodule, `V = M_2` over itself, `W = C³` over the
/// scalars with a seeded non-degenerate `Φ`.
pub fn hilbert_space_scenario(seed: u64, tol: Tolerance) -> Result<Scenario> {
    let mut rng = rng(seed);
    let bimodule = morita::hilbert_space_bimodule(2, tol)?;
    let scalars = bimodule.right_algebra().clone();
    let w3 = HilbertModule::hilbert_space(3)?;
    let w = crate::hilbmod::make_module(&scalars, 3, w3.action().to_vec(), w3.gram().to_vec(), tol)?;
    // Φ(e_l) = U [block l of I_{3h}] with H = C^h
    let h = rng.gen_range(1..=2);
    let u = random_unitary(&mut rng, 3 * h);
    let images: Vec<Matrix> = (0..3).map(|l| &u * numkit::identity(3 * h).columns(l * h, h)).collect();
    let base = AlgebraRep::new(StarHomomorphism::new(scalars, h, vec![numkit::identity(h)])?, tol)?;
    let phi = ModuleRep::new(w.clone(), base, 3 * h, images)?;
    let m2 = bimodule.left_algebra().clone();
    let v = HilbertModule::over_itself(&m2)?;
    let psi = ModuleRep::new(v.clone(), AlgebraRep::identity(&m2), 2, m2.basis().to_vec())?;
    Ok(Scenario { bimodule, v, w, phi, psi: Some(psi) })
}

/// `(Φ2, U1, U2)` with `Φ2 = U2 Φ U1*` for seeded unitaries.
pub fn unitary_conjugate(rep: &ModuleRep, rng: &mut Seeded) -> (ModuleRep, Matrix, Matrix) {
    let u1 = random_unitary(rng, rep.space_dim());
    let u2 = random_unitary(rng, rep.target_dim());
    (rep.conjugate(&u1, &u2), u1, u2)
}

/// An exactly representable tensor fixture: integer algebra, module and
/// representation data.
#[derive(Debug, Clone)]
pub struct ExactFixture {
    pub x: HilbertModule,
    pub pi: AlgebraRep,
    /// Present for interior-product fixtures.
    pub v: Option<HilbertModule>,
    pub rho: Option<LeftAction>,
}

/// Unimodular integer matrix `L U` with unit diagonals and entries in
/// `{-1, 0, 1}`.
fn integer_mixing(rng: &mut Seeded, n: usize) -> Matrix {
    let mut lower = numkit::identity(n);
    let mut upper = numkit::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower[(i, j)] = c(rng.gen_range(-1..=1) as f64, 0.0);
            upper[(j, i)] = c(rng.gen_range(-1..=1) as f64, 0.0);
        }
    }
    lower * upper
}

/// Fixture `seed`: even seeds give `X ⊗ H`, odd seeds add `V ⊗ X` with a
/// left action. Multiplicities may be zero, so `π` may be degenerate.
pub fn exact_fixture(seed: u64, tol: Tolerance) -> Result<ExactFixture> {
    let mut rng = rng(seed);
    let (m, n) = sample_blocks(&mut rng, 3, 2, 6);
    let right = BlockAlgebra::standard(&n, tol)?;
    let mult: Vec<usize> = n.iter().map(|_| rng.gen_range(0..=2)).collect();
    let mult = if mult.iter().all(|&r| r == 0) { vec![1; n.len()] } else { mult };
    let h: usize = n.iter().zip(&mult).map(|(s, r)| s * r).sum();
    let pi = multiplicity_rep(&right, &mult, &numkit::identity(h), tol)?;
    if seed % 2 == 0 {
        let rows: Vec<usize> = n.iter().map(|_| rng.gen_range(0..=2)).collect();
        let rows = if rows.iter().all(|&r| r == 0) { vec![1; n.len()] } else { rows };
        let units = rectangular_units(&rows, &n);
        let carrier = mix(&units, &integer_mixing(&mut rng, units.len()));
        let x = HilbertModule::from_matrix_space(&right.algebra, carrier, tol)?;
        return Ok(ExactFixture { x, pi, v: None, rho: None });
    }
    let left = BlockAlgebra::standard(&m, tol)?;
    let units = rectangular_units(&m, &n);
    let carrier = mix(&units, &integer_mixing(&mut rng, units.len()));
    let bimodule = morita::from_matrix_space(&left.algebra, &right.algebra, carrier, tol)?;
    let v_rows: Vec<usize> = m.iter().map(|_| rng.gen_range(0..=2)).collect();
    let v_rows = if v_rows.iter().all(|&r| r == 0) { vec![1; m.len()] } else { v_rows };
    let v_units = rectangular_units(&v_rows, &m);
    let v_carrier = mix(&v_units, &integer_mixing(&mut rng, v_units.len()));
    let v = HilbertModule::from_matrix_space(&left.algebra, v_carrier, tol)?;
    let rho = make_left_action(&left.algebra, bimodule.right_module(), bimodule.left_action().images().to_vec(), tol)?;
    Ok(ExactFixture { x: bimodule.right_module().clone(), pi, v: Some(v), rho: Some(rho) })
}

/// Named presets accepted by [`document`].
pub const PRESETS: &[&str] = &["hilbert-space", "algebra", "algebra-sum", "rectangular", "iso", "matrix-algebra"];

fn random_blocks(rng: &mut Seeded, tol: Tolerance) -> Result<BlockAlgebra> {
    let t = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=2)).collect();
    let u = random_unitary(rng, sizes.iter().sum());
    BlockAlgebra::new(&sizes, u, tol)
}

fn unknown_preset(kind: Kind, preset: &str) -> Error {
    Error::Parse { path: "preset".into(), message: format!("no preset {preset:?} for kind {kind:?}") }
}

fn preset_bimodule(preset: &str, rng: &mut Seeded, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    match preset {
        "hilbert-space" => morita::hilbert_space_bimodule(rng.gen_range(1..=3), tol),
        "algebra" => morita::algebra_bimodule(&CStarAlgebra::full_matrix(2)?, tol),
        "algebra-sum" => morita::algebra_bimodule(&CStarAlgebra::block_diagonal(&[2, 1])?, tol),
        "rectangular" => morita::rectangular_bimodule(rng.gen_range(1..=2), rng.gen_range(1..=2), tol),
        "iso" => {
            // inner automorphism of a conjugated block algebra
            let alg = random_blocks(rng, tol)?;
            let blocks: Vec<Matrix> = alg.sizes.iter().map(|&s| random_unitary(rng, s)).collect();
            let u = &alg.unitary * block_diag(&blocks) * alg.unitary.adjoint();
            let images = alg.algebra.basis().iter().map(|a| &u * a * u.adjoint()).collect();
            let phi = StarHomomorphism::new(alg.algebra.clone(), alg.ambient_dim(), images)?;
            morita::iso_bimodule(&phi, &alg.algebra, tol)
        }
        other => Err(unknown_preset(Kind::Bimodule, other)),
    }
}

/// Seeded instance document of the given kind, valid by construction.
pub fn document(kind: Kind, seed: u64, preset: Option<&str>, tol: Tolerance) -> Result<InstanceDocument> {
    let mut rng = rng(seed);
    let name = match preset {
        Some(p) => format!("{kind:?}-{p}-{seed}").to_lowercase(),
        None => format!("{kind:?}-{seed}").to_lowercase(),
    };
    let doc = |payload: &dyn erased::Payload| payload.document(kind, &name, seed);
    match (kind, preset) {
        (Kind::Algebra, None) => doc(&algebra_doc(&random_blocks(&mut rng, tol)?.algebra)),
        (Kind::Module, None) => {
            let alg = random_blocks(&mut rng, tol)?;
            let rows = sample_rows(&mut rng, &alg.sizes, 4);
            doc(&module_doc(&block_module(&alg, &rows, Some(&mut rng), tol)?))
        }
        (Kind::AlgebraRep, None) => {
            let alg = random_blocks(&mut rng, tol)?;
            let mult: Vec<usize> = alg.sizes.iter().map(|_| rng.gen_range(1..=2)).collect();
            let h = alg.sizes.iter().zip(&mult).map(|(s, r)| s * r).sum();
            let u = random_unitary(&mut rng, h);
            doc(&algebra_rep_doc(&multiplicity_rep(&alg, &mult, &u, tol)?))
        }
        (Kind::ModuleRep, None) => {
            let alg = random_blocks(&mut rng, tol)?;
            let rows = sample_rows(&mut rng, &alg.sizes, 4);
            let m = block_module_with_carrier(&alg, &rows, &mut rng, tol)?;
            doc(&module_rep_doc(&random_module_rep(&alg, &m, &mut rng, 2, tol)?))
        }
        (Kind::LeftAction | Kind::Bimodule, _) => {
            let x = match preset {
                Some(p) => preset_bimodule(p, &mut rng, tol)?,
                None => {
                    let (m, n) = sample_blocks(&mut rng, 3, 2, 4);
                    let left = BlockAlgebra::new(&m, random_unitary(&mut rng, m.iter().sum()), tol)?;
                    let right = BlockAlgebra::new(&n, random_unitary(&mut rng, n.iter().sum()), tol)?;
                    block_bimodule(&left, &right, Some(&mut rng), tol)?
                }
            };
            if kind == Kind::Bimodule {
                doc(&bimodule_doc(x.parts()))
            } else {
                doc(&left_action_doc(x.left_action()))
            }
        }
        (Kind::Scenario, None) => doc(&scenario_doc(&scenario(seed, tol)?.scenario)),
        (Kind::Scenario, Some("matrix-algebra")) => doc(&scenario_doc(&matrix_algebra_scenario(tol)?)),
        (Kind::Scenario, Some("hilbert-space")) => doc(&scenario_doc(&hilbert_space_scenario(seed, tol)?)),
        (k, Some(p)) => Err(unknown_preset(k, p)),
    }
}

mod erased {
    use super::*;

    /// Object-safe wrapper so the dispatch above can share one closure.
    pub trait Payload {
        fn document(&self, kind: Kind, name: &str, seed: u64) -> Result<InstanceDocument>;
    }

    impl<T: serde::Serialize> Payload for T {
        fn document(&self, kind: Kind, name: &str, seed: u64) -> Result<InstanceDocument> {
            InstanceDocument::new(kind, name, Some(seed), self)
        }
    }
}

//! Worked instances checked against hand computations or an independent
//! route through the library.

use rieffel::cstar::{check_star_hom, AlgebraElement};
use rieffel::harness::exact::exact_rank;
use rieffel::harness::generate::{self, BlockAlgebra, Seeded};
use rieffel::hilbmod::{compacts, is_full, make_left_action, module_norm, rank_one};
use rieffel::induction::{induce_algebra_rep_with_space, induce_module_rep, InducedSetup};
use rieffel::morita::{self, dual_module, roundtrip_verify};
use rieffel::numkit::{self, c, frobenius, GramQuotient, Matrix, Vector};
use rieffel::reps::{self, check_invariant_pair, check_module_rep, direct_sum_reps, is_irreducible, SubspacePair};
use rieffel::tensor::{descend, interior_tensor, module_space_tensor};
use rieffel::{AlgebraRep, CStarAlgebra, Error, HilbertModule, LeftAction, ModuleRep, StarHomomorphism, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn random_vector(rng: &mut Seeded, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| generate::random_complex(rng))
}

fn random_element(alg: &CStarAlgebra, rng: &mut Seeded) -> AlgebraElement {
    alg.element(random_vector(rng, alg.dim())).unwrap()
}

fn m2_left_multiplication(m2: &CStarAlgebra) -> ModuleRep {
    let w = HilbertModule::over_itself(m2).unwrap();
    ModuleRep::new(w, AlgebraRep::identity(m2), 2, m2.basis().to_vec()).unwrap()
}

#[test]
fn matrix_algebra_tensor_plane_has_exact_rank_two() {
    // a ⊗ h = 1 ⊗ a h, so M_2 ⊗ C² collapses onto C²
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let x = HilbertModule::over_itself(&m2).unwrap();
    let t = module_space_tensor(&x, &AlgebraRep::identity(&m2), tol()).unwrap();
    assert_eq!(t.gram.shape(), (8, 8));
    assert!(t.gram.iter().all(|z| z.im == 0.0 && z.re.fract() == 0.0));
    assert_eq!(exact_rank(&t.gram).unwrap(), 2);
    assert_eq!(t.dim(), 2);
}

#[test]
fn induced_from_the_algebra_bimodule_is_the_original() {
    let blocks = BlockAlgebra::standard(&[2, 1], tol()).unwrap();
    let a = &blocks.algebra;
    let rho = LeftAction::left_multiplication(a, tol()).unwrap();
    let mut rng = generate::rng(3);
    let u = generate::random_unitary(&mut rng, 2 * 2 + 1);
    let pi = generate::multiplicity_rep(&blocks, &[2, 1], &u, tol()).unwrap();
    let (ind, space) = induce_algebra_rep_with_space(rho.module(), &rho, &pi, tol()).unwrap();
    let h = pi.space_dim();
    assert_eq!(ind.space_dim(), h);
    // x ⊗ h ↦ π(x) h on the algebraic tensor
    let mut w = numkit::zeros(h, a.dim() * h);
    for (i, image) in pi.images().iter().enumerate() {
        for p in 0..h {
            w.set_column(i * h + p, &image.column(p));
        }
    }
    let v = descend(&w, &space.quotient, &GramQuotient::identity(h), "x⊗h ↦ π(x)h", tol()).unwrap();
    assert!(reps::unitarity_residual(&v) < 1e-10);
    for (ind_a, pi_a) in ind.images().iter().zip(pi.images()) {
        assert!(frobenius(&(&v * ind_a - pi_a * &v)) < 1e-10);
    }
}

/// `X = M_{2×2} ⊕ M_{2×1}` as block-diagonal 4×3 matrices, right module over
/// `M_2 ⊕ M_1`, with `M_2` acting by `a ↦ a ⊕ a` on the left.
fn two_block_carrier(m2: &CStarAlgebra, b: &CStarAlgebra) -> (HilbertModule, LeftAction) {
    let mut positions = Vec::new();
    for r in 0..2 {
        for col in 0..2 {
            positions.push((r, col));
        }
    }
    for r in 2..4 {
        positions.push((r, 2));
    }
    let carrier: Vec<Matrix> = positions.iter().map(|&(r, col)| numkit::matrix_unit(4, 3, r, col)).collect();
    let x = HilbertModule::from_matrix_space(b, carrier.clone(), tol()).unwrap();
    let images = m2
        .basis()
        .iter()
        .map(|a| {
            let doubled = numkit::block_diag(&[a.clone(), a.clone()]);
            let mut m = numkit::zeros(positions.len(), positions.len());
            for (j, e) in carrier.iter().enumerate() {
                let moved = &doubled * e;
                for (i, &(r, col)) in positions.iter().enumerate() {
                    m[(i, j)] = moved[(r, col)];
                }
            }
            m
        })
        .collect();
    let rho = make_left_action(m2, &x, images, tol()).unwrap();
    (x, rho)
}

#[test]
fn induction_from_two_blocks_to_the_matrix_algebra() {
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let blocks = BlockAlgebra::standard(&[2, 1], tol()).unwrap();
    let (_, rho) = two_block_carrier(&m2, &blocks.algebra);
    let v = HilbertModule::over_itself(&m2).unwrap();
    for seed in 0..5 {
        let mut rng = generate::rng(40 + seed);
        let w = generate::block_module_with_carrier(&blocks, &[1, 2], &mut rng, tol()).unwrap();
        let phi = generate::random_module_rep(&blocks, &w, &mut rng, 2, tol()).unwrap();
        let setup = InducedSetup::new(&v, &rho, &phi, tol()).unwrap();
        let ind = induce_module_rep(&setup, tol()).unwrap();
        assert!(ind.inner_product_residual <= 1e-8);
        assert!(ind.norm_excess <= 1e-8);
        assert_eq!(ind.nondegenerate, Some(true));
    }
}

#[test]
fn rank_one_operator_identities() {
    let mut rng = generate::rng(11);
    for seed in 0..50 {
        let g = generate::scenario(seed, tol()).unwrap();
        let v = &g.scenario.v;
        let n = v.dim();
        let (x, y, u, w) = (random_vector(&mut rng, n), random_vector(&mut rng, n), random_vector(&mut rng, n), random_vector(&mut rng, n));
        let t = rank_one(v, &x, &y);
        let adj = v.adjoint_of(&t, tol()).unwrap();
        assert!(frobenius(&(adj - rank_one(v, &y, &x))) < 1e-9 * (1.0 + frobenius(&t)));
        let shifted = v.act(&x, &v.inner(&y, &u)).unwrap();
        let lhs = &t * rank_one(v, &u, &w);
        assert!(frobenius(&(&lhs - rank_one(v, &shifted, &w))) < 1e-9 * (1.0 + frobenius(&lhs)));
    }
}

#[test]
fn inner_product_is_right_linear_and_norm_homogeneous() {
    let mut rng = generate::rng(12);
    for seed in 0..20 {
        let g = generate::scenario(100 + seed, tol()).unwrap();
        let v = &g.scenario.v;
        let (x, y) = (random_vector(&mut rng, v.dim()), random_vector(&mut rng, v.dim()));
        let a = random_element(v.algebra(), &mut rng);
        let lhs = v.inner(&x, &v.act(&y, &a).unwrap());
        let rhs = v.inner(&x, &y).mul(&a).unwrap();
        assert!(frobenius(&(lhs.to_matrix() - rhs.to_matrix())) < 1e-9 * (1.0 + rhs.norm()));
        let lambda = generate::random_complex(&mut rng);
        let scaled = module_norm(v, &(&x * lambda));
        assert!((scaled - lambda.norm() * module_norm(v, &x)).abs() < 1e-9 * (1.0 + scaled));
    }
}

#[test]
fn first_block_ideal_is_not_full() {
    let a = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
    let ideal: Vec<Matrix> = (0..2).flat_map(|r| (0..2).map(move |col| numkit::matrix_unit(3, 3, r, col))).collect();
    let v = HilbertModule::from_matrix_space(&a, ideal, tol()).unwrap();
    assert!(!is_full(&v, tol()));
    assert!(is_full(&HilbertModule::over_itself(&a).unwrap(), tol()));
}

#[test]
fn compacts_of_standard_modules() {
    assert_eq!(compacts(&HilbertModule::hilbert_space(2).unwrap(), tol()).unwrap().dim(), 4);
    let a = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
    assert_eq!(compacts(&HilbertModule::over_itself(&a).unwrap(), tol()).unwrap().dim(), a.dim());
}

#[test]
fn interior_tensor_with_the_algebra_matches_the_module() {
    let g = generate::scenario(21, tol()).unwrap();
    let x = g.scenario.bimodule.right_module();
    let rho = g.scenario.bimodule.left_action();
    let a = rho.algebra();
    let v = HilbertModule::over_itself(a).unwrap();
    let t = interior_tensor(&v, x, rho, tol()).unwrap();
    assert_eq!(t.dim(), x.dim());
    // a_l ⊗ y_i ↦ ρ(a_l) y_i carries the tensor Gram onto the Gram of X
    let (da, dx) = (a.dim(), x.dim());
    let mut m = numkit::zeros(dx, da * dx);
    for l in 0..da {
        for i in 0..dx {
            m.set_column(l * dx + i, &rho.images()[l].column(i));
        }
    }
    let pulled = m.adjoint() * x.trace_gram() * &m;
    assert!(frobenius(&(&pulled - &t.gram)) < 1e-9 * (1.0 + frobenius(&t.gram)));
}

#[test]
fn interior_tensor_drops_the_dead_summand() {
    // M_2 acts on M_2 ⊕ M_1 through the first block only
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let b = CStarAlgebra::block_diagonal(&[2, 1]).unwrap();
    let x = HilbertModule::over_itself(&b).unwrap();
    let images = m2
        .basis()
        .iter()
        .map(|a| {
            let embedded = numkit::block_diag(&[a.clone(), numkit::zeros(1, 1)]);
            let mut m = numkit::zeros(b.dim(), b.dim());
            for (j, e) in b.basis().iter().enumerate() {
                m.set_column(j, &b.coords_of(&(&embedded * e), tol()).unwrap());
            }
            m
        })
        .collect();
    let rho = make_left_action(&m2, &x, images, tol()).unwrap();
    assert!(!rho.is_nondegenerate());
    let v = HilbertModule::over_itself(&m2).unwrap();
    let t = interior_tensor(&v, &x, &rho, tol()).unwrap();
    assert_eq!(t.algebraic_dim, 4 * 5);
    assert_eq!(t.dim(), 4);
}

#[test]
fn dual_of_the_hilbert_space_bimodule_swaps_inner_products() {
    let x = morita::hilbert_space_bimodule(2, tol()).unwrap();
    let d = dual_module(&x, tol()).unwrap().bimodule;
    assert!(d.left_algebra().same_span(x.right_algebra(), tol()));
    assert!(d.right_algebra().same_span(x.left_algebra(), tol()));
    for i in 0..2 {
        for j in 0..2 {
            // <b(e_i), b(e_j)> over K(H) is e_i ⊗ conj(e_j)
            let expected = numkit::matrix_unit(2, 2, i, j);
            let got = d.right_module().gram_element(i, j).to_matrix();
            assert!(frobenius(&(got - expected)) < 1e-12, "({i}, {j})");
            let scalar = d.left_gram_coords(i, j);
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((scalar[0] - c(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn dual_of_the_algebra_bimodule_swaps_inner_products() {
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let x = morita::algebra_bimodule(&m2, tol()).unwrap();
    let d = dual_module(&x, tol()).unwrap().bimodule;
    for i in 0..4 {
        for j in 0..4 {
            assert!((d.right_module().gram_coords(i, j) - x.left_gram_coords(i, j)).norm() < 1e-12);
            assert!((d.left_gram_coords(i, j) - x.right_module().gram_coords(i, j)).norm() < 1e-12);
        }
    }
}

#[test]
fn tampered_representation_fails_the_round_trip() {
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let x = morita::algebra_bimodule(&m2, tol()).unwrap();
    let mut phi = m2_left_multiplication(&m2);
    let w = phi.module().clone();
    phi.images_mut()[1][(0, 0)] += c(0.5, 0.0);
    match roundtrip_verify(&x, &w, &w, &phi, tol()) {
        Err(Error::PostconditionViolation { residual, .. }) => assert!(residual >= 1e-3, "residual {residual}"),
        other => panic!("expected a postcondition violation, got {other:?}"),
    }
}

#[test]
fn transpose_breaks_multiplicativity() {
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let t = StarHomomorphism::new(m2.clone(), 2, m2.basis().iter().map(|m| m.transpose()).collect()).unwrap();
    let report = check_star_hom(&t, tol());
    assert!(!report.passed);
    // E12·E21 = E11 but E12ᵀ·E21ᵀ = E22
    assert!(report.multiplicativity >= 1.0);
}

#[test]
fn irreducible_rep_has_only_trivial_invariant_pairs() {
    let m2 = CStarAlgebra::full_matrix(2).unwrap();
    let r = m2_left_multiplication(&m2);
    assert!(is_irreducible(&r, tol()).unwrap());
    let mut rng = generate::rng(5);
    for _ in 0..20 {
        let p1 = SubspacePair::projection_onto(&Matrix::from_fn(2, 1, |_, _| generate::random_complex(&mut rng)));
        let p2 = SubspacePair::projection_onto(&Matrix::from_fn(2, 1, |_, _| generate::random_complex(&mut rng)));
        let pair = SubspacePair::new(p1, p2, tol()).unwrap();
        assert!(!check_invariant_pair(&r, &pair, tol()));
    }
    let doubled = direct_sum_reps(&[r.clone(), r], tol()).unwrap();
    assert!(!is_irreducible(&doubled, tol()).unwrap());
}

#[test]
fn direct_sums_are_nondegenerate_exactly_when_the_summands_are() {
    for seed in 0..20 {
        let g = generate::scenario(300 + seed, tol()).unwrap();
        let mut rng = generate::rng(seed);
        let good = generate::random_module_rep(&g.right, &g.w, &mut rng, 2, tol()).unwrap();
        let phi = &g.scenario.phi;
        // a zero column in every image leaves a direction of H unreached
        let degenerate = {
            let mut hom = phi.base().hom().clone();
            hom.target_dim += 1;
            hom.images = hom.images.iter().map(|m| numkit::block_diag(&[m.clone(), numkit::zeros(1, 1)])).collect();
            let base = AlgebraRep::new(hom, tol()).unwrap();
            let images = phi.images().iter().map(|m| numkit::block_diag(&[m.clone(), numkit::zeros(0, 1)])).collect();
            ModuleRep::new(phi.module().clone(), base, phi.target_dim(), images).unwrap()
        };
        assert!(!reps::is_nondegenerate(&degenerate, tol()));
        let pick = if seed % 2 == 0 { &good } else { &degenerate };
        let sum = direct_sum_reps(&[phi.clone(), pick.clone()], tol()).unwrap();
        let expected = reps::is_nondegenerate(phi, tol()) && reps::is_nondegenerate(pick, tol());
        assert_eq!(reps::is_nondegenerate(&sum, tol()), expected, "seed {seed}");
        assert!(check_module_rep(&sum, tol()).passed);
    }
}

#[test]
fn conjugated_representations_stay_valid() {
    for seed in 0..10 {
        let g = generate::scenario(400 + seed, tol()).unwrap();
        let mut rng = generate::rng(seed);
        let (r2, u1, u2) = generate::unitary_conjugate(&g.scenario.phi, &mut rng);
        assert!(check_module_rep(&r2, tol()).passed);
        assert!(reps::verify_unitary_equivalence(&g.scenario.phi, &r2, &u1, &u2, tol()).passed);
    }
}

#[test]
fn seeded_scenario_seven_round_trips() {
    let s = generate::scenario(7, tol()).unwrap().scenario;
    let r = roundtrip_verify(&s.bimodule, &s.v, &s.w, &s.phi, tol()).unwrap();
    assert!(r.max_residual() < 1e-9);
}

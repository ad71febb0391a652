use bosesep::bosonic::SymmetricIsometry;
use bosesep::format::{from_json, to_json, StateFile};
use bosesep::linalg::{
    eps_rank, hermitian_eigenvalues, inner, kron, normalized, partial_trace, partial_transpose,
    schmidt_decompose, subtract_in_range, ComplexMatrix, C64, RANK_TOL,
};
use bosesep::rng::{complex_gaussian, random_unit_vector, Seed};
use bosesep::separability::{classify, ppt_check, pt_spectrum, Verdict};
use bosesep::states::{random_rank_r_symmetric, random_symmetric_pure, Basis, StateRecord};
use bosesep::SystemShape;
use proptest::prelude::*;

fn shapes() -> impl Strategy<Value = SystemShape> {
    prop_oneof![
        Just((2, 2)),
        Just((2, 3)),
        Just((3, 2)),
        Just((3, 3)),
        Just((2, 4)),
        Just((4, 2))
    ]
    .prop_map(|(n, k)| SystemShape::new(n, k).unwrap())
}

/// Random density matrix on the full space (not symmetric).
fn random_density(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    let mut rng = Seed::new(seed, 99).rng();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for _ in 0..rank {
        let v = random_unit_vector(&mut rng, dim);
        rho.add_projector(1.0 / rank as f64, &v);
    }
    rho
}

/// Haar-ish unitary from Gram-Schmidt on Gaussian columns.
fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = Seed::new(seed, 7).rng();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
        for c in &cols {
            let p = inner(c, &v);
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
        }
        if let Some(v) = normalized(&v) {
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(n, &cols)
}

fn spectra_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_transpose_is_an_involution(shape in shapes(), seed in any::<u64>(), party in 0usize..4) {
        let party = party % shape.k();
        let rho = random_density(shape.full_dim(), 3, seed);
        let twice = partial_transpose(&partial_transpose(&rho, &shape, &[party]).unwrap(), &shape, &[party]).unwrap();
        prop_assert_eq!(twice, rho);
    }

    #[test]
    fn pt_spectrum_is_invariant_under_local_unitaries(shape in shapes(), seed in any::<u64>()) {
        let rho = random_density(shape.full_dim(), 2, seed);
        let mut u = random_unitary(shape.n(), seed);
        for p in 1..shape.k() {
            u = kron(&u, &random_unitary(shape.n(), seed.wrapping_add(p as u64))).unwrap();
        }
        let rotated = u.matmul(&rho).matmul(&u.adjoint());
        for cut in 0..shape.k() {
            let a = pt_spectrum(&rho, &shape, &[cut]).unwrap();
            let b = pt_spectrum(&rotated, &shape, &[cut]).unwrap();
            prop_assert!(spectra_close(&a, &b, 1e-10), "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn partial_trace_preserves_trace(shape in shapes(), seed in any::<u64>(), mask in 1u32..15) {
        let rho = random_density(shape.full_dim(), 4, seed);
        let parties: Vec<usize> = (0..shape.k()).filter(|p| mask & (1 << p) != 0).collect();
        prop_assume!(!parties.is_empty() && parties.len() < shape.k());
        let reduced = partial_trace(&rho, &shape, &parties).unwrap();
        prop_assert!((reduced.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn schmidt_coefficients_match_reduced_spectrum(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = Seed::new(seed, 3).rng();
        let psi = random_unit_vector(&mut rng, da * db);
        let s = schmidt_decompose(&psi, da, db).unwrap();
        // s_j^2 are the eigenvalues of the reduced state on the first factor
        let reduced = ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|b| psi[i * db + b] * psi[j * db + b].conj()).sum());
        let mut squares: Vec<f64> = s.coefficients.iter().map(|x| x * x).collect();
        squares.sort_by(f64::total_cmp);
        let eig = hermitian_eigenvalues(&reduced).unwrap();
        let top = &eig[eig.len() - squares.len()..];
        prop_assert!(spectra_close(&squares, top, 1e-12));
        let mut rebuilt = vec![C64::new(0.0, 0.0); da * db];
        for j in 0..s.coefficients.len() {
            for a in 0..da {
                for b in 0..db {
                    rebuilt[a * db + b] += s.left[j][a] * s.right[j][b] * s.coefficients[j];
                }
            }
        }
        prop_assert!(rebuilt.iter().zip(&psi).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn subtraction_lowers_rank_by_one(seed in any::<u64>(), dim in 2usize..12, rank_frac in 0.0f64..1.0) {
        let rank = 1 + ((dim - 1) as f64 * rank_frac) as usize;
        let rho = random_density(dim, rank, seed);
        let mut rng = Seed::new(seed, 5).rng();
        // a vector in the range: rho applied to a random vector
        let v = normalized(&rho.mat_vec(&random_unit_vector(&mut rng, dim))).unwrap();
        let sub = subtract_in_range(&rho, &v).unwrap();
        prop_assert_eq!(eps_rank(&sub.residual, RANK_TOL).unwrap(), rank - 1);
        prop_assert!(hermitian_eigenvalues(&sub.residual).unwrap()[0] >= -1e-9);
    }

    #[test]
    fn state_files_round_trip_bit_exactly(shape in shapes(), seed in any::<u64>(), sym in any::<bool>()) {
        let s = random_rank_r_symmetric(shape, 1 + (seed % shape.sym_dim() as u64) as usize, Seed::new(seed, 0)).unwrap();
        let s = s.to_basis(if sym { Basis::Symmetric } else { Basis::Full }).unwrap();
        let text = to_json(&StateFile::from_record(&s)).unwrap();
        let back = from_json::<StateFile>(&text).unwrap().to_record().unwrap();
        prop_assert_eq!(&back.matrix, &s.matrix);
        prop_assert_eq!(to_json(&StateFile::from_record(&back)).unwrap(), text);
    }

    #[test]
    fn compress_expand_round_trip(shape in shapes(), seed in any::<u64>()) {
        let iso = SymmetricIsometry::new(shape).unwrap();
        let s = random_symmetric_pure(shape, Seed::new(seed, 0)).unwrap();
        let sym = iso.compress(&s.matrix).unwrap();
        prop_assert!(iso.expand(&sym).max_abs_diff(&s.matrix) < 1e-14);
    }

    #[test]
    fn npt_states_are_never_called_separable(shape in shapes(), seed in any::<u64>()) {
        let r = 1 + (seed % shape.sym_dim() as u64) as usize;
        let s = random_rank_r_symmetric(shape, r, Seed::new(seed, 1)).unwrap();
        let cuts = ppt_check(&s, None).unwrap();
        let report = classify(&s);
        if cuts.iter().any(|c| !c.passed) {
            prop_assert_eq!(report.verdict, Verdict::EntangledNpt);
        }
    }

    #[test]
    fn symmetric_states_have_equal_pt_spectra_on_every_cut(shape in shapes(), seed in any::<u64>()) {
        let r = 1 + (seed % shape.sym_dim() as u64) as usize;
        let s = random_rank_r_symmetric(shape, r, Seed::new(seed, 2)).unwrap();
        let first = pt_spectrum(&s.matrix, &shape, &[0]).unwrap();
        for p in 1..shape.k() {
            prop_assert!(spectra_close(&first, &pt_spectrum(&s.matrix, &shape, &[p]).unwrap(), 1e-10));
        }
    }
}

#[test]
fn classifying_a_full_basis_file_and_its_symmetric_form_agree() {
    let shape = SystemShape::new(3, 3).unwrap();
    for seed in 0..5 {
        let s = random_rank_r_symmetric(shape, 4 + seed as usize, Seed::new(seed, 0)).unwrap();
        let sym = s.to_basis(Basis::Symmetric).unwrap();
        let (a, b) = (classify(&s), classify(&sym));
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.rank, b.rank);
    }
}

#[test]
fn states_off_the_symmetric_subspace_are_invalid_input() {
    let shape = SystemShape::new(2, 2).unwrap();
    let mut singlet = vec![C64::new(0.0, 0.0); 4];
    singlet[1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    singlet[2] = C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let s = StateRecord::new(
        shape,
        Basis::Full,
        ComplexMatrix::projector(&singlet),
        "singlet",
    )
    .unwrap();
    assert_eq!(classify(&s).verdict, Verdict::InvalidInput);
}

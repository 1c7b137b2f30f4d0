use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use netlogic::linalg::{exact, LinearOperator, Matrix};
use netlogic::{Matrix64, Operator64, Rational, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_like(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix64 {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random matrix, or a product of thin factors when `rank` is given.
fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: Option<usize>) -> Matrix64 {
    match rank {
        None => gaussian_like(rng, rows, cols),
        Some(r) => gaussian_like(rng, rows, r)
            .matmul(&gaussian_like(rng, r, cols))
            .unwrap(),
    }
}

fn to_nalgebra(m: &Matrix64) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn rel(diff: &Matrix64, reference: &Matrix64) -> f64 {
    diff.frobenius_norm() / reference.frobenius_norm().max(f64::MIN_POSITIVE)
}

#[test]
fn penrose_identities_on_seeded_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..60 {
        let rows = rng.gen_range(1..=20);
        let cols = rng.gen_range(1..=30);
        let rank = (case % 3 == 0).then(|| rng.gen_range(1..=rows.min(cols)));
        let a = random_matrix(&mut rng, rows, cols, rank);
        let op = Operator64::new(a.clone()).unwrap();
        let p = op.pseudoinverse().unwrap();
        let p = p.matrix();
        let apa = a.matmul(p).unwrap().matmul(&a).unwrap();
        let pap = p.matmul(&a).unwrap().matmul(p).unwrap();
        assert!(rel(&apa.sub(&a).unwrap(), &a) <= 1e-9, "case {case}");
        assert!(rel(&pap.sub(p).unwrap(), p) <= 1e-9, "case {case}");
        assert!(a.matmul(p).unwrap().asymmetry() <= 1e-9);
        assert!(p.matmul(&a).unwrap().asymmetry() <= 1e-9);
        if let Some(r) = rank {
            assert_eq!(op.rank(), r, "case {case}");
        }
        assert_eq!(op.rank() + op.null_space_basis().dim, cols);
    }
}

#[test]
fn pseudoinverse_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..25 {
        let rows = rng.gen_range(1..=12);
        let cols = rng.gen_range(1..=12);
        let a = random_matrix(&mut rng, rows, cols, None);
        let ours = Operator64::new(a.clone()).unwrap().pseudoinverse().unwrap();
        let theirs = to_nalgebra(&a).pseudo_inverse(1e-12).unwrap();
        for i in 0..cols {
            for j in 0..rows {
                assert_abs_diff_eq!(ours.matrix()[(i, j)], theirs[(i, j)], epsilon = 1e-8);
            }
        }
    }
}

#[test]
fn full_column_rank_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let cols = rng.gen_range(1..=5);
        let rows = cols + rng.gen_range(0..=5);
        let a = random_matrix(&mut rng, rows, cols, None);
        let at = a.transpose();
        let normal = exact::inverse(&at.matmul(&a).unwrap())
            .unwrap()
            .matmul(&at)
            .unwrap();
        let p = Operator64::new(a).unwrap().pseudoinverse().unwrap();
        for (x, y) in p.matrix().data().iter().zip(normal.data()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-9);
        }
    }
}

#[test]
fn svd_and_rational_routes_agree_on_integer_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let rows = rng.gen_range(1..=5);
        let cols = rng.gen_range(1..=5);
        let ints: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-2i64..=2)).collect();
        let q = LinearOperator::new(Matrix::from_fn(rows, cols, |i, j| {
            Rational::from_i64_exact(ints[i * cols + j])
        }))
        .unwrap();
        let f = Operator64::new(Matrix::from_fn(rows, cols, |i, j| {
            ints[i * cols + j] as f64
        }))
        .unwrap();
        assert_eq!(f.rank(), q.rank_exact());
        let pe = q.pseudoinverse_exact().unwrap();
        let pf = f.pseudoinverse().unwrap();
        for (e, s) in pe.matrix().data().iter().zip(pf.matrix().data()) {
            assert_abs_diff_eq!(e.to_f64_lossy(), *s, epsilon = 1e-10);
        }
    }
}

#[test]
fn constructed_rank_three_null_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_matrix(&mut rng, 4, 6, Some(3));
    let op = Operator64::new(a.clone()).unwrap();
    let ns = op.null_space_basis();
    assert_eq!(ns.dim, 3);
    for (i, v) in ns.basis.iter().enumerate() {
        let image = a.mul_vec(v).unwrap();
        assert!(netlogic::linalg::norm2(&image) <= 1e-9);
        for (j, w) in ns.basis.iter().enumerate() {
            let d = netlogic::linalg::dot(v, w);
            assert_abs_diff_eq!(d, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-9);
        }
    }
}

#[test]
fn kernel_shift_is_found_as_alias() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_matrix(&mut rng, 3, 5, Some(2));
    let op = Operator64::new(a).unwrap();
    let v = op.null_space_basis().basis[0].clone();
    let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + b).collect();
    let z: Vec<f64> = x.iter().map(|a| a + 3.0).collect();
    assert_eq!(op.find_alias_pair(&[z, x, y]).unwrap(), Some((1, 2)));
}

#[test]
fn double_pseudoinverse_returns_original() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for case in 0..30 {
        let rows = rng.gen_range(1..=10);
        let cols = rng.gen_range(1..=10);
        let rank = (case % 2 == 0).then(|| rng.gen_range(1..=rows.min(cols)));
        let a = random_matrix(&mut rng, rows, cols, rank);
        let pp = Operator64::new(a.clone())
            .unwrap()
            .pseudoinverse()
            .unwrap()
            .pseudoinverse()
            .unwrap();
        assert!(pp.matrix().sub(&a).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
    }
}

#[test]
fn single_precision_instantiation() {
    let a = Matrix::<f32>::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0], vec![0.0, 0.0]]).unwrap();
    let op = LinearOperator::with_rank_tol(a, 1e-5).unwrap();
    assert_eq!(op.rank(), 2);
    let p = op.pseudoinverse().unwrap();
    assert_abs_diff_eq!(p.matrix()[(0, 0)], 0.5f32, epsilon = 1e-6);
    assert_abs_diff_eq!(p.matrix()[(1, 1)], 0.25f32, epsilon = 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_cols(
        rows in 1usize..7,
        cols in 1usize..7,
        rank in 0usize..7,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rank.min(rows).min(cols);
        let a = if r == 0 { Matrix::zeros(rows, cols) } else { random_matrix(&mut rng, rows, cols, Some(r)) };
        let op = Operator64::new(a).unwrap();
        prop_assert_eq!(op.rank(), r);
        prop_assert_eq!(op.rank() + op.null_space_basis().dim, cols);
    }
}

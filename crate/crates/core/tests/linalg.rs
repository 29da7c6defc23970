use nlkit::linalg::{
    gmres, ilu0, lu_solve, norm_inf, qr_solve, select_linear_solver, svd_solve, CholeskyFactor,
    DenseFactor, LinearSolverChoice, LuFactor, Matrix, PrecondChoice, SelectionTraits, Svd,
};
use nlkit::sparsity::CscMatrix;
use nlkit::{Deadline, Error};
use proptest::prelude::*;

fn residual(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    ax.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

// diagonally dominant, so well conditioned
fn arb_system() -> impl Strategy<Value = (Matrix, Vec<f64>)> {
    (1usize..9).prop_flat_map(|n| {
        (
            proptest::collection::vec(-1.0f64..1.0, n * n),
            proptest::collection::vec(-10.0f64..10.0, n),
        )
            .prop_map(move |(vals, b)| {
                let mut a = Matrix::from_col_major(n, n, vals);
                for i in 0..n {
                    a[(i, i)] += n as f64 + 1.0;
                }
                (a, b)
            })
    })
}

#[test]
fn lu_solves_known_system() {
    let a = Matrix::from_rows(&[&[2.0, 1.0, 1.0], &[4.0, -6.0, 0.0], &[-2.0, 7.0, 2.0]]);
    let x = lu_solve(&a, &[5.0, -2.0, 9.0]).unwrap();
    for (xi, want) in x.iter().zip([1.0, 1.0, 2.0]) {
        assert!((xi - want).abs() < 1e-14);
    }
}

#[test]
fn lu_reports_singular_column() {
    let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
    match LuFactor::new(&a) {
        Err(Error::Singular { column, .. }) => assert_eq!(column, 1),
        other => panic!("expected Singular, got {other:?}"),
    }
}

#[test]
fn lu_transpose_solve() {
    let a = Matrix::from_rows(&[&[3.0, 1.0], &[-1.0, 2.0]]);
    let lu = LuFactor::new(&a).unwrap();
    let b = [1.0, 4.0];
    let x = lu.solve_transpose(&b);
    assert!(residual(&a.transpose(), &x, &b) < 1e-14);
}

#[test]
fn condition_estimate_of_diagonal() {
    let a = Matrix::from_diagonal(&[1.0, 1e-3, 10.0]);
    let c = LuFactor::new(&a).unwrap().cond_estimate();
    assert!((c - 1e4).abs() < 1e-6);
}

#[test]
fn cholesky_rejects_indefinite() {
    let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
    assert!(matches!(
        CholeskyFactor::new(&a),
        Err(Error::NotPositiveDefinite { .. })
    ));
    let spd = Matrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]);
    let x = CholeskyFactor::new(&spd).unwrap().solve(&[2.0, 1.0]);
    assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
}

#[test]
fn svd_gives_minimum_norm_solution_of_singular_system() {
    let a = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let x = svd_solve(&a, &[2.0, 2.0], 1e-12);
    assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    let s = Svd::new(&a);
    let mut sv = s.singular_values().to_vec();
    sv.sort_by(|a, b| b.total_cmp(a));
    assert!((sv[0] - 2.0).abs() < 1e-12 && sv[1].abs() < 1e-12, "{sv:?}");
}

#[test]
fn qr_least_squares_on_tall_matrix() {
    // fit y = c0 + c1 t through (0,1), (1,3), (2,5)
    let a = Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
    let x = qr_solve(&a, &[1.0, 3.0, 5.0]).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
}

#[test]
fn gmres_reaches_exact_solution_in_n_steps() {
    let a = Matrix::from_rows(&[
        &[4.0, 1.0, 0.0, 0.0],
        &[1.0, 3.0, -1.0, 0.0],
        &[0.0, -1.0, 5.0, 2.0],
        &[1.0, 0.0, 2.0, 6.0],
    ]);
    let b = [1.0, 2.0, 3.0, 4.0];
    let out = gmres(&a, &b, 4, None, 1e-12).unwrap();
    assert!(out.converged);
    assert!(out.iterations <= 4);
    assert!(residual(&a, &out.x, &b) < 1e-10);
    assert!(out.history.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

fn laplacian_1d(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            2.5
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        }
    })
}

#[test]
fn ilu0_of_tridiagonal_is_exact() {
    let a = laplacian_1d(30);
    let s = CscMatrix::from_dense(&a);
    let m = ilu0(&s).unwrap();
    let b: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
    let x = m.solve(&b);
    assert!(residual(&a, &x, &b) < 1e-12);
    let out = gmres(&s, &b, 5, Some(&m), 1e-12).unwrap();
    assert!(out.converged && out.iterations <= 2);
}

#[test]
fn ilu0_zero_pivot() {
    let a = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    assert!(matches!(
        ilu0(&CscMatrix::from_dense(&a)),
        Err(Error::ZeroPivot { row: 0 })
    ));
}

#[test]
fn auto_factor_falls_back_on_singular() {
    let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
    let f = DenseFactor::auto(&a, Deadline::NONE).unwrap();
    let x = f.solve(&[1.0, 2.0]);
    assert!(residual(&a, &x, &[1.0, 2.0]) < 1e-12);
}

#[test]
fn selection_rules() {
    assert!(select_linear_solver(&SelectionTraits::matrix_free(50)).is_krylov());
    assert_eq!(
        select_linear_solver(&SelectionTraits::dense(50)),
        LinearSolverChoice::Lu
    );
    let spd = SelectionTraits {
        is_symmetric: true,
        is_posdef: true,
        ..SelectionTraits::dense(5)
    };
    assert_eq!(select_linear_solver(&spd), LinearSolverChoice::Cholesky);
    let sparse = SelectionTraits {
        is_sparse: true,
        density: 0.001,
        ..SelectionTraits::dense(5000)
    };
    assert_eq!(
        select_linear_solver(&sparse),
        LinearSolverChoice::Gmres {
            krylov_dim: None,
            precond: Some(PrecondChoice::Ilu0)
        }
    );
    let bad = SelectionTraits {
        cond_estimate: Some(1e12),
        ..SelectionTraits::dense(5)
    };
    assert_eq!(select_linear_solver(&bad), LinearSolverChoice::Svd);
}

proptest! {
    #[test]
    fn factorizations_agree((a, b) in arb_system()) {
        let scale = 1.0 + norm_inf(&b);
        let x_lu = lu_solve(&a, &b).unwrap();
        prop_assert!(residual(&a, &x_lu, &b) <= 1e-11 * scale);
        let x_qr = qr_solve(&a, &b).unwrap();
        let x_svd = svd_solve(&a, &b, 1e-14);
        for i in 0..b.len() {
            prop_assert!((x_qr[i] - x_lu[i]).abs() <= 1e-10 * scale);
            prop_assert!((x_svd[i] - x_lu[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn gmres_full_dimension_matches_lu((a, b) in arb_system()) {
        let n = b.len();
        let out = gmres(&a, &b, n, None, 1e-13).unwrap();
        let x_lu = lu_solve(&a, &b).unwrap();
        for i in 0..n {
            prop_assert!((out.x[i] - x_lu[i]).abs() <= 1e-8 * (1.0 + norm_inf(&x_lu)));
        }
    }

    #[test]
    fn cholesky_on_gram_matrices((a, b) in arb_system()) {
        let g = a.gram();
        let x = CholeskyFactor::new(&g).unwrap().solve(&b);
        prop_assert!(residual(&g, &x, &b) <= 1e-9 * (1.0 + norm_inf(&b)) * g.norm_inf());
    }
}

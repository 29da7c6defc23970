use nlkit::autodiff::{dense_jacobian, DiffMode};
use nlkit::linalg::Matrix;
use nlkit::problems::brusselator_2d;
use nlkit::sparsity::{
    color_greedy, compressed_jacobian, detect_pattern_approx, ColorAxis, CscMatrix, SparsityPattern,
};
use nlkit::{Problem, ResidualFn, Scalar};
use proptest::prelude::*;

fn five_by_five() -> SparsityPattern {
    SparsityPattern::new(
        5,
        5,
        [
            (0, 0),
            (1, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (3, 1),
            (3, 4),
            (4, 4),
        ],
    )
    .unwrap()
}

#[test]
fn five_by_five_column_coloring() {
    let c = color_greedy(&five_by_five(), ColorAxis::Columns);
    assert_eq!(c.num_colors, 3);
    assert_eq!(c.color_of, vec![1, 2, 1, 1, 3]);
    assert_eq!(c.classes(), vec![vec![0, 2, 3], vec![1], vec![4]]);
}

#[test]
fn five_by_five_row_coloring() {
    let c = color_greedy(&five_by_five(), ColorAxis::Rows);
    assert_eq!(c.num_colors, 2);
    assert_eq!(c.classes(), vec![vec![0, 1, 2, 4], vec![3]]);
}

#[test]
fn diagonal_needs_one_color_and_dense_needs_n() {
    let d = color_greedy(&SparsityPattern::diagonal(7), ColorAxis::Columns);
    assert_eq!(d.num_colors, 1);
    let f = color_greedy(&SparsityPattern::dense(4, 4), ColorAxis::Columns);
    assert_eq!(f.num_colors, 4);
}

#[test]
fn pattern_rejects_out_of_range_entries() {
    assert!(SparsityPattern::new(2, 2, [(0, 2)]).is_err());
}

#[test]
fn pattern_text_round_trip() {
    let p = five_by_five();
    let back = SparsityPattern::from_text(&p.to_text()).unwrap();
    assert_eq!(back, p);
}

fn masked_diff(sparse: &CscMatrix, dense: &Matrix, pattern: &SparsityPattern) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..dense.ncols() {
        for i in 0..dense.nrows() {
            let want = if pattern.contains(i, j) {
                dense[(i, j)]
            } else {
                0.0
            };
            worst = worst.max((sparse.get(i, j) - want).abs());
        }
    }
    worst
}

#[test]
fn colored_brusselator_jacobian_matches_dense() {
    for n in [4, 8, 16] {
        let d = brusselator_2d(n).unwrap();
        let pr = &d.problem;
        let pattern = pr.known_pattern().unwrap();
        let coloring = color_greedy(pattern, ColorAxis::Columns);
        assert!(coloring.is_valid_for(pattern));
        assert!(coloring.num_colors < 2 * n * n);
        let sparse = compressed_jacobian(
            pr.residual_fn(),
            &pr.u0,
            &pr.params,
            pattern,
            &coloring,
            DiffMode::DualForward,
        )
        .unwrap();
        let dense =
            dense_jacobian(pr.residual_fn(), &pr.u0, &pr.params, DiffMode::DualForward).unwrap();
        assert!(masked_diff(&sparse, &dense, pattern) <= 1e-10, "N={n}");
    }
}

#[test]
fn row_colored_jacobian_matches_dense() {
    let d = brusselator_2d(4).unwrap();
    let pr = &d.problem;
    let pattern = pr.known_pattern().unwrap();
    let coloring = color_greedy(pattern, ColorAxis::Rows);
    let sparse = compressed_jacobian(
        pr.residual_fn(),
        &pr.u0,
        &pr.params,
        pattern,
        &coloring,
        DiffMode::DualForward,
    )
    .unwrap();
    let dense =
        dense_jacobian(pr.residual_fn(), &pr.u0, &pr.params, DiffMode::DualForward).unwrap();
    assert!(masked_diff(&sparse, &dense, pattern) <= 1e-10);
}

struct Tridiagonal;

impl ResidualFn for Tridiagonal {
    fn eval<T: Scalar>(&self, u: &[T], _: &[T], out: &mut [T]) {
        let n = u.len();
        for i in 0..n {
            let mut r = u[i] * u[i] * 3.0;
            if i > 0 {
                r = r - u[i - 1];
            }
            if i + 1 < n {
                r = r - u[i + 1] * 2.0;
            }
            out[i] = r + 1.0;
        }
    }
}

#[test]
fn detection_finds_tridiagonal_structure() {
    let n = 9;
    let pr = Problem::new(Tridiagonal, vec![0.5; n], vec![]);
    let found = detect_pattern_approx(&pr, 3, 7).unwrap();
    assert_eq!(found.nnz(), 3 * n - 2);
    for i in 0..n {
        assert!(found.contains(i, i));
        if i > 0 {
            assert!(found.contains(i, i - 1) && found.contains(i - 1, i));
        }
    }
    assert_eq!(color_greedy(&found, ColorAxis::Columns).num_colors, 3);
}

#[test]
fn csc_round_trip_and_products() {
    let a = Matrix::from_rows(&[&[1.0, 0.0, 2.0], &[0.0, 3.0, 0.0], &[4.0, 0.0, 5.0]]);
    let s = CscMatrix::from_dense(&a);
    assert_eq!(s.nnz(), 5);
    assert_eq!(s.to_dense(), a);
    let x = [1.0, -1.0, 2.0];
    assert_eq!(s.matvec(&x), a.matvec(&x));
    assert_eq!(s.tr_matvec(&x), a.tr_matvec(&x));
    assert_eq!(s.transpose().to_dense(), a.transpose());
}

fn arb_pattern() -> impl Strategy<Value = SparsityPattern> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |pairs| SparsityPattern::new(n, n, pairs).unwrap())
    })
}

proptest! {
    #[test]
    fn greedy_colorings_are_valid(p in arb_pattern()) {
        let c = color_greedy(&p, ColorAxis::Columns);
        prop_assert!(c.is_valid_for(&p));
        prop_assert!(c.num_colors <= p.n_cols());
        let r = color_greedy(&p, ColorAxis::Rows);
        prop_assert!(r.is_valid_for(&p));
    }
}

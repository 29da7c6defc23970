use std::collections::HashSet;

use nlkit::autodiff::{dense_jacobian, DiffMode};
use nlkit::linalg::norm_inf;
use nlkit::problems::{
    brusselator_2d, generalized_rosenbrock, quadratic, test23, Tag, TEST23_NAMES,
};
use nlkit::sparsity::detect_pattern_approx;
use nlkit::{list_problems, lookup, Error};

#[test]
fn reference_solutions_are_roots() {
    for d in list_problems() {
        if let Some(r) = &d.reference_solution {
            let res = norm_inf(&d.problem.eval(r));
            assert!(res <= 1e-10, "{}: {res:e}", d.id);
        }
    }
}

#[test]
fn suite_has_23_members_with_references() {
    for (i, name) in TEST23_NAMES.iter().enumerate() {
        let d = test23(i + 1).unwrap();
        assert_eq!(&d.name, name);
        assert_eq!(d.id, format!("test23/{name}"));
        assert!(d.reference_solution.is_some());
        assert_eq!(d.problem.eval(&d.problem.u0).len(), d.n);
    }
    assert!(test23(0).is_err());
    assert!(test23(24).is_err());
}

#[test]
fn ids_are_unique_and_resolvable() {
    let all = list_problems();
    let ids: HashSet<_> = all.iter().map(|d| d.id.clone()).collect();
    assert_eq!(ids.len(), all.len());
    for d in &all {
        assert_eq!(lookup(&d.id).unwrap().id, d.id);
    }
    assert!(matches!(
        lookup("test23/nope"),
        Err(Error::UnknownProblem(_))
    ));
    assert!(matches!(lookup("nope"), Err(Error::UnknownProblem(_))));
    assert_eq!(lookup("brusselator2d?N=32").unwrap().n, 2 * 32 * 32);
    assert_eq!(lookup("generalized_rosenbrock?N=7").unwrap().n, 7);
    assert!(lookup("brusselator2d?M=3").is_err());
}

#[test]
fn classical_starts_and_roots() {
    let rb = test23(1).unwrap();
    assert_eq!(rb.problem.u0, vec![-1.2, 1.0]);
    assert_eq!(norm_inf(&rb.problem.eval(&[1.0, 1.0])), 0.0);
    let ps = test23(2).unwrap();
    assert_eq!(norm_inf(&ps.problem.eval(&[0.0; 4])), 0.0);
    assert!(ps.has_tag(Tag::IllConditioned));
}

#[test]
fn generalized_rosenbrock_jacobian() {
    let d = generalized_rosenbrock(3).unwrap();
    let j = dense_jacobian(
        d.problem.residual_fn(),
        &[1.0; 3],
        &[],
        DiffMode::DualForward,
    )
    .unwrap();
    let want = [[-1.0, 0.0, 0.0], [-20.0, 10.0, 0.0], [0.0, -20.0, 10.0]];
    for i in 0..3 {
        for k in 0..3 {
            assert_eq!(j[(i, k)], want[i][k]);
        }
    }
    let big = generalized_rosenbrock(12).unwrap();
    let u: Vec<f64> = (0..12).map(|i| 0.3 * i as f64 - 1.0).collect();
    let j = dense_jacobian(big.problem.residual_fn(), &u, &[], DiffMode::DualForward).unwrap();
    let pat = big.problem.known_pattern().unwrap();
    for i in 0..12 {
        for k in 0..12 {
            if j[(i, k)] != 0.0 {
                assert!(k == i || k + 1 == i, "({i},{k})");
                assert!(pat.contains(i, k));
            }
        }
    }
    assert!(generalized_rosenbrock(1).is_err());
}

#[test]
fn brusselator_known_pattern_covers_detected() {
    let d = brusselator_2d(5).unwrap();
    let known = d.problem.known_pattern().unwrap();
    let found = detect_pattern_approx(&d.problem, 3, 1).unwrap();
    for (i, k) in found.iter() {
        assert!(known.contains(i, k), "({i},{k})");
    }
    // 5-point stencil per species plus the u/v coupling
    assert_eq!(known.nnz(), 2 * 25 * 6);
    assert!(d.has_tag(Tag::Sparse));
    assert!(brusselator_2d(2).is_err());
}

#[test]
fn quadratic_reference() {
    let d = quadratic(&[4.0, 9.0]).unwrap();
    assert_eq!(d.reference_solution, Some(vec![2.0, 3.0]));
    assert!(quadratic(&[-1.0]).is_err());
}

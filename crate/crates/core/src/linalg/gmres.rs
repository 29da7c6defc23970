use super::dense::{axpy, dot, norm2};
use super::operator::{LinearOperator, Preconditioner};
use crate::{Error, Result};

/// Outcome of a single non-restarted GMRES cycle.
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    /// Final preconditioned residual relative to the preconditioned rhs.
    pub rel_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative preconditioned residual after each iteration (index 0 = start).
    pub history: Vec<f64>,
}

/// Left-preconditioned GMRES from a zero initial guess.
///
/// Runs at most `krylov_dim` Arnoldi steps (modified Gram-Schmidt) without
/// restarting and solves the Hessenberg least-squares problem with Givens
/// rotations. The iterate minimizing `‖M⁻¹(b − A·x)‖` over the Krylov space
/// is returned even when `reltol` is not reached.
pub fn gmres(
    op: &dyn LinearOperator,
    b: &[f64],
    krylov_dim: usize,
    precond: Option<&dyn Preconditioner>,
    reltol: f64,
) -> Result<GmresOutcome> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if krylov_dim == 0 {
        return Err(Error::InvalidArgument(
            "krylov_dim must be at least 1".into(),
        ));
    }
    let m = krylov_dim.min(n.max(1));
    let precondition = |v: Vec<f64>| match precond {
        Some(p) => p.apply_inverse(&v),
        None => v,
    };

    let r0 = precondition(b.to_vec());
    let beta = norm2(&r0);
    if !beta.is_finite() {
        return Err(Error::NonFinite("GMRES right-hand side"));
    }
    if beta == 0.0 {
        return Ok(GmresOutcome {
            x: vec![0.0; n],
            rel_residual: 0.0,
            iterations: 0,
            converged: true,
            history: vec![0.0],
        });
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(r0.iter().map(|v| v / beta).collect());
    // column-wise upper Hessenberg after rotation (R factor)
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs: Vec<f64> = Vec::with_capacity(m);
    let mut sn: Vec<f64> = Vec::with_capacity(m);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    let mut history = vec![1.0];
    let mut av = vec![0.0; n];
    let mut converged = false;
    let mut k = 0;

    while k < m {
        op.apply(&basis[k], &mut av);
        let mut w = precondition(av.clone());
        let w_norm0 = norm2(&w);
        let mut h = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            h[i] = hij;
            axpy(-hij, v, &mut w);
        }
        let hnext = norm2(&w);
        h[k + 1] = hnext;
        if !hnext.is_finite() || h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GMRES Arnoldi vector"));
        }

        for i in 0..k {
            let (a, bb) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * bb;
            h[i + 1] = -sn[i] * a + cs[i] * bb;
        }
        let (a, bb) = (h[k], h[k + 1]);
        let rho = a.hypot(bb);
        let (c, s) = if rho == 0.0 {
            (1.0, 0.0)
        } else {
            (a / rho, bb / rho)
        };
        cs.push(c);
        sn.push(s);
        h[k] = rho;
        h.truncate(k + 1);
        g[k + 1] = -s * g[k];
        g[k] *= c;
        r.push(h);
        k += 1;

        let rel = g[k].abs() / beta;
        history.push(rel);
        let happy = hnext <= 1e-14 * w_norm0.max(f64::MIN_POSITIVE);
        if rel <= reltol {
            converged = true;
            break;
        }
        if happy {
            if rho == 0.0 {
                return Err(Error::Breakdown { iterations: k });
            }
            converged = true;
            break;
        }
        if k < m {
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
    }

    // back substitution on the k×k triangular system
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= r[j][i] * y[j];
        }
        if r[i][i] == 0.0 {
            return Err(Error::Breakdown { iterations: k });
        }
        y[i] = s / r[i][i];
    }
    let mut x = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        axpy(*yi, v, &mut x);
    }
    Ok(GmresOutcome {
        x,
        rel_residual: *history.last().unwrap(),
        iterations: k,
        converged,
        history,
    })
}

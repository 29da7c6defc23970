use super::coloring::{ColorAxis, Coloring};
use super::csc::CscMatrix;
use super::pattern::SparsityPattern;
use crate::autodiff::{jvp, DiffMode, Dual, CHUNK};
use crate::linalg::norm_inf;
use crate::problem::Residual;
use crate::{Error, Result};

/// Sparse Jacobian from one compressed product per color.
///
/// Column colorings seed `Σ e_j` over each color class and decompress row
/// `i` of the product into the unique structural same-colored column. Row
/// colorings form `vᵀJ` for `v = Σ e_i` over each class; without a reverse
/// sweep that product is accumulated from forward sweeps over the columns
/// the class touches.
pub fn compressed_jacobian(
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    pattern: &SparsityPattern,
    coloring: &Coloring,
    mode: DiffMode,
) -> Result<CscMatrix> {
    let n = u.len();
    if pattern.n_rows() != n || pattern.n_cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pattern.n_cols(),
        });
    }
    let mut jac = CscMatrix::from_pattern(pattern);
    match coloring.axis {
        ColorAxis::Columns => {
            check_columns(pattern, coloring)?;
            let products = column_products(f, u, p, coloring, mode)?;
            fill_from_columns(&mut jac, coloring, &products);
        }
        ColorAxis::Rows => {
            check_rows(pattern, coloring)?;
            let classes = coloring.classes();
            let rows = pattern.rows();
            let cols_of_rows = pattern.columns();
            for class in &classes {
                let mut touched: Vec<usize> = class
                    .iter()
                    .flat_map(|&i| rows[i].iter().copied())
                    .collect();
                touched.sort_unstable();
                touched.dedup();
                let mut weights = vec![0.0; n];
                for &i in class {
                    weights[i] = 1.0;
                }
                let row = weighted_row(f, u, p, &weights, &touched, mode)?;
                for (&j, &val) in touched.iter().zip(&row) {
                    for &i in &cols_of_rows[j] {
                        if coloring.color_of[i] == coloring.color_of[class[0]] {
                            let k = jac.position(i, j).expect("structural entry");
                            jac.values_mut()[k] = val;
                        }
                    }
                }
            }
        }
    }
    if !jac.is_finite() {
        return Err(Error::NonFinite("sparse Jacobian"));
    }
    Ok(jac)
}

fn check_columns(pattern: &SparsityPattern, coloring: &Coloring) -> Result<()> {
    if coloring.color_of.len() != pattern.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: pattern.n_cols(),
            found: coloring.color_of.len(),
        });
    }
    for (row, cols) in pattern.rows().iter().enumerate() {
        let mut owner = vec![usize::MAX; coloring.num_colors + 1];
        for &j in cols {
            let c = coloring.color_of[j];
            if owner[c] != usize::MAX {
                return Err(Error::DecompressionConflict {
                    row,
                    first: owner[c],
                    second: j,
                });
            }
            owner[c] = j;
        }
    }
    Ok(())
}

fn check_rows(pattern: &SparsityPattern, coloring: &Coloring) -> Result<()> {
    if coloring.color_of.len() != pattern.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: pattern.n_rows(),
            found: coloring.color_of.len(),
        });
    }
    for (col, rows) in pattern.columns().iter().enumerate() {
        let mut owner = vec![usize::MAX; coloring.num_colors + 1];
        for &i in rows {
            let c = coloring.color_of[i];
            if owner[c] != usize::MAX {
                // reported with row/column roles swapped
                return Err(Error::DecompressionConflict {
                    row: col,
                    first: owner[c],
                    second: i,
                });
            }
            owner[c] = i;
        }
    }
    Ok(())
}

// One compressed column `J·Σ_{color(j)=c} e_j` per color; dual mode packs
// up to CHUNK colors into a single evaluation.
fn column_products(
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    coloring: &Coloring,
    mode: DiffMode,
) -> Result<Vec<Vec<f64>>> {
    let n = u.len();
    let nc = coloring.num_colors;
    let mut products = vec![vec![0.0; n]; nc];
    match mode {
        DiffMode::DualForward => {
            let pd: Vec<Dual<CHUNK>> = p.iter().map(|&x| Dual::constant(x)).collect();
            let mut out = vec![Dual::constant(0.0); n];
            for start in (0..nc).step_by(CHUNK) {
                let ud: Vec<Dual<CHUNK>> = u
                    .iter()
                    .zip(&coloring.color_of)
                    .map(|(&x, &c)| {
                        let k = c - 1;
                        if (start..start + CHUNK).contains(&k) {
                            Dual::variable(x, k - start)
                        } else {
                            Dual::constant(x)
                        }
                    })
                    .collect();
                f.eval_dual(&ud, &pd, &mut out)?;
                for k in start..(start + CHUNK).min(nc) {
                    for (dst, o) in products[k].iter_mut().zip(&out) {
                        *dst = o.partials[k - start];
                    }
                }
            }
        }
        _ => {
            for (k, product) in products.iter_mut().enumerate() {
                let seed: Vec<f64> = coloring
                    .color_of
                    .iter()
                    .map(|&c| if c == k + 1 { 1.0 } else { 0.0 })
                    .collect();
                *product = jvp(f, u, p, &seed, mode)?;
            }
        }
    }
    Ok(products)
}

fn fill_from_columns(jac: &mut CscMatrix, coloring: &Coloring, products: &[Vec<f64>]) {
    let col_ptr = jac.col_ptr().to_vec();
    let row_idx = jac.row_idx().to_vec();
    let values = jac.values_mut();
    for j in 0..col_ptr.len() - 1 {
        let product = &products[coloring.color_of[j] - 1];
        for k in col_ptr[j]..col_ptr[j + 1] {
            values[k] = product[row_idx[k]];
        }
    }
}

// Entries `j ∈ cols` of `wᵀ·J`, CHUNK columns per dual sweep.
fn weighted_row(
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    w: &[f64],
    cols: &[usize],
    mode: DiffMode,
) -> Result<Vec<f64>> {
    let n = u.len();
    let mut row = Vec::with_capacity(cols.len());
    match mode {
        DiffMode::DualForward => {
            let pd: Vec<Dual<CHUNK>> = p.iter().map(|&x| Dual::constant(x)).collect();
            let mut ud: Vec<Dual<CHUNK>> = u.iter().map(|&x| Dual::constant(x)).collect();
            let mut out = vec![Dual::constant(0.0); n];
            for chunk in cols.chunks(CHUNK) {
                for (k, &j) in chunk.iter().enumerate() {
                    ud[j] = Dual::variable(u[j], k);
                }
                f.eval_dual(&ud, &pd, &mut out)?;
                for k in 0..chunk.len() {
                    row.push(out.iter().zip(w).map(|(o, wi)| o.partials[k] * wi).sum());
                }
                for &j in chunk {
                    ud[j] = Dual::constant(u[j]);
                }
            }
        }
        _ => {
            let mut e = vec![0.0; n];
            for &j in cols {
                e[j] = 1.0;
                let col = jvp(f, u, p, &e, mode)?;
                row.push(col.iter().zip(w).map(|(c, wi)| c * wi).sum());
                e[j] = 0.0;
            }
        }
    }
    if norm_inf(&row).is_nan() {
        return Err(Error::NonFinite("sparse Jacobian"));
    }
    Ok(row)
}

//! Dense symmetric eigensolver (Householder tridiagonalization followed by
//! implicit QL with Wilkinson shifts) and a couple of Hermitian helpers built
//! on top of it through the real 2n×2n embedding.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of a real symmetric matrix.
///
/// `values` are ascending; column `j` of `vectors` belongs to `values[j]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Diagonalize a real symmetric matrix.
///
/// Only the lower triangle is read. Returns an error (never garbage) if the
/// QL iteration fails to deflate an eigenvalue.
pub fn symmetric_eig(matrix: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Eigen(format!(
            "matrix is {}x{}, expected square",
            n,
            matrix.ncols()
        )));
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }

    let mut v = DMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            matrix[(i, j)]
        } else {
            matrix[(j, i)]
        }
    });
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors })
}

// Householder reduction to tridiagonal form, accumulating the orthogonal
// transform in `v`. On exit `d` holds the diagonal and `e[1..]` the
// sub-diagonal.
fn tridiagonalize(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn ql_implicit(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::Eigen(format!(
                        "QL iteration did not deflate eigenvalue {l} after {MAX_QL_SWEEPS} sweeps \
                         (residual off-diagonal {:.3e})",
                        e[l].abs()
                    )));
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[(l + 2)..n].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (mut left, mut right) = v.columns_range_pair_mut(i, i + 1);
                    for (vi, vi1) in left.iter_mut().zip(right.iter_mut()) {
                        let hk = *vi1;
                        *vi1 = s * *vi + c * hk;
                        *vi = c * *vi - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
fn embed(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let eig = symmetric_eig(&embed(h))?;
    // every eigenvalue of the embedding appears twice
    Ok(eig
        .values
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

/// `f(H)` for a Hermitian `H`, with `f` applied to its eigenvalues.
pub fn hermitian_function<F: Fn(f64) -> f64>(
    h: &DMatrix<Complex64>,
    f: F,
) -> Result<DMatrix<Complex64>> {
    let n = h.nrows();
    let eig = symmetric_eig(&embed(h))?;
    let fv: Vec<f64> = eig.values.iter().map(|&x| f(x)).collect();
    let q = &eig.vectors;
    let m = 2 * n;
    let real = DMatrix::from_fn(m, m, |i, j| {
        (0..m).map(|k| q[(i, k)] * fv[k] * q[(j, k)]).sum::<f64>()
    });
    Ok(DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(real[(i, j)], real[(i + n, j)])
    }))
}

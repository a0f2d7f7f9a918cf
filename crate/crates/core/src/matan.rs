//! Small dense matrix analysis: eigenvalues, Hurwitz tests, the continuous
//! Lyapunov equation and norms.
//!
//! Storage is [`nalgebra::DMatrix`]. The nonsymmetric eigenvalue solver is
//! implemented here (balancing, Householder reduction to upper Hessenberg
//! form, Francis double-shift QR); symmetric eigenproblems and the dense LU
//! solve are delegated to nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

pub const MAX_DIM: usize = 64;
const MAX_ITERS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of a real square matrix, with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.eigenvalues.iter()
    }
}

fn check_square(a: &DenseMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Diagonal similarity scaling so that row and column norms are comparable.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x = a.view((k + 1, k), (n - k - 1, 1)).clone_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = DVector::from_column_slice(x.as_slice());
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        v /= vnorm;
        // A ← H A H with H = I − 2vvᵀ acting on rows/cols k+1..n.
        for j in 0..n {
            let mut dot = 0.0;
            for (i, vi) in v.iter().enumerate() {
                dot += vi * a[(k + 1 + i, j)];
            }
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= 2.0 * vi * dot;
            }
        }
        for i in 0..n {
            let mut dot = 0.0;
            for (j, vj) in v.iter().enumerate() {
                dot += a[(i, k + 1 + j)] * vj;
            }
            for (j, vj) in v.iter().enumerate() {
                a[(i, k + 1 + j)] -= 2.0 * dot * vj;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
#[allow(clippy::many_single_char_names)]
fn hqr(a: &mut DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let mut wr = vec![Complex64::new(0.0, 0.0); n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Look for a single small subdiagonal element.
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = Complex64::new(x + z, 0.0);
                    wr[nu] = Complex64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    wr[nu] = Complex64::new(x + p, -z);
                    wr[nu - 1] = wr[nu].conj();
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { iterations: its });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            let mut z;
            let (mut p, mut q, mut r);
            loop {
                z = a[(m, m)];
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - r - s0;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[(i + 2, i)] = 0.0;
                if i != m {
                    a[(i + 2, i - 1)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = 0.0;
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            p += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= p * z;
                        }
                        a[(k + 1, j)] -= p * y;
                        a[(k, j)] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            p += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= p * r;
                        }
                        a[(i, k + 1)] -= p * q;
                        a[(i, k)] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr)
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Spectrum> {
    let n = check_square(a)?;
    if n > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "matrix dimension {n} exceeds {MAX_DIM}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let eigenvalues = hqr(&mut h)?;
    Ok(Spectrum { eigenvalues })
}

/// Default stability margin `1e-9·‖A‖`.
pub fn default_margin(a: &DenseMatrix) -> f64 {
    1e-9 * spectral_norm(a)
}

/// True iff every eigenvalue has real part below `−margin`.
/// `None` selects [`default_margin`].
pub fn is_hurwitz(a: &DenseMatrix, margin: Option<f64>) -> Result<bool> {
    let margin = margin.unwrap_or_else(|| default_margin(a));
    Ok(eigenvalues(a)?.max_real() < -margin)
}

/// Solves `P A + Aᵀ P = −I` for symmetric positive-definite `P`.
///
/// Uses the Kronecker form `(Aᵀ⊗I + I⊗Aᵀ) vec(P) = −vec(I)` and symmetrizes
/// the result.
pub fn solve_lyapunov(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = check_square(a)?;
    let spectrum = eigenvalues(a)?;
    let max_real = spectrum.max_real();
    if max_real >= 0.0 {
        return Err(Error::NotHurwitz { max_real });
    }
    let eye = DenseMatrix::identity(n, n);
    let at = a.transpose();
    let k = at.kronecker(&eye) + eye.kronecker(&at);
    let rhs = DVector::from_column_slice((-&eye).as_slice());
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator".into()))?;
    let p = DenseMatrix::from_column_slice(n, n, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

/// Largest singular value.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = a.transpose() * a;
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues.max().max(0.0).sqrt()
}

/// Minimum eigenvalue of a symmetric matrix (input is symmetrized first).
pub fn min_eig_sym(s: &DenseMatrix) -> Result<f64> {
    let n = check_square(s)?;
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let asym = spectral_norm(&(s - s.transpose()));
    if asym > 1e-9 * spectral_norm(s) {
        return Err(Error::Domain(format!(
            "matrix is not symmetric (‖S − Sᵀ‖ = {asym:e})"
        )));
    }
    let sym = (s + s.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.min())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn eig_sym(s: &DenseMatrix) -> Result<Vec<f64>> {
    check_square(s)?;
    let sym = (s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

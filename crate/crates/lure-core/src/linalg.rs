//! Dense linear-algebra helpers shared by the other modules.
//!
//! Everything is computed over `Complex<f64>`; real data is promoted at
//! construction time. Numerical ranks use singular values with the
//! threshold `max_dim * sigma_max * RANK_EPS`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Relative singular-value cutoff for numerical ranks.
pub const RANK_EPS: f64 = 1e-12;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

pub fn vec_to_complex(v: &RVec) -> CVec {
    v.map(|x| C64::new(x, 0.0))
}

/// Largest imaginary magnitude over all entries.
pub fn max_imag(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.im.abs()))
}

pub fn real_part(a: &CMat) -> RMat {
    a.map(|z| z.re)
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm.
pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian part (A + A*)/2.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5)
}

/// Eigenvalues of a general square complex matrix via the Schur form.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues: {}x{} is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite("eigenvalues".into()));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = a
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenvalueFailure("Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::EigenvalueFailure("Schur form yielded no eigenvalues".into()))?;
    Ok(eig.iter().cloned().collect())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitian_part(a);
    let mut eig: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

pub fn hermitian_max_eig(a: &CMat) -> f64 {
    hermitian_eigenvalues(a)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn hermitian_min_eig(a: &CMat) -> f64 {
    hermitian_eigenvalues(a)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    a.clone().svd(false, false).singular_values.iter().cloned().collect()
}

/// Numerical rank with the default threshold.
pub fn rank(a: &CMat) -> usize {
    let sv = singular_values(a);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = a.nrows().max(a.ncols()) as f64 * smax * RANK_EPS;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis of the (right) kernel, columns of the result.
///
/// The input is padded with zero rows when wide so the thin SVD still
/// exposes every kernel direction.
pub fn null_space(a: &CMat) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let mut work = a.clone();
    let rows = work.nrows();
    if rows < n {
        work = work.insert_rows(rows, n - rows, C64::new(0.0, 0.0));
    }
    let svd = work.clone().svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = work.nrows().max(n) as f64 * smax * RANK_EPS;
    let mut cols: Vec<CVec> = Vec::new();
    for i in 0..vt.nrows() {
        let s = if i < sv.len() { sv[i] } else { 0.0 };
        if s <= tol {
            cols.push(vt.row(i).adjoint());
        }
    }
    if cols.is_empty() {
        return CMat::zeros(n, 0);
    }
    CMat::from_columns(&cols)
}

/// Moore-Penrose pseudo-inverse.
pub fn pinv(a: &CMat) -> CMat {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMat::zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = a.nrows().max(a.ncols()) as f64 * smax * RANK_EPS;
    svd.pseudo_inverse(tol).expect("pseudo_inverse with nonnegative epsilon")
}

/// Solves (s I - A) X = B.
pub fn resolvent_apply(a: &CMat, s: C64, b: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let m = CMat::identity(n, n) * s - a;
    m.lu()
        .solve(b)
        .ok_or_else(|| Error::EigenvalueFailure(format!("resolvent singular at s = {s}")))
}

/// 2-norm condition number.
pub fn condition_number(a: &CMat) -> f64 {
    let sv = singular_values(a);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Spectral (2-)norm.
pub fn spectral_norm(a: &CMat) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

/// Matrix power by repeated multiplication (small exponents only).
pub fn mat_pow(a: &CMat, k: usize) -> CMat {
    let n = a.nrows();
    let mut out = CMat::identity(n, n);
    for _ in 0..k {
        out = &out * a;
    }
    out
}

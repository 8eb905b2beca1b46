//! LTI system representation, stability predicates, feedback transforms,
//! and the constructive zero-dynamics algorithm.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigenvalues, mat_pow, null_space, pinv, rank, resolvent_apply, to_complex, CMat, C64,
    RMat,
};

/// Default eigenvalue tolerance for stability predicates.
pub const TOL_EIG: f64 = 1e-9;
/// Eigenvalue clustering tolerance for multiplicity counts.
pub const TOL_CLUSTER: f64 = 1e-8;
/// Condition-number threshold above which a transform is rejected.
pub const COND_MAX: f64 = 1e12;

/// Scalar field a system was constructed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// State-space system (A, B, C, D).
#[derive(Debug, Clone)]
pub struct LtiSystem {
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
    field: Field,
}

impl LtiSystem {
    pub fn new(a: CMat, b: CMat, c_mat: CMat, d: CMat) -> Result<Self> {
        let m = a.nrows();
        if a.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if m < 1 || b.ncols() < 1 {
            return Err(Error::DimensionMismatch(
                "state and input dimensions must be at least 1".into(),
            ));
        }
        if b.nrows() != m {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected {}",
                b.nrows(),
                m
            )));
        }
        if c_mat.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected {}",
                c_mat.ncols(),
                m
            )));
        }
        if d.nrows() != c_mat.nrows() || d.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c_mat.nrows(),
                b.ncols()
            )));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c_mat), ("D", &d)] {
            if !linalg::is_finite(mat) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        let field = if [&a, &b, &c_mat, &d].iter().all(|m| linalg::max_imag(m) == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Ok(Self { a, b, c: c_mat, d, field })
    }

    pub fn from_real(a: &RMat, b: &RMat, c_mat: &RMat, d: &RMat) -> Result<Self> {
        Self::new(to_complex(a), to_complex(b), to_complex(c_mat), to_complex(d))
    }

    /// Convenience constructor with D = 0.
    pub fn from_real_abc(a: &RMat, b: &RMat, c_mat: &RMat) -> Result<Self> {
        let d = RMat::zeros(c_mat.nrows(), b.ncols());
        Self::from_real(a, b, c_mat, &d)
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }
    pub fn b(&self) -> &CMat {
        &self.b
    }
    pub fn c(&self) -> &CMat {
        &self.c
    }
    pub fn d(&self) -> &CMat {
        &self.d
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }
    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// True if every matrix entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    /// Transfer matrix D + C(sI - A)^{-1}B at a point.
    pub fn transfer_at(&self, s: C64) -> Result<CMat> {
        let x = resolvent_apply(&self.a, s, &self.b)?;
        Ok(&self.d + &self.c * x)
    }

    /// System with A replaced by A + shift*I; used for rate-shifted LMIs.
    pub fn rate_shifted(&self, shift: f64) -> Self {
        let n = self.a.nrows();
        let mut sys = self.clone();
        sys.a += CMat::identity(n, n) * c(shift);
        sys
    }
}

/// Output of [`zero_dynamics`].
#[derive(Debug, Clone)]
pub struct ZeroDynamicsResult {
    /// Feedback matrix F with u = Fx on output-zeroing trajectories.
    pub feedback: CMat,
    /// Orthonormal basis of the unobservable subspace of (A+BF, C+DF).
    pub s_basis: CMat,
    /// Eigenvalues of (A+BF) restricted to that subspace (the transmission zeros).
    pub zero_eigenvalues: Vec<C64>,
}

/// Maximum real part over the eigenvalues of A.
pub fn spectral_abscissa(a: &CMat) -> Result<f64> {
    let eig = eigenvalues(a)?;
    Ok(eig.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re)))
}

/// True iff the spectral abscissa is strictly below -margin (with tolerance).
pub fn is_hurwitz(a: &CMat, margin: f64) -> Result<bool> {
    Ok(spectral_abscissa(a)? < -margin - TOL_EIG)
}

/// Eigenvalues in the closed left half-plane, with semisimple imaginary ones.
pub fn is_marginally_stable(a: &CMat, tol: f64) -> Result<bool> {
    let eig = eigenvalues(a)?;
    if eig.iter().any(|z| z.re > tol) {
        return Ok(false);
    }
    let n = a.nrows();
    let mut visited = vec![false; eig.len()];
    for i in 0..eig.len() {
        if visited[i] || eig[i].re.abs() > tol {
            continue;
        }
        // Cluster eigenvalues to get the algebraic multiplicity.
        let lambda = eig[i];
        let mut alg = 0usize;
        for (j, ev) in eig.iter().enumerate() {
            if (ev - lambda).norm() <= TOL_CLUSTER {
                visited[j] = true;
                alg += 1;
            }
        }
        let shifted = a - CMat::identity(n, n) * lambda;
        let geo = n - rank(&shifted);
        if geo < alg {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of the Kalman reachability matrix [B, AB, ..., A^{m-1}B].
pub fn reachability_rank(a: &CMat, b: &CMat) -> Result<usize> {
    if a.nrows() != a.ncols() || b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch("reachability_rank".into()));
    }
    let m = a.nrows();
    let mut blocks = Vec::with_capacity(m);
    let mut cur = b.clone();
    for _ in 0..m {
        blocks.push(cur.clone());
        cur = a * &cur;
    }
    let total_cols: usize = blocks.iter().map(|x| x.ncols()).sum();
    let mut kal = CMat::zeros(m, total_cols);
    let mut off = 0;
    for blk in &blocks {
        kal.view_mut((0, off), (m, blk.ncols())).copy_from(blk);
        off += blk.ncols();
    }
    Ok(rank(&kal))
}

/// Rank of the Kalman observability matrix.
pub fn observability_rank(a: &CMat, c_mat: &CMat) -> Result<usize> {
    Ok(reachability_rank(&a.adjoint(), &c_mat.adjoint())?)
}

/// Stacked observability matrix of (A, C), rows C, CA, ..., CA^{m-1}.
fn observability_matrix(a: &CMat, c_mat: &CMat) -> CMat {
    let m = a.nrows();
    let p = c_mat.nrows();
    let mut obs = CMat::zeros(p * m, m);
    let mut cur = c_mat.clone();
    for l in 0..m {
        obs.view_mut((l * p, 0), (p, m)).copy_from(&cur);
        cur = &cur * a;
    }
    obs
}

/// State feedback u = Fx followed by the coordinate change x = T x~.
pub fn apply_feedback(sys: &LtiSystem, f: &CMat, t: &CMat) -> Result<LtiSystem> {
    let m = sys.state_dim();
    let n = sys.input_dim();
    if f.nrows() != n || f.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "F is {}x{}, expected {}x{}",
            f.nrows(),
            f.ncols(),
            n,
            m
        )));
    }
    if t.nrows() != m || t.ncols() != m {
        return Err(Error::DimensionMismatch("T must be m x m".into()));
    }
    let cond = linalg::condition_number(t);
    if !cond.is_finite() || cond > COND_MAX {
        return Err(Error::SingularTransform { cond });
    }
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or(Error::SingularTransform { cond: f64::INFINITY })?;
    let a_cl = &sys.a + &sys.b * f;
    LtiSystem::new(
        &t_inv * a_cl * t,
        &t_inv * &sys.b,
        (&sys.c + &sys.d * f) * t,
        sys.d.clone(),
    )
}

/// Kernel dimension of the system matrix [[A - sI, B], [C, D]].
pub fn system_matrix_kernel_dim(sys: &LtiSystem, s: C64) -> usize {
    let m = sys.state_dim();
    let n = sys.input_dim();
    let p = sys.output_dim();
    let mut blk = CMat::zeros(m + p, m + n);
    blk.view_mut((0, 0), (m, m))
        .copy_from(&(&sys.a - CMat::identity(m, m) * s));
    blk.view_mut((0, m), (m, n)).copy_from(&sys.b);
    blk.view_mut((m, 0), (p, m)).copy_from(&sys.c);
    blk.view_mut((m, m), (p, n)).copy_from(&sys.d);
    (m + n) - rank(&blk)
}

fn normal_column_rank_probe(sys: &LtiSystem) -> Result<usize> {
    // Probe points chosen outside the spectral disk; the normal rank is
    // attained at all but finitely many points, so three probes suffice.
    let radius = linalg::spectral_norm(&sys.a) + 1.0;
    let probes = [
        C64::new(1.3127 * radius, 0.7213 * radius),
        C64::new(-0.4821 * radius, 1.6409 * radius),
        C64::new(2.0587 * radius, -1.1931 * radius),
    ];
    let mut best = 0;
    for s in probes {
        best = best.max(rank(&sys.transfer_at(s)?));
    }
    Ok(best)
}

/// Iterative output-zeroing construction.
///
/// Builds F such that output-zeroing trajectories satisfy u = Fx, and
/// returns the invariant subspace carrying the zero dynamics together
/// with its eigenvalues (the transmission zeros).
pub fn zero_dynamics(sys: &LtiSystem) -> Result<ZeroDynamicsResult> {
    let m = sys.state_dim();
    let n = sys.input_dim();
    let nr = normal_column_rank_probe(sys)?;
    if nr < n {
        return Err(Error::NotFullColumnRank { rank: nr, cols: n });
    }

    let scale = linalg::fro_norm(&sys.c).max(linalg::fro_norm(&sys.d)).max(1.0)
        * linalg::fro_norm(&sys.b).max(1.0);
    let markov_tol = scale * (m as f64) * 1e-12;

    let mut f = CMat::zeros(n, m);
    let mut u_basis = CMat::identity(n, n);
    let mut c_cur = sys.c.clone();
    if linalg::fro_norm(&sys.d) > 0.0 {
        let f0 = -pinv(&sys.d) * &sys.c;
        c_cur = &sys.c + &sys.d * &f0;
        f = f0;
        u_basis = null_space(&sys.d);
    }

    while u_basis.ncols() > 0 {
        let k = u_basis.ncols();
        let a_cl = &sys.a + &sys.b * &f;
        let bu = &sys.b * &u_basis;
        // Smallest p with a nonzero Markov parameter (C+DF)(A+BF)^p B|_U.
        let mut found = None;
        let mut cur = &c_cur * &bu;
        let mut c_pow = c_cur.clone();
        for p in 0..m {
            if linalg::fro_norm(&cur) > markov_tol {
                found = Some((p, cur.clone(), c_pow.clone()));
                break;
            }
            c_pow = &c_pow * &a_cl;
            cur = &c_pow * &bu;
        }
        let Some((_, mk, c_pow)) = found else {
            // By Cayley-Hamilton the restricted transfer vanishes identically.
            return Err(Error::NotFullColumnRank { rank: n - k, cols: n });
        };
        let f_red = -pinv(&mk) * (&c_pow * &a_cl);
        f += &u_basis * f_red;
        let kernel = null_space(&mk);
        if kernel.ncols() >= k {
            return Err(Error::EigenvalueFailure(
                "input subspace failed to shrink in zero-dynamics iteration".into(),
            ));
        }
        u_basis = &u_basis * kernel;
    }

    let a_cl = &sys.a + &sys.b * &f;
    let c_cl = &sys.c + &sys.d * &f;
    let s_basis = null_space(&observability_matrix(&a_cl, &c_cl));
    let zero_eigenvalues = if s_basis.ncols() > 0 {
        let restricted = s_basis.adjoint() * &a_cl * &s_basis;
        eigenvalues(&restricted)?
    } else {
        Vec::new()
    };
    Ok(ZeroDynamicsResult { feedback: f, s_basis, zero_eigenvalues })
}

/// Companion realization of num(s)/den(s) with prescribed roots.
///
/// `zeros` become the transmission zeros; `poles` fix the denominator.
/// Requires strictly more poles than zeros.
pub fn companion_from_roots(zeros: &[C64], poles: &[C64]) -> Result<LtiSystem> {
    if poles.len() <= zeros.len() {
        return Err(Error::InvalidParameter(
            "companion_from_roots needs deg(den) > deg(num)".into(),
        ));
    }
    let den = poly_from_roots(poles);
    let num = poly_from_roots(zeros);
    let m = poles.len();
    // Controllable companion form for monic denominator.
    let mut a = CMat::zeros(m, m);
    for i in 0..m.saturating_sub(1) {
        a[(i, i + 1)] = c(1.0);
    }
    for j in 0..m {
        a[(m - 1, j)] = -den[j];
    }
    let mut b = CMat::zeros(m, 1);
    b[(m - 1, 0)] = c(1.0);
    let mut c_mat = CMat::zeros(1, m);
    for (j, coeff) in num.iter().enumerate() {
        c_mat[(0, j)] = *coeff;
    }
    c_mat[(0, zeros.len())] = c(1.0); // monic leading coefficient
    let d = CMat::zeros(1, 1);
    LtiSystem::new(a, b, c_mat, d)
}

/// Coefficients of the monic polynomial with the given roots, ascending
/// order, leading 1 omitted.
fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut coeffs = vec![c(1.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, co) in coeffs.iter().enumerate() {
            next[i + 1] += *co;
            next[i] -= *co * *r;
        }
        coeffs = next;
    }
    coeffs.pop(); // drop leading 1
    coeffs
}

/// Verifies the invariants of a [`ZeroDynamicsResult`]; returns the
/// largest residual among them.
pub fn zero_dynamics_residual(sys: &LtiSystem, zd: &ZeroDynamicsResult) -> f64 {
    let a_cl = sys.a() + sys.b() * &zd.feedback;
    let c_cl = sys.c() + sys.d() * &zd.feedback;
    let mut worst: f64 = 0.0;
    let m = sys.state_dim();
    for l in 0..m {
        let mat = &c_cl * mat_pow(&a_cl, l) * &zd.s_basis;
        worst = worst.max(linalg::fro_norm(&mat));
    }
    // range D orthogonal to range (C+DF)
    worst = worst.max(linalg::fro_norm(&(sys.d().adjoint() * &c_cl)));
    worst
}

//! Quadratic supply rates, the storage LMI, Popov-function evaluation,
//! frequency-domain-inequality grid checks, and spectral factorization.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigenvalues, hermitian_max_eig, hermitian_min_eig, hermitian_part, resolvent_apply,
    to_complex, CMat, CVec, C64, RMat,
};
use crate::nonlinear::Trajectory;
use crate::systems::{is_hurwitz, LtiSystem};

/// Absolute eigenvalue tolerance for LMI/FDI verdicts, scaled by (1 + |M|).
pub const TOL_BASE: f64 = 1e-9;

/// Quadratic supply rate sigma(x, u) = <Qx,x> + 2 Re<Sx,u> + <Ru,u>.
#[derive(Debug, Clone)]
pub struct SupplyRate {
    q: CMat,
    s: CMat,
    r: CMat,
}

impl SupplyRate {
    /// Q and R are symmetrized on construction.
    pub fn new(q: CMat, s: CMat, r: CMat) -> Result<Self> {
        if q.nrows() != q.ncols() || r.nrows() != r.ncols() {
            return Err(Error::DimensionMismatch("Q and R must be square".into()));
        }
        if s.nrows() != r.nrows() || s.ncols() != q.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "S is {}x{}, expected {}x{}",
                s.nrows(),
                s.ncols(),
                r.nrows(),
                q.nrows()
            )));
        }
        for (name, mat) in [("Q", &q), ("S", &s), ("R", &r)] {
            if !linalg::is_finite(mat) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(Self { q: hermitian_part(&q), s, r: hermitian_part(&r) })
    }

    pub fn from_real(q: &RMat, s: &RMat, r: &RMat) -> Result<Self> {
        Self::new(to_complex(q), to_complex(s), to_complex(r))
    }

    pub fn zero(state_dim: usize, input_dim: usize) -> Self {
        Self {
            q: CMat::zeros(state_dim, state_dim),
            s: CMat::zeros(input_dim, state_dim),
            r: CMat::zeros(input_dim, input_dim),
        }
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }
    pub fn s(&self) -> &CMat {
        &self.s
    }
    pub fn r(&self) -> &CMat {
        &self.r
    }
    pub fn state_dim(&self) -> usize {
        self.q.nrows()
    }
    pub fn input_dim(&self) -> usize {
        self.r.nrows()
    }

    /// Block matrix [[Q, S*], [S, R]] representing the quadratic form on (x, u).
    pub fn block_matrix(&self) -> CMat {
        let m = self.state_dim();
        let n = self.input_dim();
        let mut blk = CMat::zeros(m + n, m + n);
        blk.view_mut((0, 0), (m, m)).copy_from(&self.q);
        blk.view_mut((0, m), (m, n)).copy_from(&self.s.adjoint());
        blk.view_mut((m, 0), (n, m)).copy_from(&self.s);
        blk.view_mut((m, m), (n, n)).copy_from(&self.r);
        blk
    }

    pub fn block_norm(&self) -> f64 {
        linalg::fro_norm(&self.block_matrix())
    }

    /// Supply transform matching state feedback u = Fx and x = T x~.
    pub fn transform(&self, f: &CMat, t: &CMat) -> Result<SupplyRate> {
        let sf = self.s.adjoint() * f;
        let q_new = t.adjoint()
            * (&self.q + &sf + sf.adjoint() + f.adjoint() * &self.r * f)
            * t;
        let s_new = (&self.s + &self.r * f) * t;
        SupplyRate::new(q_new, s_new, self.r.clone())
    }
}

/// Candidate quadratic storage <Px, x>.
#[derive(Debug, Clone)]
pub struct CandidateStorage {
    p: CMat,
}

impl CandidateStorage {
    pub fn new(p: CMat) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::DimensionMismatch("P must be square".into()));
        }
        if !linalg::is_finite(&p) {
            return Err(Error::NonFinite("P".into()));
        }
        Ok(Self { p: hermitian_part(&p) })
    }

    pub fn from_real(p: &RMat) -> Result<Self> {
        Self::new(to_complex(p))
    }

    pub fn p(&self) -> &CMat {
        &self.p
    }
}

/// Pointwise supply rate value; always real.
pub fn supply_eval(m: &SupplyRate, x: &CVec, u: &CVec) -> Result<f64> {
    if x.len() != m.state_dim() || u.len() != m.input_dim() {
        return Err(Error::DimensionMismatch("supply_eval".into()));
    }
    let qx = &m.q * x;
    let sx = &m.s * x;
    let ru = &m.r * u;
    let quad = x.dotc(&qx).re + 2.0 * u.dotc(&sx).re + u.dotc(&ru).re;
    Ok(quad)
}

/// Trapezoid quadrature of the supply along a sampled trajectory.
pub fn energy_integral(m: &SupplyRate, traj: &Trajectory) -> Result<f64> {
    let inputs = traj
        .inputs
        .as_ref()
        .ok_or_else(|| Error::TrajectoryTooShort("trajectory carries no inputs".into()))?;
    if traj.times.len() < 2 {
        return Err(Error::TrajectoryTooShort(format!(
            "need at least 2 samples, got {}",
            traj.times.len()
        )));
    }
    let mut vals = Vec::with_capacity(traj.times.len());
    for (x, u) in traj.states.iter().zip(inputs.iter()) {
        vals.push(supply_eval(m, &linalg::vec_to_complex(x), &linalg::vec_to_complex(u))?);
    }
    let mut total = 0.0;
    for i in 1..traj.times.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        total += 0.5 * dt * (vals[i] + vals[i - 1]);
    }
    Ok(total)
}

/// The affine LMI map Lambda(P) = [[2 Re A*P, PB], [B*P, 0]] - [[Q, S*], [S, R]].
pub fn lmi_matrix(sys: &LtiSystem, m: &SupplyRate, p: &CandidateStorage) -> Result<CMat> {
    let ns = sys.state_dim();
    let nu = sys.input_dim();
    if m.state_dim() != ns || m.input_dim() != nu || p.p().nrows() != ns {
        return Err(Error::DimensionMismatch("lmi_matrix".into()));
    }
    let ap = sys.a().adjoint() * p.p();
    let pb = p.p() * sys.b();
    let mut lhs = CMat::zeros(ns + nu, ns + nu);
    lhs.view_mut((0, 0), (ns, ns)).copy_from(&(&ap + ap.adjoint()));
    lhs.view_mut((0, ns), (ns, nu)).copy_from(&pb);
    lhs.view_mut((ns, 0), (nu, ns)).copy_from(&pb.adjoint());
    Ok(lhs - m.block_matrix())
}

/// Largest eigenvalue of Lambda(P); the LMI holds when this is <= tol.
pub fn lmi_max_eig(sys: &LtiSystem, m: &SupplyRate, p: &CandidateStorage) -> Result<f64> {
    Ok(hermitian_max_eig(&lmi_matrix(sys, m, p)?))
}

pub fn lmi_tolerance(m: &SupplyRate) -> f64 {
    TOL_BASE * (1.0 + m.block_norm())
}

fn pole_tolerance(sys: &LtiSystem) -> f64 {
    1e-6 * (1.0 + linalg::spectral_norm(sys.a()))
}

fn popov_eval_inner(
    sys: &LtiSystem,
    mblk: &CMat,
    s: C64,
    spectrum: &[C64],
    tol_pole: f64,
) -> Result<CMat> {
    let dist = spectrum
        .iter()
        .map(|ev| (s - ev).norm())
        .fold(f64::INFINITY, f64::min);
    if dist < tol_pole {
        return Err(Error::PoleProximity { point: format!("{s}"), tol: tol_pole });
    }
    let m = sys.state_dim();
    let n = sys.input_dim();
    let v = resolvent_apply(sys.a(), s, sys.b())?;
    let mut stack = CMat::zeros(m + n, n);
    stack.view_mut((0, 0), (m, n)).copy_from(&v);
    stack.view_mut((m, 0), (n, n)).copy_from(&CMat::identity(n, n));
    let pi = stack.adjoint() * mblk * stack;
    Ok(hermitian_part(&pi))
}

/// Popov function Pi(s-bar, s); Hermitian n x n.
pub fn popov_eval(sys: &LtiSystem, m: &SupplyRate, s: C64) -> Result<CMat> {
    let spectrum = eigenvalues(sys.a())?;
    popov_eval_inner(sys, &m.block_matrix(), s, &spectrum, pole_tolerance(sys))
}

/// Frequency sampling region for [`fdi_grid_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    /// Sample s = i omega - r along the shifted imaginary axis.
    AxisOnly,
    /// Tensor mesh over Re(s) in {0, 1e-2, 1e-1, 1, 10, 100} times the axis grid.
    ClosedRight,
}

/// Logarithmic frequency grid, mirrored to negative frequencies, with zero.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub n_points: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_points: 4001, omega_min: 1e-4, omega_max: 1e4, refine: true }
    }
}

impl GridSpec {
    pub fn with_points(n_points: usize) -> Self {
        Self { n_points, ..Self::default() }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_points.max(2);
        let lmin = self.omega_min.ln();
        let lmax = self.omega_max.ln();
        let mut pos: Vec<f64> = (0..n)
            .map(|i| (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let mut out: Vec<f64> = pos.iter().map(|w| -w).collect();
        out.push(0.0);
        out.append(&mut pos);
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }
}

/// Result of a frequency-domain-inequality scan.
#[derive(Debug, Clone)]
pub struct FdiReport {
    pub feasible: bool,
    /// Sampled (omega, lambda_min) pairs along the grid.
    pub min_eigenvalue_curve: Vec<(f64, f64)>,
    pub worst_frequency: f64,
    pub min_value: f64,
    pub skipped_pole_count: usize,
    pub tol_fdi: f64,
    /// Closed-right sampling is a necessary-condition check only.
    pub necessary_only: bool,
}

impl FdiReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,min_eig\n");
        for (w, e) in &self.min_eigenvalue_curve {
            out.push_str(&format!("{w:.17e},{e:.17e}\n"));
        }
        out
    }
}

/// Golden-section minimization of a scalar function over [lo, hi].
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Scans lambda_min(Pi) over the frequency locus s = re + i omega - r.
///
/// Grid points within the pole exclusion zone are skipped and counted.
/// Feasible iff the global minimum stays above -tol, where
/// tol = 1e-9 (1 + |M|). Ties in the minimum go to the smaller |omega|.
pub fn fdi_grid_check(
    sys: &LtiSystem,
    m: &SupplyRate,
    rate_shift: f64,
    grid: &GridSpec,
    half_plane: HalfPlane,
) -> Result<FdiReport> {
    let spectrum = eigenvalues(sys.a())?;
    let tol_pole = pole_tolerance(sys);
    let tol_fdi = lmi_tolerance(m);
    let mblk = m.block_matrix();
    let res = |re: f64, w: f64| -> Option<f64> {
        let s = C64::new(re - rate_shift, w);
        popov_eval_inner(sys, &mblk, s, &spectrum, tol_pole)
            .ok()
            .map(|pi| hermitian_min_eig(&pi))
    };
    let re_parts: &[f64] = match half_plane {
        HalfPlane::AxisOnly => &[0.0],
        HalfPlane::ClosedRight => &[0.0, 1e-2, 1e-1, 1.0, 10.0, 100.0],
    };
    let freqs = grid.frequencies();
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(freqs.len());
    let mut skipped = 0usize;
    for &w in &freqs {
        let mut best: Option<f64> = None;
        let mut any_skipped = false;
        for &re in re_parts {
            match res(re, w) {
                Some(v) => best = Some(best.map_or(v, |b: f64| b.min(v))),
                None => any_skipped = true,
            }
        }
        if any_skipped {
            skipped += 1;
        }
        if let Some(v) = best {
            curve.push((w, v));
        }
    }
    if curve.is_empty() {
        return Err(Error::AllPointsSkipped(freqs.len() * re_parts.len()));
    }

    let better = |cand: (f64, f64), best: (f64, f64)| -> bool {
        cand.1 < best.1 || (cand.1 == best.1 && cand.0.abs() < best.0.abs())
    };
    let mut best = curve[0];
    for &pt in &curve[1..] {
        if better(pt, best) {
            best = pt;
        }
    }

    if grid.refine && curve.len() >= 3 {
        // Local refinement around the five smallest interior minima.
        let mut minima: Vec<usize> = (1..curve.len() - 1)
            .filter(|&i| curve[i].1 <= curve[i - 1].1 && curve[i].1 <= curve[i + 1].1)
            .collect();
        minima.sort_by(|&i, &j| curve[i].1.partial_cmp(&curve[j].1).unwrap());
        minima.truncate(5);
        for i in minima {
            for &re in re_parts {
                let f = |w: f64| res(re, w).unwrap_or(f64::INFINITY);
                let (w_ref, v_ref) = golden_min(f, curve[i - 1].0, curve[i + 1].0, 80);
                if v_ref.is_finite() && better((w_ref, v_ref), best) {
                    best = (w_ref, v_ref);
                }
            }
        }
    }

    Ok(FdiReport {
        feasible: best.1 >= -tol_fdi,
        min_eigenvalue_curve: curve,
        worst_frequency: best.0,
        min_value: best.1,
        skipped_pole_count: skipped,
        tol_fdi,
        necessary_only: half_plane == HalfPlane::ClosedRight,
    })
}

/// Spectral factor data: -Lambda(P) = [K L]* [K L] with q independent rows.
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub k: CMat,
    pub l: CMat,
    pub q: usize,
    pub residual: f64,
}

impl FactorizationResult {
    /// Transfer factor G(s) = L + K(sI - A)^{-1}B.
    pub fn transfer_at(&self, sys: &LtiSystem, s: C64) -> Result<CMat> {
        let x = resolvent_apply(sys.a(), s, sys.b())?;
        Ok(&self.l + &self.k * x)
    }
}

/// Factors -Lambda(P) >= 0 through its eigendecomposition.
pub fn factorize(sys: &LtiSystem, m: &SupplyRate, p: &CandidateStorage) -> Result<FactorizationResult> {
    let lam = lmi_matrix(sys, m, p)?;
    let tol = lmi_tolerance(m);
    let max_eig = hermitian_max_eig(&lam);
    if max_eig > tol {
        return Err(Error::LmiInfeasible { max_eig, tol });
    }
    let neg = -&lam;
    let se = hermitian_part(&neg).symmetric_eigen();
    let lam_max = se.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let rank_tol = 1e-10 * lam_max;
    let ns = sys.state_dim();
    let nu = sys.input_dim();
    let kept: Vec<usize> = (0..se.eigenvalues.len())
        .filter(|&i| se.eigenvalues[i] > rank_tol)
        .collect();
    let q = kept.len();
    let mut kl = CMat::zeros(q, ns + nu);
    for (row, &i) in kept.iter().enumerate() {
        let scaled = se.eigenvectors.column(i).adjoint() * c(se.eigenvalues[i].max(0.0).sqrt());
        kl.view_mut((row, 0), (1, ns + nu)).copy_from(&scaled);
    }
    let recon = kl.adjoint() * &kl;
    let residual = linalg::fro_norm(&(&lam + recon));
    Ok(FactorizationResult {
        k: kl.view((0, 0), (q, ns)).into(),
        l: kl.view((0, ns), (q, nu)).into(),
        q,
        residual,
    })
}

/// Outcome of the minimal-stability search over F = -delta S.
#[derive(Debug, Clone)]
pub enum MinimalStability {
    /// A + delta B S Hurwitz at this delta; feedback F = -delta S.
    Witness { delta: f64, feedback: CMat },
    /// No delta in the admissible range worked.
    NoDeltaFound,
    /// Q is not negative semidefinite, so the F = -delta S family does not apply.
    StateCostNotNegative { max_eig: f64 },
}

/// Searches the grid intersected with [0, 2/|R|] for delta making
/// A - delta B S Hurwitz.
pub fn minimal_stability_witness(
    sys: &LtiSystem,
    m: &SupplyRate,
    delta_grid: &[f64],
) -> Result<MinimalStability> {
    let q_max = hermitian_max_eig(m.q());
    let tol = lmi_tolerance(m);
    if q_max > tol {
        return Ok(MinimalStability::StateCostNotNegative { max_eig: q_max });
    }
    let r_norm = linalg::spectral_norm(m.r());
    let delta_max = if r_norm > 0.0 { 2.0 / r_norm } else { f64::INFINITY };
    for &delta in delta_grid {
        if !(0.0..=delta_max).contains(&delta) {
            continue;
        }
        let a_cl = sys.a() - sys.b() * m.s() * c(delta);
        if is_hurwitz(&a_cl, 0.0)? {
            return Ok(MinimalStability::Witness { delta, feedback: -(m.s() * c(delta)) });
        }
    }
    Ok(MinimalStability::NoDeltaFound)
}

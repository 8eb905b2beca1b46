//! Damped Hamiltonian oscillators in Lur'e form: system construction,
//! transfer function, closed-loop characteristic polynomial, closed-form
//! sector/rate bounds, feasibility coefficients, and multiplier supplies.

use nalgebra::DMatrix;
use serde_json::json;

use crate::dissipativity::{CandidateStorage, SupplyRate};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_part, to_complex, CMat, C64, RMat};
use crate::nonlinear::Sector;
use crate::systems::{spectral_abscissa, LtiSystem};

/// Parameters of the damped Hamiltonian family with potential in the
/// sector [m, L], damping sigma, Hessian damping tau, and target rate r.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorParams {
    pub d: usize,
    pub m: f64,
    pub l: f64,
    pub sigma: f64,
    pub tau: f64,
    pub r: f64,
}

impl OscillatorParams {
    pub fn new(d: usize, m: f64, l: f64, sigma: f64, tau: f64, r: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("m must be > 0, got {m}")));
        }
        if !(l > m) {
            return Err(Error::InvalidParameter(format!("L must exceed m, got L = {l}, m = {m}")));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
        }
        Ok(Self { d, m, l, sigma, tau, r })
    }
}

/// Record of the loop shift g(q) = f(q) - (m/2)|q|^2 applied when
/// rewriting the oscillator in Lur'e form.
#[derive(Debug, Clone, Copy)]
pub struct LoopShift {
    /// Amount subtracted from both sector endpoints.
    pub shift: f64,
    /// Sector expected of the shifted gradient in the nonlinearity slot.
    pub shifted_sector: Sector,
}

fn kron_id(block: &RMat, d: usize) -> RMat {
    block.kronecker(&DMatrix::identity(d, d))
}

/// Lur'e realization of the oscillator after the loop shift by m.
///
/// A = [[-m tau I, I], [-m I, -2 sigma I]], B = [-tau I; -I], C = [I 0];
/// the nonlinearity slot expects the shifted gradient in sector [0, L - m].
pub fn build_oscillator(p: &OscillatorParams) -> Result<(LtiSystem, LoopShift)> {
    let a2 = RMat::from_row_slice(2, 2, &[-p.m * p.tau, 1.0, -p.m, -2.0 * p.sigma]);
    let b2 = RMat::from_row_slice(2, 1, &[-p.tau, -1.0]);
    let c2 = RMat::from_row_slice(1, 2, &[1.0, 0.0]);
    let sys = LtiSystem::from_real_abc(&kron_id(&a2, p.d), &kron_id(&b2, p.d), &kron_id(&c2, p.d))?;
    let shifted = Sector::new(0.0, p.l - p.m)?;
    Ok((sys, LoopShift { shift: p.m, shifted_sector: shifted }))
}

/// Scalar transfer function -(1 + 2 sigma tau + tau s) / (s^2 + (2 sigma + tau m)s + m(1 + 2 sigma tau)).
pub fn transfer_eval(m: f64, sigma: f64, tau: f64, s: C64) -> Result<C64> {
    let b1 = 2.0 * sigma + tau * m;
    let b0 = m * (1.0 + 2.0 * sigma * tau);
    // Pole proximity is measured against the denominator roots.
    let disc = (C64::new(b1 * b1 - 4.0 * b0, 0.0)).sqrt();
    let roots = [(-c(b1) + disc) * c(0.5), (-c(b1) - disc) * c(0.5)];
    let a_norm = (m * tau).hypot(1.0).hypot(m.hypot(2.0 * sigma));
    let tol_pole = 1e-6 * (1.0 + a_norm);
    for root in roots {
        if (s - root).norm() < tol_pole {
            return Err(Error::PoleProximity { point: format!("{s}"), tol: tol_pole });
        }
    }
    let den = s * s + c(b1) * s + c(b0);
    Ok(-(c(1.0 + 2.0 * sigma * tau) + c(tau) * s) / den)
}

/// Coefficients (c1, c0) of chi(s) = s^2 + c1 s + c0 for the closed loop
/// with linear gain k, shifted by the rate r.
pub fn closed_loop_charpoly(k: f64, sigma: f64, tau: f64, r: f64) -> (f64, f64) {
    let c1 = 2.0 * sigma - 2.0 * r + k * tau;
    let c0 = k + r * r - 2.0 * r * sigma + (2.0 * sigma - r) * k * tau;
    (c1, c0)
}

/// Rate-shifted closed-loop matrix [[r - k tau, 1], [-k, r - 2 sigma]].
pub fn closed_loop_matrix(k: f64, sigma: f64, tau: f64, r: f64) -> RMat {
    RMat::from_row_slice(2, 2, &[r - k * tau, 1.0, -k, r - 2.0 * sigma])
}

/// Verdict on the linear (gain k = m) rate constraints.
#[derive(Debug, Clone, Copy)]
pub struct RateRegion {
    pub admissible: bool,
    pub strict: bool,
    pub boundary_case: bool,
}

/// Necessary constraints for the linear closed loop to decay at rate r.
///
/// tau = 0: r <= sigma and m >= 2 r sigma - r^2, with at least one strict.
/// tau > 0: r <= min(2 sigma + 1/tau, sigma + m tau / 2).
pub fn linear_rate_region(m: f64, sigma: f64, tau: f64, r: f64) -> RateRegion {
    const BTOL: f64 = 1e-12;
    if tau == 0.0 {
        let g1 = sigma - r;
        let g2 = m - (2.0 * r * sigma - r * r);
        let admissible = g1 >= 0.0 && g2 >= 0.0 && (g1 > 0.0 || g2 > 0.0);
        RateRegion {
            admissible,
            strict: g1 > BTOL && g2 > BTOL,
            boundary_case: g1.abs() <= BTOL || g2.abs() <= BTOL,
        }
    } else {
        let bound = (2.0 * sigma + 1.0 / tau).min(sigma + m * tau / 2.0);
        let g = bound - r;
        RateRegion { admissible: g >= 0.0, strict: g > BTOL, boundary_case: g.abs() <= BTOL }
    }
}

/// The optimal pair (r_star, tau_star) for the linear infinite-sector
/// problem: r_star = (3 sigma + sqrt(2m + sigma^2))/2, tau_star = (sigma + sqrt(2m + sigma^2))/m.
pub fn optimal_linear_rate(m: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(m > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidParameter("optimal_linear_rate needs m > 0, sigma > 0".into()));
    }
    let root = (2.0 * m + sigma * sigma).sqrt();
    Ok(((3.0 * sigma + root) / 2.0, (sigma + root) / m))
}

/// Quartic/quadratic frequency-inequality coefficients:
/// quartic_coeff * w^4 + beta * w^2 + gamma.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityCoefficients {
    pub quartic_coeff: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Nonnegativity of quartic_coeff * w^4 + beta * w^2 + gamma over all real w.
///
/// Boundary equalities are admitted (the underlying inequalities are
/// non-strict), so this decides membership in the closure of the feasible set.
pub fn quartic_nonneg(cf: &FeasibilityCoefficients) -> Result<bool> {
    if !(cf.quartic_coeff.is_finite() && cf.beta.is_finite() && cf.gamma.is_finite()) {
        return Err(Error::NonFinite("feasibility coefficients".into()));
    }
    if cf.quartic_coeff < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "quartic coefficient must be nonnegative, got {}",
            cf.quartic_coeff
        )));
    }
    if cf.quartic_coeff > 0.0 {
        let beta = cf.beta / cf.quartic_coeff;
        let gamma = cf.gamma / cf.quartic_coeff;
        Ok((gamma >= 0.0 && beta >= 0.0) || (gamma >= 0.0 && 4.0 * gamma - beta * beta >= 0.0))
    } else {
        Ok(cf.beta >= 0.0 && cf.gamma >= 0.0)
    }
}

fn require_sector_hypotheses(m: f64, sigma: f64, r: f64) -> Result<f64> {
    if !(m > 0.0 && sigma > 0.0 && r > 0.0) {
        return Err(Error::HypothesesViolated(format!(
            "need m, sigma, r > 0, got ({m}, {sigma}, {r})"
        )));
    }
    if !(r < sigma) {
        return Err(Error::HypothesesViolated(format!("need r < sigma, got r = {r}, sigma = {sigma}")));
    }
    let gap = m - (2.0 * r * sigma - r * r);
    if gap < 0.0 {
        return Err(Error::HypothesesViolated(format!(
            "need m >= 2 r sigma - r^2, deficit {gap:.3e}"
        )));
    }
    Ok(gap)
}

/// Supremal shifted sector width for the circle criterion:
/// l_sup = 4((sigma - r)^2 + (sigma - r) sqrt(m - 2 r sigma + r^2)).
pub fn circle_bound(m: f64, sigma: f64, r: f64) -> Result<f64> {
    let gap = require_sector_hypotheses(m, sigma, r)?;
    let sr = sigma - r;
    Ok(4.0 * (sr * sr + sr * gap.sqrt()))
}

/// Best time-invariant Popov width and multiplier:
/// (2m(sigma - r)/r, (m - 2 r sigma)/(2 m sigma - m r)) when m > 2 r sigma,
/// otherwise the circle values (the maximum over mu is attained at mu = 0).
pub fn popov_ti_bound(m: f64, sigma: f64, r: f64) -> Result<(f64, f64)> {
    require_sector_hypotheses(m, sigma, r)?;
    if m > 2.0 * r * sigma {
        let l_best = 2.0 * m * (sigma - r) / r;
        let mu_best = (m - 2.0 * r * sigma) / (2.0 * m * sigma - m * r);
        Ok((l_best, mu_best))
    } else {
        Ok((circle_bound(m, sigma, r)?, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    T1Quasi,
    T2QuasiFinite,
    T3PopovTi,
    T4Circle,
    T5Tau,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::T1Quasi => "T1_quasi",
            TheoremId::T2QuasiFinite => "T2_quasi_finite",
            TheoremId::T3PopovTi => "T3_popov_ti",
            TheoremId::T4Circle => "T4_circle",
            TheoremId::T5Tau => "T5_tau",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1" | "t1_quasi" => Ok(TheoremId::T1Quasi),
            "t2" | "t2_quasi_finite" => Ok(TheoremId::T2QuasiFinite),
            "t3" | "t3_popov_ti" => Ok(TheoremId::T3PopovTi),
            "t4" | "t4_circle" => Ok(TheoremId::T4Circle),
            "t5" | "t5_tau" => Ok(TheoremId::T5Tau),
            other => Err(Error::Parse(format!("unknown theorem id: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    HypothesesViolated,
}

/// Certified rate/sector statement produced by the theorem dispatch.
#[derive(Debug, Clone)]
pub struct RateCertificate {
    pub theorem_id: TheoremId,
    pub verdict: Verdict,
    /// Upper sector endpoint L (may be infinite).
    pub bound_l: f64,
    /// (lambda, mu, nu) when the criterion is multiplier-based.
    pub multipliers: Option<(f64, f64, f64)>,
    pub diagnostics: String,
}

impl RateCertificate {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn to_json(&self) -> serde_json::Value {
        let bound = if self.bound_l.is_finite() {
            json!(self.bound_l)
        } else {
            json!("inf")
        };
        json!({
            "theorem_id": self.theorem_id.as_str(),
            "verdict": match self.verdict {
                Verdict::Certified => "certified",
                Verdict::HypothesesViolated => "hypotheses_violated",
            },
            "bound_L": bound,
            "multipliers": self.multipliers.map(|(l, m, n)| vec![l, m, n]),
            "diagnostics": self.diagnostics,
        })
    }
}

/// Quasi-convex certificates (Theorems 1 and 2) for tau = 0.
///
/// r <= 2 sigma / 3 with m >= 2 r sigma - r^2 certifies the infinite
/// sector (T1). For 2 sigma / 3 < r < sigma, the finite-sector width is
/// the larger of the mu = 0 branch l_star(0) and the lambda = 0 branch
/// alpha, both scaled by 2(sigma - r)/(3r - 2 sigma).
pub fn quasi_bounds(m: f64, sigma: f64, r: f64) -> RateCertificate {
    if !(m > 0.0 && sigma > 0.0 && r > 0.0) {
        return RateCertificate {
            theorem_id: TheoremId::T1Quasi,
            verdict: Verdict::HypothesesViolated,
            bound_l: 0.0,
            multipliers: None,
            diagnostics: format!("need m, sigma, r > 0, got ({m}, {sigma}, {r})"),
        };
    }
    let gap = m - (2.0 * r * sigma - r * r);
    if r <= 2.0 * sigma / 3.0 && gap >= 0.0 {
        return RateCertificate {
            theorem_id: TheoremId::T1Quasi,
            verdict: Verdict::Certified,
            bound_l: f64::INFINITY,
            multipliers: Some((0.0, 0.0, 1.0)),
            diagnostics: format!(
                "infinite sector; r <= 2 sigma / 3 and m - (2 r sigma - r^2) = {gap:.6e} >= 0"
            ),
        };
    }
    if r < sigma && gap >= 0.0 {
        let denom = 3.0 * r - 2.0 * sigma;
        let alpha = 4.0 * (sigma - r) * gap / denom;
        let mu_star = denom / (2.0 * sigma - r);
        let t2_gap = m - (8.0 * r * r - 10.0 * r * sigma + 4.0 * sigma * sigma);
        if t2_gap >= 0.0 {
            let w1 = m - 4.0 * r * sigma + 4.0 * r * r;
            let w2 = 2.0 * m - 4.0 * r * sigma + 2.0 * r * r;
            let width = 2.0 * (sigma - r) / denom * w1.max(w2);
            let l_star0 = 2.0 * (sigma - r) * w1 / denom;
            let nu_star0 = t2_gap / (w1 * denom);
            let (mults, branch) = if w1 >= w2 {
                (Some((1.0, 0.0, nu_star0)), "mu = 0 branch")
            } else {
                (Some((0.0, mu_star, 1.0)), "lambda = 0 branch")
            };
            return RateCertificate {
                theorem_id: TheoremId::T2QuasiFinite,
                verdict: Verdict::Certified,
                bound_l: m + width,
                multipliers: mults,
                diagnostics: format!(
                    "{branch}; l_star(0) = {l_star0:.9e}, nu_star(0) = {nu_star0:.9e}, alpha = {alpha:.9e}"
                ),
            };
        }
        return RateCertificate {
            theorem_id: TheoremId::T2QuasiFinite,
            verdict: Verdict::Certified,
            bound_l: m + alpha,
            multipliers: Some((0.0, mu_star, 1.0)),
            diagnostics: format!("lambda = 0 branch only; alpha = {alpha:.9e}, mu_star = {mu_star:.9e}"),
        };
    }
    RateCertificate {
        theorem_id: TheoremId::T2QuasiFinite,
        verdict: Verdict::HypothesesViolated,
        bound_l: 0.0,
        multipliers: None,
        diagnostics: format!(
            "require r < sigma and m >= 2 r sigma - r^2; got r = {r}, sigma = {sigma}, deficit = {:.3e}",
            gap.min(0.0)
        ),
    }
}

/// Theorem-5 certificate at the optimal (r_star, tau_star) for an
/// infinite sector with Hessian damping.
pub fn tau_certificate(m: f64, sigma: f64) -> Result<RateCertificate> {
    let (r_star, tau_star) = optimal_linear_rate(m, sigma)?;
    let beta = 1.0 + tau_star * (r_star - m * tau_star);
    let gamma_factor = r_star * tau_star - 1.0 - 2.0 * sigma * tau_star;
    Ok(RateCertificate {
        theorem_id: TheoremId::T5Tau,
        verdict: Verdict::Certified,
        bound_l: f64::INFINITY,
        multipliers: None,
        diagnostics: format!(
            "r_star = {r_star:.12e}, tau_star = {tau_star:.12e}; boundary coefficients beta = {beta:.3e}, gamma factor = {gamma_factor:.3e}"
        ),
    })
}

/// Scans k in the grid for a gain whose rate-shifted closed loop is not
/// decaying, i.e. spectral abscissa of the tau-damped loop exceeds -r.
pub fn sharpness_probe(sigma: f64, tau: f64, r: f64, k_grid: &[f64]) -> Result<Option<f64>> {
    for &k in k_grid {
        let a = to_complex(&RMat::from_row_slice(2, 2, &[-k * tau, 1.0, -k, -2.0 * sigma]));
        if spectral_abscissa(&a)? > -r {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Which printed coefficient family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdiCriterion {
    Circle33,
    PopovTi34,
    Quasi35Lambda0,
    Quasi35Lambda1,
    Tau36,
}

impl FdiCriterion {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" | "circle_3_3" => Ok(FdiCriterion::Circle33),
            "popov_ti" | "popov_ti_3_4" => Ok(FdiCriterion::PopovTi34),
            "quasi_lambda0" | "quasi_3_5_lambda0" => Ok(FdiCriterion::Quasi35Lambda0),
            "quasi_lambda1" | "quasi_3_5_lambda1" => Ok(FdiCriterion::Quasi35Lambda1),
            "tau" | "tau_3_6" => Ok(FdiCriterion::Tau36),
            other => Err(Error::Parse(format!("unknown criterion: {other}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FdiCriterion::Circle33 => "circle_3_3",
            FdiCriterion::PopovTi34 => "popov_ti_3_4",
            FdiCriterion::Quasi35Lambda0 => "quasi_3_5_lambda0",
            FdiCriterion::Quasi35Lambda1 => "quasi_3_5_lambda1",
            FdiCriterion::Tau36 => "tau_3_6",
        }
    }
}

/// Inputs to [`fdi_coefficients`]; unused fields are ignored per criterion.
#[derive(Debug, Clone, Copy)]
pub struct FdiInputs {
    pub m: f64,
    pub sigma: f64,
    pub r: f64,
    pub tau: f64,
    /// Shifted sector width (finite for the finite-sector criteria).
    pub l: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

/// The printed coefficient tuples of the frequency inequalities, verbatim.
pub fn fdi_coefficients(criterion: FdiCriterion, inp: &FdiInputs) -> Result<FeasibilityCoefficients> {
    let (m, sigma, r) = (inp.m, inp.sigma, inp.r);
    let cgap = m - 2.0 * r * sigma + r * r;
    if inp.lambda < 0.0 || inp.mu < 0.0 || inp.nu < 0.0 {
        return Err(Error::InvalidMultipliers(format!(
            "multipliers must be nonnegative, got ({}, {}, {})",
            inp.lambda, inp.mu, inp.nu
        )));
    }
    let need_finite_l = !matches!(criterion, FdiCriterion::Tau36);
    if need_finite_l && !inp.l.is_finite() {
        return Err(Error::InvalidMultipliers(
            "mu-weighted finite-sector criteria require a finite width l (mu = 0 if L = inf)".into(),
        ));
    }
    let l = inp.l;
    match criterion {
        FdiCriterion::Circle33 => Ok(FeasibilityCoefficients {
            quartic_coeff: 1.0,
            beta: 2.0 * (sigma * sigma - m) + 2.0 * (sigma - r) * (sigma - r) - l,
            gamma: cgap * (l + cgap),
        }),
        FdiCriterion::PopovTi34 => {
            let (lambda, mu) = (inp.lambda, inp.mu);
            Ok(FeasibilityCoefficients {
                quartic_coeff: lambda,
                beta: 2.0 * lambda * (sigma * sigma - m)
                    + 2.0 * lambda * (sigma - r) * (sigma - r)
                    - l * (lambda - mu * (2.0 * sigma - r)),
                gamma: -(l + cgap) * (l * r * mu - lambda * cgap),
            })
        }
        FdiCriterion::Quasi35Lambda0 => {
            let mu = inp.mu;
            Ok(FeasibilityCoefficients {
                quartic_coeff: 0.0,
                beta: 2.0 * sigma - 3.0 * r + mu * (2.0 * sigma - r),
                gamma: r * (cgap - mu * (l + cgap)),
            })
        }
        FdiCriterion::Quasi35Lambda1 => {
            let (mu, nu) = (inp.mu, inp.nu);
            Ok(FeasibilityCoefficients {
                quartic_coeff: 1.0,
                beta: 2.0 * (sigma * sigma - m) + 2.0 * (sigma - r) * (sigma - r)
                    - l * (1.0 + (3.0 * r - 2.0 * sigma) * nu - (2.0 * sigma - r) * mu),
                gamma: -mu * r * l * l + (1.0 + r * (nu - mu)) * cgap * l + cgap * cgap,
            })
        }
        FdiCriterion::Tau36 => {
            let tau = inp.tau;
            if tau < 0.0 {
                return Err(Error::InvalidParameter("tau must be >= 0".into()));
            }
            Ok(FeasibilityCoefficients {
                quartic_coeff: 0.0,
                beta: 1.0 + tau * (r - m * tau),
                gamma: (r * tau - 1.0 - 2.0 * sigma * tau) * (cgap + m * tau * (2.0 * sigma - r)),
            })
        }
    }
}

/// Supply rate lambda M0 + mu M1 + nu M2 for the rate-shifted system
/// (A + rI, B, C), where A is the unshifted Lur'e matrix and the
/// nonlinearity sits in the shifted sector [0, l].
///
/// M0 encodes -<u, y> + l^{-1}|u|^2; M1 and M2 couple u with the output
/// derivative, dy/dt -/+ ry, with M1 carrying the -r l |y|^2 penalty.
pub fn multiplier_supply(
    sys: &LtiSystem,
    r: f64,
    l: f64,
    lambda: f64,
    mu: f64,
    nu: f64,
) -> Result<SupplyRate> {
    if lambda < 0.0 || mu < 0.0 || nu < 0.0 {
        return Err(Error::InvalidMultipliers(format!(
            "multipliers must be nonnegative, got ({lambda}, {mu}, {nu})"
        )));
    }
    if !l.is_finite() && mu > 0.0 {
        return Err(Error::InvalidMultipliers("mu must be 0 when the sector is infinite".into()));
    }
    let n = sys.state_dim();
    let k = sys.output_dim();
    let a = sys.a();
    let cm = sys.c();
    let cb = hermitian_part(&(cm * sys.b()));
    let inv_l = if l.is_finite() { 1.0 / l } else { 0.0 };

    // Q is the full quadratic form of the -r l |y|^2 penalty in the
    // derivative supply (diagonal blocks enter the form once, unlike the
    // cross terms which are halved).
    let mut q = CMat::zeros(n, n);
    if mu > 0.0 {
        q -= cm.adjoint() * cm * c(mu * r * l);
    }
    let a2r = a + CMat::identity(n, n) * c(2.0 * r);
    let s = -(cm * c(0.5 * lambda)) - (cm * a) * c(0.5 * mu) - (cm * a2r) * c(0.5 * nu);
    let rr = CMat::identity(k, k) * c(lambda * inv_l) - &cb * c(mu + nu);
    SupplyRate::new(q, s, rr)
}

/// Quadratic storages for the Theorem-1 Lyapunov function at d blocks:
/// the printed P = [[r^2 I, r I], [r I, I/2]] and the LMI storage
/// P + [[m/2 I, 0], [0, 0]] absorbing the (m/2)|q|^2 part of the shift.
pub fn theorem1_storage(m: f64, r: f64, d: usize) -> Result<(CandidateStorage, CandidateStorage)> {
    let p2 = RMat::from_row_slice(2, 2, &[r * r, r, r, 0.5]);
    let shift2 = RMat::from_row_slice(2, 2, &[m / 2.0, 0.0, 0.0, 0.0]);
    let p = kron_id(&p2, d);
    let p_lmi = &p + kron_id(&shift2, d);
    Ok((CandidateStorage::from_real(&p)?, CandidateStorage::from_real(&p_lmi)?))
}

/// Dispatches a certification request for a named theorem at the given
/// parameters; the verdict checks every printed hypothesis.
pub fn certify(params: &OscillatorParams, theorem: TheoremId) -> Result<RateCertificate> {
    let (m, sigma, tau, r, l) = (params.m, params.sigma, params.tau, params.r, params.l);
    let reject = |theorem_id, why: String| RateCertificate {
        theorem_id,
        verdict: Verdict::HypothesesViolated,
        bound_l: 0.0,
        multipliers: None,
        diagnostics: why,
    };
    match theorem {
        TheoremId::T1Quasi => {
            if tau != 0.0 {
                return Ok(reject(theorem, "T1 requires tau = 0".into()));
            }
            if l.is_finite() {
                return Ok(reject(theorem, "T1 addresses the infinite sector; use T2".into()));
            }
            let cert = quasi_bounds(m, sigma, r);
            if cert.theorem_id == TheoremId::T1Quasi && cert.certified() {
                Ok(cert)
            } else {
                Ok(reject(theorem, cert.diagnostics))
            }
        }
        TheoremId::T2QuasiFinite => {
            if tau != 0.0 {
                return Ok(reject(theorem, "T2 requires tau = 0".into()));
            }
            let cert = quasi_bounds(m, sigma, r);
            if !cert.certified() {
                return Ok(reject(theorem, cert.diagnostics));
            }
            if l <= cert.bound_l {
                Ok(RateCertificate { theorem_id: theorem, ..cert })
            } else {
                Ok(reject(
                    theorem,
                    format!("sector endpoint L = {l} exceeds certified bound {}", cert.bound_l),
                ))
            }
        }
        TheoremId::T3PopovTi => {
            if tau != 0.0 {
                return Ok(reject(theorem, "T3 requires tau = 0".into()));
            }
            match popov_ti_bound(m, sigma, r) {
                Ok((l_best, mu_best)) => {
                    let bound = m + l_best;
                    if l <= bound {
                        Ok(RateCertificate {
                            theorem_id: theorem,
                            verdict: Verdict::Certified,
                            bound_l: bound,
                            multipliers: Some((1.0, mu_best, 0.0)),
                            diagnostics: format!("l_best = {l_best:.9e}, mu_best = {mu_best:.9e}"),
                        })
                    } else {
                        Ok(reject(theorem, format!("L = {l} exceeds certified bound {bound}")))
                    }
                }
                Err(e) => Ok(reject(theorem, e.to_string())),
            }
        }
        TheoremId::T4Circle => {
            if tau != 0.0 {
                return Ok(reject(theorem, "T4 requires tau = 0".into()));
            }
            match circle_bound(m, sigma, r) {
                Ok(l_sup) => {
                    let bound = m + l_sup;
                    if l <= bound {
                        Ok(RateCertificate {
                            theorem_id: theorem,
                            verdict: Verdict::Certified,
                            bound_l: bound,
                            multipliers: Some((1.0, 0.0, 0.0)),
                            diagnostics: format!("l_sup = {l_sup:.9e}"),
                        })
                    } else {
                        Ok(reject(theorem, format!("L = {l} exceeds certified bound {bound}")))
                    }
                }
                Err(e) => Ok(reject(theorem, e.to_string())),
            }
        }
        TheoremId::T5Tau => {
            if l.is_finite() {
                return Ok(reject(theorem, "T5 addresses the infinite sector only".into()));
            }
            let cert = tau_certificate(m, sigma)?;
            let (r_star, _) = optimal_linear_rate(m, sigma)?;
            if r <= r_star + 1e-12 {
                Ok(cert)
            } else {
                Ok(reject(theorem, format!("requested r = {r} exceeds r_star = {r_star:.9e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipativity::popov_eval;
    use crate::linalg;
    use crate::systems::{observability_rank, reachability_rank};
    use approx::assert_relative_eq;

    fn params(d: usize, m: f64, l: f64, sigma: f64, tau: f64, r: f64) -> OscillatorParams {
        OscillatorParams::new(d, m, l, sigma, tau, r).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(OscillatorParams::new(0, 1.0, 2.0, 1.0, 0.0, 0.5).is_err());
        assert!(OscillatorParams::new(1, -1.0, 2.0, 1.0, 0.0, 0.5).is_err());
        assert!(OscillatorParams::new(1, 1.0, 0.5, 1.0, 0.0, 0.5).is_err());
        assert!(OscillatorParams::new(1, 1.0, 2.0, 1.0, -0.1, 0.5).is_err());
        assert!(OscillatorParams::new(1, 1.0, f64::INFINITY, 1.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn build_matrices_d1() {
        let (sys, shift) = build_oscillator(&params(1, 1.0, f64::INFINITY, 1.0, 0.0, 0.5)).unwrap();
        let a = linalg::real_part(sys.a());
        assert_eq!(a, RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -2.0]));
        assert_eq!(linalg::real_part(sys.b()), RMat::from_row_slice(2, 1, &[0.0, -1.0]));
        assert_eq!(linalg::real_part(sys.c()), RMat::from_row_slice(1, 2, &[1.0, 0.0]));
        assert_eq!(shift.shift, 1.0);
        assert_eq!(shift.shifted_sector.m, 0.0);
        assert!(shift.shifted_sector.l.is_infinite());
    }

    #[test]
    fn controllable_and_observable() {
        for d in 1..=3 {
            let (sys, _) = build_oscillator(&params(d, 1.5, 4.0, 0.8, 0.3, 0.4)).unwrap();
            assert_eq!(reachability_rank(sys.a(), sys.b()).unwrap(), 2 * d);
            assert_eq!(observability_rank(sys.a(), sys.c()).unwrap(), 2 * d);
        }
    }

    #[test]
    fn transfer_closed_form() {
        // tau = 0: H(s) = -1/(s^2 + 2 sigma s + m); H(0) = -1 at m = 1.
        let h0 = transfer_eval(1.0, 1.0, 0.0, c(0.0)).unwrap();
        assert_relative_eq!(h0.re, -1.0, epsilon = 1e-14);
        assert_relative_eq!(h0.im, 0.0, epsilon = 1e-14);

        // Numerator root is a transfer zero.
        let (m, sigma, tau) = (2.0, 0.7, 0.4);
        let z = -(1.0 + 2.0 * sigma * tau) / tau;
        assert!(transfer_eval(m, sigma, tau, c(z)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn transfer_matches_state_space() {
        let (m, sigma, tau) = (1.7, 0.9, 0.25);
        let (sys, _) = build_oscillator(&params(1, m, f64::INFINITY, sigma, tau, 0.5)).unwrap();
        let points = [
            C64::new(0.3, 1.1),
            C64::new(-0.2, 2.7),
            C64::new(1.5, -0.4),
            C64::new(0.0, 5.0),
            C64::new(-0.6, 0.9),
            C64::new(2.2, 2.2),
            C64::new(0.1, -3.3),
            C64::new(-0.4, 7.1),
            C64::new(3.0, 0.5),
            C64::new(0.8, -1.6),
        ];
        for s in points {
            let h = transfer_eval(m, sigma, tau, s).unwrap();
            let hs = sys.transfer_at(s).unwrap()[(0, 0)];
            assert!((h - hs).norm() < 1e-10, "mismatch at {s}: {h} vs {hs}");
        }
    }

    #[test]
    fn transfer_pole_rejected() {
        // m = sigma = 1, tau = 0: double pole at -1.
        assert!(matches!(
            transfer_eval(1.0, 1.0, 0.0, c(-1.0)),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn charpoly_cases() {
        assert_eq!(closed_loop_charpoly(1.0, 1.0, 0.0, 0.0), (2.0, 1.0));

        // m = 2 r sigma - r^2 makes the constant coefficient vanish.
        let (r, sigma) = (0.5, 1.0);
        let k = 2.0 * r * sigma - r * r;
        let (_, c0) = closed_loop_charpoly(k, sigma, 0.0, r);
        assert_relative_eq!(c0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn charpoly_matches_matrix_eigenvalues() {
        let cases = [
            (1.3, 0.8, 0.2, 0.4),
            (2.5, 1.1, 0.0, 0.6),
            (0.7, 0.5, 1.0, 0.3),
            (4.0, 2.0, 0.5, 1.5),
        ];
        for (k, sigma, tau, r) in cases {
            let (c1, c0) = closed_loop_charpoly(k, sigma, tau, r);
            let mat = to_complex(&closed_loop_matrix(k, sigma, tau, r));
            let eig = linalg::eigenvalues(&mat).unwrap();
            // Roots of s^2 + c1 s + c0 via the quadratic formula.
            let disc = C64::new(c1 * c1 - 4.0 * c0, 0.0).sqrt();
            let roots = [(-c(c1) + disc) * c(0.5), (-c(c1) - disc) * c(0.5)];
            for q in roots {
                let dist = eig.iter().map(|e| (e - q).norm()).fold(f64::INFINITY, f64::min);
                assert!(dist < 1e-9, "root {q} missing from spectrum");
            }
        }
    }

    #[test]
    fn rate_region_cases() {
        let reg = linear_rate_region(1.0, 1.0, 0.0, 0.5);
        assert!(reg.admissible && reg.strict && !reg.boundary_case);

        // r = sigma and m = 2 r sigma - r^2 simultaneously: both equalities.
        let reg = linear_rate_region(1.0, 1.0, 0.0, 1.0);
        assert!(!reg.admissible && reg.boundary_case);

        // The optimum sits on the boundary of both tau > 0 constraints.
        let (m, sigma) = (2.0, 1.0);
        let (r_star, tau_star) = optimal_linear_rate(m, sigma).unwrap();
        let reg = linear_rate_region(m, sigma, tau_star, r_star);
        assert!(reg.admissible && reg.boundary_case);
    }

    #[test]
    fn optimal_rate_values() {
        let (r_star, tau_star) = optimal_linear_rate(2.0, 1.0).unwrap();
        assert_relative_eq!(r_star, (3.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(tau_star, (1.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-14);
        // Defining equations r = 2 sigma + 1/tau = sigma + tau m / 2.
        assert_relative_eq!(r_star, 2.0 + 1.0 / tau_star, epsilon = 1e-12);
        assert_relative_eq!(r_star, 1.0 + tau_star, epsilon = 1e-12);
    }

    #[test]
    fn tau_coefficients_vanish_at_optimum() {
        let (m, sigma) = (2.0, 1.0);
        let (r_star, tau_star) = optimal_linear_rate(m, sigma).unwrap();
        let cf = fdi_coefficients(
            FdiCriterion::Tau36,
            &FdiInputs {
                m,
                sigma,
                r: r_star,
                tau: tau_star,
                l: f64::INFINITY,
                lambda: 0.0,
                mu: 0.0,
                nu: 0.0,
            },
        )
        .unwrap();
        assert!(cf.beta.abs() < 1e-10);
        assert!(cf.gamma.abs() < 1e-10);
    }

    #[test]
    fn quartic_membership() {
        let t = |q, b, g| {
            quartic_nonneg(&FeasibilityCoefficients { quartic_coeff: q, beta: b, gamma: g }).unwrap()
        };
        assert!(t(1.0, -1.0, 1.0));
        assert!(!t(1.0, -3.0, 1.0));
        assert!(t(1.0, -1.5, 0.5625));
        assert!(t(0.0, 0.0, 0.0));
        assert!(!t(0.0, -1e-12, 1.0));
        assert!(quartic_nonneg(&FeasibilityCoefficients {
            quartic_coeff: -1.0,
            beta: 0.0,
            gamma: 0.0
        })
        .is_err());
    }

    #[test]
    fn circle_bound_values() {
        assert_relative_eq!(circle_bound(1.0, 1.0, 0.5).unwrap(), 2.0, epsilon = 1e-12);
        // Degenerate branch m = 2 r sigma - r^2: l_sup = 4 (sigma - r)^2.
        assert_relative_eq!(circle_bound(0.75, 1.0, 0.5).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            circle_bound(2.0, 1.0, 0.5).unwrap(),
            4.0 * (0.25 + 0.5 * 1.25f64.sqrt()),
            epsilon = 1e-12
        );
        assert!(matches!(circle_bound(1.0, 1.0, 1.5), Err(Error::HypothesesViolated(_))));
    }

    #[test]
    fn popov_ti_values() {
        let (l, mu) = popov_ti_bound(2.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(l, 4.0, epsilon = 1e-12);
        assert_relative_eq!(mu, 1.0 / 3.0, epsilon = 1e-12);

        // m = 2 r sigma: the optimal multiplier degenerates to 0.
        let (l, mu) = popov_ti_bound(1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(l, 2.0, epsilon = 1e-12);
        assert_eq!(mu, 0.0);
    }

    #[test]
    fn popov_dominates_circle() {
        for (m, sigma, r) in [(2.0, 1.0, 0.5), (3.0, 1.2, 0.4), (1.5, 1.0, 0.6)] {
            assert!(m >= 2.0 * r * sigma);
            let (l_p, _) = popov_ti_bound(m, sigma, r).unwrap();
            let l_c = circle_bound(m, sigma, r).unwrap();
            assert!(l_p >= l_c - 1e-12, "popov {l_p} < circle {l_c}");
        }
    }

    #[test]
    fn popov_boundary_identity() {
        let cf = fdi_coefficients(
            FdiCriterion::PopovTi34,
            &FdiInputs {
                m: 2.0,
                sigma: 1.0,
                r: 0.5,
                tau: 0.0,
                l: 4.0,
                lambda: 1.0,
                mu: 1.0 / 3.0,
                nu: 0.0,
            },
        )
        .unwrap();
        assert_relative_eq!(cf.quartic_coeff, 1.0, epsilon = 1e-14);
        assert_relative_eq!(cf.beta, -3.5, epsilon = 1e-12);
        assert_relative_eq!(cf.gamma, 3.0625, epsilon = 1e-12);
        assert!((4.0 * cf.gamma - cf.beta * cf.beta).abs() < 1e-10);
    }

    #[test]
    fn circle_coefficient_example() {
        let cf = fdi_coefficients(
            FdiCriterion::Circle33,
            &FdiInputs {
                m: 1.0,
                sigma: 1.0,
                r: 0.5,
                tau: 0.0,
                l: 2.0,
                lambda: 1.0,
                mu: 0.0,
                nu: 0.0,
            },
        )
        .unwrap();
        assert_relative_eq!(cf.beta, -1.5, epsilon = 1e-14);
        assert_relative_eq!(cf.gamma, 0.5625, epsilon = 1e-14);
        assert!((4.0 * cf.gamma - cf.beta * cf.beta).abs() < 1e-12);
    }

    #[test]
    fn quasi_certificates() {
        let c1 = quasi_bounds(1.0, 1.0, 2.0 / 3.0);
        assert_eq!(c1.theorem_id, TheoremId::T1Quasi);
        assert!(c1.certified());
        assert!(c1.bound_l.is_infinite());

        let c2 = quasi_bounds(1.0, 1.0, 0.75);
        assert_eq!(c2.theorem_id, TheoremId::T2QuasiFinite);
        assert!(c2.certified());
        assert_relative_eq!(c2.bound_l, 1.5, epsilon = 1e-12);
        // lambda = 0 width alpha = 0.25 is dominated by the T2 width 0.5.
        assert!(c2.diagnostics.contains("alpha"));

        let c3 = quasi_bounds(1.0, 1.0, 1.2);
        assert!(!c3.certified());
    }

    #[test]
    fn quasi_lambda0_width_consistency() {
        // beta = 0 at mu_star; gamma >= 0 up to l = alpha and < 0 beyond.
        let (m, sigma, r) = (1.0, 1.0, 0.75);
        let denom = 3.0 * r - 2.0 * sigma;
        let mu_star = denom / (2.0 * sigma - r);
        let alpha = 4.0 * (sigma - r) * (m - 2.0 * r * sigma + r * r) / denom;
        for (l, expect) in [(alpha * 0.999, true), (alpha, true), (alpha * 1.001, false)] {
            let cf = fdi_coefficients(
                FdiCriterion::Quasi35Lambda0,
                &FdiInputs { m, sigma, r, tau: 0.0, l, lambda: 0.0, mu: mu_star, nu: 1.0 },
            )
            .unwrap();
            assert_relative_eq!(cf.beta, 0.0, epsilon = 1e-12);
            assert_eq!(quartic_nonneg(&cf).unwrap(), expect, "l = {l}");
        }
    }

    #[test]
    fn multiplier_validation() {
        let (sys, _) = build_oscillator(&params(1, 1.0, 3.0, 1.0, 0.0, 0.5)).unwrap();
        assert!(matches!(
            multiplier_supply(&sys, 0.5, 2.0, -1.0, 0.0, 0.0),
            Err(Error::InvalidMultipliers(_))
        ));
        assert!(matches!(
            multiplier_supply(&sys, 0.5, f64::INFINITY, 1.0, 0.1, 0.0),
            Err(Error::InvalidMultipliers(_))
        ));
    }

    /// Pi(i w) * l * |den(i w - r)|^2 equals the printed quartic for the
    /// circle and Popov supplies (the frequency inequalities match up to
    /// this positive factor).
    #[test]
    fn popov_function_matches_printed_quartics() {
        let cases = [
            (1.0, 1.0, 0.5, 1.8, 1.0, 0.0, FdiCriterion::Circle33),
            (2.0, 1.0, 0.5, 3.0, 1.0, 0.25, FdiCriterion::PopovTi34),
            (2.0, 1.0, 0.5, 4.0, 1.0, 1.0 / 3.0, FdiCriterion::PopovTi34),
        ];
        for (m, sigma, r, l, lambda, mu, criterion) in cases {
            let (sys, _) = build_oscillator(&params(1, m, m + l, sigma, 0.0, r)).unwrap();
            let shifted = sys.rate_shifted(r);
            let sup = multiplier_supply(&sys, r, l, lambda, mu, 0.0).unwrap();
            let cf = fdi_coefficients(
                criterion,
                &FdiInputs { m, sigma, r, tau: 0.0, l, lambda, mu, nu: 0.0 },
            )
            .unwrap();
            for w in [0.0f64, 0.4, 1.0, 2.3, 6.0] {
                let s = C64::new(0.0, w);
                let pi = popov_eval(&shifted, &sup, s).unwrap()[(0, 0)].re;
                let sr = C64::new(-r, w);
                let den = sr * sr + c(2.0 * sigma) * sr + c(m);
                let lhs = pi * l * den.norm_sqr();
                let rhs = cf.quartic_coeff * w.powi(4) + cf.beta * w * w + cf.gamma;
                assert!(
                    (lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()),
                    "{criterion:?} at w = {w}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn theorem1_explicit_storage_lmi() {
        // Strict parameters (m, sigma, r) = (1, 1, 0.6): the printed P,
        // augmented by the (m/2)|q|^2 shift, satisfies the LMI for the
        // nu = 1 supply on the rate-shifted system.
        let (m, sigma, r) = (1.0, 1.0, 0.6);
        let (sys, _) = build_oscillator(&params(1, m, f64::INFINITY, sigma, 0.0, r)).unwrap();
        let shifted = sys.rate_shifted(r);
        let sup = multiplier_supply(&sys, r, f64::INFINITY, 0.0, 0.0, 1.0).unwrap();
        let (_, p_lmi) = theorem1_storage(m, r, 1).unwrap();
        let max_eig = crate::dissipativity::lmi_max_eig(&shifted, &sup, &p_lmi).unwrap();
        assert!(max_eig <= 1e-12, "max eigenvalue {max_eig}");
    }

    #[test]
    fn certify_dispatch() {
        let p1 = params(1, 1.0, f64::INFINITY, 1.0, 0.0, 2.0 / 3.0);
        assert!(certify(&p1, TheoremId::T1Quasi).unwrap().certified());

        let p1b = params(1, 1.0, f64::INFINITY, 1.0, 0.0, 0.7);
        assert!(!certify(&p1b, TheoremId::T1Quasi).unwrap().certified());

        let p4 = params(1, 1.0, 3.0, 1.0, 0.0, 0.5);
        assert!(certify(&p4, TheoremId::T4Circle).unwrap().certified());
        let p4b = params(1, 1.0, 3.1, 1.0, 0.0, 0.5);
        assert!(!certify(&p4b, TheoremId::T4Circle).unwrap().certified());

        let p3 = params(1, 2.0, 6.0, 1.0, 0.0, 0.5);
        assert!(certify(&p3, TheoremId::T3PopovTi).unwrap().certified());

        let p5 = params(1, 2.0, f64::INFINITY, 1.0, 1.618, 2.6);
        assert!(certify(&p5, TheoremId::T5Tau).unwrap().certified());
    }

    #[test]
    fn sharpness_near_optimum() {
        let (m, sigma) = (2.0, 1.0);
        let (r_star, tau_star) = optimal_linear_rate(m, sigma).unwrap();
        let k_grid: Vec<f64> = (0..400).map(|i| m / 2.0 + i as f64 * 0.25).collect();
        for factor in [0.5, 1.0, 2.0] {
            let hit = sharpness_probe(sigma, factor * tau_star, r_star + 0.05, &k_grid).unwrap();
            assert!(hit.is_some(), "no destabilizing gain at tau factor {factor}");
        }
    }

    #[test]
    fn certificate_json_roundtrip() {
        let cert = quasi_bounds(1.0, 1.0, 2.0 / 3.0);
        let v = cert.to_json();
        assert_eq!(v["theorem_id"], "T1_quasi");
        assert_eq!(v["verdict"], "certified");
        assert_eq!(v["bound_L"], "inf");
    }
}

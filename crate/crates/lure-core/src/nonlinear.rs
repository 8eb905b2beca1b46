//! Nonlinearity library with sector/quasi-convexity samplers, fixed-step
//! RK4 simulation of Lur'e and damped-Hamiltonian systems, decay-rate
//! estimation, and discrete Lyapunov monotonicity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dissipativity::CandidateStorage;
use crate::error::{Error, Result};
use crate::linalg::{self, RVec};
use crate::oscillator::OscillatorParams;
use crate::systems::LtiSystem;

/// State-norm threshold beyond which a simulation is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Samples with norm below this floor are excluded from rate fits.
pub const NORM_FLOOR: f64 = 1e-12;

/// Sector [m, L]: Re<m w - phi(w), w - phi(w)/L> <= 0, with the L^{-1}
/// term dropped when L is infinite.
#[derive(Debug, Clone, Copy)]
pub struct Sector {
    pub m: f64,
    pub l: f64,
}

impl Sector {
    pub fn new(m: f64, l: f64) -> Result<Self> {
        if !m.is_finite() || l.is_nan() || l < m {
            return Err(Error::InvalidParameter(format!("invalid sector [{m}, {l}]")));
        }
        Ok(Self { m, l })
    }

    /// The quadratic sector form; nonpositive for members.
    pub fn form_value(&self, w: &RVec, phi: &RVec) -> f64 {
        let lhs = w * self.m - phi;
        let rhs = if self.l.is_finite() { w - phi / self.l } else { w.clone() };
        lhs.dot(&rhs)
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a > 20.0 {
        // Asymptotic branch; the ln_1p term is below machine precision
        // relative to a, but kept for continuity.
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    } else {
        // cosh(x) - 1 = 2 sinh^2(x/2) avoids the cancellation of
        // ln(cosh(x)) near 0, keeping the relative error bounded.
        (2.0 * (0.5 * a).sinh().powi(2)).ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Convex parts available for the quasi-convex potential catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexPart {
    /// h(q) = sum_i log cosh(q_i); gradient tanh, slopes in [0, 1].
    LogCosh,
    /// h(q) = sum_i (softplus(q_i) - ln 2 - q_i/2); gradient
    /// sigmoid(q_i) - 1/2, slopes in [0, 1/4].
    SoftplusBlend,
}

#[derive(Debug, Clone)]
enum Kind {
    Linear { k: f64 },
    SectorSaturating { m: f64, l: f64 },
    TanhShift { m: f64 },
    QuasiConvexPotential { m: f64, part: ConvexPart },
    TimeVarying { a: Box<Nonlinearity>, b: Box<Nonlinearity>, freq_hz: f64 },
}

/// Static (or 1-parameter time-varying) nonlinearity with phi(0) = 0,
/// a declared sector, and a potential when one exists in closed form.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: Kind,
    sector: Sector,
}

impl Nonlinearity {
    /// phi(w) = k w, sector [k, k].
    pub fn linear(k: f64) -> Result<Self> {
        Ok(Self { kind: Kind::Linear { k }, sector: Sector::new(k, k)? })
    }

    /// phi(w) = m w + (L - m) w^3/(1 + w^2) componentwise, sector [m, L).
    pub fn sector_saturating(m: f64, l: f64) -> Result<Self> {
        if !(l > m) {
            return Err(Error::InvalidParameter(format!("need L > m, got L = {l}, m = {m}")));
        }
        Ok(Self { kind: Kind::SectorSaturating { m, l }, sector: Sector::new(m, l)? })
    }

    /// phi(w) = m w + tanh(w) componentwise, sector [m, m + 1].
    pub fn tanh_shift(m: f64) -> Result<Self> {
        Ok(Self { kind: Kind::TanhShift { m }, sector: Sector::new(m, m + 1.0)? })
    }

    /// Gradient of f(q) = (m/2)|q|^2 + h(q) with convex h from the
    /// catalog; quasi-strong convexity with parameter m follows from
    /// h(w) - <grad h(w), w> <= h(0) = 0 for convex h.
    pub fn quasi_convex_potential(m: f64, part: ConvexPart) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("need m > 0, got {m}")));
        }
        let upper = match part {
            ConvexPart::LogCosh => m + 1.0,
            ConvexPart::SoftplusBlend => m + 0.25,
        };
        Ok(Self {
            kind: Kind::QuasiConvexPotential { m, part },
            sector: Sector::new(m, upper)?,
        })
    }

    /// phi(t, w) = theta(t) phi_a(w) + (1 - theta(t)) phi_b(w) with
    /// theta = (1 + sin(2 pi f t))/2; the declared sector is the hull.
    pub fn time_varying(a: Nonlinearity, b: Nonlinearity, freq_hz: f64) -> Result<Self> {
        if !(freq_hz > 0.0) {
            return Err(Error::InvalidParameter("frequency must be positive".into()));
        }
        let sector = Sector::new(a.sector.m.min(b.sector.m), a.sector.l.max(b.sector.l))?;
        Ok(Self { kind: Kind::TimeVarying { a: Box::new(a), b: Box::new(b), freq_hz }, sector })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn is_time_varying(&self) -> bool {
        matches!(self.kind, Kind::TimeVarying { .. })
    }

    /// phi(t, w); static kinds ignore t.
    pub fn eval(&self, t: f64, w: &RVec) -> RVec {
        match &self.kind {
            Kind::Linear { k } => w * *k,
            Kind::SectorSaturating { m, l } => {
                w.map(|x| m * x + (l - m) * x * x * x / (1.0 + x * x))
            }
            Kind::TanhShift { m } => w.map(|x| m * x + x.tanh()),
            Kind::QuasiConvexPotential { m, part } => match part {
                ConvexPart::LogCosh => w.map(|x| m * x + x.tanh()),
                ConvexPart::SoftplusBlend => w.map(|x| m * x + sigmoid(x) - 0.5),
            },
            Kind::TimeVarying { a, b, freq_hz } => {
                let theta = 0.5 * (1.0 + (2.0 * std::f64::consts::PI * freq_hz * t).sin());
                a.eval(t, w) * theta + b.eval(t, w) * (1.0 - theta)
            }
        }
    }

    /// Potential f with f(0) = 0 whose gradient is this nonlinearity,
    /// when one exists in closed form.
    pub fn potential(&self, q: &RVec) -> Option<f64> {
        match &self.kind {
            Kind::Linear { k } => Some(0.5 * k * q.norm_squared()),
            Kind::TanhShift { m } => {
                Some(0.5 * m * q.norm_squared() + q.iter().map(|&x| ln_cosh(x)).sum::<f64>())
            }
            Kind::QuasiConvexPotential { m, part } => {
                let h: f64 = match part {
                    ConvexPart::LogCosh => q.iter().map(|&x| ln_cosh(x)).sum(),
                    // softplus(x) - ln 2 - x/2 = ln cosh(x/2), which is the
                    // cancellation-free form near 0.
                    ConvexPart::SoftplusBlend => q.iter().map(|&x| ln_cosh(0.5 * x)).sum(),
                };
                Some(0.5 * m * q.norm_squared() + h)
            }
            _ => None,
        }
    }
}

/// Builds a catalog member by name; `l` is only consulted by kinds that
/// need an upper endpoint.
pub fn make_nonlinearity(kind: &str, m: f64, l: f64) -> Result<Nonlinearity> {
    match kind.to_ascii_lowercase().as_str() {
        "linear" => Nonlinearity::linear(m),
        "sector_saturating" => Nonlinearity::sector_saturating(m, l),
        "tanh_shift" => Nonlinearity::tanh_shift(m),
        "quasi_logcosh" => Nonlinearity::quasi_convex_potential(m, ConvexPart::LogCosh),
        "quasi_softplus" => Nonlinearity::quasi_convex_potential(m, ConvexPart::SoftplusBlend),
        "time_varying" => Nonlinearity::time_varying(
            Nonlinearity::linear(m)?,
            Nonlinearity::sector_saturating(m, l)?,
            1.0,
        ),
        other => Err(Error::Parse(format!("unknown nonlinearity kind: {other}"))),
    }
}

/// Sampled trajectory of a simulation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<RVec>,
    pub inputs: Option<Vec<RVec>>,
    pub dt: f64,
    pub integrator: String,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<RVec>,
        inputs: Option<Vec<RVec>>,
        dt: f64,
        integrator: &str,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch("times and states lengths differ".into()));
        }
        if let Some(u) = &inputs {
            if u.len() != times.len() {
                return Err(Error::DimensionMismatch("inputs length differs".into()));
            }
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        Ok(Self { times, states, inputs, dt, integrator: integrator.into() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// CSV with columns t, z_1..z_n, u_1..u_k, norm_z, and optionally
    /// a Lyapunov value per sample.
    pub fn to_csv(&self, lyapunov: Option<&dyn Fn(&RVec) -> f64>) -> String {
        let n = self.states.first().map_or(0, |z| z.len());
        let k = self
            .inputs
            .as_ref()
            .and_then(|u| u.first())
            .map_or(0, |u| u.len());
        let mut head = vec!["t".to_string()];
        head.extend((1..=n).map(|i| format!("z_{i}")));
        head.extend((1..=k).map(|i| format!("u_{i}")));
        head.push("norm_z".into());
        if lyapunov.is_some() {
            head.push("lyapunov_V".into());
        }
        let mut out = head.join(",");
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            let z = &self.states[i];
            let mut row = vec![format!("{t:.12e}")];
            row.extend(z.iter().map(|v| format!("{v:.12e}")));
            if let Some(us) = &self.inputs {
                row.extend(us[i].iter().map(|v| format!("{v:.12e}")));
            }
            row.push(format!("{:.12e}", z.norm()));
            if let Some(v) = lyapunov {
                row.push(format!("{:.12e}", v(z)));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Report of a randomized condition check.
#[derive(Debug, Clone, Copy)]
pub struct SampleReport {
    pub violations: usize,
    /// Largest observed value of the (nonpositive-when-satisfied) form.
    pub worst_margin: f64,
}

fn sample_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> RVec {
    loop {
        let v = RVec::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Evaluates the sector form at random points in the ball of the given
/// radius; positive values (beyond a scaled tolerance) are violations.
pub fn sector_membership_sample<F: Fn(&RVec) -> RVec>(
    phi: F,
    dim: usize,
    sector: Sector,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<SampleReport> {
    if n_samples < 1 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..n_samples {
        let w = sample_ball(&mut rng, dim, radius);
        let val = sector.form_value(&w, &phi(&w));
        worst = worst.max(val);
        if val > 1e-9 * (1.0 + w.norm_squared()) {
            violations += 1;
        }
    }
    Ok(SampleReport { violations, worst_margin: worst })
}

/// Checks f(w) - <grad f(w), w> + (m/2)|w|^2 <= f(0) at random points.
pub fn quasi_convexity_sample<F, G>(
    f: F,
    grad: G,
    m: f64,
    dim: usize,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<SampleReport>
where
    F: Fn(&RVec) -> f64,
    G: Fn(&RVec) -> RVec,
{
    if n_samples < 1 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = f(&RVec::zeros(dim));
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..n_samples {
        let w = sample_ball(&mut rng, dim, radius);
        let val = f(&w) - grad(&w).dot(&w) + 0.5 * m * w.norm_squared() - f0;
        worst = worst.max(val);
        if val > 1e-9 * (1.0 + w.norm_squared()) {
            violations += 1;
        }
    }
    Ok(SampleReport { violations, worst_margin: worst })
}

fn rk4<D: Fn(f64, &RVec) -> RVec>(
    deriv: D,
    z0: &RVec,
    t_final: f64,
    dt: f64,
    integrator: &str,
    record_input: Option<&dyn Fn(f64, &RVec) -> RVec>,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    if t_final < 10.0 * dt {
        return Err(Error::InvalidParameter("need T >= 10 dt".into()));
    }
    let n_steps = (t_final / dt).ceil() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut inputs = record_input.map(|_| Vec::with_capacity(n_steps + 1));
    let mut z = z0.clone();
    let mut t = 0.0;
    for step in 0..=n_steps {
        times.push(t);
        states.push(z.clone());
        if let (Some(us), Some(rec)) = (&mut inputs, record_input) {
            us.push(rec(t, &z));
        }
        if z.norm() > DIVERGENCE_THRESHOLD {
            let partial = Trajectory::new(times, states, inputs, dt, integrator)?;
            return Err(Error::DivergenceDetected {
                time: t,
                threshold: DIVERGENCE_THRESHOLD,
                partial: Box::new(partial),
            });
        }
        if step == n_steps {
            break;
        }
        let k1 = deriv(t, &z);
        let k2 = deriv(t + 0.5 * dt, &(&z + &k1 * (0.5 * dt)));
        let k3 = deriv(t + 0.5 * dt, &(&z + &k2 * (0.5 * dt)));
        let k4 = deriv(t + dt, &(&z + &k3 * dt));
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        t = (step + 1) as f64 * dt;
    }
    Trajectory::new(times, states, inputs, dt, integrator)
}

/// Fixed-step RK4 integration of dz/dt = Az + B phi(t, Cz), recording
/// u = phi(t, Cz) at sample times.
pub fn simulate_lure(
    sys: &LtiSystem,
    phi: &Nonlinearity,
    z0: &RVec,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !sys.is_real() {
        return Err(Error::InvalidParameter("simulation requires a real system".into()));
    }
    if z0.len() != sys.state_dim() {
        return Err(Error::DimensionMismatch("initial state dimension".into()));
    }
    let a = linalg::real_part(sys.a());
    let b = linalg::real_part(sys.b());
    let cm = linalg::real_part(sys.c());
    if cm.nrows() != sys.input_dim() {
        return Err(Error::DimensionMismatch("phi output must match input dimension".into()));
    }
    let deriv = |t: f64, z: &RVec| &a * z + &b * phi.eval(t, &(&cm * z));
    let record = |t: f64, z: &RVec| phi.eval(t, &(&cm * z));
    rk4(deriv, z0, t_final, dt, "rk4-lure", Some(&record))
}

/// Integrates the damped Hamiltonian form directly in (q, p) with the
/// unshifted gradient: dq/dt = p - tau grad f(q), dp/dt = -2 sigma p - grad f(q).
pub fn simulate_hamiltonian(
    params: &OscillatorParams,
    grad_f: &Nonlinearity,
    z0: &RVec,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let d = params.d;
    if z0.len() != 2 * d {
        return Err(Error::DimensionMismatch(format!(
            "expected state dimension {}, got {}",
            2 * d,
            z0.len()
        )));
    }
    let (sigma, tau) = (params.sigma, params.tau);
    let deriv = |t: f64, z: &RVec| {
        let q = z.rows(0, d).into_owned();
        let p = z.rows(d, d).into_owned();
        let g = grad_f.eval(t, &q);
        let mut out = RVec::zeros(2 * d);
        out.rows_mut(0, d).copy_from(&(&p - &g * tau));
        out.rows_mut(d, d).copy_from(&(-&p * (2.0 * sigma) - &g));
        out
    };
    let record = |t: f64, z: &RVec| grad_f.eval(t, &z.rows(0, d).into_owned());
    rk4(deriv, z0, t_final, dt, "rk4-hamiltonian", Some(&record))
}

/// Exponential fit |z(t)| ~ C e^{-r t} over a window of the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct RateEstimate {
    pub r_hat: f64,
    pub fit_window: (f64, f64),
    pub residual: f64,
    /// Constant with |z(t)| <= C |z(0)| e^{-r_hat t} over the trajectory.
    pub amplitude_c: f64,
}

/// Least-squares slope of log |z(t)| over the fractional window
/// (default [0.2, 0.8] of the span), skipping samples below the norm floor.
pub fn estimate_decay_rate(traj: &Trajectory, window: Option<(f64, f64)>) -> Result<RateEstimate> {
    if traj.len() < 3 {
        return Err(Error::TrajectoryTooShort(format!("{} samples", traj.len())));
    }
    let (f_lo, f_hi) = window.unwrap_or((0.2, 0.8));
    if !(0.0..1.0).contains(&f_lo) || !(f_lo..=1.0).contains(&f_hi) {
        return Err(Error::InvalidParameter("window fractions must satisfy 0 <= lo < hi <= 1".into()));
    }
    let t0 = traj.times[0];
    let span = traj.duration();
    let (t_lo, t_hi) = (t0 + f_lo * span, t0 + f_hi * span);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (t, z) in traj.times.iter().zip(traj.states.iter()) {
        let norm = z.norm();
        if *t >= t_lo && *t <= t_hi && norm >= NORM_FLOOR {
            pts.push((*t, norm.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::RateUnresolvable(
            "all window samples below the norm floor (decay too fast; r_hat = +inf)".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::RateUnresolvable("degenerate time samples in fit window".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(t, y)| (y - slope * t - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let r_hat = -slope;
    let z0_norm = traj.states[0].norm();
    if z0_norm < NORM_FLOOR {
        return Err(Error::RateUnresolvable("initial state norm below the floor".into()));
    }
    let amplitude_c = traj
        .times
        .iter()
        .zip(traj.states.iter())
        .map(|(t, z)| z.norm() * (r_hat * (t - t0)).exp() / z0_norm)
        .fold(0.0, f64::max);
    Ok(RateEstimate { r_hat, fit_window: (t_lo, t_hi), residual, amplitude_c })
}

/// Discrete check of d/dt V <= -2 r V along a trajectory, with
/// V(z) = <Pz, z> + f(q) - f(0) (q = first half of the state).
///
/// Returns the max over consecutive samples of the relative increase of
/// s(t) = e^{2 r t} V(z(t)); values <= tol certify the inequality.
pub fn lyapunov_monotonicity(
    traj: &Trajectory,
    p: &CandidateStorage,
    potential: Option<&dyn Fn(&RVec) -> f64>,
    r: f64,
) -> Result<f64> {
    let n = p.p().nrows();
    if traj.states.first().map_or(0, |z| z.len()) != n {
        return Err(Error::DimensionMismatch("storage dimension vs state dimension".into()));
    }
    if traj.len() < 2 {
        return Err(Error::TrajectoryTooShort("need at least 2 samples".into()));
    }
    let d = n / 2;
    let f0 = potential.map(|f| f(&RVec::zeros(d)));
    let value = |t: f64, z: &RVec| -> f64 {
        let zc = linalg::vec_to_complex(z);
        let mut v = zc.dotc(&(p.p() * &zc)).re;
        if let (Some(f), Some(f0)) = (potential, f0) {
            v += f(&z.rows(0, d).into_owned()) - f0;
        }
        (2.0 * r * t).exp() * v
    };
    let mut max_violation = f64::NEG_INFINITY;
    let mut prev = value(traj.times[0], &traj.states[0]);
    for i in 1..traj.len() {
        let cur = value(traj.times[i], &traj.states[i]);
        max_violation = max_violation.max((cur - prev) / prev.abs().max(1.0));
        prev = cur;
    }
    Ok(max_violation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::build_oscillator;
    use approx::assert_relative_eq;

    fn osc(m: f64, l: f64, sigma: f64, tau: f64, r: f64) -> OscillatorParams {
        OscillatorParams::new(1, m, l, sigma, tau, r).unwrap()
    }

    fn v(data: &[f64]) -> RVec {
        RVec::from_row_slice(data)
    }

    #[test]
    fn catalog_fixes_origin() {
        let members = [
            Nonlinearity::linear(1.3).unwrap(),
            Nonlinearity::sector_saturating(1.0, 3.0).unwrap(),
            Nonlinearity::tanh_shift(1.0).unwrap(),
            Nonlinearity::quasi_convex_potential(1.0, ConvexPart::LogCosh).unwrap(),
            Nonlinearity::quasi_convex_potential(1.0, ConvexPart::SoftplusBlend).unwrap(),
            make_nonlinearity("time_varying", 1.0, 2.0).unwrap(),
        ];
        for phi in &members {
            for t in [0.0, 0.37] {
                assert_eq!(phi.eval(t, &v(&[0.0, 0.0])).norm(), 0.0);
            }
        }
    }

    #[test]
    fn tanh_shift_slope_at_origin() {
        let phi = Nonlinearity::tanh_shift(1.0).unwrap();
        let h = 1e-6;
        let slope = phi.eval(0.0, &v(&[h]))[0] / h;
        assert_relative_eq!(slope, 2.0, epsilon = 1e-6);
        let s = phi.sector();
        assert_eq!((s.m, s.l), (1.0, 2.0));
    }

    #[test]
    fn declared_sectors_hold_on_samples() {
        let members = [
            Nonlinearity::linear(0.8).unwrap(),
            Nonlinearity::sector_saturating(0.5, 2.5).unwrap(),
            Nonlinearity::tanh_shift(1.0).unwrap(),
            Nonlinearity::quasi_convex_potential(0.7, ConvexPart::LogCosh).unwrap(),
            Nonlinearity::quasi_convex_potential(0.7, ConvexPart::SoftplusBlend).unwrap(),
        ];
        for phi in &members {
            let rep = sector_membership_sample(
                |w| phi.eval(0.0, w),
                2,
                phi.sector(),
                10_000,
                10.0,
                7,
            )
            .unwrap();
            assert_eq!(rep.violations, 0, "sector [{}, {}]", phi.sector().m, phi.sector().l);
        }
    }

    #[test]
    fn sector_sampler_cases() {
        // Identity in sector [1, 1]: equality, never positive.
        let rep =
            sector_membership_sample(|w| w.clone(), 1, Sector::new(1.0, 1.0).unwrap(), 100, 5.0, 1)
                .unwrap();
        assert!(rep.worst_margin <= 1e-12);

        // w^2 is not in [0, inf] (w^3 < 0 for w < 0).
        let rep = sector_membership_sample(
            |w| w.map(|x| x * x),
            1,
            Sector::new(0.0, f64::INFINITY).unwrap(),
            1000,
            2.0,
            2,
        )
        .unwrap();
        assert!(rep.violations > 0);
    }

    #[test]
    fn sector_shift_identity() {
        // If grad f passes [m, L], the shifted grad passes [0, L - m].
        let phi = Nonlinearity::quasi_convex_potential(1.0, ConvexPart::LogCosh).unwrap();
        let m = phi.sector().m;
        let rep = sector_membership_sample(
            |w| phi.eval(0.0, w) - w * m,
            2,
            Sector::new(0.0, phi.sector().l - m).unwrap(),
            10_000,
            10.0,
            11,
        )
        .unwrap();
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn quasi_convexity_cases() {
        // Pure quadratic: equality everywhere.
        let rep = quasi_convexity_sample(
            |q| 0.5 * q.norm_squared(),
            |q| q.clone(),
            1.0,
            2,
            1000,
            5.0,
            3,
        )
        .unwrap();
        assert!(rep.violations == 0 && rep.worst_margin.abs() <= 1e-9);

        // Catalog members satisfy the inequality.
        for part in [ConvexPart::LogCosh, ConvexPart::SoftplusBlend] {
            let phi = Nonlinearity::quasi_convex_potential(1.0, part).unwrap();
            let rep = quasi_convexity_sample(
                |q| phi.potential(q).unwrap(),
                |q| phi.eval(0.0, q),
                1.0,
                2,
                10_000,
                10.0,
                4,
            )
            .unwrap();
            assert_eq!(rep.violations, 0, "{part:?}");
        }

        // f = (m/2) q^2 - q^4 violates quasi-convexity at large |q|.
        let rep = quasi_convexity_sample(
            |q| 0.5 * q.norm_squared() - q[0].powi(4),
            |q| v(&[q[0] - 4.0 * q[0].powi(3)]),
            1.0,
            1,
            1000,
            2.0,
            5,
        )
        .unwrap();
        assert!(rep.violations > 0);
    }

    #[test]
    fn linear_decay_bound() {
        // phi = 0 on a Hurwitz system: |z(T)| <= |z0| e^{(abscissa + eps) T}.
        let (sys, _) = build_oscillator(&osc(1.0, 2.0, 1.0, 0.0, 0.5)).unwrap();
        let phi = Nonlinearity::linear(0.0).unwrap();
        let z0 = v(&[1.0, -0.5]);
        let traj = simulate_lure(&sys, &phi, &z0, 10.0, 1e-3).unwrap();
        let abscissa = crate::systems::spectral_abscissa(sys.a()).unwrap();
        let bound = z0.norm() * ((abscissa + 0.05) * 10.0).exp();
        assert!(traj.states.last().unwrap().norm() <= bound.max(1e-3));
    }

    #[test]
    fn critically_damped_closed_form() {
        // Linear gradient k = m = 1, sigma = 1, tau = 0:
        // q(t) = (q0 + (v0 + q0) t) e^{-t}.
        let params = osc(1.0, 1.0 + 1e-9, 1.0, 0.0, 0.5);
        let phi = Nonlinearity::linear(1.0).unwrap();
        let traj = simulate_hamiltonian(&params, &phi, &v(&[1.0, 0.0]), 5.0, 1e-3).unwrap();
        for (t, z) in traj.times.iter().zip(traj.states.iter()).step_by(500) {
            let q = (1.0 + t) * (-t).exp();
            let p = -t * (-t).exp();
            assert!((z[0] - q).abs() < 1e-6, "q mismatch at t = {t}");
            assert!((z[1] - p).abs() < 1e-6, "p mismatch at t = {t}");
        }
    }

    #[test]
    fn rk4_fourth_order() {
        let params = osc(1.0, 1.0 + 1e-9, 1.0, 0.0, 0.5);
        let phi = Nonlinearity::linear(1.0).unwrap();
        let exact = |t: f64| (1.0 + t) * (-t).exp();
        let err = |dt: f64| {
            let traj = simulate_hamiltonian(&params, &phi, &v(&[1.0, 0.0]), 5.0, dt).unwrap();
            let (t, z) = (traj.times.last().unwrap(), traj.states.last().unwrap());
            (z[0] - exact(*t)).abs()
        };
        let ratio = err(0.05) / err(0.025);
        assert!((8.0..40.0).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn hamiltonian_energy_nonincreasing() {
        let params = osc(1.0, 2.0, 0.8, 0.4, 0.5);
        let phi = Nonlinearity::quasi_convex_potential(1.0, ConvexPart::LogCosh).unwrap();
        let traj = simulate_hamiltonian(&params, &phi, &v(&[1.2, -0.7]), 15.0, 1e-3).unwrap();
        let energy = |z: &RVec| 0.5 * z[1] * z[1] + phi.potential(&v(&[z[0]])).unwrap();
        let mut prev = energy(&traj.states[0]);
        for z in &traj.states[1..] {
            let cur = energy(z);
            assert!(cur <= prev + 1e-9, "energy increased: {prev} -> {cur}");
            prev = cur;
        }
    }

    #[test]
    fn divergence_detected() {
        let sys = LtiSystem::from_real_abc(
            &linalg::RMat::from_row_slice(1, 1, &[2.0]),
            &linalg::RMat::from_row_slice(1, 1, &[1.0]),
            &linalg::RMat::from_row_slice(1, 1, &[1.0]),
        )
        .unwrap();
        let phi = Nonlinearity::linear(0.0).unwrap();
        let err = simulate_lure(&sys, &phi, &v(&[1.0]), 20.0, 1e-2).unwrap_err();
        match err {
            Error::DivergenceDetected { time, partial, .. } => {
                assert!(time > 10.0 && time < 20.0);
                assert!(!partial.is_empty());
            }
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn synthetic_rate_fit() {
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let states: Vec<RVec> = times.iter().map(|&t| v(&[(-2.0 * t).exp()])).collect();
        let traj = Trajectory::new(times, states, None, 0.01, "synthetic").unwrap();
        let est = estimate_decay_rate(&traj, None).unwrap();
        assert_relative_eq!(est.r_hat, 2.0, epsilon = 1e-6);
        assert!(est.residual < 1e-9);
        assert!(est.amplitude_c <= 1.0 + 1e-9);
    }

    #[test]
    fn critically_damped_rate() {
        // Double root at -1: |z| ~ t e^{-t}, so the fit needs a late
        // window (and a large initial scale to stay above the norm
        // floor) for the polynomial factor to contribute < 0.02.
        let params = osc(1.0, 1.0 + 1e-9, 1.0, 0.0, 0.5);
        let phi = Nonlinearity::linear(1.0).unwrap();
        // The t e^{-t} envelope biases the log-slope by about 1/t_mean;
        // at a window centered near t = 52 that is just under 0.02.
        let z0 = v(&[1.0, 0.3]) * 1e11;
        let traj = simulate_hamiltonian(&params, &phi, &z0, 60.0, 1e-3).unwrap();
        let est = estimate_decay_rate(&traj, Some((0.8, 0.95))).unwrap();
        assert!((0.98..=1.001).contains(&est.r_hat), "r_hat = {}", est.r_hat);
    }

    #[test]
    fn rate_unresolvable_when_flat_zero() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let states: Vec<RVec> = times.iter().map(|_| v(&[0.0])).collect();
        let traj = Trajectory::new(times, states, None, 0.1, "zeros").unwrap();
        assert!(matches!(estimate_decay_rate(&traj, None), Err(Error::RateUnresolvable(_))));
    }

    #[test]
    fn lyapunov_monotone_linear() {
        // phi = 0, V = |z|^2 with a normal Hurwitz A: decay at rate 1.
        let sys = LtiSystem::from_real_abc(
            &linalg::RMat::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, -3.0]),
            &linalg::RMat::from_row_slice(2, 1, &[0.0, 1.0]),
            &linalg::RMat::from_row_slice(1, 2, &[1.0, 0.0]),
        )
        .unwrap();
        let phi = Nonlinearity::linear(0.0).unwrap();
        let traj = simulate_lure(&sys, &phi, &v(&[1.0, 1.0]), 5.0, 1e-3).unwrap();
        let p = CandidateStorage::from_real(&linalg::RMat::identity(2, 2)).unwrap();
        let viol = lyapunov_monotonicity(&traj, &p, None, 1.0).unwrap();
        assert!(viol <= 1e-6, "violation {viol}");
        // Inflated rate must be falsified.
        let viol = lyapunov_monotonicity(&traj, &p, None, 3.5).unwrap();
        assert!(viol > 0.0);
    }

    #[test]
    fn csv_shape() {
        let params = osc(1.0, 2.0, 1.0, 0.0, 0.5);
        let phi = Nonlinearity::tanh_shift(0.0).unwrap();
        let traj = simulate_hamiltonian(&params, &phi, &v(&[1.0, 0.0]), 1.0, 0.1).unwrap();
        let csv = traj.to_csv(None);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,z_1,z_2,u_1,norm_z");
        assert_eq!(csv.lines().count(), traj.len() + 1);
    }
}

//! Digital precoder/combiner optimization and the energy-efficiency outer
//! loop.
//!
//! Once the phase-shifter banks are fixed, the link collapses to an
//! equivalent square MIMO channel whose entry `(m, n)` is
//! `g_m^H H_{m,n} f_n`, with colored noise `sigma^2 G_R^H G_R`. On that
//! channel a weighted-MMSE surrogate ties the achievable rate to an MSE
//! matrix, and block-coordinate ascent cycles three closed-form updates:
//! the MMSE combiner, the weight (inverse MSE), and a regularized precoder
//! whose Lagrange multiplier comes from a scalar bisection on the power
//! constraint. A Dinkelbach outer loop turns the rate-per-watt ratio into a
//! sequence of subtractive problems and drives their optimal value to zero.
//!
//! The same machinery runs the fully-digital baseline: the "effective"
//! channel is then the physical one, the noise is white and the power model
//! charges a full RF chain per antenna.
//!
//! The surrogate objective is kept in natural log throughout; rates and
//! energy efficiencies are converted to bits only when reported.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analog::{AnalogBeamformer, ConvergenceTrace, Side};
use crate::channel::{ChannelMatrix, SystemDims};
use crate::error::{Error, Result};
use crate::linalg::{
    eye, frob_sq, herm_eigen, hermitian_deviation, hermitize, inv_hpd, inv_sqrt_hpd, lndet_hpd,
    solve_hpd, trace_product_re, C64,
};
use crate::metrics::{spectral_efficiency_direct, Metrics, PowerModel};

/// Eigenvalue floor applied to the MSE matrix before inversion when a trial
/// drives it numerically singular (very high rate).
pub const MSE_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Equivalent square channel seen by the baseband processors.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    entries: DMatrix<C64>,
    noise_cov: DMatrix<C64>,
    power_scale: f64,
    sigma_n_sq: f64,
}

impl EffectiveChannel {
    pub fn new(
        entries: DMatrix<C64>,
        noise_cov: DMatrix<C64>,
        power_scale: f64,
        sigma_n_sq: f64,
    ) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::invalid("effective channel must be square"));
        }
        if noise_cov.nrows() != n || noise_cov.ncols() != n {
            return Err(Error::invalid("noise covariance must match the channel"));
        }
        if hermitian_deviation(&noise_cov) > 1e-12 {
            return Err(Error::invalid("noise covariance must be Hermitian"));
        }
        if !(power_scale > 0.0) || !(sigma_n_sq > 0.0) {
            return Err(Error::invalid("power scale and noise power must be positive"));
        }
        Ok(Self {
            entries,
            noise_cov,
            power_scale,
            sigma_n_sq,
        })
    }

    /// Wrap a physical channel for the fully-digital baseline: identity
    /// noise covariance scaled by `sigma_n_sq` and unit power scale.
    pub fn from_full_channel(h: &ChannelMatrix, sigma_n_sq: f64) -> Result<Self> {
        let n = h.dims().total_antennas();
        Self::new(
            h.entries().clone(),
            eye(n).scale(sigma_n_sq),
            1.0,
            sigma_n_sq,
        )
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    #[inline]
    pub fn noise_cov(&self) -> &DMatrix<C64> {
        &self.noise_cov
    }

    #[inline]
    pub fn power_scale(&self) -> f64 {
        self.power_scale
    }

    #[inline]
    pub fn sigma_n_sq(&self) -> f64 {
        self.sigma_n_sq
    }
}

/// Baseband matrices produced by one inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalBeamformerSet {
    pub precoder: DMatrix<C64>,
    pub combiner: DMatrix<C64>,
    pub weight: DMatrix<C64>,
    pub whitener: DMatrix<C64>,
    pub mse: DMatrix<C64>,
}

/// State of the fractional-programming outer loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachState {
    /// Auxiliary ratio variable, nats/Hz per watt.
    pub lambda_ee: f64,
    /// Final subtractive objective value.
    pub inner_objective: f64,
    /// `(lambda_ee, inner_objective)` per outer iteration.
    pub outer_trace: Vec<(f64, f64)>,
    pub converged: bool,
}

/// Outcome of the power-constraint multiplier search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub mu_tilde: f64,
    /// Transmit power at `mu_tilde` minus the budget.
    pub constraint_residual: f64,
    /// Whether the power constraint is tight.
    pub active: bool,
}

/// Amplifier inefficiency and circuit power of one architecture, reduced to
/// the two numbers the solver needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerms {
    pub eta: f64,
    /// Signal-independent circuit power, both sides, watts.
    pub circuit: f64,
}

impl PowerTerms {
    pub fn hybrid(dims: SystemDims, pm: &PowerModel) -> Self {
        Self {
            eta: pm.eta,
            circuit: pm.hybrid_circuit(dims),
        }
    }

    pub fn digital(dims: SystemDims, pm: &PowerModel) -> Self {
        Self {
            eta: pm.eta,
            circuit: pm.digital_circuit(dims),
        }
    }

    /// Consumed power for a precoder with squared norm `precoder_energy`
    /// under radiated-power scale `scale`.
    #[inline]
    pub fn consumed(&self, scale: f64, precoder_energy: f64) -> f64 {
        self.eta * scale * precoder_energy + self.circuit
    }
}

/// Whether the outer ratio loop runs or the solver stops at the rate
/// surrogate (auxiliary variable pinned to zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    #[serde(alias = "ee")]
    EnergyEfficiency,
    #[serde(alias = "se")]
    SpectralEfficiency,
}

/// Tolerances and iteration caps for the digital solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub eps: f64,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub bisection_tol: f64,
    pub bisection_cap: usize,
    pub mode: SolverMode,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            inner_cap: 500,
            outer_cap: 50,
            bisection_tol: 1e-8,
            bisection_cap: 200,
            mode: SolverMode::EnergyEfficiency,
        }
    }
}

/// Non-fatal events collected during a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub inner_cap_hits: usize,
    pub outer_cap_hit: bool,
    pub weight_floor_events: usize,
}

impl Diagnostics {
    pub fn clean(&self) -> bool {
        self.inner_cap_hits == 0 && !self.outer_cap_hit && self.weight_floor_events == 0
    }
}

/// Result of one inner (fixed ratio variable) solve.
#[derive(Debug, Clone)]
pub struct InnerSolve {
    pub set: DigitalBeamformerSet,
    pub chi: f64,
    /// Surrogate numerator `-tr(WE) + ln|W| + n` in nats at the solution.
    pub surrogate_nats: f64,
    pub consumed_power: f64,
    pub trace: ConvergenceTrace,
    pub diagnostics: Diagnostics,
}

/// Result of a full digital-stage solve.
#[derive(Debug, Clone)]
pub struct DigitalSolve {
    pub set: DigitalBeamformerSet,
    pub state: DinkelbachState,
    pub metrics: Metrics,
    /// Energy efficiency in nats/Hz/J (metrics carry bits/Hz/J).
    pub ee_nats: f64,
    /// One inner trace per outer iteration.
    pub inner_traces: Vec<ConvergenceTrace>,
    pub diagnostics: Diagnostics,
}

/// Build the equivalent baseband channel for fixed phase-shifter banks.
///
/// Entry `(m, n)` is `g_m^H H_{m,n} f_n`; the noise covariance is
/// `sigma_n_sq * G_R^H G_R` and the power scale is
/// `antennas_per_subarray / total_antennas`.
pub fn effective_channel(
    h: &ChannelMatrix,
    precoder: &AnalogBeamformer,
    combiner: &AnalogBeamformer,
    sigma_n_sq: f64,
) -> Result<EffectiveChannel> {
    if precoder.side() != Side::Transmit || combiner.side() != Side::Receive {
        return Err(Error::invalid(
            "effective_channel expects a transmit precoder and a receive combiner",
        ));
    }
    if precoder.dims() != h.dims() || combiner.dims() != h.dims() {
        return Err(Error::invalid("beamformer dims do not match the channel"));
    }
    if !(sigma_n_sq > 0.0) {
        return Err(Error::invalid("sigma_n_sq must be positive"));
    }
    let nr = h.dims().n_subarrays;
    let mut entries = DMatrix::<C64>::zeros(nr, nr);
    for m in 0..nr {
        let g = combiner.steering_vector(m)?;
        for n in 0..nr {
            let f = precoder.steering_vector(n)?;
            entries[(m, n)] = (g.adjoint() * h.block(m, n)? * f)[(0, 0)];
        }
    }
    let g_mat = combiner.materialize();
    let mut noise_cov = g_mat.adjoint() * g_mat;
    hermitize(&mut noise_cov);
    noise_cov.scale_mut(sigma_n_sq);
    EffectiveChannel::new(entries, noise_cov, h.dims().power_scale(), sigma_n_sq)
}

/// Whitening filter `R^{-1/2}` for a positive definite noise covariance.
pub fn whitening(noise_cov: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    inv_sqrt_hpd(noise_cov, "noise covariance")
}

/// MMSE combiner `(H F F^H H^H + R)^{-1} H F` for a fixed precoder.
pub fn mmse_combiner(eff: &EffectiveChannel, f_b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = eff.side();
    if f_b.nrows() != n || f_b.ncols() != n {
        return Err(Error::invalid("precoder has the wrong dimensions"));
    }
    let hf = eff.entries() * f_b;
    let mut system = &hf * hf.adjoint() + eff.noise_cov();
    hermitize(&mut system);
    solve_hpd(&system, &hf, "MMSE system matrix")
}

/// MSE matrix `E = E[(G^H y - s)(G^H y - s)^H]` for arbitrary baseband
/// precoder and combiner:
/// `G^H H F F^H H^H G + G^H R G - G^H H F - F^H H^H G + I`.
pub fn mse_matrix(
    eff: &EffectiveChannel,
    f_b: &DMatrix<C64>,
    g_b: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let n = eff.side();
    for m in [f_b, g_b] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::invalid("beamformer has the wrong dimensions"));
        }
    }
    let ghf = g_b.adjoint() * eff.entries() * f_b;
    let mut e = &ghf * ghf.adjoint() + g_b.adjoint() * eff.noise_cov() * g_b
        - &ghf
        - ghf.adjoint()
        + eye(n);
    hermitize(&mut e);
    Ok(e)
}

/// Weight update `W = E^{-1}` for a positive definite MSE matrix.
pub fn weight_update(e_mmse: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    inv_hpd(e_mmse, "MSE matrix")
}

// Inverse with an eigenvalue floor; returns the inverse and whether any
// eigenvalue had to be clamped. The common well-conditioned case goes
// through Cholesky; the eigendecomposition only runs when the matrix is
// indefinite or close enough to singular that the floor matters.
fn floored_inverse(e: &DMatrix<C64>, floor: f64) -> (DMatrix<C64>, bool) {
    if let Ok(w) = inv_hpd(e, "mse") {
        let spectral_bound = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if spectral_bound <= 0.1 / floor {
            return (w, false);
        }
    }
    let (vals, vecs) = herm_eigen(e);
    let clamped = vals.iter().any(|&v| v < floor);
    let n = vals.len();
    let diag = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0 / vals[i].max(floor), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut w = &vecs * diag * vecs.adjoint();
    hermitize(&mut w);
    (w, clamped)
}

/// Regularized precoder update
/// `F = (H^H G W G^H H + mu_tilde I)^{-1} H^H G W`.
///
/// A zero right-hand side short-circuits to the zero precoder so degenerate
/// instances (zero channel, zero combiner) do not require an invertible
/// system.
pub fn precoder_update(
    eff: &EffectiveChannel,
    g_b: &DMatrix<C64>,
    w: &DMatrix<C64>,
    mu_tilde: f64,
) -> Result<DMatrix<C64>> {
    let n = eff.side();
    if mu_tilde < 0.0 {
        return Err(Error::invalid("mu_tilde must be >= 0"));
    }
    let b = g_b.adjoint() * eff.entries(); // G^H H
    let rhs = b.adjoint() * w; // H^H G W
    if frob_sq(&rhs) == 0.0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let mut system = b.adjoint() * w * &b;
    hermitize(&mut system);
    system += eye(n).scale(mu_tilde);
    solve_hpd(&system, &rhs, "regularized precoder system")
}

/// Choose the power multiplier: either the floor (constraint inactive) or
/// the root of the transmit-power equation found by bisection on
/// `[floor, sqrt(scale/P * tr Phi)]`.
pub fn solve_power_multiplier(
    eff: &EffectiveChannel,
    g_b: &DMatrix<C64>,
    w: &DMatrix<C64>,
    p: f64,
    floor: f64,
) -> Result<BisectionResult> {
    solve_power_multiplier_with(eff, g_b, w, p, floor, 1e-8, 200)
}

pub fn solve_power_multiplier_with(
    eff: &EffectiveChannel,
    g_b: &DMatrix<C64>,
    w: &DMatrix<C64>,
    p: f64,
    floor: f64,
    tol: f64,
    cap: usize,
) -> Result<BisectionResult> {
    if !(p > 0.0) {
        return Err(Error::invalid("power budget must be positive"));
    }
    if floor < 0.0 {
        return Err(Error::invalid("multiplier floor must be >= 0"));
    }
    let scale = eff.power_scale();
    let b = g_b.adjoint() * eff.entries(); // G^H H
    let rhs = b.adjoint() * w; // H^H G W
    if frob_sq(&rhs) == 0.0 {
        return Ok(BisectionResult {
            mu_tilde: floor,
            constraint_residual: -p,
            active: false,
        });
    }
    let mut a = b.adjoint() * w * &b;
    hermitize(&mut a);

    // Cheap inactive-constraint check: solve once at the floor and compare
    // against the budget; the eigendecomposition is only needed when the
    // constraint binds and the root must be bracketed.
    let shifted = &a + eye(a.nrows()).scale(floor);
    if let Some(chol) = shifted.cholesky() {
        let f_at_floor = chol.solve(&rhs);
        let power = scale * frob_sq(&f_at_floor);
        if power <= p {
            return Ok(BisectionResult {
                mu_tilde: floor,
                constraint_residual: power - p,
                active: false,
            });
        }
    }

    let (lambdas, omega) = herm_eigen(&a);
    // Phi = Omega^H (H^H G W)(H^H G W)^H Omega; only its diagonal matters.
    let c = omega.adjoint() * (b.adjoint() * w);
    let phis: Vec<f64> = (0..c.nrows())
        .map(|m| c.row(m).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let lambdas: Vec<f64> = lambdas.iter().map(|&l| l.max(0.0)).collect();

    let power_at = |mu: f64| -> f64 {
        scale
            * phis
                .iter()
                .zip(&lambdas)
                .map(|(&phi, &lam)| {
                    if phi == 0.0 {
                        0.0
                    } else {
                        phi / (lam + mu).powi(2)
                    }
                })
                .sum::<f64>()
    };

    let at_floor = power_at(floor);
    if at_floor <= p {
        return Ok(BisectionResult {
            mu_tilde: floor,
            constraint_residual: at_floor - p,
            active: false,
        });
    }

    let phi_sum: f64 = phis.iter().sum();
    let mut lo = floor;
    let mut hi = (scale / p * phi_sum).sqrt().max(floor + f64::MIN_POSITIVE);
    let mut mu = hi;
    for _ in 0..cap {
        mu = 0.5 * (lo + hi);
        let val = power_at(mu);
        if (val - p).abs() <= tol * p {
            return Ok(BisectionResult {
                mu_tilde: mu,
                constraint_residual: val - p,
                active: true,
            });
        }
        if val > p {
            lo = mu;
        } else {
            hi = mu;
        }
    }
    Err(Error::numeric(format!(
        "power bisection did not converge within {cap} iterations (mu={mu})"
    )))
}

/// Block-coordinate ascent on the subtractive surrogate for a fixed ratio
/// variable `lambda_ee`: cycle MMSE combiner, weight, and power-constrained
/// precoder until the objective moves by at most `opts.eps`.
pub fn inner_wmmse(
    eff: &EffectiveChannel,
    p: f64,
    lambda_ee: f64,
    power: &PowerTerms,
    opts: &SolverOptions,
) -> Result<InnerSolve> {
    if !(opts.eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if !(p > 0.0) {
        return Err(Error::invalid("power budget must be positive"));
    }
    let n = eff.side();
    let scale = eff.power_scale();
    let whitener = whitening(eff.noise_cov())?;

    // full-power scaled identity start: scale * tr(F F^H) = P
    let mut f_b = eye(n).scale((p / (scale * n as f64)).sqrt());
    let mut diagnostics = Diagnostics::default();
    let mut chi = 0.0;
    let mut surrogate = 0.0;
    let mut consumed = power.consumed(scale, frob_sq(&f_b));
    let mut values = Vec::new();
    let mut combiner = DMatrix::zeros(n, n);
    let mut weight = eye(n);
    let mut mse = eye(n);
    let mut converged = false;

    for _ in 0..opts.inner_cap {
        let previous = chi;
        combiner = mmse_combiner(eff, &f_b)?;
        // E^mmse = I - G^H H F for the freshly updated MMSE combiner
        let mut e_mmse = eye(n) - combiner.adjoint() * eff.entries() * &f_b;
        hermitize(&mut e_mmse);
        let (w, floored) = floored_inverse(&e_mmse, MSE_EIGENVALUE_FLOOR);
        if floored {
            diagnostics.weight_floor_events += 1;
        }
        weight = w;

        let floor = lambda_ee * power.eta * scale;
        let bis = solve_power_multiplier_with(
            eff,
            &combiner,
            &weight,
            p,
            floor,
            opts.bisection_tol,
            opts.bisection_cap,
        )?;
        f_b = precoder_update(eff, &combiner, &weight, bis.mu_tilde)?;

        mse = mse_matrix(eff, &f_b, &combiner)?;
        consumed = power.consumed(scale, frob_sq(&f_b));
        surrogate = -trace_product_re(&weight, &mse) + lndet_hpd(&weight, "weight matrix")?
            + n as f64;
        chi = surrogate - lambda_ee * consumed;
        values.push(chi);
        if (chi - previous).abs() <= opts.eps {
            converged = true;
            break;
        }
    }
    if !converged {
        diagnostics.inner_cap_hits += 1;
    }

    let iterations = values.len();
    Ok(InnerSolve {
        set: DigitalBeamformerSet {
            precoder: f_b,
            combiner,
            weight,
            whitener,
            mse,
        },
        chi,
        surrogate_nats: surrogate,
        consumed_power: consumed,
        trace: ConvergenceTrace {
            values,
            threshold: opts.eps,
            iterations,
        },
        diagnostics,
    })
}

fn solve_metrics(eff: &EffectiveChannel, set: &DigitalBeamformerSet, power: &PowerTerms) -> Result<Metrics> {
    let rate_bits = spectral_efficiency_direct(eff.entries(), &set.precoder, eff.noise_cov())?;
    let energy = frob_sq(&set.precoder);
    let consumed = power.consumed(eff.power_scale(), energy);
    Ok(Metrics::new(
        rate_bits,
        consumed,
        eff.power_scale() * energy,
        eff.sigma_n_sq(),
    ))
}

/// Full digital-stage solve.
///
/// In energy-efficiency mode this is the Dinkelbach iteration: starting at
/// `lambda_ee = 0`, solve the subtractive problem, update the ratio to
/// `surrogate / consumed_power`, and stop when the subtractive optimum is
/// within `eps` of zero. Spectral-efficiency mode runs a single inner solve
/// with the ratio pinned to zero.
pub fn dinkelbach_solve(
    eff: &EffectiveChannel,
    p: f64,
    power: &PowerTerms,
    opts: &SolverOptions,
) -> Result<DigitalSolve> {
    let mut diagnostics = Diagnostics::default();
    let mut inner_traces = Vec::new();

    if opts.mode == SolverMode::SpectralEfficiency {
        let inner = inner_wmmse(eff, p, 0.0, power, opts)?;
        diagnostics.inner_cap_hits += inner.diagnostics.inner_cap_hits;
        diagnostics.weight_floor_events += inner.diagnostics.weight_floor_events;
        let metrics = solve_metrics(eff, &inner.set, power)?;
        let ee_nats = metrics.energy_efficiency * std::f64::consts::LN_2;
        inner_traces.push(inner.trace);
        return Ok(DigitalSolve {
            set: inner.set,
            state: DinkelbachState {
                lambda_ee: 0.0,
                inner_objective: inner.chi,
                outer_trace: Vec::new(),
                converged: true,
            },
            metrics,
            ee_nats,
            inner_traces,
            diagnostics,
        });
    }

    let mut lambda_ee = 0.0;
    let mut outer_trace = Vec::new();
    let mut converged = false;
    let mut last: Option<InnerSolve> = None;
    for _ in 0..opts.outer_cap {
        let inner = inner_wmmse(eff, p, lambda_ee, power, opts)?;
        diagnostics.inner_cap_hits += inner.diagnostics.inner_cap_hits;
        diagnostics.weight_floor_events += inner.diagnostics.weight_floor_events;
        outer_trace.push((lambda_ee, inner.chi));
        inner_traces.push(inner.trace.clone());
        let chi = inner.chi;
        let ratio = inner.surrogate_nats / inner.consumed_power;
        last = Some(inner);
        if chi.abs() <= opts.eps {
            converged = true;
            break;
        }
        lambda_ee = ratio;
    }
    if !converged {
        diagnostics.outer_cap_hit = true;
    }
    let inner = last.expect("outer_cap >= 1 guarantees at least one inner solve");
    let metrics = solve_metrics(eff, &inner.set, power)?;
    let ee_nats = metrics.energy_efficiency * std::f64::consts::LN_2;
    Ok(DigitalSolve {
        set: inner.set,
        state: DinkelbachState {
            lambda_ee,
            inner_objective: inner.chi,
            outer_trace,
            converged,
        },
        metrics,
        ee_nats,
        inner_traces,
        diagnostics,
    })
}

/// Hybrid pipeline tail: effective channel from the phase-shifter banks,
/// then the digital solve under the hybrid power model.
pub fn hybrid_solve(
    h: &ChannelMatrix,
    precoder: &AnalogBeamformer,
    combiner: &AnalogBeamformer,
    p: f64,
    sigma_n_sq: f64,
    pm: &PowerModel,
    opts: &SolverOptions,
) -> Result<DigitalSolve> {
    let eff = effective_channel(h, precoder, combiner, sigma_n_sq)?;
    let power = PowerTerms::hybrid(h.dims(), pm);
    dinkelbach_solve(&eff, p, &power, opts)
}

/// Fully-digital baseline: identical machinery on the physical channel with
/// white noise, unit power scale, and per-antenna circuit power.
pub fn fully_digital_solve(
    h: &ChannelMatrix,
    p: f64,
    sigma_n_sq: f64,
    pm: &PowerModel,
    opts: &SolverOptions,
) -> Result<DigitalSolve> {
    let eff = EffectiveChannel::from_full_channel(h, sigma_n_sq)?;
    let power = PowerTerms::digital(h.dims(), pm);
    dinkelbach_solve(&eff, p, &power, opts)
}

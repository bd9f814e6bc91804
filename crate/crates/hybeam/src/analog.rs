//! Analog precoder/combiner optimization by interference-leakage
//! minimization.
//!
//! With the digital stage out of the picture, the sub-arrays form an
//! interference network: transmit sub-array `j` leaks power into every
//! receive sub-array `k != j`. Each steering vector is optimized one phase
//! shifter at a time; the leakage is a Hermitian quadratic form in the
//! vector, and with every other element held fixed the optimal phase of
//! element `l` anti-phases the cross-coupling scalar, which gives a closed
//! form per element. Receive and transmit sides alternate until the total
//! leakage stops moving.
//!
//! Every update is a coordinate-wise exact minimizer, so all traces here are
//! non-increasing; the tests and the acceptance suite lean on that.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix, SystemDims};
use crate::error::{Error, Result};
use crate::linalg::{cis, hermitize, C64};

/// Hard cap on coordinate sweeps inside one sub-array optimization.
pub const SWEEP_CAP: usize = 100;

/// Which end of the link a beamformer (or an optimization pass) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Transmit,
    Receive,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Transmit => Side::Receive,
            Side::Receive => Side::Transmit,
        }
    }
}

/// Bank of phase shifters for one side of the link.
///
/// Row `k` of `phases` holds the shifter angles of sub-array `k`. The
/// materialized matrix is block-diagonal with one `antennas_per_subarray`
/// block per column and every nonzero entry of modulus
/// `1/sqrt(total_antennas)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer {
    phases: DMatrix<f64>,
    dims: SystemDims,
    side: Side,
}

impl AnalogBeamformer {
    pub fn from_phases(phases: DMatrix<f64>, dims: SystemDims, side: Side) -> Result<Self> {
        if phases.nrows() != dims.n_subarrays || phases.ncols() != dims.antennas_per_subarray {
            return Err(Error::invalid(format!(
                "phase matrix must be {}x{}, got {}x{}",
                dims.n_subarrays,
                dims.antennas_per_subarray,
                phases.nrows(),
                phases.ncols()
            )));
        }
        Ok(Self { phases, dims, side })
    }

    /// Draw every phase i.i.d. uniform on `[0, 2π)`.
    pub fn random(dims: SystemDims, side: Side, rng: &mut impl Rng) -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        let phases = DMatrix::from_fn(dims.n_subarrays, dims.antennas_per_subarray, |_, _| {
            rng.random_range(0.0..tau)
        });
        Self { phases, dims, side }
    }

    #[inline]
    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    #[inline]
    pub fn side(&self) -> Side {
        self.side
    }

    #[inline]
    pub fn phases(&self) -> &DMatrix<f64> {
        &self.phases
    }

    /// Constant modulus of every active phase-shifter entry.
    #[inline]
    pub fn amplitude(&self) -> f64 {
        1.0 / (self.dims.total_antennas() as f64).sqrt()
    }

    /// Steering vector of sub-array `k`.
    pub fn steering_vector(&self, k: usize) -> Result<DVector<C64>> {
        if k >= self.dims.n_subarrays {
            return Err(Error::invalid(format!("sub-array index {k} out of range")));
        }
        let amp = self.amplitude();
        Ok(DVector::from_iterator(
            self.dims.antennas_per_subarray,
            self.phases.row(k).iter().map(|&p| cis(p).scale(amp)),
        ))
    }

    /// Overwrite sub-array `k` with the phases of `v`; moduli are discarded,
    /// so the stored bank keeps the exact constant modulus.
    pub fn set_subarray(&mut self, k: usize, v: &DVector<C64>) -> Result<()> {
        if k >= self.dims.n_subarrays {
            return Err(Error::invalid(format!("sub-array index {k} out of range")));
        }
        if v.len() != self.dims.antennas_per_subarray {
            return Err(Error::invalid("steering vector has the wrong length"));
        }
        for (l, z) in v.iter().enumerate() {
            self.phases[(k, l)] = z.arg();
        }
        Ok(())
    }

    /// Full block-diagonal matrix (`total_antennas` x `n_subarrays`).
    pub fn materialize(&self) -> DMatrix<C64> {
        let nt = self.dims.total_antennas();
        let nr = self.dims.n_subarrays;
        let b = self.dims.antennas_per_subarray;
        let amp = self.amplitude();
        let mut m = DMatrix::zeros(nt, nr);
        for k in 0..nr {
            for l in 0..b {
                m[(k * b + l, k)] = cis(self.phases[(k, l)]).scale(amp);
            }
        }
        m
    }
}

/// Per-sub-array leakage split and its total.
///
/// `total` equals both the sum of forward leakages (interference each
/// receive sub-array collects) and the sum of backward leakages
/// (interference each transmit sub-array causes); the two sums are the same
/// double sum traversed in different orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub forward_per_subarray: Vec<f64>,
    pub backward_per_subarray: Vec<f64>,
    pub total: f64,
}

/// Objective values of an iterative pass, one entry per sweep (or per outer
/// iteration), plus the threshold it was run at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub values: Vec<f64>,
    pub threshold: f64,
    pub iterations: usize,
}

/// Trace of one sub-array optimization inside the alternating loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubarrayTrace {
    pub outer_iteration: usize,
    pub side: Side,
    pub subarray: usize,
    pub trace: ConvergenceTrace,
}

/// Output of the alternating analog optimization.
#[derive(Debug, Clone)]
pub struct AnalogSolution {
    pub precoder: AnalogBeamformer,
    pub combiner: AnalogBeamformer,
    /// Total leakage after each outer iteration.
    pub total_trace: ConvergenceTrace,
    /// Leakage report after each outer iteration (last one is final).
    pub reports: Vec<LeakageReport>,
    pub subarray_traces: Vec<SubarrayTrace>,
}

fn check_pair(h: &ChannelMatrix, beamformer: &AnalogBeamformer, expected: Side) -> Result<()> {
    if beamformer.side() != expected {
        return Err(Error::invalid(format!(
            "expected a {expected:?}-side beamformer"
        )));
    }
    if beamformer.dims() != h.dims() {
        return Err(Error::invalid("beamformer dims do not match the channel"));
    }
    Ok(())
}

/// Leakage matrix of sub-array `k` on the given side.
///
/// Receive side: `Σ_{j≠k} H_{k,j} f_j f_j^H H_{k,j}^H` built from the fixed
/// transmit vectors. Transmit side: `Σ_{j≠k} H_{j,k}^H g_j g_j^H H_{j,k}`
/// from the fixed receive vectors. Hermitian positive semidefinite by
/// construction.
pub fn leakage_matrix(
    side: Side,
    k: usize,
    h: &ChannelMatrix,
    other_side: &AnalogBeamformer,
) -> Result<DMatrix<C64>> {
    check_pair(h, other_side, side.opposite())?;
    let dims = h.dims();
    if k >= dims.n_subarrays {
        return Err(Error::invalid(format!("sub-array index {k} out of range")));
    }
    let b = dims.antennas_per_subarray;
    let mut m = DMatrix::<C64>::zeros(b, b);
    let one = C64::new(1.0, 0.0);
    for j in 0..dims.n_subarrays {
        if j == k {
            continue;
        }
        let v = other_side.steering_vector(j)?;
        let coupled = match side {
            Side::Receive => h.block(k, j)? * &v,
            Side::Transmit => h.block(j, k)?.adjoint() * &v,
        };
        m.gerc(one, &coupled, &coupled, one);
    }
    hermitize(&mut m);
    Ok(m)
}

/// Real value of the Hermitian quadratic form `v^H M v`.
pub fn quadratic_form(v: &DVector<C64>, m: &DMatrix<C64>) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re
}

/// Closed-form minimizer for one phase shifter.
///
/// With every element of `v` except `v[l]` fixed, the quadratic form
/// `v^H M v` depends on `v[l]` only through
/// `2 Re{ conj(v[l]) c }` with `c = Σ_{j≠l} conj(M[j,l]) v[j]`, which a
/// constant-modulus entry minimizes by anti-phasing `c`. Returns the new
/// entry; the phase of zero is taken to be zero, so a vanishing coupling
/// gives the deterministic phase `-π` and leaves the objective unchanged.
pub fn phase_element_update(
    v: &DVector<C64>,
    m: &DMatrix<C64>,
    l: usize,
) -> Result<C64> {
    let n = v.len();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::invalid("leakage matrix does not match the vector"));
    }
    if l >= n {
        return Err(Error::invalid(format!("element index {l} out of range")));
    }
    let mut coupling = C64::new(0.0, 0.0);
    for j in 0..n {
        if j != l {
            coupling += m[(j, l)].conj() * v[j];
        }
    }
    let amplitude = v[l].norm();
    // atan2(0, 0) = 0 gives the arg(0) = 0 convention for free.
    let phase = coupling.arg() - std::f64::consts::PI;
    Ok(cis(phase).scale(amplitude))
}

/// Coordinate-descent optimization of a single steering vector against its
/// leakage matrix; sweeps all elements, re-evaluates the leakage, and stops
/// when consecutive objectives differ by at most `eps`.
///
/// A single sub-array has no interferers, so the initial vector is returned
/// unchanged with a zero trace.
pub fn optimize_subarray(
    side: Side,
    k: usize,
    h: &ChannelMatrix,
    other_side: &AnalogBeamformer,
    initial: &DVector<C64>,
    eps: f64,
) -> Result<(DVector<C64>, ConvergenceTrace)> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let dims = h.dims();
    if initial.len() != dims.antennas_per_subarray {
        return Err(Error::invalid("initial steering vector has wrong length"));
    }
    if dims.n_subarrays == 1 {
        return Ok((
            initial.clone(),
            ConvergenceTrace {
                values: vec![0.0],
                threshold: eps,
                iterations: 1,
            },
        ));
    }
    let m = leakage_matrix(side, k, h, other_side)?;
    let mut v = initial.clone();
    let mut values = Vec::new();
    let mut previous = 0.0; // objective counter starts at zero
    for _ in 0..SWEEP_CAP {
        for l in 0..v.len() {
            v[l] = phase_element_update(&v, &m, l)?;
        }
        let objective = quadratic_form(&v, &m);
        values.push(objective);
        if (objective - previous).abs() <= eps {
            break;
        }
        previous = objective;
    }
    let iterations = values.len();
    Ok((
        v,
        ConvergenceTrace {
            values,
            threshold: eps,
            iterations,
        },
    ))
}

/// Forward/backward leakage split for a fixed precoder/combiner pair.
pub fn total_interference(
    h: &ChannelMatrix,
    precoder: &AnalogBeamformer,
    combiner: &AnalogBeamformer,
) -> Result<LeakageReport> {
    check_pair(h, precoder, Side::Transmit)?;
    check_pair(h, combiner, Side::Receive)?;
    let nr = h.dims().n_subarrays;
    let f: Vec<DVector<C64>> = (0..nr)
        .map(|k| precoder.steering_vector(k))
        .collect::<Result<_>>()?;
    let g: Vec<DVector<C64>> = (0..nr)
        .map(|k| combiner.steering_vector(k))
        .collect::<Result<_>>()?;

    let mut forward = vec![0.0; nr];
    let mut backward = vec![0.0; nr];
    for k in 0..nr {
        for j in 0..nr {
            if j == k {
                continue;
            }
            // |g_k^H H_{k,j} f_j|^2 is forward leakage into receive k and
            // backward leakage out of transmit j.
            let amount = (g[k].adjoint() * h.block(k, j)? * &f[j])[(0, 0)].norm_sqr();
            forward[k] += amount;
            backward[j] += amount;
        }
    }
    let total = forward.iter().sum();
    Ok(LeakageReport {
        forward_per_subarray: forward,
        backward_per_subarray: backward,
        total,
    })
}

/// Alternating optimization of both phase-shifter banks.
///
/// Both banks start from phases drawn uniformly from `rng` (transmit first,
/// then receive). Each outer iteration optimizes every receive sub-array
/// against the fixed transmit bank, then every transmit sub-array against
/// the fixed receive bank, and records the total leakage; it stops when the
/// total moves by at most `eps` or after `max_outer` iterations.
pub fn alternate_analog(
    h: &ChannelMatrix,
    rng: &mut impl Rng,
    eps: f64,
    max_outer: usize,
) -> Result<AnalogSolution> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if max_outer == 0 {
        return Err(Error::invalid("max_outer must be >= 1"));
    }
    let dims = h.dims();
    let mut precoder = AnalogBeamformer::random(dims, Side::Transmit, rng);
    let mut combiner = AnalogBeamformer::random(dims, Side::Receive, rng);

    if dims.n_subarrays == 1 {
        let report = total_interference(h, &precoder, &combiner)?;
        return Ok(AnalogSolution {
            precoder,
            combiner,
            total_trace: ConvergenceTrace {
                values: vec![0.0],
                threshold: eps,
                iterations: 1,
            },
            reports: vec![report],
            subarray_traces: Vec::new(),
        });
    }

    let mut values = Vec::new();
    let mut reports = Vec::new();
    let mut subarray_traces = Vec::new();
    let mut previous = f64::INFINITY;
    for outer in 1..=max_outer {
        for k in 0..dims.n_subarrays {
            let initial = combiner.steering_vector(k)?;
            let (v, trace) = optimize_subarray(Side::Receive, k, h, &precoder, &initial, eps)?;
            combiner.set_subarray(k, &v)?;
            subarray_traces.push(SubarrayTrace {
                outer_iteration: outer,
                side: Side::Receive,
                subarray: k,
                trace,
            });
        }
        for k in 0..dims.n_subarrays {
            let initial = precoder.steering_vector(k)?;
            let (v, trace) = optimize_subarray(Side::Transmit, k, h, &combiner, &initial, eps)?;
            precoder.set_subarray(k, &v)?;
            subarray_traces.push(SubarrayTrace {
                outer_iteration: outer,
                side: Side::Transmit,
                subarray: k,
                trace,
            });
        }
        let report = total_interference(h, &precoder, &combiner)?;
        let total = report.total;
        values.push(total);
        reports.push(report);
        if (previous - total).abs() <= eps {
            break;
        }
        previous = total;
    }
    let iterations = values.len();
    Ok(AnalogSolution {
        precoder,
        combiner,
        total_trace: ConvergenceTrace {
            values,
            threshold: eps,
            iterations,
        },
        reports,
        subarray_traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, ClusterConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn test_channel(nr: usize, nrf: usize, seed: u64) -> ChannelMatrix {
        let dims = SystemDims::new(nr, nrf).unwrap();
        let cfg = ClusterConfig::default();
        generate_channel(dims, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_subarray_leakage_is_zero() {
        let h = test_channel(1, 4, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let m = leakage_matrix(Side::Receive, 0, &h, &f).unwrap();
        assert_eq!(max_abs(&m), 0.0);
    }

    #[test]
    fn zero_channel_leakage_is_zero() {
        let dims = SystemDims::new(3, 4).unwrap();
        let h = ChannelMatrix::zero(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = AnalogBeamformer::random(dims, Side::Transmit, &mut rng);
        let m = leakage_matrix(Side::Receive, 1, &h, &f).unwrap();
        assert_eq!(max_abs(&m), 0.0);
    }

    // Naive-summation oracle: accumulate the defining sums with explicit
    // scalar loops and compare entrywise.
    #[test]
    fn leakage_matrix_matches_naive_loops() {
        let h = test_channel(2, 3, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let g = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng);
        let b = h.dims().antennas_per_subarray;

        for k in 0..2 {
            let got_rx = leakage_matrix(Side::Receive, k, &h, &f).unwrap();
            let mut want = DMatrix::<C64>::zeros(b, b);
            for j in 0..2 {
                if j == k {
                    continue;
                }
                let fj = f.steering_vector(j).unwrap();
                let block = h.block(k, j).unwrap();
                let mut u = vec![C64::new(0.0, 0.0); b];
                for r in 0..b {
                    for c in 0..b {
                        u[r] += block[(r, c)] * fj[c];
                    }
                }
                for r in 0..b {
                    for c in 0..b {
                        want[(r, c)] += u[r] * u[c].conj();
                    }
                }
            }
            assert!(max_abs(&(got_rx.clone() - want)) < 1e-12);
            assert!(crate::linalg::hermitian_deviation(&got_rx) < 1e-12);

            let got_tx = leakage_matrix(Side::Transmit, k, &h, &g).unwrap();
            let mut want = DMatrix::<C64>::zeros(b, b);
            for j in 0..2 {
                if j == k {
                    continue;
                }
                let gj = g.steering_vector(j).unwrap();
                let block = h.block(j, k).unwrap();
                let mut u = vec![C64::new(0.0, 0.0); b];
                for r in 0..b {
                    for c in 0..b {
                        u[r] += block[(c, r)].conj() * gj[c];
                    }
                }
                for r in 0..b {
                    for c in 0..b {
                        want[(r, c)] += u[r] * u[c].conj();
                    }
                }
            }
            assert!(max_abs(&(got_tx.clone() - want)) < 1e-12);
        }
    }

    #[test]
    fn leakage_matrix_rejects_bad_index() {
        let h = test_channel(2, 3, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        assert!(matches!(
            leakage_matrix(Side::Receive, 2, &h, &f),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn leakage_matrices_are_psd() {
        let h = test_channel(4, 4, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        for k in 0..4 {
            let m = leakage_matrix(Side::Receive, k, &h, &f).unwrap();
            let (vals, _) = crate::linalg::herm_eigen(&m);
            assert!(vals[0] >= -1e-10, "min eigenvalue {}", vals[0]);
        }
    }

    // Worked 2x2 example: the cross-coupling scalar is conj(M[1,0]) v[1]
    // = (1+i)/sqrt(Nt), so the optimal phase is pi/4 - pi = -3pi/4. Also
    // verified against a dense grid search below.
    #[test]
    fn two_element_update_matches_hand_value_and_grid() {
        let amp = 0.5; // 1/sqrt(4)
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(1.0, 1.0),
                C64::new(1.0, -1.0),
                C64::new(3.0, 0.0),
            ],
        );
        let v = DVector::from_vec(vec![cis(0.3).scale(amp), cis(0.0).scale(amp)]);
        let updated = phase_element_update(&v, &m, 0).unwrap();
        let expect = -3.0 * std::f64::consts::PI / 4.0;
        assert!((updated.arg() - expect).abs() < 1e-12);
        assert!((updated.norm() - amp).abs() < 1e-15);

        // 2^16-point grid search over the phase of v[0]
        let mut best = f64::INFINITY;
        let k = 1 << 16;
        for i in 0..k {
            let phase = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            let mut candidate = v.clone();
            candidate[0] = cis(phase).scale(amp);
            best = best.min(quadratic_form(&candidate, &m));
        }
        let mut chosen = v.clone();
        chosen[0] = updated;
        let achieved = quadratic_form(&chosen, &m);
        assert!(
            achieved <= best + 1e-9,
            "closed form {achieved} vs grid {best}"
        );
    }

    #[test]
    fn diagonal_matrix_gives_minus_pi_phase_and_unchanged_objective() {
        let amp = 1.0 / 3.0f64.sqrt();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let v = DVector::from_vec(vec![cis(0.7).scale(amp), cis(-0.2).scale(amp)]);
        let before = quadratic_form(&v, &m);
        let updated = phase_element_update(&v, &m, 0).unwrap();
        assert!((updated.arg() + std::f64::consts::PI).abs() < 1e-12);
        let mut after_v = v.clone();
        after_v[0] = updated;
        assert!((quadratic_form(&after_v, &m) - before).abs() < 1e-12);
    }

    #[test]
    fn single_element_vector_objective_unchanged() {
        let amp = 0.25;
        let m = DMatrix::from_element(1, 1, C64::new(1.5, 0.0));
        let v = DVector::from_vec(vec![cis(1.0).scale(amp)]);
        let before = quadratic_form(&v, &m);
        let updated = phase_element_update(&v, &m, 0).unwrap();
        let after = quadratic_form(&DVector::from_vec(vec![updated]), &m);
        assert!((after - before).abs() < 1e-15);
    }

    #[test]
    fn element_update_never_increases_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let n = rng.random_range(2..6);
            let a = DMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let m = a.adjoint() * &a;
            let amp = 1.0 / (16.0f64).sqrt();
            let v = DVector::from_fn(n, |_, _| {
                cis(rng.random_range(0.0..2.0 * std::f64::consts::PI)).scale(amp)
            });
            let l = rng.random_range(0..n);
            let before = quadratic_form(&v, &m);
            let mut after_v = v.clone();
            after_v[l] = phase_element_update(&v, &m, l).unwrap();
            let after = quadratic_form(&after_v, &m);
            assert!(after <= before + 1e-12, "before {before}, after {after}");
        }
    }

    #[test]
    fn update_rejects_out_of_range_index() {
        let m = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let v = DVector::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)]);
        assert!(matches!(
            phase_element_update(&v, &m, 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn optimize_single_subarray_returns_initial() {
        let h = test_channel(1, 4, 15);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let initial = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng)
            .steering_vector(0)
            .unwrap();
        let (v, trace) = optimize_subarray(Side::Receive, 0, &h, &f, &initial, 1e-4).unwrap();
        assert_eq!(v, initial);
        assert_eq!(trace.values, vec![0.0]);
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn optimize_subarray_trace_is_monotone_and_short() {
        // 64-antenna configuration used in the reference convergence plots
        let h = test_channel(8, 8, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let initial = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng)
            .steering_vector(0)
            .unwrap();
        let (_, trace) = optimize_subarray(Side::Receive, 0, &h, &f, &initial, 1e-4).unwrap();
        assert!(trace.iterations <= 10, "took {} sweeps", trace.iterations);
        for w in trace.values.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "trace not monotone: {:?}", trace.values);
        }
    }

    // Random-search oracle: the optimized vector must beat 1000 random
    // constant-modulus vectors on the same instance.
    #[test]
    fn optimized_vector_beats_random_search() {
        let h = test_channel(8, 8, 19);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let initial = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng)
            .steering_vector(0)
            .unwrap();
        let (v, _) = optimize_subarray(Side::Receive, 0, &h, &f, &initial, 1e-6).unwrap();
        let m = leakage_matrix(Side::Receive, 0, &h, &f).unwrap();
        let achieved = quadratic_form(&v, &m);
        let amp = 1.0 / (h.dims().total_antennas() as f64).sqrt();
        for _ in 0..1000 {
            let candidate = DVector::from_fn(8, |_, _| {
                cis(rng.random_range(0.0..2.0 * std::f64::consts::PI)).scale(amp)
            });
            assert!(achieved <= quadratic_form(&candidate, &m) + 1e-12);
        }
    }

    #[test]
    fn alternate_single_subarray_returns_zero_total() {
        let h = test_channel(1, 4, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
        assert_eq!(sol.total_trace.values, vec![0.0]);
        assert_eq!(sol.reports.last().unwrap().total, 0.0);
    }

    #[test]
    fn alternate_trace_monotone_with_matching_sums() {
        let h = test_channel(4, 4, 23);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
        for w in sol.total_trace.values.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
        for report in &sol.reports {
            let fwd: f64 = report.forward_per_subarray.iter().sum();
            let bwd: f64 = report.backward_per_subarray.iter().sum();
            assert!((fwd - bwd).abs() <= 1e-9 * fwd.max(1e-30));
            assert!((report.total - fwd).abs() <= 1e-12 * fwd.max(1e-30));
        }
    }

    #[test]
    fn constant_modulus_survives_optimization() {
        let h = test_channel(4, 4, 25);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
        let amp = 1.0 / 4.0;
        for bank in [&sol.precoder, &sol.combiner] {
            let m = bank.materialize();
            let b = h.dims().antennas_per_subarray;
            for k in 0..h.dims().n_subarrays {
                for row in 0..h.dims().total_antennas() {
                    let z = m[(row, k)];
                    if row >= k * b && row < (k + 1) * b {
                        assert!((z.norm() - amp).abs() < 1e-12);
                    } else {
                        assert_eq!(z, C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn total_interference_zero_channel() {
        let dims = SystemDims::new(3, 2).unwrap();
        let h = ChannelMatrix::zero(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let f = AnalogBeamformer::random(dims, Side::Transmit, &mut rng);
        let g = AnalogBeamformer::random(dims, Side::Receive, &mut rng);
        let report = total_interference(&h, &f, &g).unwrap();
        assert_eq!(report.total, 0.0);
        assert!(report.forward_per_subarray.iter().all(|&x| x == 0.0));
        assert!(report.backward_per_subarray.iter().all(|&x| x == 0.0));
    }

    // Quadruple-loop oracle for the total: sum |g_k^H H_{k,j} f_j|^2 with
    // all products expanded into scalar loops.
    #[test]
    fn total_interference_matches_naive_quadruple_loop() {
        let h = test_channel(3, 3, 28);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = AnalogBeamformer::random(h.dims(), Side::Transmit, &mut rng);
        let g = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng);
        let report = total_interference(&h, &f, &g).unwrap();

        let b = h.dims().antennas_per_subarray;
        let mut want = 0.0;
        for k in 0..3 {
            let gk = g.steering_vector(k).unwrap();
            for j in 0..3 {
                if j == k {
                    continue;
                }
                let fj = f.steering_vector(j).unwrap();
                let block = h.block(k, j).unwrap();
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..b {
                    for c in 0..b {
                        acc += gk[r].conj() * block[(r, c)] * fj[c];
                    }
                }
                want += acc.norm_sqr();
            }
        }
        assert!((report.total - want).abs() <= 1e-12 * want.max(1.0));
        let fwd: f64 = report.forward_per_subarray.iter().sum();
        let bwd: f64 = report.backward_per_subarray.iter().sum();
        assert!((fwd - bwd).abs() <= 1e-9 * fwd);
    }

    #[test]
    fn total_interference_rejects_mismatched_dims() {
        let h = test_channel(3, 3, 30);
        let other_dims = SystemDims::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = AnalogBeamformer::random(other_dims, Side::Transmit, &mut rng);
        let g = AnalogBeamformer::random(h.dims(), Side::Receive, &mut rng);
        assert!(matches!(
            total_interference(&h, &f, &g),
            Err(Error::InvalidArgument(_))
        ));
    }
}

//! Fast invariant suite behind the CLI `check` verb.
//!
//! Each check exercises one of the identities or monotonicity properties the
//! optimization relies on, at a size that finishes in seconds. The heavier
//! statistical versions live in the acceptance test suite.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analog::{alternate_analog, total_interference};
use crate::channel::{generate_channel, ClusterConfig, SystemDims};
use crate::digital::{
    dinkelbach_solve, effective_channel, mmse_combiner, mse_matrix, EffectiveChannel, PowerTerms,
    SolverOptions,
};
use crate::linalg::{eye, frob_sq, lndet_hpd, C64};
use crate::metrics::{
    dbm_to_watts, spectral_efficiency, spectral_efficiency_direct, PowerModel,
};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

/// Run the whole suite with channels and instances derived from `seed`.
pub fn run_invariant_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut results = Vec::new();
    let dims = SystemDims::new(4, 8).unwrap();
    let cluster = ClusterConfig::default();
    let pm = PowerModel::default();
    let sigma = dbm_to_watts(0.0);
    let p = dbm_to_watts(10.0);

    // leakage bookkeeping and analog monotonicity
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_rel = 0.0f64;
        let mut monotone = true;
        let mut modulus_ok = true;
        for _ in 0..20 {
            let h = generate_channel(dims, &cluster, &mut rng).unwrap();
            let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
            let report = total_interference(&h, &sol.precoder, &sol.combiner).unwrap();
            let fwd: f64 = report.forward_per_subarray.iter().sum();
            let bwd: f64 = report.backward_per_subarray.iter().sum();
            worst_rel = worst_rel.max((fwd - bwd).abs() / fwd.max(1e-30));
            for w in sol.total_trace.values.windows(2) {
                monotone &= w[1] <= w[0] + 1e-9;
            }
            let amp = 1.0 / (dims.total_antennas() as f64).sqrt();
            for bank in [&sol.precoder, &sol.combiner] {
                for z in bank.materialize().iter() {
                    if z.norm() > 0.0 {
                        modulus_ok &= (z.norm() - amp).abs() < 1e-12;
                    }
                }
            }
        }
        results.push(outcome(
            "leakage_forward_backward_identity",
            worst_rel <= 1e-9,
            format!("worst relative mismatch {worst_rel:.3e}"),
        ));
        results.push(outcome(
            "analog_trace_non_increasing",
            monotone,
            "total leakage monotone over 20 seeds".into(),
        ));
        results.push(outcome(
            "constant_modulus",
            modulus_ok,
            "all active phase-shifter entries at 1/sqrt(total_antennas)".into(),
        ));
    }

    // structural identities of the block-diagonal banks
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1);
        let h = generate_channel(dims, &cluster, &mut rng).unwrap();
        let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
        let g = sol.combiner.materialize();
        let gram = g.adjoint() * &g;
        let expect = eye(dims.n_subarrays).scale(dims.power_scale());
        let dev = (&gram - &expect)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let f_b = random_matrix(dims.n_subarrays, &mut rng);
        let cascade = sol.precoder.materialize() * &f_b;
        let energy_dev =
            (frob_sq(&cascade) - dims.power_scale() * frob_sq(&f_b)).abs() / frob_sq(&f_b);
        results.push(outcome(
            "combiner_gram_is_scaled_identity",
            dev < 1e-12,
            format!("max deviation {dev:.3e}"),
        ));
        results.push(outcome(
            "cascade_energy_identity",
            energy_dev < 1e-12,
            format!("relative deviation {energy_dev:.3e}"),
        ));
    }

    // rate identities on random instances
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let n = 4;
            let entries = random_matrix(n, &mut rng);
            let noise = {
                let a = random_matrix(n, &mut rng);
                let mut c = a.adjoint() * &a + eye(n).scale(0.2);
                crate::linalg::hermitize(&mut c);
                c.scale_mut(0.05);
                c
            };
            let eff = EffectiveChannel::new(entries.clone(), noise.clone(), 0.25, 0.05).unwrap();
            let f = random_matrix(n, &mut rng);
            let g_inv = random_matrix(n, &mut rng) + eye(n);
            let ra = spectral_efficiency(&entries, &f, &g_inv, &noise).unwrap();
            let rb = spectral_efficiency_direct(&entries, &f, &noise).unwrap();
            worst = worst.max((ra - rb).abs() / rb.abs().max(1.0));

            let g_mmse = mmse_combiner(&eff, &f).unwrap();
            let e = mse_matrix(&eff, &f, &g_mmse).unwrap();
            let lhs = -lndet_hpd(&e, "mse").unwrap() / std::f64::consts::LN_2;
            worst = worst.max((lhs - rb).abs() / rb.abs().max(1.0));
        }
        results.push(outcome(
            "rate_identities",
            worst <= 1e-9,
            format!("worst relative mismatch {worst:.3e}"),
        ));
    }

    // digital solver: monotone surrogate, non-decreasing ratio, feasibility
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10f0);
        let mut monotone = true;
        let mut lambda_monotone = true;
        let mut feasible = true;
        let mut converged = true;
        for _ in 0..5 {
            let h = generate_channel(dims, &cluster, &mut rng).unwrap();
            let sol = alternate_analog(&h, &mut rng, 1e-4, 100).unwrap();
            let eff = effective_channel(&h, &sol.precoder, &sol.combiner, sigma).unwrap();
            let power = PowerTerms::hybrid(dims, &pm);
            let solve = dinkelbach_solve(&eff, p, &power, &SolverOptions::default()).unwrap();
            converged &= solve.state.converged;
            for trace in &solve.inner_traces {
                for w in trace.values.windows(2) {
                    monotone &= w[1] >= w[0] - 1e-9;
                }
            }
            let lambdas: Vec<f64> = solve.state.outer_trace.iter().map(|&(l, _)| l).collect();
            for w in lambdas.windows(2) {
                lambda_monotone &= w[1] >= w[0] - 1e-12;
            }
            feasible &=
                dims.power_scale() * frob_sq(&solve.set.precoder) <= p * (1.0 + 1e-6);
        }
        results.push(outcome(
            "inner_objective_non_decreasing",
            monotone,
            "chi monotone over 5 solves".into(),
        ));
        results.push(outcome(
            "ratio_variable_non_decreasing",
            lambda_monotone && converged,
            "Dinkelbach ratio monotone and terminal".into(),
        ));
        results.push(outcome(
            "power_feasibility",
            feasible,
            "scaled precoder energy within budget".into(),
        ));
    }

    // circuit-power arithmetic
    {
        let d16 = SystemDims::new(4, 4).unwrap();
        let hybrid = pm.hybrid_circuit(d16);
        let digital = pm.digital_circuit(d16);
        let ok = (hybrid - 4.144).abs() < 1e-12 && (digital - 9.016).abs() < 1e-12;
        results.push(outcome(
            "circuit_power_arithmetic",
            ok,
            format!("hybrid {hybrid:.3} W, digital {digital:.3} W"),
        ));
    }

    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_invariant_checks_pass() {
        let outcomes = run_invariant_checks(2024);
        for o in &outcomes {
            assert!(o.passed, "check {} failed: {}", o.name, o.detail);
        }
        assert!(outcomes.len() >= 8);
    }
}

//! Energy-efficient hybrid beamforming for sub-connected mmWave MIMO.
//!
//! A sub-connected transceiver drives each RF chain into its own disjoint
//! group of antennas through phase shifters, so the analog precoder and
//! combiner are block-diagonal constant-modulus matrices. This crate
//! implements a two-layer design for that architecture:
//!
//! 1. [`analog`] — the phase-shifter banks are tuned by alternating
//!    per-element closed-form updates that minimize the interference power
//!    sub-arrays leak into each other.
//! 2. [`digital`] — on the resulting equivalent channel, baseband precoder
//!    and combiner come from weighted-MMSE block-coordinate ascent, wrapped
//!    in a Dinkelbach loop that maximizes rate per consumed watt (or, with
//!    the outer loop disabled, the rate itself).
//!
//! [`channel`] synthesizes clustered mmWave channel realizations, [`metrics`]
//! owns the power models and unit conversions, and [`harness`] runs seeded
//! Monte Carlo sweeps comparing the hybrid design against a fully-digital
//! baseline. The `hybeam` binary exposes the harness as a CLI.
//!
//! ```
//! use hybeam::prelude::*;
//! use rand::SeedableRng;
//!
//! let dims = SystemDims::new(4, 8)?; // 4 sub-arrays of 8 antennas
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let h = generate_channel(dims, &ClusterConfig::default(), &mut rng)?;
//!
//! // analog stage: drive inter-sub-array leakage down
//! let analog = alternate_analog(&h, &mut rng, 1e-4, 100)?;
//!
//! // digital stage: maximize energy efficiency at a 10 dBm budget
//! let solve = hybrid_solve(
//!     &h,
//!     &analog.precoder,
//!     &analog.combiner,
//!     dbm_to_watts(10.0),
//!     dbm_to_watts(0.0),
//!     &PowerModel::default(),
//!     &SolverOptions::default(),
//! )?;
//! assert!(solve.state.converged);
//! assert!(solve.metrics.energy_efficiency > 0.0);
//! # Ok::<(), hybeam::Error>(())
//! ```

pub mod analog;
pub mod channel;
pub mod checks;
pub mod digital;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;

pub use error::{Error, Result};

/// One-stop imports for simulations.
pub mod prelude {
    pub use crate::analog::{
        alternate_analog, leakage_matrix, optimize_subarray, phase_element_update,
        total_interference, AnalogBeamformer, AnalogSolution, ConvergenceTrace, LeakageReport,
        Side,
    };
    pub use crate::channel::{
        channel_from_paths, generate_channel, sample_path_params, ula_response, ChannelMatrix,
        ClusterConfig, PathParams, SystemDims,
    };
    pub use crate::digital::{
        dinkelbach_solve, effective_channel, fully_digital_solve, hybrid_solve, inner_wmmse,
        mmse_combiner, mse_matrix, precoder_update, solve_power_multiplier, weight_update,
        whitening, BisectionResult, DigitalBeamformerSet, DigitalSolve, DinkelbachState,
        EffectiveChannel, PowerTerms, SolverMode, SolverOptions,
    };
    pub use crate::error::{Error, Result};
    pub use crate::harness::{
        emit_outputs, run_sweep, run_trial, summarize, ExperimentConfig, SolverKind, SummaryRow,
        TrialRecord,
    };
    pub use crate::metrics::{
        dbm_to_watts, digital_power, hybrid_power, spectral_efficiency,
        spectral_efficiency_direct, watts_to_dbm, Metrics, PowerModel,
    };
}

// The guide chapters double as doctests so their snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/system-model.md")]
    pub struct SystemModel;
    #[doc = include_str!("../../../book/src/channel-model.md")]
    pub struct ChannelModel;
    #[doc = include_str!("../../../book/src/analog-stage.md")]
    pub struct AnalogStage;
    #[doc = include_str!("../../../book/src/digital-stage.md")]
    pub struct DigitalStage;
    #[doc = include_str!("../../../book/src/power-and-efficiency.md")]
    pub struct PowerAndEfficiency;
    #[doc = include_str!("../../../book/src/simulator.md")]
    pub struct Simulator;
}

//! Rate, power consumption, and energy efficiency.
//!
//! All internal arithmetic is in watts; dBm appears only at the
//! configuration boundary. The hybrid power model charges per-chain RF
//! hardware (`n_subarrays` chains) plus per-antenna amplifiers and phase
//! shifters; the fully-digital model charges a full RF chain, converter and
//! amplifier per antenna, which is what makes the comparison interesting.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::SystemDims;
use crate::error::{Error, Result};
use crate::linalg::{frob_sq, log2_det_ratio, C64};

/// Circuit power constants (watts) and the power-amplifier inefficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Power amplifier, per antenna.
    pub p_pa: f64,
    /// Low-noise amplifier, per antenna.
    pub p_lna: f64,
    /// DAC, per transmit chain (per antenna in the fully-digital model).
    pub p_dac: f64,
    /// ADC, per receive chain (per antenna in the fully-digital model).
    pub p_adc: f64,
    /// Phase shifter, per antenna (hybrid architecture only).
    pub p_ps: f64,
    /// Transmit RF chain.
    pub p_trfc: f64,
    /// Receive RF chain.
    pub p_rrfc: f64,
    /// Baseband processor, per side.
    pub p_bb: f64,
    /// Amplifier inefficiency factor, >= 1; multiplies radiated power.
    pub eta: f64,
}

impl Default for PowerModel {
    /// Reference constants: 20 mW amplifiers, 200 mW converters, 30 mW phase
    /// shifters, 43 mW RF chains, 300 mW baseband, unit amplifier
    /// inefficiency.
    fn default() -> Self {
        Self {
            p_pa: 0.020,
            p_lna: 0.020,
            p_dac: 0.200,
            p_adc: 0.200,
            p_ps: 0.030,
            p_trfc: 0.043,
            p_rrfc: 0.043,
            p_bb: 0.300,
            eta: 1.0,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.p_pa, self.p_lna, self.p_dac, self.p_adc, self.p_ps, self.p_trfc, self.p_rrfc,
            self.p_bb,
        ];
        if fields.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("circuit powers must be finite and >= 0"));
        }
        if !(self.eta >= 1.0) || !self.eta.is_finite() {
            return Err(Error::invalid("eta must be finite and >= 1"));
        }
        Ok(())
    }

    /// Transmit-side circuit power of the hybrid architecture.
    pub fn hybrid_tx_circuit(&self, dims: SystemDims) -> f64 {
        let nr = dims.n_subarrays as f64;
        let nt = dims.total_antennas() as f64;
        nr * (self.p_trfc + self.p_dac) + nt * (self.p_pa + self.p_ps) + self.p_bb
    }

    /// Receive-side circuit power of the hybrid architecture.
    pub fn hybrid_rx_circuit(&self, dims: SystemDims) -> f64 {
        let nr = dims.n_subarrays as f64;
        let nt = dims.total_antennas() as f64;
        nr * (self.p_rrfc + self.p_adc) + nt * (self.p_lna + self.p_ps) + self.p_bb
    }

    /// Total hybrid circuit power (both sides, no radiated term).
    pub fn hybrid_circuit(&self, dims: SystemDims) -> f64 {
        self.hybrid_tx_circuit(dims) + self.hybrid_rx_circuit(dims)
    }

    /// Transmit-side circuit power with one RF chain per antenna.
    pub fn digital_tx_circuit(&self, dims: SystemDims) -> f64 {
        let nt = dims.total_antennas() as f64;
        nt * (self.p_trfc + self.p_dac + self.p_pa) + self.p_bb
    }

    /// Receive-side circuit power with one RF chain per antenna.
    pub fn digital_rx_circuit(&self, dims: SystemDims) -> f64 {
        let nt = dims.total_antennas() as f64;
        nt * (self.p_rrfc + self.p_adc + self.p_lna) + self.p_bb
    }

    /// Total fully-digital circuit power.
    pub fn digital_circuit(&self, dims: SystemDims) -> f64 {
        self.digital_tx_circuit(dims) + self.digital_rx_circuit(dims)
    }
}

/// Consumed power of the hybrid transceiver for a given baseband precoder:
/// `eta * (antennas_per_subarray/total) * ||F_B||_F^2` radiated-power term
/// plus both circuit sides.
pub fn hybrid_power(f_b: &DMatrix<C64>, dims: SystemDims, pm: &PowerModel) -> f64 {
    pm.eta * dims.power_scale() * frob_sq(f_b) + pm.hybrid_circuit(dims)
}

/// Consumed power of the fully-digital transceiver: `eta * ||F_B||_F^2`
/// plus per-antenna circuit power on both sides.
pub fn digital_power(f_b: &DMatrix<C64>, dims: SystemDims, pm: &PowerModel) -> f64 {
    pm.eta * frob_sq(f_b) + pm.digital_circuit(dims)
}

/// Spectral efficiency in bits/s/Hz for an explicit linear combiner:
/// `log2 det(I + (G^H C G)^{-1} G^H A F F^H A^H G)` where `A` is the channel,
/// `F` the precoder, `G` the combiner, and `C` the covariance of the noise
/// entering the combiner.
pub fn spectral_efficiency(
    channel: &DMatrix<C64>,
    precoder: &DMatrix<C64>,
    combiner: &DMatrix<C64>,
    noise_cov: &DMatrix<C64>,
) -> Result<f64> {
    if channel.nrows() != combiner.nrows()
        || channel.ncols() != precoder.nrows()
        || noise_cov.nrows() != channel.nrows()
        || noise_cov.ncols() != channel.nrows()
    {
        return Err(Error::invalid("spectral_efficiency: dimension mismatch"));
    }
    let gha_f = combiner.adjoint() * channel * precoder;
    let signal = &gha_f * gha_f.adjoint();
    let rn = combiner.adjoint() * noise_cov * combiner;
    log2_det_ratio(&rn, &signal, "combined noise covariance")
}

/// Spectral efficiency in bits/s/Hz with an information-lossless receiver:
/// `log2 det(I + C^{-1} A F F^H A^H)`.
pub fn spectral_efficiency_direct(
    channel: &DMatrix<C64>,
    precoder: &DMatrix<C64>,
    noise_cov: &DMatrix<C64>,
) -> Result<f64> {
    if channel.ncols() != precoder.nrows()
        || noise_cov.nrows() != channel.nrows()
        || noise_cov.ncols() != channel.nrows()
    {
        return Err(Error::invalid(
            "spectral_efficiency_direct: dimension mismatch",
        ));
    }
    let hf = channel * precoder;
    let signal = &hf * hf.adjoint();
    log2_det_ratio(noise_cov, &signal, "noise covariance")
}

/// Convert dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Convert watts to dBm.
#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Per-solve outcome figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Achieved rate in bits/s/Hz.
    pub rate_bits: f64,
    /// Total consumed power in watts (radiated term plus circuits).
    pub consumed_power: f64,
    /// rate_bits / consumed_power, bits/Hz/J.
    pub energy_efficiency: f64,
    /// Radiated power in watts (the Frobenius-norm term of the budget).
    pub transmit_power: f64,
    /// Noise power in watts.
    pub noise_power: f64,
}

impl Metrics {
    pub fn new(rate_bits: f64, consumed_power: f64, transmit_power: f64, noise_power: f64) -> Self {
        Self {
            rate_bits,
            consumed_power,
            energy_efficiency: rate_bits / consumed_power,
            transmit_power,
            noise_power,
        }
    }
}

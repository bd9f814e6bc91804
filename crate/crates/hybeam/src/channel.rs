//! Clustered mmWave channel synthesis.
//!
//! Channels are sums of scattering-cluster contributions: each cluster has a
//! uniformly drawn mean direction and contributes several rays whose angles
//! are Laplacian-spread around that mean and whose gains are circular complex
//! Gaussian. Array responses on both ends are uniform-linear-array steering
//! vectors, so only azimuth enters the response; elevation angles are sampled
//! and carried for completeness but do not affect a linear array.
//!
//! The overall scaling makes `E[||H||_F^2] = total_antennas^2` when the gain
//! variance is 1, which the test suite checks by Monte Carlo.

use nalgebra::{DMatrix, DMatrixView, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, C64};

/// Array geometry of the sub-connected transceiver.
///
/// `n_subarrays` is simultaneously the number of RF chains and the number of
/// data streams; each sub-array drives `antennas_per_subarray` elements, so
/// the full array has `n_subarrays * antennas_per_subarray` antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDims {
    pub n_subarrays: usize,
    pub antennas_per_subarray: usize,
}

impl SystemDims {
    pub fn new(n_subarrays: usize, antennas_per_subarray: usize) -> Result<Self> {
        if n_subarrays == 0 || antennas_per_subarray == 0 {
            return Err(Error::invalid(
                "n_subarrays and antennas_per_subarray must be >= 1",
            ));
        }
        Ok(Self {
            n_subarrays,
            antennas_per_subarray,
        })
    }

    /// Total antenna count on either end of the link.
    #[inline]
    pub fn total_antennas(&self) -> usize {
        self.n_subarrays * self.antennas_per_subarray
    }

    /// Fraction of the array a single sub-array spans; this is also the
    /// squared norm of one analog steering vector and the power scale that
    /// relates baseband precoder power to radiated power.
    #[inline]
    pub fn power_scale(&self) -> f64 {
        self.antennas_per_subarray as f64 / self.total_antennas() as f64
    }
}

/// Statistical description of the scattering environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    /// Variance of the per-ray complex gain.
    pub gain_variance: f64,
    /// Angular standard deviation of ray offsets around the cluster mean,
    /// in degrees.
    pub angular_spread_deg: f64,
    /// Antenna spacing in wavelengths.
    pub element_spacing_wavelengths: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            n_clusters: 8,
            rays_per_cluster: 10,
            gain_variance: 1.0,
            angular_spread_deg: 5.0,
            element_spacing_wavelengths: 0.5,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_clusters == 0 || self.rays_per_cluster == 0 {
            return Err(Error::invalid("cluster and ray counts must be >= 1"));
        }
        if !(self.gain_variance > 0.0) || !self.gain_variance.is_finite() {
            return Err(Error::invalid("gain_variance must be positive and finite"));
        }
        if self.angular_spread_deg < 0.0 || !self.angular_spread_deg.is_finite() {
            return Err(Error::invalid(
                "angular_spread_deg must be finite and >= 0",
            ));
        }
        if !(self.element_spacing_wavelengths > 0.0) || !self.element_spacing_wavelengths.is_finite()
        {
            return Err(Error::invalid(
                "element_spacing_wavelengths must be positive and finite",
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn total_rays(&self) -> usize {
        self.n_clusters * self.rays_per_cluster
    }
}

/// One propagation ray: complex gain plus azimuth/elevation angles of
/// arrival and departure (radians). Elevation is carried but unused by the
/// linear-array response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathParams {
    pub gain: C64,
    pub azimuth_aoa: f64,
    pub azimuth_aod: f64,
    pub elevation_aoa: f64,
    pub elevation_aod: f64,
}

/// Square channel matrix with the sub-array block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: DMatrix<C64>,
    dims: SystemDims,
}

impl ChannelMatrix {
    /// Wrap an existing matrix; it must be square with side
    /// `dims.total_antennas()`.
    pub fn new(entries: DMatrix<C64>, dims: SystemDims) -> Result<Self> {
        let n = dims.total_antennas();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::invalid(format!(
                "channel must be {n}x{n}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries, dims })
    }

    /// All-zero channel, mostly for tests and degenerate cases.
    pub fn zero(dims: SystemDims) -> Self {
        let n = dims.total_antennas();
        Self {
            entries: DMatrix::zeros(n, n),
            dims,
        }
    }

    #[inline]
    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    #[inline]
    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// The `antennas_per_subarray`-square block at block row `m`, block
    /// column `n`: the sub-channel from transmit sub-array `n` to receive
    /// sub-array `m`.
    pub fn block(&self, m: usize, n: usize) -> Result<DMatrixView<'_, C64>> {
        let nr = self.dims.n_subarrays;
        if m >= nr || n >= nr {
            return Err(Error::invalid(format!(
                "block index ({m},{n}) out of range for {nr} sub-arrays"
            )));
        }
        let b = self.dims.antennas_per_subarray;
        Ok(self.entries.view((m * b, n * b), (b, b)))
    }
}

/// Unit-norm uniform-linear-array response at the given azimuth angle.
///
/// Element `i` is `exp(j 2π spacing i sin(angle)) / sqrt(n_elements)`.
pub fn ula_response(angle: f64, n_elements: usize, spacing: f64) -> Result<DVector<C64>> {
    if n_elements == 0 {
        return Err(Error::invalid("ula_response needs at least one element"));
    }
    let amp = 1.0 / (n_elements as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI * spacing * angle.sin();
    Ok(DVector::from_iterator(
        n_elements,
        (0..n_elements).map(|i| cis(step * i as f64).scale(amp)),
    ))
}

// Laplacian noise via inverse CDF; b is the scale parameter. The clamp keeps
// the degenerate u = -1/2 draw from producing an infinity.
fn laplacian(rng: &mut impl Rng, scale: f64) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

/// Draw the per-ray gains and angles for one channel realization.
///
/// Cluster means (azimuth and elevation, both ends) are uniform on
/// `[-π, π)`; ray offsets are Laplacian with standard deviation
/// `angular_spread_deg` (converted to radians); gains are i.i.d. circular
/// complex Gaussian with variance `gain_variance`. Rays are returned
/// cluster-major.
pub fn sample_path_params(cfg: &ClusterConfig, rng: &mut impl Rng) -> Result<Vec<PathParams>> {
    cfg.validate()?;
    let spread_rad = cfg.angular_spread_deg.to_radians();
    // std of a Laplacian with scale b is b*sqrt(2)
    let scale = spread_rad / std::f64::consts::SQRT_2;
    let per_component = Normal::new(0.0, (cfg.gain_variance / 2.0).sqrt())
        .map_err(|e| Error::invalid(format!("bad gain variance: {e}")))?;
    let pi = std::f64::consts::PI;

    let mut rays = Vec::with_capacity(cfg.total_rays());
    for _ in 0..cfg.n_clusters {
        let mean_aoa = rng.random_range(-pi..pi);
        let mean_aod = rng.random_range(-pi..pi);
        let mean_el_aoa = rng.random_range(-pi..pi);
        let mean_el_aod = rng.random_range(-pi..pi);
        for _ in 0..cfg.rays_per_cluster {
            let azimuth_aoa = mean_aoa + laplacian(rng, scale);
            let azimuth_aod = mean_aod + laplacian(rng, scale);
            let elevation_aoa = mean_el_aoa + laplacian(rng, scale);
            let elevation_aod = mean_el_aod + laplacian(rng, scale);
            let gain = C64::new(per_component.sample(rng), per_component.sample(rng));
            rays.push(PathParams {
                gain,
                azimuth_aoa,
                azimuth_aod,
                elevation_aoa,
                elevation_aod,
            });
        }
    }
    Ok(rays)
}

/// Assemble a channel from explicit ray parameters.
///
/// `H = total_antennas / sqrt(n_clusters * rays_per_cluster) * Σ gain_p
/// a_r(aoa_p) a_t(aod_p)^H` with unit-norm ULA responses on both ends.
pub fn channel_from_paths(
    dims: SystemDims,
    cfg: &ClusterConfig,
    paths: &[PathParams],
) -> Result<ChannelMatrix> {
    cfg.validate()?;
    if paths.len() != cfg.total_rays() {
        return Err(Error::invalid(format!(
            "expected {} rays, got {}",
            cfg.total_rays(),
            paths.len()
        )));
    }
    let n = dims.total_antennas();
    let scale = n as f64 / (cfg.total_rays() as f64).sqrt();
    let mut h = DMatrix::<C64>::zeros(n, n);
    for p in paths {
        let a_r = ula_response(p.azimuth_aoa, n, cfg.element_spacing_wavelengths)?;
        let a_t = ula_response(p.azimuth_aod, n, cfg.element_spacing_wavelengths)?;
        // h += gain * a_r * a_t^H
        h.gerc(p.gain, &a_r, &a_t, C64::new(1.0, 0.0));
    }
    ChannelMatrix::new(h * C64::new(scale, 0.0), dims)
}

/// Draw a full clustered channel realization. Deterministic given the RNG
/// state: the same seed always yields a bit-identical matrix.
pub fn generate_channel(
    dims: SystemDims,
    cfg: &ClusterConfig,
    rng: &mut impl Rng,
) -> Result<ChannelMatrix> {
    let paths = sample_path_params(cfg, rng)?;
    channel_from_paths(dims, cfg, &paths)
}

//! Multi-carrier channel model and the per-subcarrier metrics derived from it.
//!
//! Everything here works in SI units: watts, hertz, bits per second. The
//! model stays at the metric level: a subcarrier with power gain `|H_k|^2`,
//! transmit power `P_k` and noise variance `sigma^2` carries
//!
//! ```text
//! C_k = B * log2(1 + |H_k|^2 * P_k / sigma^2)      bits/s
//! Q_k = eta_k * |H_k|^2 * P_k                        watts
//! ```
//!
//! and an [`AllocationMask`] decides whether it is decoded or harvested.

use std::fmt;

pub use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, Error, Result};

/// One fading draw of a multi-carrier frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    bandwidth_hz: f64,
    noise_variance_w: f64,
    gains: Vec<Complex64>,
    efficiencies: Vec<f64>,
}

impl ChannelRealization {
    pub fn new(
        bandwidth_hz: f64,
        noise_variance_w: f64,
        gains: Vec<Complex64>,
        efficiencies: Vec<f64>,
    ) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::InvalidParameter("at least one subcarrier is required".into()));
        }
        check_len(gains.len(), efficiencies.len())?;
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {bandwidth_hz}")));
        }
        if !(noise_variance_w > 0.0 && noise_variance_w.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive, got {noise_variance_w}"
            )));
        }
        if let Some(eta) = efficiencies.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidParameter(format!("conversion efficiency {eta} outside (0, 1]")));
        }
        if gains.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidParameter("channel gains must be finite".into()));
        }
        Ok(Self { bandwidth_hz, noise_variance_w, gains, efficiencies })
    }

    /// Same efficiency on every subcarrier.
    pub fn uniform(bandwidth_hz: f64, noise_variance_w: f64, gains: Vec<Complex64>, eta: f64) -> Result<Self> {
        let efficiencies = vec![eta; gains.len()];
        Self::new(bandwidth_hz, noise_variance_w, gains, efficiencies)
    }

    pub fn num_subcarriers(&self) -> usize {
        self.gains.len()
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn noise_variance_w(&self) -> f64 {
        self.noise_variance_w
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn efficiencies(&self) -> &[f64] {
        &self.efficiencies
    }

    /// `|H_k|^2`.
    pub fn power_gain(&self, k: usize) -> f64 {
        self.gains[k].norm_sqr()
    }

    pub fn power_gains(&self) -> Vec<f64> {
        self.gains.iter().map(|h| h.norm_sqr()).collect()
    }

    /// A copy of this draw seen at a different noise variance.
    pub fn with_noise_variance(&self, noise_variance_w: f64) -> Result<Self> {
        Self::new(self.bandwidth_hz, noise_variance_w, self.gains.clone(), self.efficiencies.clone())
    }
}

/// Transmit power per subcarrier, in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if let Some(p) = powers.iter().find(|&&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!("transmit power {p} must be finite and non-negative")));
        }
        Ok(Self(powers))
    }

    /// `P_t,k = P_t,e` on all `k` subcarriers.
    pub fn equal(k: usize, per_subcarrier_w: f64) -> Result<Self> {
        Self::new(vec![per_subcarrier_w; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Per-subcarrier capacity `C_k` (bits/s) and harvestable power `Q_k` (W).
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierMetrics {
    capacities: Vec<f64>,
    harvests: Vec<f64>,
    snrs: Option<Vec<f64>>,
}

impl SubcarrierMetrics {
    /// Metrics given directly, without an underlying channel.
    pub fn from_values(capacities: Vec<f64>, harvests: Vec<f64>) -> Result<Self> {
        check_len(capacities.len(), harvests.len())?;
        if capacities.iter().chain(&harvests).any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("metrics must be finite and non-negative".into()));
        }
        Ok(Self { capacities, harvests, snrs: None })
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn harvests(&self) -> &[f64] {
        &self.harvests
    }

    /// Average SNR `gamma_k = P_k / sigma^2`, when computed from a channel.
    pub fn snrs(&self) -> Option<&[f64]> {
        self.snrs.as_deref()
    }

    pub fn total_capacity(&self) -> f64 {
        self.capacities.iter().sum()
    }

    pub fn total_harvest(&self) -> f64 {
        self.harvests.iter().sum()
    }
}

/// Subcarrier partition: `true` routes the subcarrier to the information
/// decoder (set S), `false` to the energy harvester (set S^c).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllocationMask(Vec<bool>);

impl AllocationMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn all_info(k: usize) -> Self {
        Self(vec![true; k])
    }

    pub fn all_harvest(k: usize) -> Self {
        Self(vec![false; k])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_info(&self, k: usize) -> bool {
        self.0[k]
    }

    /// `s^c = 1 - s`.
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }

    pub fn info_indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k).collect()
    }

    pub fn harvest_indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| !b).map(|(k, _)| k).collect()
    }

    pub fn info_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn harvest_count(&self) -> usize {
        self.len() - self.info_count()
    }
}

/// Renders as the one-bit-per-subcarrier feedback word, e.g. `101`.
impl fmt::Display for AllocationMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Draws `k` i.i.d. Rayleigh-fading coefficients with `E[|H|^2] = mean_power`.
pub fn sample_rayleigh<R: Rng + ?Sized>(k: usize, rng: &mut R, mean_power: f64) -> Result<Vec<Complex64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("at least one subcarrier is required".into()));
    }
    if !(mean_power > 0.0 && mean_power.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean power must be positive, got {mean_power}")));
    }
    let sigma = (mean_power / 2.0).sqrt();
    Ok((0..k)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect())
}

pub fn compute_metrics(ch: &ChannelRealization, p: &PowerVector) -> Result<SubcarrierMetrics> {
    check_len(ch.num_subcarriers(), p.len())?;
    let b = ch.bandwidth_hz();
    let noise = ch.noise_variance_w();
    let n = p.len();
    let mut capacities = Vec::with_capacity(n);
    let mut harvests = Vec::with_capacity(n);
    let mut snrs = Vec::with_capacity(n);
    for (k, &power) in p.as_slice().iter().enumerate() {
        let g = ch.power_gain(k);
        let snr = power / noise;
        capacities.push(b * (g * snr).ln_1p() / std::f64::consts::LN_2);
        harvests.push(ch.efficiencies()[k] * g * power);
        snrs.push(snr);
    }
    Ok(SubcarrierMetrics { capacities, harvests, snrs: Some(snrs) })
}

/// `(C_T, Q_T)`: capacity summed over S, harvest summed over S^c.
pub fn totals(m: &SubcarrierMetrics, mask: &AllocationMask) -> Result<(f64, f64)> {
    check_len(m.len(), mask.len())?;
    let mut c_t = 0.0;
    let mut q_t = 0.0;
    for (k, &info) in mask.bits().iter().enumerate() {
        if info {
            c_t += m.capacities[k];
        } else {
            q_t += m.harvests[k];
        }
    }
    Ok((c_t, q_t))
}

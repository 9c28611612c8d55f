//! Single-instance input for `solve` and `bound`.
//!
//! Either per-subcarrier metrics directly:
//!
//! ```toml
//! capacities = [3.0, 2.0, 1.0]   # bit/s
//! harvests = [2.0, 2.0, 1.0]     # W
//! ```
//!
//! or a channel realization with equal transmit power:
//!
//! ```toml
//! bandwidth_hz = 15000
//! noise_variance_w = 1e-5
//! power_per_subcarrier_w = 0.002
//! eta = 0.5
//! gains_re = [0.3, -1.1]
//! gains_im = [0.7, 0.2]
//! ```

use std::path::Path;

use serde::Deserialize;
use swipt_core::rf_model::{compute_metrics, ChannelRealization, Complex64, PowerVector, SubcarrierMetrics};
use swipt_core::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelsFile {
    capacities: Option<Vec<f64>>,
    harvests: Option<Vec<f64>>,
    bandwidth_hz: Option<f64>,
    noise_variance_w: Option<f64>,
    power_per_subcarrier_w: Option<f64>,
    eta: Option<f64>,
    gains_re: Option<Vec<f64>>,
    gains_im: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<SubcarrierMetrics> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse(text: &str) -> Result<SubcarrierMetrics> {
    let f: ChannelsFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let channel_keys = [
        f.bandwidth_hz.is_some(),
        f.noise_variance_w.is_some(),
        f.power_per_subcarrier_w.is_some(),
        f.eta.is_some(),
        f.gains_re.is_some(),
        f.gains_im.is_some(),
    ];
    match (f.capacities, f.harvests) {
        (Some(c), Some(q)) if !channel_keys.contains(&true) => SubcarrierMetrics::from_values(c, q),
        (None, None) => {
            let missing = |name: &str| Error::Config(format!("missing key `{name}`"));
            let re = f.gains_re.ok_or_else(|| missing("gains_re"))?;
            let im = f.gains_im.ok_or_else(|| missing("gains_im"))?;
            if re.len() != im.len() {
                return Err(Error::LengthMismatch { expected: re.len(), found: im.len() });
            }
            let gains: Vec<Complex64> = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
            let k = gains.len();
            let ch = ChannelRealization::uniform(
                f.bandwidth_hz.ok_or_else(|| missing("bandwidth_hz"))?,
                f.noise_variance_w.ok_or_else(|| missing("noise_variance_w"))?,
                gains,
                f.eta.ok_or_else(|| missing("eta"))?,
            )?;
            let p = PowerVector::equal(k, f.power_per_subcarrier_w.ok_or_else(|| missing("power_per_subcarrier_w"))?)?;
            compute_metrics(&ch, &p)
        }
        _ => Err(Error::Config(
            "give either `capacities` and `harvests`, or a channel description, not both".into(),
        )),
    }
}

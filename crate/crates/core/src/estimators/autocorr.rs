use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::autocorr_objective_profile;
use crate::types::IqBuffer;

/// Search bound and reserved window of the lag-correlation argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutocorrParams {
    /// Largest lag searched.
    pub search_max: usize,
    /// Samples reserved at the tail; `None` reserves exactly `search_max`,
    /// which keeps the most products per lag.
    #[serde(default)]
    pub window: Option<usize>,
}

impl AutocorrParams {
    pub fn new(search_max: usize) -> Self {
        AutocorrParams {
            search_max,
            window: None,
        }
    }

    /// Search up to 2.5 times an expected useful length.
    pub fn around(expected_n_u: usize) -> Self {
        AutocorrParams::new(expected_n_u * 5 / 2)
    }

    fn resolved_window(&self) -> usize {
        self.window.unwrap_or(self.search_max)
    }
}

/// Useful symbol length as the lag of the strongest normalized correlation
/// outside the zero-lag lobe.
///
/// Oversampled signals correlate strongly at small lags, so the scan first
/// walks down the lobe around lag 0 and takes the argmax of what remains.
/// Ties go to the smallest lag.
pub fn estimate_nu_autocorr(signal: &IqBuffer, params: &AutocorrParams) -> Result<usize> {
    let window = params.resolved_window();
    let max_lag = params.search_max;
    if max_lag < 2 {
        return Err(Error::InvalidConfig("search_max must be >= 2".into()));
    }
    if max_lag >= signal.len() || window >= signal.len() {
        return Err(Error::BufferTooShort {
            needed: max_lag.max(window) + 1,
            available: signal.len(),
        });
    }
    let profile = autocorr_objective_profile(signal, max_lag, window)?;
    let v = profile.values();
    let mut start = 1;
    while start < max_lag && v[start + 1] < v[start] {
        start += 1;
    }
    let (arg, _) = (start..=max_lag).fold((start, f64::NEG_INFINITY), |(a, best), k| {
        if v[k] > best {
            (k, v[k])
        } else {
            (a, best)
        }
    });
    if start == max_lag {
        return Err(Error::failed(
            "autocorr",
            "correlation decreases over the whole search range",
        ));
    }
    Ok(arg)
}

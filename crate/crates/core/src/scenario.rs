//! Deployment description: SFN stations around a cluster centre at the
//! origin, the PPP interference field, antenna gains and link constants.
//!
//! All fields are linear SI quantities. The JSON file format (see
//! [`ScenarioConfig`]) is the only place dB values appear.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SfnError};
use crate::units::{db_to_linear, dbm_to_watts, linear_to_db, thermal_noise_watts, watts_to_dbm};

/// Relative tolerance under which two station means are treated as one
/// repeated mean.
pub const MEAN_GROUPING_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfnBaseStation {
    pub x_m: f64,
    pub y_m: f64,
    pub power_w: f64,
}

impl SfnBaseStation {
    pub fn new(x_m: f64, y_m: f64, power_w: f64) -> Result<Self> {
        let station = SfnBaseStation { x_m, y_m, power_w };
        station.validate()?;
        Ok(station)
    }

    pub fn distance_m(&self) -> f64 {
        self.x_m.hypot(self.y_m)
    }

    fn validate(&self) -> Result<()> {
        if !self.x_m.is_finite() || !self.y_m.is_finite() {
            return Err(SfnError::invalid(
                "sfn_stations.position",
                "coordinates must be finite",
            ));
        }
        if self.distance_m() <= 0.0 {
            return Err(SfnError::invalid(
                "sfn_stations.position",
                "a station cannot sit at the cluster centre",
            ));
        }
        if !(self.power_w >= 0.0) || !self.power_w.is_finite() {
            return Err(SfnError::invalid(
                "sfn_stations.power_w",
                format!("must be finite and >= 0, got {}", self.power_w),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceField {
    /// PPP intensity in stations per square metre.
    pub lambda_i: f64,
    pub p_los: f64,
    pub power_w: f64,
    /// Field radius used by the simulator. The analytic engine assumes an
    /// unbounded plane.
    pub radius_m: f64,
}

impl InterferenceField {
    pub fn lambda_los(&self) -> f64 {
        self.p_los * self.lambda_i
    }

    pub fn lambda_nlos(&self) -> f64 {
        (1.0 - self.p_los) * self.lambda_i
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda_i >= 0.0) || !self.lambda_i.is_finite() {
            return Err(SfnError::invalid(
                "interference.lambda_per_m2",
                "must be finite and >= 0",
            ));
        }
        if !(0.0..=1.0).contains(&self.p_los) {
            return Err(SfnError::invalid("interference.p_los", "must lie in [0, 1]"));
        }
        if !(self.power_w > 0.0) || !self.power_w.is_finite() {
            return Err(SfnError::invalid(
                "interference.power_w",
                "must be finite and > 0",
            ));
        }
        if !(self.radius_m > 0.0) {
            return Err(SfnError::invalid("interference.radius_m", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sfn_stations: Vec<SfnBaseStation>,
    pub interference: InterferenceField,
    pub g_s_tx: f64,
    pub g_i_tx: f64,
    pub g_rx: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub noise_w: f64,
    pub bandwidth_hz: f64,
    pub rate_h: f64,
    pub rate_j: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.sfn_stations.is_empty() {
            return Err(SfnError::invalid(
                "sfn_stations",
                "at least one station is required",
            ));
        }
        for station in &self.sfn_stations {
            station.validate()?;
        }
        self.interference.validate()?;
        for (name, gain) in [
            ("gains_db.sfn_tx", self.g_s_tx),
            ("gains_db.interferer_tx", self.g_i_tx),
            ("gains_db.rx", self.g_rx),
        ] {
            if !(gain > 0.0) || !gain.is_finite() {
                return Err(SfnError::invalid(name, "linear gain must be finite and > 0"));
            }
        }
        // The interference transform diverges at alpha = 2.
        for (name, alpha) in [
            ("path_loss.alpha_los", self.alpha_los),
            ("path_loss.alpha_nlos", self.alpha_nlos),
        ] {
            if !(alpha > 2.0) || !alpha.is_finite() {
                return Err(SfnError::invalid(name, format!("must be > 2, got {alpha}")));
            }
        }
        if !(self.noise_w > 0.0) || !self.noise_w.is_finite() {
            return Err(SfnError::invalid("noise", "noise power must be finite and > 0"));
        }
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(SfnError::invalid("rate.bandwidth_hz", "must be finite and > 0"));
        }
        for (name, v) in [("rate.h", self.rate_h), ("rate.j", self.rate_j)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(SfnError::invalid(name, "must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn num_stations(&self) -> usize {
        self.sfn_stations.len()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.sfn_stations.iter().map(|s| s.power_w).collect()
    }

    /// Copy of the scenario with the station powers replaced.
    pub fn with_powers(&self, powers: &[f64]) -> Result<Scenario> {
        if powers.len() != self.sfn_stations.len() {
            return Err(SfnError::invalid(
                "powers",
                format!(
                    "expected {} values, got {}",
                    self.sfn_stations.len(),
                    powers.len()
                ),
            ));
        }
        let mut out = self.clone();
        for (station, &p) in out.sfn_stations.iter_mut().zip(powers) {
            station.power_w = p;
        }
        out.validate()?;
        Ok(out)
    }

    pub fn with_lambda(&self, lambda_i: f64) -> Scenario {
        let mut out = self.clone();
        out.interference.lambda_i = lambda_i;
        out
    }

    /// Combined SFN transmit and vehicle receive gain.
    pub fn sfn_link_gain(&self) -> f64 {
        self.g_s_tx * self.g_rx
    }

    /// Combined interferer transmit and vehicle receive gain times interferer power.
    pub fn interferer_link_scale(&self) -> f64 {
        self.g_i_tx * self.g_rx * self.interference.power_w
    }

    /// Three 30 W stations at (-300, 0), (300, 0) and (0, 200) m inside a
    /// macro layer of 10 W interferers, 20/7/10 dB gains, LOS probability
    /// 0.2, exponents 2.5/3.5, 50 MHz of thermal noise at 290 K, LTE-A rate
    /// factors 0.17/0.06 and a 1 km simulation radius.
    pub fn three_station_reference(lambda_i: f64) -> Scenario {
        let bandwidth_hz = 50e6;
        Scenario {
            sfn_stations: vec![
                SfnBaseStation {
                    x_m: -300.0,
                    y_m: 0.0,
                    power_w: 30.0,
                },
                SfnBaseStation {
                    x_m: 300.0,
                    y_m: 0.0,
                    power_w: 30.0,
                },
                SfnBaseStation {
                    x_m: 0.0,
                    y_m: 200.0,
                    power_w: 30.0,
                },
            ],
            interference: InterferenceField {
                lambda_i,
                p_los: 0.2,
                power_w: 10.0,
                radius_m: 1000.0,
            },
            g_s_tx: db_to_linear(20.0),
            g_i_tx: db_to_linear(7.0),
            g_rx: db_to_linear(10.0),
            alpha_los: 2.5,
            alpha_nlos: 3.5,
            noise_w: thermal_noise_watts(290.0, bandwidth_hz),
            bandwidth_hz,
            rate_h: 0.17,
            rate_j: 0.06,
        }
    }
}

/// Multiset of exponential means `P_i d_i^-alpha`, grouped into distinct
/// values with multiplicities. Means are kept in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HypoexpSpec {
    distinct_means: Vec<f64>,
    multiplicities: Vec<u32>,
}

impl HypoexpSpec {
    /// Builds a spec from already-grouped means. Means must be positive and
    /// pairwise separated by more than [`MEAN_GROUPING_RTOL`].
    pub fn new(distinct_means: Vec<f64>, multiplicities: Vec<u32>) -> Result<Self> {
        if distinct_means.is_empty() || distinct_means.len() != multiplicities.len() {
            return Err(SfnError::invalid(
                "hypoexp",
                "need one multiplicity per mean and at least one mean",
            ));
        }
        if distinct_means.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(SfnError::invalid("hypoexp.means", "means must be finite and > 0"));
        }
        if multiplicities.contains(&0) {
            return Err(SfnError::invalid("hypoexp.multiplicities", "must be >= 1"));
        }
        let mut pairs: Vec<(f64, u32)> = distinct_means.into_iter().zip(multiplicities).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            if w[1].0 - w[0].0 <= MEAN_GROUPING_RTOL * w[1].0 {
                return Err(SfnError::invalid(
                    "hypoexp.means",
                    format!("means {} and {} are not distinct", w[0].0, w[1].0),
                ));
            }
        }
        let (distinct_means, multiplicities) = pairs.into_iter().unzip();
        Ok(HypoexpSpec {
            distinct_means,
            multiplicities,
        })
    }

    /// Groups raw means that agree within [`MEAN_GROUPING_RTOL`]. Zero means
    /// are dropped.
    pub fn from_means(means: &[f64]) -> Result<Self> {
        let mut sorted: Vec<f64> = means.iter().copied().filter(|&m| m != 0.0).collect();
        if sorted.is_empty() {
            return Err(SfnError::AllPowersZero);
        }
        if sorted.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(SfnError::invalid(
                "hypoexp.means",
                "means must be finite and >= 0",
            ));
        }
        sorted.sort_by(f64::total_cmp);

        let mut distinct = Vec::new();
        let mut mult = Vec::new();
        let mut group: Vec<f64> = vec![sorted[0]];
        for &m in &sorted[1..] {
            if m - group[0] <= MEAN_GROUPING_RTOL * m {
                group.push(m);
            } else {
                distinct.push(group.iter().sum::<f64>() / group.len() as f64);
                mult.push(group.len() as u32);
                group = vec![m];
            }
        }
        distinct.push(group.iter().sum::<f64>() / group.len() as f64);
        mult.push(group.len() as u32);
        Ok(HypoexpSpec {
            distinct_means: distinct,
            multiplicities: mult,
        })
    }

    pub fn distinct_means(&self) -> &[f64] {
        &self.distinct_means
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Total number of exponential summands.
    pub fn order(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    pub fn all_distinct(&self) -> bool {
        self.multiplicities.iter().all(|&o| o == 1)
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.multiplicities.iter().copied().max().unwrap_or(0)
    }
}

/// Exponential means of the received SFN powers for the given transmit
/// powers. SFN stations always see the LOS exponent.
pub(crate) fn station_means(scenario: &Scenario, powers: &[f64]) -> Vec<f64> {
    scenario
        .sfn_stations
        .iter()
        .zip(powers)
        .map(|(s, &p)| p * s.distance_m().powf(-scenario.alpha_los))
        .collect()
}

pub fn build_hypoexp_spec(scenario: &Scenario) -> Result<HypoexpSpec> {
    scenario.validate()?;
    HypoexpSpec::from_means(&station_means(scenario, &scenario.powers()))
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationConfig {
    pub x_m: f64,
    pub y_m: f64,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceConfig {
    pub lambda_per_m2: f64,
    pub p_los: f64,
    pub power_w: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsConfig {
    pub sfn_tx: f64,
    pub interferer_tx: f64,
    pub rx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossConfig {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseConfig {
    Dbm {
        dbm: f64,
    },
    Thermal {
        temperature_k: f64,
        from_bandwidth: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub bandwidth_hz: f64,
    pub h: f64,
    pub j: f64,
}

/// On-disk scenario. Gains in dB, noise in dBm or derived from temperature
/// and bandwidth, everything else in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sfn_stations: Vec<StationConfig>,
    pub interference: InterferenceConfig,
    pub gains_db: GainsConfig,
    pub path_loss: PathLossConfig,
    pub noise: NoiseConfig,
    pub rate: RateConfig,
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SfnError::Config(e.to_string()))
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| SfnError::Config(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config serializes")
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let noise_w = match self.noise {
            NoiseConfig::Dbm { dbm } => dbm_to_watts(dbm),
            NoiseConfig::Thermal {
                temperature_k,
                from_bandwidth,
            } => {
                if !from_bandwidth {
                    return Err(SfnError::invalid(
                        "noise.from_bandwidth",
                        "must be true when noise is given by temperature",
                    ));
                }
                if !(temperature_k > 0.0) {
                    return Err(SfnError::invalid("noise.temperature_k", "must be > 0"));
                }
                thermal_noise_watts(temperature_k, self.rate.bandwidth_hz)
            }
        };
        let scenario = Scenario {
            sfn_stations: self
                .sfn_stations
                .iter()
                .map(|s| SfnBaseStation {
                    x_m: s.x_m,
                    y_m: s.y_m,
                    power_w: s.power_w,
                })
                .collect(),
            interference: InterferenceField {
                lambda_i: self.interference.lambda_per_m2,
                p_los: self.interference.p_los,
                power_w: self.interference.power_w,
                radius_m: self.interference.radius_m,
            },
            g_s_tx: db_to_linear(self.gains_db.sfn_tx),
            g_i_tx: db_to_linear(self.gains_db.interferer_tx),
            g_rx: db_to_linear(self.gains_db.rx),
            alpha_los: self.path_loss.alpha_los,
            alpha_nlos: self.path_loss.alpha_nlos,
            noise_w,
            bandwidth_hz: self.rate.bandwidth_hz,
            rate_h: self.rate.h,
            rate_j: self.rate.j,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Inverse of [`ScenarioConfig::to_scenario`]; noise is written in dBm.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        ScenarioConfig {
            sfn_stations: scenario
                .sfn_stations
                .iter()
                .map(|s| StationConfig {
                    x_m: s.x_m,
                    y_m: s.y_m,
                    power_w: s.power_w,
                })
                .collect(),
            interference: InterferenceConfig {
                lambda_per_m2: scenario.interference.lambda_i,
                p_los: scenario.interference.p_los,
                power_w: scenario.interference.power_w,
                radius_m: scenario.interference.radius_m,
            },
            gains_db: GainsConfig {
                sfn_tx: linear_to_db(scenario.g_s_tx),
                interferer_tx: linear_to_db(scenario.g_i_tx),
                rx: linear_to_db(scenario.g_rx),
            },
            path_loss: PathLossConfig {
                alpha_los: scenario.alpha_los,
                alpha_nlos: scenario.alpha_nlos,
            },
            noise: NoiseConfig::Dbm {
                dbm: watts_to_dbm(scenario.noise_w),
            },
            rate: RateConfig {
                bandwidth_hz: scenario.bandwidth_hz,
                h: scenario.rate_h,
                j: scenario.rate_j,
            },
        }
    }
}

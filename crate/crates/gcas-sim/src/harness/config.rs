//! The main configuration file: airframe, actuators, CAS gains, rate
//! bounds, and envelope-protection limits in one TOML document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::airframe::AircraftConfig;
use crate::error::{Error, Result};
use crate::fep::FepConfig;
use crate::flight_control::{CasGains, RateBounds};

/// Everything a closed-loop run needs besides the scenario and the gain
/// schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub aircraft: AircraftConfig,
    pub cas: CasGains,
    pub rates: RateBounds,
    pub fep: FepConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            aircraft: AircraftConfig::default(),
            cas: CasGains::default(),
            rates: RateBounds::default(),
            fep: FepConfig::default(),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct SimConfigFile {
    aircraft: crate::airframe::config_file::AircraftFile,
    cas: crate::flight_control::CasFile,
    rates: crate::flight_control::RateBoundsFile,
    fep: crate::fep::FepFile,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SimConfigFile =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        Ok(Self {
            aircraft: file.aircraft.to_config()?,
            cas: file.cas.to_gains()?,
            rates: file.rates.to_bounds()?,
            fep: file.fep.to_config()?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let d = 180.0 / std::f64::consts::PI;
        let file = SimConfigFile {
            aircraft: crate::airframe::config_file::AircraftFile::from_config(&self.aircraft),
            cas: crate::flight_control::CasFile {
                kp: self.cas.kp,
                kq: self.cas.kq,
                kr: self.cas.kr,
            },
            rates: crate::flight_control::RateBoundsFile {
                p_dps: [self.rates.p_min * d, self.rates.p_max * d],
                q_dps: [self.rates.q_min * d, self.rates.q_max * d],
                r_dps: [self.rates.r_min * d, self.rates.r_max * d],
            },
            fep: crate::fep::FepFile::from_config(&self.fep),
        };
        toml::to_string_pretty(&file).expect("config serializes")
    }
}

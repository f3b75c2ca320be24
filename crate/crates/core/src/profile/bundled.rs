//! Profiles shipped with the crate.

use std::fmt;
use std::str::FromStr;

use super::{parse_profiles, JobProfile, ProfileError, ResourceProfile};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bundled {
    /// 10-task, 3-processor canonical list-scheduling example.
    Canonical,
    /// 26-task WiFi transmitter over 7 resource types.
    Wifi,
    /// 2-task chain over 2 heterogeneous PEs.
    Toy,
}

/// A `(job, resources)` pair as loaded from a bundled profile.
pub type BundledProfile<T> = (JobProfile<T>, ResourceProfile);

impl Bundled {
    pub const ALL: [Bundled; 3] = [Bundled::Canonical, Bundled::Wifi, Bundled::Toy];

    pub fn job_text(self) -> &'static str {
        match self {
            Bundled::Canonical => include_str!("../../data/canonical.job"),
            Bundled::Wifi => include_str!("../../data/wifi.job"),
            Bundled::Toy => include_str!("../../data/toy.job"),
        }
    }

    pub fn resource_text(self) -> &'static str {
        match self {
            Bundled::Canonical => include_str!("../../data/canonical.res"),
            Bundled::Wifi => include_str!("../../data/wifi.res"),
            Bundled::Toy => include_str!("../../data/toy.res"),
        }
    }

    pub fn load<T: Scalar>(self) -> Result<BundledProfile<T>, ProfileError> {
        parse_profiles(self.job_text(), self.resource_text())
    }

    pub fn name(self) -> &'static str {
        match self {
            Bundled::Canonical => "canonical",
            Bundled::Wifi => "wifi",
            Bundled::Toy => "toy",
        }
    }
}

impl fmt::Display for Bundled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bundled {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Bundled::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown bundled profile `{s}` (expected canonical, wifi or toy)"))
    }
}

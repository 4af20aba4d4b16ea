//! Experiment knobs shared by the pipeline and the command-line tool.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cost::DEFAULT_TAU;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Bnb,
    Exhaustive,
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bnb" => Ok(Solver::Bnb),
            "exhaustive" => Ok(Solver::Exhaustive),
            other => Err(Error::InvalidArgument(format!("unknown solver {other:?}"))),
        }
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Solver::Bnb => "bnb",
            Solver::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Number of Laplace–Beltrami eigenpairs.
    pub k: usize,
    /// Descriptor width (HKS times and WKS energies each).
    pub d: usize,
    /// Region count for segment gating.
    pub r: usize,
    pub tau: f64,
    /// Maximum triangle area of the query solid, as a fraction of its area.
    pub max_area_factor: f64,
    /// Whether the cost matrix gates on region labels.
    pub segments: bool,
    pub solver: Solver,
    pub seed: u64,
    /// 0 means all available cores.
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 25,
            d: 100,
            r: 6,
            tau: DEFAULT_TAU,
            max_area_factor: 1.0 / 1000.0,
            segments: true,
            solver: Solver::Bnb,
            seed: 0,
            threads: 0,
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{what} must be positive")));
        if self.k < 3 {
            return Err(Error::InvalidArgument("k must be at least 3".into()));
        }
        if self.d == 0 {
            return bad("d");
        }
        if self.r == 0 {
            return bad("r");
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau");
        }
        if !(self.max_area_factor > 0.0 && self.max_area_factor.is_finite()) {
            return bad("max_area_factor");
        }
        if self.segments && self.r > self.k {
            return Err(Error::InvalidArgument("r must not exceed k".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!((c.k, c.d, c.r, c.tau), (25, 100, 6, 1000.0));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
        assert_eq!("exhaustive".parse::<Solver>().unwrap(), Solver::Exhaustive);
        assert!("fast".parse::<Solver>().is_err());
        assert!(RunConfig { d: 0, ..RunConfig::default() }.validate().is_err());
    }
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable holding the default master seed.
pub const SEED_ENV: &str = "CMLHDC_SEED";
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    SuccessRate,
    SignSimilarity,
    NoiseFloor,
    BundleRecovery,
    Hierarchy,
    MonolithicExp,
    ProxyMap,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::SuccessRate,
        Experiment::SignSimilarity,
        Experiment::NoiseFloor,
        Experiment::BundleRecovery,
        Experiment::Hierarchy,
        Experiment::MonolithicExp,
        Experiment::ProxyMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SuccessRate => "success-rate",
            Experiment::SignSimilarity => "sign-similarity",
            Experiment::NoiseFloor => "noise-floor",
            Experiment::BundleRecovery => "bundle-recovery",
            Experiment::Hierarchy => "hierarchy",
            Experiment::MonolithicExp => "monolithic-exp",
            Experiment::ProxyMap => "proxy-map",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::UnknownExperiment(s.to_owned()))
    }
}

/// Experiment settings. Unset fields take per-experiment defaults in
/// [`ExperimentConfig::resolved`]; how each field is used:
///
/// | experiment | fields |
/// |---|---|
/// | success-rate | n, d, edges, epochs, trials |
/// | sign-similarity | n, d, edges, epochs, trials |
/// | noise-floor | d, trials (random pairs) |
/// | bundle-recovery | d, k (largest bundle), trials (per bundle size) |
/// | hierarchy | n, d, levels, trials, theta |
/// | monolithic-exp | n, d, edges, epochs, k (runs 1..=k), theta, trials, cycles |
/// | proxy-map | n, d, edges, epochs, m and k (grid 1..=m × 1..=k), theta, budget, maps |
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub edges: Option<usize>,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub cycles: Option<usize>,
    #[serde(default)]
    pub levels: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub maps: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub serial: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

macro_rules! getter {
    ($($name:ident: $ty:ty),*) => {
        $(
            /// Resolved value; panics before [`ExperimentConfig::resolved`].
            pub fn $name(&self) -> $ty {
                self.$name.expect(concat!(stringify!($name), " is resolved"))
            }
        )*
    };
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, ..Self::default() }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    getter!(n: usize, d: usize, edges: usize, epochs: usize, k: usize, m: usize, trials: usize, cycles: usize,
        levels: usize, budget: usize, maps: usize, seed: u64);

    /// Copy with every unset field filled by the experiment's default.
    /// `theta` stays unset when the default is computed from the noise floor.
    pub fn resolved(&self) -> Result<Self> {
        use Experiment::*;
        let e = self.experiment;
        let mut c = self.clone();
        let n = *c.n.get_or_insert(if e == ProxyMap { 25 } else { 10 });
        c.d.get_or_insert(1000);
        c.edges.get_or_insert(2 * n);
        c.epochs.get_or_insert(500);
        c.k.get_or_insert(match e {
            BundleRecovery => 25,
            ProxyMap => 8,
            _ => 5,
        });
        c.m.get_or_insert(8);
        c.trials.get_or_insert(match e {
            SuccessRate => 50,
            NoiseFloor => 10_000,
            BundleRecovery => 100,
            Hierarchy => 20,
            _ => 5,
        });
        c.cycles.get_or_insert(10);
        c.levels.get_or_insert(50);
        c.budget.get_or_insert(crate::proxy::ATTEMPT_BUDGET);
        c.maps.get_or_insert(crate::proxy::MAPS_NEEDED);
        if c.seed.is_none() {
            c.seed = Some(match std::env::var(SEED_ENV) {
                Ok(v) => v.parse().map_err(|_| Error::invalid(format!("{SEED_ENV} is not an integer: {v}")))?,
                Err(_) => DEFAULT_SEED,
            });
        }
        for (name, v) in [
            ("n", c.n()),
            ("d", c.d()),
            ("edges", c.edges()),
            ("epochs", c.epochs()),
            ("k", c.k()),
            ("m", c.m()),
            ("trials", c.trials()),
            ("cycles", c.cycles()),
            ("levels", c.levels()),
            ("budget", c.budget()),
            ("maps", c.maps()),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if let Some(t) = c.theta {
            if t.is_nan() || t < 0.0 {
                return Err(Error::invalid(format!("theta must be non-negative, got {t}")));
            }
        }
        Ok(c)
    }

    /// Parallel execution unless `serial` is set.
    pub fn parallel(&self) -> bool {
        !self.serial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(serde_json::to_string(&e).unwrap(), format!("\"{}\"", e.name()));
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn defaults_follow_experiment() {
        let c = ExperimentConfig { seed: Some(1), ..ExperimentConfig::new(Experiment::ProxyMap) }.resolved().unwrap();
        assert_eq!((c.n(), c.edges(), c.k(), c.m()), (25, 50, 8, 8));
        let c = ExperimentConfig { seed: Some(1), n: Some(25), ..ExperimentConfig::new(Experiment::SuccessRate) }
            .resolved()
            .unwrap();
        assert_eq!((c.edges(), c.trials(), c.epochs()), (50, 50, 500));
    }

    #[test]
    fn zero_counts_are_rejected() {
        let c = ExperimentConfig { trials: Some(0), seed: Some(1), ..ExperimentConfig::new(Experiment::NoiseFloor) };
        assert!(c.resolved().is_err());
    }

    #[test]
    fn json_config_parses() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"experiment": "hierarchy", "n": 25, "theta": 0.03}"#).unwrap();
        assert_eq!(c.experiment, Experiment::Hierarchy);
        assert_eq!(c.n, Some(25));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": "bogus"}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": "hierarchy", "x": 1}"#).is_err());
    }
}

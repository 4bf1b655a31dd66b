//! Run configuration documents.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use swapqpe::protocol::{
    InitialPreparation, Mode, RegisterPrep, Shots, StepVariant, DEFAULT_THRESHOLD,
};

/// `exact`, or a positive shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotSpec {
    #[default]
    Exact,
    Count(u64),
}

impl ShotSpec {
    pub fn to_shots(self) -> Shots {
        match self {
            ShotSpec::Exact => Shots::Exact,
            ShotSpec::Count(n) => Shots::Sampled(n),
        }
    }
}

impl FromStr for ShotSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotSpec::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) => Err("shot count must be positive".into()),
            Ok(n) => Ok(ShotSpec::Count(n)),
            Err(_) => Err(format!("expected a shot count or \"exact\", got {s:?}")),
        }
    }
}

impl fmt::Display for ShotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShotSpec::Exact => f.write_str("exact"),
            ShotSpec::Count(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for ShotSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ShotSpec::Exact => serializer.serialize_str("exact"),
            ShotSpec::Count(n) => serializer.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for ShotSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Count(n) => n.to_string().parse(),
            Raw::Word(w) => w.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// The hidden unitary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Identity {
        n: usize,
    },
    /// Haar-random; `seed` defaults to the run seed.
    Haar {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Prescribed eigenphases in a random eigenbasis.
    Spectrum {
        phases: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `exp(−iHt)` for a Hermitian matrix read from a text file. Exactly one
    /// of `t` and `delta_bound` is set; the latter selects `t = π/Δ`.
    Hamiltonian {
        matrix: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta_bound: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepSpec {
    #[serde(default = "mixed")]
    pub r1: RegisterPrep,
    #[serde(default = "mixed")]
    pub r2: RegisterPrep,
}

fn mixed() -> RegisterPrep {
    RegisterPrep::MaximallyMixed
}

impl Default for PrepSpec {
    fn default() -> Self {
        Self {
            r1: mixed(),
            r2: mixed(),
        }
    }
}

impl PrepSpec {
    pub fn to_preparation(&self) -> InitialPreparation {
        InitialPreparation::new(self.r1.clone(), self.r2.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub ks: Vec<usize>,
    /// Period to score the top candidate against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k: usize,
    #[serde(default)]
    pub shots: ShotSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub variant: StepVariant,
    /// Result location; not part of the echoed provenance.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub prep: PrepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file. Relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config =
            Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let InstanceSpec::Hamiltonian { matrix, .. } = &mut config.instance {
            if matrix.is_relative() {
                *matrix = base.join(&*matrix);
            }
            if !matrix.is_file() {
                bail!("instance.matrix: file {} does not exist", matrix.display());
            }
        }
        if let Some(out) = &mut config.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            bail!("k: must be at least 1");
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            bail!("threshold: {} is outside (0, 1)", self.threshold);
        }
        match &self.instance {
            InstanceSpec::Identity { n } | InstanceSpec::Haar { n, .. } if *n == 0 => {
                bail!("instance.n: must be at least 1")
            }
            InstanceSpec::Spectrum { phases, .. } => {
                if phases.len() < 2 || !phases.len().is_power_of_two() {
                    bail!(
                        "instance.phases: length {} is not a power of two ≥ 2",
                        phases.len()
                    );
                }
                if phases.iter().any(|p| !p.is_finite()) {
                    bail!("instance.phases: non-finite entry");
                }
            }
            InstanceSpec::Hamiltonian { t, delta_bound, .. } => match (t, delta_bound) {
                (Some(_), Some(_)) => bail!("instance: set only one of `t` and `delta_bound`"),
                (None, None) => bail!("instance: missing field `t` or `delta_bound`"),
                _ => {}
            },
            _ => {}
        }
        if let Some(sweep) = &self.sweep {
            if sweep.ks.contains(&0) {
                bail!("sweep.ks: entries must be at least 1");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        k = 4
        [instance]
        kind = "haar"
        n = 2
    "#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.shots, ShotSpec::Exact);
        assert_eq!(c.mode, Mode::FullSwap);
        assert_eq!(c.threshold, DEFAULT_THRESHOLD);
        assert_eq!(c.prep, PrepSpec::default());
    }

    #[test]
    fn missing_k_is_named() {
        let err = RunConfig::parse("[instance]\nkind = \"identity\"\nn = 1\n").unwrap_err();
        assert!(format!("{err:#}").contains("`k`"), "{err:#}");
    }

    #[test]
    fn shots_accept_count_or_keyword() {
        let c = RunConfig::parse(&format!("shots = 250\n{MINIMAL}")).unwrap();
        assert_eq!(c.shots, ShotSpec::Count(250));
        let c = RunConfig::parse(&format!("shots = \"exact\"\n{MINIMAL}")).unwrap();
        assert_eq!(c.shots, ShotSpec::Exact);
        assert!(RunConfig::parse(&format!("shots = 0\n{MINIMAL}")).is_err());
        assert_eq!("exact".parse::<ShotSpec>(), Ok(ShotSpec::Exact));
        assert!("many".parse::<ShotSpec>().is_err());
    }

    #[test]
    fn preparations_parse() {
        let text = r#"
            k = 3
            [instance]
            kind = "spectrum"
            phases = [0.0, 1.0]
            [prep]
            r1 = { eigenstate = 1 }
            r2 = { amplitudes = [[0.6, 0.0], [0.0, 0.8]] }
        "#;
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.prep.r1, RegisterPrep::Eigenstate(1));
        assert!(matches!(&c.prep.r2, RegisterPrep::Amplitudes(a) if a.len() == 2));
        let c = RunConfig::parse(&format!(
            "{MINIMAL}\n[prep]\nr1 = \"maximally-mixed\"\nr2 = {{ basis = 3 }}\n"
        ))
        .unwrap();
        assert_eq!(c.prep.r2, RegisterPrep::Basis(3));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse(&format!("threshold = 1.0\n{MINIMAL}")).is_err());
        assert!(RunConfig::parse(&format!("bogus = 1\n{MINIMAL}")).is_err());
        let three = "k = 2\n[instance]\nkind = \"spectrum\"\nphases = [0.0, 1.0, 2.0]\n";
        assert!(RunConfig::parse(three).is_err());
        let both = "k = 2\n[instance]\nkind = \"hamiltonian\"\nmatrix = \"h.txt\"\nt = 1.0\ndelta_bound = 2.0\n";
        assert!(format!("{:#}", RunConfig::parse(both).unwrap_err()).contains("only one"));
    }

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::parse(&format!("shots = 10\nseed = 3\n{MINIMAL}")).unwrap();
        let echoed = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&echoed).unwrap(), c);
    }
}

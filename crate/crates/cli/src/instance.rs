//! Builds sealed oracles from instance specs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use swapqpe::protocol::choose_time_step;
use swapqpe::qsim::{CMatrix, RngStream, C64};
use swapqpe::{BlackBoxUnitary, HermitianGenerator};

use crate::config::InstanceSpec;

/// Substream reserved for instance construction, disjoint from shot streams
/// at any realistic shot offset.
const INSTANCE_STREAM: u64 = u64::MAX;

pub struct Instance {
    pub oracle: BlackBoxUnitary,
    /// Evolution time for Hamiltonian instances.
    pub time_step: Option<f64>,
}

pub fn build(spec: &InstanceSpec, run_seed: u64) -> Result<Instance> {
    let rng =
        |seed: Option<u64>| RngStream::new(seed.unwrap_or(run_seed)).substream(INSTANCE_STREAM);
    let (oracle, time_step) = match spec {
        InstanceSpec::Identity { n } => (BlackBoxUnitary::identity(*n)?, None),
        InstanceSpec::Haar { n, seed } => {
            (BlackBoxUnitary::haar_random(*n, &mut rng(*seed))?, None)
        }
        InstanceSpec::Spectrum { phases, seed } => (
            BlackBoxUnitary::from_spectrum(phases, &mut rng(*seed))?,
            None,
        ),
        InstanceSpec::Hamiltonian {
            matrix,
            t,
            delta_bound,
        } => {
            let generator = HermitianGenerator::new(read_matrix(matrix)?)?;
            let t = match (t, delta_bound) {
                (Some(t), None) => *t,
                (None, Some(delta)) => choose_time_step(*delta)?,
                _ => bail!("instance: set exactly one of `t` and `delta_bound`"),
            };
            (BlackBoxUnitary::from_hamiltonian(&generator, t)?, Some(t))
        }
    };
    Ok(Instance { oracle, time_step })
}

/// Reads a square complex matrix written as one row per line of
/// whitespace-separated `re im` pairs. Blank lines and `#` comments are
/// skipped.
pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read matrix file {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("malformed matrix file {}", path.display()))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("line {}: not a number", line_no + 1))?;
        if values.len() % 2 != 0 {
            bail!(
                "line {}: odd number of values, expected re im pairs",
                line_no + 1
            );
        }
        rows.push(values.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let dim = rows.len();
    if dim == 0 {
        bail!("no rows");
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        bail!("row {} has {} entries, expected {dim}", i + 1, row.len());
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let m = parse_matrix("# pauli y\n0 0  0 -1\n0 1  0 0\n\n").unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn rejects_ragged_or_odd_rows() {
        assert!(parse_matrix("1 0 0 0\n0 0\n").is_err());
        assert!(parse_matrix("1 0 0\n0 0 1\n").is_err());
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("1 x\n").is_err());
    }

    #[test]
    fn seeds_are_reproducible() {
        let spec = InstanceSpec::Haar { n: 1, seed: None };
        let a = build(&spec, 5).unwrap();
        let b = build(&spec, 5).unwrap();
        let c = build(
            &InstanceSpec::Haar {
                n: 1,
                seed: Some(5),
            },
            9,
        )
        .unwrap();
        let reveal = |i: &Instance| swapqpe::verify::reveal_matrix(&i.oracle);
        assert_eq!(reveal(&a), reveal(&b));
        assert_eq!(reveal(&a), reveal(&c));
    }
}

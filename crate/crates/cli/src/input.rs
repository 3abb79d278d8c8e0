use std::fmt;
use std::path::{Path, PathBuf};

use covpom::abelian::{DiagonalRep, FiniteAbelianGroup, IsometryFamily, RepSpec, Subgroup};
use covpom::grid::GridState;
use covpom::phasespace::{gaussian, ground_state, hermite_functions, random_state};
use covpom::Grid1D;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<covpom::Error> for InputError {
    fn from(e: covpom::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        Self(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    parse(path, &read_text(path)?)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| InputError(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Compact description of a state on the grid selected by the flags.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Ground,
    /// `(2a/π)^{1/4} e^{−(a + ib)x²}`.
    Gaussian {
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Hermite {
        index: usize,
    },
    /// Drawn from the run's seed.
    Random {
        #[serde(default = "default_rank")]
        max_rank: usize,
        #[serde(default = "default_modes")]
        modes: usize,
    },
}

fn default_rank() -> usize {
    3
}

fn default_modes() -> usize {
    4
}

impl StateSpec {
    pub fn build(&self, grid: Grid1D, rng: &mut ChaCha8Rng) -> Result<GridState, InputError> {
        Ok(match *self {
            StateSpec::Ground => ground_state(grid),
            StateSpec::Gaussian { a, b } => {
                if !(a > 0.0) {
                    return Err(InputError(format!("gaussian width parameter a = {a} must be positive")));
                }
                GridState::pure(gaussian(grid, a, b))?
            }
            StateSpec::Hermite { index } => {
                let h = hermite_functions(grid, index + 1).pop().expect("index + 1 functions");
                GridState::pure(h)?
            }
            StateSpec::Random { max_rank, modes } => random_state(rng, grid, max_rank, modes)?,
        })
    }
}

/// A grid state given either explicitly (`{grid, spectral}`) or by a
/// `{kind, ...}` description.
pub fn read_grid_state(path: &Path, grid: Grid1D, rng: &mut ChaCha8Rng) -> Result<GridState, InputError> {
    let text = read_text(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    if value.get("kind").is_some() {
        parse::<StateSpec>(path, &text)?.build(grid, rng)
    } else {
        parse(path, &text)
    }
}

/// Input of `abelian-pom`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelianSpec {
    pub group: FiniteAbelianGroup,
    pub subgroup: SubgroupSpec,
    pub rep: RepSpec,
    /// Drawn from the run's seed when absent.
    pub isometries: Option<IsometryFamily>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupSpec {
    #[serde(default)]
    pub generators: Vec<usize>,
}

impl AbelianSpec {
    pub fn resolve(&self) -> Result<(DiagonalRep, Subgroup), InputError> {
        let h = Subgroup::generated(&self.group, &self.subgroup.generators)?;
        let rep = DiagonalRep::new(self.group.clone(), &self.rep)?;
        Ok((rep, h))
    }
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
            Ok((a, b))
        }
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

pub fn display(path: &Option<PathBuf>) -> String {
    path.as_ref().map_or_else(|| "stdout".into(), |p| p.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("-1.5, 2").unwrap(), (-1.5, 2.0));
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,x").is_err());
    }

    #[test]
    fn state_specs_build() {
        let g = Grid1D::symmetric(256, 12.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for text in [r#"{"kind":"ground"}"#, r#"{"kind":"gaussian","a":1,"b":1}"#, r#"{"kind":"hermite","index":2}"#, r#"{"kind":"random"}"#] {
            let spec: StateSpec = serde_json::from_str(text).unwrap();
            let s = spec.build(g, &mut rng).unwrap();
            assert!(s.trace_defect() < 1e-12);
        }
        let bad: Result<StateSpec, _> = serde_json::from_str(r#"{"kind":"gaussian","a":1,"c":0}"#);
        assert!(bad.unwrap_err().to_string().contains("unknown field"));
    }
}

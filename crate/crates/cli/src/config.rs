//! Config files and flag precedence.
//!
//! A config file is either JSON (first non-blank character `{`) or
//! `key = value` lines in TOML syntax. Values set on the command line win
//! over the file, which wins over built-in defaults.

use std::path::{Path, PathBuf};

use rsd_market::{Error, Result};
use serde::Deserialize;

/// Every key a config file may set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub numeric_mode: Option<String>,
    pub verbosity: Option<u8>,
    pub threads: Option<usize>,
    // Mechanisms.
    pub scenario: Option<String>,
    pub instance: Option<PathBuf>,
    pub mechanism: Option<String>,
    pub order: Option<Vec<usize>>,
    pub lambda: Option<f64>,
    pub seller_floor: Option<bool>,
    pub pairwise_mode: Option<String>,
    pub budget_enforced: Option<bool>,
    pub agent_model: Option<String>,
    // Two-agent analysis.
    pub domain: Option<String>,
    pub draws: Option<usize>,
    // Simulation.
    pub agents: Option<usize>,
    pub wealth: Option<String>,
    pub tau: Option<String>,
    pub tau_list: Option<Vec<String>>,
    pub reps: Option<usize>,
    pub cost_aware_augmentation: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Argument(format!("config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Argument(format!("config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Argument(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Flag value, else file value, else default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag or file string parsed with `FromStr`, else default.
pub fn pick_parsed<T>(flag: Option<T>, file: Option<&str>, default: T) -> Result<T>
where
    T: std::str::FromStr<Err = Error>,
{
    match (flag, file) {
        (Some(v), _) => Ok(v),
        (None, Some(s)) => s.parse(),
        (None, None) => Ok(default),
    }
}

pub const SEED_ENV: &str = "RSD_MARKET_SEED";

/// Seed from the flag, the file, `RSD_MARKET_SEED`, or a fresh one.
/// The second value is true when the seed was generated.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<(u64, bool)> {
    if let Some(s) = flag.or(file) {
        return Ok((s, false));
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        let seed = text
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("{SEED_ENV}: '{text}' is not a u64")))?;
        return Ok((seed, false));
    }
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos() as u64);
    Ok((rsd_market::simulate::derive_seed(nanos, u64::from(std::process::id())), true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_json_agree() {
        let kv = FileConfig::parse("seed = 7\nwealth = \"equal:5\"\n# comment\nreps = 3\n").unwrap();
        let js = FileConfig::parse(r#"{"seed": 7, "wealth": "equal:5", "reps": 3}"#).unwrap();
        assert_eq!(kv, js);
        assert_eq!(kv.seed, Some(7));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(FileConfig::parse("sed = 7"), Err(Error::Argument(_))));
        assert!(FileConfig::parse(r#"{"agentz": 3}"#).is_err());
    }

    #[test]
    fn flags_beat_file_beat_default() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
        let w: rsd_market::simulate::WealthModel =
            pick_parsed(None, Some("equal:5"), Default::default()).unwrap();
        assert_eq!(w, rsd_market::simulate::WealthModel::Equal { amount: 5.0 });
    }

    #[test]
    fn explicit_seed_is_not_generated() {
        assert_eq!(resolve_seed(Some(3), Some(4)).unwrap(), (3, false));
        assert_eq!(resolve_seed(None, Some(4)).unwrap(), (4, false));
    }
}

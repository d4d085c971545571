//! `key=value` run configuration. Command-line flags take precedence over
//! file values, which take precedence over built-in defaults.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use wpimpact::Error;

/// Keys accepted in a config file; each matches a long flag name.
pub const KNOWN_KEYS: &[&str] = &[
    "events", "grid", "dataset", "draws", "shifts", "out-dir", "train-seasons", "apply-season",
    "before-date", "ht", "hl", "pseudo-games", "pseudo-threshold", "max-overtimes", "burn-in", "thin",
    "keep", "seed", "r", "delta", "lambda2", "chains", "bins", "target-sd", "max-lag", "hist-bins",
    "neighbors", "min-shifts", "n-perm", "teams", "roster", "games", "player-effect", "team-effect",
    "sigma", "shifts-per-game", "season",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
    origin: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(invalid(format!("{}:{}: unknown key `{key}`", path.display(), i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self {
            values,
            origin: Some(path.to_path_buf()),
        })
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                let origin = self.origin.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                invalid(format!("{origin}: `{key}` = `{v}`: {e}"))
            }),
        }
    }

    /// Flag value, else file value, else `None`.
    pub fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.parsed(key),
        }
    }

    /// Flag value, else file value, else `default`.
    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// Flag value, else file value; an error naming the flag otherwise.
    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.opt(flag, key)?
            .ok_or_else(|| invalid(format!("missing --{key} (flag or config key)")))
    }
}

/// A validation error that maps to exit status 2.
pub fn invalid(message: String) -> anyhow::Error {
    anyhow!(Error::InvalidArgument(message))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    if dir.exists() && !dir.is_dir() {
        bail!(Error::InvalidArgument(format!("{} is not a directory", dir.display())));
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

//! Flat `key = value` configuration files.
//!
//! `[section]` headers prefix the following keys with `section.`; lines
//! starting with `#` or `;` are comments; `include = path` splices another
//! file (relative to the including one) at that point. Later assignments
//! override earlier ones.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Result, SlabError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

const MAX_INCLUDE_DEPTH: usize = 16;

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Config::default();
        let mut stack = Vec::new();
        cfg.load_into(path, &mut stack)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        cfg.parse_into(text, None, &mut Vec::new())?;
        Ok(cfg)
    }

    fn load_into(&mut self, path: &Path, stack: &mut Vec<PathBuf>) -> Result<()> {
        let canonical = fs::canonicalize(path).map_err(|e| SlabError::Config {
            key: "include".into(),
            message: format!("cannot open {}: {e}", path.display()),
        })?;
        if stack.contains(&canonical) || stack.len() >= MAX_INCLUDE_DEPTH {
            return Err(SlabError::Config {
                key: "include".into(),
                message: format!("include cycle or depth limit at {}", path.display()),
            });
        }
        let text = fs::read_to_string(&canonical)?;
        stack.push(canonical.clone());
        self.parse_into(&text, canonical.parent(), stack)?;
        stack.pop();
        Ok(())
    }

    fn parse_into(&mut self, text: &str, dir: Option<&Path>, stack: &mut Vec<PathBuf>) -> Result<()> {
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| SlabError::Config {
                    key: line.to_string(),
                    message: format!("line {}: unterminated section header", lineno + 1),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| SlabError::Config {
                key: line.to_string(),
                message: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            let key = key.trim();
            let value = value.trim().trim_matches('"').to_string();
            if key.is_empty() {
                return Err(SlabError::Config { key: String::new(), message: format!("line {}: empty key", lineno + 1) });
            }
            if key == "include" {
                let target = match dir {
                    Some(d) => d.join(&value),
                    None => PathBuf::from(&value),
                };
                self.load_into(&target, stack)?;
                continue;
            }
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            self.values.insert(full, value);
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Parsed value of `key`, or `None` when absent.
    pub fn parse_key<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| SlabError::Config {
                key: key.to_string(),
                message: format!("cannot parse `{v}`: {e}"),
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_key(key)?.unwrap_or(default))
    }

    /// Fails on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(SlabError::Config { key: k.clone(), message: "unknown key".into() }),
            None => Ok(()),
        }
    }

    /// Text whose hash identifies the configuration.
    pub fn canonical(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_overrides() {
        let c = Config::parse("# run\nseed = 3\n[grid]\nn = 64\nn = 128\n; done\n").unwrap();
        assert_eq!(c.get("seed"), Some("3"));
        assert_eq!(c.get_or::<usize>("grid.n", 0).unwrap(), 128);
        assert_eq!(c.get_or::<usize>("grid.side", 7).unwrap(), 7);
    }

    #[test]
    fn errors_name_the_key() {
        let c = Config::parse("eps = abc\n").unwrap();
        match c.parse_key::<f64>("eps") {
            Err(SlabError::Config { key, .. }) => assert_eq!(key, "eps"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Config::parse("novalue\n"), Err(SlabError::Config { .. })));
        match Config::parse("bogus = 1\n").unwrap().check_keys(&["seed"]) {
            Err(SlabError::Config { key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn includes_and_cycles() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("base.ini"), "seed = 1\neta = 0.5\n").unwrap();
        fs::write(dir.path().join("run.ini"), "include = base.ini\nseed = 2\n").unwrap();
        let c = Config::load(&dir.path().join("run.ini")).unwrap();
        assert_eq!(c.get("seed"), Some("2"));
        assert_eq!(c.get("eta"), Some("0.5"));
        fs::write(dir.path().join("a.ini"), "include = b.ini\n").unwrap();
        fs::write(dir.path().join("b.ini"), "include = a.ini\n").unwrap();
        assert!(matches!(Config::load(&dir.path().join("a.ini")), Err(SlabError::Config { .. })));
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` configuration files with `[section]` headers.
//!
//! ```text
//! [experiment]
//! name = corank
//! seed = 7
//! trials = 200
//!
//! [graph]
//! n = 2000
//! ```
//!
//! Keys are addressed as `section.key`. The canonical form lists every key,
//! defaults included, one `section.key=value` per line in byte order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A parsed experiment configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                    .trim();
                if !valid_ident(name) {
                    return Err(parse_err(line_no, format!("invalid section name `{name}`")));
                }
                section = name.to_owned();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_ident(k) {
                return Err(parse_err(line_no, format!("invalid key `{k}`")));
            }
            if v.contains(['\n', '\r']) || v.is_empty() {
                return Err(parse_err(line_no, format!("empty value for `{k}`")));
            }
            let key = if section.is_empty() {
                k.to_owned()
            } else {
                format!("{section}.{k}")
            };
            if values.insert(key.clone(), v.to_owned()).is_some() {
                return Err(parse_err(line_no, format!("duplicate key `{key}`")));
            }
        }
        Ok(ExperimentConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        ExperimentConfig {
            values: pairs
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .collect(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_owned(), value.into());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// The experiment name under `experiment.name`.
    pub fn name(&self) -> Result<&str> {
        self.get("experiment.name")
            .ok_or_else(|| Error::invalid("missing `experiment.name`"))
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::invalid(format!("missing `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::invalid(format!("`{key}` = `{raw}` is not a valid value")))
    }

    /// A comma-separated list.
    pub fn parsed_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::invalid(format!("missing `{key}`")))?;
        raw.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("`{key}` has a bad entry `{}`", x.trim())))
            })
            .collect()
    }

    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = ExperimentConfig::parse(
            "# top\n[experiment]\nname = corank  # trailing\nseed=7\n\n[graph]\nn = 2000\nlambda = 10.5\n",
        )
        .unwrap();
        assert_eq!(c.name().unwrap(), "corank");
        assert_eq!(c.parsed::<u64>("experiment.seed").unwrap(), 7);
        assert_eq!(c.parsed::<f64>("graph.lambda").unwrap(), 10.5);
        assert_eq!(
            c.canonical(),
            "experiment.name=corank\nexperiment.seed=7\ngraph.lambda=10.5\ngraph.n=2000\n"
        );
    }

    #[test]
    fn key_order_does_not_change_the_hash() {
        let a = ExperimentConfig::parse("[g]\nn = 1\nk = 3\n[e]\nname = x\n").unwrap();
        let b = ExperimentConfig::parse("[e]\nname=x\n[g]\nk=3\nn=1\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        let c = ExperimentConfig::parse("[g]\nn = 2\nk = 3\n[e]\nname = x\n").unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn lists() {
        let c = ExperimentConfig::parse("[g]\nn = 500, 1000,2000\n").unwrap();
        assert_eq!(
            c.parsed_list::<usize>("g.n").unwrap(),
            vec![500, 1000, 2000]
        );
        assert!(c.parsed_list::<usize>("g.m").is_err());
    }

    #[test]
    fn reports_line_numbers() {
        let err = ExperimentConfig::parse("[a]\nx = 1\nnot a pair\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = ExperimentConfig::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(ExperimentConfig::parse("[a\n").is_err());
        assert!(ExperimentConfig::parse("[a]\nx =\n").is_err());
    }
}

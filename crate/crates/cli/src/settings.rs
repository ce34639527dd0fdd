//! Layered experiment settings: built-in defaults, then the `OSDMA_SEED`
//! environment variable, then a flat `key=value` file, then command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use osdma_core::sim::{ExperimentConfig, FeedbackMode};

use crate::CliError;

pub const SEED_ENV: &str = "OSDMA_SEED";

/// Every key accepted in a config file, with its default.
pub const KEYS: [(&str, &str); 12] = [
    ("u", "100"),
    ("n_t", "2"),
    ("m", "4"),
    ("snr_db", "5"),
    ("lambda", "1"),
    ("trials", "10000"),
    ("seed", "1"),
    ("mode", "threshold-feedback"),
    ("k_max", "none"),
    ("alpha", "0.05"),
    ("iterations", "1"),
    ("fresh_codebook", "true"),
];

#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
    /// Keys set by the file or a flag rather than by a default.
    explicit: Vec<String>,
}

fn canonical(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> =
            KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Ok(seed) = std::env::var(SEED_ENV) {
            values.insert("seed".into(), seed);
        }
        let mut s = Settings { values, explicit: Vec::new() };
        if let Some(path) = config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            s.merge_text(&text)?;
        }
        Ok(s)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            self.set(k, v.trim())
                .map_err(|e| CliError::Usage(format!("config line {}: {}", i + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = canonical(key);
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Usage(format!("unknown key {key:?}")));
        }
        self.values.insert(key.clone(), value.to_string());
        if !self.explicit.contains(&key) {
            self.explicit.push(key);
        }
        Ok(())
    }

    pub fn set_opt<V: ToString>(&mut self, key: &str, value: Option<V>) -> Result<(), CliError> {
        match value {
            Some(v) => self.set(key, &v.to_string()),
            None => Ok(()),
        }
    }

    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn parse<V: std::str::FromStr>(&self, key: &str) -> Result<V, CliError>
    where
        V::Err: std::fmt::Display,
    {
        self.get(key)
            .parse()
            .map_err(|e| CliError::Usage(format!("invalid value {:?} for {key}: {e}", self.get(key))))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.parse("seed")
    }

    pub fn n_t(&self) -> Result<usize, CliError> {
        self.parse("n_t")
    }

    pub fn m(&self) -> Result<usize, CliError> {
        self.parse("m")
    }

    pub fn u(&self) -> Result<usize, CliError> {
        self.parse("u")
    }

    pub fn lambda(&self) -> Result<f64, CliError> {
        self.parse("lambda")
    }

    pub fn k_max(&self) -> Result<Option<usize>, CliError> {
        match self.get("k_max") {
            "" | "none" => Ok(None),
            _ => self.parse("k_max").map(Some),
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let mode: FeedbackMode = self
            .get("mode")
            .parse()
            .map_err(|e: osdma_core::Error| CliError::Usage(e.to_string()))?;
        let m = self.m()?;
        if mode == FeedbackMode::OsdmaClassic && self.is_explicit("m") && m != 1 {
            return Err(CliError::Usage(format!(
                "conflicting modes: osdma-classic uses a single sub-codebook, but m={m} was requested"
            )));
        }
        let fresh = match self.get("fresh_codebook") {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(CliError::Usage(format!("invalid value {other:?} for fresh_codebook"))),
        };
        Ok(ExperimentConfig {
            u: self.u()?,
            n_t: self.n_t()?,
            m,
            snr_db: self.parse("snr_db")?,
            lambda: self.lambda()?,
            trials: self.parse("trials")?,
            master_seed: self.seed()?,
            mode,
            k_max: self.k_max()?,
            penalty_alpha: self.parse("alpha")?,
            penalty_iterations: self.parse("iterations")?,
            fresh_codebook_per_trial: fresh,
        })
    }

    /// `key=value` pairs echoed into every output header.
    pub fn provenance(&self, command: &str) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".to_string(), command.to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        out.extend(self.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }
}

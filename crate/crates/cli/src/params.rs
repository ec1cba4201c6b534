//! `key=value` parameter handling.
//!
//! Parameters come from an optional config file (one `key=value` per line,
//! `#` comments) and from the command line; command-line pairs win. Every key
//! a command does not consume is rejected, so typos fail loudly. Power-like
//! keys accept a `<key>_dB` form converted as 10^(dB/10).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use blockfade::{EnergyLaw, FadingLaw};

use crate::CliError;

#[derive(Debug, Default)]
pub struct Params {
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Params {
    pub fn from_sources(config: Option<&Path>, pairs: &[String]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = split_pair(line)
                    .ok_or_else(|| CliError::Usage(format!("config line {} is not key=value: {line}", lineno + 1)))?;
                map.insert(k, v);
            }
        }
        for pair in pairs {
            let (k, v) =
                split_pair(pair).ok_or_else(|| CliError::Usage(format!("argument is not key=value: {pair}")))?;
            map.insert(k, v); // flags win over the file
        }
        Ok(Self { map, used: BTreeSet::new() })
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    pub fn str_opt(&mut self, key: &str) -> Option<String> {
        self.raw(key)
    }

    pub fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("key {key} expects a number, got {v}"))),
        }
    }

    pub fn f64_required(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required key: {key}")))
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn u64_opt(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("key {key} expects a nonnegative integer, got {v}"))),
        }
    }

    pub fn u64_required(&mut self, key: &str) -> Result<u64, CliError> {
        self.u64_opt(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required key: {key}")))
    }

    pub fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, CliError> {
        Ok(self.u64_opt(key)?.unwrap_or(default))
    }

    pub fn u32_or(&mut self, key: &str, default: u32) -> Result<u32, CliError> {
        match self.u64_opt(key)? {
            None => Ok(default),
            Some(v) => u32::try_from(v).map_err(|_| CliError::Usage(format!("key {key} is too large: {v}"))),
        }
    }

    /// A power value given either linearly (`key`) or in dB (`key_dB`).
    pub fn power_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        let db_key = format!("{key}_dB");
        let linear = self.f64_opt(key)?;
        let db = self.f64_opt(&db_key)?;
        match (linear, db) {
            (Some(_), Some(_)) => Err(CliError::Usage(format!("give either {key} or {db_key}, not both"))),
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(10f64.powf(d / 10.0))),
            (None, None) => Ok(None),
        }
    }

    pub fn power_required(&mut self, key: &str) -> Result<f64, CliError> {
        self.power_opt(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required key: {key} (or {key}_dB)")))
    }

    /// Fading law from `sigmaH2=<mean>` or `atoms=g1:p1,g2:p2,...`.
    pub fn fading_law(&mut self) -> Result<FadingLaw, CliError> {
        let sigma_h2 = self.f64_opt("sigmaH2")?;
        let atoms = self.raw("atoms");
        match (sigma_h2, atoms) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either sigmaH2 or atoms, not both".into())),
            (Some(m), None) => FadingLaw::rayleigh_gain_sq(m).map_err(|e| CliError::Domain(e.to_string())),
            (None, Some(spec)) => {
                let atoms = parse_atoms(&spec)?;
                FadingLaw::discrete(atoms).map_err(|e| CliError::Domain(e.to_string()))
            }
            (None, None) => Err(CliError::Usage("missing required key: sigmaH2 (or atoms)".into())),
        }
    }

    /// Energy law from `ebar` (or `ebar_dB`) plus optional `sigmaE2`
    /// (default 0, i.e. constant arrivals).
    pub fn energy_law(&mut self) -> Result<EnergyLaw, CliError> {
        let ebar = self.power_required("ebar")?;
        let sigma_e2 = self.f64_or("sigmaE2", 0.0)?;
        EnergyLaw::uniform_with_moments(ebar, sigma_e2).map_err(|e| CliError::Domain(e.to_string()))
    }

    /// Fail on any key no getter consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        let unknown: Vec<&String> = self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "unknown key{}: {}",
                if unknown.len() > 1 { "s" } else { "" },
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }

    /// Snapshot of every pair, for metadata echoes.
    pub fn entries(&self) -> Vec<(String, String)> {
        self.map.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

fn split_pair(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    let v = v.trim();
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

fn parse_atoms(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    spec.split(',')
        .map(|part| {
            let (g, p) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("atom is not gain:prob: {part}")))?;
            let g: f64 = g
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad atom gain: {g}")))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad atom probability: {p}")))?;
            Ok((g, p))
        })
        .collect()
}

//! Defaults read from a JSON config file.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use shtuka_core::fq::{FieldParams, Fq};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_q")]
    pub q: u32,
    /// Degree of F_q over F_p; inferred from q when absent.
    pub e: Option<u32>,
    /// Irreducible modulus, low to high, including the leading 1.
    pub modulus: Option<Vec<u32>>,
    /// Extra z-weight beyond N used when twisting.
    #[serde(default = "default_z_prec")]
    pub z_prec: i64,
    #[serde(default = "default_zeta_prec")]
    pub zeta_prec: i64,
    #[serde(default)]
    pub seed: u64,
}

fn default_q() -> u32 {
    2
}
fn default_z_prec() -> i64 {
    8
}
fn default_zeta_prec() -> i64 {
    32
}

impl Default for Config {
    fn default() -> Self {
        Config { q: default_q(), e: None, modulus: None, z_prec: default_z_prec(), zeta_prec: default_zeta_prec(), seed: 0 }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        if cfg.z_prec < 1 || cfg.zeta_prec < 1 {
            return Err("precision values must be at least 1".into());
        }
        Ok(cfg)
    }

    /// F_q for `q`, using the configured modulus when it describes a field of that size.
    pub fn field(&self, q: u32) -> Result<Arc<Fq>, String> {
        let params = match &self.modulus {
            Some(m) if q == self.q => {
                let e = self.e.unwrap_or((m.len() as u32).saturating_sub(1));
                let p = prime_root(q, e).ok_or_else(|| format!("q = {q} is not a power p^{e}"))?;
                FieldParams { p, e, modulus: m.clone() }
            }
            _ => FieldParams::of_size(q).map_err(|e| e.to_string())?,
        };
        Fq::new(params).map_err(|e| e.to_string())
    }
}

fn prime_root(q: u32, e: u32) -> Option<u32> {
    if e == 0 {
        return None;
    }
    (2..=q).find(|p| p.checked_pow(e) == Some(q))
}

//! On-disk cache for Monte Carlo calibrations (κ null distributions and null bands).
//!
//! Entries are stored as `<dir>/<sha256(key)>.json` and carry their full key,
//! which is compared on load; a hash collision or a stale file is recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::order::{par_bands, pma_bands, Family};
use super::portmanteau::{calibrate_kappa, KappaNull};
use crate::error::Result;
use crate::flocmeasures::{Measure, NullBands};
use crate::heavytail::FlocParams;
use crate::rng::Substreams;

pub const CACHE_DIR_ENV: &str = "CYCLOFLOC_CACHE_DIR";

/// Everything that determines a calibration result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationKey {
    pub kind: String,
    pub measure: Measure,
    pub alpha: f64,
    pub nt: usize,
    pub period: usize,
    pub params: FlocParams,
    pub h_max: usize,
    pub m: usize,
    /// Band level `d`; `None` for κ calibrations, whose level is applied afterwards.
    pub level: Option<f64>,
    pub seed: u64,
}

impl CalibrationKey {
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("key serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    key: CalibrationKey,
    payload: T,
}

#[derive(Debug, Clone, Default)]
pub struct CalibrationCache {
    dir: Option<PathBuf>,
}

impl CalibrationCache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// `$CYCLOFLOC_CACHE_DIR`, else `<tmp>/cyclofloc-calibration`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("cyclofloc-calibration"));
        Self::at(dir)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &CalibrationKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.digest())))
    }

    fn load<T: DeserializeOwned>(&self, key: &CalibrationKey) -> Option<T> {
        let path = self.path(key)?;
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<Entry<T>>(&bytes) {
            Ok(e) if e.key == *key => {
                debug!("calibration cache hit: {}", path.display());
                Some(e.payload)
            }
            Ok(_) => {
                warn!("calibration cache entry {} has a different key; recomputing", path.display());
                None
            }
            Err(err) => {
                warn!("unreadable calibration cache entry {}: {err}", path.display());
                None
            }
        }
    }

    fn store<T: Serialize>(&self, key: &CalibrationKey, payload: &T) {
        let Some(path) = self.path(key) else { return };
        let write = || -> std::io::Result<()> {
            fs::create_dir_all(path.parent().expect("cache file has a parent"))?;
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            fs::write(&tmp, serde_json::to_vec(&Entry { key: key.clone(), payload })?)?;
            fs::rename(&tmp, &path)
        };
        if let Err(err) = write() {
            warn!("could not write calibration cache {}: {err}", path.display());
        }
    }

    fn get_or<T, F>(&self, key: CalibrationKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(hit) = self.load(&key) {
            return Ok(hit);
        }
        let value = compute()?;
        self.store(&key, &value);
        Ok(value)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn kappa_null(&self, alpha: f64, nt: usize, period: usize, fp: &FlocParams, h_max: usize, m: usize, seeds: Substreams) -> Result<KappaNull> {
        let key = CalibrationKey {
            kind: "kappa".into(),
            measure: Measure::Pefloacf,
            alpha,
            nt,
            period,
            params: *fp,
            h_max,
            m,
            level: None,
            seed: seeds.seed(),
        };
        self.get_or(key, || calibrate_kappa(alpha, nt, period, fp, h_max, m, seeds))
    }

    /// Bands for order identification. For PAR only `fp.b_exp()` is used.
    #[allow(clippy::too_many_arguments)]
    pub fn order_bands(&self, family: Family, alpha: f64, fp: &FlocParams, nt: usize, period: usize, h_max: usize, d: f64, m: usize, seeds: Substreams) -> Result<NullBands> {
        let params = match family {
            Family::Par => super::order::par_params(alpha, fp.b_exp())?,
            Family::Pma => *fp,
        };
        let key = CalibrationKey {
            kind: "bands".into(),
            measure: family.measure(),
            alpha,
            nt,
            period,
            params,
            h_max,
            m,
            level: Some(d),
            seed: seeds.seed(),
        };
        self.get_or(key, || match family {
            Family::Par => par_bands(alpha, fp.b_exp(), nt, period, h_max, d, m, seeds),
            Family::Pma => pma_bands(alpha, fp, nt, period, h_max, d, m, seeds),
        })
    }
}

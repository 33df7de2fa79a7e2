use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{Pooling, SelectionParams};
use crate::constructors::{ConstructorKind, ConstructorOptions};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerKind;

/// Environment variable consulted for the worker-pool size when the config
/// leaves `workers` unset.
pub const WORKERS_ENV: &str = "MULTISTAB_WORKERS";

/// Settings of a multiscale scan.
///
/// `kernel_size`, `window_size` and `basin_radius` default to
/// `0.1 n_scale`, `0.1 n_scale` and `0.01 n_scale`, rounded half up with a
/// floor of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// Built-in kind name or a name registered with a `ConstructorRegistry`.
    pub constructor: String,
    pub min_scale: f64,
    pub max_scale: f64,
    pub n_scale: usize,
    pub n_tries: usize,
    pub n_nvi: usize,
    pub kernel_size: Option<usize>,
    pub window_size: Option<usize>,
    pub basin_radius: Option<usize>,
    pub pooling: Pooling,
    pub seed: u64,
    pub with_postprocessing: bool,
    pub with_scale_selection: bool,
    pub optimizer: OptimizerKind,
    pub constructor_options: ConstructorOptions,
    /// Worker threads; does not affect results and is not saved.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            constructor: ConstructorKind::ContinuousNormalized.name().to_string(),
            min_scale: -2.0,
            max_scale: 0.5,
            n_scale: 20,
            n_tries: 100,
            n_nvi: 20,
            kernel_size: None,
            window_size: None,
            basin_radius: None,
            pooling: Pooling::Block,
            seed: 0,
            with_postprocessing: true,
            with_scale_selection: true,
            optimizer: OptimizerKind::Louvain,
            constructor_options: ConstructorOptions::default(),
            workers: None,
        }
    }
}

fn derived(n_scale: usize, fraction: f64) -> usize {
    ((n_scale as f64 * fraction + 0.5).floor() as usize).max(1)
}

impl ScanConfig {
    pub fn with_constructor(kind: ConstructorKind) -> Self {
        ScanConfig {
            constructor: kind.name().to_string(),
            ..Self::default()
        }
    }

    pub fn selection_params(&self) -> SelectionParams {
        SelectionParams {
            kernel_size: self.kernel_size.unwrap_or_else(|| derived(self.n_scale, 0.1)),
            window_size: self.window_size.unwrap_or_else(|| derived(self.n_scale, 0.1)),
            basin_radius: self.basin_radius.unwrap_or_else(|| derived(self.n_scale, 0.01)),
            pooling: self.pooling,
        }
    }

    /// `log10 t` of every grid point, both endpoints included.
    pub fn log_scales(&self) -> Vec<f64> {
        let step = (self.max_scale - self.min_scale) / (self.n_scale - 1) as f64;
        (0..self.n_scale)
            .map(|i| {
                if i + 1 == self.n_scale {
                    self.max_scale
                } else {
                    self.min_scale + i as f64 * step
                }
            })
            .collect()
    }

    /// Seed of Louvain run `try_index` at scale `scale_index`.
    pub fn run_seed(&self, scale_index: usize, try_index: usize) -> u64 {
        self.seed
            .wrapping_add((scale_index as u64).wrapping_mul(self.n_tries as u64))
            .wrapping_add(try_index as u64)
    }

    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse::<usize>().ok().filter(|&w| w > 0).ok_or_else(|| {
                Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))
            }),
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if !self.min_scale.is_finite() || !self.max_scale.is_finite() {
            return fail("min_scale and max_scale must be finite".into());
        }
        if self.min_scale >= self.max_scale {
            return fail(format!(
                "min_scale ({}) must be below max_scale ({})",
                self.min_scale, self.max_scale
            ));
        }
        if self.n_scale < 3 {
            return fail(format!("n_scale must be at least 3, got {}", self.n_scale));
        }
        if self.n_tries == 0 {
            return fail("n_tries must be at least 1".into());
        }
        if self.n_nvi == 0 || self.n_nvi > self.n_tries {
            return fail(format!(
                "n_nvi must lie in 1..={} (n_tries), got {}",
                self.n_tries, self.n_nvi
            ));
        }
        for (name, v) in [
            ("kernel_size", self.kernel_size),
            ("window_size", self.window_size),
            ("basin_radius", self.basin_radius),
            ("workers", self.workers),
        ] {
            if v == Some(0) {
                return fail(format!("{name} must be at least 1"));
            }
        }
        let lambda = self.constructor_options.teleportation_lambda;
        if !(lambda > 0.0 && lambda <= 1.0) {
            return fail(format!("teleportation_lambda must lie in (0, 1], got {lambda}"));
        }
        if self.constructor.is_empty() {
            return fail("constructor name is empty".into());
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "constructor" => self.constructor = value.to_string(),
            "min_scale" => self.min_scale = parse(&key, value)?,
            "max_scale" => self.max_scale = parse(&key, value)?,
            "n_scale" => self.n_scale = parse(&key, value)?,
            "n_tries" => self.n_tries = parse(&key, value)?,
            "n_nvi" => self.n_nvi = parse(&key, value)?,
            "kernel_size" => self.kernel_size = Some(parse(&key, value)?),
            "window_size" => self.window_size = Some(parse(&key, value)?),
            "basin_radius" => self.basin_radius = Some(parse(&key, value)?),
            "pooling" => {
                self.pooling = match value {
                    "block" => Pooling::Block,
                    "row" => Pooling::Row,
                    _ => return Err(bad_value(&key, value)),
                }
            }
            "seed" => self.seed = parse(&key, value)?,
            "with_postprocessing" => self.with_postprocessing = parse(&key, value)?,
            "with_scale_selection" => self.with_scale_selection = parse(&key, value)?,
            "optimizer" => self.optimizer = value.parse()?,
            "teleportation_lambda" => {
                self.constructor_options.teleportation_lambda = parse(&key, value)?
            }
            "exp_dense_threshold" => self.constructor_options.exp_dense_threshold = parse(&key, value)?,
            "combinatorial_rescale" => {
                self.constructor_options.combinatorial_rescale = parse(&key, value)?
            }
            "workers" => self.workers = Some(parse(&key, value)?),
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. Blank lines and
    /// `#` comments are ignored.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.merge_kv_str(text)?;
        Ok(config)
    }

    pub fn merge_kv_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(key, value).map_err(|e| match e {
                Error::InvalidConfig(m) => Error::InvalidConfig(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad_value(key, value))
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("invalid value `{value}` for `{key}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ScanConfig::default();
        c.validate().unwrap();
        let p = c.selection_params();
        assert_eq!((p.kernel_size, p.window_size, p.basin_radius), (2, 2, 1));
        assert_eq!(c.n_scale * c.n_tries, 2000);
    }

    #[test]
    fn derived_rounding() {
        assert_eq!(derived(25, 0.1), 3);
        assert_eq!(derived(24, 0.1), 2);
        assert_eq!(derived(150, 0.01), 2);
        assert_eq!(derived(149, 0.01), 1);
        assert_eq!(derived(3, 0.01), 1);
    }

    #[test]
    fn grid_is_inclusive_and_equidistant() {
        let c = ScanConfig::default();
        let g = c.log_scales();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[19], 0.5);
        let step = g[1] - g[0];
        for w in g.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn seeds_follow_the_scheme() {
        let c = ScanConfig {
            seed: 1000,
            n_tries: 7,
            ..Default::default()
        };
        assert_eq!(c.run_seed(0, 0), 1000);
        assert_eq!(c.run_seed(2, 3), 1000 + 2 * 7 + 3);
    }

    #[test]
    fn key_value_parsing() {
        let c = ScanConfig::from_kv_str(
            "# comment\nconstructor = linearized\nn_scale=10\nn-tries = 5\nn_nvi=5 # trailing\n\
             with_postprocessing=false\nteleportation_lambda=0.5\npooling=row\n",
        )
        .unwrap();
        assert_eq!(c.constructor, "linearized");
        assert_eq!(c.n_scale, 10);
        assert_eq!(c.n_tries, 5);
        assert!(!c.with_postprocessing);
        assert_eq!(c.constructor_options.teleportation_lambda, 0.5);
        assert_eq!(c.pooling, Pooling::Row);
        c.validate().unwrap();
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = ScanConfig::from_kv_str("n_scale = 3\nn_tries = many\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(ScanConfig::from_kv_str("bogus = 1").is_err());
        assert!(ScanConfig::from_kv_str("no equals sign").is_err());
    }

    #[test]
    fn validation() {
        let bad = [
            ScanConfig { min_scale: 1.0, max_scale: 0.0, ..Default::default() },
            ScanConfig { n_scale: 2, ..Default::default() },
            ScanConfig { n_tries: 0, ..Default::default() },
            ScanConfig { n_nvi: 101, ..Default::default() },
            ScanConfig { kernel_size: Some(0), ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{c:?}");
        }
    }
}

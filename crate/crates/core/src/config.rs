//! Run configuration shared by the figure commands.
//!
//! A config file is flat `key = value` TOML; command-line flags override it
//! key by key.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mubs::PairId;

/// `start:end:step` over a subset of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || start > end {
            return Err(Error::Config(format!(
                "grid {start}:{end} must satisfy 0 <= start <= end <= 1"
            )));
        }
        Ok(Self { start, end, step })
    }

    /// `start + i step` up to `end`; the last point is snapped to `end` when
    /// it lands within `1e-9 step` of it.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|i| self.start + i as f64 * self.step).collect();
        if let Some(last) = pts.last_mut() {
            if (*last - self.end).abs() <= 1e-9 * self.step {
                *last = self.end;
            }
        }
        pts
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid must look like START:END:STEP, got {s:?}")));
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad number {p:?} in grid")))
            })
            .collect::<Result<_>>()?;
        Self::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Rates,
    Measures,
    Distance,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Rates => "rates",
            Command::Measures => "measures",
            Command::Distance => "distance",
            Command::Verify => "verify",
        }
    }

    fn default_grid(&self, p_base: f64) -> Grid {
        let (start, step) = match self {
            Command::Spectrum => (p_base, 0.01),
            Command::Measures => (0.0, 0.05),
            _ => (0.0, 0.01),
        };
        Grid {
            start,
            end: 1.0,
            step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Hcla,
    Blp,
    Rhp,
    All,
}

impl MeasureKind {
    pub fn includes(&self, other: MeasureKind) -> bool {
        *self == MeasureKind::All || *self == other
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hcla" => Ok(Self::Hcla),
            "blp" => Ok(Self::Blp),
            "rhp" => Ok(Self::Rhp),
            "all" => Ok(Self::All),
            _ => Err(Error::Config(format!("unknown measure {s:?}"))),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hcla => "hcla",
            Self::Blp => "blp",
            Self::Rhp => "rhp",
            Self::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "table" => Ok(Self::Table),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Table => "table",
        })
    }
}

/// One layer of settings; unset keys fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub d: Option<usize>,
    pub alpha: Option<f64>,
    pub p_base: Option<f64>,
    pub grid: Option<String>,
    pub pair: Option<String>,
    pub measure: Option<MeasureKind>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub max_d: Option<usize>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Keys set in `over` win.
    pub fn overlay(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            d: over.d.or(self.d),
            alpha: over.alpha.or(self.alpha),
            p_base: over.p_base.or(self.p_base),
            grid: over.grid.or(self.grid),
            pair: over.pair.or(self.pair),
            measure: over.measure.or(self.measure),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            max_d: over.max_d.or(self.max_d),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub d: usize,
    pub alpha: f64,
    pub p_base: f64,
    pub grid: Grid,
    pub pair: PairId,
    pub measure: MeasureKind,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Largest dimension exercised by `verify`.
    pub max_d: usize,
    /// Seed for randomized verification trials.
    pub seed: u64,
}

/// Environment variable overriding the verification seed.
pub const SEED_ENV: &str = "WEYLCHAN_SEED";

impl RunConfig {
    pub fn resolve(command: Command, layer: ConfigLayer) -> Result<Self> {
        let p_base = layer.p_base.unwrap_or(0.3);
        let grid = match &layer.grid {
            Some(g) => g.parse()?,
            None => command.default_grid(p_base),
        };
        let pair = match &layer.pair {
            Some(p) => p.parse()?,
            None => PairId {
                basis: 1,
                first: 0,
                second: 1,
            },
        };
        let seed = match std::env::var(SEED_ENV) {
            Ok(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be an integer, got {s:?}")))?,
            Err(_) => 0,
        };
        let cfg = Self {
            command,
            d: layer.d.unwrap_or(3),
            alpha: layer.alpha.unwrap_or(0.5),
            p_base,
            grid,
            pair,
            measure: layer.measure.unwrap_or(MeasureKind::All),
            out: layer.out,
            format: layer.format.unwrap_or(OutputFormat::Csv),
            max_d: layer.max_d.unwrap_or(8),
            seed,
        };
        if cfg.d < 2 {
            return Err(Error::Config(format!("d must be at least 2, got {}", cfg.d)));
        }
        if !(0.0..=1.0).contains(&cfg.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1], got {}", cfg.alpha)));
        }
        if !(0.0..=1.0).contains(&cfg.p_base) {
            return Err(Error::Config(format!("p_base must lie in [0, 1], got {}", cfg.p_base)));
        }
        Ok(cfg)
    }

    /// Single-line echo of every setting, used as CSV metadata.
    pub fn echo(&self) -> String {
        format!(
            "weylchan {} command={} d={} alpha={} p_base={} grid={} pair={} measure={} format={}",
            crate::VERSION,
            self.command.name(),
            self.d,
            self.alpha,
            self.p_base,
            self.grid,
            self.pair,
            self.measure,
            self.format
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g: Grid = "0.3:1:0.1".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], 0.3);
        assert_eq!(*pts.last().unwrap(), 1.0);
        assert_eq!(Grid::new(0.5, 0.5, 0.1).unwrap().points(), vec![0.5]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1.5:0.1".parse::<Grid>().is_err());
        assert!("0.8:0.2:0.1".parse::<Grid>().is_err());
        assert_eq!(g.to_string(), "0.3:1:0.1");
    }

    #[test]
    fn layers_and_defaults() {
        let file = ConfigLayer::from_toml("d = 4\nalpha = 0.2\ngrid = \"0:0.5:0.1\"\nmeasure = \"hcla\"\n")
            .unwrap();
        let flags = ConfigLayer {
            alpha: Some(0.9),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Command::Rates, file.overlay(flags)).unwrap();
        assert_eq!((cfg.d, cfg.alpha), (4, 0.9));
        assert_eq!(cfg.grid, Grid::new(0.0, 0.5, 0.1).unwrap());
        assert_eq!(cfg.measure, MeasureKind::Hcla);

        let cfg = RunConfig::resolve(Command::Spectrum, ConfigLayer::default()).unwrap();
        assert_eq!(cfg.grid.start, cfg.p_base);
        assert!(cfg.echo().starts_with("weylchan "));
        assert!(ConfigLayer::from_toml("bogus = 1").is_err());
        let bad = ConfigLayer {
            alpha: Some(1.5),
            ..Default::default()
        };
        assert!(RunConfig::resolve(Command::Rates, bad).is_err());
    }
}

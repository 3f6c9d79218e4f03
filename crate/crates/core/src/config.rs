//! Pipeline parameters and their flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! scale = 4
//! alpha = auto
//! alpha_grid = 0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1
//! sigma = 0.55
//! lambda = 0.05
//! ```
//!
//! Keys may appear in any order and missing keys keep their defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::fracgrad::check_order;
use crate::pyramid::default_alpha_grid;
use crate::reconstruct::ReconstructionConfig;
use crate::{Error, Result, ScaleFactor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// Search the grid at every level.
    Auto,
    Fixed(f64),
}

impl FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(AlphaMode::Auto);
        }
        let a: f64 = parse_num("alpha", s)?;
        check_order(a)?;
        Ok(AlphaMode::Fixed(a))
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Auto => write!(f, "auto"),
            AlphaMode::Fixed(a) => write!(f, "{a}"),
        }
    }
}

/// How color inputs are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    /// Super-resolve luma; chroma is resized bicubically.
    Luma,
    /// Convert to gray first.
    Grayscale,
}

impl FromStr for ColorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "luma" => Ok(ColorMode::Luma),
            "grayscale" => Ok(ColorMode::Grayscale),
            other => Err(Error::Config(format!(
                "color_mode must be luma or grayscale, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for ColorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColorMode::Luma => "luma",
            ColorMode::Grayscale => "grayscale",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub scale: ScaleFactor,
    pub alpha_mode: AlphaMode,
    pub alpha_grid: Vec<f64>,
    /// Blur of the per-level forward model.
    pub sigma: f64,
    /// Number of G-L weights per mask side.
    pub support: usize,
    pub reconstruction: ReconstructionConfig,
    pub color_mode: ColorMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scale: ScaleFactor::new(2).expect("2 is a valid scale"),
            alpha_mode: AlphaMode::Auto,
            alpha_grid: default_alpha_grid(),
            sigma: 0.55,
            support: 3,
            reconstruction: ReconstructionConfig::default(),
            color_mode: ColorMode::Luma,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha_grid is empty".into()));
        }
        for &a in &self.alpha_grid {
            check_order(a)?;
        }
        if let AlphaMode::Fixed(a) = self.alpha_mode {
            check_order(a)?;
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.support < 2 {
            return Err(Error::Config(format!(
                "support must be at least 2, got {}",
                self.support
            )));
        }
        self.reconstruction.validate()
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let r = &mut self.reconstruction;
        match key {
            "scale" => self.scale = ScaleFactor::new(parse_num(key, value)?)?,
            "alpha" => self.alpha_mode = value.parse()?,
            "alpha_grid" => {
                self.alpha_grid = value
                    .split(',')
                    .map(|v| parse_num(key, v))
                    .collect::<Result<_>>()?
            }
            "sigma" => self.sigma = parse_num(key, value)?,
            "support" => self.support = parse_num(key, value)?,
            "lambda" => r.lambda = parse_num(key, value)?,
            "eta" => r.eta = parse_num(key, value)?,
            "beta" => r.beta = parse_num(key, value)?,
            "gamma" => r.gamma = parse_num(key, value)?,
            "eps" => r.eps = parse_num(key, value)?,
            "max_iters" => r.max_iters = parse_num(key, value)?,
            "rel_tol" => r.rel_tol = parse_num(key, value)?,
            "color_mode" => self.color_mode = value.parse()?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.reconstruction;
        let grid: Vec<String> = self.alpha_grid.iter().map(|a| a.to_string()).collect();
        writeln!(f, "scale = {}", self.scale)?;
        writeln!(f, "alpha = {}", self.alpha_mode)?;
        writeln!(f, "alpha_grid = {}", grid.join(","))?;
        writeln!(f, "sigma = {}", self.sigma)?;
        writeln!(f, "support = {}", self.support)?;
        writeln!(f, "lambda = {}", r.lambda)?;
        writeln!(f, "eta = {}", r.eta)?;
        writeln!(f, "beta = {}", r.beta)?;
        writeln!(f, "gamma = {}", r.gamma)?;
        writeln!(f, "eps = {}", r.eps)?;
        writeln!(f, "max_iters = {}", r.max_iters)?;
        writeln!(f, "rel_tol = {}", r.rel_tol)?;
        writeln!(f, "color_mode = {}", self.color_mode)
    }
}

impl FromStr for PipelineConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

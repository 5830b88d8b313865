//! Engine settings merged from a `key=value` config file and command-line
//! flags. Flags win.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use ebsl::engine::{DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use ebsl::opinion::DEFAULT_C;
use ebsl::{AlgebraParams, EngineConfig, GFunction, OpinionMatrix};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightChoice {
    #[value(name = "xb")]
    Belief,
    #[value(name = "sqrt-xb")]
    SqrtBelief,
    #[value(name = "odot")]
    Odot,
}

impl WeightChoice {
    fn from_str_value(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
            .map_err(|_| format!("unknown discount `{s}` (expected xb, sqrt-xb or odot)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaArg {
    Value(f64),
    Auto,
}

impl FromStr for ThetaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(ThetaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(ThetaArg::Value(v)),
            _ => Err(format!(
                "theta must be a positive number or `auto`, got `{s}`"
            )),
        }
    }
}

impl fmt::Display for ThetaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaArg::Value(v) => write!(f, "{v}"),
            ThetaArg::Auto => f.write_str("auto"),
        }
    }
}

/// Every setting is optional so that file values and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub c: Option<f64>,
    pub g: Option<WeightChoice>,
    pub theta: Option<ThetaArg>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub clusters: Option<usize>,
    pub scale: Option<f64>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::new(format!("config line {}: {msg}", idx + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(v: &str) -> Result<T, String> {
                v.parse().map_err(|_| format!("bad value `{v}`"))
            }
            let parsed: Result<(), String> = match key {
                "c" => num(value).map(|v| s.c = Some(v)),
                "g" => WeightChoice::from_str_value(value).map(|v| s.g = Some(v)),
                "theta" => value.parse().map(|v| s.theta = Some(v)),
                "tol" => num(value).map(|v| s.tol = Some(v)),
                "max_iter" => num(value).map(|v| s.max_iter = Some(v)),
                "clusters" => num(value).map(|v| s.clusters = Some(v)),
                "scale" => num(value).map(|v| s.scale = Some(v)),
                other => Err(format!("unknown key `{other}`")),
            };
            parsed.map_err(err)?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// Values set here take precedence over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            c: self.c.or(base.c),
            g: self.g.or(base.g),
            theta: self.theta.or(base.theta),
            tol: self.tol.or(base.tol),
            max_iter: self.max_iter.or(base.max_iter),
            clusters: self.clusters.or(base.clusters),
            scale: self.scale.or(base.scale),
        }
    }

    pub fn params(&self) -> Result<AlgebraParams, CliError> {
        Ok(AlgebraParams::new(self.c.unwrap_or(DEFAULT_C))?)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOLERANCE)
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iter.unwrap_or(DEFAULT_MAX_ITERATIONS)
    }

    pub fn scale(&self) -> f64 {
        self.scale.unwrap_or(1.0)
    }

    pub fn weight(&self) -> WeightChoice {
        self.g.unwrap_or(WeightChoice::Belief)
    }

    /// Resolves θ against the referral matrix; `auto` picks the smallest
    /// admissible value.
    pub fn resolve_theta(&self, a: &OpinionMatrix) -> Result<f64, CliError> {
        match self.theta {
            Some(ThetaArg::Value(v)) => Ok(v),
            Some(ThetaArg::Auto) => Ok(ebsl::theta_bound(a, self.params()?)),
            None => Err(CliError::new(format!(
                "--g odot needs --theta <value> or --theta auto (smallest admissible value here: {})",
                ebsl::theta_bound(a, self.params()?)
            ))),
        }
    }

    /// Engine configuration for `weight` on referral matrix `a`, with the θ
    /// used for `⊙`.
    pub fn engine_for(
        &self,
        weight: WeightChoice,
        a: &OpinionMatrix,
    ) -> Result<(EngineConfig, Option<f64>), CliError> {
        let params = self.params()?;
        let (g, theta) = match weight {
            WeightChoice::Belief => (GFunction::Belief, None),
            WeightChoice::SqrtBelief => (GFunction::SqrtBelief, None),
            WeightChoice::Odot => {
                let theta = self.resolve_theta(a)?;
                (GFunction::evidence_over_theta(theta, params)?, Some(theta))
            }
        };
        let cfg = EngineConfig::new(params, g)
            .with_tolerance(self.tolerance())
            .with_max_iterations(self.max_iterations());
        cfg.validate()?;
        Ok((cfg, theta))
    }
}

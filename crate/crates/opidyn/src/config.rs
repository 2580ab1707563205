//! Structured-text (TOML) model configuration shared by the CLI commands.
//! Recognized keys: `mu`, `sigma`, `theta`, `lambda`, `alpha`, `cap`,
//! `family`, `topology`, `s1`, `s3`, `s4`, `q`, `d`. Command-line flags
//! override file values.

use crate::error::{Error, Result};
use crate::model::{ModelParams, RateCeiling, RateFamily};

/// Raw configuration values, all optional; flags fill or override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub cap: Option<RateCeiling>,
    pub family: Option<RateFamily>,
    pub topology: Option<String>,
    pub s1: Option<f64>,
    pub s3: Option<f64>,
    pub s4: Option<f64>,
    pub q: Option<f64>,
    pub d: Option<usize>,
}

fn number(table: &toml::Table, key: &'static str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .map(Some)
            .ok_or_else(|| Error::param(key, format!("expected a number, got `{v}`"))),
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::param("config", format!("not valid TOML: {e}")))?;
        let mut cfg = FileConfig {
            mu: number(&table, "mu")?,
            sigma: number(&table, "sigma")?,
            theta: number(&table, "theta")?,
            lambda: number(&table, "lambda")?,
            alpha: number(&table, "alpha")?,
            s1: number(&table, "s1")?,
            s3: number(&table, "s3")?,
            s4: number(&table, "s4")?,
            q: number(&table, "q")?,
            ..Default::default()
        };
        if let Some(v) = table.get("cap") {
            cfg.cap = Some(parse_cap_value(v)?);
        }
        if let Some(v) = table.get("family") {
            let s = v
                .as_str()
                .ok_or_else(|| Error::param("family", format!("expected a string, got `{v}`")))?;
            cfg.family = Some(parse_family(s)?);
        }
        if let Some(v) = table.get("topology") {
            let s = v
                .as_str()
                .ok_or_else(|| Error::param("topology", format!("expected a string, got `{v}`")))?;
            cfg.topology = Some(s.to_string());
        }
        if let Some(v) = table.get("d") {
            let i = v
                .as_integer()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::param("d", format!("expected an integer >= 1, got `{v}`")))?;
            cfg.d = Some(i as usize);
        }
        Ok(cfg)
    }
}

pub fn parse_family(s: &str) -> Result<RateFamily> {
    match s.to_ascii_lowercase().as_str() {
        "c1" => Ok(RateFamily::C1),
        "c2" => Ok(RateFamily::C2),
        "c3" => Ok(RateFamily::C3),
        other => Err(Error::param(
            "family",
            format!("expected one of c1, c2, c3, got `{other}`"),
        )),
    }
}

fn parse_cap_value(v: &toml::Value) -> Result<RateCeiling> {
    if let Some(s) = v.as_str() {
        return parse_cap(s);
    }
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .map(RateCeiling::Bounded)
        .ok_or_else(|| Error::param("cap", format!("expected a number or \"unbounded\", got `{v}`")))
}

pub fn parse_cap(s: &str) -> Result<RateCeiling> {
    match s.to_ascii_lowercase().as_str() {
        "unbounded" | "inf" | "infinity" => Ok(RateCeiling::Unbounded),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|k| *k > 0.0)
            .map(RateCeiling::Bounded)
            .ok_or_else(|| {
                Error::param("cap", format!("expected a positive number or `unbounded`, got `{other}`"))
            }),
    }
}

/// Resolved model parameters plus the rate family, after merging flags over
/// file values over defaults (mu 0, sigma 3, theta 2, lambda 2, alpha 0,
/// unbounded cap, family c1).
#[derive(Debug, Clone, Copy)]
pub struct ResolvedModel {
    pub params: ModelParams,
    pub family: RateFamily,
}

pub struct ModelOverrides {
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub cap: Option<RateCeiling>,
    pub family: Option<RateFamily>,
}

pub fn resolve_model(file: &FileConfig, flags: &ModelOverrides) -> Result<ResolvedModel> {
    let params = ModelParams::new(
        flags.mu.or(file.mu).unwrap_or(0.0),
        flags.sigma.or(file.sigma).unwrap_or(3.0),
        flags.theta.or(file.theta).unwrap_or(2.0),
        flags.lambda.or(file.lambda).unwrap_or(2.0),
        flags.alpha.or(file.alpha).unwrap_or(0.0),
        flags.cap.or(file.cap).unwrap_or(RateCeiling::Unbounded),
    )?;
    Ok(ResolvedModel {
        params,
        family: flags.family.or(file.family).unwrap_or(RateFamily::C1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = FileConfig::parse(
            r#"
            mu = 0.1
            sigma = 3.0
            theta = 2
            lambda = 2.0
            alpha = 0.5
            cap = "unbounded"
            family = "c2"
            topology = "three-agent"
            s1 = 0.0
            s3 = 1.0
            q = 0.5
            d = 2
            "#,
        )
        .unwrap();
        assert_eq!(cfg.mu, Some(0.1));
        assert_eq!(cfg.theta, Some(2.0));
        assert_eq!(cfg.cap, Some(RateCeiling::Unbounded));
        assert_eq!(cfg.family, Some(RateFamily::C2));
        assert_eq!(cfg.d, Some(2));
    }

    #[test]
    fn names_offending_key() {
        let err = FileConfig::parse("sigma = \"big\"").unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
        let err = FileConfig::parse("cap = [1]").unwrap_err();
        assert!(err.to_string().contains("cap"), "{err}");
        let err = FileConfig::parse("d = 0").unwrap_err();
        assert!(err.to_string().contains('d'), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig::parse("sigma = 1.0\nlambda = 9.0").unwrap();
        let flags = ModelOverrides {
            mu: None,
            sigma: Some(4.0),
            theta: None,
            lambda: None,
            alpha: None,
            cap: None,
            family: None,
        };
        let m = resolve_model(&file, &flags).unwrap();
        assert_eq!(m.params.sigma, 4.0); // flag wins
        assert_eq!(m.params.lambda, 9.0); // file fills
        assert_eq!(m.params.theta, 2.0); // default
    }

    #[test]
    fn cap_spellings() {
        assert_eq!(parse_cap("unbounded").unwrap(), RateCeiling::Unbounded);
        assert_eq!(parse_cap("1e6").unwrap(), RateCeiling::Bounded(1e6));
        assert!(parse_cap("-2").is_err());
    }
}

//! Flat `key = value` configuration files.
//!
//! One setting per line, `#` starts a comment. Absent keys keep their
//! defaults (the three-gateway, 1 km macrocell setup). Quantities accept
//! unit suffixes and are stored in meters, bits/second, Watts and seconds:
//!
//! ```text
//! macro_radius = 1 km
//! r_values = 100m, 150m, 200m
//! n_values = 5:100:5        # start:stop:step, inclusive
//! link_rate = 1 Gbps
//! lifetime = 5 years
//! ```

use thiserror::Error;

use crate::error::SimError;
use crate::experiment::{ExperimentConfig, PlacementKind};
use crate::geometry::{GatewayConfig, Point2D};
use crate::metrics::{EmbodiedBasis, ThroughputBasis, SECONDS_PER_YEAR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("override `{0}`: expected KEY=VALUE")]
    MalformedOverride(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

pub const KEYS: &[&str] = &[
    "macro_radius",
    "center_x",
    "center_y",
    "gateways",
    "gateway_positions",
    "placement",
    "d_min",
    "max_rejections",
    "r_values",
    "n_values",
    "delta",
    "link_rate",
    "a",
    "b",
    "p_norm",
    "th0",
    "lifetime",
    "embodied_fraction",
    "embodied_basis",
    "throughput_basis",
    "trials",
    "seed",
];

const LENGTH_UNITS: &[(&str, f64)] = &[("km", 1e3), ("m", 1.0)];
const RATE_UNITS: &[(&str, f64)] = &[
    ("Tbps", 1e12),
    ("Gbps", 1e9),
    ("Mbps", 1e6),
    ("kbps", 1e3),
    ("bps", 1.0),
];
const POWER_UNITS: &[(&str, f64)] = &[("kW", 1e3), ("mW", 1e-3), ("W", 1.0)];
const DURATION_UNITS: &[(&str, f64)] = &[
    ("years", SECONDS_PER_YEAR),
    ("year", SECONDS_PER_YEAR),
    ("days", 86_400.0),
    ("day", 86_400.0),
    ("min", 60.0),
    ("h", 3_600.0),
    ("s", 1.0),
];

fn parse_quantity(key: &str, value: &str, units: &[(&str, f64)]) -> Result<f64, ConfigError> {
    let value = value.trim();
    let (number, scale) = units
        .iter()
        .find_map(|(suffix, scale)| value.strip_suffix(suffix).map(|rest| (rest.trim(), *scale)))
        .unwrap_or((value, 1.0));
    let x: f64 = number
        .parse()
        .map_err(|_| invalid(key, format!("`{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x * scale)
}

fn parse_plain(key: &str, value: &str) -> Result<f64, ConfigError> {
    parse_quantity(key, value, &[])
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse().map_err(|_| {
        invalid(
            key,
            format!("`{}` is not a non-negative integer", value.trim()),
        )
    })
}

fn parse_counts(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(parse_count(key, single)?),
            [start, stop, step] => {
                let (start, stop, step) = (
                    parse_count(key, start)?,
                    parse_count(key, stop)?,
                    parse_count(key, step)?,
                );
                if step == 0 || stop < start {
                    return Err(invalid(key, format!("bad range `{part}`")));
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => return Err(invalid(key, format!("bad list item `{part}`"))),
        }
    }
    if out.is_empty() {
        return Err(invalid(key, "list is empty"));
    }
    Ok(out)
}

fn parse_points(key: &str, value: &str) -> Result<Vec<Point2D>, ConfigError> {
    value
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (x, y) = p
                .split_once(':')
                .ok_or_else(|| invalid(key, format!("expected `x:y`, got `{p}`")))?;
            Ok(Point2D::new(
                parse_quantity(key, x, LENGTH_UNITS)?,
                parse_quantity(key, y, LENGTH_UNITS)?,
            ))
        })
        .collect()
}

fn apply(config: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    let value = value.trim();
    match key {
        "macro_radius" => config.region.circumradius = parse_quantity(key, value, LENGTH_UNITS)?,
        "center_x" => config.region.center.x = parse_quantity(key, value, LENGTH_UNITS)?,
        "center_y" => config.region.center.y = parse_quantity(key, value, LENGTH_UNITS)?,
        "gateways" => {
            config.gateways = match value {
                "top_vertices" => GatewayConfig::TopVertices,
                "single_center" => GatewayConfig::SingleCenter,
                "explicit" => match &config.gateways {
                    GatewayConfig::Explicit(p) => GatewayConfig::Explicit(p.clone()),
                    _ => GatewayConfig::Explicit(Vec::new()),
                },
                other => {
                    return Err(invalid(
                        key,
                        format!("`{other}` (expected top_vertices, single_center or explicit)"),
                    ))
                }
            }
        }
        "gateway_positions" => config.gateways = GatewayConfig::Explicit(parse_points(key, value)?),
        "placement" => {
            config.placement.kind = match value {
                "uniform" => PlacementKind::Uniform,
                "hardcore" => PlacementKind::Hardcore,
                other => {
                    return Err(invalid(
                        key,
                        format!("`{other}` (expected uniform or hardcore)"),
                    ))
                }
            }
        }
        "d_min" => {
            config.placement.min_separation = if value == "auto" {
                None
            } else {
                Some(parse_quantity(key, value, LENGTH_UNITS)?)
            }
        }
        "max_rejections" => config.placement.max_rejections = parse_count(key, value)?,
        "r_values" => {
            config.r_values = value
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| parse_quantity(key, p, LENGTH_UNITS))
                .collect::<Result<_, _>>()?
        }
        "n_values" => config.n_values = parse_counts(key, value)?,
        "delta" => config.delta = parse_plain(key, value)?,
        "link_rate" => config.link_rate = parse_quantity(key, value, RATE_UNITS)?,
        "a" => config.energy.a = parse_plain(key, value)?,
        "b" => config.energy.b = parse_quantity(key, value, POWER_UNITS)?,
        "p_norm" => config.energy.p_norm = parse_quantity(key, value, POWER_UNITS)?,
        "th0" => config.energy.th0 = parse_quantity(key, value, RATE_UNITS)?,
        "lifetime" => config.energy.lifetime = parse_quantity(key, value, DURATION_UNITS)?,
        "embodied_fraction" => config.energy.embodied_fraction = parse_plain(key, value)?,
        "embodied_basis" => {
            config.energy.embodied_basis = match value {
                "total" => EmbodiedBasis::FractionOfTotal,
                "operating" => EmbodiedBasis::FractionOfOperating,
                other => {
                    return Err(invalid(
                        key,
                        format!("`{other}` (expected total or operating)"),
                    ))
                }
            }
        }
        "throughput_basis" => {
            config.energy.throughput_basis = match value {
                "transmitted" => ThroughputBasis::Transmitted,
                "delivered" => ThroughputBasis::Delivered,
                other => {
                    return Err(invalid(
                        key,
                        format!("`{other}` (expected transmitted or delivered)"),
                    ))
                }
            }
        }
        "trials" => config.trials_per_point = parse_count(key, value)?,
        "seed" => {
            config.base_seed = value
                .parse()
                .map_err(|_| invalid(key, format!("`{value}` is not a u64")))?
        }
        other => return Err(ConfigError::UnknownKey(other.to_string())),
    }
    Ok(())
}

fn key_for_param(name: &str) -> &str {
    match name {
        "r" => "r_values",
        "gateways" | "center" => "gateways",
        other => other,
    }
}

/// Builds a config from file text plus `KEY=VALUE` overrides (applied last),
/// then checks every range constraint.
pub fn parse_config<S: AsRef<str>>(
    contents: &str,
    overrides: &[S],
) -> Result<ExperimentConfig, ConfigError> {
    let mut config = ExperimentConfig::default();
    for (i, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: i + 1,
            text: raw.to_string(),
        })?;
        apply(&mut config, key.trim(), value)?;
    }
    for o in overrides {
        let o = o.as_ref();
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedOverride(o.to_string()))?;
        apply(&mut config, key.trim(), value)?;
    }
    config.validate().map_err(|e| match e {
        SimError::InvalidParameter { name, reason } => invalid(key_for_param(name), reason),
        SimError::GatewayOutsideRegion { x, y } => invalid(
            "gateway_positions",
            format!("({x}, {y}) lies outside the macrocell"),
        ),
        other => invalid("config", other.to_string()),
    })?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::EnergyParams;

    const NONE: &[&str] = &[];

    #[test]
    fn empty_config_is_the_default_setup() {
        let cfg = parse_config("", NONE).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.region.circumradius, 1000.0);
        assert_eq!(cfg.gateways, GatewayConfig::TopVertices);
        assert_eq!(cfg.r_values, vec![100.0, 150.0, 200.0]);
        assert_eq!(cfg.delta, 0.5);
        assert_eq!(cfg.link_rate, 1e9);
        let e = EnergyParams::default();
        assert_eq!((e.a, e.b, e.p_norm, e.th0), (7.85, 71.5, 1.0, 1e9));
        assert_eq!(e.lifetime, 5.0 * 365.25 * 86_400.0);
        assert_eq!(e.embodied_fraction, 0.2);
    }

    #[test]
    fn override_wins() {
        let cfg = parse_config("delta = 0.7\n", &["delta=0.25"]).unwrap();
        assert_eq!(cfg.delta, 0.25);
        assert_eq!(
            ExperimentConfig { delta: 0.5, ..cfg },
            ExperimentConfig::default()
        );
    }

    #[test]
    fn embodied_fraction_of_one_is_rejected() {
        let err = parse_config("", &["embodied_fraction=1.0"]).unwrap_err();
        assert!(
            matches!(&err, ConfigError::InvalidValue { key, .. } if key == "embodied_fraction")
        );
        assert!(err.to_string().contains("< 1"));
    }

    #[test]
    fn units_are_canonicalized() {
        let text = "# default setup in friendly units\n\
                    macro_radius = 1.5 km\n\
                    r_values = 100m, 0.15km\n\
                    link_rate = 500 Mbps\n\
                    lifetime = 10 years  # longer\n\
                    b = 70 W\n\
                    n_values = 10:30:10, 50\n";
        let cfg = parse_config(text, NONE).unwrap();
        assert_eq!(cfg.region.circumradius, 1500.0);
        assert_eq!(cfg.r_values, vec![100.0, 150.0]);
        assert_eq!(cfg.link_rate, 5e8);
        assert_eq!(cfg.energy.lifetime, 10.0 * SECONDS_PER_YEAR);
        assert_eq!(cfg.energy.b, 70.0);
        assert_eq!(cfg.n_values, vec![10, 20, 30, 50]);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(
            parse_config("bogus = 3", NONE).unwrap_err(),
            ConfigError::UnknownKey("bogus".into())
        );
        assert!(matches!(
            parse_config("just words", NONE).unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
        let err = parse_config("delta = -1", NONE).unwrap_err();
        assert!(matches!(&err, ConfigError::InvalidValue { key, .. } if key == "delta"));
        let err = parse_config("r_values = 100m, ten", NONE).unwrap_err();
        assert!(matches!(&err, ConfigError::InvalidValue { key, .. } if key == "r_values"));
        let err = parse_config("gateways = explicit\ngateway_positions = 0:2km", NONE).unwrap_err();
        assert!(
            matches!(&err, ConfigError::InvalidValue { key, .. } if key == "gateway_positions")
        );
    }

    #[test]
    fn explicit_gateways_and_hardcore_placement() {
        let cfg = parse_config(
            "gateway_positions = 0:0; 100m:-200m\nplacement = hardcore\nd_min = 150m\nseed = 42",
            NONE,
        )
        .unwrap();
        assert_eq!(
            cfg.gateways,
            GatewayConfig::Explicit(vec![Point2D::new(0.0, 0.0), Point2D::new(100.0, -200.0)])
        );
        assert_eq!(cfg.placement.kind, PlacementKind::Hardcore);
        assert_eq!(cfg.placement.min_separation, Some(150.0));
        assert_eq!(cfg.base_seed, 42);
    }
}

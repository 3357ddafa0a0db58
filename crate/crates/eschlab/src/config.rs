//! Flat key=value experiment configuration: a preset name plus overrides.

use crate::geometry::MovingDomain;
use crate::model::{MobilityKind, PotentialKind};
use crate::presets::{preset, Comparison, ExperimentPreset, PRESET_NAMES};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: unknown key '{1}'")]
    UnknownKey(usize, String),
    #[error("line {0}: malformed value for '{1}': {2}")]
    MalformedValue(usize, String, String),
    #[error("line {0}: expected key=value")]
    MalformedLine(usize),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("missing 'preset' key")]
    MissingPreset,
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::MalformedValue(line, key.into(), v.into()))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(line, key, s)).collect()
}

/// Parse a configuration. Keys other than `preset` override the preset's
/// defaults; lines are `key=value`, `#` starts a comment.
pub fn parse_config(text: &str) -> Result<ExperimentPreset, ConfigError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::MalformedLine(lineno))?;
        entries.push((lineno, key.trim().to_string(), value.trim().to_string()));
    }
    let preset_name = entries
        .iter()
        .find(|(_, k, _)| k == "preset")
        .map(|(lineno, _, v)| (*lineno, v.clone()))
        .ok_or(ConfigError::MissingPreset)?;
    if !PRESET_NAMES.contains(&preset_name.1.as_str()) {
        return Err(ConfigError::UnknownPreset(preset_name.1));
    }
    let mut p = preset(&preset_name.1).unwrap();

    for (lineno, key, value) in entries {
        match key.as_str() {
            "preset" => {}
            "epsilon" => p.epsilon_list = parse_list(lineno, &key, &value)?,
            "mbar" => {
                let list = parse_list(lineno, &key, &value)?;
                p.params.mbar = list[0];
                p.mbar_list = if list.len() > 1 { list } else { Vec::new() };
            }
            "vbar" => {
                let v = parse_f64(lineno, &key, &value)?;
                match p.domain {
                    MovingDomain::UnitSphereTangential { .. } => {
                        p.domain = MovingDomain::UnitSphereTangential { vbar: v };
                    }
                    _ => {
                        return Err(ConfigError::MalformedValue(
                            lineno,
                            key,
                            "vbar only applies to tangential sphere presets".into(),
                        ))
                    }
                }
            }
            "u_a" => p.params.u_a = parse_f64(lineno, &key, &value)?,
            "u_b" => p.params.u_b = parse_f64(lineno, &key, &value)?,
            "potential" => {
                p.params.potential = match value.as_str() {
                    "quartic" => PotentialKind::Quartic,
                    "log" => PotentialKind::Logarithmic,
                    _ => return Err(ConfigError::MalformedValue(lineno, key, value)),
                }
            }
            "mobility" => {
                p.params.mobility = match value.as_str() {
                    "constant" => MobilityKind::Constant,
                    "degenerate" => MobilityKind::Degenerate,
                    _ => return Err(ConfigError::MalformedValue(lineno, key, value)),
                }
            }
            "t_end" => p.t_end = parse_f64(lineno, &key, &value)?,
            "dt" => p.dt = Some(parse_f64(lineno, &key, &value)?),
            "n_cells" => {
                let v = parse_f64(lineno, &key, &value)?;
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(ConfigError::MalformedValue(lineno, key, value));
                }
                p.n_cells = Some(v as usize);
            }
            "out_dir" => p.out_dir = value,
            "output_times" => p.output_times = parse_list(lineno, &key, &value)?,
            _ => return Err(ConfigError::UnknownKey(lineno, key)),
        }
    }
    Ok(p)
}

/// Render a preset back to configuration text; `parse_config(render(p))`
/// reproduces `p` for every built-in preset.
pub fn render(p: &ExperimentPreset) -> String {
    let list = |xs: &[f64]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut s = format!("preset={}\n", p.name);
    if !p.epsilon_list.is_empty() {
        s += &format!("epsilon={}\n", list(&p.epsilon_list));
    }
    if !p.mbar_list.is_empty() {
        s += &format!("mbar={}\n", list(&p.mbar_list));
    } else {
        s += &format!("mbar={}\n", p.params.mbar);
    }
    if let MovingDomain::UnitSphereTangential { vbar } = p.domain {
        s += &format!("vbar={vbar}\n");
    }
    s += &format!("u_a={}\nu_b={}\n", p.params.u_a, p.params.u_b);
    s += &format!(
        "potential={}\n",
        match p.params.potential {
            PotentialKind::Quartic => "quartic",
            PotentialKind::Logarithmic => "log",
        }
    );
    s += &format!(
        "mobility={}\n",
        match p.params.mobility {
            MobilityKind::Constant => "constant",
            MobilityKind::Degenerate => "degenerate",
        }
    );
    s += &format!("t_end={}\n", p.t_end);
    if let Some(dt) = p.dt {
        s += &format!("dt={dt}\n");
    }
    if let Some(n) = p.n_cells {
        s += &format!("n_cells={n}\n");
    }
    s += &format!("out_dir={}\n", p.out_dir);
    if !p.output_times.is_empty() {
        s += &format!("output_times={}\n", list(&p.output_times));
    }
    s
}

/// A short human-readable description of the companion problem.
pub fn comparison_label(c: &Comparison) -> &'static str {
    match c {
        Comparison::None => "none",
        Comparison::SharpInterval { .. } => "sharp-interval",
        Comparison::SharpCaps { .. } => "sharp-caps",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::PRESET_NAMES;

    #[test]
    fn stretch_with_override() {
        let p = parse_config("preset=stretch\nepsilon=0.1").unwrap();
        assert_eq!(p.name, "stretch");
        assert_eq!(p.epsilon_list, vec![0.1]);
        assert_eq!(p.t_end, 10.0);
        assert_eq!(p.output_times, vec![0.25, 1.0, 2.0, 10.0]);
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!(matches!(
            parse_config("preset=bogus"),
            Err(ConfigError::UnknownPreset(_))
        ));
    }

    #[test]
    fn sphere_reverse_defaults() {
        let p = parse_config("preset=sphere-reverse").unwrap();
        assert_eq!(p.domain, MovingDomain::UnitSphereTangential { vbar: 10.0 });
        assert_eq!(p.params.mbar, 5.0);
        assert_eq!(p.t_end, 0.15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_config("preset=stretch\nwibble=3") {
            Err(ConfigError::UnknownKey(line, key)) => {
                assert_eq!((line, key.as_str()), (2, "wibble"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_config("preset=stretch\n\nepsilon=zero") {
            Err(ConfigError::MalformedValue(line, _, _)) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_config("epsilon=0.1"),
            Err(ConfigError::MissingPreset)
        ));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let p = parse_config("# a comment\npreset=genesis # trailing\n\nt_end=0.1\n").unwrap();
        assert_eq!(p.name, "genesis");
        assert_eq!(p.t_end, 0.1);
    }

    #[test]
    fn round_trip_all_presets() {
        for name in PRESET_NAMES {
            let p = crate::presets::preset(name).unwrap();
            let back = parse_config(&render(&p)).unwrap();
            assert_eq!(back, p, "round trip failed for {name}");
        }
    }
}

//! Material-constant file for the `couple` subcommand: flat `key = value`
//! lines with `#` comments. The photoelastic tensor is given either as the
//! isotropic shorthand `p11` or as 36 row-major Voigt entries under `p`.

use std::path::Path;

use xducer_core::fields::{MaterialConstants, NormalizationEnergies, EPSILON_0};

#[derive(Debug)]
pub struct MaterialFile {
    pub constants: MaterialConstants,
    pub energies: NormalizationEnergies,
}

const KEYS: &[&str] = &["n", "p11", "p", "eps_si", "eps_air", "u_m", "u_q", "denom"];

pub fn load(path: &Path) -> Result<MaterialFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text, &path.display().to_string())
}

fn parse(text: &str, path: &str) -> Result<MaterialFile, String> {
    let mut n = 3.48;
    let mut p = [[0.0f64; 6]; 6];
    let mut p_set = false;
    let mut eps_si = None;
    let mut eps_air = EPSILON_0;
    let mut u_m = None;
    let mut u_q = None;
    let mut denom = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("{path}:{line_no}: expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(format!(
                "{path}:{line_no}: unknown key `{key}` (expected one of {})",
                KEYS.join(", ")
            ));
        }
        let num = |v: &str| -> Result<f64, String> {
            v.parse::<f64>()
                .map_err(|_| format!("{path}:{line_no}: cannot parse `{v}` as a number"))
        };
        match key {
            "n" => n = num(value)?,
            "p11" => {
                let v = num(value)?;
                p = [[0.0; 6]; 6];
                for (i, row) in p.iter_mut().enumerate() {
                    row[i] = v;
                }
                p_set = true;
            }
            "p" => {
                let entries: Result<Vec<f64>, String> =
                    value.split(',').map(|t| num(t.trim())).collect();
                let entries = entries?;
                if entries.len() != 36 {
                    return Err(format!(
                        "{path}:{line_no}: `p` needs 36 row-major entries, got {}",
                        entries.len()
                    ));
                }
                for i in 0..6 {
                    for j in 0..6 {
                        p[i][j] = entries[6 * i + j];
                    }
                }
                p_set = true;
            }
            "eps_si" => eps_si = Some(num(value)?),
            "eps_air" => eps_air = num(value)?,
            "u_m" => u_m = Some(num(value)?),
            "u_q" => u_q = Some(num(value)?),
            "denom" => denom = Some(num(value)?),
            _ => unreachable!(),
        }
    }

    if !p_set {
        return Err(format!("{path}: missing photoelastic tensor (`p11` or `p`)"));
    }
    let require = |name: &str, v: Option<f64>| -> Result<f64, String> {
        v.ok_or_else(|| format!("{path}: missing required key `{name}`"))
    };
    let constants = MaterialConstants {
        n,
        p,
        eps_si: eps_si.unwrap_or(n * n * EPSILON_0),
        eps_air,
    };
    constants.validate().map_err(|e| format!("{path}: {e}"))?;
    let energies = NormalizationEnergies {
        u_m: require("u_m", u_m)?,
        u_q: require("u_q", u_q)?,
        denom: require("denom", denom)?,
    };
    Ok(MaterialFile { constants, energies })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_shorthand_and_energies() {
        let m = parse(
            "n = 3.48\np11 = -0.094\nu_m = 1e-20\nu_q = 1e-21\ndenom = 1e-18\n",
            "mat.cfg",
        )
        .unwrap();
        assert_eq!(m.constants.p[0][0], -0.094);
        assert_eq!(m.constants.p[5][5], -0.094);
        assert_eq!(m.constants.p[0][1], 0.0);
        assert!(m.energies.u_m > 0.0);
    }

    #[test]
    fn missing_energy_is_an_error() {
        let err = parse("p11 = 0.1\nu_m = 1e-20\nu_q = 1e-21\n", "mat.cfg").unwrap_err();
        assert!(err.contains("denom"), "{err}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("p12 = 0.1\n", "mat.cfg").unwrap_err();
        assert!(err.contains("mat.cfg:1"), "{err}");
    }
}

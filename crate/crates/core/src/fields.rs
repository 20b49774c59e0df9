//! Perturbation-theory coupling-rate integrals over discretized field data.
//!
//! Field data comes in as pre-sampled point lists with explicit quadrature
//! weights; any FEM exporter can emit the columnar text format understood by
//! [`parse_volume_file`] / [`parse_surface_file`]. All accumulation uses
//! compensated summation.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::sum::CompensatedSum;

pub const EPSILON_0: f64 = 8.8541878128e-12;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: String,
        line: usize,
        message: String,
    },
    #[error("missing `#fields:` header line")]
    MissingHeader,
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("column group `{0}` is incomplete: all of {1} are required together")]
    IncompleteGroup(&'static str, String),
    #[error("integral references field group `{0}` which is absent from the dataset")]
    MissingFieldGroup(&'static str),
    #[error("normalization energy `{0}` must be > 0")]
    NonPositiveEnergy(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    LN,
    Si,
    Other,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::LN => "LN",
            Region::Si => "Si",
            Region::Other => "other",
        }
    }
}

pub type CVec3 = [Complex64; 3];

/// One volume quadrature sample. Optional field groups may be absent, but an
/// integral referencing an absent group is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSample {
    pub position: [f64; 3],
    pub dv: f64,
    pub region: Region,
    /// Mechanically induced electric displacement (C/m^2).
    pub d_m: Option<CVec3>,
    /// Qubit zero-point electric field (V/m).
    pub e_q: Option<CVec3>,
    /// Optical electric field (V/m).
    pub e: Option<CVec3>,
    /// Strain, Voigt order (xx, yy, zz, yz, xz, xy).
    pub strain: Option<[f64; 6]>,
    /// Optical electric displacement (C/m^2).
    pub d: Option<CVec3>,
}

/// One surface quadrature sample for the moving-boundary integral.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    pub position: [f64; 3],
    pub ds: f64,
    pub normal: [f64; 3],
    /// Normalized mechanical displacement.
    pub q: [f64; 3],
    /// Tangential electric field (V/m).
    pub e_par: CVec3,
    /// Normal electric displacement (C/m^2).
    pub d_perp: Complex64,
}

/// Optical material constants entering Eqs. for g_om.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialConstants {
    /// Refractive index.
    pub n: f64,
    /// Photoelastic tensor, 6x6 Voigt, dimensionless.
    pub p: [[f64; 6]; 6],
    /// Permittivity of the dielectric (F/m).
    pub eps_si: f64,
    /// Permittivity of the surrounding medium (F/m).
    pub eps_air: f64,
}

impl MaterialConstants {
    pub fn delta_eps(&self) -> f64 {
        self.eps_si - self.eps_air
    }

    pub fn delta_eps_inv(&self) -> f64 {
        1.0 / self.eps_si - 1.0 / self.eps_air
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.n > 1.0) {
            return Err("refractive index must be > 1".to_string());
        }
        if !(self.eps_si > self.eps_air && self.eps_air > 0.0) {
            return Err("permittivities must satisfy eps_si > eps_air > 0".to_string());
        }
        Ok(())
    }

    /// Silicon with an isotropic diagonal photoelastic tensor; mainly for
    /// synthetic-data checks.
    pub fn silicon_isotropic(p11: f64) -> Self {
        let mut p = [[0.0; 6]; 6];
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = p11;
        }
        Self {
            n: 3.48,
            p,
            eps_si: 3.48 * 3.48 * EPSILON_0,
            eps_air: EPSILON_0,
        }
    }
}

/// Normalization energies for the coupling integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationEnergies {
    /// Total cavity mechanical energy (J).
    pub u_m: f64,
    /// Total electrostatic energy (J).
    pub u_q: f64,
    /// Optical normalization integral of D dot E (J).
    pub denom: f64,
}

fn hermitian_dot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

fn norm_sqr3(a: &CVec3) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

/// Piezoelectric coupling rate from the LN-region overlap of the mechanically
/// induced displacement with the qubit zero-point field:
/// g_pe = omega_m * Re(sum_LN D_m* . E_q dV) / (4 sqrt(2 U_m U_q)), in Hz.
pub fn piezo_coupling(
    volume: &[VolumeSample],
    energies: &NormalizationEnergies,
    omega_m_hz: f64,
) -> Result<f64, FieldError> {
    if !(energies.u_m > 0.0) {
        return Err(FieldError::NonPositiveEnergy("u_m"));
    }
    if !(energies.u_q > 0.0) {
        return Err(FieldError::NonPositiveEnergy("u_q"));
    }
    let mut acc = CompensatedSum::new();
    for s in volume {
        if s.region != Region::LN {
            continue;
        }
        let d_m = s.d_m.as_ref().ok_or(FieldError::MissingFieldGroup("d_m"))?;
        let e_q = s.e_q.as_ref().ok_or(FieldError::MissingFieldGroup("e_q"))?;
        acc.add(hermitian_dot(d_m, e_q).re * s.dv);
    }
    Ok(omega_m_hz * acc.value() / (4.0 * (2.0 * energies.u_m * energies.u_q).sqrt()))
}

/// Voigt contraction of the photoelastic tensor with a strain vector into the
/// 3x3 matrix appearing in the photoelastic overlap.
fn photoelastic_matrix(p: &[[f64; 6]; 6], strain: &[f64; 6]) -> [[f64; 3]; 3] {
    let mut t = [0.0; 6];
    for (i, ti) in t.iter_mut().enumerate() {
        for (j, sj) in strain.iter().enumerate() {
            *ti += p[i][j] * sj;
        }
    }
    [
        [t[0], t[5], t[4]],
        [t[5], t[1], t[3]],
        [t[4], t[3], t[2]],
    ]
}

/// Photoelastic optomechanical coupling, in Hz:
/// g = (omega_o eps0 n^4 / 2) * (sum_Si E^dag [pS] E dV) / denom.
pub fn om_coupling_photoelastic(
    volume: &[VolumeSample],
    mat: &MaterialConstants,
    energies: &NormalizationEnergies,
    omega_o_hz: f64,
) -> Result<f64, FieldError> {
    if !(energies.denom > 0.0) {
        return Err(FieldError::NonPositiveEnergy("denom"));
    }
    let mut acc = CompensatedSum::new();
    for s in volume {
        if s.region != Region::Si {
            continue;
        }
        let e = s.e.as_ref().ok_or(FieldError::MissingFieldGroup("e"))?;
        let strain = s
            .strain
            .as_ref()
            .ok_or(FieldError::MissingFieldGroup("strain"))?;
        let m = photoelastic_matrix(&mat.p, strain);
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                quad += e[i].conj() * m[i][j] * e[j];
            }
        }
        acc.add(quad.re * s.dv);
    }
    let n4 = mat.n.powi(4);
    Ok(omega_o_hz * EPSILON_0 * n4 / 2.0 * acc.value() / energies.denom)
}

/// Moving-boundary optomechanical coupling, in Hz:
/// g = -(omega_o / 2) * sum (Q.n)(d_eps |E_par|^2 - d_eps_inv |D_perp|^2) dS / denom.
pub fn om_coupling_moving_boundary(
    surface: &[SurfaceSample],
    mat: &MaterialConstants,
    denom: f64,
    omega_o_hz: f64,
) -> Result<f64, FieldError> {
    if !(denom > 0.0) {
        return Err(FieldError::NonPositiveEnergy("denom"));
    }
    let d_eps = mat.delta_eps();
    let d_eps_inv = mat.delta_eps_inv();
    let mut acc = CompensatedSum::new();
    for s in surface {
        let qn = s.q[0] * s.normal[0] + s.q[1] * s.normal[1] + s.q[2] * s.normal[2];
        let term = qn * (d_eps * norm_sqr3(&s.e_par) - d_eps_inv * s.d_perp.norm_sqr());
        acc.add(term * s.ds);
    }
    Ok(-omega_o_hz / 2.0 * acc.value() / denom)
}

/// g_om = photoelastic + moving-boundary contributions.
pub fn total_om_coupling(photoelastic_hz: f64, moving_boundary_hz: f64) -> f64 {
    photoelastic_hz + moving_boundary_hz
}

/// Per-region sample counts of a volume dataset.
pub fn region_counts(volume: &[VolumeSample]) -> HashMap<Region, usize> {
    let mut counts = HashMap::new();
    for s in volume {
        *counts.entry(s.region).or_insert(0) += 1;
    }
    counts
}

// --- columnar file format ---------------------------------------------------

struct Columns {
    index: HashMap<String, usize>,
    count: usize,
}

impl Columns {
    fn parse_header(line: &str) -> Result<Self, FieldError> {
        let names = line
            .strip_prefix("#fields:")
            .ok_or(FieldError::MissingHeader)?;
        let mut index = HashMap::new();
        for (i, name) in names.split(',').map(str::trim).enumerate() {
            index.insert(name.to_string(), i);
        }
        let count = index.len();
        Ok(Self { index, count })
    }

    fn require(&self, name: &str) -> Result<usize, FieldError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| FieldError::MissingColumn(name.to_string()))
    }

    fn optional_cvec3(
        &self,
        group: &'static str,
        names: [&str; 6],
    ) -> Result<Option<[usize; 6]>, FieldError> {
        let found: Vec<Option<usize>> =
            names.iter().map(|n| self.index.get(*n).copied()).collect();
        let present = found.iter().filter(|o| o.is_some()).count();
        if present == 0 {
            return Ok(None);
        }
        if present < 6 {
            return Err(FieldError::IncompleteGroup(group, names.join(", ")));
        }
        Ok(Some([
            found[0].unwrap(),
            found[1].unwrap(),
            found[2].unwrap(),
            found[3].unwrap(),
            found[4].unwrap(),
            found[5].unwrap(),
        ]))
    }
}

fn parse_f64(tok: &str, path: &str, line: usize) -> Result<f64, FieldError> {
    tok.parse::<f64>().map_err(|_| FieldError::MalformedRow {
        path: path.to_string(),
        line,
        message: format!("cannot parse `{tok}` as a number"),
    })
}

fn read_cvec3(tokens: &[&str], idx: &[usize; 6], path: &str, line: usize) -> Result<CVec3, FieldError> {
    let mut v = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        let re = parse_f64(tokens[idx[2 * k]], path, line)?;
        let im = parse_f64(tokens[idx[2 * k + 1]], path, line)?;
        v[k] = Complex64::new(re, im);
    }
    Ok(v)
}

const DM_COLS: [&str; 6] = ["re_dmx", "im_dmx", "re_dmy", "im_dmy", "re_dmz", "im_dmz"];
const EQ_COLS: [&str; 6] = ["re_eqx", "im_eqx", "re_eqy", "im_eqy", "re_eqz", "im_eqz"];
const E_COLS: [&str; 6] = ["re_ex", "im_ex", "re_ey", "im_ey", "re_ez", "im_ez"];
const D_COLS: [&str; 6] = ["re_dx", "im_dx", "re_dy", "im_dy", "re_dz", "im_dz"];
const EPAR_COLS: [&str; 6] = [
    "re_eparx", "im_eparx", "re_epary", "im_epary", "re_eparz", "im_eparz",
];

/// Parse a columnar volume-sample file. Header: `#fields: <names>`; data rows
/// are whitespace-separated; complex components come as `re_`/`im_` pairs.
pub fn parse_volume_file(path: &Path) -> Result<Vec<VolumeSample>, FieldError> {
    let text = std::fs::read_to_string(path)?;
    parse_volume_text(&text, &path.display().to_string())
}

pub fn parse_volume_text(text: &str, path: &str) -> Result<Vec<VolumeSample>, FieldError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FieldError::MissingHeader)?;
    let cols = Columns::parse_header(header)?;
    let (ix, iy, iz) = (cols.require("x")?, cols.require("y")?, cols.require("z")?);
    let idv = cols.require("dV")?;
    let ireg = cols.require("region")?;
    let dm = cols.optional_cvec3("d_m", DM_COLS)?;
    let eq = cols.optional_cvec3("e_q", EQ_COLS)?;
    let e = cols.optional_cvec3("e", E_COLS)?;
    let d = cols.optional_cvec3("d", D_COLS)?;
    let strain: Option<[usize; 6]> = {
        let names = ["s1", "s2", "s3", "s4", "s5", "s6"];
        let found: Vec<Option<usize>> = names.iter().map(|n| cols.index.get(*n).copied()).collect();
        let present = found.iter().filter(|o| o.is_some()).count();
        if present == 0 {
            None
        } else if present < 6 {
            return Err(FieldError::IncompleteGroup("strain", names.join(", ")));
        } else {
            Some([
                found[0].unwrap(),
                found[1].unwrap(),
                found[2].unwrap(),
                found[3].unwrap(),
                found[4].unwrap(),
                found[5].unwrap(),
            ])
        }
    };

    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != cols.count {
            return Err(FieldError::MalformedRow {
                path: path.to_string(),
                line,
                message: format!("expected {} columns, found {}", cols.count, tokens.len()),
            });
        }
        let dv = parse_f64(tokens[idv], path, line)?;
        if !(dv > 0.0) {
            return Err(FieldError::MalformedRow {
                path: path.to_string(),
                line,
                message: format!("dV must be > 0, got {dv}"),
            });
        }
        let region = match tokens[ireg] {
            "LN" => Region::LN,
            "Si" => Region::Si,
            "other" => Region::Other,
            other => {
                return Err(FieldError::MalformedRow {
                    path: path.to_string(),
                    line,
                    message: format!("unknown region tag `{other}` (expected LN|Si|other)"),
                })
            }
        };
        let strain_vals = match &strain {
            Some(idxs) => {
                let mut s = [0.0; 6];
                for (slot, &i) in s.iter_mut().zip(idxs) {
                    *slot = parse_f64(tokens[i], path, line)?;
                }
                Some(s)
            }
            None => None,
        };
        out.push(VolumeSample {
            position: [
                parse_f64(tokens[ix], path, line)?,
                parse_f64(tokens[iy], path, line)?,
                parse_f64(tokens[iz], path, line)?,
            ],
            dv,
            region,
            d_m: dm.map(|i| read_cvec3(&tokens, &i, path, line)).transpose()?,
            e_q: eq.map(|i| read_cvec3(&tokens, &i, path, line)).transpose()?,
            e: e.map(|i| read_cvec3(&tokens, &i, path, line)).transpose()?,
            strain: strain_vals,
            d: d.map(|i| read_cvec3(&tokens, &i, path, line)).transpose()?,
        });
    }
    Ok(out)
}

/// Parse a columnar surface-sample file (`dS`, `nx,ny,nz`, `qx,qy,qz`,
/// tangential field and normal displacement columns).
pub fn parse_surface_file(path: &Path) -> Result<Vec<SurfaceSample>, FieldError> {
    let text = std::fs::read_to_string(path)?;
    parse_surface_text(&text, &path.display().to_string())
}

pub fn parse_surface_text(text: &str, path: &str) -> Result<Vec<SurfaceSample>, FieldError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FieldError::MissingHeader)?;
    let cols = Columns::parse_header(header)?;
    let (ix, iy, iz) = (cols.require("x")?, cols.require("y")?, cols.require("z")?);
    let ids = cols.require("dS")?;
    let normal_idx = [cols.require("nx")?, cols.require("ny")?, cols.require("nz")?];
    let q_idx = [cols.require("qx")?, cols.require("qy")?, cols.require("qz")?];
    let epar = cols
        .optional_cvec3("e_par", EPAR_COLS)?
        .ok_or_else(|| FieldError::MissingColumn("re_eparx".to_string()))?;
    let (idp_re, idp_im) = (cols.require("re_dperp")?, cols.require("im_dperp")?);

    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != cols.count {
            return Err(FieldError::MalformedRow {
                path: path.to_string(),
                line,
                message: format!("expected {} columns, found {}", cols.count, tokens.len()),
            });
        }
        let ds = parse_f64(tokens[ids], path, line)?;
        if !(ds > 0.0) {
            return Err(FieldError::MalformedRow {
                path: path.to_string(),
                line,
                message: format!("dS must be > 0, got {ds}"),
            });
        }
        let mut normal = [0.0; 3];
        for (slot, &i) in normal.iter_mut().zip(&normal_idx) {
            *slot = parse_f64(tokens[i], path, line)?;
        }
        let norm = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(FieldError::MalformedRow {
                path: path.to_string(),
                line,
                message: format!("normal vector has length {norm}, expected 1"),
            });
        }
        let mut q = [0.0; 3];
        for (slot, &i) in q.iter_mut().zip(&q_idx) {
            *slot = parse_f64(tokens[i], path, line)?;
        }
        out.push(SurfaceSample {
            position: [
                parse_f64(tokens[ix], path, line)?,
                parse_f64(tokens[iy], path, line)?,
                parse_f64(tokens[iz], path, line)?,
            ],
            ds,
            normal,
            q,
            e_par: read_cvec3(&tokens, &epar, path, line)?,
            d_perp: Complex64::new(
                parse_f64(tokens[idp_re], path, line)?,
                parse_f64(tokens[idp_im], path, line)?,
            ),
        });
    }
    Ok(out)
}

pub mod synth {
    //! Synthetic dataset generator. These field families have closed-form
    //! integrals and are the rigorous oracles available without a FEM solver.

    use super::*;
    use std::fmt::Write as _;

    fn real3(x: f64) -> CVec3 {
        [
            Complex64::new(x, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]
    }

    /// Midpoint-rule grid over the unit cube with uniform x-polarized
    /// D_m = d and E_q = e in the LN region.
    pub fn uniform_piezo_block(n: usize, d: f64, e: f64) -> Vec<VolumeSample> {
        grid_piezo(n, move |_| (d, e))
    }

    /// Sinusoidal D_m and E_q along x with wavenumbers k_d and k_e (cycles
    /// per unit length).
    pub fn sinusoidal_piezo_block(n: usize, d: f64, e: f64, k_d: f64, k_e: f64) -> Vec<VolumeSample> {
        use std::f64::consts::TAU;
        grid_piezo(n, move |x| ((TAU * k_d * x).sin() * d, (TAU * k_e * x).sin() * e))
    }

    /// Separable-Gaussian D_m and E_q along x, centered at 1/2 with width
    /// sigma.
    pub fn gaussian_piezo_block(n: usize, d: f64, e: f64, sigma: f64) -> Vec<VolumeSample> {
        grid_piezo(n, move |x| {
            let g = (-(x - 0.5) * (x - 0.5) / (2.0 * sigma * sigma)).exp();
            (d * g, e * g)
        })
    }

    fn grid_piezo(n: usize, profile: impl Fn(f64) -> (f64, f64)) -> Vec<VolumeSample> {
        let dv = 1.0 / (n * n * n) as f64;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            let (dm, eq) = profile(x);
            for j in 0..n {
                let y = (j as f64 + 0.5) / n as f64;
                for k in 0..n {
                    let z = (k as f64 + 0.5) / n as f64;
                    out.push(VolumeSample {
                        position: [x, y, z],
                        dv,
                        region: Region::LN,
                        d_m: Some(real3(dm)),
                        e_q: Some(real3(eq)),
                        e: None,
                        strain: None,
                        d: None,
                    });
                }
            }
        }
        out
    }

    /// Closed-form overlap integral of the two x-profiles over the unit cube.
    /// With uniform profiles this is d*e; sinusoidal and Gaussian use the
    /// analytic antiderivatives.
    pub fn piezo_overlap_uniform(d: f64, e: f64) -> f64 {
        d * e
    }

    pub fn piezo_overlap_sinusoidal(d: f64, e: f64, k_d: f64, k_e: f64) -> f64 {
        use std::f64::consts::TAU;
        let (a, b) = (TAU * k_d, TAU * k_e);
        let integral = if (a - b).abs() < 1e-30 {
            0.5 - (2.0 * a).sin() / (4.0 * a)
        } else {
            ((a - b).sin() / (2.0 * (a - b))) - ((a + b).sin() / (2.0 * (a + b)))
        };
        d * e * integral
    }

    pub fn piezo_overlap_gaussian(d: f64, e: f64, sigma: f64) -> f64 {
        // int_0^1 exp(-(x-1/2)^2 / sigma^2) dx = sigma * sqrt(pi) * erf(1/(2 sigma))
        let root_pi = std::f64::consts::PI.sqrt();
        d * e * sigma * root_pi * libm::erf(0.5 / sigma)
    }

    /// Uniform optical field with hydrostatic strain in the Si region.
    pub fn uniform_photoelastic_block(n: usize, e_amp: f64, s: f64) -> Vec<VolumeSample> {
        let dv = 1.0 / (n * n * n) as f64;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(VolumeSample {
                        position: [
                            (i as f64 + 0.5) / n as f64,
                            (j as f64 + 0.5) / n as f64,
                            (k as f64 + 0.5) / n as f64,
                        ],
                        dv,
                        region: Region::Si,
                        d_m: None,
                        e_q: None,
                        e: Some(real3(e_amp)),
                        strain: Some([s, s, s, 0.0, 0.0, 0.0]),
                        d: None,
                    });
                }
            }
        }
        out
    }

    /// Flat unit square at z = 0 with outward normal +z, uniform normal
    /// displacement q and x-polarized tangential field.
    pub fn flat_boundary(n: usize, q: f64, e_par: f64, d_perp: f64) -> Vec<SurfaceSample> {
        let ds = 1.0 / (n * n) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(SurfaceSample {
                    position: [
                        (i as f64 + 0.5) / n as f64,
                        (j as f64 + 0.5) / n as f64,
                        0.0,
                    ],
                    ds,
                    normal: [0.0, 0.0, 1.0],
                    q: [0.0, 0.0, q],
                    e_par: real3(e_par),
                    d_perp: Complex64::new(d_perp, 0.0),
                });
            }
        }
        out
    }

    /// Serialize volume samples to the columnar text format.
    pub fn write_volume_text(samples: &[VolumeSample]) -> String {
        let mut cols = vec!["x", "y", "z", "dV", "region"];
        let with_dm = samples.iter().any(|s| s.d_m.is_some());
        let with_eq = samples.iter().any(|s| s.e_q.is_some());
        let with_e = samples.iter().any(|s| s.e.is_some());
        let with_s = samples.iter().any(|s| s.strain.is_some());
        if with_dm {
            cols.extend(DM_COLS);
        }
        if with_eq {
            cols.extend(EQ_COLS);
        }
        if with_e {
            cols.extend(E_COLS);
        }
        if with_s {
            cols.extend(["s1", "s2", "s3", "s4", "s5", "s6"]);
        }
        let mut out = format!("#fields: {}\n", cols.join(","));
        for s in samples {
            let _ = write!(
                out,
                "{} {} {} {} {}",
                s.position[0], s.position[1], s.position[2], s.dv, s.region.as_str()
            );
            let mut push_cvec = |v: &Option<CVec3>| {
                if let Some(v) = v {
                    for c in v {
                        let _ = write!(out, " {} {}", c.re, c.im);
                    }
                }
            };
            if with_dm {
                push_cvec(&s.d_m);
            }
            if with_eq {
                push_cvec(&s.e_q);
            }
            if with_e {
                push_cvec(&s.e);
            }
            if with_s {
                if let Some(sv) = &s.strain {
                    for x in sv {
                        let _ = write!(out, " {x}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Serialize surface samples to the columnar text format.
    pub fn write_surface_text(samples: &[SurfaceSample]) -> String {
        let mut out = String::from(
            "#fields: x,y,z,dS,nx,ny,nz,qx,qy,qz,re_eparx,im_eparx,re_epary,im_epary,re_eparz,im_eparz,re_dperp,im_dperp\n",
        );
        for s in samples {
            let _ = write!(
                out,
                "{} {} {} {} {} {} {} {} {} {}",
                s.position[0],
                s.position[1],
                s.position[2],
                s.ds,
                s.normal[0],
                s.normal[1],
                s.normal[2],
                s.q[0],
                s.q[1],
                s.q[2]
            );
            for c in &s.e_par {
                let _ = write!(out, " {} {}", c.re, c.im);
            }
            let _ = writeln!(out, " {} {}", s.d_perp.re, s.d_perp.im);
        }
        out
    }
}

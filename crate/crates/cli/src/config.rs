//! Run configuration: a flat TOML file with exact rational coefficients.

use hilltongue::floquet::IntegratorSettings;
use hilltongue::{CouplingSpec, OscillatorSpec, Rat};
use num::bigint::BigInt;
use num::Zero;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Taylor coefficients of f as `[power, "p/q"]` pairs, powers >= 2.
    #[serde(default)]
    pub f_coeffs: Vec<(usize, String)>,
    /// Taylor coefficients of g as `[power, "p/q"]` pairs, powers >= 1.
    #[serde(default)]
    pub g_coeffs: Vec<(usize, String)>,
    /// Series truncation order M.
    pub order: usize,
    /// Largest tongue index to analyse.
    pub n_max: usize,
    /// Amplitude grid: explicit list or geometric spec.
    pub q_grid: QGrid,
    /// Analyses to run; defaults to all.
    #[serde(default)]
    pub analyses: Option<Vec<String>>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum QGrid {
    Explicit(Vec<f64>),
    Geometric { start: f64, stop: f64, count: usize },
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub beta_tol: Option<f64>,
    pub richardson: Option<f64>,
    pub quad_rel: Option<f64>,
    pub tangency: Option<f64>,
    pub zero_floor: Option<f64>,
    pub window_factor: Option<f64>,
    pub steps: Option<u32>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Analyses a run may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Analysis {
    Series,
    Tongues,
    Shape,
    Order,
    Coexist,
    Verify,
}

impl Analysis {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "series" => Ok(Analysis::Series),
            "tongues" => Ok(Analysis::Tongues),
            "shape" => Ok(Analysis::Shape),
            "order" => Ok(Analysis::Order),
            "coexist" => Ok(Analysis::Coexist),
            "verify" => Ok(Analysis::Verify),
            other => Err(format!(
                "unknown analysis '{other}' (expected series, tongues, shape, order, coexist, verify)"
            )),
        }
    }
}

/// Validated configuration ready to run.
pub struct RunConfig {
    pub osc: OscillatorSpec,
    pub coupling: CouplingSpec,
    pub order: usize,
    pub n_max: usize,
    pub q_grid: Vec<f64>,
    pub analyses: BTreeSet<Analysis>,
    pub settings: IntegratorSettings,
    pub zero_floor: f64,
    pub out_dir: Option<PathBuf>,
    /// SHA-256 of the raw config bytes, for the output header comment.
    pub hash: String,
}

pub fn parse_rational(field: &str, s: &str) -> Result<Rat, String> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim())
            .map_err(|_| format!("{field}: '{t}' is not an integer in a p/q rational"))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(format!("{field}: zero denominator in '{s}'"));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from(parse_int(s)?)),
    }
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, String> {
    let bytes = std::fs::read(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| format!("config {} is not valid UTF-8", path.display()))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    validate(raw, sha256_hex(&bytes))
}

fn validate(raw: RawConfig, hash: String) -> Result<RunConfig, String> {
    if raw.order < 1 {
        return Err("field 'order': truncation order must be >= 1".into());
    }
    if raw.order < raw.n_max {
        return Err(format!(
            "field 'order': order {} is below n_max {}; the leading coefficient of tongue N needs order N",
            raw.order, raw.n_max
        ));
    }

    let mut f_pairs = Vec::new();
    for (k, s) in &raw.f_coeffs {
        if *k < 2 {
            return Err(format!("field 'f_coeffs': power {k} < 2 breaks f(x) = O(x^2)"));
        }
        f_pairs.push((*k, parse_rational("f_coeffs", s)?));
    }
    let mut g_pairs = Vec::new();
    for (k, s) in &raw.g_coeffs {
        if *k < 1 {
            return Err("field 'g_coeffs': power 0 breaks g(0) = 0".into());
        }
        g_pairs.push((*k, parse_rational("g_coeffs", s)?));
    }
    let osc = OscillatorSpec::new(f_pairs, raw.order).map_err(|e| e.to_string())?;
    let coupling = CouplingSpec::new(g_pairs, raw.order).map_err(|e| e.to_string())?;

    let q_grid = match raw.q_grid {
        QGrid::Explicit(v) => v,
        QGrid::Geometric { start, stop, count } => {
            if count < 2 {
                return Err("field 'q_grid': geometric grid needs count >= 2".into());
            }
            if !(start > 0.0 && stop > start) {
                return Err("field 'q_grid': need 0 < start < stop".into());
            }
            let ratio = (stop / start).powf(1.0 / (count - 1) as f64);
            (0..count).map(|i| start * ratio.powi(i as i32)).collect()
        }
    };
    if q_grid.is_empty() {
        return Err("field 'q_grid': empty grid".into());
    }
    for w in q_grid.windows(2) {
        if w[1] <= w[0] {
            return Err("field 'q_grid': grid must be strictly ascending".into());
        }
    }
    if q_grid[0] <= 0.0 {
        return Err("field 'q_grid': amplitudes must be positive".into());
    }

    let analyses: BTreeSet<Analysis> = match &raw.analyses {
        None => [
            Analysis::Series,
            Analysis::Tongues,
            Analysis::Shape,
            Analysis::Order,
            Analysis::Coexist,
            Analysis::Verify,
        ]
        .into_iter()
        .collect(),
        Some(names) => {
            let mut set = BTreeSet::new();
            for name in names {
                set.insert(Analysis::parse(name).map_err(|e| format!("field 'analyses': {e}"))?);
            }
            set
        }
    };

    let mut settings = IntegratorSettings::default();
    let mut zero_floor = settings.zero_floor;
    if let Some(t) = &raw.tolerances {
        if let Some(v) = t.beta_tol {
            settings.beta_tol = v;
        }
        if let Some(v) = t.richardson {
            settings.richardson_tol = v;
        }
        if let Some(v) = t.quad_rel {
            settings.quad_rel_tol = v;
        }
        if let Some(v) = t.tangency {
            settings.tangency_tol = v;
        }
        if let Some(v) = t.zero_floor {
            settings.zero_floor = v;
            zero_floor = v;
        }
        if let Some(v) = t.window_factor {
            settings.window_factor = v;
        }
        if let Some(v) = t.steps {
            settings.steps = Some(v);
        }
    }

    Ok(RunConfig {
        osc,
        coupling,
        order: raw.order,
        n_max: raw.n_max,
        q_grid,
        analyses,
        settings,
        zero_floor,
        out_dir: raw.output.and_then(|o| o.dir),
        hash,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

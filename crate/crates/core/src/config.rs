//! Plain `key=value` run and study configuration.
//!
//! Pairs may be separated by whitespace or newlines. `#` starts a comment.
//! Optional `[scheme]`, `[case]` and `[run]` headers are accepted; a key
//! placed under the wrong header is an error.

use std::path::PathBuf;

use crate::dg::{SchemeConfig, VolumeMode};
use crate::error::DgError;
use crate::flux::FluxKind;
use crate::mesh::RefinementLadder;
use crate::physics::GasParams;
use crate::spectral::NodeFamily;
use crate::verification::{recommended_cfl, DensityWave, ErrorNorm, MachPreset, StudySpec, TestCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseSpec {
    Density { name: &'static str, wave: DensityWave },
    Manufactured,
}

impl CaseSpec {
    pub fn preset(m: MachPreset) -> Self {
        CaseSpec::Density {
            name: m.name(),
            wave: m.wave(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CaseSpec::Density { name, .. } => name,
            CaseSpec::Manufactured => "ms",
        }
    }

    pub fn test_case(&self) -> TestCase {
        match self {
            CaseSpec::Density { wave, .. } => TestCase::DensityWave(*wave),
            CaseSpec::Manufactured => TestCase::Manufactured,
        }
    }
}

/// Settings shared by single runs and study matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub levels: usize,
    pub first_level: usize,
    /// `None` picks [`recommended_cfl`] per degree and case.
    pub cfl: Option<f64>,
    pub t_end: f64,
    pub norm: ErrorNorm,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub entropy_trace: bool,
    pub conservation_trace: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            levels: 5,
            first_level: 0,
            cfl: None,
            t_end: 1.0,
            norm: ErrorNorm::default(),
            out: None,
            threads: None,
            entropy_trace: false,
            conservation_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeConfig,
    pub case: CaseSpec,
    pub settings: RunSettings,
}

impl RunConfig {
    pub fn study_spec(&self) -> StudySpec {
        study_spec(self.scheme, self.case, &self.settings)
    }
}

/// A sweep over fluxes, degrees and test cases for one node family and
/// volume form.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyMatrix {
    pub name: String,
    pub nodes: NodeFamily,
    pub volume: VolumeMode,
    pub gas: GasParams,
    pub fluxes: Vec<FluxKind>,
    pub degrees: Vec<usize>,
    pub cases: Vec<CaseSpec>,
    pub settings: RunSettings,
}

impl StudyMatrix {
    pub fn validate(&self) -> Result<(), DgError> {
        if self.fluxes.is_empty() || self.degrees.is_empty() || self.cases.is_empty() {
            return Err(DgError::Config("study lists must not be empty".into()));
        }
        for &n in &self.degrees {
            SchemeConfig::new(self.nodes, n, self.volume, self.fluxes[0])?;
        }
        validate_settings(&self.settings)
    }

    /// All runs in the order flux, case, degree.
    pub fn runs(&self) -> Result<Vec<RunConfig>, DgError> {
        self.validate()?;
        let mut out = Vec::new();
        for &flux in &self.fluxes {
            for &case in &self.cases {
                for &degree in &self.degrees {
                    let mut scheme = SchemeConfig::new(self.nodes, degree, self.volume, flux)?;
                    scheme.gas = self.gas;
                    out.push(RunConfig {
                        scheme,
                        case,
                        settings: self.settings.clone(),
                    });
                }
            }
        }
        Ok(out)
    }
}

pub fn study_spec(scheme: SchemeConfig, case: CaseSpec, s: &RunSettings) -> StudySpec {
    StudySpec {
        scheme,
        case: case.test_case(),
        ladder: RefinementLadder::for_degree(scheme.degree, s.levels),
        first_level: s.first_level,
        cfl: s.cfl.unwrap_or_else(|| recommended_cfl(scheme.degree, &case.test_case())),
        t_end: s.t_end,
        norm: s.norm,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Run(RunConfig),
    Study(StudyMatrix),
}

const SCHEME_KEYS: &[&str] = &["nodes", "volume", "flux", "fluxes", "n", "degree", "degrees", "gamma"];
const CASE_KEYS: &[&str] = &["case", "ma", "mach", "v1", "v2"];
const RUN_KEYS: &[&str] = &[
    "levels",
    "first_level",
    "cfl",
    "t_end",
    "norm",
    "normalize",
    "out",
    "threads",
    "entropy_trace",
    "conservation_trace",
    "name",
];

fn section_of(key: &str) -> Option<&'static str> {
    if SCHEME_KEYS.contains(&key) {
        Some("scheme")
    } else if CASE_KEYS.contains(&key) {
        Some("case")
    } else if RUN_KEYS.contains(&key) {
        Some("run")
    } else {
        None
    }
}

fn tokens(text: &str) -> Result<Vec<(String, String)>, DgError> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut section: Option<String> = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.starts_with('[') {
            let name = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| DgError::Config(format!("malformed section header `{line}`")))?
                .trim()
                .to_ascii_lowercase();
            if !["scheme", "case", "run"].contains(&name.as_str()) {
                return Err(DgError::Config(format!("unknown section `[{name}]`")));
            }
            section = Some(name);
            continue;
        }
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| DgError::Config(format!("expected key=value, got `{tok}`")))?;
            let key = k.trim().to_ascii_lowercase();
            let sec = section_of(&key).ok_or_else(|| DgError::Config(format!("unknown key `{k}`")))?;
            if let Some(s) = &section {
                if s != sec {
                    return Err(DgError::Config(format!("key `{key}` belongs to [{sec}], found under [{s}]")));
                }
            }
            if out.iter().any(|(k2, _)| *k2 == key) {
                return Err(DgError::Config(format!("duplicate key `{key}`")));
            }
            out.push((key, v.trim().to_string()));
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, DgError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| DgError::Config(format!("invalid value for `{key}`: {e}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, DgError>
where
    T::Err: std::fmt::Display,
{
    v.split(',').filter(|s| !s.is_empty()).map(|s| parse_value(key, s.trim())).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, DgError> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(DgError::Config(format!("invalid boolean for `{key}`: `{v}`"))),
    }
}

fn parse_case(kind: &str, key: &str) -> Result<(bool, Option<MachPreset>), DgError> {
    // returns (is_manufactured, preset)
    match kind.to_ascii_lowercase().as_str() {
        "density" | "density-wave" | "dw" => Ok((false, None)),
        "manufactured" | "ms" => Ok((true, None)),
        other => other
            .parse::<MachPreset>()
            .map(|m| (false, Some(m)))
            .map_err(|_| DgError::Config(format!("invalid value for `{key}`: `{kind}` (expected density or manufactured)"))),
    }
}

fn validate_settings(s: &RunSettings) -> Result<(), DgError> {
    if s.levels < 1 {
        return Err(DgError::Config("levels must be at least 1".into()));
    }
    if s.first_level >= s.levels {
        return Err(DgError::Config(format!(
            "first_level {} must be below levels {}",
            s.first_level, s.levels
        )));
    }
    if let Some(cfl) = s.cfl {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(DgError::Config(format!("cfl must lie in (0, 1], got {cfl}")));
        }
    }
    if !(s.t_end > 0.0 && s.t_end.is_finite()) {
        return Err(DgError::Config(format!("t_end must be positive, got {}", s.t_end)));
    }
    if s.threads == Some(0) {
        return Err(DgError::Config("threads must be at least 1".into()));
    }
    Ok(())
}

/// Parses a run (single values) or study matrix (any list-valued key).
pub fn parse_config(text: &str) -> Result<ParsedConfig, DgError> {
    let mut nodes = NodeFamily::Lgl;
    let mut volume = VolumeMode::Standard;
    let mut fluxes: Option<Vec<FluxKind>> = None;
    let mut degrees: Option<Vec<usize>> = None;
    let mut gas = GasParams::default();
    let mut manufactured = false;
    let mut machs: Option<Vec<MachPreset>> = None;
    let mut v: [Option<f64>; 2] = [None, None];
    let mut settings = RunSettings::default();
    let mut name = String::from("custom");
    let mut is_study = false;
    let mut norm_over = None;

    for (key, val) in tokens(text)? {
        match key.as_str() {
            "nodes" => nodes = parse_value(&key, &val)?,
            "volume" => volume = parse_value(&key, &val)?,
            "flux" | "fluxes" => {
                let l = parse_list(&key, &val)?;
                is_study |= l.len() > 1 || key == "fluxes";
                fluxes = Some(l);
            }
            "n" | "degree" | "degrees" => {
                let l = parse_list(&key, &val)?;
                is_study |= l.len() > 1 || key == "degrees";
                degrees = Some(l);
            }
            "gamma" => gas = GasParams::new(parse_value(&key, &val)?)?,
            "case" => {
                let (ms, preset) = parse_case(&val, &key)?;
                manufactured = ms;
                if let Some(p) = preset {
                    machs = Some(vec![p]);
                }
            }
            "ma" | "mach" => {
                let l: Vec<MachPreset> = parse_list(&key, &val)?;
                is_study |= l.len() > 1;
                machs = Some(l);
            }
            "v1" => v[0] = Some(parse_value(&key, &val)?),
            "v2" => v[1] = Some(parse_value(&key, &val)?),
            "levels" => settings.levels = parse_value(&key, &val)?,
            "first_level" => settings.first_level = parse_value(&key, &val)?,
            "cfl" => {
                settings.cfl = match val.as_str() {
                    "auto" => None,
                    _ => Some(parse_value(&key, &val)?),
                }
            }
            "t_end" => settings.t_end = parse_value(&key, &val)?,
            "norm" => {
                norm_over = match val.to_ascii_lowercase().as_str() {
                    "collocation" | "nodes" => None,
                    s => match s.strip_prefix("over") {
                        Some(rest) => {
                            let m = rest.trim_start_matches([':', '-']);
                            Some(if m.is_empty() { 0 } else { parse_value::<usize>(&key, m)? })
                        }
                        None => {
                            return Err(DgError::Config(format!(
                                "invalid value for `norm`: `{val}` (expected collocation or over[:M])"
                            )))
                        }
                    },
                }
            }
            "normalize" => settings.norm.volume_normalized = parse_bool(&key, &val)?,
            "out" => settings.out = Some(PathBuf::from(val)),
            "threads" => settings.threads = Some(parse_value(&key, &val)?),
            "entropy_trace" => settings.entropy_trace = parse_bool(&key, &val)?,
            "conservation_trace" => settings.conservation_trace = parse_bool(&key, &val)?,
            "name" => name = val,
            _ => unreachable!("key validated by tokens()"),
        }
    }

    let fluxes = fluxes.ok_or_else(|| DgError::Config("missing key `flux`".into()))?;
    let degrees = degrees.ok_or_else(|| DgError::Config("missing key `N`".into()))?;
    if volume == VolumeMode::Split && nodes == NodeFamily::Gauss {
        return Err(DgError::Config(
            "volume=split requires nodes=lgl: the split form needs the LGL summation-by-parts property".into(),
        ));
    }
    let cases: Vec<CaseSpec> = if manufactured {
        if machs.is_some() || v.iter().any(Option::is_some) {
            return Err(DgError::Config("Mach or velocity keys are not valid for the manufactured case".into()));
        }
        vec![CaseSpec::Manufactured]
    } else if v.iter().any(Option::is_some) {
        if machs.is_some() {
            return Err(DgError::Config("give either `ma` or `v1`/`v2`, not both".into()));
        }
        vec![CaseSpec::Density {
            name: "custom",
            wave: DensityWave::new(v[0].unwrap_or(0.0), v[1].unwrap_or(0.0)),
        }]
    } else {
        machs
            .ok_or_else(|| DgError::Config("missing key `ma` for the density wave".into()))?
            .into_iter()
            .map(CaseSpec::preset)
            .collect()
    };
    settings.norm.over_integration = norm_over.map(|m| if m == 0 { 2 * (degrees.iter().max().unwrap() + 1) } else { m });
    validate_settings(&settings)?;

    if is_study || cases.len() > 1 {
        let m = StudyMatrix {
            name,
            nodes,
            volume,
            gas,
            fluxes,
            degrees,
            cases,
            settings,
        };
        m.validate()?;
        return Ok(ParsedConfig::Study(m));
    }
    let mut scheme = SchemeConfig::new(nodes, degrees[0], volume, fluxes[0])?;
    scheme.gas = gas;
    Ok(ParsedConfig::Run(RunConfig {
        scheme,
        case: cases[0],
        settings,
    }))
}

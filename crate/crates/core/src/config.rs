//! INI-style run configuration.
//!
//! ```text
//! [pump]
//! variant = plane_wave          # or gaussian
//! omega0 = 4.65e15              # rad/s
//! [crystal]
//! L = 1e-5                      # m
//! index_pump = constant 1.60
//! index_signal = sellmeier 2.7405:0.0184 range 0.4:1.6
//! [grids]
//! mode = spectral               # spatial | full4d
//! w1 = 64 2.3e15 1e13           # n center span
//! ```
//!
//! Keys are `section.key`; unknown sections, unknown keys and repeated keys are
//! errors. [`RunConfig::serialize`] writes every key with 17 significant digits
//! so that `parse(serialize(c)) == c`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::analysis::DEFAULT_EPR_THRESHOLD;
use crate::biphoton::{DirectQuadrature, JointGrid, JointMode, Observation, ScatterWindows};
use crate::dump::fmt_f64;
use crate::error::{Result, SpdcError};
use crate::field::{Axis, AxisLabel, MomentumUnits};
use crate::phasematch::{CrystalConfig, IndexModel, PdcType, DEFAULT_COLLINEAR_TOL};
use crate::pump::{PumpKind, PumpModel};

const SECTIONS: [&str; 6] = ["pump", "crystal", "windows", "grids", "analysis", "output"];

fn known_keys(section: &str) -> &'static [&'static str] {
    match section {
        "pump" => &["variant", "omega0", "sigma_omega", "waist", "synthesis_points"],
        "crystal" => &["L", "pdc_type", "index_pump", "index_signal", "index_idler"],
        "windows" => &[
            "T",
            "W",
            "t_nodes",
            "z_nodes",
            "rho_nodes",
            "observation_distance",
            "observation_time",
        ],
        "grids" => &["mode", "q1", "w1", "q2", "w2"],
        "analysis" => &["include_pm_factor", "epr_threshold", "collinear_tol", "units", "pm_points"],
        "output" => &["directory", "formats"],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpVariant {
    PlaneWave,
    Gaussian,
}

impl PumpVariant {
    fn as_str(self) -> &'static str {
        match self {
            PumpVariant::PlaneWave => "plane_wave",
            PumpVariant::Gaussian => "gaussian",
        }
    }
}

impl FromStr for PumpVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plane_wave" => Ok(PumpVariant::PlaneWave),
            "gaussian" => Ok(PumpVariant::Gaussian),
            other => Err(format!("unknown pump variant '{other}' (expected plane_wave or gaussian)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Spectral,
    Spatial,
    Full4D,
}

impl GridMode {
    fn as_str(self) -> &'static str {
        match self {
            GridMode::Spectral => "spectral",
            GridMode::Spatial => "spatial",
            GridMode::Full4D => "full4d",
        }
    }

    fn axes(self) -> &'static [&'static str] {
        match self {
            GridMode::Spectral => &["w1", "w2"],
            GridMode::Spatial => &["q1", "q2"],
            GridMode::Full4D => &["q1", "w1", "q2", "w2"],
        }
    }
}

impl FromStr for GridMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "spectral" => Ok(GridMode::Spectral),
            "spatial" => Ok(GridMode::Spatial),
            "full4d" => Ok(GridMode::Full4D),
            other => Err(format!("unknown grid mode '{other}' (expected spectral, spatial or full4d)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Dump,
    Csv,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Dump => "dump",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpSection {
    pub variant: PumpVariant,
    pub omega0: f64,
    pub sigma_omega: Option<f64>,
    pub waist: Option<f64>,
    /// Points per axis of the spectral synthesis of the position-space pump.
    pub synthesis_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowsSection {
    pub time_window: f64,
    pub half_width: f64,
    pub t_nodes: usize,
    pub z_nodes: usize,
    pub rho_nodes: usize,
    pub observation_distance: f64,
    pub observation_time: f64,
}

/// `n center span` of one grid axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxisSpec {
    pub n: usize,
    pub center: f64,
    pub span: f64,
}

impl GridAxisSpec {
    fn to_axis(self, label: AxisLabel) -> Result<Axis> {
        Axis::from_span(label, self.n, self.center, self.span)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridsSection {
    pub mode: GridMode,
    pub axes: BTreeMap<String, GridAxisSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSection {
    pub include_pm_factor: bool,
    pub epr_threshold: f64,
    pub collinear_tol: f64,
    pub units: MomentumUnits,
    /// Samples of the phase-matching curve written by `phasematch`.
    pub pm_points: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            include_pm_factor: true,
            epr_threshold: DEFAULT_EPR_THRESHOLD,
            collinear_tol: DEFAULT_COLLINEAR_TOL,
            units: MomentumUnits::Natural,
            pm_points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub directory: String,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec![OutputFormat::Dump, OutputFormat::Csv],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pump: PumpSection,
    pub crystal: CrystalConfig,
    pub windows: Option<WindowsSection>,
    pub grids: GridsSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    name: String,
    entries: BTreeMap<String, Entry>,
}

fn parse_err(line: usize, message: impl Into<String>) -> SpdcError {
    SpdcError::Parse {
        line,
        message: message.into(),
    }
}

fn invalid(message: impl Into<String>) -> SpdcError {
    SpdcError::Validation(message.into())
}

impl Section {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| parse_err(e.line, format!("{}.{key}: {err}", self.name))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)?
            .ok_or_else(|| invalid(format!("{}.{key} is required", self.name)))
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().min_by_key(|(_, e)| e.line) {
            Some((key, e)) => Err(parse_err(e.line, format!("unknown key '{}.{key}'", self.name))),
            None => Ok(()),
        }
    }
}

fn tokenize(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "section header must end with ']'"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(parse_err(line_no, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(parse_err(line_no, format!("section [{name}] appears twice")));
            }
            sections.insert(
                name.to_string(),
                Section {
                    name: name.to_string(),
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(parse_err(line_no, "expected 'key = value'"));
        }
        let section = current
            .as_ref()
            .and_then(|s| sections.get_mut(s))
            .ok_or_else(|| parse_err(line_no, format!("key '{key}' outside any section")))?;
        if !known_keys(&section.name).contains(&key) {
            return Err(parse_err(line_no, format!("unknown key '{}.{key}'", section.name)));
        }
        if section.entries.contains_key(key) {
            return Err(parse_err(line_no, format!("key '{}.{key}' appears twice", section.name)));
        }
        section.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line: line_no,
            },
        );
    }
    Ok(sections)
}

impl FromStr for GridAxisSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(format!("expected 'n center span', found '{s}'"));
        }
        Ok(Self {
            n: toks[0].parse().map_err(|_| format!("bad grid size '{}'", toks[0]))?,
            center: toks[1].parse().map_err(|_| format!("bad grid center '{}'", toks[1]))?,
            span: toks[2].parse().map_err(|_| format!("bad grid span '{}'", toks[2]))?,
        })
    }
}

struct Formats(Vec<OutputFormat>);

impl FromStr for Formats {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim) {
            let f = match tok {
                "dump" => OutputFormat::Dump,
                "csv" => OutputFormat::Csv,
                other => return Err(format!("unknown output format '{other}' (expected dump or csv)")),
            };
            if out.contains(&f) {
                return Err(format!("output format '{tok}' listed twice"));
            }
            out.push(f);
        }
        out.sort();
        Ok(Formats(out))
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{key} must be > 0")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(invalid(format!("{key} must be >= {min}")))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut sections = tokenize(text)?;
    let mut take_section = |name: &str, required: bool| -> Result<Option<Section>> {
        match sections.remove(name) {
            Some(s) => Ok(Some(s)),
            None if required => Err(invalid(format!("missing required section [{name}]"))),
            None => Ok(None),
        }
    };

    let mut s = take_section("pump", true)?.unwrap();
    let pump = PumpSection {
        variant: s.require("variant")?,
        omega0: s.require("omega0")?,
        sigma_omega: s.take("sigma_omega")?,
        waist: s.take("waist")?,
        synthesis_points: s.take("synthesis_points")?.unwrap_or(64),
    };
    s.finish()?;

    let mut s = take_section("crystal", true)?.unwrap();
    let length: f64 = s.require("L")?;
    let pdc_type: PdcType = s.take("pdc_type")?.unwrap_or(PdcType::I);
    let index_pump: IndexModel = s.require("index_pump")?;
    let index_signal: IndexModel = s.require("index_signal")?;
    let index_idler: IndexModel = s.take("index_idler")?.unwrap_or_else(|| index_signal.clone());
    s.finish()?;
    let crystal = CrystalConfig::new(length, index_pump, index_signal, index_idler, pdc_type)?;

    let windows = match take_section("windows", false)? {
        None => None,
        Some(mut s) => {
            let time_window: f64 = s.require("T")?;
            let observation_distance = s.take("observation_distance")?.unwrap_or(1.0);
            let w = WindowsSection {
                time_window,
                half_width: s.require("W")?,
                t_nodes: s.take("t_nodes")?.unwrap_or(1024),
                z_nodes: s.take("z_nodes")?.unwrap_or(8),
                rho_nodes: s.take("rho_nodes")?.unwrap_or(1),
                observation_distance,
                observation_time: s
                    .take("observation_time")?
                    .unwrap_or(4.0 * observation_distance / crate::field::SPEED_OF_LIGHT + time_window),
            };
            s.finish()?;
            Some(w)
        }
    };

    let mut s = take_section("grids", true)?.unwrap();
    let mode: GridMode = s.require("mode")?;
    let mut axes = BTreeMap::new();
    for name in ["q1", "w1", "q2", "w2"] {
        let spec: Option<GridAxisSpec> = s.take(name)?;
        match (spec, mode.axes().contains(&name)) {
            (Some(spec), true) => {
                axes.insert(name.to_string(), spec);
            }
            (None, true) => return Err(invalid(format!("grids.{name} is required in {} mode", mode.as_str()))),
            (Some(_), false) => return Err(invalid(format!("grids.{name} is not used in {} mode", mode.as_str()))),
            (None, false) => {}
        }
    }
    s.finish()?;
    let grids = GridsSection { mode, axes };

    let analysis = match take_section("analysis", false)? {
        None => AnalysisSection::default(),
        Some(mut s) => {
            let d = AnalysisSection::default();
            let a = AnalysisSection {
                include_pm_factor: s.take("include_pm_factor")?.unwrap_or(d.include_pm_factor),
                epr_threshold: s.take("epr_threshold")?.unwrap_or(d.epr_threshold),
                collinear_tol: s.take("collinear_tol")?.unwrap_or(d.collinear_tol),
                units: s.take("units")?.unwrap_or(d.units),
                pm_points: s.take("pm_points")?.unwrap_or(d.pm_points),
            };
            s.finish()?;
            a
        }
    };

    let output = match take_section("output", false)? {
        None => OutputSection::default(),
        Some(mut s) => {
            let d = OutputSection::default();
            let o = OutputSection {
                directory: s.take("directory")?.unwrap_or(d.directory),
                formats: s.take::<Formats>("formats")?.map(|f| f.0).unwrap_or(d.formats),
            };
            s.finish()?;
            o
        }
    };

    let config = RunConfig {
        pump,
        crystal,
        windows,
        grids,
        analysis,
        output,
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks every invariant, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let p = &self.pump;
        positive("pump.omega0", p.omega0)?;
        match p.variant {
            PumpVariant::PlaneWave => {
                if p.sigma_omega.is_some() {
                    return Err(invalid("pump.sigma_omega is only used by the gaussian variant"));
                }
                if p.waist.is_some() {
                    return Err(invalid("pump.waist is only used by the gaussian variant"));
                }
            }
            PumpVariant::Gaussian => {
                positive(
                    "pump.sigma_omega",
                    p.sigma_omega.ok_or_else(|| invalid("pump.sigma_omega is required for a gaussian pump"))?,
                )?;
                positive(
                    "pump.waist",
                    p.waist.ok_or_else(|| invalid("pump.waist is required for a gaussian pump"))?,
                )?;
            }
        }
        at_least("pump.synthesis_points", p.synthesis_points, 64)?;
        positive("crystal.L", self.crystal.length)?;
        self.pump_model()?;

        if let Some(w) = &self.windows {
            positive("windows.T", w.time_window)?;
            positive("windows.W", w.half_width)?;
            at_least("windows.t_nodes", w.t_nodes, 1)?;
            at_least("windows.z_nodes", w.z_nodes, 1)?;
            at_least("windows.rho_nodes", w.rho_nodes, 1)?;
            positive("windows.observation_distance", w.observation_distance)?;
            positive("windows.observation_time", w.observation_time)?;
        }

        for (name, spec) in &self.grids.axes {
            at_least(&format!("grids.{name} size"), spec.n, 2)?;
            positive(&format!("grids.{name} span"), spec.span)?;
            if !spec.center.is_finite() {
                return Err(invalid(format!("grids.{name} center must be finite")));
            }
            if name.starts_with('w') && !(spec.center - 0.5 * spec.span > 0.0) {
                return Err(invalid(format!("grids.{name} must stay at positive frequencies")));
            }
        }
        self.grid()?;

        positive("analysis.epr_threshold", self.analysis.epr_threshold)?;
        positive("analysis.collinear_tol", self.analysis.collinear_tol)?;
        at_least("analysis.pm_points", self.analysis.pm_points, 2)?;

        if self.output.directory.is_empty() {
            return Err(invalid("output.directory must not be empty"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats must list at least one format"));
        }
        Ok(())
    }

    pub fn pump_model(&self) -> Result<PumpModel> {
        let p = &self.pump;
        let kind = match p.variant {
            PumpVariant::PlaneWave => PumpKind::PlaneWave { omega0: p.omega0 },
            PumpVariant::Gaussian => PumpKind::Gaussian {
                omega0: p.omega0,
                sigma_omega: p.sigma_omega.unwrap_or(f64::NAN),
                waist: p.waist.unwrap_or(f64::NAN),
            },
        };
        PumpModel::new(kind, self.crystal.index_pump.clone())
    }

    pub fn grid(&self) -> Result<JointGrid> {
        let ax = |name: &str, label| -> Result<Axis> {
            self.grids
                .axes
                .get(name)
                .ok_or_else(|| invalid(format!("grids.{name} is required")))?
                .to_axis(label)
        };
        match self.grids.mode {
            GridMode::Spectral => JointGrid::spectral(ax("w1", AxisLabel::W1)?, ax("w2", AxisLabel::W2)?),
            GridMode::Spatial => {
                JointGrid::spatial_degenerate(ax("q1", AxisLabel::Q1)?, ax("q2", AxisLabel::Q2)?, self.pump.omega0)
            }
            GridMode::Full4D => JointGrid::new(
                JointMode::Full4D,
                vec![
                    ax("q1", AxisLabel::Q1)?,
                    ax("w1", AxisLabel::W1)?,
                    ax("q2", AxisLabel::Q2)?,
                    ax("w2", AxisLabel::W2)?,
                ],
            ),
        }
    }

    pub fn scatter_windows(&self) -> Result<(ScatterWindows, DirectQuadrature)> {
        let w = self
            .windows
            .as_ref()
            .ok_or_else(|| invalid("section [windows] is required for the direct computation"))?;
        let windows = ScatterWindows::new(w.time_window, w.half_width)?.with_observation(Observation {
            distance: w.observation_distance,
            time: w.observation_time,
        });
        let quad = DirectQuadrature {
            t_nodes: w.t_nodes,
            z_nodes: w.z_nodes,
            rho_nodes: w.rho_nodes,
            pump: self.pump_model()?.default_quadrature(self.pump.synthesis_points),
        };
        Ok((windows, quad))
    }

    /// Text form that [`parse_config`] reads back to an equal value.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let p = &self.pump;
        let _ = writeln!(out, "[pump]");
        let _ = writeln!(out, "variant = {}", p.variant.as_str());
        let _ = writeln!(out, "omega0 = {}", fmt_f64(p.omega0));
        if let Some(s) = p.sigma_omega {
            let _ = writeln!(out, "sigma_omega = {}", fmt_f64(s));
        }
        if let Some(w) = p.waist {
            let _ = writeln!(out, "waist = {}", fmt_f64(w));
        }
        let _ = writeln!(out, "synthesis_points = {}", p.synthesis_points);

        let c = &self.crystal;
        let _ = writeln!(out, "\n[crystal]");
        let _ = writeln!(out, "L = {}", fmt_f64(c.length));
        let _ = writeln!(out, "pdc_type = {}", c.pdc_type);
        let _ = writeln!(out, "index_pump = {}", c.index_pump);
        let _ = writeln!(out, "index_signal = {}", c.index_signal);
        let _ = writeln!(out, "index_idler = {}", c.index_idler);

        if let Some(w) = &self.windows {
            let _ = writeln!(out, "\n[windows]");
            let _ = writeln!(out, "T = {}", fmt_f64(w.time_window));
            let _ = writeln!(out, "W = {}", fmt_f64(w.half_width));
            let _ = writeln!(out, "t_nodes = {}", w.t_nodes);
            let _ = writeln!(out, "z_nodes = {}", w.z_nodes);
            let _ = writeln!(out, "rho_nodes = {}", w.rho_nodes);
            let _ = writeln!(out, "observation_distance = {}", fmt_f64(w.observation_distance));
            let _ = writeln!(out, "observation_time = {}", fmt_f64(w.observation_time));
        }

        let _ = writeln!(out, "\n[grids]");
        let _ = writeln!(out, "mode = {}", self.grids.mode.as_str());
        for name in ["q1", "w1", "q2", "w2"] {
            if let Some(a) = self.grids.axes.get(name) {
                let _ = writeln!(out, "{name} = {} {} {}", a.n, fmt_f64(a.center), fmt_f64(a.span));
            }
        }

        let a = &self.analysis;
        let _ = writeln!(out, "\n[analysis]");
        let _ = writeln!(out, "include_pm_factor = {}", a.include_pm_factor);
        let _ = writeln!(out, "epr_threshold = {}", fmt_f64(a.epr_threshold));
        let _ = writeln!(out, "collinear_tol = {}", fmt_f64(a.collinear_tol));
        let _ = writeln!(out, "units = {}", a.units);
        let _ = writeln!(out, "pm_points = {}", a.pm_points);

        let _ = writeln!(out, "\n[output]");
        let _ = writeln!(out, "directory = {}", self.output.directory);
        let formats: Vec<&str> = self.output.formats.iter().map(|f| f.as_str()).collect();
        let _ = writeln!(out, "formats = {}", formats.join(","));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
# reference run
[pump]
variant = gaussian
omega0 = 4.65e15
sigma_omega = 1e11   # rad/s
waist = 1e-4
synthesis_points = 96

[crystal]
L = 1e-3
pdc_type = I
index_pump = constant 1.60
index_signal = sellmeier 1.0:0.01 range 0.4:1.6
index_idler = constant 1.55

[windows]
T = 2e-12
W = 1e-3
t_nodes = 512
z_nodes = 4
rho_nodes = 16

[grids]
mode = spectral
w1 = 32 2.325e15 4e12
w2 = 32 2.325e15 4e12

[analysis]
include_pm_factor = false
epr_threshold = 1.0
units = si

[output]
directory = results
formats = csv
";

    #[test]
    fn base_config_parses_and_round_trips() {
        let c = parse_config(BASE).unwrap();
        assert_eq!(c.pump.variant, PumpVariant::Gaussian);
        assert_eq!(c.grids.mode, GridMode::Spectral);
        assert_eq!(c.output.formats, vec![OutputFormat::Csv]);
        assert_eq!(c.analysis.units, MomentumUnits::Si);
        assert!(!c.analysis.include_pm_factor);
        let text = c.serialize();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn empty_text_lacks_required_sections() {
        assert!(matches!(parse_config(""), Err(SpdcError::Validation(m)) if m.contains("[pump]")));
    }

    #[test]
    fn negative_length_names_the_key() {
        let text = BASE.replace("L = 1e-3", "L = -1e-3");
        assert_eq!(
            parse_config(&text).unwrap_err(),
            SpdcError::Validation("crystal.L must be > 0".into())
        );
    }

    fn line_of(text: &str, needle: &str) -> usize {
        text.lines().position(|l| l.contains(needle)).unwrap() + 1
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            (BASE.replace("units = si", "colour = blue"), "colour"),
            (BASE.replace("[output]", "[extra]"), "[extra]"),
            (BASE.replace("z_nodes = 4", "z_nodes = 4\nz_nodes = 5"), "z_nodes = 5"),
            (BASE.replace("omega0 = 4.65e15", "omega0 = fast"), "omega0"),
            (BASE.replace("waist = 1e-4", "waist 1e-4"), "waist"),
            (BASE.replace("mode = spectral", "mode = polar"), "mode ="),
            (BASE.replace("index_idler = constant 1.55", "index_idler = tabulated"), "index_idler"),
            (BASE.replace("w2 = 32 2.325e15 4e12", "w2 = 32 2.325e15"), "w2 ="),
            (BASE.replace("formats = csv", "formats = csv,png"), "formats"),
            (format!("x = 1\n{BASE}"), "x = 1"),
        ];
        for (text, needle) in cases {
            match parse_config(&text) {
                Err(SpdcError::Parse { line, .. }) => assert_eq!(line, line_of(&text, needle), "{needle}"),
                other => panic!("{needle}: expected a parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn every_invariant_is_reachable_by_one_key() {
        let cases = [
            ("omega0 = 4.65e15", "omega0 = 0", "pump.omega0"),
            ("sigma_omega = 1e11   # rad/s", "sigma_omega = -1", "pump.sigma_omega"),
            ("waist = 1e-4", "waist = 0", "pump.waist"),
            ("waist = 1e-4", "waist = 1e-8", "paraxial"),
            ("synthesis_points = 96", "synthesis_points = 8", "pump.synthesis_points"),
            ("variant = gaussian", "variant = plane_wave", "pump.sigma_omega"),
            ("L = 1e-3", "L = 0", "crystal.L"),
            ("T = 2e-12", "T = 0", "windows.T"),
            ("W = 1e-3", "W = -2", "windows.W"),
            ("t_nodes = 512", "t_nodes = 0", "windows.t_nodes"),
            ("z_nodes = 4", "z_nodes = 0", "windows.z_nodes"),
            ("rho_nodes = 16", "rho_nodes = 0", "windows.rho_nodes"),
            ("rho_nodes = 16", "observation_time = -1", "windows.observation_time"),
            ("rho_nodes = 16", "observation_distance = 0", "windows.observation_distance"),
            ("w1 = 32 2.325e15 4e12", "w1 = 1 2.325e15 4e12", "grids.w1 size"),
            ("w1 = 32 2.325e15 4e12", "w1 = 32 2.325e15 0", "grids.w1 span"),
            ("w1 = 32 2.325e15 4e12", "w1 = 32 1e12 4e12", "grids.w1"),
            ("w1 = 32 2.325e15 4e12", "q1 = 32 0 4e4", "grids.q1"),
            ("mode = spectral", "mode = spatial", "grids.q1"),
            ("epr_threshold = 1.0", "epr_threshold = 0", "analysis.epr_threshold"),
            ("units = si", "collinear_tol = 0", "analysis.collinear_tol"),
            ("units = si", "pm_points = 1", "analysis.pm_points"),
            ("index_idler = constant 1.55", "index_idler = constant 0.5", "index_idler"),
        ];
        for (from, to, key) in cases {
            let text = BASE.replacen(from, to, 1);
            assert_ne!(text, BASE, "{from}");
            let err = parse_config(&text).unwrap_err();
            assert!(err.to_string().contains(key), "{to}: {err}");
        }
    }

    #[test]
    fn optional_sections_take_defaults() {
        let text = "\
[pump]
variant = plane_wave
omega0 = 4.65e15
[crystal]
L = 1e-5
index_pump = constant 1.6
index_signal = constant 1.6
[grids]
mode = spatial
q1 = 16 0 2e4
q2 = 16 0 2e4
";
        let c = parse_config(text).unwrap();
        assert!(c.windows.is_none());
        assert_eq!(c.analysis, AnalysisSection::default());
        assert_eq!(c.output, OutputSection::default());
        assert_eq!(c.crystal.index_idler, c.crystal.index_signal);
        assert!(c.scatter_windows().is_err());
        assert_eq!(c.grid().unwrap().mode(), JointMode::Spatial2D { omega1: 2.325e15, omega2: 2.325e15 });
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
    }
}

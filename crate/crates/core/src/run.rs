//! Subcommand execution and artifact emission.
//!
//! Every run writes its artifacts plus `manifest.txt`, which records the
//! canonical config hash, the operations used and the SHA-256 of each artifact.
//! Nothing time- or host-dependent is written, so reruns are byte-identical.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::analysis::{marginal, schmidt_decompose, sum_difference_statistics};
use crate::biphoton::{direct_wavefunction, joint_amplitude_analytic, JointAmplitude};
use crate::config::{OutputFormat, RunConfig};
use crate::dump::{fmt_f64, write_dump};
use crate::error::{Result, SpdcError};
use crate::field::PhysConstants;
use crate::phasematch::{collinear_condition, cone_transverse_momenta, phase_matching_factor};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest `|dk_z L|` covered by the phase-matching curve.
pub const PM_CURVE_EXTENT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    Oracle,
    Schmidt,
    Epr,
    Phasematch,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Oracle => "oracle",
            Subcommand::Schmidt => "schmidt",
            Subcommand::Epr => "epr",
            Subcommand::Phasematch => "phasematch",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Subcommand {
    type Err = SpdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulate" => Ok(Subcommand::Simulate),
            "oracle" => Ok(Subcommand::Oracle),
            "schmidt" => Ok(Subcommand::Schmidt),
            "epr" => Ok(Subcommand::Epr),
            "phasematch" => Ok(Subcommand::Phasematch),
            other => Err(SpdcError::InvalidInput(format!("unknown subcommand '{other}'"))),
        }
    }
}

/// Files written by one run, in the order they were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub directory: PathBuf,
    pub files: Vec<(String, String)>,
}

impl RunOutput {
    pub fn path(&self, name: &str) -> PathBuf {
        self.directory.join(name)
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<(String, String)>,
    operations: Vec<&'static str>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            operations: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    fn finish(self, command: Subcommand, config: &RunConfig) -> Result<RunOutput> {
        let mut m = String::new();
        let _ = writeln!(m, "spdc {VERSION}");
        let _ = writeln!(m, "command {command}");
        let _ = writeln!(m, "config_sha256 {}", sha256_hex(config.serialize().as_bytes()));
        for op in &self.operations {
            let _ = writeln!(m, "operation {op} {VERSION}");
        }
        for (name, hash) in &self.files {
            let _ = writeln!(m, "output {name} {hash}");
        }
        fs::write(self.dir.join("manifest.txt"), &m)?;
        Ok(RunOutput {
            directory: self.dir,
            files: self.files,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

/// One row per axis sample: `axis,index,value,density`.
pub fn marginals_csv(a: &JointAmplitude) -> Result<String> {
    let mut out = String::from("axis,index,value,density\n");
    for ax in a.field().axes() {
        let m = marginal(a, &[ax.label()])?;
        for (i, p) in m.data().iter().enumerate() {
            let _ = writeln!(out, "{},{i},{},{}", ax.label(), fmt_f64(ax.value(i)), fmt_f64(*p));
        }
    }
    Ok(out)
}

fn analytic(config: &RunConfig) -> Result<JointAmplitude> {
    joint_amplitude_analytic(
        &config.pump_model()?,
        &config.crystal,
        &config.grid()?,
        config.analysis.include_pm_factor,
    )
}

/// Runs `command` and writes its artifacts into `out_dir`.
pub fn run(command: Subcommand, config: &RunConfig, out_dir: &Path) -> Result<RunOutput> {
    config.validate()?;
    let mut w = Writer::new(out_dir)?;
    let wants_dump = config.output.wants(OutputFormat::Dump);
    let wants_csv = config.output.wants(OutputFormat::Csv);
    match command {
        Subcommand::Simulate => {
            w.operations.push("joint_amplitude_analytic");
            let a = analytic(config)?;
            if wants_dump {
                w.write("jsa.dump", &write_dump(a.field()))?;
            }
            if wants_csv {
                w.write("marginals.csv", &marginals_csv(&a)?)?;
            }
        }
        Subcommand::Oracle => {
            w.operations.push("direct_wavefunction");
            w.operations.push("joint_amplitude_analytic");
            let (windows, quad) = config.scatter_windows()?;
            let direct = direct_wavefunction(&config.pump_model()?, &config.crystal, &windows, &config.grid()?, &quad)?;
            let reference = analytic(config)?;
            let rel = direct.field().phase_aligned_distance(reference.field())?;
            let max_abs = direct
                .field()
                .data()
                .iter()
                .zip(reference.field().data())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let rows = [
                ("relative_l2", fmt_f64(rel)),
                ("max_abs_difference", fmt_f64(max_abs)),
                ("grid_points", direct.grid().len().to_string()),
                ("t_nodes", quad.t_nodes.to_string()),
                ("z_nodes", quad.z_nodes.to_string()),
                ("rho_nodes", quad.rho_nodes.to_string()),
                ("include_pm_factor", config.analysis.include_pm_factor.to_string()),
            ];
            w.write("comparison.csv", &key_value_csv(&rows))?;
            if wants_dump {
                w.write("direct.dump", &write_dump(direct.field()))?;
                w.write("analytic.dump", &write_dump(reference.field()))?;
            }
        }
        Subcommand::Schmidt => {
            w.operations.push("joint_amplitude_analytic");
            w.operations.push("schmidt_decompose");
            let s = schmidt_decompose(&analytic(config)?)?;
            let mut weights = String::from("index,weight\n");
            for (i, v) in s.weights.iter().enumerate() {
                let _ = writeln!(weights, "{i},{}", fmt_f64(*v));
            }
            w.write("schmidt.csv", &weights)?;
            let rows = [
                ("schmidt_number", fmt_f64(s.schmidt_number)),
                ("entropy_bits", fmt_f64(s.entropy)),
                ("weights", s.weights.len().to_string()),
                ("modes_for_99_percent", s.modes_for(0.99).to_string()),
            ];
            w.write("schmidt_summary.csv", &key_value_csv(&rows))?;
        }
        Subcommand::Epr => {
            w.operations.push("joint_amplitude_analytic");
            w.operations.push("sum_difference_statistics");
            let r = sum_difference_statistics(&analytic(config)?, config.analysis.epr_threshold)?;
            let (product, _) = r.require_epr()?;
            let mut rows = r.rows();
            let scale = PhysConstants::new(config.analysis.units).momentum_scale();
            if scale != 1.0 {
                rows.push(("momentum_unit_scale", fmt_f64(scale)));
                rows.push(("var_sum_p", fmt_f64(r.var_sum_q.unwrap_or(0.0) * scale * scale)));
                rows.push(("epr_product_si", fmt_f64(product * scale * scale)));
            }
            w.write("correlations.csv", &key_value_csv(&rows))?;
        }
        Subcommand::Phasematch => {
            w.operations.push("phase_matching_factor");
            w.operations.push("cone_transverse_momenta");
            let l = config.crystal.length;
            let n = config.analysis.pm_points;
            let mut curve = String::from("delta_kz_l,delta_kz,factor\n");
            for i in 0..n {
                let x = -PM_CURVE_EXTENT + 2.0 * PM_CURVE_EXTENT * i as f64 / (n - 1) as f64;
                let dk = x / l;
                let _ = writeln!(curve, "{},{},{}", fmt_f64(x), fmt_f64(dk), fmt_f64(phase_matching_factor(dk, l)));
            }
            w.write("phasematch.csv", &curve)?;

            let half = 0.5 * config.pump.omega0;
            let check = collinear_condition(half, half, &config.crystal, config.analysis.collinear_tol)?;
            let cone = cone_transverse_momenta(half, half, &config.crystal)?;
            let rows = [
                ("omega1", fmt_f64(half)),
                ("omega2", fmt_f64(half)),
                ("k1", fmt_f64(cone.k_1)),
                ("k2", fmt_f64(cone.k_2)),
                ("alpha", fmt_f64(cone.alpha)),
                ("degenerate_q", cone.degenerate_q.map(fmt_f64).unwrap_or_else(|| "none".into())),
                ("residual", fmt_f64(check.residual)),
                ("matched", check.matched.to_string()),
                ("emission", cone.emission().to_string()),
            ];
            w.write("cone.csv", &key_value_csv(&rows))?;
        }
    }
    w.finish(command, config)
}

//! Entanglement and correlation diagnostics of a two-photon amplitude.
//!
//! Moments are taken over the grid cells with the density held constant over
//! each cell, so every variance carries the in-cell term `step^2 / 12` per
//! coordinate. A state that is sharp at grid resolution therefore reports the
//! cell size as its width instead of zero.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::biphoton::{JointAmplitude, JointMode};
use crate::error::{Result, SpdcError};
use crate::field::{fourier_q_to_x, Axis, AxisLabel, ComplexField, RealField};

/// EPR flag threshold on `var(x1 - x2) * var(q1 + q2)` with hbar = 1.
pub const DEFAULT_EPR_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    /// Descending, summing to 1.
    pub weights: Vec<f64>,
    pub schmidt_number: f64,
    /// Entanglement entropy in bits.
    pub entropy: f64,
}

impl SchmidtSpectrum {
    fn from_singular_values(s: &[f64]) -> Self {
        let mut weights: Vec<f64> = s.iter().map(|v| v * v).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weights.sort_by(|a, b| b.total_cmp(a));
        let purity: f64 = weights.iter().map(|w| w * w).sum();
        let entropy = -weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.log2())
            .sum::<f64>();
        Self {
            weights,
            schmidt_number: 1.0 / purity,
            entropy: entropy.max(0.0),
        }
    }

    /// Number of weights needed to reach `fraction` of the norm.
    pub fn modes_for(&self, fraction: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if acc >= fraction {
                return i + 1;
            }
        }
        self.weights.len()
    }
}

/// Schmidt decomposition of photon 1 against photon 2.
pub fn schmidt_decompose(a: &JointAmplitude) -> Result<SchmidtSpectrum> {
    schmidt_decompose_field(a.field())
}

/// Schmidt decomposition of a field whose leading axes belong to photon 1 and
/// trailing axes to photon 2.
pub fn schmidt_decompose_field(f: &ComplexField) -> Result<SchmidtSpectrum> {
    let split = bipartition(f.axes())?;
    let rows: usize = f.axes()[..split].iter().map(Axis::len).product();
    let cols: usize = f.axes()[split..].iter().map(Axis::len).product();
    let w = f.cell_measure().sqrt();
    let data = f.data();
    let m = DMatrix::<Complex64>::from_fn(rows, cols, |r, c| data[r * cols + c] * w);
    let s = m.singular_values();
    if s.iter().all(|&v| v == 0.0) {
        return Err(SpdcError::ZeroField);
    }
    Ok(SchmidtSpectrum::from_singular_values(s.as_slice()))
}

fn bipartition(axes: &[Axis]) -> Result<usize> {
    let photons: Vec<Option<u8>> = axes.iter().map(|a| a.label().photon()).collect();
    let split = photons.iter().take_while(|p| **p == Some(1)).count();
    let valid = split > 0
        && split < axes.len()
        && photons[split..].iter().all(|p| *p == Some(2));
    if !valid {
        let labels: Vec<&str> = axes.iter().map(|a| a.label().as_str()).collect();
        return Err(SpdcError::NotTwoPartite(format!(
            "axes {labels:?} do not split into photon-1 axes followed by photon-2 axes"
        )));
    }
    Ok(split)
}

/// `|a|^2` integrated over every axis not listed in `keep`.
pub fn marginal(a: &JointAmplitude, keep: &[AxisLabel]) -> Result<RealField> {
    marginal_field(a.field(), keep)
}

pub fn marginal_field(f: &ComplexField, keep: &[AxisLabel]) -> Result<RealField> {
    let mut kept = Vec::new();
    for (i, label) in keep.iter().enumerate() {
        if keep[..i].contains(label) {
            return Err(SpdcError::AxisMismatch(format!("axis '{label}' requested twice")));
        }
        kept.push(
            f.axis_index(*label)
                .ok_or_else(|| SpdcError::AxisMismatch(format!("field has no axis '{label}'")))?,
        );
    }
    kept.sort_unstable();
    let axes: Vec<Axis> = kept.iter().map(|&d| f.axes()[d]).collect();
    let summed_measure: f64 = f
        .axes()
        .iter()
        .enumerate()
        .filter(|(d, _)| !kept.contains(d))
        .map(|(_, a)| a.step())
        .product();
    let out_len: usize = axes.iter().map(Axis::len).product();
    let mut out = vec![0.0; out_len];
    for (flat, v) in f.data().iter().enumerate() {
        let idx = f.unravel(flat);
        let mut o = 0;
        for (&d, ax) in kept.iter().zip(&axes) {
            o = o * ax.len() + idx[d];
        }
        out[o] += v.norm_sqr() * summed_measure;
    }
    RealField::new(axes, out)
}

/// Density of a combined coordinate on its lattice, integrating to 1 with `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateDistribution {
    pub values: Vec<f64>,
    pub density: Vec<f64>,
    pub step: f64,
}

impl CoordinateDistribution {
    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.density).map(|(v, p)| v * p).sum::<f64>() * self.step
    }

    /// Full width between the first zeros on either side of the peak.
    ///
    /// Each zero is placed by fitting a symmetric V to the square-root density
    /// (an amplitude modulus) through the local minimum and its neighbours.
    pub fn first_zero_width(&self) -> Result<f64> {
        let amp: Vec<f64> = self.density.iter().map(|p| p.max(0.0).sqrt()).collect();
        let n = amp.len();
        let mut peak = 0;
        for i in 0..n {
            if amp[i] > amp[peak] {
                peak = i;
            }
        }
        let zero_at = |m: usize| -> f64 {
            let (ym, y0, yp) = (amp[m - 1], amp[m], amp[m + 1]);
            let offset = if yp <= ym {
                let s = ym - y0;
                if s > 0.0 { y0 / s } else { 0.0 }
            } else {
                let s = yp - y0;
                if s > 0.0 { -y0 / s } else { 0.0 }
            };
            self.values[m] + offset * self.step
        };
        let right = (peak + 1..n - 1).find(|&m| amp[m] <= amp[m - 1] && amp[m] <= amp[m + 1]);
        let left = (1..peak).rev().find(|&m| amp[m] <= amp[m - 1] && amp[m] <= amp[m + 1]);
        match (left, right) {
            (Some(l), Some(r)) => Ok(zero_at(r) - zero_at(l)),
            _ => Err(SpdcError::InvalidInput(
                "no zero of the distribution on both sides of its peak within the grid".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    Sum,
    Difference,
}

/// Distribution of `v1 + v2` or `v1 - v2` over a 2D field with equal steps on both axes.
pub fn combined_distribution(f: &ComplexField, combo: Combination) -> Result<CoordinateDistribution> {
    if f.rank() != 2 {
        return Err(SpdcError::AxisMismatch(format!("need a rank-2 field, got rank {}", f.rank())));
    }
    let (a, b) = (f.axes()[0], f.axes()[1]);
    let step = a.step();
    if ((b.step() - step) / step).abs() > 1e-12 {
        return Err(SpdcError::AxisMismatch(format!(
            "combined coordinates need equal steps, got {} and {}",
            a.step(),
            b.step()
        )));
    }
    let (n1, n2) = (a.len(), b.len());
    let len = n1 + n2 - 1;
    let half1 = 0.5 * (n1 - 1) as f64;
    let half2 = 0.5 * (n2 - 1) as f64;
    let values: Vec<f64> = (0..len)
        .map(|k| match combo {
            Combination::Sum => a.center() + b.center() + (k as f64 - half1 - half2) * step,
            Combination::Difference => a.center() - b.center() + (k as f64 - (n2 - 1) as f64 - half1 + half2) * step,
        })
        .collect();
    let mut density = vec![0.0; len];
    let cell = a.step() * b.step();
    for i in 0..n1 {
        for j in 0..n2 {
            let k = match combo {
                Combination::Sum => i + j,
                Combination::Difference => i + (n2 - 1) - j,
            };
            density[k] += f.get(&[i, j]).norm_sqr() * cell / step;
        }
    }
    Ok(CoordinateDistribution { values, density, step })
}

/// Cell-resolved variance of `g(v1, v2)` over a rank-2 density.
fn pair_variance(p: &RealField, g: impl Fn(f64, f64) -> f64, in_cell: f64) -> f64 {
    let (a, b) = (p.axes()[0], p.axes()[1]);
    let cell = a.step() * b.step();
    let mut total = 0.0;
    let mut mean = 0.0;
    for i in 0..a.len() {
        for j in 0..b.len() {
            let w = p.get(&[i, j]) * cell;
            total += w;
            mean += w * g(a.value(i), b.value(j));
        }
    }
    mean /= total;
    let mut var = 0.0;
    for i in 0..a.len() {
        for j in 0..b.len() {
            let d = g(a.value(i), b.value(j)) - mean;
            var += p.get(&[i, j]) * cell * d * d;
        }
    }
    var / total + in_cell
}

fn pair_moments(p: &RealField) -> PairMoments {
    let (a, b) = (p.axes()[0], p.axes()[1]);
    let cell_a = a.step() * a.step() / 12.0;
    let cell_b = b.step() * b.step() / 12.0;
    PairMoments {
        var_1: pair_variance(p, |x, _| x, cell_a),
        var_2: pair_variance(p, |_, y| y, cell_b),
        var_sum: pair_variance(p, |x, y| x + y, cell_a + cell_b),
        var_diff: pair_variance(p, |x, y| x - y, cell_a + cell_b),
    }
}

struct PairMoments {
    var_1: f64,
    var_2: f64,
    var_sum: f64,
    var_diff: f64,
}

/// Variances of sum and difference coordinates plus the photon-2 distribution
/// conditioned on the most probable photon-1 bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub mode: &'static str,
    pub var_q1: Option<f64>,
    pub var_q2: Option<f64>,
    pub var_sum_q: Option<f64>,
    pub var_diff_q: Option<f64>,
    pub var_x1: Option<f64>,
    pub var_x2: Option<f64>,
    pub var_sum_x: Option<f64>,
    pub var_diff_x: Option<f64>,
    pub var_omega1: Option<f64>,
    pub var_omega2: Option<f64>,
    pub var_sum_omega: Option<f64>,
    pub var_diff_omega: Option<f64>,
    /// Photon-1 coordinate of the conditioning bin.
    pub conditioned_on: f64,
    pub conditional_peak: f64,
    pub conditional_mean: f64,
    pub conditional_std: f64,
    pub epr_product: Option<f64>,
    pub epr_flag: Option<bool>,
    pub epr_threshold: f64,
}

impl CorrelationReport {
    /// EPR product and flag, which exist only for spatial amplitudes.
    pub fn require_epr(&self) -> Result<(f64, bool)> {
        match (self.epr_product, self.epr_flag) {
            (Some(p), Some(f)) => Ok((p, f)),
            _ => Err(SpdcError::ModeMismatch(format!(
                "position statistics need a spatial amplitude, got {}",
                self.mode
            ))),
        }
    }

    /// `(key, value)` rows; absent quantities are omitted.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        let fmt = crate::dump::fmt_f64;
        let mut rows = vec![("mode", self.mode.to_string())];
        let optional = [
            ("var_q1", self.var_q1),
            ("var_q2", self.var_q2),
            ("var_sum_q", self.var_sum_q),
            ("var_diff_q", self.var_diff_q),
            ("var_x1", self.var_x1),
            ("var_x2", self.var_x2),
            ("var_sum_x", self.var_sum_x),
            ("var_diff_x", self.var_diff_x),
            ("var_omega1", self.var_omega1),
            ("var_omega2", self.var_omega2),
            ("var_sum_omega", self.var_sum_omega),
            ("var_diff_omega", self.var_diff_omega),
        ];
        rows.extend(optional.iter().filter_map(|(k, v)| v.map(|v| (*k, fmt(v)))));
        rows.push(("conditioned_on", fmt(self.conditioned_on)));
        rows.push(("conditional_peak", fmt(self.conditional_peak)));
        rows.push(("conditional_mean", fmt(self.conditional_mean)));
        rows.push(("conditional_std", fmt(self.conditional_std)));
        if let Some(p) = self.epr_product {
            rows.push(("epr_product", fmt(p)));
        }
        if let Some(f) = self.epr_flag {
            rows.push(("epr_flag", f.to_string()));
        }
        rows.push(("epr_threshold", fmt(self.epr_threshold)));
        rows
    }
}

pub fn sum_difference_statistics(a: &JointAmplitude, epr_threshold: f64) -> Result<CorrelationReport> {
    let mode = a.mode();
    if mode == JointMode::Full4D {
        return Err(SpdcError::ModeMismatch(
            "correlation statistics need a spectral or spatial amplitude".into(),
        ));
    }
    let density = a.field().modulus_sqr();
    let m = pair_moments(&density);

    // condition on the most probable photon-1 bin
    let photon1 = marginal_field(a.field(), &[a.field().axes()[0].label()])?;
    let i_peak = photon1.argmax()[0];
    let (ax1, ax2) = (density.axes()[0], density.axes()[1]);
    let row: Vec<f64> = (0..ax2.len()).map(|j| density.get(&[i_peak, j])).collect();
    let row_total: f64 = row.iter().sum();
    let mut j_peak = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[j_peak] {
            j_peak = j;
        }
    }
    let c_mean = row.iter().enumerate().map(|(j, p)| p * ax2.value(j)).sum::<f64>() / row_total;
    let c_var = row
        .iter()
        .enumerate()
        .map(|(j, p)| p * (ax2.value(j) - c_mean).powi(2))
        .sum::<f64>()
        / row_total
        + ax2.step() * ax2.step() / 12.0;

    let mut report = CorrelationReport {
        mode: mode.name(),
        var_q1: None,
        var_q2: None,
        var_sum_q: None,
        var_diff_q: None,
        var_x1: None,
        var_x2: None,
        var_sum_x: None,
        var_diff_x: None,
        var_omega1: None,
        var_omega2: None,
        var_sum_omega: None,
        var_diff_omega: None,
        conditioned_on: ax1.value(i_peak),
        conditional_peak: ax2.value(j_peak),
        conditional_mean: c_mean,
        conditional_std: c_var.sqrt(),
        epr_product: None,
        epr_flag: None,
        epr_threshold,
    };
    match mode {
        JointMode::Spectral2D => {
            report.var_omega1 = Some(m.var_1);
            report.var_omega2 = Some(m.var_2);
            report.var_sum_omega = Some(m.var_sum);
            report.var_diff_omega = Some(m.var_diff);
        }
        JointMode::Spatial2D { .. } => {
            let x = pair_moments(&position_space_pair_density(a)?);
            report.var_q1 = Some(m.var_1);
            report.var_q2 = Some(m.var_2);
            report.var_sum_q = Some(m.var_sum);
            report.var_diff_q = Some(m.var_diff);
            report.var_x1 = Some(x.var_1);
            report.var_x2 = Some(x.var_2);
            report.var_sum_x = Some(x.var_sum);
            report.var_diff_x = Some(x.var_diff);
            let product = x.var_diff * m.var_sum;
            report.epr_product = Some(product);
            report.epr_flag = Some(product < epr_threshold);
        }
        JointMode::Full4D => unreachable!(),
    }
    Ok(report)
}

/// `|psi(x1, x2)|^2` from the transverse Fourier transform of both photons.
pub fn position_space_pair_density(a: &JointAmplitude) -> Result<RealField> {
    if !matches!(a.mode(), JointMode::Spatial2D { .. }) {
        return Err(SpdcError::ModeMismatch(format!(
            "position-space density needs a spatial amplitude, got {}",
            a.mode()
        )));
    }
    let x = fourier_q_to_x(&fourier_q_to_x(a.field(), 0)?, 1)?;
    Ok(x.modulus_sqr())
}

/// Cell-resolved standard deviation of `x1 - x2` over a position density.
pub fn difference_width(density: &RealField) -> Result<f64> {
    if density.axes().len() != 2 {
        return Err(SpdcError::AxisMismatch("need a rank-2 density".into()));
    }
    Ok(pair_moments(density).var_diff.sqrt())
}

/// `exp(-(q1+q2)^2 / (4 s+^2) - (q1-q2)^2 / (4 s-^2))`, normalized, at degenerate frequencies `omega`.
///
/// `var(q1 + q2) = s+^2` and `var(x1 - x2) = 1 / s-^2` in the continuum; the
/// Schmidt number is `(r + 1/r) / 2` with `r = s+ / s-`.
pub fn double_gaussian_amplitude(
    q1: Axis,
    q2: Axis,
    sigma_plus: f64,
    sigma_minus: f64,
    omega: f64,
) -> Result<JointAmplitude> {
    if !(sigma_plus > 0.0 && sigma_minus > 0.0) {
        return Err(SpdcError::InvalidInput("double-Gaussian widths must be > 0".into()));
    }
    let f = ComplexField::from_fn(vec![q1, q2], |c| {
        let s = c[0] + c[1];
        let d = c[0] - c[1];
        Complex64::new(
            (-s * s / (4.0 * sigma_plus * sigma_plus) - d * d / (4.0 * sigma_minus * sigma_minus)).exp(),
            0.0,
        )
    })?;
    JointAmplitude::from_field(JointMode::Spatial2D { omega1: omega, omega2: omega }, f)
}

//! Uniform axes, complex sample fields and the change of representation
//! between transverse wavevector and transverse position.
//!
//! A field stores its samples row-major over the product of its axes. The
//! discrete measure of a sample is the product of the axis steps, so the L2
//! norm of a field is `sum |v|^2 * prod(step)`, the Riemann sum of the
//! continuous norm.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, SpdcError};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// How momenta are reported. Dynamics always use wavevectors in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentumUnits {
    /// hbar = 1: momenta reported as wavevectors, rad/m.
    #[default]
    Natural,
    /// Momenta reported in kg m/s.
    Si,
}

impl fmt::Display for MomentumUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentumUnits::Natural => f.write_str("natural"),
            MomentumUnits::Si => f.write_str("si"),
        }
    }
}

impl FromStr for MomentumUnits {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "natural" => Ok(MomentumUnits::Natural),
            "si" | "SI" => Ok(MomentumUnits::Si),
            other => Err(format!("unknown unit system '{other}' (expected natural or si)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub c: f64,
    pub units: MomentumUnits,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            units: MomentumUnits::Natural,
        }
    }
}

impl PhysConstants {
    pub fn new(units: MomentumUnits) -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            units,
        }
    }

    /// Scale factor from a wavevector (rad/m) to the reported momentum unit.
    pub fn momentum_scale(&self) -> f64 {
        match self.units {
            MomentumUnits::Natural => 1.0,
            MomentumUnits::Si => HBAR,
        }
    }
}

/// Axis labels. Photon 1 is the signal, photon 2 the idler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisLabel {
    Q1,
    Q2,
    W1,
    W2,
    X1,
    X2,
    Z,
    T,
}

impl AxisLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisLabel::Q1 => "q1",
            AxisLabel::Q2 => "q2",
            AxisLabel::W1 => "w1",
            AxisLabel::W2 => "w2",
            AxisLabel::X1 => "x1",
            AxisLabel::X2 => "x2",
            AxisLabel::Z => "z",
            AxisLabel::T => "t",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            AxisLabel::Q1 | AxisLabel::Q2 => "rad/m",
            AxisLabel::W1 | AxisLabel::W2 => "rad/s",
            AxisLabel::X1 | AxisLabel::X2 | AxisLabel::Z => "m",
            AxisLabel::T => "s",
        }
    }

    /// Photon index (1 or 2) the axis belongs to, if any.
    pub fn photon(self) -> Option<u8> {
        match self {
            AxisLabel::Q1 | AxisLabel::W1 | AxisLabel::X1 => Some(1),
            AxisLabel::Q2 | AxisLabel::W2 | AxisLabel::X2 => Some(2),
            AxisLabel::Z | AxisLabel::T => None,
        }
    }

    pub fn is_wavevector(self) -> bool {
        matches!(self, AxisLabel::Q1 | AxisLabel::Q2)
    }

    pub fn is_position(self) -> bool {
        matches!(self, AxisLabel::X1 | AxisLabel::X2)
    }

    /// Fourier-conjugate label (q <-> x).
    pub fn conjugate(self) -> Option<AxisLabel> {
        match self {
            AxisLabel::Q1 => Some(AxisLabel::X1),
            AxisLabel::Q2 => Some(AxisLabel::X2),
            AxisLabel::X1 => Some(AxisLabel::Q1),
            AxisLabel::X2 => Some(AxisLabel::Q2),
            _ => None,
        }
    }
}

impl fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisLabel {
    type Err = SpdcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "q1" => AxisLabel::Q1,
            "q2" => AxisLabel::Q2,
            "w1" => AxisLabel::W1,
            "w2" => AxisLabel::W2,
            "x1" => AxisLabel::X1,
            "x2" => AxisLabel::X2,
            "z" => AxisLabel::Z,
            "t" => AxisLabel::T,
            other => return Err(SpdcError::AxisMismatch(format!("unknown axis label '{other}'"))),
        })
    }
}

/// Uniformly spaced axis: `value(i) = center + (i - (n - 1) / 2) * step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    label: AxisLabel,
    n: usize,
    center: f64,
    step: f64,
}

impl Axis {
    pub fn new(label: AxisLabel, n: usize, center: f64, step: f64) -> Result<Self> {
        if n < 2 {
            return Err(SpdcError::InvalidInput(format!(
                "axis {label} needs at least 2 points, got {n}"
            )));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(SpdcError::InvalidInput(format!(
                "axis {label} step must be positive and finite, got {step}"
            )));
        }
        if !center.is_finite() {
            return Err(SpdcError::InvalidInput(format!("axis {label} center is not finite")));
        }
        Ok(Self {
            label,
            n,
            center,
            step,
        })
    }

    /// Axis whose first and last points are `span` apart.
    pub fn from_span(label: AxisLabel, n: usize, center: f64, span: f64) -> Result<Self> {
        if n < 2 {
            return Err(SpdcError::InvalidInput(format!(
                "axis {label} needs at least 2 points, got {n}"
            )));
        }
        Self::new(label, n, center, span / (n - 1) as f64)
    }

    pub fn label(&self) -> AxisLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn unit(&self) -> &'static str {
        self.label.unit()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.center + (i as f64 - 0.5 * (self.n - 1) as f64) * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }

    pub fn min(&self) -> f64 {
        self.value(0)
    }

    pub fn max(&self) -> f64 {
        self.value(self.n - 1)
    }

    /// Same label and length, with centre and step equal to 1e-9 of the step.
    pub fn matches(&self, other: &Axis) -> bool {
        let tol = 1e-9 * self.step;
        self.label == other.label
            && self.n == other.n
            && (self.step - other.step).abs() <= tol
            && (self.center - other.center).abs() <= tol * self.n as f64
    }

    pub fn with_label(mut self, label: AxisLabel) -> Self {
        self.label = label;
        self
    }
}

fn product_len(axes: &[Axis]) -> usize {
    axes.iter().map(Axis::len).product()
}

fn measure(axes: &[Axis]) -> f64 {
    axes.iter().map(Axis::step).product()
}

/// Complex samples over a product of 1, 2 or 4 axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    axes: Vec<Axis>,
    data: Vec<Complex64>,
    normalized: bool,
}

impl ComplexField {
    pub fn new(axes: Vec<Axis>, data: Vec<Complex64>) -> Result<Self> {
        if !matches!(axes.len(), 1 | 2 | 4) {
            return Err(SpdcError::AxisMismatch(format!(
                "field rank must be 1, 2 or 4, got {}",
                axes.len()
            )));
        }
        let expected = product_len(&axes);
        if data.len() != expected {
            return Err(SpdcError::AxisMismatch(format!(
                "data length {} does not match axis product {expected}",
                data.len()
            )));
        }
        Ok(Self {
            axes,
            data,
            normalized: false,
        })
    }

    /// Builds a field by evaluating `f` at every grid point (coordinates in axis order).
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let n = product_len(&axes);
        let mut coords = vec![0.0; axes.len()];
        let mut data = Vec::with_capacity(n);
        for flat in 0..n {
            let mut rem = flat;
            for (d, ax) in axes.iter().enumerate().rev() {
                coords[d] = ax.value(rem % ax.len());
                rem /= ax.len();
            }
            data.push(f(&coords));
        }
        Self::new(axes, data)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Product of axis steps: the measure of one sample.
    pub fn cell_measure(&self) -> f64 {
        measure(&self.axes)
    }

    /// Discrete L2 norm squared, `sum |v|^2 * prod(step)`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_measure()
    }

    pub fn axis_index(&self, label: AxisLabel) -> Option<usize> {
        self.axes.iter().position(|a| a.label() == label)
    }

    /// Index tuple of a flat row-major offset.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (d, ax) in self.axes.iter().enumerate().rev() {
            idx[d] = flat % ax.len();
            flat /= ax.len();
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        let mut flat = 0;
        for (ax, &i) in self.axes.iter().zip(idx) {
            flat = flat * ax.len() + i;
        }
        self.data[flat]
    }

    /// Multiplies every sample by `s`. The normalized flag survives only for unit-modulus `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            axes: self.axes.clone(),
            data: self.data.iter().map(|v| v * s).collect(),
            normalized: self.normalized && (s.norm() - 1.0).abs() < 1e-15,
        }
    }

    /// Scales the field to unit discrete L2 norm with a positive real factor.
    pub fn l2_normalize(&self) -> Result<Self> {
        let sum: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        if sum == 0.0 || !sum.is_finite() {
            return Err(SpdcError::ZeroField);
        }
        let norm = (sum * self.cell_measure()).sqrt();
        let s = 1.0 / norm;
        Ok(Self {
            axes: self.axes.clone(),
            data: self.data.iter().map(|v| v * s).collect(),
            normalized: true,
        })
    }

    /// Sets the normalized flag from the actual norm (within 1e-9).
    pub fn with_normalized_flag(mut self) -> Self {
        self.normalized = (self.norm_sqr() - 1.0).abs() <= 1e-9;
        self
    }

    /// Takes ownership of the samples of `other` on the same axes; used by the
    /// transforms to keep the normalized flag of the input.
    fn replace(&self, axes: Vec<Axis>, data: Vec<Complex64>) -> Self {
        Self {
            axes,
            data,
            normalized: self.normalized,
        }
    }

    /// `|v|^2` at every sample.
    pub fn modulus_sqr(&self) -> RealField {
        RealField {
            axes: self.axes.clone(),
            data: self.data.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    /// Relative L2 distance `||self - other|| / ||other||` on matching axes.
    pub fn relative_l2_distance(&self, other: &ComplexField) -> Result<f64> {
        if self.axes.len() != other.axes.len() || !self.axes.iter().zip(&other.axes).all(|(a, b)| a.matches(b)) {
            return Err(SpdcError::AxisMismatch("fields live on different grids".into()));
        }
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let base: f64 = other.data.iter().map(|v| v.norm_sqr()).sum();
        if base == 0.0 {
            return Err(SpdcError::ZeroField);
        }
        Ok((diff / base).sqrt())
    }
}

impl ComplexField {
    /// [`Self::relative_l2_distance`] after rotating `self` by the global phase that best matches `other`.
    pub fn phase_aligned_distance(&self, other: &ComplexField) -> Result<f64> {
        let overlap: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.scaled(phase).relative_l2_distance(other)
    }
}

/// Real samples (probability densities) over a product of 0..=4 axes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    axes: Vec<Axis>,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(axes: Vec<Axis>, data: Vec<f64>) -> Result<Self> {
        if data.len() != product_len(&axes) {
            return Err(SpdcError::AxisMismatch(format!(
                "data length {} does not match axis product {}",
                data.len(),
                product_len(&axes)
            )));
        }
        Ok(Self { axes, data })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn cell_measure(&self) -> f64 {
        measure(&self.axes)
    }

    /// Measure-weighted integral of the density.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.cell_measure()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (ax, &i) in self.axes.iter().zip(idx) {
            flat = flat * ax.len() + i;
        }
        self.data[flat]
    }

    /// Index tuple of the largest sample (first one on ties).
    pub fn argmax(&self) -> Vec<usize> {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        let mut idx = vec![0; self.axes.len()];
        let mut flat = best;
        for (d, ax) in self.axes.iter().enumerate().rev() {
            idx[d] = flat % ax.len();
            flat /= ax.len();
        }
        idx
    }
}

/// Branch used for the longitudinal wavevector component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KzBranch {
    Exact,
    Paraxial,
}

/// Longitudinal wavevector of a plane-wave mode with transverse part `q` and wavenumber `k`.
pub fn mode_kz(q: f64, k: f64, branch: KzBranch) -> Result<f64> {
    match branch {
        KzBranch::Exact => {
            if q.abs() >= k {
                return Err(SpdcError::EvanescentMode { q: q.abs(), k });
            }
            Ok(((k - q) * (k + q)).sqrt())
        }
        KzBranch::Paraxial => Ok(k - q * q / (2.0 * k)),
    }
}

/// `exp(i 2 pi m / d)` for integer `m`, reduced exactly before the float conversion.
fn root_of_unity(m: i64, d: i64) -> Complex64 {
    let r = m.rem_euclid(d);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
}

fn for_each_line(
    shape: &[usize],
    axis: usize,
    data: &mut [Complex64],
    mut f: impl FnMut(&mut [Complex64]),
) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for k in 0..n {
                line[k] = data[base + k * inner];
            }
            f(&mut line);
            for k in 0..n {
                data[base + k * inner] = line[k];
            }
        }
    }
}

/// Transverse position representation along one wavevector axis:
/// `psi(x_j) = (2 pi)^(-1/2) sum_k phi(q_k) exp(i q_k x_j) dq`.
///
/// The output axis is the conjugate grid, centred at 0 with step `2 pi / (n dq)`.
/// The `(2 pi)^(-1/2)` factor makes the map unitary for the discrete measure.
pub fn fourier_q_to_x(f: &ComplexField, axis: usize) -> Result<ComplexField> {
    let ax = *f
        .axes()
        .get(axis)
        .ok_or_else(|| SpdcError::AxisMismatch(format!("no axis {axis} in rank-{} field", f.rank())))?;
    if !ax.label().is_wavevector() {
        return Err(SpdcError::AxisMismatch(format!(
            "axis '{}' is not a transverse-wavevector axis",
            ax.label()
        )));
    }
    let n = ax.len();
    let ni = n as i64;
    let dq = ax.step();
    let dx = 2.0 * PI / (n as f64 * dq);
    let x_axis = Axis::new(ax.label().conjugate().unwrap(), n, 0.0, dx)?;
    let qc = ax.center();
    let scale = dq / (2.0 * PI).sqrt();

    let pre: Vec<Complex64> = (0..ni).map(|k| root_of_unity(-(ni - 1) * k, 2 * ni)).collect();
    let post: Vec<Complex64> = (0..ni)
        .map(|j| {
            root_of_unity((ni - 1) * (ni - 1 - 2 * j), 4 * ni)
                * Complex64::from_polar(scale, qc * x_axis.value(j as usize))
        })
        .collect();

    let fft = FftPlanner::new().plan_fft_inverse(n);
    let shape = f.shape();
    let mut data = f.data().to_vec();
    for_each_line(&shape, axis, &mut data, |line| {
        for (v, p) in line.iter_mut().zip(&pre) {
            *v *= p;
        }
        fft.process(line);
        for (v, p) in line.iter_mut().zip(&post) {
            *v *= p;
        }
    });
    let mut axes = f.axes().to_vec();
    axes[axis] = x_axis;
    Ok(f.replace(axes, data))
}

/// Inverse of [`fourier_q_to_x`]: `phi(q_k) = (2 pi)^(-1/2) sum_j psi(x_j) exp(-i q_k x_j) dx`.
///
/// `q_center` restores the centre of the wavevector axis, which the position grid does not carry.
pub fn fourier_x_to_q(f: &ComplexField, axis: usize, q_center: f64) -> Result<ComplexField> {
    let ax = *f
        .axes()
        .get(axis)
        .ok_or_else(|| SpdcError::AxisMismatch(format!("no axis {axis} in rank-{} field", f.rank())))?;
    if !ax.label().is_position() {
        return Err(SpdcError::AxisMismatch(format!(
            "axis '{}' is not a transverse-position axis",
            ax.label()
        )));
    }
    let n = ax.len();
    let ni = n as i64;
    let dx = ax.step();
    let dq = 2.0 * PI / (n as f64 * dx);
    let q_axis = Axis::new(ax.label().conjugate().unwrap(), n, q_center, dq)?;
    let scale = dx / (2.0 * PI).sqrt();

    let pre: Vec<Complex64> = (0..ni)
        .map(|j| {
            root_of_unity((ni - 1) * j, 2 * ni)
                * Complex64::from_polar(1.0, -q_center * ax.value(j as usize))
        })
        .collect();
    let post: Vec<Complex64> = (0..ni)
        .map(|k| root_of_unity(-(ni - 1) * (ni - 1 - 2 * k), 4 * ni) * scale)
        .collect();

    let fft = FftPlanner::new().plan_fft_forward(n);
    let shape = f.shape();
    let mut data = f.data().to_vec();
    for_each_line(&shape, axis, &mut data, |line| {
        for (v, p) in line.iter_mut().zip(&pre) {
            *v *= p;
        }
        fft.process(line);
        for (v, p) in line.iter_mut().zip(&post) {
            *v *= p;
        }
    });
    let mut axes = f.axes().to_vec();
    axes[axis] = q_axis;
    Ok(f.replace(axes, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q_axis(n: usize, center: f64, step: f64) -> Axis {
        Axis::new(AxisLabel::Q1, n, center, step).unwrap()
    }

    /// Direct O(n^2) evaluation of the forward transform.
    fn naive_q_to_x(ax: &Axis, phi: &[Complex64]) -> Vec<Complex64> {
        let n = ax.len();
        let dx = 2.0 * PI / (n as f64 * ax.step());
        let x = Axis::new(AxisLabel::X1, n, 0.0, dx).unwrap();
        (0..n)
            .map(|j| {
                let xj = x.value(j);
                phi.iter()
                    .enumerate()
                    .map(|(k, p)| p * Complex64::from_polar(1.0, ax.value(k) * xj))
                    .sum::<Complex64>()
                    * ax.step()
                    / (2.0 * PI).sqrt()
            })
            .collect()
    }

    #[test]
    fn axis_values_are_centred_and_uniform() {
        let ax = Axis::new(AxisLabel::W1, 5, 10.0, 0.5).unwrap();
        assert_eq!(ax.values(), vec![9.0, 9.5, 10.0, 10.5, 11.0]);
        let even = Axis::new(AxisLabel::Q1, 4, 0.0, 1.0).unwrap();
        assert_eq!(even.values(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert!(Axis::new(AxisLabel::Q1, 1, 0.0, 1.0).is_err());
        assert!(Axis::new(AxisLabel::Q1, 4, 0.0, 0.0).is_err());
        let spanned = Axis::from_span(AxisLabel::Q2, 11, 0.0, 10.0).unwrap();
        assert_eq!(spanned.step(), 1.0);
        assert_eq!(spanned.max(), 5.0);
    }

    #[test]
    fn zero_field_cannot_be_normalized() {
        let f = ComplexField::new(vec![q_axis(4, 0.0, 1.0)], vec![Complex64::new(0.0, 0.0); 4]).unwrap();
        assert_eq!(f.l2_normalize(), Err(SpdcError::ZeroField));
    }

    #[test]
    fn normalization_is_scale_invariant() {
        let ax = q_axis(8, 0.0, 0.25);
        let f = ComplexField::from_fn(vec![ax, ax.with_label(AxisLabel::Q2)], |c| {
            Complex64::new(c[0] + 0.3, c[1] * c[0] - 1.0)
        })
        .unwrap();
        let a = f.l2_normalize().unwrap();
        let b = f.scaled(Complex64::new(7.0, 0.0)).l2_normalize().unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(a.is_normalized());
    }

    #[test]
    fn rank_and_length_are_checked() {
        let ax = q_axis(3, 0.0, 1.0);
        assert!(ComplexField::new(vec![ax], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(ComplexField::new(vec![ax, ax, ax], vec![Complex64::new(1.0, 0.0); 27]).is_err());
    }

    #[test]
    fn kz_on_axis_and_at_the_light_cone() {
        assert_eq!(mode_kz(0.0, 1e7, KzBranch::Exact).unwrap(), 1e7);
        assert_eq!(mode_kz(0.0, 1e7, KzBranch::Paraxial).unwrap(), 1e7);
        assert!(matches!(
            mode_kz(1e7, 1e7, KzBranch::Exact),
            Err(SpdcError::EvanescentMode { .. })
        ));
        let exact = mode_kz(1e5, 1e7, KzBranch::Exact).unwrap();
        let parax = mode_kz(1e5, 1e7, KzBranch::Paraxial).unwrap();
        assert!(((exact - parax) / exact).abs() < 1e-3);
    }

    #[test]
    fn paraxial_error_is_fourth_order() {
        let k = 1e7;
        for i in 1..=100 {
            let q = k * 0.1 * i as f64 / 100.0;
            let exact = mode_kz(q, k, KzBranch::Exact).unwrap();
            let parax = mode_kz(q, k, KzBranch::Paraxial).unwrap();
            let rel = ((exact - parax) / exact).abs();
            assert!(rel <= (q / k).powi(4), "q/k = {}: {rel}", q / k);
        }
    }

    #[test]
    fn delta_transforms_to_constant_modulus() {
        let ax = q_axis(16, 0.0, 1e3);
        let mut data = vec![Complex64::new(0.0, 0.0); 16];
        data[5] = Complex64::new(1.0, 0.0);
        let f = ComplexField::new(vec![ax], data).unwrap();
        let x = fourier_q_to_x(&f, 0).unwrap();
        assert_eq!(x.axes()[0].label(), AxisLabel::X1);
        let m0 = x.data()[0].norm();
        for v in x.data() {
            assert!((v.norm() - m0).abs() < 1e-12 * m0);
        }
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        for &(n, qc) in &[(7usize, 0.0), (8, 2.5e3), (13, -1.0e4)] {
            let ax = q_axis(n, qc, 1.7e3);
            let f = ComplexField::from_fn(vec![ax], |c| {
                Complex64::new((c[0] * 1e-4).cos(), (c[0] * 3e-4).sin() + 0.2)
            })
            .unwrap();
            let fast = fourier_q_to_x(&f, 0).unwrap();
            let slow = naive_q_to_x(&ax, f.data());
            for (a, b) in fast.data().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn gaussian_pair_is_minimum_uncertainty() {
        let sigma_q = 2.0e4;
        let n = 256;
        let ax = q_axis(n, 0.0, 12.0 * sigma_q / n as f64);
        let f = ComplexField::from_fn(vec![ax], |c| {
            Complex64::new((-c[0] * c[0] / (4.0 * sigma_q * sigma_q)).exp(), 0.0)
        })
        .unwrap();
        let std = |field: &ComplexField| {
            let ax = field.axes()[0];
            let p: Vec<f64> = field.data().iter().map(|v| v.norm_sqr()).collect();
            let total: f64 = p.iter().sum();
            let mean: f64 = p.iter().enumerate().map(|(i, w)| w * ax.value(i)).sum::<f64>() / total;
            (p.iter()
                .enumerate()
                .map(|(i, w)| w * (ax.value(i) - mean).powi(2))
                .sum::<f64>()
                / total)
                .sqrt()
        };
        let x = fourier_q_to_x(&f, 0).unwrap();
        let product = std(&f) * std(&x);
        assert!((product - 0.5).abs() < 0.01, "sigma_x sigma_q = {product}");
    }

    #[test]
    fn transform_acts_along_requested_axis() {
        let a = q_axis(6, 0.0, 1.0);
        let b = Axis::new(AxisLabel::W1, 3, 5.0, 1.0).unwrap();
        let f = ComplexField::from_fn(vec![b, a], |c| Complex64::new(c[0] + c[1], c[1] * c[1])).unwrap();
        let x = fourier_q_to_x(&f, 1).unwrap();
        assert_eq!(x.axes()[1].label(), AxisLabel::X1);
        assert!(matches!(fourier_q_to_x(&f, 0), Err(SpdcError::AxisMismatch(_))));
        let row: Vec<Complex64> = (0..6).map(|k| f.get(&[1, k])).collect();
        let expect = naive_q_to_x(&a, &row);
        for (k, e) in expect.iter().enumerate() {
            assert!((x.get(&[1, k]) - e).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(
            n in 2usize..40,
            qc in -5.0e4f64..5.0e4,
            step in 1.0e2f64..1.0e4,
            seed in proptest::collection::vec(-1.0f64..1.0, 80),
        ) {
            let ax = q_axis(n, qc, step);
            let data: Vec<Complex64> = (0..n).map(|i| Complex64::new(seed[2 * i], seed[2 * i + 1])).collect();
            let f = ComplexField::new(vec![ax], data).unwrap();
            prop_assume!(f.norm_sqr() > 0.0);
            let x = fourier_q_to_x(&f, 0).unwrap();
            prop_assert!(((x.norm_sqr() - f.norm_sqr()) / f.norm_sqr()).abs() < 1e-9);
            let back = fourier_x_to_q(&x, 0, qc).unwrap();
            prop_assert_eq!(back.axes()[0].label(), AxisLabel::Q1);
            prop_assert!((back.axes()[0].step() - step).abs() < 1e-9 * step);
            prop_assert!(back.relative_l2_distance(&f).unwrap() < 1e-10);
        }

        #[test]
        fn normalization_is_idempotent(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let ax = q_axis(4, 0.0, 0.3);
            let axes = vec![ax, ax.with_label(AxisLabel::Q2)];
            let data: Vec<Complex64> = (0..16).map(|i| Complex64::new(seed[2 * i], seed[2 * i + 1])).collect();
            let f = ComplexField::new(axes, data).unwrap();
            prop_assume!(f.norm_sqr() > 1e-6);
            let once = f.l2_normalize().unwrap();
            let twice = once.l2_normalize().unwrap();
            for (a, b) in once.data().iter().zip(twice.data()) {
                prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            }
            prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

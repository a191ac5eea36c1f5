//! Two-photon amplitude on a grid of signal/idler modes.
//!
//! Three routes are provided:
//!
//! * [`direct_wavefunction`] sums pair-creation amplitudes over creation time,
//!   depth and transverse position inside the crystal, with the pump amplitude
//!   synthesized from its spectrum. Nothing about energy or momentum
//!   conservation is assumed; it emerges from the interference of the sum.
//! * [`joint_amplitude_analytic`] evaluates the pump spectrum at the summed
//!   photon coordinates, optionally times the crystal-length sinc.
//! * [`finite_window_joint_amplitude`] gives the closed-form kernels a plane-wave
//!   pump produces when creation is confined to a finite time window and a
//!   finite transverse window.
//!
//! Only one transverse coordinate (x) is kept. Amplitudes on a mode grid are
//! mode coefficients: the free propagation phase `exp(i k.r - i w t)` to the
//! observation plane is common to all creation events of a mode and is
//! factored out.

use std::fmt;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpdcError};
use crate::field::{mode_kz, Axis, AxisLabel, ComplexField, KzBranch, SPEED_OF_LIGHT};
use crate::phasematch::{
    is_paraxial, longitudinal_mismatch, phase_matching_factor, sinc, wavenumber, CrystalConfig, IndexModel,
};
use crate::pump::{PumpModel, PumpQuadrature, SpectralBin, MAX_PHASE_STEP};

/// A plane-wave mode given by its transverse wavevector and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePoint {
    pub q: [f64; 2],
    pub omega: f64,
    pub k: f64,
    pub kz: f64,
    /// Quadrature weight of the mode in a mode sum.
    pub weight: f64,
}

impl ModePoint {
    pub fn new(q: [f64; 2], omega: f64, index: &IndexModel, branch: KzBranch) -> Result<Self> {
        let k = wavenumber(omega, index)?;
        let q_abs = q[0].hypot(q[1]);
        let kz = mode_kz(q_abs, k, branch)?;
        Ok(Self {
            q,
            omega,
            k,
            kz,
            weight: 1.0,
        })
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// Phase `k.(r - r_src) - w (t - t_src)` accumulated from the creation event.
    pub fn propagation_phase(&self, r: [f64; 3], r_src: [f64; 3], t: f64, t_src: f64) -> f64 {
        self.q[0] * (r[0] - r_src[0]) + self.q[1] * (r[1] - r_src[1]) + self.kz * (r[2] - r_src[2])
            - self.omega * (t - t_src)
    }
}

/// Amplitude for a pair created at `(r_src, t_src)` and detected at `(r1, t)`, `(r2, t)`:
/// the pump amplitude times the weighted plane-wave sums of each photon.
#[allow(clippy::too_many_arguments)]
pub fn point_scatter_amplitude(
    psi_pump: Complex64,
    r_src: [f64; 3],
    t_src: f64,
    modes1: &[ModePoint],
    modes2: &[ModePoint],
    r1: [f64; 3],
    r2: [f64; 3],
    t: f64,
) -> Complex64 {
    let sum = |modes: &[ModePoint], r: [f64; 3]| -> Complex64 {
        modes
            .iter()
            .map(|m| Complex64::from_polar(m.weight, m.propagation_phase(r, r_src, t, t_src)))
            .sum()
    };
    psi_pump * sum(modes1, r1) * sum(modes2, r2)
}

/// Which photon coordinates the grid resolves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointMode {
    /// Axes (w1, w2) with q1 = q2 = 0.
    Spectral2D,
    /// Axes (q1, q2) at fixed frequencies.
    Spatial2D { omega1: f64, omega2: f64 },
    /// Axes (q1, w1, q2, w2).
    Full4D,
}

impl JointMode {
    pub fn name(&self) -> &'static str {
        match self {
            JointMode::Spectral2D => "spectral",
            JointMode::Spatial2D { .. } => "spatial",
            JointMode::Full4D => "full4d",
        }
    }

    fn labels(&self) -> &'static [AxisLabel] {
        match self {
            JointMode::Spectral2D => &[AxisLabel::W1, AxisLabel::W2],
            JointMode::Spatial2D { .. } => &[AxisLabel::Q1, AxisLabel::Q2],
            JointMode::Full4D => &[AxisLabel::Q1, AxisLabel::W1, AxisLabel::Q2, AxisLabel::W2],
        }
    }
}

impl fmt::Display for JointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Signal and idler coordinates of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCoords {
    pub q1: f64,
    pub omega1: f64,
    pub q2: f64,
    pub omega2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    mode: JointMode,
    axes: Vec<Axis>,
}

impl JointGrid {
    pub fn new(mode: JointMode, axes: Vec<Axis>) -> Result<Self> {
        let labels: Vec<AxisLabel> = axes.iter().map(Axis::label).collect();
        if labels != mode.labels() {
            return Err(SpdcError::AxisMismatch(format!(
                "{mode} grid needs axes {:?}, got {:?}",
                mode.labels().iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                labels.iter().map(|l| l.as_str()).collect::<Vec<_>>()
            )));
        }
        if let JointMode::Spatial2D { omega1, omega2 } = mode {
            if !(omega1 > 0.0 && omega2 > 0.0) {
                return Err(SpdcError::InvalidInput("spatial grid frequencies must be > 0".into()));
            }
        }
        for ax in &axes {
            if matches!(ax.label(), AxisLabel::W1 | AxisLabel::W2) && !(ax.min() > 0.0) {
                return Err(SpdcError::InvalidInput(format!(
                    "frequency axis {} reaches {} rad/s; must stay > 0",
                    ax.label(),
                    ax.min()
                )));
            }
        }
        Ok(Self { mode, axes })
    }

    pub fn spectral(w1: Axis, w2: Axis) -> Result<Self> {
        Self::new(JointMode::Spectral2D, vec![w1, w2])
    }

    /// Spatial grid at the degenerate frequencies `omega_pump / 2`.
    pub fn spatial_degenerate(q1: Axis, q2: Axis, omega_pump: f64) -> Result<Self> {
        Self::new(
            JointMode::Spatial2D {
                omega1: 0.5 * omega_pump,
                omega2: 0.5 * omega_pump,
            },
            vec![q1, q2],
        )
    }

    pub fn full(q1: Axis, w1: Axis, q2: Axis, w2: Axis) -> Result<Self> {
        Self::new(JointMode::Full4D, vec![q1, w1, q2, w2])
    }

    pub fn mode(&self) -> JointMode {
        self.mode
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn axis(&self, label: AxisLabel) -> Option<&Axis> {
        self.axes.iter().find(|a| a.label() == label)
    }

    pub fn point(&self, mut flat: usize) -> PairCoords {
        let mut idx = [0usize; 4];
        for (d, ax) in self.axes.iter().enumerate().rev() {
            idx[d] = flat % ax.len();
            flat /= ax.len();
        }
        let v = |d: usize| self.axes[d].value(idx[d]);
        match self.mode {
            JointMode::Spectral2D => PairCoords {
                q1: 0.0,
                omega1: v(0),
                q2: 0.0,
                omega2: v(1),
            },
            JointMode::Spatial2D { omega1, omega2 } => PairCoords {
                q1: v(0),
                omega1,
                q2: v(1),
                omega2,
            },
            JointMode::Full4D => PairCoords {
                q1: v(0),
                omega1: v(1),
                q2: v(2),
                omega2: v(3),
            },
        }
    }

    fn points(&self) -> Vec<PairCoords> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Bin standing in for the plane-wave pump delta on this grid's summed coordinates.
    fn pump_bin(&self, omega0: f64) -> SpectralBin {
        let min_step = |a: AxisLabel, b: AxisLabel| match (self.axis(a), self.axis(b)) {
            (Some(x), Some(y)) => Some(x.step().min(y.step())),
            _ => None,
        };
        SpectralBin {
            dq: min_step(AxisLabel::Q1, AxisLabel::Q2).unwrap_or(1.0),
            domega: min_step(AxisLabel::W1, AxisLabel::W2).unwrap_or(1e-9 * omega0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Direct,
    FiniteWindow,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Direct => "direct",
            Provenance::FiniteWindow => "finite_window",
            Provenance::External => "external",
        })
    }
}

/// Creation windows of the direct sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMeta {
    pub time_window: Option<f64>,
    pub half_width: Option<f64>,
    pub length: Option<f64>,
}

/// Normalized two-photon amplitude on a [`JointGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude {
    grid: JointGrid,
    field: ComplexField,
    provenance: Provenance,
    windows: Option<WindowMeta>,
}

impl JointAmplitude {
    /// Wraps and normalizes an arbitrary field whose axes conform to `mode`.
    pub fn from_field(mode: JointMode, field: ComplexField) -> Result<Self> {
        let grid = JointGrid::new(mode, field.axes().to_vec())?;
        Ok(Self {
            grid,
            field: field.l2_normalize()?,
            provenance: Provenance::External,
            windows: None,
        })
    }

    fn build(grid: JointGrid, data: Vec<Complex64>, provenance: Provenance, windows: Option<WindowMeta>) -> Result<Self> {
        let field = ComplexField::new(grid.axes().to_vec(), data)?.l2_normalize()?;
        Ok(Self {
            grid,
            field,
            provenance,
            windows,
        })
    }

    pub fn grid(&self) -> &JointGrid {
        &self.grid
    }

    pub fn mode(&self) -> JointMode {
        self.grid.mode
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn windows(&self) -> Option<WindowMeta> {
        self.windows
    }

    /// Axis positions of photon 1 followed by photon 2.
    pub fn photon_axes(&self) -> (Vec<usize>, Vec<usize>) {
        match self.grid.mode {
            JointMode::Full4D => (vec![0, 1], vec![2, 3]),
            _ => (vec![0], vec![1]),
        }
    }

    /// Same state with the photon labels exchanged: `a'(p1, p2) = a(p2, p1)`.
    pub fn swap_photons(&self) -> Result<Self> {
        let axes = self.field.axes();
        let (rows, cols): (usize, usize) = match self.grid.mode {
            JointMode::Full4D => (axes[0].len() * axes[1].len(), axes[2].len() * axes[3].len()),
            _ => (axes[0].len(), axes[1].len()),
        };
        let relabel = |a: &Axis| {
            let l = match a.label() {
                AxisLabel::Q1 => AxisLabel::Q2,
                AxisLabel::Q2 => AxisLabel::Q1,
                AxisLabel::W1 => AxisLabel::W2,
                AxisLabel::W2 => AxisLabel::W1,
                other => other,
            };
            a.with_label(l)
        };
        let new_axes: Vec<Axis> = match self.grid.mode {
            JointMode::Full4D => vec![relabel(&axes[2]), relabel(&axes[3]), relabel(&axes[0]), relabel(&axes[1])],
            _ => vec![relabel(&axes[1]), relabel(&axes[0])],
        };
        let data = self.field.data();
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for r in 0..rows {
            for c in 0..cols {
                out[c * rows + r] = data[r * cols + c];
            }
        }
        let mode = match self.grid.mode {
            JointMode::Spatial2D { omega1, omega2 } => JointMode::Spatial2D {
                omega1: omega2,
                omega2: omega1,
            },
            m => m,
        };
        let grid = JointGrid::new(mode, new_axes)?;
        let field = ComplexField::new(grid.axes().to_vec(), out)?.with_normalized_flag();
        Ok(Self {
            grid,
            field,
            provenance: self.provenance,
            windows: self.windows,
        })
    }
}

/// Distance and time of the observation plane, measured from the crystal centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub distance: f64,
    pub time: f64,
}

/// Creation-event integration domain: `t' in [-T/2, T/2]`, `x' in [-W, W]`, `z' in [-L/2, L/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterWindows {
    pub time_window: f64,
    pub half_width: f64,
    pub observation: Observation,
}

impl ScatterWindows {
    /// Windows with the observation plane 1 m away, observed one window after light arrives.
    pub fn new(time_window: f64, half_width: f64) -> Result<Self> {
        if !(time_window > 0.0 && time_window.is_finite()) {
            return Err(SpdcError::Validation("windows.T must be > 0".into()));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(SpdcError::Validation("windows.W must be > 0".into()));
        }
        let distance = 1.0;
        Ok(Self {
            time_window,
            half_width,
            observation: Observation {
                distance,
                time: 4.0 * distance / SPEED_OF_LIGHT + time_window,
            },
        })
    }

    pub fn with_observation(mut self, observation: Observation) -> Self {
        self.observation = observation;
        self
    }

    /// Requires the last creation event to precede the observation by more than the travel time.
    fn check_causal(&self, max_index: f64) -> Result<()> {
        let travel = self.observation.distance * max_index / SPEED_OF_LIGHT;
        if !(self.observation.time - travel > 0.5 * self.time_window) {
            return Err(SpdcError::Validation(format!(
                "observation time {:e} s must exceed travel time {travel:e} s plus T/2 = {:e} s",
                self.observation.time,
                0.5 * self.time_window
            )));
        }
        Ok(())
    }
}

/// Node counts of the midpoint sums over t', z' and x'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectQuadrature {
    pub t_nodes: usize,
    pub z_nodes: usize,
    pub rho_nodes: usize,
    pub pump: PumpQuadrature,
}

impl DirectQuadrature {
    /// All node counts multiplied by `factor`, including the pump synthesis grid.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t_nodes: self.t_nodes * factor,
            z_nodes: self.z_nodes * factor,
            rho_nodes: self.rho_nodes * factor,
            pump: PumpQuadrature {
                q_points: self.pump.q_points * factor,
                omega_points: self.pump.omega_points * factor,
                ..self.pump
            },
        }
    }
}

/// Midpoint nodes over `[lo, hi]` and their common weight.
fn midpoint_nodes(lo: f64, hi: f64, n: usize) -> (Vec<f64>, f64) {
    let h = (hi - lo) / n as f64;
    ((0..n).map(|i| lo + (i as f64 + 0.5) * h).collect(), h)
}

/// Per-point mode data shared by the direct and analytic routes.
struct PairModes {
    coords: PairCoords,
    k1: f64,
    k2: f64,
    kz_sum: f64,
}

fn pair_modes(grid: &JointGrid, crystal: &CrystalConfig) -> Result<Vec<PairModes>> {
    grid.points()
        .into_par_iter()
        .map(|c| {
            let m1 = ModePoint::new([c.q1, 0.0], c.omega1, &crystal.index_signal, KzBranch::Paraxial)?;
            let m2 = ModePoint::new([c.q2, 0.0], c.omega2, &crystal.index_idler, KzBranch::Paraxial)?;
            Ok(PairModes {
                coords: c,
                k1: m1.k,
                k2: m2.k,
                kz_sum: m1.kz + m2.kz,
            })
        })
        .collect()
}

fn warn_if_not_paraxial(modes: &[PairModes]) {
    let worst = modes
        .iter()
        .map(|m| (m.coords.q1.abs() / m.k1).max(m.coords.q2.abs() / m.k2))
        .fold(0.0f64, f64::max);
    if !modes
        .iter()
        .all(|m| is_paraxial(m.coords.q1, m.k1) && is_paraxial(m.coords.q2, m.k2))
    {
        warn!("grid reaches |q|/k = {worst:.3}, beyond the paraxial limit 0.2");
    }
}

fn guard(along: &str, max_rate: f64, step: f64, nodes: usize) -> Result<()> {
    if nodes < 2 {
        return Ok(());
    }
    let advance = max_rate * step;
    if advance > MAX_PHASE_STEP {
        return Err(SpdcError::GridTooCoarse {
            along: along.into(),
            advance,
        });
    }
    Ok(())
}

/// Coherent sum of pair-creation amplitudes over the crystal and the time window.
///
/// For each grid mode pair the result is the midpoint sum over creation
/// events `(x', z', t')` of the pump amplitude times `exp(-i k1.r' + i w1 t')`
/// `exp(-i k2.r' + i w2 t')`, which is [`point_scatter_amplitude`] with one
/// mode per photon evaluated at the crystal centre at `t = 0`.
pub fn direct_wavefunction(
    pump: &PumpModel,
    crystal: &CrystalConfig,
    windows: &ScatterWindows,
    grid: &JointGrid,
    quad: &DirectQuadrature,
) -> Result<JointAmplitude> {
    if quad.t_nodes == 0 || quad.z_nodes == 0 || quad.rho_nodes == 0 {
        return Err(SpdcError::InvalidInput("direct quadrature needs at least one node per axis".into()));
    }
    let modes = pair_modes(grid, crystal)?;
    let max_index = modes
        .iter()
        .map(|m| (m.k1 / m.coords.omega1).max(m.k2 / m.coords.omega2) * SPEED_OF_LIGHT)
        .fold(1.0f64, f64::max);
    windows.check_causal(max_index)?;
    warn_if_not_paraxial(&modes);

    let t_win = windows.time_window;
    let w_half = windows.half_width;
    let l = crystal.length;
    let (t_nodes, dt) = midpoint_nodes(-0.5 * t_win, 0.5 * t_win, quad.t_nodes);
    let (z_nodes, dz) = midpoint_nodes(-0.5 * l, 0.5 * l, quad.z_nodes);
    let (rho_nodes, drho) = midpoint_nodes(-w_half, w_half, quad.rho_nodes);

    // aliasing guards: largest mismatch between pump support and mode sums, per node step
    let (w_lo, w_hi) = pump.omega_support();
    let (q_lo, q_hi) = pump.q_support();
    let mut kzp = Vec::new();
    for &w in &[w_lo, pump.omega0(), w_hi] {
        let k = wavenumber(w, pump.index())?;
        for &q in &[q_lo, 0.0, q_hi] {
            kzp.push(mode_kz(q, k, KzBranch::Paraxial)?);
        }
    }
    let mut rate_t = 0.0f64;
    let mut rate_rho = 0.0f64;
    let mut rate_z = 0.0f64;
    for m in &modes {
        let big_omega = m.coords.omega1 + m.coords.omega2;
        let big_q = m.coords.q1 + m.coords.q2;
        rate_t = rate_t.max((w_lo - big_omega).abs()).max((w_hi - big_omega).abs());
        rate_rho = rate_rho.max((q_lo - big_q).abs()).max((q_hi - big_q).abs());
        for &kp in &kzp {
            rate_z = rate_z.max((kp - m.kz_sum).abs());
        }
    }
    guard("t'", rate_t, dt, quad.t_nodes)?;
    guard("z'", rate_z, dz, quad.z_nodes)?;
    guard("x'", rate_rho, drho, quad.rho_nodes)?;

    let table = pump.position_table(&quad.pump, &rho_nodes, &z_nodes, &t_nodes)?;
    let (n_z, n_t) = (z_nodes.len(), t_nodes.len());
    let weight = dt * dz * drho;

    let data: Vec<Complex64> = modes
        .par_iter()
        .map(|m| {
            let big_omega = m.coords.omega1 + m.coords.omega2;
            let big_q = m.coords.q1 + m.coords.q2;
            let et: Vec<Complex64> = t_nodes.iter().map(|&t| Complex64::from_polar(1.0, big_omega * t)).collect();
            let ez: Vec<Complex64> = z_nodes.iter().map(|&z| Complex64::from_polar(1.0, -m.kz_sum * z)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &rho) in rho_nodes.iter().enumerate() {
                let er = Complex64::from_polar(1.0, -big_q * rho);
                let mut over_z = Complex64::new(0.0, 0.0);
                for (b, ezb) in ez.iter().enumerate() {
                    let row = &table[(a * n_z + b) * n_t..(a * n_z + b + 1) * n_t];
                    let over_t: Complex64 = row.iter().zip(&et).map(|(p, e)| p * e).sum();
                    over_z += ezb * over_t;
                }
                acc += er * over_z;
            }
            acc * weight
        })
        .collect();

    JointAmplitude::build(
        grid.clone(),
        data,
        Provenance::Direct,
        Some(WindowMeta {
            time_window: Some(t_win),
            half_width: Some(w_half),
            length: Some(l),
        }),
    )
}

/// Pump spectrum at the summed photon coordinates, times `L sinc(dk_z L / 2)` when
/// `include_pm_factor` is set.
pub fn joint_amplitude_analytic(
    pump: &PumpModel,
    crystal: &CrystalConfig,
    grid: &JointGrid,
    include_pm_factor: bool,
) -> Result<JointAmplitude> {
    let modes = pair_modes(grid, crystal)?;
    warn_if_not_paraxial(&modes);
    let bin = grid.pump_bin(pump.omega0());
    let data = modes
        .par_iter()
        .map(|m| {
            let c = m.coords;
            let amp = pump.spectral_amplitude(&[c.q1 + c.q2], c.omega1 + c.omega2, &bin);
            if !include_pm_factor || amp == 0.0 {
                return Ok(Complex64::new(amp, 0.0));
            }
            let dk = longitudinal_mismatch(c.q1 + c.q2, c.q1, c.q2, c.omega1, c.omega2, crystal)?;
            Ok(Complex64::new(amp * phase_matching_factor(dk, crystal.length), 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    JointAmplitude::build(
        grid.clone(),
        data,
        Provenance::Analytic,
        Some(WindowMeta {
            time_window: None,
            half_width: None,
            length: include_pm_factor.then_some(crystal.length),
        }),
    )
}

/// Closed-form window kernels for a plane-wave pump:
/// `sinc((w_p - w1 - w2) T / 2) * sinc((q_p - q1 - q2) W)`.
pub fn finite_window_joint_amplitude(
    pump: &PumpModel,
    windows: &ScatterWindows,
    grid: &JointGrid,
) -> Result<JointAmplitude> {
    if !pump.is_plane_wave() {
        return Err(SpdcError::InvalidInput(
            "finite-window kernels are defined for a plane-wave pump".into(),
        ));
    }
    let omega0 = pump.omega0();
    let t_win = windows.time_window;
    let w_half = windows.half_width;
    let data: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let c = grid.point(i);
            let temporal = sinc(0.5 * (omega0 - c.omega1 - c.omega2) * t_win);
            let transverse = sinc((0.0 - c.q1 - c.q2) * w_half);
            Complex64::new(temporal * transverse, 0.0)
        })
        .collect();
    JointAmplitude::build(
        grid.clone(),
        data,
        Provenance::FiniteWindow,
        Some(WindowMeta {
            time_window: Some(t_win),
            half_width: Some(w_half),
            length: None,
        }),
    )
}

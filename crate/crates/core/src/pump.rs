//! Pump photon: spectral amplitude over (transverse wavevector, frequency)
//! and the position-space amplitude it synthesizes inside the crystal.
//!
//! Only one transverse coordinate is carried in position space. A Gaussian
//! beam is separable in x and y, so the y factor is a constant in every
//! quantity computed here.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpdcError};
use crate::field::{mode_kz, KzBranch};
use crate::phasematch::{wavenumber, IndexModel};

/// Largest phase advance of an integrand per quadrature step.
pub const MAX_PHASE_STEP: f64 = PI / 4.0;

/// Pump bandwidth beyond which the quasi-monochromatic treatment is flagged.
pub const MAX_RELATIVE_BANDWIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpKind {
    PlaneWave { omega0: f64 },
    /// `sigma_omega` is the standard deviation of `|phi|^2` in frequency;
    /// `waist` is the 1/e^2 intensity radius.
    Gaussian { omega0: f64, sigma_omega: f64, waist: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpModel {
    kind: PumpKind,
    index: IndexModel,
    k0: f64,
}

/// Half-open bin `[-d/2, d/2)` around the plane-wave pump's (q = 0, omega0)
/// that stands in for the delta function on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBin {
    pub dq: f64,
    pub domega: f64,
}

impl SpectralBin {
    fn contains(offset: f64, width: f64) -> bool {
        offset >= -0.5 * width && offset < 0.5 * width
    }
}

/// Uniform (q_p, omega_p) grid for synthesizing the position-space amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpQuadrature {
    pub q_points: usize,
    pub omega_points: usize,
    pub q_half_span: f64,
    pub omega_half_span: f64,
}

impl PumpQuadrature {
    fn q_values(&self) -> Vec<f64> {
        centred(self.q_points, self.q_half_span)
    }

    fn q_step(&self) -> f64 {
        2.0 * self.q_half_span / (self.q_points - 1) as f64
    }

    fn omega_step(&self) -> f64 {
        2.0 * self.omega_half_span / (self.omega_points - 1) as f64
    }
}

fn centred(n: usize, half_span: f64) -> Vec<f64> {
    let step = 2.0 * half_span / (n - 1) as f64;
    (0..n).map(|i| (i as f64 - 0.5 * (n - 1) as f64) * step).collect()
}

impl PumpModel {
    pub fn new(kind: PumpKind, index: IndexModel) -> Result<Self> {
        let omega0 = match kind {
            PumpKind::PlaneWave { omega0 } => omega0,
            PumpKind::Gaussian { omega0, .. } => omega0,
        };
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(SpdcError::Validation("pump.omega0 must be > 0".into()));
        }
        let k0 = wavenumber(omega0, &index)?;
        if let PumpKind::Gaussian {
            sigma_omega, waist, ..
        } = kind
        {
            if !(sigma_omega > 0.0 && sigma_omega.is_finite()) {
                return Err(SpdcError::Validation("pump.sigma_omega must be > 0".into()));
            }
            if !(waist > 0.0 && waist.is_finite()) {
                return Err(SpdcError::Validation("pump.waist must be > 0".into()));
            }
            if 2.0 / waist > 0.1 * k0 {
                return Err(SpdcError::Validation(format!(
                    "pump.waist {waist:e} m is not paraxial: 2/w0 = {:e} exceeds 0.1 k_p = {:e}",
                    2.0 / waist,
                    0.1 * k0
                )));
            }
            if sigma_omega > MAX_RELATIVE_BANDWIDTH * omega0 {
                warn!(
                    "pump bandwidth sigma_omega/omega0 = {:.3} exceeds {MAX_RELATIVE_BANDWIDTH}; \
                     the quasi-monochromatic position representation is outside its validity regime",
                    sigma_omega / omega0
                );
            }
        }
        Ok(Self { kind, index, k0 })
    }

    pub fn kind(&self) -> PumpKind {
        self.kind
    }

    pub fn index(&self) -> &IndexModel {
        &self.index
    }

    pub fn omega0(&self) -> f64 {
        match self.kind {
            PumpKind::PlaneWave { omega0 } | PumpKind::Gaussian { omega0, .. } => omega0,
        }
    }

    /// Pump wavenumber at the central frequency.
    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn is_plane_wave(&self) -> bool {
        matches!(self.kind, PumpKind::PlaneWave { .. })
    }

    /// Frequency range holding the spectral amplitude (+-5 sigma for a Gaussian).
    pub fn omega_support(&self) -> (f64, f64) {
        match self.kind {
            PumpKind::PlaneWave { omega0 } => (omega0, omega0),
            PumpKind::Gaussian {
                omega0, sigma_omega, ..
            } => (omega0 - 5.0 * sigma_omega, omega0 + 5.0 * sigma_omega),
        }
    }

    /// Transverse-wavevector range holding the spectral amplitude (+-5/w0 for a Gaussian).
    pub fn q_support(&self) -> (f64, f64) {
        match self.kind {
            PumpKind::PlaneWave { .. } => (0.0, 0.0),
            PumpKind::Gaussian { waist, .. } => (-5.0 / waist, 5.0 / waist),
        }
    }

    /// Unnormalized spectral amplitude at transverse wavevector `q` (one or two
    /// components) and frequency `omega`.
    pub fn spectral_amplitude(&self, q: &[f64], omega: f64, bin: &SpectralBin) -> f64 {
        match self.kind {
            PumpKind::PlaneWave { omega0 } => {
                let on_axis = q.iter().all(|&qi| SpectralBin::contains(qi, bin.dq));
                if on_axis && SpectralBin::contains(omega - omega0, bin.domega) {
                    1.0
                } else {
                    0.0
                }
            }
            PumpKind::Gaussian {
                omega0,
                sigma_omega,
                waist,
            } => {
                let q2: f64 = q.iter().map(|v| v * v).sum();
                let dw = omega - omega0;
                (-q2 * waist * waist / 4.0 - dw * dw / (4.0 * sigma_omega * sigma_omega)).exp()
            }
        }
    }

    fn gaussian_q(&self, q: f64) -> f64 {
        match self.kind {
            PumpKind::Gaussian { waist, .. } => (-q * q * waist * waist / 4.0).exp(),
            PumpKind::PlaneWave { .. } => 1.0,
        }
    }

    fn gaussian_omega(&self, omega: f64) -> f64 {
        match self.kind {
            PumpKind::Gaussian {
                omega0, sigma_omega, ..
            } => {
                let dw = omega - omega0;
                (-dw * dw / (4.0 * sigma_omega * sigma_omega)).exp()
            }
            PumpKind::PlaneWave { .. } => 1.0,
        }
    }

    /// +-5 sigma coverage with `points` samples per axis (at least 64).
    pub fn default_quadrature(&self, points: usize) -> PumpQuadrature {
        let points = points.max(64);
        let (q_half_span, omega_half_span) = match self.kind {
            PumpKind::PlaneWave { .. } => (0.0, 0.0),
            PumpKind::Gaussian {
                sigma_omega, waist, ..
            } => (5.0 / waist, 5.0 * sigma_omega),
        };
        PumpQuadrature {
            q_points: points,
            omega_points: points,
            q_half_span,
            omega_half_span,
        }
    }

    fn quadrature_frequencies(&self, quad: &PumpQuadrature) -> Result<(Vec<f64>, Vec<f64>)> {
        if quad.q_points < 2 || quad.omega_points < 2 || !(quad.q_half_span > 0.0) || !(quad.omega_half_span > 0.0) {
            return Err(SpdcError::InvalidInput(
                "pump quadrature needs >= 2 points and a positive span on each axis".into(),
            ));
        }
        let omegas: Vec<f64> = centred(quad.omega_points, quad.omega_half_span)
            .into_iter()
            .map(|d| self.omega0() + d)
            .collect();
        let ks = omegas
            .iter()
            .map(|&w| wavenumber(w, &self.index))
            .collect::<Result<Vec<_>>>()?;
        Ok((omegas, ks))
    }

    /// Largest phase advance per (q, omega) grid step of the synthesis integrand at one point.
    fn phase_advance(
        qs: &[f64],
        omegas: &[f64],
        ks: &[f64],
        rho: f64,
        z: f64,
        t: f64,
    ) -> (f64, f64) {
        let phase = |i: usize, j: usize| qs[i] * rho + (ks[j] - qs[i] * qs[i] / (2.0 * ks[j])) * z - omegas[j] * t;
        let (mut along_q, mut along_w) = (0.0f64, 0.0f64);
        for j in 0..omegas.len() {
            for i in 0..qs.len() {
                if i + 1 < qs.len() {
                    along_q = along_q.max((phase(i + 1, j) - phase(i, j)).abs());
                }
                if j + 1 < omegas.len() {
                    along_w = along_w.max((phase(i, j + 1) - phase(i, j)).abs());
                }
            }
        }
        (along_q, along_w)
    }

    fn check_guard(qs: &[f64], omegas: &[f64], ks: &[f64], rho: f64, z: f64, t: f64) -> Result<()> {
        let (along_q, along_w) = Self::phase_advance(qs, omegas, ks, rho, z, t);
        if along_q > MAX_PHASE_STEP {
            return Err(SpdcError::GridTooCoarse {
                along: "pump q_p".into(),
                advance: along_q,
            });
        }
        if along_w > MAX_PHASE_STEP {
            return Err(SpdcError::GridTooCoarse {
                along: "pump omega_p".into(),
                advance: along_w,
            });
        }
        Ok(())
    }

    /// Position-space amplitude at transverse position `rho`, depth `z`, time `t`:
    /// the Riemann sum of `phi_p(q, w) exp(i q rho + i kz(q, w) z - i w t) dq dw`
    /// with the paraxial `kz`. A plane wave returns `exp(i k_p z - i omega0 t)`.
    pub fn position_amplitude(&self, rho: f64, z: f64, t: f64, quad: &PumpQuadrature) -> Result<Complex64> {
        if let PumpKind::PlaneWave { omega0 } = self.kind {
            return Ok(Complex64::from_polar(1.0, self.k0 * z - omega0 * t));
        }
        let qs = quad.q_values();
        let (omegas, ks) = self.quadrature_frequencies(quad)?;
        Self::check_guard(&qs, &omegas, &ks, rho, z, t)?;
        let weight = quad.q_step() * quad.omega_step();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &w) in omegas.iter().enumerate() {
            let hw = self.gaussian_omega(w);
            for &q in &qs {
                let kz = mode_kz(q, ks[j], KzBranch::Paraxial)?;
                acc += Complex64::from_polar(self.gaussian_q(q) * hw, q * rho + kz * z - w * t);
            }
        }
        Ok(acc * weight)
    }

    /// Position amplitude on the product of node lists, laid out `[rho][z][t]`.
    ///
    /// Equal to calling [`Self::position_amplitude`] at every node; the double
    /// sum is factorized so the cost is linear in each node count.
    pub fn position_table(&self, quad: &PumpQuadrature, rho: &[f64], z: &[f64], t: &[f64]) -> Result<Vec<Complex64>> {
        let (n_rho, n_z, n_t) = (rho.len(), z.len(), t.len());
        if let PumpKind::PlaneWave { omega0 } = self.kind {
            let mut out = Vec::with_capacity(n_rho * n_z * n_t);
            for _ in rho {
                for &zb in z {
                    for &tc in t {
                        out.push(Complex64::from_polar(1.0, self.k0 * zb - omega0 * tc));
                    }
                }
            }
            return Ok(out);
        }
        let qs = quad.q_values();
        let (omegas, ks) = self.quadrature_frequencies(quad)?;
        // the phase advance is affine in (rho, z, t), so the extreme nodes bound it
        for &r in &[rho[0], rho[n_rho - 1]] {
            for &zb in &[z[0], z[n_z - 1]] {
                for &tc in &[t[0], t[n_t - 1]] {
                    Self::check_guard(&qs, &omegas, &ks, r, zb, tc)?;
                }
            }
        }
        let weight = quad.q_step() * quad.omega_step();
        let gq: Vec<f64> = qs.iter().map(|&q| self.gaussian_q(q)).collect();
        let transverse: Vec<Complex64> = qs
            .iter()
            .flat_map(|&q| rho.iter().map(move |&r| Complex64::from_polar(1.0, q * r)))
            .collect();

        let slabs: Vec<Vec<Complex64>> = z
            .par_iter()
            .map(|&zb| {
                let mut slab = vec![Complex64::new(0.0, 0.0); n_rho * n_t];
                let mut beam = vec![Complex64::new(0.0, 0.0); n_rho];
                for (j, &w) in omegas.iter().enumerate() {
                    let k = ks[j];
                    beam.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
                    for (i, &q) in qs.iter().enumerate() {
                        let c = Complex64::from_polar(gq[i], -q * q * zb / (2.0 * k));
                        let row = &transverse[i * n_rho..(i + 1) * n_rho];
                        for (b, e) in beam.iter_mut().zip(row) {
                            *b += c * e;
                        }
                    }
                    let carrier = self.gaussian_omega(w) * weight;
                    let temporal: Vec<Complex64> =
                        t.iter().map(|&tc| Complex64::from_polar(carrier, k * zb - w * tc)).collect();
                    for (a, b) in beam.iter().enumerate() {
                        let row = &mut slab[a * n_t..(a + 1) * n_t];
                        for (s, e) in row.iter_mut().zip(&temporal) {
                            *s += b * e;
                        }
                    }
                }
                slab
            })
            .collect();

        let mut out = vec![Complex64::new(0.0, 0.0); n_rho * n_z * n_t];
        for (b, slab) in slabs.iter().enumerate() {
            for a in 0..n_rho {
                let dst = (a * n_z + b) * n_t;
                out[dst..dst + n_t].copy_from_slice(&slab[a * n_t..(a + 1) * n_t]);
            }
        }
        Ok(out)
    }
}

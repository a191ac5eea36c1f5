//! Refractive-index models, wavenumbers and the longitudinal phase-matching
//! integral over the crystal length.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SpdcError};
use crate::field::SPEED_OF_LIGHT;

/// Closest allowed distance (um^2) between lambda^2 and a Sellmeier pole.
pub const POLE_GUARD_UM2: f64 = 1e-6;

/// Default tolerance on the collinear index residual.
pub const DEFAULT_COLLINEAR_TOL: f64 = 1e-4;

/// One Sellmeier term `B lambda^2 / (lambda^2 - C)` with C in um^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellmeierTerm {
    pub b: f64,
    pub c_um2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexModel {
    Constant(f64),
    Sellmeier {
        terms: Vec<SellmeierTerm>,
        /// Validity range in um.
        lambda_min_um: f64,
        lambda_max_um: f64,
    },
}

/// Vacuum wavelength in um of angular frequency `omega` (rad/s).
pub fn wavelength_um(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e6
}

impl IndexModel {
    pub fn constant(n: f64) -> Result<Self> {
        if !(n >= 1.0 && n.is_finite()) {
            return Err(SpdcError::InvalidInput(format!("constant index must be >= 1, got {n}")));
        }
        Ok(IndexModel::Constant(n))
    }

    /// Sellmeier model; `n^2` must stay positive at both ends of the validity range.
    pub fn sellmeier(terms: Vec<SellmeierTerm>, lambda_min_um: f64, lambda_max_um: f64) -> Result<Self> {
        if !(lambda_min_um > 0.0 && lambda_max_um > lambda_min_um && lambda_max_um.is_finite()) {
            return Err(SpdcError::InvalidInput(format!(
                "Sellmeier validity range [{lambda_min_um}, {lambda_max_um}] um is invalid"
            )));
        }
        if terms.iter().any(|t| !t.b.is_finite() || !t.c_um2.is_finite()) {
            return Err(SpdcError::InvalidInput("Sellmeier coefficients must be finite".into()));
        }
        let model = IndexModel::Sellmeier {
            terms,
            lambda_min_um,
            lambda_max_um,
        };
        for lambda in [lambda_min_um, lambda_max_um] {
            let n2 = model.n_squared_at(lambda)?;
            if !(n2 > 0.0) {
                return Err(SpdcError::InvalidInput(format!(
                    "Sellmeier n^2 = {n2} is not positive at {lambda} um"
                )));
            }
        }
        Ok(model)
    }

    fn n_squared_at(&self, lambda_um: f64) -> Result<f64> {
        match self {
            IndexModel::Constant(n) => Ok(n * n),
            IndexModel::Sellmeier { terms, .. } => {
                let l2 = lambda_um * lambda_um;
                let mut n2 = 1.0;
                for t in terms {
                    let denom = l2 - t.c_um2;
                    if denom.abs() < POLE_GUARD_UM2 {
                        return Err(SpdcError::PoleProximity {
                            wavelength_um: lambda_um,
                            pole_um2: t.c_um2,
                        });
                    }
                    n2 += t.b * l2 / denom;
                }
                Ok(n2)
            }
        }
    }

    /// Refractive index at angular frequency `omega` (rad/s).
    pub fn refractive_index(&self, omega: f64) -> Result<f64> {
        match self {
            IndexModel::Constant(n) => Ok(*n),
            IndexModel::Sellmeier {
                lambda_min_um,
                lambda_max_um,
                ..
            } => {
                let lambda = wavelength_um(omega);
                if !(lambda >= *lambda_min_um && lambda <= *lambda_max_um) {
                    return Err(SpdcError::OutOfValidityRange {
                        wavelength_um: lambda,
                        min_um: *lambda_min_um,
                        max_um: *lambda_max_um,
                    });
                }
                let n2 = self.n_squared_at(lambda)?;
                if !(n2 > 0.0) {
                    return Err(SpdcError::InvalidInput(format!("Sellmeier n^2 = {n2} at {lambda} um")));
                }
                Ok(n2.sqrt())
            }
        }
    }
}

impl fmt::Display for IndexModel {
    /// `constant <n>` or `sellmeier <B>:<C> ... range <min>:<max>`; floats with 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexModel::Constant(n) => write!(f, "constant {n:.16e}"),
            IndexModel::Sellmeier {
                terms,
                lambda_min_um,
                lambda_max_um,
            } => {
                f.write_str("sellmeier")?;
                for t in terms {
                    write!(f, " {:.16e}:{:.16e}", t.b, t.c_um2)?;
                }
                write!(f, " range {lambda_min_um:.16e}:{lambda_max_um:.16e}")
            }
        }
    }
}

fn parse_pair(tok: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = tok
        .split_once(':')
        .ok_or_else(|| format!("expected '<a>:<b>', found '{tok}'"))?;
    let a = a.parse::<f64>().map_err(|_| format!("bad number '{a}'"))?;
    let b = b.parse::<f64>().map_err(|_| format!("bad number '{b}'"))?;
    Ok((a, b))
}

impl FromStr for IndexModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            ["constant", n] => {
                let n = n.parse::<f64>().map_err(|_| format!("bad index '{n}'"))?;
                IndexModel::constant(n).map_err(|e| e.to_string())
            }
            ["sellmeier", rest @ ..] => {
                let range_at = rest
                    .iter()
                    .position(|t| *t == "range")
                    .ok_or("sellmeier model needs 'range <min>:<max>' in um")?;
                if range_at + 2 != rest.len() {
                    return Err("'range <min>:<max>' must close the sellmeier model".into());
                }
                let terms = rest[..range_at]
                    .iter()
                    .map(|t| parse_pair(t).map(|(b, c_um2)| SellmeierTerm { b, c_um2 }))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let (lo, hi) = parse_pair(rest[range_at + 1])?;
                IndexModel::sellmeier(terms, lo, hi).map_err(|e| e.to_string())
            }
            _ => Err(format!("unknown index model '{s}' (expected 'constant <n>' or 'sellmeier ...')")),
        }
    }
}

/// Polarization arrangement; only selects which index models differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdcType {
    I,
    II,
}

impl fmt::Display for PdcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdcType::I => f.write_str("I"),
            PdcType::II => f.write_str("II"),
        }
    }
}

impl FromStr for PdcType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "I" | "1" => Ok(PdcType::I),
            "II" | "2" => Ok(PdcType::II),
            other => Err(format!("unknown pdc_type '{other}' (expected I or II)")),
        }
    }
}

/// Crystal of length `length` along z with transversally unbounded extent.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    pub length: f64,
    pub index_pump: IndexModel,
    pub index_signal: IndexModel,
    pub index_idler: IndexModel,
    pub pdc_type: PdcType,
}

impl CrystalConfig {
    pub fn new(
        length: f64,
        index_pump: IndexModel,
        index_signal: IndexModel,
        index_idler: IndexModel,
        pdc_type: PdcType,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(SpdcError::Validation("crystal.L must be > 0".into()));
        }
        Ok(Self {
            length,
            index_pump,
            index_signal,
            index_idler,
            pdc_type,
        })
    }

    /// Same models with the signal and idler swapped.
    pub fn with_photons_swapped(&self) -> Self {
        Self {
            index_signal: self.index_idler.clone(),
            index_idler: self.index_signal.clone(),
            ..self.clone()
        }
    }
}

/// `k = omega n(omega) / c`.
pub fn wavenumber(omega: f64, model: &IndexModel) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(SpdcError::InvalidInput(format!("angular frequency must be > 0, got {omega}")));
    }
    Ok(omega * model.refractive_index(omega)? / SPEED_OF_LIGHT)
}

/// Paraxial longitudinal mismatch of the z' integrand,
/// `(k_p - k_1 - k_2) - (q_p^2/k_p - q_1^2/k_1 - q_2^2/k_2) / 2` with `omega_p = omega_1 + omega_2`.
pub fn longitudinal_mismatch(
    q_p: f64,
    q_1: f64,
    q_2: f64,
    omega_1: f64,
    omega_2: f64,
    crystal: &CrystalConfig,
) -> Result<f64> {
    let k_p = wavenumber(omega_1 + omega_2, &crystal.index_pump)?;
    let k_1 = wavenumber(omega_1, &crystal.index_signal)?;
    let k_2 = wavenumber(omega_2, &crystal.index_idler)?;
    Ok(mismatch_from_wavenumbers(q_p, q_1, q_2, k_p, k_1, k_2))
}

/// Same combination with the wavenumbers already evaluated.
pub fn mismatch_from_wavenumbers(q_p: f64, q_1: f64, q_2: f64, k_p: f64, k_1: f64, k_2: f64) -> f64 {
    (k_p - k_1 - k_2) - 0.5 * (q_p * q_p / k_p - q_1 * q_1 / k_1 - q_2 * q_2 / k_2)
}

/// Whether `|q| <= 0.2 k` holds, the paraxial validity limit used for warnings.
pub fn is_paraxial(q: f64, k: f64) -> bool {
    q.abs() <= 0.2 * k
}

/// `sin(x) / x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Closed form of the z' integral over `[-L/2, L/2]`: `L sinc(dk L / 2)`.
pub fn phase_matching_factor(delta_kz: f64, length: f64) -> f64 {
    length * sinc(0.5 * delta_kz * length)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearCheck {
    pub matched: bool,
    /// `n_p(omega_1 + omega_2) - (n_1(omega_1) + n_2(omega_2)) / 2`
    pub residual: f64,
}

pub fn collinear_condition(omega_1: f64, omega_2: f64, crystal: &CrystalConfig, tol: f64) -> Result<CollinearCheck> {
    if !(omega_1 > 0.0 && omega_2 > 0.0) {
        return Err(SpdcError::InvalidInput("angular frequencies must be > 0".into()));
    }
    let n_p = crystal.index_pump.refractive_index(omega_1 + omega_2)?;
    let n_1 = crystal.index_signal.refractive_index(omega_1)?;
    let n_2 = crystal.index_idler.refractive_index(omega_2)?;
    let residual = n_p - 0.5 * (n_1 + n_2);
    Ok(CollinearCheck {
        matched: residual.abs() <= tol,
        residual,
    })
}

/// Emission geometry for a pump close to the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeLocus {
    /// `alpha = k_1 + k_2 - k_p`, rad/m.
    pub alpha: f64,
    pub k_1: f64,
    pub k_2: f64,
    /// Symmetric solution `q = sqrt(k alpha)`; only for `alpha >= 0` and equal signal/idler wavenumbers.
    pub degenerate_q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emission {
    Collinear,
    Cone,
    /// `alpha < 0`: no real transverse solution.
    None,
}

impl fmt::Display for Emission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Emission::Collinear => "collinear",
            Emission::Cone => "cone",
            Emission::None => "none",
        })
    }
}

impl ConeLocus {
    /// `alpha` within `1e-12 (k_1 + k_2)` of zero counts as collinear.
    pub fn emission(&self) -> Emission {
        if self.alpha.abs() <= DEGENERATE_K_RTOL * (self.k_1 + self.k_2) {
            Emission::Collinear
        } else if self.alpha > 0.0 {
            Emission::Cone
        } else {
            Emission::None
        }
    }
}

/// Relative tolerance for treating the signal and idler wavenumbers as equal.
const DEGENERATE_K_RTOL: f64 = 1e-12;

pub fn cone_from_wavenumbers(k_p: f64, k_1: f64, k_2: f64) -> ConeLocus {
    let alpha = k_1 + k_2 - k_p;
    let equal = (k_1 - k_2).abs() <= DEGENERATE_K_RTOL * k_1.max(k_2);
    let degenerate_q = if alpha >= 0.0 && equal {
        Some((0.5 * (k_1 + k_2) * alpha).sqrt())
    } else {
        None
    };
    ConeLocus {
        alpha,
        k_1,
        k_2,
        degenerate_q,
    }
}

/// Transverse momenta satisfying `q_1^2/k_1 + q_2^2/k_2 = 2 alpha` with the pump's `q_p^2/k_p` neglected.
pub fn cone_transverse_momenta(omega_1: f64, omega_2: f64, crystal: &CrystalConfig) -> Result<ConeLocus> {
    let k_p = wavenumber(omega_1 + omega_2, &crystal.index_pump)?;
    let k_1 = wavenumber(omega_1, &crystal.index_signal)?;
    let k_2 = wavenumber(omega_2, &crystal.index_idler)?;
    Ok(cone_from_wavenumbers(k_p, k_1, k_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn omega_of_um(lambda_um: f64) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / (lambda_um * 1e-6)
    }

    fn constant_crystal(n_p: f64, n_1: f64, n_2: f64, length: f64) -> CrystalConfig {
        CrystalConfig::new(
            length,
            IndexModel::Constant(n_p),
            IndexModel::Constant(n_1),
            IndexModel::Constant(n_2),
            PdcType::II,
        )
        .unwrap()
    }

    #[test]
    fn sellmeier_vacuum_limit_and_single_term() {
        let vacuum = IndexModel::sellmeier(vec![SellmeierTerm { b: 0.0, c_um2: 0.01 }], 0.3, 3.0).unwrap();
        assert_eq!(vacuum.refractive_index(omega_of_um(1.0)).unwrap(), 1.0);
        let one = IndexModel::sellmeier(vec![SellmeierTerm { b: 1.25, c_um2: 0.01 }], 0.3, 3.0).unwrap();
        let n = one.refractive_index(omega_of_um(1.0)).unwrap();
        let expect = (1.0f64 + 1.25 / 0.99).sqrt();
        assert!((n - expect).abs() < 1e-12, "{n}");
        assert!((n - 1.504_202_866_180_71).abs() < 1e-12);
        assert_eq!(IndexModel::Constant(1.5).refractive_index(1e15).unwrap(), 1.5);
    }

    #[test]
    fn sellmeier_range_and_pole_errors() {
        let m = IndexModel::sellmeier(vec![SellmeierTerm { b: 1.0, c_um2: 0.25 }], 0.6, 2.0).unwrap();
        assert!(matches!(
            m.refractive_index(omega_of_um(3.0)),
            Err(SpdcError::OutOfValidityRange { .. })
        ));
        let near_pole = IndexModel::Sellmeier {
            terms: vec![SellmeierTerm { b: 1.0, c_um2: 1.0 }],
            lambda_min_um: 0.5,
            lambda_max_um: 2.0,
        };
        assert!(matches!(
            near_pole.refractive_index(omega_of_um(1.0)),
            Err(SpdcError::PoleProximity { .. })
        ));
        assert!(IndexModel::constant(0.9).is_err());
        assert!(IndexModel::sellmeier(vec![SellmeierTerm { b: -5.0, c_um2: 0.01 }], 0.3, 3.0).is_err());
    }

    #[test]
    fn index_model_text_round_trip() {
        let m = IndexModel::sellmeier(
            vec![
                SellmeierTerm { b: 1.1, c_um2: 0.0123 },
                SellmeierTerm { b: 0.3, c_um2: 0.07 },
            ],
            0.35,
            2.5,
        )
        .unwrap();
        let back: IndexModel = m.to_string().parse().unwrap();
        assert_eq!(back, m);
        assert_eq!("constant 1.6".parse::<IndexModel>().unwrap(), IndexModel::Constant(1.6));
        assert!("sellmeier 1:0.1".parse::<IndexModel>().is_err());
        assert!("glass".parse::<IndexModel>().is_err());
    }

    #[test]
    fn vacuum_and_glass_wavenumbers() {
        let omega = omega_of_um(0.8);
        let k0 = wavenumber(omega, &IndexModel::Constant(1.0)).unwrap();
        assert!((k0 - 2.0 * PI / 8e-7).abs() < 1e-6);
        assert!((k0 - 7.853_982e6).abs() < 1.0);
        let k15 = wavenumber(omega, &IndexModel::Constant(1.5)).unwrap();
        assert!((k15 - 1.178_097_2e7).abs() < 1.0);
        let k2 = wavenumber(2.0 * omega, &IndexModel::Constant(1.5)).unwrap();
        assert_eq!(k2, 2.0 * k15);
        assert!(wavenumber(0.0, &IndexModel::Constant(1.0)).is_err());
    }

    #[test]
    fn mismatch_vanishes_when_collinearly_matched() {
        let crystal = constant_crystal(1.60, 1.55, 1.65, 1e-3);
        let wp = omega_of_um(0.405);
        let dk = longitudinal_mismatch(0.0, 0.0, 0.0, wp / 2.0, wp / 2.0, &crystal).unwrap();
        assert!(dk.abs() < 1e-6, "{dk}");
    }

    #[test]
    fn normal_dispersion_gives_positive_mismatch() {
        let crystal = constant_crystal(1.62, 1.60, 1.60, 1e-3);
        let wp = omega_of_um(0.405);
        let dk = longitudinal_mismatch(0.0, 0.0, 0.0, wp / 2.0, wp / 2.0, &crystal).unwrap();
        assert!(dk > 0.0);
    }

    #[test]
    fn symmetric_cone_momenta_cancel_the_mismatch() {
        let crystal = constant_crystal(1.59, 1.60, 1.60, 1e-3);
        let wp = omega_of_um(0.405);
        let cone = cone_transverse_momenta(wp / 2.0, wp / 2.0, &crystal).unwrap();
        assert!(cone.alpha > 0.0);
        let q = cone.degenerate_q.unwrap();
        let dk = longitudinal_mismatch(0.0, q, -q, wp / 2.0, wp / 2.0, &crystal).unwrap();
        assert!(dk.abs() < 1e-9 * cone.alpha, "{dk}");
    }

    #[test]
    fn phase_matching_factor_values() {
        assert_eq!(phase_matching_factor(0.0, 2e-3), 2e-3);
        let l = 1e-3;
        assert!(phase_matching_factor(2.0 * PI / l, l).abs() < 1e-18);
        let v = phase_matching_factor(1e4, 1e-3);
        assert!((v - (-1.917_85e-4)).abs() < 1e-9);
        assert!((v - 1e-3 * 5.0f64.sin() / 5.0).abs() < 1e-18);
    }

    #[test]
    fn sinc_series_matches_direct_evaluation_at_the_switch() {
        for &x in &[9.9e-5, 1.0e-4, 1.01e-4, -9.9e-5] {
            assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
        }
    }

    #[test]
    fn midpoint_riemann_sum_within_its_error_bound() {
        let l = 1e-3;
        let n = 2048;
        for i in 0..50 {
            let dk = (i as f64 - 25.0) * 2.0 / l;
            let h = l / n as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..n {
                let z = -0.5 * l + (j as f64 + 0.5) * h;
                re += (dk * z).cos() * h;
                im += (dk * z).sin() * h;
            }
            let closed = phase_matching_factor(dk, l);
            let x = dk * h / 2.0;
            // midpoint sum is L sin(dk L/2) / (N sin(dk h/2)); relative to sinc it deviates by x/sin(x) - 1
            let bound = x * x / 5.0 * l + 1e-15;
            assert!((re - closed).abs() <= bound, "dk = {dk}: {re} vs {closed}");
            assert!(im.abs() < 1e-15);
        }
    }

    #[test]
    fn first_zeros_bracket_at_two_pi_over_l() {
        let l = 3e-4;
        for sign in [1.0, -1.0] {
            let (mut lo, mut hi) = (sign * PI / l, sign * 3.0 * PI / l);
            let f = |dk: f64| phase_matching_factor(dk, l);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            let expect = sign * 2.0 * PI / l;
            assert!(((root - expect) / expect).abs() < 1e-6);
        }
    }

    #[test]
    fn collinear_residual_examples() {
        let wp = omega_of_um(0.405);
        let matched = collinear_condition(wp / 2.0, wp / 2.0, &constant_crystal(1.60, 1.55, 1.65, 1e-3), 1e-3).unwrap();
        assert!(matched.residual.abs() < 1e-15 && matched.matched);
        let off = collinear_condition(wp / 2.0, wp / 2.0, &constant_crystal(1.62, 1.60, 1.60, 1e-3), 1e-3).unwrap();
        assert!((off.residual - 0.02).abs() < 1e-12 && !off.matched);
        let c = constant_crystal(1.61, 1.57, 1.66, 1e-3);
        let a = collinear_condition(wp * 0.4, wp * 0.6, &c, DEFAULT_COLLINEAR_TOL).unwrap();
        let b = collinear_condition(wp * 0.4, wp * 0.6, &c.with_photons_swapped(), DEFAULT_COLLINEAR_TOL).unwrap();
        assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn cone_cases() {
        let at_boundary = cone_from_wavenumbers(2e7, 1e7, 1e7);
        assert_eq!(at_boundary.alpha, 0.0);
        assert_eq!(at_boundary.degenerate_q, Some(0.0));
        assert_eq!(at_boundary.emission(), Emission::Collinear);
        let cone = cone_from_wavenumbers(2e7 - 1e3, 1e7, 1e7);
        assert!((cone.degenerate_q.unwrap() - 1e5).abs() < 1e-6);
        assert_eq!(cone.emission(), Emission::Cone);
        let none = cone_from_wavenumbers(2e7 + 1e3, 1e7, 1e7);
        assert_eq!(none.degenerate_q, None);
        assert_eq!(none.emission(), Emission::None);
        assert_eq!(cone_from_wavenumbers(2e7 - 1e3, 1.1e7, 0.9e7 + 1.0).degenerate_q, None);
    }

    #[test]
    fn zero_length_crystal_is_rejected() {
        let err = CrystalConfig::new(
            -1e-3,
            IndexModel::Constant(1.6),
            IndexModel::Constant(1.6),
            IndexModel::Constant(1.6),
            PdcType::I,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "crystal.L must be > 0");
    }

    proptest! {
        #[test]
        fn factor_is_even(dk in -1e6f64..1e6, l in 1e-5f64..1e-2) {
            prop_assert_eq!(phase_matching_factor(dk, l), phase_matching_factor(-dk, l));
        }

        #[test]
        fn mismatch_is_quadratic_in_transverse_momenta(
            q1 in -2e5f64..2e5, q2 in -2e5f64..2e5, frac in 0.3f64..0.7,
        ) {
            let crystal = constant_crystal(1.61, 1.58, 1.63, 1e-3);
            let wp = omega_of_um(0.405);
            let (w1, w2) = (wp * frac, wp * (1.0 - frac));
            let a = longitudinal_mismatch(q1 + q2, q1, q2, w1, w2, &crystal).unwrap();
            let b = longitudinal_mismatch(-q1 - q2, -q1, -q2, w1, w2, &crystal).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

#![allow(dead_code)]

use std::f64::consts::PI;

use spdc::field::SPEED_OF_LIGHT;

pub fn omega_of_nm(nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (nm * 1e-9)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) from the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    assert!(fa0 * f(b) <= 0.0, "root not bracketed");
    let mut fa = fa0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub const REFERENCE_ORACLE: &str = include_str!("../../../../configs/reference_oracle.ini");

use spdc::biphoton::{DirectQuadrature, JointGrid, ScatterWindows};
use spdc::field::{Axis, AxisLabel};
use spdc::phasematch::{CrystalConfig, IndexModel, PdcType};
use spdc::pump::{PumpKind, PumpModel};

pub struct DirectCase {
    pub pump: PumpModel,
    pub crystal: CrystalConfig,
    pub windows: ScatterWindows,
    pub grid: JointGrid,
    pub quad: DirectQuadrature,
}

pub fn constant_crystal(length: f64, n_p: f64, n_1: f64, n_2: f64) -> CrystalConfig {
    CrystalConfig::new(
        length,
        IndexModel::Constant(n_p),
        IndexModel::Constant(n_1),
        IndexModel::Constant(n_2),
        PdcType::I,
    )
    .unwrap()
}

/// Gaussian pulse and beam, 100 um crystal, 16x16 spectral grid covering +-3 sigma of w1 + w2.
pub fn gaussian_spectral_case() -> DirectCase {
    let omega0 = omega_of_nm(405.0);
    let sigma = 2e11;
    let waist = 1e-4;
    let pump = PumpModel::new(
        PumpKind::Gaussian {
            omega0,
            sigma_omega: sigma,
            waist,
        },
        IndexModel::Constant(1.6),
    )
    .unwrap();
    let w1 = Axis::new(AxisLabel::W1, 16, 0.5 * omega0, 3.0 * sigma / 15.0).unwrap();
    let grid = JointGrid::spectral(w1, w1.with_label(AxisLabel::W2)).unwrap();
    DirectCase {
        quad: DirectQuadrature {
            t_nodes: 128,
            z_nodes: 4,
            rho_nodes: 48,
            pump: pump.default_quadrature(96),
        },
        pump,
        crystal: constant_crystal(1e-4, 1.6, 1.6, 1.6),
        windows: ScatterWindows::new(10.0 / sigma, 3.0 * waist).unwrap(),
        grid,
    }
}

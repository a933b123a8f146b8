//! Energy, chemical potential, flux, continuity and mass on solver profiles.

use serde::{Deserialize, Serialize};

use super::solver::Profile;
use super::stencil::fornberg_weights;
use crate::material::PhysicalParams;

/// Prefactors relating heights to energy, chemical potential and flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    /// Ω.
    pub omega: f64,
    /// γ_i + γ_s.
    pub gamma_sum: f64,
    /// D_i n / kT.
    pub mobility: f64,
    /// Stiffness α.
    pub alpha: f64,
    /// γ_gb / 2, weight of y(0) in the energy.
    pub root_weight: f64,
}

impl Scales {
    /// Dimensionless run with B = 1: energies are per unit γ_i + γ_s.
    pub fn scaled(m: f64, alpha_hat: f64) -> Self {
        Self { omega: 1.0, gamma_sum: 1.0, mobility: 1.0, alpha: alpha_hat, root_weight: 0.5 * m }
    }

    pub fn physical(p: &PhysicalParams) -> Self {
        let gamma_sum = p.gamma_sum();
        Self {
            omega: p.omega,
            gamma_sum,
            mobility: p.mobility(),
            alpha: p.e * p.h.powi(3) / (12.0 * (1.0 - p.nu * p.nu) * gamma_sum),
            root_weight: 0.5 * p.gamma_gb,
        }
    }

    /// Evolution rate B = Ω² (γ_i + γ_s) D_i n / kT.
    pub fn b(&self) -> f64 {
        self.omega * self.omega * self.gamma_sum * self.mobility
    }
}

/// Order-`k` derivative at every node. Centered stencils of second-order
/// accuracy where ghosts allow; one-sided stencils with one extra point
/// otherwise.
pub fn derivative_field(p: &Profile, k: usize) -> Vec<f64> {
    let (v, origin) = p.extended();
    let len = v.len() as i64;
    let centered_half = if k % 2 == 0 { k as i64 / 2 } else { (k as i64 + 1) / 2 };
    let scale = p.dx.powi(k as i32);
    (0..p.heights.len())
        .map(|i| {
            let c = origin as i64 + i as i64;
            let (lo, hi) = if c - centered_half >= 0 && c + centered_half < len {
                (c - centered_half, c + centered_half)
            } else {
                let width = k as i64 + 2;
                let lo = (c - width / 2).clamp(0, len - width);
                (lo, lo + width - 1)
            };
            let nodes: Vec<f64> = (lo..=hi).map(|j| (j - c) as f64).collect();
            let w = &fornberg_weights(0.0, &nodes, k)[k];
            (lo..=hi).zip(w).map(|(j, wj)| wj * v[j as usize]).sum::<f64>() / scale
        })
        .collect()
}

fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// ∫ y dx over the grid (trapezoid rule).
pub fn mass(p: &Profile) -> f64 {
    trapezoid(&p.heights, p.dx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    /// Grain-boundary plus surface stretching plus bending, flat reference removed.
    pub excess: f64,
    pub root: f64,
    pub surface: f64,
    pub bending: f64,
}

/// (γ_gb/2) y(0) + (γ_i+γ_s) ∫ ½ y_x² + (Eh³/24(1−ν²)) ∫ y_xx². The flat
/// contribution (γ_i+γ_s)·L is left out. With the root conditions in force
/// dE/dt = −(mobility/Ω) ∫ μ_x² ≤ 0.
pub fn energy(p: &Profile, s: &Scales) -> Energy {
    let yx = derivative_field(p, 1);
    let yxx = derivative_field(p, 2);
    let root = s.root_weight * p.heights[0];
    let surface = s.gamma_sum * 0.5 * trapezoid(&yx.iter().map(|v| v * v).collect::<Vec<_>>(), p.dx);
    let bending = 0.5 * s.alpha * s.gamma_sum * trapezoid(&yxx.iter().map(|v| v * v).collect::<Vec<_>>(), p.dx);
    Energy { excess: root + surface + bending, root, surface, bending }
}

/// μ = Ω (γ_i+γ_s)(−y_xx + α y⁽⁴⁾) at the nodes.
pub fn chemical_potential(p: &Profile, s: &Scales) -> Vec<f64> {
    let y2 = derivative_field(p, 2);
    let y4 = derivative_field(p, 4);
    y2.iter().zip(&y4).map(|(a, b)| s.omega * s.gamma_sum * (-a + s.alpha * b)).collect()
}

/// j = −(D_i n/kT) μ_x = −(D_i n/kT) Ω (γ_i+γ_s)(−y_xxx + α y⁽⁵⁾).
pub fn flux(p: &Profile, s: &Scales) -> Vec<f64> {
    let y3 = derivative_field(p, 3);
    let y5 = derivative_field(p, 5);
    y3.iter().zip(&y5).map(|(a, b)| -s.mobility * s.omega * s.gamma_sum * (-a + s.alpha * b)).collect()
}

/// −Ω j_x = B(α y⁽⁶⁾ − y⁽⁴⁾) at the nodes.
pub fn evolution_rate(p: &Profile, s: &Scales) -> Vec<f64> {
    let y4 = derivative_field(p, 4);
    let y6 = derivative_field(p, 6);
    y4.iter().zip(&y6).map(|(a, b)| s.b() * (s.alpha * b - a)).collect()
}

/// y_t + Ω j_x between two profiles: forward difference in time against the
/// trapezoidal average of the flux divergence.
pub fn continuity_residual(earlier: &Profile, later: &Profile, s: &Scales) -> Vec<f64> {
    assert_eq!(earlier.heights.len(), later.heights.len());
    let dt = later.time - earlier.time;
    let r0 = evolution_rate(earlier, s);
    let r1 = evolution_rate(later, s);
    (0..later.heights.len())
        .map(|i| (later.heights[i] - earlier.heights[i]) / dt - 0.5 * (r0[i] + r1[i]))
        .collect()
}

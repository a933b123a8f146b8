//! Physical constants of the metal/coating system and the reduced model
//! parameters B, α, m derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Slopes at or above this value leave the small-slope regime.
pub const SMALL_SLOPE_LIMIT: f64 = 1.0 / 3.0;

/// Dimensional material constants, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Interface diffusion coefficient (m²/s).
    pub d_i: f64,
    /// Mobile atoms per unit interface area (1/m²).
    pub n: f64,
    /// Atomic volume (m³).
    pub omega: f64,
    /// Thermal energy kT (J).
    pub kt: f64,
    /// Young's modulus of the coating (Pa).
    pub e: f64,
    /// Coating thickness (m).
    pub h: f64,
    /// Poisson ratio of the coating.
    pub nu: f64,
    /// Grain-boundary energy (J/m²).
    pub gamma_gb: f64,
    /// Metal/coating interface energy (J/m²).
    pub gamma_i: f64,
    /// Coating surface stress (J/m²).
    pub gamma_s: f64,
}

impl PhysicalParams {
    pub fn gamma_sum(&self) -> f64 {
        self.gamma_i + self.gamma_s
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_i", self.d_i),
            ("n", self.n),
            ("omega", self.omega),
            ("kt", self.kt),
            ("e", self.e),
            ("h", self.h),
            ("gamma_i + gamma_s", self.gamma_sum()),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.gamma_gb.is_finite() && self.gamma_gb >= 0.0) {
            return domain(format!("gamma_gb must be non-negative, got {}", self.gamma_gb));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return domain(format!("Poisson ratio {} outside (-1, 0.5)", self.nu));
        }
        if self.gamma_gb >= 2.0 * self.gamma_sum() {
            return domain("gamma_gb must be below 2(gamma_i + gamma_s)");
        }
        Ok(())
    }

    /// Bending stiffness Eh³/(24(1−ν²)) entering the excess energy.
    pub fn bending_modulus(&self) -> f64 {
        self.e * self.h.powi(3) / (24.0 * (1.0 - self.nu * self.nu))
    }

    /// Kinetic prefactor D_i n/kT of the interface flux.
    pub fn mobility(&self) -> f64 {
        self.d_i * self.n / self.kt
    }
}

/// B = D_i n Ω² (γ_i + γ_s)/kT in m⁴/s.
pub fn mullins_coefficient(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok(p.d_i * p.n * p.omega * p.omega * p.gamma_sum() / p.kt)
}

/// α = E h³ / (12 (1 − ν²)(γ_i + γ_s)) in m².
pub fn stiffness_parameter(p: &PhysicalParams) -> Result<f64> {
    if p.nu * p.nu >= 1.0 {
        return domain(format!("Poisson ratio {} gives 1 - nu^2 <= 0", p.nu));
    }
    if !(p.e > 0.0 && p.h > 0.0 && p.gamma_sum() > 0.0) {
        return domain("E, h and gamma_i + gamma_s must be positive");
    }
    Ok(p.e * p.h.powi(3) / (12.0 * (1.0 - p.nu * p.nu) * p.gamma_sum()))
}

/// The slope parameter and whether it left the small-slope regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slope {
    pub m: f64,
    pub exceeds_small_slope: bool,
}

/// m = γ_gb/(γ_i + γ_s).
pub fn slope_parameter(gamma_gb: f64, gamma_i: f64, gamma_s: f64) -> Result<Slope> {
    let sum = gamma_i + gamma_s;
    if !(sum > 0.0 && sum.is_finite()) {
        return domain(format!("gamma_i + gamma_s must be positive, got {sum}"));
    }
    if !(gamma_gb >= 0.0 && gamma_gb.is_finite()) {
        return domain(format!("gamma_gb must be non-negative, got {gamma_gb}"));
    }
    let m = gamma_gb / sum;
    Ok(Slope { m, exceeds_small_slope: m >= SMALL_SLOPE_LIMIT })
}

/// Reduced parameters. The reference length L0 = (B t_ref)^{1/4} turns x, t
/// and α into x̂ = x/L0, t̂ = Bt/L0⁴ and α̂ = α/L0².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b: f64,
    pub alpha: f64,
    pub m: f64,
    pub l0: f64,
    pub alpha_hat: f64,
}

impl ModelParams {
    /// Nondimensional time for a dimensional B·t (m⁴).
    pub fn t_hat(&self, bt: f64) -> f64 {
        bt / self.l0.powi(4)
    }

    /// B·t (m⁴) for a nondimensional time.
    pub fn bt(&self, t_hat: f64) -> f64 {
        t_hat * self.l0.powi(4)
    }

    pub fn exceeds_small_slope(&self) -> bool {
        self.m >= SMALL_SLOPE_LIMIT
    }
}

/// Builds [`ModelParams`] with L0 = (B t_ref)^{1/4}, α̂ = α/L0².
pub fn nondimensionalize(b: f64, alpha: f64, m: f64, t_ref: f64) -> Result<ModelParams> {
    if !(b > 0.0 && b.is_finite()) {
        return domain(format!("B must be positive, got {b}"));
    }
    if !(t_ref > 0.0 && t_ref.is_finite()) {
        return domain(format!("reference time must be positive, got {t_ref}"));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be non-negative, got {alpha}"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return domain(format!("m must be non-negative, got {m}"));
    }
    let l0 = (b * t_ref).powf(0.25);
    Ok(ModelParams { b, alpha, m, l0, alpha_hat: alpha / (l0 * l0) })
}

/// Convenience for when only the product B·t_ref is known: B is set to 1 m⁴/s.
pub fn nondimensionalize_bt(alpha: f64, m: f64, bt_ref: f64) -> Result<ModelParams> {
    nondimensionalize(1.0, alpha, m, bt_ref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> PhysicalParams {
        PhysicalParams {
            d_i: 1.0,
            n: 1.0,
            omega: 1.0,
            kt: 1.0,
            e: 12.0,
            h: 1.0,
            nu: 0.0,
            gamma_gb: 0.5,
            gamma_i: 0.5,
            gamma_s: 0.5,
        }
    }

    fn coated_metal() -> PhysicalParams {
        PhysicalParams {
            d_i: 1e-12,
            n: 1e19,
            omega: 1.2e-29,
            kt: 1.0e-20,
            e: 253e9,
            h: 5e-9,
            nu: 0.24,
            gamma_gb: 0.5999,
            gamma_i: 1.2,
            gamma_s: 1.67,
        }
    }

    #[test]
    fn unit_identities() {
        assert_eq!(mullins_coefficient(&unit()).unwrap(), 1.0);
        assert_eq!(stiffness_parameter(&unit()).unwrap(), 1.0);
    }

    #[test]
    fn mullins_coefficient_scaling() {
        let p = coated_metal();
        let b = mullins_coefficient(&p).unwrap();
        let b_d = mullins_coefficient(&PhysicalParams { d_i: 2.0 * p.d_i, ..p }).unwrap();
        let b_o = mullins_coefficient(&PhysicalParams { omega: 2.0 * p.omega, ..p }).unwrap();
        assert_relative_eq!(b_d, 2.0 * b, max_relative = 1e-15);
        assert_relative_eq!(b_o, 4.0 * b, max_relative = 1e-15);
        assert!(mullins_coefficient(&PhysicalParams { kt: -1.0, ..p }).is_err());
    }

    #[test]
    fn coating_stiffness() {
        let p = coated_metal();
        let alpha = stiffness_parameter(&p).unwrap();
        assert!((alpha / 9.7e-16 - 1.0).abs() < 5e-3, "alpha = {alpha}");
        let thick = stiffness_parameter(&PhysicalParams { h: 2.0 * p.h, ..p }).unwrap();
        assert_relative_eq!(thick, 8.0 * alpha, max_relative = 1e-14);
        assert!(stiffness_parameter(&PhysicalParams { nu: 1.0, ..p }).is_err());
    }

    #[test]
    fn slope_values() {
        assert_eq!(slope_parameter(0.0, 1.2, 1.67).unwrap().m, 0.0);
        let s = slope_parameter(0.5999, 1.2, 1.67).unwrap();
        assert_relative_eq!(s.m, 0.5999 / 2.87);
        assert!((s.m - 0.209).abs() < 5e-4);
        assert!(!s.exceeds_small_slope);
        let edge = slope_parameter(2.87, 1.2, 1.67).unwrap();
        assert_relative_eq!(edge.m, 1.0);
        assert!(edge.exceeds_small_slope);
        assert!(slope_parameter(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn reference_scaling() {
        let mp = nondimensionalize(1e-29, 9.7e-16, 0.209, 1.0).unwrap();
        assert_relative_eq!(mp.l0, 5.623_413_251_903_491e-8, max_relative = 1e-12);
        assert_relative_eq!(mp.alpha_hat, 9.7e-16 / (1e-29f64).sqrt(), max_relative = 1e-12);
        assert!((mp.alpha_hat - 0.3067).abs() < 1e-3);
        assert_eq!(nondimensionalize(1e-29, 0.0, 0.209, 1.0).unwrap().alpha_hat, 0.0);
        let later = nondimensionalize(1e-29, 9.7e-16, 0.209, 4.0).unwrap();
        assert_relative_eq!(later.alpha_hat, 0.5 * mp.alpha_hat, max_relative = 1e-14);
        let much_later = nondimensionalize(1e-29, 9.7e-16, 0.209, 16.0).unwrap();
        assert_relative_eq!(much_later.alpha_hat, 0.25 * mp.alpha_hat, max_relative = 1e-14);
        assert_relative_eq!(mp.t_hat(1e-29), 1.0, max_relative = 1e-14);
        assert_relative_eq!(mp.bt(2.0), 2e-29, max_relative = 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn energy_rescaling_covariance(c in 0.1f64..10.0) {
            let p = coated_metal();
            let q = PhysicalParams {
                gamma_gb: c * p.gamma_gb,
                gamma_i: c * p.gamma_i,
                gamma_s: c * p.gamma_s,
                ..p
            };
            let (b0, b1) = (mullins_coefficient(&p).unwrap(), mullins_coefficient(&q).unwrap());
            let (a0, a1) = (stiffness_parameter(&p).unwrap(), stiffness_parameter(&q).unwrap());
            let m0 = slope_parameter(p.gamma_gb, p.gamma_i, p.gamma_s).unwrap().m;
            let m1 = slope_parameter(q.gamma_gb, q.gamma_i, q.gamma_s).unwrap().m;
            proptest::prop_assert!((b1 / (c * b0) - 1.0).abs() < 1e-13);
            proptest::prop_assert!((a1 * c / a0 - 1.0).abs() < 1e-13);
            proptest::prop_assert!((m1 / m0 - 1.0).abs() < 1e-13);
        }

        #[test]
        fn alpha_hat_vanishes_for_long_times(exp in 0i32..12) {
            let early = nondimensionalize(1e-29, 9.7e-16, 0.2, 1.0).unwrap();
            let late = nondimensionalize(1e-29, 9.7e-16, 0.2, 10f64.powi(exp)).unwrap();
            proptest::prop_assert!(late.alpha_hat <= early.alpha_hat * (1.0 + 1e-14));
            proptest::prop_assert!((late.alpha_hat / early.alpha_hat - 10f64.powf(-exp as f64 / 2.0)).abs() < 1e-12);
        }
    }
}

//! Inner corrections near the groove root.
//!
//! The boundary layer of width √α is a single decaying exponential whose
//! amplitude cancels the root curvature of the outer expansion order by
//! order. The corner layer (x = O(α), t = O(α⁵)) obeys y_τ = B y_ζζζζζζ and is
//! represented through self-similar solutions (Bτ)^r V(w), w = ζ/(Bτ)^{1/6},
//! whose fundamental set is written with ₁F₅ series.
//!
//! Corner-layer quantities take α as the nondimensional α̂; see
//! [`crate::material::nondimensionalize`].

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::outer::SimilarityFunction;
use crate::quadrature::integrate;
use crate::specfun::{gamma, rgamma, MonomialSeries, SeriesControl, SeriesResult};

/// Amplitudes β₀..β₄ of the boundary-layer expansion at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerCoeffs {
    pub beta: [f64; 5],
}

impl BoundaryLayerCoeffs {
    /// β₂ = m/(2√2 (Bt)^{1/4} Γ(3/4)), β₄ = −m Γ(7/4)/(4π (Bt)^{3/4}); the rest vanish.
    pub fn at(bt: f64, m: f64) -> Result<Self> {
        if !(bt > 0.0 && bt.is_finite()) {
            return domain(format!("B·t must be positive, got {bt}"));
        }
        let beta2 = m / (2.0 * 2f64.sqrt() * bt.powf(0.25) * gamma(0.75)?);
        let beta4 = -m * gamma(1.75)? / (4.0 * PI * bt.powf(0.75));
        Ok(Self { beta: [0.0, 0.0, beta2, 0.0, beta4] })
    }

    pub fn beta2(&self) -> f64 {
        self.beta[2]
    }

    pub fn beta4(&self) -> f64 {
        self.beta[4]
    }

    /// Amplitude α β₂ + α² β₄ of e^{−x/√α}.
    pub fn amplitude(&self, alpha: f64) -> f64 {
        alpha * self.beta[2] + alpha * alpha * self.beta[4]
    }
}

/// ∂ᵏG/∂xᵏ for G = (α β₂ + α² β₄) e^{−x/√α}.
pub fn boundary_layer_derivative(x: f64, t: f64, alpha: f64, b: f64, m: f64, order: u32) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be non-negative, got {alpha}"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return domain(format!("x must be finite and non-negative, got {x}"));
    }
    let coeffs = BoundaryLayerCoeffs::at(b * t, m)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let root = alpha.sqrt();
    let decay = (-1.0 / root).powi(order as i32);
    Ok(coeffs.amplitude(alpha) * decay * (-x / root).exp())
}

/// Boundary-layer correction G(x, t; α).
pub fn boundary_layer_g(x: f64, t: f64, alpha: f64, b: f64, m: f64) -> Result<f64> {
    boundary_layer_derivative(x, t, alpha, b, m, 0)
}

/// Parameters of a corner-layer similarity solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CornerSpec {
    /// Similarity exponent; decaying solutions need r < −2/3.
    pub r: f64,
    /// Amplitude γ = V′(0).
    pub gamma: f64,
    pub alpha_hat: f64,
    pub b: f64,
}

impl Default for CornerSpec {
    fn default() -> Self {
        Self { r: -1.0, gamma: 0.0, alpha_hat: 0.0, b: 1.0 }
    }
}

impl CornerSpec {
    /// r = −1/6 only admits the trivial solution.
    pub fn is_trivial(&self) -> bool {
        (self.r + 1.0 / 6.0).abs() < 1e-14 || self.gamma == 0.0
    }

    /// γ should be O(α̂); amplitudes beyond 10 α̂ are flagged.
    pub fn amplitude_flagged(&self) -> bool {
        self.gamma.abs() > 10.0 * self.alpha_hat
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.gamma.is_finite()) {
            return Err(Error::Config("corner r and gamma must be finite".into()));
        }
        if !(self.alpha_hat >= 0.0 && self.b > 0.0) {
            return Err(Error::Config("corner alpha_hat must be >= 0 and B > 0".into()));
        }
        if !(self.r < -2.0 / 3.0) && (self.r + 1.0 / 6.0).abs() >= 1e-14 {
            return Err(Error::Config(format!(
                "corner exponent r = {} must be below -2/3 for decay outside the layer",
                self.r
            )));
        }
        Ok(())
    }
}

/// ₁F₅ series behind vᵢ, i = 1..6.
fn fundamental_series(i: usize, r: f64) -> Result<MonomialSeries> {
    if !(1..=6).contains(&i) {
        return domain(format!("fundamental solution index {i} outside 1..=6"));
    }
    let shift = (i - 1) as u32;
    let numerator = (i - 1) as f64 / 6.0 - r;
    let denominators: Vec<f64> = (1..=6)
        .filter(|&j| i - 1 + j != 6)
        .map(|j| (i - 1 + j) as f64 / 6.0)
        .collect();
    Ok(MonomialSeries::new(&[numerator], &denominators, -1.0 / 6f64.powi(6), 6, shift))
}

/// vᵢ(w) = w^{i−1} ₁F₅((i−1)/6 − r; …; −w⁶/6⁶).
pub fn corner_fundamental_v(i: usize, w: f64, r: f64) -> Result<f64> {
    Ok(corner_fundamental_v_derivative(i, w, r, 0)?.value)
}

/// k-th w-derivative of vᵢ with series diagnostics.
pub fn corner_fundamental_v_derivative(i: usize, w: f64, r: f64, order: u32) -> Result<SeriesResult> {
    if !(w >= 0.0) {
        return domain(format!("w must be non-negative, got {w}"));
    }
    fundamental_series(i, r)?.derivative(w, order, SeriesControl::default())
}

/// V⁽⁶⁾ + (w/6)V′ − rV.
pub fn corner_similarity_ode_residual(w: f64, r: f64, v: &impl SimilarityFunction) -> Result<f64> {
    let v0 = v.derivative(w, 0)?;
    let v1 = v.derivative(w, 1)?;
    let v6 = v.derivative(w, 6)?;
    Ok(v6 + w / 6.0 * v1 - r * v0)
}

/// Constant matrix combining the fundamental set into y_c1..y_c6. Row j
/// holds Re or Im of ωⁿ, n = 0..5, for a sixth root of unity ω.
pub const CORNER_MATRIX: [[f64; 6]; 6] = {
    const H: f64 = 0.866_025_403_784_438_6;
    [
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.5, -0.5, -1.0, -0.5, 0.5],
        [0.0, H, H, 0.0, -H, -H],
        [1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        [1.0, -0.5, -0.5, 1.0, -0.5, -0.5],
        [0.0, H, -H, 0.0, H, -H],
    ]
};

/// Root of unity and real/imaginary selector for each row.
fn row_phase(j: usize) -> (f64, bool) {
    match j {
        1 => (0.0, false),
        2 => (FRAC_PI_3, false),
        3 => (FRAC_PI_3, true),
        4 => (PI, false),
        5 => (2.0 * FRAC_PI_3, false),
        _ => (2.0 * FRAC_PI_3, true),
    }
}

/// Weight 1/((i−1)! Γ((7−i)/6 + r)); 1/Γ vanishes at the poles.
fn column_weight(i: usize, r: f64) -> f64 {
    let fact: f64 = (1..i).map(|k| k as f64).product();
    rgamma((7 - i) as f64 / 6.0 + r) / fact
}

/// Series value of the k-th w-derivative of row j, per unit (Bτ)^r.
fn row_series(j: usize, w: f64, r: f64, order: u32) -> Result<SeriesResult> {
    let mut acc = crate::specfun::CompensatedSum::new();
    let mut max_term: f64 = 0.0;
    let mut terms = 1;
    for i in 1..=6 {
        let coeff = CORNER_MATRIX[j - 1][i - 1] * column_weight(i, r);
        if coeff == 0.0 {
            continue;
        }
        let v = corner_fundamental_v_derivative(i, w, r, order)?;
        acc.add(coeff * v.value);
        max_term = max_term.max(coeff.abs() * v.max_term_magnitude);
        terms = terms.max(v.terms_used);
    }
    let value = acc.value();
    Ok(SeriesResult {
        value,
        terms_used: terms,
        max_term_magnitude: max_term,
        cancellation_digits: crate::specfun::cancellation_digits(max_term, value),
    })
}

/// Row j through the contour integral of its generating function
///
/// Σₙ (ωw)ⁿ/(n! Γ(1+r−n/6)) = (1/2πi) ∫_Ha e^{s} s^{−1−r} e^{ωw s^{1/6}} ds,
///
/// with the Hankel loop collapsed onto the negative axis and s = σ⁶. Needed
/// for large w, where the power series loses all digits to cancellation.
fn row_integral(j: usize, w: f64, r: f64, order: u32) -> Result<f64> {
    if !(r < 0.0) {
        return domain("integral representation needs r < 0");
    }
    let (theta, imaginary) = row_phase(j);
    let k = order as f64;
    let p = -1.0 - 6.0 * r + k;
    let psi = [theta - FRAC_PI_6, theta + FRAC_PI_6];
    let growth = psi.iter().map(|a| a.cos()).fold(0.0f64, f64::max);
    let log_bound = |s: f64| -s.powi(6) + w * growth * s + p * s.ln();
    let log_peak = (1..400).map(|n| log_bound(n as f64 * 0.02)).fold(f64::MIN, f64::max);
    let mut s_max = 1.0;
    while log_bound(s_max) > log_peak - 45.0 {
        s_max += 0.05;
    }
    let shift = PI * (1.0 + r);
    let integrand = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let g = (-s.powi(6)).exp() * s.powf(p);
        let lower = (w * s * psi[0].cos()).exp();
        let upper = (w * s * psi[1].cos()).exp();
        let phi_lower = w * s * psi[0].sin() + k * psi[0] + shift;
        let phi_upper = w * s * psi[1].sin() + k * psi[1] - shift;
        if imaginary {
            -g * (lower * phi_lower.cos() - upper * phi_upper.cos())
        } else {
            g * (lower * phi_lower.sin() - upper * phi_upper.sin())
        }
    };
    let scale = log_peak.exp() * s_max;
    let integral = integrate(integrand, 0.0, s_max, 1e-15 * scale, 1e-13, 20_000)?;
    Ok(3.0 / PI * integral.value)
}

/// Above this many lost digits the series is replaced by the contour integral.
const SERIES_CANCELLATION_LIMIT: f64 = 6.0;

/// k-th w-derivative of row j, per unit (Bτ)^r.
fn row_similarity(j: usize, w: f64, r: f64, order: u32) -> Result<f64> {
    if !(1..=6).contains(&j) {
        return domain(format!("corner solution index {j} outside 1..=6"));
    }
    if !(w >= 0.0 && w.is_finite()) {
        return domain(format!("w must be finite and non-negative, got {w}"));
    }
    let series = row_series(j, w, r, order)?;
    if series.cancellation_digits <= SERIES_CANCELLATION_LIMIT || r >= 0.0 {
        return Ok(series.value);
    }
    row_integral(j, w, r, order)
}

fn check_tau(tau: f64, b: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite() && b > 0.0) {
        return domain(format!("corner time must be positive, got tau = {tau}"));
    }
    Ok(b * tau)
}

/// ∂ᵏy_cj/∂ζᵏ at (ζ, τ).
pub fn corner_solution_derivative(j: usize, zeta: f64, tau: f64, spec: &CornerSpec, order: u32) -> Result<f64> {
    let bt = check_tau(tau, spec.b)?;
    let scale = bt.powf(1.0 / 6.0);
    let w = zeta / scale;
    Ok(bt.powf(spec.r - order as f64 / 6.0) * row_similarity(j, w, spec.r, order)?)
}

/// y_cj(ζ, τ), j = 1..6. Rows 1–3 grow and rows 4–6 decay as ζ → ∞.
pub fn corner_solutions_yc(j: usize, zeta: f64, tau: f64, spec: &CornerSpec) -> Result<f64> {
    corner_solution_derivative(j, zeta, tau, spec, 0)
}

/// ∂^{n}y_cj/∂ζ^{n}(0, τ) for n = 0..5, read off the matrix representation.
pub fn corner_origin_derivative(j: usize, n: usize, tau: f64, spec: &CornerSpec) -> Result<f64> {
    if !(1..=6).contains(&j) || n > 5 {
        return domain(format!("origin derivative needs j in 1..=6 and n <= 5, got j = {j}, n = {n}"));
    }
    let bt = check_tau(tau, spec.b)?;
    let i = n + 1;
    Ok(bt.powf(spec.r - n as f64 / 6.0) * CORNER_MATRIX[j - 1][i - 1] * rgamma((7 - i) as f64 / 6.0 + spec.r))
}

/// Gamma values Γ(5/6+r), Γ(1/2+r), Γ(1/6+r) of the boundary system.
fn boundary_gammas(r: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, shift) in out.iter_mut().zip([5.0 / 6.0, 0.5, 1.0 / 6.0]) {
        *slot = gamma(shift + r).map_err(|_| {
            Error::Domain(format!("Gamma({shift:.4} + r) has a pole at r = {r}"))
        })?;
    }
    Ok(out)
}

/// Right-hand sides of the 3×3 system for (c₄, c₅, c₆).
fn c456_rhs(vprime0: f64, r: f64, alpha_hat: f64, bt: f64) -> Result<[f64; 3]> {
    let [g56, g12, g16] = boundary_gammas(r)?;
    Ok([
        vprime0 * g56,
        alpha_hat * bt.powf(1.0 / 3.0) * vprime0 * g12,
        alpha_hat * alpha_hat * bt.powf(2.0 / 3.0) * vprime0 * g16,
    ])
}

fn solve3(mut a: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .expect("non-empty range");
        if a[pivot][col] == 0.0 {
            return Err(Error::Singular("corner boundary system".into()));
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Coefficients (c₄, c₅, c₆) of the decaying rows such that the combination
/// has V′(0) = `vprime0` and satisfies α y_ζ − y_ζζζ = 0, α y_ζζζ − y_ζ⁽⁵⁾ = 0
/// at ζ = 0. Solved as a linear system built from the matrix rows.
pub fn solve_c456(vprime0: f64, r: f64, alpha_hat: f64, tau: f64, b: f64) -> Result<(f64, f64, f64)> {
    if !(r < -2.0 / 3.0) {
        return domain(format!("corner exponent r = {r} must be below -2/3"));
    }
    let bt = check_tau(tau, b)?;
    let rhs = c456_rhs(vprime0, r, alpha_hat, bt)?;
    // rows 2, 4, 6 of the matrix restricted to columns y_c4, y_c5, y_c6
    let system = [
        [CORNER_MATRIX[3][1], CORNER_MATRIX[4][1], CORNER_MATRIX[5][1]],
        [CORNER_MATRIX[3][3], CORNER_MATRIX[4][3], CORNER_MATRIX[5][3]],
        [CORNER_MATRIX[3][5], CORNER_MATRIX[4][5], CORNER_MATRIX[5][5]],
    ];
    let [c4, c5, c6] = solve3(system, rhs)?;
    Ok((c4, c5, c6))
}

/// The same coefficients from their closed-form Γ brackets.
pub fn c456_closed_form(vprime0: f64, r: f64, alpha_hat: f64, tau: f64, b: f64) -> Result<(f64, f64, f64)> {
    let bt = check_tau(tau, b)?;
    let [a, bv, c] = c456_rhs(1.0, r, alpha_hat, bt)?;
    let g = vprime0;
    Ok((
        -g / 3.0 * (c + bv + a),
        -g / 3.0 * (c - 2.0 * bv + a),
        -g / 3f64.sqrt() * (c - a),
    ))
}

/// ∂ᵏ/∂ζᵏ of the decaying corner solution with V′(0) = γ.
pub fn corner_combination_derivative(zeta: f64, tau: f64, spec: &CornerSpec, order: u32) -> Result<f64> {
    spec.validate()?;
    check_tau(tau, spec.b)?;
    if spec.is_trivial() {
        return Ok(0.0);
    }
    let (c4, c5, c6) = solve_c456(spec.gamma, spec.r, spec.alpha_hat, tau, spec.b)?;
    let mut total = 0.0;
    for (j, c) in [(4, c4), (5, c5), (6, c6)] {
        total += c * corner_solution_derivative(j, zeta, tau, spec, order)?;
    }
    Ok(total)
}

/// Decaying corner-layer solution y_c(ζ, τ).
pub fn corner_combination(zeta: f64, tau: f64, spec: &CornerSpec) -> Result<f64> {
    corner_combination_derivative(zeta, tau, spec, 0)
}

/// ∂ⁿy_c/∂ζⁿ(0, τ), n ≤ 5, from the matrix representation.
pub fn corner_combination_origin_derivative(n: usize, tau: f64, spec: &CornerSpec) -> Result<f64> {
    spec.validate()?;
    if spec.is_trivial() {
        return Ok(0.0);
    }
    let (c4, c5, c6) = solve_c456(spec.gamma, spec.r, spec.alpha_hat, tau, spec.b)?;
    let mut total = 0.0;
    for (j, c) in [(4, c4), (5, c5), (6, c6)] {
        total += c * corner_origin_derivative(j, n, tau, spec)?;
    }
    Ok(total)
}

/// Root curvature ∂²y_c/∂x²(0, t) in outer variables (x = α̂ζ, t = α̂⁵τ):
///
/// γ/Γ(r+2/3) · [ −(2/3)(Bt)^{r−1/3}Γ(r+5/6)/α̂^{5r+1/3}
///               −(2/3)(Bt)^{r}Γ(r+1/2)/α̂^{5r+1}
///               +(1/3)(Bt)^{r+1/3}Γ(r+1/6)/α̂^{5r+5/3} ].
pub fn corner_root_curvature(t: f64, spec: &CornerSpec) -> Result<f64> {
    spec.validate()?;
    if !(t > 0.0) {
        return domain(format!("time must be positive, got {t}"));
    }
    if spec.is_trivial() {
        return Ok(0.0);
    }
    if !(spec.alpha_hat > 0.0) {
        return domain("corner root curvature needs alpha_hat > 0");
    }
    let [g56, g12, g16] = boundary_gammas(spec.r)?;
    let g23 = gamma(spec.r + 2.0 / 3.0)?;
    let (r, a, bt) = (spec.r, spec.alpha_hat, spec.b * t);
    let terms = -2.0 / 3.0 * bt.powf(r - 1.0 / 3.0) * g56 / a.powf(5.0 * r + 1.0 / 3.0)
        - 2.0 / 3.0 * bt.powf(r) * g12 / a.powf(5.0 * r + 1.0)
        + 1.0 / 3.0 * bt.powf(r + 1.0 / 3.0) * g16 / a.powf(5.0 * r + 5.0 / 3.0);
    Ok(spec.gamma * terms / g23)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(alpha_hat: f64, gamma: f64) -> CornerSpec {
        CornerSpec { r: -1.0, gamma, alpha_hat, b: 1.0 }
    }

    #[test]
    fn boundary_layer_values() {
        let (alpha, m) = (0.3, 0.209);
        let g0 = boundary_layer_g(0.0, 1.0, alpha, 1.0, m).unwrap();
        let expected = alpha * m / (2.0 * 2f64.sqrt() * gamma(0.75).unwrap())
            - alpha * alpha * m * gamma(1.75).unwrap() / (4.0 * PI);
        assert_relative_eq!(g0, expected, max_relative = 1e-15);
        assert!(boundary_layer_g(60.0, 1.0, alpha, 1.0, m).unwrap().abs() < 1e-40);
        assert_eq!(boundary_layer_g(0.0, 1.0, 0.0, 1.0, m).unwrap(), 0.0);
        let c = BoundaryLayerCoeffs::at(2.0, m).unwrap();
        assert!(c.beta2() > 0.0 && c.beta4() < 0.0);
        assert_eq!([c.beta[0], c.beta[1], c.beta[3]], [0.0; 3]);
        let d2 = boundary_layer_derivative(0.0, 1.0, alpha, 1.0, m, 2).unwrap();
        assert_relative_eq!(d2, g0 / alpha, max_relative = 1e-15);
    }

    #[test]
    fn curvature_cancels_order_by_order() {
        for bt in [1.0, 1e-29, 7.5] {
            let c = BoundaryLayerCoeffs::at(bt, 0.209).unwrap();
            let y0xx = crate::outer::mullins_profile_derivative(0.0, bt, 1.0, 0.209, 2).unwrap();
            let y1xx = crate::outer::outer_term_derivative(1, 0.0, bt, 1.0, 0.209, 2).unwrap();
            assert!((c.beta2() + y0xx).abs() <= 1e-12 * c.beta2().abs());
            assert!((c.beta4() + y1xx).abs() <= 1e-12 * c.beta4().abs());
        }
    }

    #[test]
    fn fundamental_set_at_origin() {
        assert_eq!(corner_fundamental_v(1, 0.0, -1.0).unwrap(), 1.0);
        for i in 2..=6 {
            assert_eq!(corner_fundamental_v(i, 0.0, -1.0).unwrap(), 0.0);
        }
        assert_eq!(corner_fundamental_v_derivative(2, 0.0, -1.0, 1).unwrap().value, 1.0);
        // mpmath: w³ ₁F₅(3/2; 2/3,5/6,7/6,4/3,3/2; −64/46656)
        assert_relative_eq!(corner_fundamental_v(4, 2.0, -1.0).unwrap(), 7.987_302_151_108_442_4, max_relative = 1e-14);
        assert!(corner_fundamental_v(7, 1.0, -1.0).is_err());
    }

    #[test]
    fn fundamental_set_solves_similarity_equation() {
        for r in [-1.0, -5.0 / 6.0 - 0.1, -2.0] {
            for i in 1..=6 {
                let v = |w: f64, k: u32| corner_fundamental_v_derivative(i, w, r, k).map(|s| s.value);
                for n in 0..=12 {
                    let w = 0.5 * n as f64;
                    let res = corner_similarity_ode_residual(w, r, &v).unwrap();
                    let scale = v(w, 0).unwrap().abs().max(1.0);
                    assert!(res.abs() <= 1e-8 * scale, "i={i} r={r} w={w}: {res}");
                }
            }
        }
        let zero = |_: f64, _: u32| Ok(0.0);
        assert_eq!(corner_similarity_ode_residual(2.0, -1.0, &zero).unwrap(), 0.0);
    }

    // mpmath, r = −1, Bτ = 1, w = 1
    const YC_AT_ONE: [f64; 6] = [
        -0.329_321_2,
        0.039_303_398,
        -0.224_364_44,
        0.062_437_102,
        0.094_138_649,
        -0.029_154_733,
    ];

    #[test]
    fn corner_rows_reference() {
        let s = spec(0.3, 1.0);
        for j in 1..=6 {
            let v = corner_solutions_yc(j, 1.0, 1.0, &s).unwrap();
            assert!((v - YC_AT_ONE[j - 1]).abs() < 5e-8, "j={j}: {v}");
        }
        // far field, where only the contour integral retains accuracy
        let far = [(4, 5.485_252e-10), (5, 0.000_997_470_33), (6, 0.000_798_618_86)];
        for (j, expected) in far {
            let v = corner_solutions_yc(j, 20.0, 1.0, &s).unwrap();
            assert_relative_eq!(v, expected, max_relative = 1e-5);
        }
    }

    #[test]
    fn far_field_evaluates_everywhere() {
        // w = 16.8 on row 6 once stalled the contour quadrature
        let s = spec(0.3, 1.0);
        for n in 0..=200 {
            for j in 1..=6 {
                assert!(corner_solutions_yc(j, 0.1 * n as f64, 1.0, &s).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn series_and_integral_agree() {
        for j in 1..=6 {
            for w in [0.5, 1.0, 2.5] {
                for k in [0, 1, 3] {
                    let s = row_series(j, w, -1.0, k).unwrap().value;
                    let q = row_integral(j, w, -1.0, k).unwrap();
                    assert!((s - q).abs() <= 1e-10 * s.abs().max(1e-2), "j={j} w={w} k={k}: {s} vs {q}");
                }
            }
        }
    }

    #[test]
    fn origin_values_and_growth() {
        let s = CornerSpec { r: -1.5, gamma: 1.0, alpha_hat: 0.3, b: 1.0 };
        let y1 = corner_solutions_yc(1, 0.0, 2.0, &s).unwrap();
        assert_relative_eq!(y1, 2f64.powf(-1.5) / gamma(-0.5).unwrap(), max_relative = 1e-14);
        let envelope = |center: f64| {
            (0..=40)
                .map(|n| corner_solutions_yc(1, center - 1.0 + 0.05 * n as f64, 1.0, &spec(0.3, 1.0)).unwrap().abs())
                .fold(0.0f64, f64::max)
        };
        assert!(envelope(20.0) > envelope(10.0));
    }

    #[test]
    fn origin_derivatives_match_series() {
        let s = spec(0.3, 1.0);
        for j in 1..=6 {
            for n in 0..=5 {
                let analytic = corner_origin_derivative(j, n, 1.7, &s).unwrap();
                let series = corner_solution_derivative(j, 0.0, 1.7, &s, n as u32).unwrap();
                assert!((analytic - series).abs() <= 1e-14 * analytic.abs().max(1.0), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn boundary_system() {
        assert_eq!(solve_c456(0.0, -1.0, 0.3, 1.0, 1.0).unwrap(), (0.0, 0.0, 0.0));
        let (c4, c5, c6) = solve_c456(1.0, -1.0, 0.3, 1.0, 1.0).unwrap();
        assert_relative_eq!(c4, 2.812_452_206_061_443_6, max_relative = 1e-12);
        assert_relative_eq!(c5, 1.748_979_895_518_134, max_relative = 1e-12);
        assert_relative_eq!(c6, -3.563_151_856_912_875_3, max_relative = 1e-12);
        let closed = c456_closed_form(1.0, -1.0, 0.3, 1.0, 1.0).unwrap();
        assert_relative_eq!(closed.0, c4, max_relative = 1e-12);
        assert_relative_eq!(closed.1, c5, max_relative = 1e-12);
        assert_relative_eq!(closed.2, c6, max_relative = 1e-12);
        let g56 = gamma(-1.0 / 6.0).unwrap();
        let unpassivated = solve_c456(2.0, -1.0, 0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(unpassivated.0, -2.0 / 3.0 * g56, max_relative = 1e-14);
        assert_relative_eq!(unpassivated.1, -2.0 / 3.0 * g56, max_relative = 1e-14);
        assert_relative_eq!(unpassivated.2, 2.0 / 3f64.sqrt() * g56, max_relative = 1e-14);
        assert!(solve_c456(1.0, -5.0 / 6.0, 0.3, 1.0, 1.0).is_err());
        assert!(solve_c456(1.0, -0.5, 0.3, 1.0, 1.0).is_err());
    }

    #[test]
    fn combination_boundary_relations() {
        for (a, tau) in [(0.3, 1.0), (0.05, 3.0), (0.3, 0.01)] {
            let s = spec(a, 0.7);
            let d1 = corner_combination_origin_derivative(1, tau, &s).unwrap();
            let d3 = corner_combination_origin_derivative(3, tau, &s).unwrap();
            let d5 = corner_combination_origin_derivative(5, tau, &s).unwrap();
            let scale = d1.abs().max(d3.abs()).max(d5.abs());
            assert!((a * d1 - d3).abs() <= 1e-10 * scale);
            assert!((a * d3 - d5).abs() <= 1e-10 * scale);
            let bt: f64 = tau;
            assert_relative_eq!(d1, 0.7 * bt.powf(-1.0 - 1.0 / 6.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn combination_values() {
        let s = spec(0.3, 1.0);
        assert_relative_eq!(corner_combination(1.0, 1.0, &s).unwrap(), 0.444_130_71, max_relative = 1e-7);
        assert_relative_eq!(corner_combination(20.0, 1.0, &s).unwrap(), -0.001_101_043_2, max_relative = 1e-5);
        assert_eq!(corner_combination(1.0, 1.0, &spec(0.3, 0.0)).unwrap(), 0.0);
        let trivial = CornerSpec { r: -1.0 / 6.0, ..s };
        assert_eq!(corner_combination(0.5, 1.0, &trivial).unwrap(), 0.0);
        assert!(corner_combination(1.0, 1.0, &CornerSpec { r: -0.5, ..s }).is_err());
        assert!(CornerSpec { gamma: 5.0, ..s }.amplitude_flagged());
    }

    #[test]
    fn root_curvature_matches_series() {
        let s = spec(0.3, 0.2);
        assert_eq!(corner_root_curvature(1.0, &spec(0.3, 0.0)).unwrap(), 0.0);
        for t in [0.3f64.powi(5), 1e-2, 1.0] {
            let tau = t / 0.3f64.powi(5);
            let series = corner_combination_derivative(0.0, tau, &s, 2).unwrap() / (0.3 * 0.3);
            let closed = corner_root_curvature(t, &s).unwrap();
            assert_relative_eq!(series, closed, max_relative = 1e-8);
        }
        // the three power laws decay at most like t^{-4/3}; partial cancellation
        // between them brings the drop from t = α̂⁵ to 100 α̂⁵ to about 668
        let near = corner_root_curvature(0.3f64.powi(5), &s).unwrap();
        let far = corner_root_curvature(100.0 * 0.3f64.powi(5), &s).unwrap();
        assert_relative_eq!((near / far).abs(), 668.384_221_427_531_9, max_relative = 1e-9);
    }
}

//! Uniform composite expansion y = outer + G (+ corner), boundary-condition
//! residuals at the groove root, and groove metrics.
//!
//! Public functions take dimensional x (m) and t (s) together with
//! [`ModelParams`]; evaluation happens in the variables scaled by L0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::layers::{
    boundary_layer_derivative, corner_combination_derivative, corner_combination_origin_derivative,
    BoundaryLayerCoeffs, CornerSpec,
};
use crate::material::ModelParams;
use crate::outer::{
    mullins_profile_derivative, outer_expansion_derivative, OuterSpec, MAX_ORDER,
};
use crate::quadrature::integrate;
use crate::specfun::{gamma, DEFAULT_TOL};

/// Which pieces enter the composite expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpansionSpec {
    /// Outer order N.
    pub order: usize,
    pub include_corner: bool,
    /// Corner-layer parameters; `alpha_hat` and `b` are filled in from the model.
    pub corner: Option<CornerSpec>,
    pub tol: f64,
}

impl Default for ExpansionSpec {
    fn default() -> Self {
        Self { order: 2, include_corner: false, corner: None, tol: DEFAULT_TOL }
    }
}

impl ExpansionSpec {
    pub fn with_order(order: usize) -> Self {
        Self { order, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::Config(format!("order {} exceeds {MAX_ORDER}", self.order)));
        }
        if self.include_corner && self.corner.is_none() {
            return Err(Error::Config("include_corner needs corner parameters".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("series tolerance must be positive".into()));
        }
        Ok(())
    }

    fn outer(&self, m: f64) -> OuterSpec {
        OuterSpec { m, order: self.order, tol: self.tol }
    }

    fn corner_for(&self, params: &ModelParams) -> Option<CornerSpec> {
        if !self.include_corner || params.alpha_hat == 0.0 {
            return None;
        }
        self.corner.map(|c| CornerSpec { alpha_hat: params.alpha_hat, b: 1.0, ..c })
    }
}

fn check_params(params: &ModelParams) -> Result<()> {
    if !(params.l0 > 0.0 && params.b > 0.0 && params.alpha_hat >= 0.0) {
        return Err(Error::Config("model parameters must have L0 > 0, B > 0, alpha_hat >= 0".into()));
    }
    Ok(())
}

/// Nondimensional time t̂ = Bt/L0⁴.
fn scaled_time(t: f64, params: &ModelParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    Ok(params.t_hat(params.b * t))
}

/// k-th x̂-derivative of the composite in scaled variables.
pub fn composite_scaled_derivative(
    x_hat: f64,
    t_hat: f64,
    params: &ModelParams,
    spec: &ExpansionSpec,
    order: u32,
) -> Result<f64> {
    spec.validate()?;
    let a = params.alpha_hat;
    let outer = outer_expansion_derivative(x_hat, t_hat, &spec.outer(params.m), 1.0, a, order)?;
    let layer = boundary_layer_derivative(x_hat, t_hat, a, 1.0, params.m, order)?;
    let corner = match spec.corner_for(params) {
        Some(c) => {
            let d = corner_combination_derivative(x_hat / a, t_hat / a.powi(5), &c, order)?;
            d / a.powi(order as i32)
        }
        None => 0.0,
    };
    Ok(outer.value + layer + corner)
}

/// Composite profile y(x, t) in metres.
pub fn composite_profile(x: f64, t: f64, params: &ModelParams, spec: &ExpansionSpec) -> Result<f64> {
    composite_derivative(x, t, params, spec, 0)
}

/// ∂ᵏy/∂xᵏ of the composite in SI units.
pub fn composite_derivative(x: f64, t: f64, params: &ModelParams, spec: &ExpansionSpec, order: u32) -> Result<f64> {
    check_params(params)?;
    let t_hat = scaled_time(t, params)?;
    let v = composite_scaled_derivative(x / params.l0, t_hat, params, spec, order)?;
    Ok(v * params.l0.powi(1 - order as i32))
}

/// Mullins profile y₀(x, t) in metres, for the same parameters.
pub fn mullins_reference(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    mullins_profile_derivative(x, t, params.b, params.m, 0)
}

/// Root boundary-condition residuals in scaled variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcResiduals {
    /// |y_x − α̂ y_xxx − m/2| at the root.
    pub slope: f64,
    /// |y_xxx − α̂ y_xxxxx| at the root.
    pub flux: f64,
    /// |y_xx| at the root.
    pub curvature: f64,
}

/// Residuals of the three root conditions for the composite at time t.
pub fn bc_residuals(t: f64, params: &ModelParams, spec: &ExpansionSpec) -> Result<BcResiduals> {
    check_params(params)?;
    spec.validate()?;
    let t_hat = scaled_time(t, params)?;
    let a = params.alpha_hat;
    let outer = spec.outer(params.m);
    let corner = spec.corner_for(params);
    let d = |k: u32| -> Result<f64> {
        let o = outer_expansion_derivative(0.0, t_hat, &outer, 1.0, a, k)?.value;
        let g = boundary_layer_derivative(0.0, t_hat, a, 1.0, params.m, k)?;
        let c = match &corner {
            Some(c) => corner_combination_origin_derivative(k as usize, t_hat / a.powi(5), c)? / a.powi(k as i32),
            None => 0.0,
        };
        Ok(o + g + c)
    };
    let (d1, d2, d3, d5) = (d(1)?, d(2)?, d(3)?, d(5)?);
    Ok(BcResiduals {
        slope: (d1 - a * d3 - params.m / 2.0).abs(),
        flux: (d3 - a * d5).abs(),
        curvature: d2.abs(),
    })
}

/// y(0, t; α) − y₀(0, t) through second order in α, in metres:
/// Σ_{r=1,2} (−α)^r m Γ(3r/2 − 1/4)/(4π (Bt)^{r/2−1/4} r!) + α β₂ + α² β₄.
pub fn depth_difference(t: f64, params: &ModelParams) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("time must be positive, got {t}"));
    }
    let (alpha, m) = (params.alpha, params.m);
    let bt = params.b * t;
    let mut sum = 0.0;
    for r in 1..=2 {
        let rf = r as f64;
        let fact = if r == 1 { 1.0 } else { 2.0 };
        sum += (-alpha).powi(r) * m * gamma(1.5 * rf - 0.25)? / (4.0 * PI * bt.powf(rf / 2.0 - 0.25) * fact);
    }
    let coeffs = BoundaryLayerCoeffs::at(bt, m)?;
    Ok(sum + coeffs.amplitude(alpha))
}

/// Shape descriptors of a groove profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrooveMetrics {
    /// |y(0)|.
    pub depth: f64,
    /// Position and height of the first interior maximum.
    pub x_max: Option<f64>,
    pub y_max: Option<f64>,
    /// Position and value of the first interior minimum beyond the maximum.
    pub x_min2: Option<f64>,
    pub y_min2: Option<f64>,
    /// ∫ y dx over the evaluation window.
    pub mass: f64,
}

impl GrooveMetrics {
    pub fn is_complete(&self) -> bool {
        self.x_max.is_some() && self.x_min2.is_some()
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on [a, b].
fn golden_max(f: &mut impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let tol = 1e-12 * (a.abs() + b.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Sample abscissae on [0, x_cap]: uniform, plus a geometric cluster that puts
/// at least eight points across the layer width near the root.
pub fn adaptive_abscissae(x_cap: f64, layer_width: f64, uniform: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=uniform).map(|i| x_cap * i as f64 / uniform as f64).collect();
    if layer_width > 0.0 && layer_width < x_cap {
        let fine = layer_width / 8.0;
        let mut x = fine;
        while x < 4.0 * layer_width && x < x_cap {
            xs.push(x);
            x += fine;
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * x_cap);
    xs
}

/// Metrics of a profile given as a function on [0, x_cap]. `layer_width` is
/// the length scale that must be resolved near x = 0 (√α, or 0 if none).
pub fn groove_metrics(
    mut profile: impl FnMut(f64) -> Result<f64>,
    x_cap: f64,
    layer_width: f64,
) -> Result<GrooveMetrics> {
    if !(x_cap > 0.0 && x_cap.is_finite()) {
        return domain(format!("evaluation window must be positive, got {x_cap}"));
    }
    let xs = adaptive_abscissae(x_cap, layer_width, 800);
    let ys = xs.iter().map(|&x| profile(x)).collect::<Result<Vec<f64>>>()?;
    let depth = ys[0].abs();

    let first_max = (1..ys.len() - 1).find(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]);
    let (mut x_max, mut y_max, mut x_min2, mut y_min2) = (None, None, None, None);
    if let Some(i) = first_max {
        let (x, y) = golden_max(&mut profile, xs[i - 1], xs[i + 1])?;
        x_max = Some(x);
        y_max = Some(y);
        if let Some(k) = (i + 1..ys.len() - 1).find(|&k| ys[k] < ys[k - 1] && ys[k] <= ys[k + 1]) {
            let mut negated = |x: f64| profile(x).map(|v| -v);
            let (x, y) = golden_max(&mut negated, xs[k - 1], xs[k + 1])?;
            x_min2 = Some(x);
            y_min2 = Some(-y);
        }
    }

    let mut failure = None;
    let mut integrand = |x: f64| match profile(x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let scale = depth.max(1e-300) * x_cap;
    let mut mass = 0.0;
    let mut lo = 0.0;
    let breaks = if layer_width > 0.0 && 8.0 * layer_width < x_cap {
        vec![8.0 * layer_width, x_cap]
    } else {
        vec![x_cap]
    };
    for hi in breaks {
        mass += integrate(&mut integrand, lo, hi, 1e-13 * scale, 1e-12, 2000)?.value;
        lo = hi;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(GrooveMetrics { depth, x_max, y_max, x_min2, y_min2, mass })
}

/// Metrics of a sampled profile: extrema refined by a parabola through the
/// neighbouring samples, mass by the trapezoidal rule.
pub fn groove_metrics_sampled(xs: &[f64], ys: &[f64]) -> Result<GrooveMetrics> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return domain("sampled metrics need matching abscissae and values, at least three");
    }
    let parabola = |i: usize| -> (f64, f64) {
        let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
        let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let curv = (d12 - d01) / (x2 - x0);
        if curv == 0.0 {
            return (x1, y1);
        }
        // vertex of the interpolating parabola
        let xv = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
        let xv = xv.clamp(x0, x2);
        let yv = y1 + d01 * (xv - x1) + curv * (xv - x0) * (xv - x1);
        (xv, yv)
    };
    let first_max = (1..ys.len() - 1).find(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]);
    let (mut x_max, mut y_max, mut x_min2, mut y_min2) = (None, None, None, None);
    if let Some(i) = first_max {
        let (x, y) = parabola(i);
        x_max = Some(x);
        y_max = Some(y);
        if let Some(k) = (i + 1..ys.len() - 1).find(|&k| ys[k] < ys[k - 1] && ys[k] <= ys[k + 1]) {
            let (x, y) = parabola(k);
            x_min2 = Some(x);
            y_min2 = Some(y);
        }
    }
    let mass = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum();
    Ok(GrooveMetrics { depth: ys[0].abs(), x_max, y_max, x_min2, y_min2, mass })
}

/// Default evaluation window 8 (Bt)^{1/4}, in metres.
pub fn default_window(t: f64, params: &ModelParams) -> f64 {
    8.0 * (params.b * t).powf(0.25)
}

/// Metrics of the composite profile on the default window.
pub fn composite_metrics(t: f64, params: &ModelParams, spec: &ExpansionSpec) -> Result<GrooveMetrics> {
    groove_metrics(
        |x| composite_profile(x, t, params, spec),
        default_window(t, params),
        params.alpha.sqrt(),
    )
}

/// Metrics of the Mullins profile on the default window.
pub fn mullins_metrics(t: f64, params: &ModelParams) -> Result<GrooveMetrics> {
    groove_metrics(|x| mullins_reference(x, t, params), default_window(t, params), 0.0)
}

/// sup|composite − y₀| / sup|y₀| over the default window.
pub fn relative_sup_difference(t: f64, params: &ModelParams, spec: &ExpansionSpec) -> Result<f64> {
    let window = default_window(t, params);
    let xs = adaptive_abscissae(window, params.alpha.sqrt(), 1600);
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in xs {
        let y0 = mullins_reference(x, t, params)?;
        let y = composite_profile(x, t, params, spec)?;
        diff = diff.max((y - y0).abs());
        scale = scale.max(y0.abs());
    }
    Ok(diff / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::nondimensionalize_bt;
    use crate::outer::mullins_profile;
    use approx::assert_relative_eq;

    const ALPHA: f64 = 9.7e-16;
    const M: f64 = 0.209;

    fn fig_params(bt: f64) -> ModelParams {
        nondimensionalize_bt(ALPHA, M, bt).unwrap()
    }

    #[test]
    fn unpassivated_composite_is_mullins() {
        let p = nondimensionalize_bt(0.0, M, 1e-29).unwrap();
        for x in [0.0, 1e-8, 7e-8, 2e-7] {
            let y = composite_profile(x, 1e-29, &p, &ExpansionSpec::default()).unwrap();
            assert_relative_eq!(y, mullins_profile(x, 1e-29, 1.0, M).unwrap(), max_relative = 1e-13, epsilon = 1e-25);
        }
    }

    #[test]
    fn layer_dies_out_away_from_root() {
        // thin coating so that x = 40√α still lies inside the unclamped window
        let p = nondimensionalize_bt(ALPHA / 10.0, M, 1e-29).unwrap();
        let spec = ExpansionSpec::default();
        let x = 40.0 * p.alpha.sqrt();
        let t_hat = p.t_hat(1e-29);
        let outer = outer_expansion_derivative(x / p.l0, t_hat, &spec.outer(M), 1.0, p.alpha_hat, 0).unwrap().value;
        let y = composite_profile(x, 1e-29, &p, &spec).unwrap();
        assert!((y - outer * p.l0).abs() <= 1e-12 * y.abs());
    }

    #[test]
    fn shallower_root_and_higher_maximum() {
        let p = fig_params(1e-29);
        let spec = ExpansionSpec::default();
        let y = composite_profile(0.0, 1e-29, &p, &spec).unwrap();
        let y0 = mullins_profile(0.0, 1e-29, 1.0, M).unwrap();
        assert!(y > y0 && y < 0.0);
        let c = composite_metrics(1e-29, &p, &spec).unwrap();
        let m = mullins_metrics(1e-29, &p).unwrap();
        assert!(c.y_max.unwrap() > m.y_max.unwrap());
        assert!(c.y_min2.unwrap() < m.y_min2.unwrap());
        let shift = (c.x_max.unwrap() / m.x_max.unwrap() - 1.0).abs();
        assert!(shift <= 0.05, "x_max shift {shift}");
    }

    #[test]
    fn root_residuals() {
        let p0 = nondimensionalize_bt(0.0, M, 1.0).unwrap();
        let r = bc_residuals(1.0, &p0, &ExpansionSpec::with_order(0)).unwrap();
        assert_eq!((r.slope, r.flux), (0.0, 0.0));
        let p = nondimensionalize_bt(0.05, M, 1.0).unwrap();
        let one = bc_residuals(1.0, &p, &ExpansionSpec::with_order(1)).unwrap();
        assert!(one.curvature <= 1e-15);
        let two = bc_residuals(1.0, &p, &ExpansionSpec::with_order(2)).unwrap();
        // at N = 2 the curvature left over is α² ∂²y₂/∂x²(0) = α² Γ(13/4) m/(8π)
        let expected = 0.05f64.powi(2) * gamma(3.25).unwrap() * M / (8.0 * PI);
        assert_relative_eq!(two.curvature, expected, max_relative = 1e-10);
        assert!(two.slope <= 1e-15 && two.flux <= 1e-15);
    }

    #[test]
    fn depth_difference_identity() {
        assert_eq!(depth_difference(1e-29, &nondimensionalize_bt(0.0, M, 1e-29).unwrap()).unwrap(), 0.0);
        for bt in [3e-30, 1e-29, 2e-29] {
            let p = fig_params(bt);
            let delta = depth_difference(bt, &p).unwrap();
            let y = composite_profile(0.0, bt, &p, &ExpansionSpec::default()).unwrap();
            let y0 = mullins_profile(0.0, bt, 1.0, M).unwrap();
            assert!((delta - (y - y0)).abs() <= 1e-12 * delta.abs());
            assert!(delta > 0.0);
        }
        let p = fig_params(2e-29);
        let rel = depth_difference(2e-29, &p).unwrap() / mullins_profile(0.0, 2e-29, 1.0, M).unwrap().abs();
        assert!((rel - 0.125).abs() <= 0.02, "relative effect {rel}");
    }

    #[test]
    fn composite_mass_is_the_layer_mass() {
        // outer terms carry no mass, so ∫y = √α̂ (α̂β₂ + α̂²β₄) up to the far tail
        let p = fig_params(1e-29);
        let spec = ExpansionSpec::default();
        let window = 11.5 * p.l0;
        let mass = groove_metrics(|x| composite_profile(x, 1e-29, &p, &spec), window, ALPHA.sqrt()).unwrap().mass;
        let c = BoundaryLayerCoeffs::at(1.0, M).unwrap();
        let layer_mass = p.alpha_hat.sqrt() * c.amplitude(p.alpha_hat) * p.l0 * p.l0;
        let y0_tail = groove_metrics(|x| mullins_profile(x, 1e-29, 1.0, M), window, 0.0).unwrap().mass;
        assert!((mass - layer_mass).abs() <= 0.05 * layer_mass + y0_tail.abs() * 3.0, "{mass} vs {layer_mass}");
    }

    #[test]
    fn trend_with_annealing_time() {
        let spec = ExpansionSpec::default();
        let sups: Vec<f64> = [3e-30, 1e-29, 2e-29]
            .iter()
            .map(|&bt| relative_sup_difference(bt, &fig_params(bt), &spec).unwrap())
            .collect();
        assert!(sups[0] > sups[1] && sups[1] > sups[2], "{sups:?}");
    }

    #[test]
    fn mullins_maximum_is_self_similar() {
        let p = fig_params(1e-29);
        let a = mullins_metrics(1e-29, &p).unwrap();
        let b = mullins_metrics(16e-29, &p).unwrap();
        assert_relative_eq!(a.x_max.unwrap() / 1e-29f64.powf(0.25), b.x_max.unwrap() / 16e-29f64.powf(0.25), max_relative = 1e-8);
    }

    #[test]
    fn sampled_metrics_agree_with_callable() {
        let xs: Vec<f64> = (0..=400).map(|i| 8.0 * i as f64 / 400.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| mullins_profile(x, 1.0, 1.0, 1.0).unwrap()).collect();
        let sampled = groove_metrics_sampled(&xs, &ys).unwrap();
        let exact = groove_metrics(|x| mullins_profile(x, 1.0, 1.0, 1.0), 8.0, 0.0).unwrap();
        assert_relative_eq!(sampled.x_max.unwrap(), exact.x_max.unwrap(), max_relative = 1e-3);
        assert_relative_eq!(sampled.y_max.unwrap(), exact.y_max.unwrap(), max_relative = 1e-5);
        assert!((sampled.mass - exact.mass).abs() < 1e-4);
        let flat = groove_metrics_sampled(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!(flat.x_max.is_none() && !flat.is_complete());
    }

    #[test]
    fn corner_term_is_opt_in() {
        let p = fig_params(1e-29);
        let corner = CornerSpec { gamma: 0.1 * p.alpha_hat, ..CornerSpec::default() };
        let with = ExpansionSpec { include_corner: true, corner: Some(corner), ..ExpansionSpec::default() };
        let without = ExpansionSpec::default();
        let t = 1e-29 * p.alpha_hat.powi(5);
        let a = composite_profile(0.2 * ALPHA, t, &p, &with).unwrap();
        let b = composite_profile(0.2 * ALPHA, t, &p, &without).unwrap();
        assert!(a != b);
        let broken = ExpansionSpec { include_corner: true, corner: None, ..ExpansionSpec::default() };
        assert!(composite_profile(0.0, 1e-29, &p, &broken).is_err());
    }
}

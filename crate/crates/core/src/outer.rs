//! Outer solution: the Mullins profile y₀ and the correction terms y_r of the
//! expansion y = y₀ + Σ α^r y_r.
//!
//! All terms are self-similar. With u = x/(Bt)^{1/4} and z = u⁴/256,
//!
//! ```text
//! y₀(x,t)  = m (Bt)^{1/4}       Z(u)
//! y_r(x,t) = m (Bt)^{1/4 - r/2} Y_r(u)
//! ```
//!
//! so every evaluation goes through a similarity shape built from ₁F₃ pieces
//! and is rescaled afterwards. x-derivatives of order k pick up a further
//! factor (Bt)^{-k/4}.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;
use crate::specfun::{
    cancellation_digits, gamma, CompensatedSum, MonomialSeries, SeriesControl, SeriesResult,
    DEFAULT_TOL,
};

/// Beyond this similarity variable profiles are returned as exactly zero.
pub const U_MAX: f64 = 12.0;
/// Largest supported outer order.
pub const MAX_ORDER: usize = 8;

const Q_EVEN: [f64; 3] = [0.25, 0.5, 0.75];
const Q_ODD: [f64; 3] = [0.75, 1.25, 1.5];

/// One coefficient·u^s·₁F₃(…; u⁴/256) piece of a similarity shape.
#[derive(Debug, Clone)]
struct Piece {
    coeff: f64,
    series: MonomialSeries,
}

/// A similarity shape: linear·u + Σ pieces.
#[derive(Debug, Clone)]
pub struct SimilarityShape {
    linear: f64,
    pieces: Vec<Piece>,
}

impl SimilarityShape {
    fn piece(coeff: f64, numerator: f64, denominators: &[f64; 3], shift: u32) -> Piece {
        Piece {
            coeff,
            series: MonomialSeries::new(&[numerator], denominators, 1.0 / 256.0, 4, shift),
        }
    }

    /// `order`-th u-derivative of the shape, without clamping.
    pub fn eval(&self, u: f64, order: u32, control: SeriesControl) -> Result<SeriesResult> {
        if !(u >= 0.0 && u.is_finite()) {
            return domain(format!("similarity variable must be finite and non-negative, got {u}"));
        }
        let mut acc = CompensatedSum::new();
        let mut max_term: f64 = 0.0;
        let mut terms = 0;
        let linear = match order {
            0 => self.linear * u,
            1 => self.linear,
            _ => 0.0,
        };
        acc.add(linear);
        max_term = max_term.max(linear.abs());
        for p in &self.pieces {
            let r = p.series.derivative(u, order, control)?;
            acc.add(p.coeff * r.value);
            max_term = max_term.max(p.coeff.abs() * r.max_term_magnitude);
            terms = terms.max(r.terms_used);
        }
        let value = acc.value();
        Ok(SeriesResult {
            value,
            terms_used: terms.max(1),
            max_term_magnitude: max_term,
            cancellation_digits: cancellation_digits(max_term, value),
        })
    }

    /// As [`Self::eval`] but identically zero for u ≥ [`U_MAX`].
    pub fn eval_clamped(&self, u: f64, order: u32, control: SeriesControl) -> Result<SeriesResult> {
        if u >= U_MAX {
            return Ok(SeriesResult {
                value: 0.0,
                terms_used: 1,
                max_term_magnitude: 0.0,
                cancellation_digits: 0.0,
            });
        }
        self.eval(u, order, control)
    }

    /// Z(u) of the Mullins profile (per unit m).
    pub fn mullins() -> Self {
        let g34 = gamma(0.75).expect("Γ(3/4)");
        let g54 = gamma(1.25).expect("Γ(5/4)");
        Self {
            linear: 0.5,
            pieces: vec![
                Self::piece(-1.0 / (4.0 * SQRT_2 * g34), 0.25, &Q_ODD, 2),
                Self::piece(-1.0 / (2.0 * SQRT_2 * g54), -0.25, &Q_EVEN, 0),
            ],
        }
    }

    /// Y_r(u) of the r-th outer correction (per unit m).
    pub fn outer(r: usize) -> Result<Self> {
        if r == 0 {
            return Ok(Self::mullins());
        }
        if r > MAX_ORDER {
            return domain(format!("outer order {r} exceeds {MAX_ORDER}"));
        }
        let rf = r as f64;
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let r_fact: f64 = (1..=r).map(|k| k as f64).product();
        let a = 1.5 * rf - 0.25;
        let b = 1.5 * rf + 0.25;
        let ga = gamma(a).expect("3r/2 - 1/4 is never a pole for r >= 1");
        let gb = gamma(b).expect("3r/2 + 1/4 is never a pole for r >= 1");
        Ok(Self {
            linear: 0.0,
            pieces: vec![
                Self::piece(sign * ga / (4.0 * PI * r_fact), a, &Q_EVEN, 0),
                Self::piece(-sign * gb / (8.0 * PI * r_fact), b, &Q_ODD, 2),
            ],
        })
    }

    /// The r = 1 term written with Γ(1/4) and Γ(−1/4).
    pub fn outer_first_closed_form() -> Self {
        let g14 = gamma(0.25).expect("Γ(1/4)");
        let gm14 = gamma(-0.25).expect("Γ(-1/4)");
        Self {
            linear: 0.0,
            pieces: vec![
                Self::piece(-g14 / (16.0 * PI), 1.25, &Q_EVEN, 0),
                Self::piece(-3.0 * gm14 / (128.0 * PI), 1.75, &Q_ODD, 2),
            ],
        }
    }

    /// F̂₁(u) = f₁/(Bt)^{1/4}.
    pub fn basis_f1() -> Self {
        let g34 = gamma(0.75).expect("Γ(3/4)");
        Self {
            linear: FRAC_1_SQRT_2,
            pieces: vec![
                Self::piece(-1.0 / (2.0 * g34), 0.25, &Q_ODD, 2),
                Self::piece(1.0 / (6.0 * SQRT_2 * PI.sqrt()), 0.5, &[1.25, 1.5, 1.75], 3),
            ],
        }
    }

    /// F̂₂(u) = f₂/(Bt)^{1/4}.
    pub fn basis_f2() -> Self {
        let g54 = gamma(1.25).expect("Γ(5/4)");
        Self {
            linear: -FRAC_1_SQRT_2,
            pieces: vec![
                Self::piece(1.0 / g54, -0.25, &Q_EVEN, 0),
                Self::piece(1.0 / (6.0 * SQRT_2 * PI.sqrt()), 0.5, &[1.25, 1.5, 1.75], 3),
            ],
        }
    }
}

fn similarity_variable(x: f64, bt: f64) -> Result<f64> {
    if !(bt > 0.0 && bt.is_finite()) {
        return domain(format!("B·t must be positive, got {bt}"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return domain(format!("x must be finite and non-negative, got {x}"));
    }
    Ok(x / bt.powf(0.25))
}

/// Evaluates m·(Bt)^{p - k/4}·shape^{(k)}(u).
fn rescaled(
    shape: &SimilarityShape,
    x: f64,
    bt: f64,
    m: f64,
    power: f64,
    order: u32,
    clamp: bool,
    control: SeriesControl,
) -> Result<f64> {
    let u = similarity_variable(x, bt)?;
    let r = if clamp {
        shape.eval_clamped(u, order, control)?
    } else {
        shape.eval(u, order, control)?
    };
    Ok(m * bt.powf(power - order as f64 / 4.0) * r.value)
}

/// f₁(x, t): first member of the decaying-plus-linear similarity family.
pub fn basis_f1(x: f64, t: f64, b: f64) -> Result<f64> {
    rescaled(&SimilarityShape::basis_f1(), x, b * t, 1.0, 0.25, 0, false, SeriesControl::default())
}

/// f₂(x, t): second member of the family.
pub fn basis_f2(x: f64, t: f64, b: f64) -> Result<f64> {
    rescaled(&SimilarityShape::basis_f2(), x, b * t, 1.0, 0.25, 0, false, SeriesControl::default())
}

/// Mullins' groove profile y₀(x, t).
pub fn mullins_profile(x: f64, t: f64, b: f64, m: f64) -> Result<f64> {
    mullins_profile_derivative(x, t, b, m, 0)
}

/// ∂ᵏy₀/∂xᵏ.
pub fn mullins_profile_derivative(x: f64, t: f64, b: f64, m: f64, order: u32) -> Result<f64> {
    rescaled(&SimilarityShape::mullins(), x, b * t, m, 0.25, order, true, SeriesControl::default())
}

/// r-th outer correction y_r(x, t), r ≥ 1.
pub fn outer_term(r: usize, x: f64, t: f64, b: f64, m: f64) -> Result<f64> {
    outer_term_derivative(r, x, t, b, m, 0)
}

/// ∂ᵏy_r/∂xᵏ.
pub fn outer_term_derivative(r: usize, x: f64, t: f64, b: f64, m: f64, order: u32) -> Result<f64> {
    if r == 0 {
        return domain("outer_term needs r >= 1; use mullins_profile for r = 0");
    }
    let shape = SimilarityShape::outer(r)?;
    let power = 0.25 - 0.5 * r as f64;
    rescaled(&shape, x, b * t, m, power, order, true, SeriesControl::default())
}

/// y₁ through the Γ(1/4), Γ(−1/4) closed form.
pub fn outer_term_first_closed_form(x: f64, t: f64, b: f64, m: f64) -> Result<f64> {
    let shape = SimilarityShape::outer_first_closed_form();
    rescaled(&shape, x, b * t, m, -0.25, 0, true, SeriesControl::default())
}

/// Order and accuracy of an outer expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterSpec {
    pub m: f64,
    pub order: usize,
    pub tol: f64,
}

impl OuterSpec {
    pub fn new(m: f64, order: usize) -> Result<Self> {
        let spec = Self { m, order, tol: DEFAULT_TOL };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::Config(format!("outer order {} exceeds {MAX_ORDER}", self.order)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("series tolerance must be positive, got {}", self.tol)));
        }
        if !self.m.is_finite() {
            return Err(Error::Config("m must be finite".into()));
        }
        Ok(())
    }

    fn control(&self) -> SeriesControl {
        SeriesControl::with_tol(self.tol)
    }
}

/// Value of a truncated outer expansion and |α^N y_N|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterValue {
    pub value: f64,
    pub last_term: f64,
}

/// ∂ᵏ/∂xᵏ of y₀ + Σ_{r=1..N} α^r y_r.
pub fn outer_expansion_derivative(
    x: f64,
    t: f64,
    spec: &OuterSpec,
    b: f64,
    alpha: f64,
    order: u32,
) -> Result<OuterValue> {
    spec.validate()?;
    let bt = b * t;
    let ctl = spec.control();
    let mut acc = CompensatedSum::new();
    let mut last_term = 0.0;
    for r in 0..=spec.order {
        if r > 0 && alpha == 0.0 {
            break;
        }
        let shape = SimilarityShape::outer(r)?;
        let power = 0.25 - 0.5 * r as f64;
        let term = alpha.powi(r as i32) * rescaled(&shape, x, bt, spec.m, power, order, true, ctl)?;
        acc.add(term);
        last_term = term.abs();
    }
    Ok(OuterValue { value: acc.value(), last_term })
}

/// y₀ + Σ_{r=1..N} α^r y_r.
pub fn outer_expansion(x: f64, t: f64, spec: &OuterSpec, b: f64, alpha: f64) -> Result<OuterValue> {
    outer_expansion_derivative(x, t, spec, b, alpha, 0)
}

/// y_r by numerically inverting its cosine transform
/// (−Bt)^r m k^{6r−2} e^{−Bk⁴t}/(2 r!).
pub fn yr_quadrature_oracle(r: usize, x: f64, t: f64, b: f64, m: f64) -> Result<f64> {
    if r == 0 {
        return domain("quadrature oracle needs r >= 1");
    }
    let bt = b * t;
    let u = similarity_variable(x, bt)?;
    // in q = k (Bt)^{1/4} the transform is (−1)^r m (Bt)^{1/4−r/2} q^{6r−2} e^{−q⁴}/(2 r!)
    let p = (6 * r - 2) as i32;
    let density = |q: f64| q.powi(p) * (-q.powi(4)).exp();
    let peak_q = (p as f64 / 4.0).powf(0.25);
    let peak = density(peak_q);
    let mut q_max = peak_q;
    while density(q_max) > 1e-16 * peak {
        q_max += 0.25;
    }
    let integral = integrate(|q| density(q) * (q * u).cos(), 0.0, q_max, 1e-15 * peak, 1e-13, 4000)?;
    let r_fact: f64 = (1..=r).map(|k| k as f64).product();
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    Ok(2.0 / PI * sign * m * bt.powf(0.25 - 0.5 * r as f64) * integral.value / (2.0 * r_fact))
}

/// A function of the similarity variable that can be differentiated.
pub trait SimilarityFunction {
    fn derivative(&self, u: f64, order: u32) -> Result<f64>;
}

impl<F: Fn(f64, u32) -> Result<f64>> SimilarityFunction for F {
    fn derivative(&self, u: f64, order: u32) -> Result<f64> {
        self(u, order)
    }
}

impl SimilarityFunction for SimilarityShape {
    fn derivative(&self, u: f64, order: u32) -> Result<f64> {
        Ok(self.eval(u, order, SeriesControl::default())?.value)
    }
}

/// Z'''' − (u/4)Z' + Z/4, the similarity form of y_t + B y_xxxx = 0.
pub fn mullins_ode_residual(u: f64, profile: &impl SimilarityFunction) -> Result<f64> {
    let z = profile.derivative(u, 0)?;
    let z1 = profile.derivative(u, 1)?;
    let z4 = profile.derivative(u, 4)?;
    Ok(z4 - 0.25 * u * z1 + 0.25 * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // mpmath, m = 1, Bt = 1
    const MULLINS: [(f64, f64); 8] = [
        (0.0, -0.390_062_251_089_406_773_85),
        (0.5, -0.175_874_471_217_708_687_14),
        (1.0, -0.030_355_927_438_837_213_938),
        (2.0, 0.091_942_874_310_399_665_13),
        (4.0, 0.028_380_739_066_647_174_638),
        (8.0, 0.000_324_914_399_463_967_350_22),
        (10.0, 0.000_342_859_290_642_989_889_5),
        (11.0, -0.000_115_338_435_327_535_156_37),
    ];

    const U_GRID: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 4.0, 11.0];
    const OUTER: [[f64; 6]; 3] = [
        [
            -0.072_129_217_327_058_711,
            -0.063_219_170_962_852_488,
            -0.039_144_784_314_670_529,
            0.024_219_162_774_469_332,
            0.031_786_681_136_866_566,
            -0.000_972_193_651_644_533_19,
        ],
        [
            0.063_994_588_069_355_799,
            0.051_766_828_293_512_102,
            0.020_169_581_914_520_973,
            -0.047_027_670_246_479_413,
            0.012_591_207_949_050_397,
            0.001_278_384_607_917_907_7,
        ],
        [
            -0.109_884_354_521_691_01,
            -0.083_580_407_836_860_264,
            -0.017_960_262_119_902_614,
            0.097_625_216_728_088_544,
            -0.067_720_967_552_942_117,
            0.016_694_729_509_112_981,
        ],
    ];

    #[test]
    fn mullins_reference_values() {
        let shape = SimilarityShape::mullins();
        for (u, expected) in MULLINS {
            let v = shape.eval(u, 0, SeriesControl::default()).unwrap().value;
            assert!((v - expected).abs() <= 1e-12, "u = {u}: {v} vs {expected}");
        }
    }

    #[test]
    fn mullins_is_clamped_beyond_cap() {
        assert_eq!(mullins_profile(12.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(mullins_profile(40.0, 1.0, 1.0, 0.3).unwrap(), 0.0);
        // the unclamped tail at u = 11 is still of order 1e-4
        assert_relative_eq!(mullins_profile(11.0, 1.0, 1.0, 1.0).unwrap(), MULLINS[7].1, max_relative = 1e-6);
    }

    #[test]
    fn root_depth_and_slope() {
        let coeff = 1.0 / (2.0 * SQRT_2 * gamma(1.25).unwrap());
        assert_relative_eq!(coeff, 0.390_062_251_089_406_77, max_relative = 1e-14);
        for (bt, m) in [(1.0, 1.0), (1e-29, 0.209), (3.0, 0.1)] {
            let y = mullins_profile(0.0, bt, 1.0, m).unwrap();
            assert_relative_eq!(y, -coeff * m * f64::powf(bt, 0.25), max_relative = 1e-14);
            let slope = mullins_profile_derivative(0.0, bt, 1.0, m, 1).unwrap();
            assert_relative_eq!(slope, m / 2.0, max_relative = 1e-14);
            assert_eq!(mullins_profile_derivative(0.0, bt, 1.0, m, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn basis_functions() {
        assert_eq!(basis_f1(0.0, 1.0, 1.0).unwrap(), 0.0);
        let f2_0 = basis_f2(0.0, 16.0, 1.0).unwrap();
        assert_relative_eq!(f2_0, 2.0 / gamma(1.25).unwrap(), max_relative = 1e-15);
        assert_relative_eq!(basis_f1(1.0, 1.0, 1.0).unwrap(), 0.365_328_856_199_798_84, max_relative = 1e-13);
        assert_relative_eq!(basis_f2(1.0, 1.0, 1.0).unwrap(), 0.451_188_384_764_633_16, max_relative = 1e-13);
        for c in [2.0, 10.0] {
            let (x, t) = (0.7, 0.3);
            let s1 = basis_f1(c * x, f64::powi(c, 4) * t, 2.0).unwrap();
            assert_relative_eq!(s1, c * basis_f1(x, t, 2.0).unwrap(), max_relative = 1e-12);
            let s2 = basis_f2(c * x, f64::powi(c, 4) * t, 2.0).unwrap();
            assert_relative_eq!(s2, c * basis_f2(x, t, 2.0).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn outer_reference_values() {
        for r in 1..=3 {
            for (j, &u) in U_GRID.iter().enumerate() {
                let shape = SimilarityShape::outer(r).unwrap();
                let res = shape.eval(u, 0, SeriesControl::default()).unwrap();
                let v = res.value;
                let expected = OUTER[r - 1][j];
                // at u = 11 the accuracy is limited by the reported cancellation
                let tol = 1e-12 * expected.abs().max(1e-2) + 1e-14 * res.max_term_magnitude;
                assert!((v - expected).abs() <= tol, "r={r} u={u}: {v} vs {expected} {res:?}");
            }
        }
    }

    #[test]
    fn outer_root_values() {
        let y1 = outer_term(1, 0.0, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(y1, -0.5 * gamma(1.25).unwrap() / (4.0 * PI), max_relative = 1e-14);
        let y2 = outer_term(2, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(y2, gamma(2.75).unwrap() / (8.0 * PI), max_relative = 1e-14);
        assert!(outer_term(0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(outer_term(9, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn first_term_closed_form() {
        for i in 0..20 {
            let x = 0.45 * i as f64;
            let a = outer_term(1, x, 1.3, 1.0, 0.209).unwrap();
            let b = outer_term_first_closed_form(x, 1.3, 1.0, 0.209).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-3 * 0.209), "x = {x}");
        }
    }

    #[test]
    fn quadrature_matches_series() {
        for r in 1..=3 {
            for u in [0.0, 0.5, 1.0, 2.0, 4.0] {
                let series = outer_term(r, u, 1.0, 1.0, 1.0).unwrap();
                let quad = yr_quadrature_oracle(r, u, 1.0, 1.0, 1.0).unwrap();
                assert_relative_eq!(series, quad, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn expansion_limits() {
        let spec0 = OuterSpec::new(0.209, 0).unwrap();
        let spec3 = OuterSpec::new(0.209, 3).unwrap();
        for x in [0.0, 0.4, 1.5] {
            let y0 = mullins_profile(x, 1.0, 1.0, 0.209).unwrap();
            assert_eq!(outer_expansion(x, 1.0, &spec0, 1.0, 0.3).unwrap().value, y0);
            assert_eq!(outer_expansion(x, 1.0, &spec3, 1.0, 0.0).unwrap().value, y0);
            let full = outer_expansion(x, 1.0, &spec3, 1.0, 0.3).unwrap();
            let y3 = outer_term(3, x, 1.0, 1.0, 0.209).unwrap();
            assert_relative_eq!(full.last_term, 0.027 * y3.abs(), max_relative = 1e-12);
        }
        assert!(OuterSpec::new(0.2, 9).is_err());
    }

    #[test]
    fn ode_residuals() {
        let shape = SimilarityShape::mullins();
        let z = shape.eval(1.0, 0, SeriesControl::default()).unwrap().value;
        let res = mullins_ode_residual(1.0, &shape).unwrap();
        assert!(res.abs() <= 1e-9 * z.abs().max(1.0));
        let linear = |u: f64, k: u32| Ok(if k == 0 { u } else if k == 1 { 1.0 } else { 0.0 });
        assert_eq!(mullins_ode_residual(3.7, &linear).unwrap(), 0.0);
        let at8 = shape.eval(8.0, 0, SeriesControl::default()).unwrap();
        assert!(at8.is_reliable());
        let res8 = mullins_ode_residual(8.0, &shape).unwrap();
        assert!(res8.abs() <= 1e-16 * 10f64.powf(at8.cancellation_digits + 2.0));
    }

    #[test]
    fn self_similarity_of_corrections() {
        for r in 1..=3 {
            for c in [2.0f64, 10.0] {
                let (x, t) = (0.8, 0.5);
                let scaled = outer_term(r, c * x, c.powi(4) * t, 1.0, 1.0).unwrap();
                let base = outer_term(r, x, t, 1.0, 1.0).unwrap();
                assert_relative_eq!(scaled, c.powi(1 - 2 * r as i32) * base, max_relative = 1e-12);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn basis_identity(u in 0.0f64..10.0) {
            let y0 = mullins_profile(u, 1.0, 1.0, 1.0).unwrap();
            let f = (basis_f1(u, 1.0, 1.0).unwrap() - basis_f2(u, 1.0, 1.0).unwrap()) / (2.0 * SQRT_2);
            proptest::prop_assert!((y0 - f).abs() <= 1e-10);
        }

        #[test]
        fn mullins_solves_its_similarity_equation(u in 0.0f64..6.0) {
            let shape = SimilarityShape::mullins();
            proptest::prop_assert!(mullins_ode_residual(u, &shape).unwrap().abs() <= 1e-9);
        }
    }
}

//! Generalized hypergeometric series pFq (p ≤ q) by term recurrence.
//!
//! Everything here funnels through [`MonomialSeries`], which evaluates
//!
//! ```text
//! dⁿ/dxⁿ [ x^s · pFq(a; b; c·x^p) ]
//! ```
//!
//! by differentiating the power series term by term. The plain series and its
//! derivatives with respect to the argument are the special case s = 0,
//! p = 1, c = 1. Partial sums are accumulated with Neumaier's compensated
//! summation; the largest term seen is reported so callers can judge how much
//! cancellation the result went through.

use crate::error::{domain, Error, Result};

/// Relative tolerance used when callers do not pass one.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Maximum number of series terms before giving up.
pub const DEFAULT_TERM_BUDGET: usize = 500;
/// Results that lost more than this many digits to cancellation are flagged.
pub const UNRELIABLE_CANCELLATION_DIGITS: f64 = 12.0;

/// Consecutive negligible terms required before a series is declared converged.
const TAIL_TERMS: usize = 3;

/// Parameters a₁..a_p, b₁..b_q and argument ν of pFq(a; b; ν).
#[derive(Debug, Clone, PartialEq)]
pub struct HypArgs {
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub argument: f64,
}

impl HypArgs {
    pub fn new(numerators: &[f64], denominators: &[f64], argument: f64) -> Self {
        Self {
            numerators: numerators.to_vec(),
            denominators: denominators.to_vec(),
            argument,
        }
    }
}

/// Value of a summed series plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub max_term_magnitude: f64,
    /// log₁₀(max|term| / |value|), floored at zero.
    pub cancellation_digits: f64,
}

impl SeriesResult {
    pub fn is_reliable(&self) -> bool {
        self.cancellation_digits <= UNRELIABLE_CANCELLATION_DIGITS
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub(crate) fn cancellation_digits(max_term: f64, value: f64) -> f64 {
    if max_term == 0.0 {
        0.0
    } else if value == 0.0 {
        f64::INFINITY
    } else {
        (max_term / value.abs()).log10().max(0.0)
    }
}

/// Convergence control for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub tol: f64,
    pub term_budget: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

impl SeriesControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// The function x ↦ x^shift · pFq(a; b; scale·x^power).
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSeries {
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub scale: f64,
    pub power: u32,
    pub shift: u32,
}

fn non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// n(n-1)…(n-d+1) for integer n ≥ 0; zero when d > n.
fn falling_factorial(n: u64, d: u32) -> f64 {
    if (d as u64) > n {
        return 0.0;
    }
    (0..d as u64).fold(1.0, |acc, i| acc * (n - i) as f64)
}

impl MonomialSeries {
    pub fn new(numerators: &[f64], denominators: &[f64], scale: f64, power: u32, shift: u32) -> Self {
        Self {
            numerators: numerators.to_vec(),
            denominators: denominators.to_vec(),
            scale,
            power,
            shift,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.numerators.len() > self.denominators.len() {
            return domain(format!(
                "pFq with p = {} > q = {} is outside the entire-function regime",
                self.numerators.len(),
                self.denominators.len()
            ));
        }
        if let Some(b) = self.denominators.iter().find(|b| non_positive_integer(**b)) {
            return domain(format!("denominator parameter {b} is a pole of the series"));
        }
        if self.numerators.iter().chain(&self.denominators).any(|v| !v.is_finite())
            || !self.scale.is_finite()
        {
            return domain("non-finite series parameter");
        }
        if self.power == 0 {
            return domain("monomial series needs a positive power");
        }
        Ok(())
    }

    /// Index of the last non-zero term when some numerator is a non-positive integer.
    fn terminating_length(&self) -> Option<usize> {
        self.numerators
            .iter()
            .filter(|a| non_positive_integer(**a))
            .map(|a| (-a) as usize)
            .min()
    }

    /// Coefficient ratio T_{k+1}/T_k without the argument power.
    fn coefficient_ratio(&self, k: usize) -> f64 {
        let kf = k as f64;
        let num: f64 = self.numerators.iter().map(|a| a + kf).product();
        let den: f64 = self.denominators.iter().map(|b| b + kf).product();
        num / den * self.scale / (kf + 1.0)
    }

    /// Value of the `order`-th derivative at `x`.
    pub fn derivative(&self, x: f64, order: u32, control: SeriesControl) -> Result<SeriesResult> {
        self.validate()?;
        if !x.is_finite() {
            return domain(format!("series evaluated at non-finite point {x}"));
        }
        if x == 0.0 {
            return Ok(self.at_origin(order));
        }

        let power = self.power as u64;
        let shift = self.shift as u64;
        let x_power = x.powi(self.power as i32);
        let prefactor = x.powi(self.shift as i32 - order as i32);
        let terminating = self.terminating_length();

        let mut acc = CompensatedSum::new();
        let mut coeff = 1.0; // T_k · x^{pk}
        let mut max_term: f64 = 0.0;
        let mut small_run = 0;
        let mut last_term = 0.0;
        let budget = terminating.map_or(control.term_budget, |n| n + 1);

        for k in 0..budget.max(1) {
            let exponent = power * k as u64 + shift;
            let ff = falling_factorial(exponent, order);
            let term = coeff * ff * prefactor;
            acc.add(term);
            max_term = max_term.max(term.abs());
            last_term = term;

            let ratio = self.coefficient_ratio(k) * x_power;
            coeff *= ratio;

            if terminating.is_some() {
                continue;
            }
            if !term.is_finite() {
                return Err(Error::IterationLimit {
                    what: "hypergeometric series",
                    iterations: k + 1,
                    partial: acc.value(),
                    last_increment: term,
                });
            }
            // only count a term as negligible once the terms are shrinking
            let next_ff = falling_factorial(exponent + power, order);
            let growth = if ff > 0.0 { ratio.abs() * next_ff / ff } else { f64::INFINITY };
            if ff > 0.0 && growth < 1.0 && term.abs() <= control.tol * acc.value().abs() {
                small_run += 1;
                if small_run >= TAIL_TERMS {
                    return Ok(self.finish(acc, k + 1, max_term));
                }
            } else if ff > 0.0 && term == 0.0 && coeff == 0.0 {
                return Ok(self.finish(acc, k + 1, max_term));
            } else {
                small_run = 0;
            }
        }

        if terminating.is_some() {
            return Ok(self.finish(acc, budget, max_term));
        }
        Err(Error::IterationLimit {
            what: "hypergeometric series",
            iterations: control.term_budget,
            partial: acc.value(),
            last_increment: last_term,
        })
    }

    pub fn value(&self, x: f64, control: SeriesControl) -> Result<SeriesResult> {
        self.derivative(x, 0, control)
    }

    fn finish(&self, acc: CompensatedSum, terms_used: usize, max_term: f64) -> SeriesResult {
        let value = acc.value();
        SeriesResult {
            value,
            terms_used: terms_used.max(1),
            max_term_magnitude: max_term,
            cancellation_digits: cancellation_digits(max_term, value),
        }
    }

    /// At x = 0 only the term with exponent equal to the derivative order survives.
    fn at_origin(&self, order: u32) -> SeriesResult {
        let order_u = order as u64;
        let power = self.power as u64;
        let shift = self.shift as u64;
        let value = if order_u >= shift && (order_u - shift) % power == 0 {
            let k = ((order_u - shift) / power) as usize;
            let mut coeff = 1.0;
            for j in 0..k {
                coeff *= self.coefficient_ratio(j);
            }
            coeff * falling_factorial(order_u, order)
        } else {
            0.0
        };
        SeriesResult {
            value,
            terms_used: 1,
            max_term_magnitude: value.abs(),
            cancellation_digits: 0.0,
        }
    }
}

/// pFq(a; b; ν) summed to relative accuracy `tol`.
pub fn hyp_pfq(args: &HypArgs, tol: f64) -> Result<SeriesResult> {
    MonomialSeries::new(&args.numerators, &args.denominators, 1.0, 1, 0)
        .value(args.argument, SeriesControl::with_tol(tol))
}

/// `order`-th derivative of pFq with respect to its argument.
pub fn hyp_pfq_derivative(args: &HypArgs, order: u32, tol: f64) -> Result<SeriesResult> {
    if !(1..=6).contains(&order) {
        return domain(format!("derivative order {order} outside 1..=6"));
    }
    MonomialSeries::new(&args.numerators, &args.denominators, 1.0, 1, 0).derivative(
        args.argument,
        order,
        SeriesControl::with_tol(tol),
    )
}

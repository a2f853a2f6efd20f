//! Adaptive quadrature and the integral oracles every closed form in this
//! crate is checked against.

pub mod rules;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{symbol_psi_ell, KernelOrder};
use rules::{WG10, WGK21, XGK21};

/// Default panel budget for the adaptive integrator.
pub const DEFAULT_MAX_PANELS: usize = 10_000;

/// Values the integrator can accumulate: real or complex.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<V = f64> {
    pub value: V,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    /// Absolute tolerance on the whole integral.
    pub tol: f64,
    /// Interior points where the integrand is only piecewise smooth.
    pub breakpoints: Vec<f64>,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            tol,
            breakpoints: Vec::new(),
            max_panels: DEFAULT_MAX_PANELS,
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    resabs: f64,
    seq: usize,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// One 21-point Kronrod panel with the QUADPACK error rescaling.
fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK21[10];
    let mut gauss = V::zero();
    let mut resabs = WGK21[10] * fc.magnitude();
    let mut values = [(V::zero(), V::zero()); 10];
    for (k, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK21[k];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod = kronrod + (f1 + f2) * WGK21[k];
        resabs += WGK21[k] * (f1.magnitude() + f2.magnitude());
        if k % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG10[k / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK21[10] * (fc - mean).magnitude();
    for (k, (f1, f2)) in values.iter().enumerate() {
        resasc += WGK21[k] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let h = half.abs();
    let resabs = resabs * h;
    let resasc = resasc * h;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kronrod * half, err, resabs)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`, generic
/// over real and complex integrands.
///
/// Panels start at the declared breakpoints; the panel with the largest error
/// estimate is bisected until the summed estimate drops below `tol` (or below
/// the round-off floor of the integrand magnitude).
pub fn integrate_with<V, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integrate_adaptive", format!("invalid interval [{a}, {b}]")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain("integrate_adaptive", format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut cuts: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|p| *p > a && *p < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (value, error, resabs) = gk21(&f, w[0], w[1]);
        evaluations += 21;
        heap.push(Panel { a: w[0], b: w[1], value, error, resabs, seq });
        seq += 1;
    }

    // panels whose estimate is already at their own round-off floor
    let mut settled: Vec<Panel<V>> = Vec::new();
    loop {
        let total_err: f64 = heap.iter().chain(&settled).map(|p| p.error).sum();
        let total_abs: f64 = heap.iter().chain(&settled).map(|p| p.resabs).sum();
        let floor = 50.0 * f64::EPSILON * total_abs;
        let worst_unsplittable = heap
            .peek()
            .map(|p| {
                let mid = 0.5 * (p.a + p.b);
                !(mid > p.a && mid < p.b) || (p.b - p.a) <= 1e-13 * (b - a)
            })
            .unwrap_or(true);
        if total_err <= opts.tol.max(floor) || worst_unsplittable {
            let mut panels = heap.into_vec();
            panels.append(&mut settled);
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = panels.iter().fold(V::zero(), |acc, p| acc + p.value);
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: total_err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        if worst.error <= 50.0 * f64::EPSILON * worst.resabs * (1.0 + 1e-9) {
            settled.push(worst);
            continue;
        }
        if heap.len() + settled.len() + 1 >= opts.max_panels {
            let value = heap
                .iter()
                .chain(&settled)
                .fold(worst.value, |acc, p| acc + p.value);
            return Err(Error::BudgetExceeded {
                panels: heap.len() + settled.len() + 1,
                best: value.magnitude(),
                error: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, resabs) = gk21(&f, lo, hi);
            evaluations += 21;
            heap.push(Panel { a: lo, b: hi, value, error, resabs, seq });
            seq += 1;
        }
    }
}

/// Adaptive integral of a real function over `[a, b]` to absolute tolerance
/// `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_with(f, a, b, &QuadOptions::new(tol))
}

/// Options for [`improper_damped`].
#[derive(Debug, Clone, Default)]
pub struct DampedOptions {
    /// Polynomial degree `d` in the bound `C e^{-|y|} (1 + |y|)^d`.
    pub degree: u32,
    /// Kink locations besides `y = 0`.
    pub kinks: Vec<f64>,
}

/// Half-width of the window kept by [`improper_damped`].
pub fn damped_truncation(degree: u32) -> f64 {
    let d = degree as f64;
    40.0 + d * (1.0 + d).ln()
}

/// Integral over the real line of an integrand bounded by
/// `C e^{-|y|} (1 + |y|)^degree`.
///
/// The tails beyond [`damped_truncation`] are dropped; the window is split at
/// `0`, at the declared kinks, and into panels no wider than 4.
pub fn improper_damped<V, F>(f: F, tol: f64, opts: &DampedOptions) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let t = damped_truncation(opts.degree);
    let pieces = (2.0 * t / 4.0).ceil() as usize;
    let step = 2.0 * t / pieces as f64;
    let mut quad = QuadOptions::new(tol);
    quad.breakpoints = (1..pieces).map(|k| -t + k as f64 * step).collect();
    quad.breakpoints.push(0.0);
    quad.breakpoints.extend(opts.kinks.iter().copied());
    integrate_with(f, -t, t, &quad)
}

/// Imaginary residue above which [`fourier_symbol_oracle`] refuses to return.
pub const ORACLE_IMAG_LIMIT: f64 = 1e-12;

/// `k^(l)(x)` straight from its Fourier representation,
/// `(1/2π) ∫_{-1}^{1} psi_l(t) e^{-itx} dt`, with the interval pre-split into
/// panels of width at most `π/|x|`.
pub fn fourier_symbol_oracle(ell: KernelOrder, x: f64) -> Result<QuadratureResult> {
    fourier_symbol_oracle_tol(ell, x, 1e-13)
}

pub fn fourier_symbol_oracle_tol(ell: KernelOrder, x: f64, tol: f64) -> Result<QuadratureResult> {
    let res = symbol_transform(ell, x, tol, false)?;
    let value = res.value;
    if value.im.abs() > ORACLE_IMAG_LIMIT {
        return Err(Error::NonReal {
            op: "fourier_symbol_oracle",
            imag: value.im,
            limit: ORACLE_IMAG_LIMIT,
        });
    }
    Ok(QuadratureResult {
        value: value.re,
        abs_error_estimate: res.abs_error_estimate,
        evaluations: res.evaluations,
    })
}

/// `(1/2π) ∫_{-1}^{1} s(t) e^{-itx} dt` for `s = psi_l` or its complex
/// conjugate, before any reality check.
pub fn symbol_transform(
    ell: KernelOrder,
    x: f64,
    tol: f64,
    conjugate_symbol: bool,
) -> Result<QuadratureResult<Complex64>> {
    if !x.is_finite() {
        return Err(Error::domain("fourier_symbol_oracle", "x must be finite"));
    }
    let width = if x == 0.0 {
        0.5
    } else {
        (std::f64::consts::PI / x.abs()).min(0.5)
    };
    let panels = (2.0 / width).ceil() as usize;
    let step = 2.0 / panels as f64;
    let scale = 1.0 / (2.0 * std::f64::consts::PI);
    let mut opts = QuadOptions::new(tol / scale);
    opts.breakpoints = (1..panels).map(|k| -1.0 + k as f64 * step).collect();
    opts.max_panels = DEFAULT_MAX_PANELS.max(4 * panels);
    let res = integrate_with(
        |t| {
            let s = symbol_psi_ell(ell, t);
            let s = if conjugate_symbol { s.conj() } else { s };
            s * Complex64::from_polar(1.0, -t * x)
        },
        -1.0,
        1.0,
        &opts,
    )?;
    Ok(QuadratureResult {
        value: res.value * scale,
        abs_error_estimate: res.abs_error_estimate * scale,
        evaluations: res.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_over_half_period() {
        let r = integrate_adaptive(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.abs_error_estimate < 1e-12);
    }

    #[test]
    fn linear_and_polynomial_exactness() {
        let r = integrate_adaptive(|t| t, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        // Degree 7 needs only the first panel.
        let p = |t: f64| 3.0 * t.powi(7) - t.powi(4) + 2.0 * t - 1.0;
        let r = integrate_adaptive(p, -1.0, 1.0, 1e-12).unwrap();
        assert!((r.value - (-2.0 / 5.0 - 2.0)).abs() < 1e-14);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn breakpoints_resolve_a_kink() {
        let opts = QuadOptions::new(1e-13).with_breakpoints([0.3]);
        let r = integrate_with(|t: f64| (t - 0.3).abs(), 0.0, 1.0, &opts).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(r.evaluations, 42);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_with(
            |t: f64| Complex64::from_polar(1.0, t),
            0.0,
            PI,
            &QuadOptions::new(1e-13),
        )
        .unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let mut opts = QuadOptions::new(1e-15);
        opts.max_panels = 3;
        let err = integrate_with(|t: f64| (1.0 / t).sin(), 1e-6, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { panels: 3, .. }));
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        assert!(integrate_adaptive(|t| t, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_adaptive(|t| t, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_adaptive(|t| t, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    #[test]
    fn damped_examples() {
        let opts = DampedOptions::default();
        let r = improper_damped(|y: f64| (-2.0 * y.abs()).exp(), 1e-13, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        let opts = DampedOptions { degree: 1, kinks: vec![] };
        let r = improper_damped(|y: f64| y.abs() * (-2.0 * y.abs()).exp(), 1e-13, &opts).unwrap();
        assert!((r.value - 0.5).abs() < 1e-13);
        // Self-convolution of e^{-|y|} at y = 2 has the kink at x = 2.
        let y = 2.0;
        let opts = DampedOptions { degree: 0, kinks: vec![y] };
        let r = improper_damped(|x: f64| (-x.abs() - (y - x).abs()).exp(), 1e-13, &opts).unwrap();
        assert!((r.value - 3.0 * (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn truncation_window() {
        assert_eq!(damped_truncation(0), 40.0);
        assert!((damped_truncation(7) - (40.0 + 7.0 * 8f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn oracle_order_zero() {
        let l0 = KernelOrder::new(0).unwrap();
        let r = fourier_symbol_oracle(l0, 0.0).unwrap();
        assert!((r.value - 2.0 / PI).abs() < 1e-14);
        let r = fourier_symbol_oracle(l0, PI / 2.0).unwrap();
        assert!((r.value - 4.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn oracle_is_stable_under_tolerance_halving() {
        for ell in [1, 3, 6] {
            let l = KernelOrder::new(ell).unwrap();
            for x in [0.5, 7.0, -13.0, 40.0] {
                let a = fourier_symbol_oracle_tol(l, x, 1e-11).unwrap().value;
                let b = fourier_symbol_oracle_tol(l, x, 5e-12).unwrap().value;
                assert!((a - b).abs() <= 1e-10, "l={ell} x={x}");
            }
        }
    }
}

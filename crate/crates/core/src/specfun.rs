//! Special functions behind the closed-form kernel representation.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::L_MAX;

pub type ComplexValue = Complex64;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Highest derivative order accepted by [`sinc_derivative`].
pub const MAX_SINC_ORDER: u32 = 2 * L_MAX + 4;

/// `sin(x)/x`, with the value 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// A validated `(order, point)` pair for [`sinc_derivative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincDerivativeRequest {
    order: u32,
    x: f64,
}

impl SincDerivativeRequest {
    pub fn new(order: u32, x: f64) -> Result<Self> {
        check_sinc_order(order)?;
        if !x.is_finite() {
            return Err(Error::domain("sinc_derivative", "x must be finite"));
        }
        Ok(Self { order, x })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn eval(&self) -> f64 {
        sinc_derivatives_unchecked(self.order, self.x)[self.order as usize]
    }
}

fn check_sinc_order(n: u32) -> Result<()> {
    if n > MAX_SINC_ORDER {
        return Err(Error::OrderTooLarge {
            op: "sinc_derivative",
            order: n,
            max: MAX_SINC_ORDER,
        });
    }
    Ok(())
}

/// `d^n/dx^n sinc(x)`.
pub fn sinc_derivative(n: u32, x: f64) -> Result<f64> {
    Ok(SincDerivativeRequest::new(n, x)?.eval())
}

/// All derivatives of sinc at `x` up to order `nmax`, index = order.
pub fn sinc_derivatives(nmax: u32, x: f64) -> Result<Vec<f64>> {
    SincDerivativeRequest::new(nmax, x)?;
    Ok(sinc_derivatives_unchecked(nmax, x))
}

// Three regimes. Near 0 the Taylor series; far out (|x| >= 2n) the Leibniz
// sum; in between the Leibniz sum cancels badly, so integrate
// int_0^1 t^n cos(tx + n pi/2) dt with a 64-point Gauss rule instead.
pub(crate) fn sinc_derivatives_unchecked(nmax: u32, x: f64) -> Vec<f64> {
    let ax = x.abs();
    if ax < 1.0 {
        (0..=nmax).map(|n| sinc_taylor(n, x)).collect()
    } else if ax >= 2.0 * nmax as f64 {
        sinc_leibniz(nmax, x)
    } else {
        sinc_gauss(nmax, x)
    }
}

fn sinc_taylor(n: u32, x: f64) -> f64 {
    let n = n as i64;
    let mut k = (n + 1) / 2;
    let mut j = 2 * k - n;
    // x^j / j!
    let mut t = if j == 0 { 1.0 } else { x };
    let mut sum = 0.0;
    for _ in 0..64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * t / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        t *= x * x / ((j + 1) * (j + 2)) as f64;
        j += 2;
        k += 1;
    }
    sum
}

fn sin_shift(m: u32, s: f64, c: f64) -> f64 {
    // d^m/dx^m sin x
    match m % 4 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

fn sinc_leibniz(nmax: u32, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let inv = 1.0 / x;
    (0..=nmax)
        .map(|n| {
            // sum_j n!/(n-j)! (-1)^j x^{-j-1} sin^{(n-j)}(x)
            let mut coef = inv;
            let mut sum = 0.0;
            for j in 0..=n {
                sum += coef * sin_shift(n - j, s, c);
                coef *= -((n - j) as f64) * inv;
            }
            sum
        })
        .collect()
}

fn sinc_gauss(nmax: u32, x: f64) -> Vec<f64> {
    let (nodes, weights) = crate::quadrature::rules::gauss_legendre_unit_64();
    let mut out = vec![0.0; nmax as usize + 1];
    for (&t, &w) in nodes.iter().zip(weights) {
        let (s, c) = (t * x).sin_cos();
        let mut tp = w;
        for (n, slot) in out.iter_mut().enumerate() {
            // cos(tx + n pi/2)
            let v = match n % 4 {
                0 => c,
                1 => -s,
                2 => -c,
                _ => s,
            };
            *slot += tp * v;
            tp *= t;
        }
    }
    out
}

// The series is used where |z| + Re z is small, i.e. where the terms do not
// grow much beyond the result; elsewhere the continued fraction converges
// quickly.
fn in_series_region(z: Complex64) -> bool {
    let r = z.norm();
    r + z.re <= 3.5 || r <= 2.0
}

fn ein_series(z: Complex64) -> Complex64 {
    let mut t = z;
    let mut sum = z;
    let bound = z.norm();
    let mut k = 1.0_f64;
    loop {
        t = -t * z / (k + 1.0);
        k += 1.0;
        let term = t / k;
        sum += term;
        if k > bound && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if k > 4000.0 {
            break;
        }
    }
    sum
}

// e^z E1(z) = 1/(z+1 - 1/(z+3 - 4/(z+5 - ...))), modified Lentz.
fn e1_scaled_cf(z: Complex64, max_iter: usize) -> Complex64 {
    const TINY: f64 = 1e-300;
    let fix = |v: Complex64| {
        if v.norm() == 0.0 {
            Complex64::new(TINY, 0.0)
        } else {
            v
        }
    };
    let mut f = fix(z + 1.0);
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..max_iter {
        let a = -((k * k) as f64);
        let b = z + (2 * k + 1) as f64;
        d = fix(b + a * d).inv();
        c = fix(b + a / c);
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f.inv()
}

fn check_cut(op: &'static str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(op, "argument must be finite"));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut {
            op,
            re: z.re,
            im: z.im,
        });
    }
    Ok(())
}

/// `Ein(z) = ∫_0^1 (1 - e^{-tz})/t dt`, entire.
pub fn ein(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if in_series_region(z) {
        ein_series(z)
    } else {
        e1_scaled_cf(z, 5_000) * (-z).exp() + z.ln() + EULER_GAMMA
    }
}

/// Principal branch of `E1(z) = ∫_1^∞ e^{-tz}/t dt`.
pub fn e1(z: Complex64) -> Result<Complex64> {
    check_cut("e1", z)?;
    if in_series_region(z) {
        Ok(ein_series(z) - z.ln() - EULER_GAMMA)
    } else {
        Ok(e1_scaled_cf(z, 5_000) * (-z).exp())
    }
}

/// `e^z E1(z)`, never forming `e^z` for large `|Re z|`.
pub fn e1_scaled(z: Complex64) -> Result<Complex64> {
    check_cut("e1_scaled", z)?;
    if in_series_region(z) {
        if z.norm() <= 600.0 {
            Ok((ein_series(z) - z.ln() - EULER_GAMMA) * z.exp())
        } else {
            // close to the negative axis and far out: e^z would underflow
            // against an overflowing series, the fraction still converges
            Ok(e1_scaled_cf(z, 400_000))
        }
    } else {
        Ok(e1_scaled_cf(z, 5_000))
    }
}

const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `2 Re ln Gamma(a - iy)`, with `a = 1/2 - p`.
pub(crate) fn ln_gamma_abs_sq(p: f64, y: f64) -> Result<f64> {
    if !(p <= 0.5) || !p.is_finite() {
        return Err(Error::domain("gamma_abs_sq", format!("p = {p} must be <= 1/2")));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain("gamma_abs_sq", format!("y = {y} must be > 0")));
    }
    let z = Complex64::new(0.5 - p, -y);
    let mut shift = 0.0;
    let mut w = z;
    while w.re < 15.0 {
        shift += w.norm().ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        corr += pow * c;
        pow *= inv2;
    }
    let lg = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + corr;
    Ok(2.0 * (lg.re - shift))
}

/// `|Gamma(1/2 - p - iy)|²`.
pub fn gamma_abs_sq(p: f64, y: f64) -> Result<f64> {
    Ok(ln_gamma_abs_sq(p, y)?.exp())
}

/// `∫_0^∞ y^n e^{-ay} / (x + y) dy` in closed form,
/// `(-x)^n e^{ax} E1(ax) + sum_{k=1}^n (k-1)! (-x)^{n-k} a^{-k}`.
pub fn damped_moment_shifted(n: u32, a: Complex64, x: f64) -> Result<Complex64> {
    let op = "damped_moment_shifted";
    if !(a.re > 0.0) || !a.im.is_finite() || !a.re.is_finite() {
        return Err(Error::domain(op, "Re a must be positive"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(op, "x must be positive"));
    }
    let mx = -x;
    let mut sum = e1_scaled(a * x)? * mx.powi(n as i32);
    let ainv = a.inv();
    let mut apow = ainv;
    let mut fact = 1.0;
    for k in 1..=n {
        sum += apow * fact * mx.powi((n - k) as i32);
        apow *= ainv;
        fact *= k as f64;
    }
    Ok(sum)
}

/// Which trigonometric factor [`damped_trig_moment`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// `∫ e^{-|y|} |y|^m trig(x - y) dy = m!/2^{(m-1)/2} cos((m+1)π/4) trig(x)`.
pub fn damped_trig_moment(m: u32, x: f64, kind: TrigKind) -> Result<f64> {
    if m > 2 * L_MAX {
        return Err(Error::OrderTooLarge {
            op: "damped_trig_moment",
            order: m,
            max: 2 * L_MAX,
        });
    }
    let cos_table = [
        1.0,
        FRAC_1_SQRT_2,
        0.0,
        -FRAC_1_SQRT_2,
        -1.0,
        -FRAC_1_SQRT_2,
        0.0,
        FRAC_1_SQRT_2,
    ];
    let c = cos_table[((m + 1) % 8) as usize];
    if c == 0.0 {
        return Ok(0.0);
    }
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    let coef = fact * 2f64.powf((1.0 - m as f64) / 2.0) * c;
    let t = match kind {
        TrigKind::Sin => x.sin(),
        TrigKind::Cos => x.cos(),
    };
    Ok(coef * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{improper_damped, integrate_adaptive, integrate_with, DampedOptions, QuadOptions};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sinc_examples() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-16);
        assert!(close(sinc(PI / 2.0), 2.0 / PI, 1e-15));
    }

    #[test]
    fn sinc_derivative_examples() {
        assert_eq!(sinc_derivative(1, 0.0).unwrap(), 0.0);
        assert!(close(sinc_derivative(2, 0.0).unwrap(), -1.0 / 3.0, 1e-15));
        assert!(close(sinc_derivative(1, PI).unwrap(), -1.0 / PI, 1e-15));
        let h = 1e-5;
        let fd = (sinc(PI + h) - sinc(PI - h)) / (2.0 * h);
        assert!(close(fd, -1.0 / PI, 1e-9));
        assert!(matches!(
            sinc_derivative(MAX_SINC_ORDER + 1, 1.0),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    // direct quadrature of int_0^1 t^n cos(tx + n pi/2) dt
    fn sinc_oracle(n: u32, x: f64) -> f64 {
        let ph = n as f64 * PI / 2.0;
        let mut o = QuadOptions::new(1e-15);
        o.breakpoints = (1..16).map(|k| k as f64 / 16.0).collect();
        integrate_with(|t: f64| t.powi(n as i32) * (t * x + ph).cos(), 0.0, 1.0, &o)
            .unwrap()
            .value
    }

    #[test]
    fn sinc_derivatives_match_integral_representation() {
        for n in [0, 1, 2, 5, 9, 14, 20] {
            for x in [-37.0, -9.5, -1.0, -0.3, 0.0, 0.01, 0.99, 1.0, 3.0, 12.0, 39.9, 41.0, 150.0] {
                let got = sinc_derivative(n, x).unwrap();
                let want = sinc_oracle(n, x);
                assert!(close(got, want, 2e-14), "n={n} x={x} {got} {want}");
            }
        }
    }

    #[test]
    fn sinc_derivative_vector_matches_scalar() {
        for x in [0.5, 2.5, 30.0] {
            let v = sinc_derivatives(12, x).unwrap();
            for n in 0..=12 {
                assert!(close(v[n as usize], sinc_derivative(n, x).unwrap(), 1e-14));
            }
        }
    }

    #[test]
    fn ein_examples() {
        assert_eq!(ein(c(0.0, 0.0)), c(0.0, 0.0));
        assert!((ein(c(1.0, 0.0)) - 0.796_599_599_297_053_1).norm() < 1e-15);
        let rel = ein(c(1.0, 0.0)) - (e1(c(1.0, 0.0)).unwrap() + EULER_GAMMA);
        assert!(rel.norm() < 1e-15);
    }

    #[test]
    fn e1_examples() {
        // int_0^inf e^{-(1+s)}/(1+s) ds
        let oracle = integrate_adaptive(|s| (-(1.0 + s)).exp() / (1.0 + s), 0.0, 60.0, 1e-15)
            .unwrap()
            .value;
        let v = e1(c(1.0, 0.0)).unwrap();
        assert!((v.re - oracle).abs() < 1e-14 && v.im == 0.0);
        assert!((v.re - 0.219_383_934_395_520_3).abs() < 1e-15);
        let z = c(1.0, 1.0);
        assert!((e1(z.conj()).unwrap() - e1(z).unwrap().conj()).norm() < 1e-16);
        let z = c(-1.0, 1.0);
        let rel = ein(z) - z.ln() - EULER_GAMMA;
        assert!((e1(z).unwrap() - rel).norm() < 1e-15);
        assert!(matches!(e1(c(-2.0, 0.0)), Err(Error::BranchCut { .. })));
        assert!(matches!(e1(c(0.0, 0.0)), Err(Error::BranchCut { .. })));
    }

    // E1(z) = int_0^inf e^{-z(1+s)}/(1+s) ds for Re z > 0
    fn e1_oracle(z: Complex64) -> Complex64 {
        let o = QuadOptions::new(1e-15).with_breakpoints((1..40).map(|k| k as f64 * 0.5));
        integrate_with(
            |s: f64| (-z * (1.0 + s)).exp() / (1.0 + s),
            0.0,
            80.0 / z.re,
            &o,
        )
        .unwrap()
        .value
    }

    #[test]
    fn e1_matches_integral_in_right_half_plane() {
        for z in [c(0.5, 0.0), c(1.0, 3.0), c(2.0, -0.5), c(4.0, 4.0), c(0.8, 10.0), c(7.0, 1.0)] {
            let got = e1(z).unwrap();
            let want = e1_oracle(z);
            assert!((got - want).norm() <= 1e-13 * want.norm(), "{z}: {got} {want}");
        }
    }

    #[test]
    fn e1_scaled_examples() {
        let v = e1_scaled(c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.596_347_362_323_194_1).abs() < 1e-15);
        let v = e1_scaled(c(50.0, 0.0)).unwrap();
        assert!((v.re - 0.019608).abs() < 1e-5 && v.im == 0.0);
        let z = c(3.0, 3.0);
        assert!((e1_scaled(z.conj()).unwrap() - e1_scaled(z).unwrap().conj()).norm() < 1e-16);
        // kernel arguments far out must not overflow
        let v = e1_scaled(c(-900.0, 900.0)).unwrap();
        let z = c(-900.0, 900.0);
        assert!(v.re.is_finite() && (v * z - 1.0 + z.inv()).norm() < 1e-5);
    }

    #[test]
    fn gamma_abs_sq_examples() {
        let rel = |a: f64, b: f64| (a / b - 1.0).abs() < 1e-13;
        assert!(rel(gamma_abs_sq(0.0, 1.0).unwrap(), PI / PI.cosh()));
        assert!((gamma_abs_sq(0.0, 1.0).unwrap() - 0.271_015).abs() < 1e-6);
        assert!(rel(gamma_abs_sq(0.5, 1.0).unwrap(), PI / PI.sinh()));
        assert!(rel(gamma_abs_sq(-0.5, 1.0).unwrap(), PI / PI.sinh()));
        assert!(gamma_abs_sq(0.6, 1.0).is_err());
        assert!(gamma_abs_sq(0.0, 0.0).is_err());
    }

    #[test]
    fn gamma_abs_sq_recurrence() {
        // |Gamma(z+1)|² = |z|² |Gamma(z)|²
        for y in [0.1, 1.0, 7.0] {
            for p in [0.5, -0.5, -2.5, -6.5] {
                let a = 0.5 - p;
                let lhs = gamma_abs_sq(p - 1.0, y).unwrap();
                let rhs = (a * a + y * y) * gamma_abs_sq(p, y).unwrap();
                assert!((lhs / rhs - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn damped_moment_examples() {
        let v = damped_moment_shifted(0, c(1.0, 0.0), 1.0).unwrap();
        assert!((v.re - 0.596_347_362_323_194_1).abs() < 1e-15);
        let v = damped_moment_shifted(1, c(1.0, 0.0), 1.0).unwrap();
        assert!((v.re - (1.0 - 0.596_347_362_323_194_1)).abs() < 1e-15);
        assert!(damped_moment_shifted(1, c(-1.0, 0.0), 1.0).is_err());
        assert!(damped_moment_shifted(1, c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn damped_moment_matches_quadrature() {
        for (n, a, x) in [(2, c(1.0, 1.0), 2.0), (0, c(0.5, -2.0), 0.3), (5, c(2.0, 0.5), 7.0), (8, c(1.0, 1.0), 10.0)] {
            let o = QuadOptions::new(1e-15).with_breakpoints((1..60).map(|k| k as f64));
            let q = integrate_with(
                |y: f64| (-a * y).exp() * y.powi(n as i32) / (x + y),
                0.0,
                60.0 / a.re + 4.0 * n as f64,
                &o,
            )
            .unwrap()
            .value;
            let got = damped_moment_shifted(n, a, x).unwrap();
            assert!((got - q).norm() <= 1e-10 * (1.0 + q.norm()), "{n} {a} {x}: {got} {q}");
        }
    }

    #[test]
    fn damped_trig_examples() {
        let q = |m: u32, x: f64, kind: TrigKind| {
            improper_damped(
                |y: f64| {
                    let t = match kind {
                        TrigKind::Sin => (x - y).sin(),
                        TrigKind::Cos => (x - y).cos(),
                    };
                    (-y.abs()).exp() * y.abs().powi(m as i32) * t
                },
                1e-14,
                &DampedOptions {
                    degree: m,
                    kinks: vec![],
                },
            )
            .unwrap()
            .value
        };
        let v = damped_trig_moment(0, 0.7, TrigKind::Sin).unwrap();
        assert!(close(v, 0.7f64.sin(), 1e-15) && close(v, q(0, 0.7, TrigKind::Sin), 1e-12));
        for x in [-3.0, 0.2, 5.0] {
            assert_eq!(damped_trig_moment(1, x, TrigKind::Sin).unwrap(), 0.0);
            assert!(q(1, x, TrigKind::Sin).abs() < 1e-12);
        }
        let v = damped_trig_moment(3, 1.0, TrigKind::Cos).unwrap();
        assert!(close(v, -3.0 * 1f64.cos(), 1e-14) && close(v, q(3, 1.0, TrigKind::Cos), 1e-11));
        for m in 0..=10 {
            let want = q(m, 1.3, TrigKind::Cos);
            let got = damped_trig_moment(m, 1.3, TrigKind::Cos).unwrap();
            assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{m}: {got} {want}");
        }
    }
}

//! The kernels `k^(l)` and the Fourier-side closed forms they are built from.
//!
//! `k^(0)(x) = (2/π) sinc(x)`. For `l >= 1` three routes are available:
//!
//! * closed form in terms of `E1(±x + ix)`, sinc derivatives and
//!   elementary functions ([`k_closed`], `x > 0` only);
//! * the convolution of `e^{-|w|} p_l(|w|)` with the derivatives of sinc
//!   ([`k_conv`]);
//! * direct quadrature of the symbol ([`crate::quadrature::fourier_symbol_oracle`]).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::combinatorics::{binomial_u64, p_poly, self_convolution_poly};
use crate::error::{Error, Result};
use crate::quadrature::{self, improper_damped, integrate_with, DampedOptions, QuadOptions};
use crate::specfun::{e1_scaled, sinc, sinc_derivatives_unchecked};
use crate::L_MAX;

/// Smallest argument accepted by [`k_closed`].
pub const X_MIN_CLOSED: f64 = 1e-3;

/// Below this the default route is the convolution.
pub const AUTO_CLOSED_FROM: f64 = 0.1;

/// The default route falls back to the convolution when the closed form's
/// own error estimate exceeds this.
pub const AUTO_CLOSED_MAX_ERROR: f64 = 1e-10;

const CONV_TOL: f64 = 1e-13;

/// Kernel index `l`, at most [`L_MAX`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelOrder(u32);

impl KernelOrder {
    pub fn new(ell: u32) -> Result<Self> {
        if ell > L_MAX {
            return Err(Error::OrderTooLarge {
                op: "kernel order",
                order: ell,
                max: L_MAX,
            });
        }
        Ok(Self(ell))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl Serialize for KernelOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

/// How a kernel value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Closed,
    Convolution,
    Oracle,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Closed => "closed",
            Route::Convolution => "convolution",
            Route::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub x: f64,
    pub value: f64,
    pub route: Route,
    pub error_estimate: f64,
}

/// Route selection for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Closed form for `x >= 0.1` when it is well conditioned, otherwise
    /// the convolution.
    #[default]
    Auto,
    Closed,
    Conv,
    Oracle,
}

/// A sample of one of the symbols on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub t: f64,
    pub value: Complex64,
}

impl SymbolValue {
    pub fn psi_ell(ell: KernelOrder, t: f64) -> Self {
        Self {
            t,
            value: symbol_psi_ell(ell, t),
        }
    }
}

/// `psi_l(t) = ((1+it)/(1-it))^l · 2·1_{[-1,1]}(t)`.
pub fn symbol_psi_ell(ell: KernelOrder, t: f64) -> Complex64 {
    if t.abs() > 1.0 || t.is_nan() {
        return Complex64::new(0.0, 0.0);
    }
    // (1+it)/(1-it) = e^{2i atan t}
    Complex64::from_polar(2.0, 2.0 * ell.get() as f64 * t.atan())
}

fn check_positive_order(op: &'static str, ell: u32) -> Result<()> {
    if ell == 0 || ell > L_MAX {
        return Err(Error::domain(op, format!("order {ell} outside [1, {L_MAX}]")));
    }
    Ok(())
}

/// Fourier transform of `xi^l`, `xi(t) = 1/(1+t²)`:
/// `(1/√(2π)) (π/2^{l-1}) e^{-|w|} p_l(|w|)`.
pub fn fourier_xi_pow(ell: u32, w: f64) -> Result<f64> {
    check_positive_order("fourier_xi_pow", ell)?;
    let p = p_poly(ell)?.eval_f64(w.abs());
    Ok(PI / (2.0 * PI).sqrt() / 2f64.powi(ell as i32 - 1) * (-w.abs()).exp() * p)
}

/// Fourier transform of `(1+it)^{2l} · 2·1_{[-1,1]}(t)`:
/// `√(8/π) sum_n C(2l,n) (-1)^n sinc^{(n)}(w)`.
pub fn fourier_psi_tilde(ell: KernelOrder, w: f64) -> f64 {
    let l = ell.get();
    let d = sinc_derivatives_unchecked(2 * l, w);
    let sum: f64 = (0..=2 * l)
        .map(|n| {
            let b = binomial_u64(2 * l, n) as f64;
            if n % 2 == 0 {
                b * d[n as usize]
            } else {
                -b * d[n as usize]
            }
        })
        .sum();
    (8.0 / PI).sqrt() * sum
}

/// `∫ |x|^l e^{-|x|} e^{-|y-x|} dx` in closed form.
pub fn exp_poly_self_convolution(ell: u32, y: f64) -> Result<f64> {
    if ell > 2 * L_MAX {
        return Err(Error::OrderTooLarge {
            op: "exp_poly_self_convolution",
            order: ell,
            max: 2 * L_MAX,
        });
    }
    Ok((-y.abs()).exp() * self_convolution_poly(ell).eval_f64(y.abs()))
}

fn p_coefficients(ell: u32) -> Vec<f64> {
    p_poly(ell).map(|p| p.to_f64()).unwrap_or_default()
}

/// `k^(l)(x)` by the convolution route,
/// `(1/(π 2^{l-1})) sum_n (-1)^n C(2l,n) ∫ e^{-|y|} p_l(|y|) sinc^{(n)}(x-y) dy`.
pub fn k_conv(ell: KernelOrder, x: f64) -> Result<KernelEvaluation> {
    if !x.is_finite() {
        return Err(Error::domain("k_conv", "x must be finite"));
    }
    let l = ell.get();
    if l == 0 {
        return Ok(KernelEvaluation {
            x,
            value: 2.0 / PI * sinc(x),
            route: Route::Convolution,
            error_estimate: 0.0,
        });
    }
    let p = p_coefficients(l);
    let signed_binom: Vec<f64> = (0..=2 * l)
        .map(|n| {
            let b = binomial_u64(2 * l, n) as f64;
            if n % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .collect();
    let scale = 1.0 / (PI * 2f64.powi(l as i32 - 1));
    let integrand = |y: f64| {
        let a = y.abs();
        let poly = p.iter().rev().fold(0.0, |acc, &c| acc * a + c);
        let d = sinc_derivatives_unchecked(2 * l, x - y);
        let s: f64 = signed_binom.iter().zip(&d).map(|(b, v)| b * v).sum();
        (-a).exp() * poly * s
    };
    let opts = DampedOptions {
        degree: l - 1,
        kinks: vec![],
    };
    let res = improper_damped(integrand, CONV_TOL / scale, &opts)?;
    Ok(KernelEvaluation {
        x,
        value: scale * res.value,
        route: Route::Convolution,
        error_estimate: scale * res.abs_error_estimate,
    })
}

/// Which half line a damped moment integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `∫_0^∞ e^{-y} y^m sinc^{(n)}(x - y) dy`
    Minus,
    /// `∫_0^∞ e^{-y} y^m sinc^{(n)}(x + y) dy`
    Plus,
}

fn sin_quarter(r: u32) -> f64 {
    [0.0, FRAC_1_SQRT_2, 1.0, FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2, -1.0, -FRAC_1_SQRT_2][(r % 8) as usize]
}

fn cos_quarter(r: u32) -> f64 {
    sin_quarter(r + 2)
}

/// Value together with the sum of the magnitudes of its terms.
#[derive(Debug, Clone, Copy, Default)]
struct Tracked {
    value: f64,
    abs: f64,
}

impl Tracked {
    fn add(&mut self, coef: f64, t: Tracked) {
        self.value += coef * t.value;
        self.abs += coef.abs() * t.abs;
    }

    fn term(&mut self, v: f64) {
        self.value += v;
        self.abs += v.abs();
    }
}

/// Everything at a fixed `x > 0` the closed form is assembled from.
struct ClosedParts {
    /// `∫_0^∞ e^{-y} y^k sinc(x ∓ y) dy`, `k = 0..=kmax`
    minus: Vec<Tracked>,
    plus: Vec<Tracked>,
    sinc_d: Vec<f64>,
}

impl ClosedParts {
    fn new(x: f64, kmax: u32, nmax: u32) -> Result<Self> {
        let rot = Complex64::from_polar(1.0, -x);
        // ∫_0^∞ e^{-y} sinc(x - y) dy = π e^{-x} + Im(e^{-ix} e^{z} E1(z)), z = -x + ix
        let minus_core = PI * (-x).exp() + (rot * e1_scaled(Complex64::new(-x, x))?).im;
        // ∫_0^∞ e^{-y} sinc(x + y) dy = -Im(e^{-ix} e^{z} E1(z)), z = x + ix
        let plus_core = -(rot * e1_scaled(Complex64::new(x, x))?).im;
        let (s, c) = x.sin_cos();
        let mut minus = Vec::with_capacity(kmax as usize + 1);
        let mut plus = Vec::with_capacity(kmax as usize + 1);
        for k in 0..=kmax {
            let xk = x.powi(k as i32);
            let mut im = Tracked::default();
            let mut ip = Tracked::default();
            im.term(minus_core * xk);
            let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
            ip.term(sk * plus_core * xk);
            let mut fact = 1.0; // (r-1)!
            for r in 1..=k {
                let c0 = fact / 2f64.powf(r as f64 / 2.0) * x.powi((k - r) as i32);
                // sin(rπ/4 - x), sin(rπ/4 + x)
                im.term(c0 * (sin_quarter(r) * c - cos_quarter(r) * s));
                let sr = if (k - r) % 2 == 0 { 1.0 } else { -1.0 };
                ip.term(sr * c0 * (sin_quarter(r) * c + cos_quarter(r) * s));
                fact *= r as f64;
            }
            minus.push(im);
            plus.push(ip);
        }
        Ok(Self {
            minus,
            plus,
            sinc_d: sinc_derivatives_unchecked(nmax, x),
        })
    }

    // Integration by parts moves the n derivatives onto e^{-y} y^m; for
    // n > m the boundary at y = 0 leaves a finite sum of sinc derivatives.
    fn moment(&self, side: Side, m: u32, n: u32) -> Tracked {
        let mut out = Tracked::default();
        for j in 0..=n.min(m) {
            let c = binomial_u64(n, j) as f64 * falling(m, j);
            match side {
                Side::Minus => {
                    let sg = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                    out.add(sg * c, self.minus[(m - j) as usize]);
                }
                Side::Plus => {
                    let sg = if j % 2 == 0 { 1.0 } else { -1.0 };
                    out.add(sg * c, self.plus[(m - j) as usize]);
                }
            }
        }
        for s in m..n {
            // s!/(s-m)!
            let c = falling(s, m) * self.sinc_d[(n - 1 - s) as usize];
            let sg = match side {
                Side::Minus => (s - m) % 2 == 0,
                Side::Plus => m % 2 == 1,
            };
            out.term(if sg { c } else { -c });
        }
        out
    }
}

// a!/(a-b)!
fn falling(a: u32, b: u32) -> f64 {
    ((a - b + 1)..=a).map(|k| k as f64).product()
}

fn damped_sinc_moment(op: &'static str, side: Side, m: u32, n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(op, "x must be positive"));
    }
    let parts = ClosedParts::new(x, m, n.max(1))?;
    Ok(parts.moment(side, m, n).value)
}

/// `∫_0^∞ e^{-y} y^m sinc^{(n)}(x ∓ y) dy` for `n <= m`, in closed form.
pub fn p_term(side: Side, m: u32, n: u32, x: f64) -> Result<f64> {
    if m >= L_MAX || n > m {
        return Err(Error::domain(
            "p_term",
            format!("need n <= m <= {}, got m = {m}, n = {n}", L_MAX - 1),
        ));
    }
    damped_sinc_moment("p_term", side, m, n, x)
}

/// `∫_0^∞ e^{-y} y^m sinc^{(n)}(x ∓ y) dy` for `n > m`, in closed form
/// including the boundary sums.
pub fn q_term(side: Side, m: u32, n: u32, x: f64) -> Result<f64> {
    if m >= L_MAX || n <= m || n > 2 * L_MAX {
        return Err(Error::domain(
            "q_term",
            format!(
                "need m < n <= {} and m <= {}, got m = {m}, n = {n}",
                2 * L_MAX,
                L_MAX - 1
            ),
        ));
    }
    damped_sinc_moment("q_term", side, m, n, x)
}

/// Integer part of the weight of the `(m, n)` term, before the division by m!.
fn closed_weight(ell: u32, m: u32, n: u32) -> f64 {
    let w = binomial_u64(2 * ell, n) * binomial_u64(2 * ell - m - 2, ell - 1) * (1u64 << m);
    let w = w as f64 / falling(m, m);
    if n % 2 == 0 {
        w
    } else {
        -w
    }
}

/// `k^(l)(x)` from the explicit representation,
/// `(1/(π 2^{2l-2})) sum_{m<l} sum_{n<=2l} (-1)^n C(2l,n) (2^m/m!) C(2l-m-2, l-1) [M^-_{m,n} + M^+_{m,n}]`.
///
/// `error_estimate` is a rounding bound from the magnitudes of the summed
/// terms; it grows roughly like `x^{l-1}`.
pub fn k_closed(ell: KernelOrder, x: f64) -> Result<KernelEvaluation> {
    let l = ell.get();
    if l == 0 {
        return Err(Error::domain("k_closed", "order must be positive"));
    }
    if !(x >= X_MIN_CLOSED) || !x.is_finite() {
        return Err(Error::domain(
            "k_closed",
            format!("x = {x} below {X_MIN_CLOSED}; use the convolution route"),
        ));
    }
    let parts = ClosedParts::new(x, l - 1, 2 * l)?;
    let mut total = Tracked::default();
    for m in 0..l {
        for n in 0..=2 * l {
            let w = closed_weight(l, m, n);
            let mut pair = parts.moment(Side::Minus, m, n);
            let plus = parts.moment(Side::Plus, m, n);
            pair.value += plus.value;
            pair.abs += plus.abs;
            total.add(w, pair);
        }
    }
    let scale = 1.0 / (PI * 2f64.powi(2 * l as i32 - 2));
    Ok(KernelEvaluation {
        x,
        value: scale * total.value,
        route: Route::Closed,
        error_estimate: 64.0 * f64::EPSILON * scale * total.abs,
    })
}

/// Leading large-`x` behaviour `(2/π) sin(x - lπ/2) / x`.
pub fn k_asymptotic(ell: KernelOrder, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain("k_asymptotic", "x must be finite and nonzero"));
    }
    let (s, c) = x.sin_cos();
    let shifted = match ell.get() % 4 {
        0 => s,
        1 => -c,
        2 => -s,
        _ => c,
    };
    Ok(2.0 / PI * shifted / x)
}

/// `k^(l)(x)` by the requested route.
pub fn evaluate(ell: KernelOrder, x: f64, method: Method) -> Result<KernelEvaluation> {
    if !x.is_finite() {
        return Err(Error::domain("kernel", "x must be finite"));
    }
    if ell.get() == 0 && method != Method::Oracle {
        let route = if method == Method::Closed {
            Route::Closed
        } else {
            Route::Convolution
        };
        return Ok(KernelEvaluation {
            x,
            value: 2.0 / PI * sinc(x),
            route,
            error_estimate: 0.0,
        });
    }
    match method {
        Method::Closed => k_closed(ell, x),
        Method::Conv => k_conv(ell, x),
        Method::Oracle => {
            let r = quadrature::fourier_symbol_oracle(ell, x)?;
            Ok(KernelEvaluation {
                x,
                value: r.value,
                route: Route::Oracle,
                error_estimate: r.abs_error_estimate,
            })
        }
        Method::Auto => {
            if x >= AUTO_CLOSED_FROM {
                let c = k_closed(ell, x)?;
                if c.error_estimate <= AUTO_CLOSED_MAX_ERROR {
                    return Ok(c);
                }
            }
            k_conv(ell, x)
        }
    }
}

/// Zero of `k` near the guess `z`, or `z` itself when no sign change is
/// bracketed nearby.
fn refine_zero(f: &impl Fn(f64) -> Result<f64>, z: f64, lo_limit: f64, hi_limit: f64) -> Result<f64> {
    let mut a = (z - 0.4).max(lo_limit);
    let mut b = (z + 0.4).min(hi_limit);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa * fb >= 0.0 {
        return Ok(z);
    }
    // Illinois
    let mut side = 0;
    for _ in 0..40 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc == 0.0 || (b - a).abs() < 1e-12 {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        b = c;
        fb = fc;
    }
    Ok(b)
}

/// `∫_0^X |k^(l)(x)|^p dx`, split at the zeros of `k^(l)`.
pub fn lp_diagnostic(ell: u32, p: f64, upper: f64) -> Result<f64> {
    check_positive_order("lp_diagnostic", ell)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain("lp_diagnostic", "p must be >= 1"));
    }
    if !(upper > 0.0) || !upper.is_finite() {
        return Err(Error::domain("lp_diagnostic", "X must be positive"));
    }
    let order = KernelOrder::new(ell)?;
    let k = |x: f64| evaluate(order, x, Method::Auto).map(|e| e.value);
    // zeros sit close to lπ/2 + jπ
    let mut breaks = Vec::new();
    let mut j = 0i64;
    loop {
        let z = ell as f64 * PI / 2.0 + j as f64 * PI;
        if z >= upper - 0.5 {
            break;
        }
        if z > 1.0 {
            breaks.push(refine_zero(&k, z, 0.5, upper)?);
        }
        j += 1;
    }
    breaks.retain(|&b| b > 0.0 && b < upper);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut opts = QuadOptions::new(1e-9 * (1.0 + upper.ln()));
    opts.max_panels = 20 * (breaks.len() + 1) + quadrature::DEFAULT_MAX_PANELS;
    opts.breakpoints = breaks;
    // errors inside the integrand cannot propagate through the integrator
    let failure = std::cell::Cell::new(None);
    let res = integrate_with(
        |x: f64| match k(x) {
            Ok(v) => v.abs().powf(p),
            Err(e) => {
                failure.replace(Some(e));
                0.0
            }
        },
        0.0,
        upper,
        &opts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(res.value)
}

//! Check suites behind `hankel-spectra verify`.
//!
//! Every check yields one [`CheckRecord`]. Float checks pass when
//! `measured <= threshold`; exact checks carry threshold `0` and pass only on
//! equality; the few lower-bound checks say so in their name. A tolerance
//! override replaces the default threshold of every float upper-bound check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::combinatorics::{
    all_positive, alternating_factorial_identity, p_poly, p_poly_recurrence, self_convolution_poly,
    sum_identity, SumKind,
};
use crate::error::{Error, Result};
use crate::kernels::{
    exp_poly_self_convolution, fourier_psi_tilde, fourier_xi_pow, k_closed, k_conv, lp_diagnostic, p_term,
    q_term, Side,
};
use crate::operators::{
    block_decompose_even, block_decompose_odd, block_targets, cauchy_positivity, hilbert_type, spectrum_report,
    symm_eigen, v_map,
};
use crate::quadrature::{
    fourier_symbol_oracle, improper_damped, integrate_adaptive, integrate_with, DampedOptions, QuadOptions,
};
use crate::specfun::{
    damped_moment_shifted, damped_trig_moment, e1, ein, gamma_abs_sq, sinc, sinc_derivatives, TrigKind,
    EULER_GAMMA,
};
use crate::spectral::{density_rho, diagonalization_of, multiplier_h};
use crate::{KernelOrder, L_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Fourier,
    Kernels,
    Operators,
    Spectral,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identities,
        Suite::Fourier,
        Suite::Kernels,
        Suite::Operators,
        Suite::Spectral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Fourier => "fourier",
            Suite::Kernels => "kernels",
            Suite::Operators => "operators",
            Suite::Spectral => "spectral",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::domain("verify", format!("unknown suite {s:?}")))
    }
}

/// One verification outcome. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub tol_override: Option<f64>,
    pub all_pass: bool,
    pub records: Vec<CheckRecord>,
}

/// Sizes used by the operators suite.
pub const BLOCK_SIZE: usize = 64;
pub const SPECTRUM_SIZE: usize = 256;

/// Largest eigenvalue of the `l = 0` section at [`SPECTRUM_SIZE`], pinned.
pub const PINNED_MAX_EIG_256: f64 = 0.892_65;

struct Checks {
    tol: Option<f64>,
    records: Vec<CheckRecord>,
}

impl Checks {
    fn upper(&mut self, name: String, anchor: &'static str, measured: f64, default: f64) {
        let threshold = self.tol.unwrap_or(default);
        self.records.push(CheckRecord {
            name,
            paper_anchor: anchor,
            measured,
            threshold,
            pass: measured <= threshold,
        });
    }

    // not affected by the override
    fn fixed(&mut self, name: String, anchor: &'static str, measured: f64, threshold: f64, pass: bool) {
        self.records.push(CheckRecord {
            name,
            paper_anchor: anchor,
            measured,
            threshold,
            pass,
        });
    }

    fn exact(&mut self, name: String, anchor: &'static str, equal: bool, gap: f64) {
        let measured = if equal { 0.0 } else { gap.abs().max(f64::MIN_POSITIVE) };
        self.fixed(name, anchor, measured, 0.0, equal);
    }
}

/// Runs one suite. Numerical failures inside a check abort the run.
pub fn run_suite(suite: Suite, tol: Option<f64>) -> Result<VerifyReport> {
    if let Some(t) = tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("verify", format!("tol = {t} must be positive")));
        }
    }
    let mut c = Checks { tol, records: vec![] };
    match suite {
        Suite::Identities => identities(&mut c)?,
        Suite::Fourier => fourier(&mut c)?,
        Suite::Kernels => kernels(&mut c)?,
        Suite::Operators => operators(&mut c)?,
        Suite::Spectral => spectral(&mut c)?,
    }
    Ok(VerifyReport {
        suite,
        tol_override: tol,
        all_pass: c.records.iter().all(|r| r.pass),
        records: c.records,
    })
}

fn identities(c: &mut Checks) -> Result<()> {
    for kind in [SumKind::Cosine, SumKind::Even, SumKind::Odd] {
        for ell in 1..=20 {
            let (lhs, rhs) = sum_identity(kind, ell)?;
            let gap = lhs.to_f64() - rhs.to_f64();
            c.exact(
                format!("sum_identity kind={} ell={ell}", kind as u8),
                "binomial sums fixing the asymptotic constant",
                lhs == rhs,
                gap,
            );
        }
    }
    for m in 1..=16 {
        for r in 1..=m {
            let (lhs, rhs) = alternating_factorial_identity(m, r)?;
            let gap = (&lhs - &rhs).abs().to_f64().unwrap_or(f64::INFINITY);
            c.exact(
                format!("alternating_factorial m={m} r={r}"),
                "alternating factorial sum behind the boundary terms",
                lhs == rhs,
                gap,
            );
        }
    }
    for ell in 1..=L_MAX {
        let p = p_poly(ell)?;
        let bad = p.coefficients().iter().filter(|v| !v.is_positive()).count();
        c.exact(
            format!("p_poly positive coefficients ell={ell}"),
            "polynomial p_l in the Fourier transform of (1+t^2)^-l",
            all_positive(&p),
            bad as f64,
        );
    }
    for ell in 1..L_MAX {
        let (next, conv) = p_poly_recurrence(ell)?;
        c.exact(
            format!("p_poly recurrence ell={ell}"),
            "polynomial p_l in the Fourier transform of (1+t^2)^-l",
            next == conv,
            (next.eval_f64(1.0) - conv.eval_f64(1.0)).abs(),
        );
    }
    for k in 0..=2 * L_MAX {
        let q = self_convolution_poly(k);
        c.exact(
            format!("self_convolution_poly positive k={k}"),
            "self-convolution of |x|^l e^-|x|",
            all_positive(&q),
            q.coefficients().iter().filter(|v| !v.is_positive()).count() as f64,
        );
    }
    Ok(())
}

// (1/√(2π)) ∫ cos(ws)/(1+s²)^l ds: window [-T, T] plus three terms of the
// integration-by-parts tail; w = 0 goes through s = tan θ
fn xi_pow_oracle(ell: u32, w: f64) -> Result<f64> {
    let w = w.abs();
    let l = ell as i32;
    let total = if w == 0.0 {
        integrate_adaptive(|th: f64| th.cos().powi(2 * l - 2), -PI / 2.0, PI / 2.0, 1e-15)?.value
    } else {
        let t = 2000.0;
        let mut o = QuadOptions::new(1e-14);
        o.breakpoints = (1..(t * w / PI).ceil() as usize).map(|k| k as f64 * PI / w).collect();
        o.max_panels = 200_000;
        let window = integrate_with(|s: f64| (w * s).cos() / (1.0 + s * s).powi(l), 0.0, t, &o)?.value;
        let u = 1.0 + t * t;
        let lf = ell as f64;
        let f0 = u.powi(-l);
        let f1 = -2.0 * lf * t * u.powi(-l - 1);
        let f2 = -2.0 * lf * u.powi(-l - 1) + 4.0 * lf * (lf + 1.0) * t * t * u.powi(-l - 2);
        let (sn, cs) = (w * t).sin_cos();
        let tail = -f0 * sn / w - f1 * cs / (w * w) + f2 * sn / (w * w * w);
        2.0 * (window + tail)
    };
    Ok(total / (2.0 * PI).sqrt())
}

// (1/√(2π)) ∫_{-1}^{1} 2 (1+it)^{2l} e^{-itw} dt
fn psi_tilde_oracle(ell: u32, w: f64) -> Result<f64> {
    let mut o = QuadOptions::new(1e-14);
    o.breakpoints = (1..16).map(|k| -1.0 + k as f64 / 8.0).collect();
    let v = integrate_with(
        |t: f64| {
            let z = Complex64::new(1.0, t).powu(2 * ell) * Complex64::from_polar(1.0, -t * w);
            2.0 * z.re
        },
        -1.0,
        1.0,
        &o,
    )?;
    Ok(v.value / (2.0 * PI).sqrt())
}

const FOURIER_GRID: [f64; 4] = [0.0, 0.5, 1.0, 3.0];

fn fourier(c: &mut Checks) -> Result<()> {
    for ell in 1..=6 {
        for w in FOURIER_GRID {
            let d = (fourier_xi_pow(ell, w)? - xi_pow_oracle(ell, w)?).abs();
            c.upper(
                format!("fourier_xi_pow ell={ell} w={w}"),
                "Fourier transform of (1+t^2)^-l",
                d,
                1e-10,
            );
        }
    }
    for ell in 0..=6 {
        for w in FOURIER_GRID.into_iter().chain([-1.5]) {
            let d = (fourier_psi_tilde(KernelOrder::new(ell)?, w) - psi_tilde_oracle(ell, w)?).abs();
            c.upper(
                format!("fourier_psi_tilde ell={ell} w={w}"),
                "Fourier transform of (1+it)^2l on [-1,1] as a sinc-derivative sum",
                d,
                1e-10,
            );
        }
    }
    for x in [0.0, 0.5, PI / 2.0, 7.0, 40.0] {
        let d = (fourier_symbol_oracle(KernelOrder::new(0)?, x)?.value - 2.0 / PI * sinc(x)).abs();
        c.upper(
            format!("symbol oracle ell=0 x={x}"),
            "kernel as Fourier integral of the symbol",
            d,
            1e-10,
        );
    }
    Ok(())
}

// ∫_0^∞ e^{-y} y^m sinc^(n)(x ∓ y) dy
fn moment_oracle(side: Side, m: u32, n: u32, x: f64) -> Result<f64> {
    let opts = DampedOptions { degree: m, kinks: vec![] };
    let f = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let arg = match side {
            Side::Minus => x - y,
            Side::Plus => x + y,
        };
        let d = sinc_derivatives(n, arg).map(|v| v[n as usize]).unwrap_or(f64::NAN);
        (-y).exp() * y.powi(m as i32) * d
    };
    Ok(improper_damped(f, 1e-14, &opts)?.value)
}

fn kernels(c: &mut Checks) -> Result<()> {
    let anchor_conv = "self-convolution of |x|^l e^-|x|";
    for (ell, y) in [(0, 0.0), (0, 2.0), (1, 0.0), (2, 1.5), (5, -3.0), (8, 0.7), (16, 4.0)] {
        let got = exp_poly_self_convolution(ell, y)?;
        let opts = DampedOptions {
            degree: ell,
            kinks: vec![y],
        };
        let want = improper_damped(
            |x: f64| x.abs().powi(ell as i32) * (-x.abs()).exp() * (-(y - x).abs()).exp(),
            1e-14,
            &opts,
        )?
        .value;
        c.upper(
            format!("exp_poly_self_convolution ell={ell} y={y} (relative)"),
            anchor_conv,
            (got - want).abs() / want.abs(),
            1e-9,
        );
    }
    let anchor_trig = "damped trigonometric moments";
    for (m, x, kind) in [
        (0, 0.7, TrigKind::Sin),
        (1, 2.0, TrigKind::Sin),
        (3, 1.0, TrigKind::Cos),
        (6, -0.4, TrigKind::Sin),
        (9, 2.5, TrigKind::Cos),
    ] {
        let got = damped_trig_moment(m, x, kind)?;
        let opts = DampedOptions { degree: m, kinks: vec![] };
        let want = improper_damped(
            |y: f64| {
                let t = match kind {
                    TrigKind::Sin => (x - y).sin(),
                    TrigKind::Cos => (x - y).cos(),
                };
                (-y.abs()).exp() * y.abs().powi(m as i32) * t
            },
            1e-14,
            &opts,
        )?
        .value;
        let name = match kind {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
        };
        c.upper(
            format!("damped_trig_moment m={m} x={x} {name}"),
            anchor_trig,
            (got - want).abs() / (1.0 + want.abs()),
            1e-9,
        );
    }
    let anchor_moment = "one-sided damped sinc-derivative moments";
    let cases = [
        (Side::Minus, 0, 0, 1.0),
        (Side::Plus, 0, 0, 1.0),
        (Side::Minus, 2, 1, 2.0),
        (Side::Minus, 0, 1, 1.0),
        (Side::Plus, 0, 1, 1.0),
        (Side::Minus, 1, 2, 2.0),
        (Side::Plus, 3, 9, 4.0),
    ];
    for (side, m, n, x) in cases {
        let got = if n <= m {
            p_term(side, m, n, x)?
        } else {
            q_term(side, m, n, x)?
        };
        let s = match side {
            Side::Minus => "-",
            Side::Plus => "+",
        };
        c.upper(
            format!("moment {s} m={m} n={n} x={x}"),
            anchor_moment,
            (got - moment_oracle(side, m, n, x)?).abs(),
            1e-9,
        );
    }
    for n in 0..=4 {
        for a in [Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, -1.0)] {
            for x in [0.5, 1.0, 2.0, 5.0] {
                let got = damped_moment_shifted(n, a, x)?;
                let mut o = QuadOptions::new(1e-14);
                o.breakpoints = (1..60).map(|k| k as f64).collect();
                let want = integrate_with(
                    |y: f64| (-a * y).exp() * y.powi(n as i32) / (x + y),
                    0.0,
                    80.0 / a.re,
                    &o,
                )?
                .value;
                c.upper(
                    format!("damped_moment_shifted n={n} a={a} x={x}"),
                    "shifted damped moment through e^z E1(z)",
                    (got - want).norm(),
                    1e-9,
                );
            }
        }
    }
    for ell in 1..=6 {
        let order = KernelOrder::new(ell)?;
        for x in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let a = k_closed(order, x)?.value;
            let b = k_conv(order, x)?.value;
            let o = fourier_symbol_oracle(order, x)?.value;
            let d = (a - b).abs().max((a - o).abs()).max((b - o).abs());
            c.upper(
                format!("kernel routes ell={ell} x={x}"),
                "explicit kernel formula, convolution form and symbol Fourier integral",
                d,
                1e-8,
            );
        }
    }
    for ell in 0..=4 {
        let order = KernelOrder::new(ell)?;
        let e = |x: f64| -> Result<f64> {
            let k = crate::kernels::evaluate(order, x, Default::default())?.value;
            Ok((x * k - 2.0 / PI * (x - ell as f64 * PI / 2.0).sin()).abs())
        };
        let (e10, e1000) = (e(10.0)?, e(1000.0)?);
        if ell == 0 {
            // the asymptotic form is exact for l = 0
            c.fixed(
                "asymptotic error ell=0 x=10 (exact form)".into(),
                "large-x asymptotics of k^(l)",
                e10,
                1e-14,
                e10 <= 1e-14,
            );
        } else {
            c.fixed(
                format!("asymptotic error decreasing ell={ell} (E(1000)/E(10) < 1)"),
                "large-x asymptotics of k^(l)",
                e1000 / e10,
                1.0,
                e1000 < e10,
            );
        }
        c.fixed(
            format!("asymptotic error ell={ell} x=1000"),
            "large-x asymptotics of k^(l)",
            e1000,
            0.01,
            e1000 <= 0.01,
        );
    }
    let (slope, resid) = l1_log_fit()?;
    let anchor_lp = "k^(l) not integrable but square integrable";
    c.fixed("l1 log-growth slope (> 0)".into(), anchor_lp, slope, 0.0, slope > 0.0);
    c.fixed("l1 log-growth fit relative residual".into(), anchor_lp, resid, 0.2, resid < 0.2);
    let d = (lp_diagnostic(1, 2.0, 1e3)? - lp_diagnostic(1, 2.0, 1e2)?).abs();
    c.fixed("l2 mass between 1e2 and 1e3".into(), anchor_lp, d, 0.05, d <= 0.05);
    Ok(())
}

/// Least-squares fit of `∫_0^X |k^(1)|` at `X = 10², 10³, 10⁴` by `c·ln X`.
/// Returns `c` and the relative residual `‖v - c ln X‖ / ‖v‖`.
pub fn l1_log_fit() -> Result<(f64, f64)> {
    let xs = [1e2, 1e3, 1e4];
    let mut v = [0.0; 3];
    for (vi, &x) in v.iter_mut().zip(&xs) {
        *vi = lp_diagnostic(1, 1.0, x)?;
    }
    let lx: Vec<f64> = xs.iter().map(|x: &f64| x.ln()).collect();
    let slope = lx.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / lx.iter().map(|a| a * a).sum::<f64>();
    let res: f64 = lx.iter().zip(&v).map(|(a, b)| (b - slope * a).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    Ok((slope, res / norm))
}

fn operators(c: &mut Checks) -> Result<()> {
    let anchor_blocks = "parity block decomposition of the Hankel sections";
    for m in 0..=3 {
        for cert in [block_decompose_even(m, BLOCK_SIZE)?, block_decompose_odd(m, BLOCK_SIZE)?] {
            let ell = cert.ell;
            c.upper(
                format!("blocks ell={ell} N={BLOCK_SIZE} deviation"),
                anchor_blocks,
                cert.max_abs_deviation,
                1e-13,
            );
            c.exact(
                format!("blocks ell={ell} N={BLOCK_SIZE} vanishing blocks"),
                anchor_blocks,
                cert.cross_block_max == 0.0,
                cert.cross_block_max,
            );
        }
    }
    for p in [0.5, -0.5, -1.5] {
        let alt = hilbert_type(p, BLOCK_SIZE, true)?.matrix;
        let plain = hilbert_type(p, BLOCK_SIZE, false)?.matrix;
        let d = v_map(BLOCK_SIZE).conjugate(&alt).max_abs_diff(&plain);
        c.exact(
            format!("V conjugation p={p} N={BLOCK_SIZE}"),
            "sign flip V between alternating and plain Hilbert-type matrices",
            d == 0.0,
            d,
        );
    }
    let anchor_spec = "compressions of a contraction with spectrum [-1,1]";
    for ell in 0..=4 {
        let r = spectrum_report(KernelOrder::new(ell)?, SPECTRUM_SIZE)?;
        c.upper(
            format!("containment ell={ell} N={SPECTRUM_SIZE}"),
            anchor_spec,
            r.containment_violation,
            1e-9,
        );
        if ell % 2 == 1 {
            let e = &r.eigenvalues;
            let d = e
                .iter()
                .zip(e.iter().rev())
                .map(|(a, b)| (a + b).abs())
                .fold(0.0, f64::max);
            c.upper(format!("negation symmetry ell={ell} N={SPECTRUM_SIZE}"), anchor_spec, d, 1e-10);
        }
        if ell == 0 {
            c.fixed(
                format!("max eigenvalue ell=0 N={SPECTRUM_SIZE} pinned"),
                anchor_spec,
                (r.max - PINNED_MAX_EIG_256).abs(),
                5e-5,
                (r.max - PINNED_MAX_EIG_256).abs() <= 5e-5,
            );
        }
    }
    let anchor_hilbert = "positivity and norm pi of Hilbert-type matrices";
    for p in [0.5, -0.5, -1.5] {
        let cert = cauchy_positivity(p, SPECTRUM_SIZE)?;
        c.fixed(
            format!("Cauchy pivots p={p} N={SPECTRUM_SIZE} min log pivot (finite)"),
            anchor_hilbert,
            cert.min_log_pivot,
            f64::NEG_INFINITY,
            cert.positive_definite,
        );
        let h = hilbert_type(p, SPECTRUM_SIZE, false)?.matrix;
        let eig = symm_eigen(&h, 1e-12)?;
        let max = eig.last().copied().unwrap_or(0.0);
        c.fixed(
            format!("norm bound p={p} N={SPECTRUM_SIZE} (max eig < pi - 1e-6)"),
            anchor_hilbert,
            max,
            PI - 1e-6,
            max < PI - 1e-6,
        );
    }
    Ok(())
}

// Ein(z) = ∫_0^1 (1 - e^{-tz})/t dt
fn ein_oracle(z: Complex64) -> Result<Complex64> {
    let f = |t: f64| {
        let w = z * t;
        if w.norm() < 0.1 {
            // -expm1(-w)/t by its series
            let mut term = z;
            let mut sum = z;
            for k in 2..=14 {
                term = -term * w / k as f64;
                sum += term;
            }
            sum
        } else {
            (Complex64::new(1.0, 0.0) - (-w).exp()) / t
        }
    };
    let mut o = QuadOptions::new(1e-15 * (1.0 + z.norm()));
    o.breakpoints = (1..32).map(|k| k as f64 / 32.0).collect();
    Ok(integrate_with(f, 0.0, 1.0, &o)?.value)
}

/// `|z|` and `arg z` of the annulus grid used for the E1 checks.
pub const ANNULUS_RADII: [f64; 5] = [0.5, 2.0, 5.0, 10.0, 20.0];

pub fn annulus_grid() -> Vec<Complex64> {
    let mut out = vec![];
    for r in ANNULUS_RADII {
        for k in -5..=5 {
            out.push(Complex64::from_polar(r, k as f64 * PI / 6.0));
        }
        for a in [PI - 0.01, -(PI - 0.01)] {
            out.push(Complex64::from_polar(r, a));
        }
    }
    out
}

fn spectral(c: &mut Checks) -> Result<()> {
    let anchor_e1 = "E1 = Ein - log - gamma";
    for z in annulus_grid() {
        let a = e1(z)?;
        let b = ein(z) - z.ln() - EULER_GAMMA;
        // relative to the size of the terms being combined
        let scale = ein(z).norm() + z.ln().norm() + EULER_GAMMA;
        c.upper(format!("e1 vs ein z={z:.6}"), anchor_e1, (a - b).norm() / scale, 1e-11);
        let q = ein_oracle(z)?;
        let ez = ein(z);
        c.upper(
            format!("ein vs integral z={z:.6}"),
            anchor_e1,
            (ez - q).norm() / ez.norm().max(1.0),
            1e-11,
        );
    }
    let anchor_g = "reflection identities for |Gamma(1/2 - p - iy)|^2";
    for y in [0.1, 0.5, 1.0, 3.0, 8.0] {
        let py = PI * y;
        for (p, want) in [
            (0.0, PI / py.cosh()),
            (0.5, PI / (y * py.sinh())),
            (-0.5, PI * y / py.sinh()),
        ] {
            let g = gamma_abs_sq(p, y)?;
            c.upper(format!("gamma_abs_sq p={p} y={y}"), anchor_g, (g / want - 1.0).abs(), 1e-12);
        }
    }
    let anchor_rho = "closed forms of the spectral density";
    for lam in [0.01, 0.1, 1.0, 4.0, 25.0] {
        let y: f64 = f64::sqrt(lam);
        let s = (PI * y).sinh() / PI;
        let r0 = density_rho(0.0, lam)?.rho;
        c.upper(format!("density p=0 lambda={lam}"), anchor_rho, (r0 / s - 1.0).abs(), 1e-12);
        let ch = (PI * y).cosh() / (PI * y);
        let r1 = density_rho(0.5, lam)?.rho;
        c.upper(format!("density p=0.5 lambda={lam}"), anchor_rho, (r1 / ch - 1.0).abs(), 1e-12);
    }
    let anchor_h = "multiplier h(lambda) = pi / cosh(pi sqrt(lambda))";
    let grid: Vec<f64> = (0..61).map(|k| 10f64.powf(3.0 - k as f64 * 0.1)).collect();
    let vals = grid.iter().map(|&l| multiplier_h(l)).collect::<Result<Vec<_>>>()?;
    let bad = vals.windows(2).filter(|w| !(w[0] < w[1])).count() + vals.iter().filter(|&&v| !(v > 0.0 && v < PI)).count();
    c.exact("multiplier monotone and inside (0, pi)".into(), anchor_h, bad == 0, bad as f64);
    for ell in 0..=L_MAX {
        let d = diagonalization_of(KernelOrder::new(ell)?);
        let t = block_targets(ell);
        let same = d
            .blocks
            .iter()
            .zip(&t)
            .all(|(b, x)| (b.sign, b.scale, b.p) == (x.sign, x.scale, x.p));
        c.exact(
            format!("diagonalization matches block targets ell={ell}"),
            "unitary equivalence of K^(l) with multiplication operators",
            same,
            1.0,
        );
    }
    Ok(())
}

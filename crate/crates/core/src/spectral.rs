//! Spectral data of the diagonalized operators: the multiplier `h`, the
//! densities `rho_p`, and which blocks make up `K^(l)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelOrder;
use crate::specfun::ln_gamma_abs_sq;

/// `h(λ) = π / cosh(π√λ)`.
pub fn multiplier_h(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("multiplier_h", format!("lambda = {lambda} must be > 0")));
    }
    Ok(PI / (PI * lambda.sqrt()).cosh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralDensityPoint {
    pub p: f64,
    pub lambda: f64,
    pub rho: f64,
}

// ln sinh(a) for a > 0
fn ln_sinh(a: f64) -> f64 {
    if a < 1.0 {
        a.sinh().ln()
    } else {
        a + (-(-2.0 * a).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// `rho_p(λ) = (1/(2π²)) sinh(2π√λ) |Gamma(1/2 - p - i√λ)|²`, assembled in
/// logarithms.
pub fn density_rho(p: f64, lambda: f64) -> Result<SpectralDensityPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain("density_rho", format!("lambda = {lambda} must be > 0")));
    }
    let y = lambda.sqrt();
    let lg = ln_gamma_abs_sq(p, y).map_err(|e| match e {
        Error::Domain { detail, .. } => Error::Domain {
            op: "density_rho",
            detail,
        },
        other => other,
    })?;
    let rho = (ln_sinh(2.0 * PI * y) + lg - (2.0 * PI * PI).ln()).exp();
    Ok(SpectralDensityPoint { p, lambda, rho })
}

/// One summand `sign·scale·M_h` on `L²((0,∞); rho_p dλ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalBlock {
    pub sign: i8,
    pub scale: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalizationDescriptor {
    pub ell: KernelOrder,
    pub blocks: [DiagonalBlock; 2],
}

/// `K^(2m) ≅ M_{(-1)^m h/π} ⊕ M_{(-1)^{m+1} h/π}` on the weights
/// `rho_{1/2-m}`, `rho_{-1/2-m}`; `K^(2m+1) ≅ M_{(-1)^{m+1} h/π} ⊕ M_{(-1)^m h/π}`,
/// both on `rho_{-1/2-m}`.
pub fn diagonalization_of(ell: KernelOrder) -> DiagonalizationDescriptor {
    let l = ell.get() as i32;
    let m = l / 2;
    let pm = |e: i32| if e.rem_euclid(2) == 0 { 1i8 } else { -1i8 };
    let block = |sign, p| DiagonalBlock {
        sign,
        scale: 1.0 / PI,
        p,
    };
    let q = -0.5 - m as f64;
    let blocks = if l % 2 == 0 {
        [block(pm(m), 0.5 - m as f64), block(pm(m + 1), q)]
    } else {
        [block(pm(m + 1), q), block(pm(m), q)]
    };
    DiagonalizationDescriptor { ell, blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::block_targets;
    use crate::L_MAX;

    #[test]
    fn multiplier_examples() {
        assert!((multiplier_h(1e-300).unwrap() - PI).abs() < 1e-15);
        assert!((multiplier_h(1.0).unwrap() - 0.271_015).abs() < 1e-6);
        assert!((multiplier_h(4.0).unwrap() - 0.011_733).abs() < 1e-6);
        assert!(multiplier_h(0.0).is_err());
        let grid: Vec<f64> = (0..60).map(|k| 10f64.powf(2.0 - k as f64 * 0.1)).collect();
        let vals: Vec<f64> = grid.iter().map(|&l| multiplier_h(l).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&v| v > 0.0 && v < PI));
    }

    #[test]
    fn density_examples() {
        let r = density_rho(0.0, 1.0).unwrap().rho;
        assert!((r - PI.sinh() / PI).abs() < 1e-12 * r);
        assert!((r - 3.676_078).abs() < 1e-6);
        let r = density_rho(0.5, 1.0).unwrap().rho;
        assert!((r - PI.cosh() / PI).abs() < 1e-12 * r);
        assert!((r - 3.689_833).abs() < 1e-6);
        assert!(density_rho(0.75, 1.0).is_err());
        assert!(density_rho(0.0, -1.0).is_err());
        for p in [0.5, -0.5, -3.5, -10.0] {
            for lam in [1e-6, 0.3, 50.0, 2500.0] {
                let r = density_rho(p, lam).unwrap().rho;
                assert!(r > 0.0 && r.is_finite());
            }
        }
    }

    #[test]
    fn density_closed_forms() {
        for lam in [0.01f64, 0.1, 1.0, 4.0, 25.0] {
            let y = lam.sqrt();
            let s = (PI * y).sinh();
            let c = (PI * y).cosh();
            assert!((density_rho(0.0, lam).unwrap().rho * PI - s).abs() <= 1e-12 * s);
            assert!((density_rho(0.5, lam).unwrap().rho * PI * y - c).abs() <= 1e-12 * c);
        }
    }

    #[test]
    fn descriptor_examples() {
        let d = diagonalization_of(KernelOrder::new(0).unwrap());
        assert_eq!((d.blocks[0].sign, d.blocks[0].p), (1, 0.5));
        assert_eq!((d.blocks[1].sign, d.blocks[1].p), (-1, -0.5));
        let d = diagonalization_of(KernelOrder::new(1).unwrap());
        assert_eq!((d.blocks[0].sign, d.blocks[0].p), (-1, -0.5));
        assert_eq!((d.blocks[1].sign, d.blocks[1].p), (1, -0.5));
        let d = diagonalization_of(KernelOrder::new(4).unwrap());
        assert_eq!((d.blocks[0].sign, d.blocks[0].p), (1, -1.5));
        assert_eq!((d.blocks[1].sign, d.blocks[1].p), (-1, -2.5));
        assert_eq!(d.blocks[0].scale, 1.0 / PI);
    }

    #[test]
    fn descriptor_matches_block_certificates() {
        for l in 0..=L_MAX {
            let d = diagonalization_of(KernelOrder::new(l).unwrap());
            let t = block_targets(l);
            for (b, c) in d.blocks.iter().zip(&t) {
                assert_eq!((b.sign, b.scale, b.p), (c.sign, c.scale, c.p));
            }
        }
    }
}

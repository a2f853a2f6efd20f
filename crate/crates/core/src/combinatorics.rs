//! Exact coefficient arithmetic: the polynomials `p_l`, the convolution
//! polynomials of `|x|^k e^{-|x|}` against `e^{-|x|}`, and three families of
//! binomial identities.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::L_MAX;

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Machine-integer binomial for the small arguments used in weights.
pub fn binomial_u64(n: u32, k: u32) -> u64 {
    binomial(n, k).to_u64().expect("binomial overflows u64")
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e as usize
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCoeffList {
    coefficients: Vec<BigRational>,
}

impl RationalCoeffList {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| c.to_f64().expect("finite coefficient"))
            .collect()
    }

    /// Horner evaluation in floating point.
    pub fn eval_f64(&self, w: f64) -> f64 {
        self.to_f64().iter().rev().fold(0.0, |acc, &c| acc * w + c)
    }

    fn scaled(&self, s: &BigRational) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect())
    }
}

impl Add for &RationalCoeffList {
    type Output = RationalCoeffList;

    fn add(self, rhs: Self) -> RationalCoeffList {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        let zero = BigRational::zero();
        RationalCoeffList::new(
            (0..n)
                .map(|i| {
                    self.coefficients.get(i).unwrap_or(&zero) + rhs.coefficients.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }
}

impl fmt::Display for RationalCoeffList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `p_l(w) = sum_{j<l} 2^{-j} C(l+j-1, l-1) w^{l-j-1} / (l-j-1)!`.
pub fn p_poly(ell: u32) -> Result<RationalCoeffList> {
    if ell == 0 || ell > L_MAX {
        return Err(Error::domain(
            "p_poly",
            format!("order {ell} outside [1, {L_MAX}]"),
        ));
    }
    let mut coeffs = vec![BigRational::zero(); ell as usize];
    for j in 0..ell {
        let deg = ell - j - 1;
        coeffs[deg as usize] = ratio(binomial(ell + j - 1, ell - 1), pow2(j) * factorial(deg));
    }
    Ok(RationalCoeffList::new(coeffs))
}

/// Polynomial `q_k` with `(|x|^k e^{-|x|}) * e^{-|x|} = e^{-|y|} q_k(|y|)`.
pub fn self_convolution_poly(k: u32) -> RationalCoeffList {
    let mut coeffs = vec![BigRational::zero(); k as usize + 2];
    coeffs[k as usize + 1] = ratio(BigInt::one(), BigInt::from(k + 1));
    // (k+1)!/(k-j)! / (2^{1+j} (k+1))
    for j in 0..k {
        coeffs[(k - j) as usize] = ratio(factorial(k), factorial(k - j) * pow2(1 + j));
    }
    coeffs[0] = ratio(factorial(k), pow2(k));
    RationalCoeffList::new(coeffs)
}

/// Both sides of the induction step `p_{l+1} = sum_k a_k q_k` where
/// `p_l = sum_k a_k w^k`.
pub fn p_poly_recurrence(ell: u32) -> Result<(RationalCoeffList, RationalCoeffList)> {
    if ell == 0 || ell >= L_MAX {
        return Err(Error::domain(
            "p_poly_recurrence",
            format!("order {ell} outside [1, {}]", L_MAX - 1),
        ));
    }
    let p = p_poly(ell)?;
    let mut conv = RationalCoeffList::new(vec![]);
    for (k, a) in p.coefficients().iter().enumerate() {
        conv = &conv + &self_convolution_poly(k as u32).scaled(a);
    }
    Ok((p_poly(ell + 1)?, conv))
}

/// Element `rational + sqrt2 * √2` of `Q(√2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSqrt2 {
    pub rational: BigRational,
    pub sqrt2: BigRational,
}

impl QSqrt2 {
    pub fn new(rational: BigRational, sqrt2: BigRational) -> Self {
        Self { rational, sqrt2 }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + std::f64::consts::SQRT_2 * self.sqrt2.to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;

    fn add(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.rational + rhs.rational, self.sqrt2 + rhs.sqrt2)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;

    fn mul(self, rhs: QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(BigInt::from(2));
        QSqrt2::new(
            &self.rational * &rhs.rational + two * &self.sqrt2 * &rhs.sqrt2,
            &self.rational * &rhs.sqrt2 + &self.sqrt2 * &rhs.rational,
        )
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt2.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}·√2", self.rational, self.sqrt2)
        }
    }
}

// cos(k pi/4) exactly
fn cos_quarter_pi(k: u32) -> QSqrt2 {
    let half = || ratio(BigInt::one(), BigInt::from(2));
    let z = BigRational::zero;
    match k % 8 {
        0 => QSqrt2::integer(1),
        1 | 7 => QSqrt2::new(z(), half()),
        2 | 6 => QSqrt2::zero(),
        3 | 5 => QSqrt2::new(z(), -half()),
        _ => QSqrt2::integer(-1),
    }
}

// 2^{-e/2}
fn inv_sqrt2_pow(e: u32) -> QSqrt2 {
    let r = ratio(BigInt::one(), pow2(e / 2));
    if e % 2 == 0 {
        QSqrt2::new(r, BigRational::zero())
    } else {
        // 2^{-1/2} = √2/2
        QSqrt2::new(BigRational::zero(), r / BigInt::from(2))
    }
}

/// The three binomial sums feeding the asymptotic constant of `k^(l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `sum_{j<l} cos((l-j)π/4) 2^{-(l+j-2)/2} C(l+j-1, l-1) = 1`
    Cosine = 1,
    /// `sum_{n<=l} (-1)^n C(2l, 2n) = cos(lπ/2) 2^l`
    Even = 2,
    /// `sum_{n<l} (-1)^{n+1} C(2l, 2n+1) = sin(-lπ/2) 2^l`
    Odd = 3,
}

impl TryFrom<u8> for SumKind {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(SumKind::Cosine),
            2 => Ok(SumKind::Even),
            3 => Ok(SumKind::Odd),
            _ => Err(Error::domain("sum_identity", format!("unknown kind {v}"))),
        }
    }
}

/// Both sides of the chosen identity, exactly.
pub fn sum_identity(kind: SumKind, ell: u32) -> Result<(QSqrt2, QSqrt2)> {
    if ell == 0 {
        return Err(Error::domain("sum_identity", "order must be positive"));
    }
    let two_l = BigInt::one() << ell as usize;
    Ok(match kind {
        SumKind::Cosine => {
            let mut lhs = QSqrt2::zero();
            for j in 0..ell {
                let term = cos_quarter_pi(ell - j)
                    * inv_sqrt2_pow(ell + j)
                    * QSqrt2::integer(binomial(ell + j - 1, ell - 1) * 2);
                lhs = lhs + term;
            }
            (lhs, QSqrt2::integer(1))
        }
        SumKind::Even => {
            let lhs: BigInt = (0..=ell)
                .map(|n| {
                    let b = binomial(2 * ell, 2 * n);
                    if n % 2 == 0 {
                        b
                    } else {
                        -b
                    }
                })
                .sum();
            let cos = [1, 0, -1, 0][(ell % 4) as usize];
            (QSqrt2::integer(lhs), QSqrt2::integer(two_l * cos))
        }
        SumKind::Odd => {
            let lhs: BigInt = (0..ell)
                .map(|n| {
                    let b = binomial(2 * ell, 2 * n + 1);
                    if n % 2 == 0 {
                        -b
                    } else {
                        b
                    }
                })
                .sum();
            let sin_neg = [0, -1, 0, 1][(ell % 4) as usize];
            (QSqrt2::integer(lhs), QSqrt2::integer(two_l * sin_neg))
        }
    })
}

/// `sum_{j=r}^m (-1)^j C(m,j) (j-1)!/(j-r)!` against `(-1)^r (r-1)!`.
pub fn alternating_factorial_identity(m: u32, r: u32) -> Result<(BigInt, BigInt)> {
    if r < 1 || r > m {
        return Err(Error::domain(
            "alternating_factorial_identity",
            format!("r = {r} outside [1, {m}]"),
        ));
    }
    let lhs: BigInt = (r..=m)
        .map(|j| {
            let t = binomial(m, j) * factorial(j - 1) / factorial(j - r);
            if j % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum();
    let rhs = if r % 2 == 0 {
        factorial(r - 1)
    } else {
        -factorial(r - 1)
    };
    Ok((lhs, rhs))
}

/// `true` when every coefficient is strictly positive.
pub fn all_positive(p: &RationalCoeffList) -> bool {
    !p.coefficients().is_empty() && p.coefficients().iter().all(|c| c.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        ratio(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn p_poly_examples() {
        assert_eq!(p_poly(1).unwrap().coefficients(), &[r(1, 1)]);
        assert_eq!(p_poly(2).unwrap().coefficients(), &[r(1, 1), r(1, 1)]);
        assert_eq!(p_poly(3).unwrap().coefficients(), &[r(3, 2), r(3, 2), r(1, 2)]);
        assert!(p_poly(0).is_err());
        assert!(p_poly(L_MAX + 1).is_err());
        for l in 1..=L_MAX {
            let p = p_poly(l).unwrap();
            assert_eq!(p.degree(), Some(l as usize - 1));
            assert!(all_positive(&p));
        }
    }

    #[test]
    fn self_convolution_examples() {
        // e^{-|y|}(|y| + 1) and value 1/2 at the origin for k = 1
        assert_eq!(self_convolution_poly(0).coefficients(), &[r(1, 1), r(1, 1)]);
        assert_eq!(self_convolution_poly(1).coefficients()[0], r(1, 2));
        // value at 0 is k!/2^k
        for k in 0..10 {
            assert_eq!(
                self_convolution_poly(k).coefficients()[0],
                ratio(factorial(k), pow2(k))
            );
        }
    }

    #[test]
    fn p_poly_recurrence_holds() {
        for l in 1..L_MAX {
            let (next, conv) = p_poly_recurrence(l).unwrap();
            assert_eq!(next, conv, "l = {l}");
        }
    }

    #[test]
    fn sum_identity_examples() {
        let (a, b) = sum_identity(SumKind::Even, 1).unwrap();
        assert_eq!((a.clone(), b), (QSqrt2::zero(), QSqrt2::zero()));
        let (a, b) = sum_identity(SumKind::Odd, 1).unwrap();
        assert_eq!(a, QSqrt2::integer(-2));
        assert_eq!(b, QSqrt2::integer(-2));
        let (a, b) = sum_identity(SumKind::Cosine, 1).unwrap();
        assert_eq!(a, QSqrt2::integer(1));
        assert_eq!(b, QSqrt2::integer(1));
    }

    #[test]
    fn sum_identities_up_to_twenty() {
        for kind in [SumKind::Cosine, SumKind::Even, SumKind::Odd] {
            for l in 1..=20 {
                let (a, b) = sum_identity(kind, l).unwrap();
                assert_eq!(a, b, "{kind:?} l = {l}");
            }
        }
    }

    #[test]
    fn alternating_factorial_examples() {
        let v = |m, r| alternating_factorial_identity(m, r).unwrap();
        assert_eq!(v(1, 1), (BigInt::from(-1), BigInt::from(-1)));
        assert_eq!(v(3, 2), (BigInt::from(1), BigInt::from(1)));
        assert_eq!(v(4, 1), (BigInt::from(-1), BigInt::from(-1)));
        assert!(alternating_factorial_identity(3, 0).is_err());
        assert!(alternating_factorial_identity(3, 4).is_err());
    }

    #[test]
    fn qsqrt2_arithmetic() {
        let s = QSqrt2::new(BigRational::zero(), r(1, 1));
        assert_eq!(s.clone() * s, QSqrt2::integer(2));
        assert!((inv_sqrt2_pow(3).to_f64() - 2f64.powf(-1.5)).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn alternating_factorial_identity_exact(m in 1u32..=16, r_frac in 0.0f64..1.0) {
            let r = 1 + ((m as f64 * r_frac) as u32).min(m - 1);
            let (a, b) = alternating_factorial_identity(m, r).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn p_poly_matches_float_definition(l in 1u32..=L_MAX, w in 0.0f64..30.0) {
            let p = p_poly(l).unwrap().eval_f64(w);
            let mut want = 0.0;
            for j in 0..l {
                let deg = l - j - 1;
                want += binomial_u64(l + j - 1, l - 1) as f64 / 2f64.powi(j as i32)
                    * w.powi(deg as i32) / factorial(deg).to_f64().unwrap();
            }
            prop_assert!((p - want).abs() <= 1e-12 * want.abs());
        }
    }
}

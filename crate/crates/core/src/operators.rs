//! Finite sections of the sequence-space operators: the Hankel matrices
//! `c_{k+n+l+1}`, the generalized Hilbert matrices `H_p`, the coordinate
//! maps relating them, and a Jacobi eigensolver.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelOrder;
use crate::L_MAX;

/// Default cap on matrix dimensions.
pub const DEFAULT_MAX_N: usize = 4096;

/// Environment variable overriding [`DEFAULT_MAX_N`].
pub const MAX_N_ENV: &str = "HANKEL_SPECTRA_MAX_N";

/// The active size cap.
pub fn max_size() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_N)
}

fn check_size(op: &'static str, n: usize) -> Result<()> {
    let max = max_size();
    if n == 0 || n > max {
        return Err(Error::Size { op, size: n, max });
    }
    Ok(())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `max |a_ij - a_ji|`; `None` when not square.
    pub fn symmetry_deviation(&self) -> Option<f64> {
        if self.rows != self.cols {
            return None;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Some(dev)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Principal submatrix on the given index set.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }
}

/// `(2/(πk)) sin(πk/2)`: zero for even `k`, `(-1)^{(k-1)/2} 2/(πk)` for odd.
pub fn fourier_coefficient(k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("fourier_coefficient", "k must be >= 1"));
    }
    if k % 2 == 0 {
        return Ok(0.0);
    }
    let v = 2.0 / (PI * k as f64);
    Ok(if (k - 1) / 2 % 2 == 0 { v } else { -v })
}

/// `N×N` section of the Hankel operator with symbol `z^{l+1} φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelTruncation {
    pub ell: KernelOrder,
    pub matrix: Matrix,
}

pub fn hankel_truncation(ell: KernelOrder, n: usize) -> Result<HankelTruncation> {
    check_size("hankel_truncation", n)?;
    let shift = ell.get() as u64 + 1;
    let coeffs: Vec<f64> = (0..2 * n as u64)
        .map(|s| fourier_coefficient(s + shift).expect("index >= 1"))
        .collect();
    Ok(HankelTruncation {
        ell,
        matrix: Matrix::from_fn(n, n, |i, j| coeffs[i + j]),
    })
}

/// `N×N` section of `H_p` (entries `1/(1+k+n-p)`) or, when alternating, of
/// `H̃_p` (extra sign `(-1)^{k+n}`).
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertTypeMatrix {
    pub p: f64,
    pub alternating: bool,
    pub matrix: Matrix,
}

pub fn hilbert_type(p: f64, n: usize, alternating: bool) -> Result<HilbertTypeMatrix> {
    if !(p <= 0.5) || !p.is_finite() {
        return Err(Error::domain("hilbert_type", format!("p = {p} must be <= 1/2")));
    }
    check_size("hilbert_type", n)?;
    let matrix = Matrix::from_fn(n, n, |i, j| {
        let v = 1.0 / (1.0 + (i + j) as f64 - p);
        if alternating && (i + j) % 2 == 1 {
            -v
        } else {
            v
        }
    });
    Ok(HilbertTypeMatrix {
        p,
        alternating,
        matrix,
    })
}

/// Column-sparse real matrix for the coordinate maps.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    rows: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl CoordinateMap {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `self · other`.
    pub fn compose(&self, other: &CoordinateMap) -> CoordinateMap {
        assert_eq!(self.cols(), other.rows);
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: Vec<(usize, f64)> = Vec::new();
                for &(k, w) in col {
                    for &(i, v) in &self.columns[k] {
                        match acc.iter_mut().find(|(r, _)| *r == i) {
                            Some(e) => e.1 += v * w,
                            None => acc.push((i, v * w)),
                        }
                    }
                }
                acc.retain(|&(_, v)| v != 0.0);
                acc.sort_by_key(|&(r, _)| r);
                acc
            })
            .collect();
        CoordinateMap {
            rows: self.rows,
            columns,
        }
    }

    /// `selfᵀ A self`.
    pub fn conjugate(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.rows(), self.rows);
        assert_eq!(a.cols(), self.rows);
        let n = self.cols();
        Matrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for &(r, u) in &self.columns[i] {
                for &(c, v) in &self.columns[j] {
                    s += u * a.get(r, c) * v;
                }
            }
            s
        })
    }
}

/// `V = diag(1, -1, 1, -1, …)` on `n` coordinates.
pub fn v_map(n: usize) -> CoordinateMap {
    CoordinateMap {
        rows: n,
        columns: (0..n)
            .map(|k| vec![(k, if k % 2 == 0 { 1.0 } else { -1.0 })])
            .collect(),
    }
}

/// `U+ : x ↦ (x0, 0, x1, 0, …)` from `n` into `2n` coordinates.
pub fn u_plus(n: usize) -> CoordinateMap {
    CoordinateMap {
        rows: 2 * n,
        columns: (0..n).map(|k| vec![(2 * k, 1.0)]).collect(),
    }
}

/// `U- : x ↦ (0, x0, 0, x1, …)` from `n` into `2n` coordinates.
pub fn u_minus(n: usize) -> CoordinateMap {
    CoordinateMap {
        rows: 2 * n,
        columns: (0..n).map(|k| vec![(2 * k + 1, 1.0)]).collect(),
    }
}

/// `(1/√2) [[I, -I], [I, I]]` on `2n` coordinates.
pub fn rotation(n: usize) -> CoordinateMap {
    let s = FRAC_1_SQRT_2;
    let columns = (0..2 * n)
        .map(|j| {
            if j < n {
                vec![(j, s), (j + n, s)]
            } else {
                vec![(j - n, -s), (j, s)]
            }
        })
        .collect();
    CoordinateMap { rows: 2 * n, columns }
}

/// `[U+ V | U- V]`, the interleaving unitary on `2n` coordinates.
pub fn interleave_v(n: usize) -> CoordinateMap {
    let v = v_map(n);
    let plus = u_plus(n).compose(&v);
    let minus = u_minus(n).compose(&v);
    CoordinateMap {
        rows: 2 * n,
        columns: plus.columns.into_iter().chain(minus.columns).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// One diagonal block `sign/π · H_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockTarget {
    pub sign: i8,
    pub scale: f64,
    pub p: f64,
}

/// Outcome of conjugating a Hankel section into block diagonal form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCertificate {
    pub parity: Parity,
    pub m: u32,
    pub ell: u32,
    pub size: usize,
    pub blocks: [BlockTarget; 2],
    /// Largest entrywise deviation of the conjugated `2N×2N` matrix from the
    /// block diagonal target.
    pub max_abs_deviation: f64,
    /// Largest entry of the parity blocks that must vanish: the mixed blocks
    /// for even `l`, the pure blocks for odd `l`.
    pub cross_block_max: f64,
}

fn sign_of(e: u32) -> i8 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Expected diagonal blocks for the Hankel operator of order `ell`.
pub fn block_targets(ell: u32) -> [BlockTarget; 2] {
    let m = ell / 2;
    let mf = m as f64;
    let scale = 1.0 / PI;
    if ell % 2 == 0 {
        [
            BlockTarget { sign: sign_of(m), scale, p: 0.5 - mf },
            BlockTarget { sign: sign_of(m + 1), scale, p: -0.5 - mf },
        ]
    } else {
        [
            BlockTarget { sign: sign_of(m + 1), scale, p: -0.5 - mf },
            BlockTarget { sign: sign_of(m), scale, p: -0.5 - mf },
        ]
    }
}

/// The unitary taking the `2n×2n` Hankel section of order `ell` to block
/// diagonal form.
pub fn block_unitary(ell: u32, n: usize) -> CoordinateMap {
    let w = interleave_v(n);
    if ell % 2 == 0 {
        w
    } else {
        w.compose(&rotation(n))
    }
}

fn parity_blocks_max(s: &Matrix, same: bool) -> f64 {
    let n = s.rows();
    let mut mx: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if ((i + j) % 2 == 0) == same {
                mx = mx.max(s.get(i, j).abs());
            }
        }
    }
    mx
}

fn block_decompose(ell: u32, m: u32, n: usize, parity: Parity) -> Result<BlockCertificate> {
    if ell > L_MAX {
        return Err(Error::OrderTooLarge {
            op: "block_decompose",
            order: ell,
            max: L_MAX,
        });
    }
    check_size("block_decompose", n)?;
    check_size("block_decompose", 2 * n)?;
    let s = hankel_truncation(KernelOrder::new(ell)?, 2 * n)?.matrix;
    let cross = parity_blocks_max(&s, parity == Parity::Odd);
    let conj = block_unitary(ell, n).conjugate(&s);
    let blocks = block_targets(ell);
    let h: Vec<Matrix> = blocks
        .iter()
        .map(|b| {
            hilbert_type(b.p, n, false).map(|h| h.matrix.scaled(b.sign as f64 * b.scale))
        })
        .collect::<Result<_>>()?;
    let target = Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => h[0].get(i, j),
        (false, false) => h[1].get(i - n, j - n),
        _ => 0.0,
    });
    Ok(BlockCertificate {
        parity,
        m,
        ell,
        size: n,
        blocks,
        max_abs_deviation: conj.max_abs_diff(&target),
        cross_block_max: cross,
    })
}

/// Certificate for `l = 2m`: `W^T S W = ((-1)^m/π) H_{1/2-m} ⊕ ((-1)^{m+1}/π) H_{-1/2-m}`.
pub fn block_decompose_even(m: u32, n: usize) -> Result<BlockCertificate> {
    block_decompose(2 * m, m, n, Parity::Even)
}

/// Certificate for `l = 2m+1`: after the rotation,
/// `((-1)^{m+1}/π) H_{-1/2-m} ⊕ ((-1)^m/π) H_{-1/2-m}`.
pub fn block_decompose_odd(m: u32, n: usize) -> Result<BlockCertificate> {
    block_decompose(2 * m + 1, m, n, Parity::Odd)
}

/// The two diagonal blocks of the conjugated `2n×2n` section.
pub fn conjugated_blocks(ell: KernelOrder, n: usize) -> Result<(Matrix, Matrix)> {
    check_size("conjugated_blocks", 2 * n)?;
    let s = hankel_truncation(ell, 2 * n)?.matrix;
    let c = block_unitary(ell.get(), n).conjugate(&s);
    let first: Vec<usize> = (0..n).collect();
    let second: Vec<usize> = (n..2 * n).collect();
    Ok((c.submatrix(&first, &first), c.submatrix(&second, &second)))
}

/// Relative symmetry tolerance accepted by [`symm_eigen`].
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

// Pairs of round `r` in the circle-method tournament on `m` (even) indices.
fn round_pairs(m: usize, r: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let k = m - 1;
    std::iter::once((r, k))
        .chain((1..m / 2).map(move |i| ((r + i) % k, (r + k - i) % k)))
        .filter(move |&(p, q)| p < n && q < n)
        .map(|(p, q)| if p < q { (p, q) } else { (q, p) })
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    app: f64,
    aqq: f64,
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Each sweep visits every pair once in round-robin order; the rotations of
/// one round act on disjoint index pairs and are applied together. Sweeps
/// stop once the off-diagonal Frobenius norm is below
/// `min(tol, 1e-14·‖A‖_F)`; by Weyl's inequality each returned value is then
/// within that distance of an exact eigenvalue of the (symmetrized) input.
pub fn symm_eigen(matrix: &Matrix, tol: f64) -> Result<Vec<f64>> {
    let n = matrix.rows();
    let dev = matrix
        .symmetry_deviation()
        .ok_or_else(|| Error::domain("symm_eigen", "matrix is not square"))?;
    if !matrix.data.iter().all(|v| v.is_finite()) {
        return Err(Error::domain("symm_eigen", "entries must be finite"));
    }
    if dev > SYMMETRY_TOL * matrix.max_abs() {
        return Err(Error::NotSymmetric { deviation: dev });
    }
    if !(tol > 0.0) {
        return Err(Error::domain("symm_eigen", "tol must be positive"));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    // symmetrize from the upper triangle
    let mut a = matrix.data.clone();
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    let m = n + n % 2;
    let threshold = tol.min(1e-14 * matrix.frobenius());
    let mut off = off_norm(&a, n);
    let mut sweeps = 0;
    let mut rots: Vec<Rotation> = Vec::with_capacity(m / 2);
    while off > threshold && n > 1 {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        let mut rotated = false;
        for r in 0..m - 1 {
            rots.clear();
            for (p, q) in round_pairs(m, r, n) {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // negligible against both diagonal entries
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                rots.push(Rotation {
                    p,
                    q,
                    c,
                    s: t * c,
                    app: app - t * apq,
                    aqq: aqq + t * apq,
                });
            }
            if rots.is_empty() {
                continue;
            }
            rotated = true;
            // rows
            let mut rows: Vec<Option<&mut [f64]>> = a.chunks_mut(n).map(Some).collect();
            let mut work: Vec<(&mut [f64], &mut [f64], f64, f64)> = rots
                .iter()
                .map(|rt| {
                    let rp = rows[rt.p].take().expect("disjoint pairs");
                    let rq = rows[rt.q].take().expect("disjoint pairs");
                    (rp, rq, rt.c, rt.s)
                })
                .collect();
            work.par_iter_mut().for_each(|(rp, rq, c, s)| {
                for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = *c * u - *s * v;
                    *y = *s * u + *c * v;
                }
            });
            drop(work);
            drop(rows);
            // columns
            a.par_chunks_mut(n).for_each(|row| {
                for rt in &rots {
                    let (u, v) = (row[rt.p], row[rt.q]);
                    row[rt.p] = rt.c * u - rt.s * v;
                    row[rt.q] = rt.s * u + rt.c * v;
                }
            });
            for rt in &rots {
                a[rt.p * n + rt.p] = rt.app;
                a[rt.q * n + rt.q] = rt.aqq;
                a[rt.p * n + rt.q] = 0.0;
                a[rt.q * n + rt.p] = 0.0;
            }
        }
        off = off_norm(&a, n);
        if !rotated {
            break;
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Eigenvalue summary of a Hankel section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub ell: KernelOrder,
    pub size: usize,
    pub min: f64,
    pub max: f64,
    /// `max(0, max|λ| - 1)`.
    pub containment_violation: f64,
    /// Largest gap between consecutive eigenvalues inside `[-0.95, 0.95]`,
    /// the endpoints counting as eigenvalues.
    pub coverage_gap: f64,
    pub eigenvalues: Vec<f64>,
}

/// Half-width of the window scanned for [`SpectrumReport::coverage_gap`].
pub const COVERAGE_WINDOW: f64 = 0.95;

/// Tolerance passed to [`symm_eigen`] by [`spectrum_report`].
pub const SPECTRUM_TOL: f64 = 1e-12;

pub fn spectrum_from_eigenvalues(ell: KernelOrder, eigenvalues: Vec<f64>) -> SpectrumReport {
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    let containment_violation = (min.abs().max(max.abs()) - 1.0).max(0.0);
    let mut pts = vec![-COVERAGE_WINDOW];
    pts.extend(
        eigenvalues
            .iter()
            .copied()
            .filter(|v| v.abs() <= COVERAGE_WINDOW),
    );
    pts.push(COVERAGE_WINDOW);
    let coverage_gap = pts.windows(2).fold(0.0, |g: f64, w| g.max(w[1] - w[0]));
    SpectrumReport {
        ell,
        size: eigenvalues.len(),
        min,
        max,
        containment_violation,
        coverage_gap,
        eigenvalues,
    }
}

pub fn spectrum_report(ell: KernelOrder, n: usize) -> Result<SpectrumReport> {
    let h = hankel_truncation(ell, n)?;
    let eig = symm_eigen(&h.matrix, SPECTRUM_TOL)?;
    Ok(spectrum_from_eigenvalues(ell, eig))
}

/// Positive-definiteness certificate for the `N×N` section of `H_p`.
///
/// `H_p` is the Cauchy matrix `1/(a_i + a_j)` with `a_i = i + (1-p)/2`, whose
/// `LDLᵀ` pivots are `D_k = (1/(2a_k)) Π_{j<k} ((a_k - a_j)/(a_k + a_j))²`.
/// Every factor is positive, so all leading minors are positive. The pivots
/// are kept as logarithms since they underflow quickly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub p: f64,
    pub size: usize,
    pub log_pivots: Vec<f64>,
    pub min_log_pivot: f64,
    pub positive_definite: bool,
}

pub fn cauchy_positivity(p: f64, n: usize) -> Result<PositivityCertificate> {
    if !(p <= 0.5) || !p.is_finite() {
        return Err(Error::domain("cauchy_positivity", format!("p = {p} must be <= 1/2")));
    }
    check_size("cauchy_positivity", n)?;
    let a: Vec<f64> = (0..n).map(|i| i as f64 + (1.0 - p) / 2.0).collect();
    let log_pivots: Vec<f64> = (0..n)
        .map(|k| {
            let mut s = -(2.0 * a[k]).ln();
            for j in 0..k {
                s += 2.0 * ((a[k] - a[j]) / (a[k] + a[j])).ln();
            }
            s
        })
        .collect();
    let min_log_pivot = log_pivots.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PositivityCertificate {
        p,
        size: n,
        positive_definite: a[0] > 0.0 && log_pivots.iter().all(|v| v.is_finite()),
        min_log_pivot,
        log_pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn ord(l: u32) -> KernelOrder {
        KernelOrder::new(l).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(fourier_coefficient(1).unwrap(), 2.0 / PI);
        assert_eq!(fourier_coefficient(2).unwrap(), 0.0);
        assert_eq!(fourier_coefficient(3).unwrap(), -2.0 / (3.0 * PI));
        assert!(fourier_coefficient(0).is_err());
        for k in 1..200u64 {
            let want = 2.0 / (PI * k as f64) * (PI * k as f64 / 2.0).sin();
            assert!((fourier_coefficient(k).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn hankel_examples() {
        let h = hankel_truncation(ord(0), 1).unwrap().matrix;
        assert_eq!(h, Matrix::from_rows(&[vec![2.0 / PI]]));
        let h = hankel_truncation(ord(1), 2).unwrap().matrix;
        let c3 = -2.0 / (3.0 * PI);
        assert_eq!(h, Matrix::from_rows(&[vec![0.0, c3], vec![c3, 0.0]]));
        assert!(hankel_truncation(ord(0), 0).is_err());
        assert!(hankel_truncation(ord(0), DEFAULT_MAX_N + 1).is_err());
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_type(0.5, 1, false).unwrap().matrix, Matrix::from_rows(&[vec![2.0]]));
        let h = hilbert_type(-0.5, 2, false).unwrap().matrix;
        let want = Matrix::from_rows(&[vec![1.0 / 1.5, 1.0 / 2.5], vec![1.0 / 2.5, 1.0 / 3.5]]);
        assert_eq!(h, want);
        assert!(hilbert_type(0.6, 2, false).is_err());
        for p in [0.5, -0.5, -1.5, -4.25] {
            let alt = hilbert_type(p, 17, true).unwrap().matrix;
            let plain = hilbert_type(p, 17, false).unwrap().matrix;
            assert_eq!(v_map(17).conjugate(&alt), plain);
        }
    }

    #[test]
    fn coordinate_maps_are_orthogonal() {
        for l in [0, 1] {
            let w = block_unitary(l, 5).to_dense();
            let wtw = CoordinateMap {
                rows: 10,
                columns: (0..10).map(|j| (0..10).map(|i| (i, w.get(i, j))).collect()).collect(),
            }
            .conjugate(&Matrix::from_fn(10, 10, |i, j| if i == j { 1.0 } else { 0.0 }));
            let eye = Matrix::from_fn(10, 10, |i, j| if i == j { 1.0 } else { 0.0 });
            assert!(wtw.max_abs_diff(&eye) < 1e-15);
        }
    }

    #[test]
    fn block_examples() {
        let c = block_decompose_even(0, 4).unwrap();
        assert!(c.max_abs_deviation <= 1e-15);
        assert_eq!(c.cross_block_max, 0.0);
        assert!(block_decompose_even(1, 8).unwrap().max_abs_deviation <= 1e-15);
        let c = block_decompose_odd(0, 4).unwrap();
        assert!(c.max_abs_deviation <= 1e-14);
        assert_eq!(c.cross_block_max, 0.0);
        assert!(block_decompose_odd(1, 8).unwrap().max_abs_deviation <= 1e-14);
        // first entries of both formulas at n = k = m = 0
        let (even, _) = conjugated_blocks(ord(0), 1).unwrap();
        assert_eq!(even.get(0, 0), 2.0 / PI);
        assert!((even.get(0, 0) - (1.0 / PI) / 0.5).abs() < 1e-16);
        assert!(block_decompose_even(5, 4).is_err());
    }

    #[test]
    fn block_certificates_small_deviation() {
        for m in 0..=3 {
            for n in [1, 7, 32, 64] {
                let e = block_decompose_even(m, n).unwrap();
                let o = block_decompose_odd(m, n).unwrap();
                assert!(e.max_abs_deviation <= 1e-13 && e.cross_block_max == 0.0);
                assert!(o.max_abs_deviation <= 1e-13 && o.cross_block_max == 0.0);
            }
        }
    }

    #[test]
    fn odd_spectrum_is_union_of_blocks() {
        let n = 32;
        let full = symm_eigen(&hankel_truncation(ord(1), 2 * n).unwrap().matrix, 1e-13).unwrap();
        let (a, b) = conjugated_blocks(ord(1), n).unwrap();
        let mut union = symm_eigen(&a, 1e-13).unwrap();
        union.extend(symm_eigen(&b, 1e-13).unwrap());
        union.sort_by(|x, y| x.total_cmp(y));
        for (x, y) in full.iter().zip(&union) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn eigen_examples() {
        let e = symm_eigen(&Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]), 1e-14).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        let d = Matrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        assert_eq!(symm_eigen(&d, 1e-14).unwrap(), vec![1.0, 2.0, 3.0]);
        let bad = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(symm_eigen(&bad, 1e-14), Err(Error::NotSymmetric { .. })));
    }

    // roots of det(H - λI) for the 3×3 section of H_{1/2} by the
    // trigonometric cubic formula
    #[test]
    fn eigen_hilbert_cubic() {
        let h = hilbert_type(0.5, 3, false).unwrap().matrix;
        let g = |i, j| h.get(i, j);
        let tr = g(0, 0) + g(1, 1) + g(2, 2);
        let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0)
            + g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1);
        let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        // λ³ - tr λ² + minors λ - det, shifted λ = μ + tr/3
        let q = minors - tr * tr / 3.0;
        let r = -2.0 * tr.powi(3) / 27.0 + tr * minors / 3.0 - det;
        let amp = 2.0 * (-q / 3.0).sqrt();
        let phi = (3.0 * r / (q * amp)).acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| tr / 3.0 + amp * (phi - 2.0 * PI * k as f64 / 3.0).cos())
            .collect();
        roots.sort_by(|a, b| a.total_cmp(b));
        let eig = symm_eigen(&h, 1e-15).unwrap();
        for (x, y) in eig.iter().zip(&roots) {
            assert!((x - y).abs() <= 1e-12, "{eig:?} {roots:?}");
        }
    }

    #[test]
    fn spectrum_small() {
        let r = spectrum_report(ord(0), 2).unwrap();
        assert!((r.eigenvalues[0] + 2.0 / (3.0 * PI)).abs() < 1e-15);
        assert!((r.eigenvalues[1] - 2.0 / PI).abs() < 1e-15);
        assert_eq!(r.containment_violation, 0.0);
        assert_eq!(r.min, r.eigenvalues[0]);
    }

    #[test]
    fn spectrum_256() {
        let r = spectrum_report(ord(0), 256).unwrap();
        assert!(r.containment_violation <= 1e-9);
        // measured top eigenvalue of the 256 section, pinned
        assert!((r.max - 0.89265).abs() < 5e-5, "{}", r.max);
        let r = spectrum_report(ord(1), 256).unwrap();
        let n = r.eigenvalues.len();
        for i in 0..n {
            assert!((r.eigenvalues[i] + r.eigenvalues[n - 1 - i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn coverage_gap_shrinks() {
        let mut last = f64::INFINITY;
        for n in [64, 128, 256] {
            let g = spectrum_report(ord(0), n).unwrap().coverage_gap;
            assert!(g <= last);
            last = g;
        }
    }

    fn exact_ldl_pivots(p: BigRational, n: usize) -> Vec<BigRational> {
        let one = BigRational::from_integer(BigInt::from(1));
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &one / (&one + BigRational::from_integer(BigInt::from(i + j)) - &p))
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        for k in 0..n {
            let d = a[k][k].clone();
            for i in k + 1..n {
                let f = &a[i][k] / &d;
                for j in k + 1..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
            pivots.push(d);
        }
        pivots
    }

    #[test]
    fn cauchy_pivots_match_exact_elimination() {
        for (num, den) in [(1, 2), (-1, 2), (-3, 2), (-7, 3)] {
            let p = BigRational::new(BigInt::from(num), BigInt::from(den));
            let exact = exact_ldl_pivots(p.clone(), 12);
            let cert = cauchy_positivity(num as f64 / den as f64, 12).unwrap();
            assert!(cert.positive_definite);
            for (e, l) in exact.iter().zip(&cert.log_pivots) {
                assert!(e.is_positive() && !e.is_zero());
                let ef = e.to_f64().unwrap().ln();
                assert!((ef - l).abs() < 1e-12 * (1.0 + ef.abs()), "{ef} {l}");
            }
        }
    }

    proptest! {
        #[test]
        fn hankel_parity_zeros(l in 0u32..=L_MAX, n in 1usize..40) {
            let h = hankel_truncation(ord(l), n).unwrap().matrix;
            prop_assert_eq!(h.symmetry_deviation(), Some(0.0));
            for i in 0..n {
                for j in 0..n {
                    if (i + j + l as usize + 1) % 2 == 0 {
                        prop_assert_eq!(h.get(i, j), 0.0);
                    }
                }
            }
        }

        #[test]
        fn v_conjugation_exact(p in -6.0f64..0.5, n in 1usize..48) {
            let alt = hilbert_type(p, n, true).unwrap().matrix;
            let plain = hilbert_type(p, n, false).unwrap().matrix;
            prop_assert_eq!(v_map(n).conjugate(&alt), plain);
        }

        #[test]
        fn eigen_trace_and_sort(seed in proptest::collection::vec(-1.0f64..1.0, 36)) {
            let a = Matrix::from_fn(6, 6, |i, j| seed[i.min(j) * 6 + i.max(j)]);
            let e = symm_eigen(&a, 1e-13).unwrap();
            let tr: f64 = (0..6).map(|i| a.get(i, i)).sum();
            prop_assert!((e.iter().sum::<f64>() - tr).abs() < 1e-12);
            prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
            let fro2: f64 = e.iter().map(|v| v * v).sum();
            prop_assert!((fro2 - a.frobenius().powi(2)).abs() < 1e-11);
        }
    }
}

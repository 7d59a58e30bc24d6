//! Dense complex eigenvalues: balancing, Householder reduction to upper
//! Hessenberg form and single-shift complex QR iteration with Givens
//! rotations. Generalized problems `det(A - E B) = 0` with Hermitian positive
//! definite `B` are reduced to standard form through a Cholesky factor.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0.into() } else { 0.0.into() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        ComplexMatrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `self - e * other`.
    pub fn sub_scaled(&self, e: Complex64, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - e * b).collect(),
        }
    }

    /// Largest entrywise `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Eigenvalues in deflation order; not sorted.
    pub values: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

impl EigenResult {
    /// Turns a non-converged result into an error.
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
            })
        }
    }
}

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Eigenvalues are unchanged exactly.
pub fn balance(m: &mut ComplexMatrix) {
    let n = m.dim;
    let sq = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(m[(j, i)]);
                    r += abs1(m[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sq;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sq;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= inv;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
pub fn hessenberg(m: &mut ComplexMatrix) {
    let n = m.dim;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let alpha = (k + 1..n).map(|i| m[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = m[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        for i in k + 1..n {
            v[i] = m[(i, k)];
        }
        v[k + 1] += phase * alpha;
        let vv: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        // left: rows k+1.., all columns from k
        for j in k..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * m[(i, j)]).sum();
            let t = dot * beta;
            for i in k + 1..n {
                let vi = v[i];
                m[(i, j)] -= vi * t;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j]).sum();
            let t = dot * beta;
            for j in k + 1..n {
                let vj = v[j].conj();
                m[(i, j)] -= t * vj;
            }
        }
        m[(k + 1, k)] = -phase * alpha;
        for i in k + 2..n {
            m[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nrm = ax.hypot(ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

/// Eigenvalue of the trailing 2x2 block closer to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (s1, s2) = (mid + disc, mid - disc);
    if (s1 - d).norm() <= (s2 - d).norm() {
        s1
    } else {
        s2
    }
}

/// Eigenvalues of an upper Hessenberg matrix, destroying it.
fn hessenberg_qr(h: &mut ComplexMatrix) -> EigenResult {
    let n = h.dim;
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let ulp = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64 / ulp);
    let max_iter = 30 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;

    let mut hi = n;
    while hi > 0 {
        let ihi = hi - 1;
        // locate the start of the active unreduced block
        let mut l = ihi;
        while l > 0 {
            let sub = abs1(h[(l, l - 1)]);
            let mut diag = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if diag == 0.0 {
                diag = (l.saturating_sub(2)..=ihi.min(l + 1))
                    .map(|i| abs1(h[(i, i)]))
                    .sum::<f64>();
            }
            if sub <= small || sub <= ulp * diag {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == ihi {
            values[ihi] = h[(ihi, ihi)];
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= max_iter {
            for (i, v) in values.iter_mut().enumerate().take(hi) {
                *v = h[(i, i)];
            }
            return EigenResult {
                values,
                iterations: total,
                converged: false,
            };
        }
        total += 1;
        its += 1;

        let shift = if its.is_multiple_of(10) {
            let s = h[(ihi, ihi - 1)].re.abs() + if ihi >= 2 { h[(ihi - 1, ihi - 2)].re.abs() } else { 0.0 };
            h[(ihi, ihi)] + 0.75 * s
        } else {
            wilkinson_shift(
                h[(ihi - 1, ihi - 1)],
                h[(ihi - 1, ihi)],
                h[(ihi, ihi - 1)],
                h[(ihi, ihi)],
            )
        };

        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..ihi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let jstart = if k > l { k - 1 } else { l };
            for j in jstart..=ihi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            let iend = (k + 2).min(ihi);
            for i in l..=iend {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    EigenResult {
        values,
        iterations: total,
        converged: true,
    }
}

/// All eigenvalues of a general complex matrix.
pub fn eig_complex(m: &ComplexMatrix) -> EigenResult {
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Lower-triangular `L` with `B = L L^H`.
pub fn cholesky(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = b.dim;
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = b[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::PencilDegenerate { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj.into();
        for i in j + 1..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L X = M` for lower-triangular `L`.
fn forward_solve(l: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let n = l.dim;
    let mut x = m.clone();
    for col in 0..n {
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    x
}

/// `L^{-1} A L^{-H}` for the Cholesky factor of `B`.
pub fn reduce_pencil(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != b.dim {
        return Err(Error::Config(format!("pencil dimensions differ: {} vs {}", a.dim, b.dim)));
    }
    let scale = b.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if b.hermitian_defect() > 1e-12 * scale.max(1.0) {
        return Err(Error::Config("pencil metric must be Hermitian".into()));
    }
    let l = cholesky(b)?;
    let y = forward_solve(&l, a);
    Ok(forward_solve(&l, &y.conj_transpose()).conj_transpose())
}

/// Eigenvalues `E` of `det(A - E B) = 0` for Hermitian positive definite `B`.
pub fn eig_pencil(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<EigenResult> {
    Ok(eig_complex(&reduce_pencil(a, b)?))
}

/// Real parts, sorted ascending, of eigenvalues with `|Im| <= im_tol` strictly
/// inside `window`.
pub fn select_real(values: &[Complex64], window: (f64, f64), im_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = values
        .iter()
        .filter(|z| z.im.abs() <= im_tol && z.re > window.0 && z.re < window.1)
        .map(|z| z.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// A determinant kept as `exp(log_abs) * phase` to survive large dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub log_abs: f64,
    pub phase: Complex64,
}

impl Determinant {
    pub fn zero() -> Self {
        Determinant {
            log_abs: f64::NEG_INFINITY,
            phase: Complex64::new(0.0, 0.0),
        }
    }

    /// `det(B) * prod(lambda_i - e)`, the pencil determinant from its eigenvalues.
    pub fn from_pencil_values(det_b: Determinant, values: &[Complex64], e: Complex64) -> Self {
        let mut d = det_b;
        for &lam in values {
            let f = lam - e;
            let r = f.norm();
            if r == 0.0 {
                return Determinant::zero();
            }
            d.log_abs += r.ln();
            d.phase *= f / r;
        }
        d
    }
}

/// LU determinant with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Determinant {
    let n = m.dim;
    let mut a = m.clone();
    let mut det = Determinant {
        log_abs: 0.0,
        phase: Complex64::new(1.0, 0.0),
    };
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        let piv = a[(p, k)];
        if piv.norm() == 0.0 {
            return Determinant::zero();
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            det.phase = -det.phase;
        }
        det.log_abs += piv.norm().ln();
        det.phase *= piv / piv.norm();
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    det
}

/// `det(A - E B)` at each energy of `grid`, by direct factorization.
pub fn det_scan(a: &ComplexMatrix, b: &ComplexMatrix, grid: &[f64]) -> Vec<Determinant> {
    grid.iter()
        .map(|&e| determinant(&a.sub_scaled(e.into(), b)))
        .collect()
}

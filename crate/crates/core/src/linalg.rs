//! Dense real linear algebra: linear solves with partial pivoting and
//! nonsymmetric eigenvalues via balancing, Householder-Hessenberg reduction,
//! and Francis double-shift QR iteration.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Relative pivot threshold below which a solve is declared singular.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Relative subdiagonal deflation threshold of the QR iteration.
pub const DEFLATION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Incompatible dimensions between operands.
    DimensionMismatch(String),
    /// A matrix entry was NaN or infinite.
    NonFinite,
    /// Pivot magnitude fell below `SINGULAR_TOL * ||a||_inf`.
    Singular { pivot: f64 },
    /// QR iteration did not deflate within the sweep budget.
    NoConvergence { sweeps: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix is not square ({rows}x{cols})")
            }
            LinalgError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            LinalgError::NonFinite => write!(f, "matrix entry is not finite"),
            LinalgError::Singular { pivot } => {
                write!(f, "matrix is singular to working precision (pivot {pivot:e})")
            }
            LinalgError::NoConvergence { sweeps } => {
                write!(f, "eigenvalue iteration did not converge within {sweeps} sweeps")
            }
        }
    }
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn column(v: &[f64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} cols, vector length {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm_frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Operator infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|x| libm::fabs(*x))
                    .sum()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `a * x = rhs` by LU factorization with partial pivoting.
///
/// `rhs` may carry multiple right-hand sides as columns.
pub fn solve_linear(a: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if rhs.rows != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs has {} rows, matrix is {}x{}",
            rhs.rows, a.rows, a.cols
        )));
    }
    let n = a.rows;
    let pivot_floor = SINGULAR_TOL * a.norm_inf();
    let mut lu = a.clone();
    let mut x = rhs.clone();
    for k in 0..n {
        // partial pivot
        let mut p = k;
        let mut pmax = libm::fabs(lu.get(k, k));
        for i in k + 1..n {
            let v = libm::fabs(lu.get(i, k));
            if v > pmax {
                pmax = v;
                p = i;
            }
        }
        if pmax < pivot_floor {
            return Err(LinalgError::Singular { pivot: pmax });
        }
        if p != k {
            for j in 0..n {
                let t = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, t);
            }
            for j in 0..x.cols {
                let t = x.get(k, j);
                x.set(k, j, x.get(p, j));
                x.set(p, j, t);
            }
        }
        let akk = lu.get(k, k);
        for i in k + 1..n {
            let m = lu.get(i, k) / akk;
            lu.set(i, k, m);
            if m == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = lu.get(i, j) - m * lu.get(k, j);
                lu.set(i, j, v);
            }
            for j in 0..x.cols {
                let v = x.get(i, j) - m * x.get(k, j);
                x.set(i, j, v);
            }
        }
    }
    // back substitution
    for j in 0..x.cols {
        for i in (0..n).rev() {
            let mut s = x.get(i, j);
            for k in i + 1..n {
                s -= lu.get(i, k) * x.get(k, j);
            }
            x.set(i, j, s / lu.get(i, i));
        }
    }
    Ok(x)
}

/// All eigenvalues (with multiplicity) of a real square matrix.
///
/// Balances, reduces to upper Hessenberg form by orthogonal similarity, then
/// runs Francis double-shift QR with deflation. Real eigenvalues come out with
/// zero imaginary part; complex ones in conjugate pairs.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    if n == 1 {
        return Ok(vec![Complex64::new(a.get(0, 0), 0.0)]);
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    francis_qr(&mut h)
}

/// Spectral radius `max |lambda|`.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64, LinalgError> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Iterative diagonal scaling to reduce the matrix norm (radix-2 balancing).
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows;
    let sq = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += libm::fabs(a.get(j, i));
                    r += libm::fabs(a.get(i, j));
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut cc = c;
                while cc < g {
                    f *= RADIX;
                    cc *= sq;
                }
                g = r * RADIX;
                while cc > g {
                    f /= RADIX;
                    cc /= sq;
                }
                if (cc + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        let v = a.get(i, j) * ginv;
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows;
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        // Householder vector annihilating column k below row k+1
        let mut alpha = 0.0;
        for i in k + 1..n {
            alpha += a.get(i, k) * a.get(i, k);
        }
        if alpha == 0.0 {
            continue;
        }
        alpha = libm::sqrt(alpha);
        if a.get(k + 1, k) > 0.0 {
            alpha = -alpha;
        }
        let v0 = a.get(k + 1, k) - alpha;
        let mut vnorm2 = v0 * v0;
        v[k + 1] = v0;
        for i in k + 2..n {
            v[i] = a.get(i, k);
            vnorm2 += v[i] * v[i];
        }
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A
        for j in k..n {
            let mut s = 0.0;
            for i in k + 1..n {
                s += v[i] * a.get(i, j);
            }
            s *= beta;
            for i in k + 1..n {
                let val = a.get(i, j) - s * v[i];
                a.set(i, j, val);
            }
        }
        // A <- A (I - beta v v^T)
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += a.get(i, j) * v[j];
            }
            s *= beta;
            for j in k + 1..n {
                let val = a.get(i, j) - s * v[j];
                a.set(i, j, val);
            }
        }
        a.set(k + 1, k, alpha);
        for i in k + 2..n {
            a.set(i, k, 0.0);
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn francis_qr(h: &mut DenseMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let n = h.rows;
    let max_sweeps = 100 * n;
    let mut eig = Vec::with_capacity(n);
    let mut total_sweeps = 0usize;
    let mut nn = n as isize - 1;
    let mut t_shift = 0.0;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // look for a negligible subdiagonal element
            let mut l = nn;
            while l > 0 {
                let s = libm::fabs(h.get((l - 1) as usize, (l - 1) as usize))
                    + libm::fabs(h.get(l as usize, l as usize));
                let s = if s == 0.0 { h.norm_inf() } else { s };
                if libm::fabs(h.get(l as usize, (l - 1) as usize)) <= DEFLATION_TOL * s {
                    h.set(l as usize, (l - 1) as usize, 0.0);
                    break;
                }
                l -= 1;
            }
            let x = h.get(nn as usize, nn as usize);
            if l == nn {
                eig.push(Complex64::new(x + t_shift, 0.0));
                nn -= 1;
                break;
            }
            let y = h.get((nn - 1) as usize, (nn - 1) as usize);
            let w = h.get(nn as usize, (nn - 1) as usize) * h.get((nn - 1) as usize, nn as usize);
            if l == nn - 1 {
                // 2x2 trailing block
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = libm::sqrt(libm::fabs(q));
                let x = x + t_shift;
                if q >= 0.0 {
                    let z = p + if p >= 0.0 { z } else { -z };
                    eig.push(Complex64::new(x + z, 0.0));
                    if z != 0.0 {
                        eig.push(Complex64::new(x - w / z, 0.0));
                    } else {
                        eig.push(Complex64::new(x, 0.0));
                    }
                } else {
                    eig.push(Complex64::new(x + p, z));
                    eig.push(Complex64::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            total_sweeps += 1;
            if total_sweeps > max_sweeps {
                return Err(LinalgError::NoConvergence { sweeps: max_sweeps });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t_shift += x;
                for i in 0..=nn as usize {
                    let v = h.get(i, i) - x;
                    h.set(i, i, v);
                }
                let s = libm::fabs(h.get(nn as usize, (nn - 1) as usize))
                    + libm::fabs(h.get((nn - 1) as usize, (nn - 2) as usize));
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // find two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let z = h.get(m as usize, m as usize);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h.get((m + 1) as usize, m as usize)
                    + h.get(m as usize, (m + 1) as usize);
                q = h.get((m + 1) as usize, (m + 1) as usize) - z - rr - ss;
                r = h.get((m + 2) as usize, (m + 1) as usize);
                let s = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = libm::fabs(h.get(m as usize, (m - 1) as usize))
                    * (libm::fabs(q) + libm::fabs(r));
                let v = libm::fabs(p)
                    * (libm::fabs(h.get((m - 1) as usize, (m - 1) as usize))
                        + libm::fabs(z)
                        + libm::fabs(h.get((m + 1) as usize, (m + 1) as usize)));
                if u <= DEFLATION_TOL * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h.set(i as usize, (i - 2) as usize, 0.0);
                if i > m + 2 {
                    h.set(i as usize, (i - 3) as usize, 0.0);
                }
            }
            // double QR step over rows l..nn
            for k in m..nn {
                if k != m {
                    p = h.get(k as usize, (k - 1) as usize);
                    q = h.get((k + 1) as usize, (k - 1) as usize);
                    r = if k != nn - 1 { h.get((k + 2) as usize, (k - 1) as usize) } else { 0.0 };
                    x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s_raw = libm::sqrt(p * p + q * q + r * r);
                let s = if p >= 0.0 { s_raw } else { -s_raw };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        let v = -h.get(k as usize, (k - 1) as usize);
                        h.set(k as usize, (k - 1) as usize, v);
                    }
                } else {
                    h.set(k as usize, (k - 1) as usize, -s * x);
                }
                p += s;
                let px = p / s;
                let py = q / s;
                let pz = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in k as usize..=nn as usize {
                    let mut pp = h.get(k as usize, j) + q * h.get((k + 1) as usize, j);
                    if k != nn - 1 {
                        pp += r * h.get((k + 2) as usize, j);
                        let v = h.get((k + 2) as usize, j) - pp * pz;
                        h.set((k + 2) as usize, j, v);
                    }
                    let v1 = h.get((k + 1) as usize, j) - pp * py;
                    h.set((k + 1) as usize, j, v1);
                    let v0 = h.get(k as usize, j) - pp * px;
                    h.set(k as usize, j, v0);
                }
                // column modification
                let imax = if nn < k + 3 { nn } else { k + 3 };
                for i in l as usize..=imax as usize {
                    let mut pp = px * h.get(i, k as usize) + py * h.get(i, (k + 1) as usize);
                    if k != nn - 1 {
                        pp += pz * h.get(i, (k + 2) as usize);
                        let v = h.get(i, (k + 2) as usize) - pp * r;
                        h.set(i, (k + 2) as usize, v);
                    }
                    let v1 = h.get(i, (k + 1) as usize) - pp * q;
                    h.set(i, (k + 1) as usize, v1);
                    let v0 = h.get(i, k as usize) - pp;
                    h.set(i, k as usize, v0);
                }
            }
        }
    }
    Ok(eig)
}

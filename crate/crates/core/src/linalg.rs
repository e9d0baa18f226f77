//! Small dense complex linear algebra.
//!
//! Everything in this crate works with matrices of a few dozen rows at most,
//! so the routines here favour clarity over blocking or cache tricks:
//!
//! * [`eigen_decompose`] balances the matrix, reduces it to upper Hessenberg
//!   form with Householder reflections, runs a single-shift complex QR
//!   iteration to a Schur form and back-substitutes for the eigenvectors.
//! * [`solve_linear`] is LU with partial pivoting.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Double precision complex scalar used throughout the crate.
pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// QR sweeps allowed per eigenvalue before giving up.
pub const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Pivots smaller than this fraction of the largest entry are treated as zero.
pub const SINGULAR_PIVOT_RELATIVE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("QR iteration did not converge within {iterations} sweeps")]
    ConvergenceFailure { iterations: usize },
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::new(dim, data)
    }

    /// Real matrix given as rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim, "vector length does not match matrix");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Real parts of `A x` for a real vector `x`; used for stochastic matrices.
    pub fn mul_real_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "vector length does not match matrix");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a.re * b).sum())
            .collect()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { dim: n, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{z:.6}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Eigenpairs sorted by descending modulus (ties: descending real part, then
/// descending imaginary part). Eigenvectors have unit 2-norm and their first
/// largest-modulus component is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.first().map_or(0.0, |z| z.norm())
    }
}

/// Ordering used for eigenvalue lists: larger modulus first.
pub fn eigenvalue_order(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| b.re.total_cmp(&a.re))
        .then_with(|| b.im.total_cmp(&a.im))
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `v` to unit 2-norm and rotates it so the first component of
/// largest modulus is real and non-negative. Zero vectors are left alone.
pub fn normalize_phase(v: &mut [C64]) {
    let norm = norm2(v);
    if norm == 0.0 || !norm.is_finite() {
        return;
    }
    let mut pivot = 0;
    let mut best = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            pivot = i;
        }
    }
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
    v[pivot] = C64::new(v[pivot].norm(), 0.0);
}

/// Full eigendecomposition of a general complex matrix.
pub fn eigen_decompose(a: &ComplexMatrix) -> Result<EigenResult, LinalgError> {
    let n = a.dim();
    if n == 1 {
        return Ok(EigenResult {
            values: vec![a[(0, 0)]],
            vectors: vec![vec![ONE]],
        });
    }

    let mut h = a.clone();
    let scaling = balance(&mut h);
    let mut z = hessenberg(&mut h);
    schur(&mut h, &mut z)?;

    let values: Vec<C64> = (0..n).map(|i| h[(i, i)]).collect();
    let triangular_vectors = triangular_eigenvectors(&h);

    let mut pairs: Vec<(C64, Vec<C64>)> = values
        .iter()
        .zip(triangular_vectors)
        .map(|(&lambda, x)| {
            let mut v = z.mul_vec(&x);
            for (vi, s) in v.iter_mut().zip(&scaling) {
                *vi *= s;
            }
            normalize_phase(&mut v);
            (lambda, v)
        })
        .collect();
    pairs.sort_by(|a, b| eigenvalue_order(&a.0, &b.0));

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenResult { values, vectors })
}

/// Diagonal similarity `D^{-1} A D` with power-of-two entries that evens out
/// row and column norms. Returns the diagonal of `D`.
fn balance(a: &mut ComplexMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = a.dim();
    let mut scale = vec![1.0; n];
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
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
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                scale[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            return scale;
        }
    }
}

/// Householder reduction to upper Hessenberg form. Returns the accumulated
/// unitary transform `Q` with `A = Q H Q^H`.
fn hessenberg(a: &mut ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let alpha = norm2(&v);
        if alpha == 0.0 {
            continue;
        }
        let lead = v[0];
        let phase = if lead.norm() == 0.0 { ONE } else { lead / lead.norm() };
        v[0] += phase * alpha;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }

        // A <- (I - 2vv^H) A
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= 2.0 * vt * dot;
            }
        }
        // A <- A (I - 2vv^H), Q <- Q (I - 2vv^H)
        for m in [&mut *a, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(t, vt)| m[(i, k + 1 + t)] * vt).sum();
                for (t, vt) in v.iter().enumerate() {
                    m[(i, k + 1 + t)] -= 2.0 * dot * vt.conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    q
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn zeroing(a: C64, b: C64) -> Self {
        let bn = b.norm();
        if bn == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        let an = a.norm();
        if an == 0.0 {
            return Self { c: 0.0, s: b.conj() / bn };
        }
        let r = an.hypot(bn);
        Self {
            c: an / r,
            s: (a / an) * b.conj() / r,
        }
    }

    fn apply_rows(&self, m: &mut ComplexMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = self.c * x + self.s * y;
            m[(k + 1, j)] = -self.s.conj() * x + self.c * y;
        }
    }

    fn apply_cols_adjoint(&self, m: &mut ComplexMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = x * self.c + y * self.s.conj();
            m[(i, k + 1)] = -x * self.s + y * self.c;
        }
    }
}

/// Shifted QR iteration on a Hessenberg matrix, in place, to upper triangular
/// (complex Schur) form. Transformations are accumulated into `z`.
fn schur(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<(), LinalgError> {
    let n = h.dim();
    let budget = QR_ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Locate the start of the trailing unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let reference = if diag == 0.0 { h.frobenius_norm() } else { diag };
            if sub <= f64::EPSILON * reference {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(LinalgError::ConvergenceFailure { iterations: total });
        }

        let shift = if since_deflation % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.4375 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_rows(h, k, k..n);
            h[(k + 1, k)] = ZERO;
            rotations.push(g);
        }
        for (offset, g) in rotations.iter().enumerate() {
            let k = lo + offset;
            g.apply_cols_adjoint(h, k, 0..(k + 2).min(hi + 1));
            g.apply_cols_adjoint(z, k, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }

    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let r1 = half_tr + disc;
    let r2 = half_tr - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors(t: &ComplexMatrix) -> Vec<Vec<C64>> {
    let n = t.dim();
    let small = (f64::EPSILON * t.frobenius_norm()).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut x = vec![ZERO; n];
            x[k] = ONE;
            for i in (0..k).rev() {
                let rhs: C64 = (i + 1..=k).map(|j| t[(i, j)] * x[j]).sum();
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < small {
                    denom = C64::new(small, 0.0);
                }
                x[i] = -rhs / denom;
                let big = x[i].norm();
                if big > 1e100 {
                    for xj in x.iter_mut() {
                        *xj /= big;
                    }
                }
            }
            x
        })
        .collect()
}

/// Solves `A x = b` by LU decomposition with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
    let n = a.dim();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let scale = a.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(LinalgError::SingularMatrix { column: 0, pivot: 0.0 });
    }
    let threshold = SINGULAR_PIVOT_RELATIVE * scale;

    let mut lu = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs < threshold {
            return Err(LinalgError::SingularMatrix {
                column: col,
                pivot: pivot_abs,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            x.swap(col, pivot_row);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == ZERO {
                continue;
            }
            lu[(r, col)] = ZERO;
            for j in col + 1..n {
                let upper = lu[(col, j)];
                lu[(r, j)] -= factor * upper;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for i in (0..n).rev() {
        let tail: C64 = (i + 1..n).map(|j| lu[(i, j)] * x[j]).sum();
        x[i] = (x[i] - tail) / lu[(i, i)];
    }
    Ok(x)
}

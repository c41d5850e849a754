//! Dense complex matrix kernel.
//!
//! Everything above this module works with operators on spaces of dimension
//! at most a few dozen, so the kernel keeps a single row-major dense
//! representation and an O(d³) cyclic-Jacobi Hermitian eigensolver. No
//! sparse path, no non-Hermitian eigenproblems.

use num_complex::Complex;

use crate::{Error, Result, EPS_HERM, EPS_PSD};

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Shorthand for a real complex scalar.
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Width of the eigenvalue band around zero attributed to roundoff rather
/// than structure.
const ROUNDOFF_BAND: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidDims(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// Column `j` as a vector of entries.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Kronecker product; block (i,j) of the result is `self[i,j] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for r in 0..other.rows {
                    for c in 0..other.cols {
                        out[(i * other.rows + r, j * other.cols + c)] = a * other[(r, c)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self − self†`.
    pub fn hermiticity_violation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// Exact Hermitian part (self + self†)/2; used to strip roundoff drift.
    pub fn hermitized(&self) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for r in 0..self.rows {
            out[(r, r)] = c64(out[(r, r)].re, 0.0);
            for c in (r + 1)..self.cols {
                let avg = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                out[(r, c)] = avg;
                out[(c, r)] = avg.conj();
            }
        }
        out
    }

    /// Reduces the operator to the subsystems listed in `keep` (original order).
    ///
    /// `dims` partitions the space; the trace is preserved.
    pub fn partial_trace(&self, dims: &SubsystemDims, keep: &[usize]) -> Result<Self> {
        if !self.is_square() || dims.total() != self.rows {
            return Err(Error::InvalidDims(format!(
                "subsystem dims {:?} do not partition a {}x{} matrix",
                dims.dims(),
                self.rows,
                self.cols
            )));
        }
        let n = dims.len();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.is_empty() || keep_sorted.len() != keep.len() {
            return Err(Error::InvalidDims(
                "keep set must be a non-empty set of distinct subsystem indices".into(),
            ));
        }
        if *keep_sorted.last().unwrap() >= n {
            return Err(Error::InvalidDims(format!(
                "keep index {} out of range for {} subsystems",
                keep_sorted.last().unwrap(),
                n
            )));
        }

        let full = dims.dims();
        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| full[k]).collect();
        let out_dim: usize = kept_dims.iter().product();
        let mut out = Self::zeros(out_dim, out_dim);

        // Mixed-radix digits, subsystem 0 most significant (kron convention).
        let digits = |mut idx: usize| -> Vec<usize> {
            let mut d = vec![0usize; n];
            for k in (0..n).rev() {
                d[k] = idx % full[k];
                idx /= full[k];
            }
            d
        };
        let kept_index = |d: &[usize]| -> usize {
            let mut idx = 0;
            for (pos, &k) in keep_sorted.iter().enumerate() {
                idx = idx * kept_dims[pos] + d[k];
            }
            idx
        };

        let total = dims.total();
        for r in 0..total {
            let rd = digits(r);
            'cols: for c in 0..total {
                let cd = digits(c);
                for k in 0..n {
                    if !keep_sorted.contains(&k) && rd[k] != cd[k] {
                        continue 'cols;
                    }
                }
                let or = kept_index(&rd);
                let oc = kept_index(&cd);
                let v = self[(r, c)];
                out[(or, oc)] += v;
            }
        }
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the matching orthonormal
    /// eigenvectors as columns, so that `self = Q diag(λ) Q†`.
    pub fn hermitian_eig(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let violation = self.hermiticity_violation();
        if violation > EPS_HERM {
            return Err(Error::NotHermitian { violation });
        }
        let n = self.rows;
        if n == 0 {
            return Ok((vec![], ComplexMatrix::zeros(0, 0)));
        }

        let mut a = self.hermitized();
        let mut q = ComplexMatrix::identity(n);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let target = scale * 1e-15 * n as f64;

        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for r in (p + 1)..n {
                    off = off.max(a[(p, r)].norm());
                }
            }
            if off <= target {
                break;
            }
            for p in 0..n {
                for r in (p + 1)..n {
                    let apq = a[(p, r)];
                    let g = apq.norm();
                    if g <= target * 1e-3 {
                        continue;
                    }
                    // Phase pulls the pivot onto the real axis; then it is
                    // the classic symmetric 2x2 rotation.
                    let u = apq / g;
                    let tau = (a[(r, r)].re - a[(p, p)].re) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // A <- A · U with U = [[c, s·u],[−s·u̅, c]] on (p,r).
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, r)];
                        a[(k, p)] = akp * c - akq * u.conj() * s;
                        a[(k, r)] = akp * u * s + akq * c;
                    }
                    // A <- U† · A.
                    for k in 0..n {
                        let bpk = a[(p, k)];
                        let bqk = a[(r, k)];
                        a[(p, k)] = bpk * c - bqk * u * s;
                        a[(r, k)] = bpk * u.conj() * s + bqk * c;
                    }
                    // Accumulate eigenvectors: Q <- Q · U.
                    for k in 0..n {
                        let qkp = q[(k, p)];
                        let qkq = q[(k, r)];
                        q[(k, p)] = qkp * c - qkq * u.conj() * s;
                        q[(k, r)] = qkp * u * s + qkq * c;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
        let mut vectors = ComplexMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new_col)] = q[(k, old_col)];
            }
        }
        Ok((eigenvalues, vectors))
    }

    /// PSD square root via the Hermitian eigendecomposition.
    ///
    /// Eigenvalues inside the roundoff band ±1e−12 are treated as exact
    /// zeros — the square root would amplify stray 1e−16 eigenvalues of an
    /// exact projector into 1e−8 noise otherwise — and anything below
    /// −`EPS_PSD` is rejected as genuinely not PSD.
    pub fn matrix_sqrt_psd(&self) -> Result<Self> {
        let (eigenvalues, vectors) = self.hermitian_eig()?;
        let clipped = clip_spectrum(&eigenvalues)?;
        let mut out = Self::zeros(self.rows, self.rows);
        for (k, lambda) in clipped.iter().enumerate() {
            if *lambda <= ROUNDOFF_BAND {
                continue;
            }
            let root = lambda.sqrt();
            let v = vectors.column(k);
            for i in 0..self.rows {
                for j in 0..self.rows {
                    out[(i, j)] += v[i] * v[j].conj() * root;
                }
            }
        }
        Ok(out.hermitized())
    }

    /// Most negative eigenvalue, for PSD checks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (eigenvalues, _) = self.hermitian_eig()?;
        Ok(eigenvalues.first().copied().unwrap_or(0.0))
    }
}

/// Clips roundoff-negative eigenvalues to zero; rejects genuinely negative
/// spectra (below −`EPS_PSD`).
pub fn clip_spectrum(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if let Some(&min) = eigenvalues.first() {
        if min < -EPS_PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    Ok(eigenvalues.iter().map(|&l| l.max(0.0)).collect())
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Ordered subsystem dimensions annotating a composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
}

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDims(format!(
                "subsystem dims must be non-empty and positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Self {
        Self { dims: vec![dim] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Pauli σ_x.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]).unwrap()
}

/// Pauli σ_y.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)]).unwrap()
}

/// Pauli σ_z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)]).unwrap()
}

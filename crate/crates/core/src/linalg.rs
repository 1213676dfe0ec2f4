//! Dense symmetric linear algebra for small systems.
//!
//! Everything here works on row-major `n × n` slices. [`SpdMatrix`] is the
//! validated system matrix with its spectrum cached at construction; the
//! free functions serve the solver (Hessian inertia, Newton steps).

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::vecops::{dot, matvec, norm_inf};

/// Relative asymmetry accepted (and symmetrized away) by [`SpdMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-9;
/// `λ₁ ≤ PD_TOL · λ_n` is rejected as not positive definite.
pub const PD_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is empty")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {lambda_min:e}, largest {lambda_max:e}")]
    NotPositiveDefinite { lambda_min: f64, lambda_max: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is numerically singular")]
    Singular,
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
/// `vectors` is row-major with eigenvector `k` stored in column `k`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors[i * n + k]).collect()
    }
}

/// Cyclic Jacobi eigenvalue iteration.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-14 · ‖A‖_F` (or vanishes). The input is assumed symmetric; only the
/// upper triangle drives the rotations.
pub fn symmetric_eigen(n: usize, entries: &[f64]) -> SymmetricEigen {
    assert_eq!(entries.len(), n * n, "symmetric_eigen: bad buffer length");
    let mut a = entries.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-14 * frob;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(n, &a);
        if off == 0.0 || off < target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + dst] = v[row * n + src];
        }
    }
    SymmetricEigen { values, vectors }
}

fn off_diagonal_norm(n: usize, a: &[f64]) -> f64 {
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

/// Gaussian elimination with partial pivoting. Used for Newton steps whose
/// Jacobian is symmetric but possibly indefinite.
pub fn solve_dense(n: usize, m: &[f64], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut a = m.to_vec();
    let mut x = b.to_vec();
    let scale = norm_inf(m).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= 1e-14 * scale {
            return Err(LinalgError::Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in (col + 1)..n {
            s -= a[col * n + k] * x[k];
        }
        x[col] = s / a[col * n + col];
    }
    Ok(x)
}

/// Dense symmetric positive definite matrix with cached spectral data.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    n: usize,
    entries: Vec<f64>,
    eigen: SymmetricEigen,
    ones_form: f64,
    cholesky: Vec<f64>,
}

impl SpdMatrix {
    /// Validates and builds from rows. Rows within [`SYMMETRY_TOL`] of
    /// symmetric are replaced by `(A + Aᵗ)/2`.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::NotSquare { row: i, expected: n, found: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
                entries.push(x);
            }
        }
        Self::from_row_major(n, entries)
    }

    pub fn from_row_major(n: usize, mut entries: Vec<f64>) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        if let Some(k) = entries.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { row: k / n, col: k % n });
        }
        let amax = norm_inf(&entries);
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((entries[i * n + j] - entries[j * n + i]).abs());
            }
        }
        let tolerance = SYMMETRY_TOL * amax;
        if asym > tolerance {
            return Err(LinalgError::NotSymmetric { max_asymmetry: asym, tolerance });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                entries[i * n + j] = m;
                entries[j * n + i] = m;
            }
        }

        let eigen = symmetric_eigen(n, &entries);
        let lambda_min = eigen.values[0];
        let lambda_max = eigen.values[n - 1];
        if !(lambda_max > 0.0) || lambda_min <= PD_TOL * lambda_max {
            return Err(LinalgError::NotPositiveDefinite { lambda_min, lambda_max });
        }

        let mut ones_form = 0.0;
        for i in 0..n {
            ones_form += entries[i * n + i];
            for j in (i + 1)..n {
                ones_form += 2.0 * entries[i * n + j];
            }
        }
        let cholesky = cholesky(n, &entries).ok_or(LinalgError::NotPositiveDefinite {
            lambda_min,
            lambda_max,
        })?;
        Ok(SpdMatrix { n, entries, eigen, ones_form, cholesky })
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = 1.0;
        }
        Self::from_row_major(n, e).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Eigenvalues ascending.
    pub fn spectrum(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eigen
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.values[self.n - 1]
    }

    /// `1ᵗA1 = Tr(A) + 2 Σ_{i<j} a_ij`.
    pub fn ones_form(&self) -> f64 {
        self.ones_form
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        matvec(self.n, &self.entries, x)
    }

    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        dot(u, &self.mul_vec(u))
    }

    /// `c · A`; `c` must be positive.
    pub fn scaled(&self, c: f64) -> Result<Self, LinalgError> {
        Self::from_row_major(self.n, self.entries.iter().map(|x| c * x).collect())
    }

    fn check_dim(&self, len: usize) -> Result<(), LinalgError> {
        if len != self.n {
            Err(LinalgError::DimensionMismatch { expected: self.n, found: len })
        } else {
            Ok(())
        }
    }

    /// Evaluates `uᵗAu` once and reports the three norm inequalities
    /// `λ₁‖u‖₂² ≤ uᵗAu ≤ λ_n‖u‖₂²` and `‖u‖∞ ≤ (uᵗAu)^{1/2}/√λ₁`, each
    /// with slack `1e-10·(1 + |uᵗAu|)`.
    pub fn verify_norm_bounds(&self, u: &[f64]) -> Result<NormBoundCheck, LinalgError> {
        self.check_dim(u.len())?;
        let quad = self.quadratic_form(u);
        let slack = 1e-10 * (1.0 + quad.abs());
        let sq = dot(u, u);
        let inf = norm_inf(u);
        Ok(NormBoundCheck {
            quadratic_form: quad,
            lower_ok: self.lambda_min() * sq <= quad + slack,
            upper_ok: quad <= self.lambda_max() * sq + slack,
            infnorm_ok: self.lambda_min() * inf * inf <= quad + slack,
        })
    }

    /// Sign conditions (A1): nonpositive off-diagonals; (A2): additionally
    /// each row `i ≥ 2` has a strictly negative entry left of the diagonal.
    pub fn check_sign_conditions(&self) -> SignConditionVerdict {
        let n = self.n;
        let a1_holds = (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j) <= 0.0));
        let a2_witnesses: Vec<Option<usize>> = (1..n)
            .map(|i| (0..i).find(|&j| self.get(i, j) < 0.0))
            .collect();
        let a2_holds = a1_holds && a2_witnesses.iter().all(Option::is_some);
        SignConditionVerdict { a1_holds, a2_holds, a2_witnesses }
    }

    /// Solves `Ax = b` through the cached Cholesky factor.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check_dim(b.len())?;
        let n = self.n;
        let l = &self.cholesky;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        Ok(y)
    }
}

fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBoundCheck {
    pub quadratic_form: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub infnorm_ok: bool,
}

impl NormBoundCheck {
    pub fn all(&self) -> bool {
        self.lower_ok && self.upper_ok && self.infnorm_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignConditionVerdict {
    pub a1_holds: bool,
    pub a2_holds: bool,
    /// Entry `i - 1` is the first column `j < i` with `a_ij < 0` for row
    /// `i` (0-based rows `1..n`).
    pub a2_witnesses: Vec<Option<usize>>,
}

/// `Trid_n(a, b, a)` as rows.
pub fn tridiagonal_rows(n: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        b
                    } else if i.abs_diff(j) == 1 {
                        a
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn trid(n: usize, a: f64, b: f64) -> SpdMatrix {
        SpdMatrix::new(&tridiagonal_rows(n, a, b)).unwrap()
    }

    #[test]
    fn identity_spectrum_and_ones_form() {
        let m = SpdMatrix::identity(3);
        assert_eq!(m.spectrum(), &[1.0, 1.0, 1.0]);
        assert_eq!(m.ones_form(), 3.0);
    }

    #[test]
    fn trid3_first_eigenvalue() {
        let m = trid(3, -1.0, 2.0);
        assert!((m.lambda_min() - (2.0 - 2.0 * (PI / 4.0).cos())).abs() < 1e-12);
        assert!((m.lambda_min() - 0.585786437626905).abs() < 1e-12);
        assert_eq!(m.ones_form(), 2.0);
    }

    #[test]
    fn indefinite_is_rejected() {
        let err = SpdMatrix::new(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap_err();
        match err {
            LinalgError::NotPositiveDefinite { lambda_min, lambda_max } => {
                assert!((lambda_min + 1.0).abs() < 1e-12);
                assert!((lambda_max - 3.0).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn asymmetry_tolerance() {
        let near = SpdMatrix::new(&[vec![2.0, 1.0 + 1e-12], vec![1.0, 2.0]]).unwrap();
        assert_eq!(near.get(0, 1), near.get(1, 0));
        assert!(matches!(
            SpdMatrix::new(&[vec![2.0, 1.1], vec![1.0, 2.0]]),
            Err(LinalgError::NotSymmetric { .. })
        ));
        assert!(matches!(
            SpdMatrix::new(&[vec![2.0, 1.0]]),
            Err(LinalgError::NotSquare { .. })
        ));
        assert!(matches!(
            SpdMatrix::new(&[vec![f64::NAN]]),
            Err(LinalgError::NonFinite { .. })
        ));
    }

    #[test]
    fn norm_bounds_identity_and_eigenvector() {
        let id = SpdMatrix::identity(2);
        let c = id.verify_norm_bounds(&[1.0, 1.0]).unwrap();
        assert!(c.all());
        assert_eq!(c.quadratic_form, 2.0);

        let m = trid(2, -1.0, 2.0);
        let v = m.eigen().vector(0);
        let c = m.verify_norm_bounds(&v).unwrap();
        assert!(c.all());
        assert!((c.quadratic_form - m.lambda_min() * dot(&v, &v)).abs() < 1e-10);
        assert!(matches!(
            m.verify_norm_bounds(&[1.0]),
            Err(LinalgError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn sign_conditions_tridiagonal_and_fourth_order() {
        let v = trid(5, -1.0, 2.0).check_sign_conditions();
        assert!(v.a1_holds && v.a2_holds);
        assert_eq!(v.a2_witnesses, vec![Some(0), Some(1), Some(2), Some(3)]);

        let biharmonic = SpdMatrix::new(&[
            vec![6.0, -4.0, 1.0, 0.0],
            vec![-4.0, 6.0, -4.0, 1.0],
            vec![1.0, -4.0, 6.0, -4.0],
            vec![0.0, 1.0, -4.0, 6.0],
        ])
        .unwrap();
        let v = biharmonic.check_sign_conditions();
        assert!(!v.a1_holds);
        assert!(!v.a2_holds);
    }

    #[test]
    fn spd_solves() {
        let id = SpdMatrix::identity(3);
        assert_eq!(id.solve_spd(&[1.0, -2.0, 3.5]).unwrap(), vec![1.0, -2.0, 3.5]);
        let m = trid(2, -1.0, 2.0);
        let x = m.solve_spd(&[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dense_solve_indefinite() {
        let m = [1.0, 2.0, 2.0, 1.0];
        let x = solve_dense(2, &m, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert_eq!(solve_dense(2, &[1.0, 1.0, 1.0, 1.0], &[1.0, 2.0]), Err(LinalgError::Singular));
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let m = trid(6, -1.0, 3.0);
        let e = m.eigen();
        for i in 0..6 {
            for j in 0..6 {
                let d = dot(&e.vector(i), &e.vector(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-12);
            }
            let av = m.mul_vec(&e.vector(i));
            let lv: Vec<f64> = e.vector(i).iter().map(|x| x * e.values[i]).collect();
            assert!(crate::vecops::norm2(&crate::vecops::axpy(&av, -1.0, &lv)) < 1e-12);
        }
    }
}

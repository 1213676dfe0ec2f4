//! Problem assembly: generic `(A, f)` pairs, second-order tridiagonal
//! systems, the fourth-order pentadiagonal system and Dirichlet problems on
//! lattice nets.

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use thiserror::Error;

use crate::linalg::{tridiagonal_rows, LinalgError, SpdMatrix};
use crate::nonlin::Nonlinearity;

/// Agreement required between the Jacobi `λ₁` and the tridiagonal formula.
pub const TRIDIAGONAL_SPECTRUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix has dimension {matrix} but the nonlinearity has {nonlinearity} components")]
    DimensionMismatch { matrix: usize, nonlinearity: usize },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error("net is empty")]
    EmptyNet,
    #[error("net is disconnected: {reached} of {total} points reachable from the first")]
    Disconnected { reached: usize, total: usize },
    #[error("first eigenvalue {computed} disagrees with the closed form {expected}")]
    SpectrumCheck { computed: f64, expected: f64 },
}

pub type LatticePoint = (i64, i64);

/// A finite connected set of lattice points with its exterior boundary.
///
/// Points are indexed row-major over sorted `(j, i)`; on a rectangle
/// `[1, m1] × [1, m2]` this is `h(i, j) = i + m1 (j − 1)` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    points: Vec<LatticePoint>,
    index: BTreeMap<LatticePoint, usize>,
    boundary: Vec<LatticePoint>,
}

fn neighbors((i, j): LatticePoint) -> [LatticePoint; 4] {
    [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
}

impl Net {
    pub fn new(points: impl IntoIterator<Item = LatticePoint>) -> Result<Net, ProblemError> {
        let set: BTreeSet<(i64, i64)> = points.into_iter().map(|(i, j)| (j, i)).collect();
        let points: Vec<LatticePoint> = set.into_iter().map(|(j, i)| (i, j)).collect();
        if points.is_empty() {
            return Err(ProblemError::EmptyNet);
        }
        let index: BTreeMap<LatticePoint, usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();

        let mut seen = vec![false; points.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(k) = queue.pop_front() {
            for q in neighbors(points[k]) {
                if let Some(&m) = index.get(&q) {
                    if !seen[m] {
                        seen[m] = true;
                        reached += 1;
                        queue.push_back(m);
                    }
                }
            }
        }
        if reached != points.len() {
            return Err(ProblemError::Disconnected { reached, total: points.len() });
        }

        let boundary: BTreeSet<(i64, i64)> = points
            .iter()
            .flat_map(|&p| neighbors(p))
            .filter(|q| !index.contains_key(q))
            .map(|(i, j)| (j, i))
            .collect();
        let boundary = boundary.into_iter().map(|(j, i)| (i, j)).collect();
        Ok(Net { points, index, boundary })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in index order.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    /// Exterior boundary, in the same `(j, i)` order as the points.
    pub fn boundary(&self) -> &[LatticePoint] {
        &self.boundary
    }

    /// 0-based index of a point.
    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.index.contains_key(&p)
    }
}

/// `[1, m1] × [1, m2]`.
pub fn rectangle_net(m1: usize, m2: usize) -> Result<Net, ProblemError> {
    if m1 == 0 || m2 == 0 {
        return Err(ProblemError::EmptyNet);
    }
    Net::new((1..=m2 as i64).flat_map(|j| (1..=m1 as i64).map(move |i| (i, j))))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Generic,
    SecondOrder { n: usize, a: f64, b: f64 },
    FourthOrder { n: usize },
    Lattice(Net),
}

/// The system `Au = λ f(u)` without `λ`.
#[derive(Debug, Clone)]
pub struct Problem {
    matrix: SpdMatrix,
    nonlinearity: Nonlinearity,
    origin: Origin,
    labels: Vec<String>,
}

impl Problem {
    pub fn new(matrix: SpdMatrix, nonlinearity: Nonlinearity) -> Result<Problem, ProblemError> {
        let labels = (1..=matrix.dim()).map(|k| format!("{k}")).collect();
        Self::assemble(matrix, nonlinearity, Origin::Generic, labels)
    }

    fn assemble(
        matrix: SpdMatrix,
        nonlinearity: Nonlinearity,
        origin: Origin,
        labels: Vec<String>,
    ) -> Result<Problem, ProblemError> {
        if matrix.dim() != nonlinearity.len() {
            return Err(ProblemError::DimensionMismatch {
                matrix: matrix.dim(),
                nonlinearity: nonlinearity.len(),
            });
        }
        Ok(Problem { matrix, nonlinearity, origin, labels })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SpdMatrix {
        &self.matrix
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Per-index description: `k` (1-based) or a lattice point `(i,j)`.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same origin and labels with `f` replaced by `c·f`.
    pub fn with_scaled_nonlinearity(&self, c: f64) -> Problem {
        Problem { nonlinearity: self.nonlinearity.scaled(c), ..self.clone() }
    }

    /// `(c·A, f)`, recorded as a generic problem.
    pub fn with_scaled_matrix(&self, c: f64) -> Result<Problem, ProblemError> {
        Ok(Problem {
            matrix: self.matrix.scaled(c)?,
            origin: Origin::Generic,
            ..self.clone()
        })
    }
}

/// `Trid_n(a, b, a) u = λ f(u)`.
///
/// `Trid_n(a, b, a)` is positive definite exactly when
/// `cos(π/(n+1)) < −b/(2a)`; its first eigenvalue is `b + 2a cos(π/(n+1))`.
pub fn build_tridiagonal(n: usize, a: f64, b: f64, f: Nonlinearity) -> Result<Problem, ProblemError> {
    if n < 2 || !(a < 0.0) || !(b > 0.0) {
        return Err(ProblemError::BadArgument(format!(
            "tridiagonal problems need n >= 2, a < 0 < b; got n = {n}, a = {a}, b = {b}"
        )));
    }
    let c = (PI / (n + 1) as f64).cos();
    let expected = b + 2.0 * a * c;
    if !(c < -b / (2.0 * a)) {
        return Err(LinalgError::NotPositiveDefinite { lambda_min: expected, lambda_max: b - 2.0 * a * c }.into());
    }
    let matrix = SpdMatrix::new(&tridiagonal_rows(n, a, b))?;
    let computed = matrix.lambda_min();
    if (computed - expected).abs() > TRIDIAGONAL_SPECTRUM_TOL * (1.0 + expected.abs()) {
        return Err(ProblemError::SpectrumCheck { computed, expected });
    }
    let labels = (1..=n).map(|k| format!("{k}")).collect();
    Problem::assemble(matrix, f, Origin::SecondOrder { n, a, b }, labels)
}

/// Rows of the pentadiagonal matrix with interior stencil `1 −4 6 −4 1`,
/// i.e. `Δ⁴` under zero boundary values on both ends.
pub fn fourth_order_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 6.0,
                    1 => -4.0,
                    2 => 1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

pub fn build_fourth_order(n: usize, f: Nonlinearity) -> Result<Problem, ProblemError> {
    if n == 0 {
        return Err(ProblemError::BadArgument("fourth-order problems need n >= 1".into()));
    }
    let matrix = SpdMatrix::new(&fourth_order_rows(n))?;
    let labels = (1..=n).map(|k| format!("{k}")).collect();
    Problem::assemble(matrix, f, Origin::FourthOrder { n }, labels)
}

/// `B` with 4 on the diagonal and −1 between neighbouring points; boundary
/// values are dropped (homogeneous Dirichlet data), so `Bw = λ g(w)` is the
/// discrete `Du + λ f(u) = 0`.
pub fn lattice_rows(net: &Net) -> Vec<Vec<f64>> {
    let n = net.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (k, &p) in net.points().iter().enumerate() {
        rows[k][k] = 4.0;
        for q in neighbors(p) {
            if let Some(m) = net.index_of(q) {
                rows[k][m] = -1.0;
            }
        }
    }
    rows
}

pub fn build_lattice(net: &Net, f: Nonlinearity) -> Result<Problem, ProblemError> {
    let matrix = SpdMatrix::new(&lattice_rows(net))?;
    debug_assert!(matrix.check_sign_conditions().a1_holds);
    let labels = net.points().iter().map(|(i, j)| format!("({i},{j})")).collect();
    Problem::assemble(matrix, f, Origin::Lattice(net.clone()), labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::{catalog_make, CatalogParams};

    fn rational(n: usize) -> Nonlinearity {
        catalog_make("rational_sq", &CatalogParams::with_n(n)).unwrap()
    }

    #[test]
    fn tridiagonal_examples() {
        let p = build_tridiagonal(3, -1.0, 2.0, rational(3)).unwrap();
        assert!((p.matrix().lambda_min() - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let p = build_tridiagonal(2, -1.0, 2.0, rational(2)).unwrap();
        assert!((p.matrix().lambda_min() - 1.0).abs() < 1e-12);
        assert!((p.matrix().ones_form() - 2.0).abs() < 1e-12);
        assert!(matches!(
            build_tridiagonal(3, -1.0, 1.0, rational(3)),
            Err(ProblemError::Linalg(LinalgError::NotPositiveDefinite { .. }))
        ));
        assert!(matches!(
            build_tridiagonal(3, -1.0, 2.0, rational(2)),
            Err(ProblemError::DimensionMismatch { matrix: 3, nonlinearity: 2 })
        ));
    }

    #[test]
    fn fourth_order_matrix() {
        let p = build_fourth_order(4, rational(4)).unwrap();
        let expect = [
            [6.0, -4.0, 1.0, 0.0],
            [-4.0, 6.0, -4.0, 1.0],
            [1.0, -4.0, 6.0, -4.0],
            [0.0, 1.0, -4.0, 6.0],
        ];
        for (row, want) in p.matrix().rows().iter().zip(expect) {
            assert_eq!(row.as_slice(), want.as_slice());
        }
        assert_eq!(build_fourth_order(1, rational(1)).unwrap().matrix().rows(), vec![vec![6.0]]);
        assert!(!p.matrix().check_sign_conditions().a1_holds);
    }

    #[test]
    fn rectangle_indexing() {
        let net = rectangle_net(2, 2).unwrap();
        assert_eq!(net.points(), &[(1, 1), (2, 1), (1, 2), (2, 2)]);
        for (i, j) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            assert_eq!(net.index_of((i, j)).unwrap() + 1, (i + 2 * (j - 1)) as usize);
        }
        assert_eq!(rectangle_net(1, 1).unwrap().boundary().len(), 4);
        assert_eq!(rectangle_net(3, 2).unwrap().boundary().len(), 10);
        assert!(matches!(rectangle_net(0, 3), Err(ProblemError::EmptyNet)));
    }

    #[test]
    fn lattice_matrices() {
        let p = build_lattice(&rectangle_net(2, 2).unwrap(), rational(4)).unwrap();
        let expect = [
            [4.0, -1.0, -1.0, 0.0],
            [-1.0, 4.0, 0.0, -1.0],
            [-1.0, 0.0, 4.0, -1.0],
            [0.0, -1.0, -1.0, 4.0],
        ];
        for (row, want) in p.matrix().rows().iter().zip(expect) {
            assert_eq!(row.as_slice(), want.as_slice());
        }
        assert_eq!(p.labels()[2], "(1,2)");
        let single = build_lattice(&Net::new([(5, 5)]).unwrap(), rational(1)).unwrap();
        assert_eq!(single.matrix().rows(), vec![vec![4.0]]);
        let strip = lattice_rows(&rectangle_net(3, 1).unwrap());
        assert_eq!(strip, vec![vec![4.0, -1.0, 0.0], vec![-1.0, 4.0, -1.0], vec![0.0, -1.0, 4.0]]);
    }

    #[test]
    fn net_errors() {
        assert!(matches!(Net::new([]), Err(ProblemError::EmptyNet)));
        assert!(matches!(
            Net::new([(0, 0), (2, 0)]),
            Err(ProblemError::Disconnected { reached: 1, total: 2 })
        ));
        // An L-shape is connected; ordering is by (j, i).
        let l = Net::new([(2, 1), (1, 1), (1, 2)]).unwrap();
        assert_eq!(l.points(), &[(1, 1), (2, 1), (1, 2)]);
        assert_eq!(l.boundary().len(), 7);
    }
}

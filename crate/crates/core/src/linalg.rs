//! Dense complex linear algebra for small matrices.
//!
//! Everything here targets systems of size at most ~15x15, so plain
//! O(n^3) algorithms with partial pivoting are used throughout.

use num_complex::Complex64;

pub type C = Complex64;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, row: &[C]) {
        assert_eq!(row.len(), self.cols);
        self.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(row);
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by LU with partial pivoting. Returns 0 for numerically
/// singular input rather than failing.
pub fn det(m: &CMat) -> C {
    assert_eq!(m.rows, m.cols, "determinant of non-square matrix");
    let n = m.rows;
    if n == 0 {
        return C::new(1.0, 0.0);
    }
    let mut a = m.clone();
    let mut detv = C::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for i in k + 1..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return C::new(0.0, 0.0);
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            detv = -detv;
        }
        let pivot = a[(k, k)];
        detv *= pivot;
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            if factor == C::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let v = a[(k, j)];
                a[(i, j)] -= factor * v;
            }
        }
    }
    detv
}

/// Solves A x = b by LU with partial pivoting. `None` if the pivot collapses.
pub fn solve(a: &CMat, b: &[C]) -> Option<Vec<C>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.len());
    let n = a.rows;
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in k + 1..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(k, piv);
        }
        let pivot = m[(k, k)];
        for i in k + 1..n {
            let factor = m[(i, k)] / pivot;
            if factor == C::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let v = m[(k, j)];
                m[(i, j)] -= factor * v;
            }
            x[i] = x[i] - factor * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Least-squares solution of an overdetermined A x = b via Householder QR.
/// Returns (x, residual_norm).
pub fn lstsq(a: &CMat, b: &[C]) -> Option<(Vec<C>, f64)> {
    let m = a.rows;
    let n = a.cols;
    assert!(m >= n);
    assert_eq!(b.len(), m);
    let mut r = a.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        // Householder vector for column k below the diagonal.
        let mut norm = 0.0f64;
        for i in k..m {
            norm += r[(i, k)].norm_sqr();
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return None;
        }
        let akk = r[(k, k)];
        let alpha = if akk.norm() == 0.0 {
            C::new(-norm, 0.0)
        } else {
            -akk / akk.norm() * norm
        };
        let mut v: Vec<C> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // Apply H = I - 2 v v^H / |v|^2 to R and y.
        for j in k..n {
            let mut s = C::new(0.0, 0.0);
            for (idx, i) in (k..m).enumerate() {
                s += v[idx].conj() * r[(i, j)];
            }
            s *= 2.0 / vnorm2;
            for (idx, i) in (k..m).enumerate() {
                let vv = v[idx];
                r[(i, j)] -= s * vv;
            }
        }
        let mut s = C::new(0.0, 0.0);
        for (idx, i) in (k..m).enumerate() {
            s += v[idx].conj() * y[i];
        }
        s *= 2.0 / vnorm2;
        for (idx, i) in (k..m).enumerate() {
            y[i] -= s * v[idx];
        }
    }
    // Back substitution on the upper-triangular part.
    let mut x = vec![C::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= r[(i, j)] * x[j];
        }
        if r[(i, i)].norm() == 0.0 {
            return None;
        }
        x[i] = s / r[(i, i)];
    }
    let resid: f64 = y[n..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Some((x, resid))
}

/// Singular values (descending) and right singular vectors via one-sided
/// Jacobi. Adequate for the small systems used here.
pub fn svd_values_and_right(a: &CMat) -> (Vec<f64>, CMat) {
    let m = a.rows;
    let n = a.cols;
    let mut u = a.clone();
    let mut v = CMat::identity(n);
    let max_sweeps = 60;
    let eps = 1e-30;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                // Gram entries of columns p, q.
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C::new(0.0, 0.0);
                for i in 0..m {
                    app += u[(i, p)].norm_sqr();
                    aqq += u[(i, q)].norm_sqr();
                    apq += u[(i, p)].conj() * u[(i, q)];
                }
                off = off.max(apq.norm());
                if apq.norm() <= eps + 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                // Complex Jacobi rotation diagonalizing [[app, apq],[conj(apq), aqq]].
                let phi = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum_or_one() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = up * c - uq * phi.conj() * s;
                    u[(i, q)] = up * phi * s + uq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * phi.conj() * s;
                    v[(i, q)] = vp * phi * s + vq * c;
                }
            }
        }
        if off < 1e-14 * (1.0 + u.max_abs() * u.max_abs()) {
            break;
        }
    }
    let mut sv: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let mut s = 0.0;
            for i in 0..m {
                s += u[(i, j)].norm_sqr();
            }
            (s.sqrt(), j)
        })
        .collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut vperm = CMat::zeros(n, n);
    for (newj, &(_, oldj)) in sv.iter().enumerate() {
        for i in 0..n {
            vperm[(i, newj)] = v[(i, oldj)];
        }
    }
    (sv.into_iter().map(|p| p.0).collect(), vperm)
}

trait SignumOrOne {
    fn signum_or_one(&self) -> f64;
}
impl SignumOrOne for f64 {
    fn signum_or_one(&self) -> f64 {
        if *self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// smallest/largest singular value ratio check used for "numerically singular".
pub fn singular_value_extremes(a: &CMat) -> (f64, f64) {
    let (sv, _) = svd_values_and_right(a);
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    (min, max)
}

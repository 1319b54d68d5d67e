use super::Polynomial;
use crate::{C64, Error, Result};

/// Small dense complex matrix, row major. Sizes here are tiny (n <= 16 for
/// the Sylvester solves), so everything is plain O(n^3) with partial pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, c: C64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// LU with partial pivoting. Returns (permuted LU data, pivot rows, sign).
    fn lu(&self) -> (Vec<C64>, Vec<usize>, f64) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[piv[k] * n + k].norm();
            for i in (k + 1)..n {
                let v = a[piv[i] * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                piv.swap(k, p);
                sign = -sign;
            }
            let pk = piv[k];
            let d = a[pk * n + k];
            if d.norm() == 0.0 {
                continue;
            }
            for i in (k + 1)..n {
                let pi = piv[i];
                let f = a[pi * n + k] / d;
                a[pi * n + k] = f;
                for j in (k + 1)..n {
                    let t = a[pk * n + j];
                    a[pi * n + j] -= f * t;
                }
            }
        }
        (a, piv, sign)
    }

    pub fn det(&self) -> C64 {
        let n = self.rows;
        if n == 0 {
            return C64::new(1.0, 0.0);
        }
        let (a, piv, sign) = self.lu();
        let mut d = C64::new(sign, 0.0);
        for k in 0..n {
            d *= a[piv[k] * n + k];
        }
        d
    }

    /// Solve A X = B for X (B given column-stacked as a matrix).
    pub fn solve_mat(&self, b: &CMat) -> Result<CMat> {
        let n = self.rows;
        assert_eq!(b.rows, n);
        let (a, piv, _) = self.lu();
        // pivot magnitude check relative to the matrix scale
        let scale = self.norm_max().max(1e-300);
        for k in 0..n {
            if a[piv[k] * n + k].norm() <= 1e-14 * scale {
                return Err(Error::SingularMatrix(format!(
                    "pivot {k} below tolerance (|pivot|/scale = {:.3e})",
                    a[piv[k] * n + k].norm() / scale
                )));
            }
        }
        let mut x = CMat::zeros(n, b.cols);
        for col in 0..b.cols {
            // forward
            let mut y = vec![C64::default(); n];
            for i in 0..n {
                let mut acc = b[(piv[i], col)];
                for j in 0..i {
                    acc -= a[piv[i] * n + j] * y[j];
                }
                y[i] = acc;
            }
            // back
            for i in (0..n).rev() {
                let mut acc = y[i];
                for j in (i + 1)..n {
                    acc -= a[piv[i] * n + j] * x[(j, col)];
                }
                x[(i, col)] = acc / a[piv[i] * n + i];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let bm = CMat {
            rows: b.len(),
            cols: 1,
            data: b.to_vec(),
        };
        let x = self.solve_mat(&bm)?;
        Ok(x.data)
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.solve_mat(&CMat::identity(self.rows))
    }

    /// Crude condition estimate ||A||_max * ||A^-1||_max * n.
    pub fn cond_estimate(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm_max() * inv.norm_max() * self.rows as f64,
            Err(_) => f64::INFINITY,
        }
    }

    /// Characteristic polynomial by the Faddeev-LeVerrier recursion
    /// (fine for the n <= 6 matrices used here).
    pub fn charpoly(&self) -> Polynomial {
        let n = self.rows;
        let mut coeffs = vec![C64::default(); n + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        let mut m = CMat::identity(n);
        for k in 1..=n {
            m = self.matmul(&m);
            let c = -m.trace() / C64::from(k as f64);
            coeffs[n - k] = c;
            for i in 0..n {
                m[(i, i)] += c;
            }
        }
        Polynomial::new(coeffs)
    }

    /// Eigenvalues of a general small matrix via the characteristic polynomial.
    pub fn eigenvalues(&self, zero_tol: f64) -> Result<Vec<C64>> {
        if self.rows == 1 {
            return Ok(vec![self[(0, 0)]]);
        }
        if self.rows == 2 {
            let e = eig2(self)?;
            return Ok(vec![e.values[0], e.values[1]]);
        }
        self.charpoly().roots(zero_tol)
    }

    /// Semi-simple eigendecomposition A = G diag(lambda) G^-1. Errors when the
    /// eigenvector matrix is ill-conditioned (defective or near-defective A).
    pub fn eigen_semisimple(&self, zero_tol: f64) -> Result<EigenDecomp> {
        let n = self.rows;
        if n == 2 {
            return eig2(self);
        }
        let values = self.eigenvalues(zero_tol)?;
        let mut g = CMat::zeros(n, n);
        for (j, &lam) in values.iter().enumerate() {
            let v = null_vector(&self.shifted(-lam))?;
            for i in 0..n {
                g[(i, j)] = v[i];
            }
        }
        let cond = g.cond_estimate();
        if cond > 1e8 {
            return Err(Error::Defective(format!(
                "eigenvector matrix condition {cond:.3e} exceeds 1e8"
            )));
        }
        Ok(EigenDecomp {
            values,
            vectors: g,
        })
    }

    fn shifted(&self, c: C64) -> CMat {
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] += c;
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition with eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

/// Closed-form eigen-solve for 2x2 matrices. Eigenvector columns are chosen
/// as (lambda - d, c) or (b, lambda - a), whichever is larger; for companion
/// matrices [[t1, -t2], [1, 0]] this yields the (lambda, 1) convention.
pub fn eig2(a: &CMat) -> Result<EigenDecomp> {
    assert_eq!((a.rows, a.cols), (2, 2));
    let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let tr = p + s;
    let det = p * s - q * r;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let scale = a.norm_max().max(1e-300);
    if (l1 - l2).norm() <= 1e-12 * scale && (q.norm() > 1e-12 * scale || r.norm() > 1e-12 * scale) {
        return Err(Error::Defective(
            "repeated eigenvalue of a non-scalar 2x2 matrix".into(),
        ));
    }
    let mut g = CMat::zeros(2, 2);
    for (j, lam) in [l1, l2].into_iter().enumerate() {
        let v1 = [lam - s, r];
        let v2 = [q, lam - p];
        let v = if v1[0].norm() + v1[1].norm() >= v2[0].norm() + v2[1].norm() {
            v1
        } else {
            v2
        };
        let n = (v[0].norm().powi(2) + v[1].norm().powi(2)).sqrt();
        if n < 1e-300 {
            // scalar matrix: standard basis
            g[(j, j)] = C64::new(1.0, 0.0);
        } else {
            g[(0, j)] = v[0];
            g[(1, j)] = v[1];
        }
    }
    Ok(EigenDecomp {
        values: vec![l1, l2],
        vectors: g,
    })
}

fn null_vector(a: &CMat) -> Result<Vec<C64>> {
    // Gaussian elimination with partial pivoting; the free variable is set to 1.
    let n = a.rows;
    let mut m = a.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    let scale = a.norm_max().max(1e-300);
    for col in 0..n {
        let mut best = row;
        for i in row..n {
            if m[(i, col)].norm() > m[(best, col)].norm() {
                best = i;
            }
        }
        if m[(best, col)].norm() <= 1e-10 * scale {
            continue;
        }
        for j in 0..n {
            let t = m[(row, j)];
            m[(row, j)] = m[(best, j)];
            m[(best, j)] = t;
        }
        let d = m[(row, col)];
        for i in (row + 1)..n {
            let f = m[(i, col)] / d;
            for j in col..n {
                let t = m[(row, j)];
                m[(i, j)] -= f * t;
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == n {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..n).find(|c| !pivot_cols.contains(c)).ok_or_else(|| {
        Error::Defective("no null vector found for (A - lambda I)".into())
    })?;
    let mut v = vec![C64::default(); n];
    v[free] = C64::new(1.0, 0.0);
    for &(r, c) in pivots.iter().rev() {
        let mut acc = C64::default();
        for j in (c + 1)..n {
            acc += m[(r, j)] * v[j];
        }
        v[c] = -acc / m[(r, c)];
    }
    let norm = v.iter().map(|x| x.norm().powi(2)).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|x| x / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::cr;

    #[test]
    fn identity_solve() {
        let id = CMat::identity(4);
        let b = vec![cr(1.0), cr(-2.0), cr(0.5), cr(3.0)];
        let x = id.solve_vec(&b).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).norm() < 1e-14);
        }
    }

    #[test]
    fn det_matches_cofactor_3x3() {
        let mut rng = crate::testkit::rng(17);
        for _ in 0..10 {
            let a = crate::testkit::random_cmat(&mut rng, 3);
            let cof = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
            assert!((a.det() - cof).norm() <= 1e-10 * (1.0 + cof.norm()));
        }
    }

    #[test]
    fn solve_residual() {
        let mut rng = crate::testkit::rng(23);
        let a = crate::testkit::random_cmat(&mut rng, 5);
        let b: Vec<_> = (0..5)
            .map(|_| crate::testkit::random_point(&mut rng, 0.1, 1.0))
            .collect();
        let x = a.solve_vec(&b).unwrap();
        for i in 0..5 {
            let mut acc = C64::default();
            for j in 0..5 {
                acc += a[(i, j)] * x[j];
            }
            assert!((acc - b[i]).norm() <= 1e-10 * b.iter().map(|v| v.norm()).sum::<f64>());
        }
    }

    #[test]
    fn eig2_companion() {
        // [[rho1+rho2, -rho1 rho2], [1, 0]] has eigenvalues {rho1, rho2}
        let rho1 = crate::testkit::c(0.8, 0.3);
        let rho2 = crate::testkit::c(-0.4, 1.1);
        let a = CMat::from_rows(vec![
            vec![rho1 + rho2, -rho1 * rho2],
            vec![cr(1.0), cr(0.0)],
        ]);
        let e = eig2(&a).unwrap();
        let mut got = e.values.clone();
        got.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        let mut want = vec![rho1, rho2];
        want.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
        // A G = G diag(values)
        let g = &e.vectors;
        for (j, lam) in e.values.iter().enumerate() {
            for i in 0..2 {
                let av: C64 = (0..2).map(|k| a[(i, k)] * g[(k, j)]).sum();
                assert!((av - g[(i, j)] * lam).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eigen_semisimple_general() {
        let mut rng = crate::testkit::rng(31);
        let a = crate::testkit::random_cmat(&mut rng, 4);
        let e = a.eigen_semisimple(1e-9).unwrap();
        let g = &e.vectors;
        for (j, lam) in e.values.iter().enumerate() {
            for i in 0..4 {
                let av: C64 = (0..4).map(|k| a[(i, k)] * g[(k, j)]).sum();
                assert!(
                    (av - g[(i, j)] * lam).norm() < 1e-7 * a.norm_max(),
                    "eigen residual too large"
                );
            }
        }
    }
}

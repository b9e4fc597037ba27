//! Dense linear algebra kernels shared by the activation, solver, and kernel
//! modules. Plain row-major storage; desk-scale sizes (at most a few dozen
//! samples) keep the O(n³) routines here trivial.
//!
//! The oracle module deliberately does not use anything in this file.

#[derive(Clone, Debug)]
pub(crate) struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[cfg(test)]
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = 1.0;
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            let vr = v[r];
            for (o, a) in out.iter_mut().zip(row) {
                *o += vr * a;
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// K = A · diag(w) · Aᵀ with unit weights when `w` is `None`. The result is
/// symmetric by construction (upper triangle computed, then mirrored).
pub(crate) fn weighted_gram(a: &Mat, w: Option<&[f64]>) -> Mat {
    let n = a.rows;
    let mut k = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let ri = a.row(i);
            let rj = a.row(j);
            let s = match w {
                Some(w) => ri
                    .iter()
                    .zip(rj)
                    .zip(w)
                    .map(|((x, y), wj)| wj * x * y)
                    .sum(),
                None => dot(ri, rj),
            };
            *k.at_mut(i, j) = s;
            *k.at_mut(j, i) = s;
        }
    }
    k
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues in nonincreasing order and the matching eigenvectors as
/// columns of the second component.
pub(crate) fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows;
    assert_eq!(a.rows, a.cols);
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    if n == 1 {
        return (vec![m.at(0, 0)], v);
    }
    let frob: f64 = m.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = 1e-14 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.at(p, q) * m.at(p, q);
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e12 {
                    1.0 / (2.0 * theta)
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m.at(k, p);
                    let mkq = m.at(k, q);
                    *m.at_mut(k, p) = c * mkp - s * mkq;
                    *m.at_mut(k, q) = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m.at(p, k);
                    let mqk = m.at(q, k);
                    *m.at_mut(p, k) = c * mpk - s * mqk;
                    *m.at_mut(q, k) = s * mpk + c * mqk;
                }
                // Accumulate the rotation into the eigenvector columns.
                for k in 0..n {
                    let vkp = v.at(k, p);
                    let vkq = v.at(k, q);
                    *v.at_mut(k, p) = c * vkp - s * vkq;
                    *v.at_mut(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| m.at(i, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    vals = order.iter().map(|&i| m.at(i, i)).collect();
    let mut vecs = Mat::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            *vecs.at_mut(r, new_c) = v.at(r, old_c);
        }
    }
    (vals, vecs)
}

/// Singular values of a dense matrix, nonincreasing, of length
/// min(rows, cols). Computed through the eigenvalues of the smaller Gram
/// side; tiny negative eigenvalues from rounding are clamped to zero.
pub(crate) fn singular_values(a: &Mat) -> Vec<f64> {
    let k = a.rows.min(a.cols);
    let gram = if a.rows <= a.cols {
        weighted_gram(a, None)
    } else {
        // AᵀA without materializing the transpose.
        let mut g = Mat::zeros(a.cols, a.cols);
        for r in 0..a.rows {
            let row = a.row(r);
            for i in 0..a.cols {
                for j in i..a.cols {
                    *g.at_mut(i, j) += row[i] * row[j];
                }
            }
        }
        for i in 0..a.cols {
            for j in 0..i {
                *g.at_mut(i, j) = g.at(j, i);
            }
        }
        g
    };
    let (vals, _) = sym_eigen(&gram);
    vals.iter().take(k).map(|&l| l.max(0.0).sqrt()).collect()
}

/// Eigenvalues of a Gram matrix below this multiple of λ_max are
/// indistinguishable from rounding noise of the Jacobi sweep and are always
/// treated as zero by the pseudoinverse.
pub(crate) const EIGEN_NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Eigendecomposition of a PSD matrix with a relative cutoff, used for
/// pseudoinverse application, range projections, and matrix square roots.
///
/// `sv_cutoff_ratio` is expressed on the singular values of a factor B with
/// K = BBᵀ, so the eigenvalue cutoff is ratio² · λ_max. Pseudoinverse
/// application additionally clamps the cutoff at the eigen noise floor;
/// range tests stay generous so genuinely representable targets are never
/// rejected for having mass on tiny directions.
pub(crate) struct PsdEigen {
    n: usize,
    vals: Vec<f64>,
    vecs: Mat,
    cut_apply: f64,
    cut_range: f64,
}

impl PsdEigen {
    pub fn new(k: &Mat, sv_cutoff_ratio: f64) -> Self {
        let (vals, vecs) = sym_eigen(k);
        let lam_max = vals.first().copied().unwrap_or(0.0).max(0.0);
        let cut_range = sv_cutoff_ratio * sv_cutoff_ratio * lam_max;
        let cut_apply = (sv_cutoff_ratio * sv_cutoff_ratio).max(EIGEN_NOISE_FLOOR) * lam_max;
        Self {
            n: k.rows,
            vals,
            vecs,
            cut_apply,
            cut_range,
        }
    }

    fn col(&self, c: usize) -> Vec<f64> {
        (0..self.n).map(|r| self.vecs.at(r, c)).collect()
    }

    /// K⁺ · rhs over the retained spectrum.
    pub fn pinv_apply(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for c in 0..self.n {
            if self.vals[c] <= self.cut_apply {
                continue;
            }
            let v = self.col(c);
            let coef = dot(&v, rhs) / self.vals[c];
            for (o, vi) in out.iter_mut().zip(&v) {
                *o += coef * vi;
            }
        }
        out
    }

    /// rhsᵀ K⁺ rhs, clamped at zero.
    pub fn quad_pinv(&self, rhs: &[f64]) -> f64 {
        let mut q = 0.0;
        for c in 0..self.n {
            if self.vals[c] <= self.cut_apply {
                continue;
            }
            let v = self.col(c);
            let coef = dot(&v, rhs);
            q += coef * coef / self.vals[c];
        }
        q.max(0.0)
    }

    /// Distance from rhs to the retained range, ‖rhs − P rhs‖₂.
    pub fn range_residual(&self, rhs: &[f64]) -> f64 {
        let mut proj = vec![0.0; self.n];
        for c in 0..self.n {
            if self.vals[c] <= self.cut_range {
                continue;
            }
            let v = self.col(c);
            let coef = dot(&v, rhs);
            for (p, vi) in proj.iter_mut().zip(&v) {
                *p += coef * vi;
            }
        }
        let diff: Vec<f64> = rhs.iter().zip(&proj).map(|(a, b)| a - b).collect();
        norm2(&diff)
    }

    /// Symmetric square root K^{1/2} over the retained spectrum.
    pub fn sqrt_matrix(&self) -> Mat {
        let mut out = Mat::zeros(self.n, self.n);
        for c in 0..self.n {
            if self.vals[c] <= self.cut_apply {
                continue;
            }
            let s = self.vals[c].max(0.0).sqrt();
            let v = self.col(c);
            for i in 0..self.n {
                for j in 0..self.n {
                    *out.at_mut(i, j) += s * v[i] * v[j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let m = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // Reconstruct and compare.
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for c in 0..2 {
                    s += vals[c] * vecs.at(i, c) * vecs.at(j, c);
                }
                assert!((s - m.at(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_values_of_rank_one() {
        let m = Mat::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let sv = singular_values(&m);
        assert!((sv[0] - 2.0).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12);
    }

    #[test]
    fn pinv_solves_psd_system() {
        let k = Mat::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]);
        let e = PsdEigen::new(&k, 1e-12);
        let rhs = vec![1.0, 2.0];
        let x = e.pinv_apply(&rhs);
        let back = k.matvec(&x);
        assert!((back[0] - 1.0).abs() < 1e-12);
        assert!((back[1] - 2.0).abs() < 1e-12);
        let q = e.quad_pinv(&rhs);
        assert!((q - dot(&x, &rhs)).abs() < 1e-12);
    }

    #[test]
    fn sqrt_matrix_squares_back() {
        let k = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let e = PsdEigen::new(&k, 1e-12);
        let s = e.sqrt_matrix();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for l in 0..2 {
                    acc += s.at(i, l) * s.at(l, j);
                }
                assert!((acc - k.at(i, j)).abs() < 1e-12);
            }
        }
    }
}

//! Dense complex eigenvalues via Hessenberg reduction and shifted QR.
//!
//! Matrices here are small (the connection dimension, at most a few dozen),
//! so a straightforward single-shift QR with deflation is plenty.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, v) in r.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out[(i, j)] + a * other[(k, j)];
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMat) -> CMat {
        let n = self.n * other.n;
        let mut out = CMat::zeros(n);
        for i1 in 0..self.n {
            for j1 in 0..self.n {
                let a = self[(i1, j1)];
                for i2 in 0..other.n {
                    for j2 in 0..other.n {
                        out[(i1 * other.n + i2, j1 * other.n + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    pub fn sub_block(&self, r0: usize, c0: usize, k: usize) -> CMat {
        let mut out = CMat::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[r * n + j] - f * a[col * n + j];
                    a[r * n + j] = v;
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

fn hessenberg(a: &mut CMat) {
    let n = a.n;
    for col in 0..n.saturating_sub(2) {
        // Householder on rows col+1..n of this column.
        let mut norm2 = 0.0;
        for r in col + 1..n {
            norm2 += a[(r, col)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm <= 1e-300 {
            continue;
        }
        let x0 = a[(col + 1, col)];
        let alpha = if x0.norm() == 0.0 {
            C64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        let mut v: Vec<C64> = (col + 1..n).map(|r| a[(r, col)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        // A <- (I - 2 v v* / |v|^2) A, columns col..n
        for j in col..n {
            let mut dot = C64::new(0.0, 0.0);
            for (k, vr) in v.iter().enumerate() {
                dot += vr.conj() * a[(col + 1 + k, j)];
            }
            let s = dot * (2.0 / vnorm2);
            for (k, vr) in v.iter().enumerate() {
                let val = a[(col + 1 + k, j)] - s * vr;
                a[(col + 1 + k, j)] = val;
            }
        }
        // A <- A (I - 2 v v* / |v|^2), all rows
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (k, vr) in v.iter().enumerate() {
                dot += a[(i, col + 1 + k)] * *vr;
            }
            let s = dot * (2.0 / vnorm2);
            for (k, vr) in v.iter().enumerate() {
                let val = a[(i, col + 1 + k)] - s * vr.conj();
                a[(i, col + 1 + k)] = val;
            }
        }
        for r in col + 2..n {
            a[(r, col)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    // Eigenvalue of [[a, b], [c, d]] closest to d.
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a dense complex matrix.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let n = m.n;
    if n == 0 {
        return vec![];
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iter_since_deflate = 0usize;
    let scale = m.max_abs().max(1e-300);
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Look for a negligible subdiagonal from the bottom.
        let mut split = None;
        for k in (1..hi).rev() {
            let s = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(k, k - 1)].norm() <= f64::EPSILON * s {
                split = Some(k);
                break;
            }
        }
        if let Some(k) = split {
            if k == hi - 1 {
                eigs.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                iter_since_deflate = 0;
                continue;
            }
        }
        let lo = split.unwrap_or(0);
        // Shifted QR sweep on h[lo..hi, lo..hi] via Givens rotations.
        let mu = if iter_since_deflate > 0 && iter_since_deflate % 12 == 0 {
            // Occasional exceptional shift to break symmetry stalls.
            h[(hi - 1, hi - 2)] * 1.5 + h[(hi - 1, hi - 1)]
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        iter_since_deflate += 1;
        if iter_since_deflate > 30 * n {
            // Give up on further refinement; harvest the diagonal.
            for k in 0..hi {
                eigs.push(h[(k, k)]);
            }
            break;
        }
        for i in lo..hi {
            h[(i, i)] -= mu;
        }
        // QR by Givens on the subdiagonal, then RQ.
        let mut rots: Vec<(usize, C64, C64)> = Vec::new();
        for i in lo..hi - 1 {
            let x = h[(i, i)];
            let y = h[(i + 1, i)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r <= 1e-300 {
                rots.push((i, C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
                continue;
            }
            let c = x / r;
            let s = y / r;
            rots.push((i, c, s));
            for j in i..hi {
                let hij = h[(i, j)];
                let h1j = h[(i + 1, j)];
                h[(i, j)] = c.conj() * hij + s.conj() * h1j;
                h[(i + 1, j)] = -s * hij + c * h1j;
            }
        }
        for &(i, c, s) in &rots {
            for r in lo..(i + 2).min(hi) {
                let hri = h[(r, i)];
                let hri1 = h[(r, i + 1)];
                h[(r, i)] = hri * c + hri1 * s;
                h[(r, i + 1)] = -hri * s.conj() + hri1 * c.conj();
            }
        }
        for i in lo..hi {
            h[(i, i)] += mu;
        }
    }
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_by_re_im(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn eig_of_triangular_is_diagonal() {
        let m = CMat::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.5, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(-3.0, 0.0), C64::new(1.0, -1.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 2.0)],
        ]);
        let eigs = sorted_by_re_im(eigenvalues(&m));
        let expect = sorted_by_re_im(vec![
            C64::new(1.0, 0.0),
            C64::new(-3.0, 0.0),
            C64::new(0.0, 2.0),
        ]);
        for (a, b) in eigs.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn eig_of_rotation_block() {
        // [[0,-1],[1,0]] has eigenvalues ±i.
        let m = CMat::from_real(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let eigs = sorted_by_re_im(eigenvalues(&m));
        assert!((eigs[0] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((eigs[1] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn eig_recovers_known_spectrum() {
        // Similarity transform of a known diagonal with a fixed matrix.
        let n = 6;
        let diag: Vec<C64> = (0..n)
            .map(|k| C64::new(k as f64 - 2.0, ((k * k) % 3) as f64 - 1.0))
            .collect();
        // P = I + strictly lower 1s, P^{-1} easy to apply implicitly:
        // A = P D P^{-1}; build numerically.
        let mut p = CMat::identity(n);
        for i in 0..n {
            for j in 0..i {
                p[(i, j)] = C64::new(1.0 / (1.0 + (i + 2 * j) as f64), 0.3);
            }
        }
        // invert p by forward substitution per column of identity
        let mut pinv = CMat::identity(n);
        for col in 0..n {
            for i in 0..n {
                let mut acc = pinv[(i, col)];
                for k in 0..i {
                    acc -= p[(i, k)] * pinv[(k, col)];
                }
                pinv[(i, col)] = acc;
            }
        }
        let mut d = CMat::zeros(n);
        for i in 0..n {
            d[(i, i)] = diag[i];
        }
        let a = p.matmul(&d).matmul(&pinv);
        let eigs = sorted_by_re_im(eigenvalues(&a));
        let expect = sorted_by_re_im(diag);
        for (e, x) in eigs.iter().zip(&expect) {
            assert!((e - x).norm() < 1e-8, "{e} vs {x}");
        }
    }

    #[test]
    fn det_of_shifted_identity() {
        let mut m = CMat::identity(4);
        m[(0, 0)] = C64::new(2.0, 0.0);
        m[(2, 3)] = C64::new(5.0, 1.0);
        assert!((m.det() - C64::new(2.0, 0.0)).norm() < 1e-14);
    }
}

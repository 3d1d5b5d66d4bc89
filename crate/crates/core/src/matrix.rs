//! Fixed-size real square matrices for the small linear algebra the volume
//! and space modules need (dimensions 2 to 4).

use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>(pub [[f64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat3 = Mat<3>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<const N: usize> Mat<N> {
    pub const fn zero() -> Self {
        Mat([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    /// Builds a matrix from `N·N` row-major entries.
    ///
    /// Panics if the slice has the wrong length.
    pub fn from_entries(e: &[f64]) -> Self {
        assert_eq!(e.len(), N * N, "expected {} entries", N * N);
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i].copy_from_slice(&e[i * N..(i + 1) * N]);
        }
        m
    }

    pub fn entries(&self) -> &[f64] {
        self.0.as_flattened()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += other.0[i][j];
            }
        }
        m
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries().iter().map(|v| v * v).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Frobenius inner product `tr(AᵀB)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Row-vector product `x·M`.
    #[inline]
    pub fn row_apply(&self, x: &[f64; N]) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, xi) in x.iter().enumerate() {
            for j in 0..N {
                y[j] += xi * self.0[i][j];
            }
        }
        y
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.0;
        let mut inv = Self::identity().0;
        for col in 0..N {
            let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-300 {
                return None;
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let d = a[col][col];
            for j in 0..N {
                a[col][j] /= d;
                inv[col][j] /= d;
            }
            for r in 0..N {
                if r != col {
                    let f = a[r][col];
                    if f != 0.0 {
                        for j in 0..N {
                            a[r][j] -= f * a[col][j];
                            inv[r][j] -= f * inv[col][j];
                        }
                    }
                }
            }
        }
        Some(Mat(inv))
    }

    /// Spectral norm via power iteration on `MᵀM`.
    pub fn op_norm(&self) -> f64 {
        let ata = self.transpose() * *self;
        let mut v = [1.0; N];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi += 0.1 * i as f64;
        }
        let mut lambda = 0.0;
        for _ in 0..500 {
            let mut w = [0.0; N];
            for i in 0..N {
                for j in 0..N {
                    w[i] += ata.0[i][j] * v[j];
                }
            }
            let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                return 0.0;
            }
            let next = n / v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w.map(|x| x / n);
            if (next - lambda).abs() <= 1e-15 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Mat<N>;

    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        let mut m = Mat::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a != 0.0 {
                    for j in 0..N {
                        m.0[i][j] += a * rhs.0[k][j];
                    }
                }
            }
        }
        m
    }
}

/// Hyperbolic rotation by `s` in the (i, j) coordinate plane.
pub fn boost<const N: usize>(i: usize, j: usize, s: f64) -> Mat<N> {
    let mut m = Mat::identity();
    let (c, sh) = (s.cosh(), s.sinh());
    m.0[i][i] = c;
    m.0[j][j] = c;
    m.0[i][j] = sh;
    m.0[j][i] = sh;
    m
}

/// Euclidean rotation by `theta` in the (i, j) coordinate plane.
pub fn rotation<const N: usize>(i: usize, j: usize, theta: f64) -> Mat<N> {
    let mut m = Mat::identity();
    let (c, s) = (theta.cos(), theta.sin());
    m.0[i][i] = c;
    m.0[j][j] = c;
    m.0[i][j] = -s;
    m.0[j][i] = s;
    m
}

//! Small numerical helpers: compensated summation, least squares, medians.

use crate::{Error, Result};

/// Neumaier-compensated accumulator.
///
/// Merging two accumulators is order-sensitive in floating point, so callers
/// that need reproducible results merge partials in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

/// Result of an ordinary least-squares fit `y ≈ X β`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Standard errors of the coefficients (σ̂²·(XᵀX)⁻¹ diagonal).
    pub std_errors: Vec<f64>,
    /// Residual sum of squares.
    pub sse: f64,
    pub dof: usize,
}

/// Least squares for a design with a handful of columns, solved through the
/// normal equations with partial pivoting. Columns are scaled first.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let n = y.len();
    let p = design.first().map_or(0, Vec::len);
    if p == 0 || n < p || design.len() != n {
        return Err(Error::RankDeficient(format!(
            "{n} observations for {p} parameters"
        )));
    }
    let scale: Vec<f64> = (0..p)
        .map(|j| {
            let s = design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yi) in design.iter().zip(y) {
        for i in 0..p {
            let xi = row[i] / scale[i];
            xty[i] += xi * yi;
            for j in 0..p {
                xtx[i][j] += xi * row[j] / scale[j];
            }
        }
    }
    let inv = invert(&xtx)?;
    let beta_scaled: Vec<f64> = (0..p)
        .map(|i| (0..p).map(|j| inv[i][j] * xty[j]).sum())
        .collect();
    let coefficients: Vec<f64> = beta_scaled
        .iter()
        .zip(&scale)
        .map(|(b, s)| b / s)
        .collect();
    let sse: f64 = design
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&coefficients).map(|(x, b)| x * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let dof = n - p;
    let sigma2 = if dof > 0 { sse / dof as f64 } else { 0.0 };
    let std_errors = (0..p)
        .map(|i| (sigma2 * inv[i][i]).sqrt() / scale[i])
        .collect();
    Ok(LinearFit {
        coefficients,
        std_errors,
        sse,
        dof,
    })
}

fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[piv][col].abs() < 1e-12 {
            return Err(Error::RankDeficient(format!(
                "pivot {col} vanishes in the normal equations"
            )));
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Slope, intercept and slope standard error of `y ≈ slope·x + intercept`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let design: Vec<Vec<f64>> = x.iter().map(|&xi| vec![xi, 1.0]).collect();
    least_squares(&design, y)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

pub fn mean(values: &[f64]) -> f64 {
    CompensatedSum::sum_iter(values.iter().copied()) / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss = CompensatedSum::sum_iter(values.iter().map(|v| (v - m).powi(2)));
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

/// Two-sided 95% Student-t quantile (Cornish–Fisher expansion around the
/// normal quantile; accurate to ~1e-3 for ν ≥ 5).
pub fn student_t_975(dof: usize) -> f64 {
    let z: f64 = 1.959_963_984_540_054;
    let nu = dof.max(1) as f64;
    z + (z.powi(3) + z) / (4.0 * nu)
        + (5.0 * z.powi(5) + 16.0 * z.powi(3) + 3.0 * z) / (96.0 * nu * nu)
        + (3.0 * z.powi(7) + 19.0 * z.powi(5) + 17.0 * z.powi(3) - 15.0 * z)
            / (384.0 * nu.powi(3))
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule on [a, b] with `panels` panels of `order` nodes.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in &base {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn least_squares_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let fit = linear_slope(&x, &y).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-12);
        assert!(fit.sse < 1e-20);
    }

    #[test]
    fn least_squares_rejects_collinear_design() {
        let design = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert!(least_squares(&design, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = composite_gauss(0.0, 2.0, 3, 8);
        let v: f64 = rule.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-10);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn student_quantile_matches_table() {
        assert!((student_t_975(10) - 2.228).abs() < 2e-3);
        assert!((student_t_975(48) - 2.011).abs() < 1e-3);
    }
}

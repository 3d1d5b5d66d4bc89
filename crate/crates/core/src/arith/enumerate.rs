use rayon::prelude::*;

use super::element::GroupElement;
use super::gaussian::{self, GaussInt};
use super::spec::{Family, GroupSpec};
use super::bezout_completion;
use crate::gauge::{isqrt, BallBound, Height};
use crate::{Error, Result};

/// Default cap on materialized enumerations; larger balls must be streamed.
pub const MAX_MATERIALIZED: u128 = 20_000_000;

#[inline]
fn floor_div(x: i128, n: i128) -> i128 {
    x.div_euclid(n)
}

#[inline]
fn ceil_div(x: i128, n: i128) -> i128 {
    -(-x).div_euclid(n)
}

fn ovf<T>(x: Option<T>) -> Result<T> {
    x.ok_or(Error::Overflow("ball enumeration"))
}

/// `B = n(N − n) − 1`, the bound on `|nk + m|²`; `None` when no completion
/// of a column with squared norm `n` fits below `N`.
#[inline]
fn progression_bound(n: i128, n_max: i128) -> Result<Option<i128>> {
    if n >= n_max {
        return Ok(None);
    }
    let b = ovf(n.checked_mul(n_max - n))? - 1;
    Ok((b >= 0).then_some(b))
}

/// Integer `k` with `|nk + m| ≤ r`.
#[inline]
fn k_interval(n: i128, m: i128, r: i128) -> (i128, i128) {
    (ceil_div(-r - m, n), floor_div(r - m, n))
}

/// Integer column completion `(b₀, d₀)` with `m = ab₀ + cd₀` reduced to
/// `|m| ≤ n/2`.
#[inline]
fn reduced_completion(a: i64, c: i64, n: i128) -> Result<Option<(i128, i128, i128)>> {
    if super::gcd_i64(a, c) != 1 {
        return Ok(None);
    }
    let (b0, d0) = bezout_completion(a, c)?;
    let (a, c, b0, d0) = (a as i128, c as i128, b0 as i128, d0 as i128);
    let m = a * b0 + c * d0;
    let k0 = -floor_div(2 * m + n, 2 * n);
    Ok(Some((b0 + k0 * a, d0 + k0 * c, m + k0 * n)))
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("entry exceeds 64 bits"))
}

/// Visits every SL₂(ℤ) matrix `[a, b, c, d]` with first entry `a` and
/// `a² + b² + c² + d² ≤ n_max`, ordered by `c` then `b`.
pub fn sl2z_partition<F>(n_max: u128, a: i64, mut f: F) -> Result<()>
where
    F: FnMut([i64; 4]) -> Result<()>,
{
    let nm = ovf(i128::try_from(n_max).ok())?;
    let a2 = (a as i128) * (a as i128);
    if a2 >= nm {
        return Ok(());
    }
    let cmax = isqrt((nm - 1 - a2) as u128) as i64;
    for c in -cmax..=cmax {
        let n = a2 + (c as i128) * (c as i128);
        if n == 0 {
            continue;
        }
        let Some(bound) = progression_bound(n, nm)? else { continue };
        let Some((b0, d0, m)) = reduced_completion(a, c, n)? else { continue };
        let r = isqrt(bound as u128) as i128;
        let (klo, khi) = k_interval(n, m, r);
        for k in klo..=khi {
            let b = to_i64(b0 + k * a as i128)?;
            let d = to_i64(d0 + k * c as i128)?;
            f([a, b, c, d])?;
        }
    }
    Ok(())
}

/// Counts the SL₂(ℤ) matrices with first entry `a` below each bound in
/// `n_maxes` (which must be non-decreasing).
///
/// `γ ↦ −γ` acts freely on first columns and preserves the ball, so only
/// columns with `a > 0`, or `a = 0` and `c > 0`, are visited; their counts
/// are doubled and the partitions with `a < 0` return zero.
pub fn sl2z_partition_counts(n_maxes: &[u128], a: i64) -> Result<Vec<u128>> {
    let mut out = vec![0u128; n_maxes.len()];
    let Some(&top) = n_maxes.last() else { return Ok(out) };
    if a < 0 {
        return Ok(out);
    }
    let nm = ovf(i128::try_from(top).ok())?;
    let a2 = (a as i128) * (a as i128);
    if a2 >= nm {
        return Ok(out);
    }
    let cmax = isqrt((nm - 1 - a2) as u128) as i64;
    let cmin = if a == 0 { 1 } else { -cmax };
    for c in cmin..=cmax {
        let n = a2 + (c as i128) * (c as i128);
        let mut reduced = None;
        for (slot, &nj) in out.iter_mut().zip(n_maxes) {
            let Some(bound) = progression_bound(n, nj as i128)? else { continue };
            if reduced.is_none() {
                match reduced_completion(a, c, n)? {
                    Some(x) => reduced = Some(x),
                    None => break,
                }
            }
            let (_, _, m) = reduced.expect("set above");
            let r = isqrt(bound as u128) as i128;
            let (klo, khi) = k_interval(n, m, r);
            if khi >= klo {
                *slot += 2 * (khi - klo + 1) as u128;
            }
        }
    }
    Ok(out)
}

struct GaussColumn {
    b0: GaussInt,
    d0: GaussInt,
    m: (i128, i128),
}

fn gauss_completion(a: GaussInt, c: GaussInt, n: i128) -> Result<Option<GaussColumn>> {
    // Both divisible by 1 + i: not primitive.
    if (a.re + a.im) % 2 == 0 && (c.re + c.im) % 2 == 0 {
        return Ok(None);
    }
    let Some((b0, d0)) = gaussian::bezout_completion(a, c)? else {
        return Ok(None);
    };
    let (p1, q1) = a.conj().mul_wide(b0);
    let (p2, q2) = c.conj().mul_wide(d0);
    let (mre, mim) = (p1 + p2, q1 + q2);
    // Shift by the nearest Gaussian integer to −m/n.
    let k0 = GaussInt::new(
        to_i64(-floor_div(2 * mre + n, 2 * n))?,
        to_i64(-floor_div(2 * mim + n, 2 * n))?,
    );
    let b0 = b0.checked_add(k0.checked_mul(a)?)?;
    let d0 = d0.checked_add(k0.checked_mul(c)?)?;
    let m = (mre + k0.re as i128 * n, mim + k0.im as i128 * n);
    Ok(Some(GaussColumn { b0, d0, m }))
}

/// Visits the rows `(q, p_lo..=p_hi)` of Gaussian integers `k = p + qi` with
/// `|nk + m|² ≤ bound`.
#[inline]
fn gauss_k_rows<F>(n: i128, m: (i128, i128), bound: i128, mut f: F) -> Result<()>
where
    F: FnMut(i128, i128, i128) -> Result<()>,
{
    let r = isqrt(bound as u128) as i128;
    let (qlo, qhi) = k_interval(n, m.1, r);
    for q in qlo..=qhi {
        let y = n * q + m.1;
        let rem = bound - y * y;
        let r2 = isqrt(rem as u128) as i128;
        let (plo, phi) = k_interval(n, m.0, r2);
        if phi >= plo {
            f(q, plo, phi)?;
        }
    }
    Ok(())
}

/// Visits every SL₂(ℤ[i]) matrix with `Re a = a_re` and `Σ|entries|² ≤ n_max`.
pub fn gauss_partition<F>(n_max: u128, a_re: i64, mut f: F) -> Result<()>
where
    F: FnMut([GaussInt; 4]) -> Result<()>,
{
    let nm = ovf(i128::try_from(n_max).ok())?;
    let ar2 = (a_re as i128).pow(2);
    if ar2 >= nm {
        return Ok(());
    }
    let aim_max = isqrt((nm - 1 - ar2) as u128) as i64;
    for a_im in -aim_max..=aim_max {
        let a = GaussInt::new(a_re, a_im);
        let an = a.norm();
        let cre_max = isqrt((nm - 1 - an) as u128) as i64;
        for c_re in -cre_max..=cre_max {
            let rest = nm - 1 - an - (c_re as i128).pow(2);
            let cim_max = isqrt(rest as u128) as i64;
            for c_im in -cim_max..=cim_max {
                let c = GaussInt::new(c_re, c_im);
                let n = an + c.norm();
                if n == 0 {
                    continue;
                }
                let Some(bound) = progression_bound(n, nm)? else { continue };
                let Some(col) = gauss_completion(a, c, n)? else { continue };
                gauss_k_rows(n, col.m, bound, |q, plo, phi| {
                    for p in plo..=phi {
                        let k = GaussInt::new(to_i64(p)?, to_i64(q)?);
                        let b = col.b0.checked_add(k.checked_mul(a)?)?;
                        let d = col.d0.checked_add(k.checked_mul(c)?)?;
                        f([a, b, c, d])?;
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(())
}

/// Counting counterpart of [`gauss_partition`].
///
/// `(a, c) ↦ (ua, u⁻¹c)` for the four units is a free action on first
/// columns preserving the ball, so only columns whose first nonzero entry
/// has positive real part and non-negative imaginary part are visited, with
/// counts multiplied by four.
pub fn gauss_partition_counts(n_maxes: &[u128], a_re: i64) -> Result<Vec<u128>> {
    let mut out = vec![0u128; n_maxes.len()];
    let Some(&top) = n_maxes.last() else { return Ok(out) };
    let nm = ovf(i128::try_from(top).ok())?;
    let ar2 = (a_re as i128).pow(2);
    if a_re < 0 || ar2 >= nm {
        return Ok(out);
    }
    let aim_max = isqrt((nm - 1 - ar2) as u128) as i64;
    let a_ims = if a_re == 0 { 0..=0 } else { 0..=aim_max };
    for a_im in a_ims {
        let a = GaussInt::new(a_re, a_im);
        let an = a.norm();
        let cre_max = isqrt((nm - 1 - an) as u128) as i64;
        let cre_min = if a_re == 0 { 1 } else { -cre_max };
        for c_re in cre_min..=cre_max {
            let rest = nm - 1 - an - (c_re as i128).pow(2);
            let cim_max = isqrt(rest as u128) as i64;
            let cim_min = if a_re == 0 { 0 } else { -cim_max };
            for c_im in cim_min..=cim_max {
                let c = GaussInt::new(c_re, c_im);
                let n = an + c.norm();
                let mut col = None;
                for (slot, &nj) in out.iter_mut().zip(n_maxes) {
                    let Some(bound) = progression_bound(n, nj as i128)? else { continue };
                    if col.is_none() {
                        match gauss_completion(a, c, n)? {
                            Some(x) => col = Some(x),
                            None => break,
                        }
                    }
                    let m = col.as_ref().expect("set above").m;
                    gauss_k_rows(n, m, bound, |_, plo, phi| {
                        *slot += 4 * (phi - plo + 1) as u128;
                        Ok(())
                    })?;
                }
            }
        }
    }
    Ok(out)
}

/// Number of `v ∈ ℤ²` with `‖v‖² ≤ r2`.
pub fn disk_count(r2: u128) -> u128 {
    let r = isqrt(r2);
    let mut total = 0u128;
    for x in 0..=r {
        let w = 2 * isqrt(r2 - x * x) + 1;
        total += if x == 0 { w } else { 2 * w };
    }
    total
}

/// Visits `v ∈ ℤ²` with `‖v‖² ≤ r2` in lexicographic order.
pub fn for_each_disk_point<F>(r2: u128, mut f: F) -> Result<()>
where
    F: FnMut([i64; 2]) -> Result<()>,
{
    let r = isqrt(r2) as i64;
    for x in -r..=r {
        let w = isqrt(r2 - (x as i128 * x as i128) as u128) as i64;
        for y in -w..=w {
            f([x, y])?;
        }
    }
    Ok(())
}

/// Cumulative disk counts `D(r) = #{v : ‖v‖² ≤ r}` for all `r ≤ max`.
fn disk_count_table(max: u128) -> Result<Vec<u64>> {
    let len = usize::try_from(max + 1).map_err(|_| Error::Budget("disk table".into()))?;
    if len > 1 << 27 {
        return Err(Error::Budget(format!("disk table of {len} entries")));
    }
    let mut reps = vec![0u64; len];
    let r = isqrt(max) as i64;
    for x in -r..=r {
        let x2 = (x * x) as u128;
        let w = isqrt(max - x2) as i64;
        for y in -w..=w {
            reps[(x2 + (y * y) as u128) as usize] += 1;
        }
    }
    let mut acc = 0u64;
    for v in reps.iter_mut() {
        acc += *v;
        *v = acc;
    }
    Ok(reps)
}

/// A lattice ball `Γ_t` prepared for streaming in canonical partitions.
#[derive(Debug, Clone)]
pub struct Ball {
    pub spec: GroupSpec,
    pub t: Height,
    pub bound: BallBound,
    linear_max: u128,
}

impl Ball {
    pub fn new(spec: &GroupSpec, t: Height) -> Result<Self> {
        if !(t.0 >= 0.0) {
            return Err(Error::config("t", format!("must be non-negative, got {}", t.0)));
        }
        let bound = BallBound::new(t)?;
        let linear_max = spec.linear_bound(&bound);
        Ok(Self {
            spec: spec.clone(),
            t,
            bound,
            linear_max,
        })
    }

    /// Bound on the 2×2 Frobenius square of linear parts in the ball.
    pub fn linear_max(&self) -> u128 {
        self.linear_max
    }

    /// Partition keys in canonical order: `Re a` for the SL₂ based families,
    /// the power `n` for the cyclic-solvable family.
    pub fn partitions(&self) -> Result<Vec<i64>> {
        if self.spec.family == Family::CyclicSolvable {
            let (lo, hi) = self.spec.generator()?.power_range(self.t.0);
            return Ok((lo..=hi).collect());
        }
        if self.linear_max < 2 {
            return Ok(Vec::new());
        }
        let amax = isqrt(self.linear_max - 1) as i64;
        Ok((-amax..=amax).collect())
    }

    /// Visits the linear parts of one partition (SL₂ based families).
    pub fn for_each_linear<F>(&self, part: i64, mut f: F) -> Result<()>
    where
        F: FnMut([GaussInt; 4]) -> Result<()>,
    {
        if self.spec.family.is_gaussian() {
            gauss_partition(self.linear_max, part, f)
        } else {
            sl2z_partition(self.linear_max, part, |e| f(e.map(GaussInt::real)))
        }
    }

    /// Visits every element of one partition.
    pub fn for_each_in<F>(&self, part: i64, mut f: F) -> Result<()>
    where
        F: FnMut(&GroupElement) -> Result<()>,
    {
        match self.spec.family {
            Family::Sl2z | Family::Sl2zSymSquare => sl2z_partition(self.linear_max, part, |e| {
                f(&GroupElement::from_sl2z_unchecked(e))
            }),
            Family::Sl2Gauss | Family::Sl2GaussSpin => {
                gauss_partition(self.linear_max, part, |e| {
                    f(&GroupElement::from_linear_unchecked(e))
                })
            }
            Family::Sl2zAffine => sl2z_partition(self.linear_max, part, |e| {
                let s: u128 = e.iter().map(|&x| (x as i128 * x as i128) as u128).sum();
                let base = GroupElement::from_sl2z_unchecked(e);
                for_each_disk_point(self.bound.max_sq - 1 - s, |v| {
                    f(&base.clone().with_translation(v))
                })
            }),
            Family::CyclicSolvable => {
                let lin = self.spec.generator()?.power(part)?.with_power(part);
                for_each_disk_point(self.bound.max_sq, |v| f(&lin.clone().with_translation(v)))
            }
        }
    }

    /// Applies `f` to each partition (in parallel) and returns the results in
    /// canonical partition order.
    pub fn map_partitions<R, F>(&self, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(i64) -> Result<R> + Sync,
    {
        let parts = self.partitions()?;
        let results: Vec<Result<R>> = parts.par_iter().map(|&p| f(p)).collect();
        results.into_iter().collect()
    }

    /// Sequential stream over the whole ball in partition order.
    pub fn for_each<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(&GroupElement) -> Result<()>,
    {
        for p in self.partitions()? {
            self.for_each_in(p, &mut f)?;
        }
        Ok(())
    }
}

/// A materialized ball in canonical order.
#[derive(Debug, Clone)]
pub struct BallEnumeration {
    pub spec: GroupSpec,
    pub t: Height,
    pub elements: Vec<GroupElement>,
}

pub fn enumerate_ball(spec: &GroupSpec, t: Height) -> Result<BallEnumeration> {
    enumerate_ball_limited(spec, t, MAX_MATERIALIZED)
}

pub fn enumerate_ball_limited(spec: &GroupSpec, t: Height, limit: u128) -> Result<BallEnumeration> {
    let count = ball_count(spec, t)?;
    if count > limit {
        return Err(Error::Budget(format!(
            "ball of {count} elements exceeds the materialization limit {limit}; stream it instead"
        )));
    }
    let ball = Ball::new(spec, t)?;
    let parts = ball.map_partitions(|p| {
        let mut v = Vec::new();
        ball.for_each_in(p, |g| {
            v.push(g.clone());
            Ok(())
        })?;
        v.sort_unstable();
        Ok(v)
    })?;
    let mut elements: Vec<GroupElement> = parts.into_iter().flatten().collect();
    if spec.family == Family::CyclicSolvable {
        // Partitions are keyed by n, not by the leading entry.
        elements.sort_unstable();
    }
    Ok(BallEnumeration {
        spec: spec.clone(),
        t,
        elements,
    })
}

pub fn ball_count(spec: &GroupSpec, t: Height) -> Result<u128> {
    Ok(ball_counts(spec, &[t])?[0])
}

/// Counts for several heights from a single pass at the largest one.
pub fn ball_counts(spec: &GroupSpec, ts: &[Height]) -> Result<Vec<u128>> {
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].0.total_cmp(&ts[j].0));
    let balls: Vec<Ball> = order.iter().map(|&i| Ball::new(spec, ts[i])).collect::<Result<_>>()?;
    let top = balls.last().expect("non-empty");

    let sorted_counts: Vec<u128> = match spec.family {
        Family::CyclicSolvable => balls
            .iter()
            .map(|b| {
                let (lo, hi) = spec.generator()?.power_range(b.t.0);
                Ok((hi - lo + 1) as u128 * disk_count(b.bound.max_sq))
            })
            .collect::<Result<_>>()?,
        Family::Sl2zAffine => {
            let table = disk_count_table(top.bound.max_sq)?;
            let parts = top.map_partitions(|a| {
                let mut out = vec![0u128; balls.len()];
                sl2z_partition(top.linear_max, a, |e| {
                    let s: u128 = e.iter().map(|&x| (x as i128 * x as i128) as u128).sum();
                    for (slot, b) in out.iter_mut().zip(&balls) {
                        if s + 1 <= b.bound.max_sq {
                            *slot += table[(b.bound.max_sq - 1 - s) as usize] as u128;
                        }
                    }
                    Ok(())
                })?;
                Ok(out)
            })?;
            sum_columns(parts, balls.len())
        }
        family => {
            let bounds: Vec<u128> = balls.iter().map(|b| b.linear_max).collect();
            let parts = top.map_partitions(|a| {
                if family.is_gaussian() {
                    gauss_partition_counts(&bounds, a)
                } else {
                    sl2z_partition_counts(&bounds, a)
                }
            })?;
            sum_columns(parts, balls.len())
        }
    };
    let mut out = vec![0u128; ts.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = sorted_counts[k];
    }
    Ok(out)
}

fn sum_columns(parts: Vec<Vec<u128>>, len: usize) -> Vec<u128> {
    let mut out = vec![0u128; len];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn h(t: f64) -> Height {
        Height(t)
    }

    #[test]
    fn sl2z_smallest_ball() {
        let e = enumerate_ball(&GroupSpec::sl2z(), h(0.5 * 2f64.ln())).unwrap();
        let got: Vec<_> = e.elements.iter().map(|g| g.real_entries().unwrap()).collect();
        assert_eq!(got, vec![[-1, 0, 0, -1], [0, -1, 1, 0], [0, 1, -1, 0], [1, 0, 0, 1]]);
    }

    #[test]
    fn gaussian_smallest_ball() {
        let e = enumerate_ball(&GroupSpec::sl2_gauss(), h(0.5 * 2f64.ln())).unwrap();
        assert_eq!(e.elements.len(), 8);
        for g in &e.elements {
            assert_eq!(g.det().unwrap(), GaussInt::ONE);
            assert_eq!(g.frobenius_sq(), 2);
        }
    }

    #[test]
    fn cyclic_ball_at_zero() {
        let spec = GroupSpec::cyclic_solvable([[2, 1], [1, 1]]).unwrap();
        let e = enumerate_ball(&spec, h(0.0)).unwrap();
        assert_eq!(e.elements.len(), 5);
        assert!(e.elements.iter().all(|g| g.power == Some(0) && g.translation_sq() <= 1));
    }

    #[test]
    fn counts_match_streams() {
        for spec in [
            GroupSpec::sl2z(),
            GroupSpec::sl2_gauss(),
            GroupSpec::sym_square(),
            GroupSpec::spin(),
            GroupSpec::affine(),
            GroupSpec::cyclic_solvable([[3, 1], [2, 1]]).unwrap(),
        ] {
            let ts = [h(1.0), h(0.4), h(1.7), h(2.2)];
            let counts = ball_counts(&spec, &ts).unwrap();
            for (t, c) in ts.iter().zip(&counts) {
                let ball = Ball::new(&spec, *t).unwrap();
                let mut n = 0u128;
                let mut seen = BTreeSet::new();
                ball.for_each(|g| {
                    assert!(spec.contains(g, &ball.bound).unwrap(), "{g} outside {spec:?}");
                    assert!(seen.insert(g.clone()), "duplicate {g}");
                    n += 1;
                    Ok(())
                })
                .unwrap();
                assert_eq!(n, *c, "{:?} at t = {}", spec.family, t.0);
            }
        }
    }

    #[test]
    fn monotone_in_t() {
        for spec in [GroupSpec::sl2z(), GroupSpec::sl2_gauss()] {
            for t in [1.0, 1.6, 2.1] {
                let small: BTreeSet<_> =
                    enumerate_ball(&spec, h(t)).unwrap().elements.into_iter().collect();
                let big: BTreeSet<_> =
                    enumerate_ball(&spec, h(t + 0.1)).unwrap().elements.into_iter().collect();
                assert!(small.is_subset(&big));
            }
        }
    }

    #[test]
    fn inverse_closure() {
        let e = enumerate_ball(&GroupSpec::sl2z(), h(3.0)).unwrap();
        let set: BTreeSet<_> = e.elements.iter().cloned().collect();
        for g in &e.elements {
            assert!(set.contains(&g.inverse().unwrap()));
        }
    }

    #[test]
    fn materialized_order_is_canonical() {
        let e = enumerate_ball(&GroupSpec::sl2_gauss(), h(1.5)).unwrap();
        assert!(e.elements.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn disk_counts() {
        assert_eq!(disk_count(0), 1);
        assert_eq!(disk_count(1), 5);
        assert_eq!(disk_count(2), 9);
        assert_eq!(disk_count(25), 81);
        let table = disk_count_table(200).unwrap();
        for r in 0..=200u128 {
            assert_eq!(table[r as usize] as u128, disk_count(r));
        }
    }

    #[test]
    fn budget_refusal() {
        let err = enumerate_ball_limited(&GroupSpec::sl2z(), h(3.0), 10).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert!(matches!(Ball::new(&GroupSpec::sl2z(), h(-1.0)), Err(Error::Config { .. })));
    }
}

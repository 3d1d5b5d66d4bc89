//! Graded orbit sums `Σ_{γ∈Γ_t} φ(x·γ)` for many base points, test functions
//! and heights in one pass over the largest ball.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::arith::enumerate::sl2z_partition;
use crate::arith::{Ball, Family, GroupSpec};
use crate::gauge::{BallBound, Height, HEIGHT_TOL, MAX_EXACT_T};
use crate::spaces::{affine_join, affine_split, Point, Prepared, SpaceKind, SpaceModel, TestFunction};
use crate::stats::CompensatedSum;
use crate::{Error, Result};

/// Default cap on the number of group elements one sum may visit.
pub const DEFAULT_MAX_ELEMENTS: u64 = 200_000_000;

/// Largest height at which the cyclic-solvable domain-restricted path
/// also counts `|Γ_t|`.
pub const CYCLIC_COUNT_MAX_T: f64 = 16.0;

/// Guardrails for a single orbit-sum pass.
#[derive(Debug, Clone, Copy)]
pub struct SumOptions {
    pub max_elements: u64,
    pub deadline: Option<Instant>,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self {
            max_elements: DEFAULT_MAX_ELEMENTS,
            deadline: None,
        }
    }
}

/// Cumulative raw sums and return counts, indexed by base point, test
/// function and height.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSums {
    pub ts: Vec<f64>,
    pub n_points: usize,
    pub n_phis: usize,
    sums: Vec<f64>,
    returns: Vec<u64>,
    /// `|Γ_t|`, when it fits the exact range.
    pub ball_counts: Vec<Option<u128>>,
    /// Group elements (or, for the domain-restricted path, linear parts)
    /// visited.
    pub visited: u64,
}

impl OrbitSums {
    fn index(&self, point: usize, phi: usize, k: usize) -> usize {
        (point * self.n_phis + phi) * self.ts.len() + k
    }

    pub fn raw_sum(&self, point: usize, phi: usize, k: usize) -> f64 {
        self.sums[self.index(point, phi, k)]
    }

    /// `#{γ ∈ Γ_t : φ(x·γ) ≠ 0}`.
    pub fn return_count(&self, point: usize, phi: usize, k: usize) -> u64 {
        self.returns[self.index(point, phi, k)]
    }
}

/// `Σ|·|²` compared against the ball thresholds, exactly while both sides
/// fit 128 bits.
#[derive(Debug, Clone, Copy)]
enum Sq {
    Exact(u128),
    Huge(f64),
}

struct Grader {
    exact: Vec<Option<u128>>,
    float: Vec<f64>,
    n_ranges: Option<Vec<(i64, i64)>>,
}

impl Grader {
    fn new(spec: &GroupSpec, ts: &[f64]) -> Result<Self> {
        let mut exact = Vec::with_capacity(ts.len());
        for &t in ts {
            exact.push(if t <= MAX_EXACT_T { Some(BallBound::new(Height(t))?.max_sq) } else { None });
        }
        let float = ts.iter().map(|t| (2.0 * (t + HEIGHT_TOL)).exp()).collect();
        let n_ranges = if spec.family == Family::CyclicSolvable {
            let gen = spec.generator()?;
            Some(ts.iter().map(|&t| gen.power_range(t)).collect())
        } else {
            None
        };
        Ok(Self { exact, float, n_ranges })
    }

    fn within(&self, sq: Sq, k: usize) -> bool {
        match (sq, self.exact[k]) {
            (Sq::Exact(s), Some(b)) => s <= b,
            (Sq::Exact(s), None) => (s as f64) <= self.float[k],
            (Sq::Huge(_), Some(_)) => false,
            (Sq::Huge(s), None) => s <= self.float[k],
        }
    }

    /// Index of the smallest height whose ball contains the element.
    #[inline]
    fn bucket(&self, sq: Sq, n: Option<i64>) -> Option<usize> {
        let len = self.float.len();
        let (mut k, mut top) = (0, len);
        while k < top {
            let mid = (k + top) / 2;
            if self.within(sq, mid) {
                top = mid;
            } else {
                k = mid + 1;
            }
        }
        if let (Some(ranges), Some(n)) = (&self.n_ranges, n) {
            k = k.max(ranges.partition_point(|&(lo, hi)| n < lo || n > hi));
        }
        (k < len).then_some(k)
    }
}

/// Per-partition accumulator; merged in canonical order.
struct Acc {
    sums: Vec<CompensatedSum>,
    returns: Vec<u64>,
    counts: Vec<u128>,
    visited: u64,
}

impl Acc {
    fn new(cells: usize, nt: usize) -> Self {
        Self {
            sums: vec![CompensatedSum::new(); cells],
            returns: vec![0; cells],
            counts: vec![0; nt],
            visited: 0,
        }
    }
}

struct Layout<'a> {
    model: &'a SpaceModel,
    points: &'a [Point],
    phis: &'a [TestFunction],
    nt: usize,
    /// Allowed range of the time coordinate on de Sitter models.
    time_window: Option<(f64, f64)>,
}

impl Layout<'_> {
    fn cells(&self) -> usize {
        self.points.len() * self.phis.len() * self.nt
    }

    #[inline]
    fn record(&self, acc: &mut Acc, p: usize, y: &Point, k: usize) {
        let c = self.model.chart_unchecked(y);
        let dim = self.model.kind.chart_dim();
        for (f, phi) in self.phis.iter().enumerate() {
            let v = phi.eval(&c[..dim]);
            if v != 0.0 {
                let i = (p * self.phis.len() + f) * self.nt + k;
                acc.sums[i].add(v);
                acc.returns[i] += 1;
            }
        }
    }

    /// Adds one prepared element (already graded into bucket `k`).
    #[inline]
    fn visit(&self, acc: &mut Acc, g: &Prepared, k: usize) -> Result<()> {
        for (p, x) in self.points.iter().enumerate() {
            if let Some((lo, hi)) = self.time_window {
                let time = match g {
                    Prepared::Row3(m) => x.0[0] * m.0[0][2] + x.0[1] * m.0[1][2] + x.0[2] * m.0[2][2],
                    Prepared::Row4(m) => {
                        x.0[0] * m.0[0][0] + x.0[1] * m.0[1][0] + x.0[2] * m.0[2][0] + x.0[3] * m.0[3][0]
                    }
                    _ => 0.0,
                };
                if time < lo || time > hi {
                    continue;
                }
            }
            let y = g.apply(x)?;
            self.record(acc, p, &y, k);
        }
        Ok(())
    }
}

fn time_window(model: &SpaceModel, phis: &[TestFunction]) -> Option<(f64, f64)> {
    if !matches!(model.kind, SpaceKind::DeSitter2 | SpaceKind::DeSitter3) {
        return None;
    }
    let lo = phis.iter().map(|p| p.support_box()[0].0).fold(f64::INFINITY, f64::min);
    let hi = phis.iter().map(|p| p.support_box()[0].1).fold(f64::NEG_INFINITY, f64::max);
    if lo > hi {
        return Some((1.0, -1.0));
    }
    let slack = |v: f64| 1e-9 * (1.0 + v.abs());
    let (a, b) = (lo.sinh(), hi.sinh());
    Some((a - slack(a), b + slack(b)))
}

fn check_inputs(model: &SpaceModel, points: &[Point], phis: &[TestFunction], ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::config("t_grid", "heights must be finite and non-negative"));
    }
    if ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("t_grid", "heights must be strictly increasing"));
    }
    for x in points {
        model.validate(x)?;
    }
    for phi in phis {
        phi.validate()?;
        if phi.dim() != model.kind.chart_dim() {
            return Err(Error::config(
                "phi",
                format!("test function has {} coordinates, {} chart has {}", phi.dim(), model.id(), model.kind.chart_dim()),
            ));
        }
    }
    Ok(())
}

struct Guard {
    visited: AtomicU64,
    opts: SumOptions,
}

impl Guard {
    fn charge(&self, n: u64) -> Result<()> {
        let total = self.visited.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.opts.max_elements {
            return Err(Error::Budget(format!(
                "orbit sum exceeds {} elements",
                self.opts.max_elements
            )));
        }
        if let Some(d) = self.opts.deadline {
            if Instant::now() > d {
                return Err(Error::Budget("orbit sum exceeded its wall-clock budget".into()));
            }
        }
        Ok(())
    }
}

fn finish(accs: Vec<Acc>, layout: &Layout, ts: &[f64], ball_counts: Option<Vec<Option<u128>>>) -> OrbitSums {
    let cells = layout.cells();
    let nt = layout.nt;
    let mut total = Acc::new(cells, nt);
    for a in &accs {
        for (t, s) in total.sums.iter_mut().zip(&a.sums) {
            t.merge(s);
        }
        for (t, r) in total.returns.iter_mut().zip(&a.returns) {
            *t += r;
        }
        for (t, c) in total.counts.iter_mut().zip(&a.counts) {
            *t += c;
        }
        total.visited += a.visited;
    }
    // Buckets to cumulative balls.
    let mut sums = Vec::with_capacity(cells);
    let mut returns = Vec::with_capacity(cells);
    for cell in 0..cells / nt.max(1) {
        let mut s = CompensatedSum::new();
        let mut r = 0u64;
        for k in 0..nt {
            s.merge(&total.sums[cell * nt + k]);
            r += total.returns[cell * nt + k];
            sums.push(s.value());
            returns.push(r);
        }
    }
    let ball_counts = ball_counts.unwrap_or_else(|| {
        let mut c = 0u128;
        total
            .counts
            .iter()
            .map(|v| {
                c += v;
                Some(c)
            })
            .collect()
    });
    OrbitSums {
        ts: ts.to_vec(),
        n_points: layout.points.len(),
        n_phis: layout.phis.len(),
        sums,
        returns,
        ball_counts,
        visited: total.visited,
    }
}

/// Raw sums over every element of `Γ_t` for each `t` in `ts` (strictly
/// increasing), streaming the ball at the largest `t` once.
pub fn orbit_sums(
    model: &SpaceModel,
    points: &[Point],
    phis: &[TestFunction],
    ts: &[f64],
    opts: SumOptions,
) -> Result<OrbitSums> {
    check_inputs(model, points, phis, ts)?;
    let spec = &model.spec;
    let grader = Grader::new(spec, ts)?;
    let ball = Ball::new(spec, Height(*ts.last().expect("checked non-empty")))?;
    let layout = Layout {
        model,
        points,
        phis,
        nt: ts.len(),
        time_window: time_window(model, phis),
    };
    let guard = Guard { visited: AtomicU64::new(0), opts };
    let accs = ball.map_partitions(|part| {
        let mut acc = Acc::new(layout.cells(), layout.nt);
        let mut pending = 0u64;
        ball.for_each_in(part, |g| {
            let sq = spec.gauge_sq(g)?;
            let Some(k) = grader.bucket(Sq::Exact(sq), g.power) else { return Ok(()) };
            acc.counts[k] += 1;
            acc.visited += 1;
            pending += 1;
            if pending == 1 << 16 {
                guard.charge(pending)?;
                pending = 0;
            }
            let prepared = model.prepare(g)?;
            layout.visit(&mut acc, &prepared, k)
        })?;
        guard.charge(pending)?;
        Ok(acc)
    })?;
    Ok(finish(accs, &layout, ts, None))
}

/// Same sums as [`orbit_sums`] for the affine models, iterating only the
/// linear parts `h` and, per `h`, the `O(1)` translations `v` with
/// `x·h + v` in the support box of some `φ`.
pub fn domain_restricted_sums(
    model: &SpaceModel,
    points: &[Point],
    phis: &[TestFunction],
    ts: &[f64],
    opts: SumOptions,
) -> Result<OrbitSums> {
    if !matches!(model.kind, SpaceKind::AffineSl2z | SpaceKind::AffineSolvable) {
        return Err(Error::domain(format!("{} is not an affine model", model.id())));
    }
    check_inputs(model, points, phis, ts)?;
    let spec = &model.spec;
    let grader = Grader::new(spec, ts)?;
    let t_max = *ts.last().expect("checked non-empty");
    let layout = Layout {
        model,
        points,
        phis,
        nt: ts.len(),
        time_window: None,
    };
    // Union of the support boxes.
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for phi in phis {
        for (j, (l, h)) in phi.support_box().into_iter().enumerate() {
            lo[j] = lo[j].min(l);
            hi[j] = hi[j].max(h);
        }
    }
    let guard = Guard { visited: AtomicU64::new(0), opts };
    let top_sq = grader.float[ts.len() - 1] * (1.0 + 1e-9);

    // One linear part: every candidate translation for every point.
    let visit_linear = |acc: &mut Acc, h: [i128; 4], s_lin: u128, n: Option<i64>| -> Result<()> {
        acc.visited += 1;
        if lo[0] > hi[0] {
            return Ok(());
        }
        for (p, x) in points.iter().enumerate() {
            if spec.family == Family::Sl2zAffine {
                // Cheap float bound on ‖v‖; the margin of one absorbs the
                // rounding of the fixed-point action.
                let mut need = (s_lin + 1) as f64;
                for j in 0..2 {
                    let y = x.0[0] * h[j] as f64 + x.0[1] * h[2 + j] as f64;
                    let d = (lo[j] - y).max(y - hi[j]) - 1.0;
                    if d > 0.0 {
                        need += d * d;
                    }
                }
                if need > top_sq {
                    continue;
                }
            }
            let (q, frac) = affine_split([x.0[0], x.0[1]], &h)?;
            // Candidates with `q + v + frac` in `[lo, hi]`, padded by a hair
            // so that boundary points are still offered to `record`.
            let range = |j: usize| -> (i128, i128) {
                let a = (lo[j] - frac[j] - 1e-9).ceil() as i128;
                let b = (hi[j] - frac[j] + 1e-9).floor() as i128;
                (a - q[j], b - q[j])
            };
            let (r0, r1) = (range(0), range(1));
            for v0 in r0.0..=r0.1 {
                for v1 in r1.0..=r1.1 {
                    let sq = translation_sq(spec.family, s_lin, v0, v1);
                    let Some(k) = grader.bucket(sq, n) else { continue };
                    let y = Point([affine_join(q[0], v0, frac[0]), affine_join(q[1], v1, frac[1]), 0.0, 0.0]);
                    layout.record(acc, p, &y, k);
                }
            }
        }
        Ok(())
    };

    let (accs, ball_counts) = match spec.family {
        Family::Sl2zAffine => {
            let ball = Ball::new(spec, Height(t_max))?;
            let accs = ball.map_partitions(|a| {
                let mut acc = Acc::new(layout.cells(), layout.nt);
                let mut pending = 0u64;
                sl2z_partition(ball.linear_max(), a, |e| {
                    let s: u128 = e.iter().map(|&x| (x as i128 * x as i128) as u128).sum();
                    pending += 1;
                    if pending == 1 << 16 {
                        guard.charge(pending)?;
                        pending = 0;
                    }
                    visit_linear(&mut acc, e.map(|v| v as i128), s, None)
                })?;
                guard.charge(pending)?;
                Ok(acc)
            })?;
            let counts = crate::arith::ball_counts(spec, &ts.iter().map(|&t| Height(t)).collect::<Vec<_>>())?;
            (accs, counts.into_iter().map(Some).collect())
        }
        Family::CyclicSolvable => {
            let gen = spec.generator()?;
            let (nlo, nhi) = gen.power_range(t_max);
            let parts: Vec<i64> = (nlo..=nhi).collect();
            let accs: Vec<Result<Acc>> = parts
                .par_iter()
                .map(|&n| {
                    let mut acc = Acc::new(layout.cells(), layout.nt);
                    guard.charge(1)?;
                    visit_linear(&mut acc, gen.power_wide(n)?, 0, Some(n))?;
                    Ok(acc)
                })
                .collect();
            let accs = accs.into_iter().collect::<Result<Vec<_>>>()?;
            // The disk count is linear in the radius `e^t`.
            let mut counts = vec![None; ts.len()];
            for (slot, &t) in counts.iter_mut().zip(ts) {
                if t <= CYCLIC_COUNT_MAX_T {
                    *slot = Some(crate::arith::ball_count(spec, Height(t))?);
                }
            }
            (accs, counts)
        }
        _ => unreachable!("checked affine kind"),
    };
    Ok(finish(accs, &layout, ts, Some(ball_counts)))
}

/// Gauge square of `(h, v)`: `S + ‖v‖² + 1` for the SL₂(ℤ) affine family,
/// `‖v‖²` for the cyclic one.
#[inline]
fn translation_sq(family: Family, s_lin: u128, a: i128, b: i128) -> Sq {
    let sq = |x: i128| x.unsigned_abs().checked_mul(x.unsigned_abs());
    let v2 = sq(a).zip(sq(b)).and_then(|(x, y)| x.checked_add(y));
    let exact = match family {
        Family::Sl2zAffine => v2.and_then(|v2| s_lin.checked_add(v2)).and_then(|x| x.checked_add(1)),
        _ => v2,
    };
    match exact {
        Some(s) => Sq::Exact(s),
        None => Sq::Huge((a as f64).mul_add(a as f64, (b as f64) * (b as f64))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::enumerate_ball;

    #[test]
    fn grader_buckets() {
        let spec = GroupSpec::sl2z();
        let g = Grader::new(&spec, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.bucket(Sq::Exact(2), None), Some(0));
        assert_eq!(g.bucket(Sq::Exact(8), None), Some(1));
        assert_eq!(g.bucket(Sq::Exact(400), None), Some(2));
        assert_eq!(g.bucket(Sq::Exact(404), None), None);
        assert_eq!(g.bucket(Sq::Huge(1e50), None), None);
    }

    #[test]
    fn graded_sums_match_separate_passes() {
        let model = SpaceModel::new(SpaceKind::PuncturedPlane);
        let points = [Point::new(&[0.37, 1.21]), Point::new(&[-0.8, 0.45])];
        let phis = [
            TestFunction::indicator(&[-1.0, -1.0], &[1.0, 1.0]).unwrap(),
            TestFunction::bump(&[0.5, 0.0], &[0.5, 0.5]).unwrap(),
        ];
        let ts = [2.0, 2.5, 3.0];
        let all = orbit_sums(&model, &points, &phis, &ts, SumOptions::default()).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let ball = enumerate_ball(&model.spec, Height(t)).unwrap();
            assert_eq!(all.ball_counts[k], Some(ball.elements.len() as u128));
            for (p, x) in points.iter().enumerate() {
                for (f, phi) in phis.iter().enumerate() {
                    let mut direct = 0.0;
                    let mut hits = 0;
                    for g in &ball.elements {
                        let y = model.act(x, g).unwrap();
                        let v = phi.eval(&y.0[..2]);
                        direct += v;
                        hits += (v != 0.0) as u64;
                    }
                    assert!((all.raw_sum(p, f, k) - direct).abs() < 1e-9);
                    assert_eq!(all.return_count(p, f, k), hits);
                }
            }
        }
    }

    #[test]
    fn time_window_does_not_change_sums() {
        let model = SpaceModel::new(SpaceKind::DeSitter2);
        let x = model.from_chart(&[0.3, 1.1]).unwrap();
        let phi = TestFunction::indicator(&[-0.5, 0.0], &[0.5, 3.0]).unwrap();
        let s = orbit_sums(&model, &[x], &[phi.clone()], &[4.0], SumOptions::default()).unwrap();
        let ball = enumerate_ball(&model.spec, Height(4.0)).unwrap();
        let direct: f64 = ball
            .elements
            .iter()
            .map(|g| phi.eval(&model.chart(&model.act(&x, g).unwrap()).unwrap()[..2]))
            .sum();
        assert_eq!(s.raw_sum(0, 0, 0), direct);
        assert!(direct > 0.0);
    }

    #[test]
    fn domain_restricted_equals_naive() {
        let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let bump = TestFunction::bump(&[0.3, -0.2], &[0.7, 0.4]).unwrap();
        for model in [SpaceModel::new(SpaceKind::AffineSl2z), SpaceModel::affine_solvable([[2, 1], [1, 1]]).unwrap()] {
            let points = [Point::new(&[0.1234, 0.5678]), Point::new(&[1.5, -0.25])];
            let ts = [2.0, 3.0];
            let phis = [phi.clone(), bump.clone()];
            let a = orbit_sums(&model, &points, &phis, &ts, SumOptions::default()).unwrap();
            let b = domain_restricted_sums(&model, &points, &phis, &ts, SumOptions::default()).unwrap();
            assert_eq!(a.ball_counts, b.ball_counts);
            for p in 0..2 {
                for f in 0..2 {
                    for k in 0..2 {
                        assert!((a.raw_sum(p, f, k) - b.raw_sum(p, f, k)).abs() <= 1e-12, "{}", model.id());
                        assert_eq!(a.return_count(p, f, k), b.return_count(p, f, k));
                    }
                }
            }
        }
    }

    #[test]
    fn translations_beyond_64_bits_are_visited() {
        // Every power |n| ≤ 51 puts exactly one translate of x·aⁿ in the unit
        // square, with |v| up to e^49.
        let model = SpaceModel::affine_solvable([[2, 1], [1, 1]]).unwrap();
        let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let s = domain_restricted_sums(&model, &[Point::new(&[0.31, 0.77])], &[phi], &[50.0], SumOptions::default()).unwrap();
        assert_eq!(s.return_count(0, 0, 0), 103);
    }

    #[test]
    fn budget_is_enforced() {
        let model = SpaceModel::new(SpaceKind::PuncturedPlane);
        let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let opts = SumOptions { max_elements: 1000, deadline: None };
        let r = orbit_sums(&model, &[Point::new(&[0.5, 0.5])], &[phi], &[5.0], opts);
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn rejects_bad_grids() {
        let model = SpaceModel::new(SpaceKind::PuncturedPlane);
        let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let x = [Point::new(&[0.5, 0.5])];
        for ts in [vec![], vec![2.0, 1.0], vec![-1.0]] {
            let e = orbit_sums(&model, &x, &[phi.clone()], &ts, SumOptions::default()).unwrap_err();
            assert!(matches!(e, Error::Config { ref key, .. } if key == "t_grid"));
        }
    }
}

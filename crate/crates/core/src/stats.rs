//! Quantitative experiments on the random graph.
//!
//! Circle density (exact series and Monte Carlo), the law of arc lengths,
//! growth of the number of dangling ends, closure frequencies, and scans
//! for trifurcation points.
//!
//! "Infinite" is never observable: a cluster counts as escaping when its
//! walk does not close within the [`Budget`] used, and every report carries
//! that budget.

use std::collections::BTreeSet;

use num::{BigInt, BigRational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lazyline::{Budget, LazyLine};
use crate::noncrossing::catalan_big;
use crate::realizer::{realize_at, RealizeRequest};
use crate::window::{end_profile, EndProfile, Half, MateTable, ProfileMethod, SiteState, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    Series,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub method: DensityMethod,
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Last index summed, for the series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Boundary margin discarded on each side, for Monte Carlo.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<usize>,
}

/// Ratio `c_{k} 4^{-k}`, iterated in floating point.
fn scaled_catalans(kmax: usize) -> impl Iterator<Item = f64> {
    (0..=kmax).scan(1.0f64, |t, k| {
        let cur = *t;
        *t *= (2 * k + 1) as f64 / (2 * (k + 2)) as f64;
        Some(cur)
    })
}

/// Expected number of circles through or around a vertex, summed over
/// spans `2k+1 <= 2kmax+1`: `sum (2k+2) (c_k 4^{-(k+1)})^2`.
pub fn circle_density_series(kmax: usize) -> DensityEstimate {
    let mut value = 0.0;
    // add small terms first
    let terms: Vec<f64> = scaled_catalans(kmax)
        .enumerate()
        .map(|(k, t)| (2 * k + 2) as f64 * (t / 4.0) * (t / 4.0))
        .collect();
    for term in terms.iter().rev() {
        value += term;
    }
    DensityEstimate {
        method: DensityMethod::Series,
        value,
        stderr: 0.0,
        n_samples: kmax + 1,
        truncation: Some(kmax),
        margin: None,
    }
}

/// Asymptotic size of the series tail beyond `kmax`.
pub fn circle_series_tail(kmax: usize) -> f64 {
    1.0 / (8.0 * std::f64::consts::PI * kmax.max(1) as f64)
}

/// Coverage of circles in a mate table: every circle `{a, b}` (paired in
/// both halves, both ends inside the table) is credited to each vertex of
/// `[a, b]` that lies in the central part, `margin` sites from either edge.
/// Returns `(total credit, number of central vertices)`.
pub fn circle_coverage(table: &MateTable, margin: usize) -> (u64, u64) {
    let lo = table.lo();
    let hi = table.hi();
    let c_lo = lo + margin as i64;
    let c_hi = hi - margin as i64;
    if c_lo > c_hi {
        return (0, 0);
    }
    let mut credit = 0u64;
    for a in lo..=hi {
        let Some(b) = table.mate(a, Half::Upper) else {
            continue;
        };
        if b <= a || table.mate(a, Half::Lower) != Some(b) {
            continue;
        }
        let from = a.max(c_lo);
        let to = b.min(c_hi);
        if from <= to {
            credit += (to - from + 1) as u64;
        }
    }
    (credit, (c_hi - c_lo + 1) as u64)
}

/// Circle density of one fixed window.
pub fn circle_density_window(window: &Window, margin: usize) -> f64 {
    let (credit, central) = circle_coverage(&MateTable::new(window), margin);
    credit as f64 / central as f64
}

pub const DEFAULT_MARGIN: usize = 1000;

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One estimate per seed over `[offset, offset + window_len)`, then mean and
/// standard error across seeds.
pub fn circle_density_mc(
    seeds: &[u64],
    window_len: usize,
    offset: i64,
    margin: usize,
) -> DensityEstimate {
    let per_seed: Vec<f64> = seeds
        .par_iter()
        .map(|&seed| {
            let mut line = LazyLine::new(seed);
            let table = line.segment(offset, offset + window_len as i64 - 1);
            let (credit, central) = circle_coverage(&table, margin);
            credit as f64 / central as f64
        })
        .collect();
    let (value, stderr) = mean_stderr(&per_seed);
    DensityEstimate {
        method: DensityMethod::MonteCarlo,
        value,
        stderr,
        n_samples: seeds.len(),
        truncation: None,
        margin: Some(margin),
    }
}

/// `P(|partner(x) - x| = 2k+1) = c_k 2^{-(2k+1)}`.
pub fn arc_length_pmf(k: usize) -> f64 {
    scaled_catalans(k).last().expect("k+1 terms") / 2.0
}

pub fn arc_length_pmf_exact(k: usize) -> BigRational {
    BigRational::new(BigInt::from(catalan_big(k)), BigInt::from(1) << (2 * k + 1))
}

/// Empirical law of `|partner(x) - x|` for the upper half over `queries`
/// consecutive sites. Entry `k` is the frequency of length `2k+1`; searches
/// are capped at length `2kmax+1`, so longer arcs only count in the total.
pub fn empirical_arc_lengths(seed: u64, queries: usize, kmax: usize) -> Vec<f64> {
    let mut line = LazyLine::new(seed);
    let reach = 2 * kmax as u64 + 1;
    let budget = Budget::new(1, reach);
    let mut counts = vec![0u64; kmax + 1];
    for x in 0..queries as i64 {
        if let Ok(y) = line.partner(x, Half::Upper, budget) {
            let k = ((y - x).unsigned_abs() as usize - 1) / 2;
            counts[k] += 1;
        }
    }
    counts
        .into_iter()
        .map(|c| c as f64 / queries as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub samples: usize,
    pub mean_n_tot: f64,
    pub mean_ratio: f64,
    pub q10_ratio: f64,
    pub median_ratio: f64,
    pub q90_ratio: f64,
    /// Closed form and stack matching disagreed on none of the samples.
    pub methods_agree: bool,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Number of dangling ends of `[1, N]` per length and seed.
pub fn boundary_growth(lengths: &[usize], seeds: &[u64]) -> Vec<GrowthRow> {
    lengths
        .iter()
        .map(|&n| {
            let samples: Vec<(usize, bool)> = seeds
                .par_iter()
                .map(|&seed| {
                    let mut line = LazyLine::new(seed);
                    let w = line.window(1, n);
                    let closed = end_profile(&w, ProfileMethod::ClosedForm);
                    // the stack matching is the slow path; check it on moderate sizes only
                    let agree = n > 200_000 || closed == end_profile(&w, ProfileMethod::Stack);
                    (closed.total(), agree)
                })
                .collect();
            let mut ratios: Vec<f64> = samples.iter().map(|&(t, _)| t as f64 / n as f64).collect();
            ratios.sort_by(f64::total_cmp);
            let mean_n_tot = samples.iter().map(|s| s.0 as f64).sum::<f64>() / samples.len() as f64;
            GrowthRow {
                n,
                samples: samples.len(),
                mean_n_tot,
                mean_ratio: mean_n_tot / n as f64,
                q10_ratio: quantile(&ratios, 0.1),
                median_ratio: quantile(&ratios, 0.5),
                q90_ratio: quantile(&ratios, 0.9),
                methods_agree: samples.iter().all(|s| s.1),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub origin: i64,
    pub budget: Budget,
    pub seeds: usize,
    pub closed: usize,
    pub truncated: usize,
    pub fraction_truncated: f64,
    pub longest_closed: usize,
}

/// How often the cluster of `origin` closes within `budget`, over seeds.
pub fn closure_report(seeds: &[u64], origin: i64, budget: Budget) -> ClosureReport {
    let traces: Vec<(bool, usize)> = seeds
        .par_iter()
        .map(|&s| {
            let t = LazyLine::new(s).trace_cluster(origin, budget);
            (t.is_closed(), t.len())
        })
        .collect();
    let closed = traces.iter().filter(|t| t.0).count();
    ClosureReport {
        origin,
        budget,
        seeds: seeds.len(),
        closed,
        truncated: seeds.len() - closed,
        fraction_truncated: (seeds.len() - closed) as f64 / seeds.len().max(1) as f64,
        longest_closed: traces
            .iter()
            .filter(|t| t.0)
            .map(|t| t.1)
            .max()
            .unwrap_or(0),
    }
}

/// Environment for a trifurcation scan.
pub enum ScanEnv<'a> {
    /// The random line; sites within the budget half-width of the window are resolved.
    Line(&'a mut LazyLine),
    /// A fixed finite configuration; arcs leaving it count as escaping.
    Frozen(&'a Window),
}

/// Connected components of a mate table, walked on demand and cached.
///
/// A walk that closes marks a finite cycle. A walk that leaves the table or
/// runs out of steps marks an escaping cluster. Walks that run into sites
/// already known to escape are merged with that cluster.
pub struct ClusterIndex<'t> {
    table: &'t MateTable,
    max_steps: u64,
    id_of: Vec<u32>,
    parent: Vec<u32>,
    escaping: Vec<bool>,
}

const UNSEEN: u32 = u32::MAX;

impl<'t> ClusterIndex<'t> {
    pub fn new(table: &'t MateTable, max_steps: u64) -> Self {
        ClusterIndex {
            table,
            max_steps,
            id_of: vec![UNSEEN; table.len()],
            parent: Vec::new(),
            escaping: Vec::new(),
        }
    }

    fn slot(&self, x: i64) -> usize {
        (x - self.table.lo()) as usize
    }

    fn root(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let p = self.parent[c as usize];
            self.parent[c as usize] = self.parent[p as usize];
            c = p;
        }
        c
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra != rb {
            self.parent[rb as usize] = ra;
            self.escaping[ra as usize] |= self.escaping[rb as usize];
        }
        ra
    }

    /// Walk from `x` in one direction. Returns `Closed`, or the cluster it ran into, or `Open`.
    fn walk(&mut self, x: i64, first: Half, steps: &mut u64, visited: &mut Vec<i64>) -> WalkEnd {
        let mut cur = x;
        let mut half = first;
        while *steps < self.max_steps {
            let Some(y) = self.table.mate(cur, half) else {
                return WalkEnd::Open;
            };
            *steps += 1;
            if y == x {
                return WalkEnd::Closed;
            }
            let id = self.id_of[self.slot(y)];
            if id != UNSEEN {
                return WalkEnd::Hit(id);
            }
            visited.push(y);
            cur = y;
            half = half.other();
        }
        WalkEnd::Open
    }

    /// Cluster id (a union-find root) of site `x`, which must lie in the table.
    pub fn cluster_of(&mut self, x: i64) -> u32 {
        let id = self.id_of[self.slot(x)];
        if id != UNSEEN {
            return self.root(id);
        }
        let mut steps = 0;
        let mut visited = vec![x];
        let fwd = self.walk(x, Half::Upper, &mut steps, &mut visited);
        let bwd = if fwd == WalkEnd::Closed {
            WalkEnd::Closed
        } else {
            self.walk(x, Half::Lower, &mut steps, &mut visited)
        };
        let new_id = self.parent.len() as u32;
        self.parent.push(new_id);
        self.escaping.push(fwd != WalkEnd::Closed);
        let mut id = new_id;
        for end in [fwd, bwd] {
            if let WalkEnd::Hit(other) = end {
                id = self.union(other, id);
            }
        }
        for v in visited {
            let s = self.slot(v);
            self.id_of[s] = id;
        }
        self.root(id)
    }

    pub fn is_escaping(&mut self, x: i64) -> bool {
        let c = self.cluster_of(x);
        self.escaping[c as usize]
    }

    pub fn same_cluster(&mut self, a: u32, b: u32) -> bool {
        self.root(a) == self.root(b)
    }

    /// First arc `{z, y}` of `half` with `z < x < y`, scanning rightwards,
    /// whose cluster escapes. Arcs entirely right of `x` are jumped over; an
    /// arc leaving the table to the left of `y` spans `x` with `z` unknown.
    pub fn straddling(&mut self, x: i64, half: Half) -> Option<StraddlingArc> {
        let mut y = x + 1;
        while self.table.contains(y) {
            let m = match self.table.mate(y, half) {
                Some(m) => m,
                // an end leaving to the right closes off everything beyond it
                None if self.table.opens(y, half) => return None,
                None => self.table.lo() - 1,
            };
            if m > y {
                y = m + 1;
                continue;
            }
            if m < x && self.is_escaping(y) {
                let cluster = self.cluster_of(y);
                let left = (m >= self.table.lo()).then_some(m);
                return Some(StraddlingArc {
                    left,
                    right: y,
                    cluster,
                });
            }
            y += 1;
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WalkEnd {
    Closed,
    Open,
    Hit(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraddlingArc {
    /// `None` when the arc leaves the scanned segment.
    pub left: Option<i64>,
    pub right: i64,
    pub cluster: u32,
}

/// Definitional checklist for one site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrifurcationAudit {
    pub site: i64,
    pub state: SiteState,
    pub aligned: bool,
    pub cluster: u32,
    pub cluster_escapes: bool,
    pub upper: Option<StraddlingArc>,
    pub lower: Option<StraddlingArc>,
    /// A site within distance 3 of `site` belonging to the upper straddling cluster.
    pub upper_near: Option<i64>,
    pub lower_near: Option<i64>,
    pub distinct: bool,
}

impl TrifurcationAudit {
    pub fn passes(&self) -> bool {
        self.aligned
            && self.cluster_escapes
            && self.upper.is_some()
            && self.lower.is_some()
            && self.upper_near.is_some_and(|y| (y - self.site).abs() <= 3)
            && self.lower_near.is_some_and(|y| (y - self.site).abs() <= 3)
            && self.distinct
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrifurcationReport {
    pub window: (i64, i64),
    pub budget: Budget,
    pub points: Vec<i64>,
    pub escaping_cluster_count: usize,
    pub audit: Vec<TrifurcationAudit>,
    /// `#points <= 2 + escaping_cluster_count`, with escape standing in for
    /// infinite; checked empirically, nothing guarantees it on finite windows.
    pub counting_bound_holds: bool,
}

/// Scans `[lo, hi]` for trifurcation points.
pub fn trifurcation_scan(env: ScanEnv<'_>, lo: i64, hi: i64, budget: Budget) -> TrifurcationReport {
    let h = budget.max_window_halfwidth as i64;
    let (table, states): (MateTable, Vec<SiteState>) = match env {
        ScanEnv::Line(line) => {
            let states = (lo..=hi).map(|x| line.peek(x)).collect();
            (line.segment(lo - h, hi + h), states)
        }
        ScanEnv::Frozen(w) => {
            let from = (lo - h).max(w.lo);
            let to = (hi + h).min(w.hi());
            let part = &w.sites[(from - w.lo) as usize..=(to - w.lo) as usize];
            let states = (lo.max(w.lo)..=hi.min(w.hi()))
                .map(|x| w.state(x).expect("inside window"))
                .collect();
            (MateTable::from_states(from, part), states)
        }
    };
    let state_at = |x: i64, lo: i64| states[(x - lo) as usize];
    let first = lo.max(table.lo());
    let lo = first;
    let hi = hi.min(table.hi());
    let mut index = ClusterIndex::new(&table, budget.max_steps);

    let mut escaping = BTreeSet::new();
    for x in lo..=hi {
        if index.is_escaping(x) {
            escaping.insert(x);
        }
    }

    let mut candidates = Vec::new();
    for x in lo..=hi {
        let state = state_at(x, lo);
        if !state.is_aligned() || !index.is_escaping(x) {
            continue;
        }
        let upper = index.straddling(x, Half::Upper);
        let lower = index.straddling(x, Half::Lower);
        if upper.is_none() || lower.is_none() {
            continue;
        }
        candidates.push((x, state, upper, lower));
    }

    // distances and distinctness are decided once every walk is done, so
    // later merges of clusters are taken into account
    let mut audit = Vec::new();
    for (x, state, upper, lower) in candidates {
        let near = |index: &mut ClusterIndex, target: u32| {
            (x - 3..=x + 3)
                .filter(|y| index.table.contains(*y))
                .find(|&y| {
                    let c = index.cluster_of(y);
                    index.same_cluster(c, target)
                })
        };
        let (cu, cd) = (upper.unwrap().cluster, lower.unwrap().cluster);
        let upper_near = near(&mut index, cu);
        let lower_near = near(&mut index, cd);
        let c = index.cluster_of(x);
        let (cu, cd) = (index.root(cu), index.root(cd));
        let entry = TrifurcationAudit {
            site: x,
            state,
            aligned: state.is_aligned(),
            cluster: c,
            cluster_escapes: index.escaping[c as usize],
            upper: upper.map(|a| StraddlingArc { cluster: cu, ..a }),
            lower: lower.map(|a| StraddlingArc { cluster: cd, ..a }),
            upper_near,
            lower_near,
            distinct: c != cu && c != cd && cu != cd,
        };
        if entry.passes() {
            audit.push(entry);
        }
    }

    let roots: BTreeSet<u32> = escaping.into_iter().map(|x| index.cluster_of(x)).collect();
    let points: Vec<i64> = audit.iter().map(|a| a.site).collect();
    TrifurcationReport {
        window: (lo, hi),
        budget,
        counting_bound_holds: points.len() <= 2 + roots.len(),
        points,
        escaping_cluster_count: roots.len(),
        audit,
    }
}

/// Three paths wired around the origin: the window realising end counts
/// `1,1,3,1` with boundary matching `1-2,3-4,5-6` on `[-1, 4]`. Frozen on its
/// own, every path reaches the window edge, and site 0 lies on one path
/// while the other two pass over and under it.
pub fn witness_request() -> (RealizeRequest, i64) {
    let req = RealizeRequest::new(
        6,
        EndProfile::new(1, 1, 3, 1),
        "1-2,3-4,5-6".parse().expect("valid matching"),
    )
    .expect("valid request");
    (req, -1)
}

pub fn witness_window() -> Window {
    let (req, lo) = witness_request();
    realize_at(&req, lo).expect("witness is realisable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    #[test]
    fn series_first_term_and_monotone() {
        assert_eq!(circle_density_series(0).value, 0.125);
        let a = circle_density_series(1000).value;
        let b = circle_density_series(2000).value;
        assert!(a < b);
        assert!(b - a <= circle_series_tail(1000));
    }

    #[test]
    fn pmf_values() {
        assert_eq!(arc_length_pmf(0), 0.5);
        assert_eq!(arc_length_pmf(1), 0.125);
        for k in 0..40 {
            let exact = arc_length_pmf_exact(k).to_f64().unwrap();
            assert!((exact - arc_length_pmf(k)).abs() < 1e-15);
        }
        let partial: f64 = (0..=1000).map(arc_length_pmf).sum();
        assert!(partial <= 1.0 && 1.0 - partial < 0.02);
    }

    #[test]
    fn pmf_zero_by_brute_force() {
        // x = site 1 of three sites 0,1,2: partner at distance 1 iff
        // (s0,s1) = (+,-) or (s1,s2) = (+,-)
        let mut hits = 0;
        for bits in 0..8u32 {
            let s: Vec<i64> = (0..3)
                .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            if (s[0] == 1 && s[1] == -1) || (s[1] == 1 && s[2] == -1) {
                hits += 1;
            }
        }
        assert_eq!(hits as f64 / 8.0, arc_length_pmf(0));
    }

    #[test]
    fn forced_short_loops_have_density_one() {
        let sites = (0..1000)
            .flat_map(|_| [SiteState::PLUS_PLUS, SiteState::MINUS_MINUS])
            .collect();
        assert_eq!(circle_density_window(&Window::new(0, sites), 0), 1.0);
    }

    #[test]
    fn single_site_has_two_ends() {
        let rows = boundary_growth(&[1], &[1, 2, 3, 4]);
        assert_eq!(rows[0].mean_n_tot, 2.0);
        assert!(rows[0].methods_agree);
    }

    #[test]
    fn misaligned_sites_never_reported() {
        let mut line = LazyLine::new(12);
        let r = trifurcation_scan(
            ScanEnv::Line(&mut line),
            0,
            2000,
            Budget::new(20_000, 20_000),
        );
        let check = LazyLine::new(12);
        for p in &r.points {
            assert!(check.peek(*p).is_aligned());
        }
        assert!(r.audit.iter().all(|a| a.passes()));
    }

    #[test]
    fn witness_reports_origin() {
        let w = witness_window();
        let r = trifurcation_scan(ScanEnv::Frozen(&w), w.lo, w.hi(), Budget::new(1000, 1000));
        assert!(r.points.contains(&0));
        assert!(r.audit.iter().all(|a| a.passes()));
        assert_eq!(r.escaping_cluster_count, 3);
        assert!(r.counting_bound_holds);
    }

    #[test]
    fn cluster_index_matches_lazy_traces() {
        let mut line = LazyLine::new(8);
        let table = line.segment(-5000, 5000);
        let mut index = ClusterIndex::new(&table, 100_000);
        for x in -100..100 {
            let t = line.trace_cluster(x, Budget::new(100_000, 4000));
            if t.is_closed() && t.vertices.iter().all(|v| v.abs() <= 4000) {
                assert!(!index.is_escaping(x));
                let c = index.cluster_of(x);
                for v in &t.vertices {
                    let cv = index.cluster_of(*v);
                    assert!(index.same_cluster(c, cv));
                }
            }
        }
    }
}

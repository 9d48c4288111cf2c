//! Windows with prescribed dangling ends and boundary matching, end
//! rewiring, and an exhaustive check of the finite-energy inequality.
//!
//! # Construction
//!
//! Between two neighbouring sites, the arcs crossing a vertical cut form a
//! sequence of strands read top to bottom, with the baseline sitting at some
//! position in that sequence. Every site acts on the strands adjacent to the
//! baseline in one of four ways:
//!
//! | site      | effect                                                      |
//! |-----------|-------------------------------------------------------------|
//! | `(-1,+1)` | the strand just above the baseline passes below it           |
//! | `(+1,-1)` | the strand just below the baseline passes above it           |
//! | `(-1,-1)` | the two strands around the baseline are joined               |
//! | `(+1,+1)` | a new pair of joined strands is inserted around the baseline |
//!
//! The cut left of the window holds the left ends, the cut right of it the
//! right ends. Paths joining a left end to a right end ("through" paths)
//! split both sequences into gaps. The baseline visits every gap once in a
//! sweep to the farther extreme and back; in each gap it removes the pairs of
//! left ends on its first visit and creates the pairs of right ends on its
//! last visit. Creation is the time reversal of removal. Every path costs at
//! most two sites, so at most `n_tot` sites are used; the rest of the window
//! is filled with short loops `(+1,+1),(-1,-1)`.

use std::collections::HashSet;

use num::rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::noncrossing::{MatchingError, NcMatching};
use crate::window::{decompose, BoundaryMatching, EndProfile, SiteState, Window};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealizeError {
    #[error("end counts {profile} do not have the parity of the window length {len}")]
    ParityViolation { profile: EndProfile, len: usize },
    #[error("{needed} sites needed but the window has {len}")]
    InsufficientRoom { needed: usize, len: usize },
    #[error("boundary matching is not non-crossing: {0}")]
    CrossingSigma(MatchingError),
    #[error("boundary matching has {got} points but the profile has {expected} ends")]
    SigmaSize { expected: usize, got: usize },
    #[error("end index {index} out of range for {count} ends")]
    EndOutOfRange { index: usize, count: usize },
    #[error("ends {0} and {1} are separated by an odd number of ends")]
    OddGap(usize, usize),
    #[error("cannot rewire an end to itself")]
    SameEnd,
    #[error("4^{len} configurations is too many to enumerate (limit {limit} sites)")]
    EnumerationTooLarge { len: usize, limit: usize },
    #[error("override site {0} is outside the window")]
    SiteOutOfRange(usize),
    #[error("override rule returned {got} states for {expected} sites")]
    OverrideSize { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeRequest {
    pub len: usize,
    pub profile: EndProfile,
    pub sigma: BoundaryMatching,
}

impl RealizeRequest {
    /// Checks the size, parity and room conditions.
    pub fn new(
        len: usize,
        profile: EndProfile,
        sigma: BoundaryMatching,
    ) -> Result<Self, RealizeError> {
        let req = RealizeRequest {
            len,
            profile,
            sigma,
        };
        req.validate()?;
        Ok(req)
    }

    /// As [`RealizeRequest::new`], from a raw zero-based pairing.
    pub fn from_mates(
        len: usize,
        profile: EndProfile,
        mates: Vec<usize>,
    ) -> Result<Self, RealizeError> {
        let sigma = NcMatching::from_mates(mates).map_err(RealizeError::CrossingSigma)?;
        RealizeRequest::new(len, profile, sigma)
    }

    pub fn validate(&self) -> Result<(), RealizeError> {
        if !self.profile.parity_ok(self.len) {
            return Err(RealizeError::ParityViolation {
                profile: self.profile,
                len: self.len,
            });
        }
        let n_tot = self.profile.total();
        if self.sigma.len() != n_tot {
            return Err(RealizeError::SigmaSize {
                expected: n_tot,
                got: self.sigma.len(),
            });
        }
        if n_tot > self.len {
            return Err(RealizeError::InsufficientRoom {
                needed: n_tot,
                len: self.len,
            });
        }
        Ok(())
    }
}

/// Builds a window on `[1, len]` whose end profile and boundary matching are
/// those of the request.
pub fn realize(req: &RealizeRequest) -> Result<Window, RealizeError> {
    realize_at(req, 1)
}

pub fn realize_at(req: &RealizeRequest, lo: i64) -> Result<Window, RealizeError> {
    req.validate()?;
    fill(req, lo)
}

fn fill(req: &RealizeRequest, lo: i64) -> Result<Window, RealizeError> {
    if !req.profile.parity_ok(req.len) {
        return Err(RealizeError::ParityViolation {
            profile: req.profile,
            len: req.len,
        });
    }
    let mut sites = construct(&req.profile, &req.sigma);
    if sites.len() > req.len {
        return Err(RealizeError::InsufficientRoom {
            needed: sites.len(),
            len: req.len,
        });
    }
    debug_assert_eq!((req.len - sites.len()) % 2, 0);
    while sites.len() < req.len {
        sites.push(SiteState::PLUS_PLUS);
        sites.push(SiteState::MINUS_MINUS);
    }
    Ok(Window::new(lo, sites))
}

/// Number of sites the construction uses before filler loops.
pub fn construction_cost(profile: &EndProfile, sigma: &BoundaryMatching) -> usize {
    construct(profile, sigma).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    ShiftUp,
    ShiftDown,
    Join(usize, usize),
    Insert(usize, usize),
}

impl Op {
    fn site(self) -> SiteState {
        match self {
            Op::ShiftUp => SiteState::MINUS_PLUS,
            Op::ShiftDown => SiteState::PLUS_MINUS,
            Op::Join(..) => SiteState::MINUS_MINUS,
            Op::Insert(..) => SiteState::PLUS_PLUS,
        }
    }

    fn reversed(self) -> Op {
        match self {
            Op::ShiftUp => Op::ShiftDown,
            Op::ShiftDown => Op::ShiftUp,
            Op::Join(a, b) => Op::Insert(a, b),
            Op::Insert(a, b) => Op::Join(a, b),
        }
    }
}

/// Strands crossing a cut, top to bottom, and the baseline position.
struct Cut {
    strands: Vec<usize>,
    cursor: usize,
}

impl Cut {
    fn apply(&mut self, op: Op, log: &mut Vec<Op>) {
        match op {
            Op::ShiftUp => self.cursor -= 1,
            Op::ShiftDown => self.cursor += 1,
            Op::Join(a, b) => {
                debug_assert_eq!(self.strands[self.cursor - 1], a);
                debug_assert_eq!(self.strands[self.cursor], b);
                self.strands.drain(self.cursor - 1..=self.cursor);
                self.cursor -= 1;
            }
            Op::Insert(a, b) => {
                self.strands.insert(self.cursor, b);
                self.strands.insert(self.cursor, a);
                self.cursor += 1;
            }
        }
        log.push(op);
    }

    fn position(&self, id: usize) -> usize {
        self.strands
            .iter()
            .position(|&s| s == id)
            .expect("strand present")
    }

    /// Removes the pairs around the baseline that `paired` links, until the
    /// strands next to the baseline are unpaired (or absent).
    fn clear_gap(&mut self, paired: &dyn Fn(usize) -> Option<usize>, log: &mut Vec<Op>) {
        loop {
            let above = self.cursor.checked_sub(1).map(|i| self.strands[i]);
            let below = self.strands.get(self.cursor).copied();
            if let (Some(s), Some(t)) = (above, below) {
                if paired(s) == Some(t) {
                    self.apply(Op::Join(s, t), log);
                    continue;
                }
            }
            if let Some(m) = below.and_then(paired) {
                if self.position(m) > self.cursor {
                    self.apply(Op::ShiftDown, log);
                    continue;
                }
            }
            if let Some(m) = above.and_then(paired) {
                if self.position(m) + 1 < self.cursor {
                    self.apply(Op::ShiftUp, log);
                    continue;
                }
            }
            break;
        }
    }
}

fn construct(profile: &EndProfile, sigma: &BoundaryMatching) -> Vec<SiteState> {
    let (a_up, b_up, b_dn, a_dn) = (profile.nl_up, profile.nr_up, profile.nr_dn, profile.nl_dn);
    let n = profile.total();
    let is_left = |e: usize| e < a_up || e >= a_up + b_up + b_dn;

    // cut left of the window and cut right of it
    let mut left: Vec<usize> = (0..a_up).rev().collect();
    left.extend((n - a_dn..n).rev());
    let right: Vec<usize> = (a_up..a_up + b_up + b_dn).collect();
    let through = |e: usize| is_left(e) != is_left(sigma.mate(e));

    let left_pair = |e: usize| {
        let m = sigma.mate(e);
        (is_left(e) && is_left(m)).then_some(m)
    };
    let right_pair = |e: usize| {
        let m = sigma.mate(e);
        (!is_left(e) && !is_left(m)).then_some(m)
    };

    let t = left.iter().filter(|&&e| through(e)).count();
    let g = left[..a_up].iter().filter(|&&e| through(e)).count();
    let h = right[..b_up].iter().filter(|&&e| through(e)).count();

    // contents of each right-hand gap, and the final baseline offset in gap h
    let mut right_gaps: Vec<Vec<usize>> = vec![Vec::new(); t + 1];
    {
        let mut gap = 0;
        for &e in &right {
            if through(e) {
                gap += 1;
            } else {
                right_gaps[gap].push(e);
            }
        }
    }
    let final_offset = right[..b_up]
        .iter()
        .rev()
        .take_while(|&&e| !through(e))
        .count();

    let mut route = vec![g];
    if g <= h {
        route.extend((0..g).rev());
        route.extend(1..=t);
        route.extend((h..t).rev());
    } else {
        route.extend(g + 1..=t);
        route.extend((0..t).rev());
        route.extend(1..=h);
    }
    let mut last_visit = vec![0; t + 1];
    for (k, &gap) in route.iter().enumerate() {
        last_visit[gap] = k;
    }

    let mut cut = Cut {
        strands: left,
        cursor: a_up,
    };
    let mut log = Vec::new();
    let mut cleared = vec![false; t + 1];
    for (k, &gap) in route.iter().enumerate() {
        if !cleared[gap] {
            cut.clear_gap(&left_pair, &mut log);
            cleared[gap] = true;
        }
        let next = route.get(k + 1).copied();
        if last_visit[gap] == k {
            let offset = match next {
                None => final_offset,
                Some(nx) if nx < gap => 0,
                Some(_) => right_gaps[gap].len(),
            };
            let mut scratch = Cut {
                strands: right_gaps[gap].clone(),
                cursor: offset,
            };
            let mut removal = Vec::new();
            scratch.clear_gap(&right_pair, &mut removal);
            debug_assert!(scratch.strands.is_empty());
            for op in removal.into_iter().rev() {
                cut.apply(op.reversed(), &mut log);
            }
        }
        match next {
            Some(nx) if nx < gap => cut.apply(Op::ShiftUp, &mut log),
            Some(_) => cut.apply(Op::ShiftDown, &mut log),
            None => {}
        }
    }
    debug_assert_eq!(cut.cursor, b_up);
    log.into_iter().map(Op::site).collect()
}

/// Rewires a window so that ends `i` and `j` (zero-based cyclic indices)
/// become the two ends of one path, keeping the end profile.
///
/// Pairs lying inside one of the two arcs of ends cut out by `i` and `j` are
/// kept; the remaining ends of each arc are paired with their neighbours.
/// Rewiring a pair that is already matched reproduces the same matching.
pub fn rewire(window: &Window, i: usize, j: usize) -> Result<Window, RealizeError> {
    let d = decompose(window);
    let n = d.ends_in_cyclic_order.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(RealizeError::EndOutOfRange {
                index: idx,
                count: n,
            });
        }
    }
    if i == j {
        return Err(RealizeError::SameEnd);
    }
    let sigma = rewired_matching(&d.sigma, i, j)?;
    let req = RealizeRequest {
        len: window.len(),
        profile: d.profile(),
        sigma,
    };
    fill(&req, window.lo)
}

/// The boundary matching [`rewire`] aims for.
pub fn rewired_matching(
    sigma: &BoundaryMatching,
    i: usize,
    j: usize,
) -> Result<BoundaryMatching, RealizeError> {
    let n = sigma.len();
    let arc = |from: usize, to: usize| -> Vec<usize> {
        let mut v = Vec::new();
        let mut k = (from + 1) % n;
        while k != to {
            v.push(k);
            k = (k + 1) % n;
        }
        v
    };
    let gaps = [arc(i, j), arc(j, i)];
    if gaps[0].len() % 2 == 1 {
        return Err(RealizeError::OddGap(i, j));
    }
    let mut mates = vec![usize::MAX; n];
    mates[i] = j;
    mates[j] = i;
    for gap in &gaps {
        let inside: HashSet<usize> = gap.iter().copied().collect();
        let mut loose = Vec::new();
        for &e in gap {
            let m = sigma.mate(e);
            if inside.contains(&m) {
                mates[e] = m;
            } else {
                loose.push(e);
            }
        }
        for pair in loose.chunks(2) {
            mates[pair[0]] = pair[1];
            mates[pair[1]] = pair[0];
        }
    }
    NcMatching::from_mates(mates).map_err(RealizeError::CrossingSigma)
}

/// Values assigned by an override rule on the sites of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOverride {
    pub sites: Vec<i64>,
    pub values: Vec<SiteState>,
}

impl LocalOverride {
    pub fn apply(&self, window: &Window) -> Window {
        let mut out = window.clone();
        for (&x, &v) in self.sites.iter().zip(&self.values) {
            out.sites[(x - window.lo) as usize] = v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteEnergyReport {
    pub len: usize,
    pub subset_size: usize,
    pub p_event: Ratio<u64>,
    pub p_modified: Ratio<u64>,
    /// `4^{-|S|}`.
    pub factor: Ratio<u64>,
    pub bound_ok: bool,
}

/// Maps the outside states, `(site, state)` in increasing site order, to the
/// states imposed on the subset.
pub type OverrideRule<'a> = dyn Fn(&[(i64, SiteState)]) -> Vec<SiteState> + 'a;

pub const FINITE_ENERGY_MAX_LEN: usize = 10;

/// Configuration number `code` of a window on `[1, len]`, site `k` taking
/// base-4 digit `k` of `code`.
pub fn window_from_code(len: usize, code: u64) -> Window {
    let sites = (0..len)
        .map(|k| SiteState::from_index((code >> (2 * k)) as usize & 3))
        .collect();
    Window::new(1, sites)
}

pub fn window_code(window: &Window) -> u64 {
    window
        .sites
        .iter()
        .enumerate()
        .fold(0, |acc, (k, s)| acc | (s.index() as u64) << (2 * k))
}

/// Enumerates all `4^len` windows on `[1, len]` with uniform weight and
/// compares `P(C)` with `P(C~)`, where `C~` replaces the states on `subset`
/// by `phi` of the states outside it. `subset` holds sites of `[1, len]`;
/// `phi` receives the outside states as `(site, state)` in increasing order.
pub fn verify_finite_energy(
    len: usize,
    subset: &[i64],
    phi: &OverrideRule<'_>,
    event: &dyn Fn(&Window) -> bool,
) -> Result<FiniteEnergyReport, RealizeError> {
    if len > FINITE_ENERGY_MAX_LEN {
        return Err(RealizeError::EnumerationTooLarge {
            len,
            limit: FINITE_ENERGY_MAX_LEN,
        });
    }
    let mut sites: Vec<i64> = subset.to_vec();
    sites.sort_unstable();
    sites.dedup();
    if let Some(&bad) = sites.iter().find(|&&x| x < 1 || x > len as i64) {
        return Err(RealizeError::SiteOutOfRange(bad.max(0) as usize));
    }
    let total = 1u64 << (2 * len);
    let mut in_event = 0u64;
    let mut modified = HashSet::new();
    for code in 0..total {
        let w = window_from_code(len, code);
        if !event(&w) {
            continue;
        }
        in_event += 1;
        let outside: Vec<(i64, SiteState)> = (1..=len as i64)
            .filter(|x| sites.binary_search(x).is_err())
            .map(|x| (x, w.sites[(x - 1) as usize]))
            .collect();
        let values = phi(&outside);
        if values.len() != sites.len() {
            return Err(RealizeError::OverrideSize {
                expected: sites.len(),
                got: values.len(),
            });
        }
        let ov = LocalOverride {
            sites: sites.clone(),
            values,
        };
        modified.insert(window_code(&ov.apply(&w)));
    }
    let p_event = Ratio::new(in_event, total);
    let p_modified = Ratio::new(modified.len() as u64, total);
    let factor = Ratio::new(1, 1u64 << (2 * sites.len()));
    Ok(FiniteEnergyReport {
        len,
        subset_size: sites.len(),
        p_event,
        p_modified,
        factor,
        bound_ok: p_modified >= factor * p_event,
    })
}

/// A random instance of the finite-energy check: a subset `S`, an override
/// rule given as a table indexed by the outside configuration, and an event
/// given as a set of configuration codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteEnergyCase {
    pub len: usize,
    pub subset: Vec<i64>,
    /// Entry `k` is the override for the `k`-th outside configuration in base-4 order.
    pub phi_table: Vec<Vec<SiteState>>,
    pub event: HashSet<u64>,
}

impl FiniteEnergyCase {
    /// Draws `S` uniformly among non-empty subsets, a uniform table, and an
    /// event containing each configuration with a probability drawn once.
    pub fn sample<R: Rng>(len: usize, rng: &mut R) -> Result<Self, RealizeError> {
        if len == 0 || len > FINITE_ENERGY_MAX_LEN {
            return Err(RealizeError::EnumerationTooLarge {
                len,
                limit: FINITE_ENERGY_MAX_LEN,
            });
        }
        let mask = rng.gen_range(1..1u32 << len);
        let subset: Vec<i64> = (0..len)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| k as i64 + 1)
            .collect();
        let outside = len - subset.len();
        let phi_table = (0..1usize << (2 * outside))
            .map(|_| {
                (0..subset.len())
                    .map(|_| SiteState::from_index(rng.gen_range(0..4)))
                    .collect()
            })
            .collect();
        let density: f64 = rng.gen();
        let event = (0..1u64 << (2 * len))
            .filter(|_| rng.gen_bool(density))
            .collect();
        Ok(FiniteEnergyCase {
            len,
            subset,
            phi_table,
            event,
        })
    }

    pub fn verify(&self) -> Result<FiniteEnergyReport, RealizeError> {
        let phi = |outside: &[(i64, SiteState)]| {
            let k = outside
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, (_, s))| acc | s.index() << (2 * i));
            self.phi_table[k].clone()
        };
        let event = |w: &Window| self.event.contains(&window_code(w));
        verify_finite_energy(self.len, &self.subset, &phi, &event)
    }
}

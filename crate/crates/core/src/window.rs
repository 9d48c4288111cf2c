//! Finite windows of the two-sided sign configuration.
//!
//! Each site carries an upper and a lower parenthesis (`+1` opens, `-1`
//! closes). Inside a window the parentheses of each half are paired by the
//! usual stack rule; parentheses left unpaired are dangling ends whose partner
//! lies outside the window.
//!
//! Ends are numbered cyclically (zero-based in this API): upper-left ends by
//! ascending site, then upper-right ends by ascending site, then lower-right
//! ends by descending site, then lower-left ends by descending site. This is
//! the clockwise order around a circle enclosing the window, starting from the
//! innermost upper-left end.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::noncrossing::NcMatching;

/// Non-crossing matching realised on the dangling ends of a window.
pub type BoundaryMatching = NcMatching;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Upper,
    Lower,
}

impl Half {
    pub fn other(self) -> Half {
        match self {
            Half::Upper => Half::Lower,
            Half::Lower => Half::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(Sign, Sign)", into = "(Sign, Sign)")]
pub struct SiteState {
    pub upper: Sign,
    pub lower: Sign,
}

impl SiteState {
    pub const PLUS_PLUS: SiteState = SiteState::new(Sign::Plus, Sign::Plus);
    pub const MINUS_MINUS: SiteState = SiteState::new(Sign::Minus, Sign::Minus);
    pub const PLUS_MINUS: SiteState = SiteState::new(Sign::Plus, Sign::Minus);
    pub const MINUS_PLUS: SiteState = SiteState::new(Sign::Minus, Sign::Plus);

    /// All four states, indexed by [`SiteState::index`].
    pub const ALL: [SiteState; 4] = [
        SiteState::PLUS_PLUS,
        SiteState::PLUS_MINUS,
        SiteState::MINUS_PLUS,
        SiteState::MINUS_MINUS,
    ];

    pub const fn new(upper: Sign, lower: Sign) -> Self {
        SiteState { upper, lower }
    }

    pub fn from_values(upper: i64, lower: i64) -> Option<Self> {
        let s = |v| match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        };
        Some(SiteState::new(s(upper)?, s(lower)?))
    }

    pub fn sign(self, half: Half) -> Sign {
        match half {
            Half::Upper => self.upper,
            Half::Lower => self.lower,
        }
    }

    /// Two bits: upper is the high bit, `1` meaning `-1`.
    pub fn index(self) -> usize {
        (matches!(self.upper, Sign::Minus) as usize) << 1
            | matches!(self.lower, Sign::Minus) as usize
    }

    pub fn from_index(i: usize) -> SiteState {
        SiteState::ALL[i & 3]
    }

    /// `(+1,+1)` or `(-1,-1)`.
    pub fn is_aligned(self) -> bool {
        self.upper == self.lower
    }
}

impl From<(Sign, Sign)> for SiteState {
    fn from((u, l): (Sign, Sign)) -> Self {
        SiteState::new(u, l)
    }
}

impl From<SiteState> for (Sign, Sign) {
    fn from(s: SiteState) -> Self {
        (s.upper, s.lower)
    }
}

/// Configuration on the integer interval `[lo, lo + sites.len() - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub sites: Vec<SiteState>,
}

impl Window {
    pub fn new(lo: i64, sites: Vec<SiteState>) -> Self {
        Window { lo, sites }
    }

    /// Builds from separate upper and lower `±1` rows of equal length.
    pub fn from_rows(lo: i64, upper: &[i64], lower: &[i64]) -> Option<Self> {
        if upper.len() != lower.len() {
            return None;
        }
        let sites = upper
            .iter()
            .zip(lower)
            .map(|(&u, &l)| SiteState::from_values(u, l))
            .collect::<Option<Vec<_>>>()?;
        Some(Window { lo, sites })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Last site (inclusive); `lo - 1` for an empty window.
    pub fn hi(&self) -> i64 {
        self.lo + self.sites.len() as i64 - 1
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.lo && x <= self.hi()
    }

    pub fn state(&self, x: i64) -> Option<SiteState> {
        if self.contains(x) {
            Some(self.sites[(x - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn signs(&self, half: Half) -> Vec<Sign> {
        self.sites.iter().map(|s| s.sign(half)).collect()
    }

    pub fn translate(&self, by: i64) -> Window {
        Window::new(self.lo + by, self.sites.clone())
    }

    /// Reverses the site order and flips every sign; left and right ends swap.
    pub fn mirror(&self) -> Window {
        let sites = self
            .sites
            .iter()
            .rev()
            .map(|s| SiteState::new(s.upper.flip(), s.lower.flip()))
            .collect();
        Window::new(self.lo, sites)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |half: Half| -> String {
            self.sites
                .iter()
                .map(|s| if s.sign(half) == Sign::Plus { '(' } else { ')' })
                .collect()
        };
        write!(
            f,
            "@{} {} / {}",
            self.lo,
            row(Half::Upper),
            row(Half::Lower)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub left: i64,
    pub right: i64,
    pub half: Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DanglingEnd {
    pub site: i64,
    pub half: Half,
    pub direction: Side,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Parenthesised {
    pub arcs: Vec<Arc>,
    pub left_ends: Vec<DanglingEnd>,
    pub right_ends: Vec<DanglingEnd>,
}

/// Stack matching of one row of signs, the first one sitting at site `lo`.
/// A `-1` closes the nearest unclosed `+1` to its left.
pub fn match_parentheses(lo: i64, signs: &[Sign], half: Half) -> Parenthesised {
    let mut out = Parenthesised::default();
    let mut open: Vec<i64> = Vec::new();
    for (i, &s) in signs.iter().enumerate() {
        let x = lo + i as i64;
        match s {
            Sign::Plus => open.push(x),
            Sign::Minus => match open.pop() {
                Some(left) => out.arcs.push(Arc {
                    left,
                    right: x,
                    half,
                }),
                None => out.left_ends.push(DanglingEnd {
                    site: x,
                    half,
                    direction: Side::Left,
                }),
            },
        }
    }
    out.right_ends = open
        .into_iter()
        .map(|site| DanglingEnd {
            site,
            half,
            direction: Side::Right,
        })
        .collect();
    out
}

/// Partner of every site of a window inside that window, per half.
#[derive(Debug, Clone)]
pub struct MateTable {
    lo: i64,
    upper: Vec<u32>,
    lower: Vec<u32>,
}

// unmatched sites: a `-1` dangles left, a `+1` dangles right
const OPEN_LEFT: u32 = u32::MAX;
const OPEN_RIGHT: u32 = u32::MAX - 1;

impl MateTable {
    pub fn new(window: &Window) -> Self {
        MateTable::from_states(window.lo, &window.sites)
    }

    /// # Panics
    /// If `sites` has `u32::MAX - 1` or more entries.
    pub fn from_states(lo: i64, sites: &[SiteState]) -> Self {
        assert!(
            sites.len() < OPEN_RIGHT as usize,
            "segment too long for a mate table"
        );
        let mut upper = vec![OPEN_LEFT; sites.len()];
        let mut lower = vec![OPEN_LEFT; sites.len()];
        let mut up_stack: Vec<u32> = Vec::new();
        let mut dn_stack: Vec<u32> = Vec::new();
        for (i, s) in sites.iter().enumerate() {
            let i = i as u32;
            for (sign, stack, mates) in [
                (s.upper, &mut up_stack, &mut upper),
                (s.lower, &mut dn_stack, &mut lower),
            ] {
                match sign {
                    Sign::Plus => stack.push(i),
                    Sign::Minus => {
                        if let Some(j) = stack.pop() {
                            mates[i as usize] = j;
                            mates[j as usize] = i;
                        }
                    }
                }
            }
        }
        for (stack, mates) in [(up_stack, &mut upper), (dn_stack, &mut lower)] {
            for j in stack {
                mates[j as usize] = OPEN_RIGHT;
            }
        }
        MateTable { lo, upper, lower }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.upper.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.lo && x <= self.hi()
    }

    /// `None` when `x` is outside the table or its partner is.
    #[inline]
    pub fn mate(&self, x: i64, half: Half) -> Option<i64> {
        if x < self.lo || x > self.hi() {
            return None;
        }
        let i = (x - self.lo) as usize;
        let m = match half {
            Half::Upper => self.upper[i],
            Half::Lower => self.lower[i],
        };
        (m < OPEN_RIGHT).then(|| self.lo + m as i64)
    }

    /// Whether `x` is an unmatched `+1` of `half`, dangling to the right.
    pub fn opens(&self, x: i64, half: Half) -> bool {
        if !self.contains(x) {
            return false;
        }
        let i = (x - self.lo) as usize;
        match half {
            Half::Upper => self.upper[i] == OPEN_RIGHT,
            Half::Lower => self.lower[i] == OPEN_RIGHT,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndProfile {
    pub nl_up: usize,
    pub nr_up: usize,
    pub nl_dn: usize,
    pub nr_dn: usize,
}

impl EndProfile {
    pub fn new(nl_up: usize, nr_up: usize, nl_dn: usize, nr_dn: usize) -> Self {
        EndProfile {
            nl_up,
            nr_up,
            nl_dn,
            nr_dn,
        }
    }

    pub fn total(&self) -> usize {
        self.nl_up + self.nr_up + self.nl_dn + self.nr_dn
    }

    /// Both halves have end counts of the same parity as `len`.
    pub fn parity_ok(&self, len: usize) -> bool {
        (self.nl_up + self.nr_up) % 2 == len % 2 && (self.nl_dn + self.nr_dn) % 2 == len % 2
    }
}

impl fmt::Display for EndProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.nl_up, self.nr_up, self.nl_dn, self.nr_dn
        )
    }
}

impl std::str::FromStr for EndProfile {
    type Err = String;

    /// Parses `"a+,b+,a-,b-"`.
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<usize> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad count '{t}'"))
            })
            .collect::<Result<_, _>>()?;
        match v.as_slice() {
            &[a, b, c, d] => Ok(EndProfile::new(a, b, c, d)),
            _ => Err(format!("expected four counts 'a+,b+,a-,b-', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    Stack,
    ClosedForm,
}

/// Left and right end counts of one row from its partial sums:
/// `left = -min S_k`, `right = S_N - min S_k` over `0 <= k <= N`, `S_0 = 0`.
pub fn row_ends_closed_form(signs: impl IntoIterator<Item = Sign>) -> (usize, usize) {
    let mut sum = 0i64;
    let mut min = 0i64;
    for s in signs {
        sum += s.value();
        min = min.min(sum);
    }
    ((-min) as usize, (sum - min) as usize)
}

/// `max S_k - min S_k` over `1 <= k <= N`; differs from the exact end count by O(1).
pub fn walk_range(signs: impl IntoIterator<Item = Sign>) -> usize {
    let mut sum = 0i64;
    let mut bounds: Option<(i64, i64)> = None;
    for s in signs {
        sum += s.value();
        bounds = Some(match bounds {
            None => (sum, sum),
            Some((lo, hi)) => (lo.min(sum), hi.max(sum)),
        });
    }
    bounds.map_or(0, |(lo, hi)| (hi - lo) as usize)
}

pub fn end_profile(window: &Window, method: ProfileMethod) -> EndProfile {
    match method {
        ProfileMethod::Stack => {
            let up = match_parentheses(window.lo, &window.signs(Half::Upper), Half::Upper);
            let dn = match_parentheses(window.lo, &window.signs(Half::Lower), Half::Lower);
            EndProfile::new(
                up.left_ends.len(),
                up.right_ends.len(),
                dn.left_ends.len(),
                dn.right_ends.len(),
            )
        }
        ProfileMethod::ClosedForm => {
            let (nl_up, nr_up) = row_ends_closed_form(window.sites.iter().map(|s| s.upper));
            let (nl_dn, nr_dn) = row_ends_closed_form(window.sites.iter().map(|s| s.lower));
            EndProfile::new(nl_up, nr_up, nl_dn, nr_dn)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPath {
    /// Sites from the end `ends.0` to the end `ends.1`.
    pub vertices: Vec<i64>,
    /// Cyclic end indices (zero-based), `ends.0 < ends.1`.
    pub ends: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub internal_cycles: Vec<Vec<i64>>,
    pub boundary_paths: Vec<BoundaryPath>,
    pub ends_in_cyclic_order: Vec<DanglingEnd>,
    pub sigma: BoundaryMatching,
}

impl Decomposition {
    pub fn profile(&self) -> EndProfile {
        let mut p = EndProfile::default();
        for e in &self.ends_in_cyclic_order {
            match (e.half, e.direction) {
                (Half::Upper, Side::Left) => p.nl_up += 1,
                (Half::Upper, Side::Right) => p.nr_up += 1,
                (Half::Lower, Side::Left) => p.nl_dn += 1,
                (Half::Lower, Side::Right) => p.nr_dn += 1,
            }
        }
        p
    }
}

/// Dangling ends in the cyclic order described in the module docs.
pub fn cyclic_ends(window: &Window) -> Vec<DanglingEnd> {
    let up = match_parentheses(window.lo, &window.signs(Half::Upper), Half::Upper);
    let dn = match_parentheses(window.lo, &window.signs(Half::Lower), Half::Lower);
    let mut ends = up.left_ends;
    ends.extend(up.right_ends);
    ends.extend(dn.right_ends.into_iter().rev());
    ends.extend(dn.left_ends.into_iter().rev());
    ends
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Incidence {
    Site(i64),
    End(usize),
}

/// Splits a window into internal cycles and end-to-end paths and reads off
/// the boundary matching the window realises.
pub fn decompose(window: &Window) -> Decomposition {
    let n = window.len();
    let lo = window.lo;
    let mates = MateTable::new(window);
    let ends = cyclic_ends(window);

    let mut end_at_up = vec![usize::MAX; n];
    let mut end_at_dn = vec![usize::MAX; n];
    for (k, e) in ends.iter().enumerate() {
        let i = (e.site - lo) as usize;
        match e.half {
            Half::Upper => end_at_up[i] = k,
            Half::Lower => end_at_dn[i] = k,
        }
    }
    let incidence = |x: i64, half: Half| -> Incidence {
        match mates.mate(x, half) {
            Some(y) => Incidence::Site(y),
            None => {
                let i = (x - lo) as usize;
                Incidence::End(match half {
                    Half::Upper => end_at_up[i],
                    Half::Lower => end_at_dn[i],
                })
            }
        }
    };

    let mut visited = vec![false; n];
    let mut mate_of_end = vec![usize::MAX; ends.len()];
    let mut boundary_paths = Vec::new();
    for (k, e) in ends.iter().enumerate() {
        if mate_of_end[k] != usize::MAX {
            continue;
        }
        let mut vertices = Vec::new();
        let mut x = e.site;
        let mut half = e.half.other();
        let last = loop {
            visited[(x - lo) as usize] = true;
            vertices.push(x);
            match incidence(x, half) {
                Incidence::Site(y) => {
                    x = y;
                    half = half.other();
                }
                Incidence::End(j) => break j,
            }
        };
        mate_of_end[k] = last;
        mate_of_end[last] = k;
        let (a, b) = if k < last { (k, last) } else { (last, k) };
        if k > last {
            vertices.reverse();
        }
        boundary_paths.push(BoundaryPath {
            vertices,
            ends: (a, b),
        });
    }

    let mut internal_cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = lo + start as i64;
        let mut half = Half::Upper;
        loop {
            visited[(x - lo) as usize] = true;
            cycle.push(x);
            match incidence(x, half) {
                Incidence::Site(y) => {
                    half = half.other();
                    if y == lo + start as i64 {
                        break;
                    }
                    x = y;
                }
                Incidence::End(_) => unreachable!("sites off boundary paths have no ends"),
            }
        }
        internal_cycles.push(cycle);
    }

    let sigma = BoundaryMatching::from_mates(mate_of_end)
        .expect("planar windows realise non-crossing boundary matchings");
    Decomposition {
        internal_cycles,
        boundary_paths,
        ends_in_cyclic_order: ends,
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Minus as M, Plus as P};

    fn win(lo: i64, up: &[i64], dn: &[i64]) -> Window {
        Window::from_rows(lo, up, dn).unwrap()
    }

    #[test]
    fn parentheses_examples() {
        assert_eq!(
            match_parentheses(1, &[], Half::Upper),
            Parenthesised::default()
        );
        let r = match_parentheses(1, &[P, M], Half::Upper);
        assert_eq!(
            r.arcs,
            vec![Arc {
                left: 1,
                right: 2,
                half: Half::Upper
            }]
        );
        assert!(r.left_ends.is_empty() && r.right_ends.is_empty());

        let r = match_parentheses(1, &[P, P, M, M, M, P], Half::Lower);
        let mut spans: Vec<_> = r.arcs.iter().map(|a| (a.left, a.right)).collect();
        spans.sort();
        assert_eq!(spans, vec![(1, 4), (2, 3)]);
        assert_eq!(
            r.left_ends.iter().map(|e| e.site).collect::<Vec<_>>(),
            vec![5]
        );
        assert_eq!(
            r.right_ends.iter().map(|e| e.site).collect::<Vec<_>>(),
            vec![6]
        );
    }

    #[test]
    fn profile_examples() {
        let w = win(1, &[1, -1], &[1, -1]);
        for m in [ProfileMethod::Stack, ProfileMethod::ClosedForm] {
            assert_eq!(end_profile(&w, m), EndProfile::new(0, 0, 0, 0));
        }
        let w = win(1, &[-1, -1, -1], &[1, -1, 1]);
        for m in [ProfileMethod::Stack, ProfileMethod::ClosedForm] {
            let p = end_profile(&w, m);
            assert_eq!((p.nl_up, p.nr_up), (3, 0));
        }
        let w = win(1, &[-1, 1], &[1, 1]);
        for m in [ProfileMethod::Stack, ProfileMethod::ClosedForm] {
            assert_eq!(end_profile(&w, m), EndProfile::new(1, 1, 0, 2));
        }
        // the range of the walk is off by one on a matched pair
        assert_eq!(walk_range([P, M]), 1);
    }

    #[test]
    fn decompose_short_loop() {
        let d = decompose(&win(1, &[1, -1], &[1, -1]));
        assert_eq!(d.internal_cycles, vec![vec![1, 2]]);
        assert!(d.boundary_paths.is_empty() && d.sigma.is_empty());
    }

    #[test]
    fn decompose_single_path() {
        let d = decompose(&win(1, &[1, -1], &[-1, 1]));
        assert!(d.internal_cycles.is_empty());
        assert_eq!(d.boundary_paths.len(), 1);
        assert_eq!(d.ends_in_cyclic_order.len(), 2);
        assert!(d.ends_in_cyclic_order.iter().all(|e| e.half == Half::Lower));
        assert_eq!(d.sigma.mates(), &[1, 0]);
    }

    #[test]
    fn decompose_circle_and_path() {
        let d = decompose(&win(1, &[1, 1, -1, -1], &[-1, 1, -1, 1]));
        assert_eq!(d.internal_cycles, vec![vec![2, 3]]);
        assert_eq!(d.boundary_paths.len(), 1);
        let mut v = d.boundary_paths[0].vertices.clone();
        v.sort();
        assert_eq!(v, vec![1, 4]);
        assert_eq!(d.sigma.to_string(), "1-2");
        assert_eq!(d.profile(), EndProfile::new(0, 0, 1, 1));
    }

    #[test]
    fn mirror_swaps_sides() {
        let w = win(3, &[-1, 1, 1], &[1, 1, -1]);
        let p = end_profile(&w, ProfileMethod::Stack);
        let q = end_profile(&w.mirror(), ProfileMethod::Stack);
        assert_eq!(
            (p.nl_up, p.nr_up, p.nl_dn, p.nr_dn),
            (q.nr_up, q.nl_up, q.nr_dn, q.nl_dn)
        );
    }

    #[test]
    fn window_json() {
        let w = win(-2, &[1, -1], &[-1, -1]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"lo":-2,"sites":[[1,-1],[-1,-1]]}"#);
        assert_eq!(serde_json::from_str::<Window>(&s).unwrap(), w);
        assert!(serde_json::from_str::<Window>(r#"{"lo":0,"sites":[[1,0]]}"#).is_err());
    }
}

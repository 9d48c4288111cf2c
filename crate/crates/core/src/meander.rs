//! Gluing two non-crossing perfect matchings of the same `2n` points.
//!
//! Upper and lower roles are distinguished: the pair `(upper, lower)` and the
//! pair `(lower, upper)` count separately. With this convention the number of
//! connected gluings of order `n` is the closed-meander count
//! `1, 2, 8, 42, 262, 1828, ...`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::noncrossing::{enumerate_ncmatchings, sample_ncmatching_with, NcMatching};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeanderError {
    #[error("matchings have different sizes ({0} and {1})")]
    SizeMismatch(usize, usize),
    #[error("order {order} is above the enumeration limit {limit}")]
    EnumerationTooLarge { order: usize, limit: usize },
    #[error("no meander after {0} tries")]
    TriesExhausted(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanderDiagram {
    pub order: usize,
    pub upper: NcMatching,
    pub lower: NcMatching,
    pub component_count: usize,
    pub connected: bool,
}

impl MeanderDiagram {
    /// The single cycle as a vertex sequence (zero-based points), starting at
    /// point 0 and leaving through the upper arc. Only meaningful when connected.
    pub fn cycle(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.upper.len());
        if self.upper.is_empty() {
            return out;
        }
        let mut x = 0;
        let mut upper = true;
        loop {
            out.push(x);
            x = if upper {
                self.upper.mate(x)
            } else {
                self.lower.mate(x)
            };
            upper = !upper;
            if x == 0 {
                break;
            }
        }
        out
    }
}

/// Number of connected components of the union graph, by union-find.
pub fn components_union_find(upper: &[usize], lower: &[usize]) -> usize {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let n = upper.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n;
    for mates in [upper, lower] {
        for (i, &m) in mates.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, m));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
    }
    count
}

/// Number of connected components from the cycles of `lower ∘ upper`: each
/// component splits into exactly two cycles of the composed permutation.
pub fn components_permutation(upper: &[usize], lower: &[usize]) -> usize {
    let n = upper.len();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = lower[upper[x]];
        }
    }
    cycles / 2
}

pub fn glue(upper: &NcMatching, lower: &NcMatching) -> Result<MeanderDiagram, MeanderError> {
    if upper.len() != lower.len() {
        return Err(MeanderError::SizeMismatch(upper.len(), lower.len()));
    }
    let component_count = components_union_find(upper.mates(), lower.mates());
    Ok(MeanderDiagram {
        order: upper.order(),
        upper: upper.clone(),
        lower: lower.clone(),
        component_count,
        connected: component_count == 1,
    })
}

pub const COUNT_SOFT_LIMIT: usize = 10;

/// Exhaustive count of connected gluings of order `n`, sharded over the upper
/// matchings. Orders above [`COUNT_SOFT_LIMIT`] need `allow_large`.
pub fn count_meanders(n: usize, allow_large: bool) -> Result<u128, MeanderError> {
    if n == 0 {
        return Err(MeanderError::InvalidArgument("order must be at least 1"));
    }
    if n > COUNT_SOFT_LIMIT && !allow_large {
        return Err(MeanderError::EnumerationTooLarge {
            order: n,
            limit: COUNT_SOFT_LIMIT,
        });
    }
    let all: Vec<NcMatching> = enumerate_ncmatchings(n).collect();
    let count = all
        .par_iter()
        .map(|up| {
            all.iter()
                .filter(|dn| components_union_find(up.mates(), dn.mates()) == 1)
                .count() as u128
        })
        .sum();
    Ok(count)
}

/// Exact distribution of the component count over all `catalan(n)^2`
/// gluings: `hist[k]` pairs have `k` components.
pub fn component_histogram(n: usize) -> Vec<u128> {
    let all: Vec<NcMatching> = enumerate_ncmatchings(n).collect();
    let mut hist = vec![0u128; n + 1];
    for up in &all {
        for dn in &all {
            hist[components_union_find(up.mates(), dn.mates())] += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanderSample {
    pub diagram: MeanderDiagram,
    pub tries: u64,
}

/// Rejection sampler: draws independent uniform pairs until one is connected.
pub fn sample_meander(n: usize, seed: u64, max_tries: u64) -> Result<MeanderSample, MeanderError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_meander_with(n, &mut rng, max_tries)
}

pub fn sample_meander_with<R: rand::Rng>(
    n: usize,
    rng: &mut R,
    max_tries: u64,
) -> Result<MeanderSample, MeanderError> {
    if n == 0 {
        return Err(MeanderError::InvalidArgument("order must be at least 1"));
    }
    if max_tries == 0 {
        return Err(MeanderError::InvalidArgument(
            "max_tries must be at least 1",
        ));
    }
    for tries in 1..=max_tries {
        let up = sample_ncmatching_with(n, rng);
        let dn = sample_ncmatching_with(n, rng);
        if components_union_find(up.mates(), dn.mates()) == 1 {
            let diagram = glue(&up, &dn).expect("same order");
            return Ok(MeanderSample { diagram, tries });
        }
    }
    Err(MeanderError::TriesExhausted(max_tries))
}

//! Superposition of two independent uniform non-crossing perfect matchings
//! of the integers.
//!
//! Every site `x` carries two independent uniform signs, one per half-plane.
//! Pairing the parentheses of each half gives a planar perfect matching, and
//! the union of the two matchings is a graph in which every vertex has degree
//! two: its clusters are finite cycles or bi-infinite paths.
//!
//! * [`window`]: finite windows, dangling ends and the boundary matching they realise.
//! * [`lazyline`]: a seeded, random-access sampler of the whole line with cluster tracing.
//! * [`noncrossing`]: finite non-crossing matchings and Catalan numbers.
//! * [`realizer`]: building windows with a prescribed boundary behaviour.
//! * [`meander`]: gluing two finite matchings; meander counting and sampling.
//! * [`stats`]: circle density, arc lengths, boundary growth and trifurcation scans.
//! * [`render`]: SVG arc diagrams.
//! * [`cli`]: the command-line front end behind the `arches` binary.

pub mod cli;
pub mod lazyline;
pub mod meander;
pub mod noncrossing;
pub mod realizer;
pub mod render;
pub mod stats;
pub mod window;

pub use lazyline::{Budget, ClusterTrace, LazyLine, TraceStatus, Truncated};
pub use noncrossing::NcMatching;
pub use window::{
    decompose, end_profile, BoundaryMatching, Decomposition, EndProfile, Half, Sign, SiteState,
    Window,
};

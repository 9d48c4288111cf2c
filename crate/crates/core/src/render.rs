//! Arc diagrams as standalone SVG.
//!
//! Sites sit on a horizontal baseline. Upper arcs are drawn above it, lower
//! arcs below, and dangling ends as rays running off the left or right edge.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::lazyline::ClusterTrace;
use crate::meander::MeanderDiagram;
use crate::window::{match_parentheses, Half, MateTable, Side, Window};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("subject has {sites} sites, more than the cap of {cap}")]
    SubjectTooLarge { sites: usize, cap: usize },
    #[error("site spacing must be positive")]
    BadSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcShape {
    Semicircle,
    Tent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub site_spacing: f64,
    pub arc_shape: ArcShape,
    /// Site whose cluster is drawn in the highlight colour.
    pub highlight: Option<i64>,
    pub show_ends: bool,
    pub max_sites: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            site_spacing: 12.0,
            arc_shape: ArcShape::Semicircle,
            highlight: None,
            show_ends: true,
            max_sites: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Window(&'a Window),
    Trace(&'a ClusterTrace),
    Meander(&'a MeanderDiagram),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Stroke {
    left: i64,
    right: i64,
    half: Half,
    highlighted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Ray {
    site: i64,
    half: Half,
    side: Side,
    /// Nesting rank among the rays of the same half and side, 0 innermost.
    rank: usize,
    highlighted: bool,
}

struct Scene {
    lo: i64,
    hi: i64,
    arcs: Vec<Stroke>,
    rays: Vec<Ray>,
    marked: Option<i64>,
}

/// Sites reachable from `x` inside `table`.
fn cluster_sites(table: &MateTable, x: i64) -> BTreeSet<i64> {
    let mut seen = BTreeSet::from([x]);
    for first in [Half::Upper, Half::Lower] {
        let (mut cur, mut half) = (x, first);
        while let Some(y) = table.mate(cur, half) {
            if !seen.insert(y) {
                break;
            }
            cur = y;
            half = half.other();
        }
    }
    seen
}

fn window_scene(w: &Window, style: &RenderStyle) -> Scene {
    let table = MateTable::new(w);
    let lit = match style.highlight {
        Some(x) if w.contains(x) => cluster_sites(&table, x),
        _ => BTreeSet::new(),
    };
    let mut arcs = Vec::new();
    let mut rays = Vec::new();
    for half in [Half::Upper, Half::Lower] {
        let p = match_parentheses(w.lo, &w.signs(half), half);
        arcs.extend(p.arcs.iter().map(|a| Stroke {
            left: a.left,
            right: a.right,
            half,
            highlighted: lit.contains(&a.left),
        }));
        if style.show_ends {
            // ends farther from their edge pass over the nearer ones
            rays.extend(p.left_ends.iter().enumerate().map(|(i, e)| Ray {
                site: e.site,
                half,
                side: Side::Left,
                rank: i,
                highlighted: lit.contains(&e.site),
            }));
            let n = p.right_ends.len();
            rays.extend(p.right_ends.iter().enumerate().map(|(i, e)| Ray {
                site: e.site,
                half,
                side: Side::Right,
                rank: n - 1 - i,
                highlighted: lit.contains(&e.site),
            }));
        }
    }
    Scene {
        lo: w.lo,
        hi: w.hi(),
        arcs,
        rays,
        marked: style.highlight.filter(|x| w.contains(*x)),
    }
}

fn trace_scene(t: &ClusterTrace) -> Scene {
    let lo = t.vertices.iter().copied().min().unwrap_or(t.origin);
    let hi = t.vertices.iter().copied().max().unwrap_or(t.origin);
    let arcs = t
        .arcs()
        .map(|(a, b, half)| Stroke {
            left: a.min(b),
            right: a.max(b),
            half,
            highlighted: true,
        })
        .collect();
    Scene {
        lo,
        hi,
        arcs,
        rays: Vec::new(),
        marked: Some(t.origin),
    }
}

fn meander_scene(d: &MeanderDiagram, style: &RenderStyle) -> Scene {
    let mut arcs = Vec::new();
    for (m, half) in [(&d.upper, Half::Upper), (&d.lower, Half::Lower)] {
        arcs.extend(m.pairs().into_iter().map(|(a, b)| Stroke {
            left: a as i64,
            right: b as i64,
            half,
            highlighted: style.highlight.is_some() && d.connected,
        }));
    }
    Scene {
        lo: 0,
        hi: d.upper.len() as i64 - 1,
        arcs,
        rays: Vec::new(),
        marked: None,
    }
}

fn fmt_num(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Renders `subject`. The SVG y axis points down: upper arcs have
/// `y <= baseline`, lower arcs `y >= baseline`.
pub fn render_svg(subject: Subject<'_>, style: &RenderStyle) -> Result<String, RenderError> {
    if style.site_spacing.is_nan() || style.site_spacing <= 0.0 {
        return Err(RenderError::BadSpacing);
    }
    let sites = match subject {
        Subject::Window(w) => w.len(),
        Subject::Trace(t) => {
            let lo = t.vertices.iter().min().copied().unwrap_or(0);
            let hi = t.vertices.iter().max().copied().unwrap_or(0);
            (hi - lo + 1) as usize
        }
        Subject::Meander(d) => d.upper.len(),
    };
    if sites > style.max_sites {
        return Err(RenderError::SubjectTooLarge {
            sites,
            cap: style.max_sites,
        });
    }
    let mut scene = match subject {
        Subject::Window(w) => window_scene(w, style),
        Subject::Trace(t) => trace_scene(t),
        Subject::Meander(d) => meander_scene(d, style),
    };
    scene.arcs.sort();
    scene.rays.sort();

    let s = style.site_spacing;
    let count = (scene.hi - scene.lo + 1).max(0) as f64;
    let max_span = scene
        .arcs
        .iter()
        .map(|a| a.right - a.left)
        .max()
        .unwrap_or(0) as f64;
    let max_rank = scene.rays.iter().map(|r| r.rank + 1).max().unwrap_or(0) as f64;
    let reach = (max_span * s / 2.0).max(max_rank * s / 2.0) + s;
    let width = (count + 1.0) * s + 2.0 * s;
    let height = 2.0 * reach;
    let base = reach;
    let x_of = |site: i64| 2.0 * s + (site - scene.lo) as f64 * s;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_num(width),
        fmt_num(height),
        fmt_num(width),
        fmt_num(height)
    );
    let _ = writeln!(
        out,
        "<!-- baseline y={}; y grows downward, upper arcs have y <= baseline -->",
        fmt_num(base)
    );
    out.push_str("<style>.arc{fill:none;stroke:#222;stroke-width:1}.hl{stroke:#c0392b;stroke-width:2}.end{stroke-dasharray:3,2}</style>\n");
    let _ = writeln!(
        out,
        r##"<line class="baseline" x1="0" y1="{b}" x2="{}" y2="{b}" stroke="#999"/>"##,
        fmt_num(width),
        b = fmt_num(base)
    );

    for a in &scene.arcs {
        let (x1, x2) = (x_of(a.left), x_of(a.right));
        let r = (x2 - x1) / 2.0;
        let d = match (style.arc_shape, a.half) {
            (ArcShape::Semicircle, Half::Upper) => {
                format!(
                    "M{} {} A{} {} 0 0 1 {} {}",
                    fmt_num(x1),
                    fmt_num(base),
                    fmt_num(r),
                    fmt_num(r),
                    fmt_num(x2),
                    fmt_num(base)
                )
            }
            (ArcShape::Semicircle, Half::Lower) => {
                format!(
                    "M{} {} A{} {} 0 0 0 {} {}",
                    fmt_num(x1),
                    fmt_num(base),
                    fmt_num(r),
                    fmt_num(r),
                    fmt_num(x2),
                    fmt_num(base)
                )
            }
            (ArcShape::Tent, half) => {
                let peak = if half == Half::Upper {
                    base - r
                } else {
                    base + r
                };
                format!(
                    "M{} {} L{} {} L{} {}",
                    fmt_num(x1),
                    fmt_num(base),
                    fmt_num(x1 + r),
                    fmt_num(peak),
                    fmt_num(x2),
                    fmt_num(base)
                )
            }
        };
        let _ = writeln!(
            out,
            r#"<path class="arc {}{}" d="{}"/>"#,
            half_name(a.half),
            if a.highlighted { " hl" } else { "" },
            d
        );
    }

    for e in &scene.rays {
        let x = x_of(e.site);
        let lift = (e.rank + 1) as f64 * s / 2.0;
        let y = if e.half == Half::Upper {
            base - lift
        } else {
            base + lift
        };
        let edge = if e.side == Side::Left { 0.0 } else { width };
        let _ = writeln!(
            out,
            r#"<path class="arc end {}{}" d="M{} {} L{} {} L{} {}"/>"#,
            half_name(e.half),
            if e.highlighted { " hl" } else { "" },
            fmt_num(x),
            fmt_num(base),
            fmt_num(x),
            fmt_num(y),
            fmt_num(edge),
            fmt_num(y)
        );
    }

    if let Some(m) = scene.marked {
        let _ = writeln!(
            out,
            r##"<circle class="origin" cx="{}" cy="{}" r="{}" fill="#c0392b"/>"##,
            fmt_num(x_of(m)),
            fmt_num(base),
            fmt_num(s / 5.0)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn half_name(h: Half) -> &'static str {
    match h {
        Half::Upper => "upper",
        Half::Lower => "lower",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazyline::LazyLine;
    use crate::window::SiteState;

    fn arc_elements(svg: &str) -> usize {
        svg.matches(r#"<path class="arc"#).count()
    }

    #[test]
    fn empty_window_is_baseline_only() {
        let svg = render_svg(
            Subject::Window(&Window::new(0, vec![])),
            &RenderStyle::default(),
        )
        .unwrap();
        assert_eq!(arc_elements(&svg), 0);
        assert_eq!(svg.matches("<line").count(), 1);
    }

    #[test]
    fn short_loop_has_two_arcs() {
        let w = Window::new(1, vec![SiteState::PLUS_PLUS, SiteState::MINUS_MINUS]);
        let svg = render_svg(Subject::Window(&w), &RenderStyle::default()).unwrap();
        assert_eq!(arc_elements(&svg), 2);
        assert_eq!(svg.matches("arc upper").count(), 1);
        assert_eq!(svg.matches("arc lower").count(), 1);
    }

    #[test]
    fn arcs_plus_ends_and_sides_of_baseline() {
        let mut line = LazyLine::new(5);
        let w = line.window(-20, 60);
        let svg = render_svg(Subject::Window(&w), &RenderStyle::default()).unwrap();
        let mut expected = 0;
        for half in [Half::Upper, Half::Lower] {
            let p = match_parentheses(w.lo, &w.signs(half), half);
            expected += p.arcs.len() + p.left_ends.len() + p.right_ends.len();
        }
        assert_eq!(arc_elements(&svg), expected);

        let base: f64 = svg
            .split("baseline y=")
            .nth(1)
            .and_then(|r| r.split(';').next())
            .unwrap()
            .parse()
            .unwrap();
        for style in [ArcShape::Semicircle, ArcShape::Tent] {
            let svg = render_svg(
                Subject::Window(&w),
                &RenderStyle {
                    arc_shape: style,
                    ..Default::default()
                },
            )
            .unwrap();
            for line in svg.lines().filter(|l| l.starts_with("<path")) {
                let d = line.split("d=\"").nth(1).unwrap().trim_end_matches("\"/>");
                let nums: Vec<f64> = d
                    .split(|c: char| c.is_ascii_alphabetic() || c == ' ')
                    .filter_map(|t| t.parse().ok())
                    .collect();
                // y coordinates of M and L points; arc radii are excluded for semicircles
                let ys: Vec<f64> = if d.contains('A') {
                    vec![nums[1], nums[nums.len() - 1]]
                } else {
                    nums.iter().skip(1).step_by(2).copied().collect()
                };
                for y in ys {
                    if line.contains("upper") {
                        assert!(y <= base);
                    } else {
                        assert!(y >= base);
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_and_capped() {
        let mut line = LazyLine::new(9);
        let w = line.window(0, 100);
        let style = RenderStyle {
            highlight: Some(50),
            ..Default::default()
        };
        assert_eq!(
            render_svg(Subject::Window(&w), &style),
            render_svg(Subject::Window(&w), &style)
        );
        let small = RenderStyle {
            max_sites: 10,
            ..Default::default()
        };
        assert_eq!(
            render_svg(Subject::Window(&w), &small),
            Err(RenderError::SubjectTooLarge {
                sites: 100,
                cap: 10
            })
        );
    }
}

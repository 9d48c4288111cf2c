// Arc diagrams of a window, a traced cluster and a meander, written as SVG
// files into the system temporary directory.

use arches::meander::sample_meander;
use arches::render::{render_svg, ArcShape, RenderStyle, Subject};
use arches::{Budget, LazyLine};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir();
    let mut line = LazyLine::new(3);
    let w = line.window(0, 48);
    let style = RenderStyle {
        highlight: Some(24),
        ..Default::default()
    };
    let t = line.trace_cluster(24, Budget::new(200, 10_000));
    let m = sample_meander(6, 1, 100_000)?.diagram;
    let tent = RenderStyle {
        arc_shape: ArcShape::Tent,
        ..Default::default()
    };
    for (name, subject, style) in [
        ("window.svg", Subject::Window(&w), &style),
        ("trace.svg", Subject::Trace(&t), &tent),
        ("meander.svg", Subject::Meander(&m), &RenderStyle::default()),
    ] {
        let svg = render_svg(subject, style)?;
        let path = dir.join(format!("arches-{name}"));
        std::fs::write(&path, &svg)?;
        println!("{} ({} bytes)", path.display(), svg.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

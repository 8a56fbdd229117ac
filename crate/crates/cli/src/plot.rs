//! Deterministic SVG 1.1 figures.

use std::fmt::Write as _;

use clap::ValueEnum;
use planar_geodesy::ambiguity::{fundamental_circles, FundamentalCircles, RegionLabel, RegionSignature};
use planar_geodesy::geometry::GeneralizedCircle;
use planar_geodesy::{Configuration, PlanarPoint, SolutionKind};
use serde::{Deserialize, Serialize};

use crate::schema::{file_kind, FileKind, ScenarioFile, SolutionReportFile};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Targets, measure points and sight lines.
    Config,
    /// The first four targets, their circumscribed circles and the
    /// quadrilateral of circle centers.
    Twin,
    /// Fundamental circles with every region shaded by its signature.
    CirclesRegions,
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 24.0;
const GRID: usize = 160;

const PALETTE: [&str; 12] = [
    "#e8d5b7", "#b8d8e8", "#c9e4c5", "#f2c4ce", "#d9c8ef", "#f6e3a1", "#bfe3df", "#f3cfb0", "#d6d6d6", "#c4d4f2",
    "#e6f0b5", "#efc7e5",
];
const INNER: &str = "#e4572e";

/// World-to-canvas transform with `y` pointing up.
struct View {
    lo: PlanarPoint,
    scale: f64,
    height: f64,
}

impl View {
    fn new(lo: PlanarPoint, hi: PlanarPoint) -> Self {
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let height = (hi.y - lo.y) * scale + 2.0 * MARGIN;
        Self { lo, scale, height }
    }

    fn fit(pts: &[PlanarPoint], pad: f64) -> Self {
        let lo = PlanarPoint::new(pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min), pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min));
        let hi = PlanarPoint::new(pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max), pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max));
        let d = pad * (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        Self::new(PlanarPoint::new(lo.x - d, lo.y - d), PlanarPoint::new(hi.x + d, hi.y + d))
    }

    fn x(&self, p: &PlanarPoint) -> f64 {
        MARGIN + (p.x - self.lo.x) * self.scale
    }

    fn y(&self, p: &PlanarPoint) -> f64 {
        self.height - MARGIN - (p.y - self.lo.y) * self.scale
    }

    fn width(&self) -> f64 {
        SIZE
    }
}

struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(view: &View) -> Self {
        Self { body: String::new(), width: view.width(), height: view.height }
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<title>{title}</title>\n<rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }

    fn line(&mut self, v: &View, a: &PlanarPoint, b: &PlanarPoint, style: &str) {
        let _ = writeln!(self.body, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {style}/>", v.x(a), v.y(a), v.x(b), v.y(b));
    }

    fn polygon(&mut self, v: &View, pts: &[PlanarPoint], style: &str) {
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", v.x(p), v.y(p))).collect();
        let _ = writeln!(self.body, "<polygon points=\"{}\" {style}/>", coords.join(" "));
    }

    fn dot(&mut self, v: &View, p: &PlanarPoint, r: f64, fill: &str) {
        let _ = writeln!(self.body, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{fill}\"/>", v.x(p), v.y(p));
    }

    fn square(&mut self, v: &View, p: &PlanarPoint, s: f64, fill: &str) {
        let _ = writeln!(self.body, "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{s}\" height=\"{s}\" fill=\"{fill}\"/>", v.x(p) - s / 2.0, v.y(p) - s / 2.0);
    }

    fn label(&mut self, v: &View, p: &PlanarPoint, text: &str) {
        let _ = writeln!(self.body, "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"serif\" font-size=\"14\">{text}</text>", v.x(p) + 6.0, v.y(p) - 6.0);
    }

    fn text(&mut self, x: f64, y: f64, text: &str) {
        let _ = writeln!(self.body, "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\">{text}</text>");
    }

    fn circle(&mut self, v: &View, c: &GeneralizedCircle, style: &str) {
        if let (Some(ctr), Some(r)) = (c.center(), c.radius()) {
            let _ = writeln!(self.body, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" {style}/>", v.x(&ctr), v.y(&ctr), r * v.scale);
        }
    }
}

fn sub(i: usize) -> String {
    format!("{}", i + 1)
}

fn config_svg(cfg: &Configuration) -> String {
    let view = View::fit(&cfg.all_points(), 0.12);
    let mut svg = Svg::new(&view);
    for q in &cfg.measures {
        for p in &cfg.targets {
            svg.line(&view, q, p, "stroke=\"#9aa5b1\" stroke-width=\"0.8\"");
        }
    }
    for (i, p) in cfg.targets.iter().enumerate() {
        svg.dot(&view, p, 4.5, "#1f3a93");
        svg.label(&view, p, &format!("p{}", sub(i)));
    }
    for (j, q) in cfg.measures.iter().enumerate() {
        svg.square(&view, q, 8.0, "#c0392b");
        svg.label(&view, q, &format!("q{}", sub(j)));
    }
    svg.finish("configuration")
}

fn quad_of(cfg: &Configuration) -> Result<[PlanarPoint; 4], CliError> {
    if cfg.t() < 4 {
        return Err(CliError::Invalid(format!("need at least 4 targets, got {}", cfg.t())));
    }
    Ok([cfg.targets[0], cfg.targets[1], cfg.targets[2], cfg.targets[3]])
}

fn circles_of(quad: &[PlanarPoint; 4]) -> Result<FundamentalCircles, CliError> {
    fundamental_circles(quad).map_err(|e| CliError::Invalid(format!("no fundamental circles: {e}")))
}

fn twin_svg(cfg: &Configuration) -> Result<String, CliError> {
    let quad = quad_of(cfg)?;
    let fc = circles_of(&quad)?;
    let centers: Vec<PlanarPoint> = fc.circles.iter().filter_map(GeneralizedCircle::center).collect();
    let mut all = quad.to_vec();
    all.extend(&centers);
    for c in &fc.circles {
        if let (Some(o), Some(r)) = (c.center(), c.radius()) {
            all.extend([PlanarPoint::new(o.x - r, o.y - r), PlanarPoint::new(o.x + r, o.y + r)]);
        }
    }
    let view = View::fit(&all, 0.05);
    let mut svg = Svg::new(&view);
    for c in &fc.circles {
        svg.circle(&view, c, "stroke=\"#7f8c8d\" stroke-width=\"1\"");
    }
    svg.polygon(&view, &quad, "fill=\"none\" stroke=\"#1f3a93\" stroke-width=\"2\"");
    svg.polygon(&view, &centers, "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6 4\"");
    for (i, p) in quad.iter().enumerate() {
        svg.dot(&view, p, 4.5, "#1f3a93");
        svg.label(&view, p, &format!("p{}", sub(i)));
    }
    for (i, c) in centers.iter().enumerate() {
        svg.dot(&view, c, 4.5, "#c0392b");
        svg.label(&view, c, &format!("p'{}", sub(i)));
    }
    Ok(svg.finish("quadrilateral and twin"))
}

fn regions_svg(cfg: &Configuration) -> Result<String, CliError> {
    let quad = quad_of(cfg)?;
    let fc = circles_of(&quad)?;
    let (lo, hi) = fc.bounding_box();
    let view = View::new(lo, hi);
    let mut svg = Svg::new(&view);
    let signatures: Vec<RegionSignature> = fc.realized_signatures(200).into_iter().collect();
    let color = |sig: &RegionSignature| {
        if fc.label(sig) == RegionLabel::Inner {
            INNER
        } else {
            PALETTE[signatures.iter().position(|s| s == sig).unwrap_or(0) % PALETTE.len()]
        }
    };
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let cell = span / GRID as f64;
    let rows = ((hi.y - lo.y) / cell).ceil() as usize;
    let cols = ((hi.x - lo.x) / cell).ceil() as usize;
    for r in 0..rows {
        let y = lo.y + (r as f64 + 0.5) * cell;
        let mut c = 0;
        while c < cols {
            let at = |c: usize| fc.signature(&PlanarPoint::new(lo.x + (c as f64 + 0.5) * cell, y)).ok();
            let Some(sig) = at(c) else {
                c += 1;
                continue;
            };
            let start = c;
            while c + 1 < cols && at(c + 1) == Some(sig) {
                c += 1;
            }
            c += 1;
            let corner = PlanarPoint::new(lo.x + start as f64 * cell, y + 0.5 * cell);
            let _ = writeln!(
                svg.body,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\" shape-rendering=\"crispEdges\"/>",
                view.x(&corner),
                view.y(&corner),
                (c - start) as f64 * cell * view.scale,
                cell * view.scale,
                color(&sig)
            );
        }
    }
    for c in &fc.circles {
        svg.circle(&view, c, "stroke=\"#2c3e50\" stroke-width=\"1.2\"");
    }
    svg.polygon(&view, &quad, "fill=\"none\" stroke=\"#1f3a93\" stroke-width=\"1\" stroke-dasharray=\"3 3\"");
    for (i, p) in quad.iter().enumerate() {
        svg.dot(&view, p, 4.0, "#1f3a93");
        svg.label(&view, p, &format!("p{}", sub(i)));
    }
    let mut y = 16.0;
    svg.text(8.0, y, &format!("{} regions", signatures.len()));
    for sig in &signatures {
        y += 15.0;
        let bits: String = sig.0.iter().map(|b| if *b { '1' } else { '0' }).collect();
        let label = match fc.label(sig) {
            RegionLabel::Inner => "inner",
            RegionLabel::Bounded => "bounded",
            RegionLabel::Unbounded => "unbounded",
        };
        let _ = writeln!(svg.body, "<rect x=\"8\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{}\" stroke=\"#555\"/>", y - 9.0, color(sig));
        svg.text(22.0, y, &format!("{bits} {label}"));
    }
    Ok(svg.finish("fundamental circles and regions"))
}

/// Configuration drawn from a scenario or solution report.
fn configuration_from(text: &str) -> Result<Configuration, CliError> {
    match file_kind(text)? {
        FileKind::Scenario => serde_json::from_str::<ScenarioFile>(text)?.configuration(),
        FileKind::SolutionReport => {
            let report: SolutionReportFile = serde_json::from_str(text)?;
            report.validate()?;
            match report.solutions.first() {
                Some(s) => s.configuration(),
                None if report.solution_kind == SolutionKind::Infinite => {
                    Err(CliError::UnplottableReport("infinite solution set without a sample solution".into()))
                }
                None => Err(CliError::UnplottableReport(format!("{} report has no solutions", report.solution_kind))),
            }
        }
        other => Err(CliError::Invalid(format!("cannot plot a {other:?} file"))),
    }
}

/// SVG text for a scenario or solution report file.
pub fn plot(text: &str, kind: PlotKind) -> Result<String, CliError> {
    let cfg = configuration_from(text)?;
    match kind {
        PlotKind::Config => Ok(config_svg(&cfg)),
        PlotKind::Twin => twin_svg(&cfg),
        PlotKind::CirclesRegions => regions_svg(&cfg),
    }
}

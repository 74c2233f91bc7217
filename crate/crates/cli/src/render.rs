use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context;
use sepcover::instance::read_json;
use sepcover::{dual_cutting, dualize, CoverageInstance, Solution, SolverConfig};

use crate::emit;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, short)]
    input: PathBuf,
    /// Solution JSON whose chosen disks get highlighted.
    #[arg(long, short)]
    solution: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Draw the dual plane (disks around the points, disk centers as points).
    #[arg(long)]
    dual: bool,
    /// Draw the cells of the fast solver's cutting; implies --dual.
    #[arg(long)]
    show_cutting: bool,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 800.0)]
    width: f64,
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        (x - self.x0) * self.scale
    }
    fn py(&self, y: f64) -> f64 {
        (self.y1 - y) * self.scale
    }
}

/// Bounding box of the instance padded by one radius.
fn view(inst: &CoverageInstance) -> (f64, f64, f64, f64) {
    let r = inst.radius;
    let all = inst.points.iter().chain(inst.disks.iter().map(|d| &d.center));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        return (-r, -r, r, r);
    }
    (x0 - r, y0.min(0.0) - r, x1 + r, y1.max(0.0) + r)
}

fn marker(s: &mut String, f: &Frame, x: f64, y: f64, class: &str) {
    let _ = writeln!(s, r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="4" height="4"/>"#, f.px(x) - 2.0, f.py(y) - 2.0);
}

fn style() -> &'static str {
    "<style>.disk{fill:none;stroke:#888;stroke-width:0.8}.disk.chosen{stroke:#d62728;stroke-width:2}\
.point{fill:#1f77b4}.dual-point{fill:#2ca02c}.separator{stroke:#000;stroke-width:1}</style>\n"
}

fn render_primal(inst: &CoverageInstance, chosen: &[usize], width: f64) -> String {
    let (x0, y0, x1, y1) = view(inst);
    let f = Frame { x0, y1, scale: width / (x1 - x0) };
    let height = (y1 - y0) * f.scale;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#);
    s.push_str(style());
    let _ = writeln!(s, r#"<line class="separator" x1="0" y1="{0:.2}" x2="{width:.1}" y2="{0:.2}"/>"#, f.py(0.0));
    for (i, d) in inst.disks.iter().enumerate() {
        let class = if chosen.contains(&i) { "disk chosen" } else { "disk" };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" data-id="{i}" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
            f.px(d.center.x),
            f.py(d.center.y),
            inst.radius * f.scale
        );
    }
    for p in &inst.points {
        marker(&mut s, &f, p.x, p.y, "point");
    }
    s.push_str("</svg>\n");
    s
}

fn render_dual(inst: &CoverageInstance, cutting: bool, cfg: &SolverConfig, width: f64) -> anyhow::Result<String> {
    let dual = dualize(inst);
    let (x0, _, x1, _) = view(inst);
    let r = inst.radius;
    let lowest = dual.points.iter().map(|p| p.y).fold(0.0f64, f64::min);
    let box_ = (x0, (lowest - 0.25 * r).min(-r), x1, 0.25 * r);
    let f = Frame { x0: box_.0, y1: box_.3, scale: width / (box_.2 - box_.0) };
    let mut s = if cutting {
        let cut = dual_cutting(inst, cfg)?;
        cut.to_svg(box_, width)
    } else {
        let height = (box_.3 - box_.1) * f.scale;
        format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#) + "\n</svg>\n"
    };
    let close = s.rfind("</svg>").expect("svg document");
    s.truncate(close);
    s.push_str(style());
    let _ = writeln!(s, r#"<line class="separator" x1="0" y1="{0:.2}" x2="{width:.1}" y2="{0:.2}"/>"#, f.py(0.0));
    for (i, c) in dual.disk_centers.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<circle class="disk dual" data-rank="{i}" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
            f.px(c.x),
            f.py(c.y),
            r * f.scale
        );
    }
    for q in &dual.points {
        marker(&mut s, &f, q.x, q.y, "dual-point");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn run(a: Args) -> anyhow::Result<u8> {
    let inst: CoverageInstance = read_json(&a.input).with_context(|| format!("reading instance {}", a.input.display()))?;
    sepcover::instance::check_structure(&inst)?;
    let chosen = match &a.solution {
        Some(p) => {
            let sol: Solution = read_json(p).with_context(|| format!("reading solution {}", p.display()))?;
            if let Some(&bad) = sol.chosen.iter().find(|&&d| d >= inst.m()) {
                anyhow::bail!("solution refers to disk {bad} but the instance has {}", inst.m());
            }
            sol.chosen
        }
        None => Vec::new(),
    };
    if !(a.width > 0.0 && a.width.is_finite()) {
        anyhow::bail!("--width must be positive");
    }
    let svg = if a.dual || a.show_cutting {
        let cfg = SolverConfig { r: a.r, seed: a.seed, ..Default::default() };
        render_dual(&inst, a.show_cutting, &cfg, a.width)?
    } else {
        render_primal(&inst, &chosen, a.width)
    };
    emit(a.out.as_deref(), &svg)?;
    Ok(0)
}

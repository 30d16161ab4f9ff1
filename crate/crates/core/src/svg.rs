//! SVG 1.1 rendering of a scene, its partition, and a planner result.
//!
//! Tree edges are blue, the feasible path red, the smoothed path green. Every
//! element carries a class naming its layer.

use std::fmt::Write;

use crate::geometry::Point2;
use crate::partition::{Partition, RegionGraph};
use crate::planner_core::{Path, PlanResult};
use crate::scalar::Scalar;
use crate::scene::{Obstacle, Scene};

const PX_PER_METER: f64 = 20.0;

struct Canvas {
    height: f64,
    out: String,
}

impl Canvas {
    fn x<T: Scalar>(&self, v: T) -> String {
        format!("{:.3}", v.as_f64() * PX_PER_METER)
    }

    fn y<T: Scalar>(&self, v: T) -> String {
        format!("{:.3}", (self.height - v.as_f64()) * PX_PER_METER)
    }

    fn len<T: Scalar>(&self, v: T) -> String {
        format!("{:.3}", v.as_f64() * PX_PER_METER)
    }

    fn pt<T: Scalar>(&self, p: &Point2<T>) -> String {
        format!("{},{}", self.x(p.x), self.y(p.y))
    }

    fn rect<T: Scalar>(&mut self, class: &str, min: &Point2<T>, max: &Point2<T>) {
        let _ = writeln!(
            self.out,
            r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}"/>"#,
            self.x(min.x),
            self.y(max.y),
            self.len(max.x - min.x),
            self.len(max.y - min.y)
        );
    }

    fn line<T: Scalar>(&mut self, class: &str, a: &Point2<T>, b: &Point2<T>) {
        let _ = writeln!(
            self.out,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            self.x(a.x),
            self.y(a.y),
            self.x(b.x),
            self.y(b.y)
        );
    }

    fn polyline<T: Scalar>(&mut self, class: &str, path: &Path<T>) {
        let points: Vec<String> = path.waypoints.iter().map(|p| self.pt(p)).collect();
        let _ = writeln!(self.out, r#"<polyline class="{class}" points="{}"/>"#, points.join(" "));
    }
}

/// Deterministic SVG document; any layer may be omitted.
pub fn render_svg<T: Scalar>(
    scene: &Scene<T>,
    partition: Option<&Partition<T>>,
    graph: Option<&RegionGraph<T>>,
    result: Option<&PlanResult<T>>,
) -> String {
    let w = scene.width.as_f64() * PX_PER_METER;
    let h = scene.height.as_f64() * PX_PER_METER;
    let mut c = Canvas { height: scene.height.as_f64(), out: String::new() };
    let _ = writeln!(c.out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    c.out.push_str(concat!(
        "<style>\n",
        ".workspace{fill:white;stroke:black;stroke-width:2}\n",
        ".obstacle{fill:#555;stroke:none}\n",
        ".group{fill:none;stroke:#999;stroke-width:1}\n",
        ".region{stroke:orange;stroke-width:2}\n",
        ".tree{stroke:blue;stroke-width:1}\n",
        ".feasible{fill:none;stroke:red;stroke-width:2}\n",
        ".smoothed{fill:none;stroke:green;stroke-width:2}\n",
        ".start{fill:black}\n",
        ".goal{fill:magenta}\n",
        "</style>\n",
    ));

    let origin = Point2::new(T::zero(), T::zero());
    c.rect("workspace", &origin, &Point2::new(scene.width, scene.height));
    for obstacle in &scene.obstacles {
        match obstacle {
            Obstacle::Rect { min, max } => c.rect("obstacle", min, max),
            Obstacle::Circle { center, radius } => {
                let _ = writeln!(
                    c.out,
                    r#"<circle class="obstacle" cx="{}" cy="{}" r="{}"/>"#,
                    c.x(center.x),
                    c.y(center.y),
                    c.len(*radius)
                );
            }
            Obstacle::Polygon { vertices } => {
                let points: Vec<String> = vertices.iter().map(|p| c.pt(p)).collect();
                let _ = writeln!(c.out, r#"<polygon class="obstacle" points="{}"/>"#, points.join(" "));
            }
        }
    }
    if let Some(partition) = partition {
        for id in 0..partition.len() {
            let r = partition.group_rect(id);
            c.rect("group", &r.min, &r.max);
        }
    }
    if let Some(graph) = graph {
        for region in &graph.regions {
            c.line("region", &region.segment.0, &region.segment.1);
        }
    }
    if let Some(result) = result {
        for (a, b) in result.tree.edges() {
            c.line("tree", &a, &b);
        }
        c.polyline("feasible", &result.feasible_path);
        if let Some(smoothed) = &result.smoothed_path {
            c.polyline("smoothed", smoothed);
        }
    }
    for (class, p) in [("start", &scene.start), ("goal", &scene.goal)] {
        let _ = writeln!(c.out, r#"<circle class="{class}" cx="{}" cy="{}" r="4"/>"#, c.x(p.x), c.y(p.y));
    }
    c.out.push_str("</svg>\n");
    c.out
}

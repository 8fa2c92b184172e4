/*
Copyright 2026 The smlr Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
//! Roadmap export: plain-text graph tables and SVG figures of 2D levels.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::roadmap::SparseRoadmap;
use crate::space::{AxisKind, State};
use crate::validity::LevelValidity;

/// Writes `id c0 c1 ...` per guard.
pub fn write_vertex_table<W: io::Write>(roadmap: &SparseRoadmap, mut w: W) -> io::Result<()> {
    for (id, g) in roadmap.guards().iter().enumerate() {
        write!(w, "{id}")?;
        for c in g.coords() {
            write!(w, " {c}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes `u v length` per edge.
pub fn write_edge_list<W: io::Write>(roadmap: &SparseRoadmap, mut w: W) -> io::Result<()> {
    for e in roadmap.edges() {
        writeln!(w, "{} {} {}", e.u, e.w, e.length)?;
    }
    Ok(())
}

/// Writes `level<k>_vertices.txt` and `level<k>_edges.txt` into `dir` and
/// returns their paths.
pub fn export_graph(roadmap: &SparseRoadmap, level: usize, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    let io_err = |e: io::Error| Error::Parse(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let vpath = dir.join(format!("level{level}_vertices.txt"));
    let epath = dir.join(format!("level{level}_edges.txt"));
    write_vertex_table(roadmap, io::BufWriter::new(std::fs::File::create(&vpath).map_err(io_err)?)).map_err(io_err)?;
    write_edge_list(roadmap, io::BufWriter::new(std::fs::File::create(&epath).map_err(io_err)?)).map_err(io_err)?;
    Ok((vpath, epath))
}

const SIZE: f64 = 600.0;
const OCCUPANCY_CELLS: usize = 150;

/// SVG drawing of a 2D level: occupied states shaded, then samples, roadmap
/// edges, guards, a path and the endpoints. Periodic axes get dashed borders
/// and edges crossing them are split at the wrap.
pub struct SvgFigure<'a> {
    validity: &'a LevelValidity,
    lo: [f64; 2],
    span: [f64; 2],
    periodic: [bool; 2],
    body: String,
}

impl<'a> SvgFigure<'a> {
    pub fn new(validity: &'a LevelValidity) -> Result<Self> {
        let axes = validity.space().axes();
        if axes.len() != 2 {
            return Err(Error::UnsupportedDimension(axes.len()));
        }
        let mut fig = SvgFigure {
            validity,
            lo: [axes[0].lower(), axes[1].lower()],
            span: [axes[0].span(), axes[1].span()],
            periodic: [matches!(axes[0].kind, AxisKind::Periodic), matches!(axes[1].kind, AxisKind::Periodic)],
            body: String::new(),
        };
        fig.occupancy();
        Ok(fig)
    }

    fn px(&self, x: &[f64]) -> (f64, f64) {
        let u = (x[0] - self.lo[0]) / self.span[0] * SIZE;
        let v = SIZE - (x[1] - self.lo[1]) / self.span[1] * SIZE;
        (u, v)
    }

    fn occupancy(&mut self) {
        let n = OCCUPANCY_CELLS;
        let (cw, ch) = (SIZE / n as f64, SIZE / n as f64);
        let _ = writeln!(self.body, "<g fill=\"#9a9a9a\" stroke=\"none\">");
        for j in 0..n {
            let y = self.lo[1] + (j as f64 + 0.5) / n as f64 * self.span[1];
            let mut run: Option<usize> = None;
            for i in 0..=n {
                let occupied = i < n && {
                    let x = self.lo[0] + (i as f64 + 0.5) / n as f64 * self.span[0];
                    !self.validity.is_valid(&State::from_vec(vec![x, y]))
                };
                match (occupied, run) {
                    (true, None) => run = Some(i),
                    (false, Some(s)) => {
                        let _ = writeln!(
                            self.body,
                            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
                            s as f64 * cw,
                            SIZE - (j + 1) as f64 * ch,
                            (i - s) as f64 * cw,
                            ch
                        );
                        run = None;
                    }
                    _ => {}
                }
            }
        }
        let _ = writeln!(self.body, "</g>");
    }

    /// Polyline pieces of the geodesic from `a` to `b`, cut where it wraps.
    fn geodesic(&self, a: &State, b: &State) -> Vec<Vec<(f64, f64)>> {
        let space = self.validity.space();
        let steps = if self.periodic.iter().any(|&p| p) { 32 } else { 1 };
        let mut pieces = vec![Vec::new()];
        let mut prev: Option<State> = None;
        for i in 0..=steps {
            let x = space.interp(a, b, i as f64 / steps as f64);
            if let Some(p) = &prev {
                let jump = (0..2).any(|d| (x.coords()[d] - p.coords()[d]).abs() > self.span[d] / 2.0);
                if jump {
                    pieces.push(Vec::new());
                }
            }
            pieces.last_mut().expect("piece").push(self.px(x.coords()));
            prev = Some(x);
        }
        pieces.retain(|p| p.len() > 1);
        pieces
    }

    fn polylines(&mut self, a: &State, b: &State, style: &str) {
        for piece in self.geodesic(a, b) {
            let pts: Vec<String> = piece.iter().map(|(u, v)| format!("{u:.2},{v:.2}")).collect();
            let _ = writeln!(self.body, "<polyline points=\"{}\" {style}/>", pts.join(" "));
        }
    }

    pub fn samples(&mut self, samples: &[State]) -> &mut Self {
        let _ = writeln!(self.body, "<g fill=\"#e07b39\" fill-opacity=\"0.5\">");
        for s in samples {
            let (u, v) = self.px(s.coords());
            let _ = writeln!(self.body, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"1.2\"/>");
        }
        let _ = writeln!(self.body, "</g>");
        self
    }

    pub fn roadmap(&mut self, roadmap: &SparseRoadmap) -> &mut Self {
        let guards = roadmap.guards();
        for e in roadmap.edges() {
            self.polylines(&guards[e.u], &guards[e.w], "fill=\"none\" stroke=\"#2f5d8a\" stroke-width=\"1\"");
        }
        let _ = writeln!(self.body, "<g fill=\"#2f5d8a\">");
        for g in guards {
            let (u, v) = self.px(g.coords());
            let _ = writeln!(self.body, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"2.5\"/>");
        }
        let _ = writeln!(self.body, "</g>");
        self
    }

    pub fn path(&mut self, path: &[State]) -> &mut Self {
        for w in path.windows(2) {
            self.polylines(&w[0], &w[1], "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"3\"");
        }
        self
    }

    pub fn endpoints(&mut self, start: &State, goal: &State) -> &mut Self {
        for (x, colour) in [(start, "#27ae60"), (goal, "#8e44ad")] {
            let (u, v) = self.px(x.coords());
            let _ = writeln!(self.body, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"6\" fill=\"{colour}\"/>");
        }
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
        );
        let _ = writeln!(out, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
        out.push_str(&self.body);
        // borders: solid for bounded axes, dashed wrap markers for periodic ones
        let border = |periodic: bool| {
            if periodic {
                "stroke=\"#555\" stroke-width=\"2\" stroke-dasharray=\"8 6\" class=\"wrap\""
            } else {
                "stroke=\"#000\" stroke-width=\"2\""
            }
        };
        let _ = writeln!(out, "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"{SIZE}\" {}/>", border(self.periodic[0]));
        let _ = writeln!(out, "<line x1=\"{SIZE}\" y1=\"0\" x2=\"{SIZE}\" y2=\"{SIZE}\" {}/>", border(self.periodic[0]));
        let _ = writeln!(out, "<line x1=\"0\" y1=\"0\" x2=\"{SIZE}\" y2=\"0\" {}/>", border(self.periodic[1]));
        let _ = writeln!(out, "<line x1=\"0\" y1=\"{SIZE}\" x2=\"{SIZE}\" y2=\"{SIZE}\" {}/>", border(self.periodic[1]));
        out.push_str("</svg>\n");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.render()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Draws one level's roadmap with an optional solution path.
pub fn export_svg(
    validity: &LevelValidity,
    roadmap: &SparseRoadmap,
    path: Option<&[State]>,
    out: impl AsRef<Path>,
) -> Result<()> {
    let mut fig = SvgFigure::new(validity)?;
    fig.roadmap(roadmap);
    if let Some(p) = path {
        fig.path(p);
    }
    if roadmap.vertex_count() >= 2 {
        fig.endpoints(&roadmap.guards()[0], &roadmap.guards()[1]);
    }
    fig.save(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::StateSpace;
    use crate::validity::{Obstacle, PoseAxis, RobotModel, Workspace};

    fn plane() -> LevelValidity {
        let space = StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let robot = RobotModel::Point { position: vec![PoseAxis::Coord(0), PoseAxis::Coord(1)] };
        let obs = vec![Obstacle::aabb(vec![0.4, 0.4], vec![0.6, 0.6]).unwrap()];
        let ws = Workspace::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        LevelValidity::new(space, robot, Arc::new(obs), Arc::new(ws), 0.01).unwrap()
    }

    #[test]
    fn triangle_tables() {
        let v = plane();
        let mut g = SparseRoadmap::new(v.space().clone(), 0.5, 3.0);
        for c in [[0.1, 0.1], [0.3, 0.1], [0.1, 0.3]] {
            g.add_guard(State::from_vec(c.to_vec()));
        }
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 0).unwrap();
        let mut vt = Vec::new();
        write_vertex_table(&g, &mut vt).unwrap();
        assert_eq!(String::from_utf8(vt).unwrap(), "0 0.1 0.1\n1 0.3 0.1\n2 0.1 0.3\n");
        let mut et = Vec::new();
        write_edge_list(&g, &mut et).unwrap();
        let text = String::from_utf8(et).unwrap();
        assert_eq!(text.lines().count(), 3);
        for line in text.lines() {
            let f: Vec<&str> = line.split(' ').collect();
            let (u, w): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
            let len: f64 = f[2].parse().unwrap();
            assert_eq!(len, v.space().dist(&g.guards()[u], &g.guards()[w]));
        }
    }

    #[test]
    fn svg_draws_obstacle_and_rejects_3d() {
        let v = plane();
        let mut g = SparseRoadmap::new(v.space().clone(), 0.5, 3.0);
        g.add_guard(State::from_vec(vec![0.1, 0.1]));
        g.add_guard(State::from_vec(vec![0.9, 0.9]));
        let mut fig = SvgFigure::new(&v).unwrap();
        fig.roadmap(&g).endpoints(&g.guards()[0], &g.guards()[1]);
        let svg = fig.render();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<rect x="));
        assert!(!svg.contains("class=\"wrap\""));

        let space = StateSpace::real_vector(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let robot = RobotModel::Point { position: (0..3).map(PoseAxis::Coord).collect() };
        let ws = Workspace::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let v3 = LevelValidity::new(space, robot, Arc::new(Vec::new()), Arc::new(ws), 0.01).unwrap();
        assert!(matches!(SvgFigure::new(&v3), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn torus_edges_split_at_wrap() {
        let space = StateSpace::product(vec![StateSpace::circle(), StateSpace::circle()]).unwrap();
        let robot = RobotModel::Point { position: vec![PoseAxis::Coord(0), PoseAxis::Coord(1)] };
        let ws = Workspace::new(vec![-0.1, -0.1], vec![6.4, 6.4]).unwrap();
        let v = LevelValidity::new(space.clone(), robot, Arc::new(Vec::new()), Arc::new(ws), 0.01).unwrap();
        let mut g = SparseRoadmap::new(space, 1.0, 3.0);
        g.add_guard(State::from_vec(vec![0.1, 3.0]));
        g.add_guard(State::from_vec(vec![6.2, 3.0]));
        g.add_edge(0, 1).unwrap();
        let mut fig = SvgFigure::new(&v).unwrap();
        fig.roadmap(&g);
        let svg = fig.render();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("class=\"wrap\"").count(), 4);
    }
}

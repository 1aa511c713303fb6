//! VTK legacy ASCII polydata and tabular (CSV / JSON) output.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::dfn::{FractureNetwork, NetworkSolution};
use crate::error::{Error, Result};
use crate::mesh::PolygonalMesh;
use crate::quality;

/// Polygons in 3D with per-cell and per-point scalar fields.
#[derive(Debug, Clone, Default)]
pub struct VtkPolyData {
    pub points: Vec<[f64; 3]>,
    pub polygons: Vec<Vec<usize>>,
    pub cell_data: Vec<(String, Vec<f64>)>,
    pub point_data: Vec<(String, Vec<f64>)>,
}

impl VtkPolyData {
    pub fn from_mesh(mesh: &PolygonalMesh) -> Self {
        VtkPolyData {
            points: mesh.vertices.iter().map(|v| [v.position.x, v.position.y, 0.0]).collect(),
            polygons: mesh.cell_loops(),
            ..Default::default()
        }
    }

    pub fn with_cell_data(mut self, name: &str, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.polygons.len(), "cell field '{name}' has the wrong length");
        self.cell_data.push((name.to_string(), values));
        self
    }

    pub fn with_point_data(mut self, name: &str, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.points.len(), "point field '{name}' has the wrong length");
        self.point_data.push((name.to_string(), values));
        self
    }

    pub fn to_vtk(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(s, "{}", title.lines().next().unwrap_or(""));
        let _ = writeln!(s, "ASCII\nDATASET POLYDATA");
        let _ = writeln!(s, "POINTS {} double", self.points.len());
        for p in &self.points {
            let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
        }
        let size: usize = self.polygons.iter().map(|p| p.len() + 1).sum();
        let _ = writeln!(s, "POLYGONS {} {}", self.polygons.len(), size);
        for p in &self.polygons {
            let _ = write!(s, "{}", p.len());
            for v in p {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        for (header, n, fields) in [
            ("CELL_DATA", self.polygons.len(), &self.cell_data),
            ("POINT_DATA", self.points.len(), &self.point_data),
        ] {
            if fields.is_empty() {
                continue;
            }
            let _ = writeln!(s, "{header} {n}");
            for (name, values) in fields {
                let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", name.replace(' ', "_"));
                for v in values {
                    let _ = writeln!(s, "{v:e}");
                }
            }
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>, title: &str) -> Result<()> {
        std::fs::write(path, self.to_vtk(title))?;
        Ok(())
    }
}

/// Mesh with the quality scores of every cell.
pub fn quality_vtk(mesh: &PolygonalMesh) -> VtkPolyData {
    let report = quality::mesh_quality_report(mesh);
    let field = |f: fn(&quality::QualityScores) -> f64| report.cells.iter().map(f).collect::<Vec<_>>();
    VtkPolyData::from_mesh(mesh)
        .with_cell_data("rho", field(|s| s.rho))
        .with_cell_data("rho1", field(|s| s.rho1))
        .with_cell_data("rho2", field(|s| s.rho2))
        .with_cell_data("rho3", field(|s| s.rho3))
        .with_cell_data("rho4", field(|s| s.rho4))
}

/// Fracture `f` of a solved network in global coordinates, with the discrete
/// head at the vertices and its cell averages.
pub fn fracture_vtk(net: &FractureNetwork, sol: &NetworkSolution, f: usize) -> VtkPolyData {
    let st = &sol.mesh.stitched;
    let mesh = &st.meshes[f];
    let frame = &net.fractures[f].frame;
    let first = sol.owners.iter().position(|&(g, _)| g == f).unwrap_or(0);
    let mut out = VtkPolyData {
        points: (0..mesh.num_vertices())
            .map(|v| {
                let p = frame.to_global(&mesh.position(v));
                [p.x, p.y, p.z]
            })
            .collect(),
        polygons: mesh.cell_loops(),
        ..Default::default()
    };
    let head: Vec<f64> = st.vertex_global[f].iter().map(|&g| sol.disc.values[g]).collect();
    let mean: Vec<f64> = (0..mesh.num_cells())
        .map(|c| sol.disc.eval(first + c, &sol.disc.elements[first + c].centroid))
        .collect();
    let rho: Vec<f64> = (0..mesh.num_cells()).map(|c| quality::cell_scores(mesh, c).rho).collect();
    out = out.with_point_data("head", head).with_cell_data("head_centroid", mean).with_cell_data("rho", rho);
    if let Some(exact) = &net.exact {
        let u: Vec<f64> = out.points.iter().map(|p| (exact.u)(f, &crate::dfn::network::Point3d::new(p[0], p[1], p[2]))).collect();
        out = out.with_point_data("exact", u);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected csv|json)"))),
        }
    }
}

/// Writes serializable rows as CSV (one header line) or a JSON array.
pub fn write_rows<T: Serialize>(writer: impl Write, rows: &[T], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut w = BufWriter::new(writer);
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// `dir/stem.<ext>` for the chosen format.
pub fn write_table<T: Serialize>(dir: &Path, stem: &str, rows: &[T], format: Format) -> Result<std::path::PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    write_rows(File::create(&path)?, rows, format)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::rect_grid;

    #[test]
    fn vtk_counts() {
        let m = rect_grid(2, 3, 0.0, 1.0, 0.0, 1.0);
        let text = quality_vtk(&m).to_vtk("grid");
        assert!(text.contains("POINTS 12 double"));
        assert!(text.contains("POLYGONS 6 30"));
        assert!(text.contains("CELL_DATA 6"));
        assert_eq!(text.matches("SCALARS").count(), 5);
    }

    #[test]
    fn csv_and_json_rows() {
        #[derive(Serialize)]
        struct Row {
            a: usize,
            b: f64,
        }
        let rows = [Row { a: 1, b: 0.5 }, Row { a: 2, b: 1e-12 }];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n2,1e-12\n");
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[1]["a"], 2);
    }
}

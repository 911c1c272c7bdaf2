use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use slagkit::curves::CurveSample;
use slagkit::pde::PotentialGrid;
use slagkit::surfaces::SurfaceGrid;

use crate::args::Projection;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("degenerate grid: a mesh needs at least 2x2 vertices, got {nt}x{ns}")]
    DegenerateGrid { nt: usize, ns: usize },
    #[error("malformed row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    let io = |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub const CURVE_COLUMNS: [&str; 7] = ["t", "re1", "im1", "re2", "im2", "residual_conserved", "residual_line"];

/// One row of a curve CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub point: [Complex64; 2],
    pub residual_conserved: f64,
    pub residual_line: f64,
}

impl CurveRow {
    pub fn from_sample(s: &CurveSample) -> Vec<CurveRow> {
        (0..s.len())
            .map(|i| CurveRow {
                t: s.ts[i],
                point: s.points[i],
                residual_conserved: s.residual_conserved[i],
                residual_line: s.residual_line[i],
            })
            .collect()
    }
}

/// Shortest text with 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn curve_csv(rows: &[CurveRow]) -> Result<Vec<u8>, ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |source| ExportError::Csv {
        path: PathBuf::from("<memory>"),
        source,
    };
    w.write_record(CURVE_COLUMNS).map_err(err)?;
    for r in rows {
        w.write_record([
            num(r.t),
            num(r.point[0].re),
            num(r.point[0].im),
            num(r.point[1].re),
            num(r.point[1].im),
            num(r.residual_conserved),
            num(r.residual_line),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| ExportError::Io {
        path: PathBuf::from("<memory>"),
        source: e.into_error(),
    })
}

pub fn export_csv(path: &Path, rows: &[CurveRow]) -> Result<(), ExportError> {
    write_atomic(path, &curve_csv(rows)?)
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>, ExportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|source| ExportError::Csv {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    if headers.iter().ne(CURVE_COLUMNS) {
        return Err(ExportError::Malformed {
            row: 0,
            reason: format!("expected header {}", CURVE_COLUMNS.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| ExportError::Csv {
            path: PathBuf::from("<memory>"),
            source,
        })?;
        let v: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ExportError::Malformed {
                row: k + 1,
                reason: e.to_string(),
            })?;
        if v.len() != 7 {
            return Err(ExportError::Malformed {
                row: k + 1,
                reason: format!("expected 7 fields, got {}", v.len()),
            });
        }
        rows.push(CurveRow {
            t: v[0],
            point: [Complex64::new(v[1], v[2]), Complex64::new(v[3], v[4])],
            residual_conserved: v[5],
            residual_line: v[6],
        });
    }
    Ok(rows)
}

/// `x,y,h` rows of a potential grid.
pub fn potential_csv(grid: &PotentialGrid) -> Result<Vec<u8>, ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |source| ExportError::Csv {
        path: PathBuf::from("<memory>"),
        source,
    };
    w.write_record(["x", "y", "h"]).map_err(err)?;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            w.write_record([num(grid.x(i)), num(grid.y(j)), num(grid.at(i, j))]).map_err(err)?;
        }
    }
    w.into_inner().map_err(|e| ExportError::Io {
        path: PathBuf::from("<memory>"),
        source: e.into_error(),
    })
}

/// Edge values from a CSV with columns `edge,k,value`, returned in the order
/// bottom, top, left, right with each edge sorted by `k`.
pub fn parse_edges(path: &Path) -> Result<[Vec<f64>; 4], ExportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut edges: [Vec<(usize, f64)>; 4] = Default::default();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| ExportError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let bad = |reason: String| ExportError::Malformed { row: k + 1, reason };
        if rec.len() != 3 {
            return Err(bad("expected `edge,k,value`".into()));
        }
        let slot = match &rec[0] {
            "bottom" => 0,
            "top" => 1,
            "left" => 2,
            "right" => 3,
            other => return Err(bad(format!("unknown edge `{other}`"))),
        };
        let index = rec[1].parse().map_err(|_| bad(format!("`{}` is not an index", &rec[1])))?;
        let value = rec[2].parse().map_err(|_| bad(format!("`{}` is not a number", &rec[2])))?;
        edges[slot].push((index, value));
    }
    let mut out: [Vec<f64>; 4] = Default::default();
    for (slot, mut e) in edges.into_iter().enumerate() {
        e.sort_by_key(|(k, _)| *k);
        if e.iter().enumerate().any(|(k, (idx, _))| k != *idx) {
            return Err(ExportError::Malformed {
                row: 0,
                reason: "edge indices must run 0..len without gaps".into(),
            });
        }
        out[slot] = e.into_iter().map(|(_, v)| v).collect();
    }
    Ok(out)
}

fn project(z: &[Complex64; 2], projection: Projection) -> [f64; 3] {
    match projection {
        Projection::Re1Im1Re2 => [z[0].re, z[0].im, z[1].re],
        Projection::Re1Re2Im2 => [z[0].re, z[1].re, z[1].im],
        Projection::ModuliPhase => [z[0].norm(), z[1].norm(), z[0].arg()],
    }
}

/// Vertex lines in grid order, then one quad per cell with vertices
/// `(i, j), (i+1, j), (i+1, j+1), (i, j+1)`.
pub fn surface_obj(surface: &SurfaceGrid, projection: Projection) -> Result<Vec<u8>, ExportError> {
    let (nt, ns) = (surface.nt(), surface.ns());
    if nt < 2 || ns < 2 {
        return Err(ExportError::DegenerateGrid { nt, ns });
    }
    let mut out = String::new();
    for z in &surface.points {
        let [x, y, w] = project(z, projection);
        out.push_str(&format!("v {} {} {}\n", num(x), num(y), num(w)));
    }
    let v = |i: usize, j: usize| surface.index(i, j) + 1;
    for i in 0..nt - 1 {
        for j in 0..ns - 1 {
            out.push_str(&format!("f {} {} {} {}\n", v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)));
        }
    }
    Ok(out.into_bytes())
}

pub fn export_obj(path: &Path, surface: &SurfaceGrid, projection: Projection) -> Result<(), ExportError> {
    write_atomic(path, &surface_obj(surface, projection)?)
}

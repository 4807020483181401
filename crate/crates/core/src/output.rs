//! Columnar text output and the standalone x-t diagram.
//!
//! Every file is written to a temporary sibling first and renamed into
//! place, so a failed run never leaves a truncated file behind.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::characteristics::CharacteristicPath;
use crate::error::{Error, Result};
use crate::fronts::Trajectory;
use crate::model::pressure;
use crate::solver::RunRecord;

/// Fifteen significant digits; fixed notation for moderate magnitudes.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        format!("{:.*}", (14 - e).max(0) as usize, v)
    } else {
        format!("{v:.14e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.flush().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Comma-separated table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let rows: Vec<Vec<String>> = traj
        .points()
        .iter()
        .map(|&(x, t)| vec![fmt_num(x), fmt_num(t)])
        .collect();
    write_table(path, &["x", "t"], &rows)
}

/// Reads an `x,t` table written by [`write_trajectory`].
pub fn read_xt(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    let ix = header.iter().position(|h| *h == "x");
    let it = header.iter().position(|h| *h == "t");
    let (ix, it) = match (ix, it) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Config(format!(
                "{}: header must name columns x and t",
                path.display()
            )))
        }
    };
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |i: usize| -> Result<f64> {
            cols.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("{}: bad row {}", path.display(), n + 2)))
        };
        out.push((parse(ix)?, parse(it)?));
    }
    Ok(out)
}

pub fn write_paths(path: &Path, paths: &[CharacteristicPath]) -> Result<()> {
    let mut rows = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let family = match p.family {
            crate::characteristics::Family::Cplus => "cplus",
            crate::characteristics::Family::Czero => "czero",
        };
        for s in &p.samples {
            rows.push(vec![
                i.to_string(),
                family.to_string(),
                fmt_num(p.seed.0),
                fmt_num(p.seed.1),
                fmt_num(s.t),
                fmt_num(s.x),
                fmt_num(s.rho),
                fmt_num(s.p),
                fmt_num(s.lambda_i),
                fmt_num(s.lambda_r),
            ]);
        }
    }
    write_table(
        path,
        &["path", "family", "seed_x", "seed_t", "t", "x", "rho", "p", "lambda_i", "lambda_r"],
        &rows,
    )
}

/// One file per stored frame with columns `x, rho, p, lambda_i, lambda_r`.
///
/// All frames share the same cells: those reached by the flow at the end of
/// the run. Returns the written paths.
pub fn emit_frames(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    let n = record
        .frames
        .iter()
        .map(|f| f.len())
        .max()
        .unwrap_or(0)
        .max(1)
        .min(record.grid.n_cells);
    let q = record.params.q();
    let width = record.frames.len().to_string().len().max(5);
    let mut written = Vec::with_capacity(record.frames.len());
    for (k, f) in record.frames.iter().enumerate() {
        let mut out = String::from("x,rho,p,lambda_i,lambda_r\n");
        for j in 0..n {
            let c = f.cell(j);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(record.grid.x_center(j)),
                fmt_num(c.rho),
                fmt_num(pressure(c.rho, c.lambda_r, q)),
                fmt_num(c.lambda_i),
                fmt_num(c.lambda_r)
            );
        }
        let path = dir.join(format!("frame_{k:0width$}.csv"));
        write_atomic(&path, out.as_bytes())?;
        written.push(path);
    }
    let times: Vec<Vec<String>> = record
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| vec![k.to_string(), fmt_num(f.time)])
        .collect();
    write_table(&dir.join("frames.csv"), &["frame", "t"], &times)?;
    Ok(written)
}

/// Series drawn on the x-t diagram.
#[derive(Debug, Default)]
pub struct Diagram<'a> {
    pub shock: Option<&'a Trajectory>,
    pub fire: Option<&'a Trajectory>,
    pub reaction_end: Option<&'a Trajectory>,
    pub internal_shock: Option<&'a Trajectory>,
    pub paths: &'a [CharacteristicPath],
    /// Analytic fire prediction, drawn dashed.
    pub analytic: Option<&'a [(f64, f64)]>,
    pub t_max: f64,
    pub x_max: f64,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 50.0;
const MAX_VERTICES: usize = 1500;

fn polyline(points: &[(f64, f64)], map: &impl Fn(f64, f64) -> (f64, f64)) -> String {
    let stride = points.len().div_ceil(MAX_VERTICES).max(1);
    let mut s = String::new();
    for (i, &(x, t)) in points.iter().enumerate() {
        if i % stride != 0 && i + 1 != points.len() {
            continue;
        }
        let (px, py) = map(x, t);
        let _ = write!(s, "{px:.2},{py:.2} ");
    }
    s.trim_end().to_string()
}

/// Standalone SVG with `t` up and `x` to the right: shock red, fire green,
/// reaction end blue, internal shock orange, `C+` lines black, analytic fire
/// dashed.
pub fn render_svg(d: &Diagram) -> String {
    let (xm, tm) = (d.x_max.max(1e-9), d.t_max.max(1e-9));
    let map = |x: f64, t: f64| {
        (
            MARGIN + (x / xm) * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (t / tm) * (HEIGHT - 2.0 * MARGIN),
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = map(0.0, 0.0);
    let (x1, y1) = map(xm, tm);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="gray" stroke-width="1"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">x</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" font-size="14" text-anchor="middle">t</text>"#,
        0.5 * (y0 + y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x0}" y="{:.1}" font-size="11" text-anchor="middle">0</text><text x="{x1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
        y0 + 15.0,
        y0 + 15.0,
        fmt_short(xm)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{y1}" font-size="11" text-anchor="end">{}</text>"#,
        x0 - 5.0,
        fmt_short(tm)
    );
    let clip = |pts: &[(f64, f64)]| -> Vec<(f64, f64)> {
        pts.iter()
            .copied()
            .filter(|&(x, t)| x <= xm && t <= tm)
            .collect()
    };
    for p in d.paths {
        let pts: Vec<(f64, f64)> = p.samples.iter().map(|s| (s.x, s.t)).collect();
        let pts = clip(&pts);
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="0.6"/>"#,
                polyline(&pts, &map)
            );
        }
    }
    let mut line = |pts: &[(f64, f64)], color: &str, extra: &str| {
        let pts = clip(pts);
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{extra}/>"#,
                polyline(&pts, &map)
            );
        }
    };
    if let Some(t) = d.reaction_end {
        line(t.points(), "blue", "");
    }
    if let Some(t) = d.internal_shock {
        line(t.points(), "orange", "");
    }
    if let Some(t) = d.fire {
        line(t.points(), "green", "");
    }
    if let Some(t) = d.shock {
        line(t.points(), "red", "");
    }
    if let Some(a) = d.analytic {
        line(a, "black", r#" stroke-dasharray="6,4""#);
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_short(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

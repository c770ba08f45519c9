use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::{Dataset, ReferenceClustering};
use crate::error::{Result, SpexError};

fn io_err(path: &Path, source: std::io::Error) -> SpexError {
    SpexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> SpexError {
    SpexError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a headerless (unless `header`) comma-separated matrix, one point per
/// row.
pub fn read_points(path: &Path, header: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => io_err(path, io),
            other => parse_err(path, 0, format!("{other:?}")),
        })?;

    let mut values = Vec::new();
    let mut d = None;
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(n + 1);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match d {
            None => d = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(parse_err(
                    path,
                    line,
                    format!("row has {} columns, expected {d}", record.len()),
                ));
            }
            _ => {}
        }
        for cell in record.iter() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, line, format!("non-numeric cell {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("non-finite cell {cell:?}")));
            }
            values.push(v);
        }
        n += 1;
    }
    let d = d.ok_or_else(|| SpexError::Empty(path.display().to_string()))?;
    Dataset::new(values, n, d)
}

/// One integer per non-blank line.
pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse()
                .map_err(|_| parse_err(path, i + 1, format!("not an integer: {t:?}")))?,
        );
    }
    if out.is_empty() {
        return Err(SpexError::Empty(path.display().to_string()));
    }
    Ok(out)
}

/// Loads points and, optionally, labels (relabelled to `0..k`, no centroids).
pub fn ingest(
    points_path: &Path,
    labels_path: Option<&Path>,
    header: bool,
) -> Result<(Dataset, Option<ReferenceClustering>)> {
    let ds = read_points(points_path, header)?;
    let reference = match labels_path {
        None => None,
        Some(p) => {
            let raw = read_labels(p)?;
            if raw.len() != ds.n() {
                return Err(SpexError::LabelCountMismatch {
                    labels: raw.len(),
                    points: ds.n(),
                });
            }
            Some(ReferenceClustering::from_raw_labels(&raw)?)
        }
    };
    Ok((ds, reference))
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(contents).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Shortest round-trip decimal for every coordinate.
pub fn write_points(path: &Path, ds: &Dataset) -> Result<()> {
    let mut s = String::with_capacity(ds.n() * ds.d() * 8);
    for row in ds.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{v}").unwrap();
        }
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut s = String::with_capacity(labels.len() * 3);
    for l in labels {
        writeln!(s, "{l}").unwrap();
    }
    write_atomic(path, s.as_bytes())
}

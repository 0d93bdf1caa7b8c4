//! Plain-text file formats: class fields, wavelets, seismic cubes,
//! elastic fields and PGM probability images.

use crate::error::{Error, Result};
use crate::forward::{ElasticField, SeismicCube, Wavelet};
use crate::lattice::{GridDims, LfcField};
use std::fmt::Write as _;
use std::path::Path;

fn parse_dims_line(line: Option<&str>, what: &str) -> Result<GridDims> {
    let line = line.ok_or_else(|| Error::Usage(format!("{what}: empty file")))?;
    let mut it = line.split_whitespace();
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Usage(format!("{what}: bad dims line")))?;
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Usage(format!("{what}: bad dims line")))?;
    GridDims::new(m, n)
}

/// Field format: line 1 `m n`, then m lines of n space-separated {0,1}.
pub fn write_field(field: &LfcField) -> String {
    let dims = field.dims();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", dims.rows(), dims.cols());
    for i in 1..=dims.rows() {
        let row: Vec<String> = (1..=dims.cols()).map(|j| field.get((i, j)).to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn read_field(text: &str) -> Result<LfcField> {
    let mut lines = text.lines();
    let dims = parse_dims_line(lines.next(), "field file")?;
    let mut values = Vec::with_capacity(dims.len());
    for i in 0..dims.rows() {
        let line = lines
            .next()
            .ok_or_else(|| Error::Usage(format!("field file: missing row {}", i + 1)))?;
        for tok in line.split_whitespace() {
            let v: u8 = tok
                .parse()
                .map_err(|_| Error::Usage(format!("field file: bad value '{tok}'")))?;
            values.push(v);
        }
    }
    LfcField::from_values(dims, values).map_err(|e| Error::Usage(e.to_string()))
}

pub fn save_field(field: &LfcField, path: &Path) -> Result<()> {
    std::fs::write(path, write_field(field))?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<LfcField> {
    read_field(&std::fs::read_to_string(path)?)
}

/// Wavelet format: line 1 `length center`, then one sample per line.
pub fn write_wavelet(w: &Wavelet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", w.samples().len(), w.center());
    for v in w.samples() {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn read_wavelet(text: &str) -> Result<Wavelet> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("wavelet file: empty".into()))?;
    let mut it = header.split_whitespace();
    let len: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Config("wavelet file: bad header".into()))?;
    let center: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Config("wavelet file: bad header".into()))?;
    let samples: Vec<f64> = lines
        .take(len)
        .map(|l| l.trim().parse().map_err(|_| Error::Config("wavelet file: bad sample".into())))
        .collect::<Result<_>>()?;
    if samples.len() != len {
        return Err(Error::Config("wavelet file: truncated samples".into()));
    }
    Wavelet::new(samples, center)
}

pub fn load_wavelet(path: &Path) -> Result<Wavelet> {
    read_wavelet(&std::fs::read_to_string(path)?)
}

/// Cube format: line 1 `m n`, then m*n lines `near far` in row-major order.
pub fn write_cube(cube: &SeismicCube) -> String {
    let dims = cube.dims();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", dims.rows(), dims.cols());
    for node in dims.nodes() {
        let [near, far] = cube.get(node);
        let _ = writeln!(s, "{near} {far}");
    }
    s
}

pub fn read_cube(text: &str) -> Result<SeismicCube> {
    let mut lines = text.lines();
    let dims = parse_dims_line(lines.next(), "cube file")?;
    let mut values = Vec::with_capacity(dims.len());
    for idx in 0..dims.len() {
        let line = lines
            .next()
            .ok_or_else(|| Error::Usage(format!("cube file: missing node {idx}")))?;
        let mut it = line.split_whitespace();
        let near: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Usage("cube file: bad line".into()))?;
        let far: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Usage("cube file: bad line".into()))?;
        values.push([near, far]);
    }
    SeismicCube::from_values(dims, values)
}

pub fn save_cube(cube: &SeismicCube, path: &Path) -> Result<()> {
    std::fs::write(path, write_cube(cube))?;
    Ok(())
}

pub fn load_cube(path: &Path) -> Result<SeismicCube> {
    read_cube(&std::fs::read_to_string(path)?)
}

/// Elastic field uses the same two-value-per-node layout as the cube.
pub fn write_elastic(field: &ElasticField) -> String {
    let dims = field.dims();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", dims.rows(), dims.cols());
    for node in dims.nodes() {
        let [a, b] = field.get(node);
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

pub fn save_elastic(field: &ElasticField, path: &Path) -> Result<()> {
    std::fs::write(path, write_elastic(field))?;
    Ok(())
}

/// Probabilities scaled to 0..255 as an ASCII PGM image.
pub fn write_probability_pgm(dims: GridDims, probs: &[f64]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "P2");
    let _ = writeln!(s, "{} {}", dims.cols(), dims.rows());
    let _ = writeln!(s, "255");
    for i in 0..dims.rows() {
        let row: Vec<String> = (0..dims.cols())
            .map(|j| {
                let p = probs[i * dims.cols() + j].clamp(0.0, 1.0);
                ((p * 255.0).round() as u32).to_string()
            })
            .collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

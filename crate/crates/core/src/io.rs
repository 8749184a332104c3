//! File formats for matrices, configurations and permutations.
//!
//! Matrix CSV: first line `n`, then `n` comma-separated rows.
//! Matrix JSON: `{"n": n, "rows": [[..], ..]}`.
//! Matrix binary: `AFFMAT01`, `n` as little-endian `u64`, then `n²`
//! little-endian `f64` in row-major order.
//!
//! Text readers skip blank lines and lines starting with `#`.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::model::AffinityMatrix;
use crate::seriation::Permutation;

pub const MATRIX_MAGIC: &[u8; 8] = b"AFFMAT01";

/// Symmetry tolerance applied to matrices read from disk.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A matrix read from an external source plus what had to be repaired.
#[derive(Debug)]
pub struct LoadedMatrix {
    pub matrix: AffinityMatrix,
    /// A non-zero diagonal was found and cleared.
    pub diagonal_cleared: bool,
    /// Largest `|B_ij − B_ji|` before averaging.
    pub asymmetry: f64,
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

fn finish(n: usize, data: Vec<f64>) -> Result<LoadedMatrix> {
    let raw = AffinityMatrix::from_raw(n, data.clone());
    let asymmetry = raw.asymmetry();
    let (matrix, diagonal_cleared) = AffinityMatrix::from_dense(n, data, SYMMETRY_TOL)?;
    Ok(LoadedMatrix { matrix, diagonal_cleared, asymmetry })
}

pub fn write_matrix_csv<W: Write>(m: &AffinityMatrix, mut w: W) -> Result<()> {
    let n = m.n();
    writeln!(w, "{n}")?;
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: Read>(r: R) -> Result<LoadedMatrix> {
    let mut lines = BufReader::new(r).lines();
    let header = loop {
        match lines.next() {
            Some(l) => {
                let l = l?;
                if !is_skipped(&l) {
                    break l;
                }
            }
            None => return Err(Error::Parse("empty matrix file".into())),
        }
    };
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad size header {header:?}")))?;
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for l in lines {
        let l = l?;
        if is_skipped(&l) {
            continue;
        }
        let before = data.len();
        for tok in l.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad number {tok:?}", rows + 1)))?;
            data.push(v);
        }
        if data.len() - before != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", rows + 1, data.len() - before)));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse(format!("expected {n} rows, found {rows}")));
    }
    finish(n, data)
}

pub fn write_matrix_bin<W: Write>(m: &AffinityMatrix, mut w: W) -> Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_bin<R: Read>(mut r: R) -> Result<LoadedMatrix> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MATRIX_MAGIC {
        return Err(Error::Parse("not a binary affinity matrix (bad magic)".into()));
    }
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let n = usize::try_from(u64::from_le_bytes(buf)).map_err(|_| Error::Parse("matrix too large".into()))?;
    let len = n.checked_mul(n).ok_or_else(|| Error::Parse("matrix too large".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != len * 8 {
        return Err(Error::Parse(format!("expected {} payload bytes, found {}", len * 8, bytes.len())));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    finish(n, data)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

pub fn write_matrix_json<W: Write>(m: &AffinityMatrix, w: W) -> Result<()> {
    let rows = (0..m.n()).map(|i| m.row(i).to_vec()).collect();
    serde_json::to_writer(w, &MatrixJson { n: m.n(), rows })?;
    Ok(())
}

pub fn read_matrix_json<R: Read>(r: R) -> Result<LoadedMatrix> {
    let MatrixJson { n, rows } = serde_json::from_reader(r)?;
    if rows.len() != n || rows.iter().any(|row| row.len() != n) {
        return Err(Error::Parse(format!("expected {n} rows of {n} entries")));
    }
    finish(n, rows.concat())
}

/// Picks the reader from the leading bytes: binary if the magic matches,
/// JSON if the first non-blank byte is `{`, CSV otherwise.
pub fn read_matrix_auto(bytes: &[u8]) -> Result<LoadedMatrix> {
    if bytes.starts_with(MATRIX_MAGIC) {
        read_matrix_bin(bytes)
    } else if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        read_matrix_json(bytes)
    } else {
        read_matrix_csv(bytes)
    }
}

/// One `index,theta` line per point, zero-based index, 17 significant digits.
pub fn write_configuration_csv<W: Write>(x: &Configuration, mut w: W) -> Result<()> {
    writeln!(w, "index,theta")?;
    for (i, t) in x.angles().enumerate() {
        writeln!(w, "{i},{t:.16e}")?;
    }
    Ok(())
}

pub fn read_configuration_csv<R: Read>(r: R) -> Result<Configuration> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut angles = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = if rec.len() >= 2 { &rec[1] } else { &rec[0] };
        let t: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad angle {field:?}", k + 2)))?;
        angles.push(t);
    }
    if angles.is_empty() {
        return Err(Error::Empty("configuration file has no points"));
    }
    Ok(Configuration::from_angles(angles))
}

pub fn write_configuration_json<W: Write>(x: &Configuration, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, x)?;
    Ok(())
}

pub fn read_configuration_json<R: Read>(r: R) -> Result<Configuration> {
    Ok(serde_json::from_reader(r)?)
}

/// Writes one-indexed images, one per line.
pub fn write_permutation_csv<W: Write>(images: &[usize], mut w: W) -> Result<()> {
    for v in images {
        writeln!(w, "{}", v + 1)?;
    }
    Ok(())
}

/// Reads one-indexed images (one per line, or comma-separated) into
/// zero-based values without checking bijectivity.
pub fn read_map_csv<R: Read>(r: R) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        if is_skipped(&line) {
            continue;
        }
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: usize = tok.parse().map_err(|_| Error::Parse(format!("bad index {tok:?}")))?;
            if v == 0 {
                return Err(Error::Parse("permutation entries are one-indexed".into()));
            }
            out.push(v - 1);
        }
    }
    Ok(out)
}

pub fn read_permutation_csv<R: Read>(r: R) -> Result<Permutation> {
    Permutation::new(read_map_csv(r)?)
}

//! CSV vectors, binary PGM images and raw `EVF1` float arrays.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};

/// One value per row under a `value` header.
pub fn write_vector_csv(path: &Path, data: &[f64]) -> Result<()> {
    let mut wr = csv::Writer::from_path(path)?;
    wr.write_record(["value"])?;
    for v in data {
        wr.write_record([format!("{v:e}")])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads the first column of a CSV file with a header row.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = rec.get(0).ok_or_else(|| Error::Format("empty CSV row".into()))?;
        out.push(
            field
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number '{field}': {e}")))?,
        );
    }
    Ok(out)
}

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

/// Location of the `(min, max)` sidecar written next to a PGM file.
pub fn range_sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".range.csv");
    PathBuf::from(s)
}

/// 16-bit big-endian P5 with the float range stored in a sidecar CSV.
pub fn write_pgm(path: &Path, img: &Image) -> Result<()> {
    if img.rows * img.cols != img.data.len() || img.data.is_empty() {
        return Err(invalid("image dimensions do not match its data"));
    }
    if img.data.iter().any(|v| !v.is_finite()) {
        return Err(invalid("image contains non-finite values"));
    }
    let lo = img.data.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut w = BufWriter::new(fs::File::create(path)?);
    write!(w, "P5\n{} {}\n65535\n", img.cols, img.rows)?;
    for v in &img.data {
        let q = ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16;
        w.write_all(&q.to_be_bytes())?;
    }
    w.flush()?;
    let mut side = csv::Writer::from_path(range_sidecar(path))?;
    side.write_record(["min", "max"])?;
    side.write_record([format!("{lo:e}"), format!("{hi:e}")])?;
    side.flush()?;
    Ok(())
}

/// Reads 8- or 16-bit P5 files. With a range sidecar, samples are mapped
/// back to the recorded float range; otherwise raw sample values are returned.
pub fn read_pgm(path: &Path) -> Result<Image> {
    let bytes = fs::read(path)?;
    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::Format(format!("expected P5 magic, found '{}'", fields[0])));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad PGM header field '{s}'")))
    };
    let (cols, rows, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("bad maxval {maxval}")));
    }
    let wide = maxval > 255;
    let need = rows * cols * if wide { 2 } else { 1 };
    let body = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::Format("truncated PGM data".into()))?;
    let raw: Vec<f64> = if wide {
        body.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    } else {
        body.iter().map(|&b| b as f64).collect()
    };
    let side = range_sidecar(path);
    let data = if side.exists() {
        let mut rd = csv::Reader::from_path(&side)?;
        let rec = rd
            .records()
            .next()
            .ok_or_else(|| Error::Format("empty range sidecar".into()))??;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Format("bad range sidecar".into()))
        };
        let (lo, hi) = (get(0)?, get(1)?);
        let span = if hi > lo { hi - lo } else { 1.0 };
        raw.iter().map(|q| lo + q / maxval as f64 * span).collect()
    } else {
        raw
    };
    Ok(Image { rows, cols, data })
}

const EVF_MAGIC: &[u8; 4] = b"EVF1";

/// `"EVF1"`, `u32` rank, two `u32` dims (unused dims are 1), then
/// little-endian `f64` data.
pub fn write_evf(path: &Path, dims: &[usize], data: &[f64]) -> Result<()> {
    if dims.is_empty() || dims.len() > 2 {
        return Err(invalid("EVF1 supports rank 1 or 2"));
    }
    if dims.iter().product::<usize>() != data.len() {
        return Err(invalid("EVF1 dims do not match data length"));
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(EVF_MAGIC)?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    let d0 = u32::try_from(dims[0]).map_err(|_| invalid("dimension too large"))?;
    let d1 = u32::try_from(*dims.get(1).unwrap_or(&1)).map_err(|_| invalid("dimension too large"))?;
    w.write_all(&d0.to_le_bytes())?;
    w.write_all(&d1.to_le_bytes())?;
    for v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_evf(path: &Path) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != EVF_MAGIC {
        return Err(Error::Format("not an EVF1 file".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let rank = word(4);
    if rank == 0 || rank > 2 {
        return Err(Error::Format(format!("unsupported EVF1 rank {rank}")));
    }
    let dims: Vec<usize> = [word(8), word(12)][..rank].to_vec();
    let count: usize = dims.iter().product();
    if bytes.len() != 16 + 8 * count {
        return Err(Error::Format("EVF1 payload length mismatch".into()));
    }
    let data = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((dims, data))
}

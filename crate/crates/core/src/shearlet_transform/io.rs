//! Coefficient container and PGM images.
//!
//! Container layout: the 8-byte magic `CONELET1`, a little-endian `u64`
//! header length, a JSON header with sorted keys, then every subband as
//! contiguous little-endian `f64` values in header order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CoefficientSet, Image, SystemInfo};
use crate::error::{ConeletError, Result};

const MAGIC: &[u8; 8] = b"CONELET1";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    system: SystemInfo,
    band_lengths: Vec<usize>,
    extra: serde_json::Value,
}

/// Serializes with sorted object keys.
pub fn to_sorted_json<T: Serialize>(v: &T) -> Result<String> {
    // serde_json's default map is a BTreeMap, so a round trip through Value sorts keys
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_string_pretty(&value)?)
}

pub fn write_coefficients<W: Write>(mut w: W, c: &CoefficientSet, extra: &serde_json::Value) -> Result<()> {
    let header = Header {
        format: "conelet-coefficients".into(),
        system: c.info.clone(),
        band_lengths: c.bands.iter().map(|b| b.len()).collect(),
        extra: extra.clone(),
    };
    let json = serde_json::to_string(&serde_json::to_value(&header)?)?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(json.as_bytes())?;
    let mut buf = Vec::new();
    for band in &c.bands {
        buf.clear();
        for v in band {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a container; returns the coefficients and the `extra` header field.
pub fn read_coefficients<R: Read>(mut r: R) -> Result<(CoefficientSet, serde_json::Value)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ConeletError::Format("not a coefficient container (bad magic)".into()));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 30 {
        return Err(ConeletError::Format(format!("header length {len} is implausible")));
    }
    let mut hbuf = vec![0u8; len];
    r.read_exact(&mut hbuf)?;
    let header: Header = serde_json::from_slice(&hbuf)?;
    let n = header.system.n;
    let info = &header.system;
    if info.subbands.len() != info.lattices.len()
        || header.band_lengths.len() != info.lattices.len()
        || info.lattices.iter().zip(&header.band_lengths).any(|(l, &len)| l.d1 == 0 || l.d2 == 0 || l.points(n) != len)
    {
        return Err(ConeletError::Format("band lengths do not match the lattice table".into()));
    }
    let mut bands = Vec::with_capacity(header.band_lengths.len());
    for &len in &header.band_lengths {
        let mut raw = vec![0u8; len * 8];
        r.read_exact(&mut raw)?;
        bands.push(raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect());
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(ConeletError::Format("trailing bytes after coefficient data".into()));
    }
    Ok((CoefficientSet { info: header.system, bands }, header.extra))
}

pub fn save_coefficients(path: &Path, c: &CoefficientSet, extra: &serde_json::Value) -> Result<()> {
    let f = fs::File::create(path)?;
    write_coefficients(std::io::BufWriter::new(f), c, extra)
}

pub fn load_coefficients(path: &Path) -> Result<(CoefficientSet, serde_json::Value)> {
    let f = fs::File::open(path)?;
    read_coefficients(std::io::BufReader::new(f))
}

fn pgm_tokens(data: &[u8], count: usize) -> Result<(Vec<u64>, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        while i < data.len() && (data[i].is_ascii_whitespace() || data[i] == b'#') {
            if data[i] == b'#' {
                while i < data.len() && data[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < data.len() && data[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(ConeletError::Format("malformed PGM".into()));
        }
        let s = std::str::from_utf8(&data[start..i]).unwrap();
        out.push(s.parse().map_err(|_| ConeletError::Format(format!("bad PGM number {s}")))?);
    }
    Ok((out, i))
}

/// Parses a P2 or P5 PGM into values in `[0, 1]`. The image must be square.
pub fn parse_pgm(data: &[u8]) -> Result<Image> {
    if data.len() < 2 || data[0] != b'P' || (data[1] != b'2' && data[1] != b'5') {
        return Err(ConeletError::Format("expected a P2 or P5 PGM".into()));
    }
    let binary = data[1] == b'5';
    let (hdr, pos) = pgm_tokens(&data[2..], 3)?;
    let (w, h, maxval) = (hdr[0] as usize, hdr[1] as usize, hdr[2]);
    if w != h {
        return Err(ConeletError::SizeMismatch(format!("image must be square, got {w}x{h}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ConeletError::Format(format!("bad PGM maxval {maxval}")));
    }
    let body = &data[2 + pos..];
    let scale = 1.0 / maxval as f64;
    let values: Vec<u64> = if binary {
        let body = body.get(1..).unwrap_or(&[]);
        let bytes = if maxval < 256 { 1 } else { 2 };
        if body.len() < w * h * bytes {
            return Err(ConeletError::Format("truncated PGM".into()));
        }
        (0..w * h)
            .map(|i| if bytes == 1 { body[i] as u64 } else { u16::from_be_bytes([body[2 * i], body[2 * i + 1]]) as u64 })
            .collect()
    } else {
        pgm_tokens(body, w * h)?.0
    };
    if values.iter().any(|&v| v > maxval) {
        return Err(ConeletError::Format("PGM sample exceeds maxval".into()));
    }
    // PGM rows run along x₂ = const; the first array index is x₁
    let mut img = Image::zeros(w);
    for row in 0..h {
        for col in 0..w {
            img.data[col * w + row] = values[row * w + col] as f64 * scale;
        }
    }
    Ok(img)
}

/// 16-bit PGM of the image clamped to `[0, 1]`.
pub fn format_pgm(img: &Image, binary: bool) -> Vec<u8> {
    let n = img.n;
    let maxval = 65535u32;
    let sample = |row: usize, col: usize| (img.data[col * n + row].clamp(0.0, 1.0) * maxval as f64).round() as u16;
    let mut out = format!("{}\n{n} {n}\n{maxval}\n", if binary { "P5" } else { "P2" }).into_bytes();
    for row in 0..n {
        if binary {
            for col in 0..n {
                out.extend_from_slice(&sample(row, col).to_be_bytes());
            }
        } else {
            let line: Vec<String> = (0..n).map(|col| sample(row, col).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<Image> {
    parse_pgm(&fs::read(path)?)
}

pub fn write_pgm(path: &Path, img: &Image, binary: bool) -> Result<()> {
    fs::write(path, format_pgm(img, binary))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let mut img = Image::zeros(4);
        for (i, v) in img.data.iter_mut().enumerate() {
            *v = i as f64 / 15.0;
        }
        for binary in [false, true] {
            let back = parse_pgm(&format_pgm(&img, binary)).unwrap();
            for (a, b) in img.data.iter().zip(&back.data) {
                assert!((a - b).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn pgm_comments_and_8bit() {
        let src = b"P2\n# c\n2 2\n255\n0 255\n51 102\n";
        let img = parse_pgm(src).unwrap();
        assert_eq!(img.data, vec![0.0, 0.2, 1.0, 0.4]);
        assert!(parse_pgm(b"P2\n2 3\n255\n0 0 0 0 0 0").is_err());
    }
}

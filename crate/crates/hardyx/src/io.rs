//! Grid-file serialization ("GFN1"): a one-line structured-text header
//! `{"n":…,"N":…,"L":…,"kind":"real"|"complex"}` terminated by a newline,
//! followed by the samples as raw little-endian 8-byte floats in row-major
//! order (two per point, real then imaginary, for complex data). Roundtrips
//! are bit-exact. A half-space field is stored as a ladder header line
//! followed by one complete field block per level.

use std::io::{BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Spectrum, TLadder};
use crate::operators::HalfSpaceField;

fn header_line(grid: &Grid, kind: &str) -> String {
    format!(
        "{{\"n\":{},\"N\":{},\"L\":{},\"kind\":\"{}\"}}\n",
        grid.dim(),
        grid.points_per_axis(),
        grid.period(),
        kind
    )
}

/// Reads bytes up to and including the next newline; errors if the stream
/// ends first.
fn read_header_line<R: Read>(reader: &mut R) -> Result<Vec<u8>> {
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        match reader.read(&mut byte)? {
            0 => {
                return Err(Error::Format(
                    "stream ended before the header newline".into(),
                ))
            }
            _ => {
                if byte[0] == b'\n' {
                    return Ok(line);
                }
                line.push(byte[0]);
                if line.len() > 4096 {
                    return Err(Error::Format("header line exceeds 4096 bytes".into()));
                }
            }
        }
    }
}

fn parse_header(line: &[u8]) -> Result<(Grid, String)> {
    let value: serde_json::Value = serde_json::from_slice(line)
        .map_err(|e| Error::Format(format!("malformed header: {e}")))?;
    let n = value
        .get("n")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Format("header is missing integer field \"n\"".into()))?;
    let points = value
        .get("N")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Format("header is missing integer field \"N\"".into()))?;
    let period = value
        .get("L")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Format("header is missing numeric field \"L\"".into()))?;
    let kind = value
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Format("header is missing string field \"kind\"".into()))?;
    if kind != "real" && kind != "complex" {
        return Err(Error::Format(format!(
            "unknown kind \"{kind}\" (expected \"real\" or \"complex\")"
        )));
    }
    let grid = Grid::new(n as usize, points as usize, period)?;
    Ok((grid, kind.to_string()))
}

/// Reads exactly `count` little-endian doubles; a short stream reports the
/// expected and received sample counts.
fn read_doubles<R: Read>(reader: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    let mut filled = 0usize;
    while filled < bytes.len() {
        match reader.read(&mut bytes[filled..])? {
            0 => {
                return Err(Error::Format(format!(
                    "payload truncated: expected {count} samples ({} bytes), got {} whole samples ({filled} bytes)",
                    count * 8,
                    filled / 8
                )))
            }
            k => filled += k,
        }
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Errors when the stream still has bytes left (used after single-object
/// imports so silently ignored payload bytes cannot hide a length mismatch).
fn expect_end<R: Read>(reader: &mut R) -> Result<()> {
    let mut byte = [0u8; 1];
    if reader.read(&mut byte)? != 0 {
        return Err(Error::Format(
            "trailing data after the declared payload".into(),
        ));
    }
    Ok(())
}

/// Writes a real field as one GFN1 block.
pub fn export_field<W: Write>(f: &GridFunction, writer: &mut W) -> Result<()> {
    writer.write_all(header_line(f.grid(), "real").as_bytes())?;
    for v in f.values() {
        writer.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn import_field_block<R: Read>(reader: &mut R) -> Result<GridFunction> {
    let (grid, kind) = parse_header(&read_header_line(reader)?)?;
    if kind != "real" {
        return Err(Error::Format(format!(
            "expected a real field, header declares kind \"{kind}\""
        )));
    }
    let values = read_doubles(reader, grid.total_points())?;
    GridFunction::new(grid, values)
}

/// Reads one real-field GFN1 block and requires the stream to end there.
pub fn import_field<R: Read>(reader: &mut R) -> Result<GridFunction> {
    let f = import_field_block(reader)?;
    expect_end(reader)?;
    Ok(f)
}

/// Writes a complex spectrum as one GFN1 block (kind "complex").
pub fn export_spectrum<W: Write>(s: &Spectrum, writer: &mut W) -> Result<()> {
    writer.write_all(header_line(s.grid(), "complex").as_bytes())?;
    for c in s.coefficients() {
        writer.write_all(&c.re.to_le_bytes())?;
        writer.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads one complex GFN1 block and requires the stream to end there.
pub fn import_spectrum<R: Read>(reader: &mut R) -> Result<Spectrum> {
    let (grid, kind) = parse_header(&read_header_line(reader)?)?;
    if kind != "complex" {
        return Err(Error::Format(format!(
            "expected a complex spectrum, header declares kind \"{kind}\""
        )));
    }
    let raw = read_doubles(reader, grid.total_points() * 2)?;
    expect_end(reader)?;
    let coefficients = raw
        .chunks_exact(2)
        .map(|p| Complex::new(p[0], p[1]))
        .collect();
    Spectrum::new(grid, coefficients)
}

/// Writes a half-space field: a ladder header `{"levels":[…],"period":…}`
/// line, then one real GFN1 block per level in ladder order.
pub fn export_half_space<W: Write>(u: &HalfSpaceField, writer: &mut W) -> Result<()> {
    let levels: Vec<String> = u.ladder().levels().iter().map(|t| format!("{t}")).collect();
    writer.write_all(
        format!(
            "{{\"levels\":[{}],\"period\":{}}}\n",
            levels.join(","),
            u.grid().period()
        )
        .as_bytes(),
    )?;
    for l in 0..u.ladder().len() {
        export_field(u.slice(l), writer)?;
    }
    Ok(())
}

/// Reads a half-space field written by [`export_half_space`].
pub fn import_half_space<R: Read>(reader: &mut R) -> Result<HalfSpaceField> {
    let line = read_header_line(reader)?;
    let value: serde_json::Value = serde_json::from_slice(&line)
        .map_err(|e| Error::Format(format!("malformed ladder header: {e}")))?;
    let levels: Vec<f64> = value
        .get("levels")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Format("ladder header is missing array \"levels\"".into()))?
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::Format("non-numeric ladder level".into()))
        })
        .collect::<Result<_>>()?;
    let period = value
        .get("period")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Format("ladder header is missing numeric \"period\"".into()))?;
    let ladder = TLadder::new(levels, period)?;
    let mut slices = Vec::with_capacity(ladder.len());
    for _ in 0..ladder.len() {
        slices.push(import_field_block(reader)?);
    }
    expect_end(reader)?;
    let grid = *slices[0].grid();
    HalfSpaceField::new(grid, ladder, slices)
}

/// File conveniences over the stream API.
pub fn save_field(f: &GridFunction, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    export_field(f, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<GridFunction> {
    let mut file = BufReader::new(std::fs::File::open(path)?);
    import_field(&mut file)
}

pub fn save_half_space(u: &HalfSpaceField, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    export_half_space(u, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_half_space(path: &Path) -> Result<HalfSpaceField> {
    let mut file = BufReader::new(std::fs::File::open(path)?);
    import_half_space(&mut file)
}

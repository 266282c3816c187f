//! Binary snapshots of one state at one time.
//!
//! Layout, all little-endian:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 8     | magic `BQLSNAP\0`                         |
//! | 4     | version (u32)                             |
//! | 4     | field count (u32)                         |
//! | 8, 8  | nx, ny (u64)                              |
//! | 8 x 3 | Lx, Ly, t (f64)                           |
//! | 1     | representation: 0 physical, 1 Fourier     |
//! | 1     | real-valued flag: 1 if every field is real |
//!
//! followed by the fields in order, each row-major with `x` fastest, each
//! value as `re, im` f64 pairs. The dealiasing fraction is not stored; the
//! reader supplies it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use bql_core::reformulations::State;
use bql_core::{Field, Grid, GridSpec, Representation};

use crate::error::CliError;

pub const MAGIC: [u8; 8] = *b"BQLSNAP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub field_count: u32,
    pub nx: u64,
    pub ny: u64,
    pub lx: f64,
    pub ly: f64,
    pub t: f64,
    pub representation: Representation,
    pub real: bool,
}

impl SnapshotHeader {
    pub const LEN: usize = 58;

    /// Payload size in bytes implied by the header, `None` on overflow.
    pub fn payload_len(&self) -> Option<u64> {
        (self.field_count as u64)
            .checked_mul(self.nx)?
            .checked_mul(self.ny)?
            .checked_mul(16)
    }

    fn encode(&self) -> [u8; Self::LEN] {
        let mut b = [0u8; Self::LEN];
        b[0..8].copy_from_slice(&MAGIC);
        b[8..12].copy_from_slice(&VERSION.to_le_bytes());
        b[12..16].copy_from_slice(&self.field_count.to_le_bytes());
        b[16..24].copy_from_slice(&self.nx.to_le_bytes());
        b[24..32].copy_from_slice(&self.ny.to_le_bytes());
        b[32..40].copy_from_slice(&self.lx.to_le_bytes());
        b[40..48].copy_from_slice(&self.ly.to_le_bytes());
        b[48..56].copy_from_slice(&self.t.to_le_bytes());
        b[56] = match self.representation {
            Representation::Physical => 0,
            Representation::Fourier => 1,
        };
        b[57] = self.real as u8;
        b
    }

    fn decode(b: &[u8; Self::LEN]) -> Result<Self, String> {
        if b[0..8] != MAGIC {
            return Err("bad magic".into());
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().expect("4 bytes"));
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().expect("8 bytes"));
        let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().expect("8 bytes"));
        let version = u32_at(8);
        if version != VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let representation = match b[56] {
            0 => Representation::Physical,
            1 => Representation::Fourier,
            x => return Err(format!("representation flag {x}")),
        };
        let real = match b[57] {
            0 => false,
            1 => true,
            x => return Err(format!("real-valued flag {x}")),
        };
        Ok(Self {
            field_count: u32_at(12),
            nx: u64_at(16),
            ny: u64_at(24),
            lx: f64_at(32),
            ly: f64_at(40),
            t: f64_at(48),
            representation,
            real,
        })
    }
}

fn is_real(f: &Field) -> bool {
    match f.repr() {
        Representation::Physical => f.data().iter().all(|z| z.im == 0.0),
        Representation::Fourier => f.hermitian_defect() == 0.0,
    }
}

/// Writes `fields` at time `t`. Fields are stored in the representation
/// of the first one.
pub fn write_fields(path: &Path, t: f64, fields: &[&Field]) -> Result<(), CliError> {
    let first = fields.first().ok_or_else(|| CliError::Format {
        path: path.into(),
        message: "no fields to write".into(),
    })?;
    let spec = first.spec();
    let repr = first.repr();
    let header = SnapshotHeader {
        field_count: fields.len() as u32,
        nx: spec.nx as u64,
        ny: spec.ny as u64,
        lx: spec.lx,
        ly: spec.ly,
        t,
        representation: repr,
        real: fields.iter().all(|f| is_real(f)),
    };
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    w.write_all(&header.encode()).map_err(io)?;
    for f in fields {
        if f.spec() != spec {
            return Err(CliError::Format {
                path: path.into(),
                message: "fields live on different grids".into(),
            });
        }
        let f = (*f).clone().into_repr(repr);
        for z in f.data() {
            w.write_all(&z.re.to_le_bytes()).map_err(io)?;
            w.write_all(&z.im.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Reads a snapshot; the grid gets dealiasing fraction `dealias`.
pub fn read_fields(path: &Path, dealias: f64) -> Result<(SnapshotHeader, Vec<Field>), CliError> {
    let format = |message: String| CliError::Format {
        path: path.into(),
        message,
    };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let actual = file.metadata().map_err(|e| CliError::io(path, e))?.len();
    let mut r = BufReader::new(file);
    let mut head = [0u8; SnapshotHeader::LEN];
    r.read_exact(&mut head)
        .map_err(|_| format(format!("file of {actual} bytes is shorter than a header")))?;
    let header = SnapshotHeader::decode(&head).map_err(format)?;
    let expected = header
        .payload_len()
        .and_then(|n| n.checked_add(SnapshotHeader::LEN as u64));
    if expected != Some(actual) {
        let expected = expected.map_or("too many".into(), |n| n.to_string());
        return Err(format(format!(
            "header declares {} fields of {}x{} ({expected} bytes) but file has {actual}",
            header.field_count, header.nx, header.ny
        )));
    }
    let spec = GridSpec::new(header.nx as usize, header.ny as usize, header.lx, header.ly)
        .with_dealias(dealias);
    let grid = Grid::new(spec).map_err(|e| format(format!("header grid: {e}")))?;
    let mut buf = vec![0u8; grid.len() * 16];
    let mut fields = Vec::with_capacity(header.field_count as usize);
    for _ in 0..header.field_count {
        r.read_exact(&mut buf).map_err(|e| CliError::io(path, e))?;
        let data = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        fields.push(
            Field::from_data(&grid, header.representation, data)
                .map_err(|e| format(e.to_string()))?,
        );
    }
    Ok((header, fields))
}

pub fn write_snapshot<S: State>(state: &S, t: f64, path: &Path) -> Result<(), CliError> {
    write_fields(path, t, &state.fields())
}

/// Reads a snapshot holding exactly the components of `S`.
pub fn read_snapshot<S: State>(path: &Path, dealias: f64) -> Result<(f64, S), CliError> {
    let (header, fields) = read_fields(path, dealias)?;
    if fields.len() != S::COMPONENTS {
        return Err(CliError::Format {
            path: path.into(),
            message: format!(
                "{} fields, a {} state has {}",
                fields.len(),
                S::NAME,
                S::COMPONENTS
            ),
        });
    }
    let state = S::from_fields(fields).map_err(|e| CliError::Format {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok((header.t, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let h = SnapshotHeader {
            field_count: 4,
            nx: 32,
            ny: 16,
            lx: 6.5,
            ly: 1e-3,
            t: 0.25,
            representation: Representation::Fourier,
            real: false,
        };
        assert_eq!(SnapshotHeader::decode(&h.encode()).unwrap(), h);
        assert_eq!(h.payload_len(), Some(4 * 32 * 16 * 16));
    }

    #[test]
    fn bad_flags_are_rejected() {
        let h = SnapshotHeader {
            field_count: 1,
            nx: 8,
            ny: 8,
            lx: 1.0,
            ly: 1.0,
            t: 0.0,
            representation: Representation::Physical,
            real: true,
        };
        let mut b = h.encode();
        b[57] = 7;
        assert!(SnapshotHeader::decode(&b).is_err());
        let mut b = h.encode();
        b[8] = 2;
        assert!(SnapshotHeader::decode(&b).unwrap_err().contains("version"));
    }
}

//! Flat binary and JSON containers for fields and kernels.
//!
//! Binary layout, little endian: 4-byte magic (`WFLD` for fields, `WKRN` for
//! kernels), `u32 n`, `f64 L`, `u32 N`, `u8 kind` (0 symbol, 1 function,
//! 2 kernel), `u8 precision` (0 complex64, 1 complex128); kernels add
//! `f64 t` and `u8 scaled`. The payload is row-major `(re, im)` pairs.

use crate::error::{Error, Result};
use crate::grid::{ConfigGrid, Field, FunctionField, PhaseGrid, SymbolField};
use crate::quantization::OperatorKernel;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const FIELD_MAGIC: &[u8; 4] = b"WFLD";
const KERNEL_MAGIC: &[u8; 4] = b"WKRN";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precision {
    Single,
    Double,
}

#[derive(Clone, Debug)]
pub enum Stored {
    Symbol(SymbolField),
    Function(FunctionField),
    Kernel(OperatorKernel),
}

fn put_values(out: &mut Vec<u8>, values: &[C64], precision: Precision) {
    for v in values {
        match precision {
            Precision::Single => {
                out.extend_from_slice(&(v.re as f32).to_le_bytes());
                out.extend_from_slice(&(v.im as f32).to_le_bytes());
            }
            Precision::Double => {
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
    }
}

fn header(magic: &[u8; 4], n: usize, half_width: f64, points: usize, kind: u8, precision: Precision) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(magic);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&half_width.to_le_bytes());
    out.extend_from_slice(&(points as u32).to_le_bytes());
    out.push(kind);
    out.push(match precision {
        Precision::Single => 0,
        Precision::Double => 1,
    });
    out
}

pub fn encode(item: &Stored, precision: Precision) -> Vec<u8> {
    match item {
        Stored::Symbol(a) => {
            let mut out = header(FIELD_MAGIC, a.grid.n, a.grid.half_width, a.grid.points, 0, precision);
            put_values(&mut out, a.values(), precision);
            out
        }
        Stored::Function(f) => {
            let g = f.lattice();
            let mut out = header(FIELD_MAGIC, g.dim, g.half_width, g.points, 1, precision);
            put_values(&mut out, f.values(), precision);
            out
        }
        Stored::Kernel(k) => {
            let mut out = header(KERNEL_MAGIC, k.grid.n, k.grid.half_width, k.grid.points, 2, precision);
            out.extend_from_slice(&k.t.to_le_bytes());
            out.push(k.scaled as u8);
            put_values(&mut out, &k.matrix, precision);
            out
        }
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(len).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("truncated container".into()))?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn values(&mut self, count: usize, precision: Precision) -> Result<Vec<C64>> {
        let width = match precision {
            Precision::Single => 4,
            Precision::Double => 8,
        };
        let bytes = count
            .checked_mul(2 * width)
            .ok_or_else(|| Error::Format("payload size overflows".into()))?;
        let raw = self.take(bytes)?;
        let num = |c: &[u8]| -> f64 {
            match precision {
                Precision::Single => f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64,
                Precision::Double => f64::from_le_bytes(c.try_into().expect("8 bytes")),
            }
        };
        Ok(raw.chunks_exact(2 * width).map(|c| C64::new(num(&c[..width]), num(&c[width..]))).collect())
    }
}

pub fn decode(buf: &[u8]) -> Result<Stored> {
    let mut c = Cursor { buf, at: 0 };
    let magic = c.take(4)?;
    let n = c.u32()? as usize;
    let half_width = c.f64()?;
    let points = c.u32()? as usize;
    let kind = c.u8()?;
    let precision = match c.u8()? {
        0 => Precision::Single,
        1 => Precision::Double,
        other => return Err(Error::Format(format!("unknown precision flag {other}"))),
    };
    let item = match (magic, kind) {
        (m, 0) if m == FIELD_MAGIC => {
            let grid = PhaseGrid::new(n, half_width, points)?;
            let vals = c.values(grid.grid().len(), precision)?;
            Stored::Symbol(SymbolField::from_values(grid, vals)?)
        }
        (m, 1) if m == FIELD_MAGIC => {
            let grid = ConfigGrid::new(n, half_width, points)?;
            let vals = c.values(grid.grid().len(), precision)?;
            Stored::Function(FunctionField::from_values(grid, vals)?)
        }
        (m, 2) if m == KERNEL_MAGIC => {
            let grid = ConfigGrid::new(n, half_width, points)?;
            let t = c.f64()?;
            let scaled = c.u8()? != 0;
            let size = grid.grid().len();
            let matrix = c.values(size * size, precision)?;
            Stored::Kernel(OperatorKernel { grid, t, matrix, scaled })
        }
        _ => return Err(Error::Format("unknown magic or kind".into())),
    };
    if c.at != buf.len() {
        return Err(Error::Format(format!("{} trailing bytes", buf.len() - c.at)));
    }
    Ok(item)
}

pub fn write_binary(path: &Path, item: &Stored, precision: Precision) -> Result<()> {
    std::fs::File::create(path)?.write_all(&encode(item, precision))?;
    Ok(())
}

pub fn read_binary(path: &Path) -> Result<Stored> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode(&buf)
}

/// JSON rendering of a symbol field for small cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub grid: PhaseGrid,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SymbolJson {
    pub fn from_field(a: &SymbolField) -> Self {
        SymbolJson {
            grid: a.grid,
            re: a.values().iter().map(|v| v.re).collect(),
            im: a.values().iter().map(|v| v.im).collect(),
        }
    }

    pub fn into_field(self) -> Result<SymbolField> {
        if self.re.len() != self.im.len() {
            return Err(Error::Format("re and im lengths differ".into()));
        }
        let grid = PhaseGrid::new(self.grid.n, self.grid.half_width, self.grid.points)?;
        SymbolField::from_values(grid, self.re.into_iter().zip(self.im).map(|(r, i)| C64::new(r, i)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantization::build_kernel;
    use crate::symbols::projector_symbol;
    use proptest::prelude::*;

    fn sample() -> SymbolField {
        SymbolField::from_generator(PhaseGrid::new(1, 4.0, 16).unwrap(), projector_symbol(1)).unwrap()
    }

    #[test]
    fn symbol_roundtrip() {
        let a = sample();
        match decode(&encode(&Stored::Symbol(a.clone()), Precision::Double)).unwrap() {
            Stored::Symbol(b) => {
                assert_eq!(b.grid, a.grid);
                assert_eq!(b.values(), a.values());
            }
            other => panic!("{other:?}"),
        }
        match decode(&encode(&Stored::Symbol(a.clone()), Precision::Single)).unwrap() {
            Stored::Symbol(b) => {
                let err = b.values().iter().zip(a.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(err < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kernel_and_file_roundtrip() {
        let k = build_kernel(&sample(), 0.5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.bin");
        write_binary(&path, &Stored::Kernel(k.clone()), Precision::Double).unwrap();
        match read_binary(&path).unwrap() {
            Stored::Kernel(b) => {
                assert_eq!((b.t, b.scaled, b.grid), (k.t, k.scaled, k.grid));
                assert_eq!(b.matrix, k.matrix);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode(&Stored::Symbol(sample()), Precision::Double);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::Format(_))));
        let mut extra = bytes;
        extra.push(0);
        assert!(decode(&extra).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a = sample();
        let text = serde_json::to_string(&SymbolJson::from_field(&a)).unwrap();
        let b: SymbolJson = serde_json::from_str(&text).unwrap();
        assert!(b.into_field().unwrap().values() == a.values());
    }

    proptest! {
        #[test]
        fn decode_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
            let _ = decode(&bytes);
        }
    }
}

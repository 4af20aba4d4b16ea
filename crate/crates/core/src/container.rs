//! Binary container for spectral bases, descriptor fields and cost matrices.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    4 bytes   "ELMC"
//! version  u32       1
//! tag      4 bytes   "BASI" | "HKS " | "WKS " | "COST"
//! count    u32       number of arrays
//! count ×  { rows u64, cols u64, rows·cols f64 in row-major order }
//! ```
//!
//! A basis stores `[eigenvalues (1×k), eigenfunctions (n×k), mass (1×n)]`, a
//! descriptor field its `n×d` values, and a cost matrix `[D (m×n), tau (1×1)]`.

use std::path::Path;

use nalgebra::DMatrix;

use crate::cost::CostMatrix;
use crate::spectral::{DescriptorField, DescriptorKind, SpectralBasis};
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"ELMC";
pub const VERSION: u32 = 1;

/// Dense row-major array.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Array {
    pub fn row(data: Vec<f64>) -> Self {
        Self {
            rows: 1,
            cols: data.len(),
            data,
        }
    }
}

pub fn encode(tag: [u8; 4], arrays: &[Array]) -> Vec<u8> {
    let payload: usize = arrays.iter().map(|a| 16 + 8 * a.data.len()).sum();
    let mut out = Vec::with_capacity(16 + payload);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&tag);
    out.extend_from_slice(&(arrays.len() as u32).to_le_bytes());
    for a in arrays {
        debug_assert_eq!(a.rows * a.cols, a.data.len());
        out.extend_from_slice(&(a.rows as u64).to_le_bytes());
        out.extend_from_slice(&(a.cols as u64).to_le_bytes());
        for v in &a.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Parse("truncated container".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<([u8; 4], Vec<Array>)> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Parse("not a container file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported container version {version}")));
    }
    let tag: [u8; 4] = r.take(4)?.try_into().expect("4 bytes");
    let count = r.u32()?;
    let mut arrays = Vec::new();
    for _ in 0..count {
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let len = rows
            .checked_mul(cols)
            .filter(|l| l.checked_mul(8).is_some_and(|b| b <= bytes.len()))
            .ok_or_else(|| Error::Parse(format!("implausible array size {rows}x{cols}")))?;
        let raw = r.take(8 * len)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        arrays.push(Array { rows, cols, data });
    }
    if r.pos != bytes.len() {
        return Err(Error::Parse("trailing bytes after container".into()));
    }
    Ok((tag, arrays))
}

fn expect_tag(found: [u8; 4], want: [u8; 4]) -> Result<()> {
    if found != want {
        return Err(Error::Parse(format!(
            "container holds {:?}, expected {:?}",
            String::from_utf8_lossy(&found),
            String::from_utf8_lossy(&want)
        )));
    }
    Ok(())
}

fn shape_error(what: &str) -> Error {
    Error::Parse(format!("inconsistent {what} container"))
}

pub fn basis_to_bytes(b: &SpectralBasis) -> Vec<u8> {
    let (n, k) = (b.n(), b.k());
    let psi = &b.eigenfunctions;
    let data: Vec<f64> = (0..n).flat_map(|r| (0..k).map(move |c| psi[(r, c)])).collect();
    encode(
        *b"BASI",
        &[
            Array::row(b.eigenvalues.clone()),
            Array { rows: n, cols: k, data },
            Array::row(b.mass.clone()),
        ],
    )
}

pub fn basis_from_bytes(bytes: &[u8]) -> Result<SpectralBasis> {
    let (tag, arrays) = decode(bytes)?;
    expect_tag(tag, *b"BASI")?;
    let [values, funcs, mass]: [Array; 3] = arrays.try_into().map_err(|_| shape_error("basis"))?;
    let (n, k) = (funcs.rows, funcs.cols);
    if values.data.len() != k || mass.data.len() != n {
        return Err(shape_error("basis"));
    }
    Ok(SpectralBasis {
        eigenvalues: values.data,
        eigenfunctions: DMatrix::from_row_slice(n, k, &funcs.data),
        mass: mass.data,
    })
}

fn kind_tag(kind: DescriptorKind) -> [u8; 4] {
    match kind {
        DescriptorKind::Hks => *b"HKS ",
        DescriptorKind::Wks => *b"WKS ",
    }
}

pub fn descriptor_to_bytes(f: &DescriptorField) -> Vec<u8> {
    encode(
        kind_tag(f.kind),
        &[Array {
            rows: f.n,
            cols: f.d,
            data: f.values.clone(),
        }],
    )
}

pub fn descriptor_from_bytes(bytes: &[u8]) -> Result<DescriptorField> {
    let (tag, arrays) = decode(bytes)?;
    let kind = match &tag {
        b"HKS " => DescriptorKind::Hks,
        b"WKS " => DescriptorKind::Wks,
        _ => return Err(Error::Parse("not a descriptor container".into())),
    };
    let [a]: [Array; 1] = arrays.try_into().map_err(|_| shape_error("descriptor"))?;
    DescriptorField::new(kind, a.rows, a.cols, a.data)
}

pub fn cost_to_bytes(c: &CostMatrix) -> Vec<u8> {
    encode(
        *b"COST",
        &[
            Array {
                rows: c.m(),
                cols: c.n(),
                data: c.data().to_vec(),
            },
            Array::row(vec![c.tau()]),
        ],
    )
}

pub fn cost_from_bytes(bytes: &[u8]) -> Result<CostMatrix> {
    let (tag, arrays) = decode(bytes)?;
    expect_tag(tag, *b"COST")?;
    let [d, tau]: [Array; 2] = arrays.try_into().map_err(|_| shape_error("cost"))?;
    if tau.data.len() != 1 {
        return Err(shape_error("cost"));
    }
    CostMatrix::new(d.rows, d.cols, d.data, tau.data[0])
}

pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

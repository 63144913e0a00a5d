//! Binary witness fields: a 32-byte header (`ORNF`, version, dimension,
//! up to six axis sizes) followed by little-endian `f64` samples, last axis fastest.

use std::io::{Read, Write};
use std::path::Path;

use ornstein_core::field::{Grid, ScalarField};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"ORNF";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;
pub const MAX_AXES: usize = 6;

pub fn encode(sizes: &[usize], values: &[f64]) -> CliResult<Vec<u8>> {
    if sizes.is_empty() || sizes.len() > MAX_AXES {
        return Err(CliError::Witness(format!("dimension {} outside 1..={MAX_AXES}", sizes.len())));
    }
    if sizes.iter().product::<usize>() != values.len() {
        return Err(CliError::Witness("sample count does not match the sizes".into()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(sizes.len() as u16).to_le_bytes());
    for k in 0..MAX_AXES {
        let n = sizes.get(k).copied().unwrap_or(0);
        let n = u32::try_from(n).map_err(|_| CliError::Witness(format!("axis size {n} too large")))?;
        out.extend_from_slice(&n.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> CliResult<(Vec<usize>, Vec<f64>)> {
    let bad = |m: &str| CliError::Witness(m.to_string());
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing ORNF header"));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    if u16_at(4) != VERSION {
        return Err(bad("unsupported version"));
    }
    let d = u16_at(6) as usize;
    if d == 0 || d > MAX_AXES {
        return Err(bad("bad dimension"));
    }
    let sizes: Vec<usize> = (0..d)
        .map(|k| {
            let i = 8 + 4 * k;
            u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize
        })
        .collect();
    let count = sizes.iter().try_fold(1usize, |a, n| a.checked_mul(*n)).ok_or(bad("size overflow"))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * count {
        return Err(bad("sample count does not match the header"));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((sizes, values))
}

pub fn write_field(w: &mut impl Write, field: &ScalarField) -> CliResult<()> {
    let bytes = encode(field.grid().sizes(), field.values())?;
    w.write_all(&bytes).map_err(|e| CliError::io("<witness>", e))
}

pub fn read_field(r: &mut impl Read) -> CliResult<ScalarField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| CliError::io("<witness>", e))?;
    let (sizes, values) = decode(&bytes)?;
    Ok(ScalarField::from_values(Grid::new(&sizes)?, values, None)?)
}

pub fn load(path: &Path) -> CliResult<ScalarField> {
    let mut f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_field(&mut f)
}

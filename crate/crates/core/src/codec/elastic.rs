//! Elastic integer encoding: zigzag, then base-128 varint.

use crate::error::{Error, Result};

#[inline]
pub fn zigzag(n: i64) -> u64 {
    ((n << 1) ^ (n >> 63)) as u64
}

#[inline]
pub fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

pub fn write_varint(mut v: u64, out: &mut Vec<u8>) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

/// Reads one varint at `*pos`, advancing it.
pub fn read_varint(buf: &[u8], pos: &mut usize) -> Result<u64> {
    let start = *pos;
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let &b = buf
            .get(*pos)
            .ok_or_else(|| Error::corrupt(format!("truncated varint at byte {start}")))?;
        *pos += 1;
        if shift == 63 && b > 1 {
            return Err(Error::corrupt(format!("varint overflow at byte {start}")));
        }
        v |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(Error::corrupt(format!("varint overflow at byte {start}")))
}

pub fn elastic_encode(values: &[i64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        write_varint(zigzag(v), &mut out);
    }
    out
}

/// Decodes exactly `count` values and rejects trailing bytes.
pub fn elastic_decode(buf: &[u8], count: usize) -> Result<Vec<i64>> {
    let mut pos = 0;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(unzigzag(read_varint(buf, &mut pos)?));
    }
    if pos != buf.len() {
        return Err(Error::corrupt(format!(
            "{} trailing bytes after {count} integers",
            buf.len() - pos
        )));
    }
    Ok(out)
}

/// Decodes values until the buffer is exhausted.
pub fn elastic_decode_all(buf: &[u8]) -> Result<Vec<i64>> {
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < buf.len() {
        out.push(unzigzag(read_varint(buf, &mut pos)?));
    }
    Ok(out)
}

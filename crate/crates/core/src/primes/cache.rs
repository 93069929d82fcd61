//! Binary prime table cache.
//!
//! Layout (little endian):
//!   magic "EPTB" | u32 version | u64 limit | u64 count |
//!   LEB128 gaps (first gap from 0, i.e. the prime 2) | u64 trailer = count
//!
//! Gaps rather than absolute values keep the file small (one byte per prime
//! for most of the range); the trailing count guards against truncation.
//! Round-trips are bit-exact: the derived f64 columns are recomputed by the
//! same code path as a fresh sieve.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{PrimeTable, MAX_SIEVE_LIMIT};

const MAGIC: &[u8; 4] = b"EPTB";
const VERSION: u32 = 1;

/// Serialize a table to a writer.
pub fn write_cache<W: Write>(table: &PrimeTable, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&table.limit().to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    let mut prev = 0u64;
    let mut buf = Vec::with_capacity(table.len() + 16);
    for &p in table.primes() {
        let mut gap = p - prev;
        prev = p;
        loop {
            let byte = (gap & 0x7f) as u8;
            gap >>= 7;
            if gap == 0 {
                buf.push(byte);
                break;
            }
            buf.push(byte | 0x80);
        }
    }
    w.write_all(&buf)?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    Ok(())
}

/// Deserialize a table written by [`write_cache`].
pub fn read_cache<R: Read>(mut r: R) -> Result<PrimeTable> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat(format!(
            "bad magic {magic:02x?}, expected {MAGIC:02x?}"
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::CacheFormat(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let limit = read_u64(&mut r)?;
    if limit < 2 || limit > MAX_SIEVE_LIMIT {
        return Err(Error::CacheFormat(format!("implausible limit {limit}")));
    }
    let count = read_u64(&mut r)? as usize;
    let mut primes = Vec::with_capacity(count);
    let mut prev = 0u64;
    for i in 0..count {
        let gap = read_varint(&mut r)
            .map_err(|e| Error::CacheFormat(format!("gap {i}: {e}")))?;
        let p = prev
            .checked_add(gap)
            .filter(|&p| p > prev && p <= limit)
            .ok_or_else(|| Error::CacheFormat(format!("gap {i} leaves range (prev {prev})")))?;
        primes.push(p);
        prev = p;
    }
    let trailer = read_u64(&mut r)?;
    if trailer != count as u64 {
        return Err(Error::CacheFormat(format!(
            "trailer {trailer} does not match count {count}"
        )));
    }
    Ok(PrimeTable::from_primes(limit, primes))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_varint<R: Read>(r: &mut R) -> Result<u64> {
    let mut out = 0u64;
    let mut shift = 0u32;
    loop {
        let mut b = [0u8; 1];
        r.read_exact(&mut b)?;
        if shift >= 63 && b[0] > 1 {
            return Err(Error::CacheFormat("varint overflow".into()));
        }
        out |= ((b[0] & 0x7f) as u64) << shift;
        if b[0] & 0x80 == 0 {
            return Ok(out);
        }
        shift += 7;
    }
}

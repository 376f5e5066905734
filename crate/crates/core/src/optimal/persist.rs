//! Library file format, version 1, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RVLB"
//! 4       2     format version
//! 6       1     width
//! 7       1     gate-library mask (bit 0 N, 1 C, 2 T, 3 S)
//! 8       1     ROM wire count
//! 9       1     ROM control cap per gate, 0xFF = none
//! 10      1     flags (bit 0 complete, bit 1 truncated by budget)
//! 11      1     reserved, 0
//! 12      2     m = largest stored size
//! 14      8(m+1) entry count of each bucket 0..=m
//! ...           payload: bucket 0..=m, each entry = key (u64) then
//!               `size` gate indices (u8), entries sorted by key
//! end-32  32    SHA-256 of the payload
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::library::{Bucket, CircuitLibrary};
use super::LibrarySpec;
use crate::error::{Error, Result};
use crate::gate::GateLibrary;

pub const MAGIC: &[u8; 4] = b"RVLB";
pub const FORMAT_VERSION: u16 = 1;
const NO_CAP: u8 = 0xFF;

fn encode(lib: &CircuitLibrary) -> Vec<u8> {
    let spec = lib.spec();
    let m = lib.max_size();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(spec.width() as u8);
    out.push(spec.library().mask());
    out.push(spec.rom_wires() as u8);
    out.push(spec.max_rom_controls().unwrap_or(NO_CAP));
    out.push(lib.is_complete() as u8 | (lib.is_truncated() as u8) << 1);
    out.push(0);
    out.extend_from_slice(&(m as u16).to_le_bytes());
    for b in &lib.buckets {
        out.extend_from_slice(&(b.len() as u64).to_le_bytes());
    }
    let payload_start = out.len();
    for b in &lib.buckets {
        for pos in 0..b.len() {
            out.extend_from_slice(&b.keys[pos].to_le_bytes());
            out.extend_from_slice(b.circuit(pos));
        }
    }
    let digest = Sha256::digest(&out[payload_start..]);
    out.extend_from_slice(&digest);
    out
}

pub fn save_library(lib: &CircuitLibrary, path: &Path) -> Result<()> {
    let bytes = encode(lib);
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    f.sync_all()?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::CorruptLibrary("file is truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

fn decode(bytes: &[u8]) -> Result<CircuitLibrary> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::CorruptLibrary("bad magic".into()));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch(version));
    }
    let width = r.u8()? as usize;
    let mask = r.u8()?;
    let rom = r.u8()? as usize;
    let cap = r.u8()?;
    let flags = r.u8()?;
    let _reserved = r.u8()?;
    let m = r.u16()? as usize;
    let library = GateLibrary::from_mask(mask)
        .map_err(|_| Error::CorruptLibrary(format!("bad gate-library mask {mask}")))?;
    let cap = (cap != NO_CAP).then_some(cap);
    let spec = if rom == 0 {
        LibrarySpec::full(width, library)
    } else {
        LibrarySpec::rom(rom, width.saturating_sub(rom), library, cap)
    }
    .map_err(|e| Error::CorruptLibrary(format!("bad header: {e}")))?;
    if m > u8::MAX as usize {
        return Err(Error::CorruptLibrary(format!("bucket count {m} too large")));
    }
    let counts = (0..=m).map(|_| r.u64()).collect::<Result<Vec<u64>>>()?;
    let payload_start = r.pos;
    let mut payload_len = 0usize;
    for (s, &c) in counts.iter().enumerate() {
        let per = 8 + s;
        let bytes = usize::try_from(c)
            .ok()
            .and_then(|c| c.checked_mul(per))
            .ok_or_else(|| Error::CorruptLibrary("bucket size overflows".into()))?;
        payload_len = payload_len
            .checked_add(bytes)
            .ok_or_else(|| Error::CorruptLibrary("payload size overflows".into()))?;
    }
    if bytes.len() != payload_start + payload_len + 32 {
        return Err(Error::CorruptLibrary(format!(
            "expected {} bytes, found {}",
            payload_start + payload_len + 32,
            bytes.len()
        )));
    }
    let payload = &bytes[payload_start..payload_start + payload_len];
    if Sha256::digest(payload).as_slice() != &bytes[payload_start + payload_len..] {
        return Err(Error::CorruptLibrary("checksum mismatch".into()));
    }
    let mut buckets = Vec::with_capacity(m + 1);
    for (size, &count) in counts.iter().enumerate() {
        let count = count as usize;
        let mut b = Bucket {
            size,
            keys: Vec::with_capacity(count),
            gates: Vec::with_capacity(count * size),
        };
        for _ in 0..count {
            b.keys.push(r.u64()?);
            b.gates.extend_from_slice(r.take(size)?);
        }
        buckets.push(b);
    }
    let lib = CircuitLibrary::from_buckets(spec, buckets, flags & 1 != 0, flags & 2 != 0);
    lib.verify()?;
    Ok(lib)
}

/// Reads and fully validates a library: checksum, bucket 0, key order,
/// and by simulation that every circuit computes its key under the header's
/// gate set with all prefixes stored.
pub fn load_library(path: &Path) -> Result<CircuitLibrary> {
    decode(&fs::read(path)?)
}

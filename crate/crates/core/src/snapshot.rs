//! Little-endian binary container shared by model snapshots.
//!
//! Layout: 4-byte magic, `u32` format version, then a model-specific body.

use crate::error::{LpartError, Result};

pub const SNAPSHOT_VERSION: u32 = 1;

pub(crate) struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new(magic: &[u8; 4]) -> Self {
        let mut enc = Encoder { buf: Vec::new() };
        enc.buf.extend_from_slice(magic);
        enc.u32(SNAPSHOT_VERSION);
        enc
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.f64(v);
        }
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Decoder<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    /// Checks magic and version and positions the cursor at the body.
    pub fn new(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        let mut dec = Decoder { bytes, pos: 0 };
        let found = dec.take(4)?;
        if found != magic {
            return Err(LpartError::format(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(found),
                    String::from_utf8_lossy(magic)
                ),
            ));
        }
        let version = dec.u32()?;
        if version != SNAPSHOT_VERSION {
            return Err(LpartError::format(4, format!("unsupported snapshot version {version}")));
        }
        Ok(dec)
    }

    pub fn offset(&self) -> u64 {
        self.pos as u64
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(LpartError::format(self.pos as u64, "unexpected end of snapshot")),
        }
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        // Length check up front so a corrupt count cannot trigger a huge allocation.
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| LpartError::format(self.pos as u64, "vector length overflow"))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Fails unless every byte has been consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(LpartError::format(
                self.pos as u64,
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }
}

/// Reads the 4-byte magic of a snapshot without decoding it.
pub fn peek_magic(bytes: &[u8]) -> Option<[u8; 4]> {
    bytes.get(..4).map(|m| m.try_into().unwrap())
}

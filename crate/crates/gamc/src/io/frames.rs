//! `GAMC` frame files.
//!
//! Header: magic `GAMC`, u32 version, u64 frame count, u32 frame length.
//! Record: u16 label id, f32 SNR (dB), then 1024 interleaved (I, Q) f32.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use gamc_core::{Cplx, IqFrame, ModClass, FRAME_LEN};

use super::codec::eof_is_corrupt;
use crate::error::{GamcError, Result};

pub const FRAME_MAGIC: [u8; 4] = *b"GAMC";
pub const FRAME_VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 4 + 4 + 8 + 4;
pub const RECORD_LEN: u64 = 2 + 4 + 8 * FRAME_LEN as u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub version: u32,
    pub count: u64,
    pub frame_len: u32,
}

/// Rounds every sample and the SNR tag to f32, i.e. what a frame looks like
/// after a write/read cycle.
pub fn quantize(frame: &IqFrame) -> IqFrame {
    IqFrame {
        samples: frame
            .samples
            .iter()
            .map(|c| Cplx::new(c.re as f32 as f64, c.im as f32 as f64))
            .collect(),
        label: frame.label,
        snr_db: frame.snr_db as f32 as f64,
    }
}

fn encode_record(frame: &IqFrame, out: &mut Vec<u8>) -> Result<()> {
    if frame.samples.len() != FRAME_LEN {
        return Err(GamcError::Format(format!("frame holds {} samples, expected {FRAME_LEN}", frame.samples.len())));
    }
    out.clear();
    out.extend_from_slice(&frame.label.id().to_le_bytes());
    out.extend_from_slice(&(frame.snr_db as f32).to_le_bytes());
    for c in &frame.samples {
        out.extend_from_slice(&(c.re as f32).to_le_bytes());
        out.extend_from_slice(&(c.im as f32).to_le_bytes());
    }
    Ok(())
}

fn decode_record(buf: &[u8], index: u64) -> Result<IqFrame> {
    let label_id = u16::from_le_bytes([buf[0], buf[1]]);
    let label = ModClass::from_id(label_id)
        .ok_or_else(|| GamcError::Corrupt(format!("frame {index}: label id {label_id} is outside 0..23")))?;
    let snr_db = f32::from_le_bytes(buf[2..6].try_into().unwrap()) as f64;
    let samples = buf[6..]
        .chunks_exact(8)
        .map(|c| {
            let i = f32::from_le_bytes(c[..4].try_into().unwrap());
            let q = f32::from_le_bytes(c[4..].try_into().unwrap());
            Cplx::new(i as f64, q as f64)
        })
        .collect();
    IqFrame::new(samples, label, snr_db).map_err(|e| GamcError::Corrupt(format!("frame {index}: {e}")))
}

/// Streaming writer. The frame count is patched into the header on `finish`.
pub struct FrameWriter<W: Write + Seek> {
    inner: W,
    count: u64,
    scratch: Vec<u8>,
}

impl FrameWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write + Seek> FrameWriter<W> {
    pub fn new(mut inner: W) -> Result<Self> {
        inner.write_all(&FRAME_MAGIC)?;
        inner.write_all(&FRAME_VERSION.to_le_bytes())?;
        inner.write_all(&0u64.to_le_bytes())?;
        inner.write_all(&(FRAME_LEN as u32).to_le_bytes())?;
        Ok(Self { inner, count: 0, scratch: Vec::with_capacity(RECORD_LEN as usize) })
    }

    pub fn write(&mut self, frame: &IqFrame) -> Result<()> {
        encode_record(frame, &mut self.scratch)?;
        self.inner.write_all(&self.scratch)?;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.seek(SeekFrom::Start(8))?;
        self.inner.write_all(&self.count.to_le_bytes())?;
        self.inner.seek(SeekFrom::End(0))?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Random-access reader over fixed-size records.
pub struct FrameReader<R: Read + Seek> {
    inner: R,
    header: FrameHeader,
    scratch: Vec<u8>,
}

impl FrameReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => GamcError::MissingInput(path.display().to_string()),
            _ => GamcError::Io(e),
        })?;
        Self::new(BufReader::new(file))
    }
}

/// Reads until `buf` is full or the input ends; returns the bytes read.
fn fill(r: &mut impl Read, buf: &mut [u8]) -> Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(n)
}

impl<R: Read + Seek> FrameReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut head = [0u8; HEADER_LEN as usize];
        let got = fill(&mut inner, &mut head)?;
        if got < 4 || head[..4] != FRAME_MAGIC {
            return Err(GamcError::Format("bad magic, not a GAMC frame file".into()));
        }
        if got < head.len() {
            return Err(GamcError::Corrupt("frame header is truncated".into()));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != FRAME_VERSION {
            return Err(GamcError::Format(format!("unsupported frame file version {version}")));
        }
        let count = u64::from_le_bytes(head[8..16].try_into().unwrap());
        let frame_len = u32::from_le_bytes(head[16..20].try_into().unwrap());
        if frame_len as usize != FRAME_LEN {
            return Err(GamcError::Format(format!("frame length {frame_len}, expected {FRAME_LEN}")));
        }
        let end = inner.seek(SeekFrom::End(0))?;
        let expected = count
            .checked_mul(RECORD_LEN)
            .and_then(|b| b.checked_add(HEADER_LEN))
            .ok_or_else(|| GamcError::Corrupt("frame count overflows".into()))?;
        if end < expected {
            return Err(GamcError::Corrupt(format!(
                "header declares {count} frames but only {} are present",
                end.saturating_sub(HEADER_LEN) / RECORD_LEN
            )));
        }
        if end > expected {
            return Err(GamcError::Corrupt(format!("{} trailing bytes after {count} frames", end - expected)));
        }
        Ok(Self {
            inner,
            header: FrameHeader { version, count, frame_len },
            scratch: vec![0u8; RECORD_LEN as usize],
        })
    }

    pub fn header(&self) -> FrameHeader {
        self.header
    }

    pub fn len(&self) -> usize {
        self.header.count as usize
    }

    pub fn is_empty(&self) -> bool {
        self.header.count == 0
    }

    fn seek_to(&mut self, index: u64) -> Result<()> {
        if index >= self.header.count {
            return Err(GamcError::Format(format!("frame index {index} out of range")));
        }
        self.inner.seek(SeekFrom::Start(HEADER_LEN + index * RECORD_LEN))?;
        Ok(())
    }

    pub fn read_frame(&mut self, index: usize) -> Result<IqFrame> {
        self.seek_to(index as u64)?;
        self.inner.read_exact(&mut self.scratch).map_err(|e| eof_is_corrupt(e, "frame record"))?;
        decode_record(&self.scratch, index as u64)
    }

    /// Label and SNR of every record, without decoding samples.
    pub fn metadata(&mut self) -> Result<Vec<(ModClass, f64)>> {
        let mut out = Vec::with_capacity(self.len());
        let mut tag = [0u8; 6];
        for i in 0..self.header.count {
            self.seek_to(i)?;
            self.inner.read_exact(&mut tag).map_err(|e| eof_is_corrupt(e, "frame record"))?;
            let id = u16::from_le_bytes([tag[0], tag[1]]);
            let label = ModClass::from_id(id)
                .ok_or_else(|| GamcError::Corrupt(format!("frame {i}: label id {id} is outside 0..23")))?;
            out.push((label, f32::from_le_bytes(tag[2..6].try_into().unwrap()) as f64));
        }
        Ok(out)
    }

    pub fn read_all(&mut self) -> Result<Vec<IqFrame>> {
        (0..self.len()).map(|i| self.read_frame(i)).collect()
    }
}

pub fn write_frames(path: &Path, frames: &[IqFrame]) -> Result<()> {
    let mut w = FrameWriter::create(path)?;
    for f in frames {
        w.write(f)?;
    }
    w.finish()?;
    Ok(())
}

pub fn read_frames(path: &Path) -> Result<Vec<IqFrame>> {
    FrameReader::open(path)?.read_all()
}

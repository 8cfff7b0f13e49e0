//! `GAMF` feature matrix files: magic, u32 version, u64 layout hash,
//! u64 rows, u64 cols, then per row a u16 label, f32 SNR and `cols` f32 values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use gamc_core::{Matrix, ModClass};

use super::codec::eof_is_corrupt;
use crate::error::{GamcError, Result};

pub const FEATURE_MAGIC: [u8; 4] = *b"GAMF";
pub const FEATURE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub layout_hash: u64,
    pub x: Matrix,
    pub labels: Vec<ModClass>,
    pub snr_db: Vec<f64>,
}

impl FeatureTable {
    pub fn label_ids(&self) -> Vec<usize> {
        self.labels.iter().map(|c| c.id() as usize).collect()
    }
}

pub fn write_features(path: &Path, t: &FeatureTable) -> Result<()> {
    if t.labels.len() != t.x.rows() || t.snr_db.len() != t.x.rows() {
        return Err(GamcError::Format("labels, SNR tags and rows disagree in length".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&FEATURE_MAGIC)?;
    w.write_all(&FEATURE_VERSION.to_le_bytes())?;
    w.write_all(&t.layout_hash.to_le_bytes())?;
    w.write_all(&(t.x.rows() as u64).to_le_bytes())?;
    w.write_all(&(t.x.cols() as u64).to_le_bytes())?;
    for i in 0..t.x.rows() {
        w.write_all(&t.labels[i].id().to_le_bytes())?;
        w.write_all(&(t.snr_db[i] as f32).to_le_bytes())?;
        for v in t.x.row(i) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => GamcError::MissingInput(path.display().to_string()),
        _ => GamcError::Io(e),
    })?;
    let len = file.metadata()?.len();
    let mut r = BufReader::new(file);
    let mut head = [0u8; 32];
    r.read_exact(&mut head).map_err(|_| GamcError::Format("file too short for a feature header".into()))?;
    if head[..4] != FEATURE_MAGIC {
        return Err(GamcError::Format("bad magic, not a GAMF feature file".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != FEATURE_VERSION {
        return Err(GamcError::Format(format!("unsupported feature file version {version}")));
    }
    let layout_hash = u64::from_le_bytes(head[8..16].try_into().unwrap());
    let rows = u64::from_le_bytes(head[16..24].try_into().unwrap());
    let cols = u64::from_le_bytes(head[24..32].try_into().unwrap());
    let row_len = 6 + 4 * cols;
    if rows.checked_mul(row_len).and_then(|b| b.checked_add(32)) != Some(len) {
        return Err(GamcError::Corrupt(format!("{rows}x{cols} header does not match the file size {len}")));
    }
    let (rows, cols) = (rows as usize, cols as usize);
    let mut data = Vec::with_capacity(rows * cols);
    let mut labels = Vec::with_capacity(rows);
    let mut snr_db = Vec::with_capacity(rows);
    let mut buf = vec![0u8; row_len as usize];
    for i in 0..rows {
        r.read_exact(&mut buf).map_err(|e| eof_is_corrupt(e, "feature row"))?;
        let id = u16::from_le_bytes([buf[0], buf[1]]);
        labels.push(ModClass::from_id(id).ok_or_else(|| GamcError::Corrupt(format!("row {i}: label id {id}")))?);
        snr_db.push(f32::from_le_bytes(buf[2..6].try_into().unwrap()) as f64);
        data.extend(buf[6..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())));
    }
    Ok(FeatureTable { layout_hash, x: Matrix::new(rows, cols, data)?, labels, snr_db })
}

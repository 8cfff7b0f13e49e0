use std::fs;
use std::io::Cursor;

use gamc::io::{self, FrameReader, FrameWriter, FRAME_MAGIC, RECORD_LEN};
use gamc::GamcError;
use gamc_core::siggen::{generate_frame, DatasetConfig, FrameKey};
use gamc_core::ModClass;

fn frames(n: usize) -> Vec<gamc_core::siggen::IqFrame> {
    let cfg = DatasetConfig::default();
    (0..n)
        .map(|i| {
            let key = FrameKey { class: ModClass::ALL[i % 24], snr_index: i % 16, index: i };
            io::quantize(&generate_frame(&cfg, key, -10.0 + 2.0 * (i % 16) as f64, 5).unwrap())
        })
        .collect()
}

#[test]
fn empty_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.gamc");
    io::write_frames(&p, &[]).unwrap();
    let mut r = FrameReader::open(&p).unwrap();
    assert!(r.is_empty());
    assert!(r.read_all().unwrap().is_empty());
}

#[test]
fn quantized_frames_round_trip_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.gamc");
    let f = frames(3);
    io::write_frames(&p, &f).unwrap();
    let back = io::read_frames(&p).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in f.iter().zip(&back) {
        assert_eq!(a.label, b.label);
        assert_eq!(a.snr_db.to_bits(), b.snr_db.to_bits());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
        }
    }
    let mut r = FrameReader::open(&p).unwrap();
    assert_eq!(r.read_frame(2).unwrap().label, f[2].label);
    assert!(r.read_frame(3).is_err());
}

#[test]
fn streaming_writer_patches_count() {
    let mut w = FrameWriter::new(Cursor::new(Vec::new())).unwrap();
    for f in frames(2) {
        w.write(&f).unwrap();
    }
    let bytes = w.finish().unwrap().into_inner();
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
    assert_eq!(FrameReader::new(Cursor::new(bytes)).unwrap().len(), 2);
}

#[test]
fn truncation_and_trailing_bytes_are_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.gamc");
    io::write_frames(&p, &frames(2)).unwrap();
    let bytes = fs::read(&p).unwrap();
    for cut in [bytes.len() - 1, bytes.len() - RECORD_LEN as usize, 10] {
        fs::write(&p, &bytes[..cut]).unwrap();
        assert!(matches!(FrameReader::open(&p), Err(GamcError::Corrupt(_))), "cut at {cut}");
    }
    let mut longer = bytes.clone();
    longer.push(0);
    fs::write(&p, &longer).unwrap();
    assert!(matches!(FrameReader::open(&p), Err(GamcError::Corrupt(_))));
}

#[test]
fn bad_magic_and_version_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.gamc");
    io::write_frames(&p, &frames(1)).unwrap();
    let bytes = fs::read(&p).unwrap();
    assert_eq!(&bytes[..4], &FRAME_MAGIC);
    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    fs::write(&p, &bad).unwrap();
    assert!(matches!(FrameReader::open(&p), Err(GamcError::Format(_))));
    let mut bad = bytes;
    bad[4] = 99;
    fs::write(&p, &bad).unwrap();
    assert!(matches!(FrameReader::open(&p), Err(GamcError::Format(_))));
    assert!(matches!(FrameReader::open(&dir.path().join("missing")), Err(GamcError::MissingInput(_))));
}

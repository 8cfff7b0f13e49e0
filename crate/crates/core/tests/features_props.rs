use std::sync::OnceLock;

use gamc_core::features::{block_range, FeatureExtractor, FEATURE_DIMS, LAYOUT};
use gamc_core::siggen::{generate_dataset, generate_frame, modulate, ChannelParams, DatasetConfig, FrameKey, SNR_GRID};
use gamc_core::sparse::{learn_pyramid_dictionaries, PyramidConfig};
use gamc_core::{Cplx, IqFrame, ModClass};
use proptest::prelude::*;

fn extractor() -> &'static FeatureExtractor {
    static EXT: OnceLock<FeatureExtractor> = OnceLock::new();
    EXT.get_or_init(|| {
        let frames = generate_dataset(&ModClass::ALL, &[10.0], 3, 21, &DatasetConfig::default()).unwrap();
        let cfg = PyramidConfig::default();
        let dicts = learn_pyramid_dictionaries(&frames, &cfg, 2, 5).unwrap();
        FeatureExtractor::new(dicts, cfg).unwrap()
    })
}

fn class() -> impl Strategy<Value = ModClass> {
    (0u16..24).prop_map(|i| ModClass::from_id(i).unwrap())
}

#[test]
fn zero_frame_has_zero_sparse_block() {
    let v = extractor().extract(&IqFrame::zeros(ModClass::Bpsk)).unwrap();
    assert_eq!(v.values.len(), FEATURE_DIMS);
    assert!(v.values[block_range("sparse_coding_residual").unwrap().start..].iter().all(|&x| x == 0.0));
}

#[test]
fn short_frame_is_rejected() {
    let f = IqFrame { samples: vec![Cplx::new(1.0, 0.0); 10], label: ModClass::Fm, snr_db: 0.0 };
    assert!(extractor().extract(&f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_frame_yields_the_full_finite_layout(c in class(), snr in prop::sample::select(SNR_GRID.to_vec()), idx in 0usize..1000) {
        let f = generate_frame(&DatasetConfig::default(), FrameKey { class: c, snr_index: 0, index: idx }, snr, 3).unwrap();
        let v = extractor().extract(&f).unwrap();
        prop_assert_eq!(v.values.len(), FEATURE_DIMS);
        prop_assert!(v.values.iter().all(|x| x.is_finite()));
        for (name, dims) in LAYOUT {
            prop_assert_eq!(v.block(name).unwrap().len(), dims);
        }
        let w = v.block("wavelet_energy").unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn features_ignore_overall_gain(c in class(), idx in 0usize..1000, e in -3i32..4) {
        let f = generate_frame(&DatasetConfig::default(), FrameKey { class: c, snr_index: 0, index: idx }, 10.0, 4).unwrap();
        let g = IqFrame { samples: f.samples.iter().map(|s| s * 2f64.powi(e)).collect(), ..f.clone() };
        let a = extractor().extract(&f).unwrap().values;
        let b = extractor().extract(&g).unwrap().values;
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "dim {} {} vs {}", i, x, y);
        }
    }

    #[test]
    fn clean_frames_have_unit_power(c in class(), seed in 0u64..10_000, shaping in any::<bool>()) {
        let p = ChannelParams { pulse_shaping: shaping, ..Default::default() };
        let f = modulate(c, 128, &p, seed).unwrap();
        prop_assert_eq!(f.samples.len(), 1024);
        prop_assert!((f.power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn generation_is_deterministic(c in class(), idx in 0usize..100, seed in 0u64..100) {
        let k = FrameKey { class: c, snr_index: 1, index: idx };
        let cfg = DatasetConfig::default();
        prop_assert_eq!(generate_frame(&cfg, k, 4.0, seed).unwrap(), generate_frame(&cfg, k, 4.0, seed).unwrap());
    }
}

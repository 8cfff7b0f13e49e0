use std::collections::BTreeMap;

use gamc_core::rng;
use gamc_core::{IqFrame, ModClass};
use rand::Rng;

use crate::error::{GamcError, Result};

/// Stratified split of `(class, SNR)` tags into sorted train and test index
/// lists. Each stratum is shuffled with its own seeded stream and
/// contributes `round(fraction · n)` frames to train, clamped so both sides
/// get at least one. Strata with fewer than two frames go to train.
pub fn split_indices(tags: &[(ModClass, f64)], train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(GamcError::Config(format!("train_fraction must be in (0, 1), got {train_fraction}")));
    }
    let mut strata: BTreeMap<(u16, i64), Vec<usize>> = BTreeMap::new();
    for (i, &(class, snr)) in tags.iter().enumerate() {
        // SNR keyed in millidecibels so that f32-rounded tags group together
        let key = (class.id(), (snr * 1000.0).round() as i64);
        strata.entry(key).or_default().push(i);
    }
    let mut train = Vec::with_capacity(tags.len());
    let mut test = Vec::new();
    for ((class, snr_mdb), mut idx) in strata {
        let n = idx.len();
        if n < 2 {
            log::warn!("stratum ({}, {} dB) has {n} frame(s); assigned to train", ModClass::from_id(class).unwrap(), snr_mdb as f64 / 1000.0);
            train.extend(idx);
            continue;
        }
        let mut r = rng::stream(seed, &[class as u64, snr_mdb as u64]);
        for i in (1..n).rev() {
            let j = r.random_range(0..=i);
            idx.swap(i, j);
        }
        let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test(frames: Vec<IqFrame>, train_fraction: f64, seed: u64) -> Result<(Vec<IqFrame>, Vec<IqFrame>)> {
    let tags: Vec<(ModClass, f64)> = frames.iter().map(|f| (f.label, f.snr_db)).collect();
    let (train_idx, _) = split_indices(&tags, train_fraction, seed)?;
    let mut is_train = vec![false; frames.len()];
    train_idx.iter().for_each(|&i| is_train[i] = true);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (f, t) in frames.into_iter().zip(is_train) {
        if t {
            train.push(f);
        } else {
            test.push(f);
        }
    }
    Ok((train, test))
}

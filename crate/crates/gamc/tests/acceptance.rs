//! Acceptance run: one PASS/FAIL/SKIP line per criterion.
//!
//! `cargo test -p gamc --test acceptance` runs everything, including the
//! full 12-class desk-scale pipeline (several minutes in release-like test
//! builds). Set `GAMC_ACCEPT_ONLY=name1,name2` to run a subset and
//! `GAMC_RADIOML_FRAMES=path` to enable the real-dataset check. Failures are
//! always printed; `GAMC_ACCEPT_STRICT=1` also turns them into a nonzero exit.

use std::time::Instant;

use gamc::config::RunConfig;
use gamc::pipeline::{self, Dataset};
use gamc::report;
use gamc_core::features::cumulants::{Moments, CUMULANTS};
use gamc_core::features::{extract_all, FEATURE_DIMS};
use gamc_core::gbt::{train_ensemble, BoostParams, Node};
use gamc_core::hier::{count_hierarchy_complexity, spearman};
use gamc_core::rng;
use gamc_core::select::{dft_score, entropy_bits, rank_features, split_loss};
use gamc_core::siggen::constellation::constellation;
use gamc_core::siggen::{generate_frame, DatasetConfig, FrameKey, SNR_GRID};
use gamc_core::sparse::{learn_dictionary, learn_pyramid_dictionaries, omp_encode, Dictionary, PyramidConfig};
use gamc_core::{Cplx, Matrix, ModClass};
use rand::Rng;

struct Outcome {
    name: &'static str,
    status: Option<bool>,
    detail: String,
}

fn outcome(name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { name, status: Some(pass), detail }
}

/// Reference block sizes in layout order, as (label, dims).
const REFERENCE_BLOCKS: [(&str, usize); 16] = [
    ("Amplitude and phase histograms", 248),
    ("Refinement amplitude histogram", 130),
    ("Phase difference histograms", 124),
    ("FFT histograms", 248),
    ("Histogram statistics", 40),
    ("Circular statistics", 3),
    ("High-order cumulants", 40),
    ("Rotational moments", 18),
    ("Eigen structure", 2),
    ("Bispectrum", 4),
    ("Cyclostationary", 16),
    ("Wavelet energy", 16),
    ("Amplitude CDF", 9),
    ("Phase-difference FFT", 128),
    ("Sparse coding residual", 384),
    ("Sparse coding global", 320),
];

fn feature_layout() -> Outcome {
    let cfg = PyramidConfig::default();
    let dcfg = DatasetConfig::default();
    let train: Vec<_> = (0..96)
        .map(|i| generate_frame(&dcfg, FrameKey { class: ModClass::ALL[i % 24], snr_index: 0, index: i }, 10.0, 90).unwrap())
        .collect();
    let dicts = learn_pyramid_dictionaries(&train, &cfg, 3, 1).unwrap();
    let table_ok = gamc_core::features::LAYOUT.iter().zip(REFERENCE_BLOCKS).all(|(a, b)| a.1 == b.1)
        && REFERENCE_BLOCKS.iter().map(|r| r.1).sum::<usize>() == 1730;
    let mut dims_ok = true;
    let mut frames = 0;
    let start = Instant::now();
    for (ci, &c) in ModClass::ALL.iter().enumerate() {
        for (si, &snr) in SNR_GRID.iter().enumerate().step_by(3) {
            let f = generate_frame(&dcfg, FrameKey { class: c, snr_index: si, index: ci }, snr, 91).unwrap();
            let v = extract_all(&f, &dicts, &cfg).unwrap();
            dims_ok &= v.values.len() == FEATURE_DIMS && v.values.iter().all(|x| x.is_finite());
            for ((name, dims), _) in gamc_core::features::LAYOUT.iter().zip(REFERENCE_BLOCKS) {
                dims_ok &= v.block(name).map(<[f64]>::len) == Some(*dims);
            }
            frames += 1;
        }
    }
    let ms = start.elapsed().as_secs_f64() * 1e3 / frames as f64;
    outcome(
        "feature_layout",
        table_ok && dims_ok && ms < 50.0,
        format!("{frames} frames, 1730 dims and reference block sizes: {}, {ms:.2} ms/frame (limit 50)", table_ok && dims_ok),
    )
}

fn symbols(scheme: ModClass, n: usize, seed: u64) -> Vec<Cplx> {
    let pts = constellation(scheme).unwrap();
    let mut r = rng::stream(seed, &[]);
    (0..n).map(|_| pts[r.random_range(0..pts.len())]).collect()
}

fn cumulant_oracles() -> Outcome {
    let ratio = |x: &[Cplx]| {
        let m = Moments::new(x);
        m.cumulant(4, 0).re / m.cumulant(2, 1).re.powi(2)
    };
    let bpsk = ratio(&symbols(ModClass::Bpsk, 100_000, 1));
    let qpsk = ratio(&symbols(ModClass::Qpsk, 100_000, 2));
    let mut r = rng::stream(3, &[]);
    let noise: Vec<Cplx> = (0..100_000).map(|_| rng::complex_normal(&mut r)).collect();
    let m = Moments::new(&noise);
    let worst = CUMULANTS
        .iter()
        .filter(|c| c.0 >= 4)
        .map(|&(p, q)| (p, q, m.cumulant(p, q).norm()))
        .fold((0, 0, 0.0f64), |a, b| if b.2 > a.2 { b } else { a });
    let pass = (bpsk + 2.0).abs() <= 0.1 && (qpsk + 1.0).abs() <= 0.1 && worst.2 <= 0.1;
    outcome(
        "cumulant_oracles",
        pass,
        format!(
            "BPSK C40/C21^2 = {bpsk:.4} (-2 +/- 0.1), QPSK = {qpsk:.4} (-1 +/- 0.1), Gaussian max |C{}{}| = {:.4} (<= 0.1)",
            worst.0, worst.1, worst.2
        ),
    )
}

/// Random unit-norm frame with every pairwise correlation above 0.28 shrunk
/// back towards 0.28 until the coherence settles there; below 1/3, OMP
/// recovers any 2-sparse support exactly.
fn incoherent_dict(dim: usize, n: usize, seed: u64) -> Dictionary {
    const T: f64 = 0.28;
    let mut r = rng::stream(seed, &[]);
    let mut d: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng::normal(&mut r)).collect()).collect();
    let normalize = |v: &mut Vec<f64>| {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= s);
    };
    d.iter_mut().for_each(normalize);
    for _ in 0..2000 {
        let mut next = d.clone();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let g = dot(&d[i], &d[j]);
                if g.abs() > T {
                    let push = 0.5 * (g - T.copysign(g));
                    next[i].iter_mut().zip(&d[j]).for_each(|(a, b)| *a -= push * b);
                }
            }
            normalize(&mut next[i]);
        }
        d = next;
    }
    Dictionary::from_columns(dim, n, d.concat()).unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn omp_correctness() -> Outcome {
    let d = incoherent_dict(16, 64, 17);
    let coherence = (0..64)
        .flat_map(|i| (i + 1..64).map(move |j| (i, j)))
        .map(|(i, j)| dot(d.atom(i), d.atom(j)).abs())
        .fold(0.0, f64::max);
    let mut r = rng::stream(18, &[]);
    let (mut recovered, mut small_residual) = (0, 0);
    for _ in 0..1000 {
        let a = r.random_range(0..64);
        let mut b = r.random_range(0..63);
        if b >= a {
            b += 1;
        }
        let x: Vec<f64> = d.atom(a).iter().zip(d.atom(b)).map(|(u, v)| u - 0.5 * v).collect();
        let code = omp_encode(&x, &d, 2).unwrap();
        let mut s = code.support.clone();
        s.sort();
        recovered += (s == [a.min(b), a.max(b)]) as usize;
        small_residual += (code.residual_norm < 1e-10) as usize;
    }
    let mut k1 = 0;
    for _ in 0..1000 {
        let x: Vec<f64> = (0..16).map(|_| rng::normal(&mut r)).collect();
        let best = (0..64).fold(0, |b, j| if dot(d.atom(j), &x).abs() > dot(d.atom(b), &x).abs() { j } else { b });
        k1 += (omp_encode(&x, &d, 1).unwrap().support == [best]) as usize;
    }
    let pass = recovered >= 990 && small_residual == 1000 && k1 == 1000;
    outcome(
        "omp_correctness",
        pass,
        format!(
            "planted 2-sparse support recovered {recovered}/1000 (>= 990), residual < 1e-10 on {small_residual}/1000, \
             k=1 oracle agreement {k1}/1000; dictionary coherence {coherence:.3}"
        ),
    )
}

fn dictionary_learning() -> Outcome {
    let mut r = rng::stream(30, &[]);
    let windows: Vec<Vec<f64>> = (0..400).map(|_| (0..16).map(|_| rng::normal(&mut r)).collect()).collect();
    let full = learn_dictionary(&windows, 32, 3, 20, 4).unwrap();
    let monotone = full.error_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6));
    let mut worst_norm = 0.0f64;
    for it in 1..=20 {
        let l = learn_dictionary(&windows, 32, 3, it, 4).unwrap();
        for j in 0..32 {
            worst_norm = worst_norm.max((l.dictionary.atom_norm(j) - 1.0).abs());
        }
    }
    let first = full.error_trace[0];
    let last = *full.error_trace.last().unwrap();
    outcome(
        "dictionary_learning",
        monotone && worst_norm < 1e-9,
        format!("error {first:.3} -> {last:.3} over 20 iterations, monotone: {monotone}, max | ||d_j|| - 1 | = {worst_norm:.1e}"),
    )
}

fn exhaustive_loss(col: &[f64], y: &[usize]) -> f64 {
    let k = y.iter().max().unwrap() + 1;
    let mut total = vec![0; k];
    y.iter().for_each(|&c| total[c] += 1);
    let mut best = entropy_bits(&total);
    for &t in col {
        let (mut l, mut rr) = (vec![0; k], vec![0; k]);
        for (v, &c) in col.iter().zip(y) {
            if *v <= t {
                l[c] += 1
            } else {
                rr[c] += 1
            }
        }
        best = best.min(split_loss(&l, &rr));
    }
    best
}

fn dft_planted() -> Outcome {
    let mut hits = 0;
    for trial in 0..100u64 {
        let mut r = rng::stream(trial, &[500]);
        let n = 500;
        let y: Vec<usize> = (0..n).map(|i| i % 4).collect();
        let planted = r.random_range(0..101);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..101).map(|j| if j == planted { y[i] as f64 + 0.5 * rng::normal(&mut r) } else { rng::normal(&mut r) }).collect())
            .collect();
        let ranked = rank_features(&Matrix::from_rows(&rows).unwrap(), &y, 16).unwrap();
        hits += (ranked[0].feature_index == planted) as usize;
    }
    let mut r = rng::stream(501, &[]);
    let mut violations = 0;
    for _ in 0..2000 {
        let n = r.random_range(2..80);
        let k = r.random_range(2..5);
        let col: Vec<f64> = (0..n).map(|_| (rng::normal(&mut r) * 4.0).round() / 2.0).collect();
        let y: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let bins = r.random_range(2..33);
        if dft_score(&col, &y, bins).unwrap() < exhaustive_loss(&col, &y) - 1e-12 {
            violations += 1;
        }
    }
    outcome(
        "dft_planted_feature",
        hits >= 99 && violations == 0,
        format!("planted feature ranked first in {hits}/100 trials (>= 99); grid < exhaustive in {violations}/2000 columns"),
    )
}

fn blobs(n: usize, seed: u64) -> (Matrix, Vec<usize>) {
    let centers = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)];
    let mut r = rng::stream(seed, &[]);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let c = i % 3;
        rows.push(vec![centers[c].0 + 0.6 * rng::normal(&mut r), centers[c].1 + 0.6 * rng::normal(&mut r)]);
        y.push(c);
    }
    (Matrix::from_rows(&rows).unwrap(), y)
}

/// Best first-round gain for class `c` and the lowest (feature, threshold)
/// attaining it within `tol`.
fn oracle_first_split(rows: &[Vec<f64>], y: &[usize], k: usize, c: usize, p: &BoostParams) -> Option<(f64, usize, f64)> {
    let prob = 1.0 / k as f64;
    let g: Vec<f64> = y.iter().map(|&v| prob - (v == c) as u8 as f64).collect();
    let h = prob * (1.0 - prob);
    let (gt, ht) = (g.iter().sum::<f64>(), h * rows.len() as f64);
    let score = |g: f64, h: f64| g * g / (h + p.l2_reg);
    let mut cands = Vec::new();
    for f in 0..rows[0].len() {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let thr = (w[0] + w[1]) / 2.0;
            let (gl, hl) = rows.iter().zip(&g).filter(|(r, _)| r[f] < thr).fold((0.0, 0.0), |a, (_, gi)| (a.0 + gi, a.1 + h));
            if hl < p.min_child_weight || ht - hl < p.min_child_weight {
                continue;
            }
            cands.push((0.5 * (score(gl, hl) + score(gt - gl, ht - hl) - score(gt, ht)), f, thr));
        }
    }
    let best = cands.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if !(best > 1e-9) {
        return None;
    }
    cands.into_iter().find(|t| t.0 >= best - 1e-9 * best.abs().max(1.0))
}

fn gbt() -> Outcome {
    let (x, y) = blobs(300, 40);
    let ens = train_ensemble(&x, &y, &BoostParams::default(), 0).unwrap();
    let acc = (0..x.rows()).filter(|&i| ens.predict_class(x.row(i)).unwrap() == y[i]).count() as f64 / 3.0;
    let monotone_blobs = ens.train_loss.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let depth_ok = ens.trees.iter().all(|t| t.depth() <= 2);

    // noisy, overlapping data exercises monotonicity where the fit cannot be perfect
    let mut r = rng::stream(41, &[]);
    let rows: Vec<Vec<f64>> = (0..400).map(|_| (0..5).map(|_| rng::normal(&mut r)).collect()).collect();
    let yn: Vec<usize> = rows.iter().map(|v| ((v[0] + v[1] + rng::normal(&mut r)) > 0.0) as usize + 2 * (v[2] > 0.5) as usize).collect();
    let noisy = train_ensemble(&Matrix::from_rows(&rows).unwrap(), &yn, &BoostParams::default(), 0).unwrap();
    let monotone_noisy = noisy.train_loss.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let depth_ok = depth_ok && noisy.trees.iter().all(|t| t.depth() <= 2);

    let mut matched = 0;
    let mut total = 0;
    let p1 = BoostParams { n_rounds: 1, ..Default::default() };
    for trial in 0..500u64 {
        let mut r = rng::stream(trial, &[42]);
        let n = r.random_range(2..=8);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![r.random_range(0..2) as f64, r.random_range(0..2) as f64]).collect();
        let y: Vec<usize> = (0..n).map(|_| r.random_range(0..3)).collect();
        let mut classes = y.clone();
        classes.sort();
        classes.dedup();
        if classes.len() < 2 {
            continue;
        }
        let slot: Vec<usize> = y.iter().map(|v| classes.iter().position(|c| c == v).unwrap()).collect();
        let ens = train_ensemble(&Matrix::from_rows(&rows).unwrap(), &y, &p1, 0).unwrap();
        for c in 0..classes.len() {
            total += 1;
            let oracle = oracle_first_split(&rows, &slot, classes.len(), c, &p1);
            let ok = match (ens.tree(0, c).nodes[0], oracle) {
                (Node::Leaf { .. }, None) => true,
                (Node::Split { feature, threshold, .. }, Some((_, f, t))) => feature as usize == f && threshold == t,
                _ => false,
            };
            matched += ok as usize;
        }
    }
    outcome(
        "gbt",
        monotone_blobs && monotone_noisy && acc >= 98.0 && matched == total && depth_ok,
        format!(
            "loss monotone over 100 rounds: blobs {monotone_blobs}, noisy {monotone_noisy}; blob training accuracy {acc:.2}% (>= 98); \
             first split equals exhaustive oracle {matched}/{total}; all depths <= 2: {depth_ok}"
        ),
    )
}

fn complexity() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.data.frames_per_cell = 6;
    cfg.dictionary.frames = 128;
    cfg.dictionary.iterations = 3;
    let mut ds = Dataset::synthetic(&cfg).unwrap();
    let trained = pipeline::train(&cfg, &mut ds).unwrap();
    let m = trained.model;
    let h = count_hierarchy_complexity(&m.model);
    let rep = report::complexity(&m);
    let rounds_ok = std::iter::once(&m.model.coarse)
        .chain(m.model.refinements.iter().filter_map(|r| r.ensemble()))
        .all(|e| e.n_rounds() == 100 && e.max_depth() <= 2);
    let params_ok = h.param_count * 5 >= report::REFERENCE_PARAMS && h.param_count <= 5 * report::REFERENCE_PARAMS;
    let flops_ok = h.classifier_flops * 5 >= report::REFERENCE_FLOPS && h.classifier_flops <= 5 * report::REFERENCE_FLOPS;
    let distinct = rep.pipeline_flops() > rep.classifier_flops && rep.classifier_flops == h.classifier_flops;
    outcome(
        "complexity_accounting",
        rounds_ok && params_ok && flops_ok && distinct,
        format!(
            "24-class hierarchy, 4 ensembles x 100 rounds: {} params (27,000 x [1/5, 5]), classifier-only {} FLOPs (8,100 x [1/5, 5]), \
             pipeline total {} FLOPs reported separately",
            h.param_count,
            h.classifier_flops,
            rep.pipeline_flops()
        ),
    )
}

fn desk_e2e() -> Outcome {
    let start = Instant::now();
    let mut cfg = RunConfig::default();
    cfg.data.classes = ["OOK", "ASK4", "ASK8", "BPSK", "QPSK", "PSK8", "QAM16", "QAM64", "APSK16", "FM", "GMSK", "AM-DSB-SC"]
        .map(String::from)
        .to_vec();
    cfg.data.frames_per_cell = 500;
    cfg.data.fading = false;
    let mut ds = Dataset::synthetic(&cfg).unwrap();
    let trained = pipeline::train(&cfg, &mut ds).unwrap();
    let rep = pipeline::evaluate(&trained.model, &mut ds, &trained.test_idx).unwrap();
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    let meta = report::ReportMeta::of(&trained.model);
    print!("{}", report::render_text(&rep, &meta));

    let coarse_hi = rep.rows.iter().filter(|r| r.snr_db >= 10.0).map(|r| r.coarse_acc).fold(f64::INFINITY, f64::min);
    let overall_20 = rep.row(20.0).map_or(0.0, |r| r.overall_acc);
    let sound = rep.rows.iter().all(|r| r.overall_acc <= r.coarse_acc);
    let snrs: Vec<f64> = rep.rows.iter().map(|r| r.snr_db).collect();
    let accs: Vec<f64> = rep.rows.iter().map(|r| r.overall_acc).collect();
    let rho = spearman(&snrs, &accs);
    let pass = rep.rows.len() == 16 && coarse_hi >= 95.0 && overall_20 >= 80.0 && sound && rho >= 0.9 && minutes <= 30.0;
    outcome(
        "desk_scale_end_to_end",
        pass,
        format!(
            "min coarse accuracy at SNR >= 10 dB {coarse_hi:.2}% (>= 95); overall at 20 dB {overall_20:.2}% (>= 80); \
             overall <= coarse on all {} rows: {sound}; Spearman(SNR, overall) {rho:.3} (>= 0.9); wall time {minutes:.1} min (<= 30)",
            rep.rows.len()
        ),
    )
}

fn real_dataset() -> Outcome {
    let name = "real_dataset_note";
    let Ok(path) = std::env::var("GAMC_RADIOML_FRAMES") else {
        return Outcome {
            name,
            status: None,
            detail: "published per-SNR accuracies (83.27% at 20 dB) need RadioML 2018.01A and are not reproducible from \
                     synthesis; set GAMC_RADIOML_FRAMES to a converted, 10%-subsampled frame file to run the +/- 8 pp check"
                .into(),
        };
    };
    let mut cfg = RunConfig::default();
    cfg.data.train = Some(path.clone());
    let mut ds = Dataset::open(std::path::Path::new(&path)).unwrap();
    let trained = pipeline::train(&cfg, &mut ds).unwrap();
    let rep = pipeline::evaluate(&trained.model, &mut ds, &trained.test_idx).unwrap();
    let acc = rep.row(20.0).map_or(0.0, |r| r.overall_acc);
    outcome(name, (acc - 83.27).abs() <= 8.0, format!("overall accuracy at 20 dB {acc:.2}% (83.27 +/- 8)"))
}

fn main() {
    let only: Option<Vec<String>> = std::env::var("GAMC_ACCEPT_ONLY").ok().map(|v| v.split(',').map(String::from).collect());
    let checks: [(&str, fn() -> Outcome); 9] = [
        ("feature_layout", feature_layout),
        ("cumulant_oracles", cumulant_oracles),
        ("omp_correctness", omp_correctness),
        ("dictionary_learning", dictionary_learning),
        ("dft_planted_feature", dft_planted),
        ("gbt", gbt),
        ("complexity_accounting", complexity),
        ("desk_scale_end_to_end", desk_e2e),
        ("real_dataset_note", real_dataset),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        if only.as_ref().is_some_and(|o| !o.iter().any(|n| n == name)) {
            continue;
        }
        let o = check();
        let tag = match o.status {
            Some(true) => "PASS",
            Some(false) => {
                failed += 1;
                "FAIL"
            }
            None => "SKIP",
        };
        println!("ACCEPTANCE {tag} {}: {}", o.name, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        if std::env::var("GAMC_ACCEPT_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}

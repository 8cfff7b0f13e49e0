//! `GAMM` model files.
//!
//! Magic, u32 version, then a payload of length-prefixed sections and a
//! trailing SHA-256 of the payload. Floats are little-endian f64.

use std::path::Path;

use gamc_core::features::layout_hash;
use gamc_core::gbt::{BoostParams, Node, RegressionTree, TreeEnsemble};
use gamc_core::hier::{Group, GroupMap, HierarchicalModel, Refinement};
use gamc_core::sparse::{Dictionary, PyramidConfig, PyramidDictionaries};
use gamc_core::ModClass;
use sha2::{Digest, Sha256};

use super::codec::{Dec, Enc};
use crate::config::RunConfig;
use crate::error::{GamcError, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"GAMM";
pub const MODEL_VERSION: u32 = 1;

/// Everything needed to classify raw frames.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    /// Training configuration, TOML.
    pub config_toml: String,
    pub pyramid: PyramidConfig,
    pub layout_hash: u64,
    pub dictionaries: PyramidDictionaries,
    /// Columns of the full feature vector fed to the ensembles, in order.
    pub selected_features: Vec<usize>,
    pub model: HierarchicalModel,
}

impl ModelFile {
    pub fn config(&self) -> Result<RunConfig> {
        RunConfig::from_toml(&self.config_toml)
    }

    pub fn config_hash(&self) -> String {
        crate::config::hash_text(&self.config_toml)
    }
}

fn put_pyramid(e: &mut Enc, p: &PyramidConfig) {
    e.len(p.global_length);
    e.len(p.atom_count);
    e.len(p.ratio);
    e.len(p.residual_levels.len());
    for &(l, w) in &p.residual_levels {
        e.len(l);
        e.len(w);
    }
    e.usizes(&p.sparsity_set_global);
    e.usizes(&p.sparsity_set_residual);
}

fn get_pyramid(d: &mut Dec) -> Result<PyramidConfig> {
    let global_length = d.u64()? as usize;
    let atom_count = d.u64()? as usize;
    let ratio = d.u64()? as usize;
    let n = d.len(16)?;
    let residual_levels = (0..n).map(|_| Ok((d.u64()? as usize, d.u64()? as usize))).collect::<Result<_>>()?;
    Ok(PyramidConfig {
        global_length,
        residual_levels,
        sparsity_set_global: d.usizes()?,
        sparsity_set_residual: d.usizes()?,
        atom_count,
        ratio,
    })
}

fn put_dict(e: &mut Enc, dict: &Dictionary) {
    e.len(dict.dim());
    e.len(dict.n_atoms());
    dict.as_slice().iter().for_each(|&v| e.f64(v));
}

fn get_dict(d: &mut Dec) -> Result<Dictionary> {
    let dim = d.u64()? as usize;
    let n_atoms = d.u64()? as usize;
    let count = dim.checked_mul(n_atoms).ok_or_else(|| GamcError::Corrupt("dictionary shape".into()))?;
    if count.saturating_mul(8) > d.remaining() {
        return Err(GamcError::Corrupt("dictionary runs past the end of the file".into()));
    }
    let atoms = (0..count).map(|_| d.f64()).collect::<Result<Vec<_>>>()?;
    Ok(Dictionary::from_columns(dim, n_atoms, atoms)?)
}

fn put_params(e: &mut Enc, p: &BoostParams) {
    e.f64(p.learning_rate);
    e.len(p.max_depth);
    e.len(p.n_rounds);
    e.f64(p.min_child_weight);
    e.f64(p.l2_reg);
}

fn get_params(d: &mut Dec) -> Result<BoostParams> {
    Ok(BoostParams {
        learning_rate: d.f64()?,
        max_depth: d.u64()? as usize,
        n_rounds: d.u64()? as usize,
        min_child_weight: d.f64()?,
        l2_reg: d.f64()?,
    })
}

fn put_tree(e: &mut Enc, t: &RegressionTree) {
    e.len(t.nodes.len());
    for n in &t.nodes {
        match *n {
            Node::Split { feature, threshold, left, right } => {
                e.u8(0);
                e.u32(feature);
                e.f64(threshold);
                e.u32(left);
                e.u32(right);
            }
            Node::Leaf { value } => {
                e.u8(1);
                e.f64(value);
            }
        }
    }
}

fn get_tree(d: &mut Dec) -> Result<RegressionTree> {
    let n = d.len(9)?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        nodes.push(match d.u8()? {
            0 => Node::Split { feature: d.u32()?, threshold: d.f64()?, left: d.u32()?, right: d.u32()? },
            1 => Node::Leaf { value: d.f64()? },
            t => return Err(GamcError::Corrupt(format!("unknown node tag {t}"))),
        });
    }
    let tree = RegressionTree { nodes };
    if !tree.is_well_formed() {
        return Err(GamcError::Corrupt("malformed tree".into()));
    }
    Ok(tree)
}

fn put_ensemble(e: &mut Enc, ens: &TreeEnsemble) {
    e.len(ens.n_classes);
    e.len(ens.n_features);
    put_params(e, &ens.params);
    e.usizes(&ens.class_labels);
    e.f64s(&ens.train_loss);
    e.len(ens.trees.len());
    ens.trees.iter().for_each(|t| put_tree(e, t));
}

fn get_ensemble(d: &mut Dec) -> Result<TreeEnsemble> {
    let n_classes = d.u64()? as usize;
    let n_features = d.u64()? as usize;
    let params = get_params(d)?;
    let class_labels = d.usizes()?;
    let train_loss = d.f64s()?;
    let n_trees = d.len(8)?;
    let trees = (0..n_trees).map(|_| get_tree(d)).collect::<Result<Vec<_>>>()?;
    if class_labels.len() != n_classes || (n_classes > 0 && n_trees % n_classes != 0) {
        return Err(GamcError::Corrupt("ensemble shape is inconsistent".into()));
    }
    if trees.iter().filter_map(|t| t.max_feature()).any(|f| f >= n_features) {
        return Err(GamcError::Corrupt("tree references a feature past the ensemble width".into()));
    }
    Ok(TreeEnsemble { trees, n_classes, n_features, params, class_labels, train_loss })
}

fn encode_payload(m: &ModelFile) -> Vec<u8> {
    let mut e = Enc::default();
    e.str(&m.config_toml);
    put_pyramid(&mut e, &m.pyramid);
    e.u64(m.layout_hash);
    put_dict(&mut e, &m.dictionaries.global);
    e.len(m.dictionaries.residual.len());
    m.dictionaries.residual.iter().for_each(|d| put_dict(&mut e, d));
    e.usizes(&m.selected_features);
    m.model.group_map.as_array().iter().for_each(|g| e.u8(*g as u8));
    e.len(m.model.notes.len());
    m.model.notes.iter().for_each(|n| e.str(n));
    put_ensemble(&mut e, &m.model.coarse);
    for r in &m.model.refinements {
        match r {
            Refinement::Skipped => e.u8(0),
            Refinement::Single(c) => {
                e.u8(1);
                e.u16(c.id());
            }
            Refinement::Ensemble(ens) => {
                e.u8(2);
                put_ensemble(&mut e, ens);
            }
        }
    }
    e.buf
}

fn decode_payload(buf: &[u8]) -> Result<ModelFile> {
    let mut d = Dec::new(buf);
    let config_toml = d.str()?;
    let pyramid = get_pyramid(&mut d)?;
    let stored_hash = d.u64()?;
    let global = get_dict(&mut d)?;
    let n_res = d.len(16)?;
    let residual = (0..n_res).map(|_| get_dict(&mut d)).collect::<Result<Vec<_>>>()?;
    let selected_features = d.usizes()?;
    let mut groups = [Group::Amp; ModClass::COUNT];
    for g in groups.iter_mut() {
        let id = d.u8()?;
        *g = Group::from_id(id as usize).ok_or_else(|| GamcError::Corrupt(format!("unknown group id {id}")))?;
    }
    let group_map = GroupMap::from_groups(groups)?;
    let n_notes = d.len(8)?;
    let notes = (0..n_notes).map(|_| d.str()).collect::<Result<Vec<_>>>()?;
    let coarse = get_ensemble(&mut d)?;
    let mut refinements = [Refinement::Skipped, Refinement::Skipped, Refinement::Skipped];
    for r in refinements.iter_mut() {
        *r = match d.u8()? {
            0 => Refinement::Skipped,
            1 => {
                let id = d.u16()?;
                Refinement::Single(ModClass::from_id(id).ok_or_else(|| GamcError::Corrupt(format!("label id {id}")))?)
            }
            2 => Refinement::Ensemble(get_ensemble(&mut d)?),
            t => return Err(GamcError::Corrupt(format!("unknown refinement tag {t}"))),
        };
    }
    if d.remaining() != 0 {
        return Err(GamcError::Corrupt(format!("{} unread payload bytes", d.remaining())));
    }
    let width = selected_features.len();
    if coarse.n_features != width || refinements.iter().filter_map(Refinement::ensemble).any(|e| e.n_features != width) {
        return Err(GamcError::Corrupt("ensemble width differs from the selected feature count".into()));
    }
    let actual = layout_hash(&pyramid);
    if actual != stored_hash {
        return Err(GamcError::LayoutMismatch { expected: stored_hash, got: actual });
    }
    Ok(ModelFile {
        config_toml,
        pyramid,
        layout_hash: stored_hash,
        dictionaries: PyramidDictionaries { global, residual },
        selected_features,
        model: HierarchicalModel { coarse, refinements, group_map, notes },
    })
}

pub fn encode_model(m: &ModelFile) -> Vec<u8> {
    let payload = encode_payload(m);
    let mut out = Vec::with_capacity(payload.len() + 40);
    out.extend_from_slice(&MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<ModelFile> {
    if bytes.len() < 8 || bytes[..4] != MODEL_MAGIC {
        return Err(GamcError::Format("bad magic, not a GAMM model file".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != MODEL_VERSION {
        return Err(GamcError::Format(format!(
            "model file version {version} is not supported (this build reads version {MODEL_VERSION})"
        )));
    }
    if bytes.len() < 8 + 32 {
        return Err(GamcError::Corrupt("model file is truncated".into()));
    }
    let (payload, digest) = bytes[8..].split_at(bytes.len() - 8 - 32);
    if Sha256::digest(payload).as_slice() != digest {
        return Err(GamcError::Corrupt("checksum mismatch (truncated or modified file)".into()));
    }
    decode_payload(payload)
}

pub fn write_model(path: &Path, m: &ModelFile) -> Result<()> {
    std::fs::write(path, encode_model(m))?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => GamcError::MissingInput(path.display().to_string()),
        _ => GamcError::Io(e),
    })?;
    decode_model(&bytes)
}

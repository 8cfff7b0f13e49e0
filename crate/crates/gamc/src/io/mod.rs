//! On-disk formats and train/test splitting. All integers and floats are
//! little-endian.

mod codec;
pub mod features;
pub mod frames;
pub mod model;
mod split;

pub use features::{read_features, write_features, FeatureTable};
pub use frames::{quantize, read_frames, write_frames, FrameHeader, FrameReader, FrameWriter, FRAME_MAGIC, FRAME_VERSION, RECORD_LEN};
pub use model::{decode_model, encode_model, read_model, write_model, ModelFile, MODEL_MAGIC, MODEL_VERSION};
pub use split::{split_indices, split_train_test};

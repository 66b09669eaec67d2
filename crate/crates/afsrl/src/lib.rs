//! AFSRL: self-supervised point cloud representation learning that fuses
//! subsampled kNN-graph data augmentation with Gaussian encoder-weight
//! feature augmentation under dual NT-Xent contrastive objectives.

pub mod augment;
pub mod error;
pub mod eval;
pub mod knn;
pub mod loss;
pub mod model;
pub mod pointcloud;
pub mod selftest;
pub mod tape;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};

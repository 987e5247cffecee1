//! Simplicial map neural networks: a classifier defined by the Delaunay
//! triangulation of a support set, a barycentric embedding of the input
//! space, and a trainable matrix of per-vertex class weights.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod datagen;
pub mod embedding;
pub mod error;
pub mod explain;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod persist;
pub mod sampling;
pub mod scalar;
pub mod training;

pub use datagen::LabeledDataset;
pub use embedding::fit_space;
pub use error::{Error, Result};
pub use explain::{explain, render_explanation_svg};
pub use metrics::{evaluate, EvalReport};
pub use model::{InitMode, LabelEncoding};
pub use persist::{load_model, save_model, ModelFile, Provenance};
pub use sampling::{epsilon_representative, SamplerConfig};
pub use scalar::Real;
pub use training::{train, TrainConfig, TrainReport};

pub type PointCloud = geometry::PointCloud<f64>;
pub type Triangulation = geometry::Triangulation<f64>;
pub type EmbeddingSpace = embedding::EmbeddingSpace<f64>;
pub type SparseXi = embedding::SparseXi<f64>;
pub type Weights = model::Weights<f64>;
pub type Model = model::SmnnModel<f64>;
pub type Explanation = explain::Explanation<f64>;

pub type Model32 = model::SmnnModel<f32>;

//! Self-describing JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryFacet, PointCloud, Simplex, Triangulation};
use crate::model::{LabelEncoding, SmnnModel, Weights};
use crate::sampling::SamplerConfig;
use crate::scalar::Real;
use crate::training::TrainConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// How a model was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(flatten)]
    pub train: TrainConfig,
    /// Sampler used to pick the support set; `None` for a given index list.
    pub sampler: Option<SamplerConfig>,
    /// Cover radius the sampler resolved to.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetRecord {
    pub facet_ids: Vec<usize>,
    pub opposite_id: usize,
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub dim: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub centroid: Vec<f64>,
    pub radius: f64,
    /// Support points in the centred frame, one row per point.
    pub support_points: Vec<Vec<f64>>,
    pub support_labels: Vec<usize>,
    /// Training-set rows the support points came from.
    pub support_rows: Vec<usize>,
    pub simplices: Vec<Vec<usize>>,
    pub boundary: Vec<FacetRecord>,
    /// `k x m`, row-major.
    pub weights: Vec<f64>,
    pub provenance: Provenance,
}

impl ModelFile {
    pub fn from_model<T: Real>(model: &SmnnModel<T>, provenance: Provenance) -> Self {
        let f = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
        let space = &model.space;
        let tri = space.triangulation();
        ModelFile {
            schema_version: SCHEMA_VERSION,
            dim: space.dim(),
            k: model.k(),
            labels: model.encoding.labels().to_vec(),
            centroid: f(space.centroid()),
            radius: space.radius().as_f64(),
            support_points: space.support().iter().map(f).collect(),
            support_labels: model.support_labels.clone(),
            support_rows: space.support_rows().to_vec(),
            simplices: tri.maximal().iter().map(|s| s.vertex_ids.clone()).collect(),
            boundary: tri
                .boundary()
                .iter()
                .map(|b| FacetRecord {
                    facet_ids: b.facet_ids.clone(),
                    opposite_id: b.opposite_id,
                    normal: f(&b.normal),
                    offset: b.offset.as_f64(),
                })
                .collect(),
            weights: f(model.weights.as_row_major()),
            provenance,
        }
    }

    pub fn into_model<T: Real>(self) -> Result<SmnnModel<T>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        let t = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        let m = self.support_points.len();
        if self.support_points.iter().any(|p| p.len() != self.dim) {
            return Err(Error::InvalidModel("support point has wrong dimension".into()));
        }
        let flat: Vec<f64> = self.support_points.concat();
        let cloud = PointCloud::new(self.dim, t(&flat))
            .map_err(|e| Error::InvalidModel(e.to_string()))?;
        let boundary = self
            .boundary
            .iter()
            .map(|b| BoundaryFacet {
                facet_ids: b.facet_ids.clone(),
                opposite_id: b.opposite_id,
                normal: t(&b.normal),
                offset: T::lit(b.offset),
            })
            .collect();
        let simplices = self.simplices.into_iter().map(Simplex::new).collect();
        let tri = Triangulation::from_parts(cloud, simplices, boundary)?;
        let space = EmbeddingSpace::from_parts(t(&self.centroid), T::lit(self.radius), self.support_rows, tri)?;
        let encoding = LabelEncoding::new(self.labels)?;
        if encoding.k() != self.k {
            return Err(Error::InvalidModel("k does not match the label list".into()));
        }
        let weights = Weights::from_row_major(self.k, m, t(&self.weights))?;
        SmnnModel::new(space, encoding, weights, self.support_labels)
    }
}

pub fn save_model<T: Real>(model: &SmnnModel<T>, provenance: &Provenance, path: impl AsRef<Path>) -> Result<()> {
    let file = ModelFile::from_model(model, provenance.clone());
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<(SmnnModel<T>, Provenance)> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    let provenance = file.provenance.clone();
    Ok((file.into_model()?, provenance))
}

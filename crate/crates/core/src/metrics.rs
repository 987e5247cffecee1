//! Accuracy, loss and confusion counts over a labelled dataset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::model::{argmax, cross_entropy, SmnnModel};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub mean_loss: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Points embedded through the sphere vertex, including those outside
    /// the ball.
    pub n_out_of_hull: usize,
    /// Points outside the ball, scored as misclassified at chance-level loss.
    pub n_outside_ball: usize,
}

enum Outcome {
    Scored { predicted: usize, loss: f64, out_of_hull: bool },
    OutsideBall,
}

/// Scores every row. Rows outside the ball count as wrong (predicted as the
/// lowest class other than the true one) with loss `ln k`.
pub fn evaluate<T: Real, S: AsRef<str> + Sync>(
    model: &SmnnModel<T>,
    points: &PointCloud<T>,
    labels: &[S],
) -> Result<EvalReport> {
    if points.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: points.dim(),
        });
    }
    if labels.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: labels.len(),
        });
    }
    let truth = model.encoding.encode_all(labels)?;
    let outcomes = (0..points.len())
        .into_par_iter()
        .map(|i| match model.xi(points.point(i)) {
            Ok(xi) => {
                let s = model.forward_xi(&xi);
                Ok(Outcome::Scored {
                    predicted: argmax(&s),
                    loss: cross_entropy(&s, truth[i]).as_f64(),
                    out_of_hull: xi.is_out_of_hull(),
                })
            }
            Err(Error::OutsideBall { .. }) => Ok(Outcome::OutsideBall),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;

    let k = model.k();
    let chance = (k as f64).ln();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut loss_sum = 0.0;
    let mut n_out_of_hull = 0;
    let mut n_outside_ball = 0;
    for (o, &y) in outcomes.iter().zip(&truth) {
        match *o {
            Outcome::Scored { predicted, loss, out_of_hull } => {
                confusion[y][predicted] += 1;
                loss_sum += loss;
                n_out_of_hull += usize::from(out_of_hull);
            }
            Outcome::OutsideBall => {
                confusion[y][usize::from(y == 0)] += 1;
                loss_sum += chance;
                n_out_of_hull += 1;
                n_outside_ball += 1;
            }
        }
    }
    let n = points.len();
    let correct: usize = (0..k).map(|j| confusion[j][j]).sum();
    let denom = n.max(1) as f64;
    Ok(EvalReport {
        n,
        accuracy: correct as f64 / denom,
        mean_loss: loss_sum / denom,
        confusion,
        n_out_of_hull,
        n_outside_ball,
    })
}

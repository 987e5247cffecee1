//! Instance-based explanations: which support points carry a prediction and
//! how much each adds to every class logit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{argmax, SmnnModel};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contributor<T> {
    pub support_index: usize,
    /// Support point in original coordinates.
    pub coordinates: Vec<T>,
    pub label: String,
    pub xi_value: T,
    /// Entry `j` is `W[j][t] * xi_t`.
    pub contributions: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation<T> {
    pub query: Vec<T>,
    pub predicted_label: String,
    pub probabilities: Vec<T>,
    pub contributors: Vec<Contributor<T>>,
    /// Weight on the sphere vertex, i.e. mass assigned outside the data hull.
    pub sphere_mass: T,
    pub out_of_hull: bool,
}

impl<T: Real> Explanation<T> {
    /// Per-class sum of the contributions, equal to the logits.
    pub fn logits(&self) -> Vec<T> {
        let k = self.probabilities.len();
        let mut z = vec![T::zero(); k];
        for c in &self.contributors {
            for (zj, &v) in z.iter_mut().zip(&c.contributions) {
                *zj += v;
            }
        }
        z
    }
}

pub fn explain<T: Real>(model: &SmnnModel<T>, x_raw: &[T]) -> Result<Explanation<T>> {
    let xi = model.xi(x_raw)?;
    let probabilities = model.forward_xi(&xi);
    let contributors = xi
        .entries
        .iter()
        .map(|&(t, v)| Contributor {
            support_index: t,
            coordinates: model.space.support_original(t),
            label: model.encoding.label(model.support_labels[t]).to_owned(),
            xi_value: v,
            contributions: model.weights.column(t).into_iter().map(|p| p * v).collect(),
        })
        .collect();
    Ok(Explanation {
        query: x_raw.to_vec(),
        predicted_label: model.encoding.label(argmax(&probabilities)).to_owned(),
        probabilities,
        contributors,
        sphere_mass: xi.sphere_mass,
        out_of_hull: xi.is_out_of_hull(),
    })
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

/// Grouped bar chart: one group per contributor, one bar per class, bar
/// height proportional to the signed contribution.
pub fn render_explanation_svg<T: Real>(e: &Explanation<T>, class_names: &[String]) -> String {
    let k = class_names.len().max(1);
    let bar_w = 18.0;
    let gap = 24.0;
    let left = 60.0;
    let group_w = bar_w * k as f64 + gap;
    let plot_h = 240.0;
    let top = 40.0;
    let width = left + group_w * e.contributors.len().max(1) as f64 + 140.0;
    let height = top + plot_h + 60.0;

    let values: Vec<f64> = e
        .contributors
        .iter()
        .flat_map(|c| c.contributions.iter().map(|v| v.as_f64()))
        .collect();
    let max = values.iter().fold(0.0f64, |a, &v| a.max(v));
    let min = values.iter().fold(0.0f64, |a, &v| a.min(v));
    let span = if max - min > 0.0 { max - min } else { 1.0 };
    let scale = plot_h / span;
    let axis_y = top + max * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{left:.1}" y="20" font-family="sans-serif" font-size="13">predicted {} (sphere mass {:.4})</text>"#,
        escape(&e.predicted_label),
        e.sphere_mass.as_f64()
    );
    for (g, c) in e.contributors.iter().enumerate() {
        let x0 = left + g as f64 * group_w;
        for (j, v) in c.contributions.iter().enumerate() {
            let v = v.as_f64();
            let h = (v.abs() * scale).max(0.0);
            let y = if v >= 0.0 { axis_y - h } else { axis_y };
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{:.3}" y="{y:.3}" width="{bar_w:.1}" height="{h:.3}" fill="{}"><title>{}: {v:.6}</title></rect>"#,
                x0 + j as f64 * bar_w,
                PALETTE[j % PALETTE.len()],
                escape(class_names.get(j).map_or("", String::as_str)),
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">u{} ({})</text>"#,
            x0 + bar_w * k as f64 / 2.0,
            top + plot_h + 20.0,
            c.support_index,
            escape(&c.label)
        );
    }
    let axis_end = left + group_w * e.contributors.len().max(1) as f64;
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{axis_y:.3}" x2="{axis_end:.1}" y2="{axis_y:.3}" stroke="black"/>"#,
        left - 10.0
    );
    for (j, name) in class_names.iter().enumerate() {
        let y = top + 16.0 * j as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{y:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            axis_end + 20.0,
            PALETTE[j % PALETTE.len()],
            axis_end + 34.0,
            y + 9.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

//! Radial "semantic map" coordinates for a ranked result list.

use serde::Serialize;

use crate::relevance::ScoredDocument;

pub const GOLDEN_ANGLE_DEG: f64 = 137.508;

/// Position of a result around the query symbol at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LayoutPoint {
    pub doc_id: String,
    pub x: f64,
    pub y: f64,
    /// `1 - rsv`: perfect matches sit on the query symbol.
    pub radius: f64,
    pub angle_deg: f64,
}

impl LayoutPoint {
    /// Placement of the result at 0-based position `k`.
    pub fn place(doc_id: impl Into<String>, rsv: f64, k: usize) -> Self {
        let radius = (1.0 - rsv).clamp(0.0, 1.0);
        let angle_deg = (k as f64 * GOLDEN_ANGLE_DEG) % 360.0;
        let theta = angle_deg.to_radians();
        Self {
            doc_id: doc_id.into(),
            x: radius * theta.cos(),
            y: radius * theta.sin(),
            radius,
            angle_deg,
        }
    }
}

pub fn compute_layout(results: &[ScoredDocument]) -> Vec<LayoutPoint> {
    results
        .iter()
        .map(|r| LayoutPoint::place(r.doc_id.clone(), r.rsv, r.rank - 1))
        .collect()
}

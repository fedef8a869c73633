//! Simplified Fuzzy ARTMAP: each node is committed to one class at creation
//! and a class mismatch triggers match tracking.

use crate::art::{self, ArtParams};
use crate::error::{LpartError, Result};
use crate::snapshot::{Decoder, Encoder};

pub const FAM_MAGIC: &[u8; 4] = b"FAMS";

/// Vigilance bump applied above the rejected winner's match value.
pub const MATCH_TRACKING_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FamNode {
    weight: Vec<f64>,
    class_label: usize,
}

impl FamNode {
    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn class_label(&self) -> usize {
        self.class_label
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamModel {
    params: ArtParams,
    num_classes: usize,
    dim: usize,
    nodes: Vec<FamNode>,
}

impl FamModel {
    pub fn new(params: ArtParams, num_classes: usize, dim: usize) -> Result<Self> {
        if num_classes == 0 || num_classes > u32::MAX as usize {
            return Err(LpartError::InvalidParameter {
                name: "num_classes",
                value: num_classes as f64,
                reason: "must be a positive 32-bit count",
            });
        }
        if dim == 0 || dim > u32::MAX as usize {
            return Err(LpartError::InvalidParameter {
                name: "dim",
                value: dim as f64,
                reason: "must be a positive 32-bit count",
            });
        }
        Ok(FamModel {
            params,
            num_classes,
            dim,
            nodes: Vec::new(),
        })
    }

    pub fn params(&self) -> &ArtParams {
        &self.params
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[FamNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn code(&self, x: &[f64]) -> Result<art::ComplementCoded> {
        if x.len() != self.dim {
            return Err(LpartError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        art::complement_code(x)
    }

    /// Trains on one labeled sample. Returns the index of the node that
    /// learned or was created.
    pub fn observe(&mut self, x: &[f64], y: Option<usize>) -> Result<usize> {
        let label = y.ok_or(LpartError::Precondition(
            "fuzzy ARTMAP only learns from labeled samples",
        ))?;
        if label >= self.num_classes {
            return Err(LpartError::LabelOutOfRange {
                label,
                num_classes: self.num_classes,
            });
        }
        let input = self.code(x)?;
        let norm = input.norm();
        let alpha = self.params.alpha();
        let scores: Vec<art::Scores> = self
            .nodes
            .iter()
            .map(|n| art::score(input.as_slice(), norm, &n.weight, alpha))
            .collect();

        let mut vigilance = self.params.rho();
        loop {
            match newest_best(&scores, vigilance) {
                Some(j) if self.nodes[j].class_label == label => {
                    art::learn_in_place(&mut self.nodes[j].weight, input.as_slice(), self.params.beta());
                    return Ok(j);
                }
                Some(j) => vigilance = scores[j].matched + MATCH_TRACKING_EPSILON,
                None => {
                    self.nodes.push(FamNode {
                        weight: art::create_node(&input),
                        class_label: label,
                    });
                    return Ok(self.nodes.len() - 1);
                }
            }
        }
    }

    /// Class of the resonant winner, or of the best-choice node when none
    /// passes vigilance.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        if self.nodes.is_empty() {
            return Err(LpartError::State("cannot predict with an empty model"));
        }
        let input = self.code(x)?;
        let norm = input.norm();
        let scores: Vec<art::Scores> = self
            .nodes
            .iter()
            .map(|n| art::score(input.as_slice(), norm, &n.weight, self.params.alpha()))
            .collect();
        let winner = newest_best(&scores, self.params.rho())
            .or_else(|| newest_best(&scores, f64::NEG_INFINITY))
            .expect("nonempty model");
        Ok(self.nodes[winner].class_label)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut enc = Encoder::new(FAM_MAGIC);
        enc.f64(self.params.alpha());
        enc.f64(self.params.rho());
        enc.f64(self.params.beta());
        enc.u32(self.num_classes as u32);
        enc.u32(self.dim as u32);
        enc.u64(self.nodes.len() as u64);
        for node in &self.nodes {
            enc.f64s(&node.weight);
            enc.u32(node.class_label as u32);
        }
        enc.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, FAM_MAGIC)?;
        let at = dec.offset();
        let alpha = dec.f64()?;
        let rho = dec.f64()?;
        let beta = dec.f64()?;
        let num_classes = dec.u32()? as usize;
        let dim = dec.u32()? as usize;
        let params = ArtParams::new(alpha, rho, beta)
            .map_err(|e| LpartError::format(at, format!("invalid hyperparameters: {e}")))?;
        let mut model = FamModel::new(params, num_classes, dim)
            .map_err(|e| LpartError::format(at, format!("invalid header: {e}")))?;
        let count = dec.u64()?;
        for _ in 0..count {
            let at = dec.offset();
            let weight = dec.f64s(2 * dim)?;
            if weight.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return Err(LpartError::format(at, "weight outside [0, 1]"));
            }
            let class_label = dec.u32()? as usize;
            if class_label >= num_classes {
                return Err(LpartError::format(
                    dec.offset() - 4,
                    format!("class {class_label} out of range"),
                ));
            }
            model.nodes.push(FamNode { weight, class_label });
        }
        dec.finish()?;
        Ok(model)
    }
}

/// Highest choice among nodes with `V >= vigilance`. Ties go to the newest
/// node, so a node committed after match tracking rejected an identical
/// older one wins on the same input.
fn newest_best(scores: &[art::Scores], vigilance: f64) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, s) in scores.iter().enumerate() {
        if s.matched >= vigilance && best.is_none_or(|b| s.choice >= scores[b].choice) {
            best = Some(j);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(rho: f64) -> FamModel {
        FamModel::new(ArtParams::new(0.001, rho, 1.0).unwrap(), 4, 2).unwrap()
    }

    #[test]
    fn first_sample_commits_node() {
        let mut m = model(0.9);
        m.observe(&[0.2, 0.3], Some(2)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.nodes()[0].class_label(), 2);
    }

    #[test]
    fn correct_class_learns_in_place() {
        let mut m = model(0.9);
        m.observe(&[0.2, 0.3], Some(1)).unwrap();
        assert_eq!(m.observe(&[0.2, 0.3], Some(1)).unwrap(), 0);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn mismatch_triggers_match_tracking() {
        let mut m = model(0.9);
        m.observe(&[0.2, 0.3], Some(1)).unwrap();
        // V = 1 for the existing node, so tracking lifts vigilance to 1 + ε
        // and nothing can resonate: a fresh node is committed to class 0.
        assert_eq!(m.observe(&[0.2, 0.3], Some(0)).unwrap(), 1);
        assert_eq!(m.len(), 2);
        assert_eq!(m.nodes()[0].class_label(), 1);
        assert_eq!(m.nodes()[1].class_label(), 0);
        assert_eq!(m.nodes()[0].weight(), m.nodes()[1].weight());
        assert_eq!(m.predict(&[0.2, 0.3]).unwrap(), 0);
    }

    #[test]
    fn match_tracking_falls_through_to_next_candidate() {
        let mut m = FamModel::new(ArtParams::new(0.001, 0.5, 1.0).unwrap(), 2, 1).unwrap();
        // Class-0 box over [0.2, 0.6]: w = [0.2, 0.4].
        m.observe(&[0.2], Some(0)).unwrap();
        m.observe(&[0.6], Some(0)).unwrap();
        // 0.45 resonates with the box (V = 0.6) but the class is wrong, so
        // tracking lifts vigilance past 0.6 and a class-1 point is created.
        assert_eq!(m.observe(&[0.45], Some(1)).unwrap(), 1);
        assert_eq!(m.nodes()[0].weight(), &[0.2, 0.4]);

        // For 0.4: box T = 0.6/0.601, V = 0.6; point T = 0.95/1.001, V = 0.95.
        // The box wins first, is rejected, and the point then learns.
        assert_eq!(m.observe(&[0.4], Some(1)).unwrap(), 1);
        assert_eq!(m.len(), 2);
        assert_eq!(m.nodes()[0].weight(), &[0.2, 0.4]);
        assert_eq!(m.nodes()[1].weight(), &[0.4, 0.55]);
    }

    #[test]
    fn unlabeled_is_rejected() {
        let mut m = model(0.9);
        assert!(m.observe(&[0.2, 0.3], None).is_err());
        assert!(m.observe(&[0.2, 0.3], Some(4)).is_err());
        assert!(m.is_empty());
    }

    #[test]
    fn predict_examples() {
        let mut m = model(0.9);
        assert!(m.predict(&[0.1, 0.1]).is_err());
        m.observe(&[0.2, 0.3], Some(3)).unwrap();
        assert_eq!(m.predict(&[0.9, 0.9]).unwrap(), 3);
        m.observe(&[0.8, 0.7], Some(1)).unwrap();
        assert_eq!(m.predict(&[0.8, 0.7]).unwrap(), 1);
        assert_eq!(m.predict(&[0.2, 0.3]).unwrap(), 3);
    }

    #[test]
    fn equidistant_fixture_uses_choice() {
        // Two point nodes; the query is L1-closer to the second one, so its
        // choice value is larger (T = (2d - L1) / (α + 2d) for points).
        let mut m = model(0.99);
        m.observe(&[0.1, 0.1], Some(0)).unwrap();
        m.observe(&[0.5, 0.5], Some(2)).unwrap();
        let q = art::complement_code(&[0.35, 0.35]).unwrap();
        let t0 = art::choice(&q, m.nodes()[0].weight(), 0.001).unwrap();
        let t1 = art::choice(&q, m.nodes()[1].weight(), 0.001).unwrap();
        assert!(t1 > t0);
        assert_eq!(m.predict(&[0.35, 0.35]).unwrap(), 2);
    }

    #[test]
    fn snapshot_round_trip() {
        let mut m = model(0.9);
        m.observe(&[0.2, 0.3], Some(3)).unwrap();
        m.observe(&[0.7, 0.3], Some(0)).unwrap();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"FAMS");
        assert_eq!(FamModel::from_bytes(&bytes).unwrap(), m);
        assert!(FamModel::from_bytes(&bytes[..bytes.len() - 2]).is_err());
    }
}

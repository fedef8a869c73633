//! The label-propagating ART learner.
//!
//! Every node keeps a label density `q` next to its Fuzzy ART weight. A
//! labeled sample adds one unit of mass for its class to every node it
//! activates. An unlabeled sample that activates several nodes at once
//! spreads mass from the co-activated nodes into the ones that have never
//! seen a label. Predictions come from the winning node's normalized
//! density, together with two uncertainty scores: the entropy of that
//! distribution and `1 - tanh(k * Σq)`.

use serde::Serialize;

use crate::art::{self, ArtParams, ComplementCoded};
use crate::error::{LpartError, Result};
use crate::snapshot::{Decoder, Encoder};

pub const MODEL_MAGIC: &[u8; 4] = b"LPMS";

/// Tolerance on `Σp = 1` accepted by [`uncertainty_entropy`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpartParams {
    art: ArtParams,
    delta: f64,
    c_uncert: f64,
    k_sens: f64,
    num_classes: usize,
}

impl LpartParams {
    pub fn new(art: ArtParams, delta: f64, c_uncert: f64, k_sens: f64, num_classes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(LpartError::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must lie in [0, 1]",
            });
        }
        if !(c_uncert > 1.0 && c_uncert.is_finite()) {
            return Err(LpartError::InvalidParameter {
                name: "c_uncert",
                value: c_uncert,
                reason: "must be finite and > 1",
            });
        }
        if !(k_sens > 0.0 && k_sens.is_finite()) {
            return Err(LpartError::InvalidParameter {
                name: "k_sens",
                value: k_sens,
                reason: "must be finite and > 0",
            });
        }
        if num_classes == 0 || num_classes > u32::MAX as usize {
            return Err(LpartError::InvalidParameter {
                name: "num_classes",
                value: num_classes as f64,
                reason: "must be a positive 32-bit count",
            });
        }
        Ok(LpartParams {
            art,
            delta,
            c_uncert,
            k_sens,
            num_classes,
        })
    }

    /// `δ = 0.5`, `C = 2`, `k = 1` and the default ART parameters.
    pub fn with_defaults(num_classes: usize) -> Result<Self> {
        LpartParams::new(ArtParams::default(), 0.5, 2.0, 1.0, num_classes)
    }

    pub fn art(&self) -> &ArtParams {
        &self.art
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c_uncert(&self) -> f64 {
        self.c_uncert
    }

    pub fn k_sens(&self) -> f64 {
        self.k_sens
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpartNode {
    weight: Vec<f64>,
    density: Vec<f64>,
    has_direct_label: bool,
    created_at: u64,
}

impl LpartNode {
    pub fn new(weight: Vec<f64>, density: Vec<f64>, has_direct_label: bool, created_at: u64) -> Self {
        LpartNode {
            weight,
            density,
            has_direct_label,
            created_at,
        }
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Whether a labeled sample ever reached this node. Propagated mass does
    /// not count.
    pub fn has_direct_label(&self) -> bool {
        self.has_direct_label
    }

    /// Ordinal of the sample that created the node.
    pub fn created_at(&self) -> u64 {
        self.created_at
    }

    pub fn density_sum(&self) -> f64 {
        self.density.iter().sum()
    }

    pub fn label_distribution(&self) -> Option<Vec<f64>> {
        label_distribution(&self.density)
    }
}

/// Normalizes a label density into a probability vector; `None` when it
/// carries no mass.
pub fn label_distribution(density: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = density.iter().sum();
    (total > 0.0).then(|| density.iter().map(|q| q / total).collect())
}

/// Entropy (natural log) of a probability vector, with `0 ln 0 = 0`.
pub fn uncertainty_entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(LpartError::InvalidDistribution("empty vector".into()));
    }
    if let Some(bad) = p.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(LpartError::InvalidDistribution(format!(
            "entry {bad} is not a probability"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(LpartError::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(p.iter().filter(|&&v| v > 0.0).fold(0.0, |h, &v| h - v * v.ln()))
}

/// Count-based uncertainty `1 - tanh(k · Σq)`.
pub fn uncertainty_count(density_sum: f64, k: f64) -> Result<f64> {
    if !(density_sum >= 0.0) {
        return Err(LpartError::InvalidParameter {
            name: "density_sum",
            value: density_sum,
            reason: "must be >= 0",
        });
    }
    if !(k > 0.0) {
        return Err(LpartError::InvalidParameter {
            name: "k",
            value: k,
            reason: "must be > 0",
        });
    }
    Ok(1.0 - (k * density_sum).tanh())
}

/// What a single [`LpartModel::observe`] call did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    /// The learning winner, or the index of the node just created.
    pub node: usize,
    pub created: bool,
    /// Size of the activated set.
    pub activated: usize,
    /// Number of label-absent nodes whose density was rewritten.
    pub propagated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    /// `None` means abstain: the winner carries no label mass.
    pub label: Option<usize>,
    pub u1: f64,
    pub u2: f64,
    pub winner: Option<usize>,
    /// False when no node passed vigilance and the global best choice was used.
    pub resonant: bool,
}

impl Prediction {
    pub fn is_abstain(&self) -> bool {
        self.label.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpartModel {
    params: LpartParams,
    dim: usize,
    nodes: Vec<LpartNode>,
    observed: u64,
}

impl LpartModel {
    pub fn new(params: LpartParams, dim: usize) -> Result<Self> {
        if dim == 0 || dim > u32::MAX as usize {
            return Err(LpartError::InvalidParameter {
                name: "dim",
                value: dim as f64,
                reason: "must be a positive 32-bit count",
            });
        }
        Ok(LpartModel {
            params,
            dim,
            nodes: Vec::new(),
            observed: 0,
        })
    }

    /// Builds a model from explicit nodes, validating their shapes.
    pub fn from_nodes(params: LpartParams, dim: usize, nodes: Vec<LpartNode>) -> Result<Self> {
        let mut model = LpartModel::new(params, dim)?;
        for node in &nodes {
            if node.weight.len() != 2 * dim {
                return Err(LpartError::DimensionMismatch {
                    expected: 2 * dim,
                    found: node.weight.len(),
                });
            }
            if node.density.len() != params.num_classes {
                return Err(LpartError::DimensionMismatch {
                    expected: params.num_classes,
                    found: node.density.len(),
                });
            }
            if let Some((index, &value)) = node.weight.iter().enumerate().find(|(_, w)| !(0.0..=1.0).contains(*w)) {
                return Err(LpartError::FeatureOutOfRange { index, value });
            }
            if node.density.iter().any(|q| !(*q >= 0.0 && q.is_finite())) {
                return Err(LpartError::InvalidDistribution("negative or non-finite density".into()));
            }
        }
        model.observed = nodes.iter().map(|n| n.created_at + 1).max().unwrap_or(0);
        model.nodes = nodes;
        Ok(model)
    }

    pub fn params(&self) -> &LpartParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[LpartNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of samples observed so far.
    pub fn observed(&self) -> u64 {
        self.observed
    }

    fn code(&self, x: &[f64]) -> Result<ComplementCoded> {
        if x.len() != self.dim {
            return Err(LpartError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        art::complement_code(x)
    }

    fn check_label(&self, y: Option<usize>) -> Result<()> {
        match y {
            Some(label) if label >= self.params.num_classes => Err(LpartError::LabelOutOfRange {
                label,
                num_classes: self.params.num_classes,
            }),
            _ => Ok(()),
        }
    }

    /// Presents one sample to the network. On error the model is untouched.
    pub fn observe(&mut self, x: &[f64], y: Option<usize>) -> Result<Observation> {
        let input = self.code(x)?;
        self.check_label(y)?;
        let ordinal = self.observed;
        self.observed += 1;

        let activated = art::activate(
            self.nodes.iter().map(|n| n.weight.as_slice()),
            &input,
            self.params.art(),
        );

        if activated.is_empty() {
            let mut density = vec![0.0; self.params.num_classes];
            if let Some(label) = y {
                density[label] = 1.0;
            }
            self.nodes.push(LpartNode {
                weight: art::create_node(&input),
                density,
                has_direct_label: y.is_some(),
                created_at: ordinal,
            });
            return Ok(Observation {
                node: self.nodes.len() - 1,
                created: true,
                activated: 0,
                propagated: 0,
            });
        }

        if let Some(label) = y {
            for a in &activated {
                let node = &mut self.nodes[a.index];
                node.density[label] += 1.0;
                node.has_direct_label = true;
            }
        }

        let indices: Vec<usize> = activated.iter().map(|a| a.index).collect();
        let propagated = if indices.len() > 1 {
            self.propagate_unchecked(&indices)
        } else {
            0
        };

        let winner = art::select_winner(&activated)?;
        art::learn_in_place(&mut self.nodes[winner].weight, input.as_slice(), self.params.art.beta());

        Ok(Observation {
            node: winner,
            created: false,
            activated: activated.len(),
            propagated,
        })
    }

    /// Spreads label mass across a co-activated set of at least two distinct
    /// nodes. Returns how many nodes were rewritten.
    pub fn propagate_labels(&mut self, active: &[usize]) -> Result<usize> {
        if active.len() < 2 {
            return Err(LpartError::Precondition(
                "label propagation needs at least two co-activated nodes",
            ));
        }
        let mut seen = vec![false; self.nodes.len()];
        for &j in active {
            if j >= self.nodes.len() {
                return Err(LpartError::Precondition("co-activated index out of range"));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(LpartError::Precondition("co-activated indices must be distinct"));
            }
        }
        Ok(self.propagate_unchecked(active))
    }

    fn propagate_unchecked(&mut self, active: &[usize]) -> usize {
        let classes = self.params.num_classes;
        let n = active.len();
        let delta = self.params.delta;
        let scale = 1.0 / self.params.c_uncert;

        // suffix[i] = Σ q_j over active[i..]; the prefix is accumulated on the
        // way forward. Neighbor mass for active[i] is prefix + suffix[i + 1],
        // which is exactly zero iff all neighbors are empty.
        let mut suffix = vec![0.0; (n + 1) * classes];
        for i in (0..n).rev() {
            let q = &self.nodes[active[i]].density;
            for c in 0..classes {
                suffix[i * classes + c] = suffix[(i + 1) * classes + c] + q[c];
            }
        }

        let mut prefix = vec![0.0; classes];
        let mut updates: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut neighbors = vec![0.0; classes];
        for (i, &k) in active.iter().enumerate() {
            let node = &self.nodes[k];
            if !node.has_direct_label {
                for c in 0..classes {
                    neighbors[c] = prefix[c] + suffix[(i + 1) * classes + c];
                }
                let neighbor_total: f64 = neighbors.iter().sum();
                if neighbor_total > 0.0 {
                    let own_total = node.density_sum();
                    let new_density = (0..classes)
                        .map(|c| {
                            let mut v = delta * neighbors[c] / neighbor_total;
                            if own_total > 0.0 {
                                v += (1.0 - delta) * node.density[c] / own_total;
                            }
                            v * scale
                        })
                        .collect();
                    updates.push((k, new_density));
                }
            }
            for (p, q) in prefix.iter_mut().zip(&node.density) {
                *p += q;
            }
        }

        let count = updates.len();
        for (k, density) in updates {
            self.nodes[k].density = density;
        }
        count
    }

    /// Classifies `x` without learning.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if self.nodes.is_empty() {
            return Err(LpartError::State("cannot predict with an empty model"));
        }
        let input = self.code(x)?;
        let (winner, resonant) = best_node(
            self.nodes.iter().map(|n| n.weight.as_slice()),
            &input,
            self.params.art(),
        );
        let node = &self.nodes[winner];
        let k = self.params.k_sens;
        let u2 = uncertainty_count(node.density_sum(), k)?;
        let (label, u1) = match node.label_distribution() {
            Some(p) => (Some(argmax(&p)), uncertainty_entropy(&p)?),
            None => (None, (self.params.num_classes as f64).ln()),
        };
        Ok(Prediction {
            label,
            u1,
            u2,
            winner: Some(winner),
            resonant,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut enc = Encoder::new(MODEL_MAGIC);
        let p = &self.params;
        enc.f64(p.art.alpha());
        enc.f64(p.art.rho());
        enc.f64(p.art.beta());
        enc.f64(p.delta);
        enc.f64(p.c_uncert);
        enc.f64(p.k_sens);
        enc.u32(p.num_classes as u32);
        enc.u32(self.dim as u32);
        enc.u64(self.observed);
        enc.u64(self.nodes.len() as u64);
        for node in &self.nodes {
            enc.f64s(&node.weight);
            enc.f64s(&node.density);
            enc.u8(node.has_direct_label as u8);
            enc.u64(node.created_at);
        }
        enc.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, MODEL_MAGIC)?;
        let at = dec.offset();
        let alpha = dec.f64()?;
        let rho = dec.f64()?;
        let beta = dec.f64()?;
        let delta = dec.f64()?;
        let c_uncert = dec.f64()?;
        let k_sens = dec.f64()?;
        let num_classes = dec.u32()? as usize;
        let dim = dec.u32()? as usize;
        let params = ArtParams::new(alpha, rho, beta)
            .and_then(|art| LpartParams::new(art, delta, c_uncert, k_sens, num_classes))
            .map_err(|e| LpartError::format(at, format!("invalid hyperparameters: {e}")))?;
        if dim == 0 {
            return Err(LpartError::format(dec.offset() - 4, "zero dimension"));
        }
        let observed = dec.u64()?;
        let count = dec.u64()?;
        let mut nodes = Vec::new();
        for _ in 0..count {
            let at = dec.offset();
            let weight = dec.f64s(2 * dim)?;
            let density = dec.f64s(num_classes)?;
            let has_direct_label = match dec.u8()? {
                0 => false,
                1 => true,
                other => return Err(LpartError::format(dec.offset() - 1, format!("bad flag byte {other}"))),
            };
            let created_at = dec.u64()?;
            let node = LpartNode::new(weight, density, has_direct_label, created_at);
            LpartModel::from_nodes(params, dim, vec![node.clone()])
                .map_err(|e| LpartError::format(at, format!("invalid node: {e}")))?;
            nodes.push(node);
        }
        dec.finish()?;
        Ok(LpartModel {
            params,
            dim,
            nodes,
            observed,
        })
    }
}

/// Winner by choice among resonant nodes, or over all nodes when none
/// resonates. Returns `(index, resonant)`. Requires at least one node.
pub(crate) fn best_node<'a, I>(weights: I, input: &ComplementCoded, params: &ArtParams) -> (usize, bool)
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let norm = input.norm();
    let mut best_resonant: Option<(usize, f64)> = None;
    let mut best_any: Option<(usize, f64)> = None;
    for (j, w) in weights.into_iter().enumerate() {
        let s = art::score(input.as_slice(), norm, w, params.alpha());
        if best_any.is_none_or(|(_, t)| s.choice > t) {
            best_any = Some((j, s.choice));
        }
        if s.matched >= params.rho() && best_resonant.is_none_or(|(_, t)| s.choice > t) {
            best_resonant = Some((j, s.choice));
        }
    }
    match (best_resonant, best_any) {
        (Some((j, _)), _) => (j, true),
        (None, Some((j, _))) => (j, false),
        (None, None) => panic!("best_node called without nodes"),
    }
}

/// First index of the maximum.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho: f64, classes: usize) -> LpartParams {
        LpartParams::new(ArtParams::new(0.001, rho, 1.0).unwrap(), 0.5, 2.0, 1.0, classes).unwrap()
    }

    fn node(density: &[f64], direct: bool) -> LpartNode {
        LpartNode::new(vec![0.5; 2], density.to_vec(), direct, 0)
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn first_labeled_sample_creates_one_hot_node() {
        let mut m = LpartModel::new(params(0.9, 5), 2).unwrap();
        let obs = m.observe(&[0.4, 0.6], Some(3)).unwrap();
        assert!(obs.created);
        assert_eq!(m.len(), 1);
        assert_eq!(m.nodes()[0].density(), &[0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(m.nodes()[0].has_direct_label());
    }

    #[test]
    fn unlabeled_sample_creates_empty_node() {
        let mut m = LpartModel::new(params(0.9, 2), 2).unwrap();
        m.observe(&[0.4, 0.6], None).unwrap();
        assert_eq!(m.nodes()[0].density(), &[0.0, 0.0]);
        assert!(!m.nodes()[0].has_direct_label());
    }

    #[test]
    fn fixed_point_observation() {
        let mut m = LpartModel::new(params(0.9, 2), 2).unwrap();
        m.observe(&[0.4, 0.6], None).unwrap();
        let before = m.nodes()[0].weight().to_vec();
        let obs = m.observe(&[0.4, 0.6], None).unwrap();
        assert_eq!(
            obs,
            Observation {
                node: 0,
                created: false,
                activated: 1,
                propagated: 0
            }
        );
        assert_eq!(m.nodes()[0].weight(), before.as_slice());
    }

    #[test]
    fn labeled_sample_increments_every_activated_node() {
        let p = params(0.5, 2);
        let nodes = vec![
            LpartNode::new(vec![0.4, 0.4, 0.6, 0.6], vec![0.0, 0.0], false, 0),
            LpartNode::new(vec![0.45, 0.45, 0.55, 0.55], vec![0.25, 0.0], false, 1),
        ];
        let mut m = LpartModel::from_nodes(p, 2, nodes).unwrap();
        let obs = m.observe(&[0.45, 0.45], Some(1)).unwrap();
        assert_eq!(obs.activated, 2);
        // Both nodes now hold a direct label, so nothing propagates.
        assert_eq!(obs.propagated, 0);
        assert_eq!(m.nodes()[0].density(), &[0.0, 1.0]);
        assert_eq!(m.nodes()[1].density(), &[0.25, 1.0]);
        assert!(m.nodes().iter().all(|n| n.has_direct_label()));
    }

    #[test]
    fn observe_errors_leave_model_untouched() {
        let mut m = LpartModel::new(params(0.9, 2), 2).unwrap();
        m.observe(&[0.4, 0.6], Some(0)).unwrap();
        let snapshot = m.clone();
        assert!(matches!(
            m.observe(&[0.4], None),
            Err(LpartError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            m.observe(&[0.4, 0.6], Some(2)),
            Err(LpartError::LabelOutOfRange { .. })
        ));
        assert!(matches!(
            m.observe(&[0.4, 1.6], None),
            Err(LpartError::FeatureOutOfRange { .. })
        ));
        assert_eq!(m, snapshot);
    }

    #[test]
    fn propagation_into_empty_node() {
        let nodes = vec![node(&[2.0, 0.0], true), node(&[0.0, 0.0], false)];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes).unwrap();
        assert_eq!(m.propagate_labels(&[0, 1]).unwrap(), 1);
        assert!(close(m.nodes()[1].density(), &[0.25, 0.0]));
        assert_eq!(m.nodes()[0].density(), &[2.0, 0.0]);
    }

    #[test]
    fn propagation_mixes_own_mass() {
        let nodes = vec![node(&[2.0, 0.0], true), node(&[1.0, 1.0], false)];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes).unwrap();
        m.propagate_labels(&[0, 1]).unwrap();
        assert!(close(m.nodes()[1].density(), &[0.375, 0.125]));
    }

    #[test]
    fn propagation_skips_direct_nodes_and_empty_neighbors() {
        let nodes = vec![node(&[2.0, 0.0], true), node(&[0.0, 3.0], true)];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes.clone()).unwrap();
        assert_eq!(m.propagate_labels(&[0, 1]).unwrap(), 0);
        assert_eq!(m.nodes(), nodes.as_slice());

        let nodes = vec![node(&[0.0, 0.0], false), node(&[0.0, 0.0], false)];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes.clone()).unwrap();
        assert_eq!(m.propagate_labels(&[0, 1]).unwrap(), 0);
        assert_eq!(m.nodes(), nodes.as_slice());
    }

    #[test]
    fn propagation_is_simultaneous() {
        // Node 1 must see node 2's pre-update (empty) density and vice versa.
        let nodes = vec![
            node(&[1.0, 0.0], true),
            node(&[0.0, 0.0], false),
            node(&[0.0, 0.0], false),
        ];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes).unwrap();
        let mut reversed = m.clone();
        assert_eq!(m.propagate_labels(&[0, 1, 2]).unwrap(), 2);
        reversed.propagate_labels(&[2, 1, 0]).unwrap();
        assert_eq!(m.nodes(), reversed.nodes());
        assert!(close(m.nodes()[1].density(), &[0.25, 0.0]));
        assert!(close(m.nodes()[2].density(), &[0.25, 0.0]));
    }

    #[test]
    fn propagation_preconditions() {
        let nodes = vec![node(&[1.0, 0.0], true), node(&[0.0, 0.0], false)];
        let mut m = LpartModel::from_nodes(params(0.9, 2), 1, nodes).unwrap();
        assert!(m.propagate_labels(&[0]).is_err());
        assert!(m.propagate_labels(&[0, 0]).is_err());
        assert!(m.propagate_labels(&[0, 5]).is_err());
    }

    #[test]
    fn label_distribution_examples() {
        assert_eq!(label_distribution(&[3.0, 1.0]), Some(vec![0.75, 0.25]));
        assert_eq!(label_distribution(&[0.0, 0.0]), None);
        assert_eq!(label_distribution(&[0.25, 0.0]), Some(vec![1.0, 0.0]));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(uncertainty_entropy(&[0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!(uncertainty_entropy(&[0.0, 1.0, 0.0]).unwrap().is_sign_positive());
        let uniform = vec![0.1; 10];
        assert!((uncertainty_entropy(&uniform).unwrap() - std::f64::consts::LN_10).abs() < 1e-12);
        assert!((uncertainty_entropy(&[0.75, 0.25]).unwrap() - 0.562_335_144_618_808_3).abs() < 1e-12);
        assert!(uncertainty_entropy(&[0.5, 0.4]).is_err());
        assert!(uncertainty_entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn count_uncertainty_examples() {
        assert_eq!(uncertainty_count(0.0, 1.0).unwrap(), 1.0);
        assert!((uncertainty_count(1.0, 1.0).unwrap() - 0.238_405_844_044_235_15).abs() < 1e-12);
        assert!(uncertainty_count(100.0, 1.0).unwrap() < 1e-12);
        assert!(uncertainty_count(-1.0, 1.0).is_err());
    }

    #[test]
    fn predict_examples() {
        let x = [0.5];
        let make = |density: &[f64]| {
            let w = art::complement_code(&x).unwrap().into_vec();
            let n = LpartNode::new(w, density.to_vec(), true, 0);
            LpartModel::from_nodes(params(0.9, density.len()), 1, vec![n]).unwrap()
        };

        let p = make(&[5.0, 0.0, 0.0]).predict(&x).unwrap();
        assert_eq!(p.label, Some(0));
        assert_eq!(p.u1, 0.0);

        let p = make(&[1.0, 1.0]).predict(&x).unwrap();
        assert_eq!(p.label, Some(0));
        assert!((p.u1 - std::f64::consts::LN_2).abs() < 1e-12);

        let p = make(&[0.0, 0.0]).predict(&x).unwrap();
        assert!(p.is_abstain());
        assert_eq!(p.u2, 1.0);
    }

    #[test]
    fn predict_falls_back_to_best_choice() {
        let mut m = LpartModel::new(params(0.99, 2), 1).unwrap();
        m.observe(&[0.1], Some(0)).unwrap();
        m.observe(&[0.9], Some(1)).unwrap();
        let p = m.predict(&[0.7]).unwrap();
        assert!(!p.resonant);
        assert_eq!(p.winner, Some(1));
        assert_eq!(p.label, Some(1));
    }

    #[test]
    fn predict_requires_nodes() {
        let m = LpartModel::new(params(0.9, 2), 1).unwrap();
        assert!(matches!(m.predict(&[0.5]), Err(LpartError::State(_))));
    }

    #[test]
    fn snapshot_round_trip_and_truncation() {
        let empty = LpartModel::new(params(0.9, 3), 2).unwrap();
        assert_eq!(LpartModel::from_bytes(&empty.to_bytes()).unwrap(), empty);

        let mut m = empty.clone();
        m.observe(&[0.1, 0.2], Some(1)).unwrap();
        m.observe(&[0.12, 0.2], None).unwrap();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"LPMS");
        assert_eq!(LpartModel::from_bytes(&bytes).unwrap(), m);
        for cut in [0, 3, 8, 20, bytes.len() - 1] {
            assert!(matches!(
                LpartModel::from_bytes(&bytes[..cut]),
                Err(LpartError::Format { .. })
            ));
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(LpartModel::from_bytes(&extra).is_err());
    }

    #[test]
    fn params_validation() {
        let art = ArtParams::default();
        assert!(LpartParams::new(art, 1.5, 2.0, 1.0, 2).is_err());
        assert!(LpartParams::new(art, 0.5, 1.0, 1.0, 2).is_err());
        assert!(LpartParams::new(art, 0.5, 2.0, 0.0, 2).is_err());
        assert!(LpartParams::new(art, 0.5, 2.0, 1.0, 0).is_err());
    }
}

//! Fuzzy ART kernel.
//!
//! Inputs are complement coded (`I = [r, 1 - r]`) so every input has the same
//! L1 norm `d`, and a category weight describes a hyper-rectangle in the
//! unit cube. All functions here are pure; the learners in [`crate::model`]
//! and [`crate::fam`] own the mutable node state.

use serde::Serialize;

use crate::error::{LpartError, Result};

/// Tolerance for `I[j] + I[j + d] == 1` when accepting pre-coded vectors.
pub const COMPLEMENT_TOLERANCE: f64 = 1e-9;

/// Fuzzy ART hyperparameters: choice `alpha`, vigilance `rho`, learning rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArtParams {
    alpha: f64,
    rho: f64,
    beta: f64,
}

impl ArtParams {
    pub fn new(alpha: f64, rho: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LpartError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be finite and > 0",
            });
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(LpartError::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "must lie in [0, 1]",
            });
        }
        check_beta(beta)?;
        Ok(ArtParams { alpha, rho, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Returns a copy with a different vigilance.
    pub fn with_rho(self, rho: f64) -> Result<Self> {
        ArtParams::new(self.alpha, rho, self.beta)
    }
}

impl Default for ArtParams {
    fn default() -> Self {
        ArtParams {
            alpha: 0.001,
            rho: 0.95,
            beta: 1.0,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(LpartError::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must lie in [0, 1]",
        })
    }
}

/// A complement-coded input `[r, 1 - r]` of length `2d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementCoded {
    values: Vec<f64>,
}

impl ComplementCoded {
    /// Accepts an already coded vector, checking that each pair sums to one.
    pub fn from_coded(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(LpartError::DimensionMismatch {
                expected: 2 * (values.len() / 2).max(1),
                found: values.len(),
            });
        }
        let d = values.len() / 2;
        for (index, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(LpartError::FeatureOutOfRange { index, value: v });
            }
        }
        for j in 0..d {
            let sum = values[j] + values[j + d];
            if (sum - 1.0).abs() > COMPLEMENT_TOLERANCE {
                return Err(LpartError::FeatureOutOfRange {
                    index: j + d,
                    value: values[j + d],
                });
            }
        }
        Ok(ComplementCoded { values })
    }

    /// Number of raw features `d` (half the coded length).
    pub fn dim(&self) -> usize {
        self.values.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// L1 norm, accumulated pairwise so that it is exactly `d`: each
    /// `r + fl(1 - r)` rounds to exactly 1.0 for `r` in `[0, 1]`.
    pub fn norm(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|j| self.values[j] + self.values[j + d]).sum()
    }
}

/// Complement codes a feature vector with entries in `[0, 1]`.
pub fn complement_code(features: &[f64]) -> Result<ComplementCoded> {
    if features.is_empty() {
        return Err(LpartError::DimensionMismatch { expected: 1, found: 0 });
    }
    let mut values = Vec::with_capacity(features.len() * 2);
    for (index, &v) in features.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(LpartError::FeatureOutOfRange { index, value: v });
        }
        values.push(v);
    }
    values.extend(features.iter().map(|&v| 1.0 - v));
    Ok(ComplementCoded { values })
}

/// Sums a complement-coded quantity in `(j, j + d)` pairs, the same order
/// as [`ComplementCoded::norm`], so that `w = I` reproduces the norm bit for
/// bit and a node always matches its own input at exactly 1.
#[inline]
fn paired_sum(len: usize, f: impl Fn(usize) -> f64) -> f64 {
    let d = len / 2;
    (0..d).map(|j| f(j) + f(j + d)).sum()
}

/// `‖a ∧ b‖₁` for complement-coded vectors of equal length.
#[inline]
pub(crate) fn min_sum(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    paired_sum(a.len(), |i| a[i].min(b[i]))
}

#[inline]
pub(crate) fn l1(a: &[f64]) -> f64 {
    paired_sum(a.len(), |i| a[i])
}

fn check_dims(input: &ComplementCoded, weight: &[f64]) -> Result<()> {
    if input.values.len() != weight.len() {
        return Err(LpartError::DimensionMismatch {
            expected: input.values.len(),
            found: weight.len(),
        });
    }
    Ok(())
}

/// Choice function `T = ‖I ∧ w‖₁ / (α + ‖w‖₁)`.
pub fn choice(input: &ComplementCoded, weight: &[f64], alpha: f64) -> Result<f64> {
    check_dims(input, weight)?;
    if !(alpha > 0.0) {
        return Err(LpartError::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be > 0",
        });
    }
    Ok(min_sum(input.as_slice(), weight) / (alpha + l1(weight)))
}

/// Match function `V = ‖I ∧ w‖₁ / ‖I‖₁`, in `[0, 1]`.
pub fn match_degree(input: &ComplementCoded, weight: &[f64]) -> Result<f64> {
    check_dims(input, weight)?;
    Ok(min_sum(input.as_slice(), weight) / input.norm())
}

/// Choice and match of one node for one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub choice: f64,
    pub matched: f64,
}

/// Computes both scores with a single pass over the weight. The caller
/// guarantees matching dimensions.
#[inline]
pub(crate) fn score(input: &[f64], input_norm: f64, weight: &[f64], alpha: f64) -> Scores {
    debug_assert_eq!(input.len(), weight.len());
    let d = input.len() / 2;
    let mut overlap = 0.0;
    let mut size = 0.0;
    for j in 0..d {
        overlap += input[j].min(weight[j]) + input[j + d].min(weight[j + d]);
        size += weight[j] + weight[j + d];
    }
    Scores {
        choice: overlap / (alpha + size),
        matched: overlap / input_norm,
    }
}

/// A node that passed the vigilance test, with its choice value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation {
    pub index: usize,
    pub choice: f64,
}

/// Returns every node whose match satisfies `V ≥ ρ`, in node order.
pub fn activate<'a, I>(weights: I, input: &ComplementCoded, params: &ArtParams) -> Vec<Activation>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let norm = input.norm();
    weights
        .into_iter()
        .enumerate()
        .filter_map(|(index, w)| {
            let s = score(input.as_slice(), norm, w, params.alpha);
            (s.matched >= params.rho).then_some(Activation {
                index,
                choice: s.choice,
            })
        })
        .collect()
}

/// Index of the activation with the highest choice value; ties go to the
/// lowest node index.
pub fn select_winner(activated: &[Activation]) -> Result<usize> {
    activated
        .iter()
        .copied()
        .reduce(|best, a| {
            if a.choice > best.choice || (a.choice == best.choice && a.index < best.index) {
                a
            } else {
                best
            }
        })
        .map(|a| a.index)
        .ok_or(LpartError::Precondition(
            "winner selection needs a nonempty activation set",
        ))
}

/// Learning rule `β(I ∧ w) + (1 − β)w`, returned as a new vector.
pub fn update_weight(weight: &[f64], input: &ComplementCoded, beta: f64) -> Result<Vec<f64>> {
    check_dims(input, weight)?;
    check_beta(beta)?;
    let mut out = weight.to_vec();
    learn_in_place(&mut out, input.as_slice(), beta);
    Ok(out)
}

/// In-place form of [`update_weight`]. Evaluated as `w + β(I ∧ w − w)`, which
/// is the same quantity but cannot round above `w`.
#[inline]
pub(crate) fn learn_in_place(weight: &mut [f64], input: &[f64], beta: f64) {
    debug_assert_eq!(weight.len(), input.len());
    if beta == 1.0 {
        for (w, &x) in weight.iter_mut().zip(input) {
            *w = w.min(x);
        }
    } else if beta > 0.0 {
        for (w, &x) in weight.iter_mut().zip(input) {
            let m = w.min(x);
            *w += beta * (m - *w);
        }
    }
}

/// A new category's weight is the input itself.
pub fn create_node(input: &ComplementCoded) -> Vec<f64> {
    input.values.clone()
}

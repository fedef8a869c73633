//! Straight-line reference interpreter used as an oracle. It shares no code
//! with the library: every quantity is recomputed from its definition with
//! plain loops.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RefNode {
    pub w: Vec<f64>,
    pub q: Vec<f64>,
    pub labeled: bool,
}

#[derive(Debug, Clone)]
pub struct RefModel {
    pub alpha: f64,
    pub rho: f64,
    pub beta: f64,
    pub delta: f64,
    pub c: f64,
    pub classes: usize,
    pub nodes: Vec<RefNode>,
}

impl RefModel {
    pub fn new(alpha: f64, rho: f64, beta: f64, delta: f64, c: f64, classes: usize) -> Self {
        RefModel {
            alpha,
            rho,
            beta,
            delta,
            c,
            classes,
            nodes: Vec::new(),
        }
    }

    pub fn step(&mut self, x: &[f64], y: Option<usize>) {
        let mut input = x.to_vec();
        for v in x {
            input.push(1.0 - v);
        }
        let norm_i: f64 = x.len() as f64;

        let mut active = Vec::new();
        let mut t_values = Vec::new();
        for j in 0..self.nodes.len() {
            let mut overlap = 0.0;
            let mut size = 0.0;
            for i in 0..input.len() {
                overlap += if input[i] < self.nodes[j].w[i] {
                    input[i]
                } else {
                    self.nodes[j].w[i]
                };
                size += self.nodes[j].w[i];
            }
            let t = overlap / (self.alpha + size);
            let v = overlap / norm_i;
            if v >= self.rho {
                if let Some(label) = y {
                    self.nodes[j].q[label] += 1.0;
                    self.nodes[j].labeled = true;
                }
                active.push(j);
                t_values.push(t);
            }
        }

        if active.is_empty() {
            let mut q = vec![0.0; self.classes];
            if let Some(label) = y {
                q[label] = 1.0;
            }
            self.nodes.push(RefNode {
                w: input,
                q,
                labeled: y.is_some(),
            });
            return;
        }

        if active.len() > 1 {
            let old: Vec<Vec<f64>> = self.nodes.iter().map(|n| n.q.clone()).collect();
            for &k in &active {
                if self.nodes[k].labeled {
                    continue;
                }
                let mut nb = vec![0.0; self.classes];
                for &j in &active {
                    if j != k {
                        for c in 0..self.classes {
                            nb[c] += old[j][c];
                        }
                    }
                }
                let nb_total: f64 = nb.iter().sum();
                if nb_total == 0.0 {
                    continue;
                }
                let own_total: f64 = old[k].iter().sum();
                for c in 0..self.classes {
                    let mut v = self.delta * nb[c] / nb_total;
                    if own_total > 0.0 {
                        v += (1.0 - self.delta) * old[k][c] / own_total;
                    }
                    self.nodes[k].q[c] = v / self.c;
                }
            }
        }

        let mut best = 0;
        for i in 1..active.len() {
            if t_values[i] > t_values[best] {
                best = i;
            }
        }
        let winner = active[best];
        for i in 0..input.len() {
            let w = self.nodes[winner].w[i];
            let m = if input[i] < w { input[i] } else { w };
            self.nodes[winner].w[i] = self.beta * m + (1.0 - self.beta) * w;
        }
    }
}

/// A random labeled-or-not stream. With `grid` set, features are multiples
/// of 1/8 so every sum is exact and vigilance/choice ties really occur.
pub fn random_stream(
    rng: &mut ChaCha8Rng,
    len: usize,
    dim: usize,
    classes: usize,
    label_p: f64,
    grid: bool,
) -> Vec<(Vec<f64>, Option<usize>)> {
    (0..len)
        .map(|_| {
            let x = (0..dim)
                .map(|_| {
                    if grid {
                        rng.random_range(0..=8u32) as f64 / 8.0
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect();
            let y = rng.random_bool(label_p).then(|| rng.random_range(0..classes));
            (x, y)
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Pieces shared by the tabular learners.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(1 - alpha) * value + alpha * payoff`.
pub fn q_update(value: f64, payoff: f64, alpha: f64) -> f64 {
    (1.0 - alpha) * value + alpha * payoff
}

/// Lowest index among the maximal values.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Selection distribution of an epsilon-greedy rule. The uniform draw includes
/// the greedy action, so it gets `1 - eps + eps/m`.
pub fn epsilon_greedy_distribution(values: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("epsilon-greedy over an empty action set".into()));
    }
    let greedy = argmax(values);
    let mut dist = mix_with_uniform(&crate::game::point_mass(values.len(), greedy), epsilon);
    // keep the exact 1 - eps + eps/m form for the greedy entry
    let m = values.len() as f64;
    dist[greedy] = 1.0 - epsilon + epsilon / m;
    Ok(dist)
}

/// `(1 - weight) * dist + weight * uniform`.
pub fn mix_with_uniform(dist: &[f64], weight: f64) -> Vec<f64> {
    let m = dist.len() as f64;
    dist.iter().map(|p| (1.0 - weight) * p + weight / m).collect()
}

/// Inverse-CDF draw from a distribution.
pub fn sample<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative sum
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(dist.len() - 1)
}

/// Flat indexing of joint actions, last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSpace {
    counts: Vec<usize>,
}

impl JointSpace {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, joint: &[usize]) -> usize {
        joint.iter().zip(&self.counts).fold(0, |acc, (&a, &m)| acc * m + a)
    }

    pub fn action(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        for (slot, &m) in out.iter_mut().zip(&self.counts).rev() {
            *slot = index % m;
            index /= m;
        }
        out
    }

    /// The space with one coordinate removed (the opponents of `player`).
    pub fn without(&self, player: usize) -> Self {
        let counts = self
            .counts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != player)
            .map(|(_, &m)| m)
            .collect();
        Self { counts }
    }

    /// Joint index built from an own action and the opponents' joint action.
    pub fn compose(&self, player: usize, own: usize, others: &[usize]) -> usize {
        let mut joint = others.to_vec();
        joint.insert(player, own);
        self.index(&joint)
    }

    /// Opponents' joint action, with `player`'s coordinate removed.
    pub fn others(joint: &[usize], player: usize) -> Vec<usize> {
        joint
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != player)
            .map(|(_, &a)| a)
            .collect()
    }
}

/// Estimated value per joint action (or per own action).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn update(&mut self, index: usize, payoff: f64, alpha: f64) {
        self.values[index] = q_update(self.values[index], payoff, alpha);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_update_examples() {
        assert_abs_diff_eq!(q_update(0.0, 4.0, 0.1), 0.4, epsilon = 1e-15);
        assert_eq!(q_update(2.0, 2.0, 0.1), 2.0);
        assert_eq!(q_update(5.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn epsilon_greedy_examples() {
        assert_eq!(epsilon_greedy_distribution(&[1.0, 2.0], 0.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(epsilon_greedy_distribution(&[1.0, 2.0], 1.0).unwrap(), vec![0.5, 0.5]);
        let d = epsilon_greedy_distribution(&[1.0, 2.0], 0.05).unwrap();
        assert_abs_diff_eq!(d[0], 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 0.975, epsilon = 1e-15);
        assert!(epsilon_greedy_distribution(&[], 0.1).is_err());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0]), 0);
    }

    #[test]
    fn sampling_follows_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let dist = [0.2, 0.0, 0.8];
        let mut hits = [0usize; 3];
        for _ in 0..20_000 {
            hits[sample(&dist, &mut rng)] += 1;
        }
        assert_eq!(hits[1], 0);
        assert!((hits[0] as f64 / 20_000.0 - 0.2).abs() < 0.02);
    }

    #[test]
    fn joint_space_composition() {
        let s = JointSpace::new(vec![2, 2, 2]);
        let joint = [1, 0, 1];
        let idx = s.index(&joint);
        assert_eq!(s.action(idx), joint.to_vec());
        let others = JointSpace::others(&joint, 1);
        assert_eq!(others, vec![1, 1]);
        assert_eq!(s.compose(1, 0, &others), idx);
        assert_eq!(s.without(0).len(), 4);
    }
}

//! Relief-family feature weighting by nearest hits and misses.
//!
//! Features are min-max scaled to `[0, 1]`, neighbours are found with the
//! Manhattan distance and each hit or miss contributes the squared per-feature
//! difference to the query: hits decrease a feature's weight, misses increase
//! it. ReliefF averages over `k` neighbours per class and weights each miss
//! class by its prior relative to the query's class.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{total_cmp, Scalar};

/// Applies one hit/miss update: `w_f ← w_f − (x_f − nH_f)² + (x_f − nM_f)²`.
pub fn relief_update<T: Scalar>(w: &mut [T], x: &[T], near_hit: &[T], near_miss: &[T]) -> Result<()> {
    let p = w.len();
    for v in [x, near_hit, near_miss] {
        if v.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: v.len(),
            });
        }
    }
    for f in 0..p {
        let dh = x[f] - near_hit[f];
        let dm = x[f] - near_miss[f];
        w[f] += dm * dm - dh * dh;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReliefConfig {
    /// Number of query samples; `None` sweeps every sample once, in order.
    pub iterations: Option<usize>,
    /// Neighbours per class.
    pub neighbors: usize,
    pub seed: u64,
}

impl Default for ReliefConfig {
    fn default() -> Self {
        Self {
            iterations: None,
            neighbors: 10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliefWeights<T> {
    pub weights: Vec<T>,
    pub iterations: usize,
    pub neighbors: usize,
    pub seed: u64,
}

/// Min-max scales each column to `[0, 1]`; constant columns become zero.
pub fn minmax_normalize<T: Scalar>(x: &Matrix<T>) -> Matrix<T> {
    let p = x.cols();
    let mut lo = vec![T::infinity(); p];
    let mut hi = vec![T::neg_infinity(); p];
    for r in x.row_iter() {
        for j in 0..p {
            lo[j] = lo[j].min(r[j]);
            hi[j] = hi[j].max(r[j]);
        }
    }
    Matrix::from_fn(x.rows(), p, |i, j| {
        let range = hi[j] - lo[j];
        if range > T::zero() {
            (x[(i, j)] - lo[j]) / range
        } else {
            T::zero()
        }
    })
}

fn query_order(n: usize, iterations: Option<usize>, seed: u64) -> Result<Vec<usize>> {
    match iterations {
        None => Ok((0..n).collect()),
        Some(0) => Err(Error::invalid("relief needs at least one iteration")),
        Some(m) if m == n => Ok((0..n).collect()),
        Some(m) if m < n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.partial_shuffle(&mut rng, m);
            idx.truncate(m);
            Ok(idx)
        }
        Some(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..m).map(|_| rng.gen_range(0..n)).collect())
        }
    }
}

#[inline]
fn manhattan<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum()
}

/// The `k` members of `pool` nearest to `query` (excluding `query` itself);
/// distance ties go to the lower index.
fn nearest<T: Scalar>(pool: &[usize], query: usize, k: usize, d: &[T]) -> Vec<usize> {
    let mut cand: Vec<usize> = pool.iter().copied().filter(|&j| j != query).collect();
    let cmp = |a: &usize, b: &usize| total_cmp(&d[*a], &d[*b]).then(a.cmp(b));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    cand
}

/// ReliefF weights.
pub fn relieff_weights<T: Scalar>(ds: &Dataset<T>, config: &ReliefConfig) -> Result<ReliefWeights<T>> {
    let k = config.neighbors;
    if k == 0 {
        return Err(Error::invalid("relief needs at least one neighbour"));
    }
    let n = ds.n();
    let p = ds.p();
    let mut members = vec![Vec::new(); ds.n_classes()];
    for (i, &c) in ds.y().iter().enumerate() {
        members[c].push(i);
    }
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < k + 1 {
            return Err(Error::InsufficientData(format!(
                "class '{}' has {} samples; ReliefF with k = {k} needs at least {}",
                ds.class_names()[c],
                m.len(),
                k + 1
            )));
        }
    }
    let queries = query_order(n, config.iterations, config.seed)?;
    let m = queries.len();
    let x = minmax_normalize(ds.x());
    let prior: Vec<T> = members.iter().map(|g| T::count(g.len()) / T::count(n)).collect();
    let scale = T::one() / (T::count(m) * T::count(k));

    let deltas: Vec<Vec<T>> = queries
        .par_iter()
        .map(|&q| {
            let xq = x.row(q);
            let d: Vec<T> = x.row_iter().map(|r| manhattan(xq, r)).collect();
            let cq = ds.y()[q];
            let mut delta = vec![T::zero(); p];
            for h in nearest(&members[cq], q, k, &d) {
                for (f, df) in delta.iter_mut().enumerate() {
                    let diff = xq[f] - x[(h, f)];
                    *df -= diff * diff;
                }
            }
            for (c, group) in members.iter().enumerate() {
                if c == cq || group.is_empty() {
                    continue;
                }
                let w = prior[c] / (T::one() - prior[cq]);
                for mi in nearest(group, q, k, &d) {
                    for (f, df) in delta.iter_mut().enumerate() {
                        let diff = xq[f] - x[(mi, f)];
                        *df += w * diff * diff;
                    }
                }
            }
            delta
        })
        .collect();

    let mut weights = vec![T::zero(); p];
    for delta in deltas {
        for (w, dv) in weights.iter_mut().zip(delta) {
            *w += dv * scale;
        }
    }
    Ok(ReliefWeights {
        weights,
        iterations: m,
        neighbors: k,
        seed: config.seed,
    })
}

/// Original two-class Relief: one nearest hit and one nearest miss per query,
/// averaged over the queries.
pub fn relief_basic<T: Scalar>(ds: &Dataset<T>, iterations: Option<usize>, seed: u64) -> Result<ReliefWeights<T>> {
    let counts = ds.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() != 2 {
        return Err(Error::invalid("basic Relief needs exactly two classes"));
    }
    let queries = query_order(ds.n(), iterations, seed)?;
    let x = minmax_normalize(ds.x());
    let mut weights = vec![T::zero(); ds.p()];
    let m = T::count(queries.len());
    let mut acc = vec![T::zero(); ds.p()];
    for &q in &queries {
        let xq = x.row(q);
        let mut hit: Option<(T, usize)> = None;
        let mut miss: Option<(T, usize)> = None;
        for j in 0..ds.n() {
            if j == q {
                continue;
            }
            let d = manhattan(xq, x.row(j));
            let slot = if ds.y()[j] == ds.y()[q] { &mut hit } else { &mut miss };
            if slot.is_none_or(|(best, _)| d < best) {
                *slot = Some((d, j));
            }
        }
        let (Some((_, h)), Some((_, mi))) = (hit, miss) else {
            return Err(Error::InsufficientData("every class needs two samples".into()));
        };
        acc.iter_mut().for_each(|a| *a = T::zero());
        relief_update(&mut acc, xq, x.row(h), x.row(mi))?;
        for (w, a) in weights.iter_mut().zip(&acc) {
            *w += *a / m;
        }
    }
    Ok(ReliefWeights {
        weights,
        iterations: queries.len(),
        neighbors: 1,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn update_examples() {
        let mut w = vec![0.0, 0.0];
        relief_update(&mut w, &[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(w, vec![1.0, 0.0]);

        let mut w = vec![0.0, 0.0];
        relief_update(&mut w, &[0.0, 0.0], &[0.0, 0.1], &[1.0, 0.1]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0);
        assert_abs_diff_eq!(w[1], 0.0);

        let mut w = vec![0.3, -0.2, 0.0];
        relief_update(&mut w, &[0.1, 0.5, 0.9], &[0.4, 0.4, 0.4], &[0.4, 0.4, 0.4]).unwrap();
        assert_eq!(w, vec![0.3, -0.2, 0.0]);

        assert!(relief_update(&mut w, &[0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).is_err());
    }

    fn blobs(n: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Matrix::from_fn(n, 2, |i, j| {
            if j == 0 {
                (i % 2) as f64 * 5.0 + rng.gen::<f64>()
            } else {
                rng.gen::<f64>()
            }
        });
        Dataset::from_parts(x, (0..n).map(|i| i % 2).collect()).unwrap()
    }

    #[test]
    fn signal_beats_noise() {
        let ds = blobs(60, 1);
        let w = relieff_weights(
            &ds,
            &ReliefConfig {
                neighbors: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(w.weights[0] > w.weights[1]);
        assert!(w.weights.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn small_class_rejected() {
        let ds = blobs(12, 2);
        let cfg = ReliefConfig {
            neighbors: 6,
            ..Default::default()
        };
        assert!(matches!(relieff_weights(&ds, &cfg), Err(Error::InsufficientData(_))));
        let cfg = ReliefConfig {
            iterations: Some(0),
            neighbors: 1,
            seed: 0,
        };
        assert!(relieff_weights(&ds, &cfg).is_err());
    }

    #[test]
    fn sampling_modes() {
        assert_eq!(query_order(5, None, 0).unwrap(), vec![0, 1, 2, 3, 4]);
        let q = query_order(10, Some(4), 3).unwrap();
        assert_eq!(q.len(), 4);
        let mut d = q.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 4);
        assert_eq!(query_order(3, Some(8), 3).unwrap().len(), 8);
    }

    #[test]
    fn basic_relief_matches_relieff_k1() {
        let ds = blobs(40, 9);
        let a = relief_basic(&ds, None, 0).unwrap();
        let b = relieff_weights(
            &ds,
            &ReliefConfig {
                neighbors: 1,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}

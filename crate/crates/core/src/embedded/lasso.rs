//! Penalized binary logistic regression.
//!
//! Minimizes `Σ logloss + (1/C)·‖β‖₁` (L1) or `Σ logloss + (1/(2C))·‖β‖²`
//! (L2) over z-scored features with an unpenalized intercept. The solver is
//! cyclic coordinate descent: each coordinate first tries a full proximal
//! Newton step and, if that fails to decrease the objective enough, takes the
//! proximal step for the curvature bound `L_j = ¼·Σ x_ij²`, which always
//! decreases it. Soft-thresholding leaves coefficients at exactly zero.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const MAX_EPOCHS: usize = 10_000;
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    #[default]
    L1,
    L2,
}

impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Penalty::L1),
            "l2" => Ok(Penalty::L2),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel<T> {
    pub beta0: T,
    /// Coefficients on the standardized features.
    pub beta: Vec<T>,
    pub c: f64,
    pub penalty: Penalty,
    pub standardizer: Standardizer<T>,
    pub epochs: usize,
}

impl<T: Scalar> LogRegModel<T> {
    pub fn nonzero(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != T::zero()).collect()
    }

    /// Intercept and coefficients on the original feature scale.
    pub fn raw_coefficients(&self) -> (T, Vec<T>) {
        let s = &self.standardizer;
        let mut b0 = self.beta0;
        let beta = (0..self.beta.len())
            .map(|j| {
                if s.is_constant(j) {
                    T::zero()
                } else {
                    let b = self.beta[j] / s.stdevs[j];
                    b0 -= b * s.means[j];
                    b
                }
            })
            .collect();
        (b0, beta)
    }

    /// Class-1 labels: `pr ≥ 0.5`.
    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<usize>> {
        Ok(logreg_predict_proba(self, x)?
            .into_iter()
            .map(|p| usize::from(p >= T::real(0.5)))
            .collect())
    }
}

#[inline]
fn sigmoid<T: Scalar>(eta: T) -> T {
    if eta >= T::zero() {
        T::one() / (T::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^η)` without overflow.
#[inline]
fn softplus<T: Scalar>(eta: T) -> T {
    eta.max(T::zero()) + (-eta.abs()).exp().ln_1p()
}

fn penalty_value<T: Scalar>(beta: &[T], lambda: T, penalty: Penalty) -> T {
    match penalty {
        Penalty::L1 => lambda * beta.iter().map(|b| b.abs()).sum::<T>(),
        Penalty::L2 => lambda * T::real(0.5) * beta.iter().map(|&b| b * b).sum::<T>(),
    }
}

fn check_xy<T: Scalar>(x: &Matrix<T>, y: &[usize], beta: &[T]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if x.cols() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: beta.len(),
        });
    }
    Ok(())
}

/// Summed logistic loss and its gradient `(∂/∂β0, ∂/∂β)` for 0/1 labels.
pub fn logistic_loss_gradient<T: Scalar>(x: &Matrix<T>, y: &[usize], beta0: T, beta: &[T]) -> Result<(T, T, Vec<T>)> {
    check_xy(x, y, beta)?;
    let mut loss = T::zero();
    let mut g0 = T::zero();
    let mut g = vec![T::zero(); beta.len()];
    for (r, &yi) in x.row_iter().zip(y) {
        let eta = beta0 + r.iter().zip(beta).map(|(&a, &b)| a * b).sum::<T>();
        let yv = T::count(yi);
        loss += softplus(eta) - yv * eta;
        let resid = sigmoid(eta) - yv;
        g0 += resid;
        for (gj, &xj) in g.iter_mut().zip(r) {
            *gj += resid * xj;
        }
    }
    Ok((loss, g0, g))
}

/// Penalized objective with `C` as the inverse penalty weight.
pub fn logistic_objective<T: Scalar>(
    x: &Matrix<T>,
    y: &[usize],
    beta0: T,
    beta: &[T],
    c: f64,
    penalty: Penalty,
) -> Result<T> {
    let (loss, _, _) = logistic_loss_gradient(x, y, beta0, beta)?;
    Ok(loss + penalty_value(beta, T::real(1.0 / c), penalty))
}

#[inline]
fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// Coordinate state: linear predictors kept in sync with the coefficients.
struct Coord<'a, T> {
    cols: Vec<Vec<T>>,
    y: &'a [T],
    eta: Vec<T>,
}

impl<T: Scalar> Coord<'_, T> {
    fn loss(&self) -> T {
        self.eta.iter().zip(self.y).map(|(&e, &y)| softplus(e) - y * e).sum()
    }

    /// Loss after moving coordinate `col` (`None` = intercept) by `delta`.
    fn loss_shifted(&self, col: Option<usize>, delta: T) -> T {
        let mut s = T::zero();
        for i in 0..self.eta.len() {
            let xi = col.map_or(T::one(), |j| self.cols[j][i]);
            let e = self.eta[i] + delta * xi;
            s += softplus(e) - self.y[i] * e;
        }
        s
    }

    /// Gradient and Hessian of the loss along the coordinate.
    fn grad_hess(&self, col: Option<usize>) -> (T, T) {
        let mut g = T::zero();
        let mut h = T::zero();
        for i in 0..self.eta.len() {
            let xi = col.map_or(T::one(), |j| self.cols[j][i]);
            let p = sigmoid(self.eta[i]);
            g += (p - self.y[i]) * xi;
            h += p * (T::one() - p) * xi * xi;
        }
        (g, h)
    }

    fn shift(&mut self, col: Option<usize>, delta: T) {
        for i in 0..self.eta.len() {
            let xi = col.map_or(T::one(), |j| self.cols[j][i]);
            self.eta[i] += delta * xi;
        }
    }
}

/// Fits the model on a two-class dataset; class id 1 is the positive class.
pub fn lasso_logreg_fit<T: Scalar>(train: &Dataset<T>, c: f64, penalty: Penalty) -> Result<LogRegModel<T>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {c}")));
    }
    let counts = train.class_counts();
    if counts.len() != 2 || counts.contains(&0) {
        return Err(Error::invalid(format!(
            "logistic regression needs exactly two classes, found {}",
            counts.iter().filter(|&&c| c > 0).count()
        )));
    }
    let standardizer = Standardizer::fit(train.x());
    let z = standardizer.transform(train.x())?;
    let n = train.n();
    let p = train.p();
    let yv: Vec<T> = train.y().iter().map(|&c| T::count(c)).collect();
    let lambda = T::real(1.0 / c);
    let sigma = T::real(1e-4);
    let cols: Vec<Vec<T>> = (0..p).map(|j| z.column(j)).collect();
    let lip: Vec<T> = cols
        .iter()
        .map(|col| T::real(0.25) * col.iter().map(|&v| v * v).sum::<T>())
        .collect();
    let mut st = Coord {
        cols,
        y: &yv,
        eta: vec![T::zero(); n],
    };
    let mut beta0 = T::zero();
    let mut beta = vec![T::zero(); p];
    let tol = T::real(TOLERANCE);

    for epoch in 1..=MAX_EPOCHS {
        let mut max_change = T::zero();

        // Intercept: Newton step with backtracking; always descends for the
        // convex smooth loss.
        let (g, h) = st.grad_hess(None);
        if g != T::zero() {
            let base = st.loss();
            let mut step = -g
                / h.max(T::real(0.25) * T::count(n) * T::epsilon())
                    .max(T::min_positive_value());
            for _ in 0..60 {
                if st.loss_shifted(None, step) <= base + sigma * step * g {
                    break;
                }
                step *= T::real(0.5);
            }
            if st.loss_shifted(None, step) <= base {
                st.shift(None, step);
                beta0 += step;
                max_change = max_change.max(step.abs());
            }
        }

        for j in 0..p {
            if lip[j] == T::zero() {
                continue;
            }
            let (g, h) = st.grad_hess(Some(j));
            let bj = beta[j];
            let prox = |curv: T| match penalty {
                Penalty::L1 => soft_threshold(bj - g / curv, lambda / curv),
                Penalty::L2 => (curv * bj - g) / (curv + lambda),
            };
            let pen = |b: T| match penalty {
                Penalty::L1 => lambda * b.abs(),
                Penalty::L2 => lambda * T::real(0.5) * b * b,
            };
            let base = st.loss() + pen(bj);
            let mut next = bj;
            if h > T::zero() {
                let cand = prox(h);
                let d = cand - bj;
                let predicted = g * d + pen(cand) - pen(bj);
                if d != T::zero() && st.loss_shifted(Some(j), d) + pen(cand) <= base + sigma * predicted {
                    next = cand;
                }
            }
            if next == bj {
                // Majorization step: F decreases monotonically.
                let cand = prox(lip[j]);
                if cand != bj && st.loss_shifted(Some(j), cand - bj) + pen(cand) <= base {
                    next = cand;
                }
            }
            let d = next - bj;
            if d != T::zero() {
                st.shift(Some(j), d);
                beta[j] = next;
                max_change = max_change.max(d.abs());
            }
        }

        let scale = T::one() + beta.iter().fold(beta0.abs(), |m, b| m.max(b.abs()));
        if max_change < tol.max(T::real(16.0) * T::epsilon() * scale) {
            return Ok(LogRegModel {
                beta0,
                beta,
                c,
                penalty,
                standardizer,
                epochs: epoch,
            });
        }
        if epoch == MAX_EPOCHS {
            return Err(Error::NotConverged {
                solver: "logistic coordinate descent",
                iterations: MAX_EPOCHS,
                last_change: max_change.as_f64(),
            });
        }
    }
    unreachable!("loop returns on its last epoch")
}

/// Standard logistic probability of class 1 for each query row.
pub fn logreg_predict_proba<T: Scalar>(model: &LogRegModel<T>, queries: &Matrix<T>) -> Result<Vec<T>> {
    let z = model.standardizer.transform(queries)?;
    Ok(z.row_iter()
        .map(|r| {
            let eta = model.beta0 + r.iter().zip(&model.beta).map(|(&a, &b)| a * b).sum::<T>();
            sigmoid(eta)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn overlapping(n: usize, p: usize, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let x = Matrix::from_fn(n, p, |i, j| {
            let signal = if j < 2 {
                y[i] as f64 * (1.0 - 0.4 * j as f64)
            } else {
                0.0
            };
            signal + rng.gen::<f64>() * 2.0
        });
        Dataset::from_parts(x, y).unwrap()
    }

    #[test]
    fn heavy_penalty_gives_base_rate() {
        let mut d = overlapping(30, 3, 1);
        // Drop 5 positives to get an unbalanced base rate.
        let rows: Vec<usize> = (0..30).filter(|&i| !(d.y()[i] == 1 && i < 10)).collect();
        d = d.select_rows(&rows).unwrap();
        let m = lasso_logreg_fit(&d, 1e-4, Penalty::L1).unwrap();
        assert!(m.beta.iter().all(|&b| b == 0.0));
        let pos = d.y().iter().filter(|&&c| c == 1).count() as f64;
        let neg = d.n() as f64 - pos;
        assert!((m.beta0 - (pos / neg).ln()).abs() < 1e-6);
    }

    #[test]
    fn sigmoid_limits() {
        let d = overlapping(20, 2, 2);
        let mut m = lasso_logreg_fit(&d, 1e-4, Penalty::L1).unwrap();
        m.beta0 = 0.0;
        assert_eq!(logreg_predict_proba(&m, d.x()).unwrap()[0], 0.5);
        m.beta0 = 800.0;
        assert_eq!(logreg_predict_proba(&m, d.x()).unwrap()[0], 1.0);
        assert!(logreg_predict_proba(&m, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn separable_1d_fits_exactly() {
        let x = Matrix::from_fn(20, 1, |i, _| i as f64);
        let d = Dataset::from_parts(x, (0..20).map(|i| usize::from(i >= 10)).collect()).unwrap();
        let m = lasso_logreg_fit(&d, 10.0, Penalty::L1).unwrap();
        assert_eq!(m.predict(d.x()).unwrap(), d.y());
    }

    #[test]
    fn path_is_monotone() {
        let d = overlapping(200, 6, 3);
        let mut last = usize::MAX;
        for c in [10.0, 3.0, 1.0, 0.3, 0.1, 0.01] {
            let m = lasso_logreg_fit(&d, c, Penalty::L1).unwrap();
            let k = m.nonzero().len();
            assert!(k <= last, "C = {c}: {k} > {last}");
            last = k;
        }
    }

    #[test]
    fn optimum_is_stationary() {
        let d = overlapping(100, 4, 4);
        for penalty in [Penalty::L1, Penalty::L2] {
            let m = lasso_logreg_fit(&d, 0.5, penalty).unwrap();
            let z = m.standardizer.transform(d.x()).unwrap();
            let (_, g0, g) = logistic_loss_gradient(&z, d.y(), m.beta0, &m.beta).unwrap();
            assert!(g0.abs() < 1e-4);
            for (j, gj) in g.iter().enumerate() {
                match penalty {
                    Penalty::L1 if m.beta[j] == 0.0 => assert!(gj.abs() <= 2.0 + 1e-4),
                    Penalty::L1 => assert!((gj + 2.0 * m.beta[j].signum()).abs() < 1e-4),
                    Penalty::L2 => assert!((gj + 2.0 * m.beta[j]).abs() < 1e-4),
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let d = overlapping(20, 2, 5);
        assert!(lasso_logreg_fit(&d, 0.0, Penalty::L1).is_err());
        let three = Dataset::from_parts(Matrix::from_fn(6, 1, |i, _| i as f64), vec![0, 1, 2, 0, 1, 2]).unwrap();
        assert!(lasso_logreg_fit(&three, 1.0, Penalty::L1).is_err());
    }
}

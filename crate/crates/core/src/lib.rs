//! Feature selection and linear dimensionality reduction.
//!
//! Filters ([`filters`], [`relief`], [`cfs`]) score features without a
//! classifier; wrappers ([`wrappers`]) search subsets with a k-NN classifier in
//! the loop; embedded methods ([`embedded`]) select features while fitting a
//! tree, an L1-penalized logistic regression or a random forest; transforms
//! ([`transform`]) project onto PCA or LDA components.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common choices.

pub mod cfs;
pub mod classify;
pub mod data;
pub mod embedded;
pub mod error;
pub mod filters;
pub mod linalg;
pub mod relief;
pub mod report;
pub mod reproduce;
pub mod scalar;
pub mod transform;
pub mod wrappers;

pub use classify::{cross_val_accuracy, holdout_accuracy, knn_fit, knn_predict, EvalReport, KnnConfig, Metric};
pub use data::{
    discretize_equal_frequency, kfold, load_csv, read_csv, split, Dataset, DiscretizedView, FoldAssignment,
    Standardizer,
};
pub use error::{Error, Result};
pub use filters::{apply_policy, rank_correlation, rank_features, CorrelationKind, FeatureRanking, Policy, RankMethod};
pub use linalg::Matrix;
pub use scalar::Scalar;
pub use transform::LinearTransform;
pub use wrappers::SubsetResult;

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type FeatureRanking64 = FeatureRanking<f64>;
pub type LinearTransform64 = LinearTransform<f64>;

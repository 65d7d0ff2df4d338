//! Embedded selection: features chosen as a side effect of fitting a model.

pub mod forest;
pub mod lasso;
pub mod tree;

pub use forest::{rf_fit, rf_oob_accuracy, rf_permutation_importance, ForestConfig, ForestModel};
pub use lasso::{
    lasso_logreg_fit, logistic_loss_gradient, logistic_objective, logreg_predict_proba, LogRegModel, Penalty,
};
pub use tree::{tree_fit, tree_selected_features, Criterion, Node, TreeConfig, TreeModel};

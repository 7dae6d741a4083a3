// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod dispatch;
pub mod experiments;
pub mod grid_model;
pub mod lp;
pub mod metrics;

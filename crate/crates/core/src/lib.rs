//! Meshless time-domain Maxwell solver on staggered particle clouds.

// Negated float comparisons are how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod cavity;
pub mod cloud;
pub mod constants;
pub mod correction;
pub mod kernel;
pub mod neighbors;
pub mod operators;
pub mod scenario;
pub mod source;
pub mod sparse;
pub mod stepping;

/// The user guide, compiled here so that its examples run as doc tests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/clouds.md")]
    pub mod clouds {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/consistency.md")]
    pub mod consistency {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/time-stepping.md")]
    pub mod time_stepping {}
    #[doc = include_str!("../../../book/src/stability.md")]
    pub mod stability {}
    #[doc = include_str!("../../../book/src/boundaries.md")]
    pub mod boundaries {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    pub mod scenarios {}
    #[doc = include_str!("../../../book/src/validation.md")]
    pub mod validation {}
}

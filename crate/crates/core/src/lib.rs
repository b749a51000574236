//! Batched singular value decomposition of 2×2 real and complex matrices.
//!
//! Each matrix is first scaled by an exact power of two so that no
//! intermediate value can overflow, then factored as `U R V*` with a real
//! upper-triangular `R`, whose SVD gives the singular values and vectors.
//! The kernels contain no branches: every step is written over a generic
//! lane type, so the same code runs eight matrices at a time in 512-bit
//! vectors or one at a time, with bit-identical results.
//!
//! * [`lane_math`]: the lane abstraction and scalar/vector math helpers.
//! * [`svd2_core`]: the per-lane pipeline.
//! * [`batch_layout`]: structure-of-arrays batches padded to whole chunks.
//! * [`batch_driver`]: parallel execution over a batch.
//! * [`verify`]: extended-precision metrics and a reference SVD.

pub mod lane_math;
pub mod svd2_core;
pub mod batch_layout;
pub mod batch_driver;
pub mod verify;

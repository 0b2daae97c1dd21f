//! Multi-mode tensor-train (MTT) completion of third-order tensors.
//!
//! A partially observed tensor (a color image, a video clip, a multispectral
//! cube) is completed by fitting, for each of its three modes, a tensor-train
//! factorization of the suitably permuted tensor, while penalizing periodic
//! first-order differences along all three axes. The fit is computed by
//! proximal alternating minimization; see [`solver`].
//!
//! ```
//! use mttd3r::prelude::*;
//!
//! let truth = Tensor3::from_fn([12, 10, 4], |i, j, s| {
//!     0.5 + 0.4 * ((i as f64) * 0.3).sin() * ((j as f64) * 0.2 + s as f64).cos()
//! });
//! let mask = random_mask(truth.dims(), 0.5, 7).unwrap();
//! let mut cfg = SolverConfig::new(MttRank([(2, 2); 3]));
//! cfg.max_iter = 50;
//! let report = solve(&truth, &mask, &cfg).unwrap();
//! assert!(psnr(&report.recovered, &truth).unwrap() > 20.0);
//! ```

pub mod diffops;
pub mod error;
pub mod io;
pub mod metrics;
pub mod mtt;
pub mod solver;
pub mod tensor;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diffops::{Axis, SmoothWeights};
    pub use crate::error::{Error, Result};
    pub use crate::io::{random_mask, ObservationMask};
    pub use crate::metrics::{psnr, quality_report, QualityReport};
    pub use crate::mtt::{mtt_rank, tt_svd, MttFactor, MttRank};
    pub use crate::solver::{solve, SolveReport, SolverConfig};
    pub use crate::tensor::{Matrix, Mode, Tensor3};
}

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    pub mod tensors {}
    #[doc = include_str!("../../../book/src/mtt.md")]
    pub mod mtt {}
    #[doc = include_str!("../../../book/src/smoothness.md")]
    pub mod smoothness {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub mod metrics {}
    #[doc = include_str!("../../../book/src/formats-cli.md")]
    pub mod formats_cli {}
}

//! Limit sets of unconventional iterated function systems over the p-adic integers.
//!
//! A system of affine contractions `f_1..f_N` of `Z_p` and an `M x L` index
//! family `xi` define, for every word `alpha` and depth `n`, the map
//! `F_{alpha,n} = sum_i prod_j f_{xi_ij(alpha_1)} o ... o f_{xi_ij(alpha_n)}`.
//! The sums of products of the component fixed points accumulate on the limit
//! set, which is sampled here exhaustively by depth and then probed with exact
//! ultrametric checks.
//!
//! All arithmetic is exact modulo `p^K` for a fixed precision `K`.
//!
//! ```
//! use zp_limits::gallery::{make_px_system, parity_family, XiMatrix};
//! use zp_limits::limit::enumerate_lambda0;
//!
//! let px = make_px_system(3, 8).unwrap();
//! let case4 = parity_family(&XiMatrix::case(4).unwrap()).unwrap();
//! let sample = enumerate_lambda0(px.system(), &case4, 1).unwrap();
//! let shown: Vec<String> = sample.points().iter().map(|x| x.to_string()).collect();
//! assert_eq!(shown, ["0,0,0,0,0,0,0,0", "1,0,0,0,0,0,0,0"]);
//! ```

pub mod affine;
pub mod config;
pub mod error;
pub mod exec;
pub mod export;
pub mod family;
pub mod gallery;
pub mod limit;
pub mod metric;
pub mod padic;
pub mod verify;

pub use affine::{AffineMap, ContractionSystem};
pub use error::{Error, Result};
pub use exec::Execution;
pub use family::{IndexEntry, IndexFamily, IndexMap, SymbolWord};
pub use limit::{LimitPoint, LimitSetSample};
pub use metric::{MetricReport, Verdict};
pub use padic::{PadicInt, Valuation};

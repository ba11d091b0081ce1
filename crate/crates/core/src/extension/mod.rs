//! Extension schemes for `ℓ_p`-type sequences: Jodeit bounds, Abel regularisation, q-ranges,
//! the convolution criterion and support transforms.

mod convolve;
mod jodeit;
mod lp;
mod qrange;
mod support;

pub use convolve::{convolve_sequences, ConvolutionReport, CONVOLUTION_RADIUS};
pub use jodeit::{jodeit_bound, jodeit_piecewise, tau, ConstructionTrace, ExtensionResult, TauEstimate};
pub use lp::{compact_support_lp, lp_extend, DEFAULT_R_SCHEDULE};
pub use qrange::{parse_rational, q_range, q_range_f64, QRange, Upper};
pub use support::{rescale, rescale_function, support_normalize, support_radius, KernelRecord};

//! Measures on the torus and the line, transference through a kernel, and Wiener averages.

mod majorant;
mod transfer;
mod types;
mod wiener;

pub use majorant::{radial_majorant_check, MajorantReport};
pub use transfer::{atom_weight, transfer, transfer_kernel, transfer_with};
pub use types::{LineAtom, LineMeasure, LineSpectrum, TorusAtom, TorusMeasure};
pub use wiener::{wiener_atom, wiener_energy, SpectrumSamples, WienerEstimate, DEFAULT_LAMBDAS, EPS_ATOM};

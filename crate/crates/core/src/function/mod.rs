//! Function representation, Fourier transforms, periodization and the extension series.

mod expr;
mod fourier;
mod grid;
mod lattice;
mod sequence;
mod spec;

pub use expr::{sinc, Expr};
pub use fourier::{fourier_transform, fourier_transform_quadrature, PointEval, QuadratureFt, Transform};
pub use grid::{GridConfig, GridFunction, PERIOD_SAMPLES};
pub use lattice::{
    check_quarter_support, extend, partial_abs_sum, periodization_sup, periodize, poisson_constant,
    ExtensionSeries, Periodization, PoissonReport, POISSON_PROBES,
};
pub use sequence::{fejer_regularize, ClosedForm, DecayRule, SequenceSpec};
pub use spec::{DecayBound, Envelope, FunctionSpec};

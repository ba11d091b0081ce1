//! Multiplier norms and summability-kernel membership.

mod certificate;
mod estimator;
mod membership;

pub use certificate::{
    l1_norm, lp_norm_function, m1_norm, m2_norm, m2_norm_samples, sequence_multiplier_norm, CertificateKind,
    NormCertificate,
};
pub use estimator::{mp_norm_lower_bound, DiscreteMultiplier, Multiplier, DEFAULT_SEED};
pub use membership::{
    block_sum_criterion, classify_s1, classify_s2, fiber_norms, product_kernel, s1_witness, MembershipReport,
    Space, Verdict, DIVERGENCE_RADII, FIBER_POINTS,
};

//! Certificate checks: exact sum-of-squares identities, numeric Farkas
//! re-verification and evaluation of the inequalities on matrix tuples.

mod farkas;
mod instance;
mod rational;
mod sos;

pub use farkas::{farkas_check, farkas_check_detailed, FarkasCheck};
pub use instance::{
    eval_instance, improved_lower_bound, instance_from_json, instance_to_json, sharp_pair,
    InstanceReport, Violation, DEFAULT_INSTANCE_TOLERANCE,
};
pub use rational::{psd_check_exact, RationalMatrix};
pub use sos::{
    build_m2_certificate, expand_gram, sos_from_json, sos_to_json, verify_sos,
    verify_sos_detailed, SosCertificate, SosVerification,
};

//! Upper bounds on the oblivious-transfer (OT) capacity of discrete memoryless
//! channels.
//!
//! The central quantity is
//!
//! ```text
//! alpha(U;V) = min over Q-U-V of I(U;Q|V) + I(U;V|Q)
//! ```
//!
//! the lowest point of the tension region of `(U, V)` on the `I(V;Q|U) = 0`
//! plane. Maximizing `alpha(X;Y)` over the channel input distribution bounds
//! the OT capacity from above and never exceeds the older
//! `max min(I(X;Y), H(X|Y))` bound.
//!
//! Modules:
//!
//! - [`info`]: exact finite-alphabet entropies and (conditional) mutual information
//! - [`channel`]: channel models and the channel file format
//! - [`tension`]: the alpha functional, its epsilon relaxation, and the tension-region slice
//! - [`bounds`]: channel-level upper and lower bounds, Z-channel sweep
//! - [`verify`]: executable checks of the lemmas behind the bound
//!
//! All logarithms are base 2; every value is in bits (per channel use for
//! channel bounds).

#![forbid(unsafe_code)]

pub mod bounds;
pub mod channel;
mod error;
pub mod info;
pub mod rng;
pub mod tension;
pub mod textfmt;
pub mod verify;

pub use bounds::{
    ac13_bound, erasure_lower_bound_z, new_upper_bound, source_model_bound,
    zchannel_restricted_bound, zchannel_sweep, BoundResult, SweepMode, SweepRow,
};
pub use channel::{parse_channel, standard_channel, validate_channel, Channel, ChannelKind};
pub use error::{Error, Result};
pub use info::{
    compose_joint, conditional_entropy, conditional_mutual_information, entropy,
    extend_with_coupling, mutual_information, Cmi, JointDist, JointDist3, ProbVector,
};
pub use tension::{
    alpha_epsilon, alpha_inner, alpha_joint, objective_f, tension_slice, Coupling,
    OptimizerOptions, TensionPoint,
};

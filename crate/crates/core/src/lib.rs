//! Instability tongues of Hill equations driven by a nonlinear oscillator.
//!
//! The library works on the coupled pair
//!
//! ```text
//! u''(t) + 4 u(t) + f(u(t)) = 0,        u(0) = q, u'(0) = 0,
//! z''(t) + (beta + g(u(t,q))) z(t) = 0,
//! ```
//!
//! where `f(x) = sum_{k>=2} alpha_k x^k` and `g(x) = sum_{k>=1} gamma_k x^k`
//! are polynomial (truncated Taylor) data. Two independent pipelines are
//! provided:
//!
//! * an exact-rational side ([`trigpoly`], [`lindstedt`], [`hillseries`],
//!   [`tongues`]) that expands the periodic orbit, the rescaled Hill
//!   coefficient and the band-edge eigenvalues `beta_N^{+/-}(q)` as formal
//!   power series in the amplitude `q`, and
//! * a double-precision Floquet oracle ([`floquet`]) that integrates the
//!   monodromy problem and locates the tongue boundaries numerically.
//!
//! The [`tongues`] module combines the two into tongue-length asymptotics,
//! trumpet/horn shape classification and coexistence detection, and
//! [`verify`] bundles the cross checks used by the command-line `verify`
//! subcommand.

pub mod error;
pub mod floquet;
pub mod hillseries;
pub mod lindstedt;
pub mod tongues;
pub mod trigpoly;
pub mod verify;

pub use error::{OracleError, SeriesError};
pub use floquet::{FloquetResult, IntegratorSettings, NumericProblem, TongueRecord};
pub use hillseries::{CouplingSpec, EigenBranch, HillCoefficientSeries, Parity};
pub use lindstedt::{LindstedtExpansion, OscillatorSpec};
pub use tongues::{CoexistenceReport, OrderEstimate, ShapeVerdict, TongueShape};
pub use trigpoly::{rat, rat_int, CosPoly, Rat};

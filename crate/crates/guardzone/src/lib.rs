//! Guard zones, interference levels, and link budgets for a CDMA overlay
//! sharing spectrum with an analog FM cellular network.
//!
//! A seven-cell CDMA cluster is dropped into an FM network that keeps
//! using the shared band outside the overlay. Four questions follow:
//!
//! * How much forward traffic power does a CDMA cell need when the
//!   nearest in-band FM sites sit a given distance away, and how far must
//!   they be pushed back before the budget closes ([`forward`])?
//! * How much do CDMA mobiles raise the interference seen by a
//!   surrounding FM cell site, and what separation keeps its
//!   carrier-to-interference ratio acceptable ([`reverse`])?
//! * How does external interference raise a receiver's effective noise
//!   floor ([`forward::external_interference_penalty`])?
//! * Do the closed-form mobile-disc integrals agree with direct Monte
//!   Carlo simulation ([`reverse::monte_carlo_interference`])?
//!
//! Powers, gains, and distances are carried in unit-safe wrappers
//! ([`units`]); geometry lives in [`layout`], the path-loss model in
//! [`propagation`], and scenario assembly in [`config`].

pub mod config;
pub mod forward;
pub mod layout;
pub mod linkbudget;
pub mod propagation;
pub mod report;
pub mod reverse;
pub mod solver;
pub mod units;

pub use config::{resolve, Preset, ResolvedConfig};
pub use forward::{external_interference_penalty, ForwardScenario};
pub use reverse::{aggregate_mobile_interference, monte_carlo_interference, ReverseScenario};
pub use solver::GuardZoneResult;
pub use units::{Decibels, Distance, PowerQuantity};

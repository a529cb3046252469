//! Outage-minimal power allocation for three-phase bidirectional
//! decode-and-forward relaying over Rayleigh block fading.
//!
//! The two end nodes invert their uplink channels above a cutoff, the relay
//! broadcasts with the least power that reaches both ends and truncates
//! above a second cutoff. Each cutoff follows from an average power budget.
//! This crate solves for those cutoffs, evaluates the resulting outage
//! probability in closed form and checks every closed form against a seeded
//! Monte Carlo simulation.

pub mod endnode;
pub mod error;
pub mod montecarlo;
pub mod oracle;
pub mod outage;
pub mod relay;
pub mod scenario;
pub mod specfun;
pub mod system;

pub use endnode::{solve_cutoff, EndNodePolicy};
pub use error::{Error, Result};
pub use montecarlo::{run_fpa, run_opa, PolicyKind, SimReport};
pub use outage::{min_outage, outage_fpa, outage_opa, FpaConfig, OutageCase, OutageReport};
pub use relay::{solve_rho, OpaPolicies, RegionCase, RelayCutoff, RelayParams, RelayPolicy};
pub use specfun::{exp_integral_e1, solve_monotone, Monotonicity, PositiveReal};
pub use system::{delta_of_rate, ChannelState, FadingSampler, LinkConfig, SystemConfig};

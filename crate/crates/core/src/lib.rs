// SPDX-License-Identifier: Apache-2.0

//! Information transmission and disclosure in two-channel networks, computed
//! exactly over explicit finite description systems.
//!
//! * [`bits`], [`system`], [`oracle`]: strings, the pair code, the opcode
//!   machine and its exact complexity oracle.
//! * [`identities`]: exact Shannon-level identity and certificate checking.
//! * [`networks`]: the six topologies, feasibility, metrics, cut bounds and
//!   closed-form minima.
//! * [`search`]: exhaustive feasible-pair enumeration, Pareto frontiers and
//!   witness searches.
//! * [`games`]: constructor-versus-enumerator simulations of the four gap
//!   constructions.
//! * [`proxy`]: compressor-based estimates of the same quantities on real data.

pub mod bits;
pub mod games;
pub mod identities;
pub mod networks;
pub mod oracle;
pub mod proxy;
pub mod search;
pub mod system;

pub use bits::{bits, decode_pair, encode_pair, join, BitString, BitsError};
pub use games::{GameSpec, Theorem};
pub use networks::{Instance, Metrics, Network, Objective, Topology, TransmissionPair};
pub use oracle::{Complexity, ComplexityOracle, Profile, ProgramBudget, Witness};
pub use proxy::{Compressor, DeflateCompressor};
pub use system::{DescriptionSystem, RunOutcome, SystemError, TableEntry};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "KOLMONET_THREADS";

/// Sizes the global rayon pool from `KOLMONET_THREADS` when it is set to a
/// positive integer. Returns the cap that was applied. Calling it after the
/// pool exists has no effect.
pub fn configure_threads_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok()?;
    if n == 0 {
        return None;
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok()?;
    Some(n)
}

//! Independent checkers for the production solvers.
//!
//! Nothing here is used by the measures themselves: transportation programs
//! are checked by enumerating spanning-tree vertices instead of pivoting,
//! operational values by Monte Carlo play of the discrimination games, and
//! analytic gradients by finite differences. Seeded generators for random
//! states, channels and measurements live here as well.

mod fd;
mod games;
mod random;
mod vertex;

pub use fd::{fd_subgradient_check, FdReport};
pub use games::{simulate_ehs_game, simulate_kantorovich_game, GameResult};
pub use random::{
    haar_state, random_cptp, random_density, random_ensemble, random_measurement, random_probabilities, random_unital_measurement,
    random_unitary,
};
pub use vertex::lp_vertex_oracle;

//! Simulation and exact analytics for k-unit single-sample prophet
//! inequalities.
//!
//! A seller with `k` identical items faces `n` buyers arriving in a fixed
//! order. Buyer `i` has value `X_i ~ D_i`; the seller never sees `D_i`, only
//! one independent sample `Y_i ~ D_i` per buyer. The static policy studied
//! here posts the `r`-th largest sample as a take-it-or-leave-it price.
//!
//! * [`model`]: value distributions and market instances.
//! * [`market`]: price policies and the sequential allocation.
//! * [`montecarlo`]: seeded, worker-count independent ratio estimation.
//! * [`analytics`]: binomial/Poisson closed forms and bounds.
//! * [`oracle`]: exhaustive rational-arithmetic checks on ranked scenarios.
//! * [`hardinstances`]: adversarial instance families.
//! * [`report`]: CSV/JSON schemas shared with the CLI.

pub mod analytics;
pub mod error;
pub mod hardinstances;
pub mod market;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod report;

pub use error::{Error, Result};
pub use market::{MarketOutcome, PricePolicy};
pub use model::{DistributionSpec, Instance};
pub use montecarlo::{SimConfig, SimReport};

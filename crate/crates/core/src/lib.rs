//! Line configurations over F2.
//!
//! - [`gf2geom`]: points of P^n(F2), quadratic forms, quadric point sets and
//!   the lines they contain.
//! - [`config`]: the configuration type, collinearity and coplanarity,
//!   incidence graphs, distance profiles, morphisms and products.
//! - [`iso`]: isomorphism witnesses, automorphism group orders, canonical
//!   forms.
//! - [`vconfig`]: V-configuration certificates, numeric identities,
//!   parameter derivation, reconstruction checks and the classifier.
//! - [`catalog`]: Fano plane, P^n, (P^1)^n, Q_{2n}^- and the 27 lines.
//! - [`degree`]: intersection numbers on a blown-up abelian fourfold and
//!   the 1 + 54 + 64 degree ledger.
//! - [`schema`]: JSON and DOT output.

pub mod catalog;
pub mod config;
pub mod degree;
pub mod error;
pub mod gf2geom;
pub mod iso;
pub mod schema;
pub mod vconfig;

pub use config::{IncidenceProfile, LineConfiguration, PointLabel};
pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Light cone and round trip distances on quivers, bounded windows of the
//! stable translation quiver `ZQ`, classification of quivers against the
//! finiteness conditions for `ZQ`, and construction/verification of strongly
//! locally finite sections.
//!
//! The crate is organised bottom-up:
//!
//! * [`quiver`]: finite multidigraphs, the line-based file format and the
//!   structural predicates (acyclicity, components, path finiteness).
//! * [`family`]: the built-in infinite quivers, enumerated on demand, and
//!   [`family::WindowedQuiver`], a finite restriction that remembers where it
//!   was cut.
//! * [`zq`]: vertices `(n, x)` of `ZQ`, the translation and finite slabs.
//! * [`distances`]: the light cone / round trip distances and their spheres.
//! * [`sections`]: section construction, verification and classification.
//! * [`paths`]: exact (big integer) counts of paths and sectional paths.
//! * [`dot`] and [`json`]: output formats used by the command-line tool.

pub mod distances;
pub mod dot;
pub mod error;
pub mod family;
mod graph;
pub mod json;
pub mod paths;
pub mod quiver;
pub mod sections;
pub mod zq;

#[cfg(feature = "testing")]
pub mod testing;

pub use distances::{Budget, ExtDistance, Measured, SphereKind, SphereReport};
pub use error::{Error, Result};
pub use family::{Family, LazyQuiver, WindowedQuiver};
pub use paths::PathCount;
pub use quiver::{ParseMode, Quiver, QuiverSource, VertexId};
pub use sections::{Section, SectionReport};
pub use zq::{BaseScope, Slab, Window, ZVertex};

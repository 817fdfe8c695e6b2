//! Stellar (Majorana) representation of spin-s pure states.

pub mod error;
pub mod fs;
pub mod husimi;
pub mod io;
pub mod par;
pub mod poly;
pub mod sc_basis;
pub mod sphere;
pub mod spin;
pub mod stellar;
pub mod superposition;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result, Warning};
pub use par::Execution;
pub use sphere::{Direction, Rotation, StereoPoint};
pub use spin::{Spin, SpinState};
pub use tolerance::Tolerances;

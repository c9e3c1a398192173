//! Farey-tree arithmetic, a critical circle-map family, and numerical
//! experiments on its frequency locking: tongue atlases, harmonic scalings,
//! dimension estimates and Hölder fits.

pub mod atlas;
pub mod error;
pub mod family;
pub mod farey;
pub mod fit;
pub mod fractal;
pub mod holder;
pub mod rotation;
pub mod scaling;

pub use atlas::{build_atlas, load_atlas, save_atlas, AtlasSpec, Generator, TongueAtlas};
pub use error::{Error, Result};
pub use family::{CircleMap, CriticalFamily, FamilySpec, LiftPoint, SmoothCircleMap};
pub use farey::{FareyCode, FareyDomain, HarmonicCode, HarmonicSymbol, Rational};
pub use rotation::{Comparison, RotationConfig, Tongue};

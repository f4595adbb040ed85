//! Colour morphology on symmetric 2x2 matrix fields.
//!
//! RGB images are embedded as fields of symmetric 2x2 matrices through the
//! hue/chroma/luminance bi-cone, ordered by the Loewner half-order, and
//! filtered with dilation/erosion built on the log-exp supremum (exact
//! characterisation and finite-scale approximation) or on the trace-supremum
//! baseline.

pub mod colour;
pub mod experiments;
pub mod image_io;
pub mod metrics;
pub mod morphology;
pub mod suprema;
pub mod sym2;

pub use image_io::RgbImage8;
pub use morphology::{MatrixImage, ScalarImage, StructuringElement};
pub use suprema::SupMethod;
pub use sym2::{SpectralDecomp, Sym2};

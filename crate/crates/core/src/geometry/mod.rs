//! Submanifolds, their parametrizations and pointwise extrinsic geometry.

mod chart;
mod jet;
mod product;
mod quadrature;

pub use chart::{Axis, Direction, Factor, FieldTerm, Immersion, Mode, ProductChart, VectorField};
pub use jet::{extrinsic_jet, extrinsic_jet_in, product_jet, AmbientAlong, ExtrinsicJet, FrameJet};
pub(crate) use jet::normal_completion;
pub use product::{unit_sphere_volume, ProductOfSpheres};
pub use quadrature::{gauss_legendre, integrand_values, integrate, pairwise_sum, volume_density, Node, QuadratureGrid};

//! Elliptic curves over Q.

pub mod curve;
pub mod global;
pub mod height;
pub mod periods;
pub mod point;
pub mod reduction;
pub mod tate;
pub mod torsion;

pub use curve::{minimal_model, minimal_model_with_isomorphism, CurveError, EllipticCurveQ, Isomorphism};
pub use global::{ArithmeticError, Curve};
pub use height::{canonical_height, naive_height, regulator};
pub use periods::{archimedean_data, faltings_height, ArchimedeanData};
pub use point::RationalPoint;
pub use tate::{tate_local_data, Kodaira, LocalData, Reduction};
pub use torsion::{torsion_subgroup, TorsionGroup};

//! Exact construction and numerical verification of the Page–Pope family of
//! Poincaré–Einstein metrics on line bundles over Kähler–Einstein bases.
//!
//! - [`exact_poly`]: rational Laurent polynomials, the home of the profile `P(r)`.
//! - [`family`]: the metric family, cone angles, near-edge and near-apex models.
//! - [`audit`]: printed constants compared against the derivations.
//! - [`limits`]: the rescaled Ricci-flat limit and the flat special case.
//! - [`geom`]: jet-based curvature engine and concrete charts.
//! - [`sweep`]: parameter sweeps feeding the command-line harness.

#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod exact_poly;
pub mod family;
pub mod geom;
pub mod limits;
pub mod sweep;

pub use exact_poly::{int, parse_rational, rat, LaurentPoly, PolyError, Rational};
pub use family::{FamilyError, FamilyParams};

pub(crate) fn serde_rational<S: serde::Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

pub(crate) fn serde_opt_rational<S: serde::Serializer>(
    value: &Option<Rational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

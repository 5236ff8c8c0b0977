//! Complex second-order jets, a small expression language for scalar
//! fields, coordinate charts with their pullback geometry, the first and
//! second Beltrami operators, and sampled checks of the identities relating
//! them.

pub mod beltrami;
pub mod charts;
pub mod expr;
pub mod extended;
pub mod identities;
pub mod jets;
pub mod oracles;

pub use beltrami::{delta1, delta1_pair, delta2, norm_ratio, AnalyticFn, BeltramiError};
pub use charts::{builtin_chart, load_chart, Chart, ChartError, ChartKind, PointGeometry};
pub use expr::{parse, Expr, ParseError, ScalarField};
pub use identities::{check_identity, CheckConfig, IdentityError, IdentityId, PsiVariant, ResidualReport};
pub use jets::{ComplexScalar, Jet2, JetError};
pub use nalgebra::DMatrix;

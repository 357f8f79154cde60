//! Differential invariants and classification of four-dimensional three-webs W(3,2,2).
//!
//! A web is given by two functions `u1 = f1(x1,x2,y1,y2)`, `u2 = f2(x1,x2,y1,y2)`
//! written in a small expression language ([`expr`]). Partial derivatives up to
//! order three come from truncated Taylor jets ([`jet`]); the pointwise tensor
//! pipeline (connection, torsion, curvature, Pfaffian derivatives and the
//! f/g/h/a-tensor decomposition) lives in [`tensor`]; [`classify`] decides class
//! membership by randomized identity testing; [`corpus`] holds fifteen reference
//! webs with golden values and the expected classification table.
//!
//! The numeric core is generic over the scalar type; the aliases below fix it to `f64`.

pub mod classify;
pub mod corpus;
pub mod expr;
pub mod jet;
pub mod report;
pub mod table;
pub mod tensor;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real scalar usable by the jet engine and the tensor pipeline.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant, panicking only for types that cannot represent it.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar type cannot represent constant")
    }
}

impl<T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static> Scalar for T {}

pub type Jet = jet::Jet3<f64>;
pub type Snapshot = tensor::TensorSnapshot<f64>;

pub use classify::{classify, ClassificationReport, SamplerConfig};
pub use corpus::{load_example, CorpusEntry};
pub use expr::{parse_web, Expr, WebDefinition};
pub use tensor::snapshot;

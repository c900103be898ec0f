//! Exact superalgebra through the functor of points.
//!
//! Everything here works over the rationals and over the finitely generated
//! Grassmann algebras `Λ_n`. A super vector space `V` is studied through its
//! `Λ`-points `(Λ ⊗ V)_0`, and every construction is checked against base
//! change along Grassmann algebra morphisms.
//!
//! Modules, bottom up:
//!
//! * [`grassmann`]: elements of `Λ_n` and parity preserving morphisms `Λ_n → Λ_m`.
//! * [`superlinear`]: formats `K^{p|q}`, even multilinear maps, the braiding.
//! * [`points`]: `Λ`-points, lifting and reconstructing multilinear maps,
//!   naturality checks and the superrepresentability criterion.
//! * [`supermatrix`]: `Λ`-points of `End(V)`, supertraces and `GL(V)`.
//! * [`poly`] and [`skeleton`]: polynomial skeletons of supersmooth maps,
//!   superfunctions and the algebra `C^s`.
//! * [`expr`]: the textual expression language used by the CLI and by JSON.

pub mod error;
pub mod expr;
pub mod grassmann;
pub mod linalg;
pub mod points;
pub mod poly;
pub mod random;
pub mod rational;
pub mod skeleton;
pub mod superlinear;
pub mod supermatrix;
mod wire;

pub use error::{Error, Result};
pub use grassmann::{GrassmannElement, GrassmannMorphism, Parity};
pub use points::{LambdaPoint, PointFamily};
pub use poly::Poly;
pub use rational::Rational;
pub use skeleton::{Skeleton, Superfunction};
pub use superlinear::{MultilinearMap, SuperSpace, SuperVector, Tensor};
pub use supermatrix::SuperMatrix;

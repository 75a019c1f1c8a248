//! Chow forms of the equidimensional components of `V(F1, ..., Fs)`,
//! good/bad prime classification, and explicit height bounds.

pub mod bounds;
pub mod chow;
pub mod decomposition;
pub mod error;
pub mod field;
pub mod gcd;
pub mod matrix;
pub mod modp;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod var;

pub use error::{ChowError, Result};
pub use field::{Field, PrimeField, Rationals};
pub use monomial::Monomial;
pub use poly::{PPoly, Poly, QPoly};
pub use var::{Order, Var, VarOrder};

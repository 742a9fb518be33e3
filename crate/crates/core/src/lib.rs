//! Orbifold polyvector fields and Chen-Ruan cohomology for finite abelian
//! quotients of complex tori, computed in exact arithmetic.

pub mod algebra;
pub mod catalog;
pub mod chenruan;
pub mod error;
pub mod exactfield;
pub mod fixedloci;
pub mod htspace;
pub mod product;
pub mod report;
pub mod torusaction;

pub use error::{Error, Result};

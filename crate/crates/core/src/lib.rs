//! Exact verification engine for Chevalley–Eilenberg and Hochschild
//! complexes of metric Lie algebras, the HKR map, the Duflo character and
//! its homotopy identity, the Duflo map, and the unknot Wilson loop.

pub mod algebra;
pub mod calculus;
pub mod ce;
pub mod enveloping;
pub mod hochschild;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod wilson;

pub use rational::Q;

//! Exact arithmetic for Lie algebras over the two-variable quantum torus,
//! their oscillator Fock modules, and the toroidal Howe dual pairs acting on them.

pub mod classical_weights;
pub mod decomposer;
pub mod half;
pub mod highest_weight;
pub mod qfield;
pub mod quantum_torus;
pub mod toroidal;
pub mod verify;
pub mod weyl_fock;

pub use half::Half;
pub use qfield::QScalar;

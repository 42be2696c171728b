//! Quantum mechanics on the position-deformed Heisenberg algebra
//! `[X̂, P̂] = iħ(1 - τX̂ + τ²X̂²)`, which carries a maximal position
//! uncertainty `1/τ` and a minimal momentum uncertainty `ħτ`.
//!
//! Integrals against the deformed measure `dx/D(x)` run on a finite
//! θ-chart; operator actions use exact Taylor jets.

pub mod algebra;
pub mod error;
pub mod families;
pub mod jet;
pub mod ndim;
pub mod operators;
pub mod quadrature;
pub mod states;
pub mod transforms;
pub mod uncertainty;
pub mod wave;

pub use algebra::{deformation_factor, general_deformation_factor, DeformationParams, GeneralDeformation, ThetaChart};
pub use error::{Error, Result};
pub use families::{random_state, theta_hermite, x_gaussian, ThetaHermite, XGaussian};
pub use jet::{Jet2, Series};
pub use ndim::{NDimDeformation, NDimParams, NDimWaveFunction, NormKind};
pub use operators::{apply_p, apply_p_dagger_flat, apply_p_squared, apply_x, OperatorApplication, OperatorTag};
pub use quadrature::{build_grid, inner_product, inner_product_flat, normalize, Measure, QuadratureGrid};
pub use states::{eigenstate, lattice_eta, normalization_constant, overlap_closed_form, overlap_exact, EigenState};
pub use transforms::{EtaGrid, QuasiMomentumSamples};
pub use uncertainty::{DeltaXBranches, UncertaintyReport};
pub use wave::{WaveFunction, C64};

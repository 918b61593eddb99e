//! Level-one elliptic modular forms: exact q-expansions, Hecke operators,
//! eigenforms, point evaluation and newform coefficient files.

pub mod basis;
pub mod eigen;
pub mod evaluate;
pub mod newform;
pub mod ntt;
pub mod qseries;

pub use basis::{cusp_dim, divisor_power_sum, hecke_apply, hecke_matrix, miller_basis, QExpansion};
pub use eigen::{charpoly, dim_one_eigenforms, eigenforms, real_roots, Eigenform};
pub use evaluate::{evaluate, evaluate_expansion, CoefficientBound, Evaluation};
pub use newform::{load_newform, write_newform, NewformRecord};
pub use qseries::{dim_one_family, eigen_monomial_normalized, is_dim_one_weight, monomial_exact, Monomial};

//! Green functions, Böttcher coordinates and the leafwise continuation of `φ⁺`.

mod boettcher;
mod green;
mod leaf;
mod phi_plus;

pub use boettcher::{boettcher_1d, boettcher_1d_extended, boettcher_pullback, BoettcherValue};
pub use green::{eval_dd, green_1d, green_minus, green_plus, green_plus_extended, GreenValue};
pub use leaf::{extend_phi_plus, extend_phi_plus_along, BranchPath};
pub use phi_plus::{phi_plus, phi_plus_extended};

pub(crate) use boettcher::OneDimLevel;
pub(crate) use leaf::LeafLevel;

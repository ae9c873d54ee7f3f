//! Maximal abelian subfields of torsion fields of CM elliptic curves over Q.
//!
//! For an elliptic curve E/Q with complex multiplication and a prime power
//! p^n, the crate computes the maximal abelian extension of Q contained in
//! Q(E[p^n]) and checks the supporting group theory by enumerating finite
//! subgroups of GL2(Z/p^n).
//!
//! Modules, from the bottom up:
//! - [`residues`]: exact arithmetic in Z/MZ and integer number theory.
//! - [`matgroups`]: 2x2 matrices mod M and enumerated matrix groups.
//! - [`cartan`]: Cartan subgroups of imaginary quadratic orders and their normalizers.
//! - [`cmcurves`]: CM recognition, twist classes and the alpha invariant.
//! - [`classify`]: the field M = Q(zeta_m, sqrt(d_1), ...) and its degree.
//! - [`verify`]: image catalogs, commutator bounds and cross-checks.

pub mod cartan;
pub mod classify;
pub mod cmcurves;
pub mod error;
pub mod matgroups;
pub mod residues;
pub mod verify;

pub use cartan::{CMOrder, CartanParams, Flavor};
pub use classify::{
    canonicalize, classify_max_abelian, field_degree, AbelianFieldDesc, ClassificationReport, TheoremCase,
};
pub use cmcurves::{alpha, predicted_index, recognize_cm, twist_data, RationalCurve, TwistData, TwistKind};
pub use error::{Error, Result};
pub use matgroups::{FiniteMatGroup, Mat2};
pub use residues::ModInt;

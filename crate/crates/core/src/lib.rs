//! Congruences, quotient structures and homomorphism lattices of finite
//! first-order structures, with witness-producing checks of the
//! isomorphism theorems.

pub mod congruence;
pub mod fixtures;
pub mod folog;
pub mod fquot;
pub mod hom;
pub mod isothms;
pub mod json;
pub mod limits;
pub mod model;
pub mod quotient;

#![allow(dead_code)]

pub mod dd;
pub mod gradcheck;
pub mod chi2;
pub mod linear_ref;

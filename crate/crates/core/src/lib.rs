//! Exact algebra behind the K-theory of ring C*-algebras attached to rings of
//! integers in function fields with a single infinite place.
//!
//! The crate is `no_std` and only needs `alloc`. Modules, bottom-up:
//!
//! * [`repunit`]: arithmetic of `Q^f = (q^f - 1)/(q - 1)`, factorization,
//!   valuations.
//! * [`ffield`]: finite fields, towers, characters and equivariant tables.
//! * [`funcfield`]: polynomials, factorization and places of rational
//!   function fields.
//! * [`abgrp`]: Smith normal form and graded modules over localizations of `ℤ`.
//! * [`ktheory`]: the staged K-theory pipeline with closed forms checked
//!   against the matrix engine.
#![no_std]

extern crate alloc;

pub mod abgrp;
pub mod ffield;
pub mod funcfield;
pub mod ktheory;
pub mod repunit;

//! Finite-kernel quotients of semidirect products with independently
//! re-checkable certificates, plus a small lab for shift spaces over finite
//! groups.
//!
//! The crate is organized around a handful of building blocks:
//!
//! * [`group`] — typed elements and arithmetic for free, free abelian,
//!   finite permutation, and semidirect-product groups, together with
//!   validated automorphism actions and homomorphisms.
//! * [`matrix`] — exact integer matrices and Smith normal form.
//! * [`permgroup`] — stabilizer chains for permutation groups: order and
//!   membership without enumerating the group.
//! * [`separation`] — finite-index witnesses that keep a finite set of
//!   nontrivial elements away from the identity.
//! * [`charcore`] — characteristic finite-index subgroups and the finite
//!   quotients they induce, with the quotient action carried along.
//! * [`shifts`] — configuration spaces over finite groups: shift actions,
//!   cellular maps, surjunctivity sweeps, recoding along a subgroup, and
//!   the finite-index embedding into a product with a symmetric group.
//! * [`pipeline`] — the end-to-end construction: from a semidirect product
//!   and a finite subset to a finite-kernel quotient with a certificate
//!   that a separate verifier can re-check.
//! * [`serial`] — canonical JSON encoding of descriptors, elements, and
//!   certificates (byte-stable across runs).
//! * [`cli`] — the `finquot` command-line entry points.

pub mod charcore;
pub mod cli;
pub mod error;
pub mod group;
pub mod matrix;
pub mod permgroup;
pub mod pipeline;
pub mod separation;
pub mod serial;
pub mod shifts;

pub use error::{Error, Result};

//! Stabilizer chains for finite permutation groups.
//!
//! A chain fixes a base point per level and stores the orbit of that point
//! together with a transversal; the product of the orbit sizes is the group
//! order, and membership reduces to sifting an element down the chain. This
//! gives order and membership without enumerating the group, which matters
//! once the group order outgrows any reasonable element table.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::Permutation;

/// Cap on the permutation degree a chain will accept.
pub const DEFAULT_DEGREE_CAP: usize = 1_000_000;

/// Default work budget for building a chain, in permutation-word operations
/// (a compose or a stored element costs its degree). Groups whose strong
/// generating data outgrows this are refused with a cap error instead of
/// exhausting memory; at desk scale every supported computation fits with
/// room to spare.
pub const DEFAULT_OP_BUDGET: u64 = 50_000_000;

struct ChainLevel {
    base: usize,
    /// Orbit of `base` under this level's generators, in breadth-first
    /// discovery order (always starts with `base`).
    orbit: Vec<usize>,
    /// For each orbit point `p`, a group element `u` with `u(base) = p`.
    transversal: HashMap<usize, Permutation>,
}

/// A stabilizer chain for the subgroup of `Sym(degree)` generated by the
/// construction-time generators.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<ChainLevel>,
}

/// Tracks remaining permutation-word operations during construction.
struct Budget {
    left: u64,
    initial: u64,
}

impl Budget {
    fn charge(&mut self, words: usize) -> Result<()> {
        let words = words as u64;
        if self.left < words {
            return Err(Error::CapExceeded {
                what: "stabilizer chain work".into(),
                got: format!("more than {} permutation words", self.initial),
                limit: self.initial.to_string(),
            });
        }
        self.left -= words;
        Ok(())
    }
}

impl StabilizerChain {
    /// Build a chain by the Schreier generator method with the default work
    /// budget. Deterministic: base points are the smallest moved points,
    /// orbits are explored breadth first, and generator lists keep their
    /// given order.
    pub fn new(degree: usize, generators: &[Permutation]) -> Result<Self> {
        StabilizerChain::with_budget(degree, generators, DEFAULT_OP_BUDGET)
    }

    /// Build a chain, refusing with a cap error once construction has spent
    /// the given number of permutation-word operations.
    pub fn with_budget(degree: usize, generators: &[Permutation], budget: u64) -> Result<Self> {
        if degree > DEFAULT_DEGREE_CAP {
            return Err(Error::CapExceeded {
                what: "permutation degree".into(),
                got: degree.to_string(),
                limit: DEFAULT_DEGREE_CAP.to_string(),
            });
        }
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "generator degree {} does not match chain degree {}",
                    g.degree(),
                    degree
                )));
            }
        }
        let mut budget = Budget {
            left: budget,
            initial: budget,
        };
        let mut levels = Vec::new();
        let mut gens: Vec<Permutation> = dedup_nonidentity(generators);
        while !gens.is_empty() {
            let base = gens
                .iter()
                .filter_map(|g| g.smallest_moved_point())
                .min()
                .expect("nonempty generator list moves a point");
            let (orbit, transversal) = orbit_with_transversal(degree, base, &gens, &mut budget)?;
            // Schreier generators of the stabilizer of `base`:
            // u_{g(p)}^{-1} * g * u_p for p in the orbit, g a generator.
            let mut next: Vec<Permutation> = Vec::new();
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            seen.insert((0..degree).collect());
            for p in &orbit {
                let u_p = &transversal[p];
                for g in &gens {
                    let u_gp = &transversal[&g.apply(*p)];
                    budget.charge(3 * degree)?;
                    let s = u_gp.inverse().compose(&g.compose(u_p));
                    if seen.insert(s.images().to_vec()) {
                        budget.charge(2 * degree)?;
                        next.push(s);
                    }
                }
            }
            levels.push(ChainLevel {
                base,
                orbit,
                transversal,
            });
            gens = next;
        }
        Ok(StabilizerChain { degree, levels })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Exact group order: the product of the orbit lengths.
    pub fn order(&self) -> BigUint {
        let mut n = BigUint::one();
        for level in &self.levels {
            n *= BigUint::from(level.orbit.len());
        }
        n
    }

    /// Base points, outermost level first.
    pub fn base_points(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Membership test by sifting down the chain.
    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let mut h = p.clone();
        for level in &self.levels {
            let target = h.apply(level.base);
            let Some(u) = level.transversal.get(&target) else {
                return false;
            };
            h = u.inverse().compose(&h);
        }
        h.is_identity()
    }
}

fn dedup_nonidentity(generators: &[Permutation]) -> Vec<Permutation> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    generators
        .iter()
        .filter(|g| !g.is_identity())
        .filter(|g| seen.insert(g.images().to_vec()))
        .cloned()
        .collect()
}

fn orbit_with_transversal(
    degree: usize,
    base: usize,
    gens: &[Permutation],
    budget: &mut Budget,
) -> Result<(Vec<usize>, HashMap<usize, Permutation>)> {
    let mut orbit = vec![base];
    let mut transversal = HashMap::new();
    transversal.insert(base, Permutation::identity(degree));
    let mut i = 0;
    while i < orbit.len() {
        let p = orbit[i];
        let u_p = transversal[&p].clone();
        for g in gens {
            let q = g.apply(p);
            if let std::collections::hash_map::Entry::Vacant(slot) = transversal.entry(q) {
                budget.charge(2 * degree)?;
                orbit.push(q);
                slot.insert(g.compose(&u_p));
            }
        }
        i += 1;
    }
    Ok((orbit, transversal))
}

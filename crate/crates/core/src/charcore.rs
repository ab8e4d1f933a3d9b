//! Characteristic finite-index subgroups and the finite quotients they
//! induce.
//!
//! A separation witness pins down a finite-index subgroup that misses a given
//! finite set, but that subgroup need not be preserved by automorphisms of
//! the ambient group. Each construction here shrinks to a subgroup that is
//! *characteristic* — invariant under every automorphism — so that any
//! automorphism action descends to the finite quotient:
//!
//! * free group of rank `k`: the intersection of the kernels of all
//!   homomorphisms into `Sym(d)`, realized concretely as the kernel of the
//!   diagonal map into a product of `(d!)^k` symmetric groups;
//! * free abelian group of rank `n`: the sublattice `m * Z^n`, with `m`
//!   chosen as the largest elementary divisor of a given finite-index
//!   lattice so that `m * Z^n` is contained in it;
//! * finite permutation group: the trivial subgroup (the group is its own
//!   finite quotient).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{
    all_permutations, apply_endo, ActionPair, Element, EndoSpec, FreeWord, GroupDescriptor,
    Homomorphism, IntVector, Permutation,
};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::permgroup::StabilizerChain;
use crate::separation::FiniteIndexWitness;

/// Default cap on the number of homomorphisms intersected for a free-group
/// core.
pub const DEFAULT_MAX_HOMS: u64 = 20_000;
/// Default cap on the degree of any materialized permutation image.
pub const DEFAULT_MAX_DEGREE: usize = 1_000_000;

/// A characteristic finite-index subgroup, recorded by the data of the
/// finite quotient it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacteristicQuotient {
    /// Kernel of the diagonal map `F_rank -> prod of all homs into
    /// Sym(symmetric_degree)`.
    Free { rank: usize, symmetric_degree: usize },
    /// The sublattice `modulus * Z^rank`.
    Abelian { rank: usize, modulus: BigInt },
    /// The trivial subgroup of a finite permutation group.
    Finite {
        degree: usize,
        generators: Vec<Permutation>,
    },
}

/// Extra data tying a free-group core to the separation witness it came
/// from: the witness homomorphism appears as one block of the diagonal map,
/// and this records which block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBlockEvidence {
    pub block_index: BigUint,
}

impl CharacteristicQuotient {
    /// Choose a characteristic core below a separation witness.
    ///
    /// For a free-group witness of degree `d_w` the exact core would
    /// intersect all `(d_w!)^rank` homomorphisms; that count is capped by
    /// `max_homs`, and the symmetric degree is lowered to the largest
    /// `d <= d_w` with `(d!)^rank <= max_homs`. When no lowering happens the
    /// witness homomorphism is itself one of the intersected blocks, and the
    /// returned evidence names its block index.
    pub fn from_witness(
        witness: &FiniteIndexWitness,
        max_homs: u64,
    ) -> Result<(Self, Option<WitnessBlockEvidence>)> {
        match witness {
            FiniteIndexWitness::PermImages { rank, degree, images } => {
                let budget = BigUint::from(max_homs);
                let mut chosen = None;
                for d in (1..=*degree.max(&1)).rev() {
                    if hom_count(*rank, d) <= budget {
                        chosen = Some(d);
                        break;
                    }
                }
                let d = chosen.ok_or_else(|| Error::CapExceeded {
                    what: "homomorphism count".into(),
                    got: hom_count(*rank, 1).to_string(),
                    limit: max_homs.to_string(),
                })?;
                let evidence = if d == (*degree).max(1) && *degree >= 1 {
                    Some(WitnessBlockEvidence {
                        block_index: block_index_of(d, images),
                    })
                } else {
                    None
                };
                Ok((
                    CharacteristicQuotient::Free {
                        rank: *rank,
                        symmetric_degree: d,
                    },
                    evidence,
                ))
            }
            FiniteIndexWitness::Modulus { rank, modulus } => {
                if modulus <= &BigInt::zero() {
                    return Err(Error::Malformed("witness modulus must be positive".into()));
                }
                Ok((
                    CharacteristicQuotient::Abelian {
                        rank: *rank,
                        modulus: modulus.clone(),
                    },
                    None,
                ))
            }
            FiniteIndexWitness::Identity { degree, generators } => Ok((
                CharacteristicQuotient::Finite {
                    degree: *degree,
                    generators: generators.clone(),
                },
                None,
            )),
        }
    }

    /// The group the core lives in.
    pub fn source_descriptor(&self) -> Result<GroupDescriptor> {
        Ok(match self {
            CharacteristicQuotient::Free { rank, .. } => GroupDescriptor::free(*rank),
            CharacteristicQuotient::Abelian { rank, .. } => GroupDescriptor::free_abelian(*rank),
            CharacteristicQuotient::Finite { degree, generators } => {
                GroupDescriptor::finite_perm(*degree, generators.clone())?
            }
        })
    }

    /// Does the element lie in the core (equivalently, die in the quotient)?
    pub fn kills(&self, el: &Element) -> Result<bool> {
        match self {
            CharacteristicQuotient::Free { rank, symmetric_degree } => {
                free_quotient_kills(*rank, *symmetric_degree, el.word()?)
            }
            CharacteristicQuotient::Abelian { modulus, .. } => {
                Ok(el.vector()?.reduce_mod(modulus).is_zero())
            }
            CharacteristicQuotient::Finite { .. } => Ok(el.perm()?.is_identity()),
        }
    }

    /// Order of the finite quotient.
    ///
    /// The free case works in a slimmed-down version of the joint product:
    /// postcomposing a homomorphism with conjugation does not change its
    /// kernel, so keeping one homomorphism per simultaneous-conjugacy class
    /// of generator images leaves the joint kernel — and with it the order
    /// of the diagonal image — untouched, while shrinking the permutation
    /// degree by roughly a factor of `d!`. `max_homs` caps the enumeration,
    /// `max_degree` the degree the order computation will chain over.
    pub fn order(&self, max_homs: u64, max_degree: usize) -> Result<BigUint> {
        match self {
            CharacteristicQuotient::Free { rank, symmetric_degree } => {
                let d = *symmetric_degree;
                let homs_big = hom_count(*rank, d);
                if homs_big > BigUint::from(max_homs) {
                    return Err(Error::CapExceeded {
                        what: "homomorphism count".into(),
                        got: homs_big.to_string(),
                        limit: max_homs.to_string(),
                    });
                }
                let homs = homs_big.to_usize().expect("bounded by max_homs");
                let perms = all_permutations(d);
                let fact = perms.len();
                let mut classes: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
                for h in 0..homs {
                    let tuple: Vec<&Permutation> = (0..*rank)
                        .map(|i| {
                            let weight = fact.pow((*rank - 1 - i) as u32);
                            &perms[(h / weight) % fact]
                        })
                        .collect();
                    let canon = perms
                        .iter()
                        .map(|c| {
                            tuple
                                .iter()
                                .map(|t| conjugate_images(c, t))
                                .collect::<Vec<Vec<usize>>>()
                        })
                        .min()
                        .unwrap_or_default();
                    classes.insert(canon);
                }
                let total = d
                    .checked_mul(classes.len())
                    .ok_or_else(|| Error::CapExceeded {
                        what: "reduction degree".into(),
                        got: format!("{} * {}", d, classes.len()),
                        limit: max_degree.to_string(),
                    })?;
                fit_degree(&BigUint::from(total), max_degree)?;
                let mut images = Vec::with_capacity(*rank);
                for i in 0..*rank {
                    let mut img = Vec::with_capacity(total);
                    for (blk, class) in classes.iter().enumerate() {
                        img.extend(class[i].iter().map(|&p| blk * d + p));
                    }
                    images.push(Permutation::new(img)?);
                }
                Ok(StabilizerChain::new(total, &images)?.order())
            }
            CharacteristicQuotient::Abelian { rank, modulus } => {
                let m = modulus
                    .to_biguint()
                    .ok_or_else(|| Error::Malformed("negative modulus".into()))?;
                Ok(num_traits::pow::pow(m, *rank))
            }
            CharacteristicQuotient::Finite { degree, generators } => {
                Ok(StabilizerChain::new(*degree, generators)?.order())
            }
        }
    }

    /// Permutation images of the source generators under the reduction map
    /// onto the finite quotient.
    ///
    /// * Free: generator `i` maps to the block-diagonal permutation whose
    ///   `h`-th block of size `d` is the `i`-th image of the `h`-th
    ///   homomorphism in the odometer enumeration (first generator most
    ///   significant, homomorphism images ordered lexicographically).
    /// * Abelian: generator `i` rotates the `i`-th block of `rank * m`
    ///   points, so coordinates act modulo `m`.
    /// * Finite: the generators themselves.
    pub fn reduction_images(&self, max_degree: usize) -> Result<Vec<Permutation>> {
        match self {
            CharacteristicQuotient::Free { rank, symmetric_degree } => {
                let d = *symmetric_degree;
                let total = total_degree(*rank, d);
                let total = fit_degree(&total, max_degree)?;
                let homs = hom_count(*rank, d)
                    .to_usize()
                    .expect("hom count fits once total degree does");
                let perms = all_permutations(d);
                let fact = perms.len();
                let mut images = Vec::with_capacity(*rank);
                for i in 0..*rank {
                    // digit weight of generator i in the odometer (first
                    // generator most significant)
                    let weight = fact.pow((*rank - 1 - i) as u32);
                    let mut img = Vec::with_capacity(total);
                    for h in 0..homs {
                        let digit = (h / weight) % fact;
                        let block = &perms[digit];
                        img.extend(block.images().iter().map(|&p| h * d + p));
                    }
                    images.push(Permutation::new(img)?);
                }
                Ok(images)
            }
            CharacteristicQuotient::Abelian { rank, modulus } => {
                let m = modulus.to_usize().ok_or_else(|| Error::CapExceeded {
                    what: "modulus".into(),
                    got: modulus.to_string(),
                    limit: usize::MAX.to_string(),
                })?;
                let total = rank.checked_mul(m).ok_or_else(|| Error::CapExceeded {
                    what: "reduction degree".into(),
                    got: format!("{} * {}", rank, m),
                    limit: max_degree.to_string(),
                })?;
                fit_degree(&BigUint::from(total), max_degree)?;
                let mut gens = Vec::with_capacity(*rank);
                for i in 0..*rank {
                    let block: Vec<usize> = (i * m..(i + 1) * m).collect();
                    gens.push(Permutation::from_cycles(total, &[&block])?);
                }
                Ok(gens)
            }
            CharacteristicQuotient::Finite { generators, .. } => Ok(generators.clone()),
        }
    }

    /// The reduction map onto the finite quotient as a checked homomorphism.
    pub fn reduction(&self, max_degree: usize) -> Result<Homomorphism> {
        let images = self.reduction_images(max_degree)?;
        let degree = match self {
            CharacteristicQuotient::Finite { degree, .. } => *degree,
            _ => images.first().map(|p| p.degree()).unwrap_or(1),
        };
        Ok(Homomorphism::constructed(
            self.source_descriptor()?,
            GroupDescriptor::finite_perm(degree, images.clone())?,
            images.into_iter().map(Element::Perm).collect(),
            "reduction onto characteristic quotient",
        ))
    }
}

/// Image list of `c * t * c^-1`.
fn conjugate_images(c: &Permutation, t: &Permutation) -> Vec<usize> {
    let ci = c.images();
    let mut out = vec![0; t.degree()];
    for j in 0..t.degree() {
        out[ci[j]] = ci[t.apply(j)];
    }
    out
}

/// `(d!)^rank`, the number of homomorphisms intersected by a free core.
pub fn hom_count(rank: usize, d: usize) -> BigUint {
    num_traits::pow::pow(factorial(d), rank)
}

/// `d * (d!)^rank`, the permutation degree of the materialized reduction.
pub fn total_degree(rank: usize, d: usize) -> BigUint {
    BigUint::from(d) * hom_count(rank, d)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn fit_degree(total: &BigUint, max_degree: usize) -> Result<usize> {
    match total.to_usize() {
        Some(t) if t <= max_degree => Ok(t),
        _ => Err(Error::CapExceeded {
            what: "reduction degree".into(),
            got: total.to_string(),
            limit: max_degree.to_string(),
        }),
    }
}

/// Does the word die under every homomorphism of `F_rank` into `Sym(d)`?
///
/// Iterates the homomorphisms odometer-style without materializing the
/// diagonal map, returning early on the first homomorphism under which the
/// word survives.
pub fn free_quotient_kills(rank: usize, d: usize, word: &FreeWord) -> Result<bool> {
    if word.max_index() > rank {
        return Err(Error::Mismatch(format!(
            "word uses generator {} beyond rank {}",
            word.max_index(),
            rank
        )));
    }
    let perms = all_permutations(d);
    let fact = perms.len();
    let mut digits = vec![0usize; rank];
    loop {
        // evaluate word under the homomorphism x_i -> perms[digits[i]]
        let mut survives = false;
        'points: for start in 0..d {
            let mut p = start;
            for &l in word.letters().iter().rev() {
                let img = &perms[digits[l.unsigned_abs() as usize - 1]];
                p = if l > 0 { img.apply(p) } else { img.inverse().apply(p) };
            }
            if p != start {
                survives = true;
                break 'points;
            }
        }
        if survives {
            return Ok(false);
        }
        // odometer step, last generator least significant
        let mut i = rank;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < fact {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Index of a homomorphism (given by its generator images in `Sym(d)`) in
/// the odometer enumeration used by the free-core reduction.
pub fn block_index_of(d: usize, images: &[Permutation]) -> BigUint {
    let fact = factorial(d);
    let mut idx = BigUint::zero();
    for p in images {
        idx = idx * &fact + BigUint::from(p.lex_rank());
    }
    idx
}

/// Generator images of the homomorphism at a given block index, inverse to
/// [`block_index_of`].
pub fn hom_at_block(rank: usize, d: usize, index: &BigUint) -> Result<Vec<Permutation>> {
    let fact = factorial(d);
    let mut rest = index.clone();
    let mut ranks = vec![0usize; rank];
    for slot in ranks.iter_mut().rev() {
        let (q, r) = rest.div_rem(&fact);
        *slot = r.to_usize().expect("remainder below d!");
        rest = q;
    }
    if !rest.is_zero() {
        return Err(Error::Malformed(format!(
            "block index {} out of range for {} homomorphisms",
            index,
            hom_count(rank, d)
        )));
    }
    ranks
        .into_iter()
        .map(|r| permutation_from_lex_rank(d, r))
        .collect()
}

/// The permutation of the given degree whose image sequence has the given
/// lexicographic rank.
pub fn permutation_from_lex_rank(degree: usize, rank: usize) -> Result<Permutation> {
    let mut available: Vec<usize> = (0..degree).collect();
    let mut rest = rank;
    let mut images = Vec::with_capacity(degree);
    for i in 0..degree {
        let f = factorial(degree - 1 - i)
            .to_usize()
            .ok_or_else(|| Error::CapExceeded {
                what: "factorial".into(),
                got: format!("({})!", degree - 1 - i),
                limit: usize::MAX.to_string(),
            })?;
        let c = rest / f;
        rest %= f;
        if c >= available.len() {
            return Err(Error::Malformed(format!(
                "lexicographic rank {} out of range for degree {}",
                rank, degree
            )));
        }
        images.push(available.remove(c));
    }
    Permutation::new(images)
}

// ---------------------------------------------------------------------------
// Characteristic core of an abelian lattice
// ---------------------------------------------------------------------------

/// Outcome of shrinking a finite-index sublattice of `Z^rank` to the
/// characteristic sublattice `modulus * Z^rank` it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianCore {
    pub rank: usize,
    /// Largest elementary divisor of the input lattice.
    pub modulus: BigInt,
    /// Integer matrix `X` with `X * basis = modulus * I`, proving each
    /// `modulus * e_i` lies in the row span of the input basis.
    pub containment: IntMatrix,
}

/// Given a square basis (rows spanning a finite-index sublattice of
/// `Z^rank`), return the largest elementary divisor `m` together with an
/// integer certificate that `m * Z^rank` is contained in the lattice.
pub fn abelian_core_of_lattice(basis: &IntMatrix) -> Result<AbelianCore> {
    if !basis.is_square() {
        return Err(Error::InvalidInput(format!(
            "lattice basis must be square, got {}x{}",
            basis.rows(),
            basis.cols()
        )));
    }
    let n = basis.rows();
    if n == 0 {
        return Ok(AbelianCore {
            rank: 0,
            modulus: BigInt::one(),
            containment: IntMatrix::zero(0, 0),
        });
    }
    let dec = smith_normal_form(basis);
    let diag = dec.diagonal();
    if diag.iter().any(|s| s.is_zero()) {
        return Err(Error::InvalidInput(
            "lattice does not have finite index (singular basis)".into(),
        ));
    }
    let m = diag.last().expect("n > 0").clone();
    // Solve x * basis = m * e_i for each i. With U * basis * V = S this is
    // z * S = (m e_i) * V, z_j = m * V[i][j] / s_j, x = z * U; each s_j
    // divides m because the elementary divisors form a divisibility chain.
    let mut containment = IntMatrix::zero(n, n);
    for i in 0..n {
        for (j, d) in diag.iter().enumerate() {
            let num = &m * dec.v.get(i, j);
            let (q, r) = num.div_rem(d);
            debug_assert!(r.is_zero(), "elementary divisor chain violated");
            if !r.is_zero() {
                return Err(Error::Verification(
                    "containment solve hit a non-divisible entry".into(),
                ));
            }
            // accumulate z_j * U[j][.] into row i
            for c in 0..n {
                let cur = containment.get(i, c).clone();
                containment.set(i, c, cur + &q * dec.u.get(j, c));
            }
        }
    }
    // self-check: X * basis really is m * I
    let prod = containment.mul(basis)?;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { m.clone() } else { BigInt::zero() };
            if prod.get(i, j) != &expect {
                return Err(Error::Verification(
                    "containment certificate failed its own check".into(),
                ));
            }
        }
    }
    Ok(AbelianCore {
        rank: n,
        modulus: m,
        containment,
    })
}

// ---------------------------------------------------------------------------
// Induced automorphisms on the finite quotient
// ---------------------------------------------------------------------------

/// One direction of an automorphism of the finite quotient, in a form a
/// verifier can re-check against the original action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InducedEndo {
    /// Abelian quotient: the action matrix with entries reduced into
    /// `[0, modulus)`.
    MatrixMod(IntMatrix),
    /// Free-group quotient: for each generator, the image word under the
    /// original automorphism together with that word's reduction image.
    WordImages(Vec<(FreeWord, Permutation)>),
    /// Finite kernel: the automorphism's full element table.
    Table(Vec<(Permutation, Permutation)>),
}

/// Forward/backward pair of induced automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedPair {
    pub forward: InducedEndo,
    pub backward: InducedEndo,
}

/// Push one action pair down to the finite quotient. The core is preserved
/// by every automorphism of the source (it is characteristic), so the data
/// below always describes a well-defined automorphism of the quotient.
pub fn induce_pair(
    core: &CharacteristicQuotient,
    pair: &ActionPair,
    max_degree: usize,
) -> Result<InducedPair> {
    Ok(InducedPair {
        forward: induce_endo(core, &pair.forward, max_degree)?,
        backward: induce_endo(core, &pair.backward, max_degree)?,
    })
}

fn induce_endo(
    core: &CharacteristicQuotient,
    spec: &EndoSpec,
    max_degree: usize,
) -> Result<InducedEndo> {
    match (core, spec) {
        (CharacteristicQuotient::Abelian { modulus, .. }, EndoSpec::Matrix(m)) => {
            Ok(InducedEndo::MatrixMod(m.reduce_mod(modulus)))
        }
        (CharacteristicQuotient::Free { .. }, EndoSpec::Words(words)) => {
            let reduction = core.reduction(max_degree)?;
            let mut out = Vec::with_capacity(words.len());
            for w in words {
                let img = reduction.apply(&Element::Word(w.clone()))?;
                out.push((w.clone(), img.perm()?.clone()));
            }
            Ok(InducedEndo::WordImages(out))
        }
        (CharacteristicQuotient::Finite { .. }, EndoSpec::Table(t)) => {
            Ok(InducedEndo::Table(t.clone()))
        }
        _ => Err(Error::Mismatch(
            "automorphism description does not fit the quotient kind".into(),
        )),
    }
}

impl InducedEndo {
    /// Apply to a kernel element *upstairs* (before reduction): words map
    /// through word substitution, vectors through the matrix (entries are
    /// only defined modulo the quotient modulus), finite elements through
    /// the table.
    pub fn apply_upstairs(&self, el: &Element) -> Result<Element> {
        match self {
            InducedEndo::MatrixMod(m) => {
                let v = el.vector()?;
                Ok(Element::Vector(IntVector::new(m.apply(v.coords())?)))
            }
            InducedEndo::WordImages(pairs) => {
                let images: Vec<FreeWord> = pairs.iter().map(|(w, _)| w.clone()).collect();
                apply_endo(&EndoSpec::Words(images), el)
            }
            InducedEndo::Table(t) => apply_endo(&EndoSpec::Table(t.clone()), el),
        }
    }
}

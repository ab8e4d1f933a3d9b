//! Typed group elements and arithmetic for the four supported kinds: free
//! groups, free abelian groups, finite permutation groups, and semidirect
//! products of a kernel by a quotient acting through automorphisms.
//!
//! Composition convention, fixed once for the whole crate: products apply the
//! right factor first, `(a * b)(x) = a(b(x))`. Under this convention the
//! product of the transpositions (0 1) and (1 2) is the 3-cycle sending
//! 0 to 1, 1 to 2 and 2 to 0, and left-translation on cosets is a
//! homomorphism.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Default cap on `ball` radii.
pub const DEFAULT_RADIUS_CAP: usize = 16;
/// Cap on elements enumerated when factoring inside a finite permutation
/// group or verifying an action over one.
pub const FINITE_ENUM_CAP: usize = 200_000;
/// Cap on the letter count of substituted free words.
pub const WORD_LENGTH_CAP: usize = 1_000_000;
/// Largest finite quotient for which action well-definedness is verified
/// exhaustively; beyond it the action is flagged unverified.
pub const ACTION_VERIFY_CAP: usize = 5_000;

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// A reduced word in a free group. Letters are nonzero signed 1-based
/// generator indices; the sign is the exponent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    /// Build from letters, cancelling adjacent inverse pairs.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                return Err(Error::InvalidInput("free-word letter 0".into()));
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeWord { letters: out })
    }

    /// Single positive generator, 0-based index.
    pub fn generator(i: usize) -> Self {
        FreeWord {
            letters: vec![i as i32 + 1],
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &FreeWord) -> Result<FreeWord> {
        let total = self.letters.len() + other.letters.len();
        if total > WORD_LENGTH_CAP {
            return Err(Error::CapExceeded {
                what: "free-word length".into(),
                got: total.to_string(),
                limit: WORD_LENGTH_CAP.to_string(),
            });
        }
        FreeWord::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// Largest 1-based generator index used (0 for the identity).
    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Run-length form: (0-based generator, signed exponent), in word order.
    pub fn runs(&self) -> Vec<(usize, BigInt)> {
        let mut out: Vec<(usize, BigInt)> = Vec::new();
        for &l in &self.letters {
            let g = l.unsigned_abs() as usize - 1;
            let e = if l > 0 { 1 } else { -1 };
            match out.last_mut() {
                Some((pg, pe)) if *pg == g => *pe += e,
                _ => out.push((g, BigInt::from(e))),
            }
        }
        out.retain(|(_, e)| !e.is_zero());
        out
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                if *l > 0 {
                    format!("x{}", l)
                } else {
                    format!("x{}^-1", -l)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Element of a free abelian group: an integer coordinate vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    coords: Vec<BigInt>,
}

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        IntVector { coords }
    }

    pub fn zero(n: usize) -> Self {
        IntVector {
            coords: vec![BigInt::zero(); n],
        }
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        IntVector {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> IntVector {
        IntVector {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    /// Entry-wise Euclidean reduction into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> IntVector {
        IntVector {
            coords: self.coords.iter().map(|c| c.mod_floor(m)).collect(),
        }
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// A permutation of `{0, .., degree-1}` stored as its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "image sequence {:?} is not a permutation",
                    images
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from disjoint-cycle notation; points absent from every cycle are
    /// fixed.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from >= degree || to >= degree {
                    return Err(Error::InvalidInput("cycle point out of range".into()));
                }
                images[from] = to;
            }
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p]
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            images: other.images.iter().map(|&p| self.images[p]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn power(&self, e: &BigInt) -> Permutation {
        let (base, mut exp) = if e.is_negative() {
            (self.inverse(), e.magnitude().clone())
        } else {
            (self.clone(), e.magnitude().clone())
        };
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while !exp.is_zero() {
            if exp.is_odd() {
                acc = sq.compose(&acc);
            }
            exp >>= 1;
            if !exp.is_zero() {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    pub fn smallest_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &p)| *i != p).map(|(i, _)| i)
    }

    /// Rank of this permutation in the lexicographic order of all image
    /// sequences of the same degree (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm{:?}", self.images)
    }
}

/// All permutations of the given degree in lexicographic order of their
/// image sequences.
pub fn all_permutations(degree: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..degree).collect();
    loop {
        out.push(Permutation {
            images: cur.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// A group element, tagged by shape. Equality and ordering are decidable for
/// every supported kind because each variant stores a canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Word(FreeWord),
    Vector(IntVector),
    Perm(Permutation),
    Pair(Box<Element>, Box<Element>),
}

impl Element {
    pub fn pair(k: Element, q: Element) -> Element {
        Element::Pair(Box::new(k), Box::new(q))
    }

    pub fn word(&self) -> Result<&FreeWord> {
        match self {
            Element::Word(w) => Ok(w),
            other => Err(Error::Mismatch(format!("expected word, got {:?}", other))),
        }
    }

    pub fn vector(&self) -> Result<&IntVector> {
        match self {
            Element::Vector(v) => Ok(v),
            other => Err(Error::Mismatch(format!("expected vector, got {:?}", other))),
        }
    }

    pub fn perm(&self) -> Result<&Permutation> {
        match self {
            Element::Perm(p) => Ok(p),
            other => Err(Error::Mismatch(format!(
                "expected permutation, got {:?}",
                other
            ))),
        }
    }

    pub fn parts(&self) -> Result<(&Element, &Element)> {
        match self {
            Element::Pair(k, q) => Ok((k, q)),
            other => Err(Error::Mismatch(format!("expected pair, got {:?}", other))),
        }
    }
}

// ---------------------------------------------------------------------------
// Automorphism actions
// ---------------------------------------------------------------------------

/// One direction of an automorphism of the kernel, described by data
/// appropriate to the kernel kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndoSpec {
    /// Free kernel: image word of each generator.
    Words(Vec<FreeWord>),
    /// Free abelian kernel: square matrix acting on column vectors.
    Matrix(IntMatrix),
    /// Finite permutation kernel: a full element table, sorted by source.
    Table(Vec<(Permutation, Permutation)>),
}

impl EndoSpec {
    fn kind_name(&self) -> &'static str {
        match self {
            EndoSpec::Words(_) => "words",
            EndoSpec::Matrix(_) => "matrix",
            EndoSpec::Table(_) => "table",
        }
    }
}

/// A forward/backward pair describing one generator's action as an
/// automorphism together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionPair {
    pub forward: EndoSpec,
    pub backward: EndoSpec,
}

/// How the action's well-definedness as a map from the quotient into the
/// automorphism group was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionVerification {
    /// The quotient is free: any generator assignment extends.
    FreeQuotient,
    /// Free abelian quotient: generator actions verified to commute.
    CommutationChecked,
    /// A supplied relator list was verified against the action.
    RelatorsChecked,
    /// Finite quotient: the action was verified on every element pair.
    FiniteChecked,
    /// Accepted on the caller's authority without verification.
    Unverified,
}

impl ActionVerification {
    pub fn as_str(&self) -> &'static str {
        match self {
            ActionVerification::FreeQuotient => "free-quotient",
            ActionVerification::CommutationChecked => "commutation-checked",
            ActionVerification::RelatorsChecked => "relators-checked",
            ActionVerification::FiniteChecked => "finite-checked",
            ActionVerification::Unverified => "unverified-action",
        }
    }

    pub fn from_str_name(s: &str) -> Result<Self> {
        Ok(match s {
            "free-quotient" => ActionVerification::FreeQuotient,
            "commutation-checked" => ActionVerification::CommutationChecked,
            "relators-checked" => ActionVerification::RelatorsChecked,
            "finite-checked" => ActionVerification::FiniteChecked,
            "unverified-action" => ActionVerification::Unverified,
            other => {
                return Err(Error::Malformed(format!(
                    "unknown action verification flag {:?}",
                    other
                )))
            }
        })
    }
}

/// The action of the quotient on the kernel: one automorphism pair per
/// quotient generator, plus an optional relator list for the quotient
/// (words over its generators) checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismAction {
    pub pairs: Vec<ActionPair>,
    pub relators: Vec<FreeWord>,
}

impl AutomorphismAction {
    pub fn trivial(kernel: &GroupDescriptor, quotient_generators: usize) -> Result<Self> {
        let id = identity_endo(kernel)?;
        Ok(AutomorphismAction {
            pairs: (0..quotient_generators)
                .map(|_| ActionPair {
                    forward: id.clone(),
                    backward: id.clone(),
                })
                .collect(),
            relators: Vec::new(),
        })
    }
}

/// The identity endomorphism description for a kernel.
pub fn identity_endo(kernel: &GroupDescriptor) -> Result<EndoSpec> {
    Ok(match kernel {
        GroupDescriptor::Free { rank } => {
            EndoSpec::Words((0..*rank).map(FreeWord::generator).collect())
        }
        GroupDescriptor::FreeAbelian { rank } => EndoSpec::Matrix(IntMatrix::identity(*rank)),
        GroupDescriptor::FinitePerm { degree, generators } => {
            let elems = enumerate_finite_group(*degree, generators)?;
            EndoSpec::Table(elems.iter().map(|p| (p.clone(), p.clone())).collect())
        }
        GroupDescriptor::Semidirect(_) => {
            return Err(Error::UnsupportedKind {
                op: "identity_endo",
                kind: "semidirect",
            })
        }
    })
}

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

/// Description of a semidirect product `kernel ⋊ quotient` with the quotient
/// acting through the given automorphism pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectDescriptor {
    pub kernel: GroupDescriptor,
    pub quotient: GroupDescriptor,
    pub action: AutomorphismAction,
    pub verification: ActionVerification,
}

/// A finitely generated group of one of the supported kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDescriptor {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    FinitePerm { degree: usize, generators: Vec<Permutation> },
    Semidirect(Box<SemidirectDescriptor>),
}

impl GroupDescriptor {
    pub fn free(rank: usize) -> Self {
        GroupDescriptor::Free { rank }
    }

    pub fn free_abelian(rank: usize) -> Self {
        GroupDescriptor::FreeAbelian { rank }
    }

    pub fn finite_perm(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "generator degree {} does not match descriptor degree {}",
                    g.degree(),
                    degree
                )));
            }
        }
        Ok(GroupDescriptor::FinitePerm { degree, generators })
    }

    /// Build a validated semidirect product descriptor. The kernel must be
    /// free, free abelian, or a finite permutation group; the quotient may be
    /// any descriptor. Every action pair is checked to compose to the
    /// identity on the kernel's generators, shape-checked against the kernel,
    /// and the action's well-definedness over the quotient is verified as far
    /// as the kinds allow (recorded in `verification`).
    pub fn semidirect(
        kernel: GroupDescriptor,
        quotient: GroupDescriptor,
        action: AutomorphismAction,
    ) -> Result<Self> {
        if matches!(kernel, GroupDescriptor::Semidirect(_)) {
            return Err(Error::UnsupportedKind {
                op: "semidirect kernel",
                kind: "semidirect",
            });
        }
        if action.pairs.len() != quotient.generator_count() {
            return Err(Error::InvalidInput(format!(
                "action has {} generator pairs but quotient has {} generators",
                action.pairs.len(),
                quotient.generator_count()
            )));
        }
        for pair in &action.pairs {
            validate_endo(&kernel, &pair.forward)?;
            validate_endo(&kernel, &pair.backward)?;
            check_pair_inverts(&kernel, pair)?;
        }
        let verification = verify_action(&kernel, &quotient, &action)?;
        Ok(GroupDescriptor::Semidirect(Box::new(SemidirectDescriptor {
            kernel,
            quotient,
            action,
            verification,
        })))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupDescriptor::Free { .. } => "free",
            GroupDescriptor::FreeAbelian { .. } => "free_abelian",
            GroupDescriptor::FinitePerm { .. } => "finite_perm",
            GroupDescriptor::Semidirect(_) => "semidirect",
        }
    }

    /// Number of stated generators.
    pub fn generator_count(&self) -> usize {
        match self {
            GroupDescriptor::Free { rank } | GroupDescriptor::FreeAbelian { rank } => *rank,
            GroupDescriptor::FinitePerm { generators, .. } => generators.len(),
            GroupDescriptor::Semidirect(sd) => {
                sd.kernel.generator_count() + sd.quotient.generator_count()
            }
        }
    }

    /// The stated generators as elements. For a semidirect product these are
    /// the kernel generators followed by the quotient generators, each paired
    /// with the identity of the other factor.
    pub fn generators(&self) -> Vec<Element> {
        match self {
            GroupDescriptor::Free { rank } => {
                (0..*rank).map(|i| Element::Word(FreeWord::generator(i))).collect()
            }
            GroupDescriptor::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = IntVector::zero(*rank);
                    v.coords[i] = BigInt::from(1);
                    Element::Vector(v)
                })
                .collect(),
            GroupDescriptor::FinitePerm { generators, .. } => {
                generators.iter().cloned().map(Element::Perm).collect()
            }
            GroupDescriptor::Semidirect(sd) => {
                let ke = sd.kernel.identity();
                let qe = sd.quotient.identity();
                sd.kernel
                    .generators()
                    .into_iter()
                    .map(|k| Element::pair(k, qe.clone()))
                    .chain(
                        sd.quotient
                            .generators()
                            .into_iter()
                            .map(|q| Element::pair(ke.clone(), q)),
                    )
                    .collect()
            }
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupDescriptor::Free { .. } => Element::Word(FreeWord::identity()),
            GroupDescriptor::FreeAbelian { rank } => Element::Vector(IntVector::zero(*rank)),
            GroupDescriptor::FinitePerm { degree, .. } => {
                Element::Perm(Permutation::identity(*degree))
            }
            GroupDescriptor::Semidirect(sd) => {
                Element::pair(sd.kernel.identity(), sd.quotient.identity())
            }
        }
    }

    pub fn is_identity(&self, el: &Element) -> Result<bool> {
        Ok(match (self, el) {
            (GroupDescriptor::Free { .. }, Element::Word(w)) => w.is_empty(),
            (GroupDescriptor::FreeAbelian { .. }, Element::Vector(v)) => v.is_zero(),
            (GroupDescriptor::FinitePerm { .. }, Element::Perm(p)) => p.is_identity(),
            (GroupDescriptor::Semidirect(sd), Element::Pair(k, q)) => {
                sd.kernel.is_identity(k)? && sd.quotient.is_identity(q)?
            }
            _ => return Err(mismatch(self, el)),
        })
    }

    /// Structural membership: does the element have the right shape for this
    /// descriptor (rank, degree, nesting)?
    pub fn check_element(&self, el: &Element) -> Result<()> {
        match (self, el) {
            (GroupDescriptor::Free { rank }, Element::Word(w)) => {
                if w.max_index() > *rank {
                    return Err(Error::Mismatch(format!(
                        "word uses generator {} beyond rank {}",
                        w.max_index(),
                        rank
                    )));
                }
                Ok(())
            }
            (GroupDescriptor::FreeAbelian { rank }, Element::Vector(v)) => {
                if v.len() != *rank {
                    return Err(Error::Mismatch(format!(
                        "vector length {} does not match rank {}",
                        v.len(),
                        rank
                    )));
                }
                Ok(())
            }
            (GroupDescriptor::FinitePerm { degree, .. }, Element::Perm(p)) => {
                if p.degree() != *degree {
                    return Err(Error::Mismatch(format!(
                        "permutation degree {} does not match descriptor degree {}",
                        p.degree(),
                        degree
                    )));
                }
                Ok(())
            }
            (GroupDescriptor::Semidirect(sd), Element::Pair(k, q)) => {
                sd.kernel.check_element(k)?;
                sd.quotient.check_element(q)
            }
            _ => Err(mismatch(self, el)),
        }
    }
}

fn mismatch(desc: &GroupDescriptor, el: &Element) -> Error {
    Error::Mismatch(format!(
        "element {:?} does not fit descriptor kind {}",
        el,
        desc.kind_name()
    ))
}

// ---------------------------------------------------------------------------
// Group operations
// ---------------------------------------------------------------------------

/// Multiply two elements under the descriptor's law.
pub fn mul(desc: &GroupDescriptor, a: &Element, b: &Element) -> Result<Element> {
    desc.check_element(a)?;
    desc.check_element(b)?;
    mul_unchecked(desc, a, b)
}

fn mul_unchecked(desc: &GroupDescriptor, a: &Element, b: &Element) -> Result<Element> {
    Ok(match (desc, a, b) {
        (GroupDescriptor::Free { .. }, Element::Word(x), Element::Word(y)) => {
            Element::Word(x.concat(y)?)
        }
        (GroupDescriptor::FreeAbelian { .. }, Element::Vector(x), Element::Vector(y)) => {
            Element::Vector(x.add(y))
        }
        (GroupDescriptor::FinitePerm { .. }, Element::Perm(x), Element::Perm(y)) => {
            Element::Perm(x.compose(y))
        }
        (GroupDescriptor::Semidirect(sd), Element::Pair(k1, q1), Element::Pair(k2, q2)) => {
            // (k1, q1) * (k2, q2) = (k1 * alpha(q1)(k2), q1 * q2)
            let twisted = apply_action(sd, q1, k2)?;
            let k = mul_unchecked(&sd.kernel, k1, &twisted)?;
            let q = mul_unchecked(&sd.quotient, q1, q2)?;
            Element::pair(k, q)
        }
        _ => return Err(mismatch(desc, a)),
    })
}

/// Invert an element under the descriptor's law.
pub fn inv(desc: &GroupDescriptor, a: &Element) -> Result<Element> {
    desc.check_element(a)?;
    inv_unchecked(desc, a)
}

fn inv_unchecked(desc: &GroupDescriptor, a: &Element) -> Result<Element> {
    Ok(match (desc, a) {
        (GroupDescriptor::Free { .. }, Element::Word(w)) => Element::Word(w.inverse()),
        (GroupDescriptor::FreeAbelian { .. }, Element::Vector(v)) => Element::Vector(v.neg()),
        (GroupDescriptor::FinitePerm { .. }, Element::Perm(p)) => Element::Perm(p.inverse()),
        (GroupDescriptor::Semidirect(sd), Element::Pair(k, q)) => {
            // (k, q)^-1 = (alpha(q^-1)(k^-1), q^-1)
            let qi = inv_unchecked(&sd.quotient, q)?;
            let ki = inv_unchecked(&sd.kernel, k)?;
            let twisted = apply_action(sd, &qi, &ki)?;
            Element::pair(twisted, qi)
        }
        _ => return Err(mismatch(desc, a)),
    })
}

/// Integer power via square-and-multiply.
pub fn power(desc: &GroupDescriptor, a: &Element, e: &BigInt) -> Result<Element> {
    desc.check_element(a)?;
    let (base, mut exp) = if e.is_negative() {
        (inv_unchecked(desc, a)?, e.magnitude().clone())
    } else {
        (a.clone(), e.magnitude().clone())
    };
    let mut acc = desc.identity();
    let mut sq = base;
    while !exp.is_zero() {
        if exp.is_odd() {
            acc = mul_unchecked(desc, &acc, &sq)?;
        }
        exp >>= 1;
        if !exp.is_zero() {
            sq = mul_unchecked(desc, &sq, &sq)?;
        }
    }
    Ok(acc)
}

/// All products of at most `radius` stated generators and inverses,
/// deduplicated, in breadth-first discovery order (identity first).
pub fn ball(desc: &GroupDescriptor, radius: usize) -> Result<Vec<Element>> {
    if radius > DEFAULT_RADIUS_CAP {
        return Err(Error::CapExceeded {
            what: "ball radius".into(),
            got: radius.to_string(),
            limit: DEFAULT_RADIUS_CAP.to_string(),
        });
    }
    let mut steps: Vec<Element> = Vec::new();
    for g in desc.generators() {
        steps.push(g.clone());
        steps.push(inv_unchecked(desc, &g)?);
    }
    let mut seen: std::collections::HashSet<Element> = std::collections::HashSet::new();
    let mut out: Vec<Element> = Vec::new();
    let mut frontier = vec![desc.identity()];
    seen.insert(desc.identity());
    out.push(desc.identity());
    for _ in 0..radius {
        let mut next = Vec::new();
        for el in &frontier {
            for s in &steps {
                let prod = mul_unchecked(desc, el, s)?;
                if seen.insert(prod.clone()) {
                    out.push(prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Factorization into generator letters
// ---------------------------------------------------------------------------

/// Write an element as a product of stated generators, in run-length form
/// `(0-based generator index, signed exponent)` read left to right.
///
/// For free and free abelian groups this reads off the canonical form; for a
/// finite permutation group it is a breadth-first search through the Cayley
/// graph (cached per descriptor); for a semidirect pair it factors the kernel
/// part followed by the quotient part.
pub fn factor_runs(desc: &GroupDescriptor, el: &Element) -> Result<Vec<(usize, BigInt)>> {
    desc.check_element(el)?;
    match (desc, el) {
        (GroupDescriptor::Free { .. }, Element::Word(w)) => Ok(w.runs()),
        (GroupDescriptor::FreeAbelian { .. }, Element::Vector(v)) => Ok(v
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect()),
        (GroupDescriptor::FinitePerm { degree, generators }, Element::Perm(p)) => {
            let words = finite_factorizations(*degree, generators)?;
            match words.get(p.images()) {
                Some(w) => Ok(w.clone()),
                None => Err(Error::Mismatch(
                    "permutation is not in the subgroup generated by the stated generators".into(),
                )),
            }
        }
        (GroupDescriptor::Semidirect(sd), Element::Pair(k, q)) => {
            let offset = sd.kernel.generator_count();
            let mut runs = factor_runs(&sd.kernel, k)?;
            runs.extend(
                factor_runs(&sd.quotient, q)?
                    .into_iter()
                    .map(|(i, e)| (i + offset, e)),
            );
            Ok(runs)
        }
        _ => Err(mismatch(desc, el)),
    }
}

type FactorTable = Arc<HashMap<Vec<usize>, Vec<(usize, BigInt)>>>;
type FactorCache = Mutex<HashMap<(usize, Vec<Vec<usize>>), FactorTable>>;

fn finite_factorizations(degree: usize, generators: &[Permutation]) -> Result<FactorTable> {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    let key = (
        degree,
        generators.iter().map(|g| g.images().to_vec()).collect::<Vec<_>>(),
    );
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    // BFS from the identity, multiplying by generators and inverses on the
    // right so concatenating letters left to right spells the element.
    let mut table: HashMap<Vec<usize>, Vec<(usize, BigInt)>> = HashMap::new();
    let id = Permutation::identity(degree);
    table.insert(id.images().to_vec(), Vec::new());
    let mut frontier = vec![id];
    let steps: Vec<(usize, i64, Permutation)> = generators
        .iter()
        .enumerate()
        .flat_map(|(i, g)| vec![(i, 1i64, g.clone()), (i, -1i64, g.inverse())])
        .collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            let word = table[p.images()].clone();
            for (i, sign, step) in &steps {
                let q = p.compose(step);
                if !table.contains_key(q.images()) {
                    let mut w = word.clone();
                    push_run(&mut w, *i, *sign);
                    table.insert(q.images().to_vec(), w);
                    next.push(q);
                    if table.len() > FINITE_ENUM_CAP {
                        return Err(Error::CapExceeded {
                            what: "finite group enumeration".into(),
                            got: format!("more than {}", FINITE_ENUM_CAP),
                            limit: FINITE_ENUM_CAP.to_string(),
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    let arc: FactorTable = Arc::new(table);
    cache.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

fn push_run(runs: &mut Vec<(usize, BigInt)>, gen: usize, sign: i64) {
    match runs.last_mut() {
        Some((g, e)) if *g == gen => {
            *e += sign;
            if e.is_zero() {
                runs.pop();
            }
        }
        _ => runs.push((gen, BigInt::from(sign))),
    }
}

/// Enumerate the elements of the subgroup of `Sym(degree)` generated by
/// `generators`, in deterministic breadth-first order starting from the
/// identity.
pub fn enumerate_finite_group(degree: usize, generators: &[Permutation]) -> Result<Vec<Permutation>> {
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    let id = Permutation::identity(degree);
    seen.insert(id.images().to_vec());
    let mut out = vec![id.clone()];
    let mut frontier = vec![id];
    let steps: Vec<Permutation> = generators
        .iter()
        .flat_map(|g| vec![g.clone(), g.inverse()])
        .collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for s in &steps {
                let q = s.compose(p);
                if seen.insert(q.images().to_vec()) {
                    out.push(q.clone());
                    next.push(q);
                    if out.len() > FINITE_ENUM_CAP {
                        return Err(Error::CapExceeded {
                            what: "finite group enumeration".into(),
                            got: format!("more than {}", FINITE_ENUM_CAP),
                            limit: FINITE_ENUM_CAP.to_string(),
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Action evaluation
// ---------------------------------------------------------------------------

fn validate_endo(kernel: &GroupDescriptor, spec: &EndoSpec) -> Result<()> {
    match (kernel, spec) {
        (GroupDescriptor::Free { rank }, EndoSpec::Words(ws)) => {
            if ws.len() != *rank {
                return Err(Error::InvalidInput(format!(
                    "endomorphism gives {} images for rank {}",
                    ws.len(),
                    rank
                )));
            }
            for w in ws {
                if w.max_index() > *rank {
                    return Err(Error::InvalidInput(
                        "endomorphism image uses a generator beyond the kernel rank".into(),
                    ));
                }
            }
            Ok(())
        }
        (GroupDescriptor::FreeAbelian { rank }, EndoSpec::Matrix(m)) => {
            if m.rows() != *rank || m.cols() != *rank {
                return Err(Error::InvalidInput(format!(
                    "action matrix is {}x{} but kernel rank is {}",
                    m.rows(),
                    m.cols(),
                    rank
                )));
            }
            Ok(())
        }
        (GroupDescriptor::FinitePerm { degree, generators }, EndoSpec::Table(table)) => {
            let elems = enumerate_finite_group(*degree, generators)?;
            if table.len() != elems.len() {
                return Err(Error::InvalidInput(format!(
                    "action table has {} entries but the kernel has {} elements",
                    table.len(),
                    elems.len()
                )));
            }
            let mut sources: std::collections::HashSet<&[usize]> = std::collections::HashSet::new();
            let mut targets: std::collections::HashSet<&[usize]> = std::collections::HashSet::new();
            let valid: std::collections::HashSet<Vec<usize>> =
                elems.iter().map(|p| p.images().to_vec()).collect();
            for (src, dst) in table {
                if src.degree() != *degree || dst.degree() != *degree {
                    return Err(Error::InvalidInput("table entry degree mismatch".into()));
                }
                if !valid.contains(src.images()) || !valid.contains(dst.images()) {
                    return Err(Error::InvalidInput(
                        "table entry outside the generated kernel".into(),
                    ));
                }
                if !sources.insert(src.images()) || !targets.insert(dst.images()) {
                    return Err(Error::InvalidInput("action table is not a bijection".into()));
                }
            }
            // The table must respect products so generator checks extend to
            // the whole kernel.
            let lookup: HashMap<&[usize], &Permutation> =
                table.iter().map(|(s, d)| (s.images(), d)).collect();
            for (a, fa) in table {
                for (b, fb) in table {
                    let ab = a.compose(b);
                    let fab = lookup
                        .get(ab.images())
                        .ok_or_else(|| Error::InvalidInput("table not closed".into()))?;
                    if **fab != fa.compose(fb) {
                        return Err(Error::InvalidInput(
                            "action table does not respect the group law".into(),
                        ));
                    }
                }
            }
            Ok(())
        }
        (k, s) => Err(Error::InvalidInput(format!(
            "endomorphism kind {} does not fit kernel kind {}",
            s.kind_name(),
            k.kind_name()
        ))),
    }
}

/// Apply one endomorphism description to a kernel element.
pub fn apply_endo(spec: &EndoSpec, el: &Element) -> Result<Element> {
    match (spec, el) {
        (EndoSpec::Words(images), Element::Word(w)) => {
            let mut acc = FreeWord::identity();
            for &l in w.letters() {
                let img = &images[l.unsigned_abs() as usize - 1];
                let piece = if l > 0 { img.clone() } else { img.inverse() };
                acc = acc.concat(&piece)?;
            }
            Ok(Element::Word(acc))
        }
        (EndoSpec::Matrix(m), Element::Vector(v)) => {
            Ok(Element::Vector(IntVector::new(m.apply(v.coords())?)))
        }
        (EndoSpec::Table(table), Element::Perm(p)) => {
            for (src, dst) in table {
                if src == p {
                    return Ok(Element::Perm(dst.clone()));
                }
            }
            Err(Error::Mismatch(
                "element not found in action table".into(),
            ))
        }
        _ => Err(Error::Mismatch(format!(
            "endomorphism {} cannot apply to {:?}",
            spec.kind_name(),
            el
        ))),
    }
}

fn check_pair_inverts(kernel: &GroupDescriptor, pair: &ActionPair) -> Result<()> {
    for gen in kernel.generators() {
        let fwd_then_bwd = apply_endo(&pair.backward, &apply_endo(&pair.forward, &gen)?)?;
        let bwd_then_fwd = apply_endo(&pair.forward, &apply_endo(&pair.backward, &gen)?)?;
        if fwd_then_bwd != gen || bwd_then_fwd != gen {
            return Err(Error::InvalidInput(
                "action pair does not compose to the identity on the kernel generators".into(),
            ));
        }
    }
    Ok(())
}

/// Evaluate the action of a quotient element on a kernel element:
/// `alpha(q)(k)`, factoring `q` into generator letters and chaining the
/// per-generator automorphisms (rightmost letter applied first, so that
/// `alpha` is a homomorphism under the crate's composition convention).
pub fn apply_action(sd: &SemidirectDescriptor, q: &Element, k: &Element) -> Result<Element> {
    let runs = factor_runs(&sd.quotient, q)?;
    let mut acc = k.clone();
    for (gen, exp) in runs.iter().rev() {
        acc = apply_pair_power(&sd.action.pairs[*gen], exp, &acc)?;
    }
    Ok(acc)
}

fn apply_pair_power(pair: &ActionPair, exp: &BigInt, el: &Element) -> Result<Element> {
    if exp.is_zero() {
        return Ok(el.clone());
    }
    let spec = if exp.is_negative() {
        &pair.backward
    } else {
        &pair.forward
    };
    let n = exp.magnitude();
    // Matrices admit fast powering; words and tables iterate.
    if let EndoSpec::Matrix(m) = spec {
        let e = n.to_u64().ok_or_else(|| Error::CapExceeded {
            what: "action exponent".into(),
            got: exp.to_string(),
            limit: u64::MAX.to_string(),
        })?;
        let p = m.pow(e)?;
        return apply_endo(&EndoSpec::Matrix(p), el);
    }
    let e = n.to_usize().ok_or_else(|| Error::CapExceeded {
        what: "action exponent".into(),
        got: exp.to_string(),
        limit: usize::MAX.to_string(),
    })?;
    if e > WORD_LENGTH_CAP {
        return Err(Error::CapExceeded {
            what: "action exponent".into(),
            got: e.to_string(),
            limit: WORD_LENGTH_CAP.to_string(),
        });
    }
    let mut acc = el.clone();
    for _ in 0..e {
        acc = apply_endo(spec, &acc)?;
    }
    Ok(acc)
}

fn compose_endo(kernel: &GroupDescriptor, outer: &EndoSpec, inner: &EndoSpec) -> Result<EndoSpec> {
    // (outer ∘ inner): apply inner first.
    Ok(match kernel {
        GroupDescriptor::Free { rank } => {
            let mut images = Vec::with_capacity(*rank);
            for i in 0..*rank {
                let inner_img = apply_endo(inner, &Element::Word(FreeWord::generator(i)))?;
                images.push(apply_endo(outer, &inner_img)?.word()?.clone());
            }
            EndoSpec::Words(images)
        }
        GroupDescriptor::FreeAbelian { .. } => match (outer, inner) {
            (EndoSpec::Matrix(a), EndoSpec::Matrix(b)) => EndoSpec::Matrix(a.mul(b)?),
            _ => return Err(Error::Mismatch("matrix endomorphisms expected".into())),
        },
        GroupDescriptor::FinitePerm { .. } => match (outer, inner) {
            (EndoSpec::Table(_), EndoSpec::Table(tb)) => {
                let mut out = Vec::with_capacity(tb.len());
                for (src, mid) in tb {
                    let img = apply_endo(outer, &Element::Perm(mid.clone()))?;
                    out.push((src.clone(), img.perm()?.clone()));
                }
                EndoSpec::Table(out)
            }
            _ => return Err(Error::Mismatch("table endomorphisms expected".into())),
        },
        GroupDescriptor::Semidirect(_) => {
            return Err(Error::UnsupportedKind {
                op: "compose_endo",
                kind: "semidirect",
            })
        }
    })
}

fn endo_equals_identity(kernel: &GroupDescriptor, spec: &EndoSpec) -> Result<bool> {
    for gen in kernel.generators() {
        if apply_endo(spec, &gen)? != gen {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluate the action along a word over the quotient's generators, composing
/// the per-generator specs (rightmost letter innermost).
fn endo_along_word(
    kernel: &GroupDescriptor,
    action: &AutomorphismAction,
    word: &FreeWord,
) -> Result<EndoSpec> {
    let mut acc = identity_endo(kernel)?;
    for &l in word.letters().iter().rev() {
        let pair = &action.pairs[l.unsigned_abs() as usize - 1];
        let spec = if l > 0 { &pair.forward } else { &pair.backward };
        acc = compose_endo(kernel, spec, &acc)?;
    }
    Ok(acc)
}

fn verify_action(
    kernel: &GroupDescriptor,
    quotient: &GroupDescriptor,
    action: &AutomorphismAction,
) -> Result<ActionVerification> {
    // Supplied relators are always checked: the action along each relator
    // must act as the identity on the kernel's generators.
    for rel in &action.relators {
        if rel.max_index() > quotient.generator_count() {
            return Err(Error::InvalidInput(
                "relator uses a generator beyond the quotient's generator count".into(),
            ));
        }
        let spec = endo_along_word(kernel, action, rel)?;
        if !endo_equals_identity(kernel, &spec)? {
            return Err(Error::InvalidInput(
                "action does not respect a supplied quotient relator".into(),
            ));
        }
    }
    match quotient {
        GroupDescriptor::Free { .. } => Ok(ActionVerification::FreeQuotient),
        GroupDescriptor::FreeAbelian { rank } => {
            // Implicit relators: generator actions must commute pairwise.
            for i in 0..*rank {
                for j in i + 1..*rank {
                    let ij = compose_endo(kernel, &action.pairs[i].forward, &action.pairs[j].forward)?;
                    let ji = compose_endo(kernel, &action.pairs[j].forward, &action.pairs[i].forward)?;
                    for gen in kernel.generators() {
                        if apply_endo(&ij, &gen)? != apply_endo(&ji, &gen)? {
                            return Err(Error::InvalidInput(
                                "generator actions of an abelian quotient must commute".into(),
                            ));
                        }
                    }
                }
            }
            Ok(ActionVerification::CommutationChecked)
        }
        GroupDescriptor::FinitePerm { degree, generators } => {
            let elems = enumerate_finite_group(*degree, generators)?;
            if elems.len() > ACTION_VERIFY_CAP {
                return Ok(if action.relators.is_empty() {
                    ActionVerification::Unverified
                } else {
                    ActionVerification::RelatorsChecked
                });
            }
            // Evaluate alpha(q) for every quotient element through its BFS
            // factorization, then check alpha(q1*q2) = alpha(q1) ∘ alpha(q2)
            // on the kernel generators for every pair.
            let table = finite_factorizations(*degree, generators)?;
            let mut endos: Vec<(Permutation, EndoSpec)> = Vec::with_capacity(elems.len());
            for q in &elems {
                let runs = &table[q.images()];
                let mut acc = identity_endo(kernel)?;
                for (gen, exp) in runs.iter().rev() {
                    let pair = &action.pairs[*gen];
                    let steps = exp.magnitude().to_usize().unwrap_or(usize::MAX);
                    let spec = if exp.is_negative() { &pair.backward } else { &pair.forward };
                    for _ in 0..steps {
                        acc = compose_endo(kernel, spec, &acc)?;
                    }
                }
                endos.push((q.clone(), acc));
            }
            let find = |p: &Permutation| -> &EndoSpec {
                &endos.iter().find(|(q, _)| q == p).expect("enumerated").1
            };
            let gens_of_kernel = kernel.generators();
            for (q1, e1) in &endos {
                for (q2, e2) in &endos {
                    let q12 = q1.compose(q2);
                    let composed = compose_endo(kernel, e1, e2)?;
                    let direct = find(&q12);
                    for g in &gens_of_kernel {
                        if apply_endo(&composed, g)? != apply_endo(direct, g)? {
                            return Err(Error::InvalidInput(
                                "action is not well defined over the finite quotient".into(),
                            ));
                        }
                    }
                }
            }
            Ok(ActionVerification::FiniteChecked)
        }
        GroupDescriptor::Semidirect(_) => Ok(if action.relators.is_empty() {
            ActionVerification::Unverified
        } else {
            ActionVerification::RelatorsChecked
        }),
    }
}

// ---------------------------------------------------------------------------
// Homomorphisms
// ---------------------------------------------------------------------------

/// How a homomorphism's well-definedness is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomProvenance {
    /// The source is free: any generator assignment extends.
    FreeSource,
    /// Free abelian source with images verified to commute.
    CommutationChecked,
    /// A relator list for the source was verified against the images.
    RelatorsChecked(Vec<FreeWord>),
    /// Produced by an operation that guarantees well-definedness.
    Constructed(&'static str),
}

/// A homomorphism given by images of the source's stated generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub source: GroupDescriptor,
    pub target: GroupDescriptor,
    pub images: Vec<Element>,
    pub provenance: HomProvenance,
}

impl Homomorphism {
    /// Validated constructor. For a free abelian source the images must
    /// commute pairwise; for a finite permutation source a relator list is
    /// required (and checked) since generator images alone do not determine
    /// a well-defined map.
    pub fn new(
        source: GroupDescriptor,
        target: GroupDescriptor,
        images: Vec<Element>,
        relators: Option<Vec<FreeWord>>,
    ) -> Result<Self> {
        if images.len() != source.generator_count() {
            return Err(Error::InvalidInput(format!(
                "{} images supplied for {} generators",
                images.len(),
                source.generator_count()
            )));
        }
        for img in &images {
            target.check_element(img)?;
        }
        let provenance = match &source {
            GroupDescriptor::Free { .. } => HomProvenance::FreeSource,
            GroupDescriptor::FreeAbelian { .. } => {
                for i in 0..images.len() {
                    for j in i + 1..images.len() {
                        let ij = mul(&target, &images[i], &images[j])?;
                        let ji = mul(&target, &images[j], &images[i])?;
                        if ij != ji {
                            return Err(Error::InvalidInput(
                                "images of an abelian source must commute".into(),
                            ));
                        }
                    }
                }
                HomProvenance::CommutationChecked
            }
            _ => {
                let rels = relators.ok_or_else(|| {
                    Error::InvalidInput(
                        "a relator list is required for this source kind".into(),
                    )
                })?;
                let h = Homomorphism {
                    source: source.clone(),
                    target: target.clone(),
                    images: images.clone(),
                    provenance: HomProvenance::Constructed("pending"),
                };
                for rel in &rels {
                    let img = h.apply_word(rel)?;
                    if !target.is_identity(&img)? {
                        return Err(Error::InvalidInput(
                            "images do not satisfy a supplied source relator".into(),
                        ));
                    }
                }
                HomProvenance::RelatorsChecked(rels)
            }
        };
        Ok(Homomorphism {
            source,
            target,
            images,
            provenance,
        })
    }

    /// Internal constructor for maps guaranteed well defined by the way they
    /// were built (identity witnesses, reduction maps, ...).
    pub fn constructed(
        source: GroupDescriptor,
        target: GroupDescriptor,
        images: Vec<Element>,
        how: &'static str,
    ) -> Self {
        Homomorphism {
            source,
            target,
            images,
            provenance: HomProvenance::Constructed(how),
        }
    }

    /// The identity map on a descriptor.
    pub fn identity(desc: &GroupDescriptor) -> Self {
        Homomorphism::constructed(desc.clone(), desc.clone(), desc.generators(), "identity")
    }

    /// Evaluate on an element by factoring it over the source's generators.
    pub fn apply(&self, el: &Element) -> Result<Element> {
        let runs = factor_runs(&self.source, el)?;
        let mut acc = self.target.identity();
        for (gen, exp) in runs {
            let p = power(&self.target, &self.images[gen], &exp)?;
            acc = mul(&self.target, &acc, &p)?;
        }
        Ok(acc)
    }

    /// Evaluate on a word over the source's generator indices.
    pub fn apply_word(&self, word: &FreeWord) -> Result<Element> {
        let mut acc = self.target.identity();
        for &l in word.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            let factor = if l > 0 {
                img.clone()
            } else {
                inv(&self.target, img)?
            };
            acc = mul(&self.target, &acc, &factor)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catmap_group() -> GroupDescriptor {
        let fwd = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let bwd = IntMatrix::from_i64_rows(&[&[1, -1], &[-1, 2]]);
        GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(2),
            GroupDescriptor::free_abelian(1),
            AutomorphismAction {
                pairs: vec![ActionPair {
                    forward: EndoSpec::Matrix(fwd),
                    backward: EndoSpec::Matrix(bwd),
                }],
                relators: Vec::new(),
            },
        )
        .unwrap()
    }

    fn pair_iv(k: &[i64], q: &[i64]) -> Element {
        Element::pair(
            Element::Vector(IntVector::from_i64s(k)),
            Element::Vector(IntVector::from_i64s(q)),
        )
    }

    #[test]
    fn word_reduction_is_canonical() {
        let w = FreeWord::new([1, 2, -2, -1, 1]).unwrap();
        assert_eq!(w.letters(), &[1]);
        assert!(FreeWord::new([1, 0]).is_err());
        let u = FreeWord::new([1, 2, -1]).unwrap();
        assert_eq!(u.inverse().letters(), &[1, -2, -1]);
        assert!(u.concat(&u.inverse()).unwrap().is_empty());
    }

    #[test]
    fn permutation_composition_applies_right_factor_first() {
        let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        // (0 1) * (1 2) sends 0->1, 1->2, 2->0.
        let c = a.compose(&b);
        assert_eq!(c.images(), &[1, 2, 0]);
    }

    #[test]
    fn permutation_lex_rank_roundtrip() {
        let perms = all_permutations(4);
        assert_eq!(perms.len(), 24);
        for (i, p) in perms.iter().enumerate() {
            assert_eq!(p.lex_rank(), i);
        }
        // Lexicographic order of image sequences.
        assert!(perms.windows(2).all(|w| w[0].images() < w[1].images()));
    }

    #[test]
    fn free_mul_reduces() {
        let d = GroupDescriptor::free(2);
        let x = Element::Word(FreeWord::new([1]).unwrap());
        let xi = inv(&d, &x).unwrap();
        assert_eq!(mul(&d, &x, &xi).unwrap(), d.identity());
        let w1 = Element::Word(FreeWord::new([1, 2]).unwrap());
        let w2 = Element::Word(FreeWord::new([-2, -1, 1]).unwrap());
        assert_eq!(
            mul(&d, &w1, &w2).unwrap(),
            Element::Word(FreeWord::new([1]).unwrap())
        );
    }

    #[test]
    fn abelian_mul_adds() {
        let d = GroupDescriptor::free_abelian(3);
        let a = Element::Vector(IntVector::from_i64s(&[1, -2, 5]));
        let b = Element::Vector(IntVector::from_i64s(&[3, 2, -5]));
        assert_eq!(
            mul(&d, &a, &b).unwrap(),
            Element::Vector(IntVector::from_i64s(&[4, 0, 0]))
        );
        assert_eq!(mul(&d, &a, &inv(&d, &a).unwrap()).unwrap(), d.identity());
    }

    #[test]
    fn semidirect_trivial_action_is_direct_product() {
        let d = GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(1),
            GroupDescriptor::free_abelian(1),
            AutomorphismAction::trivial(&GroupDescriptor::free_abelian(1), 1).unwrap(),
        )
        .unwrap();
        let a = pair_iv(&[2], &[3]);
        let b = pair_iv(&[5], &[7]);
        assert_eq!(mul(&d, &a, &b).unwrap(), pair_iv(&[7], &[10]));
    }

    #[test]
    fn semidirect_catmap_twists() {
        let d = catmap_group();
        let a = pair_iv(&[0, 0], &[1]);
        let b = pair_iv(&[1, 0], &[0]);
        // ((0,0),1) * ((1,0),0) = (A*(1,0), 1) = ((2,1), 1)
        assert_eq!(mul(&d, &a, &b).unwrap(), pair_iv(&[2, 1], &[1]));
        // inverse law
        let ai = inv(&d, &a).unwrap();
        assert_eq!(mul(&d, &a, &ai).unwrap(), d.identity());
        let bi = inv(&d, &b).unwrap();
        assert_eq!(mul(&d, &b, &bi).unwrap(), d.identity());
    }

    #[test]
    fn semidirect_is_associative_on_samples() {
        let d = catmap_group();
        let els = [
            pair_iv(&[1, 0], &[0]),
            pair_iv(&[0, 1], &[2]),
            pair_iv(&[-1, 3], &[-1]),
            pair_iv(&[2, -2], &[1]),
        ];
        for a in &els {
            for b in &els {
                for c in &els {
                    let ab_c = mul(&d, &mul(&d, a, b).unwrap(), c).unwrap();
                    let a_bc = mul(&d, a, &mul(&d, b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
    }

    #[test]
    fn bad_action_pair_rejected() {
        // forward x -> x^2 has no inverse endomorphism; the claimed backward
        // does not compose to the identity.
        let err = GroupDescriptor::semidirect(
            GroupDescriptor::free(1),
            GroupDescriptor::free_abelian(1),
            AutomorphismAction {
                pairs: vec![ActionPair {
                    forward: EndoSpec::Words(vec![FreeWord::new([1, 1]).unwrap()]),
                    backward: EndoSpec::Words(vec![FreeWord::new([1]).unwrap()]),
                }],
                relators: Vec::new(),
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn abelian_quotient_requires_commuting_actions() {
        // Two non-commuting kernel automorphisms of F_2 presented as the
        // action of Z^2 must be rejected.
        let swap = EndoSpec::Words(vec![
            FreeWord::new([2]).unwrap(),
            FreeWord::new([1]).unwrap(),
        ]);
        let shear = EndoSpec::Words(vec![
            FreeWord::new([1, 2]).unwrap(),
            FreeWord::new([2]).unwrap(),
        ]);
        let shear_inv = EndoSpec::Words(vec![
            FreeWord::new([1, -2]).unwrap(),
            FreeWord::new([2]).unwrap(),
        ]);
        let err = GroupDescriptor::semidirect(
            GroupDescriptor::free(2),
            GroupDescriptor::free_abelian(2),
            AutomorphismAction {
                pairs: vec![
                    ActionPair {
                        forward: swap.clone(),
                        backward: swap,
                    },
                    ActionPair {
                        forward: shear,
                        backward: shear_inv,
                    },
                ],
                relators: Vec::new(),
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn relator_verification() {
        // Q = Z/2 presented by the relator q^2 over a free-abelian rank-1
        // descriptor is not expressible, so present Q as a finite perm group
        // and give the action matrix -I (an involution): accepted.
        let q = GroupDescriptor::finite_perm(2, vec![Permutation::from_cycles(2, &[&[0, 1]]).unwrap()])
            .unwrap();
        let neg = IntMatrix::from_i64_rows(&[&[-1]]);
        let ok = GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(1),
            q.clone(),
            AutomorphismAction {
                pairs: vec![ActionPair {
                    forward: EndoSpec::Matrix(neg.clone()),
                    backward: EndoSpec::Matrix(neg),
                }],
                relators: vec![FreeWord::new([1, 1]).unwrap()],
            },
        );
        assert!(ok.is_ok());
        if let Ok(GroupDescriptor::Semidirect(sd)) = ok {
            assert_eq!(sd.verification, ActionVerification::FiniteChecked);
        }
        // The doubling map is not an involution: rejected for this quotient.
        let dbl = IntMatrix::from_i64_rows(&[&[2]]);
        let err = GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(1),
            q,
            AutomorphismAction {
                pairs: vec![ActionPair {
                    forward: EndoSpec::Matrix(dbl.clone()),
                    backward: EndoSpec::Matrix(dbl),
                }],
                relators: Vec::new(),
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn ball_sizes_match_hand_counts() {
        let f1 = GroupDescriptor::free(1);
        assert_eq!(ball(&f1, 2).unwrap().len(), 5); // e, x, x^-1, x^2, x^-2
        let z2 = GroupDescriptor::free_abelian(2);
        assert_eq!(ball(&z2, 0).unwrap().len(), 1);
        assert_eq!(ball(&z2, 1).unwrap().len(), 5);
        let f2 = GroupDescriptor::free(2);
        assert_eq!(ball(&f2, 1).unwrap().len(), 5);
        assert_eq!(ball(&f2, 2).unwrap().len(), 17); // 1 + 4 + 12
    }

    #[test]
    fn ball_radius_cap() {
        let f1 = GroupDescriptor::free(1);
        assert!(matches!(
            ball(&f1, DEFAULT_RADIUS_CAP + 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn finite_perm_factorization_recovers_elements() {
        let gens = vec![
            Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
        ];
        let d = GroupDescriptor::finite_perm(3, gens.clone()).unwrap();
        let elems = enumerate_finite_group(3, &gens).unwrap();
        assert_eq!(elems.len(), 6);
        for p in &elems {
            let runs = factor_runs(&d, &Element::Perm(p.clone())).unwrap();
            let mut acc = d.identity();
            for (g, e) in runs {
                let step = power(&d, &Element::Perm(gens[g].clone()), &e).unwrap();
                acc = mul(&d, &acc, &step).unwrap();
            }
            assert_eq!(acc, Element::Perm(p.clone()));
        }
    }

    #[test]
    fn hom_respects_products() {
        // Abelianization of F_2 mod 2 realized in Sym(4): x -> (0 1), y -> (2 3).
        let h = Homomorphism::new(
            GroupDescriptor::free(2),
            GroupDescriptor::finite_perm(
                4,
                vec![
                    Permutation::from_cycles(4, &[&[0, 1]]).unwrap(),
                    Permutation::from_cycles(4, &[&[2, 3]]).unwrap(),
                ],
            )
            .unwrap(),
            vec![
                Element::Perm(Permutation::from_cycles(4, &[&[0, 1]]).unwrap()),
                Element::Perm(Permutation::from_cycles(4, &[&[2, 3]]).unwrap()),
            ],
            None,
        )
        .unwrap();
        // the commutator dies
        let comm = Element::Word(FreeWord::new([1, 2, -1, -2]).unwrap());
        assert_eq!(h.apply(&comm).unwrap(), h.target.identity());
        // products map to products on a sample of words
        let words = [
            FreeWord::new([1, 2]).unwrap(),
            FreeWord::new([-1, 2, 1]).unwrap(),
            FreeWord::new([2, 2, 1]).unwrap(),
            FreeWord::new([-2, -1]).unwrap(),
        ];
        for a in &words {
            for b in &words {
                let ab = a.concat(b).unwrap();
                let lhs = h.apply(&Element::Word(ab)).unwrap();
                let rhs = mul(
                    &h.target,
                    &h.apply(&Element::Word(a.clone())).unwrap(),
                    &h.apply(&Element::Word(b.clone())).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hom_reduction_to_mod_4_blocks() {
        // Z^2 -> (Z/4)^2 as two disjoint 4-cycles; (2,3) lands on the
        // block shifts by 2 and 3.
        let c0 = Permutation::from_cycles(8, &[&[0, 1, 2, 3]]).unwrap();
        let c1 = Permutation::from_cycles(8, &[&[4, 5, 6, 7]]).unwrap();
        let h = Homomorphism::new(
            GroupDescriptor::free_abelian(2),
            GroupDescriptor::finite_perm(8, vec![c0.clone(), c1.clone()]).unwrap(),
            vec![Element::Perm(c0.clone()), Element::Perm(c1.clone())],
            None,
        )
        .unwrap();
        let img = h
            .apply(&Element::Vector(IntVector::from_i64s(&[2, 3])))
            .unwrap();
        let expected = c0.power(&BigInt::from(2)).compose(&c1.power(&BigInt::from(3)));
        assert_eq!(img, Element::Perm(expected));
    }

    #[test]
    fn nested_quotient_factorization() {
        // G = Z ⋊ (Z/2 ⋉-free presentation): quotient itself a semidirect
        // product (here a direct product Z/2 x Z/2 presented semidirectly).
        let z2 = GroupDescriptor::finite_perm(2, vec![Permutation::from_cycles(2, &[&[0, 1]]).unwrap()])
            .unwrap();
        let inner = GroupDescriptor::semidirect(
            z2.clone(),
            z2.clone(),
            AutomorphismAction::trivial(&z2, 1).unwrap(),
        )
        .unwrap();
        let neg = IntMatrix::from_i64_rows(&[&[-1]]);
        let outer = GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(1),
            inner.clone(),
            AutomorphismAction {
                pairs: vec![
                    ActionPair {
                        forward: EndoSpec::Matrix(neg.clone()),
                        backward: EndoSpec::Matrix(neg.clone()),
                    },
                    ActionPair {
                        forward: EndoSpec::Matrix(neg.clone()),
                        backward: EndoSpec::Matrix(neg),
                    },
                ],
                relators: Vec::new(),
            },
        )
        .unwrap();
        let sw = Permutation::from_cycles(2, &[&[0, 1]]).unwrap();
        let g = Element::pair(
            Element::Vector(IntVector::from_i64s(&[3])),
            Element::pair(Element::Perm(sw.clone()), Element::Perm(Permutation::identity(2))),
        );
        let h = Element::pair(
            Element::Vector(IntVector::from_i64s(&[1])),
            Element::pair(Element::Perm(Permutation::identity(2)), Element::Perm(sw)),
        );
        // (v1, s)(v2, t): the swap acts by negation, so v = 3 + (-1)*1 = 2.
        let prod = mul(&outer, &g, &h).unwrap();
        let (k, _) = prod.parts().unwrap();
        assert_eq!(k.vector().unwrap(), &IntVector::from_i64s(&[2]));
        // inverse law still holds in the nested setting
        let gi = inv(&outer, &g).unwrap();
        assert_eq!(mul(&outer, &g, &gi).unwrap(), outer.identity());
    }
}

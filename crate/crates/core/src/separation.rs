//! Finite-index separation witnesses.
//!
//! Given a finite set of nontrivial elements of a residually finite group of
//! one of the supported kernel kinds, produce a concrete homomorphism onto a
//! finite permutation group under which every listed element survives (maps
//! to a non-identity permutation). The witness is stored as data small
//! enough to ship inside a certificate and re-check independently.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{
    Element, FreeWord, GroupDescriptor, Homomorphism, IntVector, Permutation,
};

/// A finite-quotient witness that a specific finite set of nontrivial
/// elements stays away from the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteIndexWitness {
    /// Free group of the given rank: explicit generator images in a
    /// symmetric group, built from the prefix tree of the words to separate.
    PermImages {
        rank: usize,
        degree: usize,
        images: Vec<Permutation>,
    },
    /// Free abelian group of the given rank: entry-wise reduction modulo
    /// `modulus` keeps every listed vector away from zero.
    Modulus { rank: usize, modulus: BigInt },
    /// Finite permutation group: the identity map is already injective.
    Identity {
        degree: usize,
        generators: Vec<Permutation>,
    },
}

impl FiniteIndexWitness {
    /// Degree of the finite permutation group the witness maps into.
    pub fn target_degree(&self) -> usize {
        match self {
            FiniteIndexWitness::PermImages { degree, .. } => *degree,
            FiniteIndexWitness::Modulus { rank, modulus } => {
                let m = modulus.to_usize_lossy();
                rank * m
            }
            FiniteIndexWitness::Identity { degree, .. } => *degree,
        }
    }

    /// Materialize the witness as a checked homomorphism.
    ///
    /// * `PermImages`: the free group maps by sending each generator to its
    ///   stored image.
    /// * `Modulus`: generator `i` of the free abelian group maps to an
    ///   `m`-cycle on the `i`-th block of `{0, .., rank*m - 1}`, so a vector
    ///   acts by rotating each block by the matching coordinate; it dies only
    ///   if every coordinate is divisible by `m`.
    /// * `Identity`: the identity map on the finite group.
    pub fn to_homomorphism(&self) -> Result<Homomorphism> {
        match self {
            FiniteIndexWitness::PermImages { rank, degree, images } => {
                if images.len() != *rank {
                    return Err(Error::Malformed(format!(
                        "witness holds {} images for rank {}",
                        images.len(),
                        rank
                    )));
                }
                for p in images {
                    if p.degree() != *degree {
                        return Err(Error::Malformed(
                            "witness image degree mismatch".into(),
                        ));
                    }
                }
                Ok(Homomorphism::constructed(
                    GroupDescriptor::free(*rank),
                    GroupDescriptor::finite_perm(*degree, images.clone())?,
                    images.iter().cloned().map(Element::Perm).collect(),
                    "free generator images",
                ))
            }
            FiniteIndexWitness::Modulus { rank, modulus } => {
                if modulus <= &BigInt::zero() {
                    return Err(Error::Malformed("witness modulus must be positive".into()));
                }
                let m = modulus.to_usize_lossy();
                let degree = rank * m;
                let mut gens = Vec::with_capacity(*rank);
                for i in 0..*rank {
                    let block: Vec<usize> = (i * m..(i + 1) * m).collect();
                    gens.push(Permutation::from_cycles(degree, &[&block])?);
                }
                Ok(Homomorphism::constructed(
                    GroupDescriptor::free_abelian(*rank),
                    GroupDescriptor::finite_perm(degree, gens.clone())?,
                    gens.into_iter().map(Element::Perm).collect(),
                    "block rotation modulo witness modulus",
                ))
            }
            FiniteIndexWitness::Identity { degree, generators } => {
                let desc = GroupDescriptor::finite_perm(*degree, generators.clone())?;
                Ok(Homomorphism::identity(&desc))
            }
        }
    }

    /// Does the witness map this element to a non-identity permutation?
    pub fn separates(&self, el: &Element) -> Result<bool> {
        match self {
            FiniteIndexWitness::Modulus { rank, modulus } => {
                // No need to materialize block cycles: the image is trivial
                // exactly when every coordinate reduces to zero.
                let v = el.vector()?;
                if v.len() != *rank {
                    return Err(Error::Mismatch("vector length mismatch".into()));
                }
                Ok(!v.reduce_mod(modulus).is_zero())
            }
            _ => {
                let h = self.to_homomorphism()?;
                let img = h.apply(el)?;
                Ok(!h.target.is_identity(&img)?)
            }
        }
    }
}

trait UsizeLossy {
    fn to_usize_lossy(&self) -> usize;
}

impl UsizeLossy for BigInt {
    fn to_usize_lossy(&self) -> usize {
        use num_traits::ToPrimitive;
        self.to_usize().unwrap_or(usize::MAX)
    }
}

/// Build a witness separating `elements` inside `desc`. Every element must
/// be nontrivial and fit the descriptor; the descriptor must be free, free
/// abelian, or a finite permutation group.
pub fn separate(desc: &GroupDescriptor, elements: &[Element]) -> Result<FiniteIndexWitness> {
    for el in elements {
        desc.check_element(el)?;
        if desc.is_identity(el)? {
            return Err(Error::InvalidInput(
                "cannot separate the identity from itself".into(),
            ));
        }
    }
    match desc {
        GroupDescriptor::Free { rank } => {
            let words: Vec<&FreeWord> = elements
                .iter()
                .map(|e| e.word())
                .collect::<Result<_>>()?;
            separate_free(*rank, &words)
        }
        GroupDescriptor::FreeAbelian { rank } => {
            let vectors: Vec<&IntVector> = elements
                .iter()
                .map(|e| e.vector())
                .collect::<Result<_>>()?;
            separate_abelian(*rank, &vectors)
        }
        GroupDescriptor::FinitePerm { degree, generators } => Ok(FiniteIndexWitness::Identity {
            degree: *degree,
            generators: generators.clone(),
        }),
        GroupDescriptor::Semidirect(_) => Err(Error::UnsupportedKind {
            op: "separate",
            kind: "semidirect",
        }),
    }
}

/// Separation in a free group via the prefix tree of the words.
///
/// Vertices are the distinct prefixes of the input words (the empty prefix
/// is vertex 0). Because the words are reduced, no vertex carries both an
/// incoming and an outgoing edge with the same generator label, so for each
/// generator the tree edges define a partial injection on vertices:
///
/// * child reached by a positive letter: child maps to its parent;
/// * child reached by a negative letter: parent maps to that child.
///
/// Completing each partial injection to a permutation (matching leftover
/// sources to leftover targets in ascending order) yields generator images
/// with the property that the image of any input word moves that word's own
/// vertex back to the root. Since the word is nontrivial its vertex is not
/// the root, so the image is never the identity.
pub fn separate_free(rank: usize, words: &[&FreeWord]) -> Result<FiniteIndexWitness> {
    for w in words {
        if w.is_empty() {
            return Err(Error::InvalidInput(
                "cannot separate the identity from itself".into(),
            ));
        }
        if w.max_index() > rank {
            return Err(Error::Mismatch(format!(
                "word uses generator {} beyond rank {}",
                w.max_index(),
                rank
            )));
        }
    }
    // Prefix tree: vertex 0 is the empty prefix; children keyed by letter.
    // parent_edge[v] = (parent vertex, letter) for v > 0.
    let mut children: Vec<std::collections::HashMap<i32, usize>> = vec![Default::default()];
    let mut parent_edge: Vec<(usize, i32)> = vec![(0, 0)];
    for w in words {
        let mut at = 0usize;
        for &l in w.letters() {
            at = match children[at].get(&l) {
                Some(&v) => v,
                None => {
                    let v = children.len();
                    children.push(Default::default());
                    parent_edge.push((at, l));
                    children[at].insert(l, v);
                    v
                }
            };
        }
    }
    let degree = children.len();
    let mut images = Vec::with_capacity(rank);
    for g in 0..rank {
        let letter = g as i32 + 1;
        let mut image: Vec<Option<usize>> = vec![None; degree];
        let mut is_target = vec![false; degree];
        for v in 1..degree {
            let (p, l) = parent_edge[v];
            if l == letter {
                image[v] = Some(p);
                is_target[p] = true;
            } else if l == -letter {
                image[p] = Some(v);
                is_target[v] = true;
            }
        }
        let free_targets: Vec<usize> = (0..degree).filter(|&v| !is_target[v]).collect();
        let mut next_free = free_targets.into_iter();
        let completed: Vec<usize> = image
            .into_iter()
            .map(|slot| slot.unwrap_or_else(|| next_free.next().expect("source/target counts match")))
            .collect();
        images.push(Permutation::new(completed)?);
    }
    Ok(FiniteIndexWitness::PermImages {
        rank,
        degree,
        images,
    })
}

/// Separation in a free abelian group: reduce modulo one more than the
/// largest absolute coordinate appearing in the vectors. Every nonzero
/// vector has a coordinate `c` with `1 <= |c| < m`, which stays nonzero
/// modulo `m`.
pub fn separate_abelian(rank: usize, vectors: &[&IntVector]) -> Result<FiniteIndexWitness> {
    let mut max_abs = BigInt::zero();
    for v in vectors {
        if v.len() != rank {
            return Err(Error::Mismatch(format!(
                "vector length {} does not match rank {}",
                v.len(),
                rank
            )));
        }
        if v.is_zero() {
            return Err(Error::InvalidInput(
                "cannot separate the identity from itself".into(),
            ));
        }
        for c in v.coords() {
            let a = c.abs();
            if a > max_abs {
                max_abs = a;
            }
        }
    }
    Ok(FiniteIndexWitness::Modulus {
        rank,
        modulus: max_abs + BigInt::one(),
    })
}

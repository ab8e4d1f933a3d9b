//! The finite-kernel quotient construction with re-checkable certificates.
//!
//! Input: a semidirect product `G = K x| Q` (kernel free, free abelian, or a
//! finite permutation group; quotient arbitrary) and a finite subset `S`.
//! Output: a finite quotient `N` of `K` that is preserved by the action, the
//! induced quotient group `G1 = N x| Q`, and the projection
//! `pi(k, q) = (rho(k), q)` — packaged as a [`Certificate`] recording enough
//! data that an independent pass ([`verify_certificate`]) can re-establish:
//!
//! 1. `pi` is a homomorphism onto `G1` carrying generators to generators;
//! 2. `pi` is injective on `S`;
//! 3. `Q` sits inside `G1` with finite index equal to `|N|`.
//!
//! The mechanism behind claim 2: if `pi(s1) = pi(s2)` then the quotient
//! parts agree and `rho(k1^-1 k2) = 1`, so it suffices that the quotient of
//! `K` keeps every difference of kernel parts of `S` alive. Those
//! differences form the [`SeedSet::f_k`] list, the separation witness is
//! found for exactly that list, and the certificate stores both.
//!
//! Certificates are deterministic: identical inputs and options produce
//! identical values (the multiplicativity sample is drawn from a recorded
//! seed).

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

use crate::charcore::{
    hom_at_block, induce_pair, CharacteristicQuotient, InducedEndo, InducedPair,
    WitnessBlockEvidence, DEFAULT_MAX_DEGREE, DEFAULT_MAX_HOMS,
};
use crate::error::{Error, Result};
use crate::group::{
    apply_endo, factor_runs, inv, mul, Element, EndoSpec, GroupDescriptor, Homomorphism,
    IntVector, Permutation, SemidirectDescriptor, WORD_LENGTH_CAP,
};
use crate::matrix::IntMatrix;
use crate::separation::{separate, FiniteIndexWitness};

/// Default number of pseudorandom pairs in the multiplicativity sample.
pub const DEFAULT_SAMPLE_COUNT: usize = 200;
/// Default length bound for each factor of a sampled pair.
pub const DEFAULT_SAMPLE_WORD_LENGTH: usize = 6;

/// Tunable knobs of the construction. Everything lands in the certificate's
/// parameter record so a verifying pass replays the same computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Compute `|N|` and the index claim (claim 3). Off by default: the
    /// quotient degree can make the order expensive, and claims 1 and 2
    /// never need it.
    pub compute_order: bool,
    /// Cap on the number of homomorphisms intersected for a free kernel.
    pub max_homs: u64,
    /// Cap on materialized permutation degrees.
    pub max_degree: usize,
    /// Seed for the multiplicativity sample.
    pub sample_seed: u64,
    /// Number of sampled pairs.
    pub sample_count: usize,
    /// Length bound for sampled factors.
    pub sample_word_length: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            compute_order: false,
            max_homs: DEFAULT_MAX_HOMS,
            max_degree: DEFAULT_MAX_DEGREE,
            sample_seed: 0,
            sample_count: DEFAULT_SAMPLE_COUNT,
            sample_word_length: DEFAULT_SAMPLE_WORD_LENGTH,
        }
    }
}

/// Record of construction parameters, embedded in the certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterRecord {
    pub max_homs: u64,
    pub max_degree: usize,
    pub sample_seed: u64,
    pub sample_count: usize,
    pub sample_word_length: usize,
}

/// The seed subset and its derived difference sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    /// The subset, deduplicated in order of first appearance.
    pub s: Vec<Element>,
    /// All differences `s1^-1 s2`, deduplicated and sorted.
    pub f: Vec<Element>,
    /// Nontrivial differences of kernel parts, `k(s1)^-1 k(s2)`, living in
    /// the kernel group; deduplicated and sorted. Keeping all of these
    /// alive in the kernel quotient forces `pi` injective on `s`.
    pub f_k: Vec<Element>,
}

impl SeedSet {
    pub fn new(g: &GroupDescriptor, s: &[Element]) -> Result<SeedSet> {
        let sd = as_semidirect(g)?;
        let mut dedup: Vec<Element> = Vec::new();
        for el in s {
            g.check_element(el)?;
            if !dedup.contains(el) {
                dedup.push(el.clone());
            }
        }
        let mut f = BTreeSet::new();
        let mut f_k = BTreeSet::new();
        for a in &dedup {
            let a_inv = inv(g, a)?;
            let (ka, _) = a.parts()?;
            let ka_inv = inv(&sd.kernel, ka)?;
            for b in &dedup {
                f.insert(mul(g, &a_inv, b)?);
                let (kb, _) = b.parts()?;
                let diff = mul(&sd.kernel, &ka_inv, kb)?;
                if !sd.kernel.is_identity(&diff)? {
                    f_k.insert(diff);
                }
            }
        }
        Ok(SeedSet {
            s: dedup,
            f: f.into_iter().collect(),
            f_k: f_k.into_iter().collect(),
        })
    }
}

/// Status of the three claims as established at construction time. A
/// verifying pass re-derives each and insists on agreement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimStatuses {
    /// The projection is multiplicative (on the recorded sample and all
    /// pairs from the seed and generators) and carries generators to
    /// generators.
    pub quotient_map: bool,
    /// The projection is injective on the seed subset.
    pub seed_injects: bool,
    /// `[G1 : Q] = |N|` with the order actually computed; absent when order
    /// computation was not requested.
    pub finite_index: Option<bool>,
}

/// Everything needed to re-verify one run of the construction, with no
/// access to the constructing process: the input group and subset, the
/// separation witness, the chosen kernel quotient with its containment
/// evidence, the induced action, and the projection's images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub group: SemidirectDescriptor,
    pub seed: Vec<Element>,
    pub kernel_differences: Vec<Element>,
    pub witness: FiniteIndexWitness,
    pub core: CharacteristicQuotient,
    pub core_evidence: Option<WitnessBlockEvidence>,
    /// Induced automorphism pair of the kernel quotient, one per quotient
    /// generator.
    pub induced_action: Vec<InducedPair>,
    /// Projection images of `seed`, in matching order.
    pub seed_images: Vec<Element>,
    /// Projection images of the group's generators, in generator order.
    pub generator_images: Vec<Element>,
    pub claims: ClaimStatuses,
    /// `|N|`, when order computation was requested.
    pub kernel_order: Option<BigUint>,
    /// The index `[G1 : Q]`, equal to `|N|` by the coset bijection.
    pub index: Option<BigUint>,
    pub tool_name: String,
    pub tool_version: String,
    pub parameters: ParameterRecord,
}

impl Certificate {
    pub fn all_claims_hold(&self) -> bool {
        self.claims.quotient_map
            && self.claims.seed_injects
            && self.claims.finite_index.unwrap_or(true)
    }
}

fn as_semidirect(desc: &GroupDescriptor) -> Result<&SemidirectDescriptor> {
    match desc {
        GroupDescriptor::Semidirect(sd) => Ok(sd),
        _ => Err(Error::UnsupportedKind {
            op: "quotient pipeline",
            kind: desc.kind_name(),
        }),
    }
}

// ---------------------------------------------------------------------------
// The projection pi
// ---------------------------------------------------------------------------

/// The kernel-reduction map `rho` of a chosen quotient, with the reduction
/// homomorphism materialized once for free kernels.
pub struct Projection<'a> {
    core: &'a CharacteristicQuotient,
    reduction: Option<Homomorphism>,
}

impl<'a> Projection<'a> {
    pub fn new(core: &'a CharacteristicQuotient, max_degree: usize) -> Result<Self> {
        let reduction = match core {
            CharacteristicQuotient::Free { .. } => Some(core.reduction(max_degree)?),
            _ => None,
        };
        Ok(Projection { core, reduction })
    }

    /// `rho` on a kernel element.
    pub fn kernel_image(&self, k: &Element) -> Result<Element> {
        match self.core {
            CharacteristicQuotient::Free { .. } => {
                self.reduction.as_ref().expect("materialized for free kernels").apply(k)
            }
            CharacteristicQuotient::Abelian { modulus, .. } => {
                Ok(Element::Vector(k.vector()?.reduce_mod(modulus)))
            }
            CharacteristicQuotient::Finite { .. } => Ok(k.clone()),
        }
    }

    /// The identity of `N`.
    pub fn kernel_identity(&self) -> Result<Element> {
        match self.core {
            CharacteristicQuotient::Free { .. } => Ok(self
                .reduction
                .as_ref()
                .expect("materialized for free kernels")
                .target
                .identity()),
            CharacteristicQuotient::Abelian { rank, .. } => {
                Ok(Element::Vector(IntVector::zero(*rank)))
            }
            CharacteristicQuotient::Finite { degree, .. } => {
                Ok(Element::Perm(Permutation::identity(*degree)))
            }
        }
    }

    /// Multiplication inside `N`.
    pub fn kernel_mul(&self, a: &Element, b: &Element) -> Result<Element> {
        match self.core {
            CharacteristicQuotient::Free { .. } | CharacteristicQuotient::Finite { .. } => {
                Ok(Element::Perm(a.perm()?.compose(b.perm()?)))
            }
            CharacteristicQuotient::Abelian { modulus, .. } => {
                Ok(Element::Vector(a.vector()?.add(b.vector()?).reduce_mod(modulus)))
            }
        }
    }

    /// `pi(k, q) = (rho(k), q)`.
    pub fn pair_image(&self, el: &Element) -> Result<Element> {
        let (k, q) = el.parts()?;
        Ok(Element::pair(self.kernel_image(k)?, q.clone()))
    }
}

// ---------------------------------------------------------------------------
// Induced action evaluation
// ---------------------------------------------------------------------------

/// Apply the induced automorphism of `q` to a kernel element given in its
/// upstairs form, returning the upstairs image (reduce afterwards to land in
/// `N`). `q` is factored into generator runs; runs apply rightmost first,
/// matching the composition convention used everywhere.
pub fn apply_induced_along(
    quotient: &GroupDescriptor,
    induced: &[InducedPair],
    q: &Element,
    upstairs_k: &Element,
) -> Result<Element> {
    let runs = factor_runs(quotient, q)?;
    let mut acc = upstairs_k.clone();
    for (gen, exp) in runs.iter().rev() {
        let pair = induced.get(*gen).ok_or_else(|| {
            Error::Malformed("induced action is missing a quotient generator".into())
        })?;
        acc = apply_induced_power(pair, exp, &acc)?;
    }
    Ok(acc)
}

fn apply_induced_power(pair: &InducedPair, exp: &BigInt, el: &Element) -> Result<Element> {
    if exp.is_zero() {
        return Ok(el.clone());
    }
    let endo = if exp.is_negative() {
        &pair.backward
    } else {
        &pair.forward
    };
    let n = exp.magnitude();
    if let InducedEndo::MatrixMod(m) = endo {
        let e = n.to_u64().ok_or_else(|| Error::CapExceeded {
            what: "induced action exponent".into(),
            got: exp.to_string(),
            limit: u64::MAX.to_string(),
        })?;
        let p = m.pow(e)?;
        return apply_endo(&EndoSpec::Matrix(p), el);
    }
    let e = n.to_usize().filter(|&e| e <= WORD_LENGTH_CAP).ok_or_else(|| {
        Error::CapExceeded {
            what: "induced action exponent".into(),
            got: exp.to_string(),
            limit: WORD_LENGTH_CAP.to_string(),
        }
    })?;
    let mut acc = el.clone();
    for _ in 0..e {
        acc = endo.apply_upstairs(&acc)?;
    }
    Ok(acc)
}

/// One multiplicativity probe: does `pi(g h) = pi(g) pi(h)`, with the left
/// side computed through the group's own arithmetic and the right side
/// through quotient-group arithmetic driven by the induced action tables?
pub fn projection_multiplicative_on(
    g_desc: &GroupDescriptor,
    proj: &Projection,
    induced: &[InducedPair],
    g: &Element,
    h: &Element,
) -> Result<bool> {
    let sd = as_semidirect(g_desc)?;
    let lhs = proj.pair_image(&mul(g_desc, g, h)?)?;
    let (kg, qg) = g.parts()?;
    let (kh, qh) = h.parts()?;
    let twisted = apply_induced_along(&sd.quotient, induced, qg, kh)?;
    let rhs_n = proj.kernel_mul(&proj.kernel_image(kg)?, &proj.kernel_image(&twisted)?)?;
    let rhs_q = mul(&sd.quotient, qg, qh)?;
    Ok(lhs == Element::pair(rhs_n, rhs_q))
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// The deterministic pseudorandom pair sample used by the multiplicativity
/// claim: each element is an independent product of up to `word_length`
/// kernel generators and up to `word_length` quotient generators. The same
/// seed always reproduces the same pairs.
pub fn sample_pairs(
    g_desc: &GroupDescriptor,
    seed: u64,
    count: usize,
    word_length: usize,
) -> Result<Vec<(Element, Element)>> {
    let sd = as_semidirect(g_desc)?;
    let kernel_gens = sd.kernel.generators();
    let quotient_gens = sd.quotient.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = random_pair(&mut rng, sd, &kernel_gens, &quotient_gens, word_length)?;
        let b = random_pair(&mut rng, sd, &kernel_gens, &quotient_gens, word_length)?;
        out.push((a, b));
    }
    Ok(out)
}

fn random_pair(
    rng: &mut ChaCha8Rng,
    sd: &SemidirectDescriptor,
    kernel_gens: &[Element],
    quotient_gens: &[Element],
    word_length: usize,
) -> Result<Element> {
    let k = random_product(rng, &sd.kernel, kernel_gens, word_length)?;
    let q = random_product(rng, &sd.quotient, quotient_gens, word_length)?;
    Ok(Element::pair(k, q))
}

fn random_product(
    rng: &mut ChaCha8Rng,
    desc: &GroupDescriptor,
    gens: &[Element],
    word_length: usize,
) -> Result<Element> {
    let mut el = desc.identity();
    if gens.is_empty() {
        return Ok(el);
    }
    let len = rng.gen_range(0..=word_length);
    for _ in 0..len {
        let i = rng.gen_range(0..gens.len());
        let factor = if rng.gen_bool(0.5) {
            gens[i].clone()
        } else {
            inv(desc, &gens[i])?
        };
        el = mul(desc, &el, &factor)?;
    }
    Ok(el)
}

/// All ordered pairs over the union of the seed subset and the group's
/// generators — the deterministic half of the multiplicativity probe.
fn seed_generator_pairs(g_desc: &GroupDescriptor, seed: &[Element]) -> Vec<(Element, Element)> {
    let mut pool: Vec<Element> = Vec::new();
    for el in seed.iter().cloned().chain(g_desc.generators()) {
        if !pool.contains(&el) {
            pool.push(el);
        }
    }
    let mut out = Vec::with_capacity(pool.len() * pool.len());
    for a in &pool {
        for b in &pool {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Run the whole construction and package the result.
pub fn construct_certificate(
    g: &GroupDescriptor,
    s_input: &[Element],
    options: &PipelineOptions,
) -> Result<Certificate> {
    let sd = as_semidirect(g)?;
    if matches!(sd.kernel, GroupDescriptor::Semidirect(_)) {
        return Err(Error::UnsupportedKind {
            op: "quotient pipeline",
            kind: "semidirect kernel",
        });
    }
    let seed_set = SeedSet::new(g, s_input)?;
    let witness = separate(&sd.kernel, &seed_set.f_k)?;
    let (core, core_evidence) = CharacteristicQuotient::from_witness(&witness, options.max_homs)?;
    // Load-bearing soundness check: the finite quotient of the kernel keeps
    // every seed difference alive. When the homomorphism cap lowered the
    // symmetric degree below the witness degree this can genuinely fail,
    // and the only fix is a larger budget.
    for w in &seed_set.f_k {
        if core.kills(w)? {
            return Err(Error::CapExceeded {
                what: "separating power of the capped kernel quotient".into(),
                got: format!("a seed difference dies in the quotient ({:?})", w),
                limit: format!("max_homs = {}", options.max_homs),
            });
        }
    }
    let induced: Vec<InducedPair> = sd
        .action
        .pairs
        .iter()
        .map(|p| induce_pair(&core, p, options.max_degree))
        .collect::<Result<_>>()?;
    let proj = Projection::new(&core, options.max_degree)?;
    let seed_images: Vec<Element> = seed_set
        .s
        .iter()
        .map(|el| proj.pair_image(el))
        .collect::<Result<_>>()?;
    let generator_images: Vec<Element> = g
        .generators()
        .iter()
        .map(|el| proj.pair_image(el))
        .collect::<Result<_>>()?;

    // Claim 2: pairwise distinct images.
    let seed_injects = pairwise_distinct(&seed_images);

    // Claim 1: identity to identity, generators to generators, and
    // multiplicativity over the deterministic pairs plus the seeded sample.
    let mut quotient_map = proj.pair_image(&g.identity())?
        == Element::pair(proj.kernel_identity()?, sd.quotient.identity());
    let mut probes = seed_generator_pairs(g, &seed_set.s);
    probes.extend(sample_pairs(
        g,
        options.sample_seed,
        options.sample_count,
        options.sample_word_length,
    )?);
    for (a, b) in &probes {
        if !projection_multiplicative_on(g, &proj, &induced, a, b)? {
            quotient_map = false;
            break;
        }
    }

    // Claim 3: the index, by actually counting the kernel quotient.
    let (kernel_order, index, finite_index) = if options.compute_order {
        let n = core.order(options.max_homs, options.max_degree)?;
        (Some(n.clone()), Some(n), Some(true))
    } else {
        (None, None, None)
    };

    Ok(Certificate {
        group: sd.clone(),
        seed: seed_set.s,
        kernel_differences: seed_set.f_k,
        witness,
        core,
        core_evidence,
        induced_action: induced,
        seed_images,
        generator_images,
        claims: ClaimStatuses {
            quotient_map,
            seed_injects,
            finite_index,
        },
        kernel_order,
        index,
        tool_name: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: ParameterRecord {
            max_homs: options.max_homs,
            max_degree: options.max_degree,
            sample_seed: options.sample_seed,
            sample_count: options.sample_count,
            sample_word_length: options.sample_word_length,
        },
    })
}

fn pairwise_distinct(items: &[Element]) -> bool {
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            if a == b {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// One named verification check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of an independent verification pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name,
            passed,
            detail: detail.into(),
        });
    }
}

/// Re-establish every claim of a certificate from its stored data alone.
///
/// Failures of substance (a claim does not hold, stored data disagrees with
/// recomputation) come back as failed checks in the report. Structural
/// impossibilities — data so malformed the recomputation cannot even run —
/// surface as errors instead, so callers can distinguish a refuted
/// certificate from an unreadable one.
pub fn verify_certificate(cert: &Certificate) -> Result<VerificationReport> {
    let mut report = VerificationReport { checks: Vec::new() };

    // Rebuild the ambient group. This re-runs all action validation
    // (inverse pairs, relators, finite checks); failure is malformedness.
    let g_desc = GroupDescriptor::semidirect(
        cert.group.kernel.clone(),
        cert.group.quotient.clone(),
        cert.group.action.clone(),
    )
    .map_err(|e| Error::Malformed(format!("group descriptor does not validate: {}", e)))?;
    let sd = as_semidirect(&g_desc)?;
    report.push(
        "descriptor",
        sd.verification == cert.group.verification,
        format!(
            "action verification level re-derived as {}",
            sd.verification.as_str()
        ),
    );

    // Seed set recomputation: stored seed must already be deduplicated and
    // the stored kernel differences must be exactly the recomputed ones.
    let seed_set = SeedSet::new(&g_desc, &cert.seed)?;
    report.push(
        "seed-set",
        seed_set.s == cert.seed && seed_set.f_k == cert.kernel_differences,
        format!(
            "{} seed elements, {} kernel differences",
            seed_set.s.len(),
            seed_set.f_k.len()
        ),
    );

    // (a) witness soundness: the stored witness separates every stored
    // kernel difference.
    let mut witness_ok = true;
    for w in &cert.kernel_differences {
        if !cert.witness.separates(w)? {
            witness_ok = false;
        }
    }
    report.push(
        "witness-separates",
        witness_ok,
        format!("checked {} elements", cert.kernel_differences.len()),
    );

    // (b) containment evidence tying the chosen quotient to the witness.
    check_containment(&mut report, cert)?;

    // The mechanism for claim 2: the kernel quotient keeps every difference
    // alive.
    let mut alive = true;
    for w in &cert.kernel_differences {
        if cert.core.kills(w)? {
            alive = false;
        }
    }
    report.push(
        "quotient-keeps-differences",
        alive,
        format!("checked {} elements", cert.kernel_differences.len()),
    );

    // (c) induced action: stored tables must match recomputation from the
    // descriptor's action, and each forward/backward pair must compose to
    // the identity.
    check_induced_action(&mut report, cert, sd)?;

    // Projection images: recompute all stored images.
    let proj = Projection::new(&cert.core, cert.parameters.max_degree)?;
    let mut images_ok = cert.seed_images.len() == cert.seed.len();
    if images_ok {
        for (el, img) in cert.seed.iter().zip(&cert.seed_images) {
            if &proj.pair_image(el)? != img {
                images_ok = false;
            }
        }
    }
    let gens = g_desc.generators();
    images_ok &= cert.generator_images.len() == gens.len();
    if cert.generator_images.len() == gens.len() {
        for (el, img) in gens.iter().zip(&cert.generator_images) {
            if &proj.pair_image(el)? != img {
                images_ok = false;
            }
        }
    }
    images_ok &= proj.pair_image(&g_desc.identity())?
        == Element::pair(proj.kernel_identity()?, sd.quotient.identity());
    report.push(
        "projection-images",
        images_ok,
        format!(
            "{} seed images, {} generator images, identity image",
            cert.seed_images.len(),
            cert.generator_images.len()
        ),
    );

    // (d) multiplicativity on the recorded sample plus all seed/generator
    // pairs.
    let mut probes = seed_generator_pairs(&g_desc, &cert.seed);
    let deterministic = probes.len();
    probes.extend(sample_pairs(
        &g_desc,
        cert.parameters.sample_seed,
        cert.parameters.sample_count,
        cert.parameters.sample_word_length,
    )?);
    let mut multiplicative = true;
    for (a, b) in &probes {
        if !projection_multiplicative_on(&g_desc, &proj, &cert.induced_action, a, b)? {
            multiplicative = false;
            break;
        }
    }
    report.push(
        "projection-multiplicative",
        multiplicative,
        format!(
            "{} deterministic pairs + {} sampled pairs (seed {})",
            deterministic,
            probes.len() - deterministic,
            cert.parameters.sample_seed
        ),
    );

    // (e) injectivity on the seed.
    report.push(
        "seed-injective",
        pairwise_distinct(&cert.seed_images),
        format!("{} stored images pairwise distinct", cert.seed_images.len()),
    );

    // (f) order and index, when claimed.
    let order_check = match (&cert.kernel_order, &cert.index) {
        (None, None) => CheckResult {
            name: "kernel-order",
            passed: true,
            detail: "order not claimed".into(),
        },
        (Some(n), Some(idx)) => {
            let recomputed = cert
                .core
                .order(cert.parameters.max_homs, cert.parameters.max_degree)?;
            CheckResult {
                name: "kernel-order",
                passed: &recomputed == n && idx == n,
                detail: format!("recomputed order {}", recomputed),
            }
        }
        _ => CheckResult {
            name: "kernel-order",
            passed: false,
            detail: "order and index must be claimed together".into(),
        },
    };
    report.checks.push(order_check);

    // Claims must state exactly what the checks established.
    let find = |name: &str| {
        report
            .checks
            .iter()
            .filter(|c| c.name == name)
            .all(|c| c.passed)
    };
    let quotient_map_derived =
        find("induced-action") && find("projection-images") && find("projection-multiplicative");
    let seed_injects_derived = find("quotient-keeps-differences") && find("seed-injective");
    let finite_index_derived = match cert.claims.finite_index {
        None => cert.kernel_order.is_none() && cert.index.is_none(),
        Some(claimed) => cert.kernel_order.is_some() && claimed == find("kernel-order"),
    };
    let claims_ok = cert.claims.quotient_map == quotient_map_derived
        && cert.claims.seed_injects == seed_injects_derived
        && finite_index_derived;
    report.push(
        "claims-consistent",
        claims_ok,
        "stated claims match verified outcomes",
    );

    Ok(report)
}

fn check_containment(report: &mut VerificationReport, cert: &Certificate) -> Result<()> {
    match (&cert.core, &cert.witness) {
        (
            CharacteristicQuotient::Free { rank, symmetric_degree },
            FiniteIndexWitness::PermImages { rank: w_rank, degree, images },
        ) => {
            if rank != w_rank {
                report.push("containment", false, "rank mismatch with witness");
                return Ok(());
            }
            match &cert.core_evidence {
                Some(ev) => {
                    // The witness homomorphism must reappear verbatim as the
                    // named block of the intersected family, so the kernel
                    // of the whole family sits inside the witness kernel.
                    let decoded = hom_at_block(*rank, *symmetric_degree, &ev.block_index)?;
                    let matches = symmetric_degree == degree && &decoded == images;
                    report.push(
                        "containment",
                        matches,
                        format!("witness found at block {}", ev.block_index),
                    );
                }
                None => {
                    // The homomorphism cap lowered the degree; containment
                    // in the witness kernel is not claimed, and seed
                    // survival rests on the direct check instead.
                    report.push(
                        "containment",
                        symmetric_degree <= degree,
                        format!(
                            "degree lowered to {} (witness degree {}); relying on the direct survival check",
                            symmetric_degree, degree
                        ),
                    );
                }
            }
        }
        (
            CharacteristicQuotient::Abelian { rank, modulus },
            FiniteIndexWitness::Modulus { rank: w_rank, modulus: w_modulus },
        ) => {
            let mut ok = rank == w_rank && modulus == w_modulus;
            // Scaled basis vectors die in the quotient: m e_i is in the
            // kernel of reduction for every coordinate.
            for i in 0..*rank {
                let mut coords = vec![BigInt::zero(); *rank];
                coords[i] = modulus.clone();
                if !cert.core.kills(&Element::Vector(IntVector::new(coords)))? {
                    ok = false;
                }
            }
            report.push(
                "containment",
                ok,
                format!("modulus {} matches witness and kills scaled basis", modulus),
            );
        }
        (
            CharacteristicQuotient::Finite { degree, generators },
            FiniteIndexWitness::Identity { degree: w_degree, generators: w_gens },
        ) => {
            report.push(
                "containment",
                degree == w_degree && generators == w_gens,
                "finite kernel quotient coincides with the witness group",
            );
        }
        _ => {
            report.push("containment", false, "quotient kind does not match witness kind");
        }
    }
    Ok(())
}

fn check_induced_action(
    report: &mut VerificationReport,
    cert: &Certificate,
    sd: &SemidirectDescriptor,
) -> Result<()> {
    if cert.induced_action.len() != sd.action.pairs.len() {
        report.push(
            "induced-action",
            false,
            format!(
                "{} stored pairs for {} quotient generators",
                cert.induced_action.len(),
                sd.action.pairs.len()
            ),
        );
        return Ok(());
    }
    let mut ok = true;
    for (stored, pair) in cert.induced_action.iter().zip(&sd.action.pairs) {
        let recomputed = induce_pair(&cert.core, pair, cert.parameters.max_degree)?;
        if &recomputed != stored {
            ok = false;
        }
        if !induced_pair_inverts(&cert.core, stored, cert.parameters.max_degree)? {
            ok = false;
        }
    }
    report.push(
        "induced-action",
        ok,
        format!(
            "{} pairs match recomputation and invert",
            cert.induced_action.len()
        ),
    );
    Ok(())
}

/// Forward and backward induced maps must compose to the identity on the
/// kernel quotient's generators, in both orders.
fn induced_pair_inverts(
    core: &CharacteristicQuotient,
    pair: &InducedPair,
    max_degree: usize,
) -> Result<bool> {
    match core {
        CharacteristicQuotient::Abelian { rank, modulus } => {
            let (f, b) = match (&pair.forward, &pair.backward) {
                (InducedEndo::MatrixMod(f), InducedEndo::MatrixMod(b)) => (f, b),
                _ => return Ok(false),
            };
            // Compare against the identity matrix *reduced*: at modulus 1
            // every entry collapses to zero.
            let ident = IntMatrix::identity(*rank).reduce_mod(modulus);
            Ok(f.mul(b)?.reduce_mod(modulus) == ident
                && b.mul(f)?.reduce_mod(modulus) == ident
                && f.rows() == *rank)
        }
        CharacteristicQuotient::Free { rank, .. } => {
            let (f, b) = match (&pair.forward, &pair.backward) {
                (InducedEndo::WordImages(f), InducedEndo::WordImages(b)) => (f, b),
                _ => return Ok(false),
            };
            if f.len() != *rank || b.len() != *rank {
                return Ok(false);
            }
            // Word-level inversion is exact, and each stored permutation
            // must be the reduction of its stored word.
            let proj = Projection::new(core, max_degree)?;
            for (dir_a, dir_b) in [(f, b), (b, f)] {
                let spec_b = EndoSpec::Words(dir_b.iter().map(|(w, _)| w.clone()).collect());
                for (i, (w, p)) in dir_a.iter().enumerate() {
                    let round = apply_endo(&spec_b, &Element::Word(w.clone()))?;
                    if round.word()?.letters() != [(i as i32) + 1] {
                        return Ok(false);
                    }
                    if proj.kernel_image(&Element::Word(w.clone()))?.perm()? != p {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        CharacteristicQuotient::Finite { .. } => {
            let (f, b) = match (&pair.forward, &pair.backward) {
                (InducedEndo::Table(f), InducedEndo::Table(b)) => (f, b),
                _ => return Ok(false),
            };
            for (dir_a, dir_b) in [(f, b), (b, f)] {
                for (src, mid) in dir_a.iter() {
                    let back = dir_b
                        .iter()
                        .find(|(s, _)| s == mid)
                        .map(|(_, img)| img.clone());
                    if back.as_ref() != Some(src) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{ActionPair, AutomorphismAction};

    fn cat_map_group() -> GroupDescriptor {
        let forward = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let backward = IntMatrix::from_i64_rows(&[&[1, -1], &[-1, 2]]);
        GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(2),
            GroupDescriptor::free_abelian(1),
            AutomorphismAction {
                pairs: vec![ActionPair {
                    forward: EndoSpec::Matrix(forward),
                    backward: EndoSpec::Matrix(backward),
                }],
                relators: Vec::new(),
            },
        )
        .unwrap()
    }

    fn cat_map_seed() -> Vec<Element> {
        vec![
            Element::pair(
                Element::Vector(IntVector::from_i64s(&[1, 0])),
                Element::Vector(IntVector::from_i64s(&[0])),
            ),
            Element::pair(
                Element::Vector(IntVector::from_i64s(&[0, 0])),
                Element::Vector(IntVector::from_i64s(&[1])),
            ),
        ]
    }

    #[test]
    fn cat_map_certificate_end_to_end() {
        let g = cat_map_group();
        let options = PipelineOptions {
            compute_order: true,
            ..PipelineOptions::default()
        };
        let cert = construct_certificate(&g, &cat_map_seed(), &options).unwrap();
        // The kernel differences are exactly the two unit steps.
        assert_eq!(cert.kernel_differences.len(), 2);
        assert!(matches!(
            &cert.witness,
            FiniteIndexWitness::Modulus { rank: 2, modulus } if modulus == &BigInt::from(2)
        ));
        assert!(matches!(
            &cert.core,
            CharacteristicQuotient::Abelian { rank: 2, modulus } if modulus == &BigInt::from(2)
        ));
        // The induced forward matrix is the action matrix mod 2.
        match &cert.induced_action[0].forward {
            InducedEndo::MatrixMod(m) => {
                assert_eq!(m, &IntMatrix::from_i64_rows(&[&[0, 1], &[1, 1]]));
            }
            other => panic!("unexpected induced form {:?}", other),
        }
        assert_eq!(cert.kernel_order, Some(BigUint::from(4u32)));
        assert_eq!(cert.index, Some(BigUint::from(4u32)));
        assert!(cert.all_claims_hold());
        let report = verify_certificate(&cert).unwrap();
        assert!(report.passed(), "failed checks: {:?}", report.checks);
        // Determinism: a second run is equal in every field.
        let again = construct_certificate(&g, &cat_map_seed(), &options).unwrap();
        assert_eq!(cert, again);
    }

    #[test]
    fn trivial_seed_gives_trivial_quotient() {
        let g = cat_map_group();
        let cert = construct_certificate(
            &g,
            &[g.identity()],
            &PipelineOptions {
                compute_order: true,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        assert!(cert.kernel_differences.is_empty());
        assert!(matches!(
            &cert.core,
            CharacteristicQuotient::Abelian { modulus, .. } if modulus == &BigInt::from(1)
        ));
        assert_eq!(cert.kernel_order, Some(BigUint::from(1u32)));
        assert!(cert.all_claims_hold());
        assert!(verify_certificate(&cert).unwrap().passed());
    }

    #[test]
    fn direct_product_of_integer_lines() {
        let g = GroupDescriptor::semidirect(
            GroupDescriptor::free_abelian(1),
            GroupDescriptor::free_abelian(1),
            AutomorphismAction::trivial(&GroupDescriptor::free_abelian(1), 1).unwrap(),
        )
        .unwrap();
        let s = crate::group::ball(&g, 1).unwrap();
        assert_eq!(s.len(), 5);
        let cert = construct_certificate(
            &g,
            &s,
            &PipelineOptions {
                compute_order: true,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        // Kernel differences {-2,-1,1,2} force modulus 3.
        assert_eq!(cert.kernel_differences.len(), 4);
        assert!(matches!(
            &cert.core,
            CharacteristicQuotient::Abelian { rank: 1, modulus } if modulus == &BigInt::from(3)
        ));
        // Trivial action passes down to an identity matrix.
        match &cert.induced_action[0].forward {
            InducedEndo::MatrixMod(m) => assert!(m.is_identity()),
            other => panic!("unexpected induced form {:?}", other),
        }
        assert_eq!(cert.kernel_order, Some(BigUint::from(3u32)));
        assert!(cert.all_claims_hold());
        assert!(verify_certificate(&cert).unwrap().passed());
    }

    #[test]
    fn free_kernel_with_trivial_quotient() {
        let g = GroupDescriptor::semidirect(
            GroupDescriptor::free(2),
            GroupDescriptor::finite_perm(1, Vec::new()).unwrap(),
            AutomorphismAction {
                pairs: Vec::new(),
                relators: Vec::new(),
            },
        )
        .unwrap();
        let e_q = Element::Perm(Permutation::identity(1));
        let s: Vec<Element> = [
            crate::group::FreeWord::identity(),
            crate::group::FreeWord::generator(0),
            crate::group::FreeWord::generator(1),
        ]
        .into_iter()
        .map(|w| Element::pair(Element::Word(w), e_q.clone()))
        .collect();
        let cert = construct_certificate(&g, &s, &PipelineOptions::default()).unwrap();
        // Differences: x, y, x^-1, y^-1, x^-1 y, y^-1 x.
        assert_eq!(cert.kernel_differences.len(), 6);
        match (&cert.witness, &cert.core) {
            (
                FiniteIndexWitness::PermImages { degree, .. },
                CharacteristicQuotient::Free { symmetric_degree, .. },
            ) => {
                assert_eq!(*degree, 7);
                // (5!)^2 = 14400 fits the default budget, (6!)^2 does not.
                assert_eq!(*symmetric_degree, 5);
            }
            other => panic!("unexpected shapes {:?}", other),
        }
        assert!(cert.core_evidence.is_none());
        assert!(cert.claims.quotient_map);
        assert!(cert.claims.seed_injects);
        assert!(cert.claims.finite_index.is_none());
        let report = verify_certificate(&cert).unwrap();
        assert!(report.passed(), "failed checks: {:?}", report.checks);
    }

    #[test]
    fn free_kernel_uncapped_has_block_evidence() {
        // Small enough to keep the full intersection: the differences
        // {x, x^-1} give a 3-vertex separation graph, so the witness degree
        // is 3 and all (3!)^2 = 36 homomorphisms into Sym(3) fit the budget.
        let g = GroupDescriptor::semidirect(
            GroupDescriptor::free(2),
            GroupDescriptor::finite_perm(1, Vec::new()).unwrap(),
            AutomorphismAction {
                pairs: Vec::new(),
                relators: Vec::new(),
            },
        )
        .unwrap();
        let e_q = Element::Perm(Permutation::identity(1));
        let s: Vec<Element> = [
            crate::group::FreeWord::identity(),
            crate::group::FreeWord::generator(0),
        ]
        .into_iter()
        .map(|w| Element::pair(Element::Word(w), e_q.clone()))
        .collect();
        let cert = construct_certificate(
            &g,
            &s,
            &PipelineOptions {
                compute_order: true,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        assert!(matches!(
            &cert.witness,
            FiniteIndexWitness::PermImages { degree: 3, .. }
        ));
        assert!(cert.core_evidence.is_some());
        // The quotient is the rank-2 free group of the variety generated by
        // Sym(3), of order 4 * 3^5 = 972: composing with signs maps onto
        // (Z/2)^2 (order 4), and the kernel of that map — free of rank
        // 1 + 4(2-1) = 5 — lands in a power of the 3-cycle subgroup, hence
        // in an elementary abelian 3-group generated by 5 elements.
        assert_eq!(cert.kernel_order, Some(BigUint::from(972u32)));
        assert!(cert.all_claims_hold());
        assert!(verify_certificate(&cert).unwrap().passed());
    }

    #[test]
    fn tampering_is_detected() {
        let g = cat_map_group();
        let options = PipelineOptions {
            compute_order: true,
            ..PipelineOptions::default()
        };
        let cert = construct_certificate(&g, &cat_map_seed(), &options).unwrap();

        // A wrong seed image breaks the image recomputation.
        let mut tampered = cert.clone();
        tampered.seed_images[0] = Element::pair(
            Element::Vector(IntVector::from_i64s(&[1, 1])),
            Element::Vector(IntVector::from_i64s(&[0])),
        );
        let report = verify_certificate(&tampered).unwrap();
        assert!(!report.passed());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "projection-images" && !c.passed));

        // A flipped claim bit breaks claim consistency.
        let mut tampered = cert.clone();
        tampered.claims.seed_injects = false;
        let report = verify_certificate(&tampered).unwrap();
        assert!(!report.passed());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "claims-consistent" && !c.passed));

        // A wrong index breaks the order check.
        let mut tampered = cert.clone();
        tampered.index = Some(BigUint::from(5u32));
        let report = verify_certificate(&tampered).unwrap();
        assert!(report.checks.iter().any(|c| c.name == "kernel-order" && !c.passed));

        // A dropped kernel difference breaks the seed-set recomputation.
        let mut tampered = cert.clone();
        tampered.kernel_differences.pop();
        let report = verify_certificate(&tampered).unwrap();
        assert!(report.checks.iter().any(|c| c.name == "seed-set" && !c.passed));

        // A wrong induced matrix breaks both the recomputation match and,
        // downstream, multiplicativity.
        let mut tampered = cert.clone();
        tampered.induced_action[0].forward =
            InducedEndo::MatrixMod(IntMatrix::identity(2));
        let report = verify_certificate(&tampered).unwrap();
        assert!(report.checks.iter().any(|c| c.name == "induced-action" && !c.passed));
    }

    #[test]
    fn sample_is_deterministic_and_seed_sensitive() {
        let g = cat_map_group();
        let a = sample_pairs(&g, 7, 20, 4).unwrap();
        let b = sample_pairs(&g, 7, 20, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_pairs(&g, 8, 20, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn seed_set_shapes() {
        let g = cat_map_group();
        let mut s = cat_map_seed();
        s.push(s[0].clone()); // duplicate is dropped
        s.push(g.identity());
        let set = SeedSet::new(&g, &s).unwrap();
        assert_eq!(set.s.len(), 3);
        // F contains the identity (from equal pairs); F_K never does.
        assert!(set.f.iter().any(|el| g.is_identity(el).unwrap()));
        for w in &set.f_k {
            assert!(!g_kernel_is_identity(&g, w));
        }
    }

    fn g_kernel_is_identity(g: &GroupDescriptor, el: &Element) -> bool {
        match g {
            GroupDescriptor::Semidirect(sd) => sd.kernel.is_identity(el).unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn non_semidirect_input_rejected() {
        let err = construct_certificate(
            &GroupDescriptor::free(2),
            &[],
            &PipelineOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedKind { .. }));
    }
}

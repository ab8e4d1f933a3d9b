//! Acceptance sweep: one test per shipped acceptance criterion, so the
//! harness prints exactly one pass/fail line for each.
//!
//! Every oracle here is computed with test-local arithmetic — permutation
//! composition, word evaluation, matrix algebra, group closures, model
//! semidirect products — written independently of the library code it
//! checks. Library calls appear only on the claim side (the artifact being
//! judged) or for shared input data such as a group's multiplication table.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

use finquot::charcore::{CharacteristicQuotient, DEFAULT_MAX_DEGREE, DEFAULT_MAX_HOMS};
use finquot::group::{
    ball, ActionPair, AutomorphismAction, Element, EndoSpec, FreeWord, GroupDescriptor, IntVector,
    Permutation,
};
use finquot::matrix::{smith_normal_form, IntMatrix};
use finquot::pipeline::{construct_certificate, verify_certificate, PipelineOptions};
use finquot::separation::{separate, FiniteIndexWitness};
use finquot::shifts::{
    ca_apply, finext_embed, recode_report, rule_sweep, CellularAutomaton, Configuration,
    FiniteGroupTable, RecodingData, DEFAULT_MAX_CONFIGS,
};

// ---------------------------------------------------------------------------
// Test-local permutation and word arithmetic (oracle side)
// ---------------------------------------------------------------------------

/// Composition with the right factor applied first: out(x) = a(b(x)).
fn pcompose(a: &[usize], b: &[usize]) -> Vec<usize> {
    (0..a.len()).map(|x| a[b[x]]).collect()
}

fn pinv(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; a.len()];
    for (i, &v) in a.iter().enumerate() {
        out[v] = i;
    }
    out
}

fn is_id(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &v)| i == v)
}

fn all_perms(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for smaller in all_perms(d - 1) {
        for slot in 0..d {
            let mut p = smaller.clone();
            p.insert(slot, d - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Evaluate a reduced word (letters ±1-based) under generator images, with
/// the rightmost letter acting first.
fn eval_word(letters: &[i32], images: &[Vec<usize>], degree: usize) -> Vec<usize> {
    let mut acc: Vec<usize> = (0..degree).collect();
    for &l in letters {
        let idx = l.unsigned_abs() as usize - 1;
        let img = if l > 0 {
            images[idx].clone()
        } else {
            pinv(&images[idx])
        };
        acc = pcompose(&acc, &img);
    }
    acc
}

/// Size of the subgroup of Sym(d)^width generated by tuples of perm indices,
/// closed by breadth-first products against a test-local Sym(d) table.
fn tuple_closure_size(d: usize, generators: &[Vec<usize>]) -> usize {
    let perms = all_perms(d);
    let n = perms.len();
    let index_of = |p: &[usize]| perms.iter().position(|q| q == p).expect("perm in table");
    let mut mul = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            mul[a][b] = index_of(&pcompose(&perms[a], &perms[b]));
        }
    }
    let width = generators[0].len();
    let id_idx = index_of(&(0..d).collect::<Vec<_>>());
    let identity = vec![id_idx; width];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(t) = frontier.pop() {
        for g in generators {
            let next: Vec<usize> = t.iter().zip(g).map(|(&a, &b)| mul[a][b]).collect();
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen.len()
}

// ---------------------------------------------------------------------------
// Criterion 1: the hyperbolic-matrix pipeline against a brute-force model
// ---------------------------------------------------------------------------

type M2 = [[i64; 2]; 2];
const A_FWD: M2 = [[2, 1], [1, 1]];
const A_BWD: M2 = [[1, -1], [-1, 2]];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[0i64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn m2_pow(q: i64) -> M2 {
    let base = if q >= 0 { A_FWD } else { A_BWD };
    let mut out = [[1, 0], [0, 1]];
    for _ in 0..q.unsigned_abs() {
        out = m2_mul(&out, &base);
    }
    out
}

fn m2_apply(m: &M2, v: [i64; 2]) -> [i64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Exact model product in Z^2 ⋊ Z: (k1, q1)(k2, q2) = (k1 + A^q1 k2, q1+q2).
fn model_mul(a: ([i64; 2], i64), b: ([i64; 2], i64)) -> ([i64; 2], i64) {
    let twisted = m2_apply(&m2_pow(a.1), b.0);
    (([a.0[0] + twisted[0], a.0[1] + twisted[1]]), a.1 + b.1)
}

fn model_reduce(el: ([i64; 2], i64)) -> ([i64; 2], i64) {
    ([el.0[0].rem_euclid(2), el.0[1].rem_euclid(2)], el.1)
}

/// Model product downstairs, in (Z/2)^2 ⋊ Z.
fn qmodel_mul(a: ([i64; 2], i64), b: ([i64; 2], i64)) -> ([i64; 2], i64) {
    model_reduce(model_mul(a, b))
}

fn catmap_group() -> finquot::Result<GroupDescriptor> {
    GroupDescriptor::semidirect(
        GroupDescriptor::free_abelian(2),
        GroupDescriptor::free_abelian(1),
        AutomorphismAction {
            pairs: vec![ActionPair {
                forward: EndoSpec::Matrix(IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])),
                backward: EndoSpec::Matrix(IntMatrix::from_i64_rows(&[&[1, -1], &[-1, 2]])),
            }],
            relators: vec![],
        },
    )
}

fn vec_pair(k: [i64; 2], q: i64) -> Element {
    Element::pair(
        Element::Vector(IntVector::from_i64s(&k)),
        Element::Vector(IntVector::from_i64s(&[q])),
    )
}

#[test]
fn criterion_1_cat_map_certificate() {
    let g = catmap_group().expect("descriptor validates");
    let seed = vec![vec_pair([1, 0], 0), vec_pair([0, 0], 1)];

    let t0 = Instant::now();
    let cert = construct_certificate(
        &g,
        &seed,
        &PipelineOptions {
            compute_order: true,
            ..PipelineOptions::default()
        },
    )
    .expect("construction succeeds");
    let report = verify_certificate(&cert).expect("verification runs");
    let elapsed = t0.elapsed();

    match &cert.witness {
        FiniteIndexWitness::Modulus { modulus, .. } => assert_eq!(*modulus, BigInt::from(2)),
        other => panic!("expected a modulus witness, got {:?}", other),
    }
    assert_eq!(cert.kernel_order.as_ref().map(|o| o.to_string()).as_deref(), Some("4"));
    assert_eq!(cert.index.as_ref().map(|o| o.to_string()).as_deref(), Some("4"));
    assert!(cert.claims.quotient_map);
    assert!(cert.claims.seed_injects);
    assert_eq!(cert.claims.finite_index, Some(true));
    assert!(report.passed(), "all verification checks pass");
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "construct+verify took {:?}",
        elapsed
    );

    // Oracle: brute-force model of (Z/2)^2 ⋊ Z, arithmetic all local.
    // (a) Reduction commutes with the product over a generating sample.
    let base: Vec<([i64; 2], i64)> = vec![
        ([1, 0], 0),
        ([0, 0], 1),
        ([0, 1], 0),
        ([0, 0], -1),
        ([1, 1], 2),
        ([-3, 2], -2),
    ];
    for a in &base {
        for b in &base {
            let lhs = model_reduce(model_mul(*a, *b));
            let rhs = qmodel_mul(model_reduce(*a), model_reduce(*b));
            assert_eq!(lhs, rhs, "reduction is a homomorphism at {:?},{:?}", a, b);
        }
    }
    // (b) The kernel closure downstairs has exactly 4 elements: close the
    // generator images under product and conjugation by the stable letter.
    let t = ([0i64, 0], 1i64);
    let t_inv = ([0i64, 0], -1i64);
    let mut kernel: BTreeSet<[i64; 2]> = BTreeSet::new();
    let mut frontier = vec![([1i64, 0], 0i64), ([0, 1], 0)];
    for k in &frontier {
        kernel.insert(k.0);
    }
    while let Some(k) = frontier.pop() {
        let nexts = [
            qmodel_mul(k, ([1, 0], 0)),
            qmodel_mul(k, ([0, 1], 0)),
            qmodel_mul(qmodel_mul(t, k), t_inv),
            qmodel_mul(qmodel_mul(t_inv, k), t),
        ];
        for n in nexts {
            assert_eq!(n.1, k.1, "kernel stays at quotient height 0 under conjugation");
            if kernel.insert(n.0) {
                frontier.push(n);
            }
        }
    }
    assert_eq!(kernel.len(), 4, "|N| = 4 by exhaustive closure");
    // (c) Every coset of the stable-letter subgroup is labeled by its
    // kernel part, so the index equals |N| = 4.
    for q in -3i64..=3 {
        for k in &kernel {
            assert_eq!(qmodel_mul((*k, 5), ([0, 0], q)).0, *k);
        }
    }
    // (d) The two seed images stay distinct downstairs and match the
    // certificate's stored images.
    let m1 = model_reduce(([1, 0], 0));
    let m2 = model_reduce(([0, 0], 1));
    assert_ne!(m1, m2);
    for (stored, model) in cert.seed_images.iter().zip([m1, m2]) {
        let (k, q) = stored.parts().expect("images are pairs");
        let kc = k.vector().expect("kernel part is a vector").coords();
        let qc = q.vector().expect("quotient part is a vector").coords();
        assert_eq!(kc, &[BigInt::from(model.0[0]), BigInt::from(model.0[1])]);
        assert_eq!(qc, &[BigInt::from(model.1)]);
    }

    println!("criterion 1 (hyperbolic-matrix pipeline, brute-forced model): pass");
}

// ---------------------------------------------------------------------------
// Criterion 2: free-kernel pipeline with the quotient order at degree 3
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_free_kernel_certificate() {
    let t0 = Instant::now();
    let g = GroupDescriptor::semidirect(
        GroupDescriptor::free(2),
        GroupDescriptor::free(1),
        AutomorphismAction {
            pairs: vec![ActionPair {
                forward: EndoSpec::Words(vec![
                    FreeWord::new([1, 2]).unwrap(),
                    FreeWord::new([2]).unwrap(),
                ]),
                backward: EndoSpec::Words(vec![
                    FreeWord::new([1, -2]).unwrap(),
                    FreeWord::new([2]).unwrap(),
                ]),
            }],
            relators: vec![],
        },
    )
    .expect("descriptor validates");

    // The subset: the kernel's radius-1 ball at quotient height zero.
    let qid = Element::Word(FreeWord::identity());
    let seed: Vec<Element> = ball(&GroupDescriptor::free(2), 1)
        .expect("ball enumerates")
        .into_iter()
        .map(|k| Element::pair(k, qid.clone()))
        .collect();
    assert_eq!(seed.len(), 5, "identity, two generators, two inverses");

    // Default caps: the injectivity and homomorphism claims certify.
    let cert = construct_certificate(&g, &seed, &PipelineOptions::default())
        .expect("construction succeeds");
    assert!(cert.claims.quotient_map);
    assert!(cert.claims.seed_injects);
    assert!(cert.claims.finite_index.is_none(), "order not requested");
    assert!(verify_certificate(&cert).expect("verification runs").passed());

    // Order leg: cap the homomorphism budget so the chosen degree is 3,
    // where the quotient order is computable.
    let cert3 = construct_certificate(
        &g,
        &seed,
        &PipelineOptions {
            compute_order: true,
            max_homs: 36,
            ..PipelineOptions::default()
        },
    )
    .expect("construction succeeds");
    match &cert3.core {
        CharacteristicQuotient::Free {
            symmetric_degree, ..
        } => assert_eq!(*symmetric_degree, 3),
        other => panic!("expected a free core, got {:?}", other),
    }
    let order = cert3.kernel_order.clone().expect("order was requested");
    assert_eq!(cert3.claims.finite_index, Some(true));
    assert_eq!(cert3.index.clone().expect("index recorded"), order);
    assert!(verify_certificate(&cert3).expect("verification runs").passed());

    // Oracle: |F_2 / N_3| by brute-force closure of the diagonal image in
    // Sym(3)^36, using only test-local permutation arithmetic.
    let mut gx = Vec::with_capacity(36);
    let mut gy = Vec::with_capacity(36);
    for a in 0..6 {
        for b in 0..6 {
            gx.push(a);
            gy.push(b);
        }
    }
    let closure = tuple_closure_size(3, &[gx, gy]);
    assert_eq!(closure, 972, "diagonal image order by exhaustive closure");
    assert_eq!(order.to_string(), "972", "certificate order matches the closure");

    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "whole run took {:?}", elapsed);
    println!("criterion 2 (free-kernel pipeline, order 972 at degree 3): pass");
}

// ---------------------------------------------------------------------------
// Criterion 3: characteristic-quotient orders and the precomposition closure
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_characteristic_core_orders() {
    let order = |rank: usize, d: usize| {
        CharacteristicQuotient::Free {
            rank,
            symmetric_degree: d,
        }
        .order(DEFAULT_MAX_HOMS, DEFAULT_MAX_DEGREE)
        .expect("order computable at desk scale")
    };
    assert_eq!(order(2, 2).to_string(), "4");
    assert_eq!(order(1, 3).to_string(), "6");

    // Oracle closures of the diagonal images, test-local arithmetic only.
    // Rank 2 at degree 2: homomorphisms are the 4 image pairs.
    let mut gx = Vec::new();
    let mut gy = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            gx.push(a);
            gy.push(b);
        }
    }
    assert_eq!(tuple_closure_size(2, &[gx, gy]), 4);
    // Rank 1 at degree 3: homomorphisms are the 6 single images.
    let g1: Vec<usize> = (0..6).collect();
    assert_eq!(tuple_closure_size(3, &[g1]), 6);

    // Precomposition closure: composing every homomorphism with a basis
    // automorphism of the rank-2 free group permutes the homomorphism set,
    // which is what makes the joint kernel characteristic. Checked for the
    // swap, the inversion, and both elementary transformations at degree 2.
    let perms2 = all_perms(2);
    let homs: Vec<(Vec<usize>, Vec<usize>)> = perms2
        .iter()
        .flat_map(|p| perms2.iter().map(move |q| (p.clone(), q.clone())))
        .collect();
    let hom_set: BTreeSet<(Vec<usize>, Vec<usize>)> = homs.iter().cloned().collect();
    let transformations: [(&[i32], &[i32]); 4] = [
        (&[2], &[1]),      // swap x <-> y
        (&[-1], &[2]),     // invert x
        (&[1, 2], &[2]),   // x -> xy
        (&[2, 1], &[2]),   // x -> yx
    ];
    for (wx, wy) in transformations {
        let precomposed: BTreeSet<(Vec<usize>, Vec<usize>)> = homs
            .iter()
            .map(|(p, q)| {
                let images = [p.clone(), q.clone()];
                (eval_word(wx, &images, 2), eval_word(wy, &images, 2))
            })
            .collect();
        assert_eq!(
            precomposed, hom_set,
            "precomposition with ({:?},{:?}) permutes the homomorphisms",
            wx, wy
        );
    }

    println!("criterion 3 (characteristic quotient orders 4 and 6, closure invariant): pass");
}

// ---------------------------------------------------------------------------
// Criterion 4: separation soundness on random inputs
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_separation_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EBA_0004);
    let letters_pool = [1i32, -1, 2, -2];
    let free2 = GroupDescriptor::free(2);
    for _ in 0..100 {
        // A uniformly random reduced word of length 1..=12: never follow a
        // letter with its inverse.
        let len = rng.gen_range(1..=12);
        let mut letters: Vec<i32> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = letters_pool[rng.gen_range(0..4)];
            if letters.last().map(|&p| p == -l).unwrap_or(false) {
                continue;
            }
            letters.push(l);
        }
        let el = Element::Word(FreeWord::new(letters.clone()).expect("reduced word"));
        let w = separate(&free2, std::slice::from_ref(&el)).expect("separation succeeds");
        assert!(w.separates(&el).expect("witness re-check runs"));
        match &w {
            FiniteIndexWitness::PermImages { degree, images, .. } => {
                let imgs: Vec<Vec<usize>> = images.iter().map(|p| p.images().to_vec()).collect();
                let image = eval_word(&letters, &imgs, *degree);
                assert!(!is_id(&image), "word {:?} must move a point", letters);
            }
            other => panic!("free kernel must get permutation images, got {:?}", other),
        }
    }

    let z3 = GroupDescriptor::free_abelian(3);
    for _ in 0..100 {
        let count = rng.gen_range(1..=4);
        let mut set = Vec::with_capacity(count);
        while set.len() < count {
            let coords: [i64; 3] = [
                rng.gen_range(-30..=30),
                rng.gen_range(-30..=30),
                rng.gen_range(-30..=30),
            ];
            if coords.iter().all(|&c| c == 0) {
                continue;
            }
            set.push(coords);
        }
        let elements: Vec<Element> = set
            .iter()
            .map(|c| Element::Vector(IntVector::from_i64s(c)))
            .collect();
        let w = separate(&z3, &elements).expect("separation succeeds");
        match &w {
            FiniteIndexWitness::Modulus { modulus, .. } => {
                for coords in &set {
                    let survives = coords
                        .iter()
                        .any(|&c| !(BigInt::from(c) % modulus).is_zero());
                    assert!(survives, "{:?} must stay nonzero mod {}", coords, modulus);
                }
            }
            other => panic!("abelian kernel must get a modulus, got {:?}", other),
        }
    }

    println!("criterion 4 (separation sound on 100 words and 100 vector sets): pass");
}

// ---------------------------------------------------------------------------
// Criterion 5: Smith normal form on random matrices
// ---------------------------------------------------------------------------

fn to_grid(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c).clone()).collect())
        .collect()
}

fn grid_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![BigInt::zero(); cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            let mut acc = BigInt::zero();
            for k in 0..inner {
                acc += &a[r][k] * &b[k][c];
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Cofactor expansion along the first row; fine for n <= 4.
fn grid_det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut det = BigInt::zero();
    for c in 0..n {
        let minor: Vec<Vec<BigInt>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][c] * grid_det(&minor);
        if c % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

#[test]
fn criterion_5_smith_normal_form_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EBA_0005);
    for _ in 0..200 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let entries: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-20..=20)).collect())
            .collect();
        let refs: Vec<&[i64]> = entries.iter().map(|r| r.as_slice()).collect();
        let a = IntMatrix::from_i64_rows(&refs);
        let dec = smith_normal_form(&a);

        let (ug, ag, vg, sg) = (to_grid(&dec.u), to_grid(&a), to_grid(&dec.v), to_grid(&dec.s));
        assert_eq!(grid_mul(&grid_mul(&ug, &ag), &vg), sg, "U·A·V = S exactly");
        assert!(grid_det(&ug).abs().is_one(), "det U = ±1");
        assert!(grid_det(&vg).abs().is_one(), "det V = ±1");
        let diag = dec.diagonal();
        for w in diag.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero(), "zeros only trail");
            } else {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
            }
        }
        // Off-diagonal entries of S vanish.
        for r in 0..dec.s.rows() {
            for c in 0..dec.s.cols() {
                if r != c {
                    assert!(dec.s.get(r, c).is_zero());
                }
            }
        }
    }
    println!("criterion 5 (Smith normal form on 200 random matrices): pass");
}

// ---------------------------------------------------------------------------
// Criterion 6: recoding a shift along a finite-index subgroup
// ---------------------------------------------------------------------------

fn sym3_table() -> (FiniteGroupTable, Vec<Element>) {
    let rot = Permutation::new(vec![1, 2, 0]).unwrap();
    let flip = Permutation::new(vec![1, 0, 2]).unwrap();
    FiniteGroupTable::from_permutations(3, vec![rot, flip]).expect("tabulates")
}

#[test]
fn criterion_6_recoding_lemma() {
    let (gt, _) = sym3_table();
    // H: the order-3 subgroup, located by element order.
    let subgroup: Vec<usize> = (0..gt.order())
        .filter(|&i| gt.mul(gt.mul(i, i), i) == gt.identity())
        .collect();
    assert_eq!(subgroup.len(), 3);
    let rd = RecodingData::new(gt.clone(), &subgroup).expect("valid subgroup");

    let report = recode_report(&rd, 2, DEFAULT_MAX_CONFIGS).expect("sweep runs");
    assert_eq!(report.config_count, 64);
    assert!(report.bijective);
    assert!(report.equivariant);
    assert_eq!(report.equivariance_pairs, 192, "3 subgroup elements x 64 configurations");

    // Independent distinctness count over every recoded configuration.
    let super_alphabet = rd
        .super_alphabet(2, DEFAULT_MAX_CONFIGS)
        .expect("fits the cap");
    let mut seen = BTreeSet::new();
    for code in 0..64u64 {
        let x = Configuration::from_code(code, 6, 2).expect("code in range");
        let y = rd.recode(2, &x).expect("recode runs");
        assert!(seen.insert(y.to_code(super_alphabet)), "recoding collides");
        let back = rd.decode(2, &y).expect("decode runs");
        assert_eq!(back, x, "decode inverts recode");
    }
    assert_eq!(seen.len(), 64);

    // Conjugating any cellular map through the recoding preserves
    // injectivity and surjectivity; checked on 20 random rules with
    // test-local classification on both sides.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EBA_0006);
    let indices: Vec<usize> = (0..gt.order()).collect();
    for trial in 0..20 {
        let msize = rng.gen_range(1..=2);
        let memory: Vec<usize> = indices
            .choose_multiple(&mut rng, msize)
            .cloned()
            .collect();
        let rule: Vec<usize> = (0..(1usize << msize)).map(|_| rng.gen_range(0..2)).collect();
        let ca = CellularAutomaton::new(2, memory, rule).expect("valid rule");
        let table: Vec<u64> = (0..64u64)
            .map(|code| {
                let x = Configuration::from_code(code, 6, 2).expect("code in range");
                ca_apply(&gt, &ca, &x).expect("applies").to_code(2)
            })
            .collect();
        let classify = |t: &[u64]| {
            let distinct: BTreeSet<u64> = t.iter().cloned().collect();
            (distinct.len() == t.len(), distinct.len() == 64)
        };
        let before = classify(&table);
        let conjugated = rd
            .conjugate_map(2, &table, DEFAULT_MAX_CONFIGS)
            .expect("conjugation runs");
        let after = classify(&conjugated);
        assert_eq!(before, after, "trial {}: classification preserved", trial);
    }

    println!("criterion 6 (recoding bijective + equivariant, 20 conjugations stable): pass");
}

// ---------------------------------------------------------------------------
// Criterion 7: embedding into Sym(cosets) x subgroup along a retraction
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_finite_extension_embedding() {
    let (gt, elements) = sym3_table();
    let parity_even = |p: &Permutation| {
        let im = p.images();
        let mut inversions = 0usize;
        for i in 0..im.len() {
            for j in (i + 1)..im.len() {
                if im[i] > im[j] {
                    inversions += 1;
                }
            }
        }
        inversions.is_multiple_of(2)
    };
    let id_idx = gt.identity();
    let flip_idx = elements
        .iter()
        .position(|e| e.perm().map(|p| p.images() == [1, 0, 2]).unwrap_or(false))
        .expect("flip generator present");
    let subgroup = vec![id_idx, flip_idx];
    let retraction: Vec<usize> = elements
        .iter()
        .map(|e| {
            if parity_even(e.perm().expect("permutation elements")) {
                id_idx
            } else {
                flip_idx
            }
        })
        .collect();

    let report = finext_embed(&gt, &subgroup, &retraction).expect("embedding runs");
    assert_eq!(report.coset_count, 3);
    assert!(report.injective);
    assert!(report.homomorphism);
    assert_eq!(report.index, 2, "|Sym(3)| * |H| / |G| = 6*2/6");

    // Independent checks: the six images are distinct, and the embedding is
    // multiplicative on all 36 pairs under test-local composition.
    let images: Vec<(Vec<usize>, usize)> = report
        .images
        .iter()
        .map(|(p, r)| (p.images().to_vec(), *r))
        .collect();
    let distinct: BTreeSet<&(Vec<usize>, usize)> = images.iter().collect();
    assert_eq!(distinct.len(), 6, "injective on all six elements");
    for a in 0..6 {
        for b in 0..6 {
            let ab = gt.mul(a, b);
            assert_eq!(
                images[ab].0,
                pcompose(&images[a].0, &images[b].0),
                "coset part multiplicative at ({}, {})",
                a,
                b
            );
            assert_eq!(
                images[ab].1,
                gt.mul(images[a].1, images[b].1),
                "retraction part multiplicative at ({}, {})",
                a,
                b
            );
        }
    }

    println!("criterion 7 (embedding into Sym(3) x Z/2, 36 pairs multiplicative): pass");
}

// ---------------------------------------------------------------------------
// Criterion 8: surjunctivity exhaustion over two groups of order 4
// ---------------------------------------------------------------------------

/// Test-local full sweep of one rule; returns (injective, surjective).
fn my_sweep(table: &[Vec<usize>], memory: &[usize], rule_index: u64) -> (bool, bool) {
    let n = table.len();
    let total = 1u64 << n;
    let mut seen = vec![false; total as usize];
    let mut distinct = 0u64;
    for code in 0..total {
        let mut out = 0u64;
        for (g, row) in table.iter().enumerate() {
            let mut tuple = 0usize;
            for (i, &m) in memory.iter().enumerate() {
                let bit = (code >> row[m]) & 1;
                tuple |= (bit as usize) << i;
            }
            out |= ((rule_index >> tuple) & 1) << g;
        }
        if !std::mem::replace(&mut seen[out as usize], true) {
            distinct += 1;
        }
    }
    (distinct == total, distinct == total)
}

#[test]
fn criterion_8_surjunctivity_exhaustion() {
    let t0 = Instant::now();
    let groups = [
        ("Z/4", FiniteGroupTable::cyclic(4).expect("builds")),
        (
            "Z/2 x Z/2",
            FiniteGroupTable::cyclic_product(&[2, 2]).expect("builds"),
        ),
    ];
    let mut rules_checked = 0usize;
    for (label, gt) in &groups {
        let n = gt.order();
        let mut memories: Vec<Vec<usize>> = (0..n).map(|m| vec![m]).collect();
        for a in 0..n {
            for b in (a + 1)..n {
                memories.push(vec![a, b]);
            }
        }
        for memory in &memories {
            let reports =
                rule_sweep(gt, 2, memory, DEFAULT_MAX_CONFIGS).expect("sweep runs");
            assert_eq!(reports.len(), 1 << (1 << memory.len()));
            for (rule_index, report) in &reports {
                assert!(
                    !(report.injective && !report.surjective),
                    "{} memory {:?} rule {}: injective but not surjective",
                    label,
                    memory,
                    rule_index
                );
                // Cross-check against the test-local sweep: a self-map of a
                // finite set is injective iff it is surjective, and the
                // library's classification must agree with ours.
                let (inj, surj) = my_sweep(gt.rows(), memory, *rule_index);
                assert_eq!(inj, report.injective, "{} {:?} rule {}", label, memory, rule_index);
                assert_eq!(surj, report.surjective, "{} {:?} rule {}", label, memory, rule_index);
                rules_checked += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "sweep took {:?}", elapsed);
    println!(
        "criterion 8 (surjunctivity exhaustion, {} rules, no counterexample): pass",
        rules_checked
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: construct-then-verify round trips and tamper detection
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_demo_round_trips() {
    use std::path::Path;
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_finquot");
    let demos = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../demos")
        .canonicalize()
        .expect("demo directory ships with the repository");
    let tmp = tempfile::tempdir().expect("temp dir");

    let run = |args: &[&str]| -> i32 {
        Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs")
            .status
            .code()
            .expect("exit code present")
    };

    // Construct-then-verify on every construction demo, then tamper one
    // field of each certificate and demand exit code 1.
    let constructs = [
        ("catmap.json", vec!["--order"]),
        ("directproduct-Z.json", vec!["--order"]),
        ("freekernel.json", vec![]),
    ];
    for (idx, (name, extra)) in constructs.iter().enumerate() {
        let input = demos.join("construct").join(name);
        let cert = tmp.path().join(format!("cert{}.json", idx));
        let mut args = vec![
            "construct",
            "--input",
            input.to_str().unwrap(),
            "--output",
            cert.to_str().unwrap(),
        ];
        args.extend(extra.iter().copied());
        assert_eq!(run(&args), 0, "construct {} succeeds", name);
        assert_eq!(
            run(&["verify", "--input", cert.to_str().unwrap()]),
            0,
            "verify {} succeeds",
            name
        );

        // Tamper: flip the stored injectivity claim.
        let text = std::fs::read_to_string(&cert).expect("certificate readable");
        let mut doc: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
        doc["claims"]["seed_injects"] = serde_json::Value::Bool(false);
        let tampered = tmp.path().join(format!("tampered{}.json", idx));
        std::fs::write(&tampered, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        assert_eq!(
            run(&["verify", "--input", tampered.to_str().unwrap()]),
            1,
            "tampered claim on {} must fail verification",
            name
        );

        // Tamper: overstate the kernel order where one is recorded.
        if doc["kernel_order"] != serde_json::Value::Null {
            let mut doc2: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
            doc2["kernel_order"] = serde_json::Value::from(9999);
            let t2 = tmp.path().join(format!("tampered-order{}.json", idx));
            std::fs::write(&t2, serde_json::to_string_pretty(&doc2).unwrap()).unwrap();
            assert_eq!(
                run(&["verify", "--input", t2.to_str().unwrap()]),
                1,
                "tampered order on {} must fail verification",
                name
            );
        }
    }

    // Every other shipped demo drives its subcommand to a clean exit.
    let others: [&[&str]; 9] = [
        &["shift", "check", "--input", "shift/check-z4-sweep.json"],
        &["shift", "check", "--input", "shift/check-z2z2-sweep.json"],
        &["shift", "check", "--input", "shift/check-z4-xor.json"],
        &["shift", "recode", "--input", "shift/recode-sym3.json"],
        &["shift", "embed", "--input", "shift/embed-sym3.json"],
        &["separate", "--input", "separate/commutator.json"],
        &["core", "--input", "core/witness-modulus.json"],
        &["snf", "--input", "snf/identity.json"],
        &["snf", "--input", "snf/lattice.json"],
    ];
    for args in others {
        let mut full: Vec<String> = Vec::new();
        for (i, a) in args.iter().enumerate() {
            if i > 0 && args[i - 1] == "--input" {
                full.push(demos.join(a).to_str().unwrap().to_string());
            } else {
                full.push(a.to_string());
            }
        }
        let refs: Vec<&str> = full.iter().map(|s| s.as_str()).collect();
        assert_eq!(run(&refs), 0, "demo {:?} exits cleanly", args);
    }

    println!("criterion 9 (demo round trips and tamper detection): pass");
}

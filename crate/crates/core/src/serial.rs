//! Canonical JSON encoding for every document the tool reads or writes.
//!
//! Design rules, enforced here once:
//!
//! * every document carries `"format": 1` and a `"kind"` tag;
//! * object keys serialize in sorted order, so identical values produce
//!   byte-identical files;
//! * integers appear as plain JSON integer tokens at full precision (the
//!   parser is arbitrary-precision; nothing is ever a float or a quoted
//!   digit string);
//! * unreadable input is reported as malformed, distinct from a document
//!   whose mathematical content fails verification.

use num_bigint::{BigInt, BigUint};
use serde_json::{Map, Number, Value};
use std::path::Path;
use std::str::FromStr;

use crate::charcore::{CharacteristicQuotient, InducedEndo, InducedPair, WitnessBlockEvidence};
use crate::error::{Error, Result};
use crate::group::{
    ActionPair, ActionVerification, AutomorphismAction, Element, EndoSpec, FreeWord,
    GroupDescriptor, IntVector, Permutation, SemidirectDescriptor,
};
use crate::matrix::IntMatrix;
use crate::pipeline::{Certificate, ClaimStatuses, ParameterRecord, VerificationReport};
use crate::separation::FiniteIndexWitness;

/// The current document format version.
pub const FORMAT_VERSION: i64 = 1;

// ---------------------------------------------------------------------------
// Value plumbing
// ---------------------------------------------------------------------------

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

pub fn bigint_value(b: &BigInt) -> Value {
    Value::Number(Number::from_str(&b.to_string()).expect("integer token"))
}

pub fn biguint_value(b: &BigUint) -> Value {
    Value::Number(Number::from_str(&b.to_string()).expect("integer token"))
}

pub fn usize_value(n: usize) -> Value {
    Value::Number(Number::from(n as u64))
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.as_object()
        .ok_or_else(|| malformed("expected a JSON object"))?
        .get(key)
        .ok_or_else(|| malformed(format!("missing field \"{}\"", key)))
}

fn get_opt<'v>(v: &'v Value, key: &str) -> Option<&'v Value> {
    v.as_object().and_then(|o| o.get(key)).filter(|x| !x.is_null())
}

pub fn as_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| malformed(format!("expected an integer, found {}", n))),
        _ => Err(malformed("expected an integer")),
    }
}

pub fn as_biguint(v: &Value) -> Result<BigUint> {
    let b = as_bigint(v)?;
    b.to_biguint()
        .ok_or_else(|| malformed("expected a nonnegative integer"))
}

pub fn as_usize(v: &Value) -> Result<usize> {
    use num_traits::ToPrimitive;
    as_bigint(v)?
        .to_usize()
        .ok_or_else(|| malformed("integer out of range"))
}

pub fn as_u64(v: &Value) -> Result<u64> {
    use num_traits::ToPrimitive;
    as_bigint(v)?
        .to_u64()
        .ok_or_else(|| malformed("integer out of range"))
}

fn as_i32(v: &Value) -> Result<i32> {
    use num_traits::ToPrimitive;
    as_bigint(v)?
        .to_i32()
        .ok_or_else(|| malformed("integer out of range"))
}

fn as_bool(v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| malformed("expected a boolean"))
}

fn as_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| malformed("expected a string"))
}

fn as_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| malformed("expected an array"))
}

fn kind_of(v: &Value) -> Result<&str> {
    as_str(get(v, "kind")?)
}

// ---------------------------------------------------------------------------
// Documents and files
// ---------------------------------------------------------------------------

/// Wrap a payload object with the format version and a kind tag.
pub fn document(kind: &str, mut entries: Vec<(&str, Value)>) -> Value {
    entries.push(("format", Value::Number(Number::from(FORMAT_VERSION))));
    entries.push(("kind", Value::String(kind.to_string())));
    obj(entries)
}

/// Check the version stamp and, when given, the kind tag of a document.
pub fn check_document(v: &Value, expected_kind: Option<&str>) -> Result<()> {
    let version = as_bigint(get(v, "format")?)?;
    if version != BigInt::from(FORMAT_VERSION) {
        use num_traits::ToPrimitive;
        return Err(Error::FormatVersion {
            got: version.to_i64().unwrap_or(i64::MAX),
            expected: FORMAT_VERSION,
        });
    }
    if let Some(expected) = expected_kind {
        let kind = kind_of(v)?;
        if kind != expected {
            return Err(malformed(format!(
                "expected a \"{}\" document, found \"{}\"",
                expected, kind
            )));
        }
    }
    Ok(())
}

pub fn read_document(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("invalid JSON: {}", e)))
}

/// Serialize with stable formatting: sorted keys (the value type guarantees
/// it), two-space indentation, trailing newline.
pub fn render_document(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("value serializes");
    text.push('\n');
    text
}

pub fn write_document(path: &Path, v: &Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, render_document(v))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

fn word_value(w: &FreeWord) -> Value {
    Value::Array(w.letters().iter().map(|&l| Value::Number(Number::from(l))).collect())
}

fn word_from(v: &Value) -> Result<FreeWord> {
    let letters: Vec<i32> = as_array(v)?.iter().map(as_i32).collect::<Result<_>>()?;
    FreeWord::new(letters).map_err(|e| malformed(format!("bad word: {}", e)))
}

fn perm_value(p: &Permutation) -> Value {
    Value::Array(p.images().iter().map(|&i| usize_value(i)).collect())
}

fn perm_from(v: &Value) -> Result<Permutation> {
    let images: Vec<usize> = as_array(v)?.iter().map(as_usize).collect::<Result<_>>()?;
    Permutation::new(images).map_err(|e| malformed(format!("bad permutation: {}", e)))
}

fn vector_value(x: &IntVector) -> Value {
    Value::Array(x.coords().iter().map(bigint_value).collect())
}

fn vector_from(v: &Value) -> Result<IntVector> {
    Ok(IntVector::new(
        as_array(v)?.iter().map(as_bigint).collect::<Result<_>>()?,
    ))
}

pub fn element_to_value(el: &Element) -> Value {
    match el {
        Element::Word(w) => obj(vec![
            ("kind", Value::String("word".into())),
            ("letters", word_value(w)),
        ]),
        Element::Vector(x) => obj(vec![
            ("kind", Value::String("vector".into())),
            ("coords", vector_value(x)),
        ]),
        Element::Perm(p) => obj(vec![
            ("kind", Value::String("perm".into())),
            ("images", perm_value(p)),
        ]),
        Element::Pair(k, q) => obj(vec![
            ("kind", Value::String("pair".into())),
            ("k", element_to_value(k)),
            ("q", element_to_value(q)),
        ]),
    }
}

pub fn element_from_value(v: &Value) -> Result<Element> {
    match kind_of(v)? {
        "word" => Ok(Element::Word(word_from(get(v, "letters")?)?)),
        "vector" => Ok(Element::Vector(vector_from(get(v, "coords")?)?)),
        "perm" => Ok(Element::Perm(perm_from(get(v, "images")?)?)),
        "pair" => Ok(Element::pair(
            element_from_value(get(v, "k")?)?,
            element_from_value(get(v, "q")?)?,
        )),
        other => Err(malformed(format!("unknown element kind \"{}\"", other))),
    }
}

fn elements_value(els: &[Element]) -> Value {
    Value::Array(els.iter().map(element_to_value).collect())
}

fn elements_from(v: &Value) -> Result<Vec<Element>> {
    as_array(v)?.iter().map(element_from_value).collect()
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

pub fn matrix_to_value(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(bigint_value).collect()))
            .collect(),
    )
}

pub fn matrix_from_value(v: &Value) -> Result<IntMatrix> {
    let rows = as_array(v)?;
    let mut data: Vec<Vec<BigInt>> = Vec::with_capacity(rows.len());
    for row in rows {
        data.push(as_array(row)?.iter().map(as_bigint).collect::<Result<_>>()?);
    }
    IntMatrix::from_rows(data).map_err(|e| malformed(format!("bad matrix: {}", e)))
}

// ---------------------------------------------------------------------------
// Group descriptors and actions
// ---------------------------------------------------------------------------

fn endo_to_value(spec: &EndoSpec) -> Value {
    match spec {
        EndoSpec::Words(words) => obj(vec![
            ("kind", Value::String("words".into())),
            ("images", Value::Array(words.iter().map(word_value).collect())),
        ]),
        EndoSpec::Matrix(m) => obj(vec![
            ("kind", Value::String("matrix".into())),
            ("rows", matrix_to_value(m)),
        ]),
        EndoSpec::Table(pairs) => obj(vec![
            ("kind", Value::String("table".into())),
            (
                "pairs",
                Value::Array(
                    pairs
                        .iter()
                        .map(|(from, to)| {
                            obj(vec![("from", perm_value(from)), ("to", perm_value(to))])
                        })
                        .collect(),
                ),
            ),
        ]),
    }
}

fn endo_from(v: &Value) -> Result<EndoSpec> {
    match kind_of(v)? {
        "words" => Ok(EndoSpec::Words(
            as_array(get(v, "images")?)?.iter().map(word_from).collect::<Result<_>>()?,
        )),
        "matrix" => Ok(EndoSpec::Matrix(matrix_from_value(get(v, "rows")?)?)),
        "table" => {
            let mut pairs = Vec::new();
            for p in as_array(get(v, "pairs")?)? {
                pairs.push((perm_from(get(p, "from")?)?, perm_from(get(p, "to")?)?));
            }
            Ok(EndoSpec::Table(pairs))
        }
        other => Err(malformed(format!("unknown endomorphism kind \"{}\"", other))),
    }
}

pub fn action_to_value(action: &AutomorphismAction) -> Value {
    obj(vec![
        (
            "pairs",
            Value::Array(
                action
                    .pairs
                    .iter()
                    .map(|p| {
                        obj(vec![
                            ("backward", endo_to_value(&p.backward)),
                            ("forward", endo_to_value(&p.forward)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "relators",
            Value::Array(action.relators.iter().map(word_value).collect()),
        ),
    ])
}

pub fn action_from_value(v: &Value) -> Result<AutomorphismAction> {
    let mut pairs = Vec::new();
    for p in as_array(get(v, "pairs")?)? {
        pairs.push(ActionPair {
            forward: endo_from(get(p, "forward")?)?,
            backward: endo_from(get(p, "backward")?)?,
        });
    }
    let relators = match get_opt(v, "relators") {
        Some(r) => as_array(r)?.iter().map(word_from).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(AutomorphismAction { pairs, relators })
}

/// Encode a descriptor. Semidirect descriptors include the derived action
/// verification level for the record.
pub fn descriptor_to_value(desc: &GroupDescriptor) -> Value {
    match desc {
        GroupDescriptor::Free { rank } => obj(vec![
            ("kind", Value::String("free".into())),
            ("rank", usize_value(*rank)),
        ]),
        GroupDescriptor::FreeAbelian { rank } => obj(vec![
            ("kind", Value::String("free_abelian".into())),
            ("rank", usize_value(*rank)),
        ]),
        GroupDescriptor::FinitePerm { degree, generators } => obj(vec![
            ("kind", Value::String("finite_perm".into())),
            ("degree", usize_value(*degree)),
            (
                "generators",
                Value::Array(generators.iter().map(perm_value).collect()),
            ),
        ]),
        GroupDescriptor::Semidirect(sd) => obj(vec![
            ("kind", Value::String("semidirect".into())),
            ("kernel", descriptor_to_value(&sd.kernel)),
            ("quotient", descriptor_to_value(&sd.quotient)),
            ("action", action_to_value(&sd.action)),
            (
                "verification",
                Value::String(sd.verification.as_str().into()),
            ),
        ]),
    }
}

/// Decode and *validate* a descriptor: semidirect parts go back through the
/// checked constructor, so an accepted descriptor is always internally
/// consistent. Any stored verification level is ignored here in favor of
/// the re-derived one.
pub fn descriptor_from_value(v: &Value) -> Result<GroupDescriptor> {
    match kind_of(v)? {
        "free" => Ok(GroupDescriptor::free(as_usize(get(v, "rank")?)?)),
        "free_abelian" => Ok(GroupDescriptor::free_abelian(as_usize(get(v, "rank")?)?)),
        "finite_perm" => {
            let degree = as_usize(get(v, "degree")?)?;
            let generators: Vec<Permutation> = as_array(get(v, "generators")?)?
                .iter()
                .map(perm_from)
                .collect::<Result<_>>()?;
            GroupDescriptor::finite_perm(degree, generators)
                .map_err(|e| malformed(format!("bad permutation group: {}", e)))
        }
        "semidirect" => {
            let kernel = descriptor_from_value(get(v, "kernel")?)?;
            let quotient = descriptor_from_value(get(v, "quotient")?)?;
            let action = action_from_value(get(v, "action")?)?;
            GroupDescriptor::semidirect(kernel, quotient, action)
                .map_err(|e| malformed(format!("bad semidirect data: {}", e)))
        }
        other => Err(malformed(format!("unknown group kind \"{}\"", other))),
    }
}

/// Decode a semidirect descriptor *without* revalidation, keeping the
/// stored verification level. Certificate verification re-runs the checked
/// constructor itself and compares the levels, so a tampered level is a
/// detected claim failure rather than a silent fix-up.
fn semidirect_from_value_unchecked(v: &Value) -> Result<SemidirectDescriptor> {
    if kind_of(v)? != "semidirect" {
        return Err(malformed("expected a semidirect group"));
    }
    Ok(SemidirectDescriptor {
        kernel: descriptor_from_value(get(v, "kernel")?)?,
        quotient: descriptor_from_value(get(v, "quotient")?)?,
        action: action_from_value(get(v, "action")?)?,
        verification: ActionVerification::from_str_name(as_str(get(v, "verification")?)?)?,
    })
}

// ---------------------------------------------------------------------------
// Witnesses and kernel quotients
// ---------------------------------------------------------------------------

pub fn witness_to_value(w: &FiniteIndexWitness) -> Value {
    match w {
        FiniteIndexWitness::PermImages { rank, degree, images } => obj(vec![
            ("kind", Value::String("perm_images".into())),
            ("rank", usize_value(*rank)),
            ("degree", usize_value(*degree)),
            (
                "images",
                Value::Array(images.iter().map(perm_value).collect()),
            ),
        ]),
        FiniteIndexWitness::Modulus { rank, modulus } => obj(vec![
            ("kind", Value::String("modulus".into())),
            ("rank", usize_value(*rank)),
            ("modulus", bigint_value(modulus)),
        ]),
        FiniteIndexWitness::Identity { degree, generators } => obj(vec![
            ("kind", Value::String("identity".into())),
            ("degree", usize_value(*degree)),
            (
                "generators",
                Value::Array(generators.iter().map(perm_value).collect()),
            ),
        ]),
    }
}

pub fn witness_from_value(v: &Value) -> Result<FiniteIndexWitness> {
    match kind_of(v)? {
        "perm_images" => Ok(FiniteIndexWitness::PermImages {
            rank: as_usize(get(v, "rank")?)?,
            degree: as_usize(get(v, "degree")?)?,
            images: as_array(get(v, "images")?)?
                .iter()
                .map(perm_from)
                .collect::<Result<_>>()?,
        }),
        "modulus" => Ok(FiniteIndexWitness::Modulus {
            rank: as_usize(get(v, "rank")?)?,
            modulus: as_bigint(get(v, "modulus")?)?,
        }),
        "identity" => Ok(FiniteIndexWitness::Identity {
            degree: as_usize(get(v, "degree")?)?,
            generators: as_array(get(v, "generators")?)?
                .iter()
                .map(perm_from)
                .collect::<Result<_>>()?,
        }),
        other => Err(malformed(format!("unknown witness kind \"{}\"", other))),
    }
}

pub fn core_to_value(core: &CharacteristicQuotient) -> Value {
    match core {
        CharacteristicQuotient::Free { rank, symmetric_degree } => obj(vec![
            ("kind", Value::String("free".into())),
            ("rank", usize_value(*rank)),
            ("symmetric_degree", usize_value(*symmetric_degree)),
        ]),
        CharacteristicQuotient::Abelian { rank, modulus } => obj(vec![
            ("kind", Value::String("abelian".into())),
            ("rank", usize_value(*rank)),
            ("modulus", bigint_value(modulus)),
        ]),
        CharacteristicQuotient::Finite { degree, generators } => obj(vec![
            ("kind", Value::String("finite".into())),
            ("degree", usize_value(*degree)),
            (
                "generators",
                Value::Array(generators.iter().map(perm_value).collect()),
            ),
        ]),
    }
}

pub fn core_from_value(v: &Value) -> Result<CharacteristicQuotient> {
    match kind_of(v)? {
        "free" => Ok(CharacteristicQuotient::Free {
            rank: as_usize(get(v, "rank")?)?,
            symmetric_degree: as_usize(get(v, "symmetric_degree")?)?,
        }),
        "abelian" => Ok(CharacteristicQuotient::Abelian {
            rank: as_usize(get(v, "rank")?)?,
            modulus: as_bigint(get(v, "modulus")?)?,
        }),
        "finite" => Ok(CharacteristicQuotient::Finite {
            degree: as_usize(get(v, "degree")?)?,
            generators: as_array(get(v, "generators")?)?
                .iter()
                .map(perm_from)
                .collect::<Result<_>>()?,
        }),
        other => Err(malformed(format!("unknown quotient kind \"{}\"", other))),
    }
}

fn induced_endo_to_value(endo: &InducedEndo) -> Value {
    match endo {
        InducedEndo::MatrixMod(m) => obj(vec![
            ("kind", Value::String("matrix_mod".into())),
            ("rows", matrix_to_value(m)),
        ]),
        InducedEndo::WordImages(pairs) => obj(vec![
            ("kind", Value::String("word_images".into())),
            (
                "pairs",
                Value::Array(
                    pairs
                        .iter()
                        .map(|(w, p)| obj(vec![("image", perm_value(p)), ("word", word_value(w))]))
                        .collect(),
                ),
            ),
        ]),
        InducedEndo::Table(pairs) => obj(vec![
            ("kind", Value::String("table".into())),
            (
                "pairs",
                Value::Array(
                    pairs
                        .iter()
                        .map(|(from, to)| {
                            obj(vec![("from", perm_value(from)), ("to", perm_value(to))])
                        })
                        .collect(),
                ),
            ),
        ]),
    }
}

fn induced_endo_from(v: &Value) -> Result<InducedEndo> {
    match kind_of(v)? {
        "matrix_mod" => Ok(InducedEndo::MatrixMod(matrix_from_value(get(v, "rows")?)?)),
        "word_images" => {
            let mut pairs = Vec::new();
            for p in as_array(get(v, "pairs")?)? {
                pairs.push((word_from(get(p, "word")?)?, perm_from(get(p, "image")?)?));
            }
            Ok(InducedEndo::WordImages(pairs))
        }
        "table" => {
            let mut pairs = Vec::new();
            for p in as_array(get(v, "pairs")?)? {
                pairs.push((perm_from(get(p, "from")?)?, perm_from(get(p, "to")?)?));
            }
            Ok(InducedEndo::Table(pairs))
        }
        other => Err(malformed(format!(
            "unknown induced automorphism kind \"{}\"",
            other
        ))),
    }
}

fn induced_pair_to_value(pair: &InducedPair) -> Value {
    obj(vec![
        ("backward", induced_endo_to_value(&pair.backward)),
        ("forward", induced_endo_to_value(&pair.forward)),
    ])
}

fn induced_pair_from(v: &Value) -> Result<InducedPair> {
    Ok(InducedPair {
        forward: induced_endo_from(get(v, "forward")?)?,
        backward: induced_endo_from(get(v, "backward")?)?,
    })
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

pub fn certificate_to_value(cert: &Certificate) -> Value {
    let evidence = match &cert.core_evidence {
        Some(ev) => obj(vec![("block_index", biguint_value(&ev.block_index))]),
        None => Value::Null,
    };
    let claims = obj(vec![
        (
            "finite_index",
            match cert.claims.finite_index {
                Some(b) => Value::Bool(b),
                None => Value::Null,
            },
        ),
        ("quotient_map", Value::Bool(cert.claims.quotient_map)),
        ("seed_injects", Value::Bool(cert.claims.seed_injects)),
    ]);
    let parameters = obj(vec![
        ("max_degree", usize_value(cert.parameters.max_degree)),
        ("max_homs", Value::Number(Number::from(cert.parameters.max_homs))),
        ("sample_count", usize_value(cert.parameters.sample_count)),
        (
            "sample_seed",
            Value::Number(Number::from(cert.parameters.sample_seed)),
        ),
        (
            "sample_word_length",
            usize_value(cert.parameters.sample_word_length),
        ),
    ]);
    let tool = obj(vec![
        ("name", Value::String(cert.tool_name.clone())),
        ("version", Value::String(cert.tool_version.clone())),
    ]);
    document(
        "certificate",
        vec![
            (
                "group",
                descriptor_to_value(&GroupDescriptor::Semidirect(Box::new(cert.group.clone()))),
            ),
            ("seed", elements_value(&cert.seed)),
            ("kernel_differences", elements_value(&cert.kernel_differences)),
            ("witness", witness_to_value(&cert.witness)),
            ("core", core_to_value(&cert.core)),
            ("core_evidence", evidence),
            (
                "induced_action",
                Value::Array(cert.induced_action.iter().map(induced_pair_to_value).collect()),
            ),
            ("seed_images", elements_value(&cert.seed_images)),
            ("generator_images", elements_value(&cert.generator_images)),
            ("claims", claims),
            (
                "kernel_order",
                cert.kernel_order.as_ref().map(biguint_value).unwrap_or(Value::Null),
            ),
            (
                "index",
                cert.index.as_ref().map(biguint_value).unwrap_or(Value::Null),
            ),
            ("tool", tool),
            ("parameters", parameters),
        ],
    )
}

pub fn certificate_from_value(v: &Value) -> Result<Certificate> {
    check_document(v, Some("certificate"))?;
    let claims_v = get(v, "claims")?;
    let claims = ClaimStatuses {
        quotient_map: as_bool(get(claims_v, "quotient_map")?)?,
        seed_injects: as_bool(get(claims_v, "seed_injects")?)?,
        finite_index: match get_opt(claims_v, "finite_index") {
            Some(b) => Some(as_bool(b)?),
            None => None,
        },
    };
    let params_v = get(v, "parameters")?;
    let parameters = ParameterRecord {
        max_homs: as_u64(get(params_v, "max_homs")?)?,
        max_degree: as_usize(get(params_v, "max_degree")?)?,
        sample_seed: as_u64(get(params_v, "sample_seed")?)?,
        sample_count: as_usize(get(params_v, "sample_count")?)?,
        sample_word_length: as_usize(get(params_v, "sample_word_length")?)?,
    };
    let tool_v = get(v, "tool")?;
    Ok(Certificate {
        group: semidirect_from_value_unchecked(get(v, "group")?)?,
        seed: elements_from(get(v, "seed")?)?,
        kernel_differences: elements_from(get(v, "kernel_differences")?)?,
        witness: witness_from_value(get(v, "witness")?)?,
        core: core_from_value(get(v, "core")?)?,
        core_evidence: match get_opt(v, "core_evidence") {
            Some(ev) => Some(WitnessBlockEvidence {
                block_index: as_biguint(get(ev, "block_index")?)?,
            }),
            None => None,
        },
        induced_action: as_array(get(v, "induced_action")?)?
            .iter()
            .map(induced_pair_from)
            .collect::<Result<_>>()?,
        seed_images: elements_from(get(v, "seed_images")?)?,
        generator_images: elements_from(get(v, "generator_images")?)?,
        claims,
        kernel_order: match get_opt(v, "kernel_order") {
            Some(n) => Some(as_biguint(n)?),
            None => None,
        },
        index: match get_opt(v, "index") {
            Some(n) => Some(as_biguint(n)?),
            None => None,
        },
        tool_name: as_str(get(tool_v, "name")?)?.to_string(),
        tool_version: as_str(get(tool_v, "version")?)?.to_string(),
        parameters,
    })
}

/// Encode a verification report for file output.
pub fn report_to_value(report: &VerificationReport) -> Value {
    document(
        "verification_report",
        vec![
            (
                "checks",
                Value::Array(
                    report
                        .checks
                        .iter()
                        .map(|c| {
                            obj(vec![
                                ("detail", Value::String(c.detail.clone())),
                                ("name", Value::String(c.name.to_string())),
                                ("passed", Value::Bool(c.passed)),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("passed", Value::Bool(report.passed())),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ball;
    use crate::pipeline::{construct_certificate, verify_certificate, PipelineOptions};

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

    #[test]
    fn descriptor_roundtrips() {
        let descs = vec![
            GroupDescriptor::free(2),
            GroupDescriptor::free_abelian(3),
            GroupDescriptor::finite_perm(
                3,
                vec![Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()],
            )
            .unwrap(),
            cat_map_group(),
        ];
        for d in descs {
            let v = descriptor_to_value(&d);
            let back = descriptor_from_value(&v).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn element_roundtrips() {
        let els = vec![
            Element::Word(FreeWord::new([1, -2, 1]).unwrap()),
            Element::Vector(IntVector::from_i64s(&[-3, 0, 7])),
            Element::Perm(Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap()),
            Element::pair(
                Element::Vector(IntVector::from_i64s(&[1, 0])),
                Element::Vector(IntVector::from_i64s(&[5])),
            ),
        ];
        for el in els {
            let back = element_from_value(&element_to_value(&el)).unwrap();
            assert_eq!(back, el);
        }
    }

    #[test]
    fn big_integers_survive_exactly() {
        let huge = BigInt::parse_bytes(b"123456789012345678901234567890123", 10).unwrap();
        let v = bigint_value(&huge);
        assert_eq!(as_bigint(&v).unwrap(), huge);
        let text = serde_json::to_string(&v).unwrap();
        // An integer token, not a string or a float.
        assert_eq!(text, "123456789012345678901234567890123");
    }

    #[test]
    fn certificate_roundtrip_and_byte_stability() {
        let g = cat_map_group();
        let s = ball(&g, 1).unwrap();
        let options = PipelineOptions {
            compute_order: true,
            ..PipelineOptions::default()
        };
        let cert = construct_certificate(&g, &s, &options).unwrap();
        let v = certificate_to_value(&cert);
        let text1 = render_document(&v);
        let parsed: Value = serde_json::from_str(&text1).unwrap();
        let back = certificate_from_value(&parsed).unwrap();
        assert_eq!(back, cert);
        // Re-encoding the decoded certificate reproduces the bytes.
        let text2 = render_document(&certificate_to_value(&back));
        assert_eq!(text1, text2);
        // And the decoded certificate still verifies.
        assert!(verify_certificate(&back).unwrap().passed());
    }

    #[test]
    fn free_kernel_certificate_roundtrip() {
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
        let s: Vec<Element> = [FreeWord::identity(), FreeWord::generator(0)]
            .into_iter()
            .map(|w| Element::pair(Element::Word(w), e_q.clone()))
            .collect();
        let cert = construct_certificate(&g, &s, &PipelineOptions::default()).unwrap();
        let back = certificate_from_value(
            &serde_json::from_str(&render_document(&certificate_to_value(&cert))).unwrap(),
        )
        .unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back).unwrap().passed());
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let mut v = certificate_to_value(
            &construct_certificate(
                &cat_map_group(),
                &[cat_map_group().identity()],
                &PipelineOptions::default(),
            )
            .unwrap(),
        );
        v.as_object_mut()
            .unwrap()
            .insert("format".into(), Value::Number(Number::from(2)));
        let err = certificate_from_value(&v).unwrap_err();
        assert!(matches!(err, Error::FormatVersion { got: 2, expected: 1 }));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        // Wrong kind tag.
        let doc = document("something_else", vec![]);
        assert!(matches!(
            check_document(&doc, Some("certificate")),
            Err(Error::Malformed(_))
        ));
        // Non-bijective permutation.
        let v = obj(vec![
            ("kind", Value::String("perm".into())),
            (
                "images",
                Value::Array(vec![usize_value(0), usize_value(0)]),
            ),
        ]);
        assert!(matches!(element_from_value(&v), Err(Error::Malformed(_))));
        // Words reduce on input, so adjacent cancelling letters are fine,
        // but the letter 0 names no generator.
        let v = obj(vec![
            ("kind", Value::String("word".into())),
            (
                "letters",
                Value::Array(vec![
                    Value::Number(Number::from(1)),
                    Value::Number(Number::from(0)),
                ]),
            ),
        ]);
        assert!(matches!(element_from_value(&v), Err(Error::Malformed(_))));
        // A float where an integer belongs.
        let v: Value = serde_json::from_str("{\"kind\": \"free\", \"rank\": 2.5}").unwrap();
        assert!(matches!(descriptor_from_value(&v), Err(Error::Malformed(_))));
    }

    #[test]
    fn witness_and_core_roundtrip() {
        let w = FiniteIndexWitness::PermImages {
            rank: 2,
            degree: 3,
            images: vec![
                Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
            ],
        };
        assert_eq!(witness_from_value(&witness_to_value(&w)).unwrap(), w);
        let c = CharacteristicQuotient::Abelian {
            rank: 3,
            modulus: BigInt::from(12),
        };
        assert_eq!(core_from_value(&core_to_value(&c)).unwrap(), c);
    }
}

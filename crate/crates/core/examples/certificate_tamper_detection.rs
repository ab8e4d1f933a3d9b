//! Serialization round-trip and tamper detection.
//!
//! A certificate is only worth its re-verification: every stored field is
//! recomputed or cross-checked by `verify_certificate`, so silently editing
//! any load-bearing value must flip a named check to FAIL. This example
//! serializes a certificate to its canonical JSON document, applies three
//! single-field edits, and shows which check catches each one.

use finquot::pipeline::{construct_certificate, verify_certificate, PipelineOptions};
use finquot::serial::{certificate_from_value, certificate_to_value, render_document};
use serde_json::Value;

fn build() -> finquot::Result<finquot::pipeline::Certificate> {
    use finquot::group::{
        ActionPair, AutomorphismAction, Element, EndoSpec, GroupDescriptor, IntVector,
    };
    use finquot::matrix::IntMatrix;
    let g = GroupDescriptor::semidirect(
        GroupDescriptor::free_abelian(2),
        GroupDescriptor::free_abelian(1),
        AutomorphismAction {
            pairs: vec![ActionPair {
                forward: EndoSpec::Matrix(IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])),
                backward: EndoSpec::Matrix(IntMatrix::from_i64_rows(&[&[1, -1], &[-1, 2]])),
            }],
            relators: vec![],
        },
    )?;
    let seed = vec![
        Element::pair(
            Element::Vector(IntVector::from_i64s(&[1, 0])),
            Element::Vector(IntVector::from_i64s(&[0])),
        ),
        Element::pair(
            Element::Vector(IntVector::from_i64s(&[0, 0])),
            Element::Vector(IntVector::from_i64s(&[1])),
        ),
    ];
    construct_certificate(
        &g,
        &seed,
        &PipelineOptions {
            compute_order: true,
            ..PipelineOptions::default()
        },
    )
}

/// Re-verify a (possibly edited) document and report the failing checks.
fn failing_checks(doc: &Value) -> finquot::Result<Vec<String>> {
    let cert = certificate_from_value(doc)?;
    let report = verify_certificate(&cert)?;
    Ok(report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.to_string())
        .collect())
}

fn main() -> finquot::Result<()> {
    let cert = build()?;
    let doc = certificate_to_value(&cert);

    // Round trip: the rendered document re-parses to an equal certificate
    // and re-renders byte-identically.
    let text = render_document(&doc);
    let reparsed: Value = serde_json::from_str(&text)?;
    assert_eq!(certificate_from_value(&reparsed)?, cert);
    assert_eq!(render_document(&reparsed), text);
    println!("round trip: {} bytes, byte-stable, decodes equal", text.len());
    assert!(failing_checks(&doc)?.is_empty());
    println!("untampered document: all checks pass\n");

    // Tamper 1: overstate the kernel order. The order is recomputed from
    // the stored quotient choice, so the edit is caught by name.
    let mut t1 = doc.clone();
    t1["kernel_order"] = Value::from(8);
    t1["index"] = Value::from(8);
    let failed = failing_checks(&t1)?;
    println!("kernel_order 4 -> 8 fails: {:?}", failed);
    assert!(failed.contains(&"kernel-order".to_string()));

    // Tamper 2: claim injectivity while collapsing the stored seed images.
    let mut t2 = doc.clone();
    let first = t2["seed_images"][0].clone();
    t2["seed_images"][1] = first;
    let failed = failing_checks(&t2)?;
    println!("seed image duplicated fails: {:?}", failed);
    assert!(!failed.is_empty());

    // Tamper 3: flip a claim flag without touching the data it summarizes.
    let mut t3 = doc.clone();
    t3["claims"]["seed_injects"] = Value::Bool(false);
    let failed = failing_checks(&t3)?;
    println!("claim flag flipped fails: {:?}", failed);
    assert!(failed.contains(&"claims-consistent".to_string()));

    println!("\nevery edit was caught by a named check");
    Ok(())
}

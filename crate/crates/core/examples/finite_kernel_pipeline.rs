//! Finite kernel: Z/3 (as a permutation group) ⋊ Z/2 acting by inversion —
//! the symmetric group on three letters, presented as a semidirect product.
//!
//! A finite kernel is its own finite quotient, so the construction's choice
//! collapses to the identity: the witness is the identity map, the
//! characteristic subgroup is trivial, and |N| equals the kernel's order.
//! The run still produces and re-verifies a full certificate, which makes
//! it a good smoke test for the degenerate branch of every component.

use finquot::group::{ActionPair, AutomorphismAction, EndoSpec, GroupDescriptor, Permutation};
use finquot::pipeline::{construct_certificate, verify_certificate, PipelineOptions};

fn main() -> finquot::Result<()> {
    // Kernel: the cyclic group generated by the 3-cycle (0 1 2).
    let rot = Permutation::new(vec![1, 2, 0])?;
    let kernel = GroupDescriptor::finite_perm(3, vec![rot.clone()])?;
    // Quotient: Z/2 generated by the transposition (0 1).
    let flip = Permutation::new(vec![1, 0])?;
    let quotient = GroupDescriptor::finite_perm(2, vec![flip])?;
    // The flip inverts the rotation: a full element table of the
    // automorphism, checked against the group law on every pair.
    let table = vec![
        (Permutation::identity(3), Permutation::identity(3)),
        (rot.clone(), rot.inverse()),
        (rot.inverse(), rot.clone()),
    ];
    let g = GroupDescriptor::semidirect(
        kernel,
        quotient,
        AutomorphismAction {
            pairs: vec![ActionPair {
                forward: EndoSpec::Table(table.clone()),
                backward: EndoSpec::Table(table),
            }],
            relators: vec![],
        },
    )?;

    // Subset: both generators of the semidirect product.
    let seed = g.generators();
    println!("subset: the {} generators", seed.len());

    let options = PipelineOptions {
        compute_order: true,
        ..PipelineOptions::default()
    };
    let cert = construct_certificate(&g, &seed, &options)?;

    match &cert.witness {
        finquot::separation::FiniteIndexWitness::Identity { degree, .. } => {
            println!("witness: identity map on the degree-{} kernel", degree);
        }
        other => println!("witness: {:?}", other),
    }
    let order = cert.kernel_order.clone().expect("order was requested");
    println!("|N| = {} (the kernel itself)", order);
    println!("index = {}", cert.index.as_ref().expect("order was requested"));
    assert_eq!(order.to_string(), "3");

    let report = verify_certificate(&cert)?;
    for check in &report.checks {
        println!(
            "check {:<28} {}",
            check.name,
            if check.passed { "pass" } else { "FAIL" }
        );
    }
    assert!(report.passed());
    assert!(cert.all_claims_hold());

    // The seed images live in the quotient group N ⋊ Q; with a trivial
    // characteristic subgroup they are the seed elements themselves.
    assert_eq!(cert.seed_images, cert.seed);
    println!("projection fixes the subset: the quotient is the group itself");
    Ok(())
}

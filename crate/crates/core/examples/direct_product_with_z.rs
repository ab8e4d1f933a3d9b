//! The degenerate action: Z^2 × Z as a semidirect product with trivial
//! twist, seeded with the whole radius-1 ball.
//!
//! With the identity action the construction reduces to the classical
//! congruence argument for Z^2: reduce the kernel mod m. The ball of radius
//! one around the identity contains every generator and inverse, so keeping
//! it injective exercises every difference of nearby elements at once.

use finquot::group::{ball, AutomorphismAction, GroupDescriptor};
use finquot::pipeline::{construct_certificate, verify_certificate, PipelineOptions};

fn main() -> finquot::Result<()> {
    let kernel = GroupDescriptor::free_abelian(2);
    let quotient = GroupDescriptor::free_abelian(1);
    let action = AutomorphismAction::trivial(&kernel, 1)?;
    let g = GroupDescriptor::semidirect(kernel, quotient, action)?;

    // Seed: the full ball of radius 1 (identity, generators, inverses).
    let seed = ball(&g, 1)?;
    println!("radius-1 ball size: {}", seed.len());

    let options = PipelineOptions {
        compute_order: true,
        ..PipelineOptions::default()
    };
    let cert = construct_certificate(&g, &seed, &options)?;

    match &cert.witness {
        finquot::separation::FiniteIndexWitness::Modulus { modulus, .. } => {
            println!("separating modulus: {}", modulus);
        }
        other => println!("witness: {:?}", other),
    }
    println!(
        "kernel order |N|: {}",
        cert.kernel_order.as_ref().expect("order was requested")
    );
    println!("index: {}", cert.index.as_ref().expect("order was requested"));

    let report = verify_certificate(&cert)?;
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    println!(
        "verification: {}/{} checks passed",
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    for check in failed {
        println!("  FAIL {}: {}", check.name, check.detail);
    }
    assert!(report.passed());
    assert!(cert.all_claims_hold());

    // The ball's kernel differences span coordinates up to 2, so the modulus
    // must exceed 2 and N = (Z/m)^2 has order m^2.
    let m = match &cert.witness {
        finquot::separation::FiniteIndexWitness::Modulus { modulus, .. } => modulus.clone(),
        _ => unreachable!("abelian kernels always get a modulus witness"),
    };
    assert_eq!(
        cert.kernel_order.clone().expect("order was requested"),
        (&m * &m).try_into().expect("modulus is positive"),
    );
    println!("|N| = modulus^2 as expected");
    Ok(())
}

//! Free kernel: F_2 ⋊ Z where the stable letter maps x -> xy, y -> y.
//!
//! The subset is the kernel's radius-1 ball paired with the quotient
//! identity. Separating its differences needs honest free-group machinery:
//! a permutation witness built from the prefix tree of the difference words,
//! then the intersection N_d of kernels of all homomorphisms into Sym(d).
//!
//! Two runs are shown. The default caps pick the largest degree d whose
//! homomorphism count fits the budget and certify the injectivity and
//! homomorphism claims without computing |F_2 / N_d| (enormous already at
//! d = 4). A second run lowers the budget so d = 3, where the order is
//! computable and equals 972.

use finquot::group::{
    ball, ActionPair, AutomorphismAction, Element, EndoSpec, FreeWord, GroupDescriptor,
};
use finquot::pipeline::{construct_certificate, verify_certificate, PipelineOptions};

fn main() -> finquot::Result<()> {
    // x -> xy, y -> y extends to an automorphism (a Nielsen transformation);
    // its inverse sends x -> xy^-1, y -> y.
    let g = GroupDescriptor::semidirect(
        GroupDescriptor::free(2),
        GroupDescriptor::free(1),
        AutomorphismAction {
            pairs: vec![ActionPair {
                forward: EndoSpec::Words(vec![
                    FreeWord::new([1, 2])?,
                    FreeWord::new([2])?,
                ]),
                backward: EndoSpec::Words(vec![
                    FreeWord::new([1, -2])?,
                    FreeWord::new([2])?,
                ]),
            }],
            relators: vec![],
        },
    )?;

    // Kernel ball of radius 1, embedded with the quotient identity.
    let kernel = GroupDescriptor::free(2);
    let quotient_id = Element::Word(FreeWord::identity());
    let seed: Vec<Element> = ball(&kernel, 1)?
        .into_iter()
        .map(|k| Element::pair(k, quotient_id.clone()))
        .collect();
    println!("subset: kernel radius-1 ball, {} elements", seed.len());

    // Run 1: default caps. The witness degree is large, so the chosen d is
    // whatever the homomorphism budget allows.
    let cert = construct_certificate(&g, &seed, &PipelineOptions::default())?;
    println!(
        "kernel differences: {}",
        cert.kernel_differences.len()
    );
    if let finquot::separation::FiniteIndexWitness::PermImages { degree, .. } = &cert.witness {
        println!("separation witness degree: {}", degree);
    }
    if let finquot::charcore::CharacteristicQuotient::Free {
        symmetric_degree, ..
    } = &cert.core
    {
        println!("chosen characteristic quotient: N_{}", symmetric_degree);
    }
    println!(
        "claims: homomorphism {}, injective {}",
        cert.claims.quotient_map, cert.claims.seed_injects
    );
    let report = verify_certificate(&cert)?;
    assert!(report.passed());
    println!("re-verification: all {} checks passed", report.checks.len());

    // Run 2: lower the budget so d = 3 and the order is computable.
    println!();
    let small = PipelineOptions {
        compute_order: true,
        max_homs: 36, // (3!)^2 homomorphisms F_2 -> Sym(3)
        ..PipelineOptions::default()
    };
    let cert3 = construct_certificate(&g, &seed, &small)?;
    if let finquot::charcore::CharacteristicQuotient::Free {
        symmetric_degree, ..
    } = &cert3.core
    {
        println!("with a budget of 36 homomorphisms: N_{}", symmetric_degree);
        assert_eq!(*symmetric_degree, 3);
    }
    let order = cert3.kernel_order.clone().expect("order was requested");
    println!("|F_2 / N_3| = {}", order);
    println!(
        "index of the quotient copy of Z: {}",
        cert3.index.as_ref().expect("order was requested")
    );
    assert_eq!(order.to_string(), "972");
    assert!(cert3.all_claims_hold());
    let report3 = verify_certificate(&cert3)?;
    assert!(report3.passed());
    println!("re-verification: all {} checks passed", report3.checks.len());
    Ok(())
}

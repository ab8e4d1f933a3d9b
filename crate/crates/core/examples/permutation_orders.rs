//! Orders and membership for permutation groups via stabilizer chains.
//!
//! A stabilizer chain (base and strong generating set) turns a generator
//! list into exact group order, membership tests, and base images — the
//! machinery behind every |N| computed for a finite kernel quotient.

use finquot::group::Permutation;
use finquot::permgroup::{StabilizerChain, DEFAULT_OP_BUDGET};

fn main() -> finquot::Result<()> {
    // Sym(8) from a transposition and an 8-cycle.
    let cycle = Permutation::new(vec![1, 2, 3, 4, 5, 6, 7, 0])?;
    let swap = Permutation::from_cycles(8, &[&[0, 1]])?;
    let sym8 = StabilizerChain::new(8, &[cycle.clone(), swap.clone()])?;
    println!("⟨8-cycle, transposition⟩: order {}", sym8.order());
    assert_eq!(sym8.order().to_string(), "40320"); // 8!

    // The dihedral group of the octagon: the same cycle with a reflection.
    let reflect = Permutation::new(vec![0, 7, 6, 5, 4, 3, 2, 1])?;
    let d8 = StabilizerChain::new(8, &[cycle.clone(), reflect.clone()])?;
    println!("⟨8-cycle, reflection⟩:   order {}", d8.order());
    assert_eq!(d8.order().to_string(), "16");

    // Membership: the chain sifts an element through its transversals.
    let in_d8 = cycle.compose(&reflect);
    let not_in_d8 = swap;
    println!(
        "rotation·reflection in the dihedral group: {}",
        d8.contains(&in_d8)
    );
    println!("a bare transposition in it: {}", d8.contains(&not_in_d8));
    assert!(d8.contains(&in_d8) && !d8.contains(&not_in_d8));

    // Base points: the stabilized sequence underlying the chain.
    println!("dihedral base points: {:?}", d8.base_points());

    // Construction work is budgeted. An absurdly small budget fails fast
    // with a cap error instead of grinding; the default is generous.
    let tiny = StabilizerChain::with_budget(8, &[cycle.clone(), not_in_d8.clone()], 10);
    match tiny {
        Err(e) => println!("budget 10: {}", e),
        Ok(_) => unreachable!("10 words cannot build a chain on 8 points"),
    }
    let full = StabilizerChain::with_budget(8, &[cycle], DEFAULT_OP_BUDGET)?;
    println!("default budget rebuild: order {}", full.order());
    assert_eq!(full.order().to_string(), "8");

    println!("\nchains, orders, membership and budgets all behave");
    Ok(())
}

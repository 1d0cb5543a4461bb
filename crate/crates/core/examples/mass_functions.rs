//! Learned weights read as Dempster-Shafer masses: combination, pignistic and
//! plausibility transforms.

use fca_agenda::agenda::{dempster_combine, normalize_to_mass, pignistic, plausibility_transform};
use fca_agenda::{AgendaWeights, BitSet, MassFunction};

fn main() -> fca_agenda::Result<()> {
    // features: 0 colour, 1 size, 2 sweetness
    let set = |fs: &[usize]| BitSet::from_indices(3, fs.iter().copied());

    let weights = AgendaWeights::new(vec![set(&[0]), set(&[1, 2]), set(&[2])], vec![0.2, -0.1, 0.7])?;
    let agent = normalize_to_mass(&weights, true)?;
    println!("agent A masses (negative weight clipped):");
    for (s, m) in agent.focal_sets() {
        println!("  {:?}: {m:.4}", s.to_vec());
    }

    let other = MassFunction::new(3, [(set(&[2]), 0.5), (set(&[0, 1, 2]), 0.5)])?;
    let combined = dempster_combine(&agent, &other)?;
    println!("combined with agent B:");
    for (s, m) in combined.focal_sets() {
        println!("  {:?}: {m:.4}", s.to_vec());
    }
    println!("pignistic    {:?}", pignistic(&combined)?);
    println!("plausibility {:?}", plausibility_transform(&combined)?);

    let vacuous = MassFunction::vacuous(3);
    assert_eq!(dempster_combine(&combined, &vacuous)?, combined);
    println!("the vacuous mass changes nothing");
    Ok(())
}

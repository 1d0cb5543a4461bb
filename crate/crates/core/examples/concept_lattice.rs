//! Derivations and the concept lattice of a small planets context.

use fca_agenda::lattice::enumerate_concepts;
use fca_agenda::{BitSet, FormalContext};

fn main() -> fca_agenda::Result<()> {
    let planets = ["Mercury", "Venus", "Earth", "Mars", "Jupiter", "Saturn"];
    let features = ["small", "large", "near", "far", "moons"];
    let has = [
        ("Mercury", ["small", "near"].as_slice()),
        ("Venus", &["small", "near"]),
        ("Earth", &["small", "near", "moons"]),
        ("Mars", &["small", "near", "moons"]),
        ("Jupiter", &["large", "far", "moons"]),
        ("Saturn", &["large", "far", "moons"]),
    ];
    let index = |name: &str| features.iter().position(|f| *f == name).unwrap();
    let mut pairs = Vec::new();
    for (o, (_, fs)) in has.iter().enumerate() {
        pairs.extend(fs.iter().map(|f| (o, index(f))));
    }
    let ctx = FormalContext::new(
        planets.iter().map(|s| s.to_string()).collect(),
        features.iter().map(|s| s.to_string()).collect(),
        pairs,
    )?;

    let earth_mars = BitSet::from_indices(ctx.num_objects(), [2, 3]);
    let shared = ctx.derive_intent(&earth_mars);
    println!("Earth and Mars share {:?}", names(ctx.features(), &shared));
    let moons = BitSet::from_indices(ctx.num_features(), [index("moons")]);
    println!(
        "moons closes to {:?}",
        names(ctx.features(), &ctx.closure_features(&moons))
    );

    let lattice = enumerate_concepts(&ctx)?;
    println!("{} concepts:", lattice.len());
    for c in lattice.concepts() {
        println!(
            "  {:?} / {:?}",
            names(ctx.objects(), &c.extent),
            names(ctx.features(), &c.intent)
        );
    }
    Ok(())
}

fn names(all: &[String], set: &BitSet) -> Vec<String> {
    set.iter().map(|i| all[i].clone()).collect()
}

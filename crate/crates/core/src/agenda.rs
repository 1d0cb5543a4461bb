//! Agendas: mass functions over feature sets, real-valued weights over basis
//! lattices, Dempster's rule, probability transforms and basis selection.

use std::collections::{BTreeMap, BTreeSet};

use crate::bitset::BitSet;
use crate::context::FeatureSet;
use crate::error::{Error, Result};
use crate::scaling::AttributeGroups;

/// Tolerance on the total mass of a mass function.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Normalized, non-negative masses over distinct feature sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    universe: usize,
    masses: BTreeMap<FeatureSet, f64>,
}

impl MassFunction {
    /// Validates and builds a mass function. Zero-mass entries are dropped;
    /// repeated focal sets are merged.
    pub fn new<I: IntoIterator<Item = (FeatureSet, f64)>>(universe: usize, entries: I) -> Result<Self> {
        let mut masses: BTreeMap<FeatureSet, f64> = BTreeMap::new();
        for (set, m) in entries {
            if set.universe() != universe {
                return Err(Error::InvalidMass(format!(
                    "focal set over universe {} instead of {universe}",
                    set.universe()
                )));
            }
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidMass(format!("mass {m} outside [0, 1]")));
            }
            if m > 0.0 {
                *masses.entry(set).or_insert(0.0) += m;
            }
        }
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}")));
        }
        Ok(MassFunction { universe, masses })
    }

    /// All mass on the full feature set.
    pub fn vacuous(universe: usize) -> Self {
        MassFunction {
            universe,
            masses: BTreeMap::from([(BitSet::full(universe), 1.0)]),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn mass(&self, set: &FeatureSet) -> f64 {
        self.masses.get(set).copied().unwrap_or(0.0)
    }

    /// Focal sets with their masses, in canonical set order.
    pub fn focal_sets(&self) -> impl Iterator<Item = (&FeatureSet, f64)> {
        self.masses.iter().map(|(s, &m)| (s, m))
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }
}

/// Real weights attached to the lattices of a basis of agendas. Negative
/// weights are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct AgendaWeights {
    basis: Vec<FeatureSet>,
    weights: Vec<f64>,
}

impl AgendaWeights {
    pub fn new(basis: Vec<FeatureSet>, weights: Vec<f64>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if basis.len() != weights.len() {
            return Err(Error::InvalidConfig(format!(
                "{} weights for {} agendas",
                weights.len(),
                basis.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite weight {w}")));
        }
        let distinct: BTreeSet<&FeatureSet> = basis.iter().collect();
        if distinct.len() != basis.len() {
            return Err(Error::InvalidConfig("duplicate agenda in basis".into()));
        }
        if basis.windows(2).any(|w| w[0].universe() != w[1].universe()) {
            return Err(Error::InvalidConfig("agendas over different feature universes".into()));
        }
        Ok(AgendaWeights { basis, weights })
    }

    pub fn basis(&self) -> &[FeatureSet] {
        &self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn universe(&self) -> usize {
        self.basis[0].universe()
    }

    pub fn scaled(&self, c: f64) -> AgendaWeights {
        AgendaWeights {
            basis: self.basis.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }
}

/// Turns weights into masses proportional to the weights. With `clip`,
/// negative weights count as zero first.
pub fn normalize_to_mass(w: &AgendaWeights, clip: bool) -> Result<MassFunction> {
    let adjusted: Vec<f64> = if clip {
        w.weights.iter().map(|&x| x.max(0.0)).collect()
    } else {
        if let Some(&neg) = w.weights.iter().find(|&&x| x < 0.0) {
            return Err(Error::NegativeWeight(neg));
        }
        w.weights.clone()
    };
    let total: f64 = adjusted.iter().sum();
    if total <= 0.0 {
        return Err(Error::NoMass);
    }
    MassFunction::new(
        w.universe(),
        w.basis.iter().cloned().zip(adjusted.iter().map(|x| x / total)),
    )
}

/// Dempster's rule of combination.
pub fn dempster_combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    if m1.universe != m2.universe {
        return Err(Error::InvalidMass(
            "combining mass functions over different universes".into(),
        ));
    }
    let mut joint: BTreeMap<FeatureSet, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (a, ma) in &m1.masses {
        for (b, mb) in &m2.masses {
            let z = a.intersection(b);
            let p = ma * mb;
            if z.is_empty() {
                conflict += p;
            } else {
                *joint.entry(z).or_insert(0.0) += p;
            }
        }
    }
    let norm = 1.0 - conflict;
    if joint.is_empty() || norm <= 0.0 {
        return Err(Error::TotalConflict);
    }
    let masses = joint.into_iter().map(|(z, p)| (z, p / norm)).collect();
    Ok(MassFunction {
        universe: m1.universe,
        masses,
    })
}

/// Splits every focal set's mass equally among its features.
pub fn pignistic(m: &MassFunction) -> Result<Vec<f64>> {
    let mut out = vec![0.0; m.universe];
    for (set, mass) in &m.masses {
        let size = set.count();
        if size == 0 {
            return Err(Error::MassOnEmptySet);
        }
        for f in set {
            out[f] += mass / size as f64;
        }
    }
    Ok(out)
}

/// Singleton plausibilities, normalized to sum to one.
pub fn plausibility_transform(m: &MassFunction) -> Result<Vec<f64>> {
    let mut pl = vec![0.0; m.universe];
    for (set, mass) in &m.masses {
        for f in set {
            pl[f] += mass;
        }
    }
    let total: f64 = pl.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegeneratePlausibility);
    }
    Ok(pl.into_iter().map(|p| p / total).collect())
}

/// Whether agendas are built from whole attribute blocks or single features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Granularity {
    #[default]
    Attribute,
    Feature,
}

impl Granularity {
    /// The blocks agendas are assembled from.
    pub fn blocks(self, groups: &AttributeGroups, feature_names: &[String]) -> AttributeGroups {
        match self {
            Granularity::Attribute => groups.clone(),
            Granularity::Feature => AttributeGroups::new(
                feature_names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), i..i + 1))
                    .collect(),
            )
            .expect("singleton blocks partition the features"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisStrategy {
    Bounded,
    Expert,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisStrategyConfig {
    pub strategy: BasisStrategy,
    /// Largest agenda size in blocks (initial size for the adaptive strategy).
    pub alpha: usize,
    pub include_full: bool,
    /// Adaptive dropping threshold on clip-normalized mass.
    pub tau: f64,
    pub max_rounds: usize,
    /// Largest candidate size in blocks; `None` grows by one block per round.
    pub size_cap: Option<usize>,
}

impl Default for BasisStrategyConfig {
    fn default() -> Self {
        BasisStrategyConfig {
            strategy: BasisStrategy::Bounded,
            alpha: 1,
            include_full: false,
            tau: 0.05,
            max_rounds: 5,
            size_cap: None,
        }
    }
}

impl BasisStrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::InvalidConfig("alpha must be at least 1".into()));
        }
        if !(self.tau >= 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidConfig(format!("tau {} outside [0, 1)", self.tau)));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        Ok(())
    }
}

/// Orders agendas by number of features, then lexicographically.
pub fn canonical_order(basis: &mut Vec<FeatureSet>) {
    basis.sort_by(|a, b| a.count().cmp(&b.count()).then_with(|| a.cmp(b)));
    basis.dedup();
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), &mut visit);
}

fn block_unions(groups: &AttributeGroups, pool: &[usize], max_size: usize) -> Vec<FeatureSet> {
    let mut out = Vec::new();
    for k in 1..=max_size.min(pool.len()) {
        combinations(pool.len(), k, |idx| {
            let blocks: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
            out.push(groups.union_of(&blocks));
        });
    }
    out
}

/// Every union of at most `alpha` blocks, plus the full feature set when
/// `include_full` is set.
pub fn basis_bounded(groups: &AttributeGroups, alpha: usize, include_full: bool) -> Result<Vec<FeatureSet>> {
    if alpha == 0 || alpha > groups.len() {
        return Err(Error::InvalidConfig(format!(
            "alpha {alpha} outside 1..={}",
            groups.len()
        )));
    }
    let pool: Vec<usize> = (0..groups.len()).collect();
    let mut basis = block_unions(groups, &pool, alpha);
    if include_full {
        basis.push(BitSet::full(groups.num_features()));
    }
    canonical_order(&mut basis);
    Ok(basis)
}

/// Validates user-supplied agendas. Each name is an attribute (its whole
/// block) or a single scaled feature name.
pub fn basis_expert(
    agendas: &[Vec<String>],
    groups: &AttributeGroups,
    feature_names: &[String],
) -> Result<Vec<FeatureSet>> {
    if agendas.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let mut basis = Vec::with_capacity(agendas.len());
    for names in agendas {
        let mut set = BitSet::empty(groups.num_features());
        for name in names {
            if let Some(r) = groups.block(name) {
                for f in r {
                    set.insert(f);
                }
            } else if let Some(f) = feature_names.iter().position(|n| n == name) {
                set.insert(f);
            } else {
                return Err(Error::UnknownFeature(name.clone()));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidConfig("empty expert agenda".into()));
        }
        basis.push(set);
    }
    canonical_order(&mut basis);
    Ok(basis)
}

/// What happened in one adaptive round.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveRound {
    pub basis: Vec<FeatureSet>,
    pub weights: Vec<f64>,
    pub masses: Vec<f64>,
    pub survivors: Vec<FeatureSet>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveOutcome {
    pub weights: AgendaWeights,
    pub rounds: Vec<AdaptiveRound>,
}

fn clipped_masses(weights: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        vec![0.0; weights.len()]
    } else {
        clipped.iter().map(|c| c / total).collect()
    }
}

/// Grows a basis round by round: train, drop agendas whose clip-normalized
/// mass falls below `tau`, then add every union of surviving blocks up to the
/// size cap. `train` returns one weight per agenda of the basis it is given.
///
/// Stops when a round adds nothing new, every newly added agenda is dropped,
/// the full feature set survives, or `max_rounds` is reached. The returned
/// weights belong to the final survivors, retrained if pruning changed the
/// basis.
pub fn basis_adaptive<F>(
    groups: &AttributeGroups,
    config: &BasisStrategyConfig,
    mut train: F,
) -> Result<AdaptiveOutcome>
where
    F: FnMut(&[FeatureSet]) -> Result<Vec<f64>>,
{
    config.validate()?;
    let full = BitSet::full(groups.num_features());
    let mut basis = basis_bounded(groups, config.alpha.min(groups.len()), false)?;
    let mut dropped: BTreeSet<FeatureSet> = BTreeSet::new();
    let mut previous_survivors: Vec<FeatureSet> = Vec::new();
    let mut rounds: Vec<AdaptiveRound> = Vec::new();

    let final_basis = loop {
        let weights = train(&basis)?;
        let masses = clipped_masses(&weights);
        let survivors: Vec<FeatureSet> = basis
            .iter()
            .zip(&masses)
            .filter(|(_, &m)| m >= config.tau)
            .map(|(a, _)| a.clone())
            .collect();
        let newly_added: Vec<&FeatureSet> = basis.iter().filter(|a| !previous_survivors.contains(a)).collect();
        let all_new_dropped = newly_added.iter().all(|a| !survivors.contains(a));
        for a in &basis {
            if !survivors.contains(a) {
                dropped.insert(a.clone());
            }
        }
        rounds.push(AdaptiveRound {
            basis: basis.clone(),
            weights,
            masses,
            survivors: survivors.clone(),
        });

        if survivors.is_empty() {
            if rounds.len() == 1 {
                return Err(Error::NoSurvivingAgenda);
            }
            break previous_survivors;
        }
        if rounds.len() > 1 && all_new_dropped {
            break survivors;
        }
        if rounds.len() >= config.max_rounds || survivors.contains(&full) {
            break survivors;
        }

        let mut union = BitSet::empty(groups.num_features());
        for s in &survivors {
            union.union_with(s);
        }
        let pool = groups.blocks_within(&union);
        let prev_max = basis.iter().map(|a| groups.blocks_within(a).len()).max().unwrap_or(1);
        let cap = config.size_cap.unwrap_or(prev_max + 1);
        let candidates: Vec<FeatureSet> = block_unions(groups, &pool, cap)
            .into_iter()
            .filter(|c| !dropped.contains(c) && !survivors.contains(c))
            .collect();
        if candidates.is_empty() {
            break survivors;
        }
        previous_survivors = survivors.clone();
        basis = survivors.into_iter().chain(candidates).collect();
        canonical_order(&mut basis);
    };

    let last = rounds.last().expect("at least one round ran");
    let weights = if last.basis == final_basis {
        last.weights.clone()
    } else {
        train(&final_basis)?
    };
    Ok(AdaptiveOutcome {
        weights: AgendaWeights::new(final_basis, weights)?,
        rounds,
    })
}

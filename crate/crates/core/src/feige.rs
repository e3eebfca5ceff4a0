//! Finitely supported nonnegative distributions with exact-rational
//! atoms: means, exact i.i.d. convolution tails, the mass-at-zero
//! damping transform, and a seeded search for tail-maximizing mean-1
//! distributions.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::rat::{from_frac_string, rat_int, snap_to_rational, to_f64, to_frac_string, Rat};
use crate::thresholds::{feige_conjecture_value, garnett_bound, han_g, markov_bound};
use crate::{Error, Result};

/// Default ceiling on composite atoms formed during one convolution step.
pub const DEFAULT_ATOM_CAP: u64 = 10_000_000;

/// A finitely supported distribution on nonnegative rationals.
/// Atoms are sorted by value, values distinct, probabilities in (0,1]
/// summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDistribution {
    atoms: Vec<(Rat, Rat)>,
}

impl DiscreteDistribution {
    /// Builds a distribution, merging atoms with equal values.
    pub fn new(atoms: impl IntoIterator<Item = (Rat, Rat)>) -> Result<Self> {
        let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (value, prob) in atoms {
            if value < Rat::zero() {
                return Err(Error::Validation(format!(
                    "negative atom value {}",
                    to_frac_string(&value)
                )));
            }
            if prob <= Rat::zero() {
                return Err(Error::Validation(format!(
                    "atom probability {} not in (0,1]",
                    to_frac_string(&prob)
                )));
            }
            *merged.entry(value).or_insert_with(Rat::zero) += prob;
        }
        let total: Rat = merged.values().sum();
        if total != Rat::one() {
            return Err(Error::Validation(format!(
                "probabilities sum to {}, expected 1",
                to_frac_string(&total)
            )));
        }
        Ok(Self {
            atoms: merged.into_iter().collect(),
        })
    }

    pub fn point(value: Rat) -> Self {
        Self {
            atoms: vec![(value, Rat::one())],
        }
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn mean(&self) -> Rat {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    /// Least common denominator of the atom probabilities: the smallest
    /// block count realizing the law with equal-mass blocks.
    pub fn prob_lcd(&self) -> BigInt {
        self.atoms
            .iter()
            .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()))
    }

    /// Rescales every atom value by `factor` (law of factor * X).
    pub fn scale(&self, factor: &Rat) -> Result<Self> {
        if *factor <= Rat::zero() {
            return Err(Error::Validation("scale factor must be positive".into()));
        }
        Self::new(self.atoms.iter().map(|(v, p)| (v * factor, p.clone())))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let atoms: Vec<serde_json::Value> = self
            .atoms
            .iter()
            .map(|(v, p)| {
                serde_json::json!({"value": to_frac_string(v), "prob": to_frac_string(p)})
            })
            .collect();
        serde_json::json!({ "atoms": atoms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct AtomWire {
            value: String,
            prob: String,
        }
        #[derive(Deserialize)]
        struct Wire {
            atoms: Vec<AtomWire>,
        }
        let wire: Wire = serde_json::from_value(v.clone())
            .map_err(|e| Error::Format(format!("bad distribution JSON: {e}")))?;
        let mut atoms = Vec::new();
        for a in wire.atoms {
            atoms.push((from_frac_string(&a.value)?, from_frac_string(&a.prob)?));
        }
        Self::new(atoms)
    }
}

/// Exact Pr[X_1 + ... + X_l >= t] for i.i.d. X_i ~ d, by iterated
/// convolution with atom merging. Inclusive threshold.
pub fn iid_tail(d: &DiscreteDistribution, l: u32, t: &Rat, atom_cap: u64) -> Result<Rat> {
    if l < 1 {
        return Err(Error::InvalidQuery("need l >= 1".into()));
    }
    let mut sum: BTreeMap<Rat, Rat> = d.atoms.iter().cloned().collect();
    for _ in 1..l {
        let composite = (sum.len() as u64).saturating_mul(d.atoms.len() as u64);
        if composite > atom_cap {
            return Err(Error::ResourceLimit {
                required: composite as u128,
                cap: atom_cap as u128,
            });
        }
        let mut next: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (sv, sp) in &sum {
            for (av, ap) in &d.atoms {
                *next.entry(sv + av).or_insert_with(Rat::zero) += sp * ap;
            }
        }
        sum = next;
    }
    Ok(sum
        .range(t.clone()..)
        .map(|(_, p)| p.clone())
        .sum())
}

/// The two-point mean-1 law taking value l+d with probability 1/(l+d),
/// zero otherwise.
pub fn conjectured_extremizer(l: u32, d: &Rat) -> Result<DiscreteDistribution> {
    let ld = rat_int(l as i64) + d;
    if ld <= Rat::one() {
        return Err(Error::InvalidQuery("need l + d > 1".into()));
    }
    let p = ld.recip();
    DiscreteDistribution::new(vec![(Rat::zero(), Rat::one() - &p), (ld, p)])
}

/// Mixes mass `delta` at zero with X/(1-delta): mean-preserving.
pub fn damping_transform(d: &DiscreteDistribution, delta: &Rat) -> Result<DiscreteDistribution> {
    if *delta <= Rat::zero() || *delta >= Rat::one() {
        return Err(Error::InvalidQuery(format!(
            "damping parameter {} outside (0,1)",
            to_frac_string(delta)
        )));
    }
    let keep = Rat::one() - delta;
    let mut atoms: Vec<(Rat, Rat)> = vec![(Rat::zero(), delta.clone())];
    for (v, p) in &d.atoms {
        atoms.push((v / &keep, p * &keep));
    }
    DiscreteDistribution::new(atoms)
}

/// Tuning for the theta search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub refine_rounds: usize,
    /// interval shrink per refinement round, as a multiplier
    pub shrink: f64,
    pub snap_max_denominator: u64,
    pub atom_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 64,
            refine_rounds: 6,
            shrink: 0.25,
            snap_max_denominator: 10_000,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

/// Outcome of a theta search: the best mean-1 distribution found and its
/// exact tail at threshold l+d (a certified lower bound on the supremum).
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: DiscreteDistribution,
    pub value: Rat,
    /// exact candidates that beat the conjectured bound, if any
    pub conjecture_counterexamples: Vec<(DiscreteDistribution, Rat)>,
}

/// Seeded lower-bound search for the supremum of Pr[sum >= l+d] over
/// mean-1 laws with the given support size. Candidates are scored in
/// floating point, the winners snapped to small-denominator rationals
/// and re-evaluated exactly; only exact values are reported.
pub fn theta_lower_search(
    l: u32,
    d: &Rat,
    support_size: usize,
    budget: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    if !(2..=4).contains(&support_size) {
        return Err(Error::InvalidQuery(format!(
            "support size {support_size} outside 2..=4"
        )));
    }
    if l < 1 || *d <= Rat::zero() {
        return Err(Error::InvalidQuery("need l >= 1 and d > 0".into()));
    }
    let limit = to_f64(&(rat_int(l as i64) + d)); // values live in [0, l+d]
    let threshold = rat_int(l as i64) + d;
    let dims = 2 * support_size - 2; // support_size values + support_size-2 free probs

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0usize;

    // full grid when it fits in the budget, otherwise seeded sampling
    let mut center = vec![0.5f64; dims];
    let mut half_width = vec![0.5f64; dims];
    let mut best_score = f64::NEG_INFINITY;
    let mut best_params: Option<Vec<f64>> = None;

    let grid_total = (config.grid_points as f64).powi(dims as i32);
    let initial: Vec<Vec<f64>> = if grid_total <= budget as f64 && dims <= 2 {
        full_grid(dims, config.grid_points)
    } else {
        (0..budget.max(1))
            .map(|_| (0..dims).map(|_| rng.gen::<f64>()).collect())
            .collect()
    };
    for unit in initial {
        if evals >= budget && best_params.is_some() {
            break;
        }
        evals += 1;
        if let Some(score) = score_unit(&unit, support_size, l, limit) {
            if score > best_score {
                best_score = score;
                best_params = Some(unit);
            }
        }
    }

    // coordinate-wise refinement around the incumbent
    if let Some(ref incumbent) = best_params.clone() {
        center = incumbent.clone();
        for _ in 0..config.refine_rounds {
            for dim in 0..dims {
                let steps = 9;
                for s in 0..steps {
                    let frac = s as f64 / (steps - 1) as f64;
                    let lo = (center[dim] - half_width[dim]).max(0.0);
                    let hi = (center[dim] + half_width[dim]).min(1.0);
                    let mut cand = center.clone();
                    cand[dim] = lo + frac * (hi - lo);
                    if evals >= 2 * budget {
                        break;
                    }
                    evals += 1;
                    if let Some(score) = score_unit(&cand, support_size, l, limit) {
                        if score > best_score {
                            best_score = score;
                            center = cand;
                        }
                    }
                }
            }
            for w in half_width.iter_mut() {
                *w *= config.shrink;
            }
        }
        best_params = Some(center);
    }

    // snap to small-denominator rationals and re-evaluate exactly;
    // also always evaluate the conjectured extremizer as a baseline.
    let mut candidates: Vec<DiscreteDistribution> = Vec::new();
    if let Some(p) = &best_params {
        if let Some(dist) = snap_candidate(p, support_size, &threshold, config.snap_max_denominator)
        {
            candidates.push(dist);
        }
    }
    candidates.push(conjectured_extremizer(l, d)?);

    let mut best: Option<(Rat, DiscreteDistribution)> = None;
    let mut counterexamples = Vec::new();
    let conj = feige_conjecture_value(l, d)?;
    for dist in candidates {
        let value = iid_tail(&dist, l, &threshold, config.atom_cap)?;
        enforce_proven_bounds(&value, l, d)?;
        if value > conj {
            counterexamples.push((dist.clone(), value.clone()));
        }
        let better = match &best {
            None => true,
            Some((bv, bd)) => value > *bv || (value == *bv && dist.atoms < bd.atoms),
        };
        if better {
            best = Some((value, dist));
        }
    }
    let (value, best) = best.expect("at least the extremizer is evaluated");
    Ok(SearchOutcome {
        best,
        value,
        conjecture_counterexamples: counterexamples,
    })
}

fn full_grid(dims: usize, points: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; dims];
    loop {
        out.push(
            idx.iter()
                .map(|&i| i as f64 / (points - 1) as f64)
                .collect(),
        );
        let mut dim = 0;
        loop {
            if dim == dims {
                return out;
            }
            idx[dim] += 1;
            if idx[dim] < points {
                break;
            }
            idx[dim] = 0;
            dim += 1;
        }
    }
}

/// Decodes a unit-cube point into (values, probs) and scores its exact
/// tail in floating point. Returns None for infeasible decodings.
fn decode_unit(unit: &[f64], support_size: usize, limit: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut values: Vec<f64> = unit[..support_size].iter().map(|u| u * limit).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if values
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < 1e-12)
    {
        return None;
    }
    // free probabilities fill slots 0..support_size-2; the last two are
    // solved from total mass 1 and mean 1.
    let mut probs = vec![0.0f64; support_size];
    let mut mass_left = 1.0;
    let mut mean_left = 1.0;
    for i in 0..support_size - 2 {
        let p = unit[support_size + i] * mass_left;
        probs[i] = p;
        mass_left -= p;
        mean_left -= p * values[i];
    }
    let (va, vb) = (values[support_size - 2], values[support_size - 1]);
    // pa + pb = mass_left, pa*va + pb*vb = mean_left
    let pb = (mean_left - mass_left * va) / (vb - va);
    let pa = mass_left - pb;
    if pa < 0.0 || pb < 0.0 || !pa.is_finite() || !pb.is_finite() {
        return None;
    }
    probs[support_size - 2] = pa;
    probs[support_size - 1] = pb;
    Some((values, probs))
}

fn score_unit(unit: &[f64], support_size: usize, l: u32, limit: f64) -> Option<f64> {
    let (values, probs) = decode_unit(unit, support_size, limit)?;
    Some(tail_f64(&values, &probs, l, limit))
}

/// Floating tail of the l-fold i.i.d. sum via composition enumeration.
fn tail_f64(values: &[f64], probs: &[f64], l: u32, threshold: f64) -> f64 {
    let s = values.len();
    let mut total = 0.0;
    let mut counts = vec![0u32; s];
    fn rec(
        i: usize,
        remaining: u32,
        counts: &mut [u32],
        values: &[f64],
        probs: &[f64],
        l: u32,
        threshold: f64,
        total: &mut f64,
    ) {
        let s = values.len();
        if i == s - 1 {
            counts[i] = remaining;
            let sum: f64 = counts
                .iter()
                .zip(values)
                .map(|(&c, &v)| c as f64 * v)
                .sum();
            if sum >= threshold - 1e-12 {
                // multinomial(l; counts) * prod p_i^c_i
                let mut term = 1.0f64;
                let mut used = 0u32;
                for (&c, &p) in counts.iter().zip(probs) {
                    for j in 0..c {
                        used += 1;
                        term *= p * used as f64 / (j + 1) as f64;
                    }
                }
                let _ = l;
                *total += term;
            }
            return;
        }
        for c in 0..=remaining {
            counts[i] = c;
            rec(i + 1, remaining - c, counts, values, probs, l, threshold, total);
        }
    }
    rec(0, l, &mut counts, values, probs, l, threshold, &mut total);
    total
}

fn snap_candidate(
    unit: &[f64],
    support_size: usize,
    threshold: &Rat,
    max_den: u64,
) -> Option<DiscreteDistribution> {
    let limit = to_f64(threshold);
    let (values, probs) = decode_unit(unit, support_size, limit)?;
    let snapped_values: Vec<Rat> = values
        .iter()
        .map(|&v| {
            let r = snap_to_rational(v.clamp(0.0, limit), max_den);
            r.min(threshold.clone())
        })
        .collect();
    // snap the leading probabilities, then solve the last two exactly
    let mut atoms: Vec<(Rat, Rat)> = Vec::new();
    let mut mass_left = Rat::one();
    let mut mean_left = Rat::one();
    for i in 0..support_size - 2 {
        let p = snap_to_rational(probs[i].clamp(0.0, 1.0), max_den);
        if p > mass_left {
            return None;
        }
        mean_left -= &p * &snapped_values[i];
        mass_left -= &p;
        if !p.is_zero() {
            atoms.push((snapped_values[i].clone(), p));
        }
    }
    let va = &snapped_values[support_size - 2];
    let vb = &snapped_values[support_size - 1];
    if va == vb {
        return None;
    }
    let pb = (&mean_left - &mass_left * va) / (vb - va);
    let pa = &mass_left - &pb;
    if pa.is_negative() || pb.is_negative() {
        return None;
    }
    if !pa.is_zero() {
        atoms.push((va.clone(), pa));
    }
    if !pb.is_zero() {
        atoms.push((vb.clone(), pb));
    }
    DiscreteDistribution::new(atoms).ok()
}

/// Aborts if a certified tail value exceeds a proved upper bound.
fn enforce_proven_bounds(value: &Rat, l: u32, d: &Rat) -> Result<()> {
    let markov = markov_bound(l, d)?;
    if *value > markov {
        return Err(Error::ProvenBoundViolated(format!(
            "tail {} exceeds Markov bound {}",
            to_frac_string(value),
            to_frac_string(&markov)
        )));
    }
    if *value > garnett_bound() {
        return Err(Error::ProvenBoundViolated(format!(
            "tail {} exceeds 43/50",
            to_frac_string(value)
        )));
    }
    if d.denom().is_one() {
        let di = d.numer();
        if let Ok(di) = u32::try_from(di.clone()) {
            if let Ok(g) = han_g(l + di, di) {
                if *value > g {
                    return Err(Error::ProvenBoundViolated(format!(
                        "tail {} exceeds g({},{}) = {}",
                        to_frac_string(value),
                        l + di,
                        di,
                        to_frac_string(&g)
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn extremizer21() -> DiscreteDistribution {
        conjectured_extremizer(2, &Rat::one()).unwrap()
    }

    #[test]
    fn means() {
        assert_eq!(DiscreteDistribution::point(Rat::one()).mean(), Rat::one());
        assert_eq!(extremizer21().mean(), Rat::one());
        let half = DiscreteDistribution::new(vec![
            (rat(1, 2), rat(1, 2)),
            (rat(3, 2), rat(1, 2)),
        ])
        .unwrap();
        assert_eq!(half.mean(), Rat::one());
    }

    #[test]
    fn validation() {
        assert!(DiscreteDistribution::new(vec![(rat(-1, 2), Rat::one())]).is_err());
        assert!(DiscreteDistribution::new(vec![(Rat::one(), rat(1, 2))]).is_err());
        // equal values merge
        let d =
            DiscreteDistribution::new(vec![(Rat::one(), rat(1, 2)), (Rat::one(), rat(1, 2))])
                .unwrap();
        assert_eq!(d.atoms().len(), 1);
    }

    #[test]
    fn tail_basics() {
        let d = extremizer21();
        assert_eq!(
            iid_tail(&d, 2, &rat_int(3), DEFAULT_ATOM_CAP).unwrap(),
            rat(5, 9)
        );
        let unit = DiscreteDistribution::point(Rat::one());
        assert_eq!(
            iid_tail(&unit, 5, &rat_int(6), DEFAULT_ATOM_CAP).unwrap(),
            Rat::zero()
        );
        assert_eq!(
            iid_tail(&unit, 5, &rat_int(5), DEFAULT_ATOM_CAP).unwrap(),
            Rat::one()
        );
    }

    #[test]
    fn tail_monotone_in_threshold() {
        let d = DiscreteDistribution::new(vec![
            (Rat::zero(), rat(1, 3)),
            (Rat::one(), rat(1, 3)),
            (rat_int(2), rat(1, 3)),
        ])
        .unwrap();
        let mut last = Rat::one();
        for t in 0..=8 {
            let tail = iid_tail(&d, 4, &rat_int(t), DEFAULT_ATOM_CAP).unwrap();
            assert!(tail <= last);
            last = tail;
        }
    }

    #[test]
    fn extremizer_identity() {
        for l in 1..=6u32 {
            for d in 1..=3i64 {
                let dr = rat_int(d);
                let dist = conjectured_extremizer(l, &dr).unwrap();
                let t = rat_int(l as i64) + &dr;
                let tail = iid_tail(&dist, l, &t, DEFAULT_ATOM_CAP).unwrap();
                assert_eq!(tail, feige_conjecture_value(l, &dr).unwrap());
            }
        }
    }

    #[test]
    fn extremizer_shape() {
        let d = conjectured_extremizer(1, &Rat::one()).unwrap();
        assert_eq!(
            d.atoms(),
            &[(Rat::zero(), rat(1, 2)), (rat_int(2), rat(1, 2))]
        );
    }

    #[test]
    fn damping_preserves_mean() {
        let d = extremizer21();
        for (num, den) in [(1i64, 10i64), (1, 100), (7, 9)] {
            let y = damping_transform(&d, &rat(num, den)).unwrap();
            assert_eq!(y.mean(), d.mean());
        }
        let unit = DiscreteDistribution::point(Rat::one());
        let y = damping_transform(&unit, &rat(1, 2)).unwrap();
        assert_eq!(
            y.atoms(),
            &[(Rat::zero(), rat(1, 2)), (rat_int(2), rat(1, 2))]
        );
        assert!(damping_transform(&unit, &rat_int(1)).is_err());
    }

    #[test]
    fn damping_tail_inequality() {
        // Pr[sum Y >= l+d] >= (1-delta)^l * Pr[sum X >= (l+d)(1-delta)]
        let dists = vec![
            extremizer21(),
            DiscreteDistribution::new(vec![(rat(1, 2), rat(1, 2)), (rat(3, 2), rat(1, 2))])
                .unwrap(),
        ];
        for dist in &dists {
            for l in [2u32, 3] {
                for delta in [rat(1, 10), rat(1, 100)] {
                    let y = damping_transform(dist, &delta).unwrap();
                    let t = rat_int(l as i64 + 1);
                    let lhs = iid_tail(&y, l, &t, DEFAULT_ATOM_CAP).unwrap();
                    let keep = Rat::one() - &delta;
                    let rhs = crate::rat::pow(&keep, l)
                        * iid_tail(dist, l, &(&t * &keep), DEFAULT_ATOM_CAP).unwrap();
                    assert!(lhs >= rhs);
                }
            }
        }
    }

    #[test]
    fn tail_resource_cap() {
        let d = DiscreteDistribution::new(vec![
            (Rat::zero(), rat(1, 2)),
            (Rat::one(), rat(1, 4)),
            (rat_int(2), rat(1, 4)),
        ])
        .unwrap();
        assert!(matches!(
            iid_tail(&d, 10, &rat_int(5), 4),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn search_finds_extremizer_support_two() {
        for (l, d, expect) in [
            (2u32, 1i64, rat(5, 9)),
            (3, 1, rat(37, 64)),
            (2, 2, rat(1, 4) * rat(7, 4)), // 1 - (3/4)^2 = 7/16
        ] {
            let out = theta_lower_search(
                l,
                &rat_int(d),
                2,
                4096,
                0,
                &SearchConfig::default(),
            )
            .unwrap();
            assert_eq!(out.value, expect, "l={l} d={d}");
        }
    }

    #[test]
    fn search_respects_proven_bounds() {
        for seed in 0..10u64 {
            for support in 2..=4usize {
                let out =
                    theta_lower_search(2, &Rat::one(), support, 300, seed, &SearchConfig::default())
                        .unwrap();
                assert!(out.value <= garnett_bound());
                assert!(out.value <= markov_bound(2, &Rat::one()).unwrap());
            }
        }
    }

    #[test]
    fn search_is_deterministic_under_seed() {
        let a = theta_lower_search(2, &Rat::one(), 3, 500, 42, &SearchConfig::default()).unwrap();
        let b = theta_lower_search(2, &Rat::one(), 3, 500, 42, &SearchConfig::default()).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn distribution_json_round_trip() {
        let d = extremizer21();
        let j = d.to_json();
        assert_eq!(DiscreteDistribution::from_json(&j).unwrap(), d);
        assert_eq!(j["atoms"][0]["value"], "0");
        assert_eq!(j["atoms"][1]["prob"], "1/3");
    }
}

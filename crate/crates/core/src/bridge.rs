//! Executable forms of both directions of the equivalence between
//! fractional vertex covers and tail probabilities: cover-to-distribution
//! with exact subset/sequence counting, and the distribution-to-hypergraph
//! construction, each emitting a verifiable certificate.

use num::{One, Zero};

use crate::feige::{iid_tail, DiscreteDistribution, DEFAULT_ATOM_CAP};
use crate::fraclp::{duality_certificate, Carrier, FractionalWeights};
use crate::hypergraph::{binomial, k_subsets, Hypergraph};
use crate::rat::{rat_int, to_frac_string, Rat};
use crate::{Error, Result};

/// Default ceiling on C(m,l) for heavy-subset enumeration.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;
/// LP solves are skipped above this edge count; cover feasibility is
/// still verified directly.
const LP_EDGE_CAP: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    CoverToDistribution,
    DistributionToHypergraph,
}

/// One verified identity or inequality inside a certificate.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl Check {
    fn eq(name: &str, lhs: Rat, rhs: Rat) -> Self {
        Self {
            name: name.into(),
            pass: lhs == rhs,
            lhs,
            rhs,
        }
    }

    fn le(name: &str, lhs: Rat, rhs: Rat) -> Self {
        Self {
            name: name.into(),
            pass: lhs <= rhs,
            lhs,
            rhs,
        }
    }
}

/// Exact subset/sequence counts at the heavy threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HeavyCounts {
    /// heavy l-subsets
    pub n: u128,
    /// heavy l-sequences with repetition
    pub n1: u128,
    /// heavy injective l-sequences
    pub n2: u128,
}

/// The paired (hypergraph, weight function, counting identities) record
/// produced by one direction of the reduction.
#[derive(Debug, Clone)]
pub struct BridgeCertificate {
    pub direction: Direction,
    pub hypergraph: Hypergraph,
    /// vertex weights, one per vertex of the hypergraph
    pub weight: Vec<Rat>,
    pub distribution: DiscreteDistribution,
    pub m: usize,
    pub l: u32,
    pub d: Rat,
    pub counts: HeavyCounts,
    pub checks: Vec<Check>,
    /// false when the standing precondition on x = nu*/m fails (or the
    /// instance is vacuous); the counting identities are still recorded.
    pub applicable: bool,
}

impl BridgeCertificate {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let direction = match self.direction {
            Direction::CoverToDistribution => "cover-to-dist",
            Direction::DistributionToHypergraph => "dist-to-hypergraph",
        };
        let checks: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "pass": c.pass,
                    "lhs": to_frac_string(&c.lhs),
                    "rhs": to_frac_string(&c.rhs),
                })
            })
            .collect();
        serde_json::json!({
            "direction": direction,
            "hypergraph": self.hypergraph.to_json(),
            "weight": self.weight.iter().map(to_frac_string).collect::<Vec<_>>(),
            "distribution": self.distribution.to_json(),
            "m": self.m,
            "l": self.l,
            "d": to_frac_string(&self.d),
            "counts": {
                "N": self.counts.n as u64,
                "N1": self.counts.n1 as u64,
                "N2": self.counts.n2 as u64,
            },
            "checks": checks,
            "applicable": self.applicable,
        })
    }
}

/// The law of t(v) for v uniform on [m]: atoms are the distinct weights
/// with probability multiplicity/m.
pub fn weight_distribution(m: usize, t: &[Rat]) -> Result<DiscreteDistribution> {
    if t.len() != m || m == 0 {
        return Err(Error::Validation(format!(
            "weight function has {} entries, expected m={m}",
            t.len()
        )));
    }
    let p = Rat::new(1.into(), (m as i64).into());
    DiscreteDistribution::new(t.iter().map(|w| (w.clone(), p.clone())))
}

/// Exact number of l-subsets S of [m] with sum of t over S >= threshold.
/// Direct enumeration under the cap, otherwise a multiplicity-aware walk
/// over compositions of l among the distinct weight values.
pub fn count_heavy_subsets(
    m: usize,
    t: &[Rat],
    l: u32,
    threshold: &Rat,
    cap: u128,
) -> Result<u128> {
    let total = binomial(m as u64, l as u64);
    if total <= cap {
        let count = k_subsets(m, l as usize)
            .into_iter()
            .filter(|s| s.iter().map(|&v| t[v].clone()).sum::<Rat>() >= *threshold)
            .count();
        return Ok(count as u128);
    }
    // group weights into (value, multiplicity) blocks
    let mut blocks: Vec<(Rat, u64)> = Vec::new();
    let mut sorted = t.to_vec();
    sorted.sort();
    for w in sorted {
        match blocks.last_mut() {
            Some((v, c)) if *v == w => *c += 1,
            _ => blocks.push((w, 1)),
        }
    }
    let mut count: u128 = 0;
    let mut choice = vec![0u64; blocks.len()];
    compositions(
        &blocks,
        0,
        l as u64,
        &Rat::zero(),
        threshold,
        &mut choice,
        &mut count,
    );
    Ok(count)
}

fn compositions(
    blocks: &[(Rat, u64)],
    i: usize,
    remaining: u64,
    acc: &Rat,
    threshold: &Rat,
    choice: &mut [u64],
    count: &mut u128,
) {
    if i == blocks.len() {
        if remaining == 0 && acc >= threshold {
            let ways: u128 = blocks
                .iter()
                .zip(choice.iter())
                .map(|((_, mult), &c)| binomial(*mult, c))
                .product();
            *count += ways;
        }
        return;
    }
    let (value, mult) = &blocks[i];
    for c in 0..=remaining.min(*mult) {
        choice[i] = c;
        let acc2 = acc + value * rat_int(c as i64);
        compositions(blocks, i + 1, remaining - c, &acc2, threshold, choice, count);
    }
}

/// Exact sequence counts: N1 (with repetition) from m^l times the i.i.d.
/// tail of the weight distribution, N2 (injective) as l! * N, with a
/// direct injective enumeration cross-check when small enough.
pub fn count_heavy_sequences(
    m: usize,
    t: &[Rat],
    l: u32,
    threshold: &Rat,
    cap: u128,
) -> Result<(u128, u128)> {
    let dist = weight_distribution(m, t)?;
    let tail = iid_tail(&dist, l, threshold, DEFAULT_ATOM_CAP)?;
    let m_pow: u128 = (m as u128).pow(l);
    let n1_rat = tail * rat_int(m_pow as i64);
    if !n1_rat.denom().is_one() {
        return Err(Error::Solver(format!(
            "m^l * tail is not an integer: {}",
            to_frac_string(&n1_rat)
        )));
    }
    let n1 = u128::try_from(n1_rat.numer().clone())
        .map_err(|_| Error::Solver("sequence count out of range".into()))?;

    let n = count_heavy_subsets(m, t, l, threshold, cap)?;
    let l_fact: u128 = (1..=l as u128).product();
    let n2 = l_fact * n;

    // independent route: enumerate injective sequences directly when cheap
    let falling: u128 = (0..l as u128).map(|i| m as u128 - i).product();
    if falling <= cap {
        let mut direct: u128 = 0;
        let mut seq: Vec<usize> = Vec::with_capacity(l as usize);
        injective_count(m, t, l as usize, threshold, &Rat::zero(), &mut seq, &mut direct);
        if direct != n2 {
            return Err(Error::Solver(format!(
                "injective count mismatch: {direct} vs l!*N = {n2}"
            )));
        }
    }
    Ok((n1, n2))
}

fn injective_count(
    m: usize,
    t: &[Rat],
    remaining: usize,
    threshold: &Rat,
    acc: &Rat,
    seq: &mut Vec<usize>,
    count: &mut u128,
) {
    if remaining == 0 {
        if acc >= threshold {
            *count += 1;
        }
        return;
    }
    for v in 0..m {
        if seq.contains(&v) {
            continue;
        }
        seq.push(v);
        let acc2 = acc + &t[v];
        injective_count(m, t, remaining - 1, threshold, &acc2, seq, count);
        seq.pop();
    }
}

/// First direction: from an optimal fractional cover of H, build the
/// i.i.d. law of a uniformly sampled cover weight and certify the exact
/// counting chain relating edge density to the tail.
pub fn cover_to_distribution(h: &Hypergraph, d: &Rat, cap: u128) -> Result<BridgeCertificate> {
    let l = h.k() as u32;
    let m = h.n();
    if m == 0 {
        return Err(Error::Validation("hypergraph has no vertices".into()));
    }
    let cert = duality_certificate(h)?;
    let mut t = vec![Rat::zero(); m];
    for (v, w) in &cert.cover.weights {
        t[*v] = w.clone();
    }
    let dist = weight_distribution(m, &t)?;

    let mut checks = Vec::new();
    let threshold = Rat::one();
    let n = count_heavy_subsets(m, &t, l, &threshold, cap)?;
    let (n1, n2) = count_heavy_sequences(m, &t, l, &threshold, cap)?;
    push_counting_checks(&mut checks, m, l, n, n1, n2);
    checks.push(Check::le(
        "edges-le-heavy-subsets",
        rat_int(h.edge_count() as i64),
        rat_int(n as i64),
    ));

    let x = &cert.nu_star / rat_int(m as i64);
    let applicable = if cert.nu_star.is_zero() {
        // vacuous: the rescaling 1/x is undefined
        false
    } else {
        let bound = (Rat::one() + d / rat_int(m as i64)) / (rat_int(l as i64) + d);
        let ok = x > Rat::zero() && x <= bound;
        if ok {
            // exact finite-m replacement for the asymptotic threshold:
            // 1/x >= (l+d) m / (m+d)
            let x_inv = x.clone().recip();
            let finite_thr =
                (rat_int(l as i64) + d) * rat_int(m as i64) / (rat_int(m as i64) + d);
            checks.push(Check::le("rescaled-threshold", finite_thr, x_inv));
        }
        ok
    };

    Ok(BridgeCertificate {
        direction: Direction::CoverToDistribution,
        hypergraph: h.clone(),
        weight: t,
        distribution: dist,
        m,
        l,
        d: d.clone(),
        counts: HeavyCounts { n, n1, n2 },
        checks,
        applicable,
    })
}

/// Second direction: replicate a rational finitely supported mean-1 law
/// into a vertex-weight function on m = r*m' vertices and take all heavy
/// l-subsets as edges. Certifies cover feasibility, the bound on tau*,
/// and the counting identities.
pub fn dist_to_hypergraph(
    dist: &DiscreteDistribution,
    l: u32,
    d: u32,
    r: usize,
    cap: u128,
) -> Result<BridgeCertificate> {
    if l < 2 || d < 1 || r < 1 {
        return Err(Error::Validation(format!(
            "need l >= 2, d >= 1, r >= 1, got l={l} d={d} r={r}"
        )));
    }
    if dist.mean() != Rat::one() {
        return Err(Error::Validation(format!(
            "distribution has mean {}, expected 1",
            to_frac_string(&dist.mean())
        )));
    }
    let ld = rat_int((l + d) as i64);
    if dist.atoms().iter().any(|(v, _)| *v > ld) {
        return Err(Error::Validation(format!(
            "atom value exceeds l+d = {}",
            to_frac_string(&ld)
        )));
    }

    let m_prime = dist.prob_lcd();
    let m_prime = usize::try_from(m_prime.clone())
        .map_err(|_| Error::Validation(format!("probability denominator lcm {m_prime} too large")))?;
    let m = r
        .checked_mul(m_prime)
        .ok_or_else(|| Error::Validation("vertex count overflow".into()))?;
    let total = binomial(m as u64, l as u64);
    if total > cap {
        return Err(Error::ResourceLimit {
            required: total,
            cap,
        });
    }

    // block assignment: ascending atom order, ascending vertex index
    let mut t: Vec<Rat> = Vec::with_capacity(m);
    for (value, prob) in dist.atoms() {
        let b = prob * rat_int(m_prime as i64);
        debug_assert!(b.denom().is_one());
        let block = usize::try_from(b.numer().clone()).unwrap() * r;
        let w = value / &ld;
        t.extend(std::iter::repeat(w).take(block));
    }
    debug_assert_eq!(t.len(), m);

    let threshold = Rat::one();
    let edges: Vec<Vec<usize>> = k_subsets(m, l as usize)
        .into_iter()
        .filter(|s| s.iter().map(|&v| t[v].clone()).sum::<Rat>() >= threshold)
        .collect();
    let h = Hypergraph::new(m, l as usize, edges)?;

    let mut checks = Vec::new();

    // t is a fractional vertex cover of H, re-verified independently
    let cover = FractionalWeights::from_json(&serde_json::json!({
        "carrier": "vertices",
        "weights": t
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (i.to_string(), to_frac_string(w)))
            .collect::<std::collections::BTreeMap<_, _>>(),
        "value": "0",
    }))?;
    checks.push(Check {
        name: "t-is-fractional-cover".into(),
        pass: cover.carrier == Carrier::Vertices && cover.is_feasible_cover(&h),
        lhs: Rat::zero(),
        rhs: Rat::zero(),
    });

    // tau*(H) <= sum t(v) = m/(l+d)
    let t_total: Rat = t.iter().sum();
    checks.push(Check::eq(
        "cover-total",
        t_total.clone(),
        rat_int(m as i64) / &ld,
    ));
    if h.edge_count() <= LP_EDGE_CAP {
        let lp = duality_certificate(&h)?;
        checks.push(Check::le("tau-le-cover-total", lp.tau_star.clone(), t_total));
        // hence nu* < (m+d)/(l+d)
        checks.push(Check {
            name: "nu-below-fractional-target".into(),
            pass: lp.nu_star < (rat_int(m as i64) + rat_int(d as i64)) / &ld,
            lhs: lp.nu_star,
            rhs: (rat_int(m as i64) + rat_int(d as i64)) / &ld,
        });
    }

    // round trip: the weight distribution is the law of X/(l+d)
    let wd = weight_distribution(m, &t)?;
    let scaled = dist.scale(&ld.clone().recip())?;
    checks.push(Check {
        name: "round-trip-law".into(),
        pass: wd == scaled,
        lhs: Rat::zero(),
        rhs: Rat::zero(),
    });

    let n = count_heavy_subsets(m, &t, l, &threshold, cap)?;
    let (n1, n2) = count_heavy_sequences(m, &t, l, &threshold, cap)?;
    push_counting_checks(&mut checks, m, l, n, n1, n2);
    checks.push(Check::eq(
        "edges-eq-heavy-subsets",
        rat_int(h.edge_count() as i64),
        rat_int(n as i64),
    ));

    Ok(BridgeCertificate {
        direction: Direction::DistributionToHypergraph,
        hypergraph: h,
        weight: t,
        distribution: dist.clone(),
        m,
        l,
        d: rat_int(d as i64),
        counts: HeavyCounts { n, n1, n2 },
        checks,
        applicable: true,
    })
}

fn push_counting_checks(checks: &mut Vec<Check>, m: usize, l: u32, n: u128, n1: u128, n2: u128) {
    let l_fact: u128 = (1..=l as u128).product();
    checks.push(Check::eq(
        "n2-eq-lfact-n",
        rat_int(n2 as i64),
        rat_int((l_fact * n) as i64),
    ));
    let gap_bound = binomial(l as u64, 2) * (m as u128).pow(l - 1);
    checks.push(Check::le(
        "sequence-gap",
        rat_int((n1 - n2) as i64),
        rat_int(gap_bound as i64),
    ));
}

/// One row of the convergence table produced by the equivalence probe.
#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub r: usize,
    pub m: usize,
    /// |E| / C(m,l)
    pub density: Rat,
    /// exact tail N1/m^l
    pub tail: Rat,
    /// C(l,2)/m, dominating the density-tail gap
    pub gap_bound: Rat,
    /// |N1 - N2| / m^l
    pub observed_gap: Rat,
    pub dominated: bool,
}

/// Runs the second direction for each replication factor, tabulating
/// edge density against the exact tail and checking that the gap bound
/// dominates the observed difference.
pub fn equivalence_probe(
    l: u32,
    d: u32,
    dist: &DiscreteDistribution,
    r_values: &[usize],
    cap: u128,
) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for &r in r_values {
        let cert = dist_to_hypergraph(dist, l, d, r, cap)?;
        let m = cert.m;
        let m_pow = rat_int((m as u128).pow(l) as i64);
        let total = binomial(m as u64, l as u64);
        let density = rat_int(cert.hypergraph.edge_count() as i64) / rat_int(total as i64);
        let tail = rat_int(cert.counts.n1 as i64) / &m_pow;
        let observed_gap = rat_int((cert.counts.n1 - cert.counts.n2) as i64) / &m_pow;
        let gap_bound = rat_int(binomial(l as u64, 2) as i64) / rat_int(m as i64);
        rows.push(ProbeRow {
            r,
            m,
            density,
            tail: tail.clone(),
            gap_bound: gap_bound.clone(),
            dominated: observed_gap <= gap_bound,
            observed_gap,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feige::conjectured_extremizer;
    use crate::rat::rat;

    #[test]
    fn weight_distribution_basics() {
        let t = vec![rat(1, 2); 4];
        let d = weight_distribution(4, &t).unwrap();
        assert_eq!(d.atoms(), &[(rat(1, 2), Rat::one())]);

        let t = vec![
            rat(1, 3),
            rat(1, 3),
            rat(1, 3),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
        ];
        let d = weight_distribution(6, &t).unwrap();
        assert_eq!(
            d.atoms(),
            &[(Rat::zero(), rat(1, 2)), (rat(1, 3), rat(1, 2))]
        );
    }

    #[test]
    fn heavy_subset_counts() {
        let t = vec![rat(1, 2); 4];
        assert_eq!(
            count_heavy_subsets(4, &t, 2, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap(),
            6
        );
        let t = vec![
            rat(1, 3),
            rat(1, 3),
            rat(1, 3),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
        ];
        assert_eq!(
            count_heavy_subsets(6, &t, 2, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap(),
            0
        );
    }

    #[test]
    fn enumeration_and_composition_routes_agree() {
        let t = vec![
            Rat::one(),
            Rat::one(),
            rat(1, 2),
            rat(1, 2),
            Rat::zero(),
            Rat::zero(),
            rat(1, 3),
        ];
        for l in 2..=4u32 {
            let direct = count_heavy_subsets(7, &t, l, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap();
            let grouped = count_heavy_subsets(7, &t, l, &Rat::one(), 0).unwrap();
            assert_eq!(direct, grouped, "l={l}");
        }
    }

    #[test]
    fn heavy_sequence_counts() {
        let t = vec![rat(1, 2); 4];
        let (n1, n2) = count_heavy_sequences(4, &t, 2, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(n1, 16);
        assert_eq!(n2, 12);
    }

    #[test]
    fn worked_instance() {
        let d = conjectured_extremizer(2, &Rat::one()).unwrap();
        let cert = dist_to_hypergraph(&d, 2, 1, 2, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(cert.m, 6);
        assert_eq!(cert.hypergraph.edge_count(), 9);
        assert_eq!(cert.counts.n, 9);
        assert_eq!(cert.counts.n1, 20);
        assert_eq!(cert.counts.n2, 18);
        assert!(cert.all_checks_pass());
        assert_eq!(
            cert.weight,
            vec![
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
                Rat::one(),
                Rat::one()
            ]
        );
        let lp = duality_certificate(&cert.hypergraph).unwrap();
        assert_eq!(lp.tau_star, rat_int(2));
    }

    #[test]
    fn point_mass_gives_empty_hypergraph() {
        let d = DiscreteDistribution::point(Rat::one());
        let cert = dist_to_hypergraph(&d, 2, 1, 3, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(cert.hypergraph.edge_count(), 0);
        assert_eq!(cert.counts.n, 0);
        assert!(cert.all_checks_pass());
    }

    #[test]
    fn cover_direction_two_triangles() {
        let h = Hypergraph::new(
            6,
            2,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![3, 4],
                vec![3, 5],
                vec![4, 5],
            ],
        )
        .unwrap();
        // nu* = 3, x = 1/2 > (1 + 1/6)/3, so inapplicable but counted
        let cert = cover_to_distribution(&h, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap();
        assert!(!cert.applicable);
        assert!(cert.all_checks_pass());
    }

    #[test]
    fn cover_direction_empty_is_vacuous() {
        let h = Hypergraph::empty(4, 2);
        let cert = cover_to_distribution(&h, &Rat::one(), DEFAULT_SUBSET_CAP).unwrap();
        assert!(!cert.applicable);
        assert_eq!(cert.counts, HeavyCounts::default());
        assert!(cert.all_checks_pass());
    }

    #[test]
    fn round_trip_recovers_scaled_law() {
        let d = conjectured_extremizer(2, &Rat::one()).unwrap();
        for r in [1usize, 2, 4] {
            let cert = dist_to_hypergraph(&d, 2, 1, r, DEFAULT_SUBSET_CAP).unwrap();
            let wd = weight_distribution(cert.m, &cert.weight).unwrap();
            let expect = d.scale(&rat(1, 3)).unwrap();
            assert_eq!(wd, expect, "r={r}");
        }
    }

    #[test]
    fn probe_table() {
        let d = conjectured_extremizer(2, &Rat::one()).unwrap();
        let rows = equivalence_probe(2, 1, &d, &[1, 2, 4, 8], DEFAULT_SUBSET_CAP).unwrap();
        for row in &rows {
            assert!(row.dominated, "r={}", row.r);
            assert_eq!(row.tail, rat(5, 9), "r={}", row.r);
        }
        let d3 = conjectured_extremizer(3, &Rat::one()).unwrap();
        let rows = equivalence_probe(3, 1, &d3, &[1, 2], DEFAULT_SUBSET_CAP).unwrap();
        for row in &rows {
            assert!(row.dominated, "r={}", row.r);
        }
    }

    #[test]
    fn certificate_json_shape() {
        let d = conjectured_extremizer(2, &Rat::one()).unwrap();
        let cert = dist_to_hypergraph(&d, 2, 1, 2, DEFAULT_SUBSET_CAP).unwrap();
        let j = cert.to_json();
        assert_eq!(j["counts"]["N"], 9);
        assert_eq!(j["counts"]["N1"], 20);
        assert_eq!(j["direction"], "dist-to-hypergraph");
        assert!(j["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
}

//! Cross-module invariant suite behind the `verify` subcommand: each
//! check is a named pass/fail with a short detail string.

use num::One;

use crate::bridge::{dist_to_hypergraph, equivalence_probe, DEFAULT_SUBSET_CAP};
use crate::feige::{
    conjectured_extremizer, damping_transform, iid_tail, theta_lower_search, DiscreteDistribution,
    SearchConfig, DEFAULT_ATOM_CAP,
};
use crate::fraclp::duality_certificate;
use crate::hypergraph::{exact_m_d_s, Hypergraph, HypergraphEnumerator};
use crate::rat::{pow, rat, rat_int, to_frac_string, Rat};
use crate::thresholds::{
    conjectured_md_threshold, feige_conjecture_value, garnett_bound, han_g, kot_bound,
    markov_bound, matching_bound_report, Status,
};
use crate::Result;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(results: &mut Vec<CheckOutcome>, name: &str, pass: bool, detail: String) {
    results.push(CheckOutcome {
        name: name.into(),
        pass,
        detail,
    });
}

/// Runs every module's invariant suite. Returns one outcome per check;
/// a Garnett-bound exceedance surfaces as a hard error.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    // threshold constants
    check(
        &mut out,
        "constants-garnett",
        garnett_bound() == rat(43, 50) && Rat::one() - rat(7, 50) == rat(43, 50),
        "43/50 and 1 - 7/50 agree".into(),
    );
    let three_way = kot_bound(3, 1)? == rat(5, 9)
        && han_g(3, 1)? == rat(5, 9)
        && conjectured_md_threshold(3, 1)? == rat(5, 9);
    check(&mut out, "constants-three-way-5/9", three_way, "k=3 d=1".into());
    let mut lower_ok = true;
    for k in 3..=10u32 {
        for d in 1..=((k - 1) / 2) {
            let lower = conjectured_md_threshold(k, d)?;
            let report = matching_bound_report(k, d)?;
            for e in report.entries.iter().filter(|e| e.status == Status::Proved) {
                lower_ok &= lower <= e.value;
            }
        }
    }
    check(
        &mut out,
        "conjectured-below-proved",
        lower_ok,
        "k <= 10, 2d < k".into(),
    );

    // hypergraph invariants on small complete graphs
    let mut hyper_ok = true;
    for (n, k) in [(5usize, 2usize), (6, 2), (6, 3)] {
        let h = Hypergraph::complete(n, k);
        let handshake: usize = (0..n).map(|v| h.degree(&[v]).unwrap()).sum();
        hyper_ok &= handshake == k * h.edge_count();
        hyper_ok &= h.max_matching().size() <= n / k;
    }
    check(&mut out, "degree-handshake", hyper_ok, "complete graphs".into());

    // LP duality on every graph on 4 vertices
    let mut lp_ok = true;
    for h in HypergraphEnumerator::new(4, 2, 30)? {
        let c = duality_certificate(&h)?;
        lp_ok &= c.nu_star == c.tau_star;
        lp_ok &= c.matching.is_feasible_matching(&h) && c.cover.is_feasible_cover(&h);
        lp_ok &= c.nu_star >= rat_int(h.max_matching().size() as i64);
    }
    check(&mut out, "lp-duality-n4-census", lp_ok, "all 64 graphs".into());

    // exact census values
    let md = exact_m_d_s(2, 4, 1, 2, 30)?;
    check(&mut out, "exact-m-2-4-1-2", md.m == 2, format!("got {}", md.m));

    // extremizer identity and tail monotonicity
    let mut feige_ok = true;
    for l in 1..=5u32 {
        for d in 1..=2i64 {
            let dr = rat_int(d);
            let dist = conjectured_extremizer(l, &dr)?;
            let t = rat_int(l as i64) + &dr;
            feige_ok &= iid_tail(&dist, l, &t, DEFAULT_ATOM_CAP)? == feige_conjecture_value(l, &dr)?;
        }
    }
    check(&mut out, "extremizer-identity", feige_ok, "l <= 5, d <= 2".into());

    // Markov sanity for mean-1 inputs
    let mut markov_ok = true;
    let samples = vec![
        conjectured_extremizer(2, &Rat::one())?,
        DiscreteDistribution::new(vec![(rat(1, 2), rat(1, 2)), (rat(3, 2), rat(1, 2))])?,
    ];
    for dist in &samples {
        for l in [2u32, 3] {
            let d = Rat::one();
            let t = rat_int(l as i64) + &d;
            markov_ok &= iid_tail(dist, l, &t, DEFAULT_ATOM_CAP)? <= markov_bound(l, &d)?;
        }
    }
    check(&mut out, "tail-below-markov", markov_ok, "sample laws".into());

    // damping
    let mut damp_ok = true;
    for dist in &samples {
        for delta in [rat(1, 10), rat(1, 100)] {
            let y = damping_transform(dist, &delta)?;
            damp_ok &= y.mean() == dist.mean();
            let l = 2u32;
            let t = rat_int(3);
            let lhs = iid_tail(&y, l, &t, DEFAULT_ATOM_CAP)?;
            let keep = Rat::one() - &delta;
            let rhs = pow(&keep, l) * iid_tail(dist, l, &(&t * &keep), DEFAULT_ATOM_CAP)?;
            damp_ok &= lhs >= rhs;
        }
    }
    check(&mut out, "damping-inequality", damp_ok, "sample laws".into());

    // theta search soundness: exceeding a proved bound raises an error,
    // which would abort this whole run
    let search = theta_lower_search(2, &Rat::one(), 2, 2048, seed, &SearchConfig::default())?;
    check(
        &mut out,
        "theta-search-support2",
        search.value == rat(5, 9),
        format!("got {}", to_frac_string(&search.value)),
    );

    // bridge worked instance and probe domination
    let extremizer = conjectured_extremizer(2, &Rat::one())?;
    let cert = dist_to_hypergraph(&extremizer, 2, 1, 2, DEFAULT_SUBSET_CAP)?;
    check(
        &mut out,
        "bridge-worked-instance",
        cert.m == 6
            && cert.hypergraph.edge_count() == 9
            && cert.counts.n1 == 20
            && cert.counts.n2 == 18
            && cert.all_checks_pass(),
        format!("counts {:?}", cert.counts),
    );
    let rows = equivalence_probe(2, 1, &extremizer, &[1, 2, 4], DEFAULT_SUBSET_CAP)?;
    check(
        &mut out,
        "probe-gap-dominated",
        rows.iter().all(|r| r.dominated && r.tail == rat(5, 9)),
        "r in {1,2,4}".into(),
    );

    Ok(out)
}

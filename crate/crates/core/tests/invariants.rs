//! Property tests for the structural invariants that hold on every input,
//! not just the pinned constants.

use num::{One, Zero};
use proptest::prelude::*;

use matchtail::feige::{damping_transform, iid_tail, DiscreteDistribution, DEFAULT_ATOM_CAP};
use matchtail::fraclp::{duality_certificate, FractionalWeights};
use matchtail::hypergraph::{k_subsets, Hypergraph};
use matchtail::rat::{from_frac_string, rat, snap_to_rational, to_f64, to_frac_string, Rat};
use matchtail::thresholds::markov_bound;

fn arb_hypergraph(max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (2usize..=3, 0u64..)
        .prop_flat_map(move |(k, seed)| (Just(k), k..=max_n, Just(seed)))
        .prop_map(|(k, n, seed)| {
            let pool = k_subsets(n, k);
            let edges: Vec<Vec<usize>> = pool
                .into_iter()
                .enumerate()
                .filter(|(i, _)| seed >> (i % 64) & 1 == 1)
                .map(|(_, e)| e)
                .collect();
            Hypergraph::new(n, k, edges).unwrap()
        })
}

/// Mean-1 two-point law: value a < 1 < b with the unique mixing weights.
fn arb_mean_one_law() -> impl Strategy<Value = DiscreteDistribution> {
    ((1i64..=99), (2i64..=60)).prop_map(|(a_num, b_num)| {
        let a = rat(a_num, 100);
        let b = rat(b_num, 1);
        let p = (Rat::one() - &a) / (&b - &a);
        DiscreteDistribution::new(vec![(a, Rat::one() - &p), (b, p)]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn handshake_and_degree_bounds(h in arb_hypergraph(7)) {
        let by_vertex: usize = (0..h.n()).map(|v| h.degree(&[v]).unwrap()).sum();
        prop_assert_eq!(by_vertex, h.k() * h.edge_count());
        prop_assert!(h.max_matching().size() <= h.n() / h.k());
    }

    #[test]
    fn hypergraph_json_round_trip(h in arb_hypergraph(7)) {
        let back = Hypergraph::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(back.edges(), h.edges());
    }

    #[test]
    fn strong_duality_everywhere(h in arb_hypergraph(6)) {
        let cert = duality_certificate(&h).unwrap();
        prop_assert_eq!(&cert.nu_star, &cert.tau_star);
        prop_assert!(cert.matching.is_feasible_matching(&h));
        prop_assert!(cert.cover.is_feasible_cover(&h));
        // the fractional optimum dominates the integral matching number
        let integral = Rat::from_integer(h.max_matching().size().into());
        prop_assert!(cert.nu_star >= integral);
        // JSON round trip preserves the matching witness exactly
        let back = FractionalWeights::from_json(&cert.matching.to_json()).unwrap();
        prop_assert_eq!(back.value, cert.matching.value);
    }

    #[test]
    fn tail_in_unit_interval_and_below_markov(
        dist in arb_mean_one_law(),
        l in 1u32..=5,
        d_num in 1i64..=4,
    ) {
        let d = rat(d_num, 2);
        let t = Rat::from_integer(l.into()) + &d;
        let tail = iid_tail(&dist, l, &t, DEFAULT_ATOM_CAP).unwrap();
        prop_assert!(tail >= Rat::zero() && tail <= Rat::one());
        prop_assert!(tail <= markov_bound(l, &d).unwrap());
    }

    #[test]
    fn tail_monotone_in_threshold(dist in arb_mean_one_law(), l in 1u32..=4) {
        let lo = iid_tail(&dist, l, &rat(3, 2), DEFAULT_ATOM_CAP).unwrap();
        let hi = iid_tail(&dist, l, &rat(5, 2), DEFAULT_ATOM_CAP).unwrap();
        prop_assert!(hi <= lo);
    }

    #[test]
    fn damping_preserves_mean_and_mass(dist in arb_mean_one_law(), den in 3i64..=50) {
        let delta = rat(1, den);
        let y = damping_transform(&dist, &delta).unwrap();
        prop_assert_eq!(y.mean(), dist.mean());
        let total: Rat = y.atoms().iter().map(|(_, p)| p.clone()).sum();
        prop_assert_eq!(total, Rat::one());
    }

    #[test]
    fn frac_string_round_trip(p in -10_000i64..=10_000, q in 1i64..=10_000) {
        let r = rat(p, q);
        prop_assert_eq!(from_frac_string(&to_frac_string(&r)).unwrap(), r);
    }

    #[test]
    fn snapping_recovers_exact_fractions(p in 0i64..=500, q in 1i64..=500) {
        let r = rat(p, q);
        prop_assert_eq!(snap_to_rational(to_f64(&r), 10_000), r);
    }
}

//! Exact-rational LP for fractional matchings and fractional vertex
//! covers, with a strong-duality certificate.
//!
//! The matching LP (maximize total edge weight subject to weight at most
//! 1 at each vertex) is solved by a dense exact simplex with Bland's
//! rule; the optimal cover is read off the dual. Both witnesses are
//! re-verified feasible independently of the solver.

use std::collections::BTreeMap;

use num::{One, Zero};
use rayon::prelude::*;
use serde::Deserialize;

use crate::hypergraph::{Hypergraph, HypergraphEnumerator};
use crate::rat::{from_frac_string, to_frac_string, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    Edges,
    Vertices,
}

/// A weight function on the edges (fractional matching) or vertices
/// (fractional vertex cover) of a host hypergraph, with its total value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalWeights {
    pub carrier: Carrier,
    pub weights: BTreeMap<usize, Rat>,
    pub value: Rat,
}

impl FractionalWeights {
    fn new(carrier: Carrier, weights: BTreeMap<usize, Rat>) -> Result<Self> {
        let zero = Rat::zero();
        let one = Rat::one();
        for w in weights.values() {
            if *w < zero || *w > one {
                return Err(Error::Validation(format!(
                    "weight {} outside [0,1]",
                    to_frac_string(w)
                )));
            }
        }
        let value = weights.values().sum();
        Ok(Self {
            carrier,
            weights,
            value,
        })
    }

    fn weight(&self, idx: usize) -> Rat {
        self.weights.get(&idx).cloned().unwrap_or_else(Rat::zero)
    }

    /// Fractional-matching feasibility: total weight at each vertex <= 1.
    pub fn is_feasible_matching(&self, h: &Hypergraph) -> bool {
        if self.carrier != Carrier::Edges {
            return false;
        }
        let one = Rat::one();
        (0..h.n()).all(|v| {
            let load: Rat = h
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.binary_search(&v).is_ok())
                .map(|(i, _)| self.weight(i))
                .sum();
            load <= one
        })
    }

    /// Fractional-cover feasibility: weight at least 1 on every edge.
    pub fn is_feasible_cover(&self, h: &Hypergraph) -> bool {
        if self.carrier != Carrier::Vertices {
            return false;
        }
        let one = Rat::one();
        h.edges()
            .iter()
            .all(|e| e.iter().map(|&v| self.weight(v)).sum::<Rat>() >= one)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let carrier = match self.carrier {
            Carrier::Edges => "edges",
            Carrier::Vertices => "vertices",
        };
        let weights: serde_json::Map<String, serde_json::Value> = self
            .weights
            .iter()
            .map(|(i, w)| (i.to_string(), serde_json::json!(to_frac_string(w))))
            .collect();
        serde_json::json!({
            "carrier": carrier,
            "weights": weights,
            "value": to_frac_string(&self.value),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            carrier: String,
            weights: BTreeMap<String, String>,
        }
        let wire: Wire = serde_json::from_value(v.clone())
            .map_err(|e| Error::Format(format!("bad weights JSON: {e}")))?;
        let carrier = match wire.carrier.as_str() {
            "edges" => Carrier::Edges,
            "vertices" => Carrier::Vertices,
            other => return Err(Error::Format(format!("unknown carrier {other:?}"))),
        };
        let mut weights = BTreeMap::new();
        for (k, v) in &wire.weights {
            let idx: usize = k
                .parse()
                .map_err(|_| Error::Format(format!("bad weight index {k:?}")))?;
            weights.insert(idx, from_frac_string(v)?);
        }
        Self::new(carrier, weights)
    }
}

/// Both optima and both witnesses; `nu_star == tau_star` exactly.
#[derive(Debug, Clone)]
pub struct DualityCertificate {
    pub nu_star: Rat,
    pub tau_star: Rat,
    pub matching: FractionalWeights,
    pub cover: FractionalWeights,
}

/// Maximum fractional matching nu*(H), exact.
pub fn max_fractional_matching(h: &Hypergraph) -> Result<FractionalWeights> {
    Ok(duality_certificate(h)?.matching)
}

/// Minimum fractional vertex cover tau*(H), exact.
pub fn min_fractional_cover(h: &Hypergraph) -> Result<FractionalWeights> {
    Ok(duality_certificate(h)?.cover)
}

/// Solves the matching LP exactly and extracts the optimal cover from the
/// dual, then re-verifies both witnesses and the equality nu* = tau*.
pub fn duality_certificate(h: &Hypergraph) -> Result<DualityCertificate> {
    let (primal, dual, value) = solve_matching_lp(h)?;

    let matching_weights: BTreeMap<usize, Rat> = primal
        .into_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .collect();
    let cover_weights: BTreeMap<usize, Rat> = dual
        .into_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .collect();

    let matching = FractionalWeights::new(Carrier::Edges, matching_weights)
        .map_err(|e| Error::Solver(format!("primal witness invalid: {e}")))?;
    let cover = FractionalWeights::new(Carrier::Vertices, cover_weights)
        .map_err(|e| Error::Solver(format!("dual witness invalid: {e}")))?;

    if !matching.is_feasible_matching(h) {
        return Err(Error::Solver("primal witness infeasible".into()));
    }
    if !cover.is_feasible_cover(h) {
        return Err(Error::Solver("dual witness infeasible".into()));
    }
    if matching.value != value || cover.value != value {
        return Err(Error::Solver("witness values disagree with optimum".into()));
    }

    Ok(DualityCertificate {
        nu_star: value.clone(),
        tau_star: value,
        matching,
        cover,
    })
}

/// Dense exact simplex for: maximize sum(x) s.t. for each vertex v,
/// sum of x_e over edges containing v <= 1, x >= 0. Returns
/// (edge weights, vertex duals, optimal value). Bland's rule throughout,
/// so the pivot sequence (and hence the witness) is deterministic.
fn solve_matching_lp(h: &Hypergraph) -> Result<(Vec<Rat>, Vec<Rat>, Rat)> {
    let m = h.n(); // constraint rows
    let ne = h.edge_count();
    if ne == 0 {
        return Ok((vec![], vec![Rat::zero(); m], Rat::zero()));
    }
    let cols = ne + m; // edge vars then slacks
    let zero = Rat::zero();
    let one = Rat::one();

    // tableau rows: [a_1 .. a_cols | rhs]
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for v in 0..m {
        let mut row = vec![zero.clone(); cols + 1];
        for (j, e) in h.edges().iter().enumerate() {
            if e.binary_search(&v).is_ok() {
                row[j] = one.clone();
            }
        }
        row[ne + v] = one.clone();
        row[cols] = one.clone();
        tab.push(row);
    }
    // reduced-cost row for maximization: starts as the objective c
    let mut obj = vec![zero.clone(); cols + 1];
    for c in obj.iter_mut().take(ne) {
        *c = one.clone();
    }
    let mut basis: Vec<usize> = (ne..cols).collect();

    loop {
        // Bland: entering = smallest index with positive reduced cost
        let entering = match (0..cols).find(|&j| obj[j] > zero) {
            Some(j) => j,
            None => break,
        };
        // ratio test, ties by smallest basis variable (Bland)
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[entering] > zero {
                let ratio = &row[cols] / &row[entering];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let (pivot_row, _) = leave.ok_or_else(|| {
            Error::Solver("unbounded matching LP; constraint matrix corrupt".into())
        })?;

        // pivot
        let pv = tab[pivot_row][entering].clone();
        for x in tab[pivot_row].iter_mut() {
            *x /= &pv;
        }
        for i in 0..m {
            if i == pivot_row || tab[i][entering].is_zero() {
                continue;
            }
            let factor = tab[i][entering].clone();
            for j in 0..=cols {
                let delta = &factor * &tab[pivot_row][j];
                tab[i][j] -= delta;
            }
        }
        if !obj[entering].is_zero() {
            let factor = obj[entering].clone();
            for j in 0..=cols {
                let delta = &factor * &tab[pivot_row][j];
                obj[j] -= delta;
            }
        }
        basis[pivot_row] = entering;
    }

    let mut primal = vec![zero.clone(); ne];
    for (i, &b) in basis.iter().enumerate() {
        if b < ne {
            primal[b] = tab[i][cols].clone();
        }
    }
    // dual value for vertex v = negated reduced cost of its slack
    let dual: Vec<Rat> = (0..m).map(|v| -obj[ne + v].clone()).collect();
    let value = -obj[cols].clone();
    Ok((primal, dual, value))
}

/// Result of the exact fractional threshold computation at d = 0: the
/// least edge count forcing nu* >= s, plus a witness for one less.
#[derive(Debug, Clone)]
pub struct FractionalThresholdResult {
    pub e0: usize,
    pub witness: Option<Hypergraph>,
}

/// Exact f_0^s(l, m): least E0 such that every l-graph on [m] with at
/// least E0 edges has a fractional matching of size >= s.
pub fn exact_f_0_s(l: usize, m: usize, s: &Rat, cap: u32) -> Result<FractionalThresholdResult> {
    if *s <= Rat::zero() {
        return Ok(FractionalThresholdResult { e0: 0, witness: None });
    }
    let enumerator = HypergraphEnumerator::new(m, l, cap)?;
    let end = enumerator.total();

    let worst = (0..end as usize)
        .into_par_iter()
        .map(|mask| {
            let h = enumerator.from_mask(mask as u64);
            let nu = duality_certificate(&h).expect("LP solve on valid input").nu_star;
            if nu >= *s {
                None
            } else {
                Some((h.edge_count(), mask))
            }
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some((ea, ma)), Some((eb, mb))) => {
                    if (eb, std::cmp::Reverse(mb)) > (ea, std::cmp::Reverse(ma)) {
                        Some((eb, mb))
                    } else {
                        Some((ea, ma))
                    }
                }
            },
        );

    match worst {
        None => Ok(FractionalThresholdResult { e0: 0, witness: None }),
        Some((ec, mask)) => Ok(FractionalThresholdResult {
            e0: ec + 1,
            witness: Some(enumerator.from_mask(mask as u64)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, 2, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap()
    }

    #[test]
    fn triangle_duality() {
        let c = duality_certificate(&triangle()).unwrap();
        assert_eq!(c.nu_star, rat(3, 2));
        assert_eq!(c.tau_star, rat(3, 2));
        assert!(c.matching.is_feasible_matching(&triangle()));
        assert!(c.cover.is_feasible_cover(&triangle()));
    }

    #[test]
    fn single_edge_and_empty() {
        let h = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(max_fractional_matching(&h).unwrap().value, rat_int(1));
        assert_eq!(min_fractional_cover(&h).unwrap().value, rat_int(1));
        let e = Hypergraph::empty(4, 2);
        let c = duality_certificate(&e).unwrap();
        assert_eq!(c.nu_star, rat_int(0));
        assert_eq!(c.tau_star, rat_int(0));
    }

    #[test]
    fn k4_perfect_fractional() {
        let h = Hypergraph::complete(4, 2);
        assert_eq!(max_fractional_matching(&h).unwrap().value, rat_int(2));
    }

    #[test]
    fn complete_3graph_on_4_vertices() {
        let h = Hypergraph::complete(4, 3);
        let c = duality_certificate(&h).unwrap();
        assert_eq!(c.tau_star, rat(4, 3));
        assert_eq!(c.nu_star, rat(4, 3));
    }

    #[test]
    fn sandwich_bound() {
        for (n, k) in [(5usize, 2usize), (6, 3), (7, 3)] {
            let h = Hypergraph::complete(n, k);
            let nu = max_fractional_matching(&h).unwrap().value;
            let int_size = rat_int(h.max_matching().size() as i64);
            assert!(nu >= int_size);
            assert!(nu <= rat(n as i64, k as i64));
        }
    }

    #[test]
    fn isolated_vertex_is_inert() {
        let h = triangle();
        let h2 = Hypergraph::new(4, 2, h.edges().to_vec()).unwrap();
        assert_eq!(
            max_fractional_matching(&h).unwrap().value,
            max_fractional_matching(&h2).unwrap().value
        );
    }

    #[test]
    fn fractional_threshold_small() {
        let r = exact_f_0_s(2, 4, &rat_int(2), 30).unwrap();
        assert_eq!(r.e0, 4);
        let w = r.witness.unwrap();
        assert_eq!(w.edge_count(), 3);
        assert!(duality_certificate(&w).unwrap().nu_star < rat_int(2));

        let r = exact_f_0_s(2, 3, &rat(3, 2), 30).unwrap();
        assert_eq!(r.e0, 3);

        assert_eq!(exact_f_0_s(2, 4, &rat_int(0), 30).unwrap().e0, 0);
    }

    #[test]
    fn weights_json_round_trip() {
        let c = duality_certificate(&triangle()).unwrap();
        let j = c.cover.to_json();
        assert_eq!(FractionalWeights::from_json(&j).unwrap(), c.cover);
        assert_eq!(j["value"], "3/2");
    }
}

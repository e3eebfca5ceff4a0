//! Closed-form evaluators for the named matching-threshold and
//! small-deviation constants, plus comparison reports.
//!
//! All values are exact rationals; decimal renderings are advisory.

use num::{One, Zero};
use serde::Serialize;

use crate::rat::{pow, rat, rat_int, to_decimal_string, to_frac_string, Rat};
use crate::{Error, Result};

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// A proved upper bound.
    Proved,
    /// Conjectural value; never selected as `best`.
    Conjectural,
    /// A lower-bound constant; never selected as `best`.
    LowerBound,
    /// Known only asymptotically; carried for context, never `best`.
    AsymptoticOnly,
}

#[derive(Debug, Clone)]
pub struct BoundEntry {
    pub name: String,
    pub value: Rat,
    pub provenance: String,
    pub status: Status,
}

/// Named bound values for one parameter choice, with the minimal proved
/// upper bound singled out.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub params: Vec<(String, String)>,
    pub entries: Vec<BoundEntry>,
    pub best: String,
}

impl BoundReport {
    fn build(params: Vec<(String, String)>, entries: Vec<BoundEntry>) -> Self {
        let best = entries
            .iter()
            .filter(|e| e.status == Status::Proved)
            .min_by(|a, b| a.value.cmp(&b.value).then(a.name.cmp(&b.name)))
            .map(|e| e.name.clone())
            .unwrap_or_default();
        Self {
            params,
            entries,
            best,
        }
    }

    pub fn best_value(&self) -> Option<&Rat> {
        self.entries
            .iter()
            .find(|e| e.name == self.best)
            .map(|e| &e.value)
    }

    pub fn to_json(&self, precision: usize) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "value": to_frac_string(&e.value),
                    "decimal": to_decimal_string(&e.value, precision),
                    "provenance": e.provenance,
                    "status": serde_json::to_value(e.status).unwrap(),
                })
            })
            .collect();
        serde_json::json!({"params": params, "entries": entries, "best": self.best})
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = String::from("name,value,decimal,provenance,status,best\n");
        for e in &self.entries {
            let status = serde_json::to_value(e.status).unwrap();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.name,
                to_frac_string(&e.value),
                to_decimal_string(&e.value, precision),
                e.provenance,
                status.as_str().unwrap(),
                e.name == self.best,
            ));
        }
        out
    }
}

/// The conjectured minimum d-degree threshold constant
/// max{1/2, 1 - (1 - 1/k)^(k-d)}. A proved lower bound on m_d(k).
pub fn conjectured_md_threshold(k: u32, d: u32) -> Result<Rat> {
    if k < 2 || d < 1 || d > k - 1 {
        return Err(Error::InvalidQuery(format!(
            "need k >= 2 and 1 <= d <= k-1, got k={k} d={d}"
        )));
    }
    let half = rat(1, 2);
    let alt = Rat::one() - pow(&(Rat::one() - rat(1, k as i64)), k - d);
    Ok(half.max(alt))
}

/// The Kuehn-Osthus-Townsend constant (k-d)/k - (k-d-1)/k^(k-d).
pub fn kot_bound(k: u32, d: u32) -> Result<Rat> {
    if k < 3 || d < 1 || 2 * d > k {
        return Err(Error::InvalidQuery(format!(
            "need k >= 3 and 1 <= d <= k/2, got k={k} d={d}"
        )));
    }
    let kd = (k - d) as i64;
    Ok(rat(kd, k as i64) - rat(kd - 1, 1) / pow(&rat_int(k as i64), k - d))
}

/// Han's function g(k,d) = 1 - (1 - (k-d)(k-2d-1)/(k-1)^2)(1 - 1/k)^(k-d).
///
/// Stated for 1 <= d < k/2; also evaluated as the deviation bound
/// g(l+d, d), which stays inside that range for integer l, d >= 1.
pub fn han_g(k: u32, d: u32) -> Result<Rat> {
    if k < 3 || d < 1 || 2 * d >= k {
        return Err(Error::InvalidQuery(format!(
            "need k >= 3 and 1 <= d < k/2, got k={k} d={d}"
        )));
    }
    let kd = (k - d) as i64;
    let num = kd * (k as i64 - 2 * d as i64 - 1);
    let den = (k as i64 - 1) * (k as i64 - 1);
    let inner = Rat::one() - rat(num, den);
    Ok(Rat::one() - inner * pow(&(Rat::one() - rat(1, k as i64)), k - d))
}

/// The proved universal constant 43/50 bounding the mean-1 i.i.d. tail.
pub fn garnett_bound() -> Rat {
    rat(43, 50)
}

/// Markov's inequality for the sum: l/(l+d).
pub fn markov_bound(l: u32, d: &Rat) -> Result<Rat> {
    if l < 1 || *d <= Rat::zero() {
        return Err(Error::InvalidQuery(format!(
            "need l >= 1 and d > 0, got l={l} d={}",
            to_frac_string(d)
        )));
    }
    let lr = rat_int(l as i64);
    Ok(&lr / (&lr + d))
}

/// The conjectured tail bound 1 - (1 - 1/(l+d))^l.
pub fn feige_conjecture_value(l: u32, d: &Rat) -> Result<Rat> {
    if l < 1 || *d <= Rat::zero() {
        return Err(Error::InvalidQuery(format!(
            "need l >= 1 and d > 0, got l={l} d={}",
            to_frac_string(d)
        )));
    }
    let ld = rat_int(l as i64) + d;
    Ok(Rat::one() - pow(&(Rat::one() - ld.recip()), l))
}

/// Comparison report for the minimum d-degree matching threshold m_d(k).
pub fn matching_bound_report(k: u32, d: u32) -> Result<BoundReport> {
    let conjectured = conjectured_md_threshold(k, d)?;
    let mut entries = vec![BoundEntry {
        name: "conjectured".into(),
        value: conjectured,
        provenance: "extremal constructions (space/parity barriers)".into(),
        status: Status::LowerBound,
    }];
    if let Ok(v) = kot_bound(k, d) {
        entries.push(BoundEntry {
            name: "kot".into(),
            value: v,
            provenance: "Kuehn-Osthus-Townsend".into(),
            status: Status::Proved,
        });
    }
    if let Ok(v) = han_g(k, d) {
        // Han's threshold constant is the max of g(k,d) with the
        // near-half term; g alone can dip below 1/2.
        entries.push(BoundEntry {
            name: "han".into(),
            value: v.max(rat(1, 2)),
            provenance: "Han".into(),
            status: Status::Proved,
        });
    }
    if d >= 1 && 2 * d <= k && k >= 3 {
        entries.push(BoundEntry {
            name: "universal".into(),
            value: Rat::one() - rat(7, 50),
            provenance: "Garnett tail bound via the fractional reduction".into(),
            status: Status::Proved,
        });
    }
    if 2 * d >= k {
        // exact form known in this range; constant 1/2
        entries.push(BoundEntry {
            name: "half-exact".into(),
            value: rat(1, 2),
            provenance: "Treglown-Zhao exact result (asymptotic constant)".into(),
            status: Status::AsymptoticOnly,
        });
    }
    Ok(BoundReport::build(
        vec![("k".into(), k.to_string()), ("d".into(), d.to_string())],
        entries,
    ))
}

/// Comparison report for the mean-1 i.i.d. deviation probability
/// Pr[X_1 + ... + X_l >= l + d].
pub fn deviation_bound_report(l: u32, d: u32) -> Result<BoundReport> {
    if l < 1 || d < 1 {
        return Err(Error::InvalidQuery(format!(
            "need l, d >= 1, got l={l} d={d}"
        )));
    }
    let dr = rat_int(d as i64);
    let mut entries = vec![
        BoundEntry {
            name: "markov".into(),
            value: markov_bound(l, &dr)?,
            provenance: "Markov's inequality".into(),
            status: Status::Proved,
        },
        BoundEntry {
            name: "garnett".into(),
            value: garnett_bound(),
            provenance: "Garnett".into(),
            status: Status::Proved,
        },
    ];
    if let Ok(v) = han_g(l + d, d) {
        entries.push(BoundEntry {
            name: "han-g".into(),
            value: v,
            provenance: "Han threshold transferred through the equivalence".into(),
            status: Status::Proved,
        });
    }
    entries.push(BoundEntry {
        name: "feige-conjectured".into(),
        value: feige_conjecture_value(l, &dr)?,
        provenance: "Feige's conjecture (open)".into(),
        status: Status::Conjectural,
    });
    Ok(BoundReport::build(
        vec![("l".into(), l.to_string()), ("d".into(), d.to_string())],
        entries,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjectured_constants() {
        assert_eq!(conjectured_md_threshold(3, 1).unwrap(), rat(5, 9));
        assert_eq!(conjectured_md_threshold(3, 2).unwrap(), rat(1, 2));
        assert_eq!(conjectured_md_threshold(2, 1).unwrap(), rat(1, 2));
        assert!(conjectured_md_threshold(3, 3).is_err());
    }

    #[test]
    fn kot_constants() {
        assert_eq!(kot_bound(3, 1).unwrap(), rat(5, 9));
        assert_eq!(kot_bound(4, 2).unwrap(), rat(7, 16));
        assert_eq!(kot_bound(4, 1).unwrap(), rat(23, 32));
        assert!(kot_bound(4, 3).is_err());
    }

    #[test]
    fn han_g_constants() {
        assert_eq!(han_g(3, 1).unwrap(), rat(5, 9));
        assert_eq!(han_g(5, 1).unwrap(), rat(497, 625));
        // g(18,8) < 1/2
        let g = han_g(18, 8).unwrap();
        assert!(g < rat(1, 2));
        let dec = to_decimal_string(&g, 4);
        assert!(dec.starts_with("0.454"), "g(18,8) = {dec}");
    }

    #[test]
    fn garnett_and_history() {
        assert_eq!(garnett_bound(), rat(43, 50));
        assert_eq!(Rat::one() - rat(7, 50), rat(43, 50));
        assert!(rat(43, 50) < rat(7, 8));
        assert!(rat(7, 8) < rat(12, 13));
    }

    #[test]
    fn markov_and_feige_values() {
        assert_eq!(markov_bound(2, &rat_int(2)).unwrap(), rat(1, 2));
        assert_eq!(markov_bound(3, &rat_int(1)).unwrap(), rat(3, 4));
        assert_eq!(feige_conjecture_value(2, &rat_int(1)).unwrap(), rat(5, 9));
        assert_eq!(feige_conjecture_value(1, &rat_int(1)).unwrap(), rat(1, 2));
        assert_eq!(feige_conjecture_value(3, &rat_int(1)).unwrap(), rat(37, 64));
    }

    #[test]
    fn feige_strictly_beats_markov() {
        for l in 2..=20 {
            for d in 1..=5 {
                let dr = rat_int(d);
                assert!(
                    feige_conjecture_value(l, &dr).unwrap() < markov_bound(l, &dr).unwrap(),
                    "l={l} d={d}"
                );
            }
        }
    }

    #[test]
    fn matching_report_three_way_agreement() {
        let r = matching_bound_report(3, 1).unwrap();
        let by_name = |n: &str| {
            r.entries
                .iter()
                .find(|e| e.name == n)
                .map(|e| e.value.clone())
                .unwrap()
        };
        assert_eq!(by_name("conjectured"), rat(5, 9));
        assert_eq!(by_name("kot"), rat(5, 9));
        assert_eq!(by_name("han"), rat(5, 9));
        assert_eq!(*r.best_value().unwrap(), rat(5, 9));
    }

    #[test]
    fn matching_report_large_k() {
        let r = matching_bound_report(100, 1).unwrap();
        assert_eq!(r.best, "universal");
        assert_eq!(*r.best_value().unwrap(), rat(43, 50));
    }

    #[test]
    fn deviation_report_improvement_region() {
        let r = deviation_bound_report(10, 8).unwrap();
        assert_eq!(r.best, "han-g");
        assert!(*r.best_value().unwrap() < rat(1, 2));

        let r = deviation_bound_report(10, 1).unwrap();
        assert_eq!(*r.best_value().unwrap(), rat(43, 50));

        let r = deviation_bound_report(1, 1).unwrap();
        let markov = r.entries.iter().find(|e| e.name == "markov").unwrap();
        assert_eq!(markov.value, rat(1, 2));
    }

    // Restricted to 2d < k: at d = k/2 the stated KOT constant drops below
    // the conjectured lower-bound constant 1/2 (e.g. 7/16 at k=4, d=2).
    #[test]
    fn conjectured_is_below_every_proved_bound() {
        for k in 3..=12u32 {
            for d in 1..=((k - 1) / 2) {
                let lower = conjectured_md_threshold(k, d).unwrap();
                let r = matching_bound_report(k, d).unwrap();
                for e in r.entries.iter().filter(|e| e.status == Status::Proved) {
                    assert!(lower <= e.value, "k={k} d={d} entry {}", e.name);
                }
            }
        }
    }

    #[test]
    fn feige_limit_toward_1_minus_1_over_e() {
        // partial sum of sum (-1)^n / n! to 50 terms; error < 1/51!
        let mut approx = Rat::zero();
        let mut term = Rat::one();
        for n in 0..=50u32 {
            if n > 0 {
                term = term / rat_int(n as i64) * rat_int(-1);
            }
            approx += &term;
        }
        let one_minus_inv_e = Rat::one() - approx;
        for l in [10u32, 50, 100, 500, 1000] {
            let v = feige_conjecture_value(l, &Rat::one()).unwrap();
            let diff = if v > one_minus_inv_e {
                &v - &one_minus_inv_e
            } else {
                &one_minus_inv_e - &v
            };
            assert!(diff < rat(1, l as i64), "l={l}");
        }
    }

    #[test]
    fn report_json_shape() {
        let j = matching_bound_report(6, 1).unwrap().to_json(12);
        assert_eq!(j["params"]["k"], "6");
        assert!(j["entries"].as_array().unwrap().len() >= 3);
        assert!(j["best"].is_string());
    }
}

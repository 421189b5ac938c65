//! Degree bookkeeping for the Schottky locus in genus five: formal
//! intersection numbers of Θ and the exceptional divisor E on the blowup of
//! a principally polarized abelian fourfold at the origin, and the sum of
//! local degrees checked against the point count of Q_8^-.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::quadric_configuration;
use crate::error::{Error, Result};
use crate::gf2geom::point_count_formula;

/// Top self-intersection Θ^4 = 4! of a principal polarization in dimension 4.
pub const THETA_TOP: i64 = 24;
/// E^4 = (-1)^3 for the exceptional P^3 over a point of a fourfold.
pub const EXCEPTIONAL_TOP: i64 = -1;
/// Θ^a E^b with a, b >= 1: Θ is pulled back from the base, E lies over a point.
pub const MIXED_TOP: i64 = 0;

/// Integer combination of monomials Θ^a E^b, keyed by `(a, b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorPolynomial {
    terms: BTreeMap<(u32, u32), i64>,
}

impl DivisorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn monomial(theta: u32, e: u32, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(theta, e, coeff);
        p
    }

    /// `a Θ + b E`.
    pub fn linear(theta_coeff: i64, e_coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, theta_coeff);
        p.add_term(0, 1, e_coeff);
        p
    }

    /// The class 2Θ - 4E.
    pub fn gamma00_class() -> Self {
        Self::linear(2, -4)
    }

    fn add_term(&mut self, theta: u32, e: u32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry((theta, e)).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&(theta, e));
        }
    }

    pub fn coeff(&self, theta: u32, e: u32) -> i64 {
        self.terms.get(&(theta, e)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), i64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a + b == 1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &c) in &self.terms {
            out.add_term(a, b, c * k);
        }
        out
    }
}

impl std::ops::Add for &DivisorPolynomial {
    type Output = DivisorPolynomial;

    fn add(self, rhs: &DivisorPolynomial) -> DivisorPolynomial {
        let mut out = self.clone();
        for (&(a, b), &c) in &rhs.terms {
            out.add_term(a, b, c);
        }
        out
    }
}

impl std::ops::Mul for &DivisorPolynomial {
    type Output = DivisorPolynomial;

    fn mul(self, rhs: &DivisorPolynomial) -> DivisorPolynomial {
        let mut out = DivisorPolynomial::zero();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for DivisorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // highest Θ-power first
        for (k, (&(a, b), &c)) in self.terms.iter().rev().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if k > 0 {
                f.write_str(" ")?;
            }
            let mag = c.unsigned_abs();
            let mut body = String::new();
            for (sym, exp) in [("Θ", a), ("E", b)] {
                match exp {
                    0 => {}
                    1 => body.push_str(sym),
                    e => body.push_str(&format!("{sym}^{e}")),
                }
            }
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&body)?;
            } else {
                write!(f, "{mag}{body}")?;
            }
        }
        Ok(())
    }
}

/// Expands `base^k` for a linear `base`.
pub fn expand_power(base: &DivisorPolynomial, k: u32) -> Result<DivisorPolynomial> {
    if !base.is_linear() {
        return Err(Error::InvalidArgument(format!(
            "{base} is not a linear combination of Θ and E"
        )));
    }
    let mut acc = DivisorPolynomial::one();
    for _ in 0..k {
        acc = &acc * base;
    }
    Ok(acc)
}

/// Values of top-degree monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRules {
    pub ambient_dim: u32,
    #[serde(with = "monomial_table")]
    pub top_values: BTreeMap<(u32, u32), i64>,
}

// JSON keys must be strings, so the table is written as [a, b, value] rows.
mod monomial_table {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(u32, u32), i64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<(u32, u32, i64)> = m.iter().map(|(&(a, b), &v)| (a, b, v)).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(u32, u32), i64>, D::Error> {
        let rows = Vec::<(u32, u32, i64)>::deserialize(d)?;
        Ok(rows.into_iter().map(|(a, b, v)| ((a, b), v)).collect())
    }
}

impl Default for IntersectionRules {
    fn default() -> Self {
        let ambient_dim = 4;
        let top_values = (0..=ambient_dim)
            .map(|a| {
                let b = ambient_dim - a;
                let v = match (a, b) {
                    (_, 0) => THETA_TOP,
                    (0, _) => EXCEPTIONAL_TOP,
                    _ => MIXED_TOP,
                };
                ((a, b), v)
            })
            .collect();
        IntersectionRules {
            ambient_dim,
            top_values,
        }
    }
}

impl IntersectionRules {
    pub fn with_value(mut self, theta: u32, e: u32, value: i64) -> Result<Self> {
        if theta + e != self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "Θ^{theta}E^{e} is not of top degree {}",
                self.ambient_dim
            )));
        }
        self.top_values.insert((theta, e), value);
        Ok(self)
    }

    /// Parses overrides like `4,0=24;0,4=0` on top of the defaults.
    pub fn parse_overrides(text: &str) -> Result<Self> {
        let mut rules = IntersectionRules::default();
        for item in text
            .split([';', ' '])
            .filter(|s| !s.is_empty())
        {
            let bad = || Error::InvalidArgument(format!("bad rule {item:?}, expected a,b=value"));
            let (lhs, rhs) = item.split_once('=').ok_or_else(bad)?;
            let (a, b) = lhs.split_once(',').ok_or_else(bad)?;
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            let v: i64 = rhs.trim().parse().map_err(|_| bad())?;
            rules = rules.with_value(a, b, v)?;
        }
        Ok(rules)
    }
}

/// Σ coefficient · value over the terms of a top-degree polynomial.
pub fn evaluate_intersection(p: &DivisorPolynomial, rules: &IntersectionRules) -> Result<i64> {
    let mut total = 0i64;
    for ((a, b), c) in p.terms() {
        if a + b != rules.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "term Θ^{a}E^{b} is not of top degree {}",
                rules.ambient_dim
            )));
        }
        let v = rules
            .top_values
            .get(&(a, b))
            .ok_or_else(|| Error::InvalidArgument(format!("no rule for Θ^{a}E^{b}")))?;
        total += c * v;
    }
    Ok(total)
}

/// Half of (2Θ - 4E)^4 under `rules`.
pub fn gamma00_degree_with(rules: &IntersectionRules) -> Result<i64> {
    let power = expand_power(&DivisorPolynomial::gamma00_class(), rules.ambient_dim)?;
    let full = evaluate_intersection(&power, rules)?;
    if full % 2 != 0 {
        return Err(Error::Inconsistent(format!(
            "(2Θ-4E)^{} evaluates to the odd number {full}",
            rules.ambient_dim
        )));
    }
    Ok(full / 2)
}

pub fn gamma00_degree() -> Result<i64> {
    gamma00_degree_with(&IntersectionRules::default())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub locus: String,
    pub local_degree: i64,
    pub basis: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub expected: i64,
    pub found: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeLedger {
    pub entries: Vec<LedgerEntry>,
    pub total: i64,
    pub rules: IntersectionRules,
    pub cross_checks: Vec<CrossCheck>,
}

impl DegreeLedger {
    pub fn passed(&self) -> bool {
        self.cross_checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&format!(
                "{:<24} {:>5}   {}\n",
                e.locus, e.local_degree, e.basis
            ));
        }
        s.push_str(&format!("{:<24} {:>5}\n", "total", self.total));
        for c in &self.cross_checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!(
                "[{mark}] {}: expected {}, found {}\n",
                c.name, c.expected, c.found
            ));
        }
        s
    }
}

/// Builds the ledger under `rules` and records the cross-checks without
/// failing on them.
pub fn build_degree_ledger(rules: &IntersectionRules) -> Result<DegreeLedger> {
    let q6_points = point_count_formula(3)? as i64;
    let entries = vec![
        LedgerEntry {
            locus: "cubic threefold locus".into(),
            local_degree: 1,
            basis: "restriction is birational onto its image".into(),
        },
        LedgerEntry {
            locus: "Jacobian locus".into(),
            local_degree: 2 * q6_points,
            basis: format!("double cover of the 27 lines: 2 x |Q6-| = 2 x {q6_points}"),
        },
        LedgerEntry {
            locus: "boundary locus".into(),
            local_degree: gamma00_degree_with(rules)?,
            basis: "(2Θ-4E)^4 / 2 on the blowup at the origin".into(),
        },
    ];
    let total = entries.iter().map(|e| e.local_degree).sum();
    let formula = point_count_formula(4)? as i64;
    let enumerated = quadric_configuration(4)?.num_points() as i64;
    let cross_checks = vec![
        CrossCheck {
            name: "total = 2^3(2^4-1)-1".into(),
            expected: formula,
            found: total,
            pass: total == formula,
        },
        CrossCheck {
            name: "total = enumerated |Q8-|".into(),
            expected: enumerated,
            found: total,
            pass: total == enumerated,
        },
    ];
    Ok(DegreeLedger {
        entries,
        total,
        rules: rules.clone(),
        cross_checks,
    })
}

/// The default ledger; a failed cross-check is an error.
pub fn schottky_degree_ledger() -> Result<DegreeLedger> {
    let ledger = build_degree_ledger(&IntersectionRules::default())?;
    if !ledger.passed() {
        return Err(Error::Inconsistent(format!(
            "degree ledger cross-check failed:\n{}",
            ledger.to_text()
        )));
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> i64 {
        (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i) as i64
    }

    #[test]
    fn simple_powers() {
        let p = expand_power(&DivisorPolynomial::linear(2, 0), 4).unwrap();
        assert_eq!(p, DivisorPolynomial::monomial(4, 0, 16));
        let q = expand_power(&DivisorPolynomial::linear(1, 1), 2).unwrap();
        assert_eq!(q.coeff(2, 0), 1);
        assert_eq!(q.coeff(1, 1), 2);
        assert_eq!(q.coeff(0, 2), 1);
        assert_eq!(
            expand_power(&DivisorPolynomial::linear(3, 5), 0).unwrap(),
            DivisorPolynomial::one()
        );
        assert!(expand_power(&DivisorPolynomial::monomial(2, 0, 1), 2).is_err());
    }

    /// Binomial-coefficient oracle for (2Θ - 4E)^4.
    #[test]
    fn gamma_class_expansion_matches_binomials() {
        let p = expand_power(&DivisorPolynomial::gamma00_class(), 4).unwrap();
        for k in 0..=4u32 {
            let expected = binom(4, k as u64) * 2i64.pow(4 - k) * (-4i64).pow(k);
            assert_eq!(p.coeff(4 - k, k), expected);
        }
        assert_eq!(
            [
                p.coeff(4, 0),
                p.coeff(3, 1),
                p.coeff(2, 2),
                p.coeff(1, 3),
                p.coeff(0, 4)
            ],
            [16, -128, 384, -512, 256]
        );
        assert_eq!(
            p.to_string(),
            "16Θ^4 - 128Θ^3E + 384Θ^2E^2 - 512ΘE^3 + 256E^4"
        );
    }

    #[test]
    fn evaluation() {
        let rules = IntersectionRules::default();
        assert_eq!(
            evaluate_intersection(&DivisorPolynomial::monomial(4, 0, 16), &rules).unwrap(),
            384
        );
        assert_eq!(
            evaluate_intersection(&DivisorPolynomial::monomial(0, 4, 256), &rules).unwrap(),
            -256
        );
        let p = expand_power(&DivisorPolynomial::gamma00_class(), 4).unwrap();
        assert_eq!(evaluate_intersection(&p, &rules).unwrap(), 128);
        assert!(evaluate_intersection(&DivisorPolynomial::monomial(3, 0, 1), &rules).is_err());
    }

    #[test]
    fn gamma00() {
        assert_eq!(gamma00_degree().unwrap(), 64);
        let no_e = IntersectionRules::default().with_value(0, 4, 0).unwrap();
        assert_eq!(gamma00_degree_with(&no_e).unwrap(), 192);
        let theta_only = expand_power(&DivisorPolynomial::linear(2, 0), 4).unwrap();
        assert_eq!(evaluate_intersection(&theta_only, &no_e).unwrap() / 2, 192);
    }

    #[test]
    fn rule_overrides() {
        let r = IntersectionRules::parse_overrides("4,0=24;0,4=0").unwrap();
        assert_eq!(r.top_values[&(0, 4)], 0);
        assert!(IntersectionRules::parse_overrides("4,1=3").is_err());
        assert!(IntersectionRules::parse_overrides("nonsense").is_err());
    }

    #[test]
    fn ledger_totals() {
        let l = schottky_degree_ledger().unwrap();
        let degrees: Vec<i64> = l.entries.iter().map(|e| e.local_degree).collect();
        assert_eq!(degrees, vec![1, 54, 64]);
        assert_eq!(l.total, 119);
        assert!(l.passed());
        let off = build_degree_ledger(&IntersectionRules::default().with_value(0, 4, 0).unwrap())
            .unwrap();
        assert!(!off.passed());
    }

    #[test]
    fn rules_round_trip_through_json() {
        let r = IntersectionRules::default().with_value(4, 0, 24).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<IntersectionRules>(&text).unwrap(), r);
    }
}

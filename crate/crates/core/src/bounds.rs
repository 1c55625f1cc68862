//! Exact evaluation of the counting lower bounds for biembeddings and tour
//! solutions, with their parameter hypotheses.

use std::f64::consts::{E, PI};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knight::{is_prime, Check};

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("entropy argument {p} outside [0, 1]")));
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Number of derangements of an `m`-set.
pub fn derangements(m: u64) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
    if m == 0 {
        return prev;
    }
    for i in 2..=m {
        let next = (&prev + &cur) * BigUint::from(i - 1);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn binom(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    (0..b).fold(BigUint::one(), |acc, i| acc * BigUint::from(a - i) / BigUint::from(i + 1))
}

/// `log2` of a positive big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").log2() + shift as f64
}

fn log2_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).log2()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "CDY")]
    Cdy,
    GeneralBound,
    #[serde(rename = "CDY2")]
    Cdy2,
    #[serde(rename = "CDY3")]
    Cdy3,
    #[serde(rename = "CDY4")]
    Cdy4,
    #[serde(rename = "CDY5")]
    Cdy5,
    DiagBi,
    DiagBi2,
    DiagBi3,
    Prop3diag,
    PropPower2,
    PropK7,
    PropPrime,
    PropPairs,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::Cdy,
        TheoremId::GeneralBound,
        TheoremId::Cdy2,
        TheoremId::Cdy3,
        TheoremId::Cdy4,
        TheoremId::Cdy5,
        TheoremId::DiagBi,
        TheoremId::DiagBi2,
        TheoremId::DiagBi3,
        TheoremId::Prop3diag,
        TheoremId::PropPower2,
        TheoremId::PropK7,
        TheoremId::PropPrime,
        TheoremId::PropPairs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Cdy => "CDY",
            TheoremId::GeneralBound => "GeneralBound",
            TheoremId::Cdy2 => "CDY2",
            TheoremId::Cdy3 => "CDY3",
            TheoremId::Cdy4 => "CDY4",
            TheoremId::Cdy5 => "CDY5",
            TheoremId::DiagBi => "DiagBi",
            TheoremId::DiagBi2 => "DiagBi2",
            TheoremId::DiagBi3 => "DiagBi3",
            TheoremId::Prop3diag => "Prop3diag",
            TheoremId::PropPower2 => "PropPower2",
            TheoremId::PropK7 => "PropK7",
            TheoremId::PropPrime => "PropPrime",
            TheoremId::PropPairs => "PropPairs",
        }
    }

    fn cdy_family(self) -> bool {
        matches!(
            self,
            TheoremId::Cdy | TheoremId::GeneralBound | TheoremId::Cdy2 | TheoremId::Cdy3 | TheoremId::Cdy4 | TheoremId::Cdy5
        )
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameters(format!("unknown theorem `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub theorem: TheoremId,
    pub n: u64,
    pub k: u64,
    /// Order of the forbidden subgroup, where the statement depends on it.
    pub subgroup_t: Option<u64>,
    /// Width offset of the pairs construction; enables its gcd checks.
    pub s1: Option<u64>,
    pub force: bool,
}

impl BoundQuery {
    pub fn new(theorem: TheoremId, n: u64, k: u64) -> Self {
        BoundQuery { theorem, n, k, subgroup_t: None, s1: None, force: false }
    }

    pub fn subgroup_t(mut self, t: u64) -> Self {
        self.subgroup_t = Some(t);
        self
    }

    pub fn s1(mut self, s1: u64) -> Self {
        self.s1 = Some(s1);
        self
    }

    pub fn force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub theorem: TheoremId,
    pub n: u64,
    pub k: u64,
    pub subgroup_t: Option<u64>,
    /// `(k - 3) / 4` for the theorems with `k = 4t + 3`.
    pub cdy_t: Option<u64>,
    pub v: Option<u64>,
    pub hypotheses: Vec<Check>,
    pub hypotheses_hold: bool,
    /// Exact value as an integer or `p/q`, when the bound is rational.
    pub exact: Option<String>,
    /// `floor` of the bound, always exact.
    pub floor: String,
    pub approx: f64,
    pub log2: f64,
    /// `log2` of the asymptotic right-hand side, for reference only.
    pub asymptotic_log2: Option<f64>,
}

fn check(name: impl Into<String>, ok: bool) -> Check {
    Check { name: name.into(), ok }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn t_clause_k(n: u64, k: u64, t: Option<u64>) -> Check {
    let ok = match t {
        Some(1 | 2) => (n * k) % 4 == 3,
        Some(t) if t == k => n % 4 == 3,
        _ => false,
    };
    check("t in {1,2} with nk = 3 (mod 4), or t = k with n = 3 (mod 4)", ok)
}

enum Value {
    Exact(BigRational),
    /// `2^{num/2} / den` with `num` odd.
    HalfPower { num: u64, den: BigUint },
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn evaluate_bound(q: &BoundQuery) -> Result<BoundResult> {
    let (n, k) = (q.n, q.k);
    if n < 3 || k < 3 {
        return Err(Error::Parameters("n and k must be at least 3".into()));
    }
    let h14 = binary_entropy(0.25)?;
    let mut hyps = Vec::new();
    let mut cdy_t = None;
    let mut v = q.subgroup_t.map(|t| 2 * n * k + t);
    let mut d2 = BigUint::one();
    if q.theorem.cdy_family() {
        if k % 4 != 3 {
            return Err(Error::Domain(format!("k = {k} is not of the form 4t + 3")));
        }
        let t = (k - 3) / 4;
        if t < 2 {
            return Err(Error::Domain(format!("derangement count of t - 2 = {} is undefined (k = {k})", t as i64 - 2)));
        }
        cdy_t = Some(t);
        v = Some(2 * n * k + 1);
        d2 = derangements(t - 2).pow(2);
        hyps.push(check("n = 1 (mod 4)", n % 4 == 1));
        if let Some(st) = q.subgroup_t {
            hyps.push(check("subgroup order 1 (complete graph)", st == 1));
        }
    }
    let ct = cdy_t.unwrap_or(0);
    let nk2 = BigUint::from(2 * n * k).pow(2);
    let mod3 = check("n = 0 (mod 3) implies k = 7 (mod 12)", n % 3 != 0 || k % 12 == 7);
    let h = H4 { h14, n: n as f64, k: k as f64, t: ct };
    let (value, asym) = match q.theorem {
        TheoremId::Cdy | TheoremId::GeneralBound => {
            hyps.push(check("n prime or 3n >= 7k + 1", is_prime(n as usize) || 3 * n > 7 * k));
            hyps.push(mod3);
            let base = BigUint::from(n - 2) * &d2;
            if q.theorem == TheoremId::Cdy {
                (Value::Exact(ratio(base, BigUint::one())), Some(h.cdy()))
            } else {
                (Value::Exact(ratio(base, BigUint::from(2u8) * &nk2)), Some(h.general()))
            }
        }
        TheoremId::Cdy2 | TheoremId::Cdy3 => {
            hyps.push(check("n prime", is_prime(n as usize)));
            hyps.push(check("n > 8k", n > 8 * k));
            let b = binom(ceil_div(n, 2 * k), ceil_div(n, 8 * k));
            let base = BigUint::from(n - 2) * &d2 * b;
            if q.theorem == TheoremId::Cdy2 {
                (Value::Exact(ratio(BigUint::from(2u8) * base, BigUint::one())), Some(h.cdy2()))
            } else {
                (Value::Exact(ratio(base, nk2.clone())), Some(h.cdy3()))
            }
        }
        TheoremId::Cdy4 | TheoremId::Cdy5 => {
            hyps.push(check("3n >= 7k + 1", 3 * n > 7 * k));
            hyps.push(mod3);
            let base = BigUint::from(n - 2) * binom(n, 2) * &d2;
            if q.theorem == TheoremId::Cdy4 {
                (Value::Exact(ratio(BigUint::from(2u8) * base, BigUint::one())), Some(h.cdy4()))
            } else {
                (Value::Exact(ratio(base, nk2.clone())), Some(h.cdy5()))
            }
        }
        TheoremId::DiagBi => {
            hyps.push(check("k = 3", k == 3));
            hyps.push(check("n >= 3", n >= 3));
            let ok = match q.subgroup_t {
                Some(1 | 2) => n % 4 == 1,
                Some(3) => n % 4 == 3,
                Some(t) => (t == n || t == 2 * n) && n % 2 == 1,
                None => false,
            };
            hyps.push(check("t in {1,2} with n = 1 (mod 4), t = 3 with n = 3 (mod 4), or t in {n, 2n} with n odd", ok));
            let den = BigUint::from(9 * n * n);
            if n % 2 == 0 {
                (Value::Exact(ratio(BigUint::one() << (n / 2), den)), None)
            } else {
                (Value::HalfPower { num: n, den }, None)
            }
        }
        TheoremId::DiagBi2 => {
            hyps.push(check("k in {5, 7, 9}", matches!(k, 5 | 7 | 9)));
            hyps.push(check("n >= 120", n >= 120));
            hyps.push(t_clause_k(n, k, q.subgroup_t));
            let b = binom(n / (k - 1), n / (4 * k - 4));
            (Value::Exact(ratio(b, BigUint::from(n * k).pow(2))), Some(h.diagbi(true)))
        }
        TheoremId::DiagBi3 => {
            hyps.push(check("k > 9 odd", k > 9 && k % 2 == 1));
            hyps.push(check("n >= 4k - 3", n + 3 >= 4 * k));
            hyps.push(t_clause_k(n, k, q.subgroup_t));
            hyps.push(check("gcd(n, k-1) = 1", n.gcd(&(k - 1)) == 1));
            let b = binom(ceil_div(n, k - 1), ceil_div(n, 4 * k - 4));
            (Value::Exact(ratio(b, BigUint::from(n * k).pow(2))), Some(h.diagbi(false)))
        }
        TheoremId::Prop3diag => {
            hyps.push(check("k = 3", k == 3));
            hyps.push(check("n odd, n >= 3", n % 2 == 1 && n >= 3));
            if n % 2 == 0 {
                (Value::Exact(ratio(BigUint::one() << (n / 2 + 2), BigUint::one())), None)
            } else {
                (Value::HalfPower { num: n + 4, den: BigUint::one() }, None)
            }
        }
        TheoremId::PropPower2 => {
            hyps.push(check("k odd, k >= 3", k % 2 == 1 && k >= 3));
            hyps.push(check("n odd", n % 2 == 1));
            hyps.push(check("n >= 4k - 3", n + 3 >= 4 * k));
            hyps.push(check("gcd(n, k-1) = 1", k >= 2 && n.gcd(&(k - 1)) == 1));
            let km1 = k.saturating_sub(1).max(1);
            let b = binom(ceil_div(n, km1), ceil_div(n, 4 * km1));
            (Value::Exact(ratio(BigUint::from(4u8) * b, BigUint::one())), Some(h.power2()))
        }
        TheoremId::PropK7 => {
            hyps.push(check("k = 7", k == 7));
            hyps.push(check("n odd, n > 120", n % 2 == 1 && n > 120));
            let b = binom(n / 6, n / 24);
            (Value::Exact(ratio(BigUint::from(4u8) * b, BigUint::one())), Some(h.k7()))
        }
        TheoremId::PropPrime => {
            hyps.push(check("k odd", k % 2 == 1));
            hyps.push(check("n prime", is_prime(n as usize)));
            hyps.push(check("n > 8k", n > 8 * k));
            let b = binom(ceil_div(n, 2 * k), ceil_div(n, 8 * k));
            (Value::Exact(ratio(BigUint::from(2u8) * b, BigUint::one())), Some(h.prime()))
        }
        TheoremId::PropPairs => {
            hyps.push(check("k odd", k % 2 == 1));
            hyps.push(check("gcd(n, 2) = 1", n % 2 == 1));
            if let Some(s1) = q.s1 {
                hyps.push(check("gcd(n, s1) = 1", n.gcd(&s1) == 1));
                hyps.push(check("gcd(n, k+s1-1) = 1", n.gcd(&(k + s1 - 1)) == 1));
            }
            (Value::Exact(ratio(BigUint::from(2u8) * binom(n, 2), BigUint::one())), None)
        }
    };
    let hypotheses_hold = hyps.iter().all(|c| c.ok);
    if !hypotheses_hold && !q.force {
        let failed: Vec<&str> = hyps.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        return Err(Error::Hypothesis(format!("{}: {}", q.theorem.name(), failed.join("; "))));
    }
    let mut approx = None;
    let (exact, floor, log2) = match &value {
        Value::Exact(r) => {
            let (num, den) = (r.numer().magnitude(), r.denom().magnitude());
            let text = if r.is_integer() { num.to_string() } else { format!("{num}/{den}") };
            let log2 = if num.is_zero() { f64::NEG_INFINITY } else { log2_big(num) - log2_big(den) };
            approx = r.to_f64().filter(|x| x.is_finite());
            (Some(text), (num / den).to_string(), log2)
        }
        Value::HalfPower { num, den } => {
            // floor(sqrt(2^num) / den) = floor(isqrt(2^num) / den).
            let root = (BigUint::one() << *num).sqrt();
            ((None), (root / den).to_string(), *num as f64 / 2.0 - log2_big(den))
        }
    };
    Ok(BoundResult {
        theorem: q.theorem,
        n,
        k,
        subgroup_t: q.subgroup_t,
        cdy_t,
        v,
        hypotheses: hyps,
        hypotheses_hold,
        exact,
        floor,
        approx: approx.unwrap_or(log2.exp2()),
        log2,
        asymptotic_log2: asym,
    })
}

/// `log2` of the asymptotic right-hand sides.
struct H4 {
    h14: f64,
    n: f64,
    k: f64,
    t: u64,
}

impl H4 {
    fn fact(&self) -> f64 {
        log2_factorial(self.t - 2)
    }

    fn cdy(&self) -> f64 {
        (self.n - 2.0).log2() + 2.0 * (self.fact() - E.log2())
    }

    fn general(&self) -> f64 {
        let t = self.t as f64;
        PI.log2() + (2.0 * t - 5.0) * (t - 2.0).log2() - 6.0 - (2.0 * t - 2.0) * E.log2() - self.n.log2()
    }

    fn tail(&self) -> f64 {
        self.n / (2.0 * self.k) * self.h14
    }

    fn cdy2(&self) -> f64 {
        2.0 * self.fact() + 0.5 * (self.k * self.n).log2() - 2.0 * E.log2() - 0.5 * (3.0 * PI).log2() + self.tail() + 3.0
    }

    fn cdy3(&self) -> f64 {
        2.0 * self.fact() - 2.0 * E.log2() - 0.5 * (3.0 * PI * (self.n * self.k).powi(3)).log2() + self.tail()
    }

    fn cdy4(&self) -> f64 {
        3.0 * self.n.log2() + 2.0 * self.fact() - 2.0 * E.log2()
    }

    fn cdy5(&self) -> f64 {
        self.n.log2() + 2.0 * self.fact() - 3.0 - 2.0 * (self.k * E).log2()
    }

    fn diagbi(&self, floored: bool) -> f64 {
        let q = self.n / (self.k - 1.0);
        let q = if floored { q.floor() } else { q };
        0.5 * (2.0 * (self.k - 1.0) / (3.0 * self.n * PI)).log2() + q * self.h14 + 1.0 - 2.0 * (self.n * self.k).log2()
    }

    fn power2(&self) -> f64 {
        0.5 * (2.0 * (self.k - 1.0) / (3.0 * self.n * PI)).log2() + self.n / (self.k - 1.0) * self.h14 + 3.0
    }

    fn k7(&self) -> f64 {
        -0.5 * (self.n * PI).log2() + (self.n / 6.0).floor() * self.h14 + 4.0
    }

    fn prime(&self) -> f64 {
        0.5 * (self.k / (3.0 * PI * self.n)).log2() + self.tail() + 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let closed = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(0.25).unwrap() - closed).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn derangements_match_brute_force() {
        for m in 0..=7u64 {
            let brute = (0..m).permutations(m as usize).filter(|p| p.iter().enumerate().all(|(i, &x)| i as u64 != x)).count();
            assert_eq!(derangements(m), BigUint::from(brute), "m = {m}");
        }
        assert_eq!(derangements(4), BigUint::from(9u8));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(11, 2), BigUint::from(55u8));
        assert_eq!(binom(3, 5), BigUint::zero());
        assert_eq!(binom(40, 20).to_string(), "137846528820");
    }

    #[test]
    fn cdy_small_instance() {
        let r = evaluate_bound(&BoundQuery::new(TheoremId::Cdy, 13, 11)).unwrap();
        assert_eq!(r.exact.as_deref(), Some("11"));
        assert_eq!(r.cdy_t, Some(2));
        assert_eq!(r.v, Some(2 * 13 * 11 + 1));
        assert!(matches!(evaluate_bound(&BoundQuery::new(TheoremId::Cdy, 13, 7)), Err(Error::Domain(_))));
        assert!(matches!(evaluate_bound(&BoundQuery::new(TheoremId::Cdy, 13, 9)), Err(Error::Domain(_))));
    }

    #[test]
    fn hypothesis_gate_and_force() {
        let q = BoundQuery::new(TheoremId::Cdy, 15, 11);
        assert!(matches!(evaluate_bound(&q), Err(Error::Hypothesis(_))));
        let r = evaluate_bound(&q.force(true)).unwrap();
        assert!(!r.hypotheses_hold);
        assert_eq!(r.exact.as_deref(), Some("13"));
    }

    #[test]
    fn three_diag_floor() {
        let r = evaluate_bound(&BoundQuery::new(TheoremId::Prop3diag, 7, 3)).unwrap();
        assert_eq!(r.floor, "45");
        assert!(r.exact.is_none());
        assert!((r.approx - 2f64.powf(5.5)).abs() < 1e-9);
    }

    #[test]
    fn proposition_terms() {
        let ex = |id, n, k| evaluate_bound(&BoundQuery::new(id, n, k)).unwrap().exact.unwrap();
        assert_eq!(ex(TheoremId::PropPairs, 11, 5), "110");
        assert_eq!(ex(TheoremId::PropPower2, 21, 5), "60");
        assert_eq!(ex(TheoremId::PropPrime, 41, 5), "20");
        assert_eq!(ex(TheoremId::PropK7, 123, 7), "62016");
    }

    #[test]
    fn monotone_in_n() {
        let ex = |n| evaluate_bound(&BoundQuery::new(TheoremId::PropPairs, n, 5)).unwrap().log2;
        assert!((3..40).step_by(2).map(ex).tuple_windows().all(|(a, b)| a <= b));
    }

    #[test]
    fn parse_ids() {
        for id in TheoremId::ALL {
            assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
        }
        assert!("nope".parse::<TheoremId>().is_err());
    }
}

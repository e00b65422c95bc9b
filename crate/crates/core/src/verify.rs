//! The cross-check suite: every closed form set against an exhaustive count,
//! every structural claim against an enumeration, reported as exact
//! expected/actual pairs.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::closed_form::{
    case_census_closed, g2_prime, g_n, g_p0, g_p0_c11_by_cases, g_p0_class, g_pk0_class, gl3_order,
    gl3_order_n, qr_branch, BranchTag,
};
use crate::error::{Error, Result};
use crate::matrices::{det_raw, perm_raw, sub_permanent_identity, ClassLabel, Mat3};
use crate::modring::{is_prime, Modulus};
use crate::oracle::{
    case_census_oracle, census, census_2x2, census_naive, census_tiered, class_census, ClassCensus,
    CountTable, OracleConfig,
};
use crate::structure_maps::{emptiness_scan, fiber_count, shift_bijections, witness};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Random matrices drawn per modulus for the sub-permanent identity.
pub const IDENTITY_SAMPLES: usize = 100_000;

/// Matrices of `G(3, 0)` whose lifts to `Z/9` are counted.
pub const FIBER_SAMPLES: usize = 20;

/// Published table: `n, g(n,0)` and the five class counts in label order.
pub const PUBLISHED_TABLE: [[u64; 7]; 6] = [
    [3, 3312, 2208, 576, 96, 384, 48],
    [5, 288000, 225280, 38400, 5120, 17920, 1280],
    [7, 4653936, 3900960, 508032, 54432, 181440, 9072],
    [9, 21730032, 14486688, 3779136, 629856, 2519424, 314928],
    [11, 192390000, 173140000, 14520000, 1100000, 3520000, 110000],
    [
        13, 739964160, 677154816, 49061376, 3234816, 10243584, 269568,
    ],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    Quick,
    Full,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(format!("unknown profile `{s}` (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Add one to a single closed-form value before comparing, so the suite
    /// has something to catch.
    pub inject_fault: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamValue {
    Int(u64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as u64)
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Text(s.to_string())
    }
}

impl From<ClassLabel> for ParamValue {
    fn from(label: ClassLabel) -> Self {
        ParamValue::Text(label.as_str().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

pub type Params = Vec<(&'static str, ParamValue)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check_id: &'static str,
    pub params: Params,
    pub expected: BigUint,
    pub actual: BigUint,
    pub status: Status,
}

impl CheckResult {
    pub fn new(check_id: &'static str, params: Params, expected: BigUint, actual: BigUint) -> Self {
        let status = if expected == actual {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckResult {
            check_id,
            params,
            expected,
            actual,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn param(&self, key: &str) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    /// `n=9 x=3`
    pub fn params_text(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct ParamMap<'a>(&'a Params);

impl Serialize for ParamMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            match v {
                ParamValue::Int(i) => map.serialize_entry(k, i)?,
                ParamValue::Text(t) => map.serialize_entry(k, t)?,
            }
        }
        map.end()
    }
}

fn exact(v: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("decimal digits form a JSON number")
}

impl Serialize for CheckResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CheckResult", 5)?;
        st.serialize_field("check_id", self.check_id)?;
        st.serialize_field("params", &ParamMap(&self.params))?;
        st.serialize_field("expected", &exact(&self.expected))?;
        st.serialize_field("actual", &exact(&self.actual))?;
        st.serialize_field("status", self.status.as_str())?;
        st.end()
    }
}

pub struct CheckInfo {
    pub id: &'static str,
    pub claim: &'static str,
}

/// Every check the suite can emit. Each one appears in the quick profile.
pub const REGISTRY: &[CheckInfo] = &[
    CheckInfo {
        id: "c11_case_split",
        claim: "the C11 count assembled case by case equals its closed form",
    },
    CheckInfo {
        id: "case_census",
        claim: "zero-pattern counts of G(p,0) match the case formulas and sum to g(p,0)",
    },
    CheckInfo {
        id: "class_counts",
        claim: "class counts g(p^k,0,i,j) from the closed forms match the class census",
    },
    CheckInfo {
        id: "class_lifting",
        claim: "g(p^k,0,i,j) = p^{8(k-1)} g(p,0,i,j) by enumeration",
    },
    CheckInfo {
        id: "class_partition",
        claim: "the five classes partition every G(n,x); their sum reproduces the census",
    },
    CheckInfo {
        id: "class_sum",
        claim: "the five closed-form class counts sum to g(p,0)",
    },
    CheckInfo {
        id: "closed_vs_oracle",
        claim: "g(n,x) from the closed forms equals the exhaustive census",
    },
    CheckInfo {
        id: "emptiness",
        claim: "every invertible matrix has a unit among P11, P12, P13, P21, P22 mod p",
    },
    CheckInfo {
        id: "fiber_size",
        claim: "every lift of a matrix in G(p,0) to Z/p^k is invertible with p | perm",
    },
    CheckInfo {
        id: "g2_prime",
        claim: "2x2 counts g2(p,x) match the 2x2 census",
    },
    CheckInfo {
        id: "gl3_order",
        claim: "census totals equal |GL3(Z/n)|",
    },
    CheckInfo {
        id: "gp0_branch",
        claim: "p - 3 is a quadratic residue mod p exactly when p = 1 mod 3",
    },
    CheckInfo {
        id: "multiplicative",
        claim: "g(ab,x) = g(a,x) g(b,x) for coprime a, b, by enumeration",
    },
    CheckInfo {
        id: "naive_vs_tiered",
        claim: "the prefix enumerator agrees with brute force",
    },
    CheckInfo {
        id: "published_table",
        claim: "the published g(n,0) and class table, from closed forms and from enumeration",
    },
    CheckInfo {
        id: "partition_identity",
        claim: "|GL3(Z/p^k)| = p^{k-1} g(p^k,0) + phi(p^k) g(p^k,1)",
    },
    CheckInfo {
        id: "prime_power_lifting",
        claim: "g(p^k,x) = p^{8(k-1)} g(p,x) by enumeration",
    },
    CheckInfo {
        id: "shift_bijection",
        claim: "the single-entry shift carries G(p^k,0,i,j) bijectively onto G(p^k,x,i,j)",
    },
    CheckInfo {
        id: "subperm_identity",
        claim: "the sub-permanent/determinant identity on seeded random matrices",
    },
    CheckInfo {
        id: "two_value",
        claim: "g(p^k,x) takes two values, split by whether p | x",
    },
    CheckInfo {
        id: "witness",
        claim:
            "the five class representatives are invertible, have permanent x and sit in their class",
    },
];

pub fn claim(check_id: &str) -> Option<&'static str> {
    REGISTRY.iter().find(|c| c.id == check_id).map(|c| c.claim)
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(big(base), exp as usize)
}

fn prime_powers(bound: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    for p in (2..=bound).filter(|&p| is_prime(p)) {
        let mut q = p;
        let mut k = 1;
        while q <= bound {
            out.push((p, k, q));
            q *= p;
            k += 1;
        }
    }
    out.sort_by_key(|&(_, _, q)| q);
    out
}

/// Census and class-census results shared between checks.
struct Cache<'a> {
    config: &'a OracleConfig,
    census: BTreeMap<u64, CountTable>,
    classes: BTreeMap<(u64, u32), ClassCensus>,
}

impl<'a> Cache<'a> {
    fn census(&mut self, n: u64) -> Result<&CountTable> {
        if !self.census.contains_key(&n) {
            let table = census(&Modulus::new(n)?, self.config)?;
            self.census.insert(n, table);
        }
        Ok(&self.census[&n])
    }

    fn classes(&mut self, p: u64, k: u32) -> Result<&ClassCensus> {
        if !self.classes.contains_key(&(p, k)) {
            let c = class_census(p, k, self.config)?;
            self.classes.insert((p, k), c);
        }
        Ok(&self.classes[&(p, k)])
    }
}

struct Scope {
    census_moduli: Vec<u64>,
    naive_vs_tiered: Vec<u64>,
    odd_primes: Vec<u64>,
    class_moduli: Vec<(u64, u32)>,
    composites: Vec<(u64, u64, u64)>,
    g2_primes: Vec<u64>,
}

impl Scope {
    fn new(profile: Profile) -> Self {
        let mut s = Scope {
            census_moduli: (2..=9).collect(),
            naive_vs_tiered: (2..=8).collect(),
            odd_primes: vec![3, 5, 7],
            class_moduli: vec![(3, 1), (5, 1), (7, 1), (3, 2)],
            composites: vec![(6, 2, 3)],
            g2_primes: vec![2, 3, 5, 7, 11, 13],
        };
        if profile == Profile::Full {
            s.census_moduli.extend(10..=13);
            s.odd_primes.extend([11, 13]);
            s.class_moduli.extend([(11, 1), (13, 1)]);
            s.composites.extend([(10, 2, 5), (12, 4, 3)]);
            s.g2_primes = (2..=47).filter(|&p| is_prime(p)).collect();
        }
        s
    }
}

/// Run every check in `profile`. Results are in canonical order: by check
/// id, then by parameters.
pub fn run_suite(
    profile: Profile,
    config: &OracleConfig,
    options: &SuiteOptions,
) -> Result<Vec<CheckResult>> {
    let scope = Scope::new(profile);
    let mut cache = Cache {
        config,
        census: BTreeMap::new(),
        classes: BTreeMap::new(),
    };
    let mut out = Vec::new();

    census_checks(&scope, &mut cache, options, &mut out)?;
    class_checks(&scope, &mut cache, &mut out)?;
    formula_checks(&scope, &mut out)?;
    structure_checks(config, options, &mut out)?;

    out.sort_by(|a, b| (a.check_id, &a.params).cmp(&(b.check_id, &b.params)));
    Ok(out)
}

fn census_checks(
    scope: &Scope,
    cache: &mut Cache,
    options: &SuiteOptions,
    out: &mut Vec<CheckResult>,
) -> Result<()> {
    for &n in &scope.census_moduli {
        let m = Modulus::new(n)?;
        let table = cache.census(n)?.clone();
        out.push(CheckResult::new(
            "gl3_order",
            vec![("n", n.into())],
            gl3_order_n(&m),
            table.total(),
        ));
        for x in 0..n {
            let mut expected = g_n(&m, x as i64)?;
            if options.inject_fault && n == 3 && x == 0 {
                expected += 1u32;
            }
            let params = vec![("n", n.into()), ("x", x.into())];
            out.push(CheckResult::new(
                "closed_vs_oracle",
                params,
                expected,
                table.counts[x as usize].clone(),
            ));
        }

        if let Some((p, k)) = m.prime_power() {
            let distinct = table.distinct_values().len() as u64;
            out.push(CheckResult::new(
                "two_value",
                vec![("n", n.into()), ("measure", "distinct".into())],
                big(2),
                big(distinct),
            ));
            for x in 1..n {
                let representative = if x % p == 0 { 0 } else { 1 };
                out.push(CheckResult::new(
                    "two_value",
                    vec![("n", n.into()), ("x", x.into())],
                    table.counts[representative].clone(),
                    table.counts[x as usize].clone(),
                ));
            }
            if k > 1 {
                let base = cache.census(p)?.clone();
                let scale = pow(p, 8 * (k as u64 - 1));
                for x in [0u64, 1] {
                    out.push(CheckResult::new(
                        "prime_power_lifting",
                        vec![("p", p.into()), ("k", k.into()), ("x", x.into())],
                        &scale * &base.counts[x as usize],
                        table.counts[x as usize].clone(),
                    ));
                }
            }
        }
    }

    for &n in &scope.naive_vs_tiered {
        let m = Modulus::new(n)?;
        let naive = census_naive(&m, cache.config)?;
        let tiered = census_tiered(&m, cache.config)?;
        for x in 0..n as usize {
            out.push(CheckResult::new(
                "naive_vs_tiered",
                vec![("n", n.into()), ("x", (x as u64).into())],
                naive.counts[x].clone(),
                tiered.counts[x].clone(),
            ));
        }
    }

    for &(n, a, b) in &scope.composites {
        let ta = cache.census(a)?.clone();
        let tb = cache.census(b)?.clone();
        let tn = cache.census(n)?.clone();
        for x in 0..n {
            let product = ta.get(x as i64) * tb.get(x as i64);
            out.push(CheckResult::new(
                "multiplicative",
                vec![
                    ("n", n.into()),
                    ("a", a.into()),
                    ("b", b.into()),
                    ("x", x.into()),
                ],
                product,
                tn.counts[x as usize].clone(),
            ));
        }
    }

    for row in PUBLISHED_TABLE {
        let n = row[0];
        let m = Modulus::new(n)?;
        let (p, k) = m.prime_power().expect("published moduli are prime powers");
        let mut closed = vec![g_n(&m, 0)?];
        for label in ClassLabel::CLASSES {
            closed.push(g_pk0_class(p, k, label)?);
        }
        let columns = ["g(n,0)", "C11", "C12", "C13", "C21", "C22"];
        for (i, column) in columns.into_iter().enumerate() {
            out.push(CheckResult::new(
                "published_table",
                vec![
                    ("n", n.into()),
                    ("column", column.into()),
                    ("source", "closed".into()),
                ],
                big(row[i + 1]),
                closed[i].clone(),
            ));
        }
        if scope.census_moduli.contains(&n) {
            let classes = cache.classes(p, k)?.clone();
            let mut oracle = vec![cache.census(n)?.counts[0].clone()];
            oracle.extend(ClassLabel::CLASSES.map(|label| classes.get(0, label)));
            for (i, column) in columns.into_iter().enumerate() {
                out.push(CheckResult::new(
                    "published_table",
                    vec![
                        ("n", n.into()),
                        ("column", column.into()),
                        ("source", "oracle".into()),
                    ],
                    big(row[i + 1]),
                    oracle[i].clone(),
                ));
            }
        }
    }
    Ok(())
}

fn class_checks(scope: &Scope, cache: &mut Cache, out: &mut Vec<CheckResult>) -> Result<()> {
    for &(p, k) in &scope.class_moduli {
        let n = p.pow(k);
        let classes = cache.classes(p, k)?.clone();
        for label in ClassLabel::CLASSES {
            out.push(CheckResult::new(
                "class_counts",
                vec![("p", p.into()), ("k", k.into()), ("label", label.into())],
                g_pk0_class(p, k, label)?,
                classes.get(0, label),
            ));
        }
        let table = cache.census(n)?.clone();
        let marginals = classes.marginals();
        for x in 0..n as usize {
            out.push(CheckResult::new(
                "class_partition",
                vec![("n", n.into()), ("x", (x as u64).into())],
                table.counts[x].clone(),
                marginals.counts[x].clone(),
            ));
        }
        if k > 1 {
            let base = cache.classes(p, 1)?.clone();
            let scale = pow(p, 8 * (k as u64 - 1));
            for label in ClassLabel::CLASSES {
                out.push(CheckResult::new(
                    "class_lifting",
                    vec![("p", p.into()), ("k", k.into()), ("label", label.into())],
                    &scale * base.get(0, label),
                    classes.get(0, label),
                ));
            }
        }
    }

    for &p in &scope.odd_primes {
        let oracle = case_census_oracle(p, cache.config)?;
        for row in case_census_closed(p)? {
            out.push(CheckResult::new(
                "case_census",
                vec![("p", p.into()), ("row", row.row.id().into())],
                row.count,
                oracle.get(row.row).clone(),
            ));
        }
        out.push(CheckResult::new(
            "case_census",
            vec![("p", p.into()), ("row", "total".into())],
            g_p0(p)?,
            oracle.total(),
        ));
    }
    Ok(())
}

/// Checks among closed forms alone, over ranges no enumerator reaches.
fn formula_checks(scope: &Scope, out: &mut Vec<CheckResult>) -> Result<()> {
    let flag = |b: bool| if b { BigUint::one() } else { BigUint::zero() };
    for p in (3..1000u64).filter(|&p| is_prime(p)) {
        out.push(CheckResult::new(
            "gp0_branch",
            vec![("p", p.into())],
            flag(p % 3 == 1),
            flag(qr_branch(p)? == BranchTag::QRBranch),
        ));
    }
    for p in (3..200u64).filter(|&p| is_prime(p)) {
        let total = g_p0(p)?;
        let classes: BigUint = ClassLabel::CLASSES
            .iter()
            .map(|&l| g_p0_class(p, l))
            .sum::<Result<BigUint>>()?;
        out.push(CheckResult::new(
            "class_sum",
            vec![("p", p.into())],
            total.clone(),
            classes,
        ));
        out.push(CheckResult::new(
            "c11_case_split",
            vec![("p", p.into())],
            g_p0_class(p, ClassLabel::C11)?,
            g_p0_c11_by_cases(p)?,
        ));
        let rows: BigUint = case_census_closed(p)?.into_iter().map(|r| r.count).sum();
        out.push(CheckResult::new(
            "case_census",
            vec![("p", p.into()), ("row", "closed-sum".into())],
            total,
            rows,
        ));
    }
    for (p, k, q) in prime_powers(27) {
        let m = Modulus::new(q)?;
        let rhs = big(q / p) * g_n(&m, 0)? + big(m.totient()) * g_n(&m, 1)?;
        out.push(CheckResult::new(
            "partition_identity",
            vec![("p", p.into()), ("k", k.into())],
            gl3_order(p, k)?,
            rhs,
        ));
    }
    for &p in &scope.g2_primes {
        let table = census_2x2(&Modulus::new(p)?)?;
        for x in 0..p {
            out.push(CheckResult::new(
                "g2_prime",
                vec![("p", p.into()), ("x", x.into())],
                g2_prime(p, x as i64)?,
                table.counts[x as usize].clone(),
            ));
        }
    }
    Ok(())
}

fn structure_checks(
    config: &OracleConfig,
    options: &SuiteOptions,
    out: &mut Vec<CheckResult>,
) -> Result<()> {
    for (p, k, _) in prime_powers(9) {
        let report = emptiness_scan(p, k, config)?;
        let params = |measure: &'static str| {
            vec![
                ("p", p.into()),
                ("k", k.into()),
                ("measure", measure.into()),
            ]
        };
        out.push(CheckResult::new(
            "emptiness",
            params("violations"),
            BigUint::zero(),
            big(report.violations),
        ));
        out.push(CheckResult::new(
            "emptiness",
            params("invertible"),
            gl3_order(p, k)?,
            big(report.invertible),
        ));
    }

    for n in [4u64, 9, 12, 49] {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut holds = 0u64;
        for _ in 0..IDENTITY_SAMPLES {
            let rows = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..n)));
            let (lhs, rhs) = sub_permanent_identity(&Mat3::from_rows(rows, n));
            if lhs == rhs {
                holds += 1;
            }
        }
        out.push(CheckResult::new(
            "subperm_identity",
            vec![("n", n.into()), ("seed", options.seed.into())],
            big(IDENTITY_SAMPLES as u64),
            big(holds),
        ));
    }

    for (p, k) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
        for report in shift_bijections(p, k, config)? {
            for (i, label) in ClassLabel::CLASSES.into_iter().enumerate() {
                let measures = [
                    ("landed", report.landed[i]),
                    ("round_trip", report.round_trips[i]),
                    ("target", report.target[i]),
                ];
                for (measure, value) in measures {
                    out.push(CheckResult::new(
                        "shift_bijection",
                        vec![
                            ("p", p.into()),
                            ("k", k.into()),
                            ("x", report.x.into()),
                            ("label", label.into()),
                            ("measure", measure.into()),
                        ],
                        big(report.source[i]),
                        big(value),
                    ));
                }
            }
        }
    }

    let p = 3u64;
    let mut zero_perm = Vec::new();
    for code in 0..p.pow(9) {
        let mut c = code;
        let rows = std::array::from_fn(|_| {
            std::array::from_fn(|_| {
                let v = c % p;
                c /= p;
                v
            })
        });
        if perm_raw(&rows, p) == 0 && det_raw(&rows, p) != 0 {
            zero_perm.push(rows);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for rows in zero_perm.choose_multiple(&mut rng, FIBER_SAMPLES) {
        let a = Mat3::from_rows(*rows, p);
        out.push(CheckResult::new(
            "fiber_size",
            vec![
                ("p", p.into()),
                ("k", 2u32.into()),
                ("a", ParamValue::Text(a.to_string())),
            ],
            pow(p, 9),
            big(fiber_count(&a, 2, config)?),
        ));
    }

    for p in [3u64, 5, 7, 11, 13] {
        for k in 1..=2u32 {
            let n = p.pow(k);
            for label in ClassLabel::CLASSES {
                let mut valid = 0u64;
                let mut tried = 0u64;
                for x in (0..n).step_by(p as usize) {
                    tried += 1;
                    let w = witness(label, p, k, x as i64)?;
                    if w.is_invertible() && w.permanent().value() == x && w.classify(p) == label {
                        valid += 1;
                    }
                }
                out.push(CheckResult::new(
                    "witness",
                    vec![("p", p.into()), ("k", k.into()), ("label", label.into())],
                    big(tried),
                    big(valid),
                ));
            }
        }
    }
    Ok(())
}

/// One result against each residue.
pub fn diff_tables(expected: &CountTable, actual: &CountTable) -> Result<Vec<CheckResult>> {
    if expected.modulus != actual.modulus {
        return Err(Error::ModulusMismatch {
            expected: expected.modulus,
            actual: actual.modulus,
        });
    }
    let n = expected.modulus;
    Ok(expected
        .counts
        .iter()
        .zip(&actual.counts)
        .enumerate()
        .map(|(x, (e, a))| {
            CheckResult::new(
                "closed_vs_oracle",
                vec![("n", n.into()), ("x", (x as u64).into())],
                e.clone(),
                a.clone(),
            )
        })
        .collect())
}

pub fn failures(results: &[CheckResult]) -> usize {
    results.iter().filter(|r| !r.passed()).count()
}

/// One JSON object per line.
pub fn render_json_lines(results: &[CheckResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&serde_json::to_string(r).expect("check results serialize"));
        s.push('\n');
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(results: &[CheckResult]) -> String {
    let mut s = String::from("check_id,params,expected,actual,status\n");
    for r in results {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.check_id,
            csv_field(&r.params_text()),
            r.expected,
            r.actual,
            r.status.as_str()
        );
    }
    s
}

/// Aligned columns followed by a per-check summary.
pub fn render_table(results: &[CheckResult]) -> String {
    let rows: Vec<[String; 5]> = results
        .iter()
        .map(|r| {
            [
                r.status.as_str().to_uppercase(),
                r.check_id.to_string(),
                r.params_text(),
                r.expected.to_string(),
                r.actual.to_string(),
            ]
        })
        .collect();
    let header = ["STATUS", "CHECK", "PARAMS", "EXPECTED", "ACTUAL"].map(String::from);
    let mut widths = header.clone().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut s = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let line = row
            .iter()
            .zip(widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        let _ = writeln!(s, "{}", line.trim_end());
    }

    let mut by_check: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in results {
        let e = by_check.entry(r.check_id).or_default();
        e.0 += 1;
        if r.passed() {
            e.1 += 1;
        }
    }
    s.push('\n');
    for (id, (total, passed)) in &by_check {
        let _ = writeln!(s, "{id:<20} {passed}/{total}  {}", claim(id).unwrap_or(""));
    }
    let _ = writeln!(s, "{} checks, {} failed", results.len(), failures(results));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_examples() {
        let a = CountTable::from_u64(3, &[3312, 3960, 3960]);
        assert!(diff_tables(&a, &a).unwrap().iter().all(CheckResult::passed));
        let b = CountTable::from_u64(3, &[3313, 3960, 3960]);
        let d = diff_tables(&a, &b).unwrap();
        assert_eq!(failures(&d), 1);
        assert_eq!(d[0].param("x"), Some(&ParamValue::Int(0)));
        let c = CountTable::from_u64(2, &[0, 168]);
        assert_eq!(
            diff_tables(&a, &c),
            Err(Error::ModulusMismatch {
                expected: 3,
                actual: 2
            })
        );
    }

    #[test]
    fn closed_table_against_census_for_seven() {
        let m = Modulus::new(7).unwrap();
        let closed = CountTable {
            modulus: 7,
            counts: crate::closed_form::g_table(&m).unwrap(),
        };
        let oracle = census(&m, &OracleConfig::default()).unwrap();
        let d = diff_tables(&closed, &oracle).unwrap();
        assert_eq!(d.len(), 7);
        assert_eq!(failures(&d), 0);
    }

    #[test]
    fn json_numbers_are_exact() {
        let big_value = BigUint::from(u64::MAX) * BigUint::from(u64::MAX);
        let r = CheckResult::new(
            "gl3_order",
            vec![("n", 9u64.into()), ("label", "C11".into())],
            big_value.clone(),
            big_value.clone(),
        );
        let line = serde_json::to_string(&r).unwrap();
        assert_eq!(
            line,
            format!(
                r#"{{"check_id":"gl3_order","params":{{"n":9,"label":"C11"}},"expected":{big_value},"actual":{big_value},"status":"pass"}}"#
            )
        );
    }

    #[test]
    fn quick_suite_passes_and_covers_registry() {
        let config = OracleConfig::default();
        let results = run_suite(Profile::Quick, &config, &SuiteOptions::default()).unwrap();
        let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        for info in REGISTRY {
            assert!(
                results.iter().any(|r| r.check_id == info.id),
                "no result for {}",
                info.id
            );
        }
        for r in &results {
            assert!(
                claim(r.check_id).is_some(),
                "{} is not registered",
                r.check_id
            );
        }
        let mut sorted = results.clone();
        sorted.sort_by(|a, b| (a.check_id, &a.params).cmp(&(b.check_id, &b.params)));
        assert_eq!(sorted, results);

        let again = run_suite(
            Profile::Quick,
            &config.clone().with_threads(2),
            &SuiteOptions::default(),
        )
        .unwrap();
        assert_eq!(render_json_lines(&results), render_json_lines(&again));

        let faulty = SuiteOptions {
            inject_fault: true,
            ..SuiteOptions::default()
        };
        let bad = run_suite(Profile::Quick, &config, &faulty).unwrap();
        assert_eq!(failures(&bad), 1);
    }
}

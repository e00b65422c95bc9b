//! Exhaustive, exact counting over `Z/n`.
//!
//! Every engine here enumerates; none of them consults a closed form. Work is
//! sharded by the first row of the matrix, each shard fills a private `u64`
//! tally, and shards are merged by checked addition, so results do not
//! depend on the thread count.
//!
//! `census_tiered` enumerates the `n⁶` choices of the first two rows. Both
//! the permanent and the determinant are then linear forms in the third row,
//! so the remaining `n³` third rows are either swept with incremental sums
//! (any `n`) or counted by solving small linear systems (prime `n`).

mod fp;
mod sharded;

use std::sync::atomic::AtomicU64;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::closed_form::CaseRow;
use crate::error::{Error, Result};
use crate::matrices::{det_raw, first_unit_index, perm_raw, sub_perms_raw, ClassLabel};
use crate::modring::Modulus;

pub(crate) use fp::{Equation, PrimeField};
pub(crate) use sharded::{decode_row, run_sharded};

pub const DEFAULT_NAIVE_MAX: u64 = 8;
pub const DEFAULT_TIERED_MAX: u64 = 16;
pub const DEFAULT_2X2_MAX: u64 = 50;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub naive_max: u64,
    pub tiered_max: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Count third rows of prime moduli by linear algebra instead of a sweep.
    pub prime_fast_path: bool,
    /// Incremented as first-two-row prefixes (or, for the naive engine,
    /// first rows) are finished.
    pub progress: Option<Arc<AtomicU64>>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            naive_max: DEFAULT_NAIVE_MAX,
            tiered_max: DEFAULT_TIERED_MAX,
            threads: None,
            prime_fast_path: true,
            progress: None,
        }
    }
}

impl OracleConfig {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub(crate) fn check_tiered(&self, n: u64) -> Result<()> {
        if n > self.tiered_max {
            return Err(Error::TooLarge {
                n,
                bound: self.tiered_max,
                engine: "tiered",
            });
        }
        Ok(())
    }
}

/// `counts[x]` is the number of invertible matrices with permanent `≡ x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub modulus: u64,
    pub counts: Vec<BigUint>,
}

impl CountTable {
    pub fn from_u64(modulus: u64, counts: &[u64]) -> Self {
        CountTable {
            modulus,
            counts: counts.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    pub fn get(&self, x: i64) -> &BigUint {
        &self.counts[x.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Distinct values taken over all residues, in increasing order.
    pub fn distinct_values(&self) -> Vec<BigUint> {
        let mut v = self.counts.clone();
        v.sort();
        v.dedup();
        v
    }
}

/// Per-residue, per-class counts for a prime power `p^k`; classes are taken
/// relative to `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCensus {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub counts: Vec<[BigUint; 5]>,
}

impl ClassCensus {
    pub fn get(&self, x: i64, label: ClassLabel) -> BigUint {
        match label.index() {
            Some(i) => self.counts[x.rem_euclid(self.modulus as i64) as usize][i].clone(),
            None => BigUint::default(),
        }
    }

    /// Sum over the five classes at each residue.
    pub fn marginals(&self) -> CountTable {
        CountTable {
            modulus: self.modulus,
            counts: self.counts.iter().map(|row| row.iter().sum()).collect(),
        }
    }
}

/// Counts of zero-permanent invertible matrices mod an odd prime, split by the
/// zero pattern of the first two rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseCensus {
    pub p: u64,
    pub counts: [BigUint; 7],
}

impl CaseCensus {
    pub fn get(&self, row: CaseRow) -> &BigUint {
        &self.counts[row.index()]
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Brute force over all `n⁹` matrices.
pub fn census_naive(m: &Modulus, config: &OracleConfig) -> Result<CountTable> {
    let n = m.n();
    if n > config.naive_max {
        return Err(Error::TooLarge {
            n,
            bound: config.naive_max,
            engine: "naive (use the tiered census)",
        });
    }
    let rows = n.pow(3);
    let unit = unit_table(n);
    let tally = run_sharded(config, rows, n as usize, 1, |r1, tally| {
        let first = decode_row(r1, n);
        for r2 in 0..rows {
            let second = decode_row(r2, n);
            for r3 in 0..rows {
                let a = [first, second, decode_row(r3, n)];
                if unit[det_raw(&a, n) as usize] {
                    tally[perm_raw(&a, n) as usize] += 1;
                }
            }
        }
        Ok(())
    })?;
    Ok(CountTable::from_u64(n, &tally))
}

/// Linear forms in the third row `(x, y, z)` determined by the first two
/// rows: `perm = perm·(x,y,z)` and `det = det·(x,y,z)`, coefficients mod `n`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PrefixForms {
    pub perm: [u64; 3],
    pub det: [u64; 3],
}

impl PrefixForms {
    pub(crate) fn new(r1: [u64; 3], r2: [u64; 3], n: u64) -> Self {
        let [a, b, c] = r1;
        let [d, e, f] = r2;
        let sub = |x: u64, y: u64| (x % n + n - y % n) % n;
        PrefixForms {
            perm: [
                (b * f + c * e) % n,
                (a * f + c * d) % n,
                (a * e + b * d) % n,
            ],
            det: [sub(b * f, c * e), sub(c * d, a * f), sub(a * e, b * d)],
        }
    }

    /// Whether some third row makes the determinant a unit mod `n`.
    pub(crate) fn can_be_invertible(&self, n: u64) -> bool {
        self.det[0].gcd(&self.det[1]).gcd(&self.det[2]).gcd(&n) == 1
    }
}

pub(crate) fn unit_table(n: u64) -> Vec<bool> {
    (0..n).map(|v| v.gcd(&n) == 1).collect()
}

#[inline(always)]
fn add_mod(acc: u64, d: u64, n: u64) -> u64 {
    let s = acc + d;
    if s >= n {
        s - n
    } else {
        s
    }
}

/// Visit every third row `[x, y, z]` in lexicographic order together with
/// the permanent and determinant of the completed matrix, both mod `n`.
#[inline]
pub(crate) fn sweep_with<F: FnMut([u64; 3], u64, u64)>(forms: &PrefixForms, n: u64, mut visit: F) {
    let (mut px, mut dx) = (0u64, 0u64);
    for x in 0..n {
        let (mut pxy, mut dxy) = (px, dx);
        for y in 0..n {
            let (mut p, mut d) = (pxy, dxy);
            for z in 0..n {
                visit([x, y, z], p, d);
                p = add_mod(p, forms.perm[2], n);
                d = add_mod(d, forms.det[2], n);
            }
            pxy = add_mod(pxy, forms.perm[1], n);
            dxy = add_mod(dxy, forms.det[1], n);
        }
        px = add_mod(px, forms.perm[0], n);
        dx = add_mod(dx, forms.det[0], n);
    }
}

/// Sweep all third rows, adding to `tally[perm]` whenever det is a unit.
fn sweep_third_rows(forms: &PrefixForms, n: u64, unit: &[bool], tally: &mut [u64]) {
    sweep_with(forms, n, |_, p, d| {
        if unit[d as usize] {
            tally[p as usize] += 1;
        }
    });
}

/// Number of third rows with `perm·v ≡ t` and `det·v ≢ 0` over `F_p`, for
/// `t = 0` and for any fixed `t ≠ 0`. Scaling `v` by a unit permutes the
/// nonzero targets, so one representative suffices.
fn solve_third_rows(forms: &PrefixForms, field: &PrimeField) -> (u64, u64) {
    let [p0, p1, p2] = forms.perm;
    let [d0, d1, d2] = forms.det;
    let count = |t: u64| {
        field.solutions(&[[p0, p1, p2, t]]) - field.solutions(&[[p0, p1, p2, t], [d0, d1, d2, 0]])
    };
    (count(0), count(1))
}

/// Census via first-two-row prefixes; identical output to [`census_naive`].
pub fn census_tiered(m: &Modulus, config: &OracleConfig) -> Result<CountTable> {
    let n = m.n();
    config.check_tiered(n)?;
    let rows = n.pow(3);
    let unit = unit_table(n);
    let field = (config.prime_fast_path && m.is_prime()).then(|| PrimeField::new(n));
    let tally = run_sharded(config, rows, n as usize, rows, |r1, tally| {
        let first = decode_row(r1, n);
        for r2 in 0..rows {
            let forms = PrefixForms::new(first, decode_row(r2, n), n);
            if !forms.can_be_invertible(n) {
                continue;
            }
            match &field {
                Some(field) => {
                    let (zero, nonzero) = solve_third_rows(&forms, field);
                    tally[0] += zero;
                    for slot in &mut tally[1..] {
                        *slot += nonzero;
                    }
                }
                None => sweep_third_rows(&forms, n, &unit, tally),
            }
        }
        Ok(())
    })?;
    Ok(CountTable::from_u64(n, &tally))
}

/// Naive engine up to its bound, tiered above it.
pub fn census(m: &Modulus, config: &OracleConfig) -> Result<CountTable> {
    if m.n() <= config.naive_max {
        census_naive(m, config)
    } else {
        census_tiered(m, config)
    }
}

/// Sub-permanent linear forms in the third row, in `P11, P12, P13, P21, P22`
/// order, with coefficients mod `p`.
fn class_forms(r1: [u64; 3], r2: [u64; 3], p: u64) -> [[u64; 3]; 5] {
    let [a, b, c] = r1.map(|v| v % p);
    let [d, e, f] = r2.map(|v| v % p);
    [[0, f, e], [f, 0, d], [e, d, 0], [0, c, b], [c, 0, a]]
}

/// Per-residue, per-class census for the prime power `p^k`.
pub fn class_census(p: u64, k: u32, config: &OracleConfig) -> Result<ClassCensus> {
    let m = Modulus::new(p.checked_pow(k).ok_or(Error::TooLarge {
        n: u64::MAX,
        bound: config.tiered_max,
        engine: "class census",
    })?)?;
    if m.prime_power() != Some((p, k)) {
        return Err(Error::NotPrime(p));
    }
    let n = m.n();
    config.check_tiered(n)?;
    let rows = n.pow(3);
    let width = n as usize * 5;
    let field = (config.prime_fast_path && k == 1).then(|| PrimeField::new(p));
    let unit = unit_table(n);

    let tally = run_sharded(config, rows, width, rows, |r1, tally| {
        let first = decode_row(r1, n);
        for r2 in 0..rows {
            let second = decode_row(r2, n);
            let forms = PrefixForms::new(first, second, n);
            if !forms.can_be_invertible(n) {
                continue;
            }
            match &field {
                Some(field) => {
                    let sub = class_forms(first, second, p);
                    for label in 0..5 {
                        let (zero, nonzero) = solve_class(&forms, &sub, label, field);
                        tally[label] += zero;
                        for x in 1..n as usize {
                            tally[x * 5 + label] += nonzero;
                        }
                    }
                }
                None => sweep_with(&forms, n, |third, perm, det| {
                    if unit[det as usize] {
                        let a = [first, second, third];
                        let label = first_unit_index(&sub_perms_raw(&a), p).unwrap_or_else(|| {
                            panic!("invertible matrix without a unit sub-permanent: {a:?} mod {n}")
                        });
                        tally[perm as usize * 5 + label] += 1;
                    }
                }),
            }
        }
        Ok(())
    })?;

    let counts = tally
        .chunks(5)
        .map(|c| std::array::from_fn(|i| BigUint::from(c[i])))
        .collect();
    Ok(ClassCensus {
        p,
        k,
        modulus: n,
        counts,
    })
}

/// Third rows over `F_p` in class `label` (earlier sub-permanents zero, this
/// one nonzero) with `perm ≡ t` and `det ≢ 0`, for `t = 0` and a fixed `t ≠ 0`.
/// Inclusion–exclusion over the two "nonzero" conditions.
fn solve_class(
    forms: &PrefixForms,
    sub: &[[u64; 3]; 5],
    label: usize,
    field: &PrimeField,
) -> (u64, u64) {
    let count = |t: u64| {
        let mut eqs: [Equation; 8] = [[0; 4]; 8];
        for (eq, form) in eqs.iter_mut().zip(&sub[..label]) {
            *eq = [form[0], form[1], form[2], 0];
        }
        let base = label;
        let perm = [forms.perm[0], forms.perm[1], forms.perm[2], t];
        let pivot = [sub[label][0], sub[label][1], sub[label][2], 0];
        let det = [forms.det[0], forms.det[1], forms.det[2], 0];

        eqs[base] = perm;
        let all = field.solutions(&eqs[..base + 1]);
        eqs[base + 1] = pivot;
        let pivot_zero = field.solutions(&eqs[..base + 2]);
        eqs[base + 2] = det;
        let both_zero = field.solutions(&eqs[..base + 3]);
        eqs[base + 1] = det;
        let det_zero = field.solutions(&eqs[..base + 2]);
        all + both_zero - pivot_zero - det_zero
    };
    (count(0), count(1))
}

/// Zero-permanent invertible matrices mod the odd prime `p`, split by the zero
/// pattern of rows 1 and 2.
pub fn case_census_oracle(p: u64, config: &OracleConfig) -> Result<CaseCensus> {
    if !crate::modring::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    config.check_tiered(p)?;
    let n = p;
    let rows = n.pow(3);
    let field = config.prime_fast_path.then(|| PrimeField::new(p));
    let unit = unit_table(n);
    let nonzero = |r: [u64; 3]| r.iter().filter(|&&v| v != 0).count();

    let tally = run_sharded(config, rows, 7, rows, |r1, tally| {
        let first = decode_row(r1, n);
        let mut sweep = vec![0u64; n as usize];
        for r2 in 0..rows {
            let second = decode_row(r2, n);
            let Some(row) = CaseRow::from_nonzero_counts(nonzero(first), nonzero(second)) else {
                continue;
            };
            let forms = PrefixForms::new(first, second, n);
            if !forms.can_be_invertible(n) {
                continue;
            }
            tally[row.index()] += match &field {
                Some(field) => solve_third_rows(&forms, field).0,
                None => {
                    sweep.iter_mut().for_each(|v| *v = 0);
                    sweep_third_rows(&forms, n, &unit, &mut sweep);
                    sweep[0]
                }
            };
        }
        Ok(())
    })?;
    Ok(CaseCensus {
        p,
        counts: std::array::from_fn(|i| BigUint::from(tally[i])),
    })
}

/// Census of invertible 2×2 matrices by permanent, over all `n⁴` matrices.
pub fn census_2x2(m: &Modulus) -> Result<CountTable> {
    let n = m.n();
    if n > DEFAULT_2X2_MAX {
        return Err(Error::TooLarge {
            n,
            bound: DEFAULT_2X2_MAX,
            engine: "2x2",
        });
    }
    let mut tally = vec![0u64; n as usize];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let det = (a * d + n * n - b * c) % n;
                    if det.gcd(&n) == 1 {
                        tally[((a * d + b * c) % n) as usize] += 1;
                    }
                }
            }
        }
    }
    Ok(CountTable::from_u64(n, &tally))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::factorize;

    fn modulus(n: u64) -> Modulus {
        factorize(n).unwrap()
    }

    fn u(counts: &CountTable) -> Vec<u64> {
        counts
            .counts
            .iter()
            .map(|c| c.try_into().unwrap())
            .collect()
    }

    fn generic() -> OracleConfig {
        OracleConfig {
            prime_fast_path: false,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn naive_small() {
        let t = census_naive(&modulus(2), &OracleConfig::default()).unwrap();
        assert_eq!(u(&t), vec![0, 168]);
        let t = census_naive(&modulus(3), &OracleConfig::default()).unwrap();
        assert_eq!(u(&t), vec![3312, 3960, 3960]);
        let t = census_naive(&modulus(1), &OracleConfig::default()).unwrap();
        assert_eq!(u(&t), vec![1]);
    }

    #[test]
    fn naive_refuses_large() {
        let err = census_naive(&modulus(9), &OracleConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TooLarge { n: 9, bound: 8, .. }));
        let err = census_tiered(&modulus(17), &OracleConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::TooLarge {
                n: 17,
                bound: 16,
                ..
            }
        ));
    }

    #[test]
    fn tiered_matches_naive_up_to_six() {
        for n in 1..=6 {
            let m = modulus(n);
            let naive = census_naive(&m, &OracleConfig::default()).unwrap();
            assert_eq!(
                census_tiered(&m, &OracleConfig::default()).unwrap(),
                naive,
                "n={n}"
            );
            assert_eq!(
                census_tiered(&m, &generic()).unwrap(),
                naive,
                "n={n} generic"
            );
        }
    }

    #[test]
    fn prime_fast_path_matches_sweep() {
        for p in [2, 3, 5, 7] {
            let m = modulus(p);
            assert_eq!(
                census_tiered(&m, &OracleConfig::default()).unwrap(),
                census_tiered(&m, &generic()).unwrap()
            );
        }
    }

    #[test]
    fn census_totals_are_group_orders() {
        for n in [4u64, 6, 8, 10] {
            let m = modulus(n);
            let t = census(&m, &OracleConfig::default()).unwrap();
            assert_eq!(t.total(), crate::closed_form::gl3_order_n(&m), "n={n}");
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let m = modulus(6);
        let one = census_tiered(&m, &OracleConfig::default().with_threads(1)).unwrap();
        let four = census_tiered(&m, &OracleConfig::default().with_threads(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn progress_counts_prefixes() {
        let counter = Arc::new(AtomicU64::new(0));
        let config = OracleConfig {
            progress: Some(counter.clone()),
            ..OracleConfig::default()
        };
        census_tiered(&modulus(3), &config).unwrap();
        assert_eq!(
            counter.load(std::sync::atomic::Ordering::Relaxed),
            3u64.pow(6)
        );
    }

    #[test]
    fn class_census_small_prime() {
        let c = class_census(3, 1, &OracleConfig::default()).unwrap();
        let zero: Vec<u64> = ClassLabel::CLASSES
            .iter()
            .map(|&l| (&c.get(0, l)).try_into().unwrap())
            .collect();
        assert_eq!(zero, vec![2208, 576, 96, 384, 48]);
        assert_eq!(
            c.marginals(),
            census_naive(&modulus(3), &OracleConfig::default()).unwrap()
        );
        assert_eq!(c.get(0, ClassLabel::NonInvertible), BigUint::default());
    }

    #[test]
    fn class_fast_path_matches_sweep() {
        for p in [2, 3, 5, 7] {
            assert_eq!(
                class_census(p, 1, &OracleConfig::default()).unwrap(),
                class_census(p, 1, &generic()).unwrap(),
                "p={p}"
            );
        }
    }

    #[test]
    fn class_census_rejects_non_prime_base() {
        assert!(class_census(4, 1, &OracleConfig::default()).is_err());
        assert!(class_census(3, 3, &OracleConfig::default()).is_err());
    }

    #[test]
    fn case_census_small() {
        let c = case_census_oracle(3, &OracleConfig::default()).unwrap();
        let v: Vec<u64> = c.counts.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, vec![432, 144, 1008, 576, 288, 576, 288]);
        assert_eq!(c.total(), BigUint::from(3312u64));
        for p in [3, 5, 7] {
            assert_eq!(
                case_census_oracle(p, &OracleConfig::default()).unwrap(),
                case_census_oracle(p, &generic()).unwrap()
            );
        }
        assert_eq!(
            case_census_oracle(2, &OracleConfig::default()),
            Err(Error::NotOddPrime(2))
        );
    }

    #[test]
    fn two_by_two() {
        assert_eq!(u(&census_2x2(&modulus(3)).unwrap())[0], 8);
        let five = u(&census_2x2(&modulus(5)).unwrap());
        assert_eq!(five, vec![64, 104, 104, 104, 104]);
        assert_eq!(u(&census_2x2(&modulus(2)).unwrap()), vec![0, 6]);
        assert!(census_2x2(&modulus(51)).is_err());
    }
}

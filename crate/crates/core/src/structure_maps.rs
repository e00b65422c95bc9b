//! Executable versions of the structural maps between permanent classes:
//! single-entry shifts between residues divisible by `p`, reduction mod `p`
//! and its fibers, explicit class representatives, and the exhaustive check
//! that no invertible matrix escapes the five classes.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::matrices::{
    det_raw, first_unit_index, perm_raw, sub_perms_raw, ClassLabel, Mat3, Rows3,
};
use crate::modring::{inverse_mod, is_prime, Residue};
use crate::oracle::{decode_row, run_sharded, sweep_with, unit_table, OracleConfig, PrefixForms};

/// Upper bound on the number of lifts `fiber_count` will enumerate.
pub const FIBER_MAX_LIFTS: u64 = 1 << 31;

fn prime_power(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroExponent);
    }
    p.checked_pow(k).ok_or(Error::TooLarge {
        n: u64::MAX,
        bound: crate::matrices::MAX_MODULUS,
        engine: "prime power",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftResult {
    pub image: Mat3,
    /// Zero-based position of the changed entry.
    pub position: (usize, usize),
    pub shift: Residue,
}

/// Add `x · P_ij⁻¹` to the pivot entry `a_ij` of `label`, moving the
/// permanent by exactly `x` while keeping the class and, since `p | x`,
/// invertibility.
pub fn psi_shift(m: &Mat3, x: i64, label: ClassLabel, p: u64, k: u32) -> Result<ShiftResult> {
    let n = prime_power(p, k)?;
    if m.modulus() != n {
        return Err(Error::ModulusMismatch {
            expected: n,
            actual: m.modulus(),
        });
    }
    let x = Residue::new(x, n);
    if x.value() % p != 0 {
        return Err(Error::ShiftNotDivisible { x: x.value(), p });
    }
    let (i, j) = label.pivot().ok_or(Error::NonInvertibleLabel)?;
    let pivot = m
        .sub_permanents()
        .get(label)
        .expect("class label has a pivot");
    let inv = pivot.inverse().map_err(|_| Error::PivotNotUnit {
        value: pivot.value(),
        modulus: n,
    })?;
    let shift = x * inv;
    Ok(ShiftResult {
        image: m.with_entry(i, j, m.entry(i, j) + shift),
        position: (i, j),
        shift,
    })
}

/// Table form of [`psi_shift`] for the enumerators: `None` when the pivot
/// sub-permanent of class index `label` is not a unit.
#[inline]
fn shift_rows(a: &Rows3, label: usize, x: u64, n: u64, inverse: &[Option<u64>]) -> Option<Rows3> {
    let (i, j) = ClassLabel::CLASSES[label].pivot()?;
    let pivot = sub_perms_raw(a)[label] % n;
    let inv = inverse[pivot as usize]?;
    let mut out = *a;
    out[i][j] = (a[i][j] + x * inv) % n;
    Some(out)
}

/// Entrywise reduction mod `p`.
pub fn project(m: &Mat3, p: u64) -> Result<Mat3> {
    m.reduce(p)
}

/// Count the entrywise lifts of `a` (a matrix mod `p`) to `Z/p^k` that are
/// invertible with permanent divisible by `p`.
pub fn fiber_count(a: &Mat3, k: u32, config: &OracleConfig) -> Result<u64> {
    let p = a.modulus();
    let n = prime_power(p, k)?;
    let q = n / p;
    let lifts = q
        .checked_pow(9)
        .filter(|&l| l <= FIBER_MAX_LIFTS)
        .ok_or(Error::TooLarge {
            n,
            bound: FIBER_MAX_LIFTS,
            engine: "fiber (lift count)",
        })?;
    let base = *a.rows();
    let lift_row = |row: usize, code: u64| -> [u64; 3] {
        let c = [code / (q * q), code / q % q, code % q];
        std::array::from_fn(|j| base[row][j] + p * c[j])
    };
    let q3 = q.pow(3);
    let tally = run_sharded(config, q3, 1, 1, |c1, tally| {
        let first = lift_row(0, c1);
        for c2 in 0..q3 {
            let second = lift_row(1, c2);
            for c3 in 0..q3 {
                let b = [first, second, lift_row(2, c3)];
                if perm_raw(&b, n) % p == 0 && det_raw(&b, n).gcd(&n) == 1 {
                    tally[0] += 1;
                }
            }
        }
        Ok(())
    })?;
    debug_assert!(tally[0] <= lifts);
    Ok(tally[0])
}

/// A representative of class `label` with permanent `x`, for odd `p` and
/// `p | x`, over `Z/p^k`.
pub fn witness(label: ClassLabel, p: u64, k: u32, x: i64) -> Result<Mat3> {
    let n = prime_power(p, k)?;
    if p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    let x = Residue::new(x, n);
    if x.value() % p != 0 {
        return Err(Error::ShiftNotDivisible { x: x.value(), p });
    }
    let r = |v: i64| Residue::new(v, n);
    let xm1 = x - r(1);
    let half = r(2).inverse()?;
    let v = |res: Residue| res.value() as i64;
    let rows = match label {
        ClassLabel::C11 => [
            [v(xm1 * half), v((x + r(1)) * half), 0],
            [1, 1, 0],
            [0, 0, 1],
        ],
        ClassLabel::C12 => [[1, 0, 0], [1, 1, 1], [0, 1, v(xm1)]],
        ClassLabel::C13 => [[1, 0, 0], [v(xm1.inverse()?), 1, 1], [v(xm1), 1, v(xm1)]],
        ClassLabel::C21 => [[0, 0, 1], [1, 1, 0], [v(xm1), 1, 0]],
        ClassLabel::C22 => [[1, 1, 1], [0, 1, 1], [0, 1, v(xm1)]],
        ClassLabel::NonInvertible => return Err(Error::NonInvertibleLabel),
    };
    Ok(Mat3::new(rows, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptinessReport {
    pub p: u64,
    pub k: u32,
    /// Invertible matrices mod `p^k` examined.
    pub invertible: u64,
    /// Invertible matrices whose five sub-permanents are all divisible by `p`.
    pub violations: u64,
}

/// Check every invertible matrix mod `p^k` for a unit among
/// `P11, P12, P13, P21, P22` (mod `p`).
pub fn emptiness_scan(p: u64, k: u32, config: &OracleConfig) -> Result<EmptinessReport> {
    let n = prime_power(p, k)?;
    config.check_tiered(n)?;
    let rows = n.pow(3);
    let unit = unit_table(n);
    let tally = run_sharded(config, rows, 2, rows, |r1, tally| {
        let first = decode_row(r1, n);
        for r2 in 0..rows {
            let second = decode_row(r2, n);
            let forms = PrefixForms::new(first, second, n);
            if !forms.can_be_invertible(n) {
                continue;
            }
            sweep_with(&forms, n, |third, _, det| {
                if unit[det as usize] {
                    tally[0] += 1;
                    if first_unit_index(&sub_perms_raw(&[first, second, third]), p).is_none() {
                        tally[1] += 1;
                    }
                }
            });
        }
        Ok(())
    })?;
    Ok(EmptinessReport {
        p,
        k,
        invertible: tally[0],
        violations: tally[1],
    })
}

/// Outcome of pushing every zero-permanent class through [`psi_shift`] by `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    pub p: u64,
    pub k: u32,
    pub x: u64,
    /// `|G(p^k, 0, label)|`, per class.
    pub source: [u64; 5],
    /// Images that are invertible, have permanent `x` and stay in the class.
    pub landed: [u64; 5],
    /// Images the reverse shift by `−x` maps back to the source matrix.
    pub round_trips: [u64; 5],
    /// `|G(p^k, x, label)|`, counted directly.
    pub target: [u64; 5],
}

impl BijectionReport {
    /// The shift is injective (it has a left inverse) into a set of the same
    /// size, hence a bijection, exactly when all four counts agree.
    pub fn is_bijection(&self) -> bool {
        self.source == self.landed && self.source == self.round_trips && self.source == self.target
    }
}

/// Verify the class-preserving shift bijections `G(p^k,0,label) → G(p^k,x,label)`
/// for every `x` divisible by `p`, by enumeration.
pub fn shift_bijections(p: u64, k: u32, config: &OracleConfig) -> Result<Vec<BijectionReport>> {
    let n = prime_power(p, k)?;
    config.check_tiered(n)?;
    let shifts: Vec<u64> = (0..n).step_by(p as usize).collect();
    let s = shifts.len();
    // per shift: source, landed, round_trips, target, each 5 wide
    let width = s * 20;
    let rows = n.pow(3);
    let unit = unit_table(n);
    let inverse: Vec<Option<u64>> = (0..n)
        .map(|v| inverse_mod(v, n).filter(|_| unit[v as usize]))
        .collect();
    let tally = run_sharded(config, rows, width, rows, |r1, tally| {
        let first = decode_row(r1, n);
        for r2 in 0..rows {
            let second = decode_row(r2, n);
            let forms = PrefixForms::new(first, second, n);
            if !forms.can_be_invertible(n) {
                continue;
            }
            sweep_with(&forms, n, |third, perm, det| {
                if !unit[det as usize] || perm % p != 0 {
                    return;
                }
                let a = [first, second, third];
                let label = first_unit_index(&sub_perms_raw(&a), p).unwrap_or_else(|| {
                    panic!("invertible matrix without a unit sub-permanent: {a:?} mod {n}")
                });
                let at = |slot: usize, which: usize| slot * 20 + which * 5 + label;
                tally[at((perm / p) as usize, 3)] += 1;
                if perm != 0 {
                    return;
                }
                for (slot, &x) in shifts.iter().enumerate() {
                    tally[at(slot, 0)] += 1;
                    let image =
                        shift_rows(&a, label, x, n, &inverse).expect("class pivot is a unit");
                    if perm_raw(&image, n) == x
                        && unit[det_raw(&image, n) as usize]
                        && first_unit_index(&sub_perms_raw(&image), p) == Some(label)
                    {
                        tally[at(slot, 1)] += 1;
                    }
                    if shift_rows(&image, label, (n - x) % n, n, &inverse) == Some(a) {
                        tally[at(slot, 2)] += 1;
                    }
                }
            });
        }
        Ok(())
    })?;
    Ok(shifts
        .iter()
        .enumerate()
        .map(|(slot, &x)| {
            let part = |which: usize| -> [u64; 5] {
                std::array::from_fn(|i| tally[slot * 20 + which * 5 + i])
            };
            BijectionReport {
                p,
                k,
                x,
                source: part(0),
                landed: part(1),
                round_trips: part(2),
                target: part(3),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Mat3 {
        Mat3::parse("1,0,0;2,1,2;1,1,1", 3).unwrap()
    }

    #[test]
    fn shift_example() {
        let m = Mat3::parse("4,5,0;1,1,0;0,0,1", 9).unwrap();
        assert_eq!(m.permanent().value(), 0);
        assert_eq!(m.classify(3), ClassLabel::C11);
        let r = psi_shift(&m, 3, ClassLabel::C11, 3, 2).unwrap();
        assert_eq!(r.image, Mat3::parse("7,5,0;1,1,0;0,0,1", 9).unwrap());
        assert_eq!(r.image.permanent().value(), 3);
        assert_eq!(r.position, (0, 0));

        assert_eq!(psi_shift(&m, 0, ClassLabel::C11, 3, 2).unwrap().image, m);
        let back = psi_shift(&r.image, 9 - 3, ClassLabel::C11, 3, 2)
            .unwrap()
            .image;
        assert_eq!(back, m);
    }

    #[test]
    fn shift_errors() {
        let m = Mat3::parse("4,5,0;1,1,0;0,0,1", 9).unwrap();
        assert_eq!(
            psi_shift(&m, 2, ClassLabel::C11, 3, 2),
            Err(Error::ShiftNotDivisible { x: 2, p: 3 })
        );
        // P13 = a21·a32 + a22·a31 = 0
        assert_eq!(
            psi_shift(&m, 3, ClassLabel::C13, 3, 2),
            Err(Error::PivotNotUnit {
                value: 0,
                modulus: 9
            })
        );
        assert!(matches!(
            psi_shift(&m, 3, ClassLabel::C11, 3, 1),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn table_shift_agrees_with_psi_shift() {
        let n = 9;
        let inverse: Vec<Option<u64>> = (0..n).map(|v| inverse_mod(v, n)).collect();
        let mut seed = 12345u64;
        for _ in 0..2000 {
            let rows: Rows3 = std::array::from_fn(|_| {
                std::array::from_fn(|_| {
                    seed = seed
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    (seed >> 33) % n
                })
            });
            let m = Mat3::from_rows(rows, n);
            for (index, label) in ClassLabel::CLASSES.into_iter().enumerate() {
                for x in [0u64, 3, 6] {
                    let by_table = shift_rows(&rows, index, x, n, &inverse);
                    let direct = psi_shift(&m, x as i64, label, 3, 2)
                        .ok()
                        .map(|r| *r.image.rows());
                    assert_eq!(by_table, direct);
                }
            }
        }
    }

    #[test]
    fn projections() {
        let target = example();
        assert_eq!(
            project(&Mat3::parse("4,0,0;2,1,2;1,1,1", 9).unwrap(), 3).unwrap(),
            target
        );
        assert_eq!(
            project(&Mat3::parse("1,3,0;2,1,2;1,1,1", 9).unwrap(), 3).unwrap(),
            target
        );
        assert_eq!(project(&Mat3::identity(9), 3).unwrap(), Mat3::identity(3));
        assert!(project(&Mat3::identity(9), 2).is_err());
        // the two lifts above sit over permanents 3 and 6
        assert_eq!(
            Mat3::parse("4,0,0;2,1,2;1,1,1", 9)
                .unwrap()
                .permanent()
                .value(),
            3
        );
        assert_eq!(
            Mat3::parse("1,3,0;2,1,2;1,1,1", 9)
                .unwrap()
                .permanent()
                .value(),
            6
        );
    }

    #[test]
    fn fibers() {
        let config = OracleConfig::default();
        assert_eq!(fiber_count(&example(), 2, &config).unwrap(), 19_683);
        assert_eq!(fiber_count(&example(), 1, &config).unwrap(), 1);
        let a = witness(ClassLabel::C12, 5, 1, 0).unwrap();
        assert_eq!(fiber_count(&a, 2, &config).unwrap(), 1_953_125);
        // a matrix outside G(p, 0) has no qualifying lifts
        assert_eq!(fiber_count(&Mat3::identity(3), 2, &config).unwrap(), 0);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(
            witness(ClassLabel::C11, 5, 1, 0).unwrap(),
            Mat3::parse("2,3,0;1,1,0;0,0,1", 5).unwrap()
        );
        assert_eq!(
            witness(ClassLabel::C21, 3, 1, 0).unwrap(),
            Mat3::parse("0,0,1;1,1,0;2,1,0", 3).unwrap()
        );
        assert_eq!(
            witness(ClassLabel::C22, 5, 1, 5).unwrap(),
            Mat3::parse("1,1,1;0,1,1;0,1,4", 5).unwrap()
        );
        assert_eq!(
            witness(ClassLabel::C11, 2, 1, 0),
            Err(Error::NotOddPrime(2))
        );
        assert!(witness(ClassLabel::C11, 5, 1, 1).is_err());
    }

    #[test]
    fn witnesses_are_valid() {
        for p in [3u64, 5, 7, 11, 13] {
            for k in 1..=2 {
                let n = p.pow(k);
                for x in (0..n).step_by(p as usize) {
                    for label in ClassLabel::CLASSES {
                        let w = witness(label, p, k, x as i64).unwrap();
                        assert_eq!(w.permanent().value(), x);
                        assert!(w.is_invertible());
                        assert_eq!(w.classify(p), label, "p={p} k={k} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn emptiness_small() {
        let config = OracleConfig::default();
        assert_eq!(
            emptiness_scan(2, 1, &config).unwrap(),
            EmptinessReport {
                p: 2,
                k: 1,
                invertible: 168,
                violations: 0
            }
        );
        let r = emptiness_scan(3, 1, &config).unwrap();
        assert_eq!((r.invertible, r.violations), (11_232, 0));
        let r = emptiness_scan(2, 2, &config).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.invertible, 2u64.pow(9) * 168);
    }

    #[test]
    fn bijections_mod_nine() {
        let reports = shift_bijections(3, 2, &OracleConfig::default()).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(r.is_bijection(), "{r:?}");
            assert_eq!(r.source.iter().sum::<u64>(), 21_730_032);
        }
    }
}

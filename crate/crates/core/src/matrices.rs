//! Dense 3×3 and 2×2 matrices over `Z/n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::Residue;

pub type Rows3 = [[u64; 3]; 3];

/// Largest supported matrix modulus; keeps the unreduced permanent and
/// determinant expansions inside 64 bits.
pub const MAX_MODULUS: u64 = 1 << 20;

/// Permanent of a 3×3 array of canonical entries, reduced mod `n`.
#[inline]
pub(crate) fn perm_raw(a: &Rows3, n: u64) -> u64 {
    let t = a[0][0] * (a[1][1] * a[2][2] + a[1][2] * a[2][1])
        + a[0][1] * (a[1][0] * a[2][2] + a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] + a[1][1] * a[2][0]);
    t % n
}

/// Determinant of a 3×3 array of canonical entries, reduced mod `n`.
#[inline]
pub(crate) fn det_raw(a: &Rows3, n: u64) -> u64 {
    let pos =
        a[0][0] * a[1][1] * a[2][2] + a[0][1] * a[1][2] * a[2][0] + a[0][2] * a[1][0] * a[2][1];
    let neg =
        a[0][0] * a[1][2] * a[2][1] + a[0][1] * a[1][0] * a[2][2] + a[0][2] * a[1][1] * a[2][0];
    (pos % n + n - neg % n) % n
}

/// `[P11, P12, P13, P21, P22]` of a 3×3 array, unreduced.
#[inline]
pub(crate) fn sub_perms_raw(a: &Rows3) -> [u64; 5] {
    [
        a[1][1] * a[2][2] + a[1][2] * a[2][1],
        a[1][0] * a[2][2] + a[1][2] * a[2][0],
        a[1][0] * a[2][1] + a[1][1] * a[2][0],
        a[0][1] * a[2][2] + a[0][2] * a[2][1],
        a[0][0] * a[2][2] + a[0][2] * a[2][0],
    ]
}

/// Index into [`ClassLabel::CLASSES`] of the first sub-permanent not divisible
/// by `p`, or `None` if all five are.
#[inline]
pub(crate) fn first_unit_index(sub: &[u64; 5], p: u64) -> Option<usize> {
    sub.iter().position(|&v| v % p != 0)
}

/// Which of the five sub-permanent classes a matrix belongs to, relative to a
/// prime `p`: the first of `P11, P12, P13, P21, P22` that is a unit mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    C11,
    C12,
    C13,
    C21,
    C22,
    NonInvertible,
}

impl ClassLabel {
    pub const CLASSES: [ClassLabel; 5] = [
        ClassLabel::C11,
        ClassLabel::C12,
        ClassLabel::C13,
        ClassLabel::C21,
        ClassLabel::C22,
    ];

    /// Zero-based `(row, column)` of the deleted entry whose sub-permanent
    /// decides this class.
    pub fn pivot(self) -> Option<(usize, usize)> {
        match self {
            ClassLabel::C11 => Some((0, 0)),
            ClassLabel::C12 => Some((0, 1)),
            ClassLabel::C13 => Some((0, 2)),
            ClassLabel::C21 => Some((1, 0)),
            ClassLabel::C22 => Some((1, 1)),
            ClassLabel::NonInvertible => None,
        }
    }

    pub fn index(self) -> Option<usize> {
        Self::CLASSES.iter().position(|&c| c == self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::C11 => "C11",
            ClassLabel::C12 => "C12",
            ClassLabel::C13 => "C13",
            ClassLabel::C21 => "C21",
            ClassLabel::C22 => "C22",
            ClassLabel::NonInvertible => "NonInvertible",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s
            .trim()
            .trim_start_matches(['C', 'c'])
            .replace([',', '(', ')', ' '], "");
        match t.as_str() {
            "11" => Ok(ClassLabel::C11),
            "12" => Ok(ClassLabel::C12),
            "13" => Ok(ClassLabel::C13),
            "21" => Ok(ClassLabel::C21),
            "22" => Ok(ClassLabel::C22),
            _ if s.eq_ignore_ascii_case("noninvertible") => Ok(ClassLabel::NonInvertible),
            _ => Err(format!("unknown class label {s:?}")),
        }
    }
}

/// The five sub-permanents used for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubPermanents {
    pub p11: Residue,
    pub p12: Residue,
    pub p13: Residue,
    pub p21: Residue,
    pub p22: Residue,
}

impl SubPermanents {
    pub fn in_order(&self) -> [Residue; 5] {
        [self.p11, self.p12, self.p13, self.p21, self.p22]
    }

    pub fn get(&self, label: ClassLabel) -> Option<Residue> {
        label.index().map(|i| self.in_order()[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat3 {
    modulus: u64,
    rows: Rows3,
}

impl Mat3 {
    pub fn new(rows: [[i64; 3]; 3], modulus: u64) -> Self {
        Self::from_rows(
            rows.map(|r| r.map(|v| Residue::new(v, modulus).value())),
            modulus,
        )
    }

    pub fn from_rows(rows: Rows3, modulus: u64) -> Self {
        assert!(
            (1..=MAX_MODULUS).contains(&modulus),
            "matrix modulus must lie in 1..={MAX_MODULUS}"
        );
        Mat3 {
            modulus,
            rows: rows.map(|r| r.map(|v| v % modulus)),
        }
    }

    pub fn identity(modulus: u64) -> Self {
        Self::new([[1, 0, 0], [0, 1, 0], [0, 0, 1]], modulus)
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new([[0; 3]; 3], modulus)
    }

    /// Parse the row-major literal form `"1,0,0;2,1,2;1,1,1"`.
    pub fn parse(literal: &str, modulus: u64) -> Result<Self> {
        let bad = |reason: &str| Error::BadMatrixLiteral {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if modulus > MAX_MODULUS {
            return Err(Error::TooLarge {
                n: modulus,
                bound: MAX_MODULUS,
                engine: "matrix",
            });
        }
        let rows: Vec<&str> = literal.split(';').collect();
        if rows.len() != 3 {
            return Err(bad("expected 3 rows"));
        }
        let mut out = [[0i64; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 3 {
                return Err(bad("expected 3 entries per row"));
            }
            for (j, cell) in cells.iter().enumerate() {
                out[i][j] = cell
                    .trim()
                    .parse()
                    .map_err(|_| bad("entry is not an integer"))?;
            }
        }
        Ok(Self::new(out, modulus))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> &Rows3 {
        &self.rows
    }

    /// Zero-based entry access.
    pub fn entry(&self, i: usize, j: usize) -> Residue {
        Residue::from_u64(self.rows[i][j], self.modulus)
    }

    pub fn with_entry(&self, i: usize, j: usize, value: Residue) -> Mat3 {
        assert_eq!(value.modulus(), self.modulus);
        let mut rows = self.rows;
        rows[i][j] = value.value();
        Mat3 {
            modulus: self.modulus,
            rows,
        }
    }

    pub fn transpose(&self) -> Mat3 {
        let a = &self.rows;
        let mut t = [[0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[j][i];
            }
        }
        Mat3 {
            modulus: self.modulus,
            rows: t,
        }
    }

    /// Entrywise reduction modulo a divisor `d` of the modulus.
    pub fn reduce(&self, d: u64) -> Result<Mat3> {
        if d == 0 || self.modulus % d != 0 {
            return Err(Error::PrimeNotDividing {
                p: d,
                n: self.modulus,
            });
        }
        Ok(Mat3::from_rows(self.rows, d))
    }

    pub fn permanent(&self) -> Residue {
        Residue::from_u64(perm_raw(&self.rows, self.modulus), self.modulus)
    }

    pub fn determinant(&self) -> Residue {
        Residue::from_u64(det_raw(&self.rows, self.modulus), self.modulus)
    }

    pub fn sub_permanents(&self) -> SubPermanents {
        let [p11, p12, p13, p21, p22] =
            sub_perms_raw(&self.rows).map(|v| Residue::from_u64(v, self.modulus));
        SubPermanents {
            p11,
            p12,
            p13,
            p21,
            p22,
        }
    }

    /// The 2×2 submatrix left after deleting zero-based row `i` and column `j`.
    pub fn minor(&self, i: usize, j: usize) -> Mat2 {
        let rs: Vec<usize> = (0..3).filter(|&r| r != i).collect();
        let cs: Vec<usize> = (0..3).filter(|&c| c != j).collect();
        Mat2 {
            modulus: self.modulus,
            rows: [
                [self.rows[rs[0]][cs[0]], self.rows[rs[0]][cs[1]]],
                [self.rows[rs[1]][cs[0]], self.rows[rs[1]][cs[1]]],
            ],
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().is_unit()
    }

    /// First class label in `P11, P12, P13, P21, P22` order whose
    /// sub-permanent is nonzero mod `p`, ignoring invertibility.
    pub fn first_unit_label(&self, p: u64) -> Option<ClassLabel> {
        first_unit_index(&sub_perms_raw(&self.rows), p).map(|i| ClassLabel::CLASSES[i])
    }

    /// Classify relative to the prime `p`, which must divide the modulus.
    ///
    /// Matrices singular mod `p` are `NonInvertible`. An invertible matrix
    /// always has a unit among the five sub-permanents; a counterexample
    /// panics.
    pub fn classify(&self, p: u64) -> ClassLabel {
        assert!(
            p > 1 && self.modulus % p == 0,
            "classification prime {p} must divide the modulus {}",
            self.modulus
        );
        if det_raw(&self.rows, p) == 0 {
            return ClassLabel::NonInvertible;
        }
        self.first_unit_label(p)
            .unwrap_or_else(|| panic!("invertible matrix {self} has no unit sub-permanent mod {p}"))
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("{},{},{}", r[0], r[1], r[2]))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

pub fn permanent3(m: &Mat3) -> Residue {
    m.permanent()
}

pub fn determinant3(m: &Mat3) -> Residue {
    m.determinant()
}

pub fn sub_permanents(m: &Mat3) -> SubPermanents {
    m.sub_permanents()
}

/// Both sides of
/// `2a22·P22 − a11·P11 + a12·P12 − 2a21·P21 − 3a13·P13 = det − 6·a13·a21·a32`,
/// which forces a unit among the five sub-permanents of an invertible matrix
/// when `p` is odd.
pub fn sub_permanent_identity(m: &Mat3) -> (Residue, Residue) {
    let sp = m.sub_permanents();
    let a = |i, j| m.entry(i, j);
    let r = |v: i64| Residue::new(v, m.modulus());
    let lhs = r(2) * a(1, 1) * sp.p22 - a(0, 0) * sp.p11 + a(0, 1) * sp.p12
        - r(2) * a(1, 0) * sp.p21
        - r(3) * a(0, 2) * sp.p13;
    let rhs = m.determinant() - r(6) * a(0, 2) * a(1, 0) * a(2, 1);
    (lhs, rhs)
}

pub fn is_invertible(m: &Mat3) -> bool {
    m.is_invertible()
}

pub fn classify(m: &Mat3, p: u64) -> ClassLabel {
    m.classify(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    modulus: u64,
    rows: [[u64; 2]; 2],
}

impl Mat2 {
    pub fn new(rows: [[i64; 2]; 2], modulus: u64) -> Self {
        Mat2 {
            modulus,
            rows: rows.map(|r| r.map(|v| Residue::new(v, modulus).value())),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> &[[u64; 2]; 2] {
        &self.rows
    }

    pub fn permanent(&self) -> Residue {
        let [[a, b], [c, d]] = self.rows;
        Residue::from_u64(a * d + b * c, self.modulus)
    }

    pub fn determinant(&self) -> Residue {
        let [[a, b], [c, d]] = self.rows;
        Residue::new((a * d) as i64 - (b * c) as i64, self.modulus)
    }
}

pub fn permanent2(m: &Mat2) -> Residue {
    m.permanent()
}

pub fn determinant2(m: &Mat2) -> Residue {
    m.determinant()
}

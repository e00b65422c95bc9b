//! Solution counts of small affine systems in three unknowns over `F_p`.

/// One equation `c0·x + c1·y + c2·z ≡ rhs`.
pub(crate) type Equation = [u64; 4];

const MAX_EQUATIONS: usize = 8;

pub(crate) struct PrimeField {
    p: u64,
    inv: Vec<u64>,
}

impl PrimeField {
    pub(crate) fn new(p: u64) -> Self {
        let mut inv = vec![0u64; p as usize];
        for a in 1..p {
            inv[a as usize] =
                crate::modring::inverse_mod(a, p).expect("nonzero element of a prime field");
        }
        PrimeField { p, inv }
    }

    /// Number of `(x, y, z) ∈ F_p³` satisfying every equation: zero or `p^{3 − rank}`.
    pub(crate) fn solutions(&self, equations: &[Equation]) -> u64 {
        let p = self.p;
        debug_assert!(equations.len() <= MAX_EQUATIONS);
        let mut m = [[0u64; 4]; MAX_EQUATIONS];
        let rows = equations.len();
        m[..rows].copy_from_slice(equations);

        let mut rank = 0;
        for col in 0..3 {
            let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let scale = self.inv[m[rank][col] as usize];
            for v in m[rank].iter_mut() {
                *v = *v * scale % p;
            }
            for r in 0..rows {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col];
                    for c in 0..4 {
                        m[r][c] = (m[r][c] + (p - f) * m[rank][c]) % p;
                    }
                }
            }
            rank += 1;
        }
        if m[rank..rows].iter().any(|row| row[3] != 0) {
            return 0;
        }
        p.pow(3 - rank as u32)
    }
}

//! Integer-indexed arithmetic functions.
//!
//! `a`, `b` and `c` are the multiplicative coefficient functions of
//! θ̇₄/θ₄, θ₂⁴/16 and (1 − θ₄⁴)/8 respectively. `B` is the Cauchy square
//! of `b`, i.e. the q-coefficients of θ₂⁸/256.

use std::fmt;
use std::sync::OnceLock;

/// Largest integer covered by the smallest-prime-factor sieve. Larger
/// arguments fall back to trial division.
pub const SIEVE_CAP: u64 = 1 << 20;

fn spf_table() -> &'static [u32] {
    static SPF: OnceLock<Vec<u32>> = OnceLock::new();
    SPF.get_or_init(|| {
        let cap = SIEVE_CAP as usize;
        let mut spf = vec![0u32; cap + 1];
        for i in 2..=cap {
            if spf[i] == 0 {
                let mut k = i;
                while k <= cap {
                    if spf[k] == 0 {
                        spf[k] = i as u32;
                    }
                    k += i;
                }
            }
        }
        spf
    })
}

fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n <= SIEVE_CAP {
        return spf_table()[n as usize] as u64;
    }
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Prime factorization as `(prime, exponent)` pairs, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize: n must be positive");
    let mut out = Vec::new();
    while n > 1 {
        let p = smallest_prime_factor(n);
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

/// Sum of the positive divisors of `n`.
pub fn sigma1(n: u64) -> u64 {
    assert!(n >= 1, "sigma1: n must be positive");
    factorize(n)
        .into_iter()
        .map(|(p, e)| {
            // (p^{e+1} - 1) / (p - 1) in wide arithmetic
            let p = p as u128;
            let mut acc = 1u128;
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                acc += pk;
            }
            acc
        })
        .product::<u128>() as u64
}

/// Which coefficient function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CoeffKind {
    /// a(n): σ₁ on odd parts, 2^m on 2^m.
    A,
    /// b(n): σ₁ on odd n, zero on even n.
    B,
    /// c(n): σ₁ on odd parts, −3 on 2^m (m ≥ 1).
    C,
    /// B(n) = Σ_{i+j=n} b(i) b(j).
    BSquare,
}

impl fmt::Display for CoeffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoeffKind::A => "a",
            CoeffKind::B => "b",
            CoeffKind::C => "c",
            CoeffKind::BSquare => "B",
        })
    }
}

fn split_two(n: u64) -> (u32, u64) {
    let v = n.trailing_zeros();
    (v, n >> v)
}

/// Value of the coefficient function `kind` at `n ≥ 1`.
pub fn coeff(kind: CoeffKind, n: u64) -> i64 {
    assert!(n >= 1, "coeff: n must be positive");
    match kind {
        CoeffKind::A => {
            let (v, m) = split_two(n);
            (sigma1(m) as i64) << v
        }
        CoeffKind::B => {
            if n.is_multiple_of(2) {
                0
            } else {
                sigma1(n) as i64
            }
        }
        CoeffKind::C => {
            let (v, m) = split_two(n);
            let odd = sigma1(m) as i64;
            if v == 0 {
                odd
            } else {
                -3 * odd
            }
        }
        CoeffKind::BSquare => (1..n)
            .map(|i| coeff(CoeffKind::B, i) * coeff(CoeffKind::B, n - i))
            .sum(),
    }
}

/// The prime `p` when `n = p^k` with `k ≥ 1`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let f = factorize(n);
    (f.len() == 1).then(|| f[0].0)
}

/// Λ(n): log p when n is a power of the prime p, otherwise 0.
pub fn von_mangoldt(n: u64) -> f64 {
    assert!(n >= 1, "von_mangoldt: n must be positive");
    prime_power_base(n).map_or(0.0, |p| (p as f64).ln())
}

/// All `(d, j/d)` with `d | j`, `d` ascending.
pub fn divisor_pairs(j: u64) -> Vec<(u64, u64)> {
    assert!(j >= 1, "divisor_pairs: j must be positive");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= j {
        if j.is_multiple_of(d) {
            small.push((d, j / d));
            if d * d != j {
                large.push((j / d, d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Memoized values of one coefficient function on `1..=cap`.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    kind: CoeffKind,
    values: Vec<i64>,
}

impl CoeffTable {
    pub fn build(kind: CoeffKind, cap: usize) -> Self {
        let mut values = vec![0i64; cap + 1];
        match kind {
            CoeffKind::BSquare => {
                let b: Vec<i64> = (0..=cap as u64)
                    .map(|n| if n == 0 { 0 } else { coeff(CoeffKind::B, n) })
                    .collect();
                // b vanishes on even indices, so only odd i contribute
                for n in 2..=cap {
                    values[n] = (1..n).step_by(2).map(|i| b[i] * b[n - i]).sum();
                }
            }
            _ => {
                for (n, slot) in values.iter_mut().enumerate().skip(1) {
                    *slot = coeff(kind, n as u64);
                }
            }
        }
        Self { kind, values }
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn cap(&self) -> usize {
        self.values.len() - 1
    }

    /// Value at `n`, computing on the fly past the cap.
    pub fn get(&self, n: u64) -> i64 {
        match self.values.get(n as usize) {
            Some(&v) if n >= 1 => v,
            _ => coeff(self.kind, n),
        }
    }

    /// Values as `f64`, indexed from 0 (entry 0 is zero).
    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

/// Shared coefficient tables used by the series evaluators.
pub fn shared_tables() -> &'static (CoeffTable, CoeffTable) {
    static TABLES: OnceLock<(CoeffTable, CoeffTable)> = OnceLock::new();
    TABLES.get_or_init(|| {
        (
            CoeffTable::build(CoeffKind::A, 1 << 14),
            CoeffTable::build(CoeffKind::B, 1 << 14),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn sigma1_brute(n: u64) -> u64 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).sum()
    }

    #[test]
    fn sigma1_values() {
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(9), 13);
        assert_eq!(sigma1(6), 12);
        for n in 1..500 {
            assert_eq!(sigma1(n), sigma1_brute(n));
        }
        // no overflow at the top of the documented range
        assert_eq!(sigma1(999_983), 999_984);
        assert!(sigma1(720_720) > 0);
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coeff(CoeffKind::A, 2), 2);
        assert_eq!(coeff(CoeffKind::A, 12), 16);
        assert_eq!(coeff(CoeffKind::B, 8), 0);
        assert_eq!(coeff(CoeffKind::B, 15), 24);
        assert_eq!(coeff(CoeffKind::C, 2), -3);
        assert_eq!(coeff(CoeffKind::C, 6), -12);
        assert_eq!(coeff(CoeffKind::BSquare, 2), 1);
        assert_eq!(coeff(CoeffKind::BSquare, 1), 0);
        // b(1)b(3) + b(3)b(1)
        assert_eq!(coeff(CoeffKind::BSquare, 4), 8);
    }

    #[test]
    fn powers_of_two() {
        for m in 1..20u32 {
            let n = 1u64 << m;
            assert_eq!(coeff(CoeffKind::A, n), n as i64);
            assert_eq!(coeff(CoeffKind::B, n), 0);
            assert_eq!(coeff(CoeffKind::C, n), -3);
        }
    }

    #[test]
    fn a_against_direct_sigma() {
        for n in 1..=10_000u64 {
            let v = n.trailing_zeros();
            let m = n >> v;
            assert_eq!(coeff(CoeffKind::A, n), (sigma1_brute_fast(m) as i64) << v);
            if n % 2 == 1 {
                assert_eq!(coeff(CoeffKind::A, n), coeff(CoeffKind::B, n));
            }
        }
    }

    // divisor enumeration, independent of the factorization path
    fn sigma1_brute_fast(n: u64) -> u64 {
        divisor_pairs(n).iter().map(|&(d, _)| d).sum()
    }

    #[test]
    fn multiplicative_on_coprime_pairs() {
        for m in 1..=100u64 {
            for n in 1..=(10_000 / m) {
                if gcd(m, n) != 1 {
                    continue;
                }
                for kind in [CoeffKind::A, CoeffKind::B, CoeffKind::C] {
                    assert_eq!(coeff(kind, m * n), coeff(kind, m) * coeff(kind, n), "{kind} {m} {n}");
                }
            }
        }
    }

    #[test]
    fn von_mangoldt_values() {
        assert_eq!(von_mangoldt(1), 0.0);
        assert!((von_mangoldt(8) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(10), 0.0);
        assert!((von_mangoldt(49) - 7f64.ln()).abs() < 1e-15);
        // beyond the sieve
        assert!((von_mangoldt(1_048_583) - 1_048_583f64.ln()).abs() < 1e-12);
        assert_eq!(von_mangoldt(1_048_582), 0.0);
    }

    #[test]
    fn divisor_pair_lists() {
        assert_eq!(divisor_pairs(1), vec![(1, 1)]);
        assert_eq!(divisor_pairs(6), vec![(1, 6), (2, 3), (3, 2), (6, 1)]);
        assert_eq!(divisor_pairs(9), vec![(1, 9), (3, 3), (9, 1)]);
    }

    #[test]
    fn table_matches_pointwise() {
        for kind in [CoeffKind::A, CoeffKind::B, CoeffKind::C, CoeffKind::BSquare] {
            let t = CoeffTable::build(kind, 300);
            assert_eq!(t.cap(), 300);
            for n in 1..=310 {
                assert_eq!(t.get(n), coeff(kind, n));
            }
        }
    }

    proptest! {
        #[test]
        fn divisor_pairs_multiply_back(j in 1u64..200_000) {
            let pairs = divisor_pairs(j);
            prop_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
            for (d, e) in pairs {
                prop_assert_eq!(d * e, j);
            }
        }

        #[test]
        fn factorization_reassembles(n in 1u64..5_000_000) {
            let f = factorize(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(back, n);
        }
    }
}

//! Exact integer triple self-convolution via number-theoretic transforms.
//!
//! The convolution runs independently modulo three word-sized primes of the
//! form k·2^s + 1 (s ≥ 56) and the results are recombined by CRT into u128.
//! A per-call coefficient bound certifies that the reconstruction is exact;
//! anything that could exceed the capacity is refused instead of silently
//! wrapping.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NttPrime {
    pub p: u64,
    pub g: u64,
}

/// p = 27·2^56 + 1, 29·2^57 + 1, 87·2^56 + 1 with primitive roots 5, 3, 5.
/// Primality and root order are asserted by the tests below.
pub const NTT_PRIMES: [NttPrime; 3] = [
    NttPrime {
        p: 1_945_555_039_024_054_273,
        g: 5,
    },
    NttPrime {
        p: 4_179_340_454_199_820_289,
        g: 3,
    },
    NttPrime {
        p: 6_269_010_681_299_730_433,
        g: 5,
    },
];

/// Reconstruction stays in u128; keep a safety margin below 2^128.
const CAPACITY_BITS: u32 = 126;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn bit_reverse_permute(a: &mut [u64]) {
    let n = a.len();
    if n <= 2 {
        return;
    }
    let shift = usize::BITS - n.trailing_zeros();
    for i in 0..n {
        let j = (i.reverse_bits() >> shift) & (n - 1);
        if i < j {
            a.swap(i, j);
        }
    }
}

/// In-place radix-2 transform with the given root of unity of order a.len().
fn ntt_in_place(a: &mut [u64], p: u64, root: u64) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    bit_reverse_permute(a);
    let mut len = 2;
    while len <= n {
        let w_step = pow_mod(root, (n / len) as u64, p);
        for block in a.chunks_mut(len) {
            let (lo, hi) = block.split_at_mut(len / 2);
            let mut w = 1u64;
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = mul_mod(*y, w, p);
                *x = add_mod(u, v, p);
                *y = sub_mod(u, v, p);
                w = mul_mod(w, w_step, p);
            }
        }
        len <<= 1;
    }
}

fn cube_convolution_mod(values: &[u64], out_len: usize, prime: &NttPrime) -> Vec<u64> {
    let p = prime.p;
    let m = out_len.next_power_of_two();
    debug_assert!((p - 1) % m as u64 == 0);
    let root = pow_mod(prime.g, (p - 1) / m as u64, p);
    let mut a: Vec<u64> = values.iter().map(|&v| v % p).collect();
    a.resize(m, 0);
    ntt_in_place(&mut a, p, root);
    for x in a.iter_mut() {
        let sq = mul_mod(*x, *x, p);
        *x = mul_mod(sq, *x, p);
    }
    let inv_root = inv_mod(root, p);
    ntt_in_place(&mut a, p, inv_root);
    let inv_m = inv_mod(m as u64, p);
    a.truncate(out_len);
    for x in a.iter_mut() {
        *x = mul_mod(*x, inv_m, p);
    }
    a
}

/// Exact linear triple self-convolution of a nonnegative integer sequence:
/// out[s] = Σ_{i+j+k=s} v_i·v_j·v_k for s in 0..3·len−2.
///
/// `coeff_bound` must dominate every output coefficient; the call is refused
/// if it exceeds the certified reconstruction capacity.
pub fn triple_self_convolution(values: &[u64], coeff_bound: u128) -> Result<Vec<u128>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    if coeff_bound >> CAPACITY_BITS != 0 {
        return Err(Error::budget(format!(
            "coefficient bound 2^{:.1} exceeds the exact convolution capacity 2^{CAPACITY_BITS}",
            (coeff_bound as f64).log2()
        )));
    }
    let out_len = 3 * values.len() - 2;
    let residues: Vec<Vec<u64>> = NTT_PRIMES
        .par_iter()
        .map(|prime| cube_convolution_mod(values, out_len, prime))
        .collect();

    // Garner reconstruction: x = r0 + p0·t1 + p0·p1·t2 (mod 2^128 is exact
    // because every true coefficient is below 2^126)
    let [p0, p1, p2] = [NTT_PRIMES[0].p, NTT_PRIMES[1].p, NTT_PRIMES[2].p];
    let inv_p0_mod_p1 = inv_mod(p0 % p1, p1);
    let p0p1_mod_p2 = mul_mod(p0 % p2, p1 % p2, p2);
    let inv_p0p1_mod_p2 = inv_mod(p0p1_mod_p2, p2);
    let p0p1 = p0 as u128 * p1 as u128;

    let out = (0..out_len)
        .map(|i| {
            let r0 = residues[0][i];
            let r1 = residues[1][i];
            let r2 = residues[2][i];
            let t1 = mul_mod(sub_mod(r1, r0 % p1, p1), inv_p0_mod_p1, p1);
            let x01 = r0 as u128 + p0 as u128 * t1 as u128; // < p0·p1
            let x01_mod_p2 = (x01 % p2 as u128) as u64;
            let t2 = mul_mod(sub_mod(r2, x01_mod_p2, p2), inv_p0p1_mod_p2, p2);
            x01.wrapping_add(p0p1.wrapping_mul(t2 as u128))
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic Miller–Rabin for u64.
    fn is_prime_u64(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n % p == 0 {
                return n == p;
            }
        }
        let d = n - 1;
        let s = d.trailing_zeros();
        let d = d >> s;
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = pow_mod(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mul_mod(x, x, n);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn ntt_primes_are_prime_with_valid_roots() {
        for prime in &NTT_PRIMES {
            assert!(is_prime_u64(prime.p), "{} not prime", prime.p);
            assert_eq!((prime.p - 1) % (1 << 56), 0, "{} lacks 2^56 order", prime.p);
            // g must be a generator: g^((p-1)/q) != 1 for every prime q | p-1
            let odd = (prime.p - 1) >> (prime.p - 1).trailing_zeros();
            assert!(pow_mod(prime.g, (prime.p - 1) / 2, prime.p) != 1);
            for q in 3..=odd {
                if odd % q == 0 {
                    assert!(
                        pow_mod(prime.g, (prime.p - 1) / q, prime.p) != 1,
                        "g={} has small order mod {}",
                        prime.g,
                        prime.p
                    );
                    break;
                }
            }
        }
    }

    fn naive_triple(values: &[u64]) -> Vec<u128> {
        let n = values.len();
        let mut out = vec![0u128; 3 * n - 2];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i + j + k] += values[i] as u128 * values[j] as u128 * values[k] as u128;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_convolution() {
        let cases: Vec<Vec<u64>> = vec![
            vec![1],
            vec![0, 1, 1, 0, 1],
            vec![3, 0, 7, 2, 9, 1, 1, 4],
            (0..40).map(|i| (i * 2654435761u64) % 1000).collect(),
        ];
        for values in cases {
            let sum: u128 = values.iter().map(|&v| v as u128).sum();
            let max: u128 = values.iter().map(|&v| v as u128).max().unwrap();
            let bound = max * sum * sum;
            assert_eq!(
                triple_self_convolution(&values, bound.max(1)).unwrap(),
                naive_triple(&values)
            );
        }
    }

    #[test]
    fn large_weights_stay_exact() {
        // weights at the fixed-point scale 2^30 exercise the full CRT path
        let w = 1u64 << 30;
        let values = vec![w, w - 1, 0, w / 2, w, 1, w - 17];
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let bound = (w as u128) * sum * sum;
        assert_eq!(
            triple_self_convolution(&values, bound).unwrap(),
            naive_triple(&values)
        );
    }

    #[test]
    fn capacity_is_enforced() {
        let err = triple_self_convolution(&[1, 2, 3], 1u128 << 127);
        assert!(matches!(err, Err(Error::Budget(_))));
    }
}

//! Prime generation up to N and window-constrained prime sets.
//!
//! The sieve is a packed bit array over [0, N] with per-word prefix counts,
//! built segment by segment so large limits stay cache-friendly. Constrained
//! sets apply the exact membership test a < {ηp} < b to every prime.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadratic::{classify_point, Membership, QuadraticIrrational};
use crate::window::Window;

/// Hard cap on sieve limits; keeps triple-convolution counts inside u64.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 26;

const DEFAULT_SEGMENT: u64 = 1 << 16;

/// Packed bit set over [0, limit] with rank queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    limit: u64,
    words: Vec<u64>,
    prefix: Vec<u32>,
}

impl BitSet {
    fn from_words(limit: u64, words: Vec<u64>) -> Self {
        let mut prefix = Vec::with_capacity(words.len() + 1);
        let mut acc = 0u32;
        prefix.push(0);
        for w in &words {
            acc += w.count_ones();
            prefix.push(acc);
        }
        BitSet {
            limit,
            words,
            prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.limit && (self.words[(n / 64) as usize] >> (n % 64)) & 1 == 1
    }

    /// Number of members ≤ n.
    pub fn count_leq(&self, n: u64) -> u64 {
        if n >= self.limit {
            return self.count();
        }
        let word = (n / 64) as usize;
        let bit = n % 64;
        let partial = (self.words[word] & (!0u64 >> (63 - bit))).count_ones();
        u64::from(self.prefix[word]) + u64::from(partial)
    }

    pub fn count(&self) -> u64 {
        u64::from(*self.prefix.last().unwrap())
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.limit).filter(move |&n| self.contains(n))
    }
}

/// Primes up to `limit` as a bit array, with π(N) precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    bits: BitSet,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.bits.limit()
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.bits.contains(n)
    }

    /// π(limit).
    pub fn count(&self) -> u64 {
        self.bits.count()
    }

    /// π(n) for n ≤ limit.
    pub fn count_leq(&self, n: u64) -> u64 {
        self.bits.count_leq(n)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }
}

/// Sieve of Eratosthenes up to N (2 ≤ N ≤ 2²⁶), segmented internally.
pub fn primes_up_to(n: u64) -> Result<PrimeTable> {
    primes_up_to_with_segment(n, DEFAULT_SEGMENT)
}

/// Same sieve with an explicit segment length; the output is bit-exact
/// regardless of the segmentation.
pub fn primes_up_to_with_segment(n: u64, segment_len: u64) -> Result<PrimeTable> {
    if n < 2 {
        return Err(Error::domain("sieve limit must be at least 2"));
    }
    if n > MAX_SIEVE_LIMIT {
        return Err(Error::domain(format!(
            "sieve limit {n} exceeds the supported cap {MAX_SIEVE_LIMIT}"
        )));
    }
    let segment_len = segment_len.max(64);
    // base primes up to sqrt(n) by a plain sieve
    let root = n.isqrt();
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut i = 2u64;
    while i * i <= root {
        if base[i as usize] {
            let mut j = i * i;
            while j <= root {
                base[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let base_primes: Vec<u64> = (2..=root).filter(|&p| base[p as usize]).collect();

    let words_len = (n / 64 + 1) as usize;
    let mut words = vec![0u64; words_len];
    let mut start = 2u64;
    while start <= n {
        let end = (start + segment_len - 1).min(n);
        let mut seg = vec![true; (end - start + 1) as usize];
        for &p in &base_primes {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                seg[(j - start) as usize] = false;
                j += p;
            }
        }
        for (off, &is_p) in seg.iter().enumerate() {
            let v = start + off as u64;
            if is_p && v >= 2 {
                words[(v / 64) as usize] |= 1u64 << (v % 64);
            }
        }
        start = end + 1;
    }
    Ok(PrimeTable {
        bits: BitSet::from_words(n, words),
    })
}

/// The primes p ≤ N with a < {ηp} < b, membership decided exactly.
#[derive(Debug, Clone)]
pub struct ConstrainedSet {
    bits: BitSet,
    eta: QuadraticIrrational,
    window: Window,
}

impl ConstrainedSet {
    pub fn limit(&self) -> u64 {
        self.bits.limit()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.bits.contains(n)
    }

    /// π_𝒫(limit).
    pub fn count(&self) -> u64 {
        self.bits.count()
    }

    /// π_𝒫(n) for n ≤ limit.
    pub fn count_leq(&self, n: u64) -> u64 {
        self.bits.count_leq(n)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter()
    }

    pub fn eta(&self) -> &QuadraticIrrational {
        &self.eta
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }
}

/// Filter a prime table through the exact membership test.
pub fn constrained_set(
    primes: &PrimeTable,
    eta: &QuadraticIrrational,
    window: &Window,
) -> Result<ConstrainedSet> {
    let plist: Vec<u64> = primes.primes().collect();
    let memberships: Vec<Membership> = plist
        .par_iter()
        .map(|&p| classify_point(eta, p, window))
        .collect::<Result<_>>()?;
    let mut words = vec![0u64; (primes.limit() / 64 + 1) as usize];
    for (&p, m) in plist.iter().zip(&memberships) {
        if *m == Membership::Inside {
            words[(p / 64) as usize] |= 1u64 << (p % 64);
        }
    }
    Ok(ConstrainedSet {
        bits: BitSet::from_words(primes.limit(), words),
        eta: eta.clone(),
        window: window.clone(),
    })
}

/// π_𝒫(N)/π(N), the empirical density of the constrained set.
pub fn density(cset: &ConstrainedSet, primes: &PrimeTable) -> Result<f64> {
    let total = primes.count();
    if total == 0 {
        return Err(Error::domain("no primes below the limit"));
    }
    Ok(cset.count() as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::make_eta;

    fn trial_division_pi(n: u64) -> u64 {
        (2..=n)
            .filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .count() as u64
    }

    #[test]
    fn sieve_small() {
        let t = primes_up_to(10).unwrap();
        let ps: Vec<u64> = t.primes().collect();
        assert_eq!(ps, vec![2, 3, 5, 7]);
        assert_eq!(t.count(), 4);
        assert!(primes_up_to(1).is_err());
        assert!(primes_up_to(MAX_SIEVE_LIMIT + 1).is_err());
    }

    #[test]
    fn sieve_counts_match_trial_division() {
        assert_eq!(primes_up_to(100).unwrap().count(), 25);
        assert_eq!(primes_up_to(1000).unwrap().count(), 168);
        assert_eq!(trial_division_pi(100), 25);
        assert_eq!(trial_division_pi(1000), 168);
        // full agreement on the bit level
        let t = primes_up_to(2000).unwrap();
        for n in 0..=2000u64 {
            let by_trial = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(t.is_prime(n), by_trial, "n={n}");
        }
    }

    #[test]
    fn segmentation_is_invisible() {
        let reference = primes_up_to_with_segment(100_000, 1 << 16).unwrap();
        for seg in [64, 101, 997, 1 << 12, 1 << 20] {
            let other = primes_up_to_with_segment(100_000, seg).unwrap();
            assert_eq!(reference.bits, other.bits, "segment {seg}");
        }
    }

    #[test]
    fn rank_queries() {
        let t = primes_up_to(10_000).unwrap();
        let mut acc = 0;
        for n in 0..=10_000u64 {
            if t.is_prime(n) {
                acc += 1;
            }
            assert_eq!(t.count_leq(n), acc);
        }
    }

    #[test]
    fn constrained_examples() {
        let eta = make_eta(0, 2, 1).unwrap();
        let w = Window::parse("1/5..17/20").unwrap();
        let t = primes_up_to(10).unwrap();
        let c = constrained_set(&t, &eta, &w).unwrap();
        let members: Vec<u64> = c.members().collect();
        assert_eq!(members, vec![2, 3]);
        assert_eq!(c.count(), 2);
        assert!((density(&c, &t).unwrap() - 0.5).abs() < 1e-12);

        let wide = Window::parse("1/100..99/100").unwrap();
        let c = constrained_set(&t, &eta, &wide).unwrap();
        assert_eq!(c.members().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!((density(&c, &t).unwrap() - 1.0).abs() < 1e-12);

        let t2 = primes_up_to(2).unwrap();
        let c2 = constrained_set(&t2, &eta, &w).unwrap();
        assert_eq!(c2.members().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn constrained_subset_of_primes() {
        let eta = make_eta(0, 3, 1).unwrap();
        let w = Window::parse("1/3..2/3").unwrap();
        let t = primes_up_to(5000).unwrap();
        let c = constrained_set(&t, &eta, &w).unwrap();
        assert!(c.count() <= t.count());
        for p in c.members() {
            assert!(t.is_prime(p));
        }
    }

    #[test]
    fn density_tracks_window_width() {
        // |density(10^k) - 0.65| shrinks over k = 3, 4, 5 and the 10^5 value
        // sits within 5e-2 of the width
        let eta = make_eta(0, 2, 1).unwrap();
        let w = Window::parse("1/5..17/20").unwrap();
        let t = primes_up_to(100_000).unwrap();
        let c = constrained_set(&t, &eta, &w).unwrap();
        let dev = |n: u64| {
            let d = c.count_leq(n) as f64 / t.count_leq(n) as f64;
            (d - 0.65).abs()
        };
        assert!(dev(1_000) > dev(10_000));
        assert!(dev(10_000) > dev(100_000));
        assert!(dev(100_000) < 0.05);
    }
}

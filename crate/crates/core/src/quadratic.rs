//! Exact arithmetic for quadratic irrationalities η = (p₀+√d)/q₀:
//! periodic continued fractions, convergents, certified fixed-point
//! fractional parts {ηp}, and Dirichlet rational approximation.
//!
//! Everything on the certified path is integer arithmetic: √d is represented
//! by an integer square root at 2·bits fractional bits, and window membership
//! decisions are made on exact rational interval bounds, with precision
//! doubling until the decision is unambiguous.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::window::{fract, Window};

/// Highest precision classify_point will try before giving up.
pub const MAX_CLASSIFY_BITS: u32 = 4096;

/// η = (p0 + √d)/q0 in canonical form: d not a perfect square, q0 ≠ 0 and
/// q0 | (d − p0²), so the surd recurrence stays in integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    p0: i64,
    d: u64,
    q0: i64,
}

/// Construct η = (p0 + √d)/q0, normalizing so that q0 | (d − p0²).
pub fn make_eta(p0: i64, d: u64, q0: i64) -> Result<QuadraticIrrational> {
    if q0 == 0 {
        return Err(Error::domain("q0 must be nonzero"));
    }
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    let s = d.isqrt();
    if s * s == d {
        return Err(Error::Irrationality { d });
    }
    let (p0, d, q0) = if (i128::from(d) - i128::from(p0) * i128::from(p0))
        .rem_euclid(i128::from(q0).abs())
        == 0
    {
        (p0, d, q0)
    } else {
        // scale numerator and denominator by |q0|; the value is unchanged
        let abs_q = i128::from(q0).abs();
        let p = i128::from(p0) * abs_q;
        let dd = u128::from(d) * (abs_q * abs_q) as u128;
        let q = i128::from(q0) * abs_q;
        let p = i64::try_from(p).map_err(|_| Error::domain("p0 overflows after normalization"))?;
        let dd = u64::try_from(dd).map_err(|_| Error::domain("d overflows after normalization"))?;
        let q = i64::try_from(q).map_err(|_| Error::domain("q0 overflows after normalization"))?;
        (p, dd, q)
    };
    debug_assert_eq!(
        (i128::from(d) - i128::from(p0) * i128::from(p0)).rem_euclid(i128::from(q0).abs()),
        0
    );
    Ok(QuadraticIrrational { p0, d, q0 })
}

impl QuadraticIrrational {
    pub fn p0(&self) -> i64 {
        self.p0
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn q0(&self) -> i64 {
        self.q0
    }

    /// Parse the `"p0,d,q0"` form used in configs and on the CLI.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::domain(format!("eta {s:?} must look like \"p0,d,q0\"")));
        }
        let p0 = parts[0]
            .parse()
            .map_err(|_| Error::domain(format!("bad p0 in eta {s:?}")))?;
        let d = parts[1]
            .parse()
            .map_err(|_| Error::domain(format!("bad d in eta {s:?}")))?;
        let q0 = parts[2]
            .parse()
            .map_err(|_| Error::domain(format!("bad q0 in eta {s:?}")))?;
        make_eta(p0, d, q0)
    }

    pub fn to_f64(&self) -> f64 {
        (self.p0 as f64 + (self.d as f64).sqrt()) / self.q0 as f64
    }

    /// Exact rational lower bound of η at `bits` fractional bits. The true
    /// value lies in [value, value + 1/(|q0|·2^bits)) for q0 > 0 and in
    /// (value − 1/(|q0|·2^bits), value] for q0 < 0.
    fn fixed_point(&self, bits: u32) -> BigRational {
        let s = sqrt_fixed(self.d, bits);
        let num = BigInt::from(self.p0) * (BigInt::one() << bits) + BigInt::from(s);
        let den = BigInt::from(self.q0) << bits;
        BigRational::new(num, den)
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.p0, self.d, self.q0)
    }
}

/// floor(√d · 2^bits) computed as an integer square root of d·2^(2·bits).
pub fn sqrt_fixed(d: u64, bits: u32) -> BigUint {
    (BigUint::from(d) << (2 * bits)).sqrt()
}

/// Compare √d with an exact rational, exactly.
pub fn cmp_sqrt(d: u64, x: &BigRational) -> Ordering {
    if !x.is_positive() {
        return Ordering::Greater;
    }
    let lhs = BigInt::from(d) * x.denom() * x.denom();
    let rhs = x.numer() * x.numer();
    lhs.cmp(&rhs)
}

/// Eventually periodic continued fraction of a quadratic irrationality.
/// `preperiod` may be empty (purely periodic expansions) and a₀ may be any
/// integer; every later partial quotient is ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

impl ContinuedFraction {
    /// Partial quotient a_k, cycling through the period.
    pub fn quotient(&self, k: usize) -> i64 {
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }
}

/// Expand η into its periodic continued fraction by iterating the surd
/// recurrence on complete quotients (P + √d)/Q until a state repeats.
pub fn cf_expand(eta: &QuadraticIrrational, max_steps: usize) -> Result<ContinuedFraction> {
    if max_steps < 2 {
        return Err(Error::domain("max_steps must be at least 2"));
    }
    let d = i128::from(eta.d);
    let sq = i128::from(eta.d.isqrt());
    let mut p = i128::from(eta.p0);
    let mut q = i128::from(eta.q0);
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut quotients: Vec<i64> = Vec::new();
    for step in 0..max_steps {
        if let Some(&start) = seen.get(&(p, q)) {
            let period = quotients.split_off(start);
            return Ok(ContinuedFraction {
                preperiod: quotients,
                period,
            });
        }
        seen.insert((p, q), step);
        let a = floor_surd(p, q, sq);
        quotients.push(
            i64::try_from(a).map_err(|_| Error::domain("partial quotient overflows i64"))?,
        );
        let p_next = a
            .checked_mul(q)
            .and_then(|aq| aq.checked_sub(p))
            .ok_or_else(|| Error::domain("surd recurrence overflow"))?;
        let q_next = (d - p_next * p_next) / q;
        debug_assert_eq!((d - p_next * p_next) % q, 0);
        debug_assert_ne!(q_next, 0, "d is not a perfect square");
        p = p_next;
        q = q_next;
    }
    Err(Error::budget(format!(
        "no period within {max_steps} steps; raise max_steps"
    )))
}

/// floor((P + √d)/Q) using sq = floor(√d); exact because √d is irrational.
fn floor_surd(p: i128, q: i128, sq: i128) -> i128 {
    if q > 0 {
        (p + sq).div_euclid(q)
    } else {
        // floor(x/q) = -ceil(x/|q|) = -(floor(x/|q|) + 1) for irrational x
        -((p + sq).div_euclid(-q) + 1)
    }
}

/// Convergent D/Q of a continued fraction, with θ₂ = (η − D/Q)·Q² ∈ (−1,1).
#[derive(Debug, Clone)]
pub struct Convergent {
    pub d: BigInt,
    pub q: BigInt,
    pub theta2: f64,
}

/// First `count` convergents via the standard recurrence
/// D_k = a_k·D_{k−1} + D_{k−2}, Q_k = a_k·Q_{k−1} + Q_{k−2}.
pub fn convergents(
    eta: &QuadraticIrrational,
    cf: &ContinuedFraction,
    count: usize,
) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    let mut out = Vec::with_capacity(count);
    let (mut d_prev, mut d_cur) = (BigInt::one(), BigInt::from(cf.quotient(0)));
    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    out.push(make_convergent(eta, &d_cur, &q_cur));
    for k in 1..count {
        let a = BigInt::from(cf.quotient(k));
        let d_next = &a * &d_cur + &d_prev;
        let q_next = &a * &q_cur + &q_prev;
        d_prev = std::mem::replace(&mut d_cur, d_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        out.push(make_convergent(eta, &d_cur, &q_cur));
    }
    Ok(out)
}

fn make_convergent(eta: &QuadraticIrrational, d: &BigInt, q: &BigInt) -> Convergent {
    Convergent {
        d: d.clone(),
        q: q.clone(),
        theta2: theta2_of(eta, d, q),
    }
}

fn theta2_of(eta: &QuadraticIrrational, d: &BigInt, q: &BigInt) -> f64 {
    let bits = (2 * q.bits() as u32 + 64).max(128);
    let approx = eta.fixed_point(bits);
    let frac = BigRational::new(d.clone(), q.clone());
    let qq = BigRational::from_integer(q * q);
    ((approx - frac) * qq).to_f64().unwrap_or(f64::NAN)
}

/// Exact check that |η − D/Q| < 1/Q², entirely in integer arithmetic.
pub fn convergent_certified(eta: &QuadraticIrrational, d: &BigInt, q: &BigInt) -> bool {
    // bounds on η translate to bounds on √d = η·q0 − p0
    let dq = BigRational::new(d.clone(), q.clone());
    let qq = BigRational::from_integer(q * q);
    let lo = &dq - BigRational::one() / &qq;
    let hi = &dq + BigRational::one() / &qq;
    let q0 = BigRational::from_i64(eta.q0).unwrap();
    let p0 = BigRational::from_i64(eta.p0).unwrap();
    let (slo, shi) = if eta.q0 > 0 {
        (&lo * &q0 - &p0, &hi * &q0 - &p0)
    } else {
        (&hi * &q0 - &p0, &lo * &q0 - &p0)
    };
    cmp_sqrt(eta.d, &slo) == Ordering::Greater && cmp_sqrt(eta.d, &shi) == Ordering::Less
}

/// The convergent with the largest Q ≤ τ₁, plus the measured ratio Q/τ₁.
pub fn best_convergent(eta: &QuadraticIrrational, tau1: u64) -> Result<(Convergent, f64)> {
    if tau1 < 1 {
        return Err(Error::domain("tau1 must be at least 1"));
    }
    let cf = cf_expand(eta, 1 << 20)?;
    let tau = BigInt::from(tau1);
    let (mut d_prev, mut d_cur) = (BigInt::one(), BigInt::from(cf.quotient(0)));
    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    let mut best = (d_cur.clone(), q_cur.clone());
    let mut k = 0usize;
    while q_cur <= tau {
        best = (d_cur.clone(), q_cur.clone());
        k += 1;
        let a = BigInt::from(cf.quotient(k));
        let d_next = &a * &d_cur + &d_prev;
        let q_next = &a * &q_cur + &q_prev;
        d_prev = std::mem::replace(&mut d_cur, d_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
    let c_measured = best.1.to_f64().unwrap() / tau1 as f64;
    Ok((make_convergent(eta, &best.0, &best.1), c_measured))
}

/// Certified fixed-point value of {ηp}: the true fractional part lies within
/// `radius` of `value` on the circle (on the side recorded by `upper_side`).
#[derive(Debug, Clone)]
pub struct CertifiedFrac {
    value: BigRational,
    radius: BigRational,
    bits: u32,
    upper_side: bool,
}

impl CertifiedFrac {
    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Interval [lo, hi] (before circle reduction) certain to contain {ηp}+k
    /// for some integer k ∈ {0, ±1}.
    pub fn interval(&self) -> (BigRational, BigRational) {
        if self.upper_side {
            (self.value.clone(), &self.value + &self.radius)
        } else {
            (&self.value - &self.radius, self.value.clone())
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap()
    }
}

/// Certified {ηp} at `bits` fractional bits; radius ≤ p·2^(1−bits)/|q0|.
/// No floating point is involved.
pub fn frac_eta_p(eta: &QuadraticIrrational, p: u64, bits: u32) -> Result<CertifiedFrac> {
    if p < 1 {
        return Err(Error::domain("p must be at least 1"));
    }
    if bits < 64 {
        return Err(Error::domain("bits must be at least 64"));
    }
    let s = sqrt_fixed(eta.d, bits);
    // eta*p = p*(p0*2^bits + s + eps) / (q0*2^bits), 0 <= eps < 1
    let num = BigInt::from(p) * (BigInt::from(eta.p0) * (BigInt::one() << bits) + BigInt::from(s));
    let den = BigInt::from(eta.q0) << bits;
    let x = BigRational::new(num, den);
    let value = fract(&x);
    let radius = BigRational::new(
        BigInt::from(p),
        BigInt::from(eta.q0.unsigned_abs()) << bits,
    );
    Ok(CertifiedFrac {
        value,
        radius,
        bits,
        upper_side: eta.q0 > 0,
    })
}

/// Window membership of {ηp}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
}

/// Exact membership test a < {ηp} < b, starting at 128 fractional bits and
/// doubling precision while the certified interval straddles a boundary.
/// Terminates because {ηp} is irrational while a, b are rational.
pub fn classify_point(eta: &QuadraticIrrational, p: u64, window: &Window) -> Result<Membership> {
    classify_point_from(eta, p, window, 128)
}

/// [`classify_point`] with an explicit starting precision (the decision is
/// invariant under the choice).
pub fn classify_point_from(
    eta: &QuadraticIrrational,
    p: u64,
    window: &Window,
    start_bits: u32,
) -> Result<Membership> {
    let mut bits = start_bits.max(64);
    loop {
        let cf = frac_eta_p(eta, p, bits)?;
        let (lo, hi) = cf.interval();
        if let Some(m) = arc_vs_window(&lo, &hi, window) {
            return Ok(m);
        }
        bits = bits
            .checked_mul(2)
            .filter(|&b| b <= MAX_CLASSIFY_BITS)
            .ok_or_else(|| {
                Error::budget(format!(
                    "classify_point undecided at {MAX_CLASSIFY_BITS} bits for p={p}"
                ))
            })?;
    }
}

/// Decide whether the circle arc [lo, hi] (hi − lo < 1) lies inside (a,b)
/// or misses it entirely; `None` if it straddles a boundary.
fn arc_vs_window(lo: &BigRational, hi: &BigRational, window: &Window) -> Option<Membership> {
    let len = hi - lo;
    debug_assert!(len < BigRational::one() && !len.is_negative());
    let l = fract(lo);
    let h = &l + len;
    let (a, b) = (window.a(), window.b());
    if h <= BigRational::one() {
        if &l > a && &h < b {
            Some(Membership::Inside)
        } else if &h <= a || &l >= b {
            Some(Membership::Outside)
        } else {
            None
        }
    } else {
        // arc wraps through 0; it cannot fit inside (a,b) ⊂ (0,1)
        let h = h - BigRational::one();
        if &l >= b && &h <= a {
            Some(Membership::Outside)
        } else {
            None
        }
    }
}

/// Dirichlet approximation t = d/q + θ₁/(qτ) of an exact rational t,
/// with 1 ≤ q ≤ τ, gcd(d,q) = 1 and |θ₁| < 1.
#[derive(Debug, Clone)]
pub struct RationalApprox {
    pub d: i128,
    pub q: i128,
    pub theta1: Ratio<i128>,
    pub tau: u64,
}

impl RationalApprox {
    /// Exact verification of the certificate, in rational arithmetic:
    /// gcd(d,q)=1, 1 ≤ q ≤ τ and q·τ·|t − d/q| < 1.
    pub fn verify(&self, t: &Ratio<i128>) -> bool {
        if self.q < 1 || self.q > self.tau as i128 {
            return false;
        }
        if self.d.gcd(&self.q) != 1 {
            return false;
        }
        let err = t - Ratio::new(self.d, self.q);
        let lhs = err.abs() * Ratio::from_integer(self.q) * Ratio::from_integer(self.tau as i128);
        lhs < Ratio::one()
    }
}

/// Best rational approximation with denominator ≤ τ, from the continued
/// fraction of t. θ₁ = (t − d/q)·q·τ is exact.
pub fn rational_approx(t: &Ratio<i128>, tau: u64) -> Result<RationalApprox> {
    if tau < 1 {
        return Err(Error::domain("tau must be at least 1"));
    }
    if t.is_negative() || *t >= Ratio::one() {
        return Err(Error::domain("t must lie in [0,1)"));
    }
    let tau_i = tau as i128;
    let (mut n, mut den) = (*t.numer(), *t.denom());
    // convergents h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1
    let (mut d_prev, mut q_prev) = (0i128, 1i128);
    let (mut d_cur, mut q_cur) = (1i128, 0i128);
    // walk the (finite) continued fraction of t, keeping the last
    // convergent whose denominator stays within tau
    loop {
        let a = n.div_euclid(den);
        let r = n - a * den;
        let d_next = a * d_cur + d_prev;
        let q_next = a * q_cur + q_prev;
        if q_next > tau_i {
            break;
        }
        d_prev = std::mem::replace(&mut d_cur, d_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        if r == 0 {
            break; // t reached exactly
        }
        n = den;
        den = r;
    }
    let theta1 = (t - Ratio::new(d_cur, q_cur)) * Ratio::from_integer(q_cur * tau_i);
    let approx = RationalApprox {
        d: d_cur,
        q: q_cur,
        theta1,
        tau,
    };
    debug_assert!(approx.verify(t));
    Ok(approx)
}

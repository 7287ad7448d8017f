//! Exact computation of the ternary representation counts J₃,₁(N) and
//! I₃,₁(N), the exponential sums S and S₀, the discretized counting
//! integral, container-sandwich bounds, and minor-arc diagnostics.
//!
//! Counting goes through the exact NTT convolution: the cube of the
//! indicator transform evaluated at index N is the number of ordered prime
//! triples summing to N. Sandwich bounds use 2³⁰ fixed-point weights with
//! directed rounding, so the computed J₁ underestimates and J₂ overestimates
//! rigorously.

use num_complex::Complex64;
use num_rational::Ratio;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ntt::triple_self_convolution;
use crate::quadratic::{frac_eta_p, rational_approx, QuadraticIrrational};
use crate::sieve::{constrained_set, primes_up_to, ConstrainedSet, PrimeTable};
use crate::window::{Container, Window};

/// Fixed-point scale for container weights.
pub const WEIGHT_SCALE_BITS: u32 = 30;
pub const WEIGHT_ONE: u32 = 1 << WEIGHT_SCALE_BITS;

/// Prime-supported weights over [0, limit], scaled by 2³⁰.
/// Binary indicators use exactly 0 and 2³⁰.
#[derive(Debug, Clone)]
pub struct WeightedIndicator {
    limit: u64,
    weights: Vec<u32>,
}

impl WeightedIndicator {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 0 || w == WEIGHT_ONE)
    }

    /// 0/1 indicator of all primes up to the table limit.
    pub fn from_primes(primes: &PrimeTable) -> Self {
        let mut weights = vec![0u32; (primes.limit() + 1) as usize];
        for p in primes.primes() {
            weights[p as usize] = WEIGHT_ONE;
        }
        WeightedIndicator {
            limit: primes.limit(),
            weights,
        }
    }

    /// 0/1 indicator of the constrained prime set.
    pub fn from_constrained(cset: &ConstrainedSet) -> Self {
        let mut weights = vec![0u32; (cset.limit() + 1) as usize];
        for p in cset.members() {
            weights[p as usize] = WEIGHT_ONE;
        }
        WeightedIndicator {
            limit: cset.limit(),
            weights,
        }
    }

    /// Directed rounding mode for container weights.
    fn container_weights(
        primes: &PrimeTable,
        eta: &QuadraticIrrational,
        container: &Container,
        round_up: bool,
    ) -> Result<Self> {
        let plist: Vec<u64> = primes.primes().collect();
        let scaled: Vec<(u64, u32)> = plist
            .par_iter()
            .map(|&p| -> Result<(u64, u32)> {
                let cf = frac_eta_p(eta, p, 128)?;
                let (lo, hi) = cf.interval();
                let (arc_min, arc_max) = container.range_on_arc(&lo, &hi);
                let v = if round_up { arc_max } else { arc_min };
                let num = v.numer() * num_bigint::BigInt::from(WEIGHT_ONE);
                let q = if round_up {
                    num_integer::Integer::div_ceil(&num, v.denom())
                } else {
                    num_integer::Integer::div_floor(&num, v.denom())
                };
                let w = num_traits::ToPrimitive::to_i64(&q).unwrap_or(i64::from(WEIGHT_ONE));
                Ok((p, w.clamp(0, i64::from(WEIGHT_ONE)) as u32))
            })
            .collect::<Result<_>>()?;
        let mut weights = vec![0u32; (primes.limit() + 1) as usize];
        for (p, w) in scaled {
            weights[p as usize] = w;
        }
        Ok(WeightedIndicator {
            limit: primes.limit(),
            weights,
        })
    }
}

fn coefficient_bound(weights: &[u32]) -> u128 {
    let sum: u128 = weights.iter().map(|&w| u128::from(w)).sum();
    let max = u128::from(*weights.iter().max().unwrap_or(&0));
    max.saturating_mul(sum).saturating_mul(sum).max(1)
}

/// All triple counts at once: out[s] = #(ordered prime triples summing to s)
/// for s in [0, 3·limit], from a 0/1 indicator.
pub fn ternary_counts_all(ind: &WeightedIndicator) -> Result<Vec<u64>> {
    if !ind.is_binary() {
        return Err(Error::domain(
            "ternary counts need a 0/1 indicator; use sandwich_counts for weights",
        ));
    }
    let values: Vec<u64> = ind
        .weights
        .iter()
        .map(|&w| u64::from(w >> WEIGHT_SCALE_BITS))
        .collect();
    let bound = coefficient_bound(&ind.weights) >> (3 * WEIGHT_SCALE_BITS);
    let conv = triple_self_convolution(&values, bound.max(1))?;
    Ok(conv.into_iter().map(|c| c as u64).collect())
}

/// Raw scaled triple sums Σ w₁w₂w₃ (scale 2⁹⁰) for a weighted indicator.
pub fn weighted_triple_all(ind: &WeightedIndicator) -> Result<Vec<u128>> {
    let values: Vec<u64> = ind.weights.iter().map(|&w| u64::from(w)).collect();
    triple_self_convolution(&values, coefficient_bound(&ind.weights))
}

/// Exact count of ordered triples (p₁,p₂,p₃) with p₁+p₂+p₃ = n.
pub fn ternary_count(ind: &WeightedIndicator, n: u64) -> Result<u64> {
    if n > ind.limit {
        return Err(Error::domain(format!(
            "n={n} exceeds the indicator limit {}",
            ind.limit
        )));
    }
    Ok(ternary_counts_all(ind)?[n as usize])
}

/// Quadratic-time oracle for [`ternary_count`]: double loop over (p₁,p₂)
/// with a membership lookup of n−p₁−p₂.
pub fn ternary_count_brute(ind: &WeightedIndicator, n: u64) -> Result<u64> {
    if !ind.is_binary() {
        return Err(Error::domain("brute counting needs a 0/1 indicator"));
    }
    if n > 10_000 {
        return Err(Error::budget("brute counting is capped at n = 10^4"));
    }
    if n > ind.limit {
        return Err(Error::domain(format!(
            "n={n} exceeds the indicator limit {}",
            ind.limit
        )));
    }
    let members: Vec<u64> = (0..=ind.limit.min(n))
        .filter(|&v| ind.weights[v as usize] != 0)
        .collect();
    let mut count = 0u64;
    for &p1 in &members {
        if p1 > n {
            break;
        }
        for &p2 in &members {
            if p1 + p2 > n {
                break;
            }
            let p3 = n - p1 - p2;
            if p3 <= ind.limit && ind.weights[p3 as usize] != 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// S(x) = Σ_{p ≤ N} e^{2πixp} over a prime table.
pub fn exp_sum(primes: &PrimeTable, x: f64) -> Complex64 {
    exp_sum_over(primes.primes(), x)
}

/// S₀(x) = Σ_{p ≤ N} ψ₀(ηp)·e^{2πixp} over a constrained set.
pub fn constrained_exp_sum(cset: &ConstrainedSet, x: f64) -> Complex64 {
    exp_sum_over(cset.members(), x)
}

fn exp_sum_over(ps: impl Iterator<Item = u64>, x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in ps {
        // reduce the phase to keep precision at large p·x
        let phase = (x * p as f64).fract();
        let (s, c) = (2.0 * PI * phase).sin_cos();
        acc += Complex64::new(c, s);
    }
    acc
}

/// Discretization of ∫₀¹S₀(x)³e^{−2πixN}dx at M = 3N+1 points; alias-free,
/// so after rounding it must reproduce the exact count.
pub fn dft_count_check(ind: &WeightedIndicator, n: u64) -> Result<u64> {
    if !ind.is_binary() {
        return Err(Error::domain("dft check needs a 0/1 indicator"));
    }
    if n > ind.limit {
        return Err(Error::domain(format!(
            "n={n} exceeds the indicator limit {}",
            ind.limit
        )));
    }
    let m = (3 * n + 1) as usize;
    let roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect();
    let members: Vec<usize> = (0..=n as usize)
        .filter(|&v| ind.weights[v] != 0)
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let mut s = Complex64::new(0.0, 0.0);
        for &p in &members {
            s += roots[(j * p) % m];
        }
        acc += s * s * s * roots[(j * n as usize) % m].conj();
    }
    let value = acc / m as f64;
    let rounded = value.re.round();
    let residual = (value.re - rounded).abs().max(value.im.abs());
    if residual > 1e-3 {
        return Err(Error::numerical(format!(
            "dft count residual {residual:.3e} at n={n}"
        )));
    }
    if rounded < 0.0 {
        return Err(Error::numerical(format!("negative dft count at n={n}")));
    }
    Ok(rounded as u64)
}

/// One exact count with rigorous container bounds around it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountResult {
    pub n: u64,
    /// J₃,₁(n): triples from the constrained set.
    pub j: u64,
    /// I₃,₁(n): triples from all primes.
    pub i: u64,
    /// Lower sandwich bound J₁ (directed rounding, ≤ J).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j1: Option<f64>,
    /// Upper sandwich bound J₂ (directed rounding, ≥ J).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j2: Option<f64>,
}

fn u128_to_f64_down(x: u128) -> f64 {
    let f = x as f64;
    if f as u128 > x {
        f64::from_bits(f.to_bits() - 1)
    } else {
        f
    }
}

fn u128_to_f64_up(x: u128) -> f64 {
    let f = x as f64;
    if (f as u128) < x {
        f64::from_bits(f.to_bits() + 1)
    } else {
        f
    }
}

/// J with the container sandwich J₁ ≤ J ≤ J₂ for ψ₁/ψ₂ built from
/// (window, Δ, r). ψ₁ weights round down on the 2⁻³⁰ grid, ψ₂ weights round
/// up, so the inequalities are exact.
pub fn sandwich_counts(
    n: u64,
    eta: &QuadraticIrrational,
    window: &Window,
    delta: &num_rational::BigRational,
    r: u32,
) -> Result<CountResult> {
    let two = num_rational::BigRational::from_integer(2.into());
    if window.width() <= delta * &two {
        return Err(Error::domain("sandwich requires b - a > 2*delta"));
    }
    let primes = primes_up_to(n)?;
    let cset = constrained_set(&primes, eta, window)?;
    sandwich_from_tables(&primes, &cset, eta, window, delta, r, n)
}

/// [`sandwich_counts`] over prebuilt tables (shared across sweep rows).
pub fn sandwich_from_tables(
    primes: &PrimeTable,
    cset: &ConstrainedSet,
    eta: &QuadraticIrrational,
    window: &Window,
    delta: &num_rational::BigRational,
    r: u32,
    n: u64,
) -> Result<CountResult> {
    let psi1 = Container::lower(window, delta, r)?;
    let psi2 = Container::upper(window, delta, r)?;
    let w1 = WeightedIndicator::container_weights(primes, eta, &psi1, false)?;
    let w2 = WeightedIndicator::container_weights(primes, eta, &psi2, true)?;
    let j = ternary_count(&WeightedIndicator::from_constrained(cset), n)?;
    let i = ternary_count(&WeightedIndicator::from_primes(primes), n)?;
    let j1_scaled = weighted_triple_all(&w1)?[n as usize];
    let j2_scaled = weighted_triple_all(&w2)?[n as usize];
    let j_scaled = u128::from(j) << (3 * WEIGHT_SCALE_BITS);
    if !(j1_scaled <= j_scaled && j_scaled <= j2_scaled) {
        return Err(Error::numerical(format!(
            "sandwich violated at n={n}: J1={j1_scaled} J<<90={j_scaled} J2={j2_scaled}"
        )));
    }
    let scale = (1u128 << (3 * WEIGHT_SCALE_BITS)) as f64;
    Ok(CountResult {
        n,
        j,
        i,
        j1: Some(u128_to_f64_down(j1_scaled) / scale),
        j2: Some(u128_to_f64_up(j2_scaled) / scale),
    })
}

/// Minor-arc scan report. `ratio` compares the observed minor-arc maximum of
/// |S| with N^{1/2}τ^{1/2}(ln N)⁴; it is a diagnostic, not an assertion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcReport {
    pub n: u64,
    pub tau: u64,
    pub threshold_q: u64,
    pub samples: u64,
    pub seed: u64,
    pub e1_count: u64,
    pub e2_count: u64,
    /// max |S(t)| over sampled t ∈ E₂ (0 when E₂ is empty).
    pub max_s_minor: f64,
    /// max |S(t+mη)| over sampled t ∈ E₁ and 1 ≤ |m| ≤ 3.
    pub max_s_shifted_e1: f64,
    pub bound_value: f64,
    pub ratio: f64,
    pub ratio_shifted: f64,
}

/// Sample rational points t = j/(6N+1), classify them into E₁ (q ≤ ln^A N)
/// and E₂ (q > ln^A N) via their exact Dirichlet approximation with
/// τ = max(1, ⌊N·ln^{−B}N⌋), and record exponential-sum maxima.
pub fn minor_arc_scan(
    primes: &PrimeTable,
    eta: &QuadraticIrrational,
    a_exp: f64,
    b_exp: f64,
    samples: u64,
    seed: u64,
) -> Result<ArcReport> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let n = primes.limit();
    if n < 100 {
        return Err(Error::domain("arc scan requires N >= 100"));
    }
    let ln_n = (n as f64).ln();
    let tau_f = (n as f64) * ln_n.powf(-b_exp);
    let tau = if tau_f >= (1u64 << 62) as f64 {
        1u64 << 62
    } else {
        (tau_f.floor() as u64).max(1)
    };
    let threshold_f = ln_n.powf(a_exp);
    let threshold_q = if threshold_f >= u64::MAX as f64 {
        u64::MAX
    } else {
        (threshold_f.floor() as u64).max(1)
    };

    let plist: Vec<u64> = primes.primes().collect();
    // fractional parts of mη for the shifted sums on E₁
    let mut shifts = Vec::new();
    for m in 1..=3u64 {
        let v = frac_eta_p(eta, m, 128)?.to_f64();
        shifts.push(v);
        shifts.push(1.0 - v); // {−mη} = 1 − {mη}
    }

    let grid = 6 * n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e1_count = 0u64;
    let mut e2_count = 0u64;
    let mut max_s_minor = 0.0f64;
    let mut max_s_shifted = 0.0f64;
    for _ in 0..samples {
        let j = rng.next_u64() % grid;
        let t = Ratio::new(j as i128, grid as i128);
        let approx = rational_approx(&t, tau)?;
        if !approx.verify(&t) {
            return Err(Error::numerical(format!(
                "dirichlet certificate failed at j={j}"
            )));
        }
        let x = j as f64 / grid as f64;
        if approx.q as u64 <= threshold_q {
            e1_count += 1;
            for &s in &shifts {
                max_s_shifted = max_s_shifted.max(exp_sum_over(plist.iter().copied(), x + s).norm());
            }
        } else {
            e2_count += 1;
            max_s_minor = max_s_minor.max(exp_sum_over(plist.iter().copied(), x).norm());
        }
    }
    let bound_value = (n as f64).sqrt() * (tau as f64).sqrt() * ln_n.powi(4);
    Ok(ArcReport {
        n,
        tau,
        threshold_q,
        samples,
        seed,
        e1_count,
        e2_count,
        max_s_minor,
        max_s_shifted_e1: max_s_shifted,
        bound_value,
        ratio: max_s_minor / bound_value,
        ratio_shifted: max_s_shifted / bound_value,
    })
}

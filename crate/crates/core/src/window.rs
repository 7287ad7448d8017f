//! The window indicator ψ₀, its Fourier coefficients, smoothed container
//! functions, and the triple cyclic self-convolution of ψ₀.
//!
//! A [`Window`] is an exact rational interval (a,b) ⊂ (0,1). ψ₀ is its
//! periodic indicator. A [`Container`] realizes a smoothed indicator as an
//! r-fold box convolution (an order-r B-spline ramp of total width Δ), which
//! sandwiches ψ₀ from below or above depending on how its core [α,β] is
//! placed relative to (a,b).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parse an exact rational from `"num/den"` (or a bare integer).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let make = |num: &str, den: &str| -> Result<BigRational> {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad rational numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::domain(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(n, d))
    };
    match s.split_once('/') {
        Some((n, d)) => make(n, d),
        None => make(s, "1"),
    }
}

fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Open rational interval (a,b) with 0 < a < b < 1; the constraint on {ηp}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    a: BigRational,
    b: BigRational,
}

impl Window {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        if !(a.is_positive() && a < b && b < BigRational::one()) {
            return Err(Error::domain(format!(
                "window must satisfy 0 < a < b < 1, got a={}, b={}",
                rational_to_string(&a),
                rational_to_string(&b)
            )));
        }
        Ok(Window { a, b })
    }

    /// Parse `"1/5..17/20"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::domain(format!("window {s:?} must look like \"1/5..17/20\"")))?;
        Window::new(parse_rational(a)?, parse_rational(b)?)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// b − a, the window width μ.
    pub fn width(&self) -> BigRational {
        &self.b - &self.a
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64().unwrap()
    }

    pub fn width_f64(&self) -> f64 {
        self.b_f64() - self.a_f64()
    }

    pub fn to_string_exact(&self) -> String {
        format!(
            "{}..{}",
            rational_to_string(&self.a),
            rational_to_string(&self.b)
        )
    }
}

/// Fractional part of an exact rational, in [0,1).
pub(crate) fn fract(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// ψ₀ at an exact rational point: 1 iff {x} ∈ (a,b), 0 at the boundary.
pub fn psi0_rational(window: &Window, x: &BigRational) -> u8 {
    let f = fract(x);
    u8::from(f > *window.a() && f < *window.b())
}

/// ψ₀ at an f64 point. The f64 is converted exactly, so the decision matches
/// the rational definition for every representable input.
pub fn psi0(window: &Window, x: f64) -> u8 {
    let r = BigRational::from_f64(x).expect("finite x");
    psi0_rational(window, &r)
}

/// m-th Fourier coefficient of ψ₀: c(0)=b−a, else e^{−πim(a+b)}·sin(πm(b−a))/(πm).
pub fn box_coeff(window: &Window, m: i64) -> Complex64 {
    if m == 0 {
        return Complex64::new(window.width_f64(), 0.0);
    }
    let mf = m as f64;
    let sum = window.a_f64() + window.b_f64();
    let width = window.width_f64();
    let magnitude = (PI * mf * width).sin() / (PI * mf);
    Complex64::from_polar(1.0, -PI * mf * sum) * magnitude
}

/// Smoothed periodic indicator: the box [α,β] convolved r times with a
/// normalized box kernel of width Δ/r. Piecewise polynomial of degree r,
/// equal to 1 on [α+Δ/2, β−Δ/2] and 0 outside (α−Δ/2, β+Δ/2).
#[derive(Debug, Clone)]
pub struct Container {
    alpha: BigRational,
    beta: BigRational,
    delta: BigRational,
    r: u32,
}

impl Container {
    pub fn new(alpha: BigRational, beta: BigRational, delta: BigRational, r: u32) -> Result<Self> {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        if !(delta.is_positive() && delta < half) {
            return Err(Error::domain("container requires 0 < delta < 1/2"));
        }
        let len = &beta - &alpha;
        if len < delta {
            return Err(Error::domain("container requires beta - alpha >= delta"));
        }
        if len > BigRational::one() - &delta {
            return Err(Error::domain("container requires beta - alpha <= 1 - delta"));
        }
        if r == 0 {
            return Err(Error::domain("container requires r >= 1"));
        }
        Ok(Container {
            alpha,
            beta,
            delta,
            r,
        })
    }

    /// ψ₁ for a window: core pulled in by Δ/2 on both sides, so ψ₁ ≤ ψ₀.
    pub fn lower(window: &Window, delta: &BigRational, r: u32) -> Result<Self> {
        let half = delta / BigRational::from_integer(BigInt::from(2));
        Container::new(window.a() + &half, window.b() - &half, delta.clone(), r)
    }

    /// ψ₂ for a window: core pushed out by Δ/2 on both sides, so ψ₂ ≥ ψ₀.
    pub fn upper(window: &Window, delta: &BigRational, r: u32) -> Result<Self> {
        let half = delta / BigRational::from_integer(BigInt::from(2));
        Container::new(window.a() - &half, window.b() + &half, delta.clone(), r)
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// CDF of the smoothing kernel (sum of r uniforms on (−Δ/2r, Δ/2r)),
    /// evaluated exactly. Irwin–Hall CDF rescaled to the kernel support.
    fn kernel_cdf_rational(&self, t: &BigRational) -> BigRational {
        let r = self.r;
        let rq = BigRational::from_integer(BigInt::from(r));
        // map t to the Irwin-Hall variable s = t*r/delta + r/2 in [0, r]
        let s = t * &rq / &self.delta + &rq / BigRational::from_integer(BigInt::from(2));
        irwin_hall_cdf_rational(&s, r)
    }

    /// Exact evaluation of ψ at a rational point, periodic mod 1.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        // support has width beta-alpha+delta <= 1, so exactly one period
        // shift contributes; reduce x into [alpha-delta/2, alpha-delta/2+1)
        let half = &self.delta / BigRational::from_integer(BigInt::from(2));
        let lo = &self.alpha - &half;
        let y = x - (x - &lo).floor();
        self.kernel_cdf_rational(&(&y - &self.alpha)) - self.kernel_cdf_rational(&(&y - &self.beta))
    }

    /// Same piecewise polynomial in double precision.
    pub fn eval(&self, x: f64) -> f64 {
        let alpha = self.alpha.to_f64().unwrap();
        let beta = self.beta.to_f64().unwrap();
        let delta = self.delta.to_f64().unwrap();
        let lo = alpha - delta / 2.0;
        let y = x - (x - lo).floor();
        let cdf = |t: f64| irwin_hall_cdf_f64(t * self.r as f64 / delta + self.r as f64 / 2.0, self.r);
        (cdf(y - alpha) - cdf(y - beta)).clamp(0.0, 1.0)
    }

    /// m-th Fourier coefficient: box coefficient of [α,β] times sinc(πmΔ/r)^r.
    pub fn coeff(&self, m: i64) -> Complex64 {
        let alpha = self.alpha.to_f64().unwrap();
        let beta = self.beta.to_f64().unwrap();
        if m == 0 {
            return Complex64::new(beta - alpha, 0.0);
        }
        let mf = m as f64;
        let box_part =
            Complex64::from_polar(1.0, -PI * mf * (alpha + beta)) * ((PI * mf * (beta - alpha)).sin() / (PI * mf));
        let u = PI * mf * self.delta.to_f64().unwrap() / self.r as f64;
        box_part * (u.sin() / u).powi(self.r as i32)
    }

    /// The three-way coefficient bound:
    /// |c(m)| ≤ min(β−α+Δ, 1/(π|m|), (1/(π|m|))·(r/(π|m|Δ))^r).
    pub fn coeff_bound(&self, m: i64) -> f64 {
        let support = (self.beta.to_f64().unwrap() - self.alpha.to_f64().unwrap())
            + self.delta.to_f64().unwrap();
        if m == 0 {
            return support;
        }
        let mf = m.unsigned_abs() as f64;
        let first_order = 1.0 / (PI * mf);
        let decay = first_order
            * (self.r as f64 / (PI * mf * self.delta.to_f64().unwrap())).powi(self.r as i32);
        support.min(first_order).min(decay)
    }

    /// Exact min and max of ψ over the circle arc [lo, hi] (hi − lo < 1).
    ///
    /// ψ is piecewise monotone with breakpoints at α±Δ/2 and β±Δ/2, so the
    /// extrema over an arc are attained at the arc endpoints or at the
    /// breakpoints it contains.
    pub fn range_on_arc(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        debug_assert!(hi >= lo && (hi - lo) < BigRational::one());
        let mut lo_val = self.eval_rational(lo);
        let mut hi_val = lo_val.clone();
        let mut consider = |v: BigRational| {
            if v < lo_val {
                lo_val = v.clone();
            }
            if v > hi_val {
                hi_val = v;
            }
        };
        consider(self.eval_rational(hi));
        let half = &self.delta / BigRational::from_integer(BigInt::from(2));
        let breakpoints = [
            &self.alpha - &half,
            &self.alpha + &half,
            &self.beta - &half,
            &self.beta + &half,
        ];
        for bp in breakpoints {
            // does bp + k land inside [lo, hi] for some integer k?
            let k = (lo - &bp).ceil();
            let shifted = &bp + &k;
            if shifted >= *lo && shifted <= *hi {
                consider(self.eval_rational(&shifted));
            }
        }
        (lo_val, hi_val)
    }
}

/// Irwin–Hall CDF (sum of `r` uniforms on (0,1)) at an exact rational point.
fn irwin_hall_cdf_rational(s: &BigRational, r: u32) -> BigRational {
    if !s.is_positive() {
        return BigRational::zero();
    }
    if *s >= BigRational::from_integer(BigInt::from(r)) {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    let kmax = s.floor().to_integer().to_u32().unwrap_or(r);
    for k in 0..=kmax.min(r) {
        let term = (s - BigRational::from_integer(BigInt::from(k))).pow(r as i32);
        let signed = if k % 2 == 0 { term } else { -term };
        total += signed * BigRational::from_integer(binom.clone());
        // next binomial coefficient C(r, k+1)
        binom = binom * BigInt::from(r - k) / BigInt::from(k + 1);
    }
    let mut fact = BigInt::one();
    for i in 2..=r {
        fact *= BigInt::from(i);
    }
    total / BigRational::from_integer(fact)
}

fn irwin_hall_cdf_f64(s: f64, r: u32) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= r as f64 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut binom = 1.0;
    let mut fact = 1.0;
    for i in 2..=r {
        fact *= i as f64;
    }
    for k in 0..=(s.floor() as u32).min(r) {
        let term = (s - k as f64).powi(r as i32);
        total += if k % 2 == 0 { term * binom } else { -term * binom };
        binom = binom * (r - k) as f64 / (k + 1) as f64;
    }
    total / fact
}

/// Irwin–Hall density of the sum of three uniforms on (0,1): piecewise
/// quadratic on [0,3].
fn triple_box_density_rational(u: &BigRational) -> BigRational {
    let zero = BigRational::zero();
    if !u.is_positive() || *u >= BigRational::from_integer(BigInt::from(3)) {
        return zero;
    }
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    let mut acc = u * u;
    if *u > one {
        let t = u - &one;
        acc -= &three * (&t * &t);
    }
    if *u > two {
        let t = u - &two;
        acc += &three * (&t * &t);
    }
    acc / two
}

fn triple_box_density_f64(u: f64) -> f64 {
    if u <= 0.0 || u >= 3.0 {
        return 0.0;
    }
    let mut acc = u * u;
    if u > 1.0 {
        acc -= 3.0 * (u - 1.0) * (u - 1.0);
    }
    if u > 2.0 {
        acc += 3.0 * (u - 2.0) * (u - 2.0);
    }
    acc / 2.0
}

/// Exact (ψ₀⊛ψ₀⊛ψ₀)(x) on the unit circle.
///
/// The line convolution of three boxes [a,b] is (b−a)²·f₃((t−3a)/(b−a)) with
/// f₃ the Irwin–Hall density of three uniforms; the circle value sums the
/// integer shifts that land in the support [3a, 3b].
pub fn triple_conv_rational(window: &Window, x: &BigRational) -> BigRational {
    let width = window.width();
    let three_a = window.a() * BigRational::from_integer(BigInt::from(3));
    let x0 = fract(x);
    let mut total = BigRational::zero();
    for k in 0..3 {
        let t = &x0 + BigRational::from_integer(BigInt::from(k)) - &three_a;
        total += &width * &width * triple_box_density_rational(&(t / &width));
    }
    total
}

/// Double-precision version of [`triple_conv_rational`].
pub fn triple_conv(window: &Window, x: f64) -> f64 {
    let width = window.width_f64();
    let three_a = 3.0 * window.a_f64();
    let x0 = x - x.floor();
    let mut total = 0.0;
    for k in 0..3 {
        let t = x0 + k as f64 - three_a;
        total += width * width * triple_box_density_f64(t / width);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn spec_window() -> Window {
        Window::parse("1/5..17/20").unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(Window::parse("1/5..17/20").is_ok());
        assert!(Window::parse("1/2..1/2").is_err());
        assert!(Window::parse("0/1..1/2").is_err());
        assert!(Window::parse("1/2..5/4").is_err());
        assert!(Window::parse("nonsense").is_err());
    }

    #[test]
    fn psi0_examples() {
        let w = spec_window();
        assert_eq!(psi0(&w, 0.5), 1);
        assert_eq!(psi0(&w, 0.9), 0);
        assert_eq!(psi0(&w, 1.3), 1); // {1.3} = 0.3
        assert_eq!(psi0_rational(&w, &rat("1/5")), 0); // boundary
        assert_eq!(psi0_rational(&w, &rat("17/20")), 0); // boundary
        assert_eq!(psi0_rational(&w, &rat("-7/10")), 1); // {-0.7} = 0.3
    }

    #[test]
    fn box_coeff_examples() {
        let w = Window::parse("1/1000000..1/2").unwrap();
        // c(0) = b - a
        assert!((box_coeff(&w, 0).re - (0.5 - 1e-6)).abs() < 1e-12);

        let w = Window::new(rat("1/100000000"), rat("1/2")).unwrap();
        let c1 = box_coeff(&w, 1);
        // for (0,1/2): c(1) = -i/pi; tiny a shifts it negligibly
        assert!((c1.re - 0.0).abs() < 1e-6);
        assert!((c1.im + 1.0 / PI).abs() < 1e-6);
        let c2 = box_coeff(&w, 2);
        assert!(c2.norm() < 1e-7); // sin(pi) = 0 up to the tiny a shift
        // conjugate symmetry
        let m = 7;
        let d = box_coeff(&w, -m) - box_coeff(&w, m).conj();
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn container_validation() {
        let w = spec_window();
        let delta = rat("1/100");
        assert!(Container::lower(&w, &delta, 3).is_ok());
        assert!(Container::upper(&w, &delta, 3).is_ok());
        // beta - alpha < delta
        assert!(Container::new(rat("1/2"), rat("101/200"), rat("1/100"), 3).is_err());
        // delta out of range
        assert!(Container::new(rat("1/10"), rat("2/10"), rat("1/2"), 3).is_err());
        // beta - alpha > 1 - delta
        assert!(Container::new(rat("1/100"), rat("995/1000"), rat("1/50"), 3).is_err());
    }

    #[test]
    fn container_eval_landmarks() {
        for r in [1u32, 2, 3, 5] {
            let c = Container::new(rat("1/5"), rat("4/5"), rat("1/50"), r).unwrap();
            // core plateau
            assert_eq!(c.eval_rational(&rat("1/2")), BigRational::one());
            // outside support (periodically reduced)
            assert_eq!(c.eval_rational(&rat("9/10")), BigRational::zero());
            assert_eq!(c.eval_rational(&rat("19/10")), BigRational::zero());
            // kernel symmetry at the edge midpoints
            let half = rat("1/2");
            assert_eq!(c.eval_rational(&rat("1/5")), half);
            assert_eq!(c.eval_rational(&rat("4/5")), half);
            // f64 path agrees
            for x in [0.2, 0.205, 0.5, 0.795, 0.9, 1.3] {
                let exact = c
                    .eval_rational(&BigRational::from_f64(x).unwrap())
                    .to_f64()
                    .unwrap();
                assert!((c.eval(x) - exact).abs() < 1e-12, "r={r} x={x}");
            }
        }
    }

    #[test]
    fn container_coeff_zero_is_core_length() {
        let c = Container::new(rat("1/5"), rat("4/5"), rat("1/50"), 4).unwrap();
        assert!((c.coeff(0).re - 0.6).abs() < 1e-15);
        assert_eq!(c.coeff(0).im, 0.0);
    }

    #[test]
    fn container_coeff_three_way_bound() {
        let w = spec_window();
        for r in [1u32, 3, 5] {
            let c = Container::lower(&w, &rat("1/100"), r).unwrap();
            for m in 1..=1000i64 {
                let bound = c.coeff_bound(m) * (1.0 + 1e-6);
                assert!(
                    c.coeff(m).norm() <= bound,
                    "bound violated at r={r} m={m}: |c|={} bound={bound}",
                    c.coeff(m).norm()
                );
            }
        }
    }

    /// Composite-Simpson quadrature of ∫₀¹ ψ(x)·e^{−2πimx} dx, the
    /// independent oracle for the closed-form coefficients.
    fn coeff_quadrature(c: &Container, m: i64, intervals: usize) -> Complex64 {
        let n = intervals * 2;
        let h = 1.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let x = j as f64 * h;
            let weight = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += Complex64::from_polar(c.eval(x), -2.0 * PI * m as f64 * x) * weight;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn container_coeff_matches_quadrature() {
        let w = spec_window();
        let c = Container::lower(&w, &rat("1/100"), 3).unwrap();
        let q = coeff_quadrature(&c, 7, 1 << 15);
        assert!((c.coeff(7) - q).norm() < 1e-10);
        let c2 = Container::upper(&w, &rat("1/100"), 3).unwrap();
        let q2 = coeff_quadrature(&c2, 7, 1 << 15);
        assert!((c2.coeff(7) - q2).norm() < 1e-10);
    }

    #[test]
    fn sandwich_psi1_psi0_psi2() {
        let w = spec_window();
        let delta = rat("1/100");
        for r in [1u32, 3, 5] {
            let psi1 = Container::lower(&w, &delta, r).unwrap();
            let psi2 = Container::upper(&w, &delta, r).unwrap();
            // moderate grid here; the acceptance suite runs the full 1e5 grid
            for j in 0..2000u32 {
                let x = j as f64 / 2000.0;
                let p0 = psi0(&w, x) as f64;
                assert!(psi1.eval(x) <= p0 + 1e-12, "psi1 > psi0 at {x} (r={r})");
                assert!(psi2.eval(x) + 1e-12 >= p0, "psi2 < psi0 at {x} (r={r})");
            }
        }
    }

    #[test]
    fn parseval_partial_sum() {
        let c = Container::new(rat("1/5"), rat("4/5"), rat("1/50"), 3).unwrap();
        // quadrature of ∫ psi^2 via Simpson
        let n = 1 << 16;
        let h = 1.0 / n as f64;
        let mut int_sq = 0.0;
        for j in 0..=n {
            let v = c.eval(j as f64 * h);
            let weight = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            int_sq += v * v * weight;
        }
        int_sq *= h / 3.0;
        let mut sum = c.coeff(0).norm_sqr();
        for m in 1..=10_000i64 {
            sum += 2.0 * c.coeff(m).norm_sqr();
        }
        assert!(
            (sum - int_sq).abs() < 1e-6,
            "parseval mismatch: sum={sum} integral={int_sq}"
        );
    }

    #[test]
    fn range_on_arc_is_exact() {
        let c = Container::new(rat("1/5"), rat("4/5"), rat("1/50"), 3).unwrap();
        // arc straddling the left support edge but not the plateau
        let (lo, hi) = c.range_on_arc(&rat("19/100"), &rat("41/200"));
        assert_eq!(lo, BigRational::zero());
        assert!(hi > BigRational::zero() && hi < BigRational::one());
        // arc inside the plateau
        let (lo, hi) = c.range_on_arc(&rat("40/100"), &rat("60/100"));
        assert_eq!(lo, BigRational::one());
        assert_eq!(hi, BigRational::one());
        // arc covering the full descent
        let (lo, hi) = c.range_on_arc(&rat("75/100"), &rat("85/100"));
        assert_eq!(lo, BigRational::zero());
        assert_eq!(hi, BigRational::one());
    }

    #[test]
    fn triple_conv_examples() {
        let w = Window::new(rat("1/1000000000"), rat("1/3")).unwrap();
        // window ~(0,1/3) at x=1/2 -> 1/12
        assert!((triple_conv(&w, 0.5) - 1.0 / 12.0).abs() < 1e-6);
        let w6 = Window::new(rat("1/1000000000"), rat("1/6")).unwrap();
        assert!(triple_conv(&w6, 0.75).abs() < 1e-12);
        // exact rational variant at an exact window
        let w3 = Window::new(rat("1/10"), rat("13/30")).unwrap(); // width 1/3
        let v = triple_conv_rational(&w3, &rat("8/10")); // x - 3a = 1/2
        assert_eq!(v, rat("1/12"));
    }

    #[test]
    fn triple_conv_mean_and_bounds() {
        let w = spec_window();
        let n = 20_000;
        let mut mean = 0.0;
        let width = w.width_f64();
        let cap = (width * width).min(1.0);
        for j in 0..n {
            let x = (j as f64 + 0.5) / n as f64;
            let v = triple_conv(&w, x);
            assert!(v >= 0.0 && v <= cap + 1e-12);
            mean += v;
        }
        mean /= n as f64;
        assert!((mean - width.powi(3)).abs() < 1e-6);
    }

    /// Fine-grid numeric cyclic convolution oracle for triple_conv.
    #[test]
    fn triple_conv_matches_grid_oracle() {
        let w = spec_window();
        let n = 4096usize;
        let ind: Vec<f64> = (0..n)
            .map(|j| psi0(&w, (j as f64 + 0.5) / n as f64) as f64)
            .collect();
        // cyclic triple convolution by direct double loop at a few probe points
        for &probe in &[0usize, 511, 1024, 2048, 3333] {
            let mut acc = 0.0;
            for i in 0..n {
                let mut inner = 0.0;
                for j in 0..n {
                    let k = (probe + 2 * n - i - j) % n;
                    inner += ind[j] * ind[k];
                }
                acc += ind[i] * inner;
            }
            let grid_val = acc / (n * n) as f64;
            let x = (probe as f64 + 0.5) / n as f64;
            // grid sampling of the boxes perturbs edges at O(1/n)
            assert!(
                (triple_conv(&w, x) - grid_val).abs() < 2e-3,
                "probe {probe}: exact {} grid {grid_val}",
                triple_conv(&w, x)
            );
        }
    }

    #[test]
    fn triple_conv_fourier_series_converges() {
        let w = spec_window();
        let sum_at = |x: f64, big_m: i64| {
            let mut s = box_coeff(&w, 0).re.powi(3);
            for m in 1..=big_m {
                let c = box_coeff(&w, m);
                let c3 = c * c * c;
                s += 2.0 * (c3 * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x)).re;
            }
            s
        };
        let xs: Vec<f64> = (0..200).map(|j| j as f64 / 200.0).collect();
        let err = |big_m: i64| {
            xs.iter()
                .map(|&x| (sum_at(x, big_m) - triple_conv(&w, x)).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(50);
        let e2 = err(200);
        // O(1/M^2) uniform convergence: quadrupling M should shrink the error
        // by far more than 2x
        assert!(e2 < e1 / 2.0, "e(50)={e1} e(200)={e2}");
    }
}

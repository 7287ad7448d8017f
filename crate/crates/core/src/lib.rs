//! Exact counting of ternary Goldbach representations p₁+p₂+p₃ = N over
//! primes constrained by a < {ηp} < b for a quadratic irrationality η, with
//! the supporting machinery: periodic continued fractions, certified
//! fractional parts, window containers with closed-form Fourier
//! coefficients, singular series, exact NTT convolution counting, and sweep
//! orchestration.

pub mod counting;
pub mod error;
pub mod harness;
pub mod ntt;
pub mod quadratic;
pub mod series;
pub mod sieve;
pub mod window;

pub use counting::{
    constrained_exp_sum, dft_count_check, exp_sum, minor_arc_scan, sandwich_counts, ternary_count,
    ternary_count_brute, ternary_counts_all, ArcReport, CountResult, WeightedIndicator,
};
pub use error::{Error, Result};
pub use harness::{
    emit, headline_report, parse_format, run_sweep, HeadlineSummary, OutputFormat, SweepConfig,
    SweepRow, CSV_HEADER,
};
pub use quadratic::{
    best_convergent, cf_expand, classify_point, convergents, frac_eta_p, make_eta,
    rational_approx, CertifiedFrac, ContinuedFraction, Convergent, Membership,
    QuadraticIrrational, RationalApprox,
};
pub use series::{main_term, predict_j, sigma_window, singular_series, SeriesValue};
pub use sieve::{constrained_set, density, primes_up_to, ConstrainedSet, PrimeTable};
pub use window::{
    box_coeff, parse_rational, psi0, psi0_rational, triple_conv, triple_conv_rational, Container,
    Window,
};

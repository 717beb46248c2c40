use serde::{Deserialize, Serialize};

/// `ρ`, the real root of `x³ + x² + x − 2`; `α₀ = log 2 / log(2/ρ)`; `η₊`, the
/// positive root of `x³ − x² − 2x − 4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub rho: f64,
    pub alpha0: f64,
    pub eta_plus: f64,
}

/// Bisection on a bracket whose end points have opposite signs, run until
/// the bracket cannot be split further in `f64`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (flo, fhi) = (f(lo), f(hi));
    assert!(flo * fhi < 0.0, "bracket [{lo}, {hi}] has no sign change");
    let rising = flo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rho_polynomial(x: f64) -> f64 {
    x * x * x + x * x + x - 2.0
}

pub fn eta_polynomial(x: f64) -> f64 {
    x * x * x - x * x - 2.0 * x - 4.0
}

pub fn growth_constants() -> Constants {
    let rho = bisect(rho_polynomial, 0.5, 1.0);
    let eta_plus = bisect(eta_polynomial, 2.0, 3.0);
    Constants {
        rho,
        alpha0: 2f64.ln() / (2.0 / rho).ln(),
        eta_plus,
    }
}

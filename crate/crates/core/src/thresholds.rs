//! Feedback thresholds `(γ, ε)` and the feedback-load they imply.
//!
//! All logarithms are natural. `L = N_t` everywhere.

use serde::Serialize;

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds<T> {
    /// Channel-power threshold: a user may feed back only if `ρ ≥ γ`.
    pub gamma: T,
    /// Quantization-error threshold: a user may feed back only if `δ ≤ ε`.
    pub epsilon: T,
    pub lambda: T,
    /// Tail exponent with `P_γ = N_t · exp(-φ γ)`; zero when `γ` was clamped.
    pub phi: T,
    pub u: usize,
    pub n_t: usize,
    /// `ln U - λ ln ln U` was negative and has been raised to zero.
    pub gamma_clamped: bool,
    /// The error threshold exceeded one and has been lowered to one.
    pub epsilon_clamped: bool,
}

impl<T: Scalar> Thresholds<T> {
    /// `γ = 0`, `ε = 1`: every user feeds back.
    pub fn trivial(u: usize, n_t: usize) -> Self {
        Self {
            gamma: T::zero(),
            epsilon: T::one(),
            lambda: T::zero(),
            phi: T::zero(),
            u,
            n_t,
            gamma_clamped: true,
            epsilon_clamped: true,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma == T::zero() && self.epsilon >= T::one()
    }

    /// `ρ ≥ γ` and `δ ≤ ε`.
    pub fn admits(&self, rho: T, delta: T) -> bool {
        rho >= self.gamma && delta <= self.epsilon
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackLoad<T> {
    pub p_gamma: T,
    /// Union bound `N ε^{N_t-1}` on the error-threshold probability (not clamped).
    pub p_epsilon_bound: T,
    pub p_v_bound: T,
    /// `U · p_v_bound`.
    pub expected_k_bound: T,
    /// `B · N · N_t`.
    pub rate_bound_bits: T,
    /// Set when the union bound is vacuous (`N ε^{N_t-1} ≥ 1`), e.g. for trivial thresholds.
    pub degenerate: bool,
}

/// `Pr{ρ ≥ γ}` for `ρ ~ Gamma(L, 1)`: `e^{-γ} Σ_{i<L} γ^i / i!`.
pub fn chi2_tail<T: Scalar>(gamma: T, l: usize) -> Result<T> {
    if !(gamma >= T::zero()) {
        return Err(Error::Domain(format!("chi2_tail needs gamma >= 0, got {gamma}")));
    }
    if l == 0 {
        return Err(Error::InvalidDimension("chi2_tail needs L >= 1".into()));
    }
    let mut term = T::one();
    let mut sum = T::one();
    for i in 1..l {
        term = term * gamma / T::from_usize_lossy(i);
        sum += term;
    }
    Ok((-gamma).exp() * sum)
}

/// `Pr{ρ < γ}`, summed from the lower series when the tail is large.
pub fn chi2_cdf<T: Scalar>(gamma: T, l: usize) -> Result<T> {
    let tail = chi2_tail(gamma, l)?;
    if tail < T::lit(0.5) {
        return Ok(T::one() - tail);
    }
    // e^{-γ} Σ_{i≥L} γ^i / i!
    let mut term = (-gamma).exp();
    for i in 1..=l {
        term = term * gamma / T::from_usize_lossy(i);
    }
    let mut sum = T::zero();
    let mut i = l;
    while term > sum * T::epsilon() && i < l + 1000 {
        sum += term;
        i += 1;
        term = term * gamma / T::from_usize_lossy(i);
    }
    Ok(sum)
}

/// `β = (N_t!)^{-1/N_t}`.
pub fn alzer_beta<T: Scalar>(n_t: usize) -> T {
    let ln_fact: f64 = (2..=n_t).map(|k| (k as f64).ln()).sum();
    T::lit((-ln_fact / n_t as f64).exp())
}

/// Bounds `((1 - e^{-βγ})^{N_t}, (1 - e^{-γ})^{N_t})` that sandwich the
/// chi-squared CDF at `γ`.
pub fn alzer_bounds<T: Scalar>(gamma: T, n_t: usize) -> Result<(T, T)> {
    if !(gamma >= T::zero()) {
        return Err(Error::Domain(format!("alzer_bounds needs gamma >= 0, got {gamma}")));
    }
    let n = n_t as i32;
    let beta: T = alzer_beta(n_t);
    let lower = (-(-beta * gamma).exp_m1()).powi(n);
    let upper = (-(-gamma).exp_m1()).powi(n);
    Ok((lower, upper))
}

pub fn design_thresholds<T: Scalar>(u: usize, n_t: usize, lambda: T) -> Result<Thresholds<T>> {
    if u < 3 {
        return Err(Error::PopulationTooSmall { u });
    }
    if n_t < 2 {
        return Err(Error::InvalidDimension(format!(
            "threshold design needs n_t >= 2 (ε exponent -1/(n_t-1)), got {n_t}"
        )));
    }
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("λ > 0 required, got {lambda}")));
    }
    let ln_u = T::from_usize_lossy(u).ln();
    let ln_ln_u = ln_u.ln();
    let gamma_raw = ln_u - lambda * ln_ln_u;
    let gamma_clamped = !(gamma_raw > T::zero());
    let (gamma, phi) = if gamma_clamped {
        (T::zero(), T::zero())
    } else {
        let p_gamma = chi2_tail(gamma_raw, n_t)?;
        let phi = (T::from_usize_lossy(n_t).ln() - p_gamma.ln()) / gamma_raw;
        (gamma_raw, phi)
    };

    // ε = [U^{1-φ} (ln U)^{φλ}]^{-1/(N_t-1)}
    let exponent = ((T::one() - phi) * ln_u + phi * lambda * ln_ln_u) / T::from_usize_lossy(n_t - 1);
    let epsilon_raw = (-exponent).exp();
    let epsilon_clamped = epsilon_raw > T::one();
    let epsilon = if epsilon_clamped { T::one() } else { epsilon_raw };

    Ok(Thresholds {
        gamma,
        epsilon,
        lambda,
        phi,
        u,
        n_t,
        gamma_clamped,
        epsilon_clamped,
    })
}

pub fn feedback_load<T: Scalar>(th: &Thresholds<T>, m: usize, b_bits: T) -> Result<FeedbackLoad<T>> {
    if m == 0 {
        return Err(Error::InvalidDimension("m must be >= 1".into()));
    }
    let n_total = T::from_usize_lossy(m * th.n_t);
    let p_gamma = chi2_tail(th.gamma, th.n_t)?;
    let p_epsilon_bound = n_total * th.epsilon.powi(th.n_t as i32 - 1);
    let p_v_bound = p_gamma * p_epsilon_bound;
    Ok(FeedbackLoad {
        p_gamma,
        p_epsilon_bound,
        p_v_bound,
        expected_k_bound: T::from_usize_lossy(th.u) * p_v_bound,
        rate_bound_bits: b_bits * n_total * T::from_usize_lossy(th.n_t),
        degenerate: th.is_trivial() || p_epsilon_bound >= T::one(),
    })
}

/// `E[ρ | ρ ≥ γ] = Γ(N_t+1, γ) / Γ(N_t, γ)`.
pub fn conditional_power_mean<T: Scalar>(gamma: T, n_t: usize) -> Result<T> {
    Ok(T::from_usize_lossy(n_t) * chi2_tail(gamma, n_t + 1)? / chi2_tail(gamma, n_t)?)
}

/// `E[δ | δ ≤ ε] = (N_t - 1) ε / N_t` for the error against one fixed codeword.
pub fn conditional_error_mean<T: Scalar>(epsilon: T, n_t: usize) -> T {
    T::from_usize_lossy(n_t - 1) / T::from_usize_lossy(n_t) * epsilon
}

//! Model constants and the regularized volatility switch.
//!
//! The rating-dependent volatility jumps from `sigma_high_grade` to
//! `sigma_low_grade` when the bond value crosses the migration threshold
//! `gamma * exp(-delta * t)`. The jump is replaced by a C² ramp of width
//! `epsilon` built from the quintic smoothstep `S(s) = s³(10 - 15s + 6s²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Market, regularization and truncation constants.
///
/// Defaults reproduce the benchmark setting used throughout the crate:
/// `r = 0.5`, `delta = 0.005`, `sigma_L = 0.3`, `sigma_H = 0.2`,
/// `gamma = 0.8`, `T = 1`, `K = 1`, `epsilon = 1e-2` on the window `[-4, 4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Risk-free rate `r`.
    pub rate: f64,
    /// Volatility in the low-rating region.
    pub sigma_low_grade: f64,
    /// Volatility in the high-rating region.
    pub sigma_high_grade: f64,
    /// Migration threshold proportion.
    pub gamma: f64,
    /// Decay rate of the threshold.
    pub delta: f64,
    /// Width of the Heaviside regularization band.
    pub epsilon: f64,
    /// Time horizon `T` (time to maturity after the `T - t` change of variable).
    pub maturity: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Face value `K`; the payoff is `K * min(1, e^x)`.
    pub face_value: f64,
    /// Sign `s` of the volatility part in the convection coefficient `r + s * sigma²/2`.
    pub convection_sign: f64,
    /// Zeroth-order coefficient `c` adding `c * (u, v)` to the bilinear form.
    pub reaction_coefficient: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            rate: 0.5,
            sigma_low_grade: 0.3,
            sigma_high_grade: 0.2,
            gamma: 0.8,
            delta: 0.005,
            epsilon: 1e-2,
            maturity: 1.0,
            x_min: -4.0,
            x_max: 4.0,
            face_value: 1.0,
            convection_sign: 1.0,
            reaction_coefficient: 0.0,
        }
    }
}

impl ModelParams {
    /// Checks every invariant. `sigma_high_grade == sigma_low_grade` is
    /// accepted as the degenerate constant-volatility model.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("rate", self.rate),
            ("sigma_low_grade", self.sigma_low_grade),
            ("sigma_high_grade", self.sigma_high_grade),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("maturity", self.maturity),
            ("x_min", self.x_min),
            ("x_max", self.x_max),
            ("face_value", self.face_value),
            ("convection_sign", self.convection_sign),
            ("reaction_coefficient", self.reaction_coefficient),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("{value} is not finite")));
            }
        }
        if self.sigma_high_grade <= 0.0 {
            return Err(Error::invalid("sigma_high_grade", "must be positive"));
        }
        if self.sigma_high_grade > self.sigma_low_grade {
            return Err(Error::invalid(
                "sigma_high_grade",
                format!(
                    "must not exceed sigma_low_grade ({} > {})",
                    self.sigma_high_grade, self.sigma_low_grade
                ),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma", "must lie in (0, 1)"));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        if self.maturity < 0.0 {
            return Err(Error::invalid("maturity", "must be non-negative"));
        }
        if self.x_min >= self.x_max {
            return Err(Error::invalid("x_min", "must be smaller than x_max"));
        }
        if self.face_value <= 0.0 {
            return Err(Error::invalid("face_value", "must be positive"));
        }
        if self.convection_sign != 1.0 && self.convection_sign != -1.0 {
            return Err(Error::invalid("convection_sign", "must be +1 or -1"));
        }
        Ok(())
    }

    pub fn threshold(&self) -> ThresholdCurve {
        ThresholdCurve {
            gamma: self.gamma,
            delta: self.delta,
        }
    }

    /// `sigma_H + (sigma_L - sigma_H) * H_eps(u - gamma e^{-delta t})`.
    pub fn volatility(&self, u: f64, t: f64) -> f64 {
        let switch = heaviside_unchecked(u - self.threshold().value(t), self.epsilon);
        self.sigma_high_grade + (self.sigma_low_grade - self.sigma_high_grade) * switch
    }

    /// Partial derivative of [`ModelParams::volatility`] with respect to `u`.
    pub fn volatility_slope(&self, u: f64, t: f64) -> f64 {
        let ramp = heaviside_deriv_unchecked(u - self.threshold().value(t), self.epsilon);
        (self.sigma_low_grade - self.sigma_high_grade) * ramp
    }

    /// Convection coefficient `r + s * sigma²/2` multiplying `(u_x, v)`.
    pub fn convection(&self, sigma: f64) -> f64 {
        self.rate + self.convection_sign * 0.5 * sigma * sigma
    }

    /// Initial data scaled by the face value.
    pub fn payoff(&self, x: f64) -> f64 {
        self.face_value * initial_condition(x)
    }
}

/// Time-dependent migration threshold `gamma * exp(-delta * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCurve {
    pub gamma: f64,
    pub delta: f64,
}

impl ThresholdCurve {
    pub fn value(&self, t: f64) -> f64 {
        self.gamma * (-self.delta * t).exp()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("eps", format!("regularization width must be positive, got {eps}")))
    }
}

pub(crate) fn heaviside_unchecked(x: f64, eps: f64) -> f64 {
    if x <= -eps {
        0.0
    } else if x >= 0.0 {
        1.0
    } else {
        let s = (x + eps) / eps;
        s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}

pub(crate) fn heaviside_deriv_unchecked(x: f64, eps: f64) -> f64 {
    if x <= -eps || x >= 0.0 {
        0.0
    } else {
        let s = (x + eps) / eps;
        let q = s * (1.0 - s);
        30.0 * q * q / eps
    }
}

pub(crate) fn heaviside_second_unchecked(x: f64, eps: f64) -> f64 {
    if x <= -eps || x >= 0.0 {
        0.0
    } else {
        let s = (x + eps) / eps;
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (eps * eps)
    }
}

/// Regularized Heaviside `H_eps`: 0 below `-eps`, 1 above 0, quintic
/// smoothstep in between.
pub fn smoothed_heaviside(x: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(heaviside_unchecked(x, eps))
}

/// Exact derivative of [`smoothed_heaviside`]; peaks at `15 / (8 eps)`.
pub fn smoothed_heaviside_deriv(x: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(heaviside_deriv_unchecked(x, eps))
}

/// Second derivative of [`smoothed_heaviside`]; `|H''| <= 10 / (sqrt(3) eps²)`.
pub fn smoothed_heaviside_second_deriv(x: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(heaviside_second_unchecked(x, eps))
}

pub fn effective_volatility(u_val: f64, t: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(params.volatility(u_val, t))
}

/// `G(x) = min(1, e^x)`.
pub fn initial_condition(x: f64) -> f64 {
    x.exp().min(1.0)
}

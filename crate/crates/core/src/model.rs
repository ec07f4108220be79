//! Wentzell boundary data and the process modes it selects.
//!
//! A boundary point carries weights `(a0, b0, c0)` in the condition
//! `a0 f(0) - b0 f'(0+) + (c0/2) f''(0+) = 0` (sign of the derivative term
//! flipped at the right end of an interval). Only ratios matter, so inputs are
//! rescaled to sum to one before classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized weights below this are treated as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    AtZero,
    AtOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WentzellTriple {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub side: Side,
}

/// What happens to the process once it is trapped at an absorbing boundary.
///
/// `Stop` keeps the path at the boundary forever (the boundary carries an
/// atom); `Kill` sends it to the cemetery (the mass disappears).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Absorption {
    #[default]
    Stop,
    Kill,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Reflecting,
    Absorbing(Absorption),
    Elastic {
        beta: f64,
    },
    Sticky {
        gamma: f64,
    },
    General {
        beta: f64,
        gamma: f64,
    },
    /// Trapped at the boundary, then killed after an exponential holding time.
    TrapKill {
        beta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryModel {
    pub triple: WentzellTriple,
    pub mode: Mode,
}

impl BoundaryModel {
    pub fn reflecting() -> Self {
        Self::from_normalized(0.0, 1.0, 0.0, Side::AtZero, Mode::Reflecting)
    }

    pub fn absorbing(kind: Absorption) -> Self {
        Self::from_normalized(0.0, 0.0, 1.0, Side::AtZero, Mode::Absorbing(kind))
    }

    pub fn elastic(beta: f64) -> Result<Self> {
        check_rate("beta", beta)?;
        let b0 = 1.0 / (1.0 + beta);
        Ok(Self::from_normalized(beta * b0, b0, 0.0, Side::AtZero, Mode::Elastic { beta }))
    }

    pub fn sticky(gamma: f64) -> Result<Self> {
        check_rate("gamma", gamma)?;
        let b0 = 1.0 / (1.0 + gamma);
        Ok(Self::from_normalized(0.0, b0, gamma * b0, Side::AtZero, Mode::Sticky { gamma }))
    }

    pub fn general(beta: f64, gamma: f64) -> Result<Self> {
        check_rate("beta", beta)?;
        check_rate("gamma", gamma)?;
        let b0 = 1.0 / (1.0 + beta + gamma);
        Ok(Self::from_normalized(beta * b0, b0, gamma * b0, Side::AtZero, Mode::General { beta, gamma }))
    }

    pub fn trap_kill(beta: f64) -> Result<Self> {
        check_rate("beta", beta)?;
        let c0 = 1.0 / (1.0 + beta);
        Ok(Self::from_normalized(beta * c0, 0.0, c0, Side::AtZero, Mode::TrapKill { beta }))
    }

    /// Builds a model from the rate parameters rather than the weights.
    ///
    /// Zero rates collapse to the simpler modes, e.g. `from_rates(0, g)` is
    /// the sticky process.
    pub fn from_rates(beta: f64, gamma: f64) -> Result<Self> {
        check_nonneg("beta", beta)?;
        check_nonneg("gamma", gamma)?;
        match (beta > 0.0, gamma > 0.0) {
            (false, false) => Ok(Self::reflecting()),
            (true, false) => Self::elastic(beta),
            (false, true) => Self::sticky(gamma),
            (true, true) => Self::general(beta, gamma),
        }
    }

    fn from_normalized(a0: f64, b0: f64, c0: f64, side: Side, mode: Mode) -> Self {
        Self { triple: WentzellTriple { a0, b0, c0, side }, mode }
    }

    pub fn on_side(mut self, side: Side) -> Self {
        self.triple.side = side;
        self
    }

    pub fn side(&self) -> Side {
        self.triple.side
    }

    pub fn to_wentzell(&self) -> (f64, f64, f64) {
        (self.triple.a0, self.triple.b0, self.triple.c0)
    }

    /// Killing rate on the local-time scale (holding-time rate for `TrapKill`).
    pub fn beta(&self) -> f64 {
        match self.mode {
            Mode::Elastic { beta } | Mode::General { beta, .. } | Mode::TrapKill { beta } => beta,
            _ => 0.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self.mode {
            Mode::Sticky { gamma } | Mode::General { gamma, .. } => gamma,
            _ => 0.0,
        }
    }

    /// True when no probability mass is ever lost.
    pub fn is_conservative(&self) -> bool {
        matches!(self.mode, Mode::Reflecting | Mode::Sticky { .. } | Mode::Absorbing(Absorption::Stop))
    }

    pub fn descriptor(&self) -> String {
        match self.mode {
            Mode::Reflecting => "reflecting".to_string(),
            Mode::Absorbing(Absorption::Stop) => "absorbing(stop)".to_string(),
            Mode::Absorbing(Absorption::Kill) => "absorbing(kill)".to_string(),
            Mode::Elastic { beta } => format!("elastic(beta={beta})"),
            Mode::Sticky { gamma } => format!("sticky(gamma={gamma})"),
            Mode::General { beta, gamma } => format!("general(beta={beta},gamma={gamma})"),
            Mode::TrapKill { beta } => format!("trapkill(beta={beta})"),
        }
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadParameter { name, value })
    }
}

fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParameter { name, value })
    }
}

/// Rescales `(a0, b0, c0)` to unit sum and classifies the process mode.
pub fn normalize_wentzell(a0: f64, b0: f64, c0: f64, side: Side) -> Result<BoundaryModel> {
    for (name, v) in [("a0", a0), ("b0", b0), ("c0", c0)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NegativeWeight { name, value: v });
        }
    }
    let sum = a0 + b0 + c0;
    if sum <= 0.0 {
        return Err(Error::AllZero);
    }
    let zero = |v: f64| if v / sum < ZERO_TOL { 0.0 } else { v / sum };
    let (a, b, c) = (zero(a0), zero(b0), zero(c0));
    // Re-normalize after snapping tiny weights so the triple sums to one.
    let s = a + b + c;
    let (a, b, c) = (a / s, b / s, c / s);

    let mode = match (a > 0.0, b > 0.0, c > 0.0) {
        (false, true, false) => Mode::Reflecting,
        (true, true, false) => Mode::Elastic { beta: a / b },
        (false, true, true) => Mode::Sticky { gamma: c / b },
        (true, true, true) => Mode::General { beta: a / b, gamma: c / b },
        (false, false, true) => Mode::Absorbing(Absorption::Stop),
        (true, false, true) => Mode::TrapKill { beta: a / c },
        (true, false, false) => return Err(Error::PureDirichlet),
        (false, false, false) => return Err(Error::AllZero),
    };
    Ok(BoundaryModel { triple: WentzellTriple { a0: a, b0: b, c0: c, side }, mode })
}

/// `a0 f - b0 f' + (c0/2) f''` at the left end, `a0 f + b0 f' + (c0/2) f''`
/// at the right end.
pub fn wentzell_residual(model: &BoundaryModel, f0: f64, df0: f64, ddf0: f64) -> f64 {
    let WentzellTriple { a0, b0, c0, side } = model.triple;
    let sign = match side {
        Side::AtZero => -1.0,
        Side::AtOne => 1.0,
    };
    a0 * f0 + sign * b0 * df0 + 0.5 * c0 * ddf0
}

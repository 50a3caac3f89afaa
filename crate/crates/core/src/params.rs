//! Reduced-unit simulation parameters.
//!
//! Positions are `X = 2 k_L x` on the unit cell `[-pi, pi)`, momenta are
//! `P = (n + beta) kbar` and time is counted in kick periods.

use core::f64::consts::PI;


use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Rungs kept beyond the ballistic momentum front `K t / kbar`.
pub const LADDER_MARGIN: usize = 16;

/// Kicked-rotor parameters in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Kick strength `K`.
    pub k: f64,
    /// Reduced Planck constant.
    pub kbar: f64,
    /// Simple-resonance order, `kbar = 2 pi ell`. When set, free-flight
    /// phases are evaluated as if the resonance were exact.
    pub ell: Option<u32>,
    pub n_kicks: usize,
    /// The momentum ladder spans `n` in `[-N, N]`.
    pub ladder_half_width: usize,
}

impl SimParams {
    /// Parameters at the simple resonance `kbar = 2 pi ell`, with a ladder
    /// wide enough for `n_kicks` of ballistic growth.
    pub fn resonant(k: f64, ell: u32, n_kicks: usize) -> Self {
        let kbar = TWO_PI * ell as f64;
        SimParams {
            k,
            kbar,
            ell: Some(ell),
            n_kicks,
            ladder_half_width: recommended_half_width(k, kbar, n_kicks, 0),
        }
    }

    pub fn with_ladder(mut self, half_width: usize) -> Self {
        self.ladder_half_width = half_width;
        self
    }

    /// Checks every invariant and returns the parameters unchanged.
    pub fn validate(self) -> Result<Self> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidParameter { name: "K", value: self.k });
        }
        if !(self.kbar > 0.0) || !self.kbar.is_finite() {
            return Err(Error::InvalidParameter { name: "kbar", value: self.kbar });
        }
        if self.ladder_half_width < 1 {
            return Err(Error::InvalidParameter { name: "ladder_half_width", value: 0.0 });
        }
        if let Some(ell) = self.ell {
            if ell == 0 || (self.kbar - TWO_PI * ell as f64).abs() >= 1e-12 {
                return Err(Error::ResonanceMismatch { kbar: self.kbar, ell });
            }
        }
        let need = required_half_width(self.k, self.kbar, self.n_kicks);
        if self.ladder_half_width < need {
            return Err(Error::LadderTooSmall { have: self.ladder_half_width, need });
        }
        Ok(self)
    }

    pub fn ladder_len(&self) -> usize {
        2 * self.ladder_half_width + 1
    }

    /// Comb velocity `v_beta = kbar (beta + 1/2)`: distance travelled by a
    /// comb-shaped Bloch wave over one free flight at resonance.
    pub fn comb_velocity(&self, beta: f64) -> f64 {
        self.kbar * (beta + 0.5)
    }
}

/// Minimum ladder half-width accepted by [`SimParams::validate`].
pub fn required_half_width(k: f64, kbar: f64, n_kicks: usize) -> usize {
    (k / kbar * n_kicks as f64).ceil() as usize + LADDER_MARGIN
}

/// Ladder half-width that keeps truncation losses below roundoff for a
/// state initially spread over `|n| <= initial_spread`.
///
/// Beyond the ballistic front `a = K t / kbar` the Bessel amplitudes decay on
/// the Airy scale `a^(1/3)`, so the fixed margin of
/// [`required_half_width`] alone is not enough for long runs.
pub fn recommended_half_width(k: f64, kbar: f64, n_kicks: usize, initial_spread: usize) -> usize {
    let front = k / kbar * n_kicks.max(1) as f64;
    required_half_width(k, kbar, n_kicks) + (10.0 * front.cbrt()).ceil() as usize + initial_spread
}

/// Folds a quasimomentum into `[-1/2, 1/2)`, returning the integer shift
/// that must be added to the ladder index.
pub fn fold_quasimomentum(beta: f64) -> (i64, f64) {
    let shift = (beta + 0.5).floor();
    let mut folded = beta - shift;
    let mut shift = shift as i64;
    // rounding can land exactly on +1/2
    if folded >= 0.5 {
        folded -= 1.0;
        shift += 1;
    }
    (shift, folded)
}

/// Wraps a position into the unit cell `[-pi, pi)`.
pub fn wrap_position(x: f64) -> f64 {
    let w = x - TWO_PI * ((x + PI) / TWO_PI).floor();
    if w >= PI {
        w - TWO_PI
    } else {
        w
    }
}

/// Expresses a kicking period as `T = r T_T / s` with `r/s` coprime and of
/// smallest denominator; the reduced Planck constant is then `4 pi r / s`.
pub fn reduced_from_physical(kick_period: f64, talbot_time: f64) -> Result<(u64, u64)> {
    if !(kick_period > 0.0) {
        return Err(Error::InvalidParameter { name: "kick_period", value: kick_period });
    }
    if !(talbot_time > 0.0) {
        return Err(Error::InvalidParameter { name: "talbot_time", value: talbot_time });
    }
    let ratio = kick_period / talbot_time;
    simplest_fraction(ratio, 1e-9, 1_000_000).ok_or(Error::NotRational { ratio })
}

pub fn kbar_from_ratio(r: u64, s: u64) -> f64 {
    4.0 * PI * r as f64 / s as f64
}

/// Stern-Brocot search for the fraction of smallest denominator strictly
/// inside `(x - tol, x + tol)`. Bounds `a/b < lo` and `c/d > hi` are advanced
/// in runs so the walk costs one step per continued-fraction term.
fn simplest_fraction(x: f64, tol: f64, max_den: u64) -> Option<(u64, u64)> {
    let (lo, hi) = (x - tol, x + tol);
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, 0u64);
    loop {
        let (p, q) = (a + c, b + d);
        if q > max_den {
            return None;
        }
        let m = p as f64 / q as f64;
        if m <= lo {
            let steps = ((lo * b as f64 - a as f64) / (c as f64 - lo * d as f64)).floor();
            let steps = steps.clamp(1.0, max_den as f64) as u64;
            a += steps * c;
            b += steps * d;
        } else if m >= hi {
            let steps = ((c as f64 - hi * d as f64) / (hi * b as f64 - a as f64)).floor();
            let steps = steps.clamp(1.0, max_den as f64) as u64;
            c += steps * a;
            d += steps * b;
        } else {
            return Some((p, q));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimParams {
        SimParams { k: 10.0, kbar: 4.0 * PI, ell: Some(2), n_kicks: 50, ladder_half_width: 80 }
    }

    #[test]
    fn accepts_consistent_resonance() {
        assert_eq!(base().validate(), Ok(base()));
        assert_eq!(required_half_width(10.0, 4.0 * PI, 50), 56);
    }

    #[test]
    fn rejects_wrong_order() {
        let p = SimParams { ell: Some(3), ..base() };
        assert!(matches!(p.validate(), Err(Error::ResonanceMismatch { ell: 3, .. })));
    }

    #[test]
    fn rejects_short_ladder() {
        let p = SimParams { kbar: TWO_PI, ell: None, n_kicks: 200, ladder_half_width: 100, ..base() };
        assert_eq!(p.validate(), Err(Error::LadderTooSmall { have: 100, need: 335 }));
    }

    #[test]
    fn rejects_nonpositive_strength() {
        let p = SimParams { k: 0.0, ..base() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name: "K", .. })));
    }

    #[test]
    fn folding_absorbs_integer_part() {
        let (shift, beta) = fold_quasimomentum(0.6);
        assert_eq!(shift, 1);
        assert!((beta + 0.4).abs() < 1e-15);
        assert_eq!(fold_quasimomentum(-0.5), (0, -0.5));
        assert_eq!(fold_quasimomentum(0.5), (1, -0.5));
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_position(PI), -PI);
        assert!((wrap_position(TWO_PI)).abs() < 1e-15);
        assert!((wrap_position(1.0 + 3.0 * PI) - (1.0 - PI)).abs() < 1e-14);
    }

    #[test]
    fn talbot_ratios() {
        assert_eq!(reduced_from_physical(1.0, 1.0), Ok((1, 1)));
        assert_eq!(reduced_from_physical(0.5, 1.0), Ok((1, 2)));
        assert_eq!(reduced_from_physical(0.3333333333, 1.0), Ok((1, 3)));
        assert_eq!(reduced_from_physical(2.5e-3, 1e-3), Ok((5, 2)));
        assert_eq!(kbar_from_ratio(1, 1), 4.0 * PI);
        assert!(matches!(reduced_from_physical(1e-8, 1.0), Err(Error::NotRational { .. })));
        assert!(reduced_from_physical(-1.0, 1.0).is_err());
    }
}

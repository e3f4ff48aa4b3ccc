//! The scalar pencil behind the three-particle branches: its boundary limits,
//! its roots `E` and `F`, the four critical couplings and the linear gap
//! expansions at the two gap-opening thresholds.

use crate::extreal::ExtReal;
use crate::model::ModelSpec;
use crate::{Error, Result};
use serde::Serialize;

/// Spin parameter `gamma` and coupling strength `alpha >= 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PencilParams {
    pub gamma: f64,
    pub alpha: f64,
}

impl PencilParams {
    pub fn new(gamma: f64, alpha: f64) -> Self {
        assert!(alpha >= 0.0, "alpha must be nonnegative");
        assert!(gamma.is_finite() && alpha.is_finite());
        PencilParams { gamma, alpha }
    }
}

/// Outcome of a root search for `E` or `F`.
#[derive(Debug, Clone, Serialize)]
pub struct RootResult {
    /// Whether the root exists for these parameters.
    pub exists: bool,
    /// The root, when it exists.
    pub value: Option<f64>,
    /// Pencil value at the returned point.
    pub residual: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
}

/// A critical coupling: a finite threshold, structurally absent, or zero
/// because the controlling integral diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Threshold {
    /// Finite positive threshold.
    Defined(f64),
    /// The parameter range rules this transition out entirely.
    NotApplicable,
    /// The controlling integral diverges; the transition happens at every
    /// positive coupling.
    InfiniteIntegral,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::Defined(v) => Some(v),
            _ => None,
        }
    }

    /// Effective numeric threshold: `InfiniteIntegral` acts as 0.
    pub fn effective(self) -> Option<f64> {
        match self {
            Threshold::Defined(v) => Some(v),
            Threshold::InfiniteIntegral => Some(0.0),
            Threshold::NotApplicable => None,
        }
    }
}

/// The four coupling thresholds at which branches detach and gaps open.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalCouplings {
    /// `E` detaches below the lower branch.
    pub alpha1: Threshold,
    /// The lower gap opens.
    pub alpha2: Threshold,
    /// `F` detaches above the upper branch.
    pub alpha3: Threshold,
    /// The upper gap opens.
    pub alpha4: Threshold,
}

/// Evaluates the pencil `Phi(z) = -gamma - z - alpha^2 J(z - gamma)` where
/// `J(t)` is the signed resolvent moment of the coupling weight.
///
/// Defined for `z` outside the open band `(omega0 + gamma, omega1 + gamma)`;
/// at the band endpoints the value may be infinite.
pub fn phi(model: &ModelSpec, p: &PencilParams, z: f64) -> Result<ExtReal> {
    let j = model.resolvent_moment(z - p.gamma).map_err(|e| match e {
        Error::DomainError { lo, hi, .. } => {
            Error::DomainError { z, lo: lo + p.gamma, hi: hi + p.gamma }
        }
        other => other,
    })?;
    Ok(j.affine(-p.alpha * p.alpha, -p.gamma - z))
}

/// Boundary limits `(Phi(omega0 + gamma), Phi(omega1 + gamma))`.
///
/// These are the monotone limits from outside the band; their signs decide
/// the existence of `E` and `F`.
pub fn phi_limits(model: &ModelSpec, p: &PencilParams) -> Result<(ExtReal, ExtReal)> {
    let (w0, w1) = model.bounds();
    let a2 = p.alpha * p.alpha;
    let m = model.moment(-w0, 1)?;
    let mm = model.reflected_moment(w1, 1)?;
    let lo = m.affine(-a2, -2.0 * p.gamma - w0);
    let hi = mm.affine(a2, -2.0 * p.gamma - w1);
    Ok((lo, hi))
}

const ROOT_TOL: f64 = 1e-13;
const MAX_BISECT: usize = 200;

/// Root of the pencil strictly below `omega0 + gamma`; exists iff the lower
/// boundary limit is negative.
pub fn find_e(model: &ModelSpec, p: &PencilParams) -> Result<RootResult> {
    let (w0, _) = model.bounds();
    let edge = w0 + p.gamma;
    let (lim_lo, _) = phi_limits(model, p)?;
    if !(lim_lo < ExtReal::Finite(0.0)) {
        return Ok(RootResult { exists: false, value: None, residual: lim_lo.to_f64(), bracket: (f64::NEG_INFINITY, edge) });
    }
    // Phi -> +inf as z -> -inf, Phi < 0 at the edge: expand a bracket downward.
    let scale = 1.0 + edge.abs() + p.gamma.abs() + p.alpha;
    let mut lo = edge - scale;
    for _ in 0..200 {
        if phi(model, p, lo)? > ExtReal::Finite(0.0) {
            break;
        }
        lo = edge - 2.0 * (edge - lo);
    }
    bisect(model, p, lo, edge)
}

/// Root of the pencil strictly above `omega1 + gamma`; exists iff the upper
/// boundary limit is positive.
pub fn find_f(model: &ModelSpec, p: &PencilParams) -> Result<RootResult> {
    let (_, w1) = model.bounds();
    let edge = w1 + p.gamma;
    let (_, lim_hi) = phi_limits(model, p)?;
    if !(lim_hi > ExtReal::Finite(0.0)) {
        return Ok(RootResult { exists: false, value: None, residual: lim_hi.to_f64(), bracket: (edge, f64::INFINITY) });
    }
    let scale = 1.0 + edge.abs() + p.gamma.abs() + p.alpha;
    let mut hi = edge + scale;
    for _ in 0..200 {
        if phi(model, p, hi)? < ExtReal::Finite(0.0) {
            break;
        }
        hi = edge + 2.0 * (hi - edge);
    }
    bisect(model, p, edge, hi)
}

/// Bisection on a bracket with the pencil positive at `lo` and negative at
/// `hi` (it is strictly decreasing).
fn bisect(model: &ModelSpec, p: &PencilParams, mut lo: f64, mut hi: f64) -> Result<RootResult> {
    let zero = ExtReal::Finite(0.0);
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted at f64 resolution
        }
        let v = phi(model, p, mid)?;
        if v < zero {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < ROOT_TOL * (1.0 + mid.abs()) {
            break;
        }
    }
    // Report whichever endpoint has the smaller pencil magnitude.
    let (vlo, vhi) = (phi(model, p, lo)?, phi(model, p, hi)?);
    let pick_lo = vlo.to_f64().abs() <= vhi.to_f64().abs();
    let (root, res) = if pick_lo { (lo, vlo) } else { (hi, vhi) };
    Ok(RootResult { exists: true, value: Some(root), residual: res.to_f64(), bracket: (lo, hi) })
}

/// Computes all four coupling thresholds at a given `gamma`.
pub fn critical_couplings(model: &ModelSpec, gamma: f64) -> Result<CriticalCouplings> {
    let (w0, w1) = model.bounds();

    let alpha1 = if -2.0 * gamma - w0 > 0.0 {
        match model.moment(-w0, 1)? {
            ExtReal::Finite(m) => Threshold::Defined(((-2.0 * gamma - w0) / m).sqrt()),
            _ => Threshold::InfiniteIntegral,
        }
    } else {
        Threshold::NotApplicable
    };

    let alpha3 = if w1 + 2.0 * gamma > 0.0 {
        match model.reflected_moment(w1, 1)? {
            ExtReal::Finite(m) => Threshold::Defined(((w1 + 2.0 * gamma) / m).sqrt()),
            _ => Threshold::InfiniteIntegral,
        }
    } else {
        Threshold::NotApplicable
    };

    // The gap-opening integrals have denominators bounded away from zero, so
    // they are always finite.
    let num2 = w1 - 2.0 * w0 - 2.0 * gamma;
    let alpha2 = if num2 > 0.0 {
        let d = model.moment(w1 - 2.0 * w0, 1)?.value().expect("bounded denominator");
        Threshold::Defined((num2 / d).sqrt())
    } else {
        Threshold::NotApplicable
    };

    let num4 = 2.0 * w1 - w0 + 2.0 * gamma;
    let alpha4 = if num4 > 0.0 {
        let d = model.reflected_moment(2.0 * w1 - w0, 1)?.value().expect("bounded denominator");
        Threshold::Defined((num4 / d).sqrt())
    } else {
        Threshold::NotApplicable
    };

    Ok(CriticalCouplings { alpha1, alpha2, alpha3, alpha4 })
}

/// Which spectral gap an expansion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapEdge {
    /// Gap between the lower branch and the two-particle band.
    Lower,
    /// Gap between the band and the upper branch.
    Upper,
}

/// First-order expansion of a pencil root at its gap-opening threshold:
/// `root(alpha) = anchor + slope (alpha - alpha_crit) + o(alpha - alpha_crit)`.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeExpansion {
    pub edge: GapEdge,
    pub alpha_crit: f64,
    /// Root location at the threshold.
    pub anchor: f64,
    /// d(root)/d(alpha) at the threshold, one-sided from above.
    pub slope: f64,
}

impl EdgeExpansion {
    /// Predicted gap length for `alpha` slightly above the threshold.
    pub fn gap_length(&self, alpha: f64) -> f64 {
        (self.slope.abs() * (alpha - self.alpha_crit)).max(0.0)
    }
}

/// Linear expansion of `E` (lower) or `F` (upper) at the corresponding
/// gap-opening coupling, by implicit differentiation of the pencil.
pub fn gap_asymptotics(model: &ModelSpec, gamma: f64, edge: GapEdge) -> Result<EdgeExpansion> {
    let (w0, w1) = model.bounds();
    match edge {
        GapEdge::Lower => {
            let num = w1 - 2.0 * w0 - 2.0 * gamma;
            if num < 0.0 {
                return Err(Error::RangeError { gamma });
            }
            let t = w1 - 2.0 * w0;
            let d1 = model.moment(t, 1)?.value().expect("bounded denominator");
            let c = model.moment(t, 2)?.value().expect("bounded denominator");
            let ac = (num / d1).sqrt();
            let slope = -2.0 * ac * d1 / (1.0 + ac * ac * c);
            Ok(EdgeExpansion { edge, alpha_crit: ac, anchor: 2.0 * w0 - w1 + gamma, slope })
        }
        GapEdge::Upper => {
            let num = 2.0 * w1 - w0 + 2.0 * gamma;
            if num < 0.0 {
                return Err(Error::RangeError { gamma });
            }
            let t = 2.0 * w1 - w0;
            let d4 = model.reflected_moment(t, 1)?.value().expect("bounded denominator");
            let c = model.reflected_moment(t, 2)?.value().expect("bounded denominator");
            let ac = (num / d4).sqrt();
            let slope = 2.0 * ac * d4 / (1.0 + ac * ac * c);
            Ok(EdgeExpansion { edge, alpha_crit: ac, anchor: 2.0 * w1 - w0 + gamma, slope })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{m1, m2};
    use std::f64::consts::PI;

    // integral of sin^4 k / (a - cos k) over [-pi, pi], a > 1
    fn i_closed(a: f64) -> f64 {
        2.0 * PI * (a * a - 1.0).powf(1.5) + 3.0 * PI * a - 2.0 * PI * a.powi(3)
    }

    #[test]
    fn phi_matches_closed_form() {
        // M1, gamma = 0, alpha = 1, z = -2: J(-2) = I(3)
        let m = m1();
        let p = PencilParams::new(0.0, 1.0);
        let got = phi(&m, &p, -2.0).unwrap().value().unwrap();
        let expect = 2.0 - i_closed(3.0);
        assert!((got - expect).abs() < 1e-9, "got {got} want {expect}");
    }

    #[test]
    fn phi_rejects_in_band_points() {
        let m = m1();
        let p = PencilParams::new(0.5, 1.0);
        assert!(matches!(
            phi(&m, &p, 1.0),
            Err(crate::Error::DomainError { .. })
        ));
    }

    #[test]
    fn phi_limits_closed_form() {
        // M1: m_sqrt = M_sqrt = pi
        let m = m1();
        let p = PencilParams::new(-1.0, 1.0);
        let (lo, hi) = phi_limits(&m, &p).unwrap();
        assert!((lo.value().unwrap() - (2.0 - PI)).abs() < 1e-9);
        assert!((hi.value().unwrap() - PI).abs() < 1e-9);
    }

    #[test]
    fn phi_is_strictly_decreasing_below_band() {
        let m = m1();
        let p = PencilParams::new(0.0, 2.0);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let z = -10.0 + 0.24 * i as f64;
            let v = phi(&m, &p, z).unwrap().value().unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn roots_exist_iff_limits_cross_zero() {
        let m = m1();
        // gamma = 0: lower limit = -alpha^2 pi < 0 for alpha > 0, so E exists.
        let p = PencilParams::new(0.0, 3.0);
        let e = find_e(&m, &p).unwrap();
        assert!(e.exists);
        let ev = e.value.unwrap();
        assert!(ev < 0.0 && (-5.0..-4.0).contains(&ev), "E = {ev}");
        assert!(e.residual.abs() < 1e-9);

        let f = find_f(&m, &p).unwrap();
        assert!(f.exists);
        let fv = f.value.unwrap();
        assert!(fv > 2.0 && (5.0..6.0).contains(&fv), "F = {fv}");
        assert!(f.residual.abs() < 1e-9);

        // alpha small, gamma = 0: upper limit = -2 + alpha^2 pi < 0, no F.
        let p = PencilParams::new(0.0, 0.5);
        assert!(!find_f(&m, &p).unwrap().exists);
        // and E always exists at gamma = 0 for alpha > 0
        assert!(find_e(&m, &p).unwrap().exists);
    }

    #[test]
    fn root_satisfies_pencil_equation() {
        let m = m1();
        for (gamma, alpha) in [(0.0, 1.5), (-0.7, 2.0), (0.4, 2.5)] {
            let p = PencilParams::new(gamma, alpha);
            let e = find_e(&m, &p).unwrap();
            if let Some(z) = e.value {
                let v = phi(&m, &p, z).unwrap().to_f64();
                assert!(v.abs() < 1e-8, "residual {v} at gamma={gamma} alpha={alpha}");
            }
        }
    }

    #[test]
    fn critical_couplings_m1() {
        let m = m1();
        // gamma = -1: alpha1 = sqrt(2/pi)
        let c = critical_couplings(&m, -1.0).unwrap();
        let a1 = c.alpha1.value().unwrap();
        assert!((a1 - (2.0 / PI).sqrt()).abs() < 1e-9, "alpha1 = {a1}");

        // gamma = 0: alpha1 not applicable, alpha2 = sqrt(2 / I(3)),
        // alpha3 = sqrt(2/pi), alpha4 = sqrt(4 / I(3)).
        let c = critical_couplings(&m, 0.0).unwrap();
        assert_eq!(c.alpha1, Threshold::NotApplicable);
        let i3 = i_closed(3.0);
        assert!((c.alpha2.value().unwrap() - (2.0 / i3).sqrt()).abs() < 1e-8);
        assert!((c.alpha3.value().unwrap() - (2.0 / PI).sqrt()).abs() < 1e-9);
        assert!((c.alpha4.value().unwrap() - (4.0 / i3).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn divergent_integral_gives_zero_threshold() {
        // M2: m_sqrt infinite, so the detachment threshold collapses to 0.
        let c = critical_couplings(&m2(), -1.0).unwrap();
        assert_eq!(c.alpha1, Threshold::InfiniteIntegral);
        assert_eq!(c.alpha1.effective(), Some(0.0));
    }

    #[test]
    fn e_exists_exactly_above_alpha1() {
        let m = m1();
        let gamma = -1.0;
        let a1 = critical_couplings(&m, gamma).unwrap().alpha1.value().unwrap();
        let below = PencilParams::new(gamma, 0.95 * a1);
        let above = PencilParams::new(gamma, 1.05 * a1);
        assert!(!find_e(&m, &below).unwrap().exists);
        assert!(find_e(&m, &above).unwrap().exists);
    }

    #[test]
    fn gap_expansion_matches_finite_differences() {
        let m = m1();
        for edge in [GapEdge::Lower, GapEdge::Upper] {
            let exp = gap_asymptotics(&m, 0.0, edge).unwrap();
            let da = 1e-4;
            let p = PencilParams::new(0.0, exp.alpha_crit + da);
            let root = match edge {
                GapEdge::Lower => find_e(&m, &p).unwrap().value.unwrap(),
                GapEdge::Upper => find_f(&m, &p).unwrap().value.unwrap(),
            };
            let fd = (root - exp.anchor) / da;
            assert!(
                (fd - exp.slope).abs() < 1e-2 * exp.slope.abs(),
                "{edge:?}: fd {fd} slope {}",
                exp.slope
            );
        }
    }

    #[test]
    fn gap_expansion_out_of_range() {
        // Lower gap needs gamma <= omega1/2 - omega0 = 1 for M1.
        assert!(matches!(
            gap_asymptotics(&m1(), 1.5, GapEdge::Lower),
            Err(crate::Error::RangeError { .. })
        ));
    }
}

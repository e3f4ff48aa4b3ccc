//! Composite Gauss-Legendre quadrature with geometric refinement toward
//! integrable (or non-integrable) singular points.
//!
//! The singular-point machinery implements the finite/infinite dichotomy the
//! rest of the crate relies on: an integral of a nonnegative integrand is
//! evaluated by dyadic shells shrinking toward each singular point, and the
//! shell contributions are classified by their geometric ratio. Decaying
//! shells are summed and geometrically extrapolated; growing or stagnant
//! shells mean divergence.

use crate::extreal::ExtReal;
use crate::model::QuadratureSettings;
use crate::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes and weights by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss rule needs at least two nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn panel(&self, f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule with `panels` equal panels over `[a, b]`.
    pub fn composite(&self, f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            acc += self.panel(f, a + i as f64 * h, a + (i + 1) as f64 * h);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shell ratio below which a tail is accepted as geometrically convergent.
const RATIO_FINITE: f64 = 0.97;
/// Shell ratio at or above which the tail is declared divergent.
const RATIO_DIVERGENT: f64 = 0.999;
/// Relative shell size below which the tail is negligible outright.
const TAIL_NEGLIGIBLE: f64 = 1e-13;
/// Shells stop shrinking below this fraction of the initial radius.
const MIN_SHELL_FRACTION: f64 = 1e-15;

/// Integrates a nonnegative integrand over `[a, b]` with singular refinement
/// toward each point of `singular`, deciding finiteness per the dichotomy.
///
/// `f` must be evaluable at every interior quadrature node (nodes never land
/// exactly on a singular point).
pub fn integrate_singular(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    singular: &[f64],
    settings: &QuadratureSettings,
) -> Result<ExtReal> {
    assert!(b > a);
    let rule = GaussRule::new(settings.nodes_per_panel);
    if singular.is_empty() {
        return Ok(ExtReal::finite(rule.composite(f, a, b, settings.panels)));
    }

    let mut pts: Vec<f64> = singular.to_vec();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (b - a));

    // Exclusion radius per point: stay clear of neighbors and the far edge.
    let radii: Vec<f64> = pts
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut r = (b - a) / 8.0;
            if i > 0 {
                r = r.min(0.5 * (s - pts[i - 1]));
            }
            if i + 1 < pts.len() {
                r = r.min(0.5 * (pts[i + 1] - s));
            }
            if s - a > 1e-12 * (b - a) {
                r = r.min(s - a);
            }
            if b - s > 1e-12 * (b - a) {
                r = r.min(b - s);
            }
            r.max(1e-10 * (b - a))
        })
        .collect();

    // Smooth segments between exclusion zones.
    let mut smooth = 0.0;
    let mut cursor = a;
    for (&s, &r) in pts.iter().zip(&radii) {
        let lo = (s - r).max(a);
        if lo - cursor > 1e-14 * (b - a) {
            smooth += rule.composite(f, cursor, lo, settings.panels);
        }
        cursor = (s + r).min(b);
    }
    if b - cursor > 1e-14 * (b - a) {
        smooth += rule.composite(f, cursor, b, settings.panels);
    }

    // Shell series into each singular point, one per side inside the domain.
    let mut total = smooth;
    for (&s, &r) in pts.iter().zip(&radii) {
        for side in [-1.0f64, 1.0] {
            let edge = s + side * r;
            if edge < a - 1e-14 * (b - a) || edge > b + 1e-14 * (b - a) {
                continue;
            }
            if (side < 0.0 && s - a < 1e-12 * (b - a)) || (side > 0.0 && b - s < 1e-12 * (b - a)) {
                continue; // singular point sits on this boundary
            }
            match shell_series(f, &rule, s, side * r, smooth.abs(), settings)? {
                ExtReal::Finite(v) => total += v,
                inf => return Ok(inf),
            }
        }
    }
    Ok(ExtReal::finite(total))
}

/// One-sided dyadic shell sum from `s + signed_r` toward `s`.
fn shell_series(
    f: &mut dyn FnMut(f64) -> f64,
    rule: &GaussRule,
    s: f64,
    signed_r: f64,
    scale_hint: f64,
    settings: &QuadratureSettings,
) -> Result<ExtReal> {
    let mut partial = 0.0;
    let mut shells: Vec<f64> = Vec::new();
    let mut delta = signed_r;
    for _ in 0..settings.singular_refinement_depth {
        let next = 0.5 * delta;
        let (lo, hi) = if signed_r > 0.0 {
            (s + next, s + delta)
        } else {
            (s + delta, s + next)
        };
        let d = rule.panel(f, lo, hi);
        if !d.is_finite() {
            return Ok(ExtReal::PosInf);
        }
        partial += d;
        shells.push(d);
        if partial > settings.divergence_threshold {
            return Ok(ExtReal::PosInf);
        }
        let scale = scale_hint + partial.abs() + 1e-300;
        if d.abs() < 1e-17 * scale {
            return Ok(ExtReal::finite(partial));
        }
        delta = next;
        if delta.abs() < MIN_SHELL_FRACTION * signed_r.abs() {
            break;
        }
    }

    let n = shells.len();
    let last = shells[n - 1];
    let scale = scale_hint + partial.abs() + 1e-300;
    if last.abs() < TAIL_NEGLIGIBLE * scale {
        return Ok(ExtReal::finite(partial));
    }
    // Geometric-mean ratio over the last few shells.
    let lookback = 4.min(n - 1);
    if lookback == 0 {
        return Err(Error::Indeterminate { ratio: f64::NAN });
    }
    let first = shells[n - 1 - lookback];
    if first <= 0.0 || last <= 0.0 {
        return Err(Error::Indeterminate { ratio: f64::NAN });
    }
    let ratio = (last / first).powf(1.0 / lookback as f64);
    if ratio < RATIO_FINITE {
        Ok(ExtReal::finite(partial + last * ratio / (1.0 - ratio)))
    } else if ratio >= RATIO_DIVERGENT {
        Ok(ExtReal::PosInf)
    } else {
        Err(Error::Indeterminate { ratio })
    }
}

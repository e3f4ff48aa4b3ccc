//! Essential spectrum as an explicit union of closed intervals.
//!
//! Two independent construction paths are provided. The sign path derives the
//! branch intervals directly from pencil signs at four probe points; the
//! table path walks the full parameter case split and additionally reports a
//! case identifier. Both must agree wherever the table's threshold ordering
//! assumptions hold.

use crate::extreal::ExtReal;
use crate::model::ModelSpec;
use crate::pencil::{self, PencilParams, RootResult};
use crate::{Error, Result};
use serde::Serialize;

/// A finite union of closed intervals, kept sorted and disjoint.
///
/// Endpoints within `1e-12 * (1 + |x|)` are considered touching and merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

fn touch_tol(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { intervals: Vec::new() }
    }

    /// Builds a normalized union; intervals with `hi < lo` are dropped.
    pub fn from_intervals(raw: &[(f64, f64)]) -> Self {
        let mut ivs: Vec<(f64, f64)> = raw
            .iter()
            .copied()
            .filter(|&(lo, hi)| hi >= lo - touch_tol(lo))
            .map(|(lo, hi)| (lo, hi.max(lo)))
            .collect();
        ivs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
        for (lo, hi) in ivs {
            match out.last_mut() {
                Some(last) if lo <= last.1 + touch_tol(last.1) => {
                    last.1 = last.1.max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn n_components(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| x >= lo - touch_tol(lo) && x <= hi + touch_tol(hi))
    }

    /// Distance from a point to the union (0 inside).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalUnion::from_intervals(&all)
    }

    /// Bounded complementary gaps between consecutive components.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals
            .windows(2)
            .map(|w| (w[0].1, w[1].0))
            .collect()
    }

    /// Hull endpoints, if nonempty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(&(lo, _)), Some(&(_, hi))) => Some((lo, hi)),
            _ => None,
        }
    }

    /// One-sided Hausdorff-type deviation: how far points of `self` can be
    /// from `other`.
    pub fn deviation_from(&self, other: &IntervalUnion) -> f64 {
        let mut d: f64 = 0.0;
        for &(lo, hi) in &self.intervals {
            d = d.max(other.distance_to(lo));
            d = d.max(other.distance_to(hi));
            // interior points matter only through gap midpoints of `other`
            for &(glo, ghi) in &other.gaps() {
                let mid = 0.5 * (glo + ghi);
                if mid > lo && mid < hi {
                    d = d.max(other.distance_to(mid));
                }
            }
        }
        d
    }
}

/// Full description of the essential spectrum at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub gamma: f64,
    pub alpha: f64,
    /// Essential infimum / supremum of the dispersion.
    pub omega0: f64,
    pub omega1: f64,
    pub spectrum: IntervalUnion,
    pub e_root: RootResult,
    pub f_root: RootResult,
    /// Gap between the lower branch and the two-particle band, if open.
    pub gap_lower: Option<(f64, f64)>,
    /// Gap between the band and the upper branch, if open.
    pub gap_upper: Option<(f64, f64)>,
    /// Case identifier, set by the table path only.
    pub case_id: Option<String>,
}

impl SpectrumReport {
    fn classify_gaps(&mut self) {
        let band_lo = 2.0 * self.omega0 + self.gamma;
        let band_hi = 2.0 * self.omega1 + self.gamma;
        for (lo, hi) in self.spectrum.gaps() {
            if hi <= band_lo + touch_tol(band_lo) {
                self.gap_lower = Some((lo, hi));
            } else if lo >= band_hi - touch_tol(band_hi) {
                self.gap_upper = Some((lo, hi));
            }
        }
    }
}

/// Lower three-particle branch, from pencil signs at the band edge and at the
/// lower gap probe point.
pub fn branch_lower(model: &ModelSpec, p: &PencilParams) -> Result<(IntervalUnion, RootResult)> {
    let (w0, w1) = model.bounds();
    let e = pencil::find_e(model, p)?;
    let iv = match e.value {
        None => IntervalUnion::empty(),
        Some(ev) => {
            // E < 2 w0 - w1 + gamma means the branch detaches from the band.
            let probe = pencil::phi(model, p, 2.0 * w0 - w1 + p.gamma)?;
            if probe < ExtReal::Finite(0.0) {
                IntervalUnion::from_intervals(&[(w0 + ev, w1 + ev)])
            } else {
                IntervalUnion::from_intervals(&[(w0 + ev, 2.0 * w0 + p.gamma)])
            }
        }
    };
    Ok((iv, e))
}

/// Upper three-particle branch, mirror of [`branch_lower`].
pub fn branch_upper(model: &ModelSpec, p: &PencilParams) -> Result<(IntervalUnion, RootResult)> {
    let (w0, w1) = model.bounds();
    let f = pencil::find_f(model, p)?;
    let iv = match f.value {
        None => IntervalUnion::empty(),
        Some(fv) => {
            let probe = pencil::phi(model, p, 2.0 * w1 - w0 + p.gamma)?;
            if probe > ExtReal::Finite(0.0) {
                IntervalUnion::from_intervals(&[(w0 + fv, w1 + fv)])
            } else {
                IntervalUnion::from_intervals(&[(2.0 * w1 + p.gamma, w1 + fv)])
            }
        }
    };
    Ok((iv, f))
}

/// Essential spectrum of the reduced block operator matrix, sign path.
pub fn ess_spectrum(model: &ModelSpec, p: &PencilParams) -> Result<SpectrumReport> {
    let (w0, w1) = model.bounds();
    let (lower, e_root) = branch_lower(model, p)?;
    let (upper, f_root) = branch_upper(model, p)?;
    let band = IntervalUnion::from_intervals(&[(2.0 * w0 + p.gamma, 2.0 * w1 + p.gamma)]);
    let spectrum = lower.union(&band).union(&upper);
    let mut report = SpectrumReport {
        gamma: p.gamma,
        alpha: p.alpha,
        omega0: w0,
        omega1: w1,
        spectrum,
        e_root,
        f_root,
        gap_lower: None,
        gap_upper: None,
        case_id: None,
    };
    report.classify_gaps();
    Ok(report)
}

/// The interval shapes appearing in the case table.
#[derive(Debug, Clone, Copy)]
enum Piece {
    /// [w0 + E, w1 + E]
    LowerDetached,
    /// [w0 + E, 2 w1 + gamma]
    LowerThroughBand,
    /// [w0 + E, w1 + F]
    FullHull,
    /// [2 w0 + gamma, 2 w1 + gamma]
    Band,
    /// [2 w0 + gamma, w1 + F]
    BandThroughUpper,
    /// [w0 + F, w1 + F]
    UpperDetached,
}

struct TableRow {
    /// Upper alpha breakpoint for this row; `None` for the last row.
    up_to: Option<f64>,
    pieces: &'static [Piece],
}

fn row_needs_e(pieces: &[Piece]) -> bool {
    pieces.iter().any(|p| {
        matches!(p, Piece::LowerDetached | Piece::LowerThroughBand | Piece::FullHull)
    })
}

fn row_needs_f(pieces: &[Piece]) -> bool {
    pieces.iter().any(|p| {
        matches!(p, Piece::FullHull | Piece::BandThroughUpper | Piece::UpperDetached)
    })
}

use Piece::*;

const ROW_D: &[Piece] = &[LowerDetached, Band, UpperDetached];
const ROW_TB_U: &[Piece] = &[LowerThroughBand, UpperDetached];
const ROW_HULL: &[Piece] = &[FullHull];
const ROW_D_BU: &[Piece] = &[LowerDetached, BandThroughUpper];
const ROW_B_U: &[Piece] = &[Band, UpperDetached];
const ROW_BU: &[Piece] = &[BandThroughUpper];
const ROW_B: &[Piece] = &[Band];
const ROW_TB: &[Piece] = &[LowerThroughBand];
const ROW_D_B: &[Piece] = &[LowerDetached, Band];

/// Essential spectrum via the explicit parameter case table; also reports a
/// case identifier `"<regularity><gamma window>-<row>"`.
///
/// Fails with `OrderingViolation` when the thresholds delimiting the rows of
/// the selected sub-table are not in nondecreasing order for this model, in
/// which case the sign path remains the authority.
pub fn ess_spectrum_table(model: &ModelSpec, p: &PencilParams) -> Result<SpectrumReport> {
    let (w0, w1) = model.bounds();
    let reg = model.regularity()?;
    let lower_ok = reg.lower_sqrt_ok();
    let upper_ok = reg.upper_sqrt_ok();
    let thr = pencil::critical_couplings(model, p.gamma)?;
    let a1 = thr.alpha1.effective();
    let a2 = thr.alpha2.effective();
    let a3 = thr.alpha3.effective();
    let a4 = thr.alpha4.effective();
    let g = p.gamma;

    // Regularity class and gamma window select a sub-table of alpha rows.
    let (class, window, rows): (&str, char, Vec<TableRow>) = match (lower_ok, upper_ok) {
        (false, false) => {
            if g <= 0.5 * w0 - w1 {
                ("i", 'a', vec![
                    TableRow { up_to: a2, pieces: ROW_TB_U },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= 0.5 * w1 - w0 {
                ("i", 'b', vec![
                    TableRow { up_to: a2, pieces: ROW_HULL },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else {
                ("i", 'c', vec![
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            }
        }
        (true, false) => {
            if g <= 0.5 * w0 - w1 {
                ("ii", 'a', vec![
                    TableRow { up_to: a1, pieces: ROW_B_U },
                    TableRow { up_to: a2, pieces: ROW_TB_U },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= -0.5 * w0 {
                ("ii", 'b', vec![
                    TableRow { up_to: a1, pieces: ROW_BU },
                    TableRow { up_to: a2, pieces: ROW_HULL },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= 0.5 * w1 - w0 {
                ("ii", 'c', vec![
                    TableRow { up_to: a2, pieces: ROW_HULL },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else {
                ("ii", 'd', vec![
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            }
        }
        (false, true) => {
            if g <= 0.5 * w0 - w1 {
                ("iii", 'a', vec![
                    TableRow { up_to: a2, pieces: ROW_TB_U },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= -0.5 * w1 {
                ("iii", 'b', vec![
                    TableRow { up_to: a2, pieces: ROW_HULL },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= 0.5 * w1 - w0 {
                ("iii", 'c', vec![
                    TableRow { up_to: a2, pieces: ROW_TB },
                    TableRow { up_to: a3, pieces: ROW_D_B },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else {
                ("iii", 'd', vec![
                    TableRow { up_to: a3, pieces: ROW_D_B },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            }
        }
        (true, true) => {
            if g <= 0.5 * w0 - w1 {
                ("iv", 'a', vec![
                    TableRow { up_to: a1, pieces: ROW_B_U },
                    TableRow { up_to: a2, pieces: ROW_TB_U },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= -0.5 * w1 {
                ("iv", 'b', vec![
                    TableRow { up_to: a1, pieces: ROW_BU },
                    TableRow { up_to: a2, pieces: ROW_HULL },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= -0.5 * w0 {
                ("iv", 'c', vec![
                    TableRow { up_to: a1, pieces: ROW_B },
                    TableRow { up_to: a2, pieces: ROW_TB },
                    TableRow { up_to: a3, pieces: ROW_D_B },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else if g <= 0.5 * w1 - w0 {
                ("iv", 'd', vec![
                    TableRow { up_to: a2, pieces: ROW_TB },
                    TableRow { up_to: a3, pieces: ROW_D_B },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            } else {
                ("iv", 'e', vec![
                    TableRow { up_to: a3, pieces: ROW_D_B },
                    TableRow { up_to: a4, pieces: ROW_D_BU },
                    TableRow { up_to: None, pieces: ROW_D },
                ])
            }
        }
    };

    // The breakpoint sequence must be nondecreasing, otherwise the sub-table
    // does not describe this model. A threshold undefined at a window
    // boundary acts as 0: its row is simply never selected.
    let breakpoints: Vec<f64> = rows[..rows.len() - 1]
        .iter()
        .map(|row| row.up_to.unwrap_or(0.0))
        .collect();
    for w in breakpoints.windows(2) {
        if w[1] < w[0] {
            return Err(Error::OrderingViolation {
                details: format!(
                    "case {class}{window}: thresholds {:?} are not nondecreasing",
                    breakpoints
                ),
            });
        }
    }

    let mut row_idx = rows.len() - 1;
    for (i, b) in breakpoints.iter().enumerate() {
        if p.alpha <= *b {
            row_idx = i;
            break;
        }
    }
    let pieces = rows[row_idx].pieces;

    // Roots, with the band edge as the limit value should a root search land
    // exactly on its threshold.
    let mut e_root = pencil::find_e(model, p)?;
    let mut f_root = pencil::find_f(model, p)?;
    let ev = if row_needs_e(pieces) {
        Some(match e_root.value {
            Some(v) => v,
            None => {
                e_root.exists = true;
                e_root.value = Some(w0 + g);
                w0 + g
            }
        })
    } else {
        None
    };
    let fv = if row_needs_f(pieces) {
        Some(match f_root.value {
            Some(v) => v,
            None => {
                f_root.exists = true;
                f_root.value = Some(w1 + g);
                w1 + g
            }
        })
    } else {
        None
    };

    let mut ivs: Vec<(f64, f64)> = Vec::new();
    for piece in pieces {
        let iv = match piece {
            Piece::LowerDetached => (w0 + ev.unwrap(), w1 + ev.unwrap()),
            Piece::LowerThroughBand => (w0 + ev.unwrap(), 2.0 * w1 + g),
            Piece::FullHull => (w0 + ev.unwrap(), w1 + fv.unwrap()),
            Piece::Band => (2.0 * w0 + g, 2.0 * w1 + g),
            Piece::BandThroughUpper => (2.0 * w0 + g, w1 + fv.unwrap()),
            Piece::UpperDetached => (w0 + fv.unwrap(), w1 + fv.unwrap()),
        };
        ivs.push(iv);
    }

    let mut report = SpectrumReport {
        gamma: g,
        alpha: p.alpha,
        omega0: w0,
        omega1: w1,
        spectrum: IntervalUnion::from_intervals(&ivs),
        e_root,
        f_root,
        gap_lower: None,
        gap_upper: None,
        case_id: Some(format!("{class}{window}-{}", row_idx + 1)),
    };
    report.classify_gaps();
    Ok(report)
}

/// Essential spectrum of the full two-boson Hamiltonian: the union over the
/// two reduced matrices at `gamma = +epsilon` and `gamma = -epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianReport {
    pub epsilon: f64,
    pub alpha: f64,
    pub plus: SpectrumReport,
    pub minus: SpectrumReport,
    pub spectrum: IntervalUnion,
}

pub fn ess_spectrum_hamiltonian(
    model: &ModelSpec,
    epsilon: f64,
    alpha: f64,
) -> Result<HamiltonianReport> {
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    let plus = ess_spectrum(model, &PencilParams::new(epsilon, alpha))?;
    let minus = ess_spectrum(model, &PencilParams::new(-epsilon, alpha))?;
    let spectrum = plus.spectrum.union(&minus.spectrum);
    Ok(HamiltonianReport { epsilon, alpha, plus, minus, spectrum })
}

/// Re-export used by reports.
pub use crate::pencil::CriticalCouplings;

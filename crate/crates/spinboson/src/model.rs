//! Model parameter functions: the dispersion `omega`, the coupling `lambda`,
//! their bounds, moment integrals and the regularity flags that drive every
//! case split downstream.

use crate::extreal::ExtReal;
use crate::quad::{integrate_singular, GaussRule};
use crate::{Error, Result};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub type C64 = Complex<f64>;

/// Composite-quadrature configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Composite subintervals per smooth segment.
    pub panels: usize,
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
    /// Dyadic refinement levels toward each singular point.
    pub singular_refinement_depth: usize,
    /// Partial sums beyond this are declared infinite.
    pub divergence_threshold: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            panels: 32,
            nodes_per_panel: 12,
            singular_refinement_depth: 52,
            divergence_threshold: 1e8,
        }
    }
}

impl QuadratureSettings {
    fn validate(&self) -> Result<()> {
        if self.panels < 8 {
            return Err(Error::InvalidModel("quadrature.panels must be >= 8".into()));
        }
        if self.nodes_per_panel < 2 {
            return Err(Error::InvalidModel("quadrature.nodes_per_panel must be >= 2".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidModel("quadrature.divergence_threshold must be > 0".into()));
        }
        Ok(())
    }
}

/// A parameter function: registered family or tabulated samples with linear
/// interpolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FuncSpec {
    Family {
        family: String,
        #[serde(default)]
        params: Vec<f64>,
    },
    Table {
        table: Vec<Vec<f64>>,
    },
}

/// On-disk model description (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub dimension: u32,
    pub support: [f64; 2],
    pub dispersion: FuncSpec,
    pub coupling: FuncSpec,
    #[serde(default)]
    pub quadrature: Option<QuadratureSettings>,
}

#[derive(Debug, Clone)]
enum Dispersion {
    /// omega(k) = 1 - cos k
    OneMinusCos,
    /// omega(k) = a + b sin k
    OffsetSin { a: f64, b: f64 },
    /// piecewise-linear table, sorted by k
    Table { ks: Vec<f64>, ws: Vec<f64> },
}

impl Dispersion {
    fn eval(&self, k: f64) -> f64 {
        match self {
            Dispersion::OneMinusCos => 1.0 - k.cos(),
            Dispersion::OffsetSin { a, b } => a + b * k.sin(),
            Dispersion::Table { ks, ws } => table_interp(ks, ws, k),
        }
    }

    /// `omega(k) - omega(k0)`, computed without cancellation for the
    /// registered families.
    fn diff(&self, k: f64, k0: f64) -> f64 {
        match self {
            Dispersion::OneMinusCos => {
                2.0 * (0.5 * (k + k0)).sin() * (0.5 * (k - k0)).sin()
            }
            Dispersion::OffsetSin { b, .. } => {
                2.0 * b * (0.5 * (k + k0)).cos() * (0.5 * (k - k0)).sin()
            }
            Dispersion::Table { .. } => self.eval(k) - self.eval(k0),
        }
    }

    /// Interior stationary points plus support endpoints: every candidate
    /// location for an extremum of omega on `[a, b]`.
    fn extremum_candidates(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = vec![a, b];
        match self {
            Dispersion::OneMinusCos => push_lattice(&mut out, a, b, 0.0, std::f64::consts::PI),
            Dispersion::OffsetSin { .. } => push_lattice(
                &mut out,
                a,
                b,
                0.5 * std::f64::consts::PI,
                std::f64::consts::PI,
            ),
            Dispersion::Table { ks, .. } => {
                out.extend(ks.iter().copied().filter(|&k| k > a && k < b));
            }
        }
        out
    }
}

/// Appends `offset + n*step` for all integers n landing inside `(a, b)`.
fn push_lattice(out: &mut Vec<f64>, a: f64, b: f64, offset: f64, step: f64) {
    let n0 = ((a - offset) / step).floor() as i64;
    let n1 = ((b - offset) / step).ceil() as i64;
    for n in n0..=n1 {
        let k = offset + n as f64 * step;
        if k > a && k < b {
            out.push(k);
        }
    }
}

fn table_interp(ks: &[f64], vs: &[f64], k: f64) -> f64 {
    if k <= ks[0] {
        return vs[0];
    }
    if k >= ks[ks.len() - 1] {
        return vs[vs.len() - 1];
    }
    let i = ks.partition_point(|&x| x <= k).min(ks.len() - 1);
    let (k0, k1) = (ks[i - 1], ks[i]);
    let t = (k - k0) / (k1 - k0);
    vs[i - 1] * (1.0 - t) + vs[i] * t
}

#[derive(Debug, Clone)]
enum Coupling {
    Const(C64),
    SinSquared,
    OneMinusCos,
    OnePlusCos,
    Table { ks: Vec<f64>, re: Vec<f64>, im: Vec<f64> },
}

impl Coupling {
    fn eval(&self, k: f64) -> C64 {
        match self {
            Coupling::Const(c) => *c,
            Coupling::SinSquared => C64::new(k.sin().powi(2), 0.0),
            // half-angle forms stay accurate where the naive expressions
            // cancel catastrophically
            Coupling::OneMinusCos => C64::new(2.0 * (0.5 * k).sin().powi(2), 0.0),
            Coupling::OnePlusCos => C64::new(2.0 * (0.5 * k).cos().powi(2), 0.0),
            Coupling::Table { ks, re, im } => {
                C64::new(table_interp(ks, re, k), table_interp(ks, im, k))
            }
        }
    }
}

/// Finiteness report for the five regularity integrals.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// integral of |lambda|^2 / (omega - omega0)
    pub m_sqrt: ExtReal,
    /// integral of |lambda|^2 / (omega1 - omega)
    pub m_upper_sqrt: ExtReal,
    /// integral of |lambda|^2 / (omega - omega0)^2
    pub m_full: ExtReal,
    /// integral of |lambda|^2 / (omega1 - omega)^2
    pub m_upper_full: ExtReal,
    /// integral of |lambda|^2 / ((omega - omega0)(omega1 - omega))
    pub mixed: ExtReal,
    /// finiteness flags, in the field order above
    pub flags: [bool; 5],
}

impl RegularityReport {
    pub fn lower_sqrt_ok(&self) -> bool {
        self.flags[0]
    }
    pub fn upper_sqrt_ok(&self) -> bool {
        self.flags[1]
    }
    pub fn lower_full_ok(&self) -> bool {
        self.flags[2]
    }
    pub fn upper_full_ok(&self) -> bool {
        self.flags[3]
    }
    pub fn mixed_ok(&self) -> bool {
        self.flags[4]
    }
}

/// The physical input: dispersion, coupling, support and quadrature settings.
///
/// Immutable after construction; every operation is a pure function of the
/// spec and safe to call concurrently.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    file: ModelFile,
    dispersion: Dispersion,
    coupling: Coupling,
    support: (f64, f64),
    dimension: u32,
    quadrature: QuadratureSettings,
    omega0: f64,
    omega1: f64,
    min_points: Vec<f64>,
    max_points: Vec<f64>,
}

impl ModelSpec {
    pub fn from_file_spec(file: ModelFile) -> Result<Self> {
        let [a, b] = file.support;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidModel("support must be a finite interval [a, b] with a < b".into()));
        }
        if file.dimension == 0 {
            return Err(Error::InvalidModel("dimension must be >= 1".into()));
        }
        if file.dimension >= 2 && a < 0.0 {
            return Err(Error::InvalidModel(
                "radial-profile mode (dimension >= 2) requires support within [0, inf)".into(),
            ));
        }
        let quadrature = file.quadrature.clone().unwrap_or_default();
        quadrature.validate()?;

        let dispersion = compile_dispersion(&file.dispersion)?;
        let coupling = compile_coupling(&file.coupling)?;

        // Locate the attained extrema of omega over the support.
        let mut cands = dispersion.extremum_candidates(a, b);
        cands.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cands.dedup_by(|x, y| (*x - *y).abs() < 1e-13 * (b - a));
        let vals: Vec<f64> = cands.iter().map(|&k| dispersion.eval(k)).collect();
        let omega0 = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let omega1 = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = omega1 - omega0;
        if range < 1e-9 {
            return Err(Error::DegenerateDispersion { range });
        }
        if vals.iter().any(|v| *v < -1e-12 * (1.0 + range)) {
            return Err(Error::InvalidModel("dispersion must be nonnegative".into()));
        }
        let tol = 1e-10 * range;
        let min_points: Vec<f64> = cands
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| v - omega0 < tol)
            .map(|(&k, _)| k)
            .collect();
        let max_points: Vec<f64> = cands
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| omega1 - v < tol)
            .map(|(&k, _)| k)
            .collect();

        // Zero-measure level-set check for tabulated dispersions: a flat
        // plateau at either extremum has positive measure and is rejected.
        if let Dispersion::Table { ks, ws } = &dispersion {
            for i in 0..ws.len() - 1 {
                let flat = (ws[i] - ws[i + 1]).abs() < tol;
                let at_extreme = (ws[i] - omega0).abs() < tol || (ws[i] - omega1).abs() < tol;
                if flat && at_extreme && ks[i] >= a && ks[i + 1] <= b {
                    return Err(Error::InvalidModel(
                        "tabulated dispersion has a flat plateau at an extremum (level set of positive measure)".into(),
                    ));
                }
            }
        }

        let dimension = file.dimension;
        let model = ModelSpec {
            file,
            dispersion,
            coupling,
            support: (a, b),
            dimension,
            quadrature,
            omega0,
            omega1,
            min_points,
            max_points,
        };

        if model.coupling_norm_sq() <= 0.0 {
            return Err(Error::InvalidModel("coupling must not vanish identically".into()));
        }
        Ok(model)
    }

    /// Loads a model from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text)?;
        Self::from_file_spec(file)
    }

    pub fn file_spec(&self) -> &ModelFile {
        &self.file
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn quadrature(&self) -> &QuadratureSettings {
        &self.quadrature
    }

    pub fn with_quadrature(mut self, q: QuadratureSettings) -> Result<Self> {
        q.validate()?;
        self.quadrature = q;
        self.file.quadrature = Some(self.quadrature.clone());
        Ok(self)
    }

    /// Essential infimum and supremum of omega over the support.
    pub fn bounds(&self) -> (f64, f64) {
        (self.omega0, self.omega1)
    }

    /// Pointwise evaluation; lambda vanishes outside the support.
    pub fn eval(&self, k: f64) -> (f64, C64) {
        let w = self.dispersion.eval(k);
        let (a, b) = self.support;
        let l = if k < a || k > b {
            C64::new(0.0, 0.0)
        } else {
            self.coupling.eval(k)
        };
        (w, l)
    }

    /// `omega(k) - omega0`, cancellation-free near the minimum set.
    pub fn above_min(&self, k: f64) -> f64 {
        let k0 = nearest(&self.min_points, k);
        let base = self.dispersion.eval(k0) - self.omega0; // ~0, exact at the attained min
        (self.dispersion.diff(k, k0) + base).max(0.0)
    }

    /// `omega1 - omega(k)`, cancellation-free near the maximum set.
    pub fn below_max(&self, k: f64) -> f64 {
        let k1 = nearest(&self.max_points, k);
        let base = self.omega1 - self.dispersion.eval(k1);
        (base - self.dispersion.diff(k, k1)).max(0.0)
    }

    /// Radial-profile Jacobian (1 in the native one-dimensional mode).
    pub fn jacobian(&self, k: f64) -> f64 {
        if self.dimension <= 1 {
            1.0
        } else {
            sphere_area(self.dimension) * k.abs().powi(self.dimension as i32 - 1)
        }
    }

    /// `|lambda(k)|^2` times the Jacobian: the weight of every scalar integral.
    pub fn weight(&self, k: f64) -> f64 {
        let l = self.coupling.eval(k);
        l.norm_sqr() * self.jacobian(k)
    }

    /// `||lambda||^2` over the support.
    pub fn coupling_norm_sq(&self) -> f64 {
        let rule = GaussRule::new(self.quadrature.nodes_per_panel.max(8));
        let (a, b) = self.support;
        rule.composite(&mut |k| self.weight(k), a, b, self.quadrature.panels.max(32))
    }

    /// `integral |lambda|^2 / (omega + shift)^power`.
    ///
    /// Declared `+inf` when the singular refinement fails to converge and the
    /// partial sums keep growing; borderline tails raise `Indeterminate`.
    pub fn moment(&self, shift: f64, power: i32) -> Result<ExtReal> {
        assert!(power == 1 || power == 2, "moment power must be 1 or 2");
        let range = self.omega1 - self.omega0;
        let floor = self.omega0 + shift; // min of omega + shift
        if floor < -1e-12 * (1.0 + range) {
            return Err(Error::NegativeDenominator);
        }
        let floor = floor.max(0.0);
        let mut f = |k: f64| {
            let d = self.above_min(k) + floor;
            self.weight(k) / d.powi(power)
        };
        let (a, b) = self.support;
        let singular: &[f64] = if floor < 0.05 * range { &self.min_points } else { &[] };
        integrate_singular(&mut f, a, b, singular, &self.quadrature)
    }

    /// `integral |lambda|^2 / (t - omega)^power` for `t >= omega1`.
    pub fn reflected_moment(&self, t: f64, power: i32) -> Result<ExtReal> {
        assert!(power == 1 || power == 2);
        let range = self.omega1 - self.omega0;
        let floor = t - self.omega1;
        if floor < -1e-12 * (1.0 + range) {
            return Err(Error::NegativeDenominator);
        }
        let floor = floor.max(0.0);
        let mut f = |k: f64| {
            let d = self.below_max(k) + floor;
            self.weight(k) / d.powi(power)
        };
        let (a, b) = self.support;
        let singular: &[f64] = if floor < 0.05 * range { &self.max_points } else { &[] };
        integrate_singular(&mut f, a, b, singular, &self.quadrature)
    }

    /// `integral |lambda|^2 / ((omega - omega0)(omega1 - omega))`.
    pub fn mixed_moment(&self) -> Result<ExtReal> {
        let mut pts = self.min_points.clone();
        pts.extend_from_slice(&self.max_points);
        let mut f = |k: f64| self.weight(k) / (self.above_min(k) * self.below_max(k));
        let (a, b) = self.support;
        integrate_singular(&mut f, a, b, &pts, &self.quadrature)
    }

    /// Signed resolvent moment `integral |lambda|^2 / (omega - t)` for `t`
    /// outside the open interval `(omega0, omega1)`.
    pub fn resolvent_moment(&self, t: f64) -> Result<ExtReal> {
        if t <= self.omega0 {
            self.moment(-t, 1)
        } else if t >= self.omega1 {
            Ok(self.reflected_moment(t, 1)?.neg())
        } else {
            Err(Error::DomainError { z: t, lo: self.omega0, hi: self.omega1 })
        }
    }

    /// The five regularity integrals and their finiteness flags.
    pub fn regularity(&self) -> Result<RegularityReport> {
        let m_sqrt = self.moment(-self.omega0, 1)?;
        let m_upper_sqrt = self.reflected_moment(self.omega1, 1)?;
        let m_full = self.moment(-self.omega0, 2)?;
        let m_upper_full = self.reflected_moment(self.omega1, 2)?;
        let mixed = self.mixed_moment()?;
        let flags = [
            m_sqrt.is_finite(),
            m_upper_sqrt.is_finite(),
            m_full.is_finite(),
            m_upper_full.is_finite(),
            mixed.is_finite(),
        ];
        Ok(RegularityReport { m_sqrt, m_upper_sqrt, m_full, m_upper_full, mixed, flags })
    }
}

fn nearest(points: &[f64], k: f64) -> f64 {
    debug_assert!(!points.is_empty());
    let mut best = points[0];
    for &p in &points[1..] {
        if (k - p).abs() < (k - best).abs() {
            best = p;
        }
    }
    best
}

fn sphere_area(d: u32) -> f64 {
    // surface area of the unit sphere in d dimensions
    let d = d as f64;
    2.0 * std::f64::consts::PI.powf(0.5 * d) / gamma_half_integer(d)
}

/// Gamma(x) for x a positive multiple of 1/2.
fn gamma_half_integer(two_x_over: f64) -> f64 {
    let mut x = 0.5 * two_x_over;
    let mut acc = 1.0;
    while x > 1.5 {
        x -= 1.0;
        acc *= x;
    }
    if (x - 1.0).abs() < 1e-12 {
        acc
    } else {
        acc * std::f64::consts::PI.sqrt()
    }
}

fn compile_dispersion(spec: &FuncSpec) -> Result<Dispersion> {
    match spec {
        FuncSpec::Family { family, params } => match family.as_str() {
            "one-minus-cos" => Ok(Dispersion::OneMinusCos),
            "offset-sin" => {
                if params.len() != 2 {
                    return Err(Error::InvalidModel("offset-sin takes params [a, b]".into()));
                }
                Ok(Dispersion::OffsetSin { a: params[0], b: params[1] })
            }
            other => Err(Error::InvalidModel(format!("unknown dispersion family '{other}'"))),
        },
        FuncSpec::Table { table } => {
            if table.len() < 2 || table.iter().any(|row| row.len() != 2) {
                return Err(Error::InvalidModel("dispersion table rows must be [k, omega]".into()));
            }
            let mut rows = table.clone();
            rows.sort_by(|x, y| x[0].partial_cmp(&y[0]).unwrap());
            Ok(Dispersion::Table {
                ks: rows.iter().map(|r| r[0]).collect(),
                ws: rows.iter().map(|r| r[1]).collect(),
            })
        }
    }
}

fn compile_coupling(spec: &FuncSpec) -> Result<Coupling> {
    match spec {
        FuncSpec::Family { family, params } => match family.as_str() {
            "const" => match params.len() {
                1 => Ok(Coupling::Const(C64::new(params[0], 0.0))),
                2 => Ok(Coupling::Const(C64::new(params[0], params[1]))),
                _ => Err(Error::InvalidModel("const coupling takes [re] or [re, im]".into())),
            },
            "sin-squared" => Ok(Coupling::SinSquared),
            "one-minus-cos" => Ok(Coupling::OneMinusCos),
            "one-plus-cos" => Ok(Coupling::OnePlusCos),
            other => Err(Error::InvalidModel(format!("unknown coupling family '{other}'"))),
        },
        FuncSpec::Table { table } => {
            if table.len() < 2 || table.iter().any(|row| row.len() != 3) {
                return Err(Error::InvalidModel("coupling table rows must be [k, re, im]".into()));
            }
            let mut rows = table.clone();
            rows.sort_by(|x, y| x[0].partial_cmp(&y[0]).unwrap());
            Ok(Coupling::Table {
                ks: rows.iter().map(|r| r[0]).collect(),
                re: rows.iter().map(|r| r[1]).collect(),
                im: rows.iter().map(|r| r[2]).collect(),
            })
        }
    }
}

fn builtin_file(coupling: FuncSpec) -> ModelFile {
    ModelFile {
        dimension: 1,
        support: [-std::f64::consts::PI, std::f64::consts::PI],
        dispersion: FuncSpec::Family { family: "one-minus-cos".into(), params: vec![] },
        coupling,
        quadrature: None,
    }
}

/// M1: omega = 1 - cos k, lambda = sin^2 k. All regularity integrals finite.
pub fn m1() -> ModelSpec {
    ModelSpec::from_file_spec(builtin_file(FuncSpec::Family {
        family: "sin-squared".into(),
        params: vec![],
    }))
    .expect("builtin model")
}

/// M2: omega = 1 - cos k, lambda = 1. All regularity integrals infinite.
pub fn m2() -> ModelSpec {
    ModelSpec::from_file_spec(builtin_file(FuncSpec::Family {
        family: "const".into(),
        params: vec![1.0],
    }))
    .expect("builtin model")
}

/// M3: omega = 1 - cos k, lambda = 1 - cos k. Lower integrals finite only.
pub fn m3() -> ModelSpec {
    ModelSpec::from_file_spec(builtin_file(FuncSpec::Family {
        family: "one-minus-cos".into(),
        params: vec![],
    }))
    .expect("builtin model")
}

/// M4: omega = 1 - cos k, lambda = 1 + cos k. Upper integrals finite only.
pub fn m4() -> ModelSpec {
    ModelSpec::from_file_spec(builtin_file(FuncSpec::Family {
        family: "one-plus-cos".into(),
        params: vec![],
    }))
    .expect("builtin model")
}

/// Registry lookup by name (`m1` .. `m4`).
pub fn builtin(name: &str) -> Option<ModelSpec> {
    match name {
        "m1" => Some(m1()),
        "m2" => Some(m2()),
        "m3" => Some(m3()),
        "m4" => Some(m4()),
        _ => None,
    }
}

use super::{default_t_grid, drift_subadditive_limit, entropy_rate, mutual_information, Space};
use crate::busemann::{hyperbolic_k_functional, k_functional_and_equality};
use crate::error::{Error, Result};
use crate::model_spaces::ModelManifold;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Pass threshold on the normalized slack.
pub const SLACK_TOL: f64 = 1e-3;

/// Relative tolerance of the equality checks.
pub const EQUALITY_TOL: f64 = 0.05;

/// Threshold below which a rate counts as zero in the `h = 0 ⇔ ℓ = 0` check.
pub const ZERO_RATE_TOL: f64 = 0.02;

/// Slack tolerance of the finite-dimension bound.
pub const FINITE_DIM_TOL: f64 = 0.01;

/// `(rhs − lhs)/max(1, |lhs|, |rhs|)`.
pub fn normalized_slack(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / 1f64.max(lhs.abs()).max(rhs.abs())
}

/// One mixture component: a catalog space, a supplied drift, or both (the
/// supplied drift then wins).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Space>,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
}

/// Mixture of ergodic components with positive weights summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleRepr")]
pub struct Ensemble {
    components: Vec<Component>,
}

#[derive(Deserialize)]
struct EnsembleRepr {
    components: Vec<Component>,
}

impl TryFrom<EnsembleRepr> for Ensemble {
    type Error = Error;
    fn try_from(r: EnsembleRepr) -> Result<Self> {
        Self::new(r.components)
    }
}

impl Ensemble {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("ensemble has no components".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("component {i} has weight {}", c.weight)));
            }
            if c.space.is_none() && c.drift.is_none() {
                return Err(Error::InvalidArgument(format!("component {i} has neither a space nor a drift")));
            }
            if let Some(d) = c.drift {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::InvalidArgument(format!("component {i} has drift {d}")));
                }
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("ensemble file: {e}")))
    }
}

/// `(ℓ, ℓ⁺) = (Σ wᵢℓᵢ, max ℓᵢ)`.
pub fn ensemble_drift(e: &Ensemble, drifts: &[f64]) -> Result<(f64, f64)> {
    if drifts.len() != e.components.len() {
        return Err(Error::InvalidArgument(format!(
            "{} drifts for {} components",
            drifts.len(),
            e.components.len()
        )));
    }
    let ell = e.components.iter().zip(drifts).map(|(c, d)| c.weight * d).sum();
    let ell_plus = drifts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((ell, ell_plus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDimCheck {
    pub i_value: f64,
    pub dim: usize,
    pub threshold: f64,
    pub pass: bool,
}

/// `I ≤ log(dim) + tol`.
pub fn finite_dim_bound_check(i_value: f64, dim: usize) -> Result<FiniteDimCheck> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let threshold = (dim as f64).ln();
    Ok(FiniteDimCheck { i_value, dim, threshold, pass: i_value <= threshold + FINITE_DIM_TOL })
}

/// A point estimate with its uncertainty and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityReport {
    pub value: f64,
    /// Half-width of the uncertainty band, `> 0`.
    pub halfwidth: f64,
    pub method: String,
}

/// `lhs ≤ rhs` (or `lhs = rhs` for equality checks) with its slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Inequalities: normalized slack, pass iff `≥ −SLACK_TOL`.
    /// Equalities: `|rhs − lhs|/max(1, |lhs|, |rhs|)`, pass iff `≤ EQUALITY_TOL`.
    pub slack: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = normalized_slack(lhs, rhs);
        Self { name: name.into(), lhs, rhs, slack, pass: slack >= -SLACK_TOL }
    }

    fn eq(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = normalized_slack(lhs, rhs).abs();
        Self { name: name.into(), lhs, rhs, slack, pass: slack <= EQUALITY_TOL }
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        if !prefix.is_empty() {
            self.name = format!("{prefix}{}", self.name);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportTarget {
    Space(Space),
    Ensemble(Ensemble),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub schema: String,
    pub space: String,
    pub ell: QuantityReport,
    pub ell_plus: f64,
    pub entropy_h: Option<QuantityReport>,
    pub volume_v: Option<f64>,
    /// `½|∇log k_ξ(o)|²` on Hadamard homogeneous spaces.
    pub k_functional: Option<f64>,
    /// `sup |∇log k_ξ + 2ℓ∇ξ|` over sample points, where available.
    pub equality_gap: Option<f64>,
    pub inequality_status: Vec<InequalityCheck>,
    pub equality_status: Vec<InequalityCheck>,
    /// `I_1^T` at the largest audit horizon, checked against `dim = 1`.
    pub finite_dim: Option<FiniteDimCheck>,
    /// `T ↦ I_1^T` non-increasing on the audit horizons.
    pub mutual_information_monotone: Option<bool>,
    /// `h < tol ⇔ ℓ < tol`, and the finite-dimension check passes iff Liouville.
    pub liouville_consistent: Option<bool>,
    pub t_grid: Vec<f64>,
    pub r_max: Option<f64>,
    pub converged: bool,
    pub diagnostics: Vec<String>,
    pub components: Vec<AsymptoticReport>,
}

/// Horizons `T` of the mutual information audit at `t = 1`.
const MI_HORIZONS: [f64; 4] = [2.0, 10.0, 100.0, 1000.0];

impl AsymptoticReport {
    /// All inequalities pass, all equalities pass, and every component passes.
    pub fn passes(&self) -> bool {
        self.inequality_status.iter().all(|c| c.pass)
            && self.equality_status.iter().all(|c| c.pass)
            && self.liouville_consistent != Some(false)
            && self.mutual_information_monotone != Some(false)
            && self.components.iter().all(|c| c.passes())
    }

    /// Whether every estimator, including those of the components, converged.
    pub fn all_converged(&self) -> bool {
        self.converged && self.components.iter().all(|c| c.all_converged())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        self.write_table(&mut s, "");
        s
    }

    fn write_table(&self, s: &mut String, indent: &str) {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(s, "{indent}space      {}", self.space);
        let _ = writeln!(s, "{indent}ell        {:.6} ± {:.1e} ({})", self.ell.value, self.ell.halfwidth, self.ell.method);
        let _ = writeln!(s, "{indent}ell_plus   {:.6}", self.ell_plus);
        match &self.entropy_h {
            Some(h) => {
                let _ = writeln!(s, "{indent}h          {:.6} ± {:.1e} ({})", h.value, h.halfwidth, h.method);
            }
            None => {
                let _ = writeln!(s, "{indent}h          -");
            }
        }
        let _ = writeln!(s, "{indent}v          {}", opt(self.volume_v));
        let _ = writeln!(s, "{indent}k          {}", opt(self.k_functional));
        let _ = writeln!(s, "{indent}converged  {}", self.converged);
        if !self.inequality_status.is_empty() || !self.equality_status.is_empty() {
            let _ = writeln!(s, "{indent}{:<32} {:>12} {:>12} {:>12}  pass", "check", "lhs", "rhs", "slack");
            for c in self.inequality_status.iter().chain(&self.equality_status) {
                let _ = writeln!(
                    s,
                    "{indent}{:<32} {:>12.6} {:>12.6} {:>12.3e}  {}",
                    c.name, c.lhs, c.rhs, c.slack, c.pass
                );
            }
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "{indent}note: {d}");
        }
        let inner = format!("{indent}  ");
        for (i, c) in self.components.iter().enumerate() {
            let _ = writeln!(s, "{indent}component {i}");
            c.write_table(s, &inner);
        }
    }
}

fn inequality_chain(ell: f64, h: f64, v: Option<f64>, k: Option<f64>, prefix: &str) -> Vec<InequalityCheck> {
    let mut out = vec![InequalityCheck::le("half_ell_sq <= h", 0.5 * ell * ell, h).prefixed(prefix)];
    if let Some(v) = v {
        out.push(InequalityCheck::le("h <= ell * v", h, ell * v).prefixed(prefix));
    }
    if let Some(k) = k {
        out.push(InequalityCheck::le("two_ell_sq <= k", 2.0 * ell * ell, k).prefixed(prefix));
        out.push(InequalityCheck::le("k <= h", k, h).prefixed(prefix));
    } else {
        out.push(InequalityCheck::le("two_ell_sq <= h", 2.0 * ell * ell, h).prefixed(prefix));
    }
    out
}

fn space_report(space: &Space, t_grid: Option<&[f64]>, r_max: Option<f64>) -> Result<AsymptoticReport> {
    if !space.is_homogeneous() {
        return Err(Error::NoKernel(space.label()));
    }
    let grid = t_grid.map_or_else(|| default_t_grid(space), <[f64]>::to_vec);
    let kappa = space.curvature_scale();
    let r_max = r_max.unwrap_or(if kappa > 0.0 { 40.0 / kappa } else { 40.0 });
    let mut diagnostics = vec![];

    let drift = drift_subadditive_limit(space, &grid)?;
    let h = entropy_rate(space, &grid)?;
    // `+ 0.0` folds −0 into +0 for the serialized report
    let v = space.volume_growth(r_max, 64)?.slope.max(0.0) + 0.0;
    let ell = drift.rate.extrapolated.max(0.0) + 0.0;
    let h_val = h.extrapolated.max(0.0) + 0.0;
    if !drift.violations.is_empty() {
        diagnostics.push(format!("{} subadditivity violations", drift.violations.len()));
    }
    if !drift.ratio_monotone {
        diagnostics.push("ell_t/t not monotone on the time grid".into());
    }
    if !drift.rate.converged {
        diagnostics.push(format!(
            "drift fit unstable: full grid {} vs top half {}",
            drift.rate.extrapolated, drift.rate.extrapolated_top
        ));
    }
    if !h.converged {
        diagnostics.push(format!("entropy fit unstable: full grid {} vs top half {}", h.extrapolated, h.extrapolated_top));
    }

    let (k_functional, equality_gap) = match *space {
        ModelManifold::HalfPlane => {
            let kf = k_functional_and_equality::<f64>(256);
            (Some(kf.k_value), Some(kf.equality_gap))
        }
        ModelManifold::Hyperbolic { dim, k } => {
            // the half-plane gap scales by k; both sides of the condition do
            let gap = (dim == 2).then(|| k * k_functional_and_equality::<f64>(256).equality_gap);
            (Some(hyperbolic_k_functional(dim, k)), gap)
        }
        _ => (None, None),
    };

    let mut inequality_status = inequality_chain(ell, h_val, Some(v), k_functional, "");
    if drift.violations.is_empty() {
        inequality_status.push(InequalityCheck::le("subadditivity excess <= tol", 0.0, super::SUBADDITIVITY_TOL));
    } else {
        let worst = drift.violations.iter().map(|v| v.excess).fold(0.0, f64::max);
        inequality_status.push(InequalityCheck {
            name: "subadditivity excess <= tol".into(),
            lhs: worst,
            rhs: super::SUBADDITIVITY_TOL,
            slack: normalized_slack(worst, super::SUBADDITIVITY_TOL),
            pass: false,
        });
    }
    let mut equality_status = vec![
        InequalityCheck::eq("two_ell_sq = h", 2.0 * ell * ell, h_val),
        InequalityCheck::eq("h = ell * v", h_val, ell * v),
    ];
    if let Some(g) = equality_gap {
        equality_status.push(InequalityCheck::eq("grad log k + 2 ell grad xi = 0", g, 0.0));
    }
    if !matches!(space, ModelManifold::Euclidean { .. }) && k_functional.is_none() {
        equality_status.clear();
    }

    let mut mi = Vec::with_capacity(MI_HORIZONS.len());
    for &big_t in &MI_HORIZONS {
        mi.push(mutual_information(space, 1.0, big_t)?);
    }
    let monotone = mi.windows(2).all(|w| w[1] <= w[0] + 1e-8);
    let finite_dim = finite_dim_bound_check(*mi.last().expect("non-empty"), 1)?;
    let liouville = h_val < ZERO_RATE_TOL;
    let consistent = liouville == (ell < ZERO_RATE_TOL) && finite_dim.pass == liouville;

    Ok(AsymptoticReport {
        schema: "v1".into(),
        space: space.label(),
        ell: QuantityReport { value: ell, halfwidth: drift.rate.halfwidth(), method: "quadrature, sqrt-t extrapolation".into() },
        ell_plus: ell,
        entropy_h: Some(QuantityReport { value: h_val, halfwidth: h.halfwidth(), method: "quadrature, log-t extrapolation".into() }),
        volume_v: Some(v),
        k_functional,
        equality_gap,
        inequality_status,
        equality_status,
        finite_dim: Some(finite_dim),
        mutual_information_monotone: Some(monotone),
        liouville_consistent: Some(consistent),
        t_grid: grid,
        r_max: Some(r_max),
        converged: drift.rate.converged && h.converged,
        diagnostics,
        components: vec![],
    })
}

fn drift_only(drift: f64) -> AsymptoticReport {
    AsymptoticReport {
        schema: "v1".into(),
        space: "supplied drift".into(),
        ell: QuantityReport { value: drift, halfwidth: f64::EPSILON, method: "supplied".into() },
        ell_plus: drift,
        entropy_h: None,
        volume_v: None,
        k_functional: None,
        equality_gap: None,
        inequality_status: vec![],
        equality_status: vec![],
        finite_dim: None,
        mutual_information_monotone: None,
        liouville_consistent: None,
        t_grid: vec![],
        r_max: None,
        converged: true,
        diagnostics: vec![],
        components: vec![],
    }
}

/// Assembles ℓ, h, v and k and evaluates `½ℓ² ≤ h ≤ ℓv` and `2ℓ² ≤ k ≤ h`.
///
/// For an ensemble each component is estimated on its own and the chains
/// are checked per component; the top level carries `ℓ = Σwᵢℓᵢ`,
/// `ℓ⁺ = max ℓᵢ` and the weighted `h`, `v` when every component has them.
/// A `t_grid` of `None` uses [`default_t_grid`] per space.
pub fn inequality_report(target: &ReportTarget, t_grid: Option<&[f64]>, r_max: Option<f64>) -> Result<AsymptoticReport> {
    let e = match target {
        ReportTarget::Space(space) => return space_report(space, t_grid, r_max),
        ReportTarget::Ensemble(e) => e,
    };
    let mut parts = Vec::with_capacity(e.components.len());
    for c in &e.components {
        let mut r = match (&c.space, c.drift) {
            (Some(space), None) => space_report(space, t_grid, r_max)?,
            (Some(space), Some(d)) => {
                let mut r = drift_only(d);
                r.space = space.label();
                r
            }
            (None, Some(d)) => drift_only(d),
            (None, None) => unreachable!("validated on construction"),
        };
        r.components.clear();
        parts.push(r);
    }
    let drifts: Vec<f64> = parts.iter().map(|p| p.ell.value).collect();
    let (ell, ell_plus) = ensemble_drift(e, &drifts)?;
    let weights: Vec<f64> = e.components.iter().map(|c| c.weight).collect();
    let weighted = |f: &dyn Fn(&AsymptoticReport) -> Option<f64>| -> Option<f64> {
        parts.iter().zip(&weights).map(|(p, w)| f(p).map(|v| w * v)).sum()
    };
    let halfwidth = parts.iter().zip(&weights).map(|(p, w)| w * p.ell.halfwidth).sum::<f64>();
    let entropy_h = weighted(&|p| p.entropy_h.as_ref().map(|h| h.value)).map(|value| QuantityReport {
        value,
        halfwidth: parts
            .iter()
            .zip(&weights)
            .map(|(p, w)| w * p.entropy_h.as_ref().map_or(0.0, |h| h.halfwidth))
            .sum(),
        method: "weighted components".into(),
    });
    Ok(AsymptoticReport {
        schema: "v1".into(),
        space: format!("ensemble of {}", parts.len()),
        ell: QuantityReport { value: ell, halfwidth, method: "weighted components".into() },
        ell_plus,
        entropy_h,
        volume_v: weighted(&|p| p.volume_v),
        k_functional: None,
        equality_gap: None,
        inequality_status: vec![],
        equality_status: vec![],
        finite_dim: None,
        mutual_information_monotone: None,
        liouville_consistent: None,
        t_grid: t_grid.map(<[f64]>::to_vec).unwrap_or_default(),
        r_max,
        converged: parts.iter().all(|p| p.converged),
        diagnostics: vec!["inequality chains are checked per component; a mixture is not ergodic".into()],
        components: parts,
    })
}

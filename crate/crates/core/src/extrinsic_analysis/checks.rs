use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ball::{extract_ball, EulerData};
use super::growth::{GrowthCurve, GrowthSample, LineIntegrand};
use super::patch::{SurfaceIntegrand, TriangulatedPatch};
use super::report::{CheckRow, VerificationReport};
use crate::comparison_space::{constant_c, find_t0, ComparisonSpace};
use crate::error::{GeomError, Result};

/// Default tolerances of every suite. All are applied to normalized
/// margins `(lhs - rhs) / max(1, |lhs|, |rhs|)` unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Laplacian and geodesic curvature comparisons, per node.
    pub pointwise: f64,
    /// Absolute Gauss-Bonnet defect.
    pub gauss_bonnet: f64,
    /// Per-step slack of the monotone quotients.
    pub monotone_step: f64,
    pub isoperimetric: f64,
    /// Annulus, divergence, lemon and cosh-integral checks.
    pub proof_chain: f64,
    pub chern_osserman: f64,
    pub coarea: f64,
    /// Relative change over the last ten samples below which a tail counts
    /// as settled.
    pub tail: f64,
    /// Absolute slack on `C(x) <= h(r(x))`.
    pub radial_hypothesis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pointwise: 1e-2,
            gauss_bonnet: 0.05,
            monotone_step: 1e-6,
            isoperimetric: 1e-3,
            proof_chain: 1e-3,
            chern_osserman: 1e-3,
            coarea: 0.02,
            tail: 0.01,
            radial_hypothesis: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn scaled(self, s: f64) -> Self {
        Self {
            pointwise: self.pointwise * s,
            gauss_bonnet: self.gauss_bonnet * s,
            monotone_step: self.monotone_step * s,
            isoperimetric: self.isoperimetric * s,
            proof_chain: self.proof_chain * s,
            chern_osserman: self.chern_osserman * s,
            coarea: self.coarea * s,
            tail: self.tail,
            radial_hypothesis: self.radial_hypothesis * s,
        }
    }
}

/// Data fixed by the comparison space once its hypotheses are accepted for
/// a surface.
#[derive(Debug, Clone, Serialize)]
pub struct Anchor {
    pub t0: f64,
    /// `t0` from the `h` criterion, for reference.
    pub t0_h_form: Option<f64>,
    pub c: f64,
    /// `v(t0)`.
    pub v0: f64,
    /// `int_{D_t0} cosh kr`.
    pub cosh0: f64,
    /// `min over vertices of h(r) - C(x)`.
    pub radial_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum Gate {
    Accepted(Anchor),
    Rejected(String),
}

impl Gate {
    pub fn anchor(&self) -> Option<&Anchor> {
        match self {
            Gate::Accepted(a) => Some(a),
            Gate::Rejected(_) => None,
        }
    }
}

/// Balance of the space, existence of `t0` and `C`, and `C(x) <= h(r(x))`
/// at every vertex of the patch.
pub fn hypothesis_gate(patch: &TriangulatedPatch, space: &ComparisonSpace, tol: &Tolerances) -> Result<Gate> {
    let data = patch
        .data
        .as_ref()
        .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))?;
    if !space.balanced() {
        return Ok(Gate::Rejected(format!(
            "space is not strongly balanced (margin {:.3e} at t = {:.3})",
            space.balance.margin, space.balance.margin_t
        )));
    }
    let Some(t0) = find_t0(space) else {
        return Ok(Gate::Rejected("t0 not found in the scan range".into()));
    };
    let c = match constant_c(space) {
        Ok(c) => c.value,
        Err(e) => return Ok(Gate::Rejected(format!("C unavailable: {e}"))),
    };
    let h = space.h();
    let mut radial_margin = f64::INFINITY;
    for d in data {
        radial_margin = radial_margin.min(h.eval(d.r) - d.radial_curvature);
    }
    if radial_margin < -tol.radial_hypothesis {
        return Ok(Gate::Rejected(format!("C(x) exceeds h(r(x)) by {:.3e}", -radial_margin)));
    }
    let (v0, cosh0) = if t0 > 0.0 {
        match extract_ball(patch, t0) {
            Ok(ball) => {
                let s = ball.surface_integrals()?;
                (s[SurfaceIntegrand::Area.index()], s[SurfaceIntegrand::Cosh.index()])
            }
            Err(GeomError::EmptyBall(_)) => (0.0, 0.0),
            Err(e) => return Err(e),
        }
    } else {
        (0.0, 0.0)
    };
    Ok(Gate::Accepted(Anchor { t0, t0_h_form: space.t0_h_form, c, v0, cosh0, radial_margin }))
}

fn kappa(curve: &GrowthCurve) -> f64 {
    (-curve.b).sqrt()
}

fn after_t0<'a>(curve: &'a GrowthCurve, anchor: &'a Anchor) -> impl Iterator<Item = &'a GrowthSample> + 'a {
    curve.resolved().filter(move |s| s.t >= anchor.t0)
}

/// `v'(t) >= Lb(t)` with the co-area derivative, and agreement of the
/// co-area derivative with the difference quotient of `v`.
pub fn coarea_check(curve: &GrowthCurve, tol: &Tolerances) -> VerificationReport {
    let mut checks = vec![];
    for s in curve.resolved() {
        checks.push(CheckRow::at_least("coarea_length", Some(s.t), s.v_prime, s.lb, 1e-9));
        if s.v_prime_numeric.is_finite() {
            checks.push(CheckRow::equal(
                "coarea_derivative",
                Some(s.t),
                s.v_prime_numeric / s.v_prime,
                1.0,
                tol.coarea,
            ));
        }
    }
    VerificationReport::from_checks("coarea", checks, vec![])
}

/// `Lb(t) / (v(t) - v0) >= W(t) / int_0^t W` for samples past `t0`.
pub fn isoperimetric_check(curve: &GrowthCurve, space: &ComparisonSpace, anchor: &Anchor, tol: &Tolerances) -> Result<VerificationReport> {
    let mut checks = vec![];
    let mut notes = vec![];
    for s in after_t0(curve, anchor) {
        if s.v <= anchor.v0 || s.t <= 0.0 {
            notes.push(format!("t = {}: v(t) <= v(t0), skipped", s.t));
            continue;
        }
        let lhs = s.lb / (s.v - anchor.v0);
        let rhs = 1.0 / space.q_w(s.t)?;
        checks.push(CheckRow::at_least("isoperimetric", Some(s.t), lhs, rhs, tol.isoperimetric));
    }
    if checks.is_empty() {
        notes.push("no samples past t0; vacuous".into());
    }
    Ok(VerificationReport::from_checks("isoperimetric", checks, notes))
}

/// Non-decreasing `(v - v0)/Vol(B_t^W)`, `(v - v0)/(cosh kt - C)` and
/// `(v - v0)/cosh kt` past `t0`, and a settled `sup v/cosh kt`.
pub fn monotonicity_checks(curve: &GrowthCurve, space: &ComparisonSpace, anchor: &Anchor, tol: &Tolerances) -> Result<VerificationReport> {
    let k = kappa(curve);
    let samples: Vec<&GrowthSample> = after_t0(curve, anchor).filter(|s| s.t > 0.0).collect();
    let mut notes = vec![];
    let mut checks = vec![];
    let mut quotients: Vec<(&str, Vec<f64>)> = vec![
        ("quotient_model_ball", vec![]),
        ("quotient_cosh_minus_c", vec![]),
        ("quotient_cosh", vec![]),
    ];
    for s in &samples {
        let ch = (k * s.t).cosh();
        let dv = s.v - anchor.v0;
        quotients[0].1.push(dv / space.ball_volume(s.t)?);
        quotients[1].1.push(dv / (ch - anchor.c));
        quotients[2].1.push(dv / ch);
    }
    for (name, q) in &quotients {
        for (i, w) in q.windows(2).enumerate() {
            checks.push(CheckRow::at_least(*name, Some(samples[i + 1].t), w[1], w[0], tol.monotone_step));
        }
    }
    if samples.len() < 2 {
        notes.push(format!("{} samples past t0; vacuous", samples.len()));
    }
    let tail: Vec<f64> = samples.iter().rev().take(10).map(|s| s.v_over_cosh).collect();
    if tail.len() >= 2 {
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(CheckRow::equal("sup_v_over_cosh_settled", None, hi, lo, tol.tail));
        notes.push(format!("sup v/cosh kt = {hi:.10}"));
    }
    Ok(VerificationReport::from_checks("monotonicity", checks, notes))
}

/// `X(t)/cosh^2 kt - X(s)/cosh^2 ks >= int_{D_t - D_s} (1 + sinh^2 kr |grad_perp r|^2
/// - sinh kr cosh kr |H| / k) / cosh^3 kr`, with `X = int (cosh kr - |H| sinh kr / k)`.
/// `s_idx = None` stands for `s = 0`.
pub fn annulus_check(curve: &GrowthCurve, s_idx: Option<usize>, t_idx: usize, tol: &Tolerances) -> Result<CheckRow> {
    if s_idx.is_some_and(|s| s > t_idx) || t_idx >= curve.len() {
        return Err(GeomError::InvalidInput(format!("bad annulus indices {s_idx:?}, {t_idx}")));
    }
    let k = kappa(curve);
    let part = |i: Option<usize>| match i {
        None => (0.0, 0.0),
        Some(i) => {
            let s = &curve.samples[i];
            let ch = (k * s.t).cosh();
            (s.integral(SurfaceIntegrand::Divergence) / (ch * ch), s.integral(SurfaceIntegrand::Annulus))
        }
    };
    let (xs, a_s) = part(s_idx);
    let (xt, a_t) = part(Some(t_idx));
    Ok(CheckRow::at_least("annulus", Some(curve.samples[t_idx].t), xt - xs, a_t - a_s, tol.proof_chain))
}

/// Annulus rows from `s = 0` and between consecutive samples.
pub fn annulus_suite(curve: &GrowthCurve, tol: &Tolerances) -> Result<VerificationReport> {
    let idx: Vec<usize> = (0..curve.len()).filter(|&i| !curve.samples[i].truncated).collect();
    let mut checks = vec![];
    for (j, &i) in idx.iter().enumerate() {
        checks.push(annulus_check(curve, None, i, tol)?);
        if j > 0 {
            checks.push(annulus_check(curve, Some(idx[j - 1]), i, tol)?);
        }
    }
    Ok(VerificationReport::from_checks("annulus", checks, vec![]))
}

/// `int_{D_t}(cosh kr - |H| sinh kr / k) <= (sinh kt / 2k) int_{dD_t} |grad_S r|`
/// and `int_{dD_t} |grad_S r| >= (2k / sinh kt) int_{D_t} cosh kr - 2 int_{D_t} |H|`.
pub fn divergence_chain_check(curve: &GrowthCurve, tol: &Tolerances) -> VerificationReport {
    let k = kappa(curve);
    let mut checks = vec![];
    for s in curve.resolved().filter(|s| s.t > 0.0) {
        let sh = (k * s.t).sinh();
        let grad = s.line(LineIntegrand::GradS);
        checks.push(CheckRow::at_most(
            "divergence",
            Some(s.t),
            s.integral(SurfaceIntegrand::Divergence),
            0.5 * sh / k * grad,
            tol.proof_chain,
        ));
        checks.push(CheckRow::at_least(
            "boundary_gradient",
            Some(s.t),
            grad,
            2.0 * k / sh * s.integral(SurfaceIntegrand::Cosh) - 2.0 * s.tot_h,
            tol.proof_chain,
        ));
    }
    VerificationReport::from_checks("divergence_chain", checks, vec![])
}

/// `int_0^t sinh ks / cosh^2 ks I(s) ds <= C2 sqrt(C3 + v(t)/cosh kt)` with
/// `C2 = sqrt(2 int e^{-kr} |A|^2)` and `C3 = (1/k) int e^{-kr} |H|` over
/// the largest resolved ball. The left side is evaluated as the surface
/// integral it equals by the co-area formula.
pub fn lemon_check(curve: &GrowthCurve, tol: &Tolerances) -> Result<VerificationReport> {
    let k = kappa(curve);
    let largest = curve
        .resolved()
        .last()
        .ok_or_else(|| GeomError::Inconclusive("no resolved samples".into()))?;
    let c2 = (2.0 * largest.integral(SurfaceIntegrand::ExpNormA2)).max(0.0).sqrt();
    let c3 = largest.integral(SurfaceIntegrand::ExpNormH).max(0.0) / k;
    let mut checks = vec![];
    for s in curve.resolved() {
        let rhs = c2 * (c3 + s.v / (k * s.t).cosh()).sqrt();
        checks.push(CheckRow::at_most("lemon", Some(s.t), s.integral(SurfaceIntegrand::Lemon), rhs, tol.proof_chain));
    }
    Ok(VerificationReport::from_checks("lemon", checks, vec![format!("C2 = {c2:.6e}, C3 = {c3:.6e}")]))
}

/// `int_0^t cosh ks v'(s) ds >= ((cosh kt + C)/2) v(t) - v0 (cosh kt - 1)/2`
/// past `t0`; the left side is `int_{D_t} cosh kr` by the co-area formula.
pub fn cosh_integral_bound_check(curve: &GrowthCurve, anchor: &Anchor, tol: &Tolerances) -> VerificationReport {
    let k = kappa(curve);
    let row = |t: f64, lhs: f64, v: f64| {
        let ch = (k * t).cosh();
        CheckRow::at_least(
            "cosh_integral",
            Some(t),
            lhs,
            0.5 * (ch + anchor.c) * v - 0.5 * anchor.v0 * (ch - 1.0),
            tol.proof_chain,
        )
    };
    let mut checks = vec![];
    if anchor.t0 > 0.0 {
        checks.push(row(anchor.t0, anchor.cosh0, anchor.v0));
    }
    for s in after_t0(curve, anchor) {
        checks.push(row(s.t, s.integral(SurfaceIntegrand::Cosh), s.v));
    }
    let notes = if checks.is_empty() { vec!["no samples past t0; vacuous".into()] } else { vec![] };
    VerificationReport::from_checks("cosh_integral", checks, notes)
}

/// Relative change of a cumulative quantity over the last ten resolved
/// samples.
pub fn tail_change(curve: &GrowthCurve, f: impl Fn(&GrowthSample) -> f64) -> f64 {
    let vals: Vec<f64> = curve.resolved().map(f).collect();
    if vals.len() < 2 {
        return f64::INFINITY;
    }
    let last = vals[vals.len() - 1];
    let first = vals[vals.len().saturating_sub(10)];
    let d = (last - first).abs();
    if d <= 1e-12 {
        0.0
    } else {
        d / last.abs()
    }
}

/// Terms of the topology bound at the largest resolved ball.
#[derive(Debug, Clone, Serialize)]
pub struct ChernOsserman {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - (1/pi) int |H|^2`.
    pub rhs_variant: f64,
    /// `(1/2pi) int (b - K_N)`, identically 0 here.
    pub ambient_term: f64,
    pub curvature_term: f64,
    pub sup_quotient: f64,
    /// The quotients `v/Vol(B^{b,2})` are non-decreasing over the tail.
    pub sup_tail_monotone: bool,
    pub mean_curvature_term: f64,
    pub anchor_term: f64,
    pub h2_term: f64,
}

/// `-chi(D_T) <= (1/2pi) int(b - K_N) + (1/4pi) int |A|^2 - C sup v/Vol(B^{b,2}) +
/// (k/pi) int |H| - b v(t0)/(2pi)`, and the variant with `-(1/pi) int |H|^2`.
/// Rejected when `int |H|` or `int |A|^2` has not settled over the last
/// ten samples.
pub fn chern_osserman_report(curve: &GrowthCurve, anchor: &Anchor, tol: &Tolerances) -> Result<(VerificationReport, Option<ChernOsserman>)> {
    let dh = tail_change(curve, |s| s.tot_h);
    let da = tail_change(curve, |s| s.r_a2);
    if !(dh < tol.tail) || !(da < tol.tail) {
        let why = format!("integrals not settled over the tail (|H|: {dh:.3e}, |A|^2: {da:.3e})");
        return Ok((VerificationReport::rejected("chern_osserman", why), None));
    }
    let b = curve.b;
    let k = kappa(curve);
    let samples: Vec<&GrowthSample> = after_t0(curve, anchor).filter(|s| s.t > 0.0).collect();
    let last = *samples
        .last()
        .ok_or_else(|| GeomError::Inconclusive("no resolved samples past t0".into()))?;
    let quot: Vec<f64> = samples.iter().map(|s| s.v_over_disc).collect();
    let sup_quotient = quot.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = &quot[quot.len().saturating_sub(10)..];
    let sup_tail_monotone = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - tol.monotone_step));
    let ambient_term = last.integral(SurfaceIntegrand::BMinusKn) / (2.0 * PI);
    let curvature_term = last.r_a2 / (4.0 * PI);
    let mean_curvature_term = k / PI * last.tot_h;
    let anchor_term = -b * anchor.v0 / (2.0 * PI);
    let h2_term = last.integral(SurfaceIntegrand::NormH2) / PI;
    let rhs = ambient_term + curvature_term - anchor.c * sup_quotient + mean_curvature_term + anchor_term;
    let co = ChernOsserman {
        t: last.t,
        lhs: -(last.chi as f64),
        rhs,
        rhs_variant: rhs - h2_term,
        ambient_term,
        curvature_term,
        sup_quotient,
        sup_tail_monotone,
        mean_curvature_term,
        anchor_term,
        h2_term,
    };
    let checks = vec![
        CheckRow::at_most("chern_osserman", Some(co.t), co.lhs, co.rhs, tol.chern_osserman),
        CheckRow::at_most("chern_osserman_variant", Some(co.t), co.lhs, co.rhs_variant, tol.chern_osserman),
    ];
    let mut notes = vec![format!(
        "t0 = {} (h form: {:?}), C = {:.9}, sup v/Vol(B) = {:.9}",
        anchor.t0, anchor.t0_h_form, anchor.c, sup_quotient
    )];
    if !sup_tail_monotone {
        notes.push("v/Vol(B) is not monotone over the tail; sup is not a limit".into());
    }
    Ok((VerificationReport::from_checks("chern_osserman", checks, notes), Some(co)))
}

/// Topology of a ball at each sample radius; for complexes without an
/// immersion.
pub fn topology_series(patch: &TriangulatedPatch, t_list: &[f64]) -> Result<Vec<(f64, EulerData)>> {
    t_list
        .iter()
        .map(|&t| Ok((t, extract_ball(patch, t)?.euler_data()?)))
        .collect()
}

impl GrowthCurve {
    pub fn topology(&self) -> Vec<(f64, EulerData)> {
        self.samples
            .iter()
            .map(|s| (s.t, EulerData { chi: s.chi, genus: s.g, boundary_components: s.c }))
            .collect()
    }
}

/// `liminf -chi(D_t)` over the samples, taken as the infimum over the
/// second half of the exhaustion.
pub fn sampled_liminf(series: &[(f64, EulerData)]) -> Option<i64> {
    let n = series.len();
    series[n / 2..].iter().map(|(_, e)| -e.chi).min()
}

/// `-chi(S) <= liminf -chi(D_t)` when `chi(S)` is known, and a
/// non-decreasing genus along the exhaustion.
pub fn huber_check(series: &[(f64, EulerData)], known_chi: Option<i64>) -> Result<VerificationReport> {
    if series.len() < 3 {
        return Err(GeomError::Inconclusive(format!("{} exhaustion samples, need 3", series.len())));
    }
    let liminf = sampled_liminf(series).expect("nonempty");
    let mut checks = vec![];
    if let Some(chi) = known_chi {
        checks.push(CheckRow::at_least_abs("huber", None, liminf as f64, -chi as f64, 0.0));
    }
    for w in series.windows(2) {
        checks.push(CheckRow::at_least_abs("genus_monotone", Some(w[1].0), w[1].1.genus as f64, w[0].1.genus as f64, 0.0));
    }
    let seq: Vec<String> = series.iter().map(|(_, e)| (-e.chi).to_string()).collect();
    let notes = vec![format!("liminf -chi = {liminf}; -chi sequence {}", seq.join(" "))];
    Ok(VerificationReport::from_checks("huber", checks, notes))
}

/// Which integrand the integrability cross-check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrabilityTarget {
    NormA2,
    BMinusKn,
    NormH,
}

impl IntegrabilityTarget {
    fn plain(self) -> SurfaceIntegrand {
        match self {
            Self::NormA2 => SurfaceIntegrand::NormA2,
            Self::BMinusKn => SurfaceIntegrand::BMinusKn,
            Self::NormH => SurfaceIntegrand::NormH,
        }
    }

    fn weighted(self) -> SurfaceIntegrand {
        match self {
            Self::NormA2 => SurfaceIntegrand::ExpNormA2,
            Self::BMinusKn => SurfaceIntegrand::ExpBMinusKn,
            Self::NormH => SurfaceIntegrand::ExpNormH,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrabilitySanity {
    pub target: IntegrabilityTarget,
    /// `int_{D_T} e^{-kr} f`.
    pub weighted: f64,
    /// `int_0^T e^{-kt} int_{D_t} f dt`, trapezoidal over the samples.
    pub layered: f64,
    pub weighted_tail: f64,
    pub layered_tail: f64,
    /// Both tails settled.
    pub convergent: bool,
    pub ratio: Option<f64>,
}

/// Cross-check of two truncated integrals of `f`; both must be finite, and
/// their tails are classified as settled or growing.
pub fn truncated_integrability_sanity(curve: &GrowthCurve, target: IntegrabilityTarget, tol: &Tolerances) -> Result<(VerificationReport, IntegrabilitySanity)> {
    let k = kappa(curve);
    let samples: Vec<&GrowthSample> = curve.resolved().collect();
    if samples.is_empty() {
        return Err(GeomError::Inconclusive("no resolved samples".into()));
    }
    let mut layered = vec![0.0];
    let (mut t_prev, mut f_prev) = (0.0, 0.0);
    for s in &samples {
        let f = (-k * s.t).exp() * s.integral(target.plain());
        let last = *layered.last().expect("nonempty");
        layered.push(last + 0.5 * (f + f_prev) * (s.t - t_prev));
        t_prev = s.t;
        f_prev = f;
    }
    let layered = &layered[1..];
    let weighted: Vec<f64> = samples.iter().map(|s| s.integral(target.weighted())).collect();
    let rel_tail = |v: &[f64]| {
        let last = v[v.len() - 1];
        let first = v[v.len().saturating_sub(10)];
        let d = (last - first).abs();
        if d <= 1e-12 {
            0.0
        } else {
            d / last.abs()
        }
    };
    let (w_last, l_last) = (weighted[weighted.len() - 1], layered[layered.len() - 1]);
    let out = IntegrabilitySanity {
        target,
        weighted: w_last,
        layered: l_last,
        weighted_tail: rel_tail(&weighted),
        layered_tail: rel_tail(layered),
        convergent: rel_tail(&weighted) < tol.tail && rel_tail(layered) < tol.tail,
        ratio: (w_last.abs() > 1e-12).then(|| l_last / w_last),
    };
    let checks = vec![
        CheckRow::at_least_abs("weighted_finite", None, if w_last.is_finite() { 1.0 } else { 0.0 }, 1.0, 0.0),
        CheckRow::at_least_abs("layered_finite", None, if l_last.is_finite() { 1.0 } else { 0.0 }, 1.0, 0.0),
    ];
    let note = if out.convergent {
        "both truncations settle".to_string()
    } else {
        format!("non-convergent tail (weighted {:.3e}, layered {:.3e})", out.weighted_tail, out.layered_tail)
    };
    Ok((VerificationReport::from_checks("integrability", checks, vec![note]), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison_space::build;
    use crate::extrinsic_analysis::complex::two_lobe_fixture;
    use crate::extrinsic_analysis::growth::{growth_curve, sample_radii};
    use crate::extrinsic_analysis::report::Status;
    use crate::extrinsic_analysis::testkit;
    use crate::immersed_surface::radial_envelope;
    use crate::radial_math::{RadialFunction, TailPolicy};

    fn disc_curve() -> GrowthCurve {
        growth_curve(testkit::disc(), &sample_radii(64, 5.8)).unwrap()
    }

    fn zero_space() -> ComparisonSpace {
        build(-1.0, RadialFunction::constant(0.0)).unwrap()
    }

    fn accepted(patch: &TriangulatedPatch, space: &ComparisonSpace) -> Anchor {
        match hypothesis_gate(patch, space, &Tolerances::default()).unwrap() {
            Gate::Accepted(a) => a,
            Gate::Rejected(why) => panic!("rejected: {why}"),
        }
    }

    #[test]
    fn geodesic_disc_equality_certificates() {
        let tol = Tolerances::default();
        let curve = disc_curve();
        let space = zero_space();
        let a = accepted(testkit::disc(), &space);
        assert_eq!((a.t0, a.v0), (0.0, 0.0));
        assert!((a.c - 1.0).abs() < 1e-9);
        let iso = isoperimetric_check(&curve, &space, &a, &tol).unwrap();
        assert!(iso.pass && iso.checks.iter().all(|c| c.margin.abs() < 1e-3));
        let cosh = cosh_integral_bound_check(&curve, &a, &tol);
        assert!(cosh.pass && cosh.checks.iter().all(|c| c.margin.abs() < 1e-3));
        let div = divergence_chain_check(&curve, &tol);
        assert!(div.pass && div.checks.iter().all(|c| c.margin.abs() < 1e-3));
        let (rep, co) = chern_osserman_report(&curve, &a, &tol).unwrap();
        let co = co.unwrap();
        assert!(rep.pass);
        assert_eq!(co.lhs, -1.0);
        assert!((co.rhs + 1.0).abs() < 1e-3 && (co.sup_quotient - 1.0).abs() < 1e-3);
        for term in [co.curvature_term, co.mean_curvature_term, co.anchor_term, co.h2_term] {
            assert!(term.abs() < 1e-4);
        }
        assert!(monotonicity_checks(&curve, &space, &a, &tol).unwrap().pass);
        assert!(annulus_suite(&curve, &tol).unwrap().pass);
        assert!(lemon_check(&curve, &tol).unwrap().pass);
        assert!(coarea_check(&curve, &tol).pass);
    }

    #[test]
    fn graph_surface_passes_with_its_envelope() {
        let tol = Tolerances::default();
        let patch = testkit::graph();
        let imm = patch.immersion.as_ref().unwrap();
        let h = radial_envelope(imm, 64, TailPolicy::ExpDecay { rate: 2.0 }).unwrap();
        let space = build(-1.0, h).unwrap();
        let a = accepted(patch, &space);
        assert!(a.t0 > 0.0 && a.v0 > 0.0 && a.c < 1.0);
        let curve = growth_curve(patch, &sample_radii(64, 5.8)).unwrap();
        for rep in [
            isoperimetric_check(&curve, &space, &a, &tol).unwrap(),
            monotonicity_checks(&curve, &space, &a, &tol).unwrap(),
            cosh_integral_bound_check(&curve, &a, &tol),
            chern_osserman_report(&curve, &a, &tol).unwrap().0,
            annulus_suite(&curve, &tol).unwrap(),
            divergence_chain_check(&curve, &tol),
            lemon_check(&curve, &tol).unwrap(),
        ] {
            assert_eq!(rep.status, Status::Pass, "{}: {:?}", rep.suite, rep.worst_margin());
        }
        // h = 0 does not dominate the radial curvature of this surface
        assert!(matches!(hypothesis_gate(patch, &zero_space(), &tol).unwrap(), Gate::Rejected(_)));
    }

    #[test]
    fn equidistant_gates() {
        let tol = Tolerances::default();
        let patch = testkit::equidistant();
        assert!(matches!(hypothesis_gate(patch, &zero_space(), &tol).unwrap(), Gate::Rejected(_)));
        let curve = growth_curve(patch, &sample_radii(32, 5.8)).unwrap();
        let fake = Anchor { t0: 0.0, t0_h_form: None, c: 1.0, v0: 0.0, cosh0: 0.0, radial_margin: 0.0 };
        let (rep, co) = chern_osserman_report(&curve, &fake, &tol).unwrap();
        assert_eq!(rep.status, Status::RejectedHypothesis);
        assert!(co.is_none());
        assert!(annulus_suite(&curve, &tol).unwrap().pass);
        assert!(divergence_chain_check(&curve, &tol).pass);
        let (_, h) = truncated_integrability_sanity(&curve, IntegrabilityTarget::NormH, &tol).unwrap();
        assert!(!h.convergent && h.weighted.is_finite());
    }

    #[test]
    fn empty_annulus_is_zero() {
        let curve = disc_curve();
        let row = annulus_check(&curve, Some(10), 10, &Tolerances::default()).unwrap();
        assert_eq!((row.lhs, row.rhs), (0.0, 0.0));
        assert!(annulus_check(&curve, Some(11), 10, &Tolerances::default()).is_err());
    }

    #[test]
    fn vacuous_cases() {
        let tol = Tolerances::default();
        let space = zero_space();
        let a = accepted(testkit::disc(), &space);
        let one = growth_curve(testkit::disc(), &[1.0]).unwrap();
        let rep = monotonicity_checks(&one, &space, &a, &tol).unwrap();
        assert!(rep.pass && rep.notes.iter().any(|n| n.contains("vacuous")));
        let empty = GrowthCurve { b: -1.0, samples: vec![], skipped: vec![] };
        let rep = cosh_integral_bound_check(&empty, &a, &tol);
        assert!(rep.pass && rep.checks.is_empty());
        assert!(matches!(huber_check(&one.topology(), None), Err(GeomError::Inconclusive(_))));
    }

    #[test]
    fn fluctuating_boundary_count() {
        let p = TriangulatedPatch::from_complex(two_lobe_fixture()).unwrap();
        let series = topology_series(&p, &[0.5, 2.0, 2.6]).unwrap();
        let minus_chi: Vec<i64> = series.iter().map(|(_, e)| -e.chi).collect();
        assert_eq!(minus_chi, vec![-1, 0, -1]);
        assert_eq!(sampled_liminf(&series), Some(-1));
        assert!(huber_check(&series, Some(1)).unwrap().pass);
    }

    #[test]
    fn lemon_constants_are_nonnegative() {
        let curve = growth_curve(testkit::graph(), &sample_radii(16, 5.8)).unwrap();
        let rep = lemon_check(&curve, &Tolerances::default()).unwrap();
        assert!(rep.pass);
        let s = curve.resolved().last().unwrap();
        assert!(s.integral(SurfaceIntegrand::ExpNormA2) >= 0.0 && s.integral(SurfaceIntegrand::ExpNormH) >= 0.0);
    }

    #[test]
    fn tolerance_scaling() {
        let t = Tolerances::default().scaled(2.0);
        assert_eq!(t.gauss_bonnet, 0.1);
        assert_eq!(t.tail, 0.01);
    }
}

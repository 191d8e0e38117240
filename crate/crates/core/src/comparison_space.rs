//! Isoperimetric comparison spaces: the two-dimensional model with warping
//! `W(t) = sinh(kt)/(k e^{2 H(t)})`, `H(t) = int_0^t h`, together with its
//! isoperimetric quotient `q_W`, the crossing radius `t0`, the constant `C`
//! and the strong-balance predicate.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::model_space::{eta_b_excess, omega_b};
use crate::radial_math::{
    default_step, derivative_fn, first_crossing_on, hybrid_grid, infimum_on_grid, integrate, integrate_fn,
    RadialFunction,
};

const GRID_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRange {
    pub t_min: f64,
    pub t_max: f64,
}

impl ScanRange {
    /// `[1e-3, 50/sqrt(-b)]`.
    pub fn default_for(b: f64) -> Self {
        Self { t_min: 1e-3, t_max: 50.0 / (-b).sqrt() }
    }
}

/// `h_L(r) = (k/L) e^{-2kr}`.
pub fn hl_function(b: f64, l: f64) -> RadialFunction {
    let k = (-b).sqrt();
    RadialFunction::closed(format!("hL {l}"), move |r| k / l * (-2.0 * k * r).exp())
        .with_derivative(move |r| -2.0 * k * k / l * (-2.0 * k * r).exp())
}

/// `(2/k) arcsech(sqrt(L/(L+1)))`, the upper bound on `t0` for `h_L`.
pub fn hl_t0_bound(b: f64, l: f64) -> f64 {
    let x = (l / (l + 1.0)).sqrt();
    2.0 / (-b).sqrt() * ((1.0 + (1.0 - x * x).sqrt()) / x).ln()
}

struct Tables {
    b: f64,
    kappa: f64,
    h: RadialFunction,
    grid: Vec<f64>,
    /// `H(grid[k])`.
    h_cum: Vec<f64>,
    /// `int_0^{grid[k]} W`.
    w_cum: Vec<f64>,
    /// `F(grid[k]) = int_0^{t} w_b(s) expm1(2(H(t) - H(s))) ds`, so `f = 1 - k^2 F`.
    f_cum: Vec<f64>,
}

fn cell_tol(scale: f64) -> f64 {
    (1e-14 * scale.abs()).max(1e-300)
}

impl Tables {
    fn cell(&self, t: f64) -> Option<usize> {
        if t < self.grid[0] {
            None
        } else {
            Some(self.grid.partition_point(|&g| g <= t) - 1)
        }
    }

    fn h_between(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let scale = self.h.eval(0.5 * (a + b)).abs().max(self.kappa * 1e-3) * (b - a);
        Ok(integrate(&self.h, a, b, cell_tol(scale))?.value)
    }

    fn big_h(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self.cell(t) {
            None => self.h_between(0.0, t),
            Some(k) => Ok(self.h_cum[k] + self.h_between(self.grid[k], t)?),
        }
    }

    fn w(&self, t: f64) -> Result<f64> {
        Ok(omega_b(self.b, t) * (-2.0 * self.big_h(t)?).exp())
    }

    fn w_between(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let scale = self.w(0.5 * (a + b))?.abs() * (b - a);
        let q = integrate_fn(|s| self.w(s).unwrap_or(f64::NAN), a, b, cell_tol(scale))?;
        Ok(q.value)
    }

    fn int_w(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self.cell(t) {
            None => self.w_between(0.0, t),
            Some(k) => Ok(self.w_cum[k] + self.w_between(self.grid[k], t)?),
        }
    }

    /// `int_a^t w_b(s) expm1(2(H(t) - H(s))) ds` with `H(t) - H(s)`
    /// integrated locally, so no large exponentials meet.
    fn excess_between(&self, a: f64, t: f64) -> Result<f64> {
        if t <= a {
            return Ok(0.0);
        }
        let integrand = |s: f64| match self.h_between(s, t) {
            Ok(dh) => omega_b(self.b, s) * (2.0 * dh).exp_m1(),
            Err(_) => f64::NAN,
        };
        let mid = 0.5 * (a + t);
        let scale = (omega_b(self.b, mid) * 2.0 * self.h.eval(mid).abs() * (t - a)).max(1e-300) * (t - a);
        Ok(integrate_fn(integrand, a, t, 100.0 * cell_tol(scale))?.value)
    }

    /// `F` at `t` from the nearest lower node:
    /// `F(t) = e^{2dH} F_k + Omega_k expm1(2dH) + int_{t_k}^t ...`,
    /// with `Omega_k = int_0^{t_k} w_b = 2 sinh^2(k t_k / 2)/k^2`.
    fn big_f(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self.cell(t) {
            None => self.excess_between(0.0, t),
            Some(k) => {
                let tk = self.grid[k];
                if t == tk {
                    return Ok(self.f_cum[k]);
                }
                Ok(self.advance(k, t)?)
            }
        }
    }

    fn advance(&self, k: usize, t: f64) -> Result<f64> {
        let tk = self.grid[k];
        let dh = self.h_between(tk, t)?;
        let s = (0.5 * self.kappa * tk).sinh();
        let omega_k = 2.0 * s * s / (self.kappa * self.kappa);
        Ok((2.0 * dh).exp() * self.f_cum[k] + omega_k * (2.0 * dh).exp_m1() + self.excess_between(tk, t)?)
    }

    fn f(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.kappa * self.kappa * self.big_f(t)?)
    }

    fn q(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.int_w(t)? / self.w(t)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub balanced: bool,
    /// `min over grid of (eta_b - k)/2 - |h|`.
    pub margin: f64,
    pub margin_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantC {
    pub value: f64,
    pub t: f64,
    /// `f` on the first grid point; should be 1 up to O(t^3).
    pub head_value: f64,
    pub tail_nondecreasing: bool,
    pub tail_settled: bool,
    pub tail_variation: f64,
    /// `f(t) >= cosh kt - sinh kt` held on every grid point.
    pub lower_bound_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitReport {
    pub h_tail: f64,
    pub h_tail_ok: bool,
    pub w_tail: f64,
    pub w_tail_ok: bool,
    pub q_tail_gap: f64,
    pub q_tail_ok: bool,
    pub q_head_ratio: f64,
    pub q_head_ok: bool,
    pub all_certified: bool,
}

/// A built comparison space. Immutable; all queries are thread-safe.
#[derive(Clone)]
pub struct ComparisonSpace {
    tables: Arc<Tables>,
    pub scan_range: ScanRange,
    pub balance: BalanceReport,
    pub t0: Option<f64>,
    /// Crossing of `q_W (eta - h) >= 1/2`, reported next to the `2h` form.
    pub t0_h_form: Option<f64>,
    pub c: Option<ConstantC>,
    pub c_error: Option<String>,
    pub ode_residual_max: f64,
    /// `q_W <= 1/k` on every grid point.
    pub q_bound_ok: bool,
}

impl std::fmt::Debug for ComparisonSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComparisonSpace")
            .field("b", &self.b())
            .field("h", &self.tables.h.label())
            .field("balance", &self.balance)
            .field("t0", &self.t0)
            .field("c", &self.c)
            .finish()
    }
}

/// Build with the default scan range.
pub fn build(b: f64, h: RadialFunction) -> Result<ComparisonSpace> {
    build_with_range(b, h, ScanRange::default_for(b))
}

pub fn build_with_range(b: f64, h: RadialFunction, range: ScanRange) -> Result<ComparisonSpace> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(GeomError::Build(format!("curvature must be negative, got {b}")));
    }
    if !(range.t_min > 0.0 && range.t_max > range.t_min) {
        return Err(GeomError::Build(format!("bad scan range [{}, {}]", range.t_min, range.t_max)));
    }
    let kappa = (-b).sqrt();
    let grid = hybrid_grid(range.t_min, range.t_max, GRID_POINTS, 1.0 / kappa);
    for &t in &grid {
        let v = h.eval(t);
        if !v.is_finite() {
            return Err(GeomError::Build(format!("h({t}) = {v} is not finite")));
        }
    }
    let n = grid.len();
    let mut tables = Tables {
        b,
        kappa,
        h,
        grid,
        h_cum: Vec::with_capacity(n),
        w_cum: Vec::with_capacity(n),
        f_cum: Vec::with_capacity(n),
    };
    let wrap = |e: GeomError| GeomError::Build(format!("h is not numerically integrable: {e}"));

    // Cumulative tables. Each fill uses only the entries already present.
    let t_first = tables.grid[0];
    let h0 = tables.h_between(0.0, t_first).map_err(wrap)?;
    tables.h_cum.push(h0);
    for k in 1..n {
        let d = tables.h_between(tables.grid[k - 1], tables.grid[k]).map_err(wrap)?;
        let prev = tables.h_cum[k - 1];
        tables.h_cum.push(prev + d);
    }
    let w0 = tables.w_between(0.0, t_first).map_err(wrap)?;
    tables.w_cum.push(w0);
    for k in 1..n {
        let d = tables.w_between(tables.grid[k - 1], tables.grid[k]).map_err(wrap)?;
        let prev = tables.w_cum[k - 1];
        tables.w_cum.push(prev + d);
    }
    let f0 = tables.excess_between(0.0, t_first).map_err(wrap)?;
    tables.f_cum.push(f0);
    for k in 1..n {
        let next = tables.advance(k - 1, tables.grid[k]).map_err(wrap)?;
        tables.f_cum.push(next);
    }

    let tables = Arc::new(tables);
    let grid = &tables.grid;

    // Strong balance, with a relative allowance of 1e-12 for rounding in
    // the two exponentials when |h| sits on the bound.
    let mut balance = BalanceReport { balanced: true, margin: f64::INFINITY, margin_t: grid[0] };
    for &t in grid {
        let bound = 0.5 * eta_b_excess(b, t)?;
        let hv = tables.h.eval(t).abs();
        let m = bound - hv;
        if m < balance.margin {
            balance.margin = m;
            balance.margin_t = t;
        }
        if hv > bound * (1.0 + 1e-12) {
            balance.balanced = false;
        }
    }

    // ODE residual of W'/W against w_b'/w_b - 2h.
    let mut ode_residual_max: f64 = 0.0;
    for &t in grid {
        let step = default_step(t);
        let dw = derivative_fn(|s| tables.w(s).unwrap_or(f64::NAN), t, step).value;
        let lhs = dw / tables.w(t)?;
        let rhs = kappa / (kappa * t).tanh() - 2.0 * tables.h.eval(t);
        ode_residual_max = ode_residual_max.max((lhs - rhs).abs());
    }
    if !ode_residual_max.is_finite() {
        return Err(GeomError::Build("ODE residual is not finite".into()));
    }

    let q_bound_ok = grid
        .iter()
        .all(|&t| tables.q(t).map(|q| q <= (1.0 + 1e-12) / kappa).unwrap_or(false));

    let mut space = ComparisonSpace {
        tables,
        scan_range: range,
        balance,
        t0: None,
        t0_h_form: None,
        c: None,
        c_error: None,
        ode_residual_max,
        q_bound_ok,
    };
    space.t0 = space.crossing(2.0)?;
    space.t0_h_form = space.crossing(1.0)?;
    match constant_c(&space) {
        Ok(c) => space.c = Some(c),
        Err(e) => space.c_error = Some(e.to_string()),
    }
    Ok(space)
}

impl ComparisonSpace {
    pub fn b(&self) -> f64 {
        self.tables.b
    }

    pub fn kappa(&self) -> f64 {
        self.tables.kappa
    }

    pub fn h(&self) -> &RadialFunction {
        &self.tables.h
    }

    pub fn grid(&self) -> &[f64] {
        &self.tables.grid
    }

    pub fn balanced(&self) -> bool {
        self.balance.balanced
    }

    /// `C`, when it could be certified.
    pub fn c_value(&self) -> Option<f64> {
        self.c.map(|c| c.value)
    }

    pub fn h_int(&self, t: f64) -> Result<f64> {
        self.tables.big_h(t)
    }

    pub fn w(&self, t: f64) -> Result<f64> {
        self.tables.w(t)
    }

    pub fn int_w(&self, t: f64) -> Result<f64> {
        self.tables.int_w(t)
    }

    pub fn q_w(&self, t: f64) -> Result<f64> {
        self.tables.q(t)
    }

    /// `f(t) = cosh kt - q_W(t) k sinh kt`, evaluated through the
    /// equivalent form `1 - k^2 int_0^t w_b(s) expm1(2(H(t) - H(s))) ds`.
    pub fn f(&self, t: f64) -> Result<f64> {
        self.tables.f(t)
    }

    /// `2 pi int_0^t W`.
    pub fn ball_volume(&self, t: f64) -> Result<f64> {
        Ok(2.0 * PI * self.int_w(t)?)
    }

    fn radial(&self, label: &str, which: fn(&Tables, f64) -> Result<f64>) -> RadialFunction {
        let tables = Arc::clone(&self.tables);
        RadialFunction::closed(label, move |t| which(&tables, t).unwrap_or(f64::NAN))
    }

    pub fn h_int_fn(&self) -> RadialFunction {
        self.radial("H", Tables::big_h)
    }

    pub fn w_fn(&self) -> RadialFunction {
        self.radial("W", Tables::w)
    }

    pub fn q_w_fn(&self) -> RadialFunction {
        self.radial("q_W", Tables::q)
    }

    pub fn f_fn(&self) -> RadialFunction {
        self.radial("f", Tables::f)
    }

    /// `q_W(t) (eta_b(t) - factor h(t))`.
    pub fn crossing_function(&self, t: f64, factor: f64) -> Result<f64> {
        let k = self.kappa();
        let eta = k / (k * t).tanh();
        Ok(self.q_w(t)? * (eta - factor * self.tables.h.eval(t)))
    }

    /// First grid point from which `q_W (eta - factor h) >= 1/2` holds on
    /// the rest of the grid. When that is the first grid point and the
    /// criterion also holds on `t_min 10^{-j}`, `j = 1..3` (less 1e-12 for
    /// quadrature rounding), the crossing is reported as 0.
    fn crossing(&self, factor: f64) -> Result<Option<f64>> {
        let g = |t: f64| self.crossing_function(t, factor).unwrap_or(f64::NAN);
        let grid = self.grid();
        let found = first_crossing_on(g, 0.5, grid)?;
        Ok(found.map(|t| {
            let head_clear = (1..=3).all(|j| g(grid[0] * 10f64.powi(-j)) >= 0.5 - 1e-12);
            if t == grid[0] && head_clear {
                0.0
            } else {
                t
            }
        }))
    }
}

pub fn is_strongly_balanced(space: &ComparisonSpace) -> BalanceReport {
    space.balance
}

/// `t0` from the `2h` criterion; `None` when it does not occur in the scan
/// range or the space is not balanced.
pub fn find_t0(space: &ComparisonSpace) -> Option<f64> {
    if space.balanced() {
        space.t0
    } else {
        None
    }
}

/// `C = inf_{t > 0} f(t)` over the scan grid, with golden-section
/// refinement and tail flags.
pub fn constant_c(space: &ComparisonSpace) -> Result<ConstantC> {
    let grid = space.grid();
    let k = space.kappa();
    let fvals: Vec<f64> = grid.iter().map(|&t| space.f(t)).collect::<Result<_>>()?;
    if let Some((t, v)) = grid.iter().zip(&fvals).find(|(_, v)| !(**v > 0.0)) {
        return Err(GeomError::InvariantViolation(format!("f({t}) = {v} is not positive")));
    }
    let lower_bound_ok = grid.iter().zip(&fvals).all(|(&t, &v)| v >= (-k * t).exp() * (1.0 - 1e-12));
    let inf = infimum_on_grid(|t| space.f(t).unwrap_or(f64::NAN), grid, 1e-10)?;
    let head_value = fvals[0];
    if (head_value - 1.0).abs() > 1e-6 {
        return Err(GeomError::InvariantViolation(format!(
            "f does not tend to 1 at the origin (f({}) = {head_value})",
            grid[0]
        )));
    }
    Ok(ConstantC {
        value: inf.value,
        t: inf.t,
        head_value,
        tail_nondecreasing: inf.tail_nondecreasing,
        tail_settled: inf.tail_settled,
        tail_variation: inf.tail_variation,
        lower_bound_ok,
    })
}

/// Numerical evidence for `h -> 0`, `W -> inf`, `q_W -> 1/k` at the far end
/// of the scan and `q_W -> 0` at the origin.
pub fn limit_suite(space: &ComparisonSpace) -> Result<LimitReport> {
    let k = space.kappa();
    let grid = space.grid();
    let t_max = grid[grid.len() - 1];
    let t_min = grid[0];
    let h_tail = space.h().eval(t_max).abs();
    let h_tail_ok = h_tail <= 1e-8 * k;
    let w_tail = space.w(t_max)?;
    let decade_start = grid.partition_point(|&t| t < 0.9 * t_max);
    let w_increasing = grid[decade_start..]
        .windows(2)
        .all(|p| space.w(p[1]).unwrap_or(f64::NAN) > space.w(p[0]).unwrap_or(f64::NAN));
    let w_tail_ok = w_increasing && w_tail > 1e6 / k;
    let q_tail_gap = (1.0 / k - space.q_w(t_max)?).abs() * k;
    let q_tail_ok = q_tail_gap <= 1e-8;
    let q_head_ratio = space.q_w(t_min)? / t_min;
    let q_head_ok = (q_head_ratio - 0.5).abs() <= 1e-2;
    Ok(LimitReport {
        h_tail,
        h_tail_ok,
        w_tail,
        w_tail_ok,
        q_tail_gap,
        q_tail_ok,
        q_head_ratio,
        q_head_ok,
        all_certified: h_tail_ok && w_tail_ok && q_tail_ok && q_head_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HlRow {
    pub l: f64,
    pub c_l: f64,
    pub c_lower: f64,
    pub t0: Option<f64>,
    pub t0_bound: f64,
    pub c_within: bool,
    pub t0_within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HlFamilyReport {
    pub b: f64,
    pub rows: Vec<HlRow>,
    /// `C_L` strictly increasing along increasing `L`.
    pub c_increasing: bool,
    /// `t0` non-increasing along increasing `L`.
    pub t0_decreasing: bool,
}

pub fn hl_family_report(b: f64, ls: &[f64]) -> Result<HlFamilyReport> {
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        if !(l >= 1.0) {
            return Err(GeomError::InvalidInput(format!("L must be >= 1, got {l}")));
        }
        let space = build(b, hl_function(b, l))?;
        let c = space
            .c
            .ok_or_else(|| GeomError::InvariantViolation(space.c_error.clone().unwrap_or_default()))?;
        let c_lower = 1.0 - 2.0 / (3.0 * l);
        let t0_bound = hl_t0_bound(b, l);
        rows.push(HlRow {
            l,
            c_l: c.value,
            c_lower,
            t0: space.t0,
            t0_bound,
            c_within: c.value >= c_lower - 1e-4 && c.value <= 1.0,
            t0_within: space.t0.is_some_and(|t| t <= t0_bound + 1e-4),
        });
    }
    let mut order: Vec<&HlRow> = rows.iter().collect();
    order.sort_by(|a, b| a.l.total_cmp(&b.l));
    let c_increasing = order.windows(2).all(|w| w[1].c_l > w[0].c_l);
    let t0_decreasing = order
        .windows(2)
        .all(|w| matches!((w[0].t0, w[1].t0), (Some(a), Some(b)) if b <= a));
    Ok(HlFamilyReport { b, rows, c_increasing, t0_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_space() -> ComparisonSpace {
        build(-1.0, RadialFunction::constant(0.0)).unwrap()
    }

    #[test]
    fn flat_weight_recovers_hyperbolic_quotient() {
        let s = zero_space();
        for &t in &[1e-3f64, 0.3, 1.0, 7.0, 30.0] {
            let q = s.q_w(t).unwrap();
            assert!((q - (0.5 * t).tanh()).abs() < 1e-10, "t={t} q={q}");
            assert!((s.w(t).unwrap() - t.sinh()).abs() <= 1e-14 * t.sinh());
        }
        assert!((s.q_w(1.0).unwrap() - 0.462_117_157_260_009_8).abs() < 1e-10);
        assert!(s.balanced() && s.balance.margin > 0.0);
        assert_eq!(s.c.unwrap().value, 1.0);
        assert_eq!(s.t0, Some(0.0));
    }

    #[test]
    fn hl_weight_against_closed_exponent() {
        let s = build(-1.0, hl_function(-1.0, 1.0)).unwrap();
        for &t in &[0.1f64, 1.0, 3.0] {
            // int_0^t e^{-2s} ds = (1 - e^{-2t})/2, so 2H = 1 - e^{-2t}.
            let expected = t.sinh() * (-(1.0 - (-2.0 * t).exp())).exp();
            assert!((s.w(t).unwrap() - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn f_forms_agree_at_moderate_t() {
        let s = build(-1.0, hl_function(-1.0, 2.0)).unwrap();
        for &t in &[0.05f64, 0.5, 1.0, 2.5, 4.0] {
            let direct = t.cosh() - s.q_w(t).unwrap() * t.sinh();
            assert!((s.f(t).unwrap() - direct).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn constant_weight_is_not_balanced() {
        let s = build(-1.0, RadialFunction::constant(0.3)).unwrap();
        assert!(!s.balanced());
        assert!(s.balance.margin < -0.29);
        assert_eq!(find_t0(&s), None);
    }

    // Reference crossings and C_L from an independent 30-digit evaluation
    // (closed-form H, adaptive quadrature for int W, secant root finding).
    const HL_ORACLE: [(f64, f64, f64, f64, f64); 5] = [
        (-1.0, 1.0, 0.799_628_081_475_15, 0.380_880_530_744_199, 0.627_815_041_275_923),
        (-1.0, 2.0, 0.624_414_961_772_332, 0.275_408_205_403_397, 0.824_360_635_350_047),
        (-1.0, 10.0, 0.281_396_269_419_479, 0.098_533_594_603_192_7, 0.966_328_504_439_446),
        (-1.0, 100.0, 0.047_879_787_059_142_1, 0.012_828_522_826_330_6, 0.996_663_328_564_779),
        (-4.0, 1.0, 0.399_814_040_737_575, 0.190_440_265_372_1, 0.627_815_041_275_923),
    ];

    #[test]
    fn hl_spaces_match_reference() {
        for &(b, l, t0, t0h, c) in &HL_ORACLE {
            let s = build(b, hl_function(b, l)).unwrap();
            assert!(s.balanced(), "L={l}");
            assert!((s.t0.unwrap() - t0).abs() < 1e-9, "t0 L={l}: {:?}", s.t0);
            assert!((s.t0_h_form.unwrap() - t0h).abs() < 1e-9, "t0h L={l}");
            assert!((s.c.unwrap().value - c).abs() < 1e-9, "C L={l}");
            assert!(s.ode_residual_max < 1e-4, "residual {}", s.ode_residual_max);
        }
    }

    #[test]
    fn hl_bound_formula() {
        // 2 arcsech(100/sqrt(10001)) = 0.019999..
        assert!((hl_t0_bound(-1.0, 1e4) - 0.019_999_666_681_645_88).abs() < 1e-12);
        assert!((hl_t0_bound(-1.0, 1.0) - 1.762_747_174).abs() < 1e-8);
    }

    #[test]
    fn limits_for_zero_weight() {
        let l = limit_suite(&zero_space()).unwrap();
        assert!(l.all_certified, "{l:?}");
        assert!(l.q_tail_gap < 1e-10);
    }

    #[test]
    fn truncated_range_misses_crossing() {
        let r = ScanRange { t_min: 1e-3, t_max: 0.5 };
        let s = build_with_range(-1.0, hl_function(-1.0, 1.0), r).unwrap();
        assert_eq!(s.t0, None);
    }

    #[test]
    fn non_finite_weight_fails_build() {
        let h = RadialFunction::closed("bad", |t| if t > 3.0 { f64::INFINITY } else { 0.0 });
        assert!(matches!(build(-1.0, h), Err(GeomError::Build(_))));
    }
}

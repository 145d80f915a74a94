//! Active tracking quality, resource and utility for a single task.
//!
//! The quality of a track is its angular estimation error `q = θ_bw · v0`,
//! where the track sharpness `v0` is the positive root of the Van Keuk–Blackman
//! relation `1 + (β/2 + 2)·v0² − αβ·v0^2.4 = 0`. The expected steady-state
//! resource is the duty fraction `g = n_l · T_d · f_t`, with `n_l` the expected
//! number of looks per update under a Swerling I target.

use serde::{Deserialize, Serialize};

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Radar-wide constants shared by every task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConstants {
    /// Radar constant folding power, wavelength, efficiency and losses, m²/s.
    pub k_rad: f64,
    pub p_fa: f64,
    pub n_h_total: u32,
    pub n_v_total: u32,
    /// Half-power half-beamwidth factor, rad.
    pub alpha_bw: f64,
    /// Array tilt with respect to the ground plane, rad.
    pub tilt: f64,
    /// Below this SN0 the target is not detected.
    pub snr_floor_db: f64,
    /// SN0 used for accuracy is capped here.
    pub snr_cap_db: f64,
}

impl Default for RadarConstants {
    fn default() -> Self {
        Self {
            k_rad: 2.4e16,
            p_fa: 1e-4,
            n_h_total: 48,
            n_v_total: 48,
            alpha_bw: 0.886,
            tilt: 5f64.to_radians(),
            snr_floor_db: 10.0,
            snr_cap_db: 40.0,
        }
    }
}

impl RadarConstants {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.k_rad > 0.0
            && self.p_fa > 0.0
            && self.p_fa < 1.0
            && self.n_h_total >= 1
            && self.n_v_total >= 1
            && self.alpha_bw > 0.0
            && self.snr_floor_db < self.snr_cap_db;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Config(format!("invalid radar constants {self:?}")))
        }
    }

    pub fn full_aperture(&self) -> u32 {
        self.n_h_total * self.n_v_total
    }
}

/// One task's set-point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    /// Coherent integration (dwell) time, s.
    pub t_d: f64,
    /// Track update frequency, Hz.
    pub f_t: f64,
    pub n_h: u32,
    pub n_v: u32,
}

/// State of one target as seen from the array face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Range, m.
    pub range: f64,
    /// Horizontal angle off the array normal, rad.
    pub theta_h: f64,
    /// Vertical angle off the array normal, rad.
    pub theta_v: f64,
    /// Radar cross section, m².
    pub rcs: f64,
    /// Singer acceleration standard deviation, m/s².
    pub maneuver_std: f64,
    /// Singer correlation time, s.
    pub corr_time: f64,
}

/// Discrete per-dimension values a task may choose from. Every list is sorted
/// ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlGrid {
    pub t_d: Vec<f64>,
    pub f_t: Vec<f64>,
    pub n_h: Vec<u32>,
    pub n_v: Vec<u32>,
}

impl ControlGrid {
    pub const DIMS: usize = 4;

    pub fn sizes(&self) -> [usize; 4] {
        [self.t_d.len(), self.f_t.len(), self.n_h.len(), self.n_v.len()]
    }

    pub fn len(&self) -> usize {
        self.sizes().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Control point at per-dimension indices `(t_d, f_t, n_h, n_v)`.
    pub fn point(&self, idx: [u16; 4]) -> ControlPoint {
        ControlPoint {
            t_d: self.t_d[idx[0] as usize],
            f_t: self.f_t[idx[1] as usize],
            n_h: self.n_h[idx[2] as usize],
            n_v: self.n_v[idx[3] as usize],
        }
    }

    /// Same grid with the aperture pinned to the full array.
    pub fn full_aperture(&self, consts: &RadarConstants) -> Self {
        Self {
            t_d: self.t_d.clone(),
            f_t: self.f_t.clone(),
            n_h: vec![consts.n_h_total],
            n_v: vec![consts.n_v_total],
        }
    }

    pub fn validate(&self, consts: &RadarConstants) -> crate::Result<()> {
        fn sorted<T: PartialOrd>(v: &[T]) -> bool {
            !v.is_empty() && v.windows(2).all(|w| w[0] < w[1])
        }
        let ok = sorted(&self.t_d)
            && sorted(&self.f_t)
            && sorted(&self.n_h)
            && sorted(&self.n_v)
            && self.t_d[0] > 0.0
            && self.f_t[0] > 0.0
            && self.n_h[0] >= 1
            && self.n_v[0] >= 1
            && *self.n_h.last().unwrap() <= consts.n_h_total
            && *self.n_v.last().unwrap() <= consts.n_v_total;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Config("control grid must be nonempty, ascending and within the array".into()))
        }
    }
}

/// Per-task requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub weight: f64,
    /// Angular error at which utility drops to zero, rad.
    pub q_min: f64,
    /// Angular error at which utility saturates at one, rad.
    pub q_max: f64,
    pub control_grid: ControlGrid,
}

/// Tracking figures of a feasible set-point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackFigures {
    /// Track sharpness.
    pub v0: f64,
    /// Angular estimation error, rad.
    pub quality: f64,
    /// Expected number of looks per update.
    pub n_looks: f64,
    pub p_d: f64,
    pub gamma: f64,
    /// Local duty fraction `n_l · T_d · f_t`.
    pub resource: f64,
}

/// Outcome of evaluating one task at one set-point.
///
/// When the SN0 floor is not met (or no track sharpness root exists) `track`
/// is `None`: the quality and resource are not numbers and the utility is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskEvaluation {
    pub xi: f64,
    pub sn0_raw: f64,
    /// SN0 after applying the accuracy cap.
    pub sn0_used: f64,
    pub beamwidth: f64,
    pub track: Option<TrackFigures>,
    pub utility: f64,
}

impl TaskEvaluation {
    pub fn feasible(&self) -> bool {
        self.track.is_some()
    }

    pub fn quality(&self) -> Option<f64> {
        self.track.map(|t| t.quality)
    }

    pub fn resource(&self) -> Option<f64> {
        self.track.map(|t| t.resource)
    }
}

/// Cross-talk loss of a sub-aperture: `0.8 + 0.2 · (n_h/N_hT)·(n_v/N_vT)`.
pub fn crosstalk_loss(n_h: u32, n_v: u32, consts: &RadarConstants) -> f64 {
    0.8 + 0.2 * (n_h as f64 / consts.n_h_total as f64) * (n_v as f64 / consts.n_v_total as f64)
}

fn cos_squared(theta: f64) -> f64 {
    if theta.abs() >= std::f64::consts::FRAC_PI_2 {
        0.0
    } else {
        theta.cos().powi(2)
    }
}

/// SNR without angular pointing error.
///
/// Returns `(raw, used, feasible)`: the raw SN0, the SN0 capped for accuracy,
/// and whether the raw value clears the detection floor.
pub fn snr0(ctrl: &ControlPoint, env: &Environment, consts: &RadarConstants) -> (f64, f64, bool) {
    let n_h = ctrl.n_h as f64;
    let n_v = ctrl.n_v as f64;
    let raw = consts.k_rad
        * n_h.powi(3)
        * n_v.powi(3)
        * ctrl.t_d
        * cos_squared(env.theta_h)
        * cos_squared(env.theta_v)
        * env.rcs
        / env.range.powi(4);
    let feasible = raw >= db_to_linear(consts.snr_floor_db);
    let used = raw.min(db_to_linear(consts.snr_cap_db));
    (raw, used, feasible)
}

/// Positive root of `1 + (β/2 + 2)·v² − αβ·v^2.4 = 0`.
///
/// The function starts at 1, rises, then falls without bound for `α, β > 0`,
/// so it has exactly one positive root. The root is bracketed by doubling an
/// upper bound from 1 (giving up past 1e3) and refined by bisection down to
/// adjacent floating-point values.
pub fn track_sharpness(alpha: f64, beta: f64) -> Option<f64> {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return None;
    }
    let a = beta / 2.0 + 2.0;
    let b = alpha * beta;
    let f = |v: f64| 1.0 + a * v * v - b * v.powf(2.4);

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut f_hi = f(hi);
    while f_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return None;
        }
        f_hi = f(hi);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        Some(lo)
    } else {
        Some(hi)
    }
}

/// Residual of the track sharpness relation at `v`, divided by the sum of the
/// magnitudes of its terms. Near the root the absolute residual of a rounded
/// `v` grows with `β·v^2.4`, so this is the scale-free accuracy measure.
pub fn sharpness_residual(alpha: f64, beta: f64, v: f64) -> f64 {
    let quad = (beta / 2.0 + 2.0) * v * v;
    let pow = alpha * beta * v.powf(2.4);
    (1.0 + quad - pow) / (1.0 + quad + pow)
}

/// Scan-broadened half beamwidth: the wider of the horizontal and vertical
/// half beamwidths `α_bw / (n · cos θ)`.
pub fn beamwidth(ctrl: &ControlPoint, env: &Environment, consts: &RadarConstants) -> f64 {
    let broadened = |n: u32, theta: f64| {
        let c = theta.cos();
        if theta.abs() >= std::f64::consts::FRAC_PI_2 || c <= 0.0 {
            f64::INFINITY
        } else {
            consts.alpha_bw / (n as f64 * c)
        }
    };
    broadened(ctrl.n_h, env.theta_h).max(broadened(ctrl.n_v, env.theta_v))
}

/// Linear utility of an angular error, clamped to `[0, 1]`. Non-numeric
/// errors (undetected targets) have zero utility.
pub fn utility_linear(q: f64, spec: &TaskSpec) -> f64 {
    if !q.is_finite() {
        return 0.0;
    }
    ((q - spec.q_min) / (spec.q_max - spec.q_min)).clamp(0.0, 1.0)
}

/// Evaluates quality, resource and utility of one task at one set-point.
pub fn evaluate_task(
    ctrl: &ControlPoint,
    env: &Environment,
    spec: &TaskSpec,
    consts: &RadarConstants,
) -> TaskEvaluation {
    let xi = crosstalk_loss(ctrl.n_h, ctrl.n_v, consts);
    let (sn0_raw, sn0_used, detectable) = snr0(ctrl, env, consts);
    let theta_bw = beamwidth(ctrl, env, consts);
    let infeasible = TaskEvaluation {
        xi,
        sn0_raw,
        sn0_used,
        beamwidth: theta_bw,
        track: None,
        utility: 0.0,
    };
    if !detectable || !theta_bw.is_finite() {
        return infeasible;
    }

    let ln_pfa = consts.p_fa.ln();
    let snr = xi * sn0_used;
    let alpha = 0.4 * ctrl.f_t * (env.range * theta_bw * env.corr_time.sqrt() / env.maneuver_std).powf(0.4);
    let beta = snr - ln_pfa;
    let Some(v0) = track_sharpness(alpha, beta) else {
        return infeasible;
    };

    let quality = theta_bw * v0;
    let p_d = consts.p_fa.powf(1.0 / (1.0 + snr));
    let gamma = 1.0 + 14.0 * (ln_pfa.abs() / snr).sqrt();
    let n_looks = (1.0 + (gamma * v0 * v0).powi(2)).sqrt() / p_d;
    let resource = n_looks * ctrl.t_d * ctrl.f_t;

    TaskEvaluation {
        track: Some(TrackFigures {
            v0,
            quality,
            n_looks,
            p_d,
            gamma,
            resource,
        }),
        utility: utility_linear(quality, spec),
        ..infeasible
    }
}

/// Resource without array scheduling constraints: the local resource scaled
/// by the fraction of the array the task occupies.
pub fn resource_unconstrained(eval: &TaskEvaluation, ctrl: &ControlPoint, consts: &RadarConstants) -> Option<f64> {
    eval.resource()
        .map(|g| g * ((ctrl.n_h as f64 * ctrl.n_v as f64) / consts.full_aperture() as f64))
}

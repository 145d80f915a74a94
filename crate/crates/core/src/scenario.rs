//! Randomized target scenes.
//!
//! Every run draws a fresh scene from a ChaCha8 stream selected by
//! `(seed, stream)`, so Monte Carlo runs are independent and replayable.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::kbs::{db_to_linear, ControlGrid, Environment, RadarConstants, TaskSpec};
use crate::{Error, Result};

pub const GENERATOR: &str = "ChaCha8Rng";

/// Range interval of the scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SceneVariant {
    #[serde(rename = "70km")]
    Near,
    #[serde(rename = "250km")]
    Far,
}

impl SceneVariant {
    pub fn range_max(self) -> f64 {
        match self {
            Self::Near => 70e3,
            Self::Far => 250e3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Near => "70km",
            Self::Far => "250km",
        }
    }
}

impl fmt::Display for SceneVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SceneVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "70km" | "70" => Ok(Self::Near),
            "250km" | "250" => Ok(Self::Far),
            _ => Err(Error::Config(format!("unknown scene {s:?}, expected 70km or 250km"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub n_targets: usize,
    pub range_min: f64,
    pub range_max: f64,
    pub n_high_priority: usize,
    /// Targets drawn above this altitude get a new altitude below it, m.
    pub altitude_cap: f64,
    pub seed: u64,
    /// ChaCha stream, one per Monte Carlo run.
    pub stream: u64,
    pub q_min: f64,
    pub q_max: f64,
}

impl SceneParams {
    /// A fifth of the targets are high priority.
    pub fn new(variant: SceneVariant, n_targets: usize, seed: u64, stream: u64) -> Self {
        Self {
            n_targets,
            range_min: 10e3,
            range_max: variant.range_max(),
            n_high_priority: (n_targets as f64 * 0.2).round() as usize,
            altitude_cap: 20e3,
            seed,
            stream,
            q_min: 3e-3,
            q_max: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_high_priority > self.n_targets
            || !(self.range_min > 0.0 && self.range_max > self.range_min)
            || !(self.altitude_cap > 0.0)
            || !(self.q_max > 0.0 && self.q_max < self.q_min)
        {
            return Err(Error::Config(format!("invalid scene parameters {self:?}")));
        }
        Ok(())
    }
}

/// Singer maneuver class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingerType {
    I,
    II,
    III,
}

impl SingerType {
    pub const ALL: [SingerType; 3] = [Self::I, Self::II, Self::III];

    /// Maneuver standard deviation range, m/s².
    pub fn maneuver_std(self) -> (f64, f64) {
        match self {
            Self::I => (20.0, 35.0),
            Self::II => (0.0, 5.0),
            Self::III => (5.0, 20.0),
        }
    }

    /// Correlation time range, s.
    pub fn corr_time(self) -> (f64, f64) {
        match self {
            Self::I => (10.0, 20.0),
            Self::II => (1.0, 4.0),
            Self::III => (30.0, 50.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// Array-face geometry.
    pub env: Environment,
    /// Elevation above the ground plane, rad.
    pub elevation: f64,
    pub singer: SingerType,
    pub high_priority: bool,
    pub spec: TaskSpec,
}

impl Target {
    pub fn altitude(&self) -> f64 {
        self.env.range * self.elevation.sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedScene {
    pub params: SceneParams,
    pub generator: String,
    pub consts: RadarConstants,
    pub targets: Vec<Target>,
}

impl GeneratedScene {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let scene: Self = serde_json::from_str(s)?;
        scene.consts.validate()?;
        for t in &scene.targets {
            t.spec.control_grid.validate(&scene.consts)?;
        }
        Ok(scene)
    }
}

/// Discrete control values: dwell 4 to 64 ms in 1.2 ms steps, update rate
/// 0.2 to 6 Hz in 0.2 Hz steps, 6 to 48 elements in steps of 6.
pub fn default_control_grid() -> ControlGrid {
    ControlGrid {
        t_d: (0..51).map(|i| (4.0 + 1.2 * i as f64) * 1e-3).collect(),
        f_t: (0..30).map(|i| 0.2 * (i + 1) as f64).collect(),
        n_h: (1..=8).map(|i| 6 * i).collect(),
        n_v: (1..=8).map(|i| 6 * i).collect(),
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..hi)
}

/// Draws a scene with the default radar constants and control grid.
pub fn generate_scene(params: &SceneParams) -> Result<GeneratedScene> {
    generate_scene_with(params, RadarConstants::default(), default_control_grid())
}

pub fn generate_scene_with(params: &SceneParams, consts: RadarConstants, grid: ControlGrid) -> Result<GeneratedScene> {
    params.validate()?;
    consts.validate()?;
    grid.validate(&consts)?;
    let mut rng = rng_for(params.seed, params.stream);

    let mut draws = Vec::with_capacity(params.n_targets);
    for k in 0..params.n_targets {
        let range = uniform(&mut rng, (params.range_min, params.range_max));
        let theta_h = uniform(&mut rng, (-60f64.to_radians(), 60f64.to_radians()));
        let mut elevation = uniform(&mut rng, (0.0, 70f64.to_radians()));
        if range * elevation.sin() > params.altitude_cap {
            let altitude = uniform(&mut rng, (0.0, params.altitude_cap));
            elevation = (altitude / range).asin();
        }
        let rcs = db_to_linear(uniform(&mut rng, (-10.0, 10.0)));
        let singer = SingerType::ALL[rng.gen_range(0..3)];
        let mut maneuver_std = 0.0;
        while maneuver_std <= 0.0 {
            maneuver_std = uniform(&mut rng, singer.maneuver_std());
        }
        let corr_time = uniform(&mut rng, singer.corr_time());
        let high_priority = k < params.n_high_priority;
        let weight = if high_priority {
            uniform(&mut rng, (0.7, 0.9))
        } else {
            uniform(&mut rng, (0.2, 0.5))
        };
        draws.push((
            Environment {
                range,
                theta_h,
                theta_v: elevation - consts.tilt,
                rcs,
                maneuver_std,
                corr_time,
            },
            elevation,
            singer,
            high_priority,
            weight,
        ));
    }

    let total: f64 = draws.iter().map(|d| d.4).sum();
    let targets = draws
        .into_iter()
        .map(|(env, elevation, singer, high_priority, w)| Target {
            env,
            elevation,
            singer,
            high_priority,
            spec: TaskSpec {
                weight: w / total,
                q_min: params.q_min,
                q_max: params.q_max,
                control_grid: grid.clone(),
            },
        })
        .collect();

    Ok(GeneratedScene {
        params: params.clone(),
        generator: GENERATOR.to_string(),
        consts,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kbs::linear_to_db;

    fn scene(seed: u64, stream: u64) -> GeneratedScene {
        generate_scene(&SceneParams::new(SceneVariant::Near, 60, seed, stream)).unwrap()
    }

    #[test]
    fn grid_sizes_and_bounds() {
        let g = default_control_grid();
        assert_eq!(g.sizes(), [51, 30, 8, 8]);
        assert!((g.t_d[0] - 0.004).abs() < 1e-15);
        assert!((g.t_d[50] - 0.064).abs() < 1e-15);
        assert!((g.f_t[29] - 6.0).abs() < 1e-12);
        assert_eq!(g.n_h, vec![6, 12, 18, 24, 30, 36, 42, 48]);
        assert_eq!(g.full_aperture(&RadarConstants::default()).sizes(), [51, 30, 1, 1]);
    }

    #[test]
    fn same_seed_same_scene() {
        assert_eq!(scene(5, 0), scene(5, 0));
        assert_ne!(scene(5, 0), scene(6, 0));
        assert_ne!(scene(5, 0), scene(5, 1));
    }

    #[test]
    fn weights_are_normalized_with_twelve_high_priority() {
        let s = scene(1, 0);
        let sum: f64 = s.targets.iter().map(|t| t.spec.weight).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(s.targets.iter().filter(|t| t.high_priority).count(), 12);
        let min_high = s.targets.iter().filter(|t| t.high_priority).map(|t| t.spec.weight).fold(1.0, f64::min);
        let max_low = s.targets.iter().filter(|t| !t.high_priority).map(|t| t.spec.weight).fold(0.0, f64::max);
        assert!(min_high > max_low);
    }

    #[test]
    fn draws_respect_their_ranges() {
        for stream in 0..50 {
            let s = generate_scene(&SceneParams::new(SceneVariant::Far, 60, 9, stream)).unwrap();
            for t in &s.targets {
                assert!(t.altitude() <= 20e3 + 1e-6);
                assert!((10e3..250e3).contains(&t.env.range));
                assert!(t.env.theta_h.abs() <= 60f64.to_radians());
                assert!(t.elevation >= 0.0 && t.elevation <= 70f64.to_radians());
                assert!((t.env.theta_v - (t.elevation - 5f64.to_radians())).abs() < 1e-15);
                let (a, b) = t.singer.maneuver_std();
                assert!(t.env.maneuver_std > 0.0 && t.env.maneuver_std >= a && t.env.maneuver_std <= b);
                let (a, b) = t.singer.corr_time();
                assert!(t.env.corr_time >= a && t.env.corr_time <= b);
                let db = linear_to_db(t.env.rcs);
                assert!((-10.0..=10.0).contains(&db));
            }
        }
    }

    #[test]
    fn rcs_mean_is_zero_db() {
        let mut sum = 0.0;
        let mut n = 0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for stream in 0..1667 {
            for t in scene(3, stream).targets {
                let db = linear_to_db(t.env.rcs);
                sum += db;
                lo = lo.min(db);
                hi = hi.max(db);
                n += 1;
            }
        }
        let mean = sum / n as f64;
        // uniform on [-10, 10]: std 20/sqrt(12)
        let se = 20.0 / 12f64.sqrt() / (n as f64).sqrt();
        assert!(n >= 100_000);
        assert!(mean.abs() < 3.0 * se, "mean {mean} se {se}");
        assert!(lo >= -10.0 && hi <= 10.0);
    }

    #[test]
    fn json_round_trip() {
        let s = scene(2, 4);
        assert_eq!(GeneratedScene::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn high_priority_count_is_validated() {
        let mut p = SceneParams::new(SceneVariant::Near, 5, 0, 0);
        p.n_high_priority = 6;
        assert!(generate_scene(&p).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("70km".parse::<SceneVariant>().unwrap(), SceneVariant::Near);
        assert_eq!("250km".parse::<SceneVariant>().unwrap(), SceneVariant::Far);
        assert!("100km".parse::<SceneVariant>().is_err());
    }
}

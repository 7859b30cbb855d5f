//! Browser demo: step the planner on a generated shelf and inspect the belief.

use serde::Serialize;
use shelfmem::belief::{fuse_occupancy, BetaParams, Evidence};
use shelfmem::planner::{EpisodeSettings, LoggedAction, Method, Planner, SimState};
use shelfmem::scene::{generate_scene, Scene, SceneGenConfig, WallSpec};
use wasm_bindgen::prelude::*;

const PALETTE: [[u8; 3]; 12] = [
    [236, 236, 230],
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
    [90, 60, 140],
];

fn color(label: u16) -> [u8; 3] {
    PALETTE[label as usize % PALETTE.len()]
}

/// What one planner step did, for the page's log.
#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub kind: &'static str,
    pub vig_nbv: f64,
    pub vig_push: Option<f64>,
    pub feasible: bool,
    pub moved: f64,
    pub sem_miou: f64,
    pub occ_miou: f64,
    pub certainty: f64,
    pub done: bool,
}

#[wasm_bindgen]
pub struct Session {
    settings: EpisodeSettings,
    state: SimState,
    method: Method,
    seed: u64,
    step: usize,
    done: bool,
}

impl Session {
    pub fn create(seed: u64, method: Method, budget: usize, wall: bool) -> shelfmem::Result<Self> {
        let gen = SceneGenConfig {
            wall: wall.then(WallSpec::default),
            ..SceneGenConfig::default()
        };
        let scene = generate_scene(seed, gen.object_count(seed), &gen)?;
        let mut settings = EpisodeSettings::default();
        settings.planner.action_budget = budget;
        settings.validate()?;
        let state = SimState::new(&scene, &settings)?;
        Ok(Session {
            settings,
            state,
            method,
            seed,
            step: 0,
            done: false,
        })
    }

    /// Runs one decision and its execution; `None` once the episode is over.
    pub fn advance(&mut self) -> shelfmem::Result<Option<StepReport>> {
        let s = &self.settings;
        if self.done || self.step >= s.planner.action_budget {
            self.done = true;
            return Ok(None);
        }
        if self.step > 0 && self.state.certainty(s) >= s.planner.completion_certainty {
            self.done = true;
            return Ok(None);
        }
        let mut planner = Planner::new(s, self.method, self.seed);
        let decision = planner.select_action(&self.state, self.step)?;
        let effect = self
            .state
            .execute(&decision.action, s, self.seed, self.step)?;
        let m = self.state.metrics(s)?;
        let fell = effect.outcome.as_ref().is_some_and(|o| !o.fallen.is_empty());
        let report = StepReport {
            step: self.step,
            kind: match decision.action {
                LoggedAction::View { .. } => "view",
                LoggedAction::Push { .. } => "push",
            },
            vig_nbv: decision.vig_nbv,
            vig_push: decision.vig_push,
            feasible: effect.feasible,
            moved: effect.outcome.map_or(0.0, |o| o.total_displacement()),
            sem_miou: m.sem_miou,
            occ_miou: m.occ_miou,
            certainty: m.certainty,
            done: false,
        };
        self.step += 1;
        self.done = self.step >= s.planner.action_budget || (fell && s.planner.tof_enabled);
        Ok(Some(StepReport {
            done: self.done,
            ..report
        }))
    }

    pub fn scene(&self) -> &Scene {
        &self.state.scene
    }

    fn rgba(&self, px: impl Fn(usize) -> [u8; 3]) -> Vec<u8> {
        let n = self.settings.grid.n_cells();
        let mut out = Vec::with_capacity(4 * n);
        for cell in 0..n {
            let [r, g, b] = px(cell);
            out.extend_from_slice(&[r, g, b, 255]);
        }
        out
    }
}

#[wasm_bindgen]
impl Session {
    /// `method` is one of `informed-push`, `random-push`, `view-only`,
    /// `random-view`.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, method: &str, budget: usize, wall: bool) -> Result<Session, JsError> {
        let method: Method = method.parse().map_err(|e: shelfmem::Error| JsError::new(&e.to_string()))?;
        Session::create(seed as u64, method, budget, wall).map_err(|e| JsError::new(&e.to_string()))
    }

    pub fn rows(&self) -> usize {
        self.settings.grid.rows
    }

    pub fn cols(&self) -> usize {
        self.settings.grid.cols
    }

    #[wasm_bindgen(getter)]
    pub fn done(&self) -> bool {
        self.done
    }

    /// One planner step as JSON, or `null` when the episode has ended.
    pub fn step(&mut self) -> Result<String, JsError> {
        let r = self.advance().map_err(|e| JsError::new(&e.to_string()))?;
        Ok(serde_json::to_string(&r).expect("report serializes"))
    }

    /// Top-down ground truth, one RGBA pixel per cell, row 0 at the front.
    pub fn truth_rgba(&self) -> Vec<u8> {
        let gt = &self.state.gt;
        self.rgba(|c| color(gt.labels[c]))
    }

    /// Most likely class per cell, darkened where the class is uncertain.
    pub fn belief_rgba(&self) -> Vec<u8> {
        let b = &self.state.belief;
        self.rgba(|c| {
            let u = b.cell_uncertainty(c).clamp(0.0, 1.0);
            let base = color(b.cell_label(c));
            base.map(|v| (v as f64 * (1.0 - 0.85 * u)) as u8)
        })
    }

    /// Column occupancy variance: white is certain, red is the prior.
    pub fn uncertainty_rgba(&self) -> Vec<u8> {
        let maps = self.state.belief.uncertainty_maps();
        let u = maps.u_o_normalized();
        self.rgba(|c| {
            let k = (255.0 * (1.0 - u[c])) as u8;
            [255, k, k]
        })
    }

    pub fn scene_json(&self) -> String {
        self.state.scene.to_canonical_json()
    }

    pub fn object_count(&self) -> usize {
        self.state.scene.standing().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaReport {
    pub alpha: f64,
    pub beta: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Fuses `hits` and `misses` observations of weight `weight` into the
/// uniform prior.
pub fn beta_after(hits: u32, misses: u32, weight: f64) -> shelfmem::Result<BetaReport> {
    let mut p = BetaParams::PRIOR;
    for _ in 0..hits {
        p = fuse_occupancy(p, Evidence::Hit, weight)?;
    }
    for _ in 0..misses {
        p = fuse_occupancy(p, Evidence::Miss, weight)?;
    }
    Ok(BetaReport {
        alpha: p.alpha,
        beta: p.beta,
        mean: p.mean(),
        variance: p.variance(),
    })
}

/// Voxel evidence calculator for the page, as JSON.
#[wasm_bindgen]
pub fn beta_evidence(hits: u32, misses: u32, weight: f64) -> Result<String, JsError> {
    let r = beta_after(hits, misses, weight).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(serde_json::to_string(&r).expect("report serializes"))
}

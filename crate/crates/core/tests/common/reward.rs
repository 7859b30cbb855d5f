use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shelfmem::view::*;

pub fn pose(cam: [f64; 3], target: [f64; 3]) -> ViewPose {
    ViewPose::new(Vector3::from(cam), Vector3::from(target))
}

pub fn history_of(poses: &[ViewPose]) -> ViewHistory {
    let mut h = ViewHistory::new(poses.len().max(1));
    for p in poses {
        h.push(HistoryEntry {
            pose: *p,
            action: [0.0; 6],
            height_map: Vec::new(),
        });
    }
    h
}

pub fn step_reward_fixtures() {
    let cfg = RewardConfig::default();
    let v = pose([0.4, -0.15, 0.15], [0.4, 0.2, 0.05]);
    assert_eq!(repeat_penalty(&v, &history_of(&[v]), &cfg), -1.0);
    let t = Transition {
        feasible: true,
        r_uncertainty: 0.2,
        r_repeat: -1.0,
    };
    assert!(step_reward(&t, &cfg).abs() < 1e-15);
    let t = Transition {
        feasible: false,
        r_uncertainty: 3.0,
        r_repeat: -1.0,
    };
    assert_eq!(step_reward(&t, &cfg), -cfg.r_feasibility);
}

/// Independent statement of the gated penalty for one past view.
pub fn oracle_term(v: &ViewPose, h: &ViewPose, cfg: &RewardConfig) -> f64 {
    let p = (v.cam - h.cam).norm();
    let e = (1.0 - v.direction().unwrap().dot(&h.direction().unwrap())).max(0.0);
    if p <= cfg.theta_p && e <= cfg.theta_e {
        -(cfg.gamma_p * (1.0 - p / cfg.theta_p) + cfg.gamma_e * (1.0 - e / cfg.theta_e))
    } else {
        0.0
    }
}

/// Random histories clustered around one view, mixing gated and ungated
/// entries, checked against the oracle sum.
pub fn gate_semantics_on_random_histories(n: usize) {
    let cfg = RewardConfig::default();
    let v = pose([0.4, -0.15, 0.15], [0.4, 0.2, 0.05]);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut gated = 0;
    for _ in 0..n {
        let len = rng.gen_range(0..6);
        let hist: Vec<ViewPose> = (0..len)
            .map(|_| {
                let scale = [0.0, 0.02, 0.3][rng.gen_range(0..3)];
                let jitter = |rng: &mut ChaCha8Rng| {
                    Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
                };
                ViewPose::new(v.cam + jitter(&mut rng), v.target + jitter(&mut rng))
            })
            .collect();
        let want: f64 = hist.iter().map(|h| oracle_term(&v, h, &cfg)).sum();
        gated += hist.iter().filter(|h| oracle_term(&v, h, &cfg) < 0.0).count();
        let got = repeat_penalty(&v, &history_of(&hist), &cfg);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert!(gated > 0);
}

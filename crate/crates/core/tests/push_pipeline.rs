use nalgebra::Vector2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shelfmem::belief::{BeliefState, BetaParams, Evidence, UncertaintyMaps, PRIOR_VARIANCE};
use shelfmem::push::*;
use shelfmem::rng::{derive, Stream};
use shelfmem::GridSpec;

mod common;
use common::push::{context, paint};

#[test]
fn corridor_score_hand_substitution() {
    common::push::corridor_score_hand_substitution();
}

#[test]
fn corridor_score_coefficients_by_finite_differences() {
    common::push::corridor_score_coefficients_by_finite_differences();
}

#[test]
fn distance_map_matches_brute_force() {
    common::push::distance_map_matches_brute_force();
}

#[test]
fn visibility_corridors_match_the_ray_table() {
    common::push::visibility_corridors_match_the_ray_table();
}

#[test]
fn sector_ranking_matches_brute_force() {
    common::push::sector_ranking_matches_brute_force();
}



#[test]
fn distance_map_small_cases() {
    let cfg = PushConfig::default();
    let certain = UncertaintyMaps {
        rows: 3,
        cols: 3,
        u_o: vec![0.05; 9],
        u_s: vec![0.01; 9],
    };
    assert!(uncertainty_distance_map(&certain, &cfg)
        .iter()
        .all(|d| *d == 0.0));
    let mut one = certain.clone();
    one.u_s[4] = 0.5;
    one.u_o[4] = PRIOR_VARIANCE * 0.25;
    let d = uncertainty_distance_map(&one, &cfg);
    assert_eq!(d[4], 0.25);
}

/// Repeatedly takes the best eligible cell.
fn brute_targets(dmap: &[f64], cols: usize, max: usize, sep: f64) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < max {
        let mut best: Option<usize> = None;
        for c in 0..dmap.len() {
            if dmap[c] <= 0.0 || picked.contains(&c) {
                continue;
            }
            let ok = picked.iter().all(|&p| {
                let dr = (p / cols) as f64 - (c / cols) as f64;
                let dc = (p % cols) as f64 - (c % cols) as f64;
                dr * dr + dc * dc >= sep * sep
            });
            if ok && best.map_or(true, |b| dmap[c] > dmap[b]) {
                best = Some(c);
            }
        }
        match best {
            Some(b) => picked.push(b),
            None => break,
        }
    }
    picked
}

#[test]
fn target_selection_examples() {
    let cfg = PushConfig {
        min_target_separation: 5.0,
        ..PushConfig::default()
    };
    assert!(select_target_locations(&[0.0; 100], 10, &cfg).is_empty());
    let mut d = vec![0.0; 100];
    d[22] = 3.0;
    d[24] = 2.0;
    assert_eq!(select_target_locations(&d, 10, &cfg), vec![22]);
}

proptest! {
    #[test]
    fn target_selection_is_greedy_optimal(
        rows in 1usize..20, cols in 1usize..20, seed in any::<u64>(),
    ) {
        let cfg = PushConfig { min_target_separation: 5.0, ..PushConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dmap: Vec<f64> = (0..rows * cols)
            .map(|_| if rng.gen::<f64>() < 0.3 { 0.0 } else { rng.gen_range(0.0..10.0) })
            .collect();
        let got = select_target_locations(&dmap, cols, &cfg);
        prop_assert!(got.len() <= 5);
        for (i, &a) in got.iter().enumerate() {
            for &b in &got[i + 1..] {
                let dr = (a / cols) as f64 - (b / cols) as f64;
                let dc = (a % cols) as f64 - (b % cols) as f64;
                prop_assert!((dr * dr + dc * dc).sqrt() >= 5.0);
            }
        }
        prop_assert_eq!(got, brute_targets(&dmap, cols, 5, 5.0));
    }
}


#[test]
fn clear_path_gives_a_single_unobstructed_corridor() {
    let (rows, cols) = (10, 6);
    let ctx = context(&vec![0; rows * cols], rows, cols);
    let cfg = PushConfig::default();
    let cs = visibility_corridors(&ctx, 8 * cols + 3, &cfg);
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].n_occ_obj, 0);
    assert_eq!(cs[0].width, cols);
    assert_eq!(select_occluder(&cs), None);
}

#[test]
fn occluders_are_ordered_front_to_back() {
    let (rows, cols) = (20, 5);
    let mut labels = vec![0u16; rows * cols];
    paint(&mut labels, cols, 3..=4, 0..=4, 1);
    paint(&mut labels, cols, 9..=10, 0..=4, 2);
    let ctx = context(&labels, rows, cols);
    let rays = front_rays(&ctx, 18 * cols + 2);
    assert!(rays.iter().all(|r| r.occluders == vec![0, 1]));
    let cs = visibility_corridors(&ctx, 18 * cols + 2, &PushConfig::default());
    assert_eq!(select_occluder(&cs), Some(0));
}


#[test]
fn unknown_segment_is_an_error() {
    let ctx = context(&[0; 100], 10, 10);
    assert!(pushing_corridor(&ctx, 3, &PushConfig::default()).is_err());
}

#[test]
fn informed_candidates_start_on_free_ground() {
    let (rows, cols) = (40, 60);
    let mut labels = vec![0u16; rows * cols];
    paint(&mut labels, cols, 3..=8, 20..=40, 4);
    let mut ctx = context(&labels, rows, cols);
    // Confident everywhere except an uncertain pocket behind the box.
    for c in 0..rows * cols {
        ctx.u_s[c] = 0.01;
        ctx.maps.u_s[c] = 0.01;
    }
    for r in 10..30 {
        for c in 25..35 {
            ctx.u_s[r * cols + c] = 0.9;
            ctx.maps.u_s[r * cols + c] = 0.9;
            ctx.maps.u_o[r * cols + c] = PRIOR_VARIANCE;
            ctx.occ[r * cols + c] = 0.5;
        }
    }
    ctx.u_o = ctx.maps.u_o_normalized();
    let cfg = PushConfig::default();
    let (cands, tel) = informed_candidates(&ctx, &cfg, 1, 1).unwrap();
    assert!(!tel.targets.is_empty());
    assert!(tel.occluders.iter().all(|o| *o == Some(0)));
    assert!(!cands.is_empty() && cands.len() <= cfg.n_p);
    let best = &pushing_corridor(&ctx, 0, &cfg).unwrap()[0];
    for c in &cands {
        assert_eq!(c.target_object, 0);
        assert!(c.length > 0.0);
        assert!((c.direction.norm() - 1.0).abs() < 1e-12);
        let a = c.direction.y.atan2(c.direction.x).rem_euclid(std::f64::consts::TAU);
        assert!(a >= best.span[0] - 1e-9 && a <= best.span[1] + 1e-9);
        let p = [c.start.x / ctx.resolution, c.start.y / ctx.resolution];
        assert!(ctx.start_clear(p));
        assert!(c.length <= best.clearance.max(cfg.min_push * ctx.resolution) + 1e-12);
    }
    // Same seed and step, same candidates.
    let (again, _) = informed_candidates(&ctx, &cfg, 1, 1).unwrap();
    assert_eq!(again, cands);
}

#[test]
fn random_candidates_respect_the_length_range() {
    let (rows, cols) = (40, 60);
    let mut labels = vec![0u16; rows * cols];
    paint(&mut labels, cols, 15..=20, 20..=30, 2);
    let ctx = context(&labels, rows, cols);
    let cfg = PushConfig::default();
    let mut rng = derive(4, 2, Stream::PushSampling);
    let cands = random_push_candidates(&ctx, &cfg, &mut rng);
    assert_eq!(cands.len(), cfg.random_candidates);
    for c in &cands {
        assert!(c.length >= cfg.random_length[0] && c.length <= cfg.random_length[1]);
        let p = [c.start.x / ctx.resolution, c.start.y / ctx.resolution];
        assert!(ctx.start_clear(p));
    }
    let empty = context(&vec![0; rows * cols], rows, cols);
    assert!(random_push_candidates(&empty, &cfg, &mut rng).is_empty());
}

fn block_belief() -> (BeliefState, GridSpec) {
    let g = GridSpec::new(12, 16, 4, 0.005).unwrap();
    let mut b = BeliefState::new(g, 5).unwrap();
    for c in 0..g.n_cells() {
        let (r, k) = g.cell_coords(c);
        let inside = (4..7).contains(&r) && (5..8).contains(&k);
        for v in g.column(c) {
            let e = if inside && v % g.layers < 3 { Evidence::Hit } else { Evidence::Miss };
            b.fuse_voxel(v, e, 8.0 + (c % 5) as f64);
        }
        b.fuse_cell(c, if inside { 3 } else { 0 }, 60.0).unwrap();
    }
    (b, g)
}

fn push_along_x(cells: f64, g: &GridSpec) -> PushCandidate {
    PushCandidate {
        start: Vector2::new(4.0 * g.resolution, 5.5 * g.resolution),
        direction: Vector2::new(1.0, 0.0),
        length: cells * g.resolution,
        target_object: 0,
        predicted_vig: 0.0,
    }
}

#[test]
fn whole_cell_forecast_moves_evidence_exactly() {
    let (b, g) = block_belief();
    let cfg = PushConfig::default();
    let f = push_forward_belief(&b, &push_along_x(2.0, &g), &cfg).unwrap();
    for c in 0..g.n_cells() {
        let (r, k) = g.cell_coords(c);
        let was = (4..7).contains(&r) && (5..8).contains(&k);
        let now = (4..7).contains(&r) && (7..10).contains(&k);
        if now {
            let src = g.cell_index(r, k - 2);
            for (v, w) in g.column(c).zip(g.column(src)) {
                assert_eq!(f.voxel(v), b.voxel(w));
            }
            assert_eq!(f.cell_lambdas(c), b.cell_lambdas(src));
        } else if was {
            for v in g.column(c) {
                assert_eq!(f.voxel(v), BetaParams { alpha: 1.0, beta: 1.0 + cfg.forecast_free_evidence });
            }
            assert!(f.cell_lambdas(c).iter().all(|l| *l == 1.0));
        } else {
            for v in g.column(c) {
                assert_eq!(f.voxel(v), b.voxel(v));
            }
            assert_eq!(f.cell_lambdas(c), b.cell_lambdas(c));
        }
    }
    let same = push_forward_belief(&b, &push_along_x(0.0, &g), &cfg).unwrap();
    assert_eq!(same.occupancy(), b.occupancy());
}

#[test]
fn fractional_forecast_conserves_object_evidence() {
    let (b, g) = block_belief();
    let cfg = PushConfig::default();
    let seg = Segmentation::from_belief(&b);
    let weights = transfer_weights(&seg.segments[0], [1.5, 0.0], g.rows, g.cols);
    let mut per_source = vec![0.0; g.n_cells()];
    for list in weights.values() {
        for (src, w) in list {
            per_source[*src] += w;
        }
    }
    for &c in &seg.segments[0].cells {
        assert!((per_source[c] - 1.0).abs() < 1e-12);
    }
    // Class 3 only lives on the object: its evidence above the prior is
    // carried along, none created or lost.
    let excess = |x: &BeliefState| -> f64 { (0..g.n_cells()).map(|c| x.cell_lambdas(c)[3] - 1.0).sum() };
    let f = push_forward_belief(&b, &push_along_x(1.5, &g), &cfg).unwrap();
    assert!((excess(&f) - excess(&b)).abs() < 1e-9);
    assert!(excess(&b) > 0.0);
}

#[test]
fn adopted_forecast_is_tempered_near_the_push() {
    let (b, g) = block_belief();
    let cfg = PushConfig::default();
    let push = push_along_x(2.0, &g);
    let adopted = adopt_push_forecast(&b, &push, &cfg).unwrap();
    let forecast = push_forward_belief(&b, &push, &cfg).unwrap();
    let near = |c: usize| {
        let (r, k) = g.cell_coords(c);
        r + cfg.forecast_margin >= 4 && r <= 6 + cfg.forecast_margin && k + cfg.forecast_margin >= 5 && k <= 9 + cfg.forecast_margin
    };
    for c in 0..g.n_cells() {
        for v in g.column(c) {
            let p = adopted.voxel(v);
            if near(c) {
                if p.alpha > p.beta {
                    assert!(p.alpha + p.beta <= cfg.forecast_occupancy_strength + 1e-9);
                } else {
                    assert_eq!(p, BetaParams::PRIOR);
                }
            } else {
                assert_eq!(p, forecast.voxel(v));
            }
        }
        if near(c) {
            let s: f64 = adopted.cell_lambdas(c).iter().sum();
            assert!(s <= cfg.forecast_semantic_strength + 1e-9);
            assert_eq!(adopted.cell_label(c), forecast.cell_label(c));
        }
    }
}

proptest! {
    #[test]
    fn capping_keeps_the_mean_side(a in 1.0f64..500.0, b in 1.0f64..500.0, cap in 2.5f64..100.0) {
        let p = cap_beta(BetaParams { alpha: a, beta: b }, cap);
        if a + b <= cap {
            prop_assert_eq!(p, BetaParams { alpha: a, beta: b });
        } else {
            prop_assert!((p.alpha + p.beta - cap).abs() < 1e-9);
        }
        prop_assert_eq!(p.alpha > p.beta, a > b);
        prop_assert!(p.alpha >= 1.0 && p.beta >= 1.0);
    }

    #[test]
    fn lambda_capping_keeps_the_label(ls in prop::collection::vec(1.0f64..80.0, 2..12), cap in 13.0f64..120.0) {
        let mut capped = ls.clone();
        cap_lambdas(&mut capped, cap);
        let before: f64 = ls.iter().sum();
        let s: f64 = capped.iter().sum();
        if before <= cap {
            prop_assert_eq!(&capped, &ls);
        } else {
            prop_assert!((s - cap).abs() < 1e-9);
        }
        let argmax = |v: &[f64]| v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b });
        prop_assert_eq!(argmax(&capped), argmax(&ls));
    }

    #[test]
    fn line_cells_are_connected(x0 in 0.0f64..20.0, y0 in 0.0f64..20.0, x1 in -5.0f64..25.0, y1 in -5.0f64..25.0) {
        let cells = line_cells([x0, y0], [x1, y1], 20, 20);
        prop_assert!(!cells.is_empty());
        prop_assert_eq!(cells[0], (y0 as usize, x0 as usize));
        for w in cells.windows(2) {
            let dr = (w[0].0 as i64 - w[1].0 as i64).abs();
            let dc = (w[0].1 as i64 - w[1].1 as i64).abs();
            prop_assert_eq!(dr + dc, 1);
        }
    }
}

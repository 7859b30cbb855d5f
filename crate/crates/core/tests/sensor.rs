use nalgebra::Vector3;
use proptest::prelude::*;
use shelfmem::belief::{BeliefState, BetaParams};
use shelfmem::scene::GroundTruth;
use shelfmem::sensor::*;
use shelfmem::view::ViewPose;
use shelfmem::{GridSpec, FREE_CLASS};

fn grid() -> GridSpec {
    GridSpec::new(20, 30, 10, 0.01).unwrap()
}

/// One solid block: rows 8..12, cols 10..16, layers 0..5, class 3.
fn block_truth() -> GroundTruth {
    let g = grid();
    let mut occupied = vec![false; g.n_voxels()];
    let mut labels = vec![FREE_CLASS; g.n_cells()];
    let mut owners = vec![None; g.n_cells()];
    let mut column_heights = vec![0; g.n_cells()];
    for row in 8..12 {
        for col in 10..16 {
            let cell = g.cell_index(row, col);
            labels[cell] = 3;
            owners[cell] = Some(0);
            column_heights[cell] = 5;
            for layer in 0..5 {
                occupied[g.voxel_index(row, col, layer)] = true;
            }
        }
    }
    GroundTruth {
        grid: g,
        occupied,
        labels,
        owners,
        column_heights,
    }
}

/// Slab-method entry distance into an axis-aligned box.
fn slab_entry(o: Vector3<f64>, d: Vector3<f64>, lo: Vector3<f64>, hi: Vector3<f64>) -> Option<f64> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for a in 0..3 {
        if d[a].abs() < 1e-15 {
            if o[a] < lo[a] || o[a] > hi[a] {
                return None;
            }
            continue;
        }
        let (ta, tb) = ((lo[a] - o[a]) / d[a], (hi[a] - o[a]) / d[a]);
        t0 = t0.max(ta.min(tb));
        t1 = t1.min(ta.max(tb));
    }
    (t0 <= t1 && t1 >= 0.0).then_some(t0.max(0.0))
}

fn world(g: &GridSpec, v: [f64; 3]) -> Vector3<f64> {
    Vector3::from(g.origin) + Vector3::from(v)
}

#[test]
fn hit_distances_match_the_slab_oracle() {
    let gt = block_truth();
    let g = gt.grid;
    let lo = world(&g, [0.10, 0.08, 0.0]);
    let hi = world(&g, [0.16, 0.12, 0.05]);
    let cam = CameraModel::default().with_rays(32, 24);
    let pose = ViewPose::new(world(&g, [0.13, -0.1, 0.12]), world(&g, [0.13, 0.1, 0.02]));
    let obs = render_view(&gt, &pose, &cam);
    let dirs = cam.ray_directions(&pose).unwrap();
    let mut hits = 0;
    for (ray, dir) in obs.rays.iter().zip(&dirs) {
        let oracle = slab_entry(pose.cam, *dir, lo, hi);
        match ray.hit {
            RayHit::Object { class, .. } => {
                hits += 1;
                assert_eq!(class, 3);
                let t = oracle.expect("renderer hit where the oracle missed");
                assert!((ray.distance - t).abs() < 1e-9, "{} vs {t}", ray.distance);
            }
            _ => {
                // A miss may only graze the box within rounding of an edge.
                if let Some(t) = oracle {
                    let p = pose.cam + dir * t;
                    let inside = (0..3).all(|a| p[a] > lo[a] + 1e-9 && p[a] < hi[a] - 1e-9);
                    assert!(!inside);
                }
            }
        }
        assert!(obs.free_voxels(ray).iter().all(|&v| !gt.occupied[v as usize]));
    }
    assert!(hits > 20);
    assert_eq!(obs.n_hits(), hits);
}

/// Voxels visited by marching the ray in tiny steps.
fn march(g: &GridSpec, o: Vector3<f64>, d: Vector3<f64>, until: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let h = 1e-5;
    let mut t = 0.0;
    while t < until {
        let p = o + d * t;
        if let Some(v) = g.world_to_voxel([p.x, p.y, p.z]) {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        t += h;
    }
    out
}

fn is_subsequence(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.any(|b| b == s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traversal_is_face_connected_and_covers_the_marched_path(
        x in 0.02f64..0.28, z in 0.02f64..0.2,
        tx in 0.0f64..0.3, ty in 0.05f64..0.2, tz in 0.0f64..0.1,
    ) {
        let g = grid();
        let o = world(&g, [x, -0.05, z]);
        let d = (world(&g, [tx, ty, tz]) - o).normalize();
        let mut seen = Vec::new();
        let end = trace(&g, o, d, 1.0, |v| { seen.push(v); false });
        for w in seen.windows(2) {
            let (a, b) = (g.voxel_coords(w[0]), g.voxel_coords(w[1]));
            let step = a.0.abs_diff(b.0) + a.1.abs_diff(b.1) + a.2.abs_diff(b.2);
            prop_assert_eq!(step, 1);
        }
        let until = match end {
            TraceEnd::Floor { t, .. } | TraceEnd::Wall { t } => t,
            TraceEnd::Open => 1.0,
            _ => return Ok(()),
        };
        let marched = march(&g, o, d, until - 1e-6);
        prop_assert!(is_subsequence(&marched, &seen));
    }
}

#[test]
fn integration_counts_every_ray_once() {
    let gt = block_truth();
    let g = gt.grid;
    let cam = CameraModel::default().with_rays(16, 12);
    let pose = ViewPose::new(world(&g, [0.13, -0.1, 0.12]), world(&g, [0.13, 0.1, 0.02]));
    let obs = render_view(&gt, &pose, &cam);
    let w = FusionWeights::default();
    let mut belief = BeliefState::new(g, 5).unwrap();
    integrate_observation(&mut belief, &obs, &w).unwrap();

    let mut misses = vec![0usize; g.n_voxels()];
    let mut hits = vec![0usize; g.n_voxels()];
    let mut sem = vec![vec![0usize; 5]; g.n_cells()];
    for ray in &obs.rays {
        for &v in obs.free_voxels(ray) {
            misses[v as usize] += 1;
        }
        match ray.hit {
            RayHit::Object { voxel, class } => {
                let cell = g.voxel_cell(voxel as usize);
                for v in g.column(cell).start..=voxel as usize {
                    hits[v] += 1;
                }
                sem[cell][class as usize] += 1;
            }
            RayHit::Floor { cell } => sem[cell as usize][0] += 1,
            RayHit::None => {}
        }
    }
    for v in 0..g.n_voxels() {
        let want = BetaParams::new(
            1.0 + w.occupancy * hits[v] as f64,
            1.0 + w.occupancy * misses[v] as f64,
        )
        .unwrap();
        assert_eq!(belief.voxel(v), want, "voxel {v}");
    }
    for cell in 0..g.n_cells() {
        let l = belief.cell_lambdas(cell);
        for k in 0..5 {
            assert_eq!(l[k], 1.0 + w.semantic * sem[cell][k] as f64);
        }
    }
}

#[test]
fn visibility_stops_at_the_first_solid_voxel() {
    let gt = block_truth();
    let g = gt.grid;
    let cam = CameraModel::default().with_rays(32, 24);
    let pose = ViewPose::new(world(&g, [0.13, -0.1, 0.03]), world(&g, [0.13, 0.1, 0.03]));
    let vis = visible_voxel_set(&gt, &pose, &cam);
    assert!(vis.windows(2).all(|w| w[0] < w[1]));
    // The block's front face is seen, its inside is not, nor what lies behind.
    assert!(vis.contains(&(g.voxel_index(8, 13, 2) as u32)));
    assert!(!vis.contains(&(g.voxel_index(10, 13, 2) as u32)));
    assert!(!vis.contains(&(g.voxel_index(15, 13, 2) as u32)));
    let obs = render_view(&gt, &pose, &cam);
    let mut rendered: Vec<u32> = obs.free.clone();
    for r in &obs.rays {
        if let RayHit::Object { voxel, .. } = r.hit {
            rendered.push(voxel);
        }
    }
    rendered.sort_unstable();
    rendered.dedup();
    assert_eq!(rendered, vis);
}

#[test]
fn class_noise_flips_to_other_object_classes() {
    let gt = block_truth();
    let g = gt.grid;
    let cam = CameraModel::default().with_rays(32, 24);
    let pose = ViewPose::new(world(&g, [0.13, -0.1, 0.12]), world(&g, [0.13, 0.1, 0.02]));
    let clean = render_view(&gt, &pose, &cam);
    let mut noisy = clean.clone();
    let mut rng = shelfmem::rng::derive(1, 0, shelfmem::rng::Stream::SensorNoise);
    apply_class_noise(&mut noisy, 1.0, 6, &mut rng);
    for (a, b) in clean.rays.iter().zip(&noisy.rays) {
        match (a.hit, b.hit) {
            (RayHit::Object { class: ca, voxel: va }, RayHit::Object { class: cb, voxel: vb }) => {
                assert_eq!(va, vb);
                assert_ne!(ca, cb);
                assert!(cb != FREE_CLASS && (cb as usize) < 6);
            }
            (x, y) => assert_eq!(x, y),
        }
    }
}

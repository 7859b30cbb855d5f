use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shelfmem::belief::{UncertaintyMaps, PRIOR_VARIANCE};
use shelfmem::push::*;

pub fn corridor(w: usize, l: f64, p: f64, n: usize) -> VisibilityCorridor {
    VisibilityCorridor {
        start: 0,
        width: w,
        length: l,
        occluders: (0..n as u32).collect(),
        p_occ: p,
        n_occ_obj: n,
        score: 0.0,
    }
}

pub fn corridor_score_hand_substitution() {
    let cfg = PushConfig::default();
    assert_eq!(cfg.k, [2.0, 3.0, 4.0, 5.0]);
    let s = score_corridor(&corridor(3, 0.5, 0.4, 2), &cfg);
    assert!((s - 19.1).abs() < 1e-12);
    assert_eq!(score_corridor(&corridor(0, 0.0, 0.0, 0), &cfg), 0.0);
}

pub fn corridor_score_coefficients_by_finite_differences() {
    let cfg = PushConfig {
        k: [1.25, 7.0, 0.3, 11.5],
        ..PushConfig::default()
    };
    let base = corridor(3, 0.5, 0.4, 2);
    let f = |c: &VisibilityCorridor| score_corridor(c, &cfg);
    let h = 0.5;
    let dw = f(&corridor(4, 0.5, 0.4, 2)) - f(&base);
    let dl = (f(&corridor(3, 0.5 + h, 0.4, 2)) - f(&base)) / h;
    let dp = (f(&corridor(3, 0.5, 0.4 + h, 2)) - f(&base)) / h;
    let dn = f(&corridor(3, 0.5, 0.4, 3)) - f(&base);
    for (got, want) in [(dw, 1.25), (dl, 7.0), (dp, 0.3), (dn, 11.5)] {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

/// Nearest confident cell by exhaustive search.
pub fn brute_distance_map(maps: &UncertaintyMaps, floor: f64) -> Vec<f64> {
    let (rows, cols) = (maps.rows, maps.cols);
    let certain: Vec<(i64, i64)> = (0..rows * cols)
        .filter(|&c| maps.u_s[c] < floor)
        .map(|c| ((c / cols) as i64, (c % cols) as i64))
        .collect();
    (0..rows * cols)
        .map(|c| {
            if certain.is_empty() {
                return 0.0;
            }
            let (r, k) = ((c / cols) as i64, (c % cols) as i64);
            let d2 = certain
                .iter()
                .map(|(cr, ck)| (cr - r).pow(2) + (ck - k).pow(2))
                .min()
                .unwrap();
            let u = (maps.u_o[c] / PRIOR_VARIANCE).clamp(0.0, 1.0);
            (d2 as f64).sqrt() * u
        })
        .collect()
}

pub fn distance_map_matches_brute_force() {
    let cfg = PushConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..200 {
        let rows = rng.gen_range(1..=32);
        let cols = rng.gen_range(1..=32);
        let density = [0.0, 0.02, 0.3, 0.9][trial % 4];
        let n = rows * cols;
        let maps = UncertaintyMaps {
            rows,
            cols,
            u_o: (0..n).map(|_| rng.gen_range(0.0..0.1)).collect(),
            u_s: (0..n)
                .map(|_| {
                    if rng.gen::<f64>() < density {
                        rng.gen_range(0.0..0.0999)
                    } else {
                        rng.gen_range(0.1..1.0)
                    }
                })
                .collect(),
        };
        let got = uncertainty_distance_map(&maps, &cfg);
        let want = brute_distance_map(&maps, cfg.sem_uncertainty_floor);
        assert_eq!(got, want, "grid {rows}x{cols}");
    }
}

/// A push context straight from a label image: labeled cells are confident
/// objects, everything else confident free space.
pub fn context(labels: &[u16], rows: usize, cols: usize) -> PushContext {
    let n = rows * cols;
    let occ: Vec<f64> = labels
        .iter()
        .map(|&l| if l == 0 { 0.05 } else { 0.95 })
        .collect();
    let maps = UncertaintyMaps {
        rows,
        cols,
        u_o: vec![0.01; n],
        u_s: vec![0.5; n],
    };
    let cfg = PushConfig::default();
    PushContext {
        rows,
        cols,
        resolution: 0.005,
        origin: [0.0, 0.0],
        seg: Segmentation::from_labels(labels, rows, cols),
        occ,
        u_o: maps.u_o_normalized(),
        u_s: maps.u_s.clone(),
        maps,
        sem_floor: cfg.sem_uncertainty_floor,
        start_max_occupancy: cfg.start_max_occupancy,
    }
}

pub fn paint(labels: &mut [u16], cols: usize, rows: std::ops::RangeInclusive<usize>, cs: std::ops::RangeInclusive<usize>, label: u16) {
    for r in rows {
        for c in cs.clone() {
            labels[r * cols + c] = label;
        }
    }
}

/// Entry parameter of the segment `p + t (q - p)`, `t` in `[0, 1]`, into the
/// axis-aligned box `[x0, x1] x [y0, y1]`, if it passes through its interior.
pub fn clip(p: [f64; 2], q: [f64; 2], b: [f64; 4]) -> Option<(f64, f64)> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (a, lo, hi) in [(0, b[0], b[1]), (1, b[2], b[3])] {
        if d[a] == 0.0 {
            if p[a] <= lo || p[a] >= hi {
                return None;
            }
            continue;
        }
        let (ta, tb) = ((lo - p[a]) / d[a], (hi - p[a]) / d[a]);
        t0 = t0.max(ta.min(tb));
        t1 = t1.min(ta.max(tb));
    }
    (t1 > t0).then_some((t0, t1))
}

pub fn visibility_corridors_match_the_ray_table() {
    let (rows, cols) = (20, 30);
    let mut labels = vec![0u16; rows * cols];
    paint(&mut labels, cols, 5..=7, 8..=12, 2);
    paint(&mut labels, cols, 10..=12, 17..=21, 3);
    let ctx = context(&labels, rows, cols);
    let target = 17 * cols + 14;
    let cfg = PushConfig::default();

    // Boxes in continuous coordinates, ids in scan order.
    let boxes = [(0u32, [8.0, 13.0, 5.0, 8.0]), (1u32, [17.0, 22.0, 10.0, 13.0])];
    let from = [14.5, 17.5];
    let mut table: Vec<Vec<u32>> = Vec::new();
    for x in 0..cols {
        let to = [x as f64 + 0.5, 0.0];
        let mut hits: Vec<(f64, u32)> = Vec::new();
        for (id, b) in boxes {
            let grow = [b[0] - 1e-6, b[1] + 1e-6, b[2] - 1e-6, b[3] + 1e-6];
            let shrink = [b[0] + 1e-6, b[1] - 1e-6, b[2] + 1e-6, b[3] - 1e-6];
            // No ray may graze a box corner, or the table would be ambiguous.
            assert_eq!(clip(from, to, grow).is_some(), clip(from, to, shrink).is_some());
            if let Some((t0, _)) = clip(from, to, b) {
                hits.push((t0, id));
            }
        }
        // Front first: the front is at t = 1.
        hits.sort_by(|a, b| b.0.total_cmp(&a.0));
        table.push(hits.into_iter().map(|(_, id)| id).collect());
    }

    let rays = front_rays(&ctx, target);
    assert_eq!(rays.len(), cols);
    for (x, r) in rays.iter().enumerate() {
        assert_eq!(r.col, x);
        assert_eq!(r.occluders, table[x], "front column {x}");
        let len = (x as f64 + 0.5 - 14.5).hypot(17.5);
        assert!((r.length - len).abs() < 1e-12);
    }

    // The hand-checked shape of the table: left rays cross box 0, a clear
    // lane in the middle, right rays cross box 1.
    let blocked_by = |id: u32| -> Vec<usize> { (0..cols).filter(|&x| table[x] == vec![id]).collect() };
    assert!(table.iter().all(|t| t.len() <= 1));
    assert_eq!(blocked_by(0), (3..=11).collect::<Vec<_>>());
    assert_eq!(blocked_by(1), (20..=29).collect::<Vec<_>>());

    let corridors = visibility_corridors(&ctx, target, &cfg);
    // Expected: run-length groups of the table, at most n_c wide.
    let mut expected: Vec<(usize, usize, Vec<u32>)> = Vec::new();
    for x in 0..cols {
        match expected.last_mut() {
            Some((_, w, occ)) if *occ == table[x] && *w < cfg.n_c => *w += 1,
            _ => expected.push((x, 1, table[x].clone())),
        }
    }
    let got: Vec<(usize, usize, Vec<u32>)> = corridors
        .iter()
        .map(|c| (c.start, c.width, c.occluders.clone()))
        .collect();
    assert_eq!(got, expected);
    for c in &corridors {
        assert_eq!(c.n_occ_obj, c.occluders.len());
        assert!((c.score - score_corridor(c, &cfg)).abs() < 1e-12);
        let mean_len: f64 = (c.start..c.start + c.width)
            .map(|x| (x as f64 + 0.5 - 14.5).hypot(17.5))
            .sum::<f64>()
            / c.width as f64;
        assert!((c.length - mean_len / rows as f64).abs() < 1e-12);
    }
}

pub struct OracleSector {
    pub index: usize,
    pub valid: bool,
    pub bucket: i64,
    pub clearance: f64,
    pub mean_occupancy: f64,
}

/// Sector statistics by fine marching along every sector ray.
pub fn brute_sectors(ctx: &PushContext, id: u32, cfg: &PushConfig) -> Vec<OracleSector> {
    let seg = &ctx.seg.segments[id as usize];
    let cell_at = |p: [f64; 2]| -> Option<usize> {
        (p[0] >= 0.0 && p[1] >= 0.0 && p[0] < ctx.cols as f64 && p[1] < ctx.rows as f64)
            .then(|| p[1] as usize * ctx.cols + p[0] as usize)
    };
    let n = cfg.n_sectors();
    let width = cfg.sector_angle_deg.to_radians();
    let h = 1e-3;
    (0..n)
        .map(|k| {
            let a0 = k as f64 * width;
            let mid = a0 + 0.5 * width;
            let (mut occ_sum, mut count) = (0.0, 0usize);
            let mut clearance = f64::INFINITY;
            let mut boundary = f64::INFINITY;
            for i in 0..cfg.rays_per_sector {
                let a = a0 + (i as f64 + 0.5) / cfg.rays_per_sector as f64 * width;
                let u = [a.cos(), a.sin()];
                let at = |t: f64| [seg.centroid[0] + u[0] * t, seg.centroid[1] + u[1] * t];
                let mut t = 0.0;
                while cell_at(at(t)).map_or(false, |c| ctx.seg.ids[c] == Some(id)) {
                    t += h;
                }
                let exit = t;
                let mut out = exit;
                while cell_at(at(out)).is_some() {
                    out += h;
                }
                let b = out - exit;
                let mut clear = cfg.sector_reach.min(b);
                let mut last = None;
                let mut blocked = false;
                while t <= exit + cfg.sector_reach {
                    let Some(c) = cell_at(at(t)) else { break };
                    if last != Some(c) && ctx.seg.ids[c] != Some(id) {
                        occ_sum += ctx.occ[c];
                        count += 1;
                        if !blocked && (ctx.seg.ids[c].is_some() || ctx.occ[c] >= ctx.start_max_occupancy) {
                            blocked = true;
                            clear = clear.min(t - exit);
                        }
                    }
                    last = Some(c);
                    t += h;
                }
                clearance = clearance.min(clear);
                boundary = boundary.min(b);
            }
            let u = [mid.cos(), mid.sin()];
            let proj: Vec<f64> = seg
                .cells
                .iter()
                .map(|&c| ((c % ctx.cols) as f64 + 0.5) * u[0] + ((c / ctx.cols) as f64 + 0.5) * u[1])
                .collect();
            let extent = proj.iter().cloned().fold(f64::MIN, f64::max)
                - proj.iter().cloned().fold(f64::MAX, f64::min)
                + 1.0;
            let mean = if count > 0 { occ_sum / count as f64 } else { 0.0 };
            OracleSector {
                index: k,
                valid: boundary >= extent + cfg.push_margin,
                bucket: (mean / cfg.sector_occupancy_bucket + 1e-9).floor() as i64,
                clearance: clearance * ctx.resolution,
                mean_occupancy: mean,
            }
        })
        .collect()
}

pub fn sector_ranking_matches_brute_force() {
    let (rows, cols) = (40, 60);
    let mut labels = vec![0u16; rows * cols];
    paint(&mut labels, cols, 10..=15, 20..=27, 4);
    paint(&mut labels, cols, 12..=17, 33..=37, 5);
    paint(&mut labels, cols, 22..=29, 22..=25, 6);
    let mut ctx = context(&labels, rows, cols);
    // Unknown space in the back left corner.
    for r in 30..rows {
        for c in 0..20 {
            ctx.occ[r * cols + c] = 0.5;
        }
    }
    let cfg = PushConfig::default();
    for id in 0..3u32 {
        let got = pushing_corridor(&ctx, id, &cfg).unwrap();
        let mut oracle = brute_sectors(&ctx, id, &cfg);
        assert_eq!(got.len(), oracle.len());
        for s in &got {
            let o = &oracle[s.index];
            assert_eq!(s.valid, o.valid, "object {id} sector {}", s.index);
            assert!((s.mean_occupancy - o.mean_occupancy).abs() < 0.01);
            assert!((s.clearance - o.clearance).abs() < 0.02 * ctx.resolution);
            let d = s.direction[0].hypot(s.direction[1]);
            assert!((d - 1.0).abs() < 1e-12);
            assert!(s.span[1] > s.span[0]);
        }
        oracle.sort_by(|a, b| {
            b.valid
                .cmp(&a.valid)
                .then(a.bucket.cmp(&b.bucket))
                .then(b.clearance.total_cmp(&a.clearance))
                .then(a.index.cmp(&b.index))
        });
        // Clearances within marching error of each other may swap.
        let rank: Vec<usize> = got.iter().map(|s| s.index).collect();
        let want: Vec<usize> = oracle.iter().map(|s| s.index).collect();
        assert_eq!(rank[0], want[0], "object {id}: best sector");
        for (a, b) in rank.iter().zip(&want) {
            if a != b {
                let (sa, sb) = (&got.iter().find(|s| s.index == *a).unwrap(), &got.iter().find(|s| s.index == *b).unwrap());
                assert!((sa.clearance - sb.clearance).abs() < 0.02 * ctx.resolution);
            }
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use shelfmem::belief::write_binary;
use shelfmem::config::ExperimentConfig;
use shelfmem::metrics::{
    aggregate_batch, compare_methods, runs_csv, summary_csv, BatchSummary, ComparisonReport,
    RunMetrics,
};
use shelfmem::pgm;
use shelfmem::planner::{replay_episode, run_episode, scene_digest, EpisodeLog, EpisodeRun, Method};
use shelfmem::scene::{generate_scene, ground_truth_maps, Scene};
use shelfmem::Error;

use crate::Common;

/// Why a command failed, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
    Replay(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Run(_) => 2,
            Failure::Replay(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            Error::ReplayMismatch { .. } => Failure::Replay(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Resolved settings for one invocation.
pub struct Plan {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    pub seeds: Vec<u64>,
}

pub fn load(c: &Common) -> Outcome<Plan> {
    let cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Config(e.to_string()),
            other => other.into(),
        })?,
        None => ExperimentConfig::default(),
    };
    let start = cfg
        .scene
        .seed_start
        .checked_add(c.seed_offset)
        .filter(|s| s.checked_add(cfg.scene.count as u64).is_some())
        .ok_or_else(|| Failure::Config("--seed-offset overflows the seed range".into()))?;
    Ok(Plan {
        out: c.out.clone().unwrap_or_else(|| cfg.output.dir.clone()),
        seeds: (start..start + cfg.scene.count as u64).collect(),
        cfg,
    })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn scene_name(seed: u64) -> String {
    format!("scene_{seed:05}")
}

fn make_scene(plan: &Plan, seed: u64) -> shelfmem::Result<Scene> {
    let g = &plan.cfg.scene.generator;
    generate_scene(seed, g.object_count(seed), g)
}

pub fn generate(plan: &Plan) -> Outcome {
    let dir = plan.out.join("scenes");
    for &seed in &plan.seeds {
        let scene = make_scene(plan, seed)?;
        let path = dir.join(format!("{}.json", scene_name(seed)));
        write(&path, scene.to_canonical_json())?;
    }
    eprintln!("wrote {} scenes to {}", plan.seeds.len(), dir.display());
    Ok(())
}

fn read_scenes(dir: &Path) -> Outcome<Vec<Scene>> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Run(format!("no scene files in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let text =
                fs::read_to_string(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
            Scene::from_json(&text).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))
        })
        .collect()
}

/// One scene that did not produce a complete episode.
#[derive(Debug, Clone, Serialize)]
pub struct SceneFailure {
    pub scene_seed: u64,
    pub method: String,
    pub error: String,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    summary: Option<BatchSummary>,
    failures: &'a [SceneFailure],
}

/// Runs `jobs` on `workers` threads; results keep input order.
fn parallel<T: Send, F: Fn(usize) -> T + Sync>(n: usize, workers: usize, job: F) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = job(i);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn dump_scene_outputs(plan: &Plan, dir: &Path, run: &EpisodeRun) -> Outcome {
    let name = scene_name(run.scene.rng_seed);
    write(
        &dir.join("logs").join(format!("{name}.jsonl")),
        run.log.to_jsonl(),
    )?;
    if plan.cfg.output.pgm {
        let g = run.belief.grid();
        let maps = run.belief.uncertainty_maps();
        let gt = ground_truth_maps(&run.scene, g);
        let n = plan.cfg.episode.n_classes;
        let d = dir.join("maps");
        let (r, c) = (g.rows, g.cols);
        write(
            &d.join(format!("{name}_labels.pgm")),
            pgm::encode_labels(&run.belief.hard_labels(), r, c, n),
        )?;
        write(
            &d.join(format!("{name}_truth.pgm")),
            pgm::encode_labels(&gt.labels, r, c, n),
        )?;
        write(
            &d.join(format!("{name}_u_o.pgm")),
            pgm::encode_scaled(&maps.u_o_normalized(), r, c, 0.0, 1.0),
        )?;
        write(
            &d.join(format!("{name}_u_s.pgm")),
            pgm::encode_scaled(&maps.u_s, r, c, 0.0, 1.0),
        )?;
    }
    if plan.cfg.output.belief_snapshots {
        let mut bytes = Vec::new();
        write_binary(&run.belief, &mut bytes).map_err(|e| Failure::Run(e.to_string()))?;
        write(&dir.join("beliefs").join(format!("{name}.bin")), bytes)?;
    }
    Ok(())
}

/// Runs one method over `scenes`, writing per-scene outputs as they finish.
fn run_method(
    plan: &Plan,
    scenes: &[Scene],
    method: Method,
    workers: usize,
) -> (Vec<RunMetrics>, Vec<SceneFailure>) {
    let dir = plan.out.join(method.name());
    let results = parallel(scenes.len(), workers, |i| {
        let scene = &scenes[i];
        let seed = scene.rng_seed;
        let fail = |error: String| SceneFailure {
            scene_seed: seed,
            method: method.name().into(),
            error,
        };
        let run = run_episode(
            scene,
            &plan.cfg.episode,
            method,
            plan.cfg.planner_seed_for(seed),
        )
        .map_err(|e| fail(e.to_string()))?;
        dump_scene_outputs(plan, &dir, &run).map_err(|e| fail(e.to_string()))?;
        if let Some(e) = &run.log.end.error {
            return Err(fail(e.clone()));
        }
        eprintln!(
            "{method} seed {seed}: {} steps, {} pushes, sem mIoU {:.3}",
            run.metrics.steps, run.metrics.num_push, run.metrics.sem_miou
        );
        Ok(run.metrics)
    });
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(m) => ok.push(m),
            Err(f) => {
                eprintln!("{} seed {} failed: {}", f.method, f.scene_seed, f.error);
                failed.push(f);
            }
        }
    }
    (ok, failed)
}

fn write_method_reports(
    plan: &Plan,
    method: Method,
    runs: &[RunMetrics],
    failures: &[SceneFailure],
) -> Outcome {
    let dir = plan.out.join(method.name());
    write(&dir.join("runs.csv"), runs_csv(runs))?;
    let summary = RunSummary {
        summary: aggregate_batch(runs).ok(),
        failures,
    };
    write(
        &dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )
}

fn scenes_for(plan: &Plan, dir: Option<&Path>) -> Outcome<Vec<Scene>> {
    match dir {
        Some(d) => read_scenes(d),
        None => plan
            .seeds
            .iter()
            .map(|&s| make_scene(plan, s).map_err(Failure::from))
            .collect(),
    }
}

pub fn run(plan: &Plan, method: Option<Method>, scenes: Option<&Path>, workers: usize) -> Outcome {
    let method = method.unwrap_or(plan.cfg.methods[0]);
    let scenes = scenes_for(plan, scenes)?;
    let (runs, failures) = run_method(plan, &scenes, method, workers);
    write_method_reports(plan, method, &runs, &failures)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "{} of {} scenes failed",
            failures.len(),
            scenes.len()
        )))
    }
}

#[derive(Serialize)]
struct CompareOutput {
    #[serde(flatten)]
    report: ComparisonReport,
    failures: Vec<SceneFailure>,
}

pub fn compare(mut plan: Plan, methods: Vec<Method>, workers: usize) -> Outcome {
    if !methods.is_empty() {
        plan.cfg.methods = methods;
        plan.cfg.validate()?;
    }
    if plan.cfg.methods.len() < 2 {
        return Err(Failure::Config(
            "invalid config field `methods`: compare needs at least two methods".into(),
        ));
    }
    let scenes = scenes_for(&plan, None)?;
    let mut all_failures = Vec::new();
    let mut per_method = Vec::new();
    for &m in &plan.cfg.methods {
        let (runs, failures) = run_method(&plan, &scenes, m, workers);
        write_method_reports(&plan, m, &runs, &failures)?;
        all_failures.extend(failures);
        per_method.push(runs);
    }
    // Compare only the seeds every method completed.
    let failed: Vec<u64> = all_failures.iter().map(|f| f.scene_seed).collect();
    for runs in &mut per_method {
        runs.retain(|r| !failed.contains(&r.scene_seed));
    }
    if per_method[0].is_empty() {
        return Err(Failure::Run("no scene completed under every method".into()));
    }
    let report = compare_methods(&per_method)?;
    write(&plan.out.join("report.csv"), summary_csv(&report.rows))?;
    let out = CompareOutput {
        report,
        failures: all_failures,
    };
    write(
        &plan.out.join("report.json"),
        serde_json::to_string_pretty(&out).expect("report serializes") + "\n",
    )?;
    print!("{}", summary_csv(&out.report.rows));
    if out.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("{} episodes failed", out.failures.len())))
    }
}

fn collect_logs(paths: &[PathBuf]) -> Outcome<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Failure::Run("no logs to replay".into()));
    }
    Ok(out)
}

pub fn replay(paths: &[PathBuf], scene: Option<&Path>) -> Outcome {
    let expected = match scene {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
            let s = Scene::from_json(&text)
                .map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
            Some(scene_digest(&s))
        }
        None => None,
    };
    let logs = collect_logs(paths)?;
    let mut mismatches = 0;
    for path in &logs {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
        let log = EpisodeLog::from_jsonl(&text)
            .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
        if let Some(d) = &expected {
            if *d != log.header.scene_digest {
                println!("MISMATCH {}: recorded on a different scene", path.display());
                mismatches += 1;
                continue;
            }
        }
        match replay_episode(&log) {
            Ok(r) => println!(
                "ok {}: {} steps, sem mIoU {:.6}",
                path.display(),
                r.steps,
                r.final_sem_miou
            ),
            Err(Error::ReplayMismatch { step, detail }) => {
                println!("MISMATCH {}: step {step}: {detail}", path.display());
                mismatches += 1;
            }
            Err(e) => return Err(Failure::Run(format!("{}: {e}", path.display()))),
        }
    }
    if mismatches > 0 {
        Err(Failure::Replay(format!(
            "{mismatches} of {} logs did not replay",
            logs.len()
        )))
    } else {
        Ok(())
    }
}

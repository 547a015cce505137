//! Seeded synthetic recordings.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{SuccessCriterion, TaskKind, TaskSpec};
use crate::error::{Error, Result};
use crate::hand::HandModel;
use crate::synergy::PostureSequence;

/// Joints the generators write, in target-array order.
pub const STANDARD_JOINTS: [&str; 10] = [
    "Thumb rot.",
    "Thumb MCP",
    "Index MCP",
    "Index PIP",
    "Middle MCP",
    "Middle PIP",
    "Ring MCP",
    "Ring PIP",
    "Pinky MCP",
    "Pinky PIP",
];

pub const GRASP_TARGET_COUNT: usize = 33;
pub const RAMP_STEPS: usize = 10;
pub const JITTER_SIGMA: f64 = 0.02;
/// Half-width of the uniform tremor on joints held during manipulation.
pub const HOLD_TREMOR: f64 = 0.01;
/// Half-width of the per-recording variation of the grip posture.
const GRIP_SPREAD: f64 = 0.05;

const STREAM_GRASP: u64 = 0;
const STREAM_TASK_BASE: u64 = 1 << 32;

/// Thirty-three grasp targets: eleven each of power, precision and lateral
/// grasps, swept by a size parameter.
pub fn grasp_targets() -> Vec<[f64; 10]> {
    let mut out = Vec::with_capacity(GRASP_TARGET_COUNT);
    for k in 0..11 {
        let u = k as f64 / 10.0;
        out.push([
            0.8 + 0.5 * u,
            0.3 + 0.15 * u,
            0.8 + 0.6 * u,
            0.9 + 0.5 * u,
            0.85 + 0.6 * u,
            0.95 + 0.5 * u,
            0.9 + 0.55 * u,
            1.0 + 0.45 * u,
            0.95 + 0.5 * u,
            1.05 + 0.4 * u,
        ]);
    }
    for k in 0..11 {
        let u = k as f64 / 10.0;
        // ring and pinky curl on a shuffled schedule so they decorrelate
        // from the pinching fingers
        let c = 0.1 + 1.2 * ((k * 7) % 11) as f64 / 10.0;
        out.push([
            0.5 + 0.6 * u,
            0.2 + 0.2 * u,
            0.3 + 0.6 * u,
            0.3 + 0.5 * u,
            0.25 + 0.7 * u,
            0.3 + 0.55 * u,
            c,
            0.9 * c,
            0.8 * c + 0.2 * u,
            0.75 * c + 0.15 * u,
        ]);
    }
    for k in 0..11 {
        let u = k as f64 / 10.0;
        out.push([
            -0.6 + 0.5 * u,
            0.15 + 0.2 * u,
            0.9 + 0.5 * u,
            1.0 + 0.4 * u,
            1.0 + 0.4 * u,
            1.1 + 0.3 * u,
            1.1 + 0.3 * u,
            1.15 + 0.3 * u,
            1.1 + 0.35 * u,
            1.2 + 0.3 * u,
        ]);
    }
    out
}

fn standard_indices(model: &HandModel) -> Result<[usize; 10]> {
    let mut idx = [0; 10];
    for (slot, name) in idx.iter_mut().zip(STANDARD_JOINTS) {
        *slot = model.joint_index(name)?;
    }
    Ok(idx)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn jitter() -> Normal<f64> {
    Normal::new(0.0, JITTER_SIGMA).expect("valid sigma")
}

/// Appends a ramp from the flat hand to `target` with jitter on every joint.
fn push_ramp(rows: &mut Vec<Vec<f64>>, model: &HandModel, idx: &[usize; 10], target: &[f64; 10], rng: &mut ChaCha8Rng) {
    let noise = jitter();
    for s in 0..RAMP_STEPS {
        let t = s as f64 / (RAMP_STEPS - 1) as f64;
        let mut p = vec![0.0; model.dof()];
        for (k, &j) in idx.iter().enumerate() {
            p[j] = t * target[k] + noise.sample(rng);
        }
        model.clamp_in_place(&mut p);
        rows.push(p);
    }
}

/// Flat-to-target ramps for every grasp target, `33 * 10` rows.
pub fn synthesize_grasp_dataset(model: &HandModel, seed: u64) -> Result<PostureSequence> {
    let idx = standard_indices(model)?;
    let mut rng = rng_for(seed, STREAM_GRASP);
    let mut rows = Vec::with_capacity(GRASP_TARGET_COUNT * RAMP_STEPS);
    for target in grasp_targets() {
        push_ramp(&mut rows, model, &idx, &target, &mut rng);
    }
    PostureSequence::from_rows(&rows, model.joint_names(), format!("synthetic grasp seed={seed}"))
}

struct Motion {
    grip: [f64; 10],
    direction: [f64; 10],
    moving: [bool; 10],
    period: f64,
}

fn motion(spec: &TaskSpec, manip_steps: usize) -> Motion {
    match spec.task {
        TaskKind::Scissors => {
            let cycles = match &spec.success {
                SuccessCriterion::Oscillation(c) => c.cycles,
                SuccessCriterion::Press(_) => 1,
            };
            Motion {
                grip: [0.7, 0.3, 0.5, 0.6, 0.5, 0.6, 1.2, 1.1, 1.2, 1.1],
                direction: [-0.1, -0.2, 0.35, 0.2, 0.3, 0.2, 0.0, 0.0, 0.0, 0.0],
                moving: [true, true, true, true, true, true, false, false, false, false],
                period: (manip_steps - 1) as f64 / cycles as f64,
            }
        }
        TaskKind::Switch => Motion {
            grip: [0.9, 0.3, 0.9, 0.8, 0.9, 0.8, 0.9, 0.8, 0.9, 0.8],
            direction: [0.05, 0.65, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            moving: [true, true, false, false, false, false, false, false, false, false],
            period: (manip_steps - 1) as f64,
        },
    }
}

fn task_stream(task: TaskKind) -> u64 {
    match task {
        TaskKind::Scissors => STREAM_TASK_BASE,
        TaskKind::Switch => 2 * STREAM_TASK_BASE,
    }
}

/// `count` recordings of a task: a ramp to a jittered grip, then the task
/// motion on the moving joints while the other joints only tremble.
pub fn synthesize_task_sequences(
    spec: &TaskSpec,
    model: &HandModel,
    seed: u64,
    count: usize,
) -> Result<Vec<PostureSequence>> {
    if count < 2 {
        return Err(Error::InvalidTaskSpec(format!(
            "need at least 2 sequences, got {count}"
        )));
    }
    let (_, manip_steps) = spec.phase_steps()?;
    let idx = standard_indices(model)?;
    let m = motion(spec, manip_steps);
    let noise = jitter();
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let mut rng = rng_for(seed, task_stream(spec.task) + n as u64);
        let mut grip = m.grip;
        for g in &mut grip {
            *g += rng.random_range(-GRIP_SPREAD..=GRIP_SPREAD);
        }
        let scale = rng.random_range(0.9..=1.1);
        let mut rows = Vec::with_capacity(RAMP_STEPS + manip_steps);
        push_ramp(&mut rows, model, &idx, &grip, &mut rng);
        for s in 0..manip_steps {
            let phi = 0.5 * (1.0 - (TAU * s as f64 / m.period).cos());
            let mut p = vec![0.0; model.dof()];
            for (k, &j) in idx.iter().enumerate() {
                p[j] = if m.moving[k] {
                    grip[k] + scale * phi * m.direction[k] + noise.sample(&mut rng)
                } else {
                    grip[k] + rng.random_range(-HOLD_TREMOR..=HOLD_TREMOR)
                };
            }
            model.clamp_in_place(&mut p);
            rows.push(p);
        }
        out.push(PostureSequence::from_rows(
            &rows,
            model.joint_names(),
            format!("synthetic {} seed={seed} #{n}", spec.task),
        )?);
    }
    Ok(out)
}

/// Even-indexed recordings fit, odd-indexed ones evaluate.
pub fn split_fit_eval(seqs: Vec<PostureSequence>) -> (Vec<PostureSequence>, Vec<PostureSequence>) {
    let (fit, eval): (Vec<_>, Vec<_>) = seqs.into_iter().enumerate().partition(|(i, _)| i % 2 == 0);
    (
        fit.into_iter().map(|(_, s)| s).collect(),
        eval.into_iter().map(|(_, s)| s).collect(),
    )
}

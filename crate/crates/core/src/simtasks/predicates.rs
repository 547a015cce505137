//! Success predicates over replayed trajectories.
//!
//! Both predicates look at the manipulation segment only, which starts at
//! the last phase boundary of the trajectory.

use super::{OscillationCriterion, PressCriterion, SuccessCriterion, TaskSpec};
use crate::error::{Error, Result};
use crate::hand::{Finger, HandModel};
use crate::switching::Trajectory;

fn manipulation_segment(traj: &Trajectory) -> Result<&[Vec<f64>]> {
    let seg = match traj.phase_starts.len() {
        0 => traj.postures.as_slice(),
        k => traj.phase(k - 1),
    };
    if seg.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(seg)
}

fn held_within(seg: &[Vec<f64>], model: &HandModel, fingers: &[Finger], eps: f64) -> bool {
    let joints: Vec<usize> = fingers
        .iter()
        .flat_map(|&f| model.finger_joints(f).iter().copied())
        .collect();
    let entry = &seg[0];
    seg.iter()
        .all(|p| joints.iter().all(|&j| (p[j] - entry[j]).abs() <= eps))
}

fn check_width(seg: &[Vec<f64>], model: &HandModel) -> Result<()> {
    match seg.iter().find(|p| p.len() != model.dof()) {
        Some(p) => Err(Error::LengthMismatch {
            expected: model.dof(),
            actual: p.len(),
        }),
        None => Ok(()),
    }
}

fn oscillation(seg: &[Vec<f64>], model: &HandModel, c: &OscillationCriterion) -> Result<bool> {
    let plus = model.joint_index(&c.signal_plus)?;
    let minus = model.joint_index(&c.signal_minus)?;
    let signal = |p: &[f64]| p[plus] - p[minus];
    let base = signal(&seg[0]);
    let mut open = false;
    let mut cycles = 0;
    for p in seg {
        let d = signal(p) - base;
        if !open && d >= c.open_threshold {
            open = true;
        } else if open && d <= c.close_threshold {
            open = false;
            cycles += 1;
        }
    }
    Ok(cycles >= c.cycles && held_within(seg, model, &c.held_fingers, c.hold_tolerance))
}

fn press(seg: &[Vec<f64>], model: &HandModel, c: &PressCriterion) -> Result<bool> {
    let joint = model.joint_index(&c.joint)?;
    let pressed = seg.iter().any(|p| p[joint] > c.threshold);
    Ok(pressed && held_within(seg, model, &c.held_fingers, c.hold_tolerance))
}

/// Applies whichever criterion `spec` declares.
pub fn task_success(traj: &Trajectory, spec: &TaskSpec, model: &HandModel) -> Result<bool> {
    let seg = manipulation_segment(traj)?;
    check_width(seg, model)?;
    match &spec.success {
        SuccessCriterion::Oscillation(c) => oscillation(seg, model, c),
        SuccessCriterion::Press(c) => press(seg, model, c),
    }
}

/// Full open/close cycles of the opposition signal with the held fingers still.
pub fn scissors_success(traj: &Trajectory, spec: &TaskSpec, model: &HandModel) -> Result<bool> {
    match spec.success {
        SuccessCriterion::Oscillation(_) => task_success(traj, spec, model),
        SuccessCriterion::Press(_) => Err(Error::InvalidTaskSpec("not a scissors task".into())),
    }
}

/// A press past the threshold with the held fingers still.
pub fn switch_success(traj: &Trajectory, spec: &TaskSpec, model: &HandModel) -> Result<bool> {
    match spec.success {
        SuccessCriterion::Press(_) => task_success(traj, spec, model),
        SuccessCriterion::Oscillation(_) => Err(Error::InvalidTaskSpec("not a switch task".into())),
    }
}

//! Kinematic hand description: joints, fingers, limits and planar forward
//! kinematics.
//!
//! Each finger is an independent planar serial chain rooted at its palm
//! frame. Joint order in the model file fixes joint indices everywhere else
//! (datasets, subsets, wire frames). Indices are 0-based.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::synergy::JointSubset;

const DEFAULT_MODEL: &str = include_str!("../data/hand_10dof.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Pinky,
}

impl Finger {
    /// Thumb to pinky, the order used by five-symbol units.
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Pinky,
    ];

    pub fn position(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Finger::Thumb => "thumb",
            Finger::Index => "index",
            Finger::Middle => "middle",
            Finger::Ring => "ring",
            Finger::Pinky => "pinky",
        }
    }
}

impl fmt::Display for Finger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    Rotation,
    Mcp,
    Pip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub name: String,
    pub finger: Finger,
    pub kind: JointKind,
    pub limit_lo: f64,
    pub limit_hi: f64,
    /// Length in meters of the segment distal to this joint.
    pub link_length: f64,
}

/// Planar base pose of one finger chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PalmFrame {
    pub origin: [f64; 2],
    /// Heading of the unflexed chain, radians.
    pub direction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HandModelDoc {
    #[serde(default)]
    name: String,
    joints: Vec<JointSpec>,
    palm_frames: BTreeMap<Finger, PalmFrame>,
}

/// Validated, immutable hand description.
#[derive(Debug, Clone, PartialEq)]
pub struct HandModel {
    name: String,
    joints: Vec<JointSpec>,
    finger_joints: BTreeMap<Finger, Vec<usize>>,
    palm_frames: BTreeMap<Finger, PalmFrame>,
}

/// Joint-angle vector in radians, indexed like [`HandModel::joints`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Posture(Vec<f64>);

impl Posture {
    pub fn new(angles: Vec<f64>) -> Self {
        Posture(angles)
    }

    pub fn zeros(d: usize) -> Self {
        Posture(vec![0.0; d])
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Posture {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Posture {
    fn from(v: Vec<f64>) -> Self {
        Posture(v)
    }
}

/// Joint positions of one finger chain, base first, plus the fingertip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerChain {
    pub joints: Vec<[f64; 2]>,
    pub tip: [f64; 2],
}

impl HandModel {
    /// The bundled 10-DoF model: two joints per finger, thumb first.
    pub fn default_10dof() -> Self {
        Self::from_json_str(DEFAULT_MODEL).expect("bundled hand model is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: HandModelDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let doc: HandModelDoc = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn to_json_string(&self) -> String {
        let doc = HandModelDoc {
            name: self.name.clone(),
            joints: self.joints.clone(),
            palm_frames: self.palm_frames.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("hand model serializes")
    }

    /// Builds a model from joints in index order and per-finger palm frames.
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec>,
        palm_frames: BTreeMap<Finger, PalmFrame>,
    ) -> Result<Self> {
        Self::from_doc(HandModelDoc {
            name: name.into(),
            joints,
            palm_frames,
        })
    }

    fn from_doc(doc: HandModelDoc) -> Result<Self> {
        if doc.joints.is_empty() {
            return Err(Error::EmptyModel);
        }
        let mut seen = HashSet::new();
        let mut finger_joints: BTreeMap<Finger, Vec<usize>> = BTreeMap::new();
        for (i, joint) in doc.joints.iter().enumerate() {
            if !seen.insert(joint.name.as_str()) {
                return Err(Error::DuplicateJoint(joint.name.clone()));
            }
            if !joint.limit_lo.is_finite() || !joint.limit_hi.is_finite() || joint.limit_lo >= joint.limit_hi {
                return Err(Error::InvalidLimits {
                    name: joint.name.clone(),
                    lo: joint.limit_lo,
                    hi: joint.limit_hi,
                });
            }
            if !joint.link_length.is_finite() || joint.link_length <= 0.0 {
                return Err(Error::InvalidLinkLength {
                    name: joint.name.clone(),
                    length: joint.link_length,
                });
            }
            finger_joints.entry(joint.finger).or_default().push(i);
        }
        for finger in doc.palm_frames.keys() {
            if !finger_joints.contains_key(finger) {
                return Err(Error::EmptyFinger(*finger));
            }
        }
        for (finger, frame) in &doc.palm_frames {
            if !frame.direction.is_finite() || frame.origin.iter().any(|c| !c.is_finite()) {
                return Err(Error::Schema(format!("palm frame of {finger} is not finite")));
            }
        }
        for finger in finger_joints.keys() {
            if !doc.palm_frames.contains_key(finger) {
                return Err(Error::MissingPalmFrame(*finger));
            }
        }
        Ok(HandModel {
            name: doc.name,
            joints: doc.joints,
            finger_joints,
            palm_frames: doc.palm_frames,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    /// Joint count `d`.
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joint_names(&self) -> Vec<String> {
        self.joints.iter().map(|j| j.name.clone()).collect()
    }

    pub fn joint_index(&self, name: &str) -> Result<usize> {
        self.joints
            .iter()
            .position(|j| j.name == name)
            .ok_or_else(|| Error::UnknownJoint(name.to_string()))
    }

    /// Fingers that own at least one joint, thumb first.
    pub fn fingers(&self) -> impl Iterator<Item = Finger> + '_ {
        self.finger_joints.keys().copied()
    }

    /// Ascending joint indices of `finger`; empty if the model lacks it.
    pub fn finger_joints(&self, finger: Finger) -> &[usize] {
        self.finger_joints.get(&finger).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn palm_frame(&self, finger: Finger) -> Option<&PalmFrame> {
        self.palm_frames.get(&finger)
    }

    /// Flat posture (all angles zero) clamped into the limits.
    pub fn rest_posture(&self) -> Posture {
        Posture(
            self.joints
                .iter()
                .map(|j| 0.0_f64.clamp(j.limit_lo, j.limit_hi))
                .collect(),
        )
    }

    pub fn clamp_posture(&self, p: &[f64]) -> Result<Posture> {
        check_len(self.dof(), p.len())?;
        Ok(Posture(
            p.iter()
                .zip(&self.joints)
                .map(|(a, j)| a.clamp(j.limit_lo, j.limit_hi))
                .collect(),
        ))
    }

    pub(crate) fn clamp_in_place(&self, p: &mut [f64]) {
        for (a, j) in p.iter_mut().zip(&self.joints) {
            *a = a.clamp(j.limit_lo, j.limit_hi);
        }
    }

    pub fn within_limits(&self, p: &[f64]) -> bool {
        p.len() == self.dof()
            && p.iter()
                .zip(&self.joints)
                .all(|(a, j)| *a >= j.limit_lo && *a <= j.limit_hi)
    }

    /// Planar forward kinematics of every finger chain.
    ///
    /// Each joint adds its angle to the running heading of its finger; the
    /// link distal to the joint is then laid along that heading.
    pub fn forward_kinematics(&self, p: &[f64]) -> Result<BTreeMap<Finger, FingerChain>> {
        check_len(self.dof(), p.len())?;
        let mut out = BTreeMap::new();
        for (&finger, indices) in &self.finger_joints {
            let frame = self.palm_frames[&finger];
            let mut heading = frame.direction;
            let mut point = frame.origin;
            let mut joints = Vec::with_capacity(indices.len());
            for &i in indices {
                joints.push(point);
                heading += p[i];
                let len = self.joints[i].link_length;
                point = [point[0] + len * heading.cos(), point[1] + len * heading.sin()];
            }
            out.insert(finger, FingerChain { joints, tip: point });
        }
        Ok(out)
    }

    /// Ascending joint indices of all the given fingers.
    pub fn joints_for_fingers(&self, fingers: &[Finger]) -> Result<JointSubset> {
        if fingers.is_empty() {
            return Err(Error::EmptyFingerSet);
        }
        let mut indices: Vec<usize> = fingers
            .iter()
            .flat_map(|f| self.finger_joints(*f).iter().copied())
            .collect();
        indices.sort_unstable();
        indices.dedup();
        JointSubset::new(indices)
    }
}

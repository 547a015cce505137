//! Grasp, task-specific and functionally divided synergies.
//!
//! A functionally divided synergy is a grasp synergy refitted on the joints
//! of the fingers that carry the manipulation function; the remaining
//! fingers are held at their current posture by the switching runtime.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand::HandModel;
use crate::notation::{Function, FunctionUnit};
use crate::synergy::{fit_pca, Centering, JointSubset, PostureSequence, SynergyModel};

/// Serializable form of a function assignment: a five-letter unit, optionally
/// refined joint by joint.
///
/// In files it is either the bare unit string (`"MMMFF"`) or an object
/// `{"functions": "MMMFF", "joints": {"Thumb rot.": "M", ...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "AssignmentRepr", into = "AssignmentRepr")]
pub struct AssignmentSpec {
    pub functions: FunctionUnit,
    pub joints: BTreeMap<String, Function>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AssignmentRepr {
    Unit(FunctionUnit),
    Detailed {
        functions: FunctionUnit,
        #[serde(default)]
        joints: BTreeMap<String, Function>,
    },
}

impl From<AssignmentRepr> for AssignmentSpec {
    fn from(r: AssignmentRepr) -> Self {
        match r {
            AssignmentRepr::Unit(functions) => AssignmentSpec {
                functions,
                joints: BTreeMap::new(),
            },
            AssignmentRepr::Detailed { functions, joints } => AssignmentSpec { functions, joints },
        }
    }
}

impl From<AssignmentSpec> for AssignmentRepr {
    fn from(s: AssignmentSpec) -> Self {
        if s.joints.is_empty() {
            AssignmentRepr::Unit(s.functions)
        } else {
            AssignmentRepr::Detailed {
                functions: s.functions,
                joints: s.joints,
            }
        }
    }
}

impl From<FunctionUnit> for AssignmentSpec {
    fn from(functions: FunctionUnit) -> Self {
        AssignmentSpec {
            functions,
            joints: BTreeMap::new(),
        }
    }
}

impl AssignmentSpec {
    /// Per-finger units, written out joint by joint for `model`.
    pub fn per_joint(functions: FunctionUnit, model: &HandModel) -> Self {
        let joints = model
            .joints()
            .iter()
            .map(|j| (j.name.clone(), functions.of(j.finger)))
            .collect();
        AssignmentSpec { functions, joints }
    }
}

/// An assignment resolved against a hand model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionAssignment {
    spec: AssignmentSpec,
    resolved_subset: JointSubset,
}

impl FunctionAssignment {
    /// Joint-level overrides win over the finger's function.
    pub fn resolve(spec: AssignmentSpec, model: &HandModel) -> Result<Self> {
        for name in spec.joints.keys() {
            model.joint_index(name)?;
        }
        let manipulated: Vec<usize> = model
            .joints()
            .iter()
            .enumerate()
            .filter(|(_, j)| {
                spec.joints
                    .get(&j.name)
                    .copied()
                    .unwrap_or_else(|| spec.functions.of(j.finger))
                    == Function::Manipulation
            })
            .map(|(i, _)| i)
            .collect();
        if manipulated.is_empty() {
            return Err(Error::AllFixed(spec.functions.to_string()));
        }
        Ok(FunctionAssignment {
            resolved_subset: JointSubset::new(manipulated)?,
            spec,
        })
    }

    pub fn from_unit(unit: FunctionUnit, model: &HandModel) -> Result<Self> {
        Self::resolve(unit.into(), model)
    }

    /// Rebuilds an assignment read from a synergy file, where the subset
    /// was stored next to the spec.
    pub fn from_stored(spec: AssignmentSpec, resolved_subset: JointSubset) -> Self {
        FunctionAssignment { spec, resolved_subset }
    }

    pub fn spec(&self) -> &AssignmentSpec {
        &self.spec
    }

    pub fn functions(&self) -> FunctionUnit {
        self.spec.functions
    }

    pub fn label(&self) -> String {
        self.spec.functions.to_string()
    }

    /// Joints driven by the synergy.
    pub fn resolved_subset(&self) -> &JointSubset {
        &self.resolved_subset
    }

    /// Joints held fixed, for a hand of `d` joints.
    pub fn fixed_joints(&self, d: usize) -> Vec<usize> {
        self.resolved_subset.complement(d)
    }
}

/// A synergy fitted on grasp postures restricted to the manipulation joints.
#[derive(Debug, Clone, PartialEq)]
pub struct FdmsModel {
    pub base: SynergyModel,
    pub assignment: FunctionAssignment,
    pub label: String,
}

/// PCA over every joint of a grasp dataset.
pub fn build_grasp_synergy(grasp: &PostureSequence, centering: Centering) -> Result<SynergyModel> {
    fit_pca(grasp, centering)
}

/// PCA over the concatenated recordings of one task.
pub fn build_task_specific(task_seqs: &[PostureSequence], centering: Centering) -> Result<SynergyModel> {
    let joined = PostureSequence::concat(task_seqs, "task-specific")?;
    fit_pca(&joined, centering)
}

/// PCA over the grasp dataset's columns selected by the assignment.
pub fn build_fdms(grasp: &PostureSequence, assignment: &FunctionAssignment, centering: Centering) -> Result<FdmsModel> {
    let subset = assignment.resolved_subset().clone();
    let sub = grasp.extract_subvector(&subset)?;
    let base = fit_pca(&sub, centering)?.with_subset(subset)?;
    Ok(FdmsModel {
        base,
        assignment: assignment.clone(),
        label: assignment.label(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::Finger;

    #[test]
    fn joint_override_wins() {
        let m = HandModel::default_10dof();
        let mut spec: AssignmentSpec = "MFFFF".parse::<FunctionUnit>().unwrap().into();
        spec.joints.insert("Index PIP".into(), Function::Manipulation);
        spec.joints.insert("Thumb rot.".into(), Function::Fixed);
        let a = FunctionAssignment::resolve(spec, &m).unwrap();
        assert_eq!(a.resolved_subset().indices(), &[1, 3]);
    }

    #[test]
    fn unknown_override_rejected() {
        let m = HandModel::default_10dof();
        let mut spec: AssignmentSpec = "MFFFF".parse::<FunctionUnit>().unwrap().into();
        spec.joints.insert("Wrist".into(), Function::Fixed);
        assert!(matches!(
            FunctionAssignment::resolve(spec, &m),
            Err(Error::UnknownJoint(_))
        ));
    }

    #[test]
    fn overrides_can_empty_the_subset() {
        let m = HandModel::default_10dof();
        let mut spec: AssignmentSpec = "MFFFF".parse::<FunctionUnit>().unwrap().into();
        spec.joints.insert("Thumb rot.".into(), Function::Fixed);
        spec.joints.insert("Thumb MCP".into(), Function::Fixed);
        assert!(matches!(FunctionAssignment::resolve(spec, &m), Err(Error::AllFixed(_))));
    }

    #[test]
    fn spec_serde_forms() {
        let bare: AssignmentSpec = serde_json::from_str("\"FMFFF\"").unwrap();
        assert!(bare.joints.is_empty());
        assert_eq!(serde_json::to_string(&bare).unwrap(), "\"FMFFF\"");
        let m = HandModel::default_10dof();
        let full = AssignmentSpec::per_joint("MMMFF".parse().unwrap(), &m);
        let text = serde_json::to_string(&full).unwrap();
        let back: AssignmentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, full);
        let resolved = FunctionAssignment::resolve(back, &m).unwrap();
        assert_eq!(
            resolved.fixed_joints(10),
            m.joints_for_fingers(&[Finger::Ring, Finger::Pinky]).unwrap().indices()
        );
    }
}

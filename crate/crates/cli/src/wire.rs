//! JSON frames exchanged with steering clients.

use std::collections::BTreeMap;

use fdms_core::hand::Finger;
use fdms_core::switching::RuntimeState;
use serde::{Deserialize, Serialize};

/// A steering command: synergy coordinates or a full commanded posture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posture: Option<Vec<f64>>,
}

/// Hand state after one applied frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    pub posture: Vec<f64>,
    pub fingertips: BTreeMap<Finger, [f64; 2]>,
    /// Joint positions of each finger, base first, ending at the fingertip.
    pub chains: BTreeMap<Finger, Vec<[f64; 2]>>,
    pub frozen: Vec<usize>,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorFrame {
    pub error: ErrorBody,
}

impl ErrorFrame {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        ErrorFrame {
            error: ErrorBody {
                kind: kind.into(),
                message: message.into(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error frame serializes")
    }
}

impl From<&fdms_core::Error> for ErrorFrame {
    fn from(e: &fdms_core::Error) -> Self {
        ErrorFrame::new(e.kind(), e.to_string())
    }
}

/// The hand as the client should render it.
pub fn view(state: &RuntimeState) -> Reply {
    let posture = state.current_posture().to_vec();
    let fk = state
        .model()
        .forward_kinematics(&posture)
        .expect("state posture has the model's width");
    let mut fingertips = BTreeMap::new();
    let mut chains = BTreeMap::new();
    for (finger, chain) in fk {
        fingertips.insert(finger, chain.tip);
        let mut pts = chain.joints;
        pts.push(chain.tip);
        chains.insert(finger, pts);
    }
    Reply {
        posture,
        fingertips,
        chains,
        frozen: state.frozen_indices(),
        coefficients: state
            .coefficients()
            .map(|z| z.iter().copied().collect())
            .unwrap_or_default(),
    }
}

pub fn parse_frame(text: &str) -> Result<Frame, ErrorFrame> {
    let frame: Frame = serde_json::from_str(text).map_err(|e| ErrorFrame::new("MalformedFrame", e.to_string()))?;
    if frame.z.is_some() == frame.posture.is_some() {
        return Err(ErrorFrame::new(
            "MalformedFrame",
            "a frame carries exactly one of \"z\" or \"posture\"",
        ));
    }
    Ok(frame)
}

/// Applies one frame. Failed frames leave the state untouched.
pub fn apply_frame(state: &mut RuntimeState, text: &str) -> Result<Reply, ErrorFrame> {
    let frame = parse_frame(text)?;
    let result = match (&frame.z, &frame.posture) {
        (Some(z), _) => state.drive_with_coefficients(z),
        (_, Some(p)) => state.drive_with_posture(p),
        (None, None) => unreachable!("checked by parse_frame"),
    };
    result.map_err(|e| ErrorFrame::from(&e))?;
    Ok(view(state))
}

/// Applies one frame and returns the reply text, an error frame on failure.
pub fn handle_frame(state: &mut RuntimeState, text: &str) -> String {
    match apply_frame(state, text) {
        Ok(reply) => serde_json::to_string(&reply).expect("reply serializes"),
        Err(e) => e.to_json(),
    }
}

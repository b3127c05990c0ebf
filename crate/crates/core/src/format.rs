//! Versioned JSON documents for MDPs, policies, datasets and fitted models.
//!
//! Every document is an envelope
//!
//! ```json
//! {"format": "selprop", "version": 1, "kind": "mdp", "data": { ... }}
//! ```
//!
//! where `kind` is one of `mdp`, `policy`, `dataset`, `model` and arrays inside `data` use the
//! ndarray layout `{"v": 1, "dim": [...], "data": [... row-major ...]}`. Loading re-runs the
//! same validation as the in-memory constructors.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array3, Array4};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ModelEstimate;
use crate::mdp::{Dataset, Policy, RewardNoise, TabularMDP, Trajectory};

pub const FORMAT_NAME: &str = "selprop";
pub const FORMAT_VERSION: u32 = 1;

/// Object that can be written as a versioned document.
pub trait Document: Sized {
    const KIND: &'static str;
    type Body: Serialize + DeserializeOwned;

    fn to_body(&self) -> Self::Body;
    fn from_body(body: Self::Body) -> Result<Self>;
}

#[derive(Serialize, Deserialize)]
struct Envelope<B> {
    format: String,
    version: u32,
    kind: String,
    data: B,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: String,
}

pub fn to_json<D: Document>(doc: &D) -> Result<String> {
    let envelope = Envelope {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        kind: D::KIND.to_string(),
        data: doc.to_body(),
    };
    Ok(serde_json::to_string_pretty(&envelope)?)
}

pub fn from_json<D: Document>(text: &str) -> Result<D> {
    let header: Header = serde_json::from_str(text)?;
    if header.format != FORMAT_NAME {
        return Err(Error::Format(format!("not a {FORMAT_NAME} document (format {:?})", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported document version {} (expected {FORMAT_VERSION})",
            header.version
        )));
    }
    if header.kind != D::KIND {
        return Err(Error::Format(format!("expected a {} document, found {}", D::KIND, header.kind)));
    }
    let envelope: Envelope<D::Body> = serde_json::from_str(text)?;
    D::from_body(envelope.data)
}

pub fn save<D: Document>(doc: &D, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(doc)?)?;
    Ok(())
}

pub fn load<D: Document>(path: impl AsRef<Path>) -> Result<D> {
    from_json(&fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize)]
pub struct MdpBody {
    rewards: Array3<f64>,
    transitions: Array4<f64>,
    initial: Array1<f64>,
    #[serde(default)]
    reward_noise: RewardNoise,
}

impl Document for TabularMDP {
    const KIND: &'static str = "mdp";
    type Body = MdpBody;

    fn to_body(&self) -> MdpBody {
        MdpBody {
            rewards: self.rewards().clone(),
            transitions: self.transitions().clone(),
            initial: self.initial_distribution().clone(),
            reward_noise: self.reward_noise(),
        }
    }

    fn from_body(body: MdpBody) -> Result<Self> {
        Ok(TabularMDP::new(body.rewards, body.transitions, body.initial)?.with_reward_noise(body.reward_noise))
    }
}

#[derive(Serialize, Deserialize)]
pub struct PolicyBody {
    probs: Array3<f64>,
}

impl Document for Policy {
    const KIND: &'static str = "policy";
    type Body = PolicyBody;

    fn to_body(&self) -> PolicyBody {
        PolicyBody { probs: self.probs().clone() }
    }

    fn from_body(body: PolicyBody) -> Result<Self> {
        Policy::new(body.probs)
    }
}

#[derive(Serialize, Deserialize)]
pub struct DatasetBody {
    seed: u64,
    behavior: PolicyBody,
    trajectories: Vec<Trajectory>,
}

impl Document for Dataset {
    const KIND: &'static str = "dataset";
    type Body = DatasetBody;

    fn to_body(&self) -> DatasetBody {
        DatasetBody {
            seed: self.seed(),
            behavior: self.behavior().to_body(),
            trajectories: self.trajectories().to_vec(),
        }
    }

    fn from_body(body: DatasetBody) -> Result<Self> {
        Dataset::new(body.trajectories, Policy::from_body(body.behavior)?, body.seed)
    }
}

#[derive(Serialize, Deserialize)]
pub struct ModelBody {
    rewards: Array3<f64>,
    transitions: Array4<f64>,
    counts: Array3<u64>,
    transition_counts: Array3<u64>,
    pooled: bool,
    delta: f64,
}

impl Document for ModelEstimate {
    const KIND: &'static str = "model";
    type Body = ModelBody;

    fn to_body(&self) -> ModelBody {
        ModelBody {
            rewards: self.rewards().clone(),
            transitions: self.transitions().clone(),
            counts: self.counts().clone(),
            transition_counts: self.transition_counts().clone(),
            pooled: self.is_pooled(),
            delta: self.delta(),
        }
    }

    fn from_body(body: ModelBody) -> Result<Self> {
        ModelEstimate::restore(
            body.rewards,
            body.transitions,
            body.counts,
            body.transition_counts,
            body.pooled,
            body.delta,
        )
    }
}

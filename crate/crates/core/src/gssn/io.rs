//! Model file format.
//!
//! A model is stored as a JSON document:
//!
//! ```text
//! {
//!   "format": "edgecloud-gssn",
//!   "version": 1,
//!   "sha256": "<hex digest of the compact JSON encoding of payload>",
//!   "payload": {
//!     "architecture": { "n_links", "link_hidden", "program_hidden",
//!                       "ranking_hidden", "input_scale", "alpha_floor",
//!                       "alpha_bias_init" },
//!     "temperature": f64,
//!     "link" | "program" | "ranking": {
//!       "widths": [in, hidden.., out],
//!       "output": "Identity" | { "Relu6Plus": eps },
//!       "params": [f64; ...]   // per layer: out x in weights row-major, then bias
//!     }
//!   }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so saving and loading is
//! bit-exact. A digest mismatch is reported as an integrity error.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::network::{Architecture, GssnModel};
use crate::error::{Error, Result};
use crate::nn::{DenseSpec, Mlp, OutputTransform};

pub const MODEL_FORMAT: &str = "edgecloud-gssn";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    widths: Vec<usize>,
    output: OutputTransform,
    params: Vec<f64>,
}

impl NetworkDoc {
    fn from_mlp(mlp: &Mlp) -> Self {
        NetworkDoc { widths: mlp.spec().widths.clone(), output: mlp.spec().output, params: mlp.params().to_vec() }
    }

    fn into_mlp(self, expected: DenseSpec, name: &str) -> Result<Mlp> {
        let spec = DenseSpec::new(self.widths, self.output)?;
        if spec != expected {
            return Err(Error::Shape(format!(
                "{name} encoder layout {spec:?} does not match architecture {expected:?}"
            )));
        }
        Mlp::from_params(spec, self.params)
    }
}

#[derive(Serialize, Deserialize)]
struct Payload {
    architecture: Architecture,
    temperature: f64,
    link: NetworkDoc,
    program: NetworkDoc,
    ranking: NetworkDoc,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    sha256: String,
    payload: Payload,
}

fn digest(payload: &Payload) -> String {
    let text = serde_json::to_string(payload).expect("payload serializes");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn model_to_string(model: &GssnModel) -> String {
    let payload = Payload {
        architecture: model.arch.clone(),
        temperature: model.temperature,
        link: NetworkDoc::from_mlp(&model.link),
        program: NetworkDoc::from_mlp(&model.program),
        ranking: NetworkDoc::from_mlp(&model.ranking),
    };
    let file = ModelFile { format: MODEL_FORMAT.into(), version: MODEL_VERSION, sha256: digest(&payload), payload };
    serde_json::to_string(&file).expect("model serializes")
}

pub fn model_from_str(text: &str) -> Result<GssnModel> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::format("model file", e.to_string()))?;
    match value.get("format").and_then(|f| f.as_str()) {
        Some(MODEL_FORMAT) => {}
        other => return Err(Error::format("model file", format!("expected format {MODEL_FORMAT:?}, found {other:?}"))),
    }
    let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != MODEL_VERSION {
        return Err(Error::Version { what: "model file", found: version, expected: MODEL_VERSION });
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::format("model file", e.to_string()))?;
    let actual = digest(&file.payload);
    if actual != file.sha256 {
        return Err(Error::Integrity(format!("model payload digest {actual} does not match recorded {}", file.sha256)));
    }
    let p = file.payload;
    p.architecture.validate()?;
    let link = p.link.into_mlp(p.architecture.link_spec()?, "link")?;
    let program = p.program.into_mlp(p.architecture.program_spec()?, "program")?;
    let ranking = p.ranking.into_mlp(p.architecture.ranking_spec()?, "ranking")?;
    Ok(GssnModel { arch: p.architecture, link, program, ranking, temperature: p.temperature })
}

pub fn save_model(model: &GssnModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GssnModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

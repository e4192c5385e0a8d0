//! JSON files for instances and allocation schemes.
//!
//! Instance document (`version` 1):
//!
//! ```text
//! {
//!   "format": "edgecloud-instance",
//!   "version": 1,
//!   "id": "train-0003",
//!   "seed": 17,
//!   "topology": {
//!     "n_users": N, "n_slots": T, "n_types": K, "n_links": EL,
//!     "edge_links": [[{"cap_basic", "cap_max", "cap_phys", "rate"} x EL] x N],
//!     "isp_links":  [{"cap_basic", "cap_max", "cap_phys", "rate"} x EL],
//!     "admissible": [[bitmask x N] x K]
//!   },
//!   "demands": {
//!     "inbound":  [[[Mbps x K] x N] x T],
//!     "outbound": [[[Mbps x K] x N] x T]
//!   }
//! }
//! ```
//!
//! Demand arrays are nested slot-outermost (`[t][n][k]`). Floats are written
//! in shortest round-trip form, so `read(write(x)) == x` bit for bit.
//!
//! A scheme file is the bare nested array `option[t][n][k]` of option indices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::allocation::AllocationScheme;
use super::topology::{DemandTensor, Instance, LinkCaps, Topology};
use crate::error::{Error, Result};

pub const INSTANCE_FORMAT: &str = "edgecloud-instance";
pub const INSTANCE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    format: String,
    version: u32,
    id: String,
    seed: u64,
    topology: TopologyDoc,
    demands: DemandsDoc,
}

#[derive(Serialize, Deserialize)]
struct TopologyDoc {
    n_users: usize,
    n_slots: usize,
    n_types: usize,
    n_links: usize,
    edge_links: Vec<Vec<LinkCaps>>,
    isp_links: Vec<LinkCaps>,
    admissible: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct DemandsDoc {
    inbound: Vec<Vec<Vec<f64>>>,
    outbound: Vec<Vec<Vec<f64>>>,
}

fn nest(flat: &[f64], d: &DemandTensor) -> Vec<Vec<Vec<f64>>> {
    (0..d.n_slots)
        .map(|t| (0..d.n_users).map(|n| (0..d.n_types).map(|k| flat[d.index(k, n, t)]).collect()).collect())
        .collect()
}

fn flatten(nested: &[Vec<Vec<f64>>], k: usize, n: usize, t: usize, what: &str) -> Result<Vec<f64>> {
    let bad = || Error::format("instance demands", format!("`{what}` must be a {t} x {n} x {k} array ([t][n][k])"));
    if nested.len() != t {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(k * n * t);
    for slot in nested {
        if slot.len() != n {
            return Err(bad());
        }
        for user in slot {
            if user.len() != k {
                return Err(bad());
            }
            out.extend_from_slice(user);
        }
    }
    Ok(out)
}

pub fn instance_to_string(instance: &Instance) -> String {
    let t = &instance.topology;
    let doc = InstanceDoc {
        format: INSTANCE_FORMAT.into(),
        version: INSTANCE_VERSION,
        id: instance.id.clone(),
        seed: instance.seed,
        topology: TopologyDoc {
            n_users: t.n_users,
            n_slots: t.n_slots,
            n_types: t.n_types,
            n_links: t.n_links,
            edge_links: t.edge_links.clone(),
            isp_links: t.isp_links.clone(),
            admissible: t.admissible.clone(),
        },
        demands: DemandsDoc {
            inbound: nest(&instance.demands.inbound, &instance.demands),
            outbound: nest(&instance.demands.outbound, &instance.demands),
        },
    };
    serde_json::to_string(&doc).expect("instance serializes")
}

pub fn instance_from_str(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = match serde_json::from_str(text) {
        Ok(doc) => doc,
        Err(err) if err.is_eof() || err.is_syntax() => {
            // Name the first top-level block that never made it into the file.
            let missing = ["\"topology\"", "\"demands\""].into_iter().find(|key| !text.contains(key));
            let message = match missing {
                Some(key) => format!("file is truncated: missing block {key} ({err})"),
                None => err.to_string(),
            };
            return Err(Error::format("instance", message));
        }
        Err(err) => return Err(Error::format("instance", err.to_string())),
    };
    if doc.format != INSTANCE_FORMAT {
        return Err(Error::format("instance", format!("unexpected format tag `{}`", doc.format)));
    }
    if doc.version != INSTANCE_VERSION {
        return Err(Error::Version { what: "instance", found: doc.version, expected: INSTANCE_VERSION });
    }
    let tp = doc.topology;
    let topology = Topology {
        n_users: tp.n_users,
        n_slots: tp.n_slots,
        n_types: tp.n_types,
        n_links: tp.n_links,
        edge_links: tp.edge_links,
        isp_links: tp.isp_links,
        admissible: tp.admissible,
    };
    let (k, n, t) = (topology.n_types, topology.n_users, topology.n_slots);
    let demands = DemandTensor {
        n_types: k,
        n_users: n,
        n_slots: t,
        inbound: flatten(&doc.demands.inbound, k, n, t, "inbound")?,
        outbound: flatten(&doc.demands.outbound, k, n, t, "outbound")?,
    };
    let instance = Instance { topology, demands, seed: doc.seed, id: doc.id };
    instance.validate()?;
    Ok(instance)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, instance_to_string(instance)).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    instance_from_str(&text).map_err(|e| match e {
        Error::Format { context, message } => {
            Error::Format { context: format!("{context} {}", path.display()), message }
        }
        other => other,
    })
}

pub fn scheme_to_string(scheme: &AllocationScheme) -> String {
    let nested: Vec<Vec<Vec<u16>>> = (0..scheme.n_slots)
        .map(|t| {
            (0..scheme.n_users)
                .map(|n| (0..scheme.n_types).map(|k| scheme.option[scheme.row(t, n, k)]).collect())
                .collect()
        })
        .collect();
    serde_json::to_string(&nested).expect("scheme serializes")
}

pub fn scheme_from_str(text: &str) -> Result<AllocationScheme> {
    let nested: Vec<Vec<Vec<u16>>> = serde_json::from_str(text).map_err(|e| Error::format("scheme", e.to_string()))?;
    let t = nested.len();
    let n = nested.first().map_or(0, Vec::len);
    let k = nested.first().and_then(|s| s.first()).map_or(0, Vec::len);
    let mut option = Vec::with_capacity(t * n * k);
    for slot in &nested {
        if slot.len() != n || slot.iter().any(|u| u.len() != k) {
            return Err(Error::format("scheme", "ragged option array"));
        }
        for user in slot {
            option.extend_from_slice(user);
        }
    }
    Ok(AllocationScheme { n_slots: t, n_users: n, n_types: k, option })
}

pub fn write_scheme(scheme: &AllocationScheme, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scheme_to_string(scheme)).map_err(|e| Error::io(path, e))
}

pub fn read_scheme(path: impl AsRef<Path>) -> Result<AllocationScheme> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scheme_from_str(&text)
}

/// Reads every `*.json` instance in `dir`, in file-name order.
pub fn read_instance_dir(dir: impl AsRef<Path>) -> Result<Vec<Instance>> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    paths.iter().map(read_instance).collect()
}

use crate::error::{Error, Result};

/// Capacities (Mbps) and rate (currency per Mbps) of one peering link.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinkCaps {
    /// Basic capacity: billable bandwidth up to this level is free.
    pub cap_basic: f64,
    /// Maximum billable bandwidth.
    pub cap_max: f64,
    /// Physical capacity bounding every five-minute sample.
    pub cap_phys: f64,
    pub rate: f64,
}

impl LinkCaps {
    fn validate(&self, what: &str) -> Result<()> {
        let ok = self.cap_basic > 0.0
            && self.cap_basic <= self.cap_max
            && self.cap_max <= self.cap_phys
            && self.rate > 0.0
            && self.cap_phys.is_finite()
            && self.rate.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTopology(format!("{what}: need 0 < basic <= max <= phys and rate > 0, got {self:?}")))
        }
    }
}

/// Static network parameters of the two-layer hub topology.
///
/// Every user edge `n` connects to every ISP `i` through edge link
/// `e_{n,i}`; ISP `i` reaches the hub through ISP link `l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub n_users: usize,
    /// Five-minute slots per billing cycle.
    pub n_slots: usize,
    pub n_types: usize,
    /// Number of ISPs, which is also the number of edge links per user.
    pub n_links: usize,
    /// `edge_links[n][i]`.
    pub edge_links: Vec<Vec<LinkCaps>>,
    /// `isp_links[i]`.
    pub isp_links: Vec<LinkCaps>,
    /// `admissible[k][n]`: bit `i` set when type `k` of user `n` may use link `i`.
    pub admissible: Vec<Vec<u32>>,
}

/// Largest supported ISP count; options are indexed with `u16`.
pub const MAX_LINKS: usize = 12;

impl Topology {
    pub fn validate(&self) -> Result<()> {
        let (n, k, el) = (self.n_users, self.n_types, self.n_links);
        if n == 0 || k == 0 || el == 0 || self.n_slots == 0 {
            return Err(Error::InvalidTopology("all dimensions must be positive".into()));
        }
        if el > MAX_LINKS {
            return Err(Error::InvalidTopology(format!("at most {MAX_LINKS} links per user, got {el}")));
        }
        if self.edge_links.len() != n || self.edge_links.iter().any(|row| row.len() != el) {
            return Err(Error::InvalidTopology(format!("edge_links must be {n} x {el}")));
        }
        if self.isp_links.len() != el {
            return Err(Error::InvalidTopology(format!("isp_links must have {el} entries")));
        }
        if self.admissible.len() != k || self.admissible.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTopology(format!("admissible must be {k} x {n}")));
        }
        for (u, row) in self.edge_links.iter().enumerate() {
            for (i, caps) in row.iter().enumerate() {
                caps.validate(&format!("edge link (user {u}, isp {i})"))?;
            }
        }
        for (i, caps) in self.isp_links.iter().enumerate() {
            caps.validate(&format!("isp link {i}"))?;
        }
        let full = (1u32 << el) - 1;
        for (ty, row) in self.admissible.iter().enumerate() {
            for (u, &mask) in row.iter().enumerate() {
                if mask & full == 0 {
                    return Err(Error::InvalidTopology(format!("empty admissible set for type {ty}, user {u}")));
                }
                if mask & !full != 0 {
                    return Err(Error::InvalidTopology(format!(
                        "admissible mask {mask:#b} for type {ty}, user {u} names links beyond {el}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same static parameters over a different number of slots.
    pub fn with_slots(&self, n_slots: usize) -> Topology {
        Topology { n_slots, ..self.clone() }
    }

    pub fn edge(&self, user: usize, link: usize) -> &LinkCaps {
        &self.edge_links[user][link]
    }
}

/// Inbound and outbound averaged demands (Mbps).
///
/// Stored slot-major: entry `(k, n, t)` lives at `(t * N + n) * K + k`, the
/// same order as allocation rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandTensor {
    pub n_types: usize,
    pub n_users: usize,
    pub n_slots: usize,
    pub inbound: Vec<f64>,
    pub outbound: Vec<f64>,
}

impl DemandTensor {
    pub fn zeros(n_types: usize, n_users: usize, n_slots: usize) -> Self {
        let len = n_types * n_users * n_slots;
        DemandTensor { n_types, n_users, n_slots, inbound: vec![0.0; len], outbound: vec![0.0; len] }
    }

    #[inline]
    pub fn index(&self, k: usize, n: usize, t: usize) -> usize {
        (t * self.n_users + n) * self.n_types + k
    }

    #[inline]
    pub fn inbound_at(&self, k: usize, n: usize, t: usize) -> f64 {
        self.inbound[self.index(k, n, t)]
    }

    #[inline]
    pub fn outbound_at(&self, k: usize, n: usize, t: usize) -> f64 {
        self.outbound[self.index(k, n, t)]
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.n_types * self.n_users * self.n_slots;
        if self.inbound.len() != len || self.outbound.len() != len {
            return Err(Error::Shape(format!("demand arrays must have {len} entries")));
        }
        if self.inbound.iter().chain(&self.outbound).any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Shape("demands must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// One member of the problem family: static topology plus a demand draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub topology: Topology,
    pub demands: DemandTensor,
    pub seed: u64,
    pub id: String,
}

impl Instance {
    pub fn new(topology: Topology, demands: DemandTensor, seed: u64, id: impl Into<String>) -> Result<Self> {
        let inst = Instance { topology, demands, seed, id: id.into() };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.demands.validate()?;
        let t = &self.topology;
        let d = &self.demands;
        if (d.n_types, d.n_users, d.n_slots) != (t.n_types, t.n_users, t.n_slots) {
            return Err(Error::Shape(format!(
                "demands are {}x{}x{} (K x N x T) but topology is {}x{}x{}",
                d.n_types, d.n_users, d.n_slots, t.n_types, t.n_users, t.n_slots
            )));
        }
        Ok(())
    }

    /// Number of (t, n, k) allocation rows.
    pub fn n_rows(&self) -> usize {
        self.topology.n_slots * self.topology.n_users * self.topology.n_types
    }
}

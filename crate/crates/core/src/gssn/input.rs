use crate::model::{Instance, OptionTable};

/// Columns of every input row: inbound share, outbound share, basic and
/// maximum capacity of the link.
pub const INPUT_COLUMNS: usize = 4;

/// Stacked per-demand input blocks.
///
/// Block `(t, n, k)` starts at row `((t·N + n)·K + k)·P·EL`; inside it, row
/// `EL·p + j` describes link `j` under option `p`. Padded options carry zero
/// traffic but still list the link capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    pub n_slots: usize,
    pub n_users: usize,
    pub n_types: usize,
    pub n_options: usize,
    pub n_links: usize,
    /// Row-major `rows x 4`.
    pub data: Vec<f64>,
    /// Valid option count of each demand row.
    pub n_valid: Vec<u16>,
}

impl InputTensor {
    pub fn n_demands(&self) -> usize {
        self.n_slots * self.n_users * self.n_types
    }

    pub fn n_rows(&self) -> usize {
        self.n_demands() * self.n_options * self.n_links
    }

    pub fn block_rows(&self) -> usize {
        self.n_options * self.n_links
    }

    /// The `(P·EL) x 4` block of one demand row.
    pub fn block(&self, t: usize, n: usize, k: usize) -> &[f64] {
        let row = (t * self.n_users + n) * self.n_types + k;
        let len = self.block_rows() * INPUT_COLUMNS;
        &self.data[row * len..(row + 1) * len]
    }
}

/// Builds the network input of an instance.
pub fn preprocess(instance: &Instance, table: &OptionTable) -> InputTensor {
    let topo = &instance.topology;
    let (nt, nu, nk, el, p_count) = (topo.n_slots, topo.n_users, topo.n_types, topo.n_links, table.n_options);
    let block = p_count * el * INPUT_COLUMNS;
    let mut data = vec![0.0; nt * nu * nk * block];
    let mut n_valid = Vec::with_capacity(nt * nu * nk);
    let d = &instance.demands;
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let row = (t * nu + n) * nk + k;
                let (din, dout) = (d.inbound[row], d.outbound[row]);
                let out = &mut data[row * block..(row + 1) * block];
                let set = table.set(k, n);
                n_valid.push(set.n_valid() as u16);
                for p in 0..p_count {
                    let w = &set.weights[p * el..(p + 1) * el];
                    for j in 0..el {
                        let caps = topo.edge(n, j);
                        let r = &mut out[(p * el + j) * INPUT_COLUMNS..(p * el + j + 1) * INPUT_COLUMNS];
                        r[0] = din * w[j];
                        r[1] = dout * w[j];
                        r[2] = caps.cap_basic;
                        r[3] = caps.cap_max;
                    }
                }
            }
        }
    }
    InputTensor { n_slots: nt, n_users: nu, n_types: nk, n_options: p_count, n_links: el, data, n_valid }
}

use super::topology::Topology;
use crate::error::{Error, Result};

/// The nonempty subsets of one admissible set, with their split ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionSet {
    /// Admissible global link indices, ascending.
    pub links: Vec<usize>,
    /// Link bitmask of each valid option, in binary-counting order over `links`.
    pub masks: Vec<u32>,
    /// `P x EL` row-major split ratios; rows past `masks.len()` are zero.
    pub weights: Vec<f64>,
}

impl OptionSet {
    pub fn n_valid(&self) -> usize {
        self.masks.len()
    }
}

/// Option encoding of every (type, user) pair.
///
/// For an admissible set of size `s` there are `2^s - 1` valid options.
/// Option `p` selects `links[b]` for every set bit `b` of `p + 1`, so with
/// two admissible links the options are `{e1}`, `{e2}`, `{e1, e2}`. Traffic
/// assigned to an option splits across its links in proportion to their
/// basic capacities. Tables are padded to `P = 2^EL - 1` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionTable {
    pub n_types: usize,
    pub n_users: usize,
    pub n_links: usize,
    /// Padded option count `P`.
    pub n_options: usize,
    /// Indexed `k * N + n`.
    pub sets: Vec<OptionSet>,
}

impl OptionTable {
    pub fn build(topology: &Topology) -> Result<Self> {
        let el = topology.n_links;
        if el == 0 || el > super::topology::MAX_LINKS {
            return Err(Error::InvalidTopology(format!("unsupported link count {el}")));
        }
        let n_options = (1usize << el) - 1;
        let mut sets = Vec::with_capacity(topology.n_types * topology.n_users);
        for (k, row) in topology.admissible.iter().enumerate() {
            for (n, &mask) in row.iter().enumerate() {
                let links: Vec<usize> = (0..el).filter(|&i| mask & (1 << i) != 0).collect();
                if links.is_empty() {
                    return Err(Error::InvalidTopology(format!("empty admissible set for type {k}, user {n}")));
                }
                let n_valid = (1usize << links.len()) - 1;
                let mut masks = Vec::with_capacity(n_valid);
                let mut weights = vec![0.0; n_options * el];
                for p in 0..n_valid {
                    let code = p + 1;
                    let selected: Vec<usize> =
                        links.iter().enumerate().filter(|(b, _)| code & (1 << b) != 0).map(|(_, &i)| i).collect();
                    let total: f64 = selected.iter().map(|&i| topology.edge_links[n][i].cap_basic).sum();
                    let row = &mut weights[p * el..(p + 1) * el];
                    for &i in &selected {
                        row[i] = topology.edge_links[n][i].cap_basic / total;
                    }
                    masks.push(selected.iter().fold(0u32, |m, &i| m | (1 << i)));
                }
                sets.push(OptionSet { links, masks, weights });
            }
        }
        Ok(OptionTable { n_types: topology.n_types, n_users: topology.n_users, n_links: el, n_options, sets })
    }

    #[inline]
    pub fn set(&self, k: usize, n: usize) -> &OptionSet {
        &self.sets[k * self.n_users + n]
    }

    #[inline]
    pub fn n_valid(&self, k: usize, n: usize) -> usize {
        self.set(k, n).masks.len()
    }

    /// Split ratios of option `p` for `(k, n)`, one entry per global link.
    #[inline]
    pub fn weights(&self, k: usize, n: usize, p: usize) -> &[f64] {
        let el = self.n_links;
        &self.set(k, n).weights[p * el..(p + 1) * el]
    }

    /// Option index of the subset `mask`, if it is a valid option of `(k, n)`.
    pub fn option_of_mask(&self, k: usize, n: usize, mask: u32) -> Option<usize> {
        self.set(k, n).masks.iter().position(|&m| m == mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinkCaps;

    fn topo(caps: &[f64], mask: u32) -> Topology {
        let el = caps.len();
        let link = |c: f64| LinkCaps { cap_basic: c, cap_max: 2.0 * c, cap_phys: 10_000.0, rate: 5.0 };
        Topology {
            n_users: 1,
            n_slots: 1,
            n_types: 1,
            n_links: el,
            edge_links: vec![caps.iter().map(|&c| link(c)).collect()],
            isp_links: caps.iter().map(|&c| link(c)).collect(),
            admissible: vec![vec![mask]],
        }
    }

    #[test]
    fn two_links_follow_binary_counting() {
        let t = topo(&[100.0, 300.0, 50.0, 70.0], 0b0011);
        let table = OptionTable::build(&t).unwrap();
        assert_eq!(table.n_options, 15);
        let set = table.set(0, 0);
        assert_eq!(set.masks, vec![0b01, 0b10, 0b11]);
        assert_eq!(table.weights(0, 0, 0), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(table.weights(0, 0, 1), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(table.weights(0, 0, 2), &[0.25, 0.75, 0.0, 0.0]);
        for p in 3..15 {
            assert!(table.weights(0, 0, p).iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn singleton_selects_its_link() {
        let t = topo(&[100.0, 300.0, 50.0, 70.0], 0b0100);
        let table = OptionTable::build(&t).unwrap();
        assert_eq!(table.n_valid(0, 0), 1);
        assert_eq!(table.weights(0, 0, 0), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn full_set_of_equal_links_splits_evenly() {
        let t = topo(&[100.0; 4], 0b1111);
        let table = OptionTable::build(&t).unwrap();
        assert_eq!(table.n_valid(0, 0), 15);
        assert_eq!(table.weights(0, 0, 14), &[0.25; 4]);
        // Brute force: enumerate subsets by bitmask and normalize by basic capacity sums.
        for mask in 1u32..16 {
            let p = table.option_of_mask(0, 0, mask).unwrap();
            let k = mask.count_ones() as f64;
            for i in 0..4 {
                let expected = if mask & (1 << i) != 0 { 1.0 / k } else { 0.0 };
                assert!((table.weights(0, 0, p)[i] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let t = topo(&[37.0, 411.0, 95.5, 12.25], 0b1011);
        let table = OptionTable::build(&t).unwrap();
        for p in 0..table.n_valid(0, 0) {
            let s: f64 = table.weights(0, 0, p).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_admissible_set_is_rejected() {
        let t = topo(&[100.0; 4], 0);
        assert!(matches!(OptionTable::build(&t), Err(Error::InvalidTopology(_))));
    }
}

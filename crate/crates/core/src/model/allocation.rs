use super::options::OptionTable;
use crate::error::{Error, Result};

/// One option index per (t, n, k) row, laid out `(t * N + n) * K + k`.
///
/// Because each index names a nonempty subset of the admissible set, the
/// "at least one link" and admissibility constraints hold by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationScheme {
    pub n_slots: usize,
    pub n_users: usize,
    pub n_types: usize,
    pub option: Vec<u16>,
}

impl AllocationScheme {
    pub fn uniform_option(n_slots: usize, n_users: usize, n_types: usize, p: u16) -> Self {
        AllocationScheme { n_slots, n_users, n_types, option: vec![p; n_slots * n_users * n_types] }
    }

    #[inline]
    pub fn row(&self, t: usize, n: usize, k: usize) -> usize {
        (t * self.n_users + n) * self.n_types + k
    }

    #[inline]
    pub fn get(&self, t: usize, n: usize, k: usize) -> usize {
        self.option[self.row(t, n, k)] as usize
    }

    /// One-hot soft allocation equal to this scheme.
    pub fn to_soft(&self, n_options: usize) -> SoftAllocation {
        let mut soft = SoftAllocation::zeros(self.n_slots, self.n_users, self.n_types, n_options);
        for (r, &p) in self.option.iter().enumerate() {
            soft.weights[r * n_options + p as usize] = 1.0;
        }
        soft
    }
}

/// Probability weights over option rows for every (t, n, k), row-major
/// `[(t * N + n) * K + k][p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAllocation {
    pub n_slots: usize,
    pub n_users: usize,
    pub n_types: usize,
    pub n_options: usize,
    pub weights: Vec<f64>,
}

impl SoftAllocation {
    pub fn zeros(n_slots: usize, n_users: usize, n_types: usize, n_options: usize) -> Self {
        SoftAllocation {
            n_slots,
            n_users,
            n_types,
            n_options,
            weights: vec![0.0; n_slots * n_users * n_types * n_options],
        }
    }

    #[inline]
    pub fn row_weights(&self, row: usize) -> &[f64] {
        &self.weights[row * self.n_options..(row + 1) * self.n_options]
    }
}

/// Anything that can be turned into per-link split fractions for each row.
pub trait Allocation {
    fn dims(&self) -> (usize, usize, usize);

    /// Checks dimensions and encoding against an option table.
    fn validate(&self, table: &OptionTable) -> Result<()>;

    /// Writes the fraction of row `row`'s demand carried by each global link.
    fn fractions(&self, table: &OptionTable, row: usize, k: usize, n: usize, out: &mut [f64]);
}

fn check_dims(found: (usize, usize, usize), table: &OptionTable) -> Result<()> {
    let (_, n, k) = found;
    if n != table.n_users || k != table.n_types {
        return Err(Error::Shape(format!(
            "allocation has N={n}, K={k} but topology has N={}, K={}",
            table.n_users, table.n_types
        )));
    }
    Ok(())
}

impl Allocation for AllocationScheme {
    fn dims(&self) -> (usize, usize, usize) {
        (self.n_slots, self.n_users, self.n_types)
    }

    fn validate(&self, table: &OptionTable) -> Result<()> {
        check_dims(self.dims(), table)?;
        if self.option.len() != self.n_slots * self.n_users * self.n_types {
            return Err(Error::Shape("scheme length does not match T*N*K".into()));
        }
        for t in 0..self.n_slots {
            for n in 0..self.n_users {
                for k in 0..self.n_types {
                    let p = self.get(t, n, k);
                    if p >= table.n_valid(k, n) {
                        return Err(Error::Shape(format!(
                            "option {p} at (t={t}, n={n}, k={k}) is not a valid option (only {} exist)",
                            table.n_valid(k, n)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn fractions(&self, table: &OptionTable, row: usize, k: usize, n: usize, out: &mut [f64]) {
        out.copy_from_slice(table.weights(k, n, self.option[row] as usize));
    }
}

impl Allocation for SoftAllocation {
    fn dims(&self) -> (usize, usize, usize) {
        (self.n_slots, self.n_users, self.n_types)
    }

    fn validate(&self, table: &OptionTable) -> Result<()> {
        check_dims(self.dims(), table)?;
        if self.n_options != table.n_options {
            return Err(Error::Shape(format!(
                "soft allocation has P={} but table has P={}",
                self.n_options, table.n_options
            )));
        }
        if self.weights.len() != self.n_slots * self.n_users * self.n_types * self.n_options {
            return Err(Error::Shape("soft allocation length does not match T*N*K*P".into()));
        }
        Ok(())
    }

    #[inline]
    fn fractions(&self, table: &OptionTable, row: usize, k: usize, n: usize, out: &mut [f64]) {
        out.fill(0.0);
        let el = table.n_links;
        let set = table.set(k, n);
        for (p, &x) in self.row_weights(row).iter().enumerate().take(set.n_valid()) {
            if x != 0.0 {
                let w = &set.weights[p * el..(p + 1) * el];
                for (o, &wi) in out.iter_mut().zip(w) {
                    *o += x * wi;
                }
            }
        }
    }
}

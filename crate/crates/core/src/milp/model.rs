use std::collections::HashMap;

use crate::error::Result;
use crate::model::{exempt_slots, Instance, OptionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// A decision variable; continuous variables live in `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// `Σ coef·var  sense  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Where each variable family starts in [`MilpModel::variables`].
///
/// Edge families are indexed `(n·EL + i)·T + t` (per-slot) or `n·EL + i`,
/// ISP families `i·T + t` or `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpLayout {
    pub n_slots: usize,
    pub n_users: usize,
    pub n_types: usize,
    pub n_links: usize,
    /// First `lam` variable of each demand row; row `r` owns
    /// `n_valid[r]` consecutive variables.
    pub lambda_start: Vec<usize>,
    pub n_valid: Vec<u16>,
    pub edge_in: usize,
    pub edge_out: usize,
    pub isp_in: usize,
    pub isp_out: usize,
    pub u_edge_in: usize,
    pub u_edge_out: usize,
    pub u_isp_in: usize,
    pub u_isp_out: usize,
    pub z_edge: usize,
    pub z_isp: usize,
    pub w_edge: usize,
    pub w_isp: usize,
}

impl MilpLayout {
    #[inline]
    pub fn edge_slot(&self, n: usize, i: usize, t: usize) -> usize {
        (n * self.n_links + i) * self.n_slots + t
    }

    #[inline]
    pub fn isp_slot(&self, i: usize, t: usize) -> usize {
        i * self.n_slots + t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimized linear objective.
    pub objective: Vec<(usize, f64)>,
    pub layout: MilpLayout,
    /// Instance identifier, echoed in exported files.
    pub instance_id: String,
}

impl MilpModel {
    pub fn n_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    /// Map from variable name to index.
    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Names of constraints (and integrality or sign conditions) violated by
    /// `values` beyond `tol`, scaled by the magnitude of each row.
    pub fn violated(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (var, v) in self.variables.iter().zip(values) {
            let bad = match var.kind {
                VarKind::Binary => (v - v.round()).abs() > tol || !(-tol..=1.0 + tol).contains(v),
                VarKind::Continuous => *v < -tol,
            };
            if bad {
                out.push(var.name.clone());
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v]).sum();
            let scale = c.terms.iter().map(|&(v, a)| (a * values[v]).abs()).fold(c.rhs.abs(), f64::max).max(1.0);
            let slack = tol * scale;
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + slack,
                Sense::Ge => lhs >= c.rhs - slack,
                Sense::Eq => (lhs - c.rhs).abs() <= slack,
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }
}

struct Builder {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind) -> usize {
        self.variables.push(Variable { name, kind });
        self.variables.len() - 1
    }

    fn row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { name, terms, sense, rhs });
    }
}

/// Builds the linearized model of an instance.
pub fn linearize(instance: &Instance) -> Result<MilpModel> {
    instance.validate()?;
    let table = OptionTable::build(&instance.topology)?;
    let topo = &instance.topology;
    let (nt, nu, nk, el) = (topo.n_slots, topo.n_users, topo.n_types, topo.n_links);
    let d = &instance.demands;
    let mut b = Builder { variables: Vec::new(), constraints: Vec::new() };

    let mut lambda_start = Vec::with_capacity(nt * nu * nk);
    let mut n_valid = Vec::with_capacity(nt * nu * nk);
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let s = table.n_valid(k, n);
                lambda_start.push(b.variables.len());
                n_valid.push(s as u16);
                for p in 0..s {
                    b.var(format!("lam_t{t}_n{n}_k{k}_p{p}"), VarKind::Binary);
                }
            }
        }
    }
    let edge_block = |b: &mut Builder, prefix: &str, kind: VarKind| {
        let start = b.variables.len();
        for n in 0..nu {
            for i in 0..el {
                for t in 0..nt {
                    b.var(format!("{prefix}_n{n}_i{i}_t{t}"), kind);
                }
            }
        }
        start
    };
    let isp_block = |b: &mut Builder, prefix: &str, kind: VarKind| {
        let start = b.variables.len();
        for i in 0..el {
            for t in 0..nt {
                b.var(format!("{prefix}_i{i}_t{t}"), kind);
            }
        }
        start
    };
    let edge_in = edge_block(&mut b, "fei", VarKind::Continuous);
    let edge_out = edge_block(&mut b, "feo", VarKind::Continuous);
    let isp_in = isp_block(&mut b, "fli", VarKind::Continuous);
    let isp_out = isp_block(&mut b, "flo", VarKind::Continuous);
    let u_edge_in = edge_block(&mut b, "uei", VarKind::Binary);
    let u_edge_out = edge_block(&mut b, "ueo", VarKind::Binary);
    let u_isp_in = isp_block(&mut b, "uli", VarKind::Binary);
    let u_isp_out = isp_block(&mut b, "ulo", VarKind::Binary);
    let per_link = |b: &mut Builder, edge: &str, isp: &str| {
        let start_e = b.variables.len();
        for n in 0..nu {
            for i in 0..el {
                b.var(format!("{edge}_n{n}_i{i}"), VarKind::Continuous);
            }
        }
        let start_l = b.variables.len();
        for i in 0..el {
            b.var(format!("{isp}_i{i}"), VarKind::Continuous);
        }
        (start_e, start_l)
    };
    let (z_edge, z_isp) = per_link(&mut b, "ze", "zl");
    let (w_edge, w_isp) = per_link(&mut b, "we", "wl");
    let layout = MilpLayout {
        n_slots: nt,
        n_users: nu,
        n_types: nk,
        n_links: el,
        lambda_start,
        n_valid,
        edge_in,
        edge_out,
        isp_in,
        isp_out,
        u_edge_in,
        u_edge_out,
        u_isp_in,
        u_isp_out,
        z_edge,
        z_isp,
        w_edge,
        w_isp,
    };

    // One option per demand.
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let row = (t * nu + n) * nk + k;
                let start = layout.lambda_start[row];
                let terms = (0..layout.n_valid[row] as usize).map(|p| (start + p, 1.0)).collect();
                b.row(format!("assign_t{t}_n{n}_k{k}"), terms, Sense::Eq, 1.0);
            }
        }
    }
    // Edge flows as linear functions of the option binaries.
    for n in 0..nu {
        for i in 0..el {
            for t in 0..nt {
                let slot = layout.edge_slot(n, i, t);
                let mut t_in = vec![(edge_in + slot, 1.0)];
                let mut t_out = vec![(edge_out + slot, 1.0)];
                for k in 0..nk {
                    let row = (t * nu + n) * nk + k;
                    for p in 0..layout.n_valid[row] as usize {
                        let w = table.weights(k, n, p)[i];
                        if w == 0.0 {
                            continue;
                        }
                        let var = layout.lambda_start[row] + p;
                        if d.inbound[row] != 0.0 {
                            t_in.push((var, -d.inbound[row] * w));
                        }
                        if d.outbound[row] != 0.0 {
                            t_out.push((var, -d.outbound[row] * w));
                        }
                    }
                }
                b.row(format!("flow_in_n{n}_i{i}_t{t}"), t_in, Sense::Eq, 0.0);
                b.row(format!("flow_out_n{n}_i{i}_t{t}"), t_out, Sense::Eq, 0.0);
            }
        }
    }
    // ISP flows aggregate edge flows.
    for i in 0..el {
        for t in 0..nt {
            let slot = layout.isp_slot(i, t);
            for (dir, isp, edge) in [("in", isp_in, edge_in), ("out", isp_out, edge_out)] {
                let mut terms = vec![(isp + slot, 1.0)];
                terms.extend((0..nu).map(|n| (edge + layout.edge_slot(n, i, t), -1.0)));
                b.row(format!("isp_{dir}_i{i}_t{t}"), terms, Sense::Eq, 0.0);
            }
        }
    }
    let budget = exempt_slots(nt) as f64;
    // Percentile machinery, one entry per (link, direction) series.
    struct Series {
        tag: String,
        flow: usize,
        u: usize,
        z: usize,
        cap_max: f64,
        cap_phys: f64,
    }
    let mut series = Vec::new();
    for n in 0..nu {
        for i in 0..el {
            let caps = topo.edge(n, i);
            for (dir, flow, u) in [("in", edge_in, u_edge_in), ("out", edge_out, u_edge_out)] {
                series.push(Series {
                    tag: format!("e{dir}_n{n}_i{i}"),
                    flow: flow + layout.edge_slot(n, i, 0),
                    u: u + layout.edge_slot(n, i, 0),
                    z: z_edge + n * el + i,
                    cap_max: caps.cap_max,
                    cap_phys: caps.cap_phys,
                });
            }
        }
    }
    for (i, caps) in topo.isp_links.iter().enumerate() {
        for (dir, flow, u) in [("in", isp_in, u_isp_in), ("out", isp_out, u_isp_out)] {
            series.push(Series {
                tag: format!("l{dir}_i{i}"),
                flow: flow + layout.isp_slot(i, 0),
                u: u + layout.isp_slot(i, 0),
                z: z_isp + i,
                cap_max: caps.cap_max,
                cap_phys: caps.cap_phys,
            });
        }
    }
    for s in &series {
        b.row(format!("budget_{}", s.tag), (0..nt).map(|t| (s.u + t, 1.0)).collect(), Sense::Le, budget);
    }
    for s in &series {
        for t in 0..nt {
            // z >= f - c_phys·u
            b.row(
                format!("bill_{}_t{t}", s.tag),
                vec![(s.z, 1.0), (s.flow + t, -1.0), (s.u + t, s.cap_phys)],
                Sense::Ge,
                0.0,
            );
        }
    }
    for s in &series {
        for t in 0..nt {
            // f <= c_max·(1 - u) + c_phys·u
            b.row(
                format!("cap_{}_t{t}", s.tag),
                vec![(s.flow + t, 1.0), (s.u + t, s.cap_max - s.cap_phys)],
                Sense::Le,
                s.cap_max,
            );
        }
    }
    let mut objective = Vec::with_capacity(nu * el + el);
    let links = (0..nu)
        .flat_map(|n| (0..el).map(move |i| (format!("e_n{n}_i{i}"), z_edge + n * el + i, w_edge + n * el + i)))
        .chain((0..el).map(|i| (format!("l_i{i}"), z_isp + i, w_isp + i)))
        .collect::<Vec<_>>();
    for (j, (tag, z, w)) in links.iter().enumerate() {
        let caps = if j < nu * el { topo.edge(j / el, j % el) } else { &topo.isp_links[j - nu * el] };
        b.row(format!("zcap_{tag}"), vec![(*z, 1.0)], Sense::Le, caps.cap_max);
        b.row(format!("over_{tag}"), vec![(*w, 1.0), (*z, -1.0)], Sense::Ge, -caps.cap_basic);
        objective.push((*w, caps.rate));
    }
    Ok(MilpModel {
        variables: b.variables,
        constraints: b.constraints,
        objective,
        layout,
        instance_id: instance.id.clone(),
    })
}

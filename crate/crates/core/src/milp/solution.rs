use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::model::{linearize, MilpModel, VarKind};
use crate::error::{Error, Result};
use crate::model::{compute_flows, exempt_slots, Allocation, AllocationScheme, Instance, OptionTable};

/// Relative tolerance between a reported objective and the recomputed cost.
const OBJECTIVE_RTOL: f64 = 1e-4;
/// Maximum distance of a binary value from 0 or 1.
const BINARY_TOL: f64 = 1e-6;

/// Slots exempted by the percentile: the `floor(0.05·T)` largest samples,
/// ties resolved towards the lowest slot index.
fn exempt_set(series: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by(|&a, &b| series[b].total_cmp(&series[a]));
    order.truncate(exempt_slots(series.len()));
    order
}

/// Full variable assignment realizing `scheme`: one-hot `lam`, the induced
/// flows, exemptions on each series' top samples, billables and overages.
pub fn assignment_for_scheme(model: &MilpModel, instance: &Instance, scheme: &AllocationScheme) -> Result<Vec<f64>> {
    let table = OptionTable::build(&instance.topology)?;
    scheme.validate(&table)?;
    let l = &model.layout;
    let topo = &instance.topology;
    if (l.n_slots, l.n_users, l.n_types, l.n_links) != (topo.n_slots, topo.n_users, topo.n_types, topo.n_links)
        || scheme.option.len() != l.lambda_start.len()
    {
        return Err(Error::Shape("scheme, model and instance dimensions differ".into()));
    }
    let flows = compute_flows(instance, &table, scheme)?;
    let mut x = vec![0.0; model.variables.len()];
    for (row, &p) in scheme.option.iter().enumerate() {
        x[l.lambda_start[row] + p as usize] = 1.0;
    }
    let (nt, el) = (l.n_slots, l.n_links);
    for n in 0..l.n_users {
        for i in 0..el {
            let base = l.edge_slot(n, i, 0);
            for (flow, u, series) in [
                (l.edge_in, l.u_edge_in, flows.edge_series_in(n, i)),
                (l.edge_out, l.u_edge_out, flows.edge_series_out(n, i)),
            ] {
                x[flow + base..flow + base + nt].copy_from_slice(series);
                for t in exempt_set(series) {
                    x[u + base + t] = 1.0;
                }
            }
            let caps = topo.edge(n, i);
            let z = flows.z_edge[n * el + i];
            x[l.z_edge + n * el + i] = z;
            x[l.w_edge + n * el + i] = (z - caps.cap_basic).max(0.0);
        }
    }
    for (i, caps) in topo.isp_links.iter().enumerate() {
        let base = l.isp_slot(i, 0);
        for (flow, u, series) in
            [(l.isp_in, l.u_isp_in, flows.isp_series_in(i)), (l.isp_out, l.u_isp_out, flows.isp_series_out(i))]
        {
            x[flow + base..flow + base + nt].copy_from_slice(series);
            for t in exempt_set(series) {
                x[u + base + t] = 1.0;
            }
        }
        let z = flows.z_isp[i];
        x[l.z_isp + i] = z;
        x[l.w_isp + i] = (z - caps.cap_basic).max(0.0);
    }
    Ok(x)
}

/// Start file for `scheme`: objective header plus one `name value` line per
/// variable, binaries included.
pub fn write_warmstart(model: &MilpModel, instance: &Instance, scheme: &AllocationScheme) -> Result<String> {
    let x = assignment_for_scheme(model, instance, scheme)?;
    let mut out = String::from("# MIP start\n");
    let _ = writeln!(out, "# Objective value = {}", model.objective_value(&x));
    for (var, v) in model.variables.iter().zip(&x) {
        let _ = writeln!(out, "{} {}", var.name, v);
    }
    Ok(out)
}

pub fn write_warmstart_file(
    model: &MilpModel,
    instance: &Instance,
    scheme: &AllocationScheme,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_warmstart(model, instance, scheme)?).map_err(|e| Error::io(path, e))
}

/// A verified solution read back from a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionImport {
    pub scheme: AllocationScheme,
    pub reported_objective: f64,
    /// Cost of the decoded scheme.
    pub cost: f64,
}

fn parse_solution_text(text: &str) -> Result<(Option<f64>, HashMap<String, f64>)> {
    let mut objective = None;
    let mut values = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim().eq_ignore_ascii_case("objective value") {
                    let v = value.trim().parse::<f64>().map_err(|_| {
                        Error::format(format!("solution line {}", lineno + 1), format!("bad objective {value:?}"))
                    })?;
                    objective = Some(v);
                }
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::format(
                format!("solution line {}", lineno + 1),
                format!("expected `name value`, got {line:?}"),
            ));
        };
        let v = value
            .parse::<f64>()
            .map_err(|_| Error::format(format!("solution line {}", lineno + 1), format!("bad value {value:?}")))?;
        values.insert(name.to_string(), v);
    }
    Ok((objective, values))
}

/// Decodes a solver solution into a scheme and verifies its objective.
///
/// Every option binary must be present; all binaries present must be within
/// `1e-6` of 0 or 1; each demand must select exactly one option; and the
/// decoded scheme's cost must match the reported objective to `1e-4`
/// relative.
pub fn read_solution(text: &str, instance: &Instance) -> Result<SolutionImport> {
    let (objective, values) = parse_solution_text(text)?;
    let model = linearize(instance)?;
    for var in model.variables.iter().filter(|v| v.kind == VarKind::Binary) {
        if let Some(&v) = values.get(&var.name) {
            if (v - v.round()).abs() > BINARY_TOL || !(-BINARY_TOL..=1.0 + BINARY_TOL).contains(&v) {
                return Err(Error::Verification(format!("binary {} has fractional value {v}", var.name)));
            }
        }
    }
    let l = &model.layout;
    let mut option = Vec::with_capacity(l.lambda_start.len());
    for (row, (&start, &s)) in l.lambda_start.iter().zip(&l.n_valid).enumerate() {
        let mut chosen = None;
        for p in 0..s as usize {
            let name = &model.variables[start + p].name;
            let v =
                *values.get(name).ok_or_else(|| Error::format("solution file", format!("missing variable {name}")))?;
            if v >= 0.5 {
                if chosen.is_some() {
                    return Err(Error::Verification(format!("demand row {row} selects more than one option")));
                }
                chosen = Some(p as u16);
            }
        }
        option.push(chosen.ok_or_else(|| Error::Verification(format!("demand row {row} selects no option")))?);
    }
    let scheme = AllocationScheme { n_slots: l.n_slots, n_users: l.n_users, n_types: l.n_types, option };
    let reported_objective = objective.ok_or_else(|| Error::format("solution file", "missing objective header"))?;
    let table = OptionTable::build(&instance.topology)?;
    let cost = compute_flows(instance, &table, &scheme)?.cost_total;
    if (cost - reported_objective).abs() > OBJECTIVE_RTOL * reported_objective.abs().max(1.0) {
        return Err(Error::Verification(format!(
            "reported objective {reported_objective} differs from recomputed cost {cost}"
        )));
    }
    Ok(SolutionImport { scheme, reported_objective, cost })
}

pub fn read_solution_file(path: impl AsRef<Path>, instance: &Instance) -> Result<SolutionImport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_solution(&text, instance)
}

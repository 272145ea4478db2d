//! Machine- and human-readable renderings of analysis results.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::chain::{ChainResult, ChainSpec, RedundancyVector};
use crate::mugf::PerfVector;
use crate::optimizer::{DemandRow, Evaluation, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub g: PerfVector,
    pub p: f64,
}

/// Summary of one evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub config: RedundancyVector,
    pub demand: PerfVector,
    pub availability: f64,
    pub unavailability: f64,
    pub cost: f64,
    /// Joint state count, as a decimal string (it overflows 64 bits).
    pub state_space: String,
    pub term_count: usize,
    pub acceptable_mass: f64,
    pub acceptable_terms: Vec<Term>,
}

impl AnalysisReport {
    pub fn new(spec: &ChainSpec, l: &RedundancyVector, result: &ChainResult) -> Self {
        let acceptable_terms: Vec<Term> = result
            .distribution
            .acceptable_terms(&spec.demand)
            .map(|(g, p)| Term { g: g.clone(), p })
            .collect();
        Self {
            config: l.clone(),
            demand: spec.demand.clone(),
            availability: result.availability,
            unavailability: 1.0 - result.availability,
            cost: result.cost,
            state_space: result.state_space.to_string(),
            term_count: result.distribution.len(),
            acceptable_mass: acceptable_terms.iter().map(|t| t.p).sum(),
            acceptable_terms,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "configuration      {}", self.config);
        let _ = writeln!(s, "demand             {}", self.demand);
        let _ = writeln!(s, "availability       {:.12}", self.availability);
        let _ = writeln!(s, "unavailability     {:.6e}", self.unavailability);
        let _ = writeln!(s, "cost               {}", self.cost);
        let _ = writeln!(s, "joint states J     {} (~{:.2e})", self.state_space, approx(&self.state_space));
        let _ = writeln!(s, "distinct terms     {}", self.term_count);
        let _ = writeln!(s, "acceptable terms   {}", self.acceptable_terms.len());
        for t in &self.acceptable_terms {
            let _ = writeln!(s, "  {:<24} {:.4e}", t.g.to_string(), t.p);
        }
        s
    }
}

fn approx(decimal: &str) -> f64 {
    decimal.parse().unwrap_or(f64::INFINITY)
}

/// One CSV row per evaluated configuration.
pub fn write_evaluations_csv<W: Write>(evaluations: &[Evaluation], mut out: W) -> io::Result<()> {
    writeln!(out, "l,cost,availability,unavailability,feasible")?;
    for e in evaluations {
        let l: Vec<String> = e.l.0.iter().map(u32::to_string).collect();
        writeln!(
            out,
            "{},{},{:.15},{:.12e},{}",
            l.join(" "),
            e.cost,
            e.availability,
            1.0 - e.availability,
            e.feasible
        )?;
    }
    Ok(())
}

pub fn outcome_text(outcome: &Outcome) -> String {
    let mut s = String::new();
    match outcome {
        Outcome::Optimal(r) => {
            let _ = writeln!(s, "target             {}", r.target);
            let _ = writeln!(s, "evaluated          {}", r.evaluated_count);
            let _ = writeln!(s, "feasible           {}", r.feasible_count);
            let _ = writeln!(s, "minimal cost       {}", r.min_cost);
            let _ = writeln!(s, "optima             {}", r.optima.len());
            for (l, a) in r.optima.iter().zip(&r.availabilities) {
                let _ = writeln!(s, "  {:<18} A = {:.12}  U = {:.4e}", l.to_string(), a, 1.0 - a);
            }
        }
        Outcome::Infeasible(r) => {
            let _ = writeln!(s, "target             {}", r.target);
            let _ = writeln!(s, "evaluated          {}", r.evaluated_count);
            let _ = writeln!(s, "INFEASIBLE: best configuration {} reaches A = {:.12}", r.best, r.best_availability);
        }
    }
    s
}

pub fn demand_rows_text(rows: &[DemandRow]) -> String {
    let mut s = String::new();
    for row in rows {
        match &row.outcome {
            Outcome::Optimal(r) => {
                let optima: Vec<String> = r.optima.iter().map(ToString::to_string).collect();
                let _ = writeln!(
                    s,
                    "w = {:<16} cost {:<4} A = {:.12}  optima {}",
                    row.demand.to_string(),
                    r.min_cost,
                    r.availabilities[0],
                    optima.join(" ")
                );
            }
            Outcome::Infeasible(r) => {
                let _ = writeln!(s, "w = {:<16} infeasible (best {} A = {:.12})", row.demand.to_string(), r.best, r.best_availability);
            }
        }
    }
    s
}

//! One-parameter sensitivity of chain availability to failure and repair
//! rates, and threshold search for the rate at which a target is lost.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{evaluate_chain, ChainSpec, RedundancyVector};
use crate::error::{Error, Result};

/// Relative width at which threshold bisection stops.
pub const THRESHOLD_RELATIVE_WIDTH: f64 = 1e-4;
/// Thresholds are searched within `[nominal / F, nominal · F]`.
pub const BRACKET_FACTOR: f64 = 100.0;

/// A swept rate. `LambdaS` and `MuS` move every tenant's software rate
/// jointly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    LambdaS,
    MuS,
    LambdaV,
    MuV,
    LambdaH,
    MuH,
}

/// Unit of the reciprocal (mean time) representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanUnit {
    Hours,
    Minutes,
}

impl HumanUnit {
    pub fn seconds(self) -> f64 {
        match self {
            HumanUnit::Hours => 3600.0,
            HumanUnit::Minutes => 60.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HumanUnit::Hours => "hours",
            HumanUnit::Minutes => "minutes",
        }
    }
}

impl Parameter {
    pub const ALL: [Parameter; 6] = [
        Parameter::LambdaS,
        Parameter::MuS,
        Parameter::LambdaV,
        Parameter::MuV,
        Parameter::LambdaH,
        Parameter::MuH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::LambdaS => "lambda_s",
            Parameter::MuS => "mu_s",
            Parameter::LambdaV => "lambda_v",
            Parameter::MuV => "mu_v",
            Parameter::LambdaH => "lambda_h",
            Parameter::MuH => "mu_h",
        }
    }

    pub fn is_failure_rate(self) -> bool {
        matches!(self, Parameter::LambdaS | Parameter::LambdaV | Parameter::LambdaH)
    }

    /// Mean time between failures in hours; repair times in minutes, except
    /// hardware repair in hours.
    pub fn human_unit(self) -> HumanUnit {
        match self {
            Parameter::MuS | Parameter::MuV => HumanUnit::Minutes,
            _ => HumanUnit::Hours,
        }
    }

    /// Rate per second to mean time in [`Self::human_unit`].
    pub fn to_human(self, per_second: f64) -> f64 {
        1.0 / (per_second * self.human_unit().seconds())
    }

    pub fn from_human(self, mean_time: f64) -> f64 {
        1.0 / (mean_time * self.human_unit().seconds())
    }

    /// Nominal value, read from the first subsystem's node.
    pub fn nominal(self, spec: &ChainSpec) -> f64 {
        let r = &spec.subsystems[0].node.rates;
        match self {
            Parameter::LambdaS => r.lambda_s[0],
            Parameter::MuS => r.mu_s[0],
            Parameter::LambdaV => r.lambda_v,
            Parameter::MuV => r.mu_v,
            Parameter::LambdaH => r.lambda_h,
            Parameter::MuH => r.mu_h,
        }
    }

    /// The chain with this rate set to `value` on every node.
    pub fn apply(self, spec: &ChainSpec, value: f64) -> ChainSpec {
        spec.map_nodes(|node| {
            let mut node = node.clone();
            let r = &mut node.rates;
            match self {
                Parameter::LambdaS => r.lambda_s.iter_mut().for_each(|x| *x = value),
                Parameter::MuS => r.mu_s.iter_mut().for_each(|x| *x = value),
                Parameter::LambdaV => r.lambda_v = value,
                Parameter::MuV => r.mu_v = value,
                Parameter::LambdaH => r.lambda_h = value,
                Parameter::MuH => r.mu_h = value,
            }
            node
        })
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: Parameter,
    /// Rates per second, strictly increasing.
    pub values: Vec<f64>,
    pub config: RedundancyVector,
    pub target: f64,
}

impl SweepSpec {
    /// Builds a sweep from mean times in the parameter's human unit.
    pub fn from_mean_times(
        parameter: Parameter,
        mean_times: &[f64],
        config: RedundancyVector,
        target: f64,
    ) -> Result<Self> {
        let mut values: Vec<f64> = mean_times.iter().map(|&t| parameter.from_human(t)).collect();
        values.sort_by(f64::total_cmp);
        let spec = Self { parameter, values, config, target };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidSweep("no values".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidSweep(format!("value {v} is not a positive rate")));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSweep("values must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub parameter: Parameter,
    pub value_per_second: f64,
    pub value_human: f64,
    pub unit: HumanUnit,
    pub availability: f64,
    pub unavailability: f64,
}

/// Evaluates the chain at each swept value, all other rates nominal.
pub fn sweep(spec: &ChainSpec, sweep: &SweepSpec) -> Result<Vec<SweepPoint>> {
    sweep.validate()?;
    spec.check_redundancy(&sweep.config)?;
    let p = sweep.parameter;
    sweep
        .values
        .par_iter()
        .map(|&v| {
            let availability = evaluate_chain(&p.apply(spec, v), &sweep.config)?.availability;
            Ok(SweepPoint {
                parameter: p,
                value_per_second: v,
                value_human: p.to_human(v),
                unit: p.human_unit(),
                availability,
                unavailability: 1.0 - availability,
            })
        })
        .collect()
}

/// Log-spaced sweep values between two mean times (inclusive).
pub fn log_spaced(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![from];
    }
    let (a, b) = (from.ln(), to.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// Rate at which availability falls to the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub parameter: Parameter,
    pub per_second: f64,
    pub human: f64,
    pub unit: HumanUnit,
    /// Availability at the returned rate (on the feasible side).
    pub availability: f64,
}

/// Bisects, in log space, between the nominal rate and the bracket edge in
/// the degrading direction (higher failure rate, lower repair rate).
pub fn find_threshold(
    spec: &ChainSpec,
    l: &RedundancyVector,
    parameter: Parameter,
    target: f64,
) -> Result<Threshold> {
    let eval = |rate: f64| -> Result<f64> { Ok(evaluate_chain(&parameter.apply(spec, rate), l)?.availability) };
    let nominal = parameter.nominal(spec);
    let (low, high) = (nominal / BRACKET_FACTOR, nominal * BRACKET_FACTOR);
    let edge = if parameter.is_failure_rate() { high } else { low };

    let at_nominal = eval(nominal)?;
    if at_nominal < target {
        return Err(Error::InvalidSweep(format!(
            "availability {at_nominal} at nominal {parameter} is already below {target}"
        )));
    }
    if eval(edge)? >= target {
        return Err(Error::NotBracketed { target, low, high });
    }

    let (mut good, mut bad) = (nominal.ln(), edge.ln());
    let mut good_availability = at_nominal;
    let stop = THRESHOLD_RELATIVE_WIDTH.ln_1p();
    while (bad - good).abs() > stop {
        let mid = 0.5 * (good + bad);
        let a = eval(mid.exp())?;
        if a >= target {
            good = mid;
            good_availability = a;
        } else {
            bad = mid;
        }
    }
    let per_second = good.exp();
    Ok(Threshold {
        parameter,
        per_second,
        human: parameter.to_human(per_second),
        unit: parameter.human_unit(),
        availability: good_availability,
    })
}

/// Writes sweep points as CSV with a header row.
pub fn write_csv<W: Write>(points: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "parameter,value_per_second,value_human,unit,availability,unavailability")?;
    for p in points {
        writeln!(
            out,
            "{},{:.12e},{:.12e},{},{:.15},{:.12e}",
            p.parameter,
            p.value_per_second,
            p.value_human,
            p.unit.as_str(),
            p.availability,
            p.unavailability
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_names_round_trip() {
        for p in Parameter::ALL {
            assert_eq!(p.name().parse::<Parameter>().unwrap(), p);
        }
        assert_eq!("mu_x".parse::<Parameter>(), Err(Error::UnknownParameter("mu_x".into())));
    }

    #[test]
    fn human_units() {
        let p = Parameter::LambdaS;
        assert!((p.to_human(1.0 / (175.0 * 3600.0)) - 175.0).abs() < 1e-9);
        assert_eq!(Parameter::MuS.human_unit(), HumanUnit::Minutes);
        assert_eq!(Parameter::MuH.human_unit(), HumanUnit::Hours);
        let t = 105.0;
        assert!((Parameter::MuV.to_human(Parameter::MuV.from_human(t)) - t).abs() < 1e-12);
    }

    #[test]
    fn sweep_values_must_be_sorted_and_positive() {
        let l = RedundancyVector(vec![1]);
        let bad = SweepSpec { parameter: Parameter::MuV, values: vec![2.0, 1.0], config: l.clone(), target: 0.5 };
        assert!(bad.validate().is_err());
        let bad = SweepSpec { parameter: Parameter::MuV, values: vec![0.0, 1.0], config: l.clone(), target: 0.5 };
        assert!(bad.validate().is_err());
        let ok = SweepSpec::from_mean_times(Parameter::MuV, &[60.0, 120.0, 90.0], l, 0.5).unwrap();
        assert!(ok.values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn log_spacing_hits_endpoints() {
        let v = log_spaced(10.0, 1000.0, 3);
        assert!((v[0] - 10.0).abs() < 1e-12 && (v[1] - 100.0).abs() < 1e-9 && (v[2] - 1000.0).abs() < 1e-9);
    }
}

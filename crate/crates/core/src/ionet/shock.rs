use serde::Serialize;

use crate::diagnostics::{det_check_warning, eigendecompose};
use crate::error::{Error, Result};
use crate::ionet::ShareMatrix;
use crate::linalg::ComplexLu;
use crate::matrix::ComplexScalar;
use crate::policy::TolerancePolicy;
use crate::spectral::Spectrum;

/// Initial deviations by sector name, and the number of steps to simulate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShockScenario {
    pub shocked_sectors: Vec<(String, f64)>,
    pub horizon: usize,
}

impl ShockScenario {
    pub fn new(shocked_sectors: Vec<(String, f64)>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Scenario("horizon must be at least 1".into()));
        }
        if let Some((name, v)) = shocked_sectors.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Scenario(format!("shock to {name:?} is not finite ({v})")));
        }
        Ok(Self {
            shocked_sectors,
            horizon,
        })
    }

    /// Parses `sector=magnitude`.
    pub fn parse_shock(spec: &str) -> Result<(String, f64)> {
        let (name, value) = spec
            .rsplit_once('=')
            .ok_or_else(|| Error::Scenario(format!("expected sector=magnitude, got {spec:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Scenario(format!("magnitude {value:?} is not a number")))?;
        Ok((name.trim().to_string(), v))
    }

    fn initial_state(&self, m: &ShareMatrix) -> Result<Vec<f64>> {
        let mut x = vec![0.0; m.len()];
        for (name, v) in &self.shocked_sectors {
            let i = m
                .sector_names
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Scenario(format!("unknown sector {name:?}")))?;
            x[i] += v;
        }
        Ok(x)
    }
}

/// One eigenvector direction of the initial shock.
#[derive(Clone, Debug, Serialize)]
pub struct Mode {
    pub eigenvalue: ComplexScalar,
    pub modulus: f64,
    /// Coefficient of the initial deviation on this mode.
    pub coefficient: ComplexScalar,
    /// `ln 2 / -ln|lambda|` steps. `0` for `lambda = 0`, `None` when the mode
    /// does not decay.
    pub half_life: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShockReport {
    pub sector_names: Vec<String>,
    /// `horizon + 1` states, starting with the initial deviation.
    pub trajectory: Vec<Vec<f64>>,
    /// Absent for direct-only simulations.
    pub modes: Option<Vec<Mode>>,
    /// `max_t ||modal_t - direct_t|| / max_t ||direct_t||`.
    pub modal_relative_error: Option<f64>,
    pub spectral_radius: f64,
    pub warnings: Vec<String>,
}

/// Half-life of a mode with eigenvalue modulus `r`.
pub fn half_life(r: f64) -> Option<f64> {
    if r == 0.0 {
        Some(0.0)
    } else if r < 1.0 {
        Some(std::f64::consts::LN_2 / -r.ln())
    } else {
        None
    }
}

/// Iterates `x_{t+1} = A x_t` and decomposes the initial deviation on the
/// eigenbasis of `A`.
///
/// Fails unless `A` is certified diagonalizable: without an eigenbasis there
/// are no modes to decompose into.
pub fn simulate_shock(m: &ShareMatrix, scenario: &ShockScenario, policy: &TolerancePolicy) -> Result<ShockReport> {
    let x0 = scenario.initial_state(m)?;
    let basis = eigendecompose(&m.a, policy, false)?;
    let trajectory = iterate(m, x0.clone(), scenario.horizon);

    let lu = ComplexLu::new(&basis.vectors, 0.0);
    let c = lu.solve_vec(&x0.iter().map(|&v| ComplexScalar::new(v, 0.0)).collect::<Vec<_>>());
    let n = m.len();
    let mut worst: f64 = 0.0;
    let mut largest: f64 = 0.0;
    let mut powers = vec![ComplexScalar::new(1.0, 0.0); n];
    for x in &trajectory {
        let mut err = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let modal: ComplexScalar = (0..n).map(|k| c[k] * powers[k] * basis.vectors[(i, k)]).sum();
            err += (modal.re - xi).powi(2);
        }
        worst = worst.max(err.sqrt());
        largest = largest.max(norm(x));
        for (p, l) in powers.iter_mut().zip(&basis.eigenvalues) {
            *p *= l;
        }
    }
    let relative = if largest > 0.0 { worst / largest } else { worst };

    let modes: Vec<Mode> = basis
        .eigenvalues
        .iter()
        .zip(&c)
        .map(|(&l, &coefficient)| Mode {
            eigenvalue: l,
            modulus: l.norm(),
            coefficient,
            half_life: half_life(l.norm()),
        })
        .collect();
    let radius = modes.iter().fold(0.0, |r: f64, m| r.max(m.modulus));

    let mut warnings = m.warnings.clone();
    warnings.extend(basis.verdict.warnings.iter().cloned());
    let det = det_check_warning(&basis);
    if det.inconclusive {
        warnings.push(det.message);
    }
    push_radius_warning(&mut warnings, radius);
    Ok(ShockReport {
        sector_names: m.sector_names.clone(),
        trajectory,
        modes: Some(modes),
        modal_relative_error: Some(relative),
        spectral_radius: radius,
        warnings,
    })
}

/// Direct iteration only, for matrices without a usable eigenbasis.
pub fn simulate_direct(m: &ShareMatrix, scenario: &ShockScenario, policy: &TolerancePolicy) -> Result<ShockReport> {
    let x0 = scenario.initial_state(m)?;
    let radius = Spectrum::of(&m.a, policy)?.spectral_radius();
    let mut warnings = m.warnings.clone();
    warnings.push("direct iteration only: no eigenbasis, so no modal decomposition or half-lives".into());
    push_radius_warning(&mut warnings, radius);
    Ok(ShockReport {
        sector_names: m.sector_names.clone(),
        trajectory: iterate(m, x0, scenario.horizon),
        modes: None,
        modal_relative_error: None,
        spectral_radius: radius,
        warnings,
    })
}

fn iterate(m: &ShareMatrix, x0: Vec<f64>, horizon: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(x0);
    for t in 0..horizon {
        let next = m.a.mul_vec(&out[t]);
        out.push(next);
    }
    out
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn push_radius_warning(warnings: &mut Vec<String>, radius: f64) {
    if radius >= 1.0 {
        warnings.push(format!(
            "spectral radius {radius:.6} >= 1: deviations do not decay and half-lives are infinite"
        ));
    }
}

use std::sync::Arc;

use serde::Serialize;

use crate::ensemble::ThermalEnsemble;
use crate::spectroscopy::{Protocol, ProtocolConfig, ProtocolPoint};
use crate::{Error, Result};

/// Denominators `P_g (1 - P_g)` below this are floored.
pub const PG_VARIANCE_FLOOR: f64 = 1e-12;
/// Below this slope a floored point is treated as the exact limit `F = 0`.
pub const SLOPE_FLOOR: f64 = 1e-9;

/// Fisher information query for `θ = Δν_s` (taken from the protocol's drive).
#[derive(Clone, Debug)]
pub struct FisherQuery {
    pub protocol: ProtocolConfig,
    /// Initial number of atoms `N_a`.
    pub n_atoms: f64,
}

impl FisherQuery {
    pub fn new(protocol: ProtocolConfig, n_atoms: f64) -> Result<Self> {
        let q = Self { protocol, n_atoms };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_atoms.is_finite() && self.n_atoms >= 1.0) {
            return Err(Error::config(
                "fisher.n_atoms",
                format!("must be >= 1, got {}", self.n_atoms),
            ));
        }
        if !(self.theta_hz() > 0.0) {
            return Err(Error::config(
                "drive.delta_nu_s_hz",
                format!("the estimated Δν_s must be > 0, got {}", self.theta_hz()),
            ));
        }
        self.protocol.validate()
    }

    /// The estimated parameter `θ = Δν_s`, Hz.
    pub fn theta_hz(&self) -> f64 {
        self.protocol.model.drive().delta_nu_hz()
    }
}

/// Fisher information at one protocol setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FisherPoint {
    /// 1/Hz².
    pub fisher: f64,
    pub pg: f64,
    pub pe: f64,
    pub dpg_dtheta: f64,
    /// The `P_g(1-P_g)` floor was applied with a non-negligible slope.
    pub guarded: bool,
}

impl FisherPoint {
    /// `F = N_a P_e / (P_g (1 - P_g)) (∂P_g/∂θ)²` with the singular points guarded.
    pub fn from_protocol(point: ProtocolPoint, n_atoms: f64) -> Self {
        let variance = point.pg * (1.0 - point.pg);
        let numerator = n_atoms * point.pe * point.dpg_dtheta * point.dpg_dtheta;
        let (fisher, guarded) = if variance >= PG_VARIANCE_FLOOR {
            (numerator / variance, false)
        } else if point.dpg_dtheta.abs() < SLOPE_FLOOR {
            (0.0, false)
        } else {
            (numerator / PG_VARIANCE_FLOOR, true)
        };
        Self {
            fisher,
            pg: point.pg,
            pe: point.pe,
            dpg_dtheta: point.dpg_dtheta,
            guarded,
        }
    }

    /// Cramér–Rao bound `1/√F` on `δθ`, Hz. Infinite when `F = 0`.
    pub fn crb_hz(&self) -> f64 {
        1.0 / self.fisher.sqrt()
    }
}

/// Analytic `∂P_g/∂θ` of the configured protocol.
pub fn dpg_dtheta(query: &FisherQuery) -> Result<f64> {
    Ok(FisherEvaluator::new(query)?.evaluate().dpg_dtheta)
}

/// Fisher information of the configured protocol.
pub fn fisher_information(query: &FisherQuery) -> Result<FisherPoint> {
    Ok(FisherEvaluator::new(query)?.evaluate())
}

/// Fisher information evaluator that keeps the ensemble and preparation.
#[derive(Clone, Debug)]
pub struct FisherEvaluator {
    protocol: Protocol,
    n_atoms: f64,
}

impl FisherEvaluator {
    pub fn new(query: &FisherQuery) -> Result<Self> {
        query.validate()?;
        Ok(Self {
            protocol: Protocol::new(query.protocol.clone())?,
            n_atoms: query.n_atoms,
        })
    }

    pub fn with_ensemble(query: &FisherQuery, ensemble: Arc<ThermalEnsemble>) -> Result<Self> {
        query.validate()?;
        Ok(Self {
            protocol: Protocol::with_ensemble(query.protocol.clone(), ensemble)?,
            n_atoms: query.n_atoms,
        })
    }

    pub(crate) fn from_parts(protocol: Protocol, n_atoms: f64) -> Self {
        Self { protocol, n_atoms }
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn n_atoms(&self) -> f64 {
        self.n_atoms
    }

    pub fn theta_hz(&self) -> f64 {
        self.protocol.config().model.drive().delta_nu_hz()
    }

    /// Fisher information at the configured probe and wait.
    pub fn evaluate(&self) -> FisherPoint {
        self.at_wait(self.protocol.config().wait_s)
    }

    pub fn at_wait(&self, wait_s: f64) -> FisherPoint {
        let point = self.protocol.evaluate(self.protocol.probe(), wait_s, self.theta_hz());
        FisherPoint::from_protocol(point, self.n_atoms)
    }

    /// `P_g` for an arbitrary θ, everything else fixed.
    pub fn pg_at_theta(&self, theta_hz: f64) -> f64 {
        self.protocol
            .pg_only(self.protocol.probe(), self.protocol.config().wait_s, theta_hz)
    }
}

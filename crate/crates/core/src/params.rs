use crate::error::{LabError, Result};

/// Coefficients of the JMGT-Westervelt equation
/// `tau u_ttt + u_tt - c^2 Δu - b Δu_t = -eta (u^2)_tt - r_tt`.
///
/// The damping margin `delta = b - tau c^2` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    tau: f64,
    c: f64,
    b: f64,
    eta: f64,
}

impl PhysicalParams {
    pub fn new(tau: f64, c: f64, b: f64, eta: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(LabError::InvalidParameter {
                name: "tau",
                reason: format!("must be finite and >= 0, got {tau}"),
            });
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(LabError::InvalidParameter {
                name: "c",
                reason: format!("must be finite and > 0, got {c}"),
            });
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(LabError::InvalidParameter {
                name: "b",
                reason: format!("must be finite and >= 0, got {b}"),
            });
        }
        if !eta.is_finite() {
            return Err(LabError::InvalidParameter {
                name: "eta",
                reason: format!("must be finite, got {eta}"),
            });
        }
        Ok(Self { tau, c, b, eta })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Damping margin `b - tau c^2`.
    pub fn delta(&self) -> f64 {
        self.b - self.tau * self.c * self.c
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(tau, self.c, self.b, self.eta)
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.tau, self.c, b, self.eta)
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.tau, self.c, self.b, eta)
    }

    pub fn is_degenerate(&self) -> bool {
        self.tau == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_is_derived() {
        let p = PhysicalParams::new(0.5, 2.0, 3.0, 1.0).unwrap();
        assert_eq!(p.delta(), 1.0);
        let q = p.with_b(1.0).unwrap();
        assert_eq!(q.delta(), -1.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            PhysicalParams::new(-1.0, 1.0, 1.0, 0.0),
            Err(LabError::InvalidParameter { name: "tau", .. })
        ));
        assert!(PhysicalParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, -1.0, 0.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, -3.0).unwrap().is_degenerate());
    }
}

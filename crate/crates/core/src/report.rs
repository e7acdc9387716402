use serde::Serialize;

/// One instance of an inequality `lhs <= rhs_main + error_term`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs_main: f64,
    pub error_term: f64,
    /// `rhs_main + error_term - lhs`
    pub margin: f64,
    pub meta: BoundMeta,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BoundMeta {
    pub theorem: String,
    /// Free-form description of the inputs.
    pub inputs: String,
    pub tol: f64,
}

impl BoundReport {
    pub fn new(theorem: &str, lhs: f64, rhs_main: f64, error_term: f64) -> Self {
        BoundReport {
            lhs,
            rhs_main,
            error_term,
            margin: rhs_main + error_term - lhs,
            meta: BoundMeta {
                theorem: theorem.to_string(),
                ..BoundMeta::default()
            },
        }
    }

    pub fn with_inputs(mut self, inputs: impl Into<String>) -> Self {
        self.meta.inputs = inputs.into();
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.meta.tol = tol;
        self
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_is_computed() {
        let r = BoundReport::new("t", 0.25, 1.0 / 3.0, 0.0);
        assert_eq!(r.margin, 1.0 / 3.0 - 0.25);
        assert!(r.holds(0.0));
        assert!(!BoundReport::new("t", 1.0, 0.0, 0.5).holds(1e-8));
    }
}

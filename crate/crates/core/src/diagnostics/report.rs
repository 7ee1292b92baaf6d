use serde::Serialize;

/// One line of a JSON check summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: String,
    pub instance_params: serde_json::Value,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckSummary {
    /// A check that passes when `measured ≤ bound`.
    pub fn upper(check: &str, instance_params: serde_json::Value, measured: f64, bound: f64) -> Self {
        CheckSummary { check: check.into(), instance_params, measured, bound, pass: measured <= bound }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names() {
        let s = CheckSummary::upper("leakage", serde_json::json!({"D": 2}), 0.1, 0.2);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["check"], "leakage");
        assert_eq!(v["instance_params"]["D"], 2);
        assert_eq!(v["pass"], true);
    }
}

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// Significant digits kept for every float in a report or data file.
pub const SIG_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        // no negative zeros in the output
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_value(x))).collect()),
        other => other,
    }
}

/// How two ambiguous passages of the source analysis were read; embedded in
/// every report.
#[derive(Debug, Clone, Serialize)]
pub struct ErratumFlags {
    /// Right side of the third Rx 1 channel-coding bound:
    /// `I(Y1; W, U1) + I(U1; W) + log q - H(W)`.
    pub rx1_sum_bound_reading: &'static str,
    /// Codebook-rate bound at Rx j is applied with each receiver's own `S_j`.
    pub rx_bound_reading: &'static str,
    /// The list-size exponent adds `+H(V2, V3 | U1)`.
    pub list_threshold_sign: &'static str,
}

pub const ERRATUM_FLAGS: ErratumFlags = ErratumFlags {
    rx1_sum_bound_reading: "plus_i_u1_w_plus_log_q_minus_h_w",
    rx_bound_reading: "per_receiver_s_j",
    list_threshold_sign: "plus_conditional_entropy",
};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub results: Value,
    pub warnings: Vec<String>,
    pub erratum_flags: ErratumFlags,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, results: Value, warnings: Vec<String>) -> Self {
        Self {
            command: command.into(),
            config_hash: config.hash(),
            config: config.clone(),
            results: round_value(results),
            warnings,
            erratum_flags: ERRATUM_FLAGS,
        }
    }
}

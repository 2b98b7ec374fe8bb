/// Round half away from zero to `decimals` places.
pub fn round_to(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

/// Fixed-point text with half-away-from-zero rounding (`format!` alone
/// rounds ties to even on the binary value).
pub fn fixed(value: f64, decimals: u32) -> String {
    let r = round_to(value, decimals);
    // avoid "-0.00"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{:.*}", decimals as usize, r)
}

pub fn fixed_opt(value: Option<f64>, decimals: u32) -> String {
    value.map(|v| fixed(v, decimals)).unwrap_or_default()
}

//! Text formatting shared by the table writers.

/// Scientific notation with 17 significant digits and a `.` decimal point,
/// enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.0, -0.0, 1.0, -2.5, std::f64::consts::PI, 1e-300, 6.02e23] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(sig17(2.5), "2.5000000000000000e0");
    }
}

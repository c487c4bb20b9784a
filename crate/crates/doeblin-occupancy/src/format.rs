//! CSV number formatting: every probability and real-valued statistic is
//! printed with 12 significant digits in scientific notation so golden files
//! stay byte-stable.

pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        // normalize -0.0
        return format!("{:.11e}", 0.0);
    }
    format!("{:.11e}", x)
}

pub fn opt_u64(v: Option<u64>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "inf".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.31), "3.10000000000e-1");
        assert_eq!(sig12(1.0), "1.00000000000e0");
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-0.0), "0.00000000000e0");
        assert_eq!(sig12(2.1e-5), "2.10000000000e-5");
    }

    #[test]
    fn infinite_plan_cells() {
        assert_eq!(opt_u64(None), "inf");
        assert_eq!(opt_u64(Some(8)), "8");
    }
}

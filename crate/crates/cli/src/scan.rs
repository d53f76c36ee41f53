use std::str::FromStr;

/// `lo:hi:steps`: `steps + 1` evenly spaced points from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Scan {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.lo];
        }
        (0..=self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / self.steps as f64)
            .collect()
    }
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        if !lo.is_finite() || !hi.is_finite() {
            return Err("scan bounds must be finite".into());
        }
        let steps = steps.trim().parse::<usize>().map_err(|e| format!("`{steps}`: {e}"))?;
        Ok(Scan { lo, hi, steps })
    }
}

//! Run configuration with documented defaults.

/// Knobs shared by the command-line driver and the suite runner. Every
/// field has a default; overrides are parsed as `key=value` pairs and
/// unknown keys are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// symbol and derivation depth used when building inputs
    pub depth: usize,
    /// mode windows for the operator-counting oracle
    pub oracle_modes: Vec<i64>,
    /// relative singular-value threshold for null counting
    pub oracle_tol: f64,
    /// seed for randomized suites; the PSINDEX_SEED environment variable
    /// overrides this default, and an explicit --seed flag overrides both
    pub seed: u64,
    /// number of randomized trials in `check` suites
    pub trials: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            depth: 4,
            oracle_modes: vec![8, 12, 16, 20],
            oracle_tol: 1e-8,
            seed: 1,
            trials: 50,
        }
    }
}

impl Config {
    /// Apply a single `key=value` override; unknown keys are an error.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "depth" => {
                self.depth = value.parse().map_err(|_| format!("bad depth `{value}`"))?;
                if self.depth == 0 {
                    return Err("depth must be positive".into());
                }
            }
            "oracle_modes" => {
                let modes: Result<Vec<i64>, _> =
                    value.split(',').map(|v| v.trim().parse()).collect();
                self.oracle_modes = modes.map_err(|_| format!("bad oracle_modes `{value}`"))?;
            }
            "oracle_tol" => {
                self.oracle_tol = value
                    .parse()
                    .map_err(|_| format!("bad oracle_tol `{value}`"))?;
            }
            "seed" => {
                self.seed = value.parse().map_err(|_| format!("bad seed `{value}`"))?;
            }
            "trials" => {
                self.trials = value.parse().map_err(|_| format!("bad trials `{value}`"))?;
            }
            other => return Err(format!("unknown configuration key `{other}`")),
        }
        Ok(())
    }

    /// Parse a comma-separated list of overrides.
    pub fn apply_overrides(&mut self, overrides: &str) -> Result<(), String> {
        for item in overrides.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            // oracle_modes values themselves contain commas; require
            // semicolon-free simple pairs elsewhere
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("override `{item}` is not key=value"))?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_documented_values() {
        let c = Config::default();
        assert_eq!(c.depth, 4);
        assert_eq!(c.oracle_modes, vec![8, 12, 16, 20]);
        assert_eq!(c.oracle_tol, 1e-8);
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut c = Config::default();
        assert!(c.apply("depth", "6").is_ok());
        assert_eq!(c.depth, 6);
        assert!(c.apply("not_a_key", "1").is_err());
        assert!(c.apply("depth", "0").is_err());
    }
}

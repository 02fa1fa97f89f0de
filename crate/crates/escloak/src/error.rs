use escloak_core::design::DesignError;
use escloak_core::farfield::FarFieldError;
use escloak_core::medium::MediumError;
use escloak_core::scattering::ScatteringError;
use escloak_core::transform::TransformError;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical degeneracy: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("verification failed: {0} check(s) did not pass")]
    Verify(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Verify(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn config(field: &str, msg: impl core::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {msg}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<MediumError> for CliError {
    fn from(e: MediumError) -> Self {
        match e {
            MediumError::Omega(_) => CliError::config("omega", e),
            MediumError::Stack(s) => CliError::Config(s.to_string()),
            MediumError::Material(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::Medium(m) => m.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Scattering(s) => s.into(),
            DesignError::Medium(m) => m.into(),
            DesignError::NoLayers => CliError::config("layer_count", e),
            DesignError::Bounds { name, .. } => CliError::config(&format!("bounds.{name}"), e),
            DesignError::Weight { pair, .. } => CliError::config(&format!("mode_weights.{pair}"), e),
            DesignError::Length { .. } => CliError::config("layers", e),
        }
    }
}

impl From<FarFieldError> for CliError {
    fn from(e: FarFieldError) -> Self {
        match e {
            FarFieldError::Medium(m) => m.into(),
            FarFieldError::NotUnit | FarFieldError::Polarization => CliError::config("incident", e),
            FarFieldError::Order | FarFieldError::Truncation { .. } => CliError::config("order", e),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Eps(_) => CliError::config("eps", e),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let d: CliError = ScatteringError::Degenerate { n: 3, omega: 0.5 }.into();
        assert_eq!(d.exit_code(), 2);
        let msg = d.to_string();
        assert!(msg.contains("n=3") && msg.contains("omega=0.5"), "{msg}");
        let c: CliError = DesignError::Bounds { name: "mu", lo: 1.0, hi: 0.0 }.into();
        assert_eq!(c.exit_code(), 1);
        assert!(c.to_string().contains("bounds.mu"));
        let o: CliError = MediumError::Omega(-1.0).into();
        assert_eq!(o.exit_code(), 1);
        assert_eq!(CliError::Io("x".into()).exit_code(), 3);
    }
}

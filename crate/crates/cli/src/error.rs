use growdiff::critical::CriticalError;
use growdiff::eigen::EigenError;
use growdiff::exact::ExactError;
use growdiff::motion::MotionError;
use growdiff::numeric::NumericError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Invalid or incomplete configuration (exit 2).
    Config(String),
    /// Numerical failure, including envelope violations (exit 3).
    Numeric(String),
    /// A tolerance check failed (exit 4).
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Tolerance(m) => write!(f, "tolerance breached: {m}"),
        }
    }
}

fn motion_is_config(e: &MotionError) -> bool {
    matches!(
        e,
        MotionError::InvalidPhysics(_)
            | MotionError::InvalidParameter { .. }
            | MotionError::Document(_)
            | MotionError::BadTime(_)
            | MotionError::DomainCollapsed { .. }
            | MotionError::Unclassifiable { .. }
    )
}

fn eigen_is_config(e: &EigenError) -> bool {
    !matches!(e, EigenError::TooManyModes { .. })
}

impl From<MotionError> for CliError {
    fn from(e: MotionError) -> Self {
        if motion_is_config(&e) {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        if eigen_is_config(&e) {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Motion(m) => m.into(),
            ExactError::Eigen(m) => m.into(),
            ExactError::NotSeparable | ExactError::EndpointViolation { .. } | ExactError::OutsideDomain { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::Motion(m) => m.into(),
            NumericError::Horizon { .. }
            | NumericError::GridTooSmall(_)
            | NumericError::GridMismatch { .. }
            | NumericError::BadSteps(_)
            | NumericError::BadTimes
            | NumericError::Asymmetric
            | NumericError::BadDimension(_)
            | NumericError::WrongRepresentation(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<CriticalError> for CliError {
    fn from(e: CriticalError) -> Self {
        match e {
            CriticalError::Motion(m) => m.into(),
            CriticalError::Numeric(m) => m.into(),
            CriticalError::Exact(m) => m.into(),
            CriticalError::Eigen(m) => m.into(),
            CriticalError::BadWindow { .. }
            | CriticalError::BadInput(_)
            | CriticalError::DimensionUnsupported(_)
            | CriticalError::Asymmetric
            | CriticalError::NegativePotential { .. }
            | CriticalError::BoundViolation { .. } => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o: {e}"))
    }
}

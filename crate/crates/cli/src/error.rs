// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use ccp_core::CcpError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Reproduction(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 1,
            CliError::Reproduction(_) => 2,
            CliError::Io(_) => 3,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Reproduction(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CcpError> for CliError {
    fn from(e: CcpError) -> Self {
        match e {
            CcpError::Io(_) | CcpError::Dataset { .. } => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

use std::io;

use thiserror::Error;

/// Errors produced by the codec and its tools.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an invalid parameter or mismatched inputs.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A raw video file ended before the requested number of frames.
    #[error("input truncated: frame {frame} is incomplete")]
    Truncated { frame: usize },

    /// The bitstream is malformed or inconsistent.
    #[error("stream error: {0}")]
    Stream(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn stream_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Stream(msg.into()))
}

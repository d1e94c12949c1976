use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {what} is {size}, limit {limit}")]
    Budget {
        what: &'static str,
        size: u64,
        limit: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn budget(what: &'static str, size: u64, limit: u64) -> Result<()> {
    if size > limit {
        Err(Error::Budget { what, size, limit })
    } else {
        Ok(())
    }
}

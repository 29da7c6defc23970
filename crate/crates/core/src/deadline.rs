use std::time::{Duration, Instant};

/// Optional wall-clock cutoff checked cooperatively by long-running loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub const NONE: Deadline = Deadline(None);

    pub fn after(budget: Duration) -> Self {
        Deadline(Instant::now().checked_add(budget))
    }

    pub fn at(instant: Instant) -> Self {
        Deadline(Some(instant))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> crate::Result<()> {
        if self.expired() {
            Err(crate::Error::Timeout)
        } else {
            Ok(())
        }
    }
}

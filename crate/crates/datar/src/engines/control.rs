//! Standalone control engine: serializes job admission on one instance.

use std::sync::{Condvar, Mutex};

use crate::engine::{
    Availability, ControlEngine, Engine, EngineDescriptor, EngineKind, JobToken, Params,
};
use crate::error::{Error, Result};

#[derive(Default)]
struct ControlState {
    next_token: JobToken,
    running: Option<JobToken>,
}

/// At most one running job; tokens are monotonically increasing.
pub struct StandaloneControl {
    desc: EngineDescriptor,
    state: Mutex<ControlState>,
    released: Condvar,
}

impl StandaloneControl {
    pub fn new() -> Self {
        StandaloneControl {
            desc: EngineDescriptor::new("standalone", EngineKind::Control, "1"),
            state: Mutex::new(ControlState::default()),
            released: Condvar::new(),
        }
    }
}

impl Default for StandaloneControl {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine for StandaloneControl {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, _: &Params) -> Availability {
        Availability::Available
    }
}

impl ControlEngine for StandaloneControl {
    fn admit(&self, _job: &str, blocking: bool) -> Result<JobToken> {
        let mut state = self.state.lock().expect("control poisoned");
        while state.running.is_some() {
            if !blocking {
                return Err(Error::Busy);
            }
            state = self.released.wait(state).expect("control poisoned");
        }
        state.next_token += 1;
        let token = state.next_token;
        state.running = Some(token);
        Ok(token)
    }

    fn release(&self, token: JobToken) -> Result<()> {
        let mut state = self.state.lock().expect("control poisoned");
        if state.running != Some(token) {
            return Err(Error::UnknownToken(token));
        }
        state.running = None;
        self.released.notify_all();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_are_monotone() {
        let ctl = StandaloneControl::new();
        let t1 = ctl.admit("job1", false).unwrap();
        ctl.release(t1).unwrap();
        let t2 = ctl.admit("job2", false).unwrap();
        assert!(t2 > t1);
        ctl.release(t2).unwrap();
    }

    #[test]
    fn second_nonblocking_admit_is_busy() {
        let ctl = StandaloneControl::new();
        let t = ctl.admit("job1", false).unwrap();
        assert!(matches!(ctl.admit("job2", false).unwrap_err(), Error::Busy));
        ctl.release(t).unwrap();
        ctl.admit("job2", false).unwrap();
    }

    #[test]
    fn release_unknown_token() {
        let ctl = StandaloneControl::new();
        assert!(matches!(
            ctl.release(42).unwrap_err(),
            Error::UnknownToken(42)
        ));
        let t = ctl.admit("job", false).unwrap();
        assert!(matches!(
            ctl.release(t + 1).unwrap_err(),
            Error::UnknownToken(_)
        ));
        ctl.release(t).unwrap();
    }

    #[test]
    fn blocking_admit_waits_for_release() {
        use std::sync::Arc;
        let ctl = Arc::new(StandaloneControl::new());
        let t = ctl.admit("job1", false).unwrap();
        let ctl2 = ctl.clone();
        let waiter = std::thread::spawn(move || ctl2.admit("job2", true).unwrap());
        std::thread::sleep(std::time::Duration::from_millis(20));
        ctl.release(t).unwrap();
        let t2 = waiter.join().unwrap();
        assert!(t2 > t);
        ctl.release(t2).unwrap();
    }
}

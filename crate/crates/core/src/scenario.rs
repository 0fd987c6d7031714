use crate::error::{Error, Result};

/// One experiment setting: `packets` coded packets to deliver from the source
/// through the relay to every receiver. Per slot, a source transmission
/// reaches the relay with probability `p_relay`, and a relay broadcast
/// reaches receiver `r` with probability `p_recv[r]`, all independently.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    packets: u32,
    p_relay: f64,
    p_recv: Vec<f64>,
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidInput(format!("{name} = {p} is outside (0, 1]")));
    }
    Ok(())
}

impl Scenario {
    /// Validates all fields: `packets >= 1`, at least one receiver, and every
    /// probability in `(0, 1]`.
    pub fn new(packets: u32, p_relay: f64, p_recv: Vec<f64>) -> Result<Self> {
        if packets == 0 {
            return Err(Error::InvalidInput("packets must be at least 1".into()));
        }
        check_prob("p_relay", p_relay)?;
        if p_recv.is_empty() {
            return Err(Error::InvalidInput("at least one receiver is required".into()));
        }
        for (r, &p) in p_recv.iter().enumerate() {
            check_prob(&format!("p_recv[{r}]"), p)?;
        }
        Ok(Self { packets, p_relay, p_recv })
    }

    /// All receivers share one link quality.
    pub fn uniform(packets: u32, p_relay: f64, p_recv: f64, receivers: usize) -> Result<Self> {
        Self::new(packets, p_relay, vec![p_recv; receivers])
    }

    pub fn packets(&self) -> u32 {
        self.packets
    }

    pub fn p_relay(&self) -> f64 {
        self.p_relay
    }

    pub fn p_recv(&self) -> &[f64] {
        &self.p_recv
    }

    pub fn receivers(&self) -> usize {
        self.p_recv.len()
    }
}

/// Which route produced a delay figure; kept alongside the number so mixed
/// tables stay self-describing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// Unbuffered forwarding, one receiver: negative-binomial mean.
    NoBufferSingle,
    /// Unbuffered forwarding, all receivers: scaled broadcast series.
    NoBufferSystem,
    /// Loss-free source, all receivers: broadcast series.
    BroadcastSystem,
    /// Buffered relay, one receiver: direct lattice-path double sum.
    WithBufferSingleClosed,
    /// Buffered relay, one receiver: coefficient recursion over increments.
    WithBufferSingleRecursive,
    /// Buffered relay, all receivers: max of the two lower-bound sides.
    SystemLowerBound,
}

impl Formula {
    pub fn as_str(self) -> &'static str {
        match self {
            Formula::NoBufferSingle => "nobuffer-single",
            Formula::NoBufferSystem => "nobuffer-system",
            Formula::BroadcastSystem => "broadcast-system",
            Formula::WithBufferSingleClosed => "withbuffer-single-closed",
            Formula::WithBufferSingleRecursive => "withbuffer-single-recursive",
            Formula::SystemLowerBound => "system-lower-bound",
        }
    }
}

/// An expected completion delay in source time slots (always at least the
/// packet count), tagged with the formula that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayValue {
    pub value: f64,
    pub formula: Formula,
}

impl DelayValue {
    pub fn new(value: f64, formula: Formula) -> Self {
        Self { value, formula }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_scenarios() {
        let s = Scenario::new(10, 0.75, vec![0.5, 1.0]).unwrap();
        assert_eq!(s.packets(), 10);
        assert_eq!(s.receivers(), 2);
        assert_eq!(s.p_relay(), 0.75);
        let u = Scenario::uniform(3, 1.0, 0.9, 4).unwrap();
        assert_eq!(u.p_recv(), &[0.9; 4]);
    }

    #[test]
    fn rejects_out_of_domain_fields() {
        assert!(Scenario::new(0, 0.5, vec![0.5]).is_err());
        assert!(Scenario::new(1, 0.0, vec![0.5]).is_err());
        assert!(Scenario::new(1, 1.1, vec![0.5]).is_err());
        assert!(Scenario::new(1, 0.5, vec![]).is_err());
        assert!(Scenario::new(1, 0.5, vec![0.5, -0.1]).is_err());
        let err = Scenario::new(1, 0.5, vec![0.5, 0.0]).unwrap_err();
        assert!(err.to_string().contains("p_recv[1]"), "{err}");
    }
}

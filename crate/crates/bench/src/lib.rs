//! Shared fixtures for the criterion benches: representative scenarios at
//! the sizes the engines are expected to handle interactively.

use rlnc_lab::Scenario;

/// Two moderately different receivers behind a fair source link.
pub fn two_receivers(packets: u32) -> Scenario {
    Scenario::new(packets, 0.8, vec![0.75, 0.85]).expect("valid fixture")
}

/// Ten uniform receivers, the head-count of the published sweeps.
pub fn ten_receivers(packets: u32) -> Scenario {
    Scenario::new(packets, 0.75, vec![0.75; 10]).expect("valid fixture")
}

/// A large population cycling through four receiver qualities.
pub fn hundred_receivers(packets: u32) -> Scenario {
    let pattern = [0.9, 0.8, 0.7, 0.6];
    let p_recv = (0..100).map(|r| pattern[r % 4]).collect();
    Scenario::new(packets, 0.75, p_recv).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid_and_sized_as_documented() {
        assert_eq!(two_receivers(10).receivers(), 2);
        assert_eq!(ten_receivers(10).receivers(), 10);
        assert_eq!(hundred_receivers(10).receivers(), 100);
    }
}

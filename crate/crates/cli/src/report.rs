use serde::Serialize;
use sha2::{Digest as _, Sha256};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub rules_discovered: usize,
    pub compositions_checked: usize,
    pub entries_verified: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    status: Status,
    pub counts: Counts,
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String, counts: Counts, failures: Vec<String>) -> Self {
        let status = if failures.is_empty() { Status::Pass } else { Status::Fail };
        Self {
            command: command.to_string(),
            inputs_digest,
            status,
            counts,
            failures,
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 over the command name and its inputs, NUL-separated.
pub struct Digest(Sha256);

impl Digest {
    pub fn new(command: &str) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        Self(h)
    }

    pub fn add(&mut self, part: &str) {
        self.0.update([0u8]);
        self.0.update(part.as_bytes());
    }

    pub fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_failures() {
        assert_eq!(RunReport::new("verify", String::new(), Counts::default(), vec![]).status(), Status::Pass);
        let r = RunReport::new("verify", String::new(), Counts::default(), vec!["x".into()]);
        assert_eq!(r.status(), Status::Fail);
        assert!(r.to_json().contains("\"status\": \"fail\""));
    }

    #[test]
    fn digest_of_empty_command() {
        // sha256("")
        assert_eq!(
            Digest::new("").finish(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let mut a = Digest::new("ab");
        a.add("");
        let mut b = Digest::new("a");
        b.add("b");
        assert_ne!(a.finish(), b.finish());
    }
}

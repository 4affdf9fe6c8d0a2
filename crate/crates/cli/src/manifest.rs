use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

/// Run manifest written alongside every output artifact: the command, the
/// resolved configuration, and start/end timestamps, as sorted key=value
/// lines. Re-running the recorded command in serial mode reproduces the
/// primary outputs byte for byte; only the timestamps differ.
pub struct RunManifest {
    command: String,
    entries: Vec<(String, String)>,
    started_unix: u64,
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            entries: Vec::new(),
            started_unix: unix_now(),
        }
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn write(mut self, path: &Path) -> std::io::Result<()> {
        self.entries.push(("command".into(), self.command.clone()));
        self.entries
            .push(("tool_version".into(), env!("CARGO_PKG_VERSION").into()));
        self.entries
            .push(("started_unix".into(), self.started_unix.to_string()));
        self.entries.push(("finished_unix".into(), unix_now().to_string()));
        self.entries.sort();
        let mut text = String::new();
        for (key, value) in &self.entries {
            text.push_str(key);
            text.push('=');
            text.push_str(value);
            text.push('\n');
        }
        std::fs::write(path, text)
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

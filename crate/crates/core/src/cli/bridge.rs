//! Out-of-process models over line-delimited JSON.
//!
//! Each request is one line `{"rows": [[...], ...]}` with numeric values as
//! numbers and categorical values as their symbols. The child answers with
//! one line `{"outputs": [[...], ...]}` holding one output row per input
//! row. Requests are strictly sequential.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::cli::output::RecordValue;
use crate::error::{Error, Result};
use crate::model::{BlackBoxModel, Concurrency, FeatureSpace, Instance};

#[derive(Debug, Serialize, Deserialize)]
pub struct BridgeRequest {
    pub rows: Vec<Vec<RecordValue>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BridgeResponse {
    pub outputs: Vec<Vec<f64>>,
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

pub struct ExternalModelBridge {
    command: String,
    space: FeatureSpace,
    outputs: Vec<String>,
    channel: Mutex<Channel>,
}

impl ExternalModelBridge {
    /// Launches `command` through `sh -c`.
    pub fn spawn(command: &str, space: FeatureSpace, outputs: Vec<String>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::Config(
                "a bridged model needs at least one output".into(),
            ));
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            command: command.to_string(),
            space,
            outputs,
            channel: Mutex::new(Channel {
                child,
                stdin,
                stdout,
            }),
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn encode(&self, batch: &[Instance]) -> BridgeRequest {
        BridgeRequest {
            rows: batch
                .iter()
                .map(|inst| {
                    self.space
                        .features()
                        .iter()
                        .zip(inst.values())
                        .map(|(f, &v)| {
                            if f.is_numeric() {
                                RecordValue::Number(v.as_f64())
                            } else {
                                RecordValue::Symbol(f.format_value(v))
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    fn violation(&self, message: String, payload: &str) -> Error {
        eprintln!(
            "bridge `{}`: {message}; raw payload: {payload}",
            self.command
        );
        Error::Bridge {
            message,
            payload: payload.to_string(),
        }
    }
}

impl BlackBoxModel for ExternalModelBridge {
    fn output_names(&self) -> Vec<String> {
        self.outputs.clone()
    }

    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>> {
        let mut line = serde_json::to_string(&self.encode(batch))?;
        line.push('\n');
        let mut channel = self.channel.lock().expect("bridge channel");
        channel.stdin.write_all(line.as_bytes())?;
        channel.stdin.flush()?;
        let mut reply = String::new();
        if channel.stdout.read_line(&mut reply)? == 0 {
            return Err(self.violation("child closed its output".into(), ""));
        }
        let response: BridgeResponse = serde_json::from_str(reply.trim_end())
            .map_err(|e| self.violation(format!("malformed response ({e})"), &reply))?;
        if response.outputs.len() != batch.len() {
            return Err(self.violation(
                format!(
                    "{} output rows for {} input rows",
                    response.outputs.len(),
                    batch.len()
                ),
                &reply,
            ));
        }
        if let Some((row, out)) = response
            .outputs
            .iter()
            .enumerate()
            .find(|(_, o)| o.len() != self.outputs.len())
        {
            return Err(self.violation(
                format!(
                    "row {row} has {} outputs, expected {}",
                    out.len(),
                    self.outputs.len()
                ),
                &reply,
            ));
        }
        Ok(response.outputs)
    }

    fn concurrency(&self) -> Concurrency {
        Concurrency::Serialized
    }
}

impl Drop for ExternalModelBridge {
    fn drop(&mut self) {
        if let Ok(channel) = self.channel.get_mut() {
            let _ = channel.child.kill();
            let _ = channel.child.wait();
        }
    }
}

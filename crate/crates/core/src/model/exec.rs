//! External-process predictor.
//!
//! Each `predict` call runs the command once through `sh -c`, writes the
//! predictor columns as CSV (header plus one line per row) to its standard
//! input and expects exactly one decimal number per line on standard output.

use std::io::{Read, Write};
use std::process::{Command, Stdio};

use super::{Concurrency, Predictor};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ExecPredictor {
    command: String,
}

pub fn exec_predictor(command: impl Into<String>) -> ExecPredictor {
    ExecPredictor {
        command: command.into(),
    }
}

impl ExecPredictor {
    pub fn command(&self) -> &str {
        &self.command
    }
}

fn parse_output(text: &str, expected: usize) -> Result<Vec<f64>> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Vec<&str> = if body.is_empty() {
        Vec::new()
    } else {
        body.split('\n').collect()
    };
    let values = lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let line = line.trim_end_matches('\r').trim();
            line.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::ExecParse {
                    line: i + 1,
                    text: line.to_string(),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != expected {
        return Err(Error::Exec(format!(
            "expected {expected} output lines, got {}",
            values.len()
        )));
    }
    Ok(values)
}

impl Predictor for ExecPredictor {
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        let mut input = Vec::new();
        data.write_csv(&mut input, false)?;

        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Exec(format!("cannot launch '{}': {e}", self.command)))?;

        let mut stdin = child.stdin.take().expect("stdin piped");
        let writer = std::thread::spawn(move || {
            // A child that exits without reading closes the pipe; that is
            // reported through its exit status or output instead.
            let _ = stdin.write_all(&input);
        });
        let mut stderr = child.stderr.take().expect("stderr piped");
        let err_reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });
        let mut stdout = String::new();
        child
            .stdout
            .take()
            .expect("stdout piped")
            .read_to_string(&mut stdout)
            .map_err(|e| Error::Exec(format!("reading output: {e}")))?;
        let status = child
            .wait()
            .map_err(|e| Error::Exec(format!("waiting for child: {e}")))?;
        let _ = writer.join();
        let stderr = err_reader.join().unwrap_or_default();
        if !status.success() {
            let detail = stderr.lines().next().unwrap_or("").trim();
            return Err(Error::Exec(format!(
                "'{}' exited with {status}{}{detail}",
                self.command,
                if detail.is_empty() { "" } else { ": " }
            )));
        }
        parse_output(&stdout, data.n_rows())
    }

    fn concurrency(&self) -> Concurrency {
        Concurrency::SerialOnly
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        assert_eq!(
            parse_output("1\n2.5\n-3e2\n", 3).unwrap(),
            vec![1.0, 2.5, -300.0]
        );
        assert_eq!(parse_output("1\r\n2\r\n", 2).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn count_mismatch() {
        assert!(matches!(parse_output("1\n2\n", 3), Err(Error::Exec(_))));
        assert!(matches!(parse_output("", 1), Err(Error::Exec(_))));
    }

    #[test]
    fn bad_line_number() {
        match parse_output("1\n2\nabc\n", 3) {
            Err(Error::ExecParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}

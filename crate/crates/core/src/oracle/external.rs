//! SMT-LIB2 solver subprocess backend.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use super::{BackendAnswer, TheoryBackend};
use crate::error::{Error, Result};
use crate::frontend::print;
use crate::frontend::sexp::{paren_depth, read_all};
use crate::frontend::{LinearAtom, Literal};

/// One persistent solver process, queried with push/pop.
pub struct External {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    atoms: Arc<Vec<Option<LinearAtom>>>,
    timeout: Duration,
    dead: bool,
}

impl External {
    pub fn spawn(
        cmd: &[String],
        atoms: Arc<Vec<Option<LinearAtom>>>,
        variables: &[String],
        timeout: Duration,
    ) -> Result<Self> {
        let (prog, args) = cmd
            .split_first()
            .ok_or_else(|| Error::ExternalSolver("empty solver command".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::ExternalSolver(format!("cannot start {prog}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut ext = External {
            child,
            stdin,
            lines: rx,
            atoms,
            timeout,
            dead: false,
        };
        let mut init = String::from(
            "(set-option :print-success false)\n(set-option :produce-unsat-cores true)\n(set-logic QF_LRA)\n",
        );
        for v in variables {
            init.push_str(&format!("(declare-const {} Real)\n", print::symbol(v)));
        }
        ext.send(&init)?;
        Ok(ext)
    }

    fn send(&mut self, text: &str) -> Result<()> {
        if self.dead {
            return Err(Error::ExternalSolver("solver process is not running".into()));
        }
        self.stdin
            .write_all(text.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| {
                self.dead = true;
                Error::ExternalSolver(format!("write failed ({e}): eof"))
            })
    }

    /// Next complete s-expression or bare token from the solver.
    fn reply(&mut self, deadline: Instant) -> Result<String> {
        let mut buf = String::new();
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    if buf.is_empty() && line.trim().is_empty() {
                        continue;
                    }
                    buf.push_str(&line);
                    buf.push('\n');
                    if paren_depth(&buf) <= 0 {
                        return Ok(buf.trim().to_string());
                    }
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill();
                    return Err(Error::OracleTimeout(self.timeout));
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = true;
                    return Err(Error::ExternalSolver("eof".into()));
                }
            }
        }
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    fn query(&mut self, lits: &[Literal], deadline: Instant) -> Result<BackendAnswer> {
        let mut q = String::from("(push 1)\n");
        for (i, l) in lits.iter().enumerate() {
            let atom = self.atoms[l.atom() as usize]
                .as_ref()
                .ok_or_else(|| Error::Internal(format!("atom {} is not a theory atom", l.atom())))?;
            let body = if l.is_positive() {
                print::atom(atom)
            } else {
                format!("(not {})", print::atom(atom))
            };
            q.push_str(&format!("(assert (! {body} :named l{i}))\n"));
        }
        q.push_str("(check-sat)\n");
        self.send(&q)?;
        let verdict = self.reply(deadline)?;
        let ans = match verdict.as_str() {
            "sat" => BackendAnswer { sat: true, core: None, model: None },
            "unsat" => {
                self.send("(get-unsat-core)\n")?;
                let text = self.reply(deadline)?;
                let core = parse_core(&text, lits)?;
                BackendAnswer { sat: false, core: Some(core), model: None }
            }
            "unknown" => return Err(Error::ExternalSolver("unknown".into())),
            other if other.starts_with("(error") => {
                return Err(Error::ExternalSolver(other.to_string()))
            }
            other => return Err(Error::ExternalSolver(format!("unexpected reply: {other}"))),
        };
        self.send("(pop 1)\n")?;
        Ok(ans)
    }
}

fn parse_core(text: &str, lits: &[Literal]) -> Result<Vec<Literal>> {
    if text.starts_with("(error") {
        return Err(Error::ExternalSolver(text.to_string()));
    }
    let bad = || Error::ExternalSolver(format!("malformed unsat core: {text}"));
    let s = read_all(text).map_err(|_| bad())?;
    let [list] = s.as_slice() else { return Err(bad()) };
    let items = list.as_list().ok_or_else(bad)?;
    let mut core = Vec::with_capacity(items.len());
    for it in items {
        let idx: usize = it
            .as_atom()
            .and_then(|n| n.strip_prefix('l'))
            .and_then(|n| n.parse().ok())
            .filter(|&i| i < lits.len())
            .ok_or_else(bad)?;
        core.push(lits[idx]);
    }
    core.sort();
    core.dedup();
    Ok(core)
}

impl TheoryBackend for External {
    fn solve(&mut self, lits: &[Literal], _want_model: bool, deadline: Instant) -> Result<BackendAnswer> {
        let deadline = deadline.min(Instant::now() + self.timeout);
        self.query(lits, deadline)
    }
}

impl Drop for External {
    fn drop(&mut self) {
        if !self.dead {
            let _ = self.stdin.write_all(b"(exit)\n");
            let _ = self.stdin.flush();
            let start = Instant::now();
            while start.elapsed() < Duration::from_millis(200) {
                if let Ok(Some(_)) = self.child.try_wait() {
                    return;
                }
                thread::sleep(Duration::from_millis(5));
            }
        }
        self.kill();
    }
}

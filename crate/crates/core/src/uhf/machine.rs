//! Counter machines, the computability substrate behind the c.e. sets W_e.
//!
//! Program text: instructions separated by `;` or newlines, numbered from 0.
//!
//! ```text
//! inc C NEXT        counter C += 1, go to NEXT
//! dec C NEXT ZERO   if counter C > 0 { C -= 1; go to NEXT } else go to ZERO
//! halt
//! ```
//!
//! The input is placed in counter 0. A run takes one step per executed
//! `inc`/`dec`; it halts within s steps if `halt` is reached after at most s
//! of them.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::{Arc, Mutex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    Inc { c: usize, next: usize },
    Dec { c: usize, next: usize, zero: usize },
    Halt,
}

#[derive(Clone, Debug)]
struct Run {
    pc: usize,
    regs: Vec<u64>,
    steps: u64,
    halted: bool,
}

/// Per-input simulation cursors, extended on demand.
#[derive(Debug, Default)]
struct Cursors {
    runs: Vec<Run>,
}

#[derive(Clone)]
pub struct CounterMachine {
    program: Arc<Vec<Instr>>,
    counters: usize,
    cursors: Arc<Mutex<Cursors>>,
}

impl PartialEq for CounterMachine {
    fn eq(&self, o: &Self) -> bool {
        self.program == o.program
    }
}

impl fmt::Debug for CounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CounterMachine({self})")
    }
}

impl CounterMachine {
    pub fn new(program: Vec<Instr>) -> Result<Self> {
        if program.is_empty() {
            return Err(Error::Input("empty counter machine program".into()));
        }
        let len = program.len();
        let mut counters = 1;
        for (i, ins) in program.iter().enumerate() {
            match *ins {
                Instr::Inc { c, next } => {
                    counters = counters.max(c + 1);
                    check_targets(&[next], i, len)?;
                }
                Instr::Dec { c, next, zero } => {
                    counters = counters.max(c + 1);
                    check_targets(&[next, zero], i, len)?;
                }
                Instr::Halt => {}
            }
        }
        Ok(CounterMachine { program: Arc::new(program), counters, cursors: Arc::default() })
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut prog = Vec::new();
        let mut line = 1;
        let mut col = 1;
        for piece in src.split_inclusive([';', '\n']) {
            let body = piece.trim_end_matches([';', '\n']);
            let words: Vec<&str> = body.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line, col: col + body.len() - body.trim_start().len(), msg };
            let num = |w: &str| w.parse::<usize>().map_err(|_| err(format!("expected a number, found `{w}`")));
            match words.as_slice() {
                [] => {}
                ["inc", c, n] => prog.push(Instr::Inc { c: num(c)?, next: num(n)? }),
                ["dec", c, n, z] => prog.push(Instr::Dec { c: num(c)?, next: num(n)?, zero: num(z)? }),
                ["halt"] => prog.push(Instr::Halt),
                _ => return Err(err(format!("bad instruction `{}`", body.trim()))),
            }
            if piece.ends_with('\n') {
                line += 1;
                col = 1;
            } else {
                col += piece.chars().count();
            }
        }
        Self::new(prog)
    }

    pub fn program(&self) -> &[Instr] {
        &self.program
    }

    /// Never halts.
    pub fn never() -> Self {
        Self::parse("inc 1 0").unwrap()
    }

    /// Halts at once on every input.
    pub fn accept_all() -> Self {
        Self::parse("halt").unwrap()
    }

    /// Halts after x + 1 steps on even x, loops on odd x.
    pub fn accept_even() -> Self {
        Self::parse("dec 0 1 3; dec 0 0 2; inc 1 2; halt").unwrap()
    }

    /// Whether the run on `x` halts within `s` steps.
    pub fn halts_within(&self, x: u64, s: u64) -> bool {
        let mut cur = self.cursors.lock().unwrap();
        while cur.runs.len() as u64 <= x {
            let mut regs = vec![0; self.counters];
            regs[0] = cur.runs.len() as u64;
            cur.runs.push(Run { pc: 0, regs, steps: 0, halted: false });
        }
        let run = &mut cur.runs[x as usize];
        while !run.halted && run.steps < s {
            self.step(run);
        }
        // reaching halt costs nothing, so check once more
        if !run.halted && matches!(self.program[run.pc], Instr::Halt) {
            run.halted = true;
        }
        run.halted && run.steps <= s
    }

    fn step(&self, run: &mut Run) {
        match self.program[run.pc] {
            Instr::Halt => run.halted = true,
            Instr::Inc { c, next } => {
                run.regs[c] += 1;
                run.pc = next;
                run.steps += 1;
            }
            Instr::Dec { c, next, zero } => {
                if run.regs[c] > 0 {
                    run.regs[c] -= 1;
                    run.pc = next;
                } else {
                    run.pc = zero;
                }
                run.steps += 1;
            }
        }
        if matches!(self.program[run.pc], Instr::Halt) {
            run.halted = true;
        }
    }

    /// #W_{s} = #{x < s : the run on x halts within s steps}.
    pub fn w_count(&self, s: u64) -> u64 {
        (0..s).filter(|&x| self.halts_within(x, s)).count() as u64
    }
}

fn check_targets(ts: &[usize], at: usize, len: usize) -> Result<()> {
    for &t in ts {
        if t >= len {
            return Err(Error::Input(format!("instruction {at} jumps to {t}, outside the program of length {len}")));
        }
    }
    Ok(())
}

impl fmt::Display for CounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.program.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match ins {
                Instr::Inc { c, next } => write!(f, "inc {c} {next}")?,
                Instr::Dec { c, next, zero } => write!(f, "dec {c} {next} {zero}")?,
                Instr::Halt => f.write_str("halt")?,
            }
        }
        Ok(())
    }
}

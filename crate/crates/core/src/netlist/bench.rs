// SPDX-License-Identifier: Apache-2.0

//! ISCAS `.bench` reader and writer.
//!
//! ```text
//! # comment
//! INPUT(a)
//! OUTPUT(z)
//! z = AND(a, b)
//! ```
//!
//! Gate kinds are case-insensitive (`BUFF` and `NOT1` are accepted as
//! aliases); net names are case-sensitive and drawn from
//! `[A-Za-z0-9_.\[\]]`. Nets may be used before the line that drives them.

use std::fmt::Write as _;

use super::{Circuit, CircuitBuilder, GateKind, NetlistError};

const DEFAULT_NAME: &str = "top";

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '[' | ']')
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor {
            chars: text.char_indices().collect(),
            pos: 0,
            line,
            text,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expect(&mut self, want: char) -> Result<(), NetlistError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of line"))),
        }
    }

    fn name(&mut self) -> Result<&'a str, NetlistError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_name_char(self.chars[self.pos].1) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.chars.get(self.pos) {
                Some(&(_, c)) => self.error(format!("expected a name, found `{c}`")),
                None => self.error("expected a name, found end of line"),
            });
        }
        let from = self.chars[start].0;
        let to = self
            .chars
            .get(self.pos)
            .map_or(self.text.len(), |&(i, _)| i);
        Ok(&self.text[from..to])
    }

    fn finish(&mut self) -> Result<(), NetlistError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected `{c}` after statement"))),
        }
    }
}

/// Parses `.bench` text into a validated circuit named `top`.
pub fn parse_bench(text: &str) -> Result<Circuit, NetlistError> {
    parse_bench_named(DEFAULT_NAME, text)
}

pub fn parse_bench_named(name: &str, text: &str) -> Result<Circuit, NetlistError> {
    let mut builder = CircuitBuilder::new(name);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(body, line_no);
        let head = cur.name()?;
        if cur.peek() == Some('(') {
            let is_input = head.eq_ignore_ascii_case("INPUT");
            if !is_input && !head.eq_ignore_ascii_case("OUTPUT") {
                return Err(NetlistError::Syntax {
                    line: line_no,
                    column: 1 + body.len() - body.trim_start().len(),
                    message: format!("unknown declaration `{head}`"),
                });
            }
            cur.expect('(')?;
            let net = cur.name()?.to_string();
            cur.expect(')')?;
            cur.finish()?;
            if is_input {
                builder.input_at(net, line_no);
            } else {
                builder.output_at(net, line_no);
            }
            continue;
        }

        cur.expect('=')?;
        let kind_col = {
            cur.skip_ws();
            cur.column()
        };
        let kind_name = cur.name()?;
        let kind: GateKind = kind_name.parse().map_err(|_| NetlistError::Syntax {
            line: line_no,
            column: kind_col,
            message: format!("unknown gate kind `{kind_name}`"),
        })?;
        cur.expect('(')?;
        let mut inputs = Vec::new();
        if cur.peek() != Some(')') {
            loop {
                inputs.push(cur.name()?.to_string());
                match cur.peek() {
                    Some(',') => cur.pos += 1,
                    _ => break,
                }
            }
        }
        cur.expect(')')?;
        cur.finish()?;
        builder.gate_at(head.to_string(), kind, inputs, line_no);
    }
    builder.build()
}

/// Writes a circuit as `.bench` text: inputs, outputs, then gates in
/// declaration order.
pub fn emit_bench(c: &Circuit) -> String {
    let mut out = String::new();
    for &id in c.inputs() {
        writeln!(out, "INPUT({})", c.net(id).name).unwrap();
    }
    for &id in c.outputs() {
        writeln!(out, "OUTPUT({})", c.net(id).name).unwrap();
    }
    for gate in c.gates() {
        let args: Vec<&str> = gate
            .inputs
            .iter()
            .map(|&i| c.net(i).name.as_str())
            .collect();
        writeln!(
            out,
            "{} = {}({})",
            c.net(gate.output).name,
            gate.kind.bench_name(),
            args.join(", ")
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "INPUT(a)\nINPUT(b)\nOUTPUT(z)\nz = AND(a, b)";

    #[test]
    fn minimal_netlist() {
        let c = parse_bench(MINIMAL).unwrap();
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.inputs().len(), 2);
        assert_eq!(c.outputs().len(), 1);
    }

    #[test]
    fn arity_violation() {
        let err = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(z)\nz = AND(a)").unwrap_err();
        assert!(
            matches!(
                err,
                NetlistError::Arity {
                    line: Some(4),
                    got: 1,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn emit_single_and_is_four_lines() {
        let c = parse_bench(MINIMAL).unwrap();
        let text = emit_bench(&c);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text, "INPUT(a)\nINPUT(b)\nOUTPUT(z)\nz = AND(a, b)\n");
    }

    #[test]
    fn whitespace_comments_and_crlf() {
        let text = "# c17-ish\r\n  INPUT ( a )  \r\nINPUT(b)# trailing\r\n\r\nOUTPUT(n.1[0])\r\nn.1[0]=nand( a ,b )\r\n";
        let c = parse_bench(text).unwrap();
        assert_eq!(c.net(c.outputs()[0]).name, "n.1[0]");
        assert_eq!(c.gates()[0].kind, GateKind::Nand);
    }

    #[test]
    fn kind_aliases_and_case() {
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\nOUTPUT(w)\nx = buff(a)\ny = NOT1(x)\nw = Not(a)")
            .unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::Buf);
        assert_eq!(c.gates()[1].kind, GateKind::Not);
    }

    #[test]
    fn net_names_are_case_sensitive() {
        let err = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT(A)").unwrap_err();
        assert!(
            matches!(err, NetlistError::UndeclaredNet { ref name, line: Some(3) } if name == "A")
        );
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_bench("INPUT(a)\nOUTPUT(z)\nz = AND(a, )").unwrap_err();
        assert_eq!(
            err,
            NetlistError::Syntax {
                line: 3,
                column: 12,
                message: "expected a name, found `)`".into()
            }
        );
        let err = parse_bench("INPUT(a\n").unwrap_err();
        assert!(
            matches!(
                err,
                NetlistError::Syntax {
                    line: 1,
                    column: 8,
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_bench("INPUT(a)\nz = FOO(a)").unwrap_err();
        assert!(
            matches!(
                err,
                NetlistError::Syntax {
                    line: 2,
                    column: 5,
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_bench("INPUT(a)\nz := AND(a)").unwrap_err();
        assert!(matches!(err, NetlistError::Syntax { line: 2, .. }));
        let err = parse_bench("WIRE(a)").unwrap_err();
        assert!(matches!(
            err,
            NetlistError::Syntax {
                line: 1,
                column: 1,
                ..
            }
        ));
    }

    #[test]
    fn duplicate_driver_and_cycle() {
        let err = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT(a)\nz = BUFF(a)").unwrap_err();
        assert!(matches!(
            err,
            NetlistError::DuplicateDriver { line: Some(4), .. }
        ));
        let err = parse_bench("INPUT(a)\nOUTPUT(x)\nx = AND(a, y)\ny = NOT(x)").unwrap_err();
        assert!(matches!(err, NetlistError::Cycle { .. }));
    }

    #[test]
    fn forward_references_keep_declaration_order() {
        let c = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT(t)\nt = BUFF(a)").unwrap();
        assert_eq!(c.nets()[1].name, "z");
        assert_eq!(c.nets()[2].name, "t");
        assert!(c.structurally_eq(&parse_bench(&emit_bench(&c)).unwrap()));
    }
}

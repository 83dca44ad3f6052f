//! Scenario scripts.
//!
//! One directive per line, `#` starts a comment:
//!
//! ```text
//! at <ms> set <env-field> <value>
//! at <ms> ramp <env-field> <value> over <ms>
//! at <ms> link latency_ms|drop_prob|bit_error_prob <value>
//! at <ms> link connect|disconnect
//! at <ms> expect <probe> <op> <value> [within <ms>]
//! ```
//!
//! `<op>` is one of `== != < <= > >=`. `<value>` is a number, `--` for an
//! absent reading, or (for display probes) a bare word or a double-quoted
//! string.

use std::fmt;
use std::str::FromStr;

use crate::envmodel::{EnvChange, EnvEvent, EnvField, EnvTimeline};

use super::probe::Probe;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkParam {
    LatencyMs,
    DropProb,
    BitErrorProb,
}

impl LinkParam {
    pub fn name(self) -> &'static str {
        match self {
            LinkParam::LatencyMs => "latency_ms",
            LinkParam::DropProb => "drop_prob",
            LinkParam::BitErrorProb => "bit_error_prob",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkAction {
    Set(LinkParam, f64),
    Connect,
    Disconnect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

impl FromStr for CmpOp {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "==" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return Err(()),
        })
    }
}

/// Right-hand side of an expectation.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Number(f64),
    Text(String),
    Absent,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Number(n) => write!(f, "{n}"),
            Expected::Text(s) => write!(f, "{s:?}"),
            Expected::Absent => f.write_str("--"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub probe: Probe,
    pub op: CmpOp,
    pub expected: Expected,
    /// Window length; `None` means the single tick `at_ms`.
    pub within_ms: Option<u64>,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.probe, self.op.symbol(), self.expected)?;
        if let Some(w) = self.within_ms {
            write!(f, " within {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Env(EnvChange),
    Link(LinkAction),
    Expect(Expectation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioEvent {
    pub at_ms: u64,
    /// 1-based source line, 0 for events built in code.
    pub line: usize,
    pub action: Action,
}

/// Parsed, validated and time-sorted scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    events: Vec<ScenarioEvent>,
    timeline: EnvTimeline,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_scenario(text)
    }

    /// Builds a scenario from events constructed in code.
    pub fn from_events(mut events: Vec<ScenarioEvent>) -> Result<Self, ParseError> {
        events.sort_by_key(|e| e.at_ms);
        let env_events = events
            .iter()
            .filter_map(|e| match e.action {
                Action::Env(change) => Some(EnvEvent {
                    at_ms: e.at_ms,
                    change,
                }),
                _ => None,
            })
            .collect();
        let timeline = EnvTimeline::new(env_events).map_err(|err| ParseError {
            line: 0,
            reason: err.to_string(),
        })?;
        Ok(Self { events, timeline })
    }

    pub fn events(&self) -> &[ScenarioEvent] {
        &self.events
    }

    pub fn timeline(&self) -> &EnvTimeline {
        &self.timeline
    }

    pub fn expectations(&self) -> impl Iterator<Item = (&ScenarioEvent, &Expectation)> {
        self.events.iter().filter_map(|e| match &e.action {
            Action::Expect(x) => Some((e, x)),
            _ => None,
        })
    }
}

/// Drops a trailing `#` comment that is not inside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

struct LineParser<'a> {
    line: usize,
    rest: &'a str,
}

impl<'a> LineParser<'a> {
    fn err(&self, reason: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next_token(&mut self) -> Option<&'a str> {
        let s = self.rest.trim_start();
        if s.is_empty() {
            self.rest = s;
            return None;
        }
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        self.rest = &s[end..];
        Some(&s[..end])
    }

    fn expect_token(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.next_token()
            .ok_or_else(|| self.err(format!("missing {what}")))
    }

    /// A double-quoted string or a bare token.
    fn value_token(&mut self) -> Result<(String, bool), ParseError> {
        let s = self.rest.trim_start();
        if let Some(body) = s.strip_prefix('"') {
            let end = body
                .find('"')
                .ok_or_else(|| self.err("unterminated string"))?;
            self.rest = &body[end + 1..];
            return Ok((body[..end].to_string(), true));
        }
        Ok((self.expect_token("value")?.to_string(), false))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.next_token() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected `{t}`"))),
        }
    }

    fn number(&self, tok: &str, what: &str) -> Result<f64, ParseError> {
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("invalid {what} `{tok}`")))
    }

    fn millis(&self, tok: &str, what: &str) -> Result<u64, ParseError> {
        tok.parse::<u64>()
            .map_err(|_| self.err(format!("invalid {what}")))
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: idx + 1,
            rest: content,
        };
        if p.next_token() != Some("at") {
            return Err(p.err("expected `at <ms>`"));
        }
        let at_ms = {
            let tok = p.expect_token("time")?;
            p.millis(tok, "time")?
        };
        let action = match p.expect_token("directive")? {
            "set" => parse_set(&mut p)?,
            "ramp" => parse_ramp(&mut p)?,
            "link" => parse_link(&mut p)?,
            "expect" => parse_expect(&mut p)?,
            other => return Err(p.err(format!("unknown directive `{other}`"))),
        };
        p.finish()?;
        events.push(ScenarioEvent {
            at_ms,
            line: idx + 1,
            action,
        });
    }
    Scenario::from_events(events)
}

fn env_field(p: &mut LineParser<'_>) -> Result<EnvField, ParseError> {
    let tok = p.expect_token("environment field")?;
    tok.parse::<EnvField>().map_err(|e| p.err(e.to_string()))
}

fn parse_set(p: &mut LineParser<'_>) -> Result<Action, ParseError> {
    let field = env_field(p)?;
    let tok = p.expect_token("value")?;
    let value = p.number(tok, "value")?;
    field.validate(value).map_err(|e| p.err(e.to_string()))?;
    Ok(Action::Env(EnvChange::Set { field, value }))
}

fn parse_ramp(p: &mut LineParser<'_>) -> Result<Action, ParseError> {
    let field = env_field(p)?;
    if !field.is_rampable() {
        return Err(p.err(format!("{field} cannot be ramped")));
    }
    let tok = p.expect_token("value")?;
    let target = p.number(tok, "value")?;
    field.validate(target).map_err(|e| p.err(e.to_string()))?;
    if p.next_token() != Some("over") {
        return Err(p.err("expected `over <ms>`"));
    }
    let tok = p.expect_token("ramp duration")?;
    let over_ms = p.millis(tok, "ramp duration")?;
    Ok(Action::Env(EnvChange::Ramp {
        field,
        target,
        over_ms,
    }))
}

fn parse_link(p: &mut LineParser<'_>) -> Result<Action, ParseError> {
    let param = match p.expect_token("link parameter")? {
        "connect" => return Ok(Action::Link(LinkAction::Connect)),
        "disconnect" => return Ok(Action::Link(LinkAction::Disconnect)),
        "latency_ms" => LinkParam::LatencyMs,
        "drop_prob" => LinkParam::DropProb,
        "bit_error_prob" => LinkParam::BitErrorProb,
        other => return Err(p.err(format!("unknown link parameter `{other}`"))),
    };
    let tok = p.expect_token("value")?;
    let value = match param {
        LinkParam::LatencyMs => p.millis(tok, "latency")? as f64,
        _ => {
            let v = p.number(tok, "probability")?;
            if !(0.0..=1.0).contains(&v) {
                return Err(p.err(format!("{} must be within [0, 1]", param.name())));
            }
            v
        }
    };
    Ok(Action::Link(LinkAction::Set(param, value)))
}

fn parse_expect(p: &mut LineParser<'_>) -> Result<Action, ParseError> {
    let probe_tok = p.expect_token("probe")?;
    let probe: Probe = probe_tok
        .parse()
        .map_err(|_| p.err(format!("unknown probe `{probe_tok}`")))?;
    let op_tok = p.expect_token("operator")?;
    let op: CmpOp = op_tok
        .parse()
        .map_err(|_| p.err(format!("invalid operator `{op_tok}`")))?;
    let (value, quoted) = p.value_token()?;

    let expected = if probe.is_text() {
        if !op.is_equality() {
            return Err(p.err("display probes only support == and !="));
        }
        Expected::Text(value)
    } else if !quoted && value == "--" {
        Expected::Absent
    } else if quoted {
        return Err(p.err(format!("{probe} takes a number")));
    } else {
        Expected::Number(p.number(&value, "value")?)
    };

    let within_ms = match p.next_token() {
        None => None,
        Some("within") => {
            let tok = p.expect_token("window")?;
            Some(p.millis(tok, "window")?)
        }
        Some(t) => return Err(p.err(format!("unexpected `{t}`"))),
    };
    Ok(Action::Expect(Expectation {
        probe,
        op,
        expected,
        within_ms,
    }))
}

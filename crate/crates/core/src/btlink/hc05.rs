use std::fmt;
use std::str::FromStr;

/// Baud rates the module's `AT+UART` command accepts.
pub const SUPPORTED_BAUDS: [u32; 10] = [
    4800, 9600, 19200, 38400, 57600, 115_200, 230_400, 460_800, 921_600, 1_382_400,
];
pub const DEFAULT_BAUD: u32 = 9600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Slave = 0,
    Master = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    AtMode,
    DataMode,
}

/// 48-bit Bluetooth device address, written the HC-05 way: `NAP:UAP:LAP` in hex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BtAddr(u64);

impl BtAddr {
    pub const fn new(raw: u64) -> Self {
        Self(raw & 0xFFFF_FFFF_FFFF)
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Display for BtAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nap = (self.0 >> 32) & 0xFFFF;
        let uap = (self.0 >> 24) & 0xFF;
        let lap = self.0 & 0xFF_FFFF;
        write!(f, "{nap:04x}:{uap:02x}:{lap:06x}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed module address `{0}`")]
pub struct AddrParseError(String);

impl FromStr for BtAddr {
    type Err = AddrParseError;

    /// Accepts `NAP:UAP:LAP` or `NAP,UAP,LAP` (the form `AT+BIND` takes).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AddrParseError(s.to_string());
        let parts: Vec<&str> = s.split([':', ',']).collect();
        let [nap, uap, lap] = parts.as_slice() else {
            return Err(err());
        };
        let parse = |p: &str, width: usize| {
            if p.is_empty() || p.len() > width {
                return Err(err());
            }
            u64::from_str_radix(p, 16).map_err(|_| err())
        };
        let raw = (parse(nap, 4)? << 32) | (parse(uap, 2)? << 24) | parse(lap, 6)?;
        Ok(BtAddr(raw))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hc05Config {
    pub role: Role,
    pub baud: u32,
    pub bound_addr: Option<BtAddr>,
    pub own_addr: BtAddr,
    pub mode: Mode,
}

impl Hc05Config {
    /// Factory state: slave, 9600 baud, unbound, in AT mode.
    pub fn factory(own_addr: BtAddr) -> Self {
        Self {
            role: Role::Slave,
            baud: DEFAULT_BAUD,
            bound_addr: None,
            own_addr,
            mode: Mode::AtMode,
        }
    }
}

pub const OK: &str = "OK\r\n";
pub const ERROR: &str = "ERROR:(0)\r\n";

/// An HC-05 module seen from its UART side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hc05 {
    config: Hc05Config,
}

impl Hc05 {
    pub fn new(config: Hc05Config) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &Hc05Config {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    /// Equivalent of holding the EN/KEY pin high across a power cycle.
    pub fn enter_at_mode(&mut self) {
        self.config.mode = Mode::AtMode;
    }

    pub fn enter_data_mode(&mut self) {
        self.config.mode = Mode::DataMode;
    }

    /// Executes one AT command line. In data mode the text is payload, not a
    /// command, so there is no response.
    pub fn at_command(&mut self, command: &str) -> Option<String> {
        if self.config.mode != Mode::AtMode {
            return None;
        }
        Some(self.execute(command.trim_end_matches(['\r', '\n'])))
    }

    fn execute(&mut self, cmd: &str) -> String {
        let Some(rest) = cmd.strip_prefix("AT") else {
            return ERROR.to_string();
        };
        if rest.is_empty() {
            return OK.to_string();
        }
        let Some(rest) = rest.strip_prefix('+') else {
            return ERROR.to_string();
        };
        let (name, arg) = match rest.split_once('=') {
            Some((n, a)) => (n, Some(a)),
            None => (rest, None),
        };
        let query = name.ends_with('?') && arg.is_none();
        let name = name.trim_end_matches('?');

        match (name, query, arg) {
            ("ROLE", true, _) => reply(&format!("+ROLE:{}", self.config.role as u8)),
            ("ROLE", false, Some("0")) => self.update(|c| c.role = Role::Slave),
            ("ROLE", false, Some("1")) => self.update(|c| c.role = Role::Master),
            ("UART", true, _) => reply(&format!("+UART:{},0,0", self.config.baud)),
            ("UART", false, Some(a)) => match parse_uart(a) {
                Some(baud) => self.update(|c| c.baud = baud),
                None => ERROR.to_string(),
            },
            ("BIND", true, _) => {
                let addr = self
                    .config
                    .bound_addr
                    .map_or_else(|| "0:0:0".to_string(), |a| a.to_string());
                reply(&format!("+BIND:{addr}"))
            }
            ("BIND", false, Some(a)) => match a.parse::<BtAddr>() {
                Ok(addr) => self.update(|c| c.bound_addr = Some(addr)),
                Err(_) => ERROR.to_string(),
            },
            ("ADDR", true, _) => reply(&format!("+ADDR:{}", self.config.own_addr)),
            _ => ERROR.to_string(),
        }
    }

    fn update(&mut self, f: impl FnOnce(&mut Hc05Config)) -> String {
        f(&mut self.config);
        OK.to_string()
    }
}

fn reply(line: &str) -> String {
    format!("{line}\r\n{OK}")
}

/// `<baud>,<stop>,<parity>`; only 8N1 (`,0,0`) is supported.
fn parse_uart(arg: &str) -> Option<u32> {
    let mut parts = arg.split(',');
    let baud: u32 = parts.next()?.parse().ok()?;
    let stop = parts.next()?;
    let parity = parts.next()?;
    if parts.next().is_some() || stop != "0" || parity != "0" {
        return None;
    }
    SUPPORTED_BAUDS.contains(&baud).then_some(baud)
}

/// Pairing rule: one master and one slave in data mode at the same baud,
/// and the master either unbound or bound to the slave's address.
pub fn try_connect(a: &Hc05Config, b: &Hc05Config) -> bool {
    if a.mode != Mode::DataMode || b.mode != Mode::DataMode || a.baud != b.baud {
        return false;
    }
    let (master, slave) = match (a.role, b.role) {
        (Role::Master, Role::Slave) => (a, b),
        (Role::Slave, Role::Master) => (b, a),
        _ => return false,
    };
    master
        .bound_addr
        .is_none_or(|bound| bound == slave.own_addr)
}

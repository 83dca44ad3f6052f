//! Configures two HC-05 modules over AT commands the way the master and slave
//! are set up, then checks which role/baud combinations pair.
//!
//! ```bash
//! cargo run -p greenhouse-link --example hc05_pairing
//! ```

use greenhouse_link::btlink::{try_connect, BtAddr, Hc05, Hc05Config, Mode, Role};

fn show(name: &str, module: &mut Hc05, cmd: &str) {
    let resp = module.at_command(cmd);
    let resp = resp
        .as_deref()
        .map_or("<no response>".to_string(), |r| r.replace("\r\n", "\\r\\n"));
    println!("{name:>6} > {cmd:<24} < {resp}");
}

fn main() {
    let master_addr: BtAddr = "98d3:31:30a1b2".parse().unwrap();
    let slave_addr: BtAddr = "98d3:31:30c3d4".parse().unwrap();

    let mut master = Hc05::new(Hc05Config::factory(master_addr));
    let mut slave = Hc05::new(Hc05Config::factory(slave_addr));

    for cmd in [
        "AT",
        "AT+ROLE?",
        "AT+ROLE=1",
        "AT+ROLE?",
        "AT+UART=9600,0,0",
        "AT+BIND=98d3,31,30c3d4",
        "AT+BIND?",
        "AT+FOO",
    ] {
        show("master", &mut master, cmd);
    }
    for cmd in ["AT", "AT+ROLE=0", "AT+ADDR?"] {
        show("slave", &mut slave, cmd);
    }

    master.enter_data_mode();
    slave.enter_data_mode();
    // in data mode the text is payload, so the module stays silent
    show("master", &mut master, "AT+ROLE=0");
    println!("\npaired: {}", try_connect(master.config(), slave.config()));

    let cfg = |role, baud| Hc05Config {
        role,
        baud,
        bound_addr: None,
        own_addr: slave_addr,
        mode: Mode::DataMode,
    };
    println!("\n{:<28} pairs", "combination");
    for (label, a, b) in [
        (
            "master 9600 + slave 9600",
            cfg(Role::Master, 9600),
            cfg(Role::Slave, 9600),
        ),
        (
            "master 9600 + master 9600",
            cfg(Role::Master, 9600),
            cfg(Role::Master, 9600),
        ),
        (
            "slave 9600 + slave 9600",
            cfg(Role::Slave, 9600),
            cfg(Role::Slave, 9600),
        ),
        (
            "master 9600 + slave 4800",
            cfg(Role::Master, 9600),
            cfg(Role::Slave, 4800),
        ),
    ] {
        println!("{label:<28} {}", try_connect(&a, &b));
    }
}

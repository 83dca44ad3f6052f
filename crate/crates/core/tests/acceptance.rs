//! Exit criteria for the whole system. Runs as a plain binary so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use greenhouse_link::btlink::{try_connect, BtAddr, Direction, Hc05Config, Mode, Role};
use greenhouse_link::greennode::field_value;
use greenhouse_link::rednode::led_count;
use greenhouse_link::simharness::{run, run_to_string, RunConfig, Scenario, Simulation};
use greenhouse_link::wireproto::{encode_frame, Decoder, FieldId, Frame};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

/// Wire image built by hand from the format description, independent of the encoder.
fn oracle_bytes(field: u8, seq: u8, value: i16) -> [u8; 6] {
    let v = value as u16;
    let lo = (v & 0xFF) as u8;
    let hi = (v >> 8) as u8;
    [0xAA, field, seq, lo, hi, field ^ seq ^ lo ^ hi]
}

fn codec_round_trip() -> Outcome {
    let start = Instant::now();
    let mut failures = 0u32;
    let mut checked = 0u32;
    let mut cases: Vec<(FieldId, i16)> = (i16::MIN..=i16::MAX)
        .map(|v| (FieldId::Temperature, v))
        .collect();
    cases.extend([(FieldId::Rain, 0), (FieldId::Rain, 1)]);
    for (i, (field, value)) in cases.into_iter().enumerate() {
        let frame = Frame::new(field, i as u8, value).expect("in range");
        let bytes = encode_frame(&frame).expect("valid frame");
        let mut dec = Decoder::new();
        let got = dec.push_all(&bytes);
        checked += 1;
        if bytes != oracle_bytes(field as u8, i as u8, value)
            || got != vec![frame]
            || dec.rejected_bytes() != 0
        {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && checked == 65_538 && elapsed < Duration::from_secs(5),
        format!("{checked} frames, {failures} failures, {elapsed:.2?} (limit 5 s)"),
    )
}

fn max_in_window(times: &[u64], window_ms: u64) -> usize {
    // times are sorted; two-pointer sweep over all windows [t, t + window)
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..times.len() {
        while times[hi] - times[lo] >= window_ms {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

fn throughput_bound() -> Outcome {
    let mut sim = Simulation::new(Scenario::default(), RunConfig::with_duration(10_000)).unwrap();
    sim.channel_mut().record_deliveries();
    let mut sink = std::io::sink();
    while sim.tick(&mut sink).unwrap() {}
    let times: Vec<u64> = sim.channel().deliveries().iter().map(|d| d.at_ms).collect();
    let run_max = max_in_window(&times, 1000);

    // same bound with the sender saturating the wire
    let mut ch = greenhouse_link::btlink::Channel::new(
        9600,
        greenhouse_link::btlink::LinkImpairments {
            connected: true,
            ..Default::default()
        },
        1,
    );
    ch.record_deliveries();
    ch.send_bytes(Direction::MasterToSlave, &vec![0u8; 20_000], 0);
    ch.poll_receive(Direction::MasterToSlave, u64::MAX);
    let sat: Vec<u64> = ch.deliveries().iter().map(|d| d.at_ms).collect();
    let sat_max = max_in_window(&sat, 1000);

    outcome(
        run_max <= 960 && sat_max <= 960,
        format!("10 s run peak {run_max} B/s, saturated sender peak {sat_max} B/s (limit 960)"),
    )
}

fn single_datum() -> Outcome {
    let scenario = Scenario::default();
    let mut sim = Simulation::new(scenario, RunConfig::with_duration(10_000)).unwrap();
    sim.channel_mut().record_deliveries();
    let mut trace = Vec::new();
    sim.configure(&mut trace).unwrap();
    while sim.tick(&mut trace).unwrap() {}
    let trace = String::from_utf8(trace).unwrap();

    let mut per_tick: BTreeMap<u64, Vec<Frame>> = BTreeMap::new();
    for line in trace.lines().filter(|l| l.contains(" GREEN TX_FRAME ")) {
        let kv: BTreeMap<&str, &str> = line
            .split_whitespace()
            .filter_map(|tok| tok.split_once('='))
            .collect();
        let t: u64 = kv["t"].parse().unwrap();
        let frame = Frame::new(
            FieldId::from_byte(kv["field"].parse().unwrap()).unwrap(),
            kv["seq"].parse().unwrap(),
            kv["value"].parse().unwrap(),
        )
        .unwrap();
        per_tick.entry(t).or_default().push(frame);
    }
    let expected_ticks: Vec<u64> = (0..=10_000).step_by(200).collect();
    let ticks_ok = per_tick.keys().copied().eq(expected_ticks.iter().copied())
        && per_tick.values().all(|v| v.len() == 1);

    // each frame's six bytes arrive back to back and finish before the next frame is sent
    let deliveries = sim.channel().deliveries();
    let sent: Vec<(u64, Frame)> = per_tick.iter().map(|(&t, v)| (t, v[0])).collect();
    let mut wire_ok = true;
    for (k, chunk) in deliveries.chunks(6).enumerate() {
        let (sent_at, frame) = sent[k];
        let bytes: Vec<u8> = chunk.iter().map(|d| d.byte).collect();
        let next_send = sent.get(k + 1).map_or(u64::MAX, |s| s.0);
        wire_ok &= bytes == encode_frame(&frame).unwrap()
            && chunk.iter().all(|d| d.at_ms >= sent_at)
            && chunk.last().unwrap().at_ms < next_send;
    }
    outcome(
        ticks_ok && wire_ok,
        format!(
            "{} transmit ticks, {} frames, wire contiguous={wire_ok}",
            expected_ticks.len(),
            per_tick.values().map(Vec::len).sum::<usize>()
        ),
    )
}

fn alert_latency() -> Outcome {
    let scenario =
        Scenario::parse("at 5000 set raining 1\nat 5000 expect red.buzzer == 1 within 1500")
            .unwrap();
    let mut passed = 0;
    let mut worst = 0;
    for seed in 1..=100 {
        let cfg = RunConfig {
            seed,
            ..RunConfig::with_duration(7000)
        };
        let report = run(scenario.clone(), cfg, &mut std::io::sink()).unwrap();
        if report.all_passed() {
            passed += 1;
            worst = worst.max(report.expectations[0].decided_at_ms.unwrap() - 5000);
        }
    }
    outcome(
        passed == 100,
        format!("{passed}/100 seeds, worst latency {worst} ms (limit 1500)"),
    )
}

fn led_mapping() -> Outcome {
    let counts: Vec<u8> = (0..=4095u16).map(led_count).collect();
    let monotone = counts.windows(2).all(|w| w[0] <= w[1]);
    let attains = (0..=3).all(|n| counts.contains(&n));
    outcome(
        monotone && attains,
        format!("monotone={monotone}, attains 0..=3={attains}"),
    )
}

fn corruption_resilience() -> Outcome {
    let clear_at = 60_000;
    // two field cycles plus the wire time of one frame
    let deadline = clear_at + 2 * 1000 + 7;
    // every field changes the moment the link clears, so stale values cannot pass
    let scenario = Scenario::parse(&format!(
        "at 0 ramp temperature_c 30 over {clear_at}\n\
         at {clear_at} link bit_error_prob 0\n\
         at {clear_at} set temperature_c 33\n\
         at {clear_at} set humidity_pct 71\n\
         at {clear_at} set soil_moisture_frac 0.2\n\
         at {clear_at} set raining 1\n\
         at {clear_at} set obstacle_distance_cm 42"
    ))
    .unwrap();
    let mut ok_seeds = 0;
    let mut bad_frames = 0;
    let mut worst = 0;
    for seed in 1..=20 {
        let cfg = RunConfig {
            seed,
            bit_error_prob: 0.01,
            ..RunConfig::with_duration(deadline + 100)
        };
        let mut sim = Simulation::new(scenario.clone(), cfg).unwrap();
        let mut trace = Vec::new();
        sim.run_until(clear_at, &mut trace).unwrap();
        let mut converged_at = None;
        while sim.tick(&mut trace).unwrap() {
            let t = sim.now_ms().unwrap();
            // compare against what the master currently measures, so a partly refreshed slave does not count
            let readings = *sim.green().readings().unwrap();
            let all_match = FieldId::ALL
                .iter()
                .all(|&f| sim.red().value(f) == Some(field_value(&readings, f)));
            if all_match && converged_at.is_none() {
                converged_at = Some(t);
            }
            if t >= deadline {
                break;
            }
        }
        let trace = String::from_utf8(trace).unwrap();
        let invalid = trace
            .lines()
            .filter(|l| l.contains(" RED RX_FRAME "))
            .filter(|l| {
                let kv: BTreeMap<&str, &str> = l
                    .split_whitespace()
                    .filter_map(|t| t.split_once('='))
                    .collect();
                let field = kv["field"].parse::<u8>().ok().and_then(FieldId::from_byte);
                let value = kv["value"].parse::<i16>().ok();
                match (field, value) {
                    (Some(f), Some(v)) => !f.accepts(v),
                    _ => true,
                }
            })
            .count();
        bad_frames += invalid;
        let corrupted = sim
            .channel()
            .stats(Direction::MasterToSlave)
            .corrupted_bytes;
        if let Some(t) = converged_at {
            worst = worst.max(t - clear_at);
            let fresh = sim.red().value(FieldId::Temperature) == Some(330)
                && sim.red().value(FieldId::Rain) == Some(1)
                && sim.red().value(FieldId::DistanceTenthsCm) == Some(420);
            if invalid == 0 && t <= deadline && corrupted > 0 && fresh {
                ok_seeds += 1;
            }
        }
    }
    outcome(
        ok_seeds == 20 && bad_frames == 0,
        format!("{ok_seeds}/20 seeds, {bad_frames} invalid frames decoded, worst reconvergence {worst} ms (limit 2007)"),
    )
}

fn end_to_end() -> Outcome {
    let mut sim = Simulation::new(Scenario::default(), RunConfig::with_duration(3000)).unwrap();
    sim.run_until(3000, &mut std::io::sink()).unwrap();
    let mismatched: Vec<String> = FieldId::ALL
        .iter()
        .filter(|&&f| sim.red().value(f) != sim.green().last_sent(f).map(|fr| fr.value))
        .map(|f| f.to_string())
        .collect();
    outcome(
        mismatched.is_empty(),
        format!(
            "t={} mismatched fields: {mismatched:?}",
            sim.now_ms().unwrap()
        ),
    )
}

fn pairing_rules() -> Outcome {
    let addr_m = BtAddr::new(0x1);
    let addr_s = BtAddr::new(0x2);
    let cfg = |role, baud, own, bound| Hc05Config {
        role,
        baud,
        bound_addr: bound,
        own_addr: own,
        mode: Mode::DataMode,
    };
    let cases = [
        (
            cfg(Role::Master, 9600, addr_m, Some(addr_s)),
            cfg(Role::Slave, 9600, addr_s, None),
            true,
        ),
        (
            cfg(Role::Master, 9600, addr_m, None),
            cfg(Role::Master, 9600, addr_s, None),
            false,
        ),
        (
            cfg(Role::Slave, 9600, addr_m, None),
            cfg(Role::Slave, 9600, addr_s, None),
            false,
        ),
        (
            cfg(Role::Master, 9600, addr_m, None),
            cfg(Role::Slave, 4800, addr_s, None),
            false,
        ),
    ];
    let exact = cases
        .iter()
        .filter(|(a, b, want)| try_connect(a, b) == *want && try_connect(b, a) == *want)
        .count();
    outcome(exact == 4, format!("{exact}/4 exact"))
}

fn corpus() -> Vec<(String, Scenario)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let s = Scenario::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), s)
        })
        .collect()
}

fn determinism() -> Outcome {
    let corpus = corpus();
    let mut identical = 0;
    for (_, scenario) in &corpus {
        let cfg = RunConfig {
            seed: 42,
            bit_error_prob: 0.005,
            drop_prob: 0.005,
            snapshot_every_ms: Some(1000),
            ..RunConfig::with_duration(35_000)
        };
        let (_, a) = run_to_string(scenario.clone(), cfg.clone()).unwrap();
        let (_, b) = run_to_string(scenario.clone(), cfg).unwrap();
        if a == b {
            identical += 1;
        }
    }
    outcome(
        identical == corpus.len() && !corpus.is_empty(),
        format!(
            "{identical}/{} scenario traces byte-identical",
            corpus.len()
        ),
    )
}

fn performance() -> Outcome {
    let scenario =
        Scenario::parse("at 0 link bit_error_prob 0.01\nat 0 ramp temperature_c 40 over 60000")
            .unwrap();
    let start = Instant::now();
    let (report, trace) = run_to_string(scenario, RunConfig::with_duration(60_000)).unwrap();
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(1) && report.counters.frames_tx == 301,
        format!(
            "60 s simulated in {elapsed:.2?} ({} trace lines, limit 1 s)",
            trace.lines().count()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("codec round-trip", codec_round_trip),
        ("throughput bound", throughput_bound),
        ("single-datum constraint", single_datum),
        ("alert latency", alert_latency),
        ("LED mapping", led_mapping),
        ("corruption resilience", corruption_resilience),
        ("end-to-end convergence", end_to_end),
        ("pairing rules", pairing_rules),
        ("determinism", determinism),
        ("desk-scale performance", performance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "{} {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

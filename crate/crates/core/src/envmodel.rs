//! Ground-truth environment and the quantizing sensor models of the master node.
//!
//! The environment is a plain value ([`EnvironmentState`]) that evolves over a
//! [`EnvTimeline`] of `set` and `ramp` changes. Sensor models turn a state into
//! the integer readings the firmware would see. Sensor noise is not modeled:
//! the same state always yields the same readings.

use std::fmt;
use std::str::FromStr;

/// Round-trip echo time per centimeter of range, in microseconds (343 m/s).
pub const ECHO_US_PER_CM: f64 = 58.0;
/// Closest and farthest distances the ultrasonic ranger reports.
pub const ULTRASONIC_MIN_CM: f64 = 2.0;
pub const ULTRASONIC_MAX_CM: f64 = 400.0;
/// Full-scale value of the 12-bit soil ADC.
pub const ADC_FULL_SCALE: u16 = 4095;

pub const DHT11_TEMP_RANGE: (i32, i32) = (0, 50);
pub const DHT11_HUM_RANGE: (i32, i32) = (20, 90);

/// Physical conditions around the master node at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentState {
    pub temperature_c: f64,
    pub humidity_pct: f64,
    /// 0 = fully dry, 1 = saturated.
    pub soil_moisture_frac: f64,
    pub raining: bool,
    pub obstacle_distance_cm: f64,
}

impl Default for EnvironmentState {
    fn default() -> Self {
        Self {
            temperature_c: 25.0,
            humidity_pct: 50.0,
            soil_moisture_frac: 0.5,
            raining: false,
            obstacle_distance_cm: 100.0,
        }
    }
}

impl EnvironmentState {
    pub fn get(&self, field: EnvField) -> f64 {
        match field {
            EnvField::TemperatureC => self.temperature_c,
            EnvField::HumidityPct => self.humidity_pct,
            EnvField::SoilMoistureFrac => self.soil_moisture_frac,
            EnvField::Raining => f64::from(u8::from(self.raining)),
            EnvField::ObstacleDistanceCm => self.obstacle_distance_cm,
        }
    }

    /// Stores `value` after validating it against the field's range.
    pub fn set(&mut self, field: EnvField, value: f64) -> Result<(), EnvError> {
        field.validate(value)?;
        match field {
            EnvField::TemperatureC => self.temperature_c = value,
            EnvField::HumidityPct => self.humidity_pct = value,
            EnvField::SoilMoistureFrac => self.soil_moisture_frac = value,
            EnvField::Raining => self.raining = value != 0.0,
            EnvField::ObstacleDistanceCm => self.obstacle_distance_cm = value,
        }
        Ok(())
    }

    /// Quantizes every sensor at once.
    pub fn sample(&self) -> SensorReadings {
        let (temp_c_int, hum_pct_int) = sample_dht11(self);
        SensorReadings {
            temp_c_int,
            hum_pct_int,
            soil_counts: sample_soil(self),
            rain_digital: sample_rain(self),
            echo_us: sample_ultrasonic(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnvError {
    #[error("unknown environment field `{0}`")]
    UnknownField(String),
    #[error("{field} value {value} out of range ({range})")]
    OutOfRange {
        field: EnvField,
        value: f64,
        range: &'static str,
    },
    #[error("{0} cannot be ramped")]
    NotRampable(EnvField),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvField {
    TemperatureC,
    HumidityPct,
    SoilMoistureFrac,
    Raining,
    ObstacleDistanceCm,
}

impl EnvField {
    pub const ALL: [EnvField; 5] = [
        EnvField::TemperatureC,
        EnvField::HumidityPct,
        EnvField::SoilMoistureFrac,
        EnvField::Raining,
        EnvField::ObstacleDistanceCm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvField::TemperatureC => "temperature_c",
            EnvField::HumidityPct => "humidity_pct",
            EnvField::SoilMoistureFrac => "soil_moisture_frac",
            EnvField::Raining => "raining",
            EnvField::ObstacleDistanceCm => "obstacle_distance_cm",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn is_rampable(self) -> bool {
        self != EnvField::Raining
    }

    pub fn validate(self, value: f64) -> Result<(), EnvError> {
        let (ok, range) = match self {
            EnvField::TemperatureC => (value.is_finite(), "finite"),
            EnvField::HumidityPct => ((0.0..=100.0).contains(&value), "0..=100"),
            EnvField::SoilMoistureFrac => ((0.0..=1.0).contains(&value), "0..=1"),
            EnvField::Raining => (value == 0.0 || value == 1.0, "0 or 1"),
            EnvField::ObstacleDistanceCm => (value.is_finite() && value >= 0.0, ">= 0"),
        };
        if ok {
            Ok(())
        } else {
            Err(EnvError::OutOfRange {
                field: self,
                value,
                range,
            })
        }
    }
}

impl fmt::Display for EnvField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvField {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EnvField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| EnvError::UnknownField(s.to_string()))
    }
}

/// One scheduled change to the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvChange {
    Set {
        field: EnvField,
        value: f64,
    },
    /// Linear move from whatever the field holds at `at_ms` to `target`.
    Ramp {
        field: EnvField,
        target: f64,
        over_ms: u64,
    },
}

impl EnvChange {
    pub fn field(&self) -> EnvField {
        match *self {
            EnvChange::Set { field, .. } | EnvChange::Ramp { field, .. } => field,
        }
    }

    fn validate(&self) -> Result<(), EnvError> {
        match *self {
            EnvChange::Set { field, value } => field.validate(value),
            EnvChange::Ramp { field, target, .. } => {
                if !field.is_rampable() {
                    return Err(EnvError::NotRampable(field));
                }
                field.validate(target)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvEvent {
    pub at_ms: u64,
    pub change: EnvChange,
}

/// Validated, time-sorted list of environment changes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnvTimeline {
    events: Vec<EnvEvent>,
}

#[derive(Debug, Clone, Copy)]
struct ActiveRamp {
    start_ms: u64,
    start_value: f64,
    target: f64,
    over_ms: u64,
}

impl ActiveRamp {
    fn value_at(&self, t_ms: u64) -> f64 {
        let elapsed = t_ms.saturating_sub(self.start_ms);
        if elapsed >= self.over_ms {
            return self.target;
        }
        let frac = elapsed as f64 / self.over_ms as f64;
        self.start_value + (self.target - self.start_value) * frac
    }
}

impl EnvTimeline {
    /// Validates every change and sorts by time, keeping insertion order for ties.
    pub fn new(mut events: Vec<EnvEvent>) -> Result<Self, EnvError> {
        for e in &events {
            e.change.validate()?;
        }
        events.sort_by_key(|e| e.at_ms);
        Ok(Self { events })
    }

    pub fn events(&self) -> &[EnvEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// State at `t_ms`: every event with `at_ms <= t_ms` applied in order,
    /// with ramps interpolated linearly. A later `set` cancels a running ramp.
    pub fn env_at(&self, t_ms: u64) -> EnvironmentState {
        let mut state = EnvironmentState::default();
        let mut ramps: [Option<ActiveRamp>; 5] = [None; 5];

        for event in self.events.iter().take_while(|e| e.at_ms <= t_ms) {
            let field = event.change.field();
            let slot = &mut ramps[field.index()];
            // settle a ramp that was still running when this event fired
            if let Some(r) = slot.take() {
                state
                    .set(field, r.value_at(event.at_ms))
                    .expect("interpolated value stays in range");
            }
            match event.change {
                EnvChange::Set { value, .. } => {
                    state.set(field, value).expect("validated on construction");
                }
                EnvChange::Ramp {
                    target, over_ms, ..
                } => {
                    *slot = Some(ActiveRamp {
                        start_ms: event.at_ms,
                        start_value: state.get(field),
                        target,
                        over_ms,
                    });
                }
            }
        }

        for field in EnvField::ALL {
            if let Some(r) = ramps[field.index()] {
                let v = r.value_at(t_ms);
                // interpolation between two in-range values is in range,
                // up to float rounding at the bounds
                let v = match field {
                    EnvField::HumidityPct => v.clamp(0.0, 100.0),
                    EnvField::SoilMoistureFrac => v.clamp(0.0, 1.0),
                    EnvField::ObstacleDistanceCm => v.max(0.0),
                    _ => v,
                };
                state.set(field, v).expect("clamped to range");
            }
        }
        state
    }
}

/// Integer readings as the master firmware sees them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SensorReadings {
    pub temp_c_int: i32,
    pub hum_pct_int: i32,
    pub soil_counts: u16,
    pub rain_digital: bool,
    pub echo_us: u32,
}

impl SensorReadings {
    /// Obstacle distance in tenths of a centimeter, as the echo timer resolves it.
    pub fn distance_tenths_cm(&self) -> u32 {
        echo_to_cm(self.echo_us)
    }
}

/// Round-half-away-from-zero then clamp.
fn round_clamped(v: f64, (lo, hi): (i32, i32)) -> i32 {
    let r = v.round();
    if r.is_nan() {
        return lo;
    }
    r.clamp(f64::from(lo), f64::from(hi)) as i32
}

/// DHT11-class temperature and humidity, whole units, clamped to the part's range.
pub fn sample_dht11(env: &EnvironmentState) -> (i32, i32) {
    (
        round_clamped(env.temperature_c, DHT11_TEMP_RANGE),
        round_clamped(env.humidity_pct, DHT11_HUM_RANGE),
    )
}

/// Soil probe on a 12-bit ADC; wet reads high.
pub fn sample_soil(env: &EnvironmentState) -> u16 {
    let frac = env.soil_moisture_frac.clamp(0.0, 1.0);
    (frac * f64::from(ADC_FULL_SCALE)).round() as u16
}

pub fn sample_rain(env: &EnvironmentState) -> bool {
    env.raining
}

/// Echo pulse width in microseconds. The timer runs at 1 MHz (72 MHz core
/// clock, prescaler 71), so one count is one microsecond.
pub fn sample_ultrasonic(env: &EnvironmentState) -> u32 {
    let d = if env.obstacle_distance_cm.is_nan() {
        ULTRASONIC_MAX_CM
    } else {
        env.obstacle_distance_cm
            .clamp(ULTRASONIC_MIN_CM, ULTRASONIC_MAX_CM)
    };
    (d * ECHO_US_PER_CM).round() as u32
}

/// Echo time back to distance, in tenths of a centimeter.
pub fn echo_to_cm(echo_us: u32) -> u32 {
    // round(echo * 10 / 58) in integers, halves rounding up
    let num = u64::from(echo_us) * 10;
    ((2 * num + 58) / 116) as u32
}

use std::fmt;

pub const DISPLAY_LINES: usize = 4;
/// 128 px wide panel with a 6 px font.
pub const DISPLAY_COLS: usize = 21;

/// Text model of a 128x64 OLED: four lines, overflow truncated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DisplayBuffer {
    lines: [String; DISPLAY_LINES],
}

impl DisplayBuffer {
    pub fn from_lines<S: AsRef<str>>(lines: [S; DISPLAY_LINES]) -> Self {
        let mut d = Self::default();
        for (i, l) in lines.iter().enumerate() {
            d.set_line(i, l.as_ref());
        }
        d
    }

    /// Panics if `index` is not a line number in `0..4`.
    pub fn set_line(&mut self, index: usize, text: &str) {
        self.lines[index] = text.chars().take(DISPLAY_COLS).collect();
    }

    pub fn line(&self, index: usize) -> &str {
        &self.lines[index]
    }

    pub fn lines(&self) -> &[String; DISPLAY_LINES] {
        &self.lines
    }
}

impl fmt::Display for DisplayBuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lines.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            f.write_str(l)?;
        }
        Ok(())
    }
}

/// Formats a tenths-scaled integer with one decimal, e.g. `-5` as `-0.5`.
pub(crate) fn tenths(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    let a = v.unsigned_abs();
    format!("{sign}{}.{}", a / 10, a % 10)
}

/// Soil ADC counts as a whole percentage, halves rounded up.
pub(crate) fn soil_pct(counts: u16) -> u32 {
    (u32::from(counts) * 200 + 4095) / 8190
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncates_without_wrapping() {
        let mut d = DisplayBuffer::default();
        d.set_line(0, "0123456789012345678901234");
        assert_eq!(d.line(0), "012345678901234567890");
        assert_eq!(d.line(1), "");
    }

    #[test]
    fn tenths_formatting() {
        assert_eq!(tenths(253), "25.3");
        assert_eq!(tenths(0), "0.0");
        assert_eq!(tenths(-5), "-0.5");
        assert_eq!(tenths(-32768), "-3276.8");
    }

    #[test]
    fn soil_percent_rounding() {
        assert_eq!(soil_pct(0), 0);
        assert_eq!(soil_pct(2048), 50);
        assert_eq!(soil_pct(4095), 100);
        for c in 0..=4095u16 {
            let oracle = (f64::from(c) * 100.0 / 4095.0).round() as u32;
            assert_eq!(soil_pct(c), oracle, "counts {c}");
        }
    }
}

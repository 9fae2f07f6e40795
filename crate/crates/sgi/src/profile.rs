//! Piecewise-constant force profiles applied to the two spin branches.

use crate::error::{Error, Result};

/// One constant-force interval [t_start, t_end) with force `f_value` on the
/// spin-up branch (the down branch sees the opposite sign).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub f_value: f64,
}

/// An ordered, contiguous cover of [0, total_time] by constant-force segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceProfile {
    segments: Vec<Segment>,
    total_time: f64,
}

impl ForceProfile {
    /// Build from explicit segments; they must tile [0, T] without gaps,
    /// overlaps, or reordering.
    pub fn from_segments(segments: Vec<Segment>, total_time: f64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "total_time",
                reason: "must be finite and strictly positive",
                value: total_time,
            });
        }
        if segments.is_empty() {
            return Err(Error::InvalidParameter {
                name: "segments",
                reason: "profile needs at least one segment",
                value: 0.0,
            });
        }
        let mut cursor = 0.0;
        for s in &segments {
            if !s.f_value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "f_value",
                    reason: "segment force must be finite",
                    value: s.f_value,
                });
            }
            if (s.t_start - cursor).abs() > 1e-12 * total_time {
                return Err(Error::InvalidParameter {
                    name: "t_start",
                    reason: "segments must be contiguous from 0",
                    value: s.t_start,
                });
            }
            if !(s.t_end > s.t_start) {
                return Err(Error::InvalidParameter {
                    name: "t_end",
                    reason: "segment must have positive duration",
                    value: s.t_end,
                });
            }
            cursor = s.t_end;
        }
        if (cursor - total_time).abs() > 1e-12 * total_time {
            return Err(Error::InvalidParameter {
                name: "segments",
                reason: "segments must cover exactly [0, total_time]",
                value: cursor,
            });
        }
        Ok(ForceProfile { segments, total_time })
    }

    /// The four-region splitter: quarters with signs (+1, -1, -1, +1) * f0.
    /// Both the impulse and the undamped endpoint displacement vanish, so an
    /// undamped run recombines perfectly at `total_time`.
    pub fn balanced4(f0: f64, total_time: f64) -> Result<Self> {
        let q = total_time / 4.0;
        ForceProfile::from_segments(
            vec![
                Segment { t_start: 0.0, t_end: q, f_value: f0 },
                Segment { t_start: q, t_end: 2.0 * q, f_value: -f0 },
                Segment { t_start: 2.0 * q, t_end: 3.0 * q, f_value: -f0 },
                Segment { t_start: 3.0 * q, t_end: total_time, f_value: f0 },
            ],
            total_time,
        )
    }

    /// A single constant-force segment.
    pub fn constant(f0: f64, total_time: f64) -> Result<Self> {
        ForceProfile::from_segments(
            vec![Segment { t_start: 0.0, t_end: total_time, f_value: f0 }],
            total_time,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Force at time t (right-continuous; the last segment owns its endpoint).
    pub fn force_at(&self, t: f64) -> f64 {
        for s in &self.segments {
            if t < s.t_end {
                return s.f_value;
            }
        }
        self.segments.last().map_or(0.0, |s| s.f_value)
    }

    /// Net impulse integral_0^T f dt.
    pub fn impulse(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.f_value * (s.t_end - s.t_start))
            .sum()
    }

    /// Undamped endpoint displacement per unit mass:
    /// integral_0^T f(t') (T - t') dt'.
    pub fn endpoint_displacement_per_mass(&self) -> f64 {
        let t_end = self.total_time;
        self.segments
            .iter()
            .map(|s| {
                let d = s.t_end - s.t_start;
                s.f_value * d * (t_end - 0.5 * (s.t_start + s.t_end))
            })
            .sum()
    }

    /// True when both the impulse and the undamped endpoint displacement
    /// vanish, i.e. an undamped run ends where it started with zero velocity.
    pub fn is_balanced(&self, tolerance: f64) -> bool {
        let f_scale: f64 = self
            .segments
            .iter()
            .map(|s| s.f_value.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let t = self.total_time;
        self.impulse().abs() <= tolerance * f_scale * t
            && self.endpoint_displacement_per_mass().abs() <= tolerance * f_scale * t * t
    }

    /// Segment list clipped to [0, t], preserving contiguity.
    pub fn clipped(&self, t: f64) -> Result<Vec<Segment>> {
        if !(t > 0.0 && t <= self.total_time * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: "time must lie in (0, total_time]",
                value: t,
            });
        }
        let mut out = Vec::new();
        for s in &self.segments {
            if s.t_start >= t {
                break;
            }
            out.push(Segment {
                t_start: s.t_start,
                t_end: s.t_end.min(t),
                f_value: s.f_value,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced4_is_balanced() {
        let fp = ForceProfile::balanced4(2.5e-24, 1.0e-3).unwrap();
        assert!(fp.is_balanced(1e-12));
        assert_eq!(fp.segments().len(), 4);
        assert_eq!(fp.force_at(0.0), 2.5e-24);
        assert_eq!(fp.force_at(0.3e-3), -2.5e-24);
        assert_eq!(fp.force_at(1.0e-3), 2.5e-24);
    }

    #[test]
    fn constant_profile_is_not_balanced() {
        let fp = ForceProfile::constant(1.0, 2.0).unwrap();
        assert!(!fp.is_balanced(1e-9));
        assert!((fp.impulse() - 2.0).abs() < 1e-15);
        assert!((fp.endpoint_displacement_per_mass() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        let bad_gap = ForceProfile::from_segments(
            vec![
                Segment { t_start: 0.0, t_end: 0.4, f_value: 1.0 },
                Segment { t_start: 0.5, t_end: 1.0, f_value: -1.0 },
            ],
            1.0,
        );
        assert!(bad_gap.is_err());
        let bad_cover = ForceProfile::from_segments(
            vec![Segment { t_start: 0.0, t_end: 0.9, f_value: 1.0 }],
            1.0,
        );
        assert!(bad_cover.is_err());
        let bad_dur = ForceProfile::from_segments(
            vec![Segment { t_start: 0.0, t_end: 0.0, f_value: 1.0 }],
            1.0,
        );
        assert!(bad_dur.is_err());
    }

    #[test]
    fn clipping_respects_bounds() {
        let fp = ForceProfile::balanced4(1.0, 1.0).unwrap();
        let segs = fp.clipped(0.6).unwrap();
        assert_eq!(segs.len(), 3);
        assert!((segs.last().unwrap().t_end - 0.6).abs() < 1e-15);
        assert!(fp.clipped(0.0).is_err());
        assert!(fp.clipped(1.5).is_err());
    }
}

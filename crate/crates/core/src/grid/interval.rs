use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetLabel {
    G1,
    G2,
    #[serde(rename = "mirrored-G1")]
    MirroredG1,
    #[serde(rename = "mirrored-G2")]
    MirroredG2,
    #[serde(rename = "pos-part")]
    PosPart,
    #[serde(rename = "neg-part")]
    NegPart,
    #[serde(rename = "other")]
    Other,
}

impl SetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SetLabel::G1 => "G1",
            SetLabel::G2 => "G2",
            SetLabel::MirroredG1 => "mirrored-G1",
            SetLabel::MirroredG2 => "mirrored-G2",
            SetLabel::PosPart => "pos-part",
            SetLabel::NegPart => "neg-part",
            SetLabel::Other => "other",
        }
    }

    /// Label after mapping through the inverse ladder.
    pub fn mirrored(self) -> SetLabel {
        match self {
            SetLabel::G1 => SetLabel::MirroredG1,
            SetLabel::G2 => SetLabel::MirroredG2,
            other => other,
        }
    }
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "G1" => SetLabel::G1,
            "G2" => SetLabel::G2,
            "mirrored-G1" => SetLabel::MirroredG1,
            "mirrored-G2" => SetLabel::MirroredG2,
            "pos-part" => SetLabel::PosPart,
            "neg-part" => SetLabel::NegPart,
            "other" => SetLabel::Other,
            _ => return Err(Error::Parse(format!("unknown set label {s:?}"))),
        })
    }
}

/// Open interval (lo, hi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }
}

/// Sorted, pairwise-disjoint finite union of open intervals inside a
/// declared window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCollection")]
pub struct IntervalCollection {
    intervals: Vec<Interval>,
    label: SetLabel,
    window: (f64, f64),
}

#[derive(Deserialize)]
struct RawCollection {
    intervals: Vec<Interval>,
    label: SetLabel,
    window: (f64, f64),
}

impl TryFrom<RawCollection> for IntervalCollection {
    type Error = Error;
    fn try_from(r: RawCollection) -> Result<Self> {
        IntervalCollection::new(r.intervals, r.label, r.window)
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    lo: f64,
    hi: f64,
    label: SetLabel,
}

impl IntervalCollection {
    pub fn new(intervals: Vec<Interval>, label: SetLabel, window: (f64, f64)) -> Result<Self> {
        if !(window.0 <= window.1) || !window.0.is_finite() || !window.1.is_finite() {
            return Err(Error::Precondition(format!("bad window {window:?}")));
        }
        for (i, iv) in intervals.iter().enumerate() {
            if !(iv.lo < iv.hi) || !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(Error::Precondition(format!("interval {i} = {iv:?} is empty or not finite")));
            }
            if iv.lo < window.0 || iv.hi > window.1 {
                return Err(Error::Precondition(format!(
                    "interval {i} = {iv:?} outside window {window:?}"
                )));
            }
            if i > 0 && intervals[i - 1].hi > iv.lo {
                return Err(Error::Precondition(format!(
                    "intervals {} and {i} overlap or are unsorted",
                    i - 1
                )));
            }
        }
        Ok(Self {
            intervals,
            label,
            window,
        })
    }

    pub fn empty(label: SetLabel, window: (f64, f64)) -> Self {
        Self {
            intervals: Vec::new(),
            label,
            window,
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn label(&self) -> SetLabel {
        self.label
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        compensated_sum(self.intervals.iter().map(Interval::len))
    }

    pub fn contains(&self, t: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.hi <= t);
        self.intervals.get(i).is_some_and(|iv| iv.contains(t))
    }

    pub fn relabel(mut self, label: SetLabel) -> Self {
        self.label = label;
        self
    }

    /// Set union. Intervals overlapping by a few ulps are snapped so that
    /// they only touch; genuine overlaps are merged.
    pub fn union(&self, other: &IntervalCollection, label: SetLabel) -> IntervalCollection {
        let mut all: Vec<Interval> = self.intervals.iter().chain(&other.intervals).copied().collect();
        all.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(all.len());
        for iv in all {
            if let Some(last) = out.last_mut() {
                if iv.lo < last.hi {
                    let slack = 4.0 * f64::EPSILON * last.hi.abs().max(iv.lo.abs());
                    if last.hi - iv.lo <= slack && iv.hi > last.hi {
                        let lo = last.hi;
                        out.push(Interval::new(lo, iv.hi));
                    } else {
                        last.hi = last.hi.max(iv.hi);
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        let window = (
            self.window.0.min(other.window.0),
            self.window.1.max(other.window.1),
        );
        IntervalCollection {
            intervals: out,
            label,
            window,
        }
    }

    /// Largest gap between consecutive intervals inside [a, b] plus the
    /// uncovered stretches at both ends.
    pub fn max_uncovered(&self, a: f64, b: f64) -> f64 {
        let mut cursor = a;
        let mut worst: f64 = 0.0;
        for iv in &self.intervals {
            if iv.hi <= cursor {
                continue;
            }
            if iv.lo >= b {
                break;
            }
            worst = worst.max(iv.lo - cursor);
            cursor = iv.hi;
        }
        worst.max(b - cursor)
    }

    /// CSV with `# window = lo,hi` and `# label = …` comment lines, then
    /// rows `lo,hi,label`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# window = {:?},{:?}", self.window.0, self.window.1)?;
        writeln!(out, "# label = {}", self.label)?;
        let mut w = csv::Writer::from_writer(&mut out);
        if self.intervals.is_empty() {
            w.write_record(["lo", "hi", "label"])?;
        }
        for iv in &self.intervals {
            w.serialize(CsvRow {
                lo: iv.lo,
                hi: iv.hi,
                label: self.label,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv). Without a window comment
    /// the hull of the intervals is used.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = Vec::new();
        let mut window = None;
        let mut label: Option<SetLabel> = None;
        for line in input.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("label =") {
                    label = Some(v.trim().parse()?);
                }
                if let Some(v) = rest.trim().strip_prefix("window =") {
                    let (a, b) = v
                        .trim()
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("bad window line {line:?}")))?;
                    let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad window {a:?}")))?;
                    let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad window {b:?}")))?;
                    window = Some((a, b));
                }
                continue;
            }
            lines.push(line);
        }
        let body = lines.join("\n");
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut intervals = Vec::new();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row?;
            match label {
                None => label = Some(row.label),
                Some(l) if l != row.label => {
                    return Err(Error::Parse(format!("mixed labels {l} and {}", row.label)));
                }
                _ => {}
            }
            intervals.push(Interval::new(row.lo, row.hi));
        }
        let window = match (window, intervals.first(), intervals.last()) {
            (Some(w), _, _) => w,
            (None, Some(a), Some(b)) => (a.lo, b.hi),
            (None, _, _) => (0.0, 0.0),
        };
        Self::new(intervals, label.unwrap_or(SetLabel::Other), window)
    }
}

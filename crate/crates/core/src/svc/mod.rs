//! The Smith-Volterra-Cantor set SVC(4) and a continuous function that
//! oscillates on its gaps.
//!
//! `S_0 = [0, 1]`; `S_n` removes from the middle of each component of
//! `S_{n-1}` an open interval of length `4^{-n}`. Components of `S_n` have
//! length `(2^n + 1) / 2^{2n+1}`.
//!
//! Everything is held exactly. Up to [`MAX_DEPTH`] every endpoint, gap
//! midpoint and gap quarter point is an integer multiple of `2^-83`, so the
//! model works on [`Dyadic`] numerators in `i128` and converts to
//! [`Rational`] only at the API boundary. Nothing is materialised: levels and
//! gaps are produced lazily by index.

mod function;
mod phase;
mod witness;

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};
use std::ops::{Add, Sub};

use num_rational::Ratio;
use thiserror::Error;

use crate::dd::DoubleDouble;

pub use function::{endpoint_branch, PathologicalFunction};
pub use phase::{phase_integral, PhaseIntegral};
pub use witness::{difference_quotients, witness_pair, DifferenceQuotient, Witness};

pub type Rational = Ratio<i128>;

/// Deepest supported construction level.
pub const MAX_DEPTH: u32 = 40;

const FRAC_BITS: u32 = 83;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvcError {
    #[error("depth {depth} is outside 1..={max}", max = MAX_DEPTH)]
    DepthTooLarge { depth: u32 },
    #[error("level {level} is outside the model (depth {depth})")]
    LevelOutOfRange { level: u32, depth: u32 },
    #[error("{point} is not a component endpoint of the depth-{depth} model")]
    NotCertified { point: String, depth: u32 },
    #[error("no witness at level {level} for a = {point} within depth {depth}")]
    NoWitnessAtDepth {
        level: u32,
        point: String,
        depth: u32,
    },
}

/// `n / 2^83` for an integer `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dyadic(i128);

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic(0);
    pub const ONE: Dyadic = Dyadic(1 << FRAC_BITS);

    /// `2^{-k}`; `k ≤ 83`.
    pub fn pow2_neg(k: u32) -> Self {
        assert!(k <= FRAC_BITS);
        Dyadic(1 << (FRAC_BITS - k))
    }

    pub fn numerator(self) -> i128 {
        self.0
    }

    /// Exact conversion from a rational whose denominator divides `2^83`.
    pub fn from_ratio(r: &Rational) -> Option<Self> {
        let d = *r.denom();
        if d <= 0 || d & (d - 1) != 0 || d > (1 << FRAC_BITS) {
            return None;
        }
        let shift = FRAC_BITS - d.trailing_zeros();
        r.numer().checked_mul(1i128 << shift).map(Dyadic)
    }

    /// Exact conversion from a double, if it is a multiple of `2^-83` in range.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x.abs() > 2.0f64.powi(40) {
            return None;
        }
        let scaled = x * 2f64.powi(FRAC_BITS as i32);
        (scaled.fract() == 0.0).then(|| Dyadic(scaled as i128))
    }

    pub fn to_ratio(self) -> Rational {
        Ratio::new(self.0, 1i128 << FRAC_BITS)
    }

    pub fn to_dd(self) -> DoubleDouble {
        let hi = self.0 as f64;
        let lo = (self.0 - hi as i128) as f64;
        let scale = 2f64.powi(-(FRAC_BITS as i32));
        DoubleDouble::new(hi * scale, lo * scale)
    }

    pub fn to_f64(self) -> f64 {
        self.to_dd().to_f64()
    }

    fn half(self) -> Self {
        debug_assert!(self.0 % 2 == 0);
        Dyadic(self.0 >> 1)
    }

    /// Exact comparison against a finite double.
    pub fn cmp_f64(self, x: f64) -> Ordering {
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp_bits = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        if mant == 0 {
            return self.0.cmp(&0);
        }
        let self_neg = self.0 < 0;
        if self.0 == 0 || self_neg != negative {
            return if negative {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        let mag = self.0.unsigned_abs();
        let k = exp + FRAC_BITS as i32;
        let ord = if k >= 0 {
            match (mant as u128).checked_shl(k as u32) {
                Some(v) if (v >> k as u32) == mant as u128 => mag.cmp(&v),
                _ => Ordering::Less,
            }
        } else {
            // mag vs mant·2^{-sh}: split mant into quotient and remainder.
            let sh = (-k) as u32;
            let mant = mant as u128;
            let (q, rem) = if sh >= 128 {
                (0, mant)
            } else {
                (mant >> sh, mant & ((1u128 << sh) - 1))
            };
            match mag.cmp(&q) {
                Ordering::Equal if rem > 0 => Ordering::Less,
                o => o,
            }
        };
        if negative {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl Add for Dyadic {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dyadic(self.0 + o.0)
    }
}

impl Sub for Dyadic {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dyadic(self.0 - o.0)
    }
}

impl fmt::Display for Dyadic {
    /// Reduced `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_ratio();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId {
    pub level: u32,
    pub index: u64,
}

/// A removed open interval, identified by the level that removed it and its
/// left-to-right index among the `2^{level-1}` gaps of that level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapId {
    pub level: u32,
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub id: ComponentId,
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Component {
    pub fn length(&self) -> Dyadic {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub id: GapId,
    pub a: Dyadic,
    pub b: Dyadic,
}

impl Gap {
    pub fn length(&self) -> Dyadic {
        self.b - self.a
    }

    /// Midpoint `c`.
    pub fn c(&self) -> Dyadic {
        (self.a + self.b).half()
    }

    /// Quarter point `(a + c)/2`.
    pub fn d_left(&self) -> Dyadic {
        (self.a + self.c()).half()
    }

    /// Quarter point `(c + b)/2`.
    pub fn d_right(&self) -> Dyadic {
        (self.c() + self.b).half()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    InGap(GapId),
    /// Inside a deepest-level component; membership in the limit set is
    /// undecided at this depth.
    InComponent(ComponentId),
    /// A gap endpoint, `0` or `1`: a point of the limit set.
    Boundary,
    Outside,
}

/// SVC(4) truncated at a finite depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvcModel {
    depth: u32,
}

/// Alias matching the construction step by name.
pub fn build_svc(depth: u32) -> Result<SvcModel, SvcError> {
    SvcModel::new(depth)
}

impl SvcModel {
    pub fn new(depth: u32) -> Result<Self, SvcError> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(SvcError::DepthTooLarge { depth });
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `(2^n + 1) / 2^{2n+1}`.
    pub fn component_length(level: u32) -> Dyadic {
        assert!(level <= MAX_DEPTH);
        Dyadic(((1i128 << level) + 1) << (FRAC_BITS - 2 * level - 1))
    }

    /// `4^{-n}`.
    pub fn gap_length(level: u32) -> Dyadic {
        assert!((1..=MAX_DEPTH + 1).contains(&level));
        Dyadic::pow2_neg(2 * level)
    }

    pub fn component_count(level: u32) -> u64 {
        1u64 << level
    }

    /// `count × length` of the level-`n` components.
    pub fn measure(level: u32) -> Rational {
        Self::component_length(level).to_ratio() * Rational::from_integer(1i128 << level)
    }

    fn check_level(&self, level: u32, min: u32) -> Result<(), SvcError> {
        if level < min || level > self.depth {
            return Err(SvcError::LevelOutOfRange {
                level,
                depth: self.depth,
            });
        }
        Ok(())
    }

    /// Offset of the right child relative to its parent's left end.
    fn right_shift(level: u32) -> Dyadic {
        Self::component_length(level) + Self::gap_length(level)
    }

    pub fn component(&self, id: ComponentId) -> Result<Component, SvcError> {
        self.check_level(id.level, 0)?;
        let mut lo = Dyadic::ZERO;
        for j in 1..=id.level {
            if (id.index >> (id.level - j)) & 1 == 1 {
                lo = lo + Self::right_shift(j);
            }
        }
        Ok(Component {
            id,
            lo,
            hi: lo + Self::component_length(id.level),
        })
    }

    pub fn gap(&self, id: GapId) -> Result<Gap, SvcError> {
        self.check_level(id.level, 1)?;
        let parent = self.component(ComponentId {
            level: id.level - 1,
            index: id.index,
        })?;
        Ok(Self::middle_gap(&parent))
    }

    /// The gap removed from `parent` at the next level.
    pub fn middle_gap(parent: &Component) -> Gap {
        let level = parent.id.level + 1;
        let a = parent.lo + Self::component_length(level);
        Gap {
            id: GapId {
                level,
                index: parent.id.index,
            },
            a,
            b: a + Self::gap_length(level),
        }
    }

    fn children(parent: &Component) -> [Component; 2] {
        let level = parent.id.level + 1;
        let len = Self::component_length(level);
        let left_lo = parent.lo;
        let right_lo = parent.lo + Self::right_shift(level);
        [
            Component {
                id: ComponentId {
                    level,
                    index: 2 * parent.id.index,
                },
                lo: left_lo,
                hi: left_lo + len,
            },
            Component {
                id: ComponentId {
                    level,
                    index: 2 * parent.id.index + 1,
                },
                lo: right_lo,
                hi: right_lo + len,
            },
        ]
    }

    /// Components of `S_level`, left to right.
    pub fn components(&self, level: u32) -> Result<impl Iterator<Item = Component>, SvcError> {
        self.check_level(level, 0)?;
        let shifts: Vec<Dyadic> = (1..=level).map(Self::right_shift).collect();
        let len = Self::component_length(level);
        Ok((0..Self::component_count(level)).map(move |index| {
            let mut lo = Dyadic::ZERO;
            for (j, sh) in shifts.iter().enumerate() {
                if (index >> (level as usize - 1 - j)) & 1 == 1 {
                    lo = lo + *sh;
                }
            }
            Component {
                id: ComponentId { level, index },
                lo,
                hi: lo + len,
            }
        }))
    }

    /// Gaps removed at `level`, left to right.
    pub fn gaps(&self, level: u32) -> Result<impl Iterator<Item = Gap>, SvcError> {
        self.check_level(level, 1)?;
        Ok(self
            .components(level - 1)?
            .map(|c| Self::middle_gap(&c)))
    }

    /// Gaps of level `≤ max_level` whose closure meets the open interval
    /// `(lo, hi)` in a set of positive length, ordered by level then position.
    pub fn gaps_intersecting(&self, lo: Dyadic, hi: Dyadic, max_level: u32) -> Vec<Gap> {
        let max_level = max_level.min(self.depth);
        let mut out = Vec::new();
        let mut stack = vec![Component {
            id: ComponentId { level: 0, index: 0 },
            lo: Dyadic::ZERO,
            hi: Dyadic::ONE,
        }];
        while let Some(c) = stack.pop() {
            if c.hi <= lo || c.lo >= hi || c.id.level >= max_level {
                continue;
            }
            let g = Self::middle_gap(&c);
            if g.a < hi && g.b > lo {
                out.push(g);
            }
            stack.extend(Self::children(&c));
        }
        out.sort_by_key(|g| (g.id.level, g.a));
        out
    }

    /// Point location by descent through the construction tree.
    pub fn locate(&self, x: f64) -> Location {
        if !(0.0..=1.0).contains(&x) {
            return Location::Outside;
        }
        self.locate_by(|e| e.cmp_f64(x))
    }

    /// As [`SvcModel::locate`] for an exact dyadic point.
    pub fn locate_dyadic(&self, x: Dyadic) -> Location {
        if x < Dyadic::ZERO || x > Dyadic::ONE {
            return Location::Outside;
        }
        self.locate_by(|e| e.cmp(&x))
    }

    fn locate_by(&self, cmp: impl Fn(Dyadic) -> Ordering) -> Location {
        if cmp(Dyadic::ZERO) == Ordering::Equal || cmp(Dyadic::ONE) == Ordering::Equal {
            return Location::Boundary;
        }
        let mut c = Component {
            id: ComponentId { level: 0, index: 0 },
            lo: Dyadic::ZERO,
            hi: Dyadic::ONE,
        };
        while c.id.level < self.depth {
            let g = Self::middle_gap(&c);
            match (cmp(g.a), cmp(g.b)) {
                (Ordering::Equal, _) | (_, Ordering::Equal) => return Location::Boundary,
                (Ordering::Less, Ordering::Greater) => return Location::InGap(g.id),
                (Ordering::Greater, _) => c = Self::children(&c)[0],
                _ => c = Self::children(&c)[1],
            }
        }
        Location::InComponent(c.id)
    }

    /// Whether `x` is provably in the limit set: `0`, `1` or a gap endpoint
    /// of level `≤ depth`.
    pub fn is_certified(&self, x: Dyadic) -> bool {
        self.locate_dyadic(x) == Location::Boundary
    }

    /// Writes `level,a,b` rows for every gap of level `≤ max_level`, with
    /// endpoints as reduced `p/q` strings.
    pub fn write_gaps_csv<W: Write>(&self, mut w: W, max_level: u32) -> io::Result<()> {
        writeln!(w, "level,a,b")?;
        for level in 1..=max_level.min(self.depth) {
            for g in self.gaps(level).expect("level checked") {
                writeln!(w, "{},{},{}", level, g.a, g.b)?;
            }
        }
        Ok(())
    }
}

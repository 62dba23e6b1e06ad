use std::fmt;
use std::sync::Arc;

use super::{DstError, Result};

/// Largest supported frame; keeps the dense power set at 65536 entries.
pub const MAX_FRAME_SIZE: usize = 16;

/// Frame of discernment: an ordered list of mutually exclusive hypotheses.
///
/// The label order is fixed at construction and defines the bit positions of
/// every [`FocalSet`] over this frame. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_FRAME_SIZE {
            return Err(DstError::FrameSize(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(DstError::EmptyLabel(i));
            }
            if labels[..i].contains(label) {
                return Err(DstError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels: labels.into() })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; frames hold at least one label.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of subsets, `2^|frame|`.
    pub fn power_set_size(&self) -> usize {
        1usize << self.len()
    }

    /// The whole frame as a focal set (total ignorance).
    pub fn full_set(&self) -> FocalSet {
        FocalSet((1u32 << self.len()) - 1)
    }

    pub fn contains(&self, set: FocalSet) -> bool {
        set.0 & !self.full_set().0 == 0
    }

    pub fn complement(&self, set: FocalSet) -> FocalSet {
        FocalSet(!set.0 & self.full_set().0)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn singleton(&self, label: &str) -> Result<FocalSet> {
        self.index_of(label)
            .map(FocalSet::singleton)
            .ok_or_else(|| DstError::UnknownLabel(label.to_owned()))
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<FocalSet> {
        labels.iter().try_fold(FocalSet::EMPTY, |acc, label| {
            Ok(acc.union(self.singleton(label.as_ref())?))
        })
    }

    /// Singleton sets in label order.
    pub fn singletons(&self) -> impl Iterator<Item = FocalSet> + '_ {
        (0..self.len()).map(FocalSet::singleton)
    }

    /// Every subset, in ascending bit order starting with the empty set.
    pub fn power_set(&self) -> impl Iterator<Item = FocalSet> {
        (0..self.power_set_size() as u32).map(FocalSet)
    }

    /// Every non-empty subset, in ascending bit order.
    pub fn non_empty_sets(&self) -> impl Iterator<Item = FocalSet> {
        (1..self.power_set_size() as u32).map(FocalSet)
    }

    /// Compact name for a set: member labels in frame order, concatenated
    /// when every label is a single character (`"sm"`), otherwise joined with
    /// `+`. The empty set is written `"{}"`.
    pub fn set_label(&self, set: FocalSet) -> String {
        if set.is_empty() {
            return "{}".to_owned();
        }
        let sep = if self.labels.iter().all(|l| l.chars().count() == 1) {
            ""
        } else {
            "+"
        };
        set.members()
            .map(|i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Frame::set_label`]; also accepts a plain singleton label.
    pub fn parse_set(&self, text: &str) -> Result<FocalSet> {
        if text == "{}" {
            return Ok(FocalSet::EMPTY);
        }
        if let Ok(set) = self.singleton(text) {
            return Ok(set);
        }
        if text.contains('+') {
            let parts: Vec<&str> = text.split('+').collect();
            return self.set_of(&parts);
        }
        if self.labels.iter().all(|l| l.chars().count() == 1) {
            let mut set = FocalSet::EMPTY;
            for c in text.chars() {
                let member = self.singleton(c.encode_utf8(&mut [0; 4]))?;
                if set.intersects(member) {
                    return Err(DstError::UnknownLabel(text.to_owned()));
                }
                set = set.union(member);
            }
            return Ok(set);
        }
        Err(DstError::UnknownLabel(text.to_owned()))
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// A subset of a frame, stored as a bit pattern over the frame's label order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FocalSet(u32);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        FocalSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn singleton(index: usize) -> Self {
        FocalSet(1 << index)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    pub const fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: FocalSet) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn intersection(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub const fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    /// Label indices of the members, ascending.
    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 & (1 << i) != 0)
    }

    pub(crate) const fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FocalSet({:#b})", self.0)
    }
}

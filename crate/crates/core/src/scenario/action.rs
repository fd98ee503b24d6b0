use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::orbital::Vec3;

/// Forward/backward throttle label (vessel y axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForwardThrottle {
    Backward,
    #[default]
    None,
    Forward,
}

/// Right/left throttle label (vessel x axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RightThrottle {
    Left,
    #[default]
    None,
    Right,
}

/// Down/up throttle label (vessel z axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DownThrottle {
    Down,
    #[default]
    None,
    Up,
}

macro_rules! label_impls {
    ($ty:ident, $neg:ident = $neg_s:literal, $pos:ident = $pos_s:literal) => {
        impl $ty {
            pub const ALL: [$ty; 3] = [$ty::$neg, $ty::None, $ty::$pos];
            pub const LABELS: [&'static str; 3] = [$neg_s, "none", $pos_s];

            pub fn as_str(self) -> &'static str {
                match self {
                    $ty::$neg => $neg_s,
                    $ty::None => "none",
                    $ty::$pos => $pos_s,
                }
            }

            /// Throttle value on this axis.
            pub fn value(self) -> f64 {
                match self {
                    $ty::$neg => -1.0,
                    $ty::None => 0.0,
                    $ty::$pos => 1.0,
                }
            }

            /// Position in `ALL`.
            pub fn index(self) -> usize {
                match self {
                    $ty::$neg => 0,
                    $ty::None => 1,
                    $ty::$pos => 2,
                }
            }
        }

        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $neg_s => Ok($ty::$neg),
                    "none" => Ok($ty::None),
                    $pos_s => Ok($ty::$pos),
                    other => Err(other.to_string()),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

label_impls!(ForwardThrottle, Backward = "backward", Forward = "forward");
label_impls!(RightThrottle, Left = "left", Right = "right");
label_impls!(DownThrottle, Down = "down", Up = "up");

fn default_duration() -> f64 {
    0.5
}

/// Discrete throttle command for one decision tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub ft: ForwardThrottle,
    pub rt: RightThrottle,
    pub dt: DownThrottle,
    /// Seconds the throttle is held.
    #[serde(default = "default_duration")]
    pub duration: f64,
}

impl Default for Action {
    fn default() -> Self {
        Self::NONE
    }
}

impl Action {
    pub const NONE: Action = Action {
        ft: ForwardThrottle::None,
        rt: RightThrottle::None,
        dt: DownThrottle::None,
        duration: 0.5,
    };

    pub fn new(ft: ForwardThrottle, rt: RightThrottle, dt: DownThrottle) -> Self {
        Self {
            ft,
            rt,
            dt,
            duration: default_duration(),
        }
    }

    pub fn forward() -> Self {
        Self::new(ForwardThrottle::Forward, RightThrottle::None, DownThrottle::None)
    }

    /// Same labels, ignoring duration.
    pub fn same_labels(&self, other: &Action) -> bool {
        self.ft == other.ft && self.rt == other.rt && self.dt == other.dt
    }

    pub fn is_none(&self) -> bool {
        self.ft == ForwardThrottle::None
            && self.rt == RightThrottle::None
            && self.dt == DownThrottle::None
    }

    /// Index in the 27-way joint label space, `ft * 9 + rt * 3 + dt`.
    pub fn class_index(&self) -> usize {
        self.ft.index() * 9 + self.rt.index() * 3 + self.dt.index()
    }

    /// Every label combination, ordered by `class_index`.
    pub fn all() -> impl Iterator<Item = Action> {
        ForwardThrottle::ALL.into_iter().flat_map(|ft| {
            RightThrottle::ALL.into_iter().flat_map(move |rt| {
                DownThrottle::ALL
                    .into_iter()
                    .map(move |dt| Action::new(ft, rt, dt))
            })
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ft, self.rt, self.dt)
    }
}

/// Vessel-frame throttle vector: x = right, y = forward, z = up.
pub fn action_to_throttle(action: &Action) -> Vec3 {
    Vec3::new(action.rt.value(), action.ft.value(), action.dt.value())
}

use serde::{Deserialize, Serialize};

use super::message::{ChatMessage, FUNCTION_NAME};
use super::window::SlidingWindow;
use crate::orbital::Vec3;
use crate::scenario::{Action, DownThrottle, ForwardThrottle, Observation, RightThrottle};

const FRAME_TEXT: &str = "Throttles must be given in your vessel reference frame wherein the x axis points to the right, the y axis points towards the target and the z axis points upwards. The maximum throttle is 1.";

pub const COT_SUFFIX: &str = "Reason step-by-step.";

/// How much help the prompt gives the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PromptMode {
    /// Raw positions and velocities only.
    #[serde(rename = "plain")]
    Plain,
    /// Adds the vessel-frame prograde direction.
    #[default]
    #[serde(rename = "augmented")]
    Augmented,
    /// Augmented observations plus one worked example and a reasoning cue.
    #[serde(rename = "cot-fewshot")]
    CotFewShot,
}

impl std::str::FromStr for PromptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(PromptMode::Plain),
            "augmented" => Ok(PromptMode::Augmented),
            "cot-fewshot" => Ok(PromptMode::CotFewShot),
            other => Err(format!("unknown prompt mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub system_text: String,
    pub include_prograde: bool,
    /// Worked (question, answer) pair shown before the live question.
    pub exemplar: Option<(String, String)>,
    pub cot_suffix: bool,
}

impl PromptTemplate {
    pub fn for_mode(mode: PromptMode) -> Self {
        match mode {
            PromptMode::Plain => Self {
                system_text: format!(
                    "You operate as an autonomous agent controlling a pursuit spacecraft. Your goal is to apply throttles to capture the evader given the positions and velocities of the pursuer and evader in celestial body reference frame. {FRAME_TEXT} Call the {FUNCTION_NAME} function with your choice."
                ),
                include_prograde: false,
                exemplar: None,
                cot_suffix: false,
            },
            PromptMode::Augmented => Self {
                system_text: format!(
                    "You operate as an autonomous agent controlling a pursuit spacecraft. Your goal is to apply throttles to capture the evader given the positions and velocities of the pursuer and evader in celestial body reference frame and the direction of pursuer's velocity relative to evader or prograde. {FRAME_TEXT} Call the {FUNCTION_NAME} function with your choice."
                ),
                include_prograde: true,
                exemplar: None,
                cot_suffix: false,
            },
            PromptMode::CotFewShot => {
                let obs = exemplar_observation();
                let action = Action::new(ForwardThrottle::Forward, RightThrottle::Left, DownThrottle::Up);
                Self {
                    system_text: format!(
                        "You operate as an autonomous agent controlling a pursuit spacecraft. Your goal is to apply throttles to capture the evader given the positions and velocities of the pursuer and evader in celestial body reference frame and the direction of pursuer's velocity relative to evader or prograde. {FRAME_TEXT} {COT_SUFFIX} After reasoning call the {FUNCTION_NAME} function."
                    ),
                    include_prograde: true,
                    exemplar: Some((
                        question(&format_observation(&obs, true)),
                        cot_answer(obs.prograde, &action),
                    )),
                    cot_suffix: true,
                }
            }
        }
    }

    /// Final user message for one observation.
    pub fn user_prompt(&self, obs: &Observation) -> String {
        let live = question(&format_observation(obs, self.include_prograde));
        match (&self.exemplar, self.cot_suffix) {
            (Some((q, a)), _) => {
                let suffix = if self.cot_suffix { format!(" {COT_SUFFIX}") } else { String::new() };
                format!("{q}\n{a}\n\nNow answer the following question:\n\n{live}{suffix}")
            }
            (None, true) => format!("{live} {COT_SUFFIX}"),
            (None, false) => live,
        }
    }

    /// The live question alone, as stored in the sliding window.
    pub fn history_prompt(&self, obs: &Observation) -> String {
        question(&format_observation(obs, self.include_prograde))
    }
}

/// A pursuer drifting right and down while separating from the target.
fn exemplar_observation() -> Observation {
    Observation {
        time_elapsed: 42.5,
        vehicle_mass: 4958.0,
        vehicle_propellant: 958.0,
        pursuer_pos: Vec3::new(748_213.57, 52_340.12, 74_866.93),
        pursuer_vel: Vec3::new(-228.41, 2163.55, 216.49),
        evader_pos: Vec3::new(747_466.32, 53_102.88, 74_792.41),
        evader_vel: Vec3::new(-231.07, 2158.90, 215.98),
        prograde: Some(Vec3::new(0.412, -0.608, -0.679)),
        range: 1070.6,
        range_rate: 2.1,
    }
}

pub fn question(observations: &str) -> String {
    format!("Given these observations {observations}, what is the best throttle to capture evader?")
}

fn fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    // Avoid "-0.00" so the text does not depend on the sign of tiny values.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn vector(v: Vec3, decimals: usize) -> String {
    format!("[{}, {}, {}]", fixed(v.x, decimals), fixed(v.y, decimals), fixed(v.z, decimals))
}

/// Observation text in a fixed field order: 2 decimals for scalars, positions
/// and velocities, 3 for the prograde direction.
pub fn format_observation(obs: &Observation, include_prograde: bool) -> String {
    let mut s = format!(
        "{{\"time\": {}, \"vehicle_mass\": {}, \"vehicle_propellant\": {}, \"pursuer_pos\": {}, \"pursuer_vel\": {}, \"evader_pos\": {}, \"evader_vel\": {}",
        fixed(obs.time_elapsed, 2),
        fixed(obs.vehicle_mass, 2),
        fixed(obs.vehicle_propellant, 2),
        vector(obs.pursuer_pos, 2),
        vector(obs.pursuer_vel, 2),
        vector(obs.evader_pos, 2),
        vector(obs.evader_vel, 2),
    );
    if include_prograde {
        match obs.prograde {
            Some(p) => s.push_str(&format!(", \"prograde\": {}", vector(p, 3))),
            None => s.push_str(", \"prograde\": null"),
        }
    }
    s.push('}');
    s
}

/// Canonical textual call, e.g. `perform_action({"ft": "forward", "rt": "left", "dt": "up"})`.
pub fn call_text(action: &Action) -> String {
    format!(
        "{FUNCTION_NAME}({{\"ft\": \"{}\", \"rt\": \"{}\", \"dt\": \"{}\"}})",
        action.ft, action.rt, action.dt
    )
}

fn axis_motion(axis: &str, value: f64, positive: &str, negative: &str) -> String {
    if value > 0.0 {
        format!("The {axis} coordinate of prograde is positive, indicating that pursuer is {positive}.")
    } else if value < 0.0 {
        format!("The {axis} coordinate of prograde is negative, indicating that pursuer is {negative}.")
    } else {
        format!("The {axis} coordinate of prograde is zero, indicating no motion along the {axis} axis.")
    }
}

fn join_moves(moves: &[&str]) -> String {
    match moves {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Template reasoning for `action` given the prograde direction, ending in the
/// canonical call.
pub fn cot_answer(prograde: Option<Vec3>, action: &Action) -> String {
    let mut parts = Vec::new();
    match prograde {
        Some(p) => {
            parts.push(axis_motion("x", p.x, "moving to the right", "moving to the left"));
            parts.push(axis_motion("y", p.y, "approaching", "moving away from the evader"));
            parts.push(axis_motion("z", p.z, "moving up", "moving down"));
        }
        None => parts.push(
            "The prograde is undefined, indicating that pursuer has no motion relative to the evader."
                .to_string(),
        ),
    }

    let x = match action.rt {
        RightThrottle::None => "leaving the x axis alone",
        _ => "moving in the opposite direction in the x axis",
    };
    let y = match action.ft {
        ForwardThrottle::Forward => "towards the target in the y axis",
        ForwardThrottle::Backward => "away from the target in the y axis",
        ForwardThrottle::None => "leaving the y axis alone",
    };
    let z = match action.dt {
        DownThrottle::None => "leaving the z axis alone",
        _ => "in the opposite direction in the z axis",
    };
    parts.push(format!(
        "To capture the evader we should counteract pursuer's motion, {x}, {y}, and {z}."
    ));

    let moves: Vec<&str> = [action.rt.as_str(), action.ft.as_str(), action.dt.as_str()]
        .into_iter()
        .filter(|m| *m != "none")
        .collect();
    if moves.is_empty() {
        parts.push("This means we should not apply any throttle.".to_string());
    } else {
        parts.push(format!(
            "This means we should apply throttles to move {}.",
            join_moves(&moves)
        ));
    }
    parts.push(format!("Therefore we should call {}.", call_text(action)));
    parts.join(" ")
}

/// Messages for one completion call: system, padded history, live question.
pub fn build_prompts(
    obs: &Observation,
    window: &SlidingWindow,
    template: &PromptTemplate,
) -> Vec<ChatMessage> {
    let mut messages = vec![ChatMessage::system(template.system_text.clone())];
    for exchange in window.history() {
        messages.push(ChatMessage::user(exchange.user));
        messages.push(ChatMessage::assistant(exchange.assistant));
    }
    messages.push(ChatMessage::user(template.user_prompt(obs)));
    messages
}

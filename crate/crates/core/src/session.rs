//! Scripts, gyroscope logs, trace output and the line protocol of a live
//! session. Everything is JSON or JSON lines.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, FieldSegment};
use crate::error::{Error, Result};
use crate::lift::{classify_endpoints, BallState, Frame, HomotopyClass, DEFAULT_CLOSURE_TOL, MAX_STEP_ANGLE};
use crate::measurement::{measure_axis, MeasurementRecord, SessionRng, SESSION_STREAM};
use crate::phase::geodesic_increments;
use crate::rotor::{Spinor, Su2, Vec3};
use crate::state::{bloch_point, hopf_coordinates, panel_frame, wrap_angle, BlochPoint, PanelFrame};

pub const DEFAULT_STEPS_PER_DEGREE: f64 = 1.0;

/// One manipulation of the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SessionEvent {
    /// Turn by `angle` about a fixed world axis.
    Rotate {
        axis: Vec3,
        angle: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<u32>,
    },
    /// Turn about `from × to` by the angle between them.
    Geodesic {
        from: Vec3,
        to: Vec3,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<u32>,
    },
    /// Turn by `delta` about the current principal axis.
    Fiber {
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<u32>,
    },
    Field {
        omega: Vec3,
        t0: f64,
        t1: f64,
        dt: f64,
    },
    Measure {
        #[serde(default = "z_axis")]
        axis: Vec3,
    },
    Annotate {
        text: String,
    },
}

fn z_axis() -> Vec3 {
    Vec3::Z
}

fn auto_steps(angle: f64, steps_per_degree: f64) -> u32 {
    (angle.abs().to_degrees() * steps_per_degree).ceil().max(1.0) as u32
}

fn check_step(angle: f64, steps: u32) -> Result<()> {
    if !angle.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    if steps == 0 {
        return Err(Error::Parse("steps must be positive".into()));
    }
    let per = angle / steps as f64;
    if per.abs() >= MAX_STEP_ANGLE {
        return Err(Error::StepTooLarge { angle: per });
    }
    Ok(())
}

impl SessionEvent {
    /// Fills in missing step counts and checks lift safety of every sub-step.
    pub fn resolved(self, steps_per_degree: f64) -> Result<SessionEvent> {
        Ok(match self {
            SessionEvent::Rotate { axis, angle, steps } => {
                axis.require_unit()?;
                let steps = steps.unwrap_or_else(|| auto_steps(angle, steps_per_degree));
                check_step(angle, steps)?;
                SessionEvent::Rotate {
                    axis,
                    angle,
                    steps: Some(steps),
                }
            }
            SessionEvent::Geodesic { from, to, steps } => {
                let arc = from.cross(to).norm().atan2(from.dot(to));
                let steps = steps.unwrap_or_else(|| auto_steps(arc, steps_per_degree));
                geodesic_increments(from, to, steps.max(1) as usize)?;
                check_step(arc, steps)?;
                SessionEvent::Geodesic {
                    from,
                    to,
                    steps: Some(steps),
                }
            }
            SessionEvent::Fiber { delta, steps } => {
                let steps = steps.unwrap_or_else(|| auto_steps(delta, steps_per_degree));
                check_step(delta, steps)?;
                SessionEvent::Fiber {
                    delta,
                    steps: Some(steps),
                }
            }
            SessionEvent::Field { omega, t0, t1, dt } => {
                FieldSegment::constant(omega, t0, t1, dt).validate()?;
                self
            }
            SessionEvent::Measure { axis } => {
                axis.require_unit()?;
                self
            }
            SessionEvent::Annotate { .. } => self,
        })
    }

    /// Number of lift steps the event performs once resolved.
    pub fn sub_steps(&self) -> usize {
        match self {
            SessionEvent::Rotate { steps, .. }
            | SessionEvent::Geodesic { steps, .. }
            | SessionEvent::Fiber { steps, .. } => steps.unwrap_or(0) as usize,
            SessionEvent::Field { omega, t0, t1, dt } => FieldSegment::constant(*omega, *t0, *t1, *dt)
                .steps()
                .map(|(n, _)| n)
                .unwrap_or(0),
            SessionEvent::Measure { .. } | SessionEvent::Annotate { .. } => 0,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScriptDoc {
    Wrapped { events: Vec<serde_json::Value> },
    Bare(Vec<serde_json::Value>),
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
}

/// Parses a script with the default step density.
pub fn parse_script(text: &str) -> Result<Vec<SessionEvent>> {
    parse_script_with(text, DEFAULT_STEPS_PER_DEGREE)
}

/// Parses a script, either `{"events": [...]}` or a bare array, resolving
/// step counts at `steps_per_degree` where they are missing.
pub fn parse_script_with(text: &str, steps_per_degree: f64) -> Result<Vec<SessionEvent>> {
    let doc: ScriptDoc = serde_json::from_str(text).map_err(parse_error)?;
    let raw = match doc {
        ScriptDoc::Wrapped { events } | ScriptDoc::Bare(events) => events,
    };
    raw.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let ev: SessionEvent = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()).at_event(i))?;
            ev.resolved(steps_per_degree).map_err(|e| e.at_event(i))
        })
        .collect()
}

/// One gyroscope reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    pub t: f64,
    /// Angular rate in rad/s.
    pub gyro: Vec3,
}

/// Rotation increments recovered from a gyroscope log.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuIncrements {
    pub frame: Frame,
    pub increments: Vec<(Vec3, f64)>,
}

impl ImuIncrements {
    /// Lifts the increments from `initial`, returning every intermediate state
    /// (the initial state first).
    pub fn replay(&self, initial: &BallState) -> Result<Vec<BallState>> {
        let mut out = Vec::with_capacity(self.increments.len() + 1);
        let mut s = *initial;
        out.push(s);
        for (i, &(axis, angle)) in self.increments.iter().enumerate() {
            s = s.step_in(self.frame, axis, angle).map_err(|e| e.at_event(i))?;
            out.push(s);
        }
        Ok(out)
    }
}

/// Parses JSON lines `{"t":…,"gyro":[x,y,z]}`; blank lines are skipped.
pub fn parse_imu_log(text: &str) -> Result<Vec<ImuSample>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

/// One increment per sampling interval, using the rate interpolated at the
/// interval midpoint.
pub fn integrate_imu(samples: &[ImuSample], mode: Frame) -> Result<ImuIncrements> {
    let mut increments = Vec::with_capacity(samples.len().saturating_sub(1));
    for (i, pair) in samples.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let dt = b.t - a.t;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidImu(format!(
                "timestamps must increase strictly (sample {} at t = {}, sample {} at t = {})",
                i,
                a.t,
                i + 1,
                b.t
            )));
        }
        let mid = (a.gyro + b.gyro).scale(0.5);
        if !mid.is_finite() {
            return Err(Error::NonFinite("gyro"));
        }
        let angle = mid.norm() * dt;
        if angle >= MAX_STEP_ANGLE {
            return Err(Error::InvalidImu(format!(
                "interval {i} turns by {angle} rad, at or beyond pi"
            )));
        }
        increments.push(match mid.normalized() {
            Some(axis) => (axis, angle),
            None => (Vec3::Z, 0.0),
        });
    }
    Ok(ImuIncrements { frame: mode, increments })
}

/// Snapshot of the ball written to traces and sent to live clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub step: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<usize>,
    /// Quaternion `[w, x, y, z]` of the orientation, `w ≥ 0`.
    pub orientation: Su2,
    /// The lifted SU(2) element, sign included.
    pub lift: Su2,
    pub spinor: Spinor,
    pub panel: PanelFrame,
    pub bloch: BlochPoint,
    pub fiber_phase: f64,
    /// Homotopic phase relative to the anchor, when the orientation is back
    /// where the anchor was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

impl TraceFrame {
    pub fn capture(state: &BallState, anchor: Option<&BallState>) -> TraceFrame {
        let gamma = anchor
            .and_then(|a| classify_endpoints(a, state, DEFAULT_CLOSURE_TOL).ok())
            .map(|c| c.gamma);
        TraceFrame {
            step: state.step_count,
            event: None,
            orientation: state.orientation.to_quaternion(),
            lift: state.lift,
            spinor: state.spinor,
            panel: panel_frame(&state.spinor),
            bloch: bloch_point(&state.spinor),
            fiber_phase: hopf_coordinates(&state.spinor).fiber_phase,
            gamma,
            measurement: None,
            annotation: None,
        }
    }
}

/// Writes one JSON line per state; `gamma` is relative to the first state.
pub fn emit_trace<W: Write>(states: &[BallState], sink: &mut W) -> io::Result<()> {
    let anchor = states.first();
    for s in states {
        write_frame(&TraceFrame::capture(s, anchor), sink)?;
    }
    Ok(())
}

pub fn write_frame<W: Write>(frame: &TraceFrame, sink: &mut W) -> io::Result<()> {
    serde_json::to_writer(&mut *sink, frame)?;
    sink.write_all(b"\n")
}

/// Parses a trace written by [`emit_trace`].
pub fn parse_trace(text: &str) -> Result<Vec<TraceFrame>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(parse_error))
        .collect()
}

/// Settings shared by scripted runs, replays and live sessions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub seed: u64,
    pub initial_spinor: Spinor,
    pub imu_mode: Frame,
    pub steps_per_degree: f64,
    pub closure_tol: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            seed: 0,
            initial_spinor: Spinor::UP,
            imu_mode: Frame::Body,
            steps_per_degree: DEFAULT_STEPS_PER_DEGREE,
            closure_tol: DEFAULT_CLOSURE_TOL,
        }
    }
}

/// A single-owner ball being manipulated event by event.
#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    state: BallState,
    /// State at the start or right after the latest collapse.
    anchor: BallState,
    initial: BallState,
    rng: SessionRng,
    measurements: Vec<MeasurementRecord>,
    events: usize,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Session> {
        let state = BallState::init(config.initial_spinor)?;
        Ok(Session {
            config,
            state,
            anchor: state,
            initial: state,
            rng: SessionRng::new(config.seed, SESSION_STREAM),
            measurements: Vec::new(),
            events: 0,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> &BallState {
        &self.state
    }

    pub fn measurements(&self) -> &[MeasurementRecord] {
        &self.measurements
    }

    pub fn frame(&self) -> TraceFrame {
        let anchor = classify_endpoints(&self.anchor, &self.state, self.config.closure_tol).ok();
        let mut f = TraceFrame::capture(&self.state, None);
        f.gamma = anchor.map(|c| c.gamma);
        f
    }

    fn rotate_steps(&mut self, axis: Vec3, angle: f64, steps: u32) -> Result<()> {
        let per = angle / steps as f64;
        for _ in 0..steps {
            self.state = self.state.step(axis, per)?;
        }
        Ok(())
    }

    /// Applies one event (resolving its step count first) and returns the
    /// resulting frame. On error the session is left unchanged.
    pub fn apply(&mut self, event: &SessionEvent) -> Result<TraceFrame> {
        let index = self.events;
        let saved = (self.state, self.rng.clone());
        let out = self.apply_inner(event);
        if out.is_err() {
            (self.state, self.rng) = saved;
        } else {
            self.events += 1;
        }
        out.map(|mut f| {
            f.event = Some(index);
            f
        })
        .map_err(|e| e.at_event(index))
    }

    fn apply_inner(&mut self, event: &SessionEvent) -> Result<TraceFrame> {
        let event = event.clone().resolved(self.config.steps_per_degree)?;
        let mut measurement = None;
        let mut annotation = None;
        match event {
            SessionEvent::Rotate { axis, angle, steps } => self.rotate_steps(axis, angle, steps.unwrap_or(1))?,
            SessionEvent::Geodesic { from, to, steps } => {
                let inc = geodesic_increments(from, to, steps.unwrap_or(1) as usize)?;
                self.state = self.state.follow(Frame::World, &inc)?;
            }
            SessionEvent::Fiber { delta, steps } => {
                let axis = self.state.principal_axis.normalized().unwrap_or(Vec3::Z);
                self.rotate_steps(axis, delta, steps.unwrap_or(1))?;
            }
            SessionEvent::Field { omega, t0, t1, dt } => {
                self.state = evolve(&self.state, &FieldSegment::constant(omega, t0, t1, dt))?;
            }
            SessionEvent::Measure { axis } => {
                let (rec, next) = measure_axis(&self.state, axis, &mut self.rng)?;
                self.state = next;
                self.anchor = next;
                self.measurements.push(rec);
                measurement = Some(rec);
            }
            SessionEvent::Annotate { text } => annotation = Some(text),
        }
        let mut frame = self.frame();
        frame.measurement = measurement;
        frame.annotation = annotation;
        Ok(frame)
    }

    /// Replays gyroscope increments, returning one frame per increment.
    pub fn apply_imu(&mut self, imu: &ImuIncrements) -> Result<Vec<TraceFrame>> {
        let mut frames = Vec::with_capacity(imu.increments.len());
        for (i, &(axis, angle)) in imu.increments.iter().enumerate() {
            self.state = self.state.step_in(imu.frame, axis, angle).map_err(|e| e.at_event(i))?;
            frames.push(self.frame());
        }
        Ok(frames)
    }

    pub fn summary(&self) -> Summary {
        let overlap = self.initial.spinor.inner(&self.state.spinor);
        let homotopy = classify_endpoints(&self.anchor, &self.state, self.config.closure_tol).ok();
        Summary {
            seed: self.config.seed,
            events: self.events,
            steps: self.state.step_count,
            final_spinor: self.state.spinor,
            bloch: bloch_point(&self.state.spinor),
            panel: panel_frame(&self.state.spinor),
            overlap_phase: (overlap.norm() >= 1e-9).then(|| wrap_angle(overlap.arg())),
            homotopy,
            measurements: self.measurements.clone(),
        }
    }
}

/// End-of-run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub events: usize,
    pub steps: u64,
    pub final_spinor: Spinor,
    pub bloch: BlochPoint,
    pub panel: PanelFrame,
    /// `arg⟨ψ_initial|ψ_final⟩`, absent when the two are orthogonal.
    pub overlap_phase: Option<f64>,
    /// Present when the orientation is back where it was at the start (or at
    /// the latest collapse).
    pub homotopy: Option<HomotopyClass>,
    pub measurements: Vec<MeasurementRecord>,
}

/// Runs a script, returning the trace (initial frame first, then one frame
/// per event) and the summary.
pub fn run_script(events: &[SessionEvent], config: SessionConfig) -> Result<(Vec<TraceFrame>, Summary)> {
    let mut session = Session::new(config)?;
    let mut frames = Vec::with_capacity(events.len() + 1);
    frames.push(session.frame());
    for ev in events {
        frames.push(session.apply(ev)?);
    }
    Ok((frames, session.summary()))
}

/// Messages a live client may send.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ClientMessage {
    Hello(HelloTag),
    Event(SessionEvent),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum HelloTag {
    Hello {},
}

/// Messages the server sends back, one per client line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ServerMessage {
    Hello { config: SessionConfig, frame: TraceFrame },
    Frame(TraceFrame),
    Error { message: String },
}

/// Handles one protocol line and returns the JSON reply (without newline).
/// Malformed lines produce an error reply and leave the session untouched.
pub fn handle_line(session: &mut Session, line: &str) -> String {
    let reply = match serde_json::from_str::<ClientMessage>(line.trim()) {
        Ok(ClientMessage::Hello(_)) => ServerMessage::Hello {
            config: *session.config(),
            frame: session.frame(),
        },
        Ok(ClientMessage::Event(ev)) => match session.apply(&ev) {
            Ok(f) => ServerMessage::Frame(f),
            Err(e) => ServerMessage::Error { message: e.to_string() },
        },
        Err(e) => ServerMessage::Error {
            message: format!("malformed message: {e}"),
        },
    };
    serde_json::to_string(&reply).expect("server messages serialize")
}

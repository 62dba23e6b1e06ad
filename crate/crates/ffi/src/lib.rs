//! C ABI for `radar-evidence`.
//!
//! Objects are exposed as opaque handles created by `rde_*_new`/`rde_*_load`
//! style functions and released with the matching `rde_*_free`. Every
//! fallible function returns an [`RdeStatus`] and writes its result through an
//! out-pointer; on failure a message is available from
//! [`rde_last_error_message`] on the calling thread. Sets of labels are passed
//! as bitmasks: bit `i` stands for the `i`-th label of the frame.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use radar_evidence::detector::{
    classify, explain_json, DecisionPolicy, DetectorError, EvidentialVerdict, DEFAULT_FEATURES,
};
use radar_evidence::dst::{self, DstError, FocalSet, Frame, MassFunction};
use radar_evidence::feature_model::{read_model, FeatureModel, ModelError};
use radar_evidence::radar_data::{radar_frame, Feature, RadarRecord};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    FrameMismatch = 4,
    TotalConflict = 5,
    Io = 6,
    ModelFormat = 7,
    Panic = 8,
}

/// Belief, plausibility and their difference for one set.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RdeInterval {
    pub belief: f64,
    pub plausibility: f64,
    pub uncertainty: f64,
}

/// One radar reading. `label` is the claimed class (`"s"` or `"m"`).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RdeRecord {
    pub timestamp: f64,
    pub density: f64,
    pub reflection: f64,
    pub velocity: f64,
    pub label: *const c_char,
}

pub struct RdeFrame(Frame);
pub struct RdeMass(MassFunction);
pub struct RdeModel(FeatureModel);
pub struct RdeVerdict(EvidentialVerdict);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(RdeStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(RdeStatus::NullPointer, format!("{what} is null"))
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure(RdeStatus::InvalidArgument, message.into())
    }
}

impl From<DstError> for Failure {
    fn from(e: DstError) -> Self {
        let status = match e {
            DstError::FrameMismatch => RdeStatus::FrameMismatch,
            DstError::TotalConflict(_) => RdeStatus::TotalConflict,
            _ => RdeStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match &e {
            ModelError::Io(_) => RdeStatus::Io,
            ModelError::Dst(inner) => return Failure::from(inner.clone()),
            ModelError::Malformed { .. }
            | ModelError::VersionMismatch { .. }
            | ModelError::MissingParams { .. }
            | ModelError::InvalidParams { .. } => RdeStatus::ModelFormat,
            _ => RdeStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<DetectorError> for Failure {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::Dst(inner) => inner.into(),
            DetectorError::Model { source, .. } => source.into(),
            other => Failure::invalid(other.to_string()),
        }
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RdeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RdeStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RdeStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RdeStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    *out = value;
    Ok(())
}

fn set_in(frame: &Frame, bits: u32) -> Result<FocalSet, Failure> {
    let set = FocalSet::from_bits(bits);
    if frame.contains(set) {
        Ok(set)
    } else {
        Err(DstError::FrameMismatch.into())
    }
}

/// Copy of the last error message on this thread, or null if none. Free the
/// result with [`rde_string_free`].
#[no_mangle]
pub extern "C" fn rde_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rde_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn rde_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a frame from `len` distinct, non-empty labels.
#[no_mangle]
pub unsafe extern "C" fn rde_frame_new(labels: *const *const c_char, len: usize, out: *mut *mut RdeFrame) -> RdeStatus {
    guard(|| {
        if labels.is_null() {
            return Err(Failure::null("labels"));
        }
        let names = std::slice::from_raw_parts(labels, len)
            .iter()
            .map(|&p| text(p, "label"))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, RdeFrame(Frame::new(names)?))
    })
}

/// The obstacle frame `{s, m}`.
#[no_mangle]
pub unsafe extern "C" fn rde_frame_radar(out: *mut *mut RdeFrame) -> RdeStatus {
    guard(|| put(out, RdeFrame(radar_frame())))
}

#[no_mangle]
pub unsafe extern "C" fn rde_frame_free(frame: *mut RdeFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rde_frame_len(frame: *const RdeFrame, out: *mut usize) -> RdeStatus {
    guard(|| write(out, as_ref(frame, "frame")?.0.len()))
}

/// Bitmask of a set written as compact labels (`"sm"`) or joined with `+`.
#[no_mangle]
pub unsafe extern "C" fn rde_frame_parse_set(frame: *const RdeFrame, set: *const c_char, out: *mut u32) -> RdeStatus {
    guard(|| {
        let frame = &as_ref(frame, "frame")?.0;
        write(out, frame.parse_set(text(set, "set")?)?.bits())
    })
}

/// Builds a mass function from `len` values indexed by set bitmask; `len`
/// must be `2^n` for a frame of `n` labels and entry 0 must be zero.
#[no_mangle]
pub unsafe extern "C" fn rde_mass_new(
    frame: *const RdeFrame,
    masses: *const f64,
    len: usize,
    out: *mut *mut RdeMass,
) -> RdeStatus {
    guard(|| {
        let frame = &as_ref(frame, "frame")?.0;
        if masses.is_null() {
            return Err(Failure::null("masses"));
        }
        let values = std::slice::from_raw_parts(masses, len).to_vec();
        put(out, RdeMass(MassFunction::from_dense(frame, values)?))
    })
}

/// All mass on the full frame.
#[no_mangle]
pub unsafe extern "C" fn rde_mass_vacuous(frame: *const RdeFrame, out: *mut *mut RdeMass) -> RdeStatus {
    guard(|| put(out, RdeMass(MassFunction::vacuous(&as_ref(frame, "frame")?.0))))
}

#[no_mangle]
pub unsafe extern "C" fn rde_mass_free(mass: *mut RdeMass) {
    if !mass.is_null() {
        drop(Box::from_raw(mass));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rde_mass_get(mass: *const RdeMass, set: u32, out: *mut f64) -> RdeStatus {
    guard(|| {
        let mass = &as_ref(mass, "mass")?.0;
        write(out, mass.mass(set_in(mass.frame(), set)?))
    })
}

/// Dempster's rule. `conflict` may be null; otherwise it receives the mass
/// lost to contradictory pairs. Fails with `TotalConflict` when no mass
/// agrees.
#[no_mangle]
pub unsafe extern "C" fn rde_mass_combine(
    a: *const RdeMass,
    b: *const RdeMass,
    out: *mut *mut RdeMass,
    conflict: *mut f64,
) -> RdeStatus {
    guard(|| {
        let c = dst::combine_with_conflict(&as_ref(a, "a")?.0, &as_ref(b, "b")?.0)?;
        if !conflict.is_null() {
            *conflict = c.conflict;
        }
        put(out, RdeMass(c.mass))
    })
}

#[no_mangle]
pub unsafe extern "C" fn rde_mass_interval(mass: *const RdeMass, set: u32, out: *mut RdeInterval) -> RdeStatus {
    guard(|| {
        let mass = &as_ref(mass, "mass")?.0;
        let i = dst::interval(mass, set_in(mass.frame(), set)?)?;
        write(
            out,
            RdeInterval {
                belief: i.belief,
                plausibility: i.plausibility,
                uncertainty: i.uncertainty,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn rde_mass_belief(mass: *const RdeMass, set: u32, out: *mut f64) -> RdeStatus {
    let mut i = RdeInterval::default();
    match rde_mass_interval(mass, set, &mut i) {
        RdeStatus::Ok => guard(|| write(out, i.belief)),
        status => status,
    }
}

#[no_mangle]
pub unsafe extern "C" fn rde_mass_plausibility(mass: *const RdeMass, set: u32, out: *mut f64) -> RdeStatus {
    let mut i = RdeInterval::default();
    match rde_mass_interval(mass, set, &mut i) {
        RdeStatus::Ok => guard(|| write(out, i.plausibility)),
        status => status,
    }
}

/// Loads a model file written by the `fit` command.
#[no_mangle]
pub unsafe extern "C" fn rde_model_load(path: *const c_char, out: *mut *mut RdeModel) -> RdeStatus {
    guard(|| put(out, RdeModel(read_model(text(path, "path")?)?)))
}

#[no_mangle]
pub unsafe extern "C" fn rde_model_free(model: *mut RdeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mass function induced by one feature value (`"velocity"`, `"reflection"`,
/// `"density"`, `"timestamp"`).
#[no_mangle]
pub unsafe extern "C" fn rde_model_mass_from_feature(
    model: *const RdeModel,
    feature: *const c_char,
    value: f64,
    out: *mut *mut RdeMass,
) -> RdeStatus {
    guard(|| {
        let model = &as_ref(model, "model")?.0;
        let feature: Feature = text(feature, "feature")?
            .parse()
            .map_err(|e: radar_evidence::radar_data::DataError| Failure::invalid(e.to_string()))?;
        put(out, RdeMass(model.mass_from_feature(feature, value)?))
    })
}

/// Classifies one record. `features` is a comma-separated list, or null for
/// velocity and reflection; `tau` is the full-frame mass above which the
/// decision is ambiguous.
#[no_mangle]
pub unsafe extern "C" fn rde_classify(
    model: *const RdeModel,
    record: *const RdeRecord,
    features: *const c_char,
    tau: f64,
    out: *mut *mut RdeVerdict,
) -> RdeStatus {
    guard(|| {
        let model = &as_ref(model, "model")?.0;
        let r = as_ref(record, "record")?;
        let features = if features.is_null() {
            DEFAULT_FEATURES.to_vec()
        } else {
            Feature::parse_list(text(features, "features")?).map_err(|e| Failure::invalid(e.to_string()))?
        };
        let record = RadarRecord {
            timestamp: r.timestamp,
            density: r.density,
            reflection: r.reflection,
            velocity: r.velocity,
            label: text(r.label, "label")?.to_owned(),
            spoofed: false,
        };
        let policy = DecisionPolicy::with_threshold(tau)?;
        put(out, RdeVerdict(classify(model, &record, 0, &features, &policy)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn rde_verdict_free(verdict: *mut RdeVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Bitmask of the decided set; the full frame means ambiguous.
#[no_mangle]
pub unsafe extern "C" fn rde_verdict_decided(verdict: *const RdeVerdict, out: *mut u32) -> RdeStatus {
    guard(|| write(out, as_ref(verdict, "verdict")?.0.decided.bits()))
}

#[no_mangle]
pub unsafe extern "C" fn rde_verdict_spoof_flagged(verdict: *const RdeVerdict, out: *mut bool) -> RdeStatus {
    guard(|| write(out, as_ref(verdict, "verdict")?.0.spoof_flagged))
}

#[no_mangle]
pub unsafe extern "C" fn rde_verdict_conflict(verdict: *const RdeVerdict, out: *mut f64) -> RdeStatus {
    guard(|| write(out, as_ref(verdict, "verdict")?.0.conflict))
}

/// Combined mass as a new handle, to be freed with [`rde_mass_free`].
#[no_mangle]
pub unsafe extern "C" fn rde_verdict_combined(verdict: *const RdeVerdict, out: *mut *mut RdeMass) -> RdeStatus {
    guard(|| put(out, RdeMass(as_ref(verdict, "verdict")?.0.combined.clone())))
}

/// JSON explanation of the verdict. Free with [`rde_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rde_verdict_explain_json(verdict: *const RdeVerdict, out: *mut *mut c_char) -> RdeStatus {
    guard(|| {
        let json = explain_json(&as_ref(verdict, "verdict")?.0);
        write(
            out,
            CString::new(json)
                .map_err(|e| Failure::invalid(e.to_string()))?
                .into_raw(),
        )
    })
}

//! C ABI for the `afree` library.
//!
//! Objects are exposed as opaque handles created by `afree_*_new`/`parse`
//! functions and released with the matching `afree_*_free`. Every fallible
//! call returns an [`AfreeStatus`]; on failure a message is available from
//! [`afree_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use afree::density::{a_limit, family_profiles, finite_ie_density};
use afree::enumerate::{count_ideals, NormCounter};
use afree::family::{AFamily, FamilyRule};
use afree::field::{class_number_imag_quadratic, NumberField};
use afree::ideal::Ideal;
use afree::zeta::{dedekind_zeta, mertens_ratio};
use afree::Error;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AfreeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotSquarefree = 3,
    UnsupportedField = 4,
    FieldMismatch = 5,
    BoundTooSmall = 6,
    TooLarge = 7,
    DuplicateMembers = 8,
    Overflow = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

impl From<&Error> for AfreeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotSquarefree(_) | Error::DegenerateM(_) => AfreeStatus::NotSquarefree,
            Error::UnsupportedField(_) | Error::NotFundamental(_) | Error::NotNegative(_) => {
                AfreeStatus::UnsupportedField
            }
            Error::FieldMismatch => AfreeStatus::FieldMismatch,
            Error::BoundTooSmall { .. } | Error::BoundsExceedX(_) => AfreeStatus::BoundTooSmall,
            Error::TooLarge { .. } => AfreeStatus::TooLarge,
            Error::DuplicateMembers => AfreeStatus::DuplicateMembers,
            Error::Overflow(_) => AfreeStatus::Overflow,
            Error::Parse(_) => AfreeStatus::Parse,
            Error::Io(_) => AfreeStatus::Io,
            _ => AfreeStatus::InvalidArgument,
        }
    }
}

/// A number field (`Q` or `Q(sqrt m)`).
pub struct AfreeField(NumberField);

/// Exact ideal counts up to a bound.
pub struct AfreeCounter(NormCounter);

/// A family of ideals.
pub struct AfreeFamily(AFamily);

/// One factor `P^e` of an ideal, with `P` the prime above `p` of the given
/// conjugate index.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AfreePrimePower {
    pub p: u64,
    pub conjugate_index: u8,
    pub exponent: u32,
}

/// Density estimates from one profile pass.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct AfreeProfile {
    pub natural: f64,
    pub logarithmic: f64,
    pub lower_natural: f64,
    pub upper_natural: f64,
    pub lower_log: f64,
    pub upper_log: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> AfreeStatus {
    set_error(e.to_string());
    AfreeStatus::from(&e)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), AfreeStatus>) -> AfreeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AfreeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            AfreeStatus::Panic
        }
    }
}

fn null() -> AfreeStatus {
    set_error("null pointer argument".into());
    AfreeStatus::NullPointer
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, AfreeStatus> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(Error::Parse("string is not UTF-8".into())))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), AfreeStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, AfreeStatus> {
    p.as_ref().ok_or_else(null)
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn afree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn afree_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"Q"`, `"Q(sqrt m)"` or `"Q(sqrt(m))"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn afree_field_parse(name: *const c_char, out: *mut *mut AfreeField) -> AfreeStatus {
    guard(|| {
        let field: NumberField = read_str(name)?.parse().map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(AfreeField(field))))
    })
}

/// `Q(sqrt m)` for squarefree `m`, or `Q` when `m == 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn afree_field_new(m: i64, out: *mut *mut AfreeField) -> AfreeStatus {
    guard(|| {
        let field = if m == 1 {
            NumberField::rational()
        } else {
            NumberField::quadratic(m).map_err(fail)?
        };
        write_out(out, Box::into_raw(Box::new(AfreeField(field))))
    })
}

/// # Safety
/// `field` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn afree_field_free(field: *mut AfreeField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_field_degree(field: *const AfreeField, out: *mut u32) -> AfreeStatus {
    guard(|| write_out(out, handle(field)?.0.degree()))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_field_discriminant(field: *const AfreeField, out: *mut i64) -> AfreeStatus {
    guard(|| write_out(out, handle(field)?.0.discriminant()))
}

/// Class number of an imaginary quadratic field.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_field_class_number(field: *const AfreeField, out: *mut u64) -> AfreeStatus {
    guard(|| {
        let f = handle(field)?.0;
        if !f.is_imaginary_quadratic() {
            return Err(fail(Error::UnsupportedField(f.to_string())));
        }
        let h = class_number_imag_quadratic(f.discriminant()).map_err(fail)?;
        write_out(out, h)
    })
}

/// Residue of the Dedekind zeta function at 1, when known in closed form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_field_residue(field: *const AfreeField, out: *mut f64) -> AfreeStatus {
    guard(|| {
        let f = handle(field)?.0;
        let r = f
            .analytic_residue()
            .ok_or_else(|| fail(Error::UnsupportedField(f.to_string())))?;
        write_out(out, r)
    })
}

/// Builds exact counts `H(x)` for `x <= bound`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_counter_new(
    field: *const AfreeField,
    bound: u64,
    out: *mut *mut AfreeCounter,
) -> AfreeStatus {
    guard(|| {
        let f = handle(field)?.0;
        if bound == 0 {
            return Err(fail(Error::BoundTooSmall { got: 0, min: 1 }));
        }
        write_out(out, Box::into_raw(Box::new(AfreeCounter(count_ideals(&f, bound)))))
    })
}

/// # Safety
/// `counter` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn afree_counter_free(counter: *mut AfreeCounter) {
    if !counter.is_null() {
        drop(Box::from_raw(counter));
    }
}

/// `H(x)`, the number of ideals of norm at most `x`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_counter_count(counter: *const AfreeCounter, x: u64, out: *mut u64) -> AfreeStatus {
    guard(|| {
        let c = &handle(counter)?.0;
        if x > c.bound() {
            return Err(fail(Error::InvalidArgument(format!(
                "x = {x} exceeds counter bound {}",
                c.bound()
            ))));
        }
        write_out(out, c.count_up_to(x))
    })
}

/// Truncated Dedekind zeta value with its tail bound.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_dedekind_zeta(
    field: *const AfreeField,
    s: f64,
    truncation: u64,
    value: *mut f64,
    tail_bound: *mut f64,
) -> AfreeStatus {
    guard(|| {
        let z = dedekind_zeta(&handle(field)?.0, s, truncation).map_err(fail)?;
        write_out(value, z.value)?;
        write_out(tail_bound, z.tail_bound)
    })
}

/// Partial Euler product up to `cutoff` divided by `log cutoff`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_mertens_ratio(field: *const AfreeField, cutoff: u64, out: *mut f64) -> AfreeStatus {
    guard(|| {
        let m = mertens_ratio(&handle(field)?.0, cutoff).map_err(fail)?;
        write_out(out, m.ratio)
    })
}

/// Parses a family document (`{"field": ..., "kind": ..., ...}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn afree_family_parse(json: *const c_char, out: *mut *mut AfreeFamily) -> AfreeStatus {
    guard(|| {
        let fam = afree::cli::parse_family(read_str(json)?).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(AfreeFamily(fam))))
    })
}

/// The family of all `P^l` with `P` prime.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_family_prime_powers(
    field: *const AfreeField,
    l: u32,
    out: *mut *mut AfreeFamily,
) -> AfreeStatus {
    guard(|| {
        let fam = AFamily::prime_powers(handle(field)?.0, l).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(AfreeFamily(fam))))
    })
}

/// # Safety
/// `family` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn afree_family_free(family: *mut AfreeFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Whether the ideal `prod P^e` is a multiple of some member.
///
/// # Safety
/// `factors` must point to `len` readable entries (or be NULL with
/// `len == 0`); other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_family_is_multiple(
    family: *const AfreeFamily,
    factors: *const AfreePrimePower,
    len: usize,
    out: *mut bool,
) -> AfreeStatus {
    guard(|| {
        let fam = &handle(family)?.0;
        let slice = if len == 0 {
            &[][..]
        } else if factors.is_null() {
            return Err(null());
        } else {
            std::slice::from_raw_parts(factors, len)
        };
        let triples: Vec<(u64, u8, u32)> = slice.iter().map(|f| (f.p, f.conjugate_index, f.exponent)).collect();
        let b = Ideal::from_triples(fam.field(), &triples).map_err(fail)?;
        write_out(out, fam.is_multiple(&b).map_err(fail)?)
    })
}

fn exact_density(fam: &AFamily, r_max: usize) -> Result<num_rational::BigRational, AfreeStatus> {
    match fam.rule() {
        FamilyRule::Explicit(m) => finite_ie_density(m).map_err(fail),
        _ => {
            if r_max == 0 {
                return Err(fail(Error::InvalidArgument("r_max must be at least 1".into())));
            }
            a_limit(fam, r_max)
                .map_err(fail)
                .map(|s| s.last().cloned().expect("r_max >= 1"))
        }
    }
}

/// Exact density of the multiples of the family (or of its first `r_max`
/// members for infinite families) as a newly allocated `"p/q"` string.
///
/// # Safety
/// Pointers must be valid. Free the result with [`afree_string_free`].
#[no_mangle]
pub unsafe extern "C" fn afree_family_density(
    family: *const AfreeFamily,
    r_max: usize,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> AfreeStatus {
    guard(|| {
        let d = exact_density(&handle(family)?.0, r_max)?;
        write_out(value, d.to_f64().unwrap_or(f64::NAN))?;
        if !exact.is_null() {
            let s = CString::new(d.to_string()).expect("no interior NUL");
            exact.write(s.into_raw());
        }
        Ok(())
    })
}

/// Natural and logarithmic density estimates of the multiples up to norm
/// `max_norm`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn afree_family_profile(
    family: *const AfreeFamily,
    max_norm: u64,
    samples: usize,
    out: *mut AfreeProfile,
) -> AfreeStatus {
    guard(|| {
        let (m, _) = family_profiles(&handle(family)?.0, max_norm, samples).map_err(fail)?;
        write_out(
            out,
            AfreeProfile {
                natural: m.measured_natural(),
                logarithmic: m.measured_log(),
                lower_natural: m.lower_natural,
                upper_natural: m.upper_natural,
                lower_log: m.lower_log,
                upper_log: m.upper_log,
            },
        )
    })
}

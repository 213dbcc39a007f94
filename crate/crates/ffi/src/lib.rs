//! C interface to the `contpois` library.
//!
//! Laws and random streams are opaque handles created by `cp_*_new` and
//! released by the matching `cp_*_free`. Every fallible call returns a
//! [`CpStatus`] and writes its result through an out-pointer; on failure the
//! message is kept per thread and can be fetched with
//! [`cp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use contpois::moments::{battery_quadrature, moment, MomentRequest, MomentRoute};
use contpois::{ContBinomial, ContPoisson, ContinuousLaw, DensityRoute, Error, Law, RandomStream};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Convergence = 3,
    ExperimentDesign = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpDensityRoute {
    Derivative = 0,
    DoubleIntegral = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpMomentRoute {
    Volterra = 0,
    TailIntegral = 1,
}

/// Opaque distribution handle.
pub struct CpLaw(Law);

/// Opaque random-stream handle.
pub struct CpStream(RandomStream);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CpStatus {
    match e {
        Error::Domain(_) => CpStatus::Domain,
        Error::Convergence { .. } => CpStatus::Convergence,
        Error::ExperimentDesign(_) => CpStatus::ExperimentDesign,
        Error::Internal(_) => CpStatus::Internal,
    }
}

// Runs `body`, translating errors and panics into status codes.
fn guard<F>(body: F) -> CpStatus
where
    F: FnOnce() -> Result<(), CpFailure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CpStatus::Ok,
        Ok(Err(CpFailure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            CpStatus::NullPointer
        }
        Ok(Err(CpFailure::Lib(e))) => {
            let status = status_of(&e);
            set_last_error(e.to_string());
            status
        }
        Err(_) => {
            set_last_error("panic inside contpois".to_string());
            CpStatus::Panic
        }
    }
}

enum CpFailure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for CpFailure {
    fn from(e: Error) -> Self {
        CpFailure::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, CpFailure> {
    p.as_ref().ok_or(CpFailure::Null(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &'static str) -> Result<(), CpFailure> {
    if p.is_null() {
        return Err(CpFailure::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn new_law(law: Result<Law, Error>, out: *mut *mut CpLaw) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return Err(CpFailure::Null("out"));
        }
        out.write(ptr::null_mut());
        let handle = Box::into_raw(Box::new(CpLaw(law?)));
        out.write(handle);
        Ok(())
    })
}

/// Creates a continuous Poisson law. `*out` is NULL on failure.
///
/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_poisson_new(lambda: f64, out: *mut *mut CpLaw) -> CpStatus {
    new_law(ContPoisson::new(lambda).map(Law::Poisson), out)
}

/// Creates a continuous binomial law (`n` need not be an integer).
///
/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_binomial_new(n: f64, p: f64, out: *mut *mut CpLaw) -> CpStatus {
    new_law(ContBinomial::new(n, p).map(Law::Binomial), out)
}

/// Releases a law. NULL is ignored.
///
/// # Safety
/// `law` must be NULL or a handle from `cp_law_*_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_law_free(law: *mut CpLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// `P(X < x)`.
///
/// # Safety
/// `law` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_cdf(law: *const CpLaw, x: f64, out: *mut f64) -> CpStatus {
    guard(|| {
        let law = deref(law, "law")?;
        write_out(out, law.0.cdf(x)?, "out")
    })
}

/// Density at `x` by the chosen route.
///
/// # Safety
/// `law` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_pdf(law: *const CpLaw, x: f64, route: CpDensityRoute, out: *mut f64) -> CpStatus {
    guard(|| {
        let law = deref(law, "law")?;
        let route = match route {
            CpDensityRoute::Derivative => DensityRoute::Derivative,
            CpDensityRoute::DoubleIntegral => DensityRoute::DoubleIntegral,
        };
        write_out(out, law.0.pdf(x, route)?, "out")
    })
}

/// Quantile at level `q ∈ [0, 1]`; the Poisson quantile of 1 is `+inf`.
///
/// # Safety
/// `law` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_quantile(law: *const CpLaw, q: f64, out: *mut f64) -> CpStatus {
    guard(|| {
        let law = deref(law, "law")?;
        write_out(out, law.0.quantile(q)?, "out")
    })
}

/// Closed-form mass of `[x, x + 1)`.
///
/// # Safety
/// `law` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_law_interval_mass(law: *const CpLaw, x: f64, out: *mut f64) -> CpStatus {
    guard(|| {
        let law = deref(law, "law")?;
        write_out(out, law.0.interval_mass(x)?, "out")
    })
}

/// Fills `out[0..count]` with inverse-CDF samples drawn from the start of
/// `stream`. The stream handle is not advanced: equal calls give equal draws.
///
/// # Safety
/// `law` and `stream` must be live handles; `out` valid for `count` writes.
#[no_mangle]
pub unsafe extern "C" fn cp_law_sample(
    law: *const CpLaw,
    stream: *const CpStream,
    count: usize,
    out: *mut f64,
) -> CpStatus {
    guard(|| {
        let law = deref(law, "law")?;
        let stream = deref(stream, "stream")?;
        if out.is_null() {
            return Err(CpFailure::Null("out"));
        }
        let draws = law.0.sample(&stream.0, count)?;
        ptr::copy_nonoverlapping(draws.as_ptr(), out, draws.len());
        Ok(())
    })
}

/// Creates a random stream; never fails.
#[no_mangle]
pub extern "C" fn cp_stream_new(seed: u64, stream_id: u64) -> *mut CpStream {
    Box::into_raw(Box::new(CpStream(RandomStream::new(seed, stream_id))))
}

/// Releases a stream. NULL is ignored.
///
/// # Safety
/// `stream` must be NULL or a handle from `cp_stream_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_stream_free(stream: *mut CpStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// `k`-th moment of the continuous Poisson law; `m_0 = 1`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cp_poisson_moment(lambda: f64, k: u32, route: CpMomentRoute, out: *mut f64) -> CpStatus {
    guard(|| {
        let route = match route {
            CpMomentRoute::Volterra => MomentRoute::Volterra,
            CpMomentRoute::TailIntegral => MomentRoute::TailIntegral,
        };
        let req = MomentRequest::new(lambda, k, route)?;
        write_out(out, moment(&req, &battery_quadrature())?, "out")
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full message length
/// without the terminator; 0 if there is no error.
///
/// # Safety
/// `buf` must be NULL or valid for `len` byte writes.
#[no_mangle]
pub unsafe extern "C" fn cp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

//! Float functions that live in `std` rather than `core`, routed through
//! `libm` on no_std builds. Each wrapper compiles to the same intrinsic under
//! `std`, so results are identical across the two configurations.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $libm:ident) => {
        #[cfg(feature = "std")]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            f64::$name(x)
        }
        #[cfg(not(feature = "std"))]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$libm(x)
        }
    };
}

shim!(sqrt, sqrt);
shim!(ln, log);
shim!(log2, log2);
shim!(exp, exp);
shim!(exp2, exp2);
shim!(sin, sin);
shim!(abs, fabs);
shim!(floor, floor);
shim!(ceil, ceil);
shim!(round, round);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    f64::powf(x, y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

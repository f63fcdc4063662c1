//! End-to-end acceptance checks for `egeom`, run as the `acceptance` test target.

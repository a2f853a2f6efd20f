//! Holds the `acceptance` test target, which prints one line per criterion.
//!
//! It lives in its own package so that cargo runs it after every other test
//! binary of the workspace.

pub mod airy;
pub mod fredholm;
pub mod tracy_widom;
pub mod toeplitz;
pub mod gcbo;
pub mod tails;

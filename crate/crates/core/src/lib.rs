//! Off-dynamics inverse reinforcement learning.
//!
//! Learns a reward function inside a *target* simulator from expert
//! demonstrations that were recorded in a *source* domain whose transition
//! dynamics differ. The adversarial discriminator of AIRL is augmented with a
//! dynamics-difference term estimated by two domain classifiers, so that demo
//! transitions which are only possible under the source dynamics are not
//! imitated blindly.
//!
//! The crate is organised bottom-up:
//!
//! - [`env`]: paired source/target simulators (point maze, actuated link chain).
//! - [`approx`]: multilayer perceptrons, analytic backprop, Adam, checkpoints.
//! - [`policy`]: Gaussian policy and the clipped-ratio entropy-regularised optimizer.
//! - [`dd`]: domain classifiers and the dynamics-difference estimate.
//! - [`irl`]: AIRL / off-dynamics / GAIL discriminators and reward extraction.
//! - [`buffers`]: tagged replay buffers and demonstration files.
//! - [`harness`]: the outer training loop, baselines, ablations and logging.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod approx;
pub mod buffers;
pub mod dd;
pub mod env;
pub mod error;
pub mod harness;
pub mod irl;
pub mod policy;
pub mod rng;

pub use error::{Error, Result};

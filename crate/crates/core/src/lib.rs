pub mod circuits;
pub mod decoder;
pub mod duality;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod mps;
pub mod noise;
pub mod randmeas;
pub mod rng;
pub mod spectral;
pub mod statevec;

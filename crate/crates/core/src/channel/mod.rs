//! Multipath fading and noise.

mod fading;
mod noise;
mod profile;

pub use fading::{
    apply_channel, doppler_from_speed, freq_response_surface_csv, gen_tap_gains, symbol_midpoint,
    true_freq_response, ChannelRealization, SINUSOIDS_PER_TAP, SPEED_OF_LIGHT,
};
pub use noise::{
    add_awgn, add_impulse, awgn_noise, impulse_noise, noise_variance, ImpulseNoise, NoiseSpec,
};
pub use profile::{eva_profile, quantize_taps, ChannelProfile, QuantizedTaps, Tap};

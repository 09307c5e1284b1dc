#pragma once

#include <cstdint>
#include <vector>

#include "curvecast/curve_models.hpp"
#include "curvecast/io.hpp"
#include "curvecast/types.hpp"

namespace curvecast::synth {

struct SynthConfig {
  std::size_t n_curves = 100;
  double noise_sd = 0.0;
  int horizon = 50;  // curve length T
  std::uint64_t seed = 0;
};

/// One generated record: latent-driven meta-feature slots, the generating
/// curve parameters, and the (optionally noisy) accuracy curve.
struct SynthRecord {
  io::MetaRecord meta;
  curves::CurveParams theta;
  ValidationCurve curve;
};

/// Generate a deterministic corpus. Four latent uniforms drive both four of
/// the meta-feature slots (class_conc.mean, sparsity.mean, gravity,
/// mut_inf.mean) and the curve parameters, so the meta-features carry real
/// signal about the curve:
///   A =  0.01 + 0.04*u1
///   B = -(0.0005 + 0.0025*u2)
///   C =  0.35 + 0.25*u3
///   D = -(0.05 + 0.20*u4)
/// Remaining slots are plausible nuisance draws. Noisy values are clamped
/// to [0, 1] (the curves are accuracy curves).
std::vector<SynthRecord> synth_corpus(const SynthConfig& config);

}  // namespace curvecast::synth

#include "curvecast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "curvecast/metafeatures.hpp"
#include "curvecast/rng.hpp"

namespace curvecast::synth {

std::vector<SynthRecord> synth_corpus(const SynthConfig& config) {
  if (config.n_curves < 1) throw Error("synth: n_curves must be >= 1");
  if (config.noise_sd < 0.0) throw Error("synth: noise_sd must be >= 0");
  if (config.horizon < 6)
    throw Error("synth: horizon must be >= 6 (need a non-empty query set)");

  std::vector<SynthRecord> out;
  out.reserve(config.n_curves);
  for (std::size_t i = 0; i < config.n_curves; ++i) {
    rng::Stream rs(config.seed, "synth/curve/" + std::to_string(i));
    double u1 = rs.uniform(), u2 = rs.uniform(), u3 = rs.uniform(), u4 = rs.uniform();

    SynthRecord rec;
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%04zu", i);
    rec.meta.dataset_id = name;
    rec.meta.layout_version = mf::kLayoutVersion;

    rec.theta = {0.01 + 0.04 * u1, -(0.0005 + 0.0025 * u2), 0.35 + 0.25 * u3,
                 -(0.05 + 0.20 * u4)};

    // Slot layout matches MetaFeatureVector::slot_names(). The four latent
    // slots carry the signal; the rest are nuisance draws in realistic
    // ranges.
    double nr_attr = std::floor(rs.uniform(5.0, 100.0));
    double log_nr_inst = rs.uniform(3.0, 6.0);
    auto& s = rec.meta.slots;
    s[0] = u1;                                  // class_conc.mean
    s[1] = log_nr_inst - std::log10(nr_attr);   // log10 inst_to_attr
    s[2] = rs.uniform(-1.0, 1.0);               // mean.mean
    s[3] = rs.uniform(0.0, 2.0);                // mean.sd
    s[4] = rs.uniform(0.5, 10.0);               // range.mean
    s[5] = rs.uniform(0.0, 5.0);                // range.sd
    s[6] = rs.uniform(0.1, 4.0);                // iq_range.mean
    s[7] = rs.uniform(0.0, 2.0);                // iq_range.sd
    s[8] = nr_attr;                             // nr_attr
    s[9] = u2;                                  // sparsity.mean
    s[10] = 2.0 * u3;                           // gravity
    s[11] = rs.uniform(1.0, 4.0);               // joint_ent.mean
    s[12] = rs.uniform(1.0, 2.5);               // attr_ent.mean
    s[13] = rs.uniform(0.0, 1.0);               // cov.mean
    s[14] = rs.uniform(0.5, 10.0);              // max.mean
    s[15] = rs.uniform(0.0, 5.0);               // max.sd
    s[16] = u4;                                 // mut_inf.mean
    s[17] = log_nr_inst;                        // log10 nr_inst
    s[18] = rs.uniform(0.0, 10.0);              // ns_ratio

    rec.curve.dataset_id = rec.meta.dataset_id;
    rec.curve.task = Task::binclass;
    rec.curve.metric = Metric::accuracy;
    rec.curve.values.resize(static_cast<std::size_t>(config.horizon));
    for (int t = 1; t <= config.horizon; ++t) {
      double v = curves::eval_law(rec.theta, t);
      if (config.noise_sd > 0.0)
        v = std::clamp(v + config.noise_sd * rs.normal(), 0.0, 1.0);
      rec.curve.values[static_cast<std::size_t>(t) - 1] = v;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace curvecast::synth

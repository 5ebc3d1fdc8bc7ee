#include "nicdiag/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nicdiag {

const char* to_string(PatternClass c) {
  switch (c) {
    case PatternClass::Flat: return "flat";
    case PatternClass::SteadyRise: return "steady-rise";
    case PatternClass::SteadyFall: return "steady-fall";
    case PatternClass::SingleSpike: return "single-spike";
    case PatternClass::MultiPeak: return "multi-peak";
    case PatternClass::LevelShiftUp: return "level-shift-up";
    case PatternClass::LevelShiftDown: return "level-shift-down";
    case PatternClass::SharpDecline: return "sharp-decline";
  }
  return "flat";
}

PatternClass pattern_class_from_code(int code) {
  if (code < 0 || code >= kPatternClassCount) {
    throw ConfigError("pattern class code out of range: " + std::to_string(code));
  }
  return static_cast<PatternClass>(code);
}

std::vector<double> normalize_slice(const std::vector<double>& diffs) {
  std::vector<double> out(kSliceLength, 0.0);
  if (diffs.empty()) return out;

  if (diffs.size() == 1) {
    // Single sample resamples to a constant, which z-normalizes to zero.
    return out;
  }
  for (int i = 0; i < kSliceLength; ++i) {
    const double h =
        static_cast<double>(i) * (diffs.size() - 1) / (kSliceLength - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= diffs.size()) {
      out[i] = diffs.back();
    } else {
      out[i] = diffs[lo] + (h - lo) * (diffs[lo + 1] - diffs[lo]);
    }
  }

  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= kSliceLength;
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  var /= kSliceLength;
  const double sd = std::sqrt(var);
  if (sd < 1e-12) return std::vector<double>(kSliceLength, 0.0);
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

const char* to_string(LevelSymbol s) {
  switch (s) {
    case LevelSymbol::VL: return "VL";
    case LevelSymbol::L: return "L";
    case LevelSymbol::M: return "M";
    case LevelSymbol::H: return "H";
    case LevelSymbol::VH: return "VH";
  }
  return "M";
}

namespace {

// Linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::map<std::string, LevelSymbol> level_symbols(
    const std::map<std::string, double>& per_device_means) {
  std::map<std::string, LevelSymbol> out;
  if (per_device_means.size() < 4) {
    for (const auto& [device, mean] : per_device_means) {
      out[device] = LevelSymbol::M;
    }
    return out;
  }

  std::vector<double> sorted;
  sorted.reserve(per_device_means.size());
  for (const auto& [device, mean] : per_device_means) sorted.push_back(mean);
  std::sort(sorted.begin(), sorted.end());

  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  const double iqr = q3 - q1;
  const double lo_fence = q1 - 1.5 * iqr;
  const double hi_fence = q3 + 1.5 * iqr;

  for (const auto& [device, x] : per_device_means) {
    LevelSymbol s;
    if (x < lo_fence) {
      s = LevelSymbol::VL;
    } else if (x < q1) {
      s = LevelSymbol::L;
    } else if (x <= q3) {
      s = LevelSymbol::M;
    } else if (x <= hi_fence) {
      s = LevelSymbol::H;
    } else {
      s = LevelSymbol::VH;
    }
    out[device] = s;
  }
  return out;
}

namespace {

constexpr int kConvPositions = kSliceLength - PatternModel::kKernelWidth + 1;
constexpr int kRegionWidth = kConvPositions / PatternModel::kPoolRegions;

struct ForwardState {
  std::array<double, PatternModel::kPooledSize> pooled{};
  std::array<int, PatternModel::kPooledSize> argmax_pos{};  // -1 if clamped
  std::array<double, kPatternClassCount> probs{};
};

}  // namespace

std::array<double, PatternModel::kPooledSize> PatternModel::pooled_features(
    const std::vector<double>& x) const {
  std::array<double, kPooledSize> pooled{};
  for (int k = 0; k < kKernels; ++k) {
    for (int r = 0; r < kPoolRegions; ++r) {
      const int begin = r * kRegionWidth;
      const int end = (r + 1 == kPoolRegions) ? kConvPositions
                                              : (r + 1) * kRegionWidth;
      double best = -1e300;
      for (int t = begin; t < end; ++t) {
        double acc = conv_bias_[k];
        for (int w = 0; w < kKernelWidth; ++w) acc += conv_[k][w] * x[t + w];
        best = std::max(best, acc);
      }
      pooled[k * kPoolRegions + r] = std::max(0.0, best);
    }
  }
  return pooled;
}

std::array<double, kPatternClassCount> PatternModel::scores(
    const std::vector<double>& normalized) const {
  if (normalized.size() != kSliceLength) {
    throw ConfigError("pattern model expects a normalized slice of length " +
                      std::to_string(kSliceLength));
  }
  const auto pooled = pooled_features(normalized);
  std::array<double, kPatternClassCount> logits{};
  for (int c = 0; c < kPatternClassCount; ++c) {
    double acc = dense_bias_[c];
    for (int p = 0; p < kPooledSize; ++p) acc += dense_[c][p] * pooled[p];
    logits[c] = acc;
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  std::array<double, kPatternClassCount> probs{};
  for (int c = 0; c < kPatternClassCount; ++c) {
    probs[c] = std::exp(logits[c] - m);
    z += probs[c];
  }
  for (double& p : probs) p /= z;
  return probs;
}

PatternClass PatternModel::classify(const std::vector<double>& slice) const {
  const auto probs = scores(normalize_slice(slice));
  int best = 0;
  for (int c = 1; c < kPatternClassCount; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return static_cast<PatternClass>(best);
}

namespace {

struct TrainSample {
  std::vector<double> normalized;
  int label;
};

struct Gradients {
  std::array<std::array<double, PatternModel::kKernelWidth>,
             PatternModel::kKernels> conv{};
  std::array<double, PatternModel::kKernels> conv_bias{};
  std::array<std::array<double, PatternModel::kPooledSize>,
             kPatternClassCount> dense{};
  std::array<double, kPatternClassCount> dense_bias{};
};

}  // namespace

PatternModel PatternModel::train(
    const std::vector<std::pair<std::vector<double>, PatternClass>>& labeled,
    std::uint64_t seed) {
  std::array<int, kPatternClassCount> class_counts{};
  for (const auto& [slice, label] : labeled) {
    class_counts[static_cast<int>(label)]++;
  }
  int present = 0;
  for (int c = 0; c < kPatternClassCount; ++c) {
    if (class_counts[c] == 0) continue;
    ++present;
    if (class_counts[c] < 10) {
      throw TrainingError(std::string("too few training slices for class '") +
                          to_string(static_cast<PatternClass>(c)) + "': " +
                          std::to_string(class_counts[c]) + " < 10");
    }
  }
  if (present < 2) {
    throw TrainingError("pattern training needs at least 2 classes, got " +
                        std::to_string(present));
  }

  // Stratified 80/20 split so held-out accuracy covers every class.
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::vector<TrainSample> train_set, holdout;
  {
    std::vector<std::vector<std::size_t>> by_class(kPatternClassCount);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      by_class[static_cast<int>(labeled[i].second)].push_back(i);
    }
    for (auto& idx : by_class) {
      for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
      }
      const std::size_t n_holdout = idx.empty() ? 0 : std::max<std::size_t>(1, idx.size() / 5);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        TrainSample s{normalize_slice(labeled[idx[i]].first),
                      static_cast<int>(labeled[idx[i]].second)};
        (i < n_holdout ? holdout : train_set).push_back(std::move(s));
      }
    }
  }

  PatternModel model;
  const double conv_std = 1.0 / std::sqrt(static_cast<double>(kKernelWidth));
  const double dense_std = 1.0 / std::sqrt(static_cast<double>(kPooledSize));
  for (int k = 0; k < kKernels; ++k) {
    for (int w = 0; w < kKernelWidth; ++w) {
      model.conv_[k][w] = conv_std * gaussian(rng);
    }
    model.conv_bias_[k] = 0.0;
  }
  for (int c = 0; c < kPatternClassCount; ++c) {
    for (int p = 0; p < kPooledSize; ++p) {
      model.dense_[c][p] = dense_std * gaussian(rng);
    }
    model.dense_bias_[c] = 0.0;
  }

  const int epochs = 150;
  const double lr0 = 0.05;
  const double momentum = 0.9;
  const std::size_t batch_size = 32;

  Gradients velocity;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double lr = lr0 * std::pow(0.99, epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(begin + batch_size, order.size());
      Gradients g;
      for (std::size_t oi = begin; oi < end; ++oi) {
        const TrainSample& s = train_set[order[oi]];
        const std::vector<double>& x = s.normalized;

        ForwardState fs;
        for (int k = 0; k < kKernels; ++k) {
          for (int r = 0; r < kPoolRegions; ++r) {
            const int rb = r * kRegionWidth;
            const int re = (r + 1 == kPoolRegions) ? kConvPositions
                                                   : (r + 1) * kRegionWidth;
            double best = -1e300;
            int best_t = rb;
            for (int t = rb; t < re; ++t) {
              double acc = model.conv_bias_[k];
              for (int w = 0; w < kKernelWidth; ++w) {
                acc += model.conv_[k][w] * x[t + w];
              }
              if (acc > best) {
                best = acc;
                best_t = t;
              }
            }
            const int p = k * kPoolRegions + r;
            if (best > 0.0) {
              fs.pooled[p] = best;
              fs.argmax_pos[p] = best_t;
            } else {
              fs.pooled[p] = 0.0;
              fs.argmax_pos[p] = -1;
            }
          }
        }
        std::array<double, kPatternClassCount> logits{};
        for (int c = 0; c < kPatternClassCount; ++c) {
          double acc = model.dense_bias_[c];
          for (int p = 0; p < kPooledSize; ++p) {
            acc += model.dense_[c][p] * fs.pooled[p];
          }
          logits[c] = acc;
        }
        const double m = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (int c = 0; c < kPatternClassCount; ++c) {
          fs.probs[c] = std::exp(logits[c] - m);
          z += fs.probs[c];
        }
        for (double& p : fs.probs) p /= z;

        // Cross-entropy gradient.
        std::array<double, kPatternClassCount> glogit = fs.probs;
        glogit[s.label] -= 1.0;

        std::array<double, kPooledSize> gpooled{};
        for (int c = 0; c < kPatternClassCount; ++c) {
          g.dense_bias[c] += glogit[c];
          for (int p = 0; p < kPooledSize; ++p) {
            g.dense[c][p] += glogit[c] * fs.pooled[p];
            gpooled[p] += glogit[c] * model.dense_[c][p];
          }
        }
        for (int k = 0; k < kKernels; ++k) {
          for (int r = 0; r < kPoolRegions; ++r) {
            const int p = k * kPoolRegions + r;
            const int t = fs.argmax_pos[p];
            if (t < 0) continue;  // ReLU clamped this region
            g.conv_bias[k] += gpooled[p];
            for (int w = 0; w < kKernelWidth; ++w) {
              g.conv[k][w] += gpooled[p] * x[t + w];
            }
          }
        }
      }

      const double scale = 1.0 / static_cast<double>(end - begin);
      for (int k = 0; k < kKernels; ++k) {
        for (int w = 0; w < kKernelWidth; ++w) {
          velocity.conv[k][w] =
              momentum * velocity.conv[k][w] - lr * scale * g.conv[k][w];
          model.conv_[k][w] += velocity.conv[k][w];
        }
        velocity.conv_bias[k] =
            momentum * velocity.conv_bias[k] - lr * scale * g.conv_bias[k];
        model.conv_bias_[k] += velocity.conv_bias[k];
      }
      for (int c = 0; c < kPatternClassCount; ++c) {
        for (int p = 0; p < kPooledSize; ++p) {
          velocity.dense[c][p] =
              momentum * velocity.dense[c][p] - lr * scale * g.dense[c][p];
          model.dense_[c][p] += velocity.dense[c][p];
        }
        velocity.dense_bias[c] =
            momentum * velocity.dense_bias[c] - lr * scale * g.dense_bias[c];
        model.dense_bias_[c] += velocity.dense_bias[c];
      }
    }
  }

  int correct = 0;
  for (const TrainSample& s : holdout) {
    const auto probs = model.scores(s.normalized);
    int best = 0;
    for (int c = 1; c < kPatternClassCount; ++c) {
      if (probs[c] > probs[best]) best = c;
    }
    if (best == s.label) ++correct;
  }

  model.meta_.seed = seed;
  model.meta_.epochs = epochs;
  model.meta_.learning_rate = lr0;
  model.meta_.holdout_accuracy =
      holdout.empty() ? 0.0 : static_cast<double>(correct) / holdout.size();
  return model;
}

void PatternModel::save(std::ostream& out) const {
  out << "nicdiag-pattern-model v1\n";
  out << "kernels " << kKernels << " width " << kKernelWidth << " regions "
      << kPoolRegions << " classes " << kPatternClassCount << "\n";
  out << "meta seed " << meta_.seed << " epochs " << meta_.epochs << " lr "
      << format_double(meta_.learning_rate) << " holdout "
      << format_double(meta_.holdout_accuracy) << "\n";
  for (int k = 0; k < kKernels; ++k) {
    out << "conv";
    for (int w = 0; w < kKernelWidth; ++w) {
      out << ' ' << format_double(conv_[k][w]);
    }
    out << ' ' << format_double(conv_bias_[k]) << "\n";
  }
  for (int c = 0; c < kPatternClassCount; ++c) {
    out << "dense";
    for (int p = 0; p < kPooledSize; ++p) {
      out << ' ' << format_double(dense_[c][p]);
    }
    out << ' ' << format_double(dense_bias_[c]) << "\n";
  }
}

PatternModel PatternModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "nicdiag-pattern-model v1") {
    throw ParseError("bad pattern model header");
  }
  PatternModel model;
  if (!std::getline(in, line)) throw ParseError("truncated pattern model");
  if (!std::getline(in, line)) throw ParseError("truncated pattern model");
  {
    const auto t = split_tokens(line);
    if (t.size() != 9 || t[0] != "meta") throw ParseError("bad pattern meta");
    model.meta_.seed = std::stoull(t[2]);
    model.meta_.epochs = std::stoi(t[4]);
    model.meta_.learning_rate = parse_double(t[6]);
    model.meta_.holdout_accuracy = parse_double(t[8]);
  }
  for (int k = 0; k < kKernels; ++k) {
    if (!std::getline(in, line)) throw ParseError("truncated pattern model");
    const auto t = split_tokens(line);
    if (t.size() != 1 + kKernelWidth + 1 || t[0] != "conv") {
      throw ParseError("bad conv row in pattern model");
    }
    for (int w = 0; w < kKernelWidth; ++w) {
      model.conv_[k][w] = parse_double(t[1 + w]);
    }
    model.conv_bias_[k] = parse_double(t[1 + kKernelWidth]);
  }
  for (int c = 0; c < kPatternClassCount; ++c) {
    if (!std::getline(in, line)) throw ParseError("truncated pattern model");
    const auto t = split_tokens(line);
    if (t.size() != 1 + kPooledSize + 1 || t[0] != "dense") {
      throw ParseError("bad dense row in pattern model");
    }
    for (int p = 0; p < kPooledSize; ++p) {
      model.dense_[c][p] = parse_double(t[1 + p]);
    }
    model.dense_bias_[c] = parse_double(t[1 + kPooledSize]);
  }
  return model;
}

void PatternModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write pattern model: " + path);
  save(out);
}

PatternModel PatternModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pattern model: " + path);
  return load(in);
}

namespace {

std::vector<double> gaussian_bump(int n, double center, double width,
                                  double height) {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double d = (i - center) / width;
    y[i] = height * std::exp(-0.5 * d * d);
  }
  return y;
}

}  // namespace

std::vector<ShapeSample> generate_shape_corpus(int per_class,
                                               std::uint64_t seed) {
  std::vector<ShapeSample> corpus;
  corpus.reserve(static_cast<std::size_t>(per_class) * kPatternClassCount);
  for (int c = 0; c < kPatternClassCount; ++c) {
    const PatternClass label = static_cast<PatternClass>(c);
    for (int s = 0; s < per_class; ++s) {
      std::mt19937_64 rng(
          mix_seed(seed, static_cast<std::uint64_t>(c) * 100000 + s));
      const int n = 48 + static_cast<int>(uniform_index(rng, 49));  // 48..96
      const double noise = 0.2 + 0.5 * uniform01(rng);
      const double amp = 8.0;
      std::vector<double> y(n, 0.0);

      switch (label) {
        case PatternClass::Flat: {
          // Unstructured: plain noise, occasionally exactly constant.
          const bool constant = uniform01(rng) < 0.15;
          for (int i = 0; i < n; ++i) {
            y[i] = constant ? 3.0 : gaussian(rng);
          }
          break;
        }
        case PatternClass::SteadyRise:
        case PatternClass::SteadyFall: {
          const double sign = label == PatternClass::SteadyRise ? 1.0 : -1.0;
          for (int i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / (n - 1);
            y[i] = sign * amp * u + noise * gaussian(rng);
          }
          break;
        }
        case PatternClass::SingleSpike: {
          if (uniform01(rng) < 0.5) {
            const double center = (0.15 + 0.7 * uniform01(rng)) * (n - 1);
            const double width = 1.2 + 1.8 * uniform01(rng);
            y = gaussian_bump(n, center, width, 10.0 + 4.0 * uniform01(rng));
            for (int i = 0; i < n; ++i) y[i] += noise * gaussian(rng);
          } else {
            // One wide excursion: up, hold, back down; any pulse width.
            const int start = 2 + static_cast<int>(uniform_index(rng, n / 3));
            const int width =
                std::max(3, static_cast<int>((0.08 + 0.42 * uniform01(rng)) * n));
            const int end = std::min(n - 2, start + width);
            const double height = 8.0 + 4.0 * uniform01(rng);
            for (int i = 0; i < n; ++i) {
              y[i] = (i >= start && i < end ? height : 0.0) +
                     noise * gaussian(rng);
            }
          }
          break;
        }
        case PatternClass::MultiPeak: {
          const int peaks = 3 + static_cast<int>(uniform_index(rng, 7));
          if (uniform01(rng) < 0.5) {
            // Square bursts, the shape of periodic collective traffic.
            const double period = static_cast<double>(n) / peaks;
            const double duty = 0.35 + 0.3 * uniform01(rng);
            const double phase = uniform01(rng) * period;
            for (int i = 0; i < n; ++i) {
              const double pos = std::fmod(i + phase, period);
              y[i] = (pos < duty * period ? amp : 0.0) + noise * gaussian(rng);
            }
          } else {
            for (int p = 0; p < peaks; ++p) {
              const double center =
                  (0.05 + 0.9 * (p + uniform01(rng) * 0.8) / peaks) * (n - 1);
              const double width = 1.2 + 1.5 * uniform01(rng);
              const auto bump =
                  gaussian_bump(n, center, width, 7.0 + 3.0 * uniform01(rng));
              for (int i = 0; i < n; ++i) y[i] += bump[i];
            }
            for (int i = 0; i < n; ++i) y[i] += noise * gaussian(rng);
          }
          break;
        }
        case PatternClass::LevelShiftUp:
        case PatternClass::LevelShiftDown: {
          const double sign = label == PatternClass::LevelShiftUp ? 1.0 : -1.0;
          const int edge =
              static_cast<int>((0.3 + 0.4 * uniform01(rng)) * (n - 1));
          for (int i = 0; i < n; ++i) {
            y[i] = (i >= edge ? sign * amp : 0.0) + noise * gaussian(rng);
          }
          break;
        }
        case PatternClass::SharpDecline: {
          const int fall_start =
              static_cast<int>((0.65 + 0.2 * uniform01(rng)) * (n - 1));
          const int fall_len =
              std::max(3, static_cast<int>((0.05 + 0.07 * uniform01(rng)) * n));
          for (int i = 0; i < n; ++i) {
            double v;
            if (i < fall_start) {
              v = amp;
            } else if (i < fall_start + fall_len) {
              v = amp * (1.0 - static_cast<double>(i - fall_start) / fall_len);
            } else {
              v = 0.0;
            }
            y[i] = v + noise * gaussian(rng);
          }
          break;
        }
      }

      // Arbitrary offset/scale; normalization must erase both.
      const double scale = 0.5 + 49.5 * uniform01(rng);
      const double offset = 500.0 * uniform01(rng);
      for (double& v : y) v = offset + scale * v;
      corpus.push_back({std::move(y), label});
    }
  }
  return corpus;
}

}  // namespace nicdiag

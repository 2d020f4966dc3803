#include "dci/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "dci/error.hpp"
#include "dci/json_io.hpp"
#include "dci/rng.hpp"

namespace dci {
namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Numerically stable -t*log(p) - (1-t)*log(1-p) for p = sigmoid(z).
double logistic_loss(double z, double t) {
  return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
}

struct CellBounds {
  int x0, x1, y0, y1;
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  std::size_t count() const {
    return static_cast<std::size_t>(x1 - x0) * static_cast<std::size_t>(y1 - y0);
  }
};

// Integer partition of the anchor box into pool x pool cells; tiny boxes
// can produce empty cells, whose feature is defined as 0.
CellBounds cell_bounds(const Box& box, int pool, int cy, int cx) {
  const int bx0 = static_cast<int>(std::lround(box.x0));
  const int by0 = static_cast<int>(std::lround(box.y0));
  const int w = static_cast<int>(std::lround(box.x1)) - bx0;
  const int h = static_cast<int>(std::lround(box.y1)) - by0;
  CellBounds c;
  c.x0 = bx0 + static_cast<int>(static_cast<std::int64_t>(w) * cx / pool);
  c.x1 = bx0 + static_cast<int>(static_cast<std::int64_t>(w) * (cx + 1) / pool);
  c.y0 = by0 + static_cast<int>(static_cast<std::int64_t>(h) * cy / pool);
  c.y1 = by0 + static_cast<int>(static_cast<std::int64_t>(h) * (cy + 1) / pool);
  return c;
}

// Per-channel summed-area table; sum(x0,y0,x1,y1) is O(1).
class IntegralImage {
 public:
  explicit IntegralImage(const Image& image)
      : width_(image.width()), height_(image.height()),
        sums_(static_cast<std::size_t>(width_ + 1) * (height_ + 1)) {
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const Rgb& p = image.at(x, y);
        Rgb& s = cell(x + 1, y + 1);
        s = p + cell(x, y + 1) + cell(x + 1, y) - cell(x, y);
      }
    }
  }

  Rgb sum(int x0, int y0, int x1, int y1) const {
    return cell(x1, y1) - cell(x0, y1) - cell(x1, y0) + cell(x0, y0);
  }

 private:
  Rgb& cell(int x, int y) { return sums_[static_cast<std::size_t>(y) * (width_ + 1) + x]; }
  const Rgb& cell(int x, int y) const {
    return sums_[static_cast<std::size_t>(y) * (width_ + 1) + x];
  }

  int width_, height_;
  std::vector<Rgb> sums_;
};

std::vector<double> pooled_features(const IntegralImage& integral, const Box& box, int pool) {
  std::vector<double> features(3u * static_cast<std::size_t>(pool) * pool, 0.0);
  std::size_t k = 0;
  for (int cy = 0; cy < pool; ++cy) {
    for (int cx = 0; cx < pool; ++cx) {
      const CellBounds c = cell_bounds(box, pool, cy, cx);
      if (!c.empty()) {
        const Rgb avg = integral.sum(c.x0, c.y0, c.x1, c.y1) * (1.0 / c.count());
        features[k] = avg.r;
        features[k + 1] = avg.g;
        features[k + 2] = avg.b;
      }
      k += 3;
    }
  }
  return features;
}

double linear_score(const std::vector<double>& w, double b, const std::vector<double>& x) {
  double z = b;
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
  return z;
}

}  // namespace

std::vector<Anchor> build_anchor_grid(int width, int height, const AnchorGridConfig& config) {
  if (config.stride <= 0) throw Error("build_anchor_grid: stride must be positive");
  std::vector<Anchor> anchors;
  for (int gy = 0; gy * config.stride < height; ++gy) {
    for (int gx = 0; gx * config.stride < width; ++gx) {
      const double cx = (gx + 0.5) * config.stride;
      const double cy = (gy + 0.5) * config.stride;
      for (std::size_t s = 0; s < config.box_sizes.size(); ++s) {
        const double half_w = config.box_sizes[s].first * 0.5;
        const double half_h = config.box_sizes[s].second * 0.5;
        Box box{std::max(0.0, std::round(cx - half_w)),
                std::max(0.0, std::round(cy - half_h)),
                std::min<double>(width, std::round(cx + half_w)),
                std::min<double>(height, std::round(cy + half_h))};
        if (box.valid()) anchors.push_back({box, static_cast<int>(s)});
      }
    }
  }
  return anchors;
}

std::vector<double> score_anchors(const ToyDetectorModel& model, const Image& image,
                                  const std::vector<Anchor>& anchors) {
  if (model.weights.size() != model.anchors.box_sizes.size() ||
      model.biases.size() != model.anchors.box_sizes.size()) {
    throw Error("score_anchors: model weight count does not match anchor sizes");
  }
  const IntegralImage integral(image);
  std::vector<double> scores(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto x = pooled_features(integral, anchors[i].box, model.pool);
    scores[i] = sigmoid(
        linear_score(model.weights[anchors[i].size_index], model.biases[anchors[i].size_index], x));
  }
  return scores;
}

std::vector<Detection> detect(const ToyDetectorModel& model, const Image& image,
                              double score_threshold) {
  if (image.empty()) throw Error("detect: empty image");
  const auto anchors = build_anchor_grid(image.width(), image.height(), model.anchors);
  const auto scores = score_anchors(model, image, anchors);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (scores[i] >= score_threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<Detection> kept;
  for (std::size_t i : order) {
    bool suppressed = false;
    for (const Detection& d : kept) {
      if (iou(d.box, anchors[i].box) >= model.nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back({anchors[i].box, scores[i], model.class_id});
  }
  return kept;
}

std::vector<Detection> detect(const ToyDetectorModel& model, const Image& image) {
  return detect(model, image, model.threshold);
}

DetectGradResult detect_grad(const ToyDetectorModel& model, const Image& image,
                             const Box& target_box, double match_iou) {
  if (!target_box.valid()) throw Error("detect_grad: target box has non-positive area");
  DetectGradResult result;
  result.grad = Image(image.width(), image.height());

  const auto anchors = build_anchor_grid(image.width(), image.height(), model.anchors);
  const auto scores = score_anchors(model, image, anchors);
  std::size_t best = anchors.size();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (iou(anchors[i].box, target_box) < match_iou) continue;
    if (best == anchors.size() || scores[i] > scores[best]) best = i;
  }
  if (best == anchors.size()) return result;  // score 0, zero field, matched false

  result.matched = true;
  result.score = scores[best];
  const double dsig = scores[best] * (1.0 - scores[best]);
  const auto& w = model.weights[anchors[best].size_index];
  std::size_t k = 0;
  for (int cy = 0; cy < model.pool; ++cy) {
    for (int cx = 0; cx < model.pool; ++cx) {
      const CellBounds c = cell_bounds(anchors[best].box, model.pool, cy, cx);
      if (!c.empty()) {
        const Rgb per_pixel{dsig * w[k] / c.count(), dsig * w[k + 1] / c.count(),
                            dsig * w[k + 2] / c.count()};
        for (int y = c.y0; y < c.y1; ++y) {
          for (int x = c.x0; x < c.x1; ++x) result.grad.at(x, y) += per_pixel;
        }
      }
      k += 3;
    }
  }
  return result;
}

ToyDetectorModel train_toy_detector(const std::vector<TrainSample>& positives,
                                    const std::vector<Image>& negatives, std::uint64_t seed,
                                    const TrainConfig& config) {
  if (positives.size() < 10 || negatives.size() < 10) {
    throw Error("train_toy_detector: need at least 10 positives and 10 negatives, got " +
                std::to_string(positives.size()) + " / " + std::to_string(negatives.size()));
  }
  if (config.iterations < 0) throw Error("train_toy_detector: negative iteration count");

  ToyDetectorModel model;
  model.anchors = config.anchors;
  model.pool = config.pool;
  model.seed = seed;
  const std::size_t sizes = config.anchors.box_sizes.size();
  const std::size_t dim = model.feature_size();

  struct Group {
    std::vector<std::vector<double>> x;
    std::vector<double> t;  // 1 positive, 0 negative
  };
  std::vector<Group> groups(sizes);

  for (const TrainSample& sample : positives) {
    if (!sample.box.valid()) throw Error("train_toy_detector: positive with empty box");
    const auto anchors =
        build_anchor_grid(sample.image.width(), sample.image.height(), config.anchors);
    const IntegralImage integral(sample.image);
    std::size_t best = anchors.size();
    double best_iou = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const double v = iou(anchors[i].box, sample.box);
      if (v > best_iou) {
        best_iou = v;
        best = i;
      }
      if (v >= config.iou_positive) {
        groups[anchors[i].size_index].x.push_back(
            pooled_features(integral, anchors[i].box, config.pool));
        groups[anchors[i].size_index].t.push_back(1.0);
        any = true;
      }
    }
    // No anchor cleared the threshold: fall back to the best overlap so
    // every labeled box contributes at least one positive.
    if (!any && best != anchors.size() && best_iou > 0.0) {
      groups[anchors[best].size_index].x.push_back(
          pooled_features(integral, anchors[best].box, config.pool));
      groups[anchors[best].size_index].t.push_back(1.0);
    }
  }

  std::mt19937_64 rng(seed);
  for (const Image& image : negatives) {
    const auto anchors = build_anchor_grid(image.width(), image.height(), config.anchors);
    if (anchors.empty()) continue;
    const IntegralImage integral(image);
    const std::size_t take =
        std::min<std::size_t>(anchors.size(), std::max(config.negatives_per_image, 1));
    for (std::uint64_t idx : sample_indices(rng, anchors.size(), take)) {
      groups[anchors[idx].size_index].x.push_back(
          pooled_features(integral, anchors[idx].box, config.pool));
      groups[anchors[idx].size_index].t.push_back(0.0);
    }
  }

  model.weights.assign(sizes, std::vector<double>(dim, 0.0));
  model.biases.assign(sizes, 0.0);

  // Per-group smoothness bound: the mean logistic loss has Hessian norm at
  // most max ||x,1||^2 / 4, plus l2 for the ridge term; step 1/L makes
  // every full-batch step non-increasing.
  std::vector<double> steps(sizes, 0.0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < sizes; ++g) {
    total += groups[g].t.size();
    if (groups[g].t.empty()) {
      model.biases[g] = -10.0;  // untrained size: score ~0 instead of 0.5
      continue;
    }
    double max_sq = 0.0;
    for (const auto& x : groups[g].x) {
      double sq = 1.0;
      for (double v : x) sq += v * v;
      max_sq = std::max(max_sq, sq);
    }
    steps[g] = 1.0 / (max_sq / 4.0 + config.l2);
  }
  if (total == 0) throw Error("train_toy_detector: no training anchors produced");

  model.loss_trace.reserve(config.iterations + 1);
  std::vector<double> z;
  for (int it = 0; it <= config.iterations; ++it) {
    double loss_sum = 0.0;
    for (std::size_t g = 0; g < sizes; ++g) {
      Group& grp = groups[g];
      const std::size_t n = grp.t.size();
      if (n == 0) continue;
      auto& w = model.weights[g];
      double& b = model.biases[g];
      z.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = linear_score(w, b, grp.x[i]);
        loss_sum += logistic_loss(z[i], grp.t[i]);
      }
      double ridge = 0.0;
      for (double v : w) ridge += v * v;
      loss_sum += config.l2 / 2.0 * ridge * n;  // weighted so the mean below is consistent
      if (it == config.iterations) continue;    // record final loss, no step

      std::vector<double> grad_w(dim, 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = sigmoid(z[i]) - grp.t[i];
        grad_b += r;
        const auto& x = grp.x[i];
        for (std::size_t d = 0; d < dim; ++d) grad_w[d] += r * x[d];
      }
      for (std::size_t d = 0; d < dim; ++d) {
        w[d] -= steps[g] * (grad_w[d] / n + config.l2 * w[d]);
      }
      b -= steps[g] * (grad_b / n);
    }
    const double mean_loss = loss_sum / total;
    if (!std::isfinite(mean_loss)) {
      throw Error("train_toy_detector: non-finite loss at iteration " + std::to_string(it));
    }
    model.loss_trace.push_back(mean_loss);
  }

  std::size_t recalled = 0;
  for (const TrainSample& sample : positives) {
    for (const Detection& d : detect(model, sample.image, model.threshold)) {
      if (iou(d.box, sample.box) >= 0.5) {
        ++recalled;
        break;
      }
    }
  }
  model.underfit =
      static_cast<double>(recalled) < config.min_recall * static_cast<double>(positives.size());
  return model;
}

void save_detector(const std::filesystem::path& path, const ToyDetectorModel& model) {
  nlohmann::json j = {
      {"stride", model.anchors.stride},
      {"box_sizes", model.anchors.box_sizes},
      {"pool", model.pool},
      {"class_id", model.class_id},
      {"threshold", model.threshold},
      {"nms_iou", model.nms_iou},
      {"seed", model.seed},
      {"weights", model.weights},
      {"biases", model.biases},
      {"loss_trace", model.loss_trace},
      {"underfit", model.underfit},
  };
  std::ofstream out(path);
  if (!out) throw IoError("save_detector: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

ToyDetectorModel load_detector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_detector: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_detector: invalid JSON in " + path.string() + ": " + e.what());
  }
  ToyDetectorModel model;
  for (const char* key : {"stride", "box_sizes", "pool", "class_id", "threshold", "nms_iou",
                          "seed", "weights", "biases"}) {
    if (!j.contains(key)) {
      throw ParseError("load_detector: " + path.string() + " missing key '" + key + "'");
    }
  }
  model.anchors.stride = j["stride"].get<int>();
  model.anchors.box_sizes = j["box_sizes"].get<std::vector<std::pair<int, int>>>();
  model.pool = j["pool"].get<int>();
  model.class_id = j["class_id"].get<int>();
  model.threshold = j["threshold"].get<double>();
  model.nms_iou = j["nms_iou"].get<double>();
  model.seed = j["seed"].get<std::uint64_t>();
  model.weights = j["weights"].get<std::vector<std::vector<double>>>();
  model.biases = j["biases"].get<std::vector<double>>();
  if (j.contains("loss_trace")) model.loss_trace = j["loss_trace"].get<std::vector<double>>();
  if (j.contains("underfit")) model.underfit = j["underfit"].get<bool>();

  if (model.weights.size() != model.anchors.box_sizes.size() ||
      model.biases.size() != model.anchors.box_sizes.size()) {
    throw ParseError("load_detector: weight/bias count does not match box_sizes");
  }
  for (const auto& w : model.weights) {
    if (w.size() != model.feature_size()) {
      throw ParseError("load_detector: weight vector size does not match pool");
    }
    for (double v : w) {
      if (!std::isfinite(v)) throw ParseError("load_detector: non-finite weight");
    }
  }
  return model;
}

}  // namespace dci

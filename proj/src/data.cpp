#include "lao/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "lao/kernels.hpp"

namespace lao {

const char* to_string(NormCertificate c) {
  switch (c) {
    case NormCertificate::None:
      return "none";
    case NormCertificate::L2Unit:
      return "L2_unit";
    case NormCertificate::LinfUnit:
      return "Linf_unit";
  }
  return "unknown";
}

FileFormat parse_file_format(const std::string& text) {
  if (text == "csv") return FileFormat::Csv;
  if (text == "sparse" || text == "sparse_index_value" || text == "libsvm") {
    return FileFormat::SparseIndexValue;
  }
  throw UsageError("unknown data format '" + text + "'");
}

// --- parsing ---------------------------------------------------------------

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw DataError("parse error at line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Accepts the typographic minus sign (U+2212) as '-'.
std::string normalize_minus(std::string line) {
  static const std::string kMinus = "\xE2\x88\x92";
  for (auto pos = line.find(kMinus); pos != std::string::npos; pos = line.find(kMinus, pos)) {
    line.replace(pos, kMinus.size(), "-");
  }
  return line;
}

double parse_real(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    parse_error(line, "invalid number '" + std::string(token) + "'");
  }
  return value;
}

std::size_t parse_index(std::string_view token, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value == 0) {
    parse_error(line, "invalid 1-based index '" + std::string(token) + "'");
  }
  return value;
}

struct RawExample {
  std::vector<std::pair<std::size_t, double>> entries;  // 0-based
  double label;
  std::size_t line;
};

}  // namespace

Dataset parse_dataset(std::istream& in, FileFormat format, std::optional<std::size_t> dim) {
  Dataset ds;
  std::string raw_line;
  std::size_t line_no = 0;

  if (format == FileFormat::Csv) {
    std::optional<std::size_t> width;
    while (std::getline(in, raw_line)) {
      ++line_no;
      const std::string line = normalize_minus(raw_line);
      if (trim(line).empty()) continue;
      std::vector<double> fields;
      std::string_view rest(line);
      for (;;) {
        const auto comma = rest.find(',');
        fields.push_back(parse_real(rest.substr(0, comma), line_no));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (fields.size() < 2) parse_error(line_no, "need at least one attribute and a label");
      if (!width) width = fields.size();
      if (fields.size() != *width) {
        throw DataError("inconsistent dimension at line " + std::to_string(line_no));
      }
      const double y = fields.back();
      fields.pop_back();
      ds.examples.emplace_back(std::move(fields), y);
    }
    if (ds.examples.empty()) throw DataError("empty data file");
    ds.dim = *width - 1;
    if (dim && *dim != ds.dim) throw DataError("inconsistent dimension: file has " +
                                               std::to_string(ds.dim) + " attributes");
  } else {
    std::vector<RawExample> raw;
    std::size_t max_index = 0;
    while (std::getline(in, raw_line)) {
      ++line_no;
      const std::string line = normalize_minus(raw_line);
      std::istringstream tokens(line);
      std::string token;
      if (!(tokens >> token)) continue;
      RawExample ex{{}, parse_real(token, line_no), line_no};
      while (tokens >> token) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) parse_error(line_no, "expected idx:val, got '" + token + "'");
        const std::size_t index = parse_index(std::string_view(token).substr(0, colon), line_no);
        const double value = parse_real(std::string_view(token).substr(colon + 1), line_no);
        max_index = std::max(max_index, index);
        ex.entries.emplace_back(index - 1, value);
      }
      raw.push_back(std::move(ex));
    }
    if (raw.empty()) throw DataError("empty data file");
    ds.dim = dim.value_or(max_index);
    if (ds.dim == 0) throw DataError("could not infer a dimension");
    for (const RawExample& r : raw) {
      std::vector<double> x(ds.dim, 0.0);
      for (const auto& [index, value] : r.entries) {
        if (index >= ds.dim) {
          throw DataError("inconsistent dimension at line " + std::to_string(r.line) +
                          ": index " + std::to_string(index + 1) + " exceeds d=" +
                          std::to_string(ds.dim));
        }
        x[index] = value;
      }
      ds.examples.emplace_back(std::move(x), r.label);
    }
  }

  for (const Example& ex : ds.examples) ds.label_bound = std::max(ds.label_bound, std::fabs(ex.label()));
  return ds;
}

Dataset load(const std::filesystem::path& path, FileFormat format, std::optional<std::size_t> dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  return parse_dataset(in, format, dim);
}

void write_dataset(std::ostream& out, const Dataset& ds, FileFormat format) {
  char buf[32];
  auto put = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
  };
  for (const Example& ex : ds.examples) {
    const auto x = ex.attributes_unledgered();
    if (format == FileFormat::Csv) {
      for (double v : x) {
        put(v);
        out << ',';
      }
      put(ex.label());
    } else {
      put(ex.label());
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        out << ' ' << (i + 1) << ':';
        put(x[i]);
      }
    }
    out << '\n';
  }
}

// --- normalization ---------------------------------------------------------

namespace {

double attribute_norm(std::span<const double> x, NormCertificate target) {
  if (target == NormCertificate::L2Unit) return std::sqrt(kernels::sum_squares(x));
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

constexpr double kCertificateSlack = 1e-12;

}  // namespace

Dataset apply_scaling(const Dataset& ds, double attribute_scale, double label_scale) {
  Dataset out;
  out.dim = ds.dim;
  out.attribute_scale = ds.attribute_scale * attribute_scale;
  out.label_scale = ds.label_scale * label_scale;
  out.labels_clamped = ds.labels_clamped;
  out.examples.reserve(ds.size());
  for (const Example& ex : ds.examples) {
    std::vector<double> x(ex.attributes_unledgered().begin(), ex.attributes_unledgered().end());
    if (attribute_scale != 1.0) {
      for (double& v : x) v /= attribute_scale;
    }
    const double y = label_scale != 1.0 ? ex.label() / label_scale : ex.label();
    out.label_bound = std::max(out.label_bound, std::fabs(y));
    out.examples.emplace_back(std::move(x), y);
  }
  return out;
}

Dataset normalize(const Dataset& ds, NormCertificate target, double B) {
  if (ds.empty()) throw DataError("cannot normalize an empty dataset");
  if (target == NormCertificate::None) throw UsageError("normalize needs a target norm");
  if (!(B > 0.0)) throw UsageError("B must be > 0");

  double max_norm = 0.0;
  double max_label = 0.0;
  for (const Example& ex : ds.examples) {
    max_norm = std::max(max_norm, attribute_norm(ex.attributes_unledgered(), target));
    max_label = std::max(max_label, std::fabs(ex.label()));
  }
  const double attribute_scale = max_norm > 1.0 ? max_norm : 1.0;
  const double label_scale = std::max(1.0, max_label / B);

  Dataset out = apply_scaling(ds, attribute_scale, label_scale);
  bool certified = true;
  for (const Example& ex : out.examples) {
    if (attribute_norm(ex.attributes_unledgered(), target) > 1.0 + kCertificateSlack) {
      certified = false;
      break;
    }
  }
  out.certificate = certified ? target : NormCertificate::None;
  return out;
}

// --- splitting -------------------------------------------------------------

std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  return idx;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.dim = ds.dim;
  out.certificate = ds.certificate;
  out.attribute_scale = ds.attribute_scale;
  out.label_scale = ds.label_scale;
  out.labels_clamped = ds.labels_clamped;
  out.examples.reserve(indices.size());
  for (std::size_t i : indices) {
    out.examples.push_back(ds.examples.at(i));
    out.label_bound = std::max(out.label_bound, std::fabs(out.examples.back().label()));
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  if (n < 2) throw DataError("split needs at least two examples");
  std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  RngStream rng(seed);
  const auto order = shuffled_indices(n, rng);
  const std::span<const std::size_t> all(order);
  return {subset(ds, all.subspan(n_test)), subset(ds, all.first(n_test))};
}

std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t folds,
                                               std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (folds < 2) throw UsageError("kfold needs at least 2 folds");
  if (folds > n) throw DataError("more folds than examples");

  RngStream rng(seed);
  const auto order = shuffled_indices(n, rng);
  std::vector<std::pair<Dataset, Dataset>> out;
  out.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * n / folds;
    const std::size_t hi = (f + 1) * n / folds;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - (hi - lo));
    train_idx.insert(train_idx.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
    train_idx.insert(train_idx.end(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end());
    const std::vector<std::size_t> validate_idx(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                                order.begin() + static_cast<std::ptrdiff_t>(hi));
    out.emplace_back(subset(ds, train_idx), subset(ds, validate_idx));
  }
  return out;
}

// --- synthetic problems ----------------------------------------------------

SyntheticData synth(const SyntheticSpec& spec) {
  if (spec.d == 0) throw UsageError("synthetic d must be >= 1");
  if (spec.count == 0) throw UsageError("synthetic count must be >= 1");
  if (spec.sparsity > spec.d) throw UsageError("sparsity exceeds d");
  if (!(spec.B > 0.0)) throw UsageError("B must be > 0");
  if (!(spec.sigma >= 0.0)) throw UsageError("sigma must be >= 0");

  RngStream rng(spec.seed);
  const std::size_t d = spec.d;
  const std::size_t nonzeros = spec.sparsity == 0 ? d : spec.sparsity;

  Regressor truth{std::vector<double>(d, 0.0), spec.norm_kind, spec.B};
  const auto support = shuffled_indices(d, rng);
  for (std::size_t s = 0; s < nonzeros; ++s) {
    double v = rng.gaussian();
    while (v == 0.0) v = rng.gaussian();
    truth.weights[support[s]] = v;
  }
  kernels::scale(spec.B / truth.norm(), truth.weights);

  SyntheticData out;
  out.true_w = std::move(truth);
  Dataset& ds = out.dataset;
  ds.dim = d;
  ds.certificate =
      spec.norm_kind == NormKind::L2 ? NormCertificate::L2Unit : NormCertificate::LinfUnit;
  ds.examples.reserve(spec.count);

  std::vector<double> x(d);
  for (std::size_t t = 0; t < spec.count; ++t) {
    if (spec.norm_kind == NormKind::L2) {
      double sq = 0.0;
      do {
        for (double& v : x) v = rng.gaussian();
        sq = kernels::sum_squares(x);
      } while (sq == 0.0);
      const double radius = std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
      kernels::scale(radius / std::sqrt(sq), x);
    } else {
      for (double& v : x) v = 2.0 * rng.uniform01() - 1.0;
    }
    double y = out.true_w.predict(x);
    if (spec.sigma > 0.0) y += spec.sigma * rng.gaussian();
    if (std::fabs(y) > spec.B) {
      y = std::clamp(y, -spec.B, spec.B);
      ++ds.labels_clamped;
    }
    ds.label_bound = std::max(ds.label_bound, std::fabs(y));
    ds.examples.emplace_back(x, y);
  }
  return out;
}

// --- regressor files -------------------------------------------------------

void write_regressor(std::ostream& out, const Regressor& w) {
  char buf[32];
  auto line = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
    out << '\n';
  };
  out << w.dim() << '\n' << to_string(w.norm_kind) << '\n';
  line(w.radius);
  for (double v : w.weights) line(v);
}

Regressor read_regressor(std::istream& in) {
  std::string token;
  std::size_t line = 0;
  auto next = [&]() -> std::string_view {
    if (!std::getline(in, token)) throw DataError("truncated regressor file");
    ++line;
    return trim(token);
  };
  Regressor w;
  const std::string dim_text(next());
  std::size_t d = 0;
  const auto [ptr, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), d);
  if (ec != std::errc() || ptr != dim_text.data() + dim_text.size() || d == 0) {
    parse_error(line, "invalid dimension");
  }
  w.norm_kind = parse_norm_kind(std::string(next()));
  w.radius = parse_real(next(), line);
  w.weights.resize(d);
  for (double& v : w.weights) v = parse_real(next(), line);
  return w;
}

}  // namespace lao

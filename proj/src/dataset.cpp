#include "hullfit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hullfit/rng.hpp"
#include "json.hpp"

namespace hullfit {

Task parse_task(const std::string& name) {
  if (name == "reg" || name == "regression") return Task::regression;
  if (name == "cls" || name == "classification") return Task::classification;
  throw std::invalid_argument("unknown task '" + name + "' (use reg or cls)");
}

std::string task_name(Task t) {
  return t == Task::regression ? "regression" : "classification";
}

std::size_t Dataset::output_dim() const {
  return task == Task::regression ? 1 : num_classes;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row,
                  const std::string& col) {
  const std::string s = trim(raw);
  std::size_t pos = 0;
  double v = 0.0;
  bool bad = s.empty();
  if (!bad) {
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      bad = true;
    }
  }
  if (bad || pos != s.size() || !std::isfinite(v))
    throw std::runtime_error("non-numeric feature cell '" + raw + "' at row " +
                             std::to_string(row) + ", column " + col);
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 Task task) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  // Target by name, falling back to a 0-based index.
  std::size_t target = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == target_column) target = i;
  if (target == header.size()) {
    try {
      std::size_t pos = 0;
      const unsigned long idx = std::stoul(target_column, &pos);
      if (pos == target_column.size() && idx < header.size()) target = idx;
    } catch (const std::exception&) {
    }
  }
  if (target == header.size())
    throw std::runtime_error("target column '" + target_column +
                             "' not found in header");

  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) +
                               " cells, header has " +
                               std::to_string(header.size()));
    std::vector<double> feats;
    feats.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], row_no, trim(header[c]));
      if (c == target)
        targets.push_back(v);
      else
        feats.push_back(v);
    }
    rows.push_back(std::move(feats));
  }

  Dataset d;
  d.task = task;
  d.features = Matrix(rows.size(), header.size() - 1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), d.features.row(r).begin());
  d.targets = std::move(targets);
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != target) d.feature_names.push_back(trim(header[c]));

  if (task == Task::classification) {
    double max_label = -1.0;
    for (double y : d.targets) {
      if (y != std::floor(y) || y < 0.0)
        throw std::runtime_error(
            "classification target must be a nonnegative integer, got " +
            std::to_string(y));
      max_label = std::max(max_label, y);
    }
    d.num_classes = d.targets.empty()
                        ? 0
                        : static_cast<std::size_t>(max_label) + 1;
  }
  return d;
}

std::pair<Dataset, NormStats> normalize(const Dataset& d) {
  const std::size_t n = d.size();
  const std::size_t dim = d.dim();
  if (n < 2) throw std::invalid_argument("normalize needs at least 2 rows");

  NormStats stats;
  stats.columns = d.feature_names;
  if (stats.columns.size() != dim) {
    stats.columns.resize(dim);
    for (std::size_t c = 0; c < dim; ++c)
      stats.columns[c] = "f" + std::to_string(c);
  }
  stats.mean.resize(dim);
  stats.std_dev.resize(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    double mu = 0.0;
    for (std::size_t r = 0; r < n; ++r) mu += d.features(r, c);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double e = d.features(r, c) - mu;
      var += e * e;
    }
    var /= static_cast<double>(n);  // population convention
    const double sd = std::sqrt(var);
    stats.mean[c] = mu;
    stats.std_dev[c] = sd > 0.0 ? sd : 1.0;
  }
  return {apply_normalization(d, stats), stats};
}

Dataset apply_normalization(const Dataset& d, const NormStats& stats) {
  if (stats.mean.size() != d.dim())
    throw std::invalid_argument("normalization stats have " +
                                std::to_string(stats.mean.size()) +
                                " columns, dataset has " +
                                std::to_string(d.dim()));
  Dataset out = d;
  for (std::size_t c = 0; c < d.dim(); ++c) {
    const double mu = stats.mean[c];
    const double inv = 1.0 / stats.std_dev[c];
    for (std::size_t r = 0; r < d.size(); ++r)
      out.features(r, c) = (d.features(r, c) - mu) * inv;
  }
  return out;
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.task = d.task;
  out.num_classes = d.num_classes;
  out.feature_names = d.feature_names;
  out.features = Matrix(idx.size(), d.dim());
  out.targets.resize(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy(d.features.row(idx[r]).begin(), d.features.row(idx[r]).end(),
              out.features.row(r).begin());
    out.targets[r] = d.targets[idx[r]];
  }
  return out;
}

}  // namespace

Split split(const Dataset& d, const SplitSpec& s) {
  if (!(s.test_fraction > 0.0 && s.test_fraction < 1.0) ||
      !(s.val_fraction > 0.0 && s.val_fraction < 1.0))
    throw std::invalid_argument("split fractions must lie in (0, 1)");
  const std::size_t n = d.size();
  if (n < 5) throw std::invalid_argument("split needs at least 5 rows");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(s.seed);
  rng.shuffle(order);

  auto carve = [](std::size_t total, double frac) {
    std::size_t k = static_cast<std::size_t>(
        std::floor(static_cast<double>(total) * frac));
    if (k == 0) k = 1;  // every held-out split keeps at least one row
    return k;
  };
  const std::size_t n_test = carve(n, s.test_fraction);
  const std::size_t n_val = carve(n - n_test, s.val_fraction);

  Split out;
  out.test_idx.assign(order.begin(), order.begin() + n_test);
  out.val_idx.assign(order.begin() + n_test, order.begin() + n_test + n_val);
  out.train_idx.assign(order.begin() + n_test + n_val, order.end());
  out.train = take_rows(d, out.train_idx);
  out.val = take_rows(d, out.val_idx);
  out.test = take_rows(d, out.test_idx);
  return out;
}

std::string NormStats::to_json() const {
  nlohmann::json j;
  for (std::size_t c = 0; c < mean.size(); ++c) {
    const std::string key =
        c < columns.size() ? columns[c] : "f" + std::to_string(c);
    j[key] = {{"mean", mean[c]}, {"std", std_dev[c]}};
  }
  return j.dump(2);
}

NormStats NormStats::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  NormStats s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    s.columns.push_back(it.key());
    s.mean.push_back(it.value().at("mean").get<double>());
    s.std_dev.push_back(it.value().at("std").get<double>());
  }
  return s;
}

NormStats NormStats::reordered(const std::vector<std::string>& order) const {
  if (order.size() != columns.size())
    throw std::invalid_argument(
        "normalization stats cover " + std::to_string(columns.size()) +
        " columns, dataset has " + std::to_string(order.size()));
  NormStats out;
  out.columns = order;
  out.mean.resize(order.size());
  out.std_dev.resize(order.size());
  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto it = std::find(columns.begin(), columns.end(), order[c]);
    if (it == columns.end())
      throw std::invalid_argument("no normalization stats for column '" +
                                  order[c] + "'");
    const std::size_t k = static_cast<std::size_t>(it - columns.begin());
    out.mean[c] = mean[k];
    out.std_dev[c] = std_dev[k];
  }
  return out;
}

}  // namespace hullfit

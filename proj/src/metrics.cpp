#include "clc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "clc/errors.hpp"

namespace clc {

namespace {

constexpr const char* kHeaderComment =
    "# clc-metrics v1 layout=%s; n_selected and n_low/n_high columns are per-epoch totals "
    "over all mini-batches; empty cell = not applicable";

enum class Column {
  epoch, test_accuracy, test_accuracy_g, train_supervision_precision, n_selected,
  n_low_f, n_high_f, n_low_g, n_high_g, mean_entropy_correct, mean_entropy_incorrect,
  mean_entropy_all, ce_low, ent_own, ce_high, train_loss, train_noisy_accuracy, gamma,
  low_eval_count, low_eval_precision
};

struct ColumnDef {
  Column id;
  const char* name;
};

constexpr ColumnDef kAllColumns[] = {
    {Column::epoch, "epoch"},
    {Column::test_accuracy, "test_accuracy"},
    {Column::test_accuracy_g, "test_accuracy_g"},
    {Column::train_supervision_precision, "train_supervision_precision"},
    {Column::n_selected, "n_selected"},
    {Column::n_low_f, "n_low_f"},
    {Column::n_high_f, "n_high_f"},
    {Column::n_low_g, "n_low_g"},
    {Column::n_high_g, "n_high_g"},
    {Column::mean_entropy_correct, "mean_entropy_correct"},
    {Column::mean_entropy_incorrect, "mean_entropy_incorrect"},
    {Column::mean_entropy_all, "mean_entropy_all"},
    {Column::ce_low, "ce_low"},
    {Column::ent_own, "ent_own"},
    {Column::ce_high, "ce_high"},
    {Column::train_loss, "train_loss"},
    {Column::train_noisy_accuracy, "train_noisy_accuracy"},
    {Column::gamma, "gamma"},
    {Column::low_eval_count, "low_eval_count"},
    {Column::low_eval_precision, "low_eval_precision"},
};

bool in_layout(Column c, MetricsLayout layout) {
  const bool dual = layout == MetricsLayout::dual || layout == MetricsLayout::clc;
  const bool corrected = layout == MetricsLayout::slc || layout == MetricsLayout::clc;
  switch (c) {
    case Column::test_accuracy_g: return dual;
    case Column::n_low_f:
    case Column::n_high_f:
    case Column::ce_low:
    case Column::ent_own:
    case Column::ce_high: return corrected;
    case Column::n_low_g:
    case Column::n_high_g: return layout == MetricsLayout::clc;
    default: return true;
  }
}

std::vector<ColumnDef> columns_of(MetricsLayout layout) {
  std::vector<ColumnDef> out;
  for (const auto& c : kAllColumns)
    if (in_layout(c.id, layout)) out.push_back(c);
  return out;
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; }
std::string cell(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string{};
}

std::string render(const EpochMetrics& m, Column c) {
  switch (c) {
    case Column::epoch: return std::to_string(m.epoch);
    case Column::test_accuracy: return format_real(m.test_accuracy);
    case Column::test_accuracy_g: return cell(m.test_accuracy_g);
    case Column::train_supervision_precision: return cell(m.train_supervision_precision);
    case Column::n_selected: return std::to_string(m.n_selected);
    case Column::n_low_f: return cell(m.n_low_f);
    case Column::n_high_f: return cell(m.n_high_f);
    case Column::n_low_g: return cell(m.n_low_g);
    case Column::n_high_g: return cell(m.n_high_g);
    case Column::mean_entropy_correct: return cell(m.mean_entropy_correct);
    case Column::mean_entropy_incorrect: return cell(m.mean_entropy_incorrect);
    case Column::mean_entropy_all: return format_real(m.mean_entropy_all);
    case Column::ce_low: return cell(m.ce_low);
    case Column::ent_own: return cell(m.ent_own);
    case Column::ce_high: return cell(m.ce_high);
    case Column::train_loss: return format_real(m.train_loss);
    case Column::train_noisy_accuracy: return format_real(m.train_noisy_accuracy);
    case Column::gamma: return cell(m.gamma);
    case Column::low_eval_count: return cell(m.low_eval_count);
    case Column::low_eval_precision: return cell(m.low_eval_precision);
  }
  return {};
}

double parse_real(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidInput("metrics.csv: bad real '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidInput("metrics.csv: bad count '" + s + "'");
  return v;
}

std::optional<double> opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real(s);
}

std::optional<std::size_t> opt_count(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_count(s);
}

void assign(EpochMetrics& m, Column c, const std::string& s) {
  switch (c) {
    case Column::epoch: m.epoch = static_cast<int>(parse_count(s)); break;
    case Column::test_accuracy: m.test_accuracy = parse_real(s); break;
    case Column::test_accuracy_g: m.test_accuracy_g = opt_real(s); break;
    case Column::train_supervision_precision: m.train_supervision_precision = opt_real(s); break;
    case Column::n_selected: m.n_selected = parse_count(s); break;
    case Column::n_low_f: m.n_low_f = opt_count(s); break;
    case Column::n_high_f: m.n_high_f = opt_count(s); break;
    case Column::n_low_g: m.n_low_g = opt_count(s); break;
    case Column::n_high_g: m.n_high_g = opt_count(s); break;
    case Column::mean_entropy_correct: m.mean_entropy_correct = opt_real(s); break;
    case Column::mean_entropy_incorrect: m.mean_entropy_incorrect = opt_real(s); break;
    case Column::mean_entropy_all: m.mean_entropy_all = parse_real(s); break;
    case Column::ce_low: m.ce_low = opt_real(s); break;
    case Column::ent_own: m.ent_own = opt_real(s); break;
    case Column::ce_high: m.ce_high = opt_real(s); break;
    case Column::train_loss: m.train_loss = parse_real(s); break;
    case Column::train_noisy_accuracy: m.train_noisy_accuracy = parse_real(s); break;
    case Column::gamma: m.gamma = opt_real(s); break;
    case Column::low_eval_count: m.low_eval_count = opt_count(s); break;
    case Column::low_eval_precision: m.low_eval_precision = opt_real(s); break;
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  cells.push_back(current);
  return cells;
}

double round6(double v) { return parse_real(format_real(v)); }
std::optional<double> round6(const std::optional<double>& v) {
  return v ? std::optional<double>(round6(*v)) : std::nullopt;
}

}  // namespace

std::string to_string(MetricsLayout layout) {
  switch (layout) {
    case MetricsLayout::single: return "single";
    case MetricsLayout::dual: return "dual";
    case MetricsLayout::slc: return "slc";
    case MetricsLayout::clc: return "clc";
  }
  return "unknown";
}

MetricsLayout parse_metrics_layout(const std::string& name) {
  for (auto l : {MetricsLayout::single, MetricsLayout::dual, MetricsLayout::slc, MetricsLayout::clc})
    if (to_string(l) == name) return l;
  throw InvalidInput("unknown metrics layout '" + name + "'");
}

std::vector<std::string> metrics_columns(MetricsLayout layout) {
  std::vector<std::string> names;
  for (const auto& c : columns_of(layout)) names.emplace_back(c.name);
  return names;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 6);
  if (ec != std::errc{}) throw InvalidInput("format_real: value out of range");
  return std::string(buf, ptr);
}

void write_metrics_csv(std::ostream& out, MetricsLayout layout,
                       std::span<const EpochMetrics> history) {
  char comment[256];
  std::snprintf(comment, sizeof(comment), kHeaderComment, to_string(layout).c_str());
  out << comment << '\n';
  const auto cols = columns_of(layout);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
  out << '\n';
  for (const auto& m : history) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << render(m, cols[i].id);
    out << '\n';
  }
}

std::pair<MetricsLayout, std::vector<EpochMetrics>> parse_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# clc-metrics v1 layout=", 0) != 0)
    throw InvalidInput("metrics.csv: missing header comment");
  const auto start = std::string("# clc-metrics v1 layout=").size();
  const auto layout = parse_metrics_layout(line.substr(start, line.find(';') - start));
  const auto cols = columns_of(layout);
  if (!std::getline(in, line) || split_csv_line(line) != metrics_columns(layout))
    throw InvalidInput("metrics.csv: column header does not match layout");
  std::vector<EpochMetrics> history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != cols.size()) throw InvalidInput("metrics.csv: wrong cell count");
    EpochMetrics m;
    for (std::size_t i = 0; i < cols.size(); ++i) assign(m, cols[i].id, cells[i]);
    history.push_back(m);
  }
  return {layout, std::move(history)};
}

EpochMetrics rounded(const EpochMetrics& m) {
  EpochMetrics r = m;
  r.test_accuracy = round6(m.test_accuracy);
  r.test_accuracy_g = round6(m.test_accuracy_g);
  r.train_supervision_precision = round6(m.train_supervision_precision);
  r.mean_entropy_correct = round6(m.mean_entropy_correct);
  r.mean_entropy_incorrect = round6(m.mean_entropy_incorrect);
  r.mean_entropy_all = round6(m.mean_entropy_all);
  r.ce_low = round6(m.ce_low);
  r.ent_own = round6(m.ent_own);
  r.ce_high = round6(m.ce_high);
  r.train_loss = round6(m.train_loss);
  r.train_noisy_accuracy = round6(m.train_noisy_accuracy);
  r.gamma = round6(m.gamma);
  r.low_eval_precision = round6(m.low_eval_precision);
  return r;
}

std::optional<double> supervision_precision(std::span<const Label> effective_targets,
                                            std::span<const Label> clean_labels) {
  if (effective_targets.size() != clean_labels.size())
    throw InvalidInput("supervision_precision: length mismatch");
  std::size_t supervised = 0;
  std::size_t matching = 0;
  for (std::size_t n = 0; n < effective_targets.size(); ++n) {
    if (effective_targets[n] < 0) continue;
    ++supervised;
    if (effective_targets[n] == clean_labels[n]) ++matching;
  }
  if (supervised == 0) return std::nullopt;
  return static_cast<double>(matching) / static_cast<double>(supervised);
}

Summary summarize(std::span<const EpochMetrics> history, std::size_t last_k) {
  if (last_k == 0 || last_k > history.size())
    throw InvalidInput("summarize: last_k must lie in [1, history length]");
  Summary s;
  s.last_k = last_k;
  const auto tail = history.subspan(history.size() - last_k);
  double acc = 0.0, acc_g = 0.0, prec = 0.0, selected = 0.0;
  std::size_t n_prec = 0;
  bool has_g = true;
  for (const auto& m : tail) {
    acc += m.test_accuracy;
    selected += static_cast<double>(m.n_selected);
    if (m.test_accuracy_g)
      acc_g += *m.test_accuracy_g;
    else
      has_g = false;
    if (m.train_supervision_precision) {
      prec += *m.train_supervision_precision;
      ++n_prec;
    }
  }
  const auto k = static_cast<double>(last_k);
  s.test_accuracy = acc / k;
  if (has_g) s.test_accuracy_g = acc_g / k;
  if (n_prec > 0) s.supervision_precision = prec / static_cast<double>(n_prec);
  s.n_selected = selected / k;
  for (const auto& m : history) s.peak_test_accuracy = std::max(s.peak_test_accuracy, m.test_accuracy);
  s.final_test_accuracy = history.back().test_accuracy;
  return s;
}

}  // namespace clc

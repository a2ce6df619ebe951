#include "fgo/app/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace fgo::app {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_training_log(std::ostream& out, const TrainingLog& log) {
  out << kTrainingLogHeader << '\n';
  for (const auto& s : log.steps) {
    out << s.step << ',' << format_double(s.mean_reward) << ',' << format_double(s.accuracy)
        << ',' << format_double(s.mean_length) << ',' << format_double(s.mean_entropy) << ','
        << s.invalid_groups_step << ',' << s.invalid_groups_cum << '\n';
  }
}

std::string training_log_csv(const TrainingLog& log) {
  std::ostringstream ss;
  write_training_log(ss, log);
  return ss.str();
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number '" + s + "' in training log");
  }
  return v;
}

}  // namespace

std::vector<StepRecord> read_training_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrainingLogHeader) {
    throw std::runtime_error("training log header mismatch");
  }
  std::vector<StepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("training log row has wrong arity");
    StepRecord r;
    r.step = static_cast<int>(parse_double(cells[0]));
    r.mean_reward = parse_double(cells[1]);
    r.accuracy = parse_double(cells[2]);
    r.mean_length = parse_double(cells[3]);
    r.mean_entropy = parse_double(cells[4]);
    r.invalid_groups_step = static_cast<int>(parse_double(cells[5]));
    r.invalid_groups_cum = static_cast<long long>(parse_double(cells[6]));
    out.push_back(r);
  }
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row arity mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace fgo::app

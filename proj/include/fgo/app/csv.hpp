#ifndef FGO_APP_CSV_HPP_
#define FGO_APP_CSV_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fgo/trainer.hpp"

namespace fgo::app {

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

inline constexpr const char* kTrainingLogHeader =
    "step,mean_reward,accuracy,mean_length,mean_entropy,invalid_groups_step,"
    "invalid_groups_cum";

void write_training_log(std::ostream& out, const TrainingLog& log);
std::string training_log_csv(const TrainingLog& log);

// Parses a training_log.csv back into step records; throws
// std::runtime_error on a malformed file.
std::vector<StepRecord> read_training_log(std::istream& in);

// Minimal table writer: fixed header, one row per call, '\n' terminated.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace fgo::app

#endif  // FGO_APP_CSV_HPP_

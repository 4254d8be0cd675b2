#ifndef AIRFL_REPORT_HPP_
#define AIRFL_REPORT_HPP_

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace airfl {

// Shortest round-trip formatting so identical runs produce identical bytes.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CsvRow {
  std::string experiment;
  std::string scheme;
  std::uint64_t seed = 0;
  int round = 0;
  double objective_u = 0.0;
  double mse = 0.0;
  int num_selected = 0;
  double min_channel_gain = 0.0;
  double beta = 0.0;
  double training_loss = 0.0;
  double test_error = 0.0;
  double wall_ms = 0.0;  // kept zero in deterministic outputs
};

// Fixed-order CSV emitter. The header is written on construction.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {
    out_ << "experiment,scheme,seed,round,objective_U,mse,num_selected,"
            "min_channel_gain,beta,training_loss,test_error,wall_ms\n";
  }

  void write(const CsvRow& r) {
    out_ << r.experiment << ',' << r.scheme << ',' << r.seed << ',' << r.round << ','
         << format_real(r.objective_u) << ',' << format_real(r.mse) << ','
         << r.num_selected << ',' << format_real(r.min_channel_gain) << ','
         << format_real(r.beta) << ',' << format_real(r.training_loss) << ','
         << format_real(r.test_error) << ',' << format_real(r.wall_ms) << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace airfl

#endif  // AIRFL_REPORT_HPP_

#pragma once

#include <map>
#include <string>
#include <vector>

#include "entlab/contraction.hpp"
#include "entlab/measures.hpp"
#include "entlab/simulator.hpp"

namespace entlab {
namespace io {

void write_measure_csv(const GridMeasure& g, const std::string& path);
void write_ensemble_csv(const Ensemble& e, const std::string& path);
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
void write_curve_csv(const std::vector<std::pair<double, double>>& curve,
                     const std::string& path);

// rows: t_hi,t_lo,gamma,K,eta with a header line
std::vector<ScheduleEntry> read_schedule_csv(const std::string& path);
void write_schedule_csv(const std::vector<ScheduleEntry>& schedule,
                        const std::string& path);

// key = value lines, '#' comments; nested keys use dotted names
std::map<std::string, std::string> read_config(const std::string& path);

class Report {
  public:
    void kv(const std::string& key, double value);
    void kv(const std::string& key, const std::string& value);
    void check(const std::string& name, bool pass, const std::string& detail = "");
    bool all_passed() const { return failures_ == 0; }
    void write(const std::string& path) const;
    std::string str() const { return body_; }

  private:
    std::string body_;
    int failures_ = 0;
};

}  // namespace io
}  // namespace entlab

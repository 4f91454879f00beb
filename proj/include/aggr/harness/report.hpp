#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aggr/core/partition.hpp"

namespace aggr {

/// How a row is judged against its z-score.
enum class RowTest {
    two_sided, // |z| <= threshold
    below,     // z < -threshold, or the two sides are identical (mean and stderr both 0)
    info,      // reported only
};

struct StudyRow {
    std::string configuration;
    std::size_t n_paths = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double target = 0.0;
    double z = 0.0;
    RowTest test = RowTest::two_sided;
    double threshold = 3.0;
    bool pass = true;
};

class StudyReport {
public:
    explicit StudyReport(std::string label) : label_(std::move(label)) {}

    /// z = (mean - target) / stderr; a zero stderr gives z = 0 on an exact match and +-inf otherwise.
    StudyRow& add(std::string configuration, std::size_t n_paths, double mean, double stderr_, double target,
                  RowTest test, double threshold);

    const std::string& label() const noexcept { return label_; }
    const std::vector<StudyRow>& rows() const noexcept { return rows_; }
    bool passed() const noexcept;
    /// Appends another report's rows.
    void merge(const StudyReport& other);

private:
    std::string label_;
    std::vector<StudyRow> rows_;
};

/// `configuration,mean,stderr,target,z`; info rows leave target and z empty.
void write_report_csv(std::ostream& os, const StudyReport& report);
/// Aligned columns with n, the threshold and PASS/FAIL.
void write_report_text(std::ostream& os, const StudyReport& report);

/// Sample mean and its standard error sd / sqrt(n), summed in index order.
struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double stderr_ = 0.0;
};
SampleSummary summarize(std::span<const double> x);

/// Unbiased sample variance of x with its leave-one-out jackknife standard error.
struct VarianceEstimate {
    double variance = 0.0;
    double stderr_ = 0.0;
};
VarianceEstimate jackknife_variance(std::span<const double> x);
/// Var(x) - Var(y) for paired samples, jackknifed jointly.
VarianceEstimate jackknife_variance_difference(std::span<const double> x, std::span<const double> y);

/// `regular(N)` for equal spacing, `partition(N)` otherwise.
std::string describe_partition(const Partition& p);

} // namespace aggr

#include "aggr/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "aggr/core/error.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

StudyRow& StudyReport::add(std::string configuration, std::size_t n_paths, double mean, double stderr_,
                           double target, RowTest test, double threshold) {
    StudyRow r;
    r.configuration = std::move(configuration);
    r.n_paths = n_paths;
    r.mean = mean;
    r.stderr_ = stderr_;
    r.target = target;
    r.test = test;
    r.threshold = threshold;
    const double d = mean - target;
    if (stderr_ > 0.0)
        r.z = d / stderr_;
    else
        r.z = d == 0.0 ? 0.0 : std::copysign(INFINITY, d);
    switch (test) {
    case RowTest::two_sided: r.pass = std::abs(r.z) <= threshold; break;
    case RowTest::below: r.pass = r.z < -threshold || (d == 0.0 && stderr_ == 0.0); break;
    case RowTest::info: r.pass = true; break;
    }
    rows_.push_back(std::move(r));
    return rows_.back();
}

bool StudyReport::passed() const noexcept {
    return std::all_of(rows_.begin(), rows_.end(), [](const StudyRow& r) { return r.pass; });
}

void StudyReport::merge(const StudyReport& other) {
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

void write_report_csv(std::ostream& os, const StudyReport& report) {
    os << "configuration,mean,stderr,target,z\n";
    for (const auto& r : report.rows()) {
        os << csv_field(r.configuration) << ',' << format_double(r.mean) << ',' << format_double(r.stderr_) << ',';
        if (r.test != RowTest::info) os << format_double(r.target) << ',' << format_double(r.z);
        else os << ',';
        os << '\n';
    }
}

void write_report_text(std::ostream& os, const StudyReport& report) {
    std::size_t w = std::string("configuration").size();
    for (const auto& r : report.rows()) w = std::max(w, r.configuration.size());
    std::ostringstream out;
    out << report.label() << '\n';
    out << std::left << std::setw(static_cast<int>(w)) << "configuration" << std::right << std::setw(9) << "n"
        << std::setw(15) << "mean" << std::setw(13) << "stderr" << std::setw(15) << "target" << std::setw(10) << "z"
        << "  result\n";
    for (const auto& r : report.rows()) {
        out << std::left << std::setw(static_cast<int>(w)) << r.configuration << std::right << std::setw(9)
            << r.n_paths << std::scientific << std::setprecision(6) << std::setw(15) << r.mean << std::setprecision(3)
            << std::setw(13) << r.stderr_;
        if (r.test == RowTest::info) {
            out << std::setw(15) << "-" << std::setw(10) << "-" << "  info\n";
        } else {
            out << std::setprecision(6) << std::setw(15) << r.target << std::fixed << std::setprecision(2)
                << std::setw(10) << r.z << "  " << (r.pass ? "PASS" : "FAIL")
                << (r.test == RowTest::below ? " (z < -" : " (|z| <= ") << std::setprecision(1) << r.threshold
                << ")\n";
        }
        out.unsetf(std::ios::floatfield);
    }
    out << (report.passed() ? "all rows pass\n" : "some rows FAIL\n");
    os << out.str();
}

SampleSummary summarize(std::span<const double> x) {
    SampleSummary s;
    s.n = x.size();
    if (x.empty()) return s;
    double sum = 0.0;
    for (double v : x) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.n - 1);
        s.stderr_ = std::sqrt(s.variance / static_cast<double>(s.n));
    }
    return s;
}

namespace {

// Leave-one-out jackknife of Var(x) - Var(y); with y empty it is the jackknife of Var(x).
// s2_(i) moves by -n/((n-1)(n-2)) (d_i^2 - S/n), which gives the closed form below.
VarianceEstimate jackknife(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 3) throw ValidationError("jackknife needs at least three observations");
    if (!y.empty() && y.size() != n) throw ValidationError("paired samples differ in length");
    const double nd = static_cast<double>(n);
    const double mx = summarize(x).mean, my = y.empty() ? 0.0 : summarize(y).mean;
    std::vector<double> e(n);
    double se = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        e[i] = dx * dx;
        if (!y.empty()) {
            const double dy = y[i] - my;
            e[i] -= dy * dy;
        }
        se += e[i];
    }
    const double me = se / nd;
    double q = 0.0;
    for (double v : e) q += (v - me) * (v - me);
    return {se / (nd - 1.0), std::sqrt(nd * q / ((nd - 1.0) * (nd - 2.0) * (nd - 2.0)))};
}

} // namespace

VarianceEstimate jackknife_variance(std::span<const double> x) { return jackknife(x, {}); }

VarianceEstimate jackknife_variance_difference(std::span<const double> x, std::span<const double> y) {
    if (y.empty()) throw ValidationError("paired samples differ in length");
    return jackknife(x, y);
}

std::string describe_partition(const Partition& p) {
    const std::size_t n = p.intervals();
    const double h = p.horizon() / static_cast<double>(n);
    bool regular = true;
    for (std::size_t i = 1; i <= n && regular; ++i)
        regular = std::abs(p[i] - p[i - 1] - h) <= 1e-9 * h;
    return (regular ? "regular(" : "partition(") + std::to_string(n) + ")";
}

} // namespace aggr

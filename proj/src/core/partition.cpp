#include "aggr/core/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aggr/core/error.hpp"
#include "aggr/core/seed.hpp"

namespace aggr {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw ValidationError("partition needs at least two times");
    if (times_.front() != 0.0) throw ValidationError("partition must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !(times_[i] > times_[i - 1]))
            throw ValidationError("partition times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
}

Partition Partition::regular(double T, std::size_t n) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be positive");
    if (n == 0) throw ValidationError("partition needs N >= 1 intervals");
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n);
    t.back() = T;
    return Partition(std::move(t));
}

Partition Partition::random(double T, std::size_t n, const SeedSpec& seed) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be positive");
    if (n == 0) throw ValidationError("partition needs N >= 1 intervals");
    if (static_cast<double>(n) * kMinInterval >= T)
        throw ValidationError("too many intervals for the minimum interval length");
    Engine eng = make_engine(seed, 0x7061727469u);
    std::uniform_real_distribution<double> unif(0.0, T);
    std::vector<double> t(n + 1);
    for (;;) {
        t.front() = 0.0;
        t.back() = T;
        for (std::size_t i = 1; i < n; ++i) t[i] = unif(eng);
        std::sort(t.begin() + 1, t.end() - 1);
        bool ok = true;
        for (std::size_t i = 1; i <= n && ok; ++i) ok = t[i] - t[i - 1] >= kMinInterval;
        if (ok) return Partition(t);
    }
}

Partition refine(const Partition& p, std::size_t factor) {
    if (factor == 0) throw ValidationError("refinement factor must be >= 1");
    if (factor == 1) return p;
    const auto t = p.times();
    std::vector<double> out;
    out.reserve(p.intervals() * factor + 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double a = t[i], b = t[i + 1];
        out.push_back(a);
        for (std::size_t k = 1; k < factor; ++k)
            out.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(factor));
    }
    out.push_back(t.back());
    return Partition(std::move(out));
}

} // namespace aggr

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aggr {

/// Undiscounted OTM option prices on one expiry: puts for k <= forward, calls above.
class OptionChain {
public:
    /// Throws ValidationError on nonpositive forward/maturity, unsorted or nonpositive strikes,
    /// negative or non-finite prices and mismatched lengths. Soft problems go to warnings().
    OptionChain(double forward, double maturity, std::vector<double> strikes, std::vector<double> prices);

    double forward() const noexcept { return forward_; }
    double maturity() const noexcept { return maturity_; }
    const std::vector<double>& strikes() const noexcept { return strikes_; }
    const std::vector<double>& prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return strikes_.size(); }
    bool is_put(std::size_t i) const noexcept { return strikes_[i] <= forward_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    double forward_;
    double maturity_;
    std::vector<double> strikes_;
    std::vector<double> prices_;
    std::vector<std::string> warnings_;
};

/// `# forward=<f> maturity=<T>` then `strike,price` rows. ParseError carries the line number.
OptionChain read_chain_csv(std::istream& is);
void write_chain_csv(std::ostream& os, const OptionChain& chain);

} // namespace aggr

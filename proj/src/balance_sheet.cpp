#include "contagion/balance_sheet.hpp"

#include <algorithm>
#include <stdexcept>

namespace contagion {

void SystemParams::validate() const {
    if (!(interbank_ratio > 0.0) || !(interbank_ratio < 1.0))
        throw std::invalid_argument("interbank ratio must lie in (0,1)");
    if (!(gamma_shadow > 0.0) || !(gamma_shadow < 1.0))
        throw std::invalid_argument("shadow equity ratio must lie in (0,1)");
    if (!(gamma_regulated > 0.0) || !(gamma_regulated < 1.0))
        throw std::invalid_argument("regulated equity ratio must lie in (0,1)");
}

SynthesisResult synthesize(const WeightedNetwork& network, const SystemParams& params) {
    params.validate();
    const int n = network.topology.n_banks;
    const std::vector<double> loans = network.loans_made();
    const std::vector<double> borrowed = network.borrowings();

    SynthesisResult result;
    result.sheets.resize(static_cast<std::size_t>(n));
    double total_assets = 0.0;
    double total_loans = 0.0;
    for (int i = 0; i < n; ++i) {
        BalanceSheet& s = result.sheets[static_cast<std::size_t>(i)];
        const double gamma = network.topology.bank_class[static_cast<std::size_t>(i)] ==
                                     BankClass::Shadow
                                 ? params.gamma_shadow
                                 : params.gamma_regulated;
        const double l = loans[static_cast<std::size_t>(i)];
        const double b = borrowed[static_cast<std::size_t>(i)];
        // a = l/theta keeps the aggregate loan ratio on target; raised when
        // external assets would not cover net borrowings (a >= b) or deposits
        // would go negative (a >= b/(1-gamma), the binding one of the two)
        double a = std::max(l / params.interbank_ratio, b / (1.0 - gamma));
        if (a == 0.0) a = 1.0; // bank with no interbank position: unit external assets
        s.assets = a;
        s.interbank_loans = l;
        s.external_assets = a - l;
        s.equity = gamma * a;
        s.interbank_borrowings = b;
        s.deposits = a - s.equity - b;
        s.equity_ratio = gamma;
        total_assets += a;
        total_loans += l;
    }
    result.realized_interbank_ratio = total_assets > 0.0 ? total_loans / total_assets : 0.0;
    return result;
}

double average_gamma(std::span<const BalanceSheet> sheets) {
    if (sheets.empty()) throw std::invalid_argument("average_gamma: empty sheet list");
    double total_equity = 0.0;
    double total_assets = 0.0;
    for (const BalanceSheet& s : sheets) {
        total_equity += s.equity;
        total_assets += s.assets;
    }
    if (!(total_assets > 0.0)) throw std::invalid_argument("average_gamma: zero total assets");
    return total_equity / total_assets;
}

std::vector<BalanceSheet> homogenize(std::span<const BalanceSheet> sheets, double gamma_bar) {
    std::vector<BalanceSheet> out(sheets.begin(), sheets.end());
    for (BalanceSheet& s : out) {
        s.equity = gamma_bar * s.assets;
        s.deposits = s.assets - s.equity - s.interbank_borrowings;
        s.equity_ratio = gamma_bar;
    }
    return out;
}

std::vector<double> baseline_assets(const WeightedNetwork& network, double interbank_ratio) {
    if (!(interbank_ratio > 0.0) || !(interbank_ratio < 1.0))
        throw std::invalid_argument("interbank ratio must lie in (0,1)");
    const std::vector<double> loans = network.loans_made();
    const std::vector<double> borrowed = network.borrowings();
    std::vector<double> assets(loans.size());
    for (std::size_t i = 0; i < loans.size(); ++i)
        assets[i] = std::max(loans[i] / interbank_ratio, borrowed[i]);
    return assets;
}

} // namespace contagion
